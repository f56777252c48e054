"""Command-line front end.

Subcommands: ``consensus`` (run the pipeline on an ensemble file),
``metrics`` (compare two label files), ``simulate`` (synthetic recovery
experiments), and ``serve`` (run the collection service).

Exit codes: 0 success, 1 input error (bad flags, unreadable or invalid
files), 2 internal error.  Set CONSENSUS_LOG={error,info,debug} to control
log verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .consensus import ConsensusConfig, consensus, plurality_baseline
from .alignment import align_ensemble
from .consensus import compute_weights
from .errors import InputError
from .experiments import run_study
from .io_formats import (
    parse_ensemble,
    result_document,
    serialize_result_document,
)
from .metrics import (
    Partition,
    adjusted_rand_index,
    hubert_index,
    mirkin_index,
    rand_index,
)

log = logging.getLogger("crowdclust")


class _Parser(argparse.ArgumentParser):
    """argparse variant that raises instead of exiting, so usage problems
    map onto the documented input-error exit code."""

    def error(self, message):  # noqa: A002 - argparse signature
        raise InputError(message)


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _read_labels(path: str) -> list[int]:
    """Label file: a JSON array or whitespace/comma separated integers."""
    text = _read_bytes(path).decode("utf-8")
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            values = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(values, list):
            raise InputError(f"{path}: expected a JSON array of labels")
    else:
        values = stripped.replace(",", " ").split()
    labels = []
    for i, v in enumerate(values):
        try:
            labels.append(int(v))
        except (TypeError, ValueError):
            raise InputError(f"{path}: entry {i} ({v!r}) is not an integer") from None
    if not labels:
        raise InputError(f"{path}: no labels found")
    return labels


def _write_output(data: bytes, path: str | None) -> None:
    if path is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        Path(path).write_bytes(data)


def _cmd_consensus(args) -> int:
    ens = parse_ensemble(_read_bytes(args.input), format=args.format)
    cfg = ConsensusConfig(
        tolerance=args.tol, max_iterations=args.max_iter, damping=args.damping
    )
    result = consensus(ens, cfg)
    doc = result_document(result, ens, cfg)
    if args.baseline:
        aligned, report = align_ensemble(ens)
        weights = compute_weights(aligned, pairwise=report.pairwise_ari)
        plurality = plurality_baseline(aligned, weights)
        parts = ens.partitions()
        tau = Partition(result.labels, ens.num_clusters)
        plu = Partition(plurality, ens.num_clusters)
        doc["baseline"] = {
            "plurality_labels": list(plurality),
            "consensus_mean_ari": float(
                sum(adjusted_rand_index(tau, p) for p in parts) / len(parts)
            ),
            "plurality_mean_ari": float(
                sum(adjusted_rand_index(plu, p) for p in parts) / len(parts)
            ),
        }
    _write_output(serialize_result_document(doc), args.output)
    log.info("consensus over %d objects, %d workers", ens.num_objects,
             ens.num_solutions)
    return 0


def _cmd_metrics(args) -> int:
    a = _read_labels(args.a)
    b = _read_labels(args.b)
    k = max(max(a), max(b))
    u = Partition(tuple(a), k)
    v = Partition(tuple(b), k)
    values = [
        adjusted_rand_index(u, v),
        rand_index(u, v),
        mirkin_index(u, v),
        hubert_index(u, v),
    ]
    header = ["Adjusted Rand", "Rand", "MI", "HI"]
    print("  ".join(f"{h:>13}" for h in header))
    print("  ".join(f"{x:13.4f}" for x in values))
    return 0


def _cmd_simulate(args) -> int:
    summary = run_study(
        num_objects=args.objects,
        num_clusters=args.clusters,
        num_workers=args.workers,
        noise=args.noise,
        base_seed=args.seed,
        trials=args.trials,
    )
    print(json.dumps(_round_floats(summary), indent=2))
    return 0


def _round_floats(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_round_floats(v) for v in value]
    return value


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    addr = args.addr or os.environ.get("COLLECT_ADDR", "127.0.0.1:8000")
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise InputError(f"--addr must be HOST:PORT, got {addr!r}")
    data = args.data or os.environ.get("COLLECT_DATA", "collect-events.ndjson")
    app = create_app(data_path=data, static_dir=args.static)
    log.info("serving on %s (event log: %s)", addr, data)
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crowdclust", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("consensus", help="run the consensus pipeline on an ensemble file")
    p.add_argument("--input", required=True, help="ensemble file path")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--tol", type=float, default=ConsensusConfig.tolerance,
                   help="power-iteration convergence tolerance")
    p.add_argument("--max-iter", type=int, default=ConsensusConfig.max_iterations,
                   help="power-iteration cap")
    p.add_argument("--damping", type=float, default=ConsensusConfig.damping,
                   help="uniform blend for ergodicity")
    p.add_argument("--output", default=None, help="result path (default stdout)")
    p.add_argument("--baseline", action="store_true",
                   help="also report the weighted plurality baseline")
    p.set_defaults(func=_cmd_consensus)

    p = sub.add_parser("metrics", help="compare two label files")
    p.add_argument("--a", required=True, help="first label file")
    p.add_argument("--b", required=True, help="second label file")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("simulate", help="synthetic noisy-worker recovery study")
    p.add_argument("--objects", type=int, required=True)
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--workers", type=int, required=True)
    p.add_argument("--noise", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("serve", help="run the crowd collection service")
    p.add_argument("--addr", default=None, help="HOST:PORT (default $COLLECT_ADDR)")
    p.add_argument("--data", default=None, help="event log path (default $COLLECT_DATA)")
    p.add_argument("--static", default=None, help="directory of built UI assets")
    p.set_defaults(func=_cmd_serve)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("CONSENSUS_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse --help
        code = exc.code
        return code if isinstance(code, int) else 0
    except Exception as exc:  # pragma: no cover - defensive
        log.debug("internal error", exc_info=True)
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
