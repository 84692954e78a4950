"""
Command line entry point: ``nlslab run|sweep|suite|info``.

Exit codes: 0 when every asserted property passes (an inconclusive decay
verdict counts as a pass), 2 on a property failure, 1 on an operational
error such as a malformed config or an unreadable snapshot.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, ExperimentConfig, GridSpec, ReportSpec, load_config
from .experiments import run, run_sweep
from .io import SnapshotError, read_header

log = logging.getLogger("nlslab")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlslab", description=__doc__.splitlines()[1])
    p.add_argument("--version", action="version", version=f"nlslab {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the report selected in a config file")
    r.add_argument("config", type=Path)
    r.add_argument("--out", type=Path, help="override output.dir")

    s = sub.add_parser("sweep", help="run the Cartesian product of the config's sweep axes")
    s.add_argument("config", type=Path)
    s.add_argument("--out", type=Path, help="override output.dir")
    s.add_argument("--workers", type=int, help="override run.workers and NLSLAB_WORKERS")

    q = sub.add_parser("suite", help="run the built-in property suite")
    q.add_argument("--n", type=int, default=32, help="points per axis (default 32)")
    q.add_argument("--half-width", type=float, default=8.0)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", type=Path, default=Path("nlslab-suite"))

    i = sub.add_parser("info", help="print the header of an NLSF snapshot")
    i.add_argument("snapshot", type=Path)
    return p


def _summary(report: dict) -> str:
    v = report.get("verdict", {})
    parts = [f"{report['kind']}: {report['status'].upper()}"]
    for key in ("sup_ratio", "bound", "max_residual", "plateau_growth", "refinement_delta"):
        if isinstance(v, dict) and v.get(key) is not None:
            parts.append(f"{key}={v[key]:.6g}")
    if isinstance(v, dict) and v.get("failed"):
        parts.append("failed=" + ",".join(v["failed"]))
    return " ".join(parts)


def _info(path: Path) -> int:
    h = read_header(path)
    size = path.stat().st_size
    expected = 32 + 16 * h["n"] ** h["dim"]
    print(f"file        {path}")
    print(f"version     {h['version']}")
    print(f"dim         {h['dim']}")
    print(f"n           {h['n']}")
    print(f"half_width  {h['half_width']:.17g}")
    print(f"bytes       {size} ({'complete' if size == expected else f'expected {expected}'})")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "info":
            return _info(args.snapshot)
        if args.command == "suite":
            cfg = ExperimentConfig(
                grid=GridSpec(3, args.n, args.half_width),
                report=ReportSpec(kind="property-suite", seed=args.seed),
            )
            code, report = run(cfg, args.out)
        elif args.command == "run":
            cfg = load_config(args.config)
            code, report = run(cfg, args.out)
        else:
            if args.workers is not None and args.workers < 1:
                raise ConfigError("--workers must be >= 1")
            cfg = load_config(args.config)
            code, report = run_sweep(cfg, args.out, args.workers)
            print(f"sweep: {report['status'].upper()} ({len(report['rows'])} rows)")
            return code
    except (ConfigError, SnapshotError, OSError, ValueError) as exc:
        print(f"nlslab: error: {exc}", file=sys.stderr)
        return 1
    print(_summary(report))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
