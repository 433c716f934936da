"""Command line: ``bivne run | validate | topo gen | plotdata``.

Exit codes: 0 success, 1 configuration error, 2 constraint violation,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from .errors import ConfigError
from .solution import EmbeddingSolution
from .substrate import CapacityRanges, RandomTopologyParams, dump_topology, generate_random, load_topology
from .validation import validate
from .vnr import VirtualRequest

EXIT_OK, EXIT_CONFIG, EXIT_VIOLATION, EXIT_IO = 0, 1, 2, 3


def _cmd_run(args) -> int:
    config = harness.load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    algos = [config.algorithm]
    if args.algorithm == "all":
        algos = list(harness.ALGORITHMS)
    elif args.algorithm is not None:
        algos = [args.algorithm]
    out = Path(args.out)
    for algo in algos:
        cfg = config.replace(algorithm=algo, **changes)
        report = harness.run_experiment(cfg)
        path = harness.write_report(report, out / f"{cfg.name}_{algo}.{args.format}", args.format)
        print(path)
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        doc = json.loads(Path(args.dump).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.dump} is not valid JSON: {exc}") from None
    try:
        net = load_topology(doc["topology"])
        vnr = VirtualRequest.from_dict(doc["vnr"])
        sol = EmbeddingSolution.from_dict(doc["solution"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed solution dump: {exc!r}") from None
    violations = validate(net, vnr, sol)
    for name, msg in violations:
        print(f"{name}: {msg}")
    if violations:
        return EXIT_VIOLATION
    print("ok")
    return EXIT_OK


def _cmd_topo_gen(args) -> int:
    params = RandomTopologyParams(args.nodes, args.links, CapacityRanges())
    net = generate_random(params, np.random.default_rng(args.seed))
    text = json.dumps(dump_topology(net), indent=1)
    if args.out is None:
        print(text)
    else:
        Path(args.out).write_text(text)
        print(args.out)
    return EXIT_OK


def _cmd_plotdata(args) -> int:
    reports = []
    for p in args.reports:
        try:
            reports.append(harness.read_report(p))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ConfigError(f"{p} is not a JSON report: {exc!r}") from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for metric, table in harness.plot_series(reports).items():
        path = out / f"{metric}.csv"
        path.write_text(harness.plot_csv(table))
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bivne", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write report files")
    run.add_argument("--config", required=True, help="JSON config path or bundled profile name")
    run.add_argument("--seed", type=int)
    run.add_argument("--algorithm", choices=list(harness.ALGORITHMS) + ["all"])
    run.add_argument("--out", default=".")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--trials", type=int)
    run.set_defaults(func=_cmd_run)

    val = sub.add_parser("validate", help="check a solution dump against the constraints")
    val.add_argument("dump", help="JSON with 'topology' (with state), 'vnr' and 'solution'")
    val.set_defaults(func=_cmd_validate)

    topo = sub.add_parser("topo", help="topology tools")
    topo_sub = topo.add_subparsers(dest="topo_command", required=True)
    gen = topo_sub.add_parser("gen", help="generate a random connected topology")
    gen.add_argument("--nodes", type=int, required=True)
    gen.add_argument("--links", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=_cmd_topo_gen)

    plot = sub.add_parser("plotdata", help="per-metric series from JSON reports")
    plot.add_argument("reports", nargs="+")
    plot.add_argument("--out", default=".")
    plot.set_defaults(func=_cmd_plotdata)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except harness.AllocationError as exc:
        print(f"constraint violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
