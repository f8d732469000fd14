"""The route-bench command line interface."""

from __future__ import annotations

import argparse
import sys

from . import harness


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="route-bench",
        description="Packet-routing benchmark: load sweeps over learning and "
                    "shortest-path routers.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a load sweep and write a CSV")
    run.add_argument("--config", help="key = value file; flags override it")
    run.add_argument("--topology", help="builtin name (grid-original, grid-modified) or file path")
    run.add_argument("--algorithm", choices=("gaps", "best", "bestload", "qrouting"))
    run.add_argument("--loads", help="lo:hi:step or comma list, e.g. 0.5:3.5:0.5")
    run.add_argument("--seeds", help="comma list, e.g. 1,2,3,4,5")
    run.add_argument("--steps", type=int)
    run.add_argument("--warmup", type=int)
    run.add_argument("--alpha", type=float, help="policy-gradient learning rate")
    run.add_argument("--temperature", type=float, help="softmax temperature")
    run.add_argument("--gamma", type=float, help="reward discount per elapsed step")
    run.add_argument("--epsilon", type=float, help="exploration share at greedy init")
    run.add_argument("--alpha-q", type=float, help="q-routing learning rate")
    run.add_argument("--queue-cap", type=int)
    run.add_argument("--init", choices=("epsilon-greedy", "random"))
    run.add_argument("--init-scale", type=float, help="parameter range for random init")
    run.add_argument("--out", required=True, help="CSV output path")

    plot = sub.add_parser("plot", help="turn a results CSV into plot-data series")
    plot.add_argument("--in", dest="input", required=True, help="results CSV")
    plot.add_argument("--out", required=True, help="directory for per-series files")
    return parser


_CONVERTERS = {
    "topology": str,
    "algorithm": str,
    "loads": harness.parse_loads,
    "seeds": harness.parse_seeds,
    "steps": int,
    "warmup": int,
    "alpha": float,
    "temperature": float,
    "gamma": float,
    "epsilon": float,
    "alpha_q": float,
    "queue_cap": int,
    "init": str,
    "init_scale": float,
}


def _config_from_args(args) -> harness.ExperimentConfig:
    values = {}
    if args.config:
        raw = harness.parse_config_file(args.config)
        for key, text in raw.items():
            if key == "out":
                continue
            if key not in _CONVERTERS:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _CONVERTERS[key](text)
    for key in _CONVERTERS:
        flag = getattr(args, key, None)
        if flag is None:
            continue
        if key in ("loads", "seeds"):
            flag = _CONVERTERS[key](flag)
        values[key] = flag
    return harness.ExperimentConfig(**values)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        config = _config_from_args(args)
        rows = harness.run_experiment(config)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            harness.write_csv(rows, fh)
        print(f"wrote {len(rows)} rows to {args.out}")
        return 0
    if args.command == "plot":
        with open(args.input, "r", encoding="utf-8", newline="") as fh:
            rows = harness.read_csv(fh)
        paths = harness.emit_plot_data(harness.summarize(rows), args.out)
        for path in paths:
            print(f"wrote {path}")
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
