"""Experiment harness: load sweeps, multi-seed runs, CSV and plot data.

A benchmark cell is one (load, seed) pair; cells are completely independent
and fully determined by the configuration plus the seed, so reruns are
byte-identical and cells could safely execute in parallel.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field, replace

from .routers import ALGORITHMS, make_router
from .simulation import Simulator, simulation_rng
from .topology import BUILTIN_TOPOLOGIES, builtin_topology, load_topology_file

DEFAULT_LOADS = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5]
DEFAULT_SEEDS = [1, 2, 3, 4, 5]

CSV_COLUMNS = ("topology", "algorithm", "load", "seed", "avg_delivery_time",
               "delivered", "discarded", "dropped_at_queue")


@dataclass
class ExperimentConfig:
    topology: str = "grid-original"
    algorithm: str = "gaps"
    loads: list = field(default_factory=lambda: list(DEFAULT_LOADS))
    seeds: list = field(default_factory=lambda: list(DEFAULT_SEEDS))
    steps: int = 100_000
    warmup: int = 60_000
    alpha: float = 0.01
    temperature: float = 1.0
    gamma: float = 1.0
    epsilon: float = 0.01
    alpha_q: float = 0.5
    queue_cap: int = 1000
    init: str = "epsilon-greedy"
    init_scale: float = 1.0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not self.loads or any(not load > 0 for load in self.loads):
            raise ValueError("loads must be nonempty and positive")
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        if self.warmup >= self.steps:
            raise ValueError("warmup must be smaller than steps")


@dataclass(frozen=True)
class ResultRow:
    topology: str
    algorithm: str
    load: float
    seed: int
    avg_delivery_time: float
    delivered: int
    discarded: int
    dropped_at_queue: int


@dataclass(frozen=True)
class SummaryRow:
    topology: str
    algorithm: str
    load: float
    mean_delivery_time: float
    std_delivery_time: float
    runs: int


def resolve_topology(source: str):
    """A builtin grid name, or the path of a topology file."""
    if source in BUILTIN_TOPOLOGIES:
        return builtin_topology(source)
    if os.path.exists(source):
        return load_topology_file(source)
    raise ValueError(f"topology {source!r} is neither a builtin name nor a file")


def run_cell(config: ExperimentConfig, load: float, seed: int):
    """Run one (load, seed) cell; returns the result row and the simulator."""
    topology = resolve_topology(config.topology)
    rng = simulation_rng(seed)
    router = make_router(
        config.algorithm, topology, rng, alpha=config.alpha,
        temperature=config.temperature, gamma=config.gamma,
        epsilon=config.epsilon, alpha_q=config.alpha_q,
        init=config.init, init_scale=config.init_scale)
    sim = Simulator(topology, router, rng, load, queue_capacity=config.queue_cap)
    metrics = sim.run(config.steps, config.warmup)
    row = ResultRow(
        topology=config.topology, algorithm=config.algorithm, load=load,
        seed=seed, avg_delivery_time=metrics.avg_delivery_time,
        delivered=metrics.measured_delivered,
        discarded=metrics.measured_discarded,
        dropped_at_queue=metrics.measured_dropped)
    return row, sim


def run_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """All (load, seed) cells of the sweep, in (load, seed) order."""
    return [run_cell(config, load, seed)[0]
            for load in config.loads for seed in config.seeds]


def summarize(rows) -> list[SummaryRow]:
    """Mean and sample standard deviation per (topology, algorithm, load)."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to summarize")
    groups = {}
    for row in rows:
        groups.setdefault((row.topology, row.algorithm, row.load), []).append(
            row.avg_delivery_time)
    out = []
    for (topology, algorithm, load), values in sorted(groups.items()):
        mean = sum(values) / len(values)
        if len(values) > 1:
            std = math.sqrt(sum((v - mean) ** 2 for v in values) / (len(values) - 1))
        else:
            std = 0.0
        out.append(SummaryRow(topology, algorithm, load, mean, std, len(values)))
    return out


# -- files ------------------------------------------------------------------

def _fmt(value: float) -> str:
    return format(value, ".12g")


def write_csv(rows, fh) -> None:
    """The stable CSV schema: fixed columns, 12 significant digits, LF."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([r.topology, r.algorithm, _fmt(r.load), r.seed,
                         _fmt(r.avg_delivery_time), r.delivered, r.discarded,
                         r.dropped_at_queue])


def rows_to_csv(rows) -> str:
    import io

    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(fh) -> list[ResultRow]:
    reader = csv.reader(fh)
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        topology, algorithm, load, seed, avg, delivered, discarded, dropped = rec
        rows.append(ResultRow(topology, algorithm, float(load), int(seed),
                              float(avg), int(delivered), int(discarded),
                              int(dropped)))
    return rows


def _series_name(topology: str, algorithm: str) -> str:
    base = f"{topology}_{algorithm}"
    return "".join(c if c.isalnum() or c in "-_." else "-" for c in base)


def emit_plot_data(summary, out_dir) -> list[str]:
    """One columnar file per (topology, algorithm) series.

    Rows are ``load mean std`` with 12 significant digits, ordered by load,
    ready for gnuplot-style consumption.  Returns the paths written.
    """
    summary = list(summary)
    if not summary:
        raise ValueError("no summary rows")
    os.makedirs(out_dir, exist_ok=True)
    series = {}
    for row in summary:
        series.setdefault((row.topology, row.algorithm), []).append(row)
    paths = []
    for (topology, algorithm), points in sorted(series.items()):
        path = os.path.join(out_dir, _series_name(topology, algorithm) + ".dat")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# {topology} {algorithm}\n")
            fh.write("# load mean_delivery_time std_delivery_time\n")
            for p in sorted(points, key=lambda s: s.load):
                fh.write(f"{_fmt(p.load)} {_fmt(p.mean_delivery_time)} "
                         f"{_fmt(p.std_delivery_time)}\n")
        paths.append(path)
    return paths


def read_plot_data(path) -> list[tuple[float, float, float]]:
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            load, mean, std = line.split()
            points.append((float(load), float(mean), float(std)))
    return points


# -- config files -------------------------------------------------------------

def parse_config_file(path) -> dict:
    """Flat ``key = value`` file with the CLI flag names as keys."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def parse_loads(text: str) -> list[float]:
    """Either ``lo:hi:step`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"load range must be lo:hi:step, got {text!r}")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("load range step must be positive")
        loads = []
        k = 0
        while True:
            value = lo + k * step
            if value > hi + 1e-9:
                break
            loads.append(round(value, 12))
            k += 1
        return loads
    return [float(p) for p in text.split(",") if p.strip()]


def parse_seeds(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p.strip()]
