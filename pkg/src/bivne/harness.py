"""Experiment driver: configuration, seeded trials, metrics and export."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import acs, baselines
from .errors import AllocationError, ConfigError
from .fragcost import FragConfig, PriceTable, link_cost, node_cost, revenue
from .solution import EmbeddingSolution
from .validation import validate
from .substrate import (CapacityRanges, RandomTopologyParams, SubstrateNetwork, allocate, draw_capacities,
                        generate_random, load_topology)
from .vnr import RequestProfile, VirtualRequest, generate_requests

ALGORITHMS = ("bivne", "greedy_sp_ff", "lrc_sp_ff", "pl_ksp_ff")
CSV_COLUMNS = ("algorithm", "topology", "seed", "trial", "vnr_count", "accepted", "acceptance_ratio",
               "avg_path_hops", "revenue", "cost", "r_over_c", "profit")
METRICS = ("acceptance_ratio", "avg_path_hops", "r_over_c", "profit")

# independent random streams per trial
TOPOLOGY_STREAM, REQUEST_STREAM, ALGORITHM_STREAM = 0, 1, 2


def sig10(x):
    """Round to 10 significant digits (the export precision)."""
    if x is None:
        return None
    return float(f"{float(x):.10g}")


def _pair(v, name):
    try:
        lo, hi = (int(x) for x in v)
    except (TypeError, ValueError):
        raise ConfigError(f"field '{name}': expected a [low, high] pair, got {v!r}") from None
    return lo, hi


def _build(cls, data, name, pairs=()):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"field '{name}': expected a mapping")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"field '{name}': unknown keys {sorted(unknown)}")
    kwargs = {k: (_pair(v, f"{name}.{k}") if k in pairs else v) for k, v in data.items()}
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"field '{name}': {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{name}': {exc}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "dt14"
    topology: str | None = "dt14"
    random_topology: RandomTopologyParams | None = None
    capacities: CapacityRanges | None = CapacityRanges()
    requests: RequestProfile = RequestProfile()
    algorithm: str = "bivne"
    prices: PriceTable = PriceTable()
    frag: FragConfig = FragConfig()
    acs: acs.AcsParams = acs.AcsParams()
    baseline: baselines.BaselineConfig = baselines.BaselineConfig()
    seed: int = 0
    vnr_counts: tuple[int, ...] = (10, 20, 30, 40)
    trials: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"field 'algorithm': unknown algorithm {self.algorithm!r}")
        counts = tuple(self.vnr_counts)
        if not counts or any(c < 0 for c in counts) or any(b <= a for a, b in zip(counts, counts[1:])):
            raise ConfigError("field 'vnr_counts': must be non-negative and strictly increasing")
        object.__setattr__(self, "vnr_counts", counts)
        if self.trials < 1:
            raise ConfigError("field 'trials': must be >= 1")
        if (self.topology is None) == (self.random_topology is None):
            raise ConfigError("field 'topology': give exactly one of a source or random parameters")

    def replace(self, **changes) -> ExperimentConfig:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(changes)
        return ExperimentConfig(**d)

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        if not isinstance(d, dict):
            raise ConfigError("configuration must be a mapping")
        known = {"name", "topology", "capacities", "requests", "algorithm", "prices", "frag", "acs",
                 "baseline", "seed", "vnr_counts", "trials"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown configuration fields {sorted(unknown)}")
        topo = d.get("topology", {"source": "dt14"})
        source, rand = None, None
        if isinstance(topo, str):
            source = topo
        elif isinstance(topo, dict) and "source" in topo:
            source = str(topo["source"])
        elif isinstance(topo, dict) and "random" in topo:
            r = topo["random"]
            try:
                rand = RandomTopologyParams(int(r["nodes"]), int(r["links"]))
            except (KeyError, TypeError, ValueError):
                raise ConfigError("field 'topology.random': needs integer 'nodes' and 'links'") from None
        else:
            raise ConfigError("field 'topology': expected a source name/path or {'random': {...}}")
        caps = d.get("capacities", {})
        caps = None if caps is None else _build(CapacityRanges, caps, "capacities", ("comp", "chan", "slots"))
        if rand is not None:
            rand = RandomTopologyParams(rand.nodes, rand.links, caps or CapacityRanges())
        try:
            return cls(
                name=str(d.get("name", source or "random")),
                topology=source,
                random_topology=rand,
                capacities=caps,
                requests=_build(RequestProfile, d.get("requests"), "requests",
                                ("nodes", "comp", "chan", "slots", "radius")),
                algorithm=str(d.get("algorithm", "bivne")),
                prices=_build(PriceTable, d.get("prices"), "prices"),
                frag=_build(FragConfig, d.get("frag"), "frag"),
                acs=_build(acs.AcsParams, d.get("acs"), "acs"),
                baseline=_build(baselines.BaselineConfig, d.get("baseline"), "baseline"),
                seed=int(d.get("seed", 0)),
                vnr_counts=tuple(int(c) for c in d.get("vnr_counts", (10, 20, 30, 40))),
                trials=int(d.get("trials", 1)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        if self.random_topology is not None:
            topo = {"random": {"nodes": self.random_topology.nodes, "links": self.random_topology.links}}
        else:
            topo = {"source": self.topology}
        prices = {k: str(v) for k, v in asdict(self.prices).items()}
        return {
            "name": self.name, "topology": topo,
            "capacities": None if self.capacities is None else {k: list(v) for k, v in asdict(self.capacities).items()},
            "requests": {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self.requests).items()},
            "algorithm": self.algorithm, "prices": prices, "frag": asdict(self.frag),
            "acs": asdict(self.acs), "baseline": asdict(self.baseline),
            "seed": self.seed, "vnr_counts": list(self.vnr_counts), "trials": self.trials,
        }


def builtin_profile_path(name: str) -> Path:
    return Path(str(resources.files("bivne") / "data" / f"{name}.profile"))


def load_config(path) -> ExperimentConfig:
    """Read a JSON configuration; bare names resolve to bundled profiles."""
    p = Path(path)
    if not p.exists():
        alt = builtin_profile_path(p.name.removesuffix(".profile"))
        if not alt.exists():
            raise ConfigError(f"configuration not found: {path}")
        p = alt
    try:
        return ExperimentConfig.from_dict(json.loads(p.read_text()))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration {p} is not valid JSON: {exc}") from None


# --- trials ----------------------------------------------------------------

def trial_rng(seed: int, trial: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, stream)))


def build_substrate(config: ExperimentConfig, trial: int) -> SubstrateNetwork:
    rng = trial_rng(config.seed, trial, TOPOLOGY_STREAM)
    if config.random_topology is not None:
        return generate_random(config.random_topology, rng)
    net = load_topology(config.topology)
    if config.capacities is not None:
        draw_capacities(net, config.capacities, rng)
    return net


def build_requests(config: ExperimentConfig, trial: int, count: int | None = None) -> list[VirtualRequest]:
    rng = trial_rng(config.seed, trial, REQUEST_STREAM)
    return generate_requests(config.requests, max(config.vnr_counts) if count is None else count, rng)


def make_embedder(config: ExperimentConfig, rng: np.random.Generator) -> Callable:
    name = config.algorithm
    if name == "bivne":
        return lambda net, vnr: acs.bivne_embed(net, vnr, config.acs, config.prices, config.frag, rng)
    if name == "greedy_sp_ff":
        return lambda net, vnr: baselines.greedy_sp_ff(net, vnr, config.prices, config.frag)
    if name == "lrc_sp_ff":
        return lambda net, vnr: baselines.lrc_sp_ff(net, vnr, config.prices, config.frag)
    return lambda net, vnr: baselines.pl_ksp_ff(net, vnr, config.prices, config.frag, config.baseline)


@dataclass
class VnrOutcome:
    vnr: VirtualRequest
    solution: EmbeddingSolution
    revenue: Fraction = Fraction(0)
    node_cost: Fraction = Fraction(0)
    link_cost: Fraction = Fraction(0)

    @property
    def accepted(self) -> bool:
        return self.solution.accepted

    @property
    def hops(self) -> list[int]:
        return [r.path.hops for r in self.solution.routes] if self.accepted else []


@dataclass
class ReportRow:
    algorithm: str
    topology: str
    seed: int
    trial: int
    vnr_count: int
    accepted: int
    acceptance_ratio: float
    avg_path_hops: float | None
    revenue: float
    cost: float
    r_over_c: float | None
    profit: float


def summarize(outcomes: list[VnrOutcome], config: ExperimentConfig, trial: int, count: int) -> ReportRow:
    head = outcomes[:count]
    acc = [o for o in head if o.accepted]
    hops = [h for o in acc for h in o.hops]
    rev = sum((o.revenue for o in acc), Fraction(0))
    cost = sum((o.node_cost + o.link_cost for o in acc), Fraction(0))
    prof = sum((o.revenue - o.node_cost - o.link_cost for o in acc), Fraction(0))
    return ReportRow(
        algorithm=config.algorithm, topology=config.name, seed=config.seed, trial=trial, vnr_count=count,
        accepted=len(acc),
        acceptance_ratio=sig10(Fraction(len(acc), count)) if count else 1.0,
        avg_path_hops=sig10(Fraction(sum(hops), len(hops))) if hops else None,
        revenue=sig10(rev), cost=sig10(cost),
        r_over_c=sig10(rev / cost) if cost else None,
        profit=sig10(prof),
    )


@dataclass
class TrialResult:
    trial: int
    outcomes: list[VnrOutcome]
    rows: list[ReportRow]


def run_trial(config: ExperimentConfig, trial: int) -> TrialResult:
    """Embed the trial's request stream once and summarise every prefix.

    A batch of ``n`` requests is the first ``n`` requests of the trial's
    stream, and nothing before request ``n`` depends on later requests, so
    the prefix summaries equal independent runs at each count.
    """
    net = build_substrate(config, trial)
    embed = make_embedder(config, trial_rng(config.seed, trial, ALGORITHM_STREAM))
    outcomes = []
    for vnr in build_requests(config, trial):
        sol = embed(net, vnr)
        out = VnrOutcome(vnr, sol)
        if sol.accepted:
            violations = validate(net, vnr, sol)
            if violations:
                raise AllocationError(violations)
            out.revenue = revenue(vnr, config.prices)
            out.node_cost = node_cost(sol.placements, net, vnr, config.prices)
            out.link_cost = link_cost(sol.routes, net, vnr, config.prices, config.frag)
            allocate(net, vnr, sol)
        outcomes.append(out)
    rows = [summarize(outcomes, config, trial, n) for n in config.vnr_counts]
    return TrialResult(trial, outcomes, rows)


@dataclass
class ExperimentReport:
    config: dict
    seed: int
    rows: list[ReportRow] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"config": self.config, "seed": self.seed, "rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentReport:
        return cls(d["config"], int(d["seed"]), [ReportRow(**r) for r in d["rows"]])


def run_experiment(config: ExperimentConfig, keep: list | None = None) -> ExperimentReport:
    """Run every trial; ``keep`` collects the :class:`TrialResult` objects if given."""
    report = ExperimentReport(config.to_dict(), config.seed)
    for t in range(config.trials):
        res = run_trial(config, t)
        report.rows.extend(res.rows)
        if keep is not None:
            keep.append(res)
    report.rows.sort(key=lambda r: (r.vnr_count, r.trial))
    return report


def replay_profit(config: ExperimentConfig, result: TrialResult) -> dict[int, Fraction]:
    """Recompute profit per batch size by replaying the stored solutions on a fresh substrate."""
    net = build_substrate(config, result.trial)
    running = Fraction(0)
    profits = {}
    counts = set(config.vnr_counts)
    if 0 in counts:
        profits[0] = running
    for i, out in enumerate(result.outcomes, start=1):
        if out.solution.accepted:
            sol, vnr = out.solution, out.vnr
            running += (revenue(vnr, config.prices) - node_cost(sol.placements, net, vnr, config.prices)
                        - link_cost(sol.routes, net, vnr, config.prices, config.frag))
            allocate(net, vnr, sol)
        if i in counts:
            profits[i] = running
    return profits


# --- export ----------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def export(report: ExperimentReport, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in report.rows:
            d = asdict(r)
            w.writerow([_fmt(d[c]) for c in CSV_COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=1, sort_keys=True)
    raise ConfigError(f"unknown export format {fmt!r}")


def write_report(report: ExperimentReport, path, fmt: str = "csv") -> Path:
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(export(report, fmt))
    except OSError as exc:
        raise OSError(f"cannot write report to {p}: {exc}") from exc
    return p


def read_report(path) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads(Path(path).read_text()))


def plot_series(reports: list[ExperimentReport]) -> dict[str, list[dict]]:
    """Mean of each metric over trials, per batch size and algorithm."""
    topologies = sorted({r.topology for rep in reports for r in rep.rows})
    if len(topologies) > 1:
        raise ConfigError(f"reports mix topologies {topologies}; plot them separately")
    algos = sorted({r.algorithm for rep in reports for r in rep.rows})
    counts = sorted({r.vnr_count for rep in reports for r in rep.rows})
    out = {}
    for metric in METRICS:
        table = []
        for n in counts:
            row = {"vnr_count": n}
            for a in algos:
                vals = [getattr(r, metric) for rep in reports for r in rep.rows
                        if r.algorithm == a and r.vnr_count == n and getattr(r, metric) is not None]
                row[a] = sig10(np.mean(vals)) if vals else None
            table.append(row)
        out[metric] = table
    return out


def plot_csv(table: list[dict]) -> str:
    buf = io.StringIO()
    if not table:
        return ""
    w = csv.DictWriter(buf, fieldnames=list(table[0]), lineterminator="\n")
    w.writeheader()
    for row in table:
        w.writerow({k: _fmt(v) for k, v in row.items()})
    return buf.getvalue()


__all__ = ["ALGORITHMS", "AllocationError", "ExperimentConfig", "ExperimentReport", "ReportRow", "TrialResult",
           "VnrOutcome", "build_requests", "build_substrate", "export", "load_config", "plot_series",
           "replay_profit", "run_experiment", "run_trial", "summarize"]
