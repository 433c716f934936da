"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (the verdicts are listed in the
"acceptance criteria" section of the summary) or ``python3
tests/test_acceptance.py``.
"""

from __future__ import annotations

import csv
import io
import math
import os
import subprocess
import sys
import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from scipy.stats import chisquare

from bivne import harness
from bivne.acs import AcsParams, PheromoneMatrix, VnrSearch, bivne_embed, construct_solution, select_host
from bivne.baselines import greedy_sp_ff, lrc_sp_ff, pl_ksp_ff
from bivne.fragcost import FragConfig, PriceTable, link_cost, new_fragment_slots
from bivne.harness import ALGORITHMS, export, load_config, replay_profit, run_experiment
from bivne.lower import LinkRejected, bfs_hops, embed_links, exact_fit_slots, prune_working_graph
from bivne.substrate import SubstratePath, allocate
from bivne.validation import validate

import oracles
from conftest import make_net, make_vnr, record
from test_fragcost import census_new_fragments

pytestmark = pytest.mark.acceptance


# --- 1: constraint soundness -----------------------------------------------

def embedders(config):
    rng = harness.trial_rng(config.seed, 0, harness.ALGORITHM_STREAM)
    return {
        "bivne": lambda net, vnr: bivne_embed(net, vnr, config.acs, config.prices, config.frag, rng),
        "greedy_sp_ff": lambda net, vnr: greedy_sp_ff(net, vnr, config.prices, config.frag),
        "lrc_sp_ff": lambda net, vnr: lrc_sp_ff(net, vnr, config.prices, config.frag),
        "pl_ksp_ff": lambda net, vnr: pl_ksp_ff(net, vnr, config.prices, config.frag, config.baseline),
    }


def test_constraint_soundness():
    # rand-50 requests have up to ten vnodes; BiVNE runs fewer generations there to fit the time budget
    plans = [(load_config("dt14"), 14, 50), (load_config("rand50").replace(acs=AcsParams(max_generations=10)), 6, 50)]
    start = time.perf_counter()
    requests = accepted = 0
    violations = []
    for config, trials, count in plans:
        for trial in range(trials):
            batch = harness.build_requests(config, trial, count)
            requests += len(batch)
            for name, embed in embedders(config.replace(seed=config.seed + trial)).items():
                net = harness.build_substrate(config, trial)
                for vnr in batch:
                    sol = embed(net, vnr)
                    if not sol.accepted:
                        continue
                    found = validate(net, vnr, sol)
                    if found:
                        violations.append((config.name, name, vnr.id, found))
                        continue
                    accepted += 1
                    allocate(net, vnr, sol)
    elapsed = time.perf_counter() - start
    ok = requests >= 1000 and not violations and accepted > 0
    record(1, ok, f"{requests} requests, {accepted} accepted embeddings, {len(violations)} with violations, "
                  f"{elapsed:.0f}s (target < 120s)")
    assert ok, violations[:3]


# --- 2: lower-level oracle equivalence -------------------------------------

def test_lower_level_matches_exhaustive_search():
    rng = np.random.default_rng(2)
    agree = instances = routed = 0
    for _ in range(600):
        net, vnr, x = oracles.random_lower_instance(rng, max_nodes=6, max_slots=16, max_vlinks=3)
        cfg = FragConfig(xi_max=int(rng.integers(1, 4)))
        best = oracles.lower_exhaustive(net, vnr, x, cfg)
        try:
            routes = embed_links(net, vnr, x, cfg)
            got = link_cost(routes, net, vnr, PriceTable(), cfg)
            routed += 1
        except LinkRejected:
            got = None
        instances += 1
        agree += got == best

    patterns = slot_agree = 0
    for xi_max in (1, 2, 3):
        cfg = FragConfig(xi_max=xi_max)
        for bits in product((False, True), repeat=8):
            net = make_net(2, [(0, 1)], slots=8, occupied={0: [i for i, b in enumerate(bits) if b]})
            path = SubstratePath((0, 1), (0,))
            for demand in range(1, 9):
                best = oracles.exact_fit_oracle([net.links[0].occupancy], demand, cfg)
                want = None if best is None else (best[2], best[2] + demand - 1)
                patterns += 1
                slot_agree += exact_fit_slots(net, path, demand, cfg) == want
    ok = agree == instances >= 500 and slot_agree == patterns
    record(2, ok, f"link embedding {agree}/{instances} ({routed} routed), "
                  f"slot choice {slot_agree}/{patterns} (256 patterns x 8 demands x 3 fragment limits)")
    assert ok


# --- 3: fragment-count oracle ----------------------------------------------

def test_fragment_count_matches_census():
    total = agree = 0
    for xi_max in (1, 2, 3):
        cfg = FragConfig(xi_max=xi_max)
        for bits in product((False, True), repeat=12):
            occ = np.array(bits)
            for start in range(12):
                for length in range(1, 13 - start):
                    if bits[start + length - 1]:
                        break
                    total += 1
                    agree += new_fragment_slots(occ, start, length, cfg) == census_new_fragments(bits, start,
                                                                                                 length, cfg)
    ok = agree == total
    record(3, ok, f"{agree}/{total} allocations on all 12-slot spectra, fragment limits 1-3")
    assert ok


# --- 4: shortest paths -------------------------------------------------------

def test_hop_counts_match_floyd_warshall():
    rng = np.random.default_rng(4)
    pairs = agree = 0
    for _ in range(200):
        n = int(rng.integers(2, 21))
        net = oracles.random_network(n, int(rng.integers(0, 2 * n)), 8, 0.4, rng)
        g = prune_working_graph(net, int(rng.integers(1, 4)))
        fw = oracles.hop_oracle(g)
        for s in g.nodes:
            got = bfs_hops(g, s)
            for t in g.nodes:
                pairs += 1
                agree += got.get(t, math.inf) == fw[s, t]
    ok = agree == pairs
    record(4, ok, f"{agree}/{pairs} node pairs on 200 random graphs of at most 20 nodes")
    assert ok


# --- 5: ACS math -------------------------------------------------------------

def test_ant_colony_math():
    rng = np.random.default_rng(5)
    trace = []
    while len(trace) < 10_000:
        net = oracles.random_network(int(rng.integers(4, 12)), 6, 12, 0.3, rng)
        k = int(rng.integers(1, 5))
        vnr = make_vnr([(int(rng.integers(1, 30)), int(rng.integers(1, 30))) for _ in range(k)],
                       [(u, v) for u in range(k) for v in range(u + 1, k) if rng.random() < 0.5],
                       slot_demand=int(rng.integers(1, 4)))
        cands = {vn.id: set(net.nodes) for vn in vnr.vnodes}
        tau = PheromoneMatrix(float(rng.uniform(1e-4, 1.0)))
        search = VnrSearch(net, vnr, PriceTable(), FragConfig())
        for _ in range(20):
            construct_solution(net, vnr, cands, tau, AcsParams(q0=float(rng.random())), rng, search, trace=trace)
    worst = max(abs(p.sum() - 1.0) for p in trace)

    local = PheromoneMatrix(0.2)
    local[0, 1] = 0.5
    local.local_update(0, 1, 0.1)
    glob = PheromoneMatrix(0.2)
    glob[0, 1] = 0.5
    glob.global_update({0: 1}, Fraction(100), 0.1)
    hand_ok = abs(local[0, 1] - 0.47) <= math.ulp(0.47) and abs(glob[0, 1] - 0.451) <= math.ulp(0.451)

    net = make_net(6, [(i, i + 1) for i in range(5)])
    vnr = make_vnr([(1, 1)], [])
    search = VnrSearch(net, vnr, PriceTable(), FragConfig())
    draws = np.random.default_rng(55)
    counts = np.zeros(6)
    for _ in range(10_000):
        counts[select_host(0, set(range(6)), PheromoneMatrix(0.1), AcsParams(q0=0.0), draws, {}, search)] += 1
    p = chisquare(counts).pvalue
    ok = worst <= 1e-12 and hand_ok and p > 0.01
    record(5, ok, f"{len(trace)} selections, max |sum p - 1| = {worst:.1e}; updates {local[0, 1]!r}, "
                  f"{glob[0, 1]!r}; uniformity p = {p:.3f}")
    assert ok


# --- 6: whole pipeline -------------------------------------------------------

def test_pipeline_finds_optimum():
    hits = feasible = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        net, vnr = oracles.random_pipeline_instance(rng)
        best = oracles.best_embedding_cost(net, vnr)
        sol = bivne_embed(net, vnr, AcsParams(max_generations=150), rng=rng)
        if best is None:
            hits += not sol.accepted
        else:
            feasible += 1
            hits += sol.accepted and sol.fitness == best
    ok = hits >= 95
    record(6, ok, f"optimum found in {hits}/100 seeded runs ({feasible} feasible instances)")
    assert ok


# --- 7 and 10: trend reproduction and ledger identity ------------------------

@pytest.fixture(scope="module")
def trend_runs():
    """Every algorithm on DT-14 with the bundled parameters, ten trials each."""
    config = load_config("dt14")
    runs = {}
    for algo in ALGORITHMS:
        cfg = config.replace(algorithm=algo)
        kept = []
        report = run_experiment(cfg, keep=kept)
        runs[algo] = (cfg, report, kept)
    return runs


def metric_table(report, metric):
    """``{vnr_count: {trial: value}}``"""
    out: dict[int, dict[int, float]] = {}
    for r in report.rows:
        out.setdefault(r.vnr_count, {})[r.trial] = getattr(r, metric)
    return out


def compare(ours, theirs, better):
    """Per-trial wins and mean-level verdict of ``better(ours, theirs)``."""
    wins = sum(1 for t in ours if ours[t] is not None and theirs.get(t) is not None and better(ours[t], theirs[t]))
    mine = [v for v in ours.values() if v is not None]
    other = [v for v in theirs.values() if v is not None]
    return wins, bool(mine and other and better(np.mean(mine), np.mean(other)))


def test_dt14_trend_ordering(trend_runs):
    counts = trend_runs["bivne"][0].vnr_counts
    trials = trend_runs["bivne"][0].trials
    lines, failed = [], []

    # (a) mean acceptance ratio non-increasing in the batch size
    for algo, (_, report, _) in trend_runs.items():
        table = metric_table(report, "acceptance_ratio")
        means = [float(np.mean(list(table[n].values()))) for n in counts]
        good = all(b <= a + 1e-12 for a, b in zip(means, means[1:]))
        lines.append(f"(a) {algo}: means {[round(m, 3) for m in means]}")
        if not good:
            failed.append(f"a:{algo}")

    checks = [("b", "acceptance_ratio", lambda x, y: x >= y), ("c", "avg_path_hops", lambda x, y: x <= y),
              ("d", "r_over_c", lambda x, y: x >= y), ("d", "profit", lambda x, y: x >= y)]
    ours = {m: metric_table(trend_runs["bivne"][1], m) for _, m, _ in checks}
    for tag, metric, better in checks:
        for algo in ALGORITHMS[1:]:
            theirs = metric_table(trend_runs[algo][1], metric)
            per_point = []
            for n in counts:
                wins, mean_ok = compare(ours[metric][n], theirs[n], better)
                per_point.append(f"{wins}{'' if mean_ok else '*'}")
                if wins < 8 or not mean_ok:
                    failed.append(f"{tag}:{metric}:{algo}:{n}")
            lines.append(f"({tag}) {metric} vs {algo}: wins per point {per_point}")
    for line in lines:
        print("   ", line)
    ok = not failed
    record(7, ok, f"{trials} trials x {list(counts)} requests; " +
           ("all orderings hold" if ok else f"{len(failed)} failing checks: {', '.join(failed)}"))
    assert ok, "\n".join(lines)


def test_profit_ledger_identity(trend_runs):
    checked = mismatched = 0
    for algo, (cfg, report, kept) in trend_runs.items():
        exported = {(int(r["trial"]), int(r["vnr_count"])): r["profit"]
                    for r in csv.DictReader(io.StringIO(export(report)))}
        for res in kept:
            replay = replay_profit(cfg, res)
            for n in cfg.vnr_counts:
                ledger = sum((o.revenue - o.node_cost - o.link_cost for o in res.outcomes[:n] if o.accepted),
                             Fraction(0))
                checked += 1
                if replay[n] != ledger or exported[res.trial, n] != f"{harness.sig10(replay[n]):.10g}":
                    mismatched += 1
    ok = mismatched == 0 and checked > 0
    record(10, ok, f"{checked - mismatched}/{checked} exported profits equal the replayed ledger")
    assert ok


# --- 8: sorting strategy -----------------------------------------------------

def test_sorted_construction_avoids_dead_ends():
    net = make_net(3, [(0, 1), (1, 2)])
    vnr = make_vnr([(1, 1)] * 3, [])
    nested = {0: {0, 1, 2}, 1: {0, 1}, 2: {0}}
    sorted_ok = unsorted_fail = 0
    for seed in range(100):
        x = construct_solution(net, vnr, nested, PheromoneMatrix(0.1), AcsParams(q0=0.0),
                               np.random.default_rng(seed))
        sorted_ok += x is not None
        y = construct_solution(net, vnr, nested, PheromoneMatrix(0.1), AcsParams(q0=0.0, sort_vnodes=False),
                               np.random.default_rng(seed))
        unsorted_fail += y is None
    ok = sorted_ok == 100 and unsorted_fail > 0
    record(8, ok, f"sorted order completes {sorted_ok}/100; id order fails {unsorted_fail}/100")
    assert ok


# --- 9: determinism ----------------------------------------------------------

def test_csv_export_is_byte_identical(tmp_path):
    outputs = []
    for run, hash_seed in enumerate(("1", "2")):
        out = tmp_path / str(run)
        env = dict(os.environ, PYTHONHASHSEED=hash_seed)
        cmd = [sys.executable, "-m", "bivne.cli", "run", "--config", "dt14", "--algorithm", "all",
               "--trials", "2", "--out", str(out)]
        subprocess.run(cmd, check=True, env=env, capture_output=True)
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    ok = len(outputs[0]) == len(ALGORITHMS) and outputs[0] == outputs[1]
    record(9, ok, f"{len(outputs[0])} csv files identical across two processes with different hash seeds")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
