"""Upper level of BiVNE: ant colony search over node placements.

Every ant builds a placement vnode by vnode (fewest candidates first), the
lower level routes the vlinks for that placement, and the placement's
fitness is the total node plus link cost. The iteration-best placement is
polished by a local search and reinforces the pheromone trail.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .baselines import greedy_sp_ff
from .errors import ConfigError
from .fragcost import FragConfig, PriceTable, link_cost, node_cost_term, revenue
from .lower import LinkRejected, embed_links, hop_matrix, prune_working_graph
from .solution import EmbeddingSolution
from .substrate import SubstrateNetwork, available_degree
from .vnr import VirtualRequest, candidate_nodes

INF = float("inf")
# heuristic value used when placing a vnode costs nothing
ZERO_COST_ETA = 1e9


@dataclass(frozen=True)
class AcsParams:
    colony_size: int = 10
    max_generations: int = 150
    beta: float = 2.0
    q0: float = 0.9
    phi: float = 0.1
    rho: float = 0.1
    tau0: float | None = None  # None: derived per VNR from the greedy cost
    early_stop: int | None = None  # generations without improvement; None runs all
    sort_vnodes: bool = True
    local_search: bool = True

    def __post_init__(self):
        if self.colony_size < 1 or self.max_generations < 0:
            raise ConfigError("colony_size must be >= 1 and max_generations >= 0")
        if not 0.0 <= self.q0 <= 1.0:
            raise ConfigError("q0 must lie in [0, 1]")
        if not (0.0 < self.phi < 1.0 and 0.0 < self.rho < 1.0):
            raise ConfigError("phi and rho must lie in (0, 1)")
        if self.tau0 is not None and self.tau0 <= 0:
            raise ConfigError("tau0 must be > 0")
        if self.beta < 0:
            raise ConfigError("beta must be >= 0")


class PheromoneMatrix:
    """Pheromone per (vnode, host) pair, lazily initialised to ``tau0``."""

    def __init__(self, tau0: float):
        if tau0 <= 0:
            raise ValueError("tau0 must be > 0")
        self.tau0 = float(tau0)
        self.values: dict[tuple[int, int], float] = {}

    def __getitem__(self, key: tuple[int, int]) -> float:
        return self.values.get(key, self.tau0)

    def __setitem__(self, key: tuple[int, int], value: float) -> None:
        self.values[key] = value

    def local_update(self, vnode: int, host: int, phi: float) -> None:
        self[vnode, host] = (1 - phi) * self[vnode, host] + phi * self.tau0

    def global_update(self, placements: Mapping[int, int], fitness, rho: float) -> None:
        """Reinforce only the pairs used by ``placements``."""
        delta = ZERO_COST_ETA if fitness == 0 else 1.0 / float(fitness)
        for vnode, host in placements.items():
            self[vnode, host] = (1 - rho) * self[vnode, host] + rho * delta


# --- candidate sets --------------------------------------------------------

def reduce_candidates(net: SubstrateNetwork, vnr: VirtualRequest) -> dict[int, set[int]]:
    """Capacity and location filter, then drop hosts with too few usable links."""
    out = {}
    for vn in vnr.vnodes:
        d = vnr.degree(vn.id)
        cands = candidate_nodes(net, vn)
        if d > 0:
            cands = {h for h in cands if available_degree(net, h, vnr.slot_demand) >= d}
        out[vn.id] = cands
    return out


def sorted_vnodes(candidates: Mapping[int, set]) -> list[int]:
    """Fewest candidates first; ties by vnode id."""
    return sorted(candidates, key=lambda v: (len(candidates[v]), v))


# --- per-request search state ----------------------------------------------

class VnrSearch:
    """Everything that stays fixed while one request is being searched.

    The substrate does not change during the search, so node cost terms, hop
    distances and lower-level results are cached.
    """

    def __init__(self, net: SubstrateNetwork, vnr: VirtualRequest, prices: PriceTable, cfg: FragConfig):
        self.net, self.vnr, self.prices, self.cfg = net, vnr, prices, cfg
        self.graph = prune_working_graph(net, vnr.slot_demand)
        self.hops = hop_matrix(self.graph)
        self.neighbors = {vn.id: vnr.neighbors(vn.id) for vn in vnr.vnodes}
        self.link_unit = float(vnr.slot_demand * prices.gamma_p)
        self._node_terms: dict[tuple[int, int], Fraction] = {}
        self._node_floats: dict[tuple[int, int], float] = {}
        self._memo: dict[tuple, tuple] = {}

    def node_term(self, vid: int, host: int) -> Fraction:
        key = (vid, host)
        if key not in self._node_terms:
            self._node_terms[key] = node_cost_term(self.net.nodes[host], self.vnr.vnode(vid), self.prices)
        return self._node_terms[key]

    def _node_float(self, vid: int, host: int) -> float:
        v = self._node_floats.get((vid, host))
        if v is None:
            v = self._node_floats[vid, host] = float(self.node_term(vid, host))
        return v

    def placed_neighbors(self, vid: int, partial: Mapping[int, int]) -> list[int]:
        """Hosts of the already placed neighbours of ``vid``."""
        return [partial[nb] for nb in self.neighbors[vid] if nb in partial]

    def cost_increment(self, vid: int, host: int, partial: Mapping[int, int],
                       placed: list[int] | None = None) -> float | None:
        """Node cost plus hop-based link cost to placed neighbours; None if one is unreachable."""
        if placed is None:
            placed = self.placed_neighbors(vid, partial)
        total = self._node_float(vid, host)
        row = self.hops[host]
        for other in placed:
            h = row.get(other)
            if h is None:
                return None
            total += h * self.link_unit
        return total

    def heuristic(self, vid: int, host: int, partial: Mapping[int, int],
                  placed: list[int] | None = None) -> float | None:
        inc = self.cost_increment(vid, host, partial, placed)
        if inc is None:
            return None
        return ZERO_COST_ETA if inc == 0 else 1.0 / inc

    def evaluate(self, placements: Mapping[int, int]):
        """``(fitness, routes)`` of a placement; fitness is ``inf`` when links fail."""
        key = tuple(sorted(placements.items()))
        hit = self._memo.get(key)
        if hit is None:
            try:
                routes = embed_links(self.net, self.vnr, placements, self.cfg, graph=self.graph, hops=self.hops)
            except LinkRejected:
                hit = (INF, None)
            else:
                cost = sum((self.node_term(v, h) for v, h in key), Fraction(0))
                cost += link_cost(routes, self.net, self.vnr, self.prices, self.cfg)
                hit = (cost, routes)
            self._memo[key] = hit
        return hit


def heuristic(vn, host: int, partial: Mapping[int, int], net: SubstrateNetwork, vnr: VirtualRequest,
              prices: PriceTable, cfg: FragConfig = FragConfig()) -> float | None:
    """Inverse cost increment of placing ``vn`` on ``host`` given ``partial``."""
    return VnrSearch(net, vnr, prices, cfg).heuristic(vn.id, host, partial)


# --- selection and construction --------------------------------------------

def selection_probabilities(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    return w / w.sum()


def roulette(probabilities, u: float) -> int:
    """Index picked by cumulative-sum inversion of one uniform draw ``u``."""
    cum = np.cumsum(probabilities)
    return min(int(np.searchsorted(cum, u * cum[-1], side="right")), len(cum) - 1)


def select_host(vid: int, candidates, pheromone: PheromoneMatrix, params: AcsParams,
                rng: np.random.Generator, partial: Mapping[int, int], search: VnrSearch,
                trace: list | None = None) -> int | None:
    """Pseudorandom-proportional choice of a host; None when nothing is eligible."""
    taken = set(partial.values())
    placed = search.placed_neighbors(vid, partial)
    hosts, weights = [], []
    for h in sorted(candidates):
        if h in taken:
            continue
        eta = search.heuristic(vid, h, partial, placed)
        if eta is None:
            continue
        hosts.append(h)
        weights.append(pheromone[vid, h] * eta ** params.beta)
    if not hosts:
        return None
    if trace is not None:
        trace.append(selection_probabilities(weights))
    q = rng.random()
    if q <= params.q0:
        best = max(range(len(hosts)), key=lambda i: (weights[i], -hosts[i]))
        return hosts[best]
    probs = selection_probabilities(weights)
    return hosts[roulette(probs, rng.random())]


def construct_solution(net: SubstrateNetwork, vnr: VirtualRequest, candidates: Mapping[int, set],
                       pheromone: PheromoneMatrix, params: AcsParams, rng: np.random.Generator,
                       search: VnrSearch | None = None, order: list[int] | None = None,
                       trace: list | None = None) -> dict[int, int] | None:
    """One ant's placement, or None if some vnode runs out of hosts."""
    if search is None:
        search = VnrSearch(net, vnr, PriceTable(), FragConfig())
    if order is None:
        order = sorted_vnodes(candidates) if params.sort_vnodes else sorted(candidates)
    remaining = {v: set(c) for v, c in candidates.items()}
    partial: dict[int, int] = {}
    for vid in order:
        host = select_host(vid, remaining[vid], pheromone, params, rng, partial, search, trace)
        if host is None:
            return None
        partial[vid] = host
        for other in remaining:
            if other != vid:
                remaining[other].discard(host)
        pheromone.local_update(vid, host, params.phi)
    return partial


def local_search(search: VnrSearch, placements: Mapping[int, int], fitness,
                 candidates: Mapping[int, set]) -> tuple[dict[int, int], object, list]:
    """Best-improvement host swaps, one pass in sorted vnode order."""
    current = dict(placements)
    best_fit, best_routes = search.evaluate(current)
    for vid in sorted_vnodes(candidates):
        used = {h for v, h in current.items() if v != vid}
        choice = None
        for h in sorted(candidates[vid]):
            if h == current[vid] or h in used:
                continue
            trial = dict(current)
            trial[vid] = h
            fit, routes = search.evaluate(trial)
            if fit < best_fit:
                best_fit, best_routes, choice = fit, routes, h
        if choice is not None:
            current[vid] = choice
    return current, best_fit, best_routes


def initial_pheromone(net: SubstrateNetwork, vnr: VirtualRequest, prices: PriceTable, cfg: FragConfig) -> float:
    """``1 / (|N| * Cost)`` with Cost from Greedy-SP-FF, or the revenue if that fails."""
    greedy = greedy_sp_ff(net, vnr, prices, cfg)
    cost = greedy.fitness if greedy.accepted else revenue(vnr, prices)
    if cost <= 0:
        cost = 1
    return 1.0 / (len(net.nodes) * float(cost))


def bivne_embed(net: SubstrateNetwork, vnr: VirtualRequest, params: AcsParams = AcsParams(),
                prices: PriceTable = PriceTable(), cfg: FragConfig = FragConfig(),
                rng: np.random.Generator | None = None, history: list | None = None) -> EmbeddingSolution:
    """Search a placement and routing for one request; ``net`` is not modified.

    ``history`` receives ``(best_fitness, max_pheromone, min_pheromone)`` per
    generation when given.
    """
    if rng is None:
        rng = np.random.default_rng()
    candidates = reduce_candidates(net, vnr)
    empty = [v for v, c in candidates.items() if not c]
    if empty:
        return EmbeddingSolution.rejected(vnr.id, f"empty candidate set for vnode {empty[0]}")
    search = VnrSearch(net, vnr, prices, cfg)
    tau0 = params.tau0 if params.tau0 is not None else initial_pheromone(net, vnr, prices, cfg)
    pheromone = PheromoneMatrix(tau0)
    order = sorted_vnodes(candidates) if params.sort_vnodes else sorted(candidates)

    best = None  # (fitness, placements, routes)
    stale = 0
    for _ in range(params.max_generations):
        it_best = None
        for _ant in range(params.colony_size):
            x = construct_solution(net, vnr, candidates, pheromone, params, rng, search, order)
            if x is None:
                continue
            fit, routes = search.evaluate(x)
            if fit == INF:
                continue
            if it_best is None or fit < it_best[0]:
                it_best = (fit, x, routes)
        improved = False
        if it_best is not None:
            if params.local_search:
                x, fit, routes = local_search(search, it_best[1], it_best[0], candidates)
                it_best = (fit, x, routes)
            pheromone.global_update(it_best[1], it_best[0], params.rho)
            if best is None or it_best[0] < best[0]:
                best = it_best
                improved = True
        if history is not None:
            vals = list(pheromone.values.values()) or [pheromone.tau0]
            history.append((best[0] if best else INF, max(vals), min(vals)))
        stale = 0 if improved else stale + 1
        if params.early_stop is not None and best is not None and stale >= params.early_stop:
            break
    if best is None:
        return EmbeddingSolution.rejected(vnr.id, "no feasible ant")
    fit, x, routes = best
    return EmbeddingSolution(vnr.id, True, dict(x), list(routes), fit)
