"""Lower level: route every virtual link for a fixed node placement.

Each vlink gets the minimum-hop path on a working copy of the substrate that
only keeps links able to carry the request's slot demand, then an aligned
contiguous slot block chosen to create as few fragment slots as possible.
The links of every chosen path are removed from the working copy before the
next vlink is routed.
"""

from __future__ import annotations

import heapq
from collections import deque
from typing import Mapping

import numpy as np

from .fragcost import FragConfig
from .substrate import SubstrateNetwork, SubstratePath, largest_free_run
from .solution import RouteAssignment
from .vnr import VirtualRequest

INF = float("inf")


class LinkRejected(Exception):
    """A virtual link could not be routed; the whole VNR is rejected."""

    def __init__(self, vlink: int, reason: str):
        self.vlink = vlink
        self.reason = reason
        super().__init__(f"vlink {vlink}: {reason}")


class WorkingGraph:
    """Mutable adjacency ``node -> {neighbor: link_id}``."""

    def __init__(self, nodes, adj: dict[int, dict[int, int]]):
        self.nodes = sorted(nodes)
        self.adj = adj

    @classmethod
    def from_network(cls, net: SubstrateNetwork, demand_slots: int = 1) -> WorkingGraph:
        adj = {n: {} for n in net.nodes}
        for e in net.links.values():
            if largest_free_run(e) >= demand_slots:
                adj[e.a][e.b] = e.id
                adj[e.b][e.a] = e.id
        return cls(net.nodes, adj)

    def copy(self) -> WorkingGraph:
        return WorkingGraph(self.nodes, {n: dict(nb) for n, nb in self.adj.items()})

    def link_ids(self) -> set[int]:
        return {l for nb in self.adj.values() for l in nb.values()}

    def remove_path(self, path: SubstratePath) -> None:
        for u, v in zip(path.nodes, path.nodes[1:]):
            self.adj[u].pop(v, None)
            self.adj[v].pop(u, None)

    def without(self, nodes=(), edges=()) -> WorkingGraph:
        g = self.copy()
        for u, v in edges:
            g.adj[u].pop(v, None)
            g.adj[v].pop(u, None)
        for n in nodes:
            for m in list(g.adj[n]):
                g.adj[m].pop(n, None)
            g.adj[n] = {}
        return g


def prune_working_graph(net: SubstrateNetwork, demand_slots: int) -> WorkingGraph:
    """Copy of the substrate keeping links whose largest free run fits the demand."""
    if demand_slots < 1:
        raise ValueError("demand_slots must be >= 1")
    return WorkingGraph.from_network(net, demand_slots)


def bfs_hops(graph: WorkingGraph, source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def hop_matrix(graph: WorkingGraph) -> dict[int, dict[int, int]]:
    return {n: bfs_hops(graph, n) for n in graph.nodes}


def shortest_path(graph: WorkingGraph, src: int, dst: int) -> SubstratePath | None:
    """Minimum-hop path; among equals, the lexicographically smallest node sequence."""
    if src == dst:
        raise ValueError("src and dst must differ")
    dist = bfs_hops(graph, dst)
    if src not in dist:
        return None
    nodes, links = [src], []
    u = src
    while u != dst:
        v = min(w for w in graph.adj[u] if dist.get(w) == dist[u] - 1)
        links.append(graph.adj[u][v])
        nodes.append(v)
        u = v
    return SubstratePath(tuple(nodes), tuple(links))


def k_shortest_paths(graph: WorkingGraph, src: int, dst: int, k: int) -> list[SubstratePath]:
    """Yen's algorithm ordered by (hops, node sequence)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    first = shortest_path(graph, src, dst)
    if first is None:
        return []
    found = [first]
    candidates: list = []
    seen = {first.nodes}
    while len(found) < k:
        prev = found[-1]
        for i in range(len(prev.nodes) - 1):
            spur = prev.nodes[i]
            root = prev.nodes[:i + 1]
            cut = [(p.nodes[i], p.nodes[i + 1]) for p in found if p.nodes[:i + 1] == root]
            g = graph.without(nodes=root[:-1], edges=cut)
            tail = shortest_path(g, spur, dst)
            if tail is None:
                continue
            nodes = root[:-1] + tail.nodes
            if nodes in seen:
                continue
            seen.add(nodes)
            links = tuple(graph.adj[a][b] for a, b in zip(nodes, nodes[1:]))
            heapq.heappush(candidates, (len(links), nodes, links))
        if not candidates:
            break
        _, nodes, links = heapq.heappop(candidates)
        found.append(SubstratePath(nodes, links))
    return found


# --- slot selection --------------------------------------------------------

def _occupancies(net: SubstrateNetwork, path: SubstratePath, shadow: Mapping | None) -> list[np.ndarray]:
    shadow = shadow or {}
    return [shadow[l] if l in shadow else net.links[l].occupancy for l in path.links]


def _feasible_starts(occs: list[np.ndarray], demand: int) -> tuple[np.ndarray, int]:
    width = min(o.size for o in occs)
    free = np.logical_and.reduce([~o[:width] for o in occs])
    if demand > width:
        return np.empty(0, dtype=int), width
    cs = np.concatenate(([0], np.cumsum(free)))
    window = cs[demand:] - cs[:-demand]
    return np.flatnonzero(window == demand), width


def _run_bounds(occ: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each slot index, first and last index of the free run holding it."""
    n = occ.size
    idx = np.arange(n)
    run_lo = np.maximum.accumulate(np.where(occ, idx, -1)) + 1
    run_hi = np.minimum.accumulate(np.where(occ, idx, n)[::-1])[::-1] - 1
    return run_lo, run_hi


def placement_scores(occs: list[np.ndarray], starts: np.ndarray, demand: int,
                     cfg: FragConfig) -> tuple[np.ndarray, np.ndarray]:
    """New fragment slots and total leftover slots for each candidate start."""
    frag = np.zeros(starts.size, dtype=int)
    leftover = np.zeros(starts.size, dtype=int)
    lo_ok = 1 if cfg.count_singletons else 2
    for occ in occs:
        run_lo, run_hi = _run_bounds(occ)
        left = starts - run_lo[starts]
        right = run_hi[starts] - (starts + demand - 1)
        for side in (left, right):
            frag += np.where((side >= lo_ok) & (side <= cfg.xi_max), side, 0)
        leftover += left + right
    return frag, leftover


def exact_fit_slots(net: SubstrateNetwork, path: SubstratePath, demand: int, cfg: FragConfig,
                    shadow: Mapping | None = None) -> tuple[int, int] | None:
    """Aligned block creating the fewest fragment slots.

    Ties go to the smaller total leftover in the host runs, then to the
    lowest start index.
    """
    if demand < 1:
        raise ValueError("demand must be >= 1")
    occs = _occupancies(net, path, shadow)
    starts, _ = _feasible_starts(occs, demand)
    if starts.size == 0:
        return None
    frag, leftover = placement_scores(occs, starts, demand, cfg)
    best = np.lexsort((starts, leftover, frag))[0]
    s = int(starts[best])
    return s, s + demand - 1


def first_fit_slots(net: SubstrateNetwork, path: SubstratePath, demand: int,
                    shadow: Mapping | None = None) -> tuple[int, int] | None:
    if demand < 1:
        raise ValueError("demand must be >= 1")
    starts, _ = _feasible_starts(_occupancies(net, path, shadow), demand)
    if starts.size == 0:
        return None
    s = int(starts[0])
    return s, s + demand - 1


# --- link embedding --------------------------------------------------------

def vlink_order(vnr: VirtualRequest, placements: Mapping[int, int], graph: WorkingGraph,
                hops: Mapping[int, Mapping[int, int]] | None = None) -> list[int]:
    """Longest host-to-host hop distance first, then vlink id.

    ``hops`` may hold precomputed hop distances on ``graph``.
    """
    cache: dict = {} if hops is None else hops

    def dist(i):
        u, v = vnr.vlinks[i]
        a, b = placements[u], placements[v]
        if a not in cache:
            cache[a] = bfs_hops(graph, a)
        return cache[a].get(b, INF)

    return sorted(range(len(vnr.vlinks)), key=lambda i: (-dist(i), i))


def embed_links(net: SubstrateNetwork, vnr: VirtualRequest, placements: Mapping[int, int],
                cfg: FragConfig, slot_policy: str = "exact_fit", k_paths: int = 1,
                graph: WorkingGraph | None = None,
                hops: Mapping[int, Mapping[int, int]] | None = None) -> list[RouteAssignment]:
    """Route and assign slots to every vlink of ``vnr``.

    Returns the assignments in processing order, or raises
    :class:`LinkRejected`. ``net`` is never modified. ``graph`` may pass a
    precomputed pruned working graph, which is copied before use, and
    ``hops`` its all-pairs hop distances.
    """
    if not vnr.vlinks:
        return []
    demand = vnr.slot_demand
    g = (graph or prune_working_graph(net, demand)).copy()
    shadow: dict[int, np.ndarray] = {}
    routes = []
    for i in vlink_order(vnr, placements, g, hops):
        u, v = vnr.vlinks[i]
        src, dst = placements[u], placements[v]
        if k_paths == 1:
            sp = shortest_path(g, src, dst)
            paths = [sp] if sp is not None else []
        else:
            paths = k_shortest_paths(g, src, dst, k_paths)
        if not paths:
            raise LinkRejected(i, "no path")
        chosen = None
        for path in paths:
            if slot_policy == "exact_fit":
                block = exact_fit_slots(net, path, demand, cfg, shadow)
            elif slot_policy == "first_fit":
                block = first_fit_slots(net, path, demand, shadow)
            else:
                raise ValueError(f"unknown slot policy {slot_policy!r}")
            if block is not None:
                chosen = (path, block)
                break
        if chosen is None:
            raise LinkRejected(i, "no aligned slot block")
        path, (s, t) = chosen
        for l in path.links:
            occ = shadow.setdefault(l, net.links[l].occupancy.copy())
            occ[s:t + 1] = True
        g.remove_path(path)
        routes.append(RouteAssignment(i, path, s, t))
    return routes
