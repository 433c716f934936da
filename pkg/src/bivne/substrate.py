"""Physical network model: MEC nodes, optical links and their spectrum state.

Every link carries one shared pool of frequency slots stored as a boolean
occupancy array (``True`` = occupied). Free runs are recomputed on demand.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .errors import ConfigError, UnknownNodeError

SQUARE_SIDE = 1000.0


@dataclass
class SubstrateNode:
    id: int
    loc: tuple[float, float]
    comp_cap: int
    chan_cap: int
    comp_used: int = 0
    chan_used: int = 0
    name: str | None = None

    @property
    def comp_avail(self) -> int:
        return self.comp_cap - self.comp_used

    @property
    def chan_avail(self) -> int:
        return self.chan_cap - self.chan_used


@dataclass
class OpticalLink:
    id: int
    a: int
    b: int
    slot_count: int
    occupancy: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.slot_count < 1:
            raise ConfigError(f"link {self.id}: slot_count must be >= 1")
        if self.occupancy is None:
            self.occupancy = np.zeros(self.slot_count, dtype=bool)
        else:
            self.occupancy = np.asarray(self.occupancy, dtype=bool).copy()
        if self.occupancy.shape != (self.slot_count,):
            raise ConfigError(f"link {self.id}: occupancy length != slot_count")

    @property
    def endpoints(self) -> frozenset:
        return frozenset((self.a, self.b))

    @property
    def free_mask(self) -> np.ndarray:
        return ~self.occupancy

    @property
    def free_count(self) -> int:
        return int(self.slot_count - self.occupancy.sum())

    def other(self, node_id: int) -> int:
        if node_id == self.a:
            return self.b
        if node_id == self.b:
            return self.a
        raise UnknownNodeError(node_id)


@dataclass(frozen=True)
class FreeRun:
    """Maximal block of free slots ``[start, end]`` (inclusive)."""

    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    @property
    def is_macsb(self) -> bool:
        # a MACSB needs more than one free slot
        return self.length >= 2


@dataclass(frozen=True)
class SubstratePath:
    nodes: tuple[int, ...]
    links: tuple[int, ...]

    @property
    def hops(self) -> int:
        return len(self.links)

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]

    def uses(self, link_id: int) -> bool:
        return link_id in self.links


class SubstrateNetwork:
    """Undirected, connected graph of MEC nodes joined by optical links."""

    def __init__(self, nodes: Iterable[SubstrateNode], links: Iterable[OpticalLink],
                 require_connected: bool = True):
        self.nodes: dict[int, SubstrateNode] = {}
        for n in nodes:
            if n.id in self.nodes:
                raise ConfigError(f"duplicate node id {n.id}")
            if not (0 <= n.comp_used <= n.comp_cap and 0 <= n.chan_used <= n.chan_cap):
                raise ConfigError(f"node {n.id}: usage outside [0, capacity]")
            self.nodes[n.id] = n
        self.links: dict[int, OpticalLink] = {}
        self.adjacency: dict[int, list[int]] = {nid: [] for nid in self.nodes}
        self._pair: dict[frozenset, int] = {}
        for e in links:
            if e.id in self.links:
                raise ConfigError(f"duplicate link id {e.id}")
            if e.a not in self.nodes or e.b not in self.nodes:
                raise ConfigError(f"link {e.id} references an unknown node")
            if e.a == e.b:
                raise ConfigError(f"link {e.id} is a self-loop")
            if e.endpoints in self._pair:
                raise ConfigError(f"link {e.id} duplicates link {self._pair[e.endpoints]}")
            self.links[e.id] = e
            self._pair[e.endpoints] = e.id
            self.adjacency[e.a].append(e.id)
            self.adjacency[e.b].append(e.id)
        for lst in self.adjacency.values():
            lst.sort()
        if require_connected and self.nodes and not nx.is_connected(self.to_networkx()):
            raise ConfigError("substrate graph is not connected")

    def __repr__(self):
        return f"SubstrateNetwork({len(self.nodes)} nodes, {len(self.links)} links)"

    def node(self, node_id: int) -> SubstrateNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def link_between(self, u: int, v: int) -> int | None:
        return self._pair.get(frozenset((u, v)))

    def neighbors(self, node_id: int) -> list[tuple[int, int]]:
        """``(neighbor, link_id)`` pairs ordered by neighbor id."""
        out = [(self.links[l].other(node_id), l) for l in self.adjacency[node_id]]
        return sorted(out)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(sorted(self.nodes))
        for e in sorted(self.links.values(), key=lambda e: e.id):
            g.add_edge(e.a, e.b, id=e.id)
        return g

    def copy(self) -> SubstrateNetwork:
        return copy.deepcopy(self)

    def state(self) -> tuple:
        """Hashable snapshot of all mutable state (node usage and spectrum)."""
        usage = tuple((n.id, n.comp_used, n.chan_used) for n in sorted(self.nodes.values(), key=lambda n: n.id))
        spectrum = tuple((e.id, e.occupancy.tobytes()) for e in sorted(self.links.values(), key=lambda e: e.id))
        return usage, spectrum

    def distance(self, loc: Sequence[float], node_id: int) -> float:
        return math.dist(loc, self.node(node_id).loc)


# --- spectrum queries ------------------------------------------------------

def runs_of_mask(free: np.ndarray) -> list[FreeRun]:
    """Maximal runs of ``True`` entries in a free-slot mask, ascending."""
    free = np.asarray(free, dtype=bool)
    padded = np.concatenate(([False], free, [False])).astype(np.int8)
    d = np.diff(padded)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1) - 1
    return [FreeRun(int(s), int(t)) for s, t in zip(starts, ends)]


def free_runs(link: OpticalLink) -> list[FreeRun]:
    return runs_of_mask(link.free_mask)


def largest_free_run(link: OpticalLink) -> int:
    runs = free_runs(link)
    return max((r.length for r in runs), default=0)


def path_free_mask(net: SubstrateNetwork, path: SubstratePath) -> np.ndarray:
    """Slots free on every link of ``path``; truncated to the narrowest link."""
    if not path.links:
        raise ValueError("path has no links")
    links = [net.links[l] for l in path.links]
    width = min(e.slot_count for e in links)
    return np.logical_and.reduce([e.free_mask[:width] for e in links])


def path_free_runs(net: SubstrateNetwork, path: SubstratePath) -> list[FreeRun]:
    """Runs of slot indices free on every link of ``path`` (spectrum continuity)."""
    return runs_of_mask(path_free_mask(net, path))


def path_bandwidth(net: SubstrateNetwork, path: SubstratePath) -> int:
    """Minimum slot count over the path's links."""
    return min(net.links[l].slot_count for l in path.links)


def available_degree(net: SubstrateNetwork, node_id: int, demand_slots: int) -> int:
    """Number of attached links whose largest free run fits ``demand_slots``."""
    if demand_slots < 1:
        raise ValueError("demand_slots must be >= 1")
    net.node(node_id)
    return sum(1 for l in net.adjacency[node_id] if largest_free_run(net.links[l]) >= demand_slots)


# --- state mutation --------------------------------------------------------

def allocate(net: SubstrateNetwork, vnr, solution) -> None:
    """Apply an accepted solution to ``net`` after validating it."""
    from .errors import AllocationError
    from .validation import validate

    violations = validate(net, vnr, solution)
    if violations:
        raise AllocationError(violations)
    demands = {vn.id: vn for vn in vnr.vnodes}
    for vid, host in solution.placements.items():
        node = net.nodes[host]
        node.comp_used += demands[vid].comp_demand
        node.chan_used += demands[vid].chan_demand
    for route in solution.routes:
        for l, slots in route.link_slots().items():
            net.links[l].occupancy[list(slots)] = True


def release(net: SubstrateNetwork, vnr, solution) -> None:
    """Undo :func:`allocate` for the same solution."""
    demands = {vn.id: vn for vn in vnr.vnodes}
    for vid, host in solution.placements.items():
        node = net.nodes[host]
        node.comp_used -= demands[vid].comp_demand
        node.chan_used -= demands[vid].chan_demand
    for route in solution.routes:
        for l, slots in route.link_slots().items():
            net.links[l].occupancy[list(slots)] = False


# --- construction ----------------------------------------------------------

@dataclass(frozen=True)
class CapacityRanges:
    comp: tuple[int, int] = (50, 100)
    chan: tuple[int, int] = (50, 100)
    slots: tuple[int, int] = (50, 100)

    def __post_init__(self):
        for name in ("comp", "chan", "slots"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi:
                raise ConfigError(f"capacity range {name}={lo, hi} is invalid")


@dataclass(frozen=True)
class RandomTopologyParams:
    nodes: int
    links: int
    capacities: CapacityRanges = CapacityRanges()
    side: float = SQUARE_SIDE


def _draw_int(rng: np.random.Generator, lo: int, hi: int) -> int:
    return int(rng.integers(lo, hi, endpoint=True))


def draw_capacities(net: SubstrateNetwork, ranges: CapacityRanges, rng: np.random.Generator) -> None:
    """Redraw all capacities uniformly; resets usage and spectrum."""
    for nid in sorted(net.nodes):
        n = net.nodes[nid]
        n.comp_cap = _draw_int(rng, *ranges.comp)
        n.chan_cap = _draw_int(rng, *ranges.chan)
        n.comp_used = n.chan_used = 0
    for lid in sorted(net.links):
        e = net.links[lid]
        e.slot_count = _draw_int(rng, *ranges.slots)
        e.occupancy = np.zeros(e.slot_count, dtype=bool)


def generate_random(params: RandomTopologyParams, rng: np.random.Generator) -> SubstrateNetwork:
    """Uniform spanning tree plus uniformly drawn extra links."""
    n, m = params.nodes, params.links
    if n < 1:
        raise ConfigError("random topology needs at least one node")
    if m < n - 1 or m > n * (n - 1) // 2:
        raise ConfigError(f"link count {m} impossible for {n} connected nodes")
    if n == 1:
        edges = []
    elif n == 2:
        edges = [(0, 1)]
    else:
        # a uniform Pruefer sequence gives a uniform labelled spanning tree
        prufer = [int(v) for v in rng.integers(0, n, size=n - 2)]
        tree = nx.from_prufer_sequence(prufer)
        edges = sorted(tuple(sorted(e)) for e in tree.edges())
    present = set(edges)
    rest = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in present]
    extra = m - len(edges)
    if extra:
        picks = rng.choice(len(rest), size=extra, replace=False)
        edges += [rest[i] for i in sorted(int(p) for p in picks)]
    xy = rng.uniform(0.0, params.side, size=(n, 2))
    caps = params.capacities
    nodes = [SubstrateNode(i, (float(xy[i, 0]), float(xy[i, 1])),
                           _draw_int(rng, *caps.comp), _draw_int(rng, *caps.chan)) for i in range(n)]
    links = [OpticalLink(i, u, v, _draw_int(rng, *caps.slots)) for i, (u, v) in enumerate(edges)]
    return SubstrateNetwork(nodes, links)


def builtin_topology_path(name: str) -> Path:
    ref = resources.files("bivne") / "data" / f"{name}.json"
    return Path(str(ref))


def load_topology(source) -> SubstrateNetwork:
    """Build a network from a topology document.

    ``source`` may be a mapping, a path to a JSON file, or the name of a
    bundled topology (``"dt14"``).
    """
    if isinstance(source, dict):
        doc = source
    else:
        p = Path(source)
        if not p.exists() and not p.suffix:
            p = builtin_topology_path(str(source))
        try:
            doc = json.loads(p.read_text())
        except FileNotFoundError:
            raise ConfigError(f"topology document not found: {source}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"topology document {p} is not valid JSON: {exc}") from None
    try:
        nodes = [SubstrateNode(int(d["id"]), (float(d["x"]), float(d["y"])),
                               int(d.get("comp_cap", 100)), int(d.get("chan_cap", 100)),
                               int(d.get("comp_used", 0)), int(d.get("chan_used", 0)),
                               name=d.get("name")) for d in doc["nodes"]]
        links = []
        for d in doc["links"]:
            e = OpticalLink(int(d["id"]), int(d["a"]), int(d["b"]), int(d.get("slots", 100)))
            busy = [int(i) for i in d.get("occupied", ())]
            if any(not 0 <= i < e.slot_count for i in busy):
                raise ValueError(f"link {e.id}: occupied slot index out of range")
            e.occupancy[busy] = True
            links.append(e)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"malformed topology document: {exc!r}") from None
    return SubstrateNetwork(nodes, links)


def dump_topology(net: SubstrateNetwork, with_state: bool = False) -> dict:
    """Topology document; ``with_state`` adds used resources and occupied slots."""
    nodes = []
    for n in sorted(net.nodes.values(), key=lambda n: n.id):
        d = {"id": n.id, "x": n.loc[0], "y": n.loc[1], "comp_cap": n.comp_cap, "chan_cap": n.chan_cap}
        if with_state:
            d.update(comp_used=n.comp_used, chan_used=n.chan_used)
        if n.name is not None:
            d["name"] = n.name
        nodes.append(d)
    links = []
    for e in sorted(net.links.values(), key=lambda e: e.id):
        d = {"id": e.id, "a": e.a, "b": e.b, "slots": e.slot_count}
        if with_state:
            d["occupied"] = [int(i) for i in np.flatnonzero(e.occupancy)]
        links.append(d)
    return {"nodes": nodes, "links": links}
