"""Virtual network requests: types, random batches and candidate hosts."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .substrate import SQUARE_SIDE, SubstrateNetwork


@dataclass(frozen=True)
class VirtualNode:
    id: int
    comp_demand: int
    chan_demand: int
    pref_center: tuple[float, float]
    pref_radius: float

    def __post_init__(self):
        if self.comp_demand < 1 or self.chan_demand < 1:
            raise ConfigError(f"vnode {self.id}: demands must be >= 1")
        if self.pref_radius <= 0:
            raise ConfigError(f"vnode {self.id}: pref_radius must be > 0")


@dataclass(frozen=True)
class VirtualRequest:
    """A VNR. Every virtual link asks for the same ``slot_demand``.

    Virtual links are stored as ``(u, v)`` with ``u < v``; a link's id is its
    index in ``vlinks``.
    """

    id: int
    vnodes: tuple[VirtualNode, ...]
    vlinks: tuple[tuple[int, int], ...]
    slot_demand: int
    _degree: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        ids = [vn.id for vn in self.vnodes]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"vnr {self.id}: duplicate vnode ids")
        if self.slot_demand < 1:
            raise ConfigError(f"vnr {self.id}: slot_demand must be >= 1")
        known = set(ids)
        seen = set()
        for u, v in self.vlinks:
            if u == v:
                raise ConfigError(f"vnr {self.id}: self-loop on vnode {u}")
            if u not in known or v not in known:
                raise ConfigError(f"vnr {self.id}: vlink ({u}, {v}) references unknown vnode")
            key = frozenset((u, v))
            if key in seen:
                raise ConfigError(f"vnr {self.id}: duplicate vlink ({u}, {v})")
            seen.add(key)
        deg = {i: 0 for i in ids}
        for u, v in self.vlinks:
            deg[u] += 1
            deg[v] += 1
        object.__setattr__(self, "_degree", deg)

    def degree(self, vnode_id: int) -> int:
        return self._degree[vnode_id]

    def vnode(self, vnode_id: int) -> VirtualNode:
        for vn in self.vnodes:
            if vn.id == vnode_id:
                return vn
        raise KeyError(vnode_id)

    def neighbors(self, vnode_id: int) -> list[int]:
        out = [v for u, v in self.vlinks if u == vnode_id] + [u for u, v in self.vlinks if v == vnode_id]
        return sorted(out)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "slot_demand": self.slot_demand,
            "vnodes": [{"id": vn.id, "comp": vn.comp_demand, "chan": vn.chan_demand,
                        "x": vn.pref_center[0], "y": vn.pref_center[1], "radius": vn.pref_radius}
                       for vn in self.vnodes],
            "vlinks": [list(e) for e in self.vlinks],
        }

    @classmethod
    def from_dict(cls, d: dict) -> VirtualRequest:
        try:
            vnodes = tuple(VirtualNode(int(v["id"]), int(v["comp"]), int(v["chan"]),
                                       (float(v["x"]), float(v["y"])), float(v["radius"]))
                           for v in d["vnodes"])
            vlinks = tuple(tuple(sorted((int(a), int(b)))) for a, b in d["vlinks"])
            return cls(int(d["id"]), vnodes, vlinks, int(d["slot_demand"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed VNR entry: {exc!r}") from None


def candidate_nodes(net: SubstrateNetwork, vn: VirtualNode) -> set[int]:
    """Hosts with enough free computing and channels inside the preferred area."""
    out = set()
    for nid, n in net.nodes.items():
        if n.comp_avail < vn.comp_demand or n.chan_avail < vn.chan_demand:
            continue
        if math.dist(vn.pref_center, n.loc) <= vn.pref_radius:
            out.add(nid)
    return out


@dataclass(frozen=True)
class RequestProfile:
    """Ranges (inclusive) for random VNR generation."""

    nodes: tuple[int, int] = (3, 4)
    comp: tuple[int, int] = (1, 10)
    chan: tuple[int, int] = (1, 10)
    slots: tuple[int, int] = (1, 10)
    radius: tuple[int, int] = (200, 300)
    link_prob: float = 0.5
    side: float = SQUARE_SIDE

    def __post_init__(self):
        for name in ("nodes", "comp", "chan", "slots", "radius"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi:
                raise ConfigError(f"request profile {name}={lo, hi} is invalid")
        if not 0.0 <= self.link_prob <= 1.0:
            raise ConfigError("request profile link_prob must lie in [0, 1]")


DT14_PROFILE = RequestProfile()
RAND50_PROFILE = RequestProfile(nodes=(3, 10), comp=(1, 20), chan=(1, 20), slots=(1, 20))


def _randint(rng, lo, hi) -> int:
    return int(rng.integers(lo, hi, endpoint=True))


def generate_request(profile: RequestProfile, rng: np.random.Generator, vnr_id: int) -> VirtualRequest:
    k = _randint(rng, *profile.nodes)
    vnodes = []
    for i in range(k):
        comp = _randint(rng, *profile.comp)
        chan = _randint(rng, *profile.chan)
        x, y = rng.uniform(0.0, profile.side, size=2)
        radius = _randint(rng, *profile.radius)
        vnodes.append(VirtualNode(i, comp, chan, (float(x), float(y)), float(radius)))
    vlinks = tuple((u, v) for u in range(k) for v in range(u + 1, k) if rng.random() < profile.link_prob)
    return VirtualRequest(vnr_id, tuple(vnodes), vlinks, _randint(rng, *profile.slots))


def generate_requests(profile: RequestProfile, count: int, rng: np.random.Generator) -> list[VirtualRequest]:
    """``count`` requests; a shorter batch is a prefix of a longer one from the same stream."""
    if count < 0:
        raise ConfigError("request count must be >= 0")
    return [generate_request(profile, rng, i) for i in range(count)]


def save_requests(requests, path) -> None:
    Path(path).write_text(json.dumps([r.to_dict() for r in requests], indent=1))


def load_requests(path) -> list[VirtualRequest]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"VNR batch {path} is not valid JSON: {exc}") from None
    return [VirtualRequest.from_dict(d) for d in data]
