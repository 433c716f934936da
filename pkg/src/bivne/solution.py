"""Embedding results shared by BiVNE, the baselines and the validator."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .substrate import SubstratePath


@dataclass(frozen=True)
class RouteAssignment:
    """Lightpath and aligned slot block ``[slot_start, slot_end]`` for one vlink.

    ``explicit`` optionally overrides the per-link slot sets; it exists so
    that hand-written or loaded solutions can express misaligned blocks for
    the validator to reject.
    """

    vlink: int
    path: SubstratePath
    slot_start: int
    slot_end: int
    explicit: tuple[tuple[int, tuple[int, ...]], ...] | None = None

    @property
    def slot_count(self) -> int:
        return self.slot_end - self.slot_start + 1

    def link_slots(self) -> dict[int, tuple[int, ...]]:
        if self.explicit is not None:
            return {l: tuple(s) for l, s in self.explicit}
        block = tuple(range(self.slot_start, self.slot_end + 1))
        return {l: block for l in self.path.links}


@dataclass
class EmbeddingSolution:
    vnr_id: int
    accepted: bool
    placements: dict[int, int] = field(default_factory=dict)
    routes: list[RouteAssignment] = field(default_factory=list)
    fitness: Fraction | float = float("inf")
    reason: str | None = None

    @classmethod
    def rejected(cls, vnr_id: int, reason: str) -> EmbeddingSolution:
        return cls(vnr_id, False, reason=reason)

    def to_dict(self) -> dict:
        return {
            "vnr_id": self.vnr_id,
            "accepted": self.accepted,
            "placements": {str(k): v for k, v in sorted(self.placements.items())},
            "routes": [{"vlink": r.vlink, "nodes": list(r.path.nodes), "links": list(r.path.links),
                        "slots": {str(l): list(s) for l, s in r.link_slots().items()}}
                       for r in self.routes],
            "fitness": None if self.fitness == float("inf") else str(self.fitness),
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> EmbeddingSolution:
        routes = []
        for r in d.get("routes", []):
            path = SubstratePath(tuple(r["nodes"]), tuple(r["links"]))
            slots = tuple((int(l), tuple(sorted(int(i) for i in s))) for l, s in r["slots"].items())
            first = slots[0][1] if slots and slots[0][1] else (0,)
            routes.append(RouteAssignment(int(r["vlink"]), path, min(first), max(first), explicit=slots))
        fit = d.get("fitness")
        return cls(int(d["vnr_id"]), bool(d["accepted"]),
                   {int(k): int(v) for k, v in d.get("placements", {}).items()}, routes,
                   float("inf") if fit is None else Fraction(fit), d.get("reason"))
