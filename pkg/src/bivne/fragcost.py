"""Fragmentation metrics and the revenue / cost / profit formulas.

Money is kept as :class:`fractions.Fraction` so that ledgers built from
integer prices add up exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError
from .substrate import SubstrateNetwork, SubstrateNode
from .vnr import VirtualNode, VirtualRequest


def _money(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class PriceTable:
    alpha: Fraction = Fraction(3)
    kappa: Fraction = Fraction(3)
    gamma: Fraction = Fraction(3)
    alpha_p: Fraction = Fraction(1)
    kappa_p: Fraction = Fraction(1)
    gamma_p: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("alpha", "kappa", "gamma", "alpha_p", "kappa_p", "gamma_p"):
            v = _money(getattr(self, name))
            if v < 0:
                raise DomainError(f"price {name} must be >= 0")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class FragConfig:
    """``xi_max``: largest free run still counted as a fragment.

    With ``count_singletons=False`` only leftovers of two or more slots count,
    which is the strict MACSB reading.
    """

    xi_max: int = 2
    count_singletons: bool = True

    def __post_init__(self):
        if self.xi_max < 1:
            raise DomainError("xi_max must be >= 1")

    def is_fragment(self, length: int) -> bool:
        lo = 1 if self.count_singletons else 2
        return lo <= length <= self.xi_max


# --- level of imbalance ----------------------------------------------------

def _loi(comp_used, comp_cap, chan_used, chan_cap) -> Fraction:
    if comp_cap <= 0 or chan_cap <= 0:
        raise DomainError("LoI needs positive capacities")
    return abs(Fraction(comp_used, comp_cap) - Fraction(chan_used, chan_cap))


def loi(node: SubstrateNode) -> Fraction:
    return _loi(node.comp_used, node.comp_cap, node.chan_used, node.chan_cap)


def loi_increase(node: SubstrateNode, vn: VirtualNode) -> Fraction:
    """Increase in LoI caused by hosting ``vn``; zero if imbalance shrinks."""
    if vn.comp_demand > node.comp_avail or vn.chan_demand > node.chan_avail:
        raise DomainError(f"node {node.id} cannot host vnode {vn.id}")
    before = loi(node)
    after = _loi(node.comp_used + vn.comp_demand, node.comp_cap,
                 node.chan_used + vn.chan_demand, node.chan_cap)
    return max(after - before, Fraction(0))


# --- spectral fragments ----------------------------------------------------

def host_run(occupancy: np.ndarray, start: int, length: int) -> tuple[int, int]:
    """Bounds of the free run containing ``[start, start+length-1]``."""
    occ = np.asarray(occupancy, dtype=bool)
    end = start + length - 1
    if length < 1 or start < 0 or end >= occ.size or occ[start:end + 1].any():
        raise DomainError(f"allocation [{start}, {end}] is not inside a free run")
    lo = start
    while lo > 0 and not occ[lo - 1]:
        lo -= 1
    hi = end
    while hi < occ.size - 1 and not occ[hi + 1]:
        hi += 1
    return lo, hi


def new_fragment_slots(occupancy: np.ndarray, alloc_start: int, alloc_len: int, cfg: FragConfig) -> int:
    """Slots in the leftover pieces of the host run that become fragments."""
    lo, hi = host_run(occupancy, alloc_start, alloc_len)
    left = alloc_start - lo
    right = hi - (alloc_start + alloc_len - 1)
    return sum(x for x in (left, right) if cfg.is_fragment(x))


# --- revenue and cost ------------------------------------------------------

def revenue(vnr: VirtualRequest, prices: PriceTable) -> Fraction:
    nodes = sum((prices.alpha * vn.comp_demand + prices.kappa * vn.chan_demand for vn in vnr.vnodes), Fraction(0))
    return nodes + prices.gamma * vnr.slot_demand * len(vnr.vlinks)


def node_cost_term(node: SubstrateNode, vn: VirtualNode, prices: PriceTable) -> Fraction:
    """Cost of placing one vnode on ``node``, inflated by the LoI increase."""
    return (1 + loi_increase(node, vn)) * (prices.alpha_p * vn.comp_demand + prices.kappa_p * vn.chan_demand)


def node_cost(placements: Mapping[int, int], net: SubstrateNetwork, vnr: VirtualRequest,
              prices: PriceTable) -> Fraction:
    hosts = list(placements.values())
    if len(set(hosts)) != len(hosts):
        raise DomainError("two vnodes share a host")
    total = Fraction(0)
    for vid, host in placements.items():
        total += node_cost_term(net.node(host), vnr.vnode(vid), prices)
    return total


def link_cost(routes, net: SubstrateNetwork, vnr: VirtualRequest, prices: PriceTable,
              cfg: FragConfig) -> Fraction:
    """Spectrum cost: allocated slots plus new fragment slots on every traversed link.

    Routes are charged in the given order against a shadow copy of the
    spectrum, so two routes crossing one link see each other's slots.
    """
    shadow: dict[int, np.ndarray] = {}
    total = 0
    for r in routes:
        for l, slots in r.link_slots().items():
            occ = shadow.setdefault(l, net.links[l].occupancy.copy())
            start, n = min(slots), len(slots)
            if max(slots) - start + 1 != n:
                raise DomainError(f"route for vlink {r.vlink} is not contiguous on link {l}")
            total += n + new_fragment_slots(occ, start, n, cfg)
            occ[start:start + n] = True
    return prices.gamma_p * total


def fitness(solution, net: SubstrateNetwork, vnr: VirtualRequest, prices: PriceTable,
            cfg: FragConfig) -> Fraction:
    """Embedding cost of a complete solution (lower is better)."""
    return node_cost(solution.placements, net, vnr, prices) + link_cost(solution.routes, net, vnr, prices, cfg)


def profit(outcomes: Iterable) -> Fraction:
    """Sum of ``revenue - node_cost - link_cost`` over accepted outcomes."""
    return sum((o.revenue - o.node_cost - o.link_cost for o in outcomes if o.accepted), Fraction(0))
