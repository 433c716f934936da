"""Comparison embedders: Greedy-SP-FF, LRC-SP-FF and PL-KSP-FF.

These follow one-line characterisations of the original methods rather than
full reimplementations:

* Greedy-SP-FF ranks vnodes by total demand and hosts by free node
  resources, routes on the shortest path and assigns slots first-fit.
* LRC-SP-FF ranks hosts by local resource capacity, i.e. free node
  resources times the free slots on attached links.
* PL-KSP-FF divides that capacity by ``1 + mean hop distance`` to the hosts
  already chosen for the request and tries up to K shortest paths per vlink.

All three share location filtering, per-request atomicity and the
link-deletion rule with BiVNE's lower level, and none of them uses
randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .fragcost import FragConfig, PriceTable, link_cost, node_cost
from .lower import LinkRejected, bfs_hops, embed_links, prune_working_graph
from .solution import EmbeddingSolution
from .substrate import SubstrateNetwork
from .vnr import VirtualRequest, candidate_nodes


@dataclass(frozen=True)
class BaselineConfig:
    k_paths: int = 3

    def __post_init__(self):
        if self.k_paths < 1:
            raise ConfigError("k_paths must be >= 1")


def local_resource_capacity(net: SubstrateNetwork, node_id: int) -> int:
    n = net.nodes[node_id]
    free_slots = sum(net.links[l].free_count for l in net.adjacency[node_id])
    return (n.comp_avail + n.chan_avail) * free_slots


def _by_total_demand(vnr: VirtualRequest) -> list:
    return sorted(vnr.vnodes, key=lambda vn: (-(vn.comp_demand + vn.chan_demand), vn.id))


def _by_lrc_requirement(vnr: VirtualRequest) -> list:
    def key(vn):
        need = vn.comp_demand + vn.chan_demand
        return (-need * vnr.degree(vn.id) * vnr.slot_demand, -need, vn.id)
    return sorted(vnr.vnodes, key=key)


def _finish(net, vnr, placements, prices, cfg, slot_policy, k_paths) -> EmbeddingSolution:
    try:
        routes = embed_links(net, vnr, placements, cfg, slot_policy=slot_policy, k_paths=k_paths)
    except LinkRejected as exc:
        return EmbeddingSolution.rejected(vnr.id, str(exc))
    cost = node_cost(placements, net, vnr, prices) + link_cost(routes, net, vnr, prices, cfg)
    return EmbeddingSolution(vnr.id, True, dict(placements), routes, cost)


def _place(net, vnr, order, score) -> dict[int, int] | str:
    placements: dict[int, int] = {}
    for vn in order:
        cands = candidate_nodes(net, vn) - set(placements.values())
        if not cands:
            return f"no candidate host for vnode {vn.id}"
        placements[vn.id] = max(sorted(cands), key=lambda h: (score(vn, h, placements), -h))
    return placements


def greedy_sp_ff(net: SubstrateNetwork, vnr: VirtualRequest, prices: PriceTable = PriceTable(),
                 cfg: FragConfig = FragConfig()) -> EmbeddingSolution:
    def score(vn, h, placed):
        n = net.nodes[h]
        return n.comp_avail + n.chan_avail

    x = _place(net, vnr, _by_total_demand(vnr), score)
    if isinstance(x, str):
        return EmbeddingSolution.rejected(vnr.id, x)
    return _finish(net, vnr, x, prices, cfg, "first_fit", 1)


def lrc_sp_ff(net: SubstrateNetwork, vnr: VirtualRequest, prices: PriceTable = PriceTable(),
              cfg: FragConfig = FragConfig()) -> EmbeddingSolution:
    x = _place(net, vnr, _by_lrc_requirement(vnr), lambda vn, h, placed: local_resource_capacity(net, h))
    if isinstance(x, str):
        return EmbeddingSolution.rejected(vnr.id, x)
    return _finish(net, vnr, x, prices, cfg, "first_fit", 1)


def pl_ksp_ff(net: SubstrateNetwork, vnr: VirtualRequest, prices: PriceTable = PriceTable(),
              cfg: FragConfig = FragConfig(), bcfg: BaselineConfig = BaselineConfig()) -> EmbeddingSolution:
    graph = prune_working_graph(net, vnr.slot_demand)
    hops: dict[int, dict[int, int]] = {}

    def score(vn, h, placed):
        lrc = local_resource_capacity(net, h)
        if not placed:
            return lrc
        if h not in hops:
            hops[h] = bfs_hops(graph, h)
        dists = [hops[h].get(p) for p in placed.values()]
        if any(d is None for d in dists):
            return 0
        return lrc / (1 + sum(dists) / len(dists))

    x = _place(net, vnr, _by_lrc_requirement(vnr), score)
    if isinstance(x, str):
        return EmbeddingSolution.rejected(vnr.id, x)
    return _finish(net, vnr, x, prices, cfg, "first_fit", bcfg.k_paths)
