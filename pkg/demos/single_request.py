"""Embed one request on a five-node optical ring and compare the solvers.

Link A-B already carries traffic on slots 4 and 7, leaving a four-slot gap
at 0..3 and a two-slot gap at 5..6.  The request pins one vnode near A and
one near B.  First-fit takes slots 0..1 and strands a two-slot fragment;
the fragment-aware search fills the 5..6 gap exactly and pays less.

    python3 demos/single_request.py
"""

import numpy as np

from bivne import (AcsParams, FragConfig, PriceTable, SubstrateNetwork, bivne_embed, greedy_sp_ff, lrc_sp_ff,
                   pl_ksp_ff, validate)
from bivne.fragcost import link_cost, node_cost
from bivne.substrate import OpticalLink, SubstrateNode
from bivne.vnr import VirtualNode, VirtualRequest

NAMES = "ABCDE"


def ring() -> SubstrateNetwork:
    nodes = [SubstrateNode(i, (10.0 * i, 0.0), 40, 40) for i in range(5)]
    links = [OpticalLink(i, a, b, 8) for i, (a, b) in enumerate([(4, 0), (0, 1), (1, 2), (2, 3), (3, 4)])]
    links[1].occupancy[[4, 7]] = True
    return SubstrateNetwork(nodes, links)


def describe(name, net, vnr, sol, prices, cfg):
    if not sol.accepted:
        print(f"{name:>13}: rejected ({sol.reason})")
        return
    hosts = " ".join(f"v{v}->{NAMES[h]}" for v, h in sorted(sol.placements.items()))
    cost = node_cost(sol.placements, net, vnr, prices) + link_cost(sol.routes, net, vnr, prices, cfg)
    spans = ", ".join(f"{'-'.join(NAMES[n] for n in r.path.nodes)}[{r.slot_start}..{r.slot_end}]" for r in sol.routes)
    assert validate(net, vnr, sol) == []
    print(f"{name:>13}: {hosts}  routes {spans}  cost {float(cost):.3f}")


def main():
    net = ring()
    vnr = VirtualRequest(0, (VirtualNode(0, 6, 4, (0.0, 0.0), 5.0),
                             VirtualNode(1, 4, 6, (10.0, 0.0), 5.0)), ((0, 1),), 2)
    prices, cfg = PriceTable(), FragConfig()
    print("spectrum per link (# = occupied):")
    for link in net.links.values():
        free = "".join("." if not s else "#" for s in link.occupancy)
        print(f"  {NAMES[link.a]}-{NAMES[link.b]}  {free}")
    print(f"request: v0 near A, v1 near B, one vlink of {vnr.slot_demand} slots\n")
    describe("bivne", net, vnr, bivne_embed(net, vnr, AcsParams(), prices, cfg, np.random.default_rng(7)),
             prices, cfg)
    describe("greedy_sp_ff", net, vnr, greedy_sp_ff(net, vnr, prices, cfg), prices, cfg)
    describe("lrc_sp_ff", net, vnr, lrc_sp_ff(net, vnr, prices, cfg), prices, cfg)
    describe("pl_ksp_ff", net, vnr, pl_ksp_ff(net, vnr, prices, cfg), prices, cfg)


if __name__ == "__main__":
    main()
