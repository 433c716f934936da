"""Small hand-built substrates and requests shared by the test modules."""

from __future__ import annotations

import numpy as np
import pytest

from bivne.substrate import OpticalLink, SubstrateNetwork, SubstrateNode
from bivne.vnr import VirtualNode, VirtualRequest

FAR = 5000.0  # radius covering the whole square


def make_net(n_nodes, edges, slots=8, caps=(100, 100), locs=None, occupied=None) -> SubstrateNetwork:
    """Network with ids ``0..n_nodes-1`` and link ``i`` = ``edges[i]``.

    ``occupied`` maps link id to occupied slot indices.
    """
    locs = locs or [(10.0 * i, 0.0) for i in range(n_nodes)]
    nodes = [SubstrateNode(i, locs[i], caps[0], caps[1]) for i in range(n_nodes)]
    links = []
    for i, (a, b) in enumerate(edges):
        count = slots[i] if isinstance(slots, (list, tuple)) else slots
        e = OpticalLink(i, a, b, count)
        for s in (occupied or {}).get(i, ()):
            e.occupancy[s] = True
        links.append(e)
    return SubstrateNetwork(nodes, links)


def make_vnr(demands, vlinks, slot_demand=1, center=(0.0, 0.0), radius=FAR, vnr_id=0) -> VirtualRequest:
    vnodes = tuple(VirtualNode(i, c, w, center, radius) for i, (c, w) in enumerate(demands))
    return VirtualRequest(vnr_id, vnodes, tuple(tuple(sorted(e)) for e in vlinks), slot_demand)


# node ids for the five-node example: A=0, B=1, C=2, D=3, E=4
A, B, C, D, E = range(5)


@pytest.fixture
def example_net() -> SubstrateNetwork:
    """Five nodes A..E on a ring E-A-B-C-D-E with 8 slots per link.

    Links: 0=(E,A), 1=(A,B), 2=(B,C), 3=(C,D), 4=(D,E).  Slots 0..2 and
    6..7 of (B,C) and (C,D) are already taken, leaving a free block 3..5.
    """
    edges = [(E, A), (A, B), (B, C), (C, D), (D, E)]
    busy = [0, 1, 2, 6, 7]
    return make_net(5, edges, slots=8, occupied={2: busy, 3: busy})


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


# --- acceptance summary ----------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


def record(number: int, passed: bool, detail: str) -> bool:
    """Store and print the verdict line of one acceptance criterion."""
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
