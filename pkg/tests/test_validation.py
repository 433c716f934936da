import numpy as np
import pytest

from bivne.acs import AcsParams, bivne_embed
from bivne.solution import EmbeddingSolution, RouteAssignment
from bivne.substrate import SubstratePath
from bivne.validation import validate
from bivne.vnr import VirtualNode, VirtualRequest

from conftest import make_net, make_vnr


@pytest.fixture
def net():
    # line 0-1-2-3 with 8 slots per link; link 2 already uses slot 0
    n = make_net(4, [(0, 1), (1, 2), (2, 3)], slots=8, occupied={2: [0]})
    n.nodes[3].comp_used = 99
    return n


VNR = make_vnr([(2, 2), (2, 2), (2, 2)], [(0, 1), (1, 2)], slot_demand=3)


def route(vlink, nodes, start, explicit=None):
    links = tuple(range(min(nodes), max(nodes)))
    return RouteAssignment(vlink, SubstratePath(tuple(nodes), links), start, start + 2, explicit)


def good():
    return EmbeddingSolution(0, True, {0: 0, 1: 1, 2: 2}, [route(0, (0, 1), 0), route(1, (1, 2), 0)])


def names(net, sol, vnr=VNR):
    return {c for c, _ in validate(net, vnr, sol)}


def with_(sol, **kw):
    d = dict(vnr_id=sol.vnr_id, accepted=sol.accepted, placements=dict(sol.placements), routes=list(sol.routes))
    d.update(kw)
    return EmbeddingSolution(**d)


def test_valid_solution(net):
    assert validate(net, VNR, good()) == []


def test_rejected_solution_is_valid(net):
    assert validate(net, VNR, EmbeddingSolution.rejected(0, "no")) == []


def test_rejected_with_leftovers(net):
    assert names(net, with_(good(), accepted=False)) == {"C1"}


def test_missing_placement(net):
    assert "C1" in names(net, with_(good(), placements={0: 0, 1: 1}))


def test_shared_host(net):
    sol = with_(good(), placements={0: 1, 1: 1, 2: 2}, routes=[route(1, (1, 2), 0)])
    assert "C2" in names(net, sol)


def test_computing_capacity(net):
    sol = with_(good(), placements={0: 0, 1: 1, 2: 3}, routes=[route(0, (0, 1), 0), route(1, (1, 2, 3), 3)])
    assert names(net, sol) == {"C3"}


def test_channel_capacity(net):
    net.nodes[0].chan_used = 99
    assert names(net, good()) == {"C4"}


def test_location(net):
    vnr = VirtualRequest(0, (VirtualNode(0, 1, 1, (100.0, 0.0), 5.0),), (), 1)
    sol = EmbeddingSolution(0, True, {0: 0})
    assert names(net, sol, vnr) == {"C5"}


def test_route_count(net):
    assert "C6" in names(net, with_(good(), routes=[route(0, (0, 1), 0)]))


def test_wrong_endpoints(net):
    assert "C6" in names(net, with_(good(), routes=[route(0, (0, 1), 0), route(1, (2, 3), 3)]))


def test_broken_path(net):
    bad = RouteAssignment(1, SubstratePath((1, 2), (2,)), 0, 2)
    assert "C6" in names(net, with_(good(), routes=[route(0, (0, 1), 0), bad]))


def test_path_bandwidth():
    small = make_net(3, [(0, 1), (1, 2)], slots=[8, 2])
    sol = good()
    got = {c for c, _ in validate(small, VNR, sol)}
    assert "C7" in got


def test_slot_count_mismatch(net):
    r = route(1, (1, 2), 0, explicit=((1, (0, 1)),))
    assert "C8" in names(net, with_(good(), routes=[route(0, (0, 1), 0), r]))


def test_block_width(net):
    r = RouteAssignment(1, SubstratePath((1, 2), (1,)), 0, 3)
    assert "C9" in names(net, with_(good(), routes=[route(0, (0, 1), 0), r]))


def test_non_contiguous(net):
    r = route(1, (1, 2), 0, explicit=((1, (0, 1, 3)),))
    assert "C9" in names(net, with_(good(), routes=[route(0, (0, 1), 0), r]))


def test_misaligned_blocks_across_path_links(net):
    # slots 2..4 on the first link and 3..5 on the second
    r = route(1, (1, 2, 3), 2, explicit=((1, (2, 3, 4)), (2, (3, 4, 5))))
    vnr = make_vnr([(2, 2), (2, 2), (1, 1)], [(0, 1), (1, 2)], slot_demand=3)
    net.nodes[3].comp_used = 0
    sol = EmbeddingSolution(0, True, {0: 0, 1: 1, 2: 3}, [route(0, (0, 1), 0), r])
    assert names(net, sol, vnr) == {"C10"}


def test_existing_occupancy(net):
    sol = with_(good(), placements={0: 1, 1: 2, 2: 3}, routes=[route(0, (1, 2), 0), route(1, (2, 3), 0)])
    net.nodes[3].comp_used = 0
    assert names(net, sol) == {"C11"}


def test_sibling_overlap(net):
    sol = with_(good(), placements={0: 0, 1: 2, 2: 1},
                routes=[route(0, (0, 1, 2), 0), route(1, (2, 1), 1)])
    assert "C11" in names(net, sol)


def test_every_violation_is_reported(net):
    sol = with_(good(), placements={0: 1, 1: 1, 2: 3}, routes=[])
    assert names(net, sol) >= {"C2", "C3", "C6"}


def test_solver_output_is_valid(net):
    sol = bivne_embed(net, VNR, AcsParams(max_generations=5), rng=np.random.default_rng(0))
    assert sol.accepted and validate(net, VNR, sol) == []


def test_dump_round_trip_keeps_verdict(net):
    r = route(1, (1, 2, 3), 2, explicit=((1, (2, 3, 4)), (2, (3, 4, 5))))
    sol = EmbeddingSolution(0, True, {0: 0, 1: 1, 2: 3}, [route(0, (0, 1), 0), r])
    back = EmbeddingSolution.from_dict(sol.to_dict())
    assert validate(net, VNR, back) == validate(net, VNR, sol)
