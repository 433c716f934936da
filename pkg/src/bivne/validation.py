"""Constraint checker for one embedding against the substrate state before it."""

from __future__ import annotations

import math

from .solution import EmbeddingSolution
from .substrate import SubstrateNetwork
from .vnr import VirtualRequest


def validate(net: SubstrateNetwork, vnr: VirtualRequest, solution: EmbeddingSolution) -> list[tuple[str, str]]:
    """Return every ``(constraint, message)`` violation; empty means valid.

    Rejected solutions are valid when they carry no placements or routes.
    """
    out: list[tuple[str, str]] = []
    if not solution.accepted:
        if solution.placements or solution.routes:
            out.append(("C1", "rejected solution carries placements or routes"))
        return out

    vnodes = {vn.id: vn for vn in vnr.vnodes}
    x = solution.placements

    # C1: every vnode on exactly one existing host
    for vid in vnodes:
        if vid not in x:
            out.append(("C1", f"vnode {vid} is not placed"))
    for vid, host in x.items():
        if vid not in vnodes:
            out.append(("C1", f"unknown vnode {vid} is placed"))
        elif host not in net.nodes:
            out.append(("C1", f"vnode {vid} placed on unknown node {host}"))
    placed = {vid: host for vid, host in x.items() if vid in vnodes and host in net.nodes}

    # C2: at most one vnode per host
    by_host: dict[int, list[int]] = {}
    for vid, host in placed.items():
        by_host.setdefault(host, []).append(vid)
    for host, vids in sorted(by_host.items()):
        if len(vids) > 1:
            out.append(("C2", f"node {host} hosts vnodes {sorted(vids)}"))

    # C3-C5: capacities and location
    for vid, host in sorted(placed.items()):
        vn, n = vnodes[vid], net.nodes[host]
        if n.comp_avail < vn.comp_demand:
            out.append(("C3", f"node {host} has {n.comp_avail} computing, vnode {vid} needs {vn.comp_demand}"))
        if n.chan_avail < vn.chan_demand:
            out.append(("C4", f"node {host} has {n.chan_avail} channels, vnode {vid} needs {vn.chan_demand}"))
        d = math.dist(vn.pref_center, n.loc)
        if d > vn.pref_radius:
            out.append(("C5", f"node {host} is {d:.3f} from vnode {vid}'s area (radius {vn.pref_radius})"))

    # C6: one valid lightpath per vlink, joining the hosts
    routed: dict[int, int] = {}
    for r in solution.routes:
        routed[r.vlink] = routed.get(r.vlink, 0) + 1
    for i in range(len(vnr.vlinks)):
        if routed.get(i, 0) != 1:
            out.append(("C6", f"vlink {i} has {routed.get(i, 0)} routes"))
    for i in routed:
        if not 0 <= i < len(vnr.vlinks):
            out.append(("C6", f"route for unknown vlink {i}"))

    demand = vnr.slot_demand
    usage: dict[int, list[tuple[int, set]]] = {}
    for r in solution.routes:
        p = r.path
        ok_path = len(p.nodes) == len(p.links) + 1 and len(p.links) >= 1 and len(set(p.nodes)) == len(p.nodes)
        if ok_path:
            for (a, b), l in zip(zip(p.nodes, p.nodes[1:]), p.links):
                if l not in net.links or net.links[l].endpoints != frozenset((a, b)):
                    ok_path = False
        if not ok_path:
            out.append(("C6", f"vlink {r.vlink}: {p.nodes} / {p.links} is not a cycle-free substrate path"))
            continue
        if 0 <= r.vlink < len(vnr.vlinks):
            u, v = vnr.vlinks[r.vlink]
            ends = {placed.get(u), placed.get(v)}
            if {p.source, p.target} != ends:
                out.append(("C6", f"vlink {r.vlink}: path ends {p.source},{p.target} do not host ({u},{v})"))

        # C7: path bandwidth covers the demand
        if min(net.links[l].slot_count for l in p.links) < demand:
            out.append(("C7", f"vlink {r.vlink}: path bandwidth below {demand}"))

        z = r.link_slots()
        # C8: exactly `demand` in-range slots on every path link, none elsewhere
        for l in z:
            if l not in p.links:
                out.append(("C8", f"vlink {r.vlink}: slots assigned on link {l} outside its path"))
        sets = {}
        for l in p.links:
            s = set(z.get(l, ()))
            sets[l] = s
            if len(s) != demand or len(z.get(l, ())) != len(s):
                out.append(("C8", f"vlink {r.vlink}: {len(z.get(l, ()))} slots on link {l}, need {demand}"))
            if s and (min(s) < 0 or max(s) >= net.links[l].slot_count):
                out.append(("C8", f"vlink {r.vlink}: slot index out of range on link {l}"))
        # C9: contiguous block of the demanded width
        if r.slot_end - r.slot_start + 1 != demand:
            out.append(("C9", f"vlink {r.vlink}: block [{r.slot_start},{r.slot_end}] has wrong width"))
        for l, s in sets.items():
            if s and max(s) - min(s) + 1 != len(s):
                out.append(("C9", f"vlink {r.vlink}: slots on link {l} are not contiguous"))
        # C10: identical indices on every link of the path
        distinct = {tuple(sorted(s)) for s in sets.values()}
        if len(distinct) > 1:
            out.append(("C10", f"vlink {r.vlink}: slot indices differ across path links"))
        for l, s in sets.items():
            usage.setdefault(l, []).append((r.vlink, s))

    # C11: no overlap with existing occupancy or between vlinks
    for l, entries in sorted(usage.items()):
        occ = net.links[l].occupancy
        for vl, s in entries:
            busy = sorted(i for i in s if 0 <= i < occ.size and occ[i])
            if busy:
                out.append(("C11", f"vlink {vl}: slots {busy} already occupied on link {l}"))
        for a in range(len(entries)):
            for b in range(a + 1, len(entries)):
                common = entries[a][1] & entries[b][1]
                if common:
                    out.append(("C11", f"vlinks {entries[a][0]} and {entries[b][0]} overlap on link {l}"))
    return out
