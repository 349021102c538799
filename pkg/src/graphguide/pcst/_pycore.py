"""Pure-Python moat-growth kernel (Goemans-Williamson growth phase).

Event-driven simulation of simultaneous cluster growth: every active cluster
expands a uniform moat; an edge whose accumulated moat mass from both sides
reaches its cost merges the two clusters, and a cluster whose remaining
potential (prize minus growth) hits zero deactivates. Rooted growth keeps the
root's cluster permanently inactive so other clusters must pay their way to
it. The returned merge edges form a forest; pruning happens in the caller.

This module must stay semantically identical to _fastcore.pyx: same event
ordering, same floating-point expressions, so both backends produce the same
forests bit for bit.
"""

from __future__ import annotations

import heapq

EPS = 1e-9

_KIND_EDGE = 0
_KIND_CLUSTER = 1


def grow(n, eu, ev, cost, prize, root):
    """Run moat growth; return the list of merge edge indices in merge order.

    root < 0 runs the unrooted variant (all prized clusters start active).
    """
    m = len(eu)
    eu = [int(x) for x in eu]
    ev = [int(x) for x in ev]
    cost = [float(x) for x in cost]

    parent = list(range(n))
    delta = [0.0] * n  # moat offset to DSU parent chain
    active = [False] * n
    pot = [float(x) for x in prize]  # remaining growth budget per cluster root
    moat = [0.0] * n  # finalized growth per cluster root
    last = [0.0] * n  # time of last settle per cluster root
    gen = [0] * n  # invalidates stale deactivation events
    has_root = [False] * n
    if root >= 0:
        has_root[root] = True

    blist: list[list[int]] = [[] for _ in range(n)]
    for i in range(m):
        blist[eu[i]].append(i)
        blist[ev[i]].append(i)

    heap: list[tuple] = []
    nactive = 0
    for v in range(n):
        if v != root and pot[v] > EPS:
            active[v] = True
            nactive += 1
            heap.append((pot[v], _KIND_CLUSTER, v, 0))
    for i in range(m):
        rate = (1 if active[eu[i]] else 0) + (1 if active[ev[i]] else 0)
        if rate > 0:
            heap.append((cost[i] / rate, _KIND_EDGE, i, 0))
    heapq.heapify(heap)

    def find(x):
        # (root, offset): total moat mass around x = offset + moat[root] (+ live)
        r = x
        while parent[r] != r:
            r = parent[r]
        s = 0.0
        y = x
        path = []
        while y != r:
            path.append(y)
            y = parent[y]
        for y in reversed(path):
            s += delta[y]
            parent[y] = r
            delta[y] = s
        if path:
            return r, delta[path[0]]
        return r, 0.0

    def contrib(offset, r, t):
        c = offset + moat[r]
        if active[r]:
            c += t - last[r]
        return c

    def settle(r, t):
        if active[r]:
            dt = t - last[r]
            moat[r] += dt
            pot[r] -= dt
        last[r] = t

    def schedule_edge(i, t):
        u, v = eu[i], ev[i]
        ru, su = find(u)
        rv, sv = find(v)
        if ru == rv:
            return
        rate = (1 if active[ru] else 0) + (1 if active[rv] else 0)
        if rate == 0:
            return
        slack = cost[i] - contrib(su, ru, t) - contrib(sv, rv, t)
        when = t if slack <= 0.0 else t + slack / rate
        heapq.heappush(heap, (when, _KIND_EDGE, i, 0))

    merges: list[int] = []
    t_done = -1.0

    while heap:
        t, kind, idx, g = heapq.heappop(heap)
        if nactive == 0 and t > t_done + EPS:
            break
        if kind == _KIND_EDGE:
            i = idx
            ru, su = find(eu[i])
            rv, sv = find(ev[i])
            if ru == rv:
                continue
            slack = cost[i] - contrib(su, ru, t) - contrib(sv, rv, t)
            rate = (1 if active[ru] else 0) + (1 if active[rv] else 0)
            if slack > EPS:
                if rate > 0:
                    heapq.heappush(heap, (t + slack / rate, _KIND_EDGE, i, 0))
                continue
            # merge rv into ru (larger boundary list absorbs the smaller)
            merges.append(i)
            pre_a = active[ru]
            pre_b = active[rv]
            settle(ru, t)
            settle(rv, t)
            if len(blist[ru]) < len(blist[rv]):
                ru, rv = rv, ru
                pre_a, pre_b = pre_b, pre_a
            delta[rv] = moat[rv] - moat[ru]
            parent[rv] = ru
            pot[ru] += pot[rv]
            hr = has_root[ru] or has_root[rv]
            has_root[ru] = hr
            absorbed = blist[rv]
            blist[rv] = []
            new_active = (not hr) and pot[ru] > EPS
            nactive += (1 if new_active else 0) - (1 if pre_a else 0) - (1 if pre_b else 0)
            active[ru] = new_active
            active[rv] = False
            gen[ru] += 1
            if new_active:
                heapq.heappush(heap, (t + pot[ru], _KIND_CLUSTER, ru, gen[ru]))
                # sides that flipped inactive -> active make their boundary
                # edges accrue faster; reschedule them
                if not pre_a:
                    for j in blist[ru]:
                        schedule_edge(j, t)
                if not pre_b:
                    for j in absorbed:
                        schedule_edge(j, t)
            blist[ru].extend(absorbed)
            if nactive == 0:
                t_done = t
        else:
            v = idx
            if parent[v] != v or g != gen[v] or not active[v]:
                continue
            settle(v, t)
            active[v] = False
            nactive -= 1
            if nactive == 0:
                t_done = t

    return merges
