# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled moat-growth kernel (Goemans-Williamson growth phase).

Mirror of _pycore.grow: identical event schedule and identical floating-point
expressions, so both backends produce the same merge forests. Keep the two in
lockstep when changing either.
"""

from libcpp.vector cimport vector


cdef struct Event:
    double t
    int kind
    long idx
    long gen

cdef int KIND_EDGE = 0
cdef int KIND_CLUSTER = 1

cdef double EPS = 1e-9


cdef inline bint _less(Event a, Event b):
    if a.t != b.t:
        return a.t < b.t
    if a.kind != b.kind:
        return a.kind < b.kind
    if a.idx != b.idx:
        return a.idx < b.idx
    return a.gen < b.gen


cdef void _push(vector[Event]& heap, Event e):
    cdef size_t i = heap.size()
    cdef size_t p
    heap.push_back(e)
    while i > 0:
        p = (i - 1) >> 1
        if _less(heap[i], heap[p]):
            heap[i], heap[p] = heap[p], heap[i]
            i = p
        else:
            break


cdef Event _pop(vector[Event]& heap):
    cdef Event top = heap[0]
    cdef size_t n = heap.size() - 1
    cdef size_t i = 0, l, r, c
    heap[0] = heap[n]
    heap.pop_back()
    while True:
        l = 2 * i + 1
        r = l + 1
        if l >= n:
            break
        c = l
        if r < n and _less(heap[r], heap[l]):
            c = r
        if _less(heap[c], heap[i]):
            heap[i], heap[c] = heap[c], heap[i]
            i = c
        else:
            break
    return top


cdef class _Growth:
    cdef long n, m
    cdef vector[long] parent
    cdef vector[double] delta
    cdef vector[bint] active
    cdef vector[double] pot
    cdef vector[double] moat
    cdef vector[double] last
    cdef vector[long] gen
    cdef vector[bint] has_root
    cdef vector[vector[long]] blist
    cdef vector[Event] heap
    cdef vector[long] path  # scratch for find()
    cdef const long[::1] eu
    cdef const long[::1] ev
    cdef const double[::1] cost

    cdef (long, double) find(self, long x):
        cdef long r = x
        cdef long y
        cdef double s = 0.0
        cdef size_t k
        while self.parent[r] != r:
            r = self.parent[r]
        self.path.clear()
        y = x
        while y != r:
            self.path.push_back(y)
            y = self.parent[y]
        k = self.path.size()
        while k > 0:
            k -= 1
            y = self.path[k]
            s += self.delta[y]
            self.parent[y] = r
            self.delta[y] = s
        if self.path.size() > 0:
            return r, self.delta[self.path[0]]
        return r, 0.0

    cdef double contrib(self, double offset, long r, double t):
        cdef double c = offset + self.moat[r]
        if self.active[r]:
            c += t - self.last[r]
        return c

    cdef void settle(self, long r, double t):
        cdef double dt
        if self.active[r]:
            dt = t - self.last[r]
            self.moat[r] += dt
            self.pot[r] -= dt
        self.last[r] = t

    cdef void schedule_edge(self, long i, double t):
        cdef long ru, rv
        cdef double su, sv, slack, when
        cdef int rate
        ru, su = self.find(self.eu[i])
        rv, sv = self.find(self.ev[i])
        if ru == rv:
            return
        rate = (1 if self.active[ru] else 0) + (1 if self.active[rv] else 0)
        if rate == 0:
            return
        slack = self.cost[i] - self.contrib(su, ru, t) - self.contrib(sv, rv, t)
        when = t if slack <= 0.0 else t + slack / rate
        _push(self.heap, Event(when, KIND_EDGE, i, 0))


def grow(long n, const long[::1] eu, const long[::1] ev,
         const double[::1] cost, const double[::1] prize, long root):
    """Run moat growth; return merge edge indices in merge order.

    root < 0 runs the unrooted variant (all prized clusters start active).
    """
    cdef long m = eu.shape[0]
    cdef _Growth g = _Growth()
    cdef long v, i, j, idx, ru, rv, tmp_l
    cdef double t, su, sv, slack, t_done
    cdef int rate, kind
    cdef bint pre_a, pre_b, new_active, hr, tmp_b
    cdef Event e
    cdef long nactive = 0
    cdef vector[long] merges
    cdef vector[long] absorbed

    g.n = n
    g.m = m
    g.eu = eu
    g.ev = ev
    g.cost = cost
    g.parent.resize(n)
    g.delta.assign(n, 0.0)
    g.active.assign(n, False)
    g.pot.resize(n)
    g.moat.assign(n, 0.0)
    g.last.assign(n, 0.0)
    g.gen.assign(n, 0)
    g.has_root.assign(n, False)
    g.blist.resize(n)
    for v in range(n):
        g.parent[v] = v
        g.pot[v] = prize[v]
    if root >= 0:
        g.has_root[root] = True
    for i in range(m):
        g.blist[eu[i]].push_back(i)
        g.blist[ev[i]].push_back(i)

    for v in range(n):
        if v != root and g.pot[v] > EPS:
            g.active[v] = True
            nactive += 1
            _push(g.heap, Event(g.pot[v], KIND_CLUSTER, v, 0))
    for i in range(m):
        rate = (1 if g.active[eu[i]] else 0) + (1 if g.active[ev[i]] else 0)
        if rate > 0:
            _push(g.heap, Event(cost[i] / rate, KIND_EDGE, i, 0))

    t_done = -1.0

    while g.heap.size() > 0:
        e = _pop(g.heap)
        t = e.t
        kind = e.kind
        idx = e.idx
        if nactive == 0 and t > t_done + EPS:
            break
        if kind == KIND_EDGE:
            i = idx
            ru, su = g.find(eu[i])
            rv, sv = g.find(ev[i])
            if ru == rv:
                continue
            slack = cost[i] - g.contrib(su, ru, t) - g.contrib(sv, rv, t)
            rate = (1 if g.active[ru] else 0) + (1 if g.active[rv] else 0)
            if slack > EPS:
                if rate > 0:
                    _push(g.heap, Event(t + slack / rate, KIND_EDGE, i, 0))
                continue
            merges.push_back(i)
            pre_a = g.active[ru]
            pre_b = g.active[rv]
            g.settle(ru, t)
            g.settle(rv, t)
            if g.blist[ru].size() < g.blist[rv].size():
                tmp_l = ru; ru = rv; rv = tmp_l
                tmp_b = pre_a; pre_a = pre_b; pre_b = tmp_b
            g.delta[rv] = g.moat[rv] - g.moat[ru]
            g.parent[rv] = ru
            g.pot[ru] += g.pot[rv]
            hr = g.has_root[ru] or g.has_root[rv]
            g.has_root[ru] = hr
            absorbed.swap(g.blist[rv])
            new_active = (not hr) and g.pot[ru] > EPS
            nactive += (1 if new_active else 0) - (1 if pre_a else 0) - (1 if pre_b else 0)
            g.active[ru] = new_active
            g.active[rv] = False
            g.gen[ru] += 1
            if new_active:
                _push(g.heap, Event(t + g.pot[ru], KIND_CLUSTER, ru, g.gen[ru]))
                if not pre_a:
                    for j in range(<long>g.blist[ru].size()):
                        g.schedule_edge(g.blist[ru][j], t)
                if not pre_b:
                    for j in range(<long>absorbed.size()):
                        g.schedule_edge(absorbed[j], t)
            for j in range(<long>absorbed.size()):
                g.blist[ru].push_back(absorbed[j])
            absorbed.clear()
            if nactive == 0:
                t_done = t
        else:
            v = idx
            if g.parent[v] != v or e.gen != g.gen[v] or not g.active[v]:
                continue
            g.settle(v, t)
            g.active[v] = False
            nactive -= 1
            if nactive == 0:
                t_done = t

    return [merges[i] for i in range(<long>merges.size())]
