"""Exact discrete optimal transport via a primal network simplex.

Dense transportation formulation: ``m`` supply atoms and ``n`` demand atoms
with every pair connected, plus an artificial root node whose big-cost arcs
form the initial (strongly feasible) spanning tree.  The tree is stored in
parent/thread arrays so every pivot touches only the re-hung subtree.

Entering arcs combine Dantzig's rule inside sqrt(E)-sized blocks with a
Bland-style sweep across blocks; the leaving arc is the first minimum-residual
arc met when scanning the cycle against its orientation.  With integral
supplies all flows stay integral, residual ties are exact, and the leaving
rule keeps the basis strongly feasible, so the pivot loop terminates.  With
general real weights a small entering tolerance plus an iteration cap guard
against float-degeneracy; callers fall back to an LP solver on a nonzero
status.

The batch kernel reuses the optimal basis of one solve as the warm start of
the next: flows depend only on the tree and the (unchanged) marginals, so a
cost swap preserves feasibility and only the potentials need recomputing.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_ITER_LIMIT = 1
STATUS_INFEASIBLE = 2


@njit(cache=True)
def _init_basis(m, n, supply, demand, faux_inf, x, pi, parent, tree_arc, size, nxt, prv, last):
    """Artificial starting basis: every real node hangs off the root node N
    by its own big-cost arc carrying the full node imbalance.  Supply nodes
    point at the root, demand nodes are pointed at; that orientation makes
    the tree strongly feasible."""
    N = m + n
    E = m * n
    for e in range(E):
        x[e] = 0.0
    for v in range(N):
        if v < m:
            x[E + v] = supply[v]
            pi[v] = faux_inf
        else:
            x[E + v] = demand[v - m]
            pi[v] = -faux_inf
        parent[v] = N
        tree_arc[v] = E + v
        size[v] = 1
        nxt[v] = v + 1
        prv[v] = v - 1
        last[v] = v
    pi[N] = 0.0
    parent[N] = -1
    tree_arc[N] = -1
    size[N] = N + 1
    nxt[N - 1] = N
    nxt[N] = 0
    prv[0] = N
    prv[N] = N - 1
    last[N] = N - 1


@njit(cache=True)
def _recompute_potentials(C, m, n, faux_inf, pi, parent, tree_arc, nxt):
    """Set potentials so every tree arc has zero reduced cost.  The thread is
    a preorder, so parents are always visited before children."""
    N = m + n
    E = m * n
    pi[N] = 0.0
    v = nxt[N]
    while v != N:
        arc = tree_arc[v]
        p = parent[v]
        if arc < E:
            c = C[arc]
            t = m + arc % n
        else:
            c = faux_inf
            t = N if (arc - E) < m else arc - E
        # zero reduced cost: C - pi[source] + pi[target] == 0
        if v == t:
            pi[v] = pi[p] - c
        else:
            pi[v] = pi[p] + c
        v = nxt[v]


@njit(cache=True)
def _pivot_loop(C, m, n, faux_inf, tol, x, pi, parent, tree_arc, size, nxt, prv, last,
                Wn, We, path_n, path_e, anc):
    """Run primal pivots until no arc prices out.  Returns a status code."""
    N = m + n
    E = m * n

    blk = int(np.sqrt(E)) + 1
    nblocks = (E + blk - 1) // blk
    f = 0
    misses = 0
    pivots = 0
    max_pivots = 50 * (E + N) + 10000

    while misses < nblocks:
        # Dantzig within the block starting at arc f, Bland across blocks.
        best = -1
        best_rc = -tol
        e = f
        i_s = f // n
        j_t = f % n
        row_pi = pi[i_s]
        for _ in range(blk):
            rc = C[e] - row_pi + pi[m + j_t]
            if rc < best_rc:
                best_rc = rc
                best = e
            e += 1
            j_t += 1
            if j_t == n:
                j_t = 0
                i_s += 1
                if e == E:
                    e = 0
                    i_s = 0
                row_pi = pi[i_s]
        f = e
        if best < 0:
            misses += 1
            continue
        misses = 0
        pivots += 1
        if pivots > max_pivots:
            return STATUS_ITER_LIMIT

        i = best
        p = i // n
        q = m + i % n

        # Lowest common ancestor of p and q by subtree sizes.
        a = p
        b = q
        sa = size[a]
        sb = size[b]
        while True:
            while sa < sb:
                a = parent[a]
                sa = size[a]
            while sa > sb:
                b = parent[b]
                sb = size[b]
            if sa == sb:
                if a != b:
                    a = parent[a]
                    sa = size[a]
                    b = parent[b]
                    sb = size[b]
                else:
                    break
        w = a

        # Cycle through i, oriented p -> q: reversed path p..w, arc i, path q..w.
        ln = 0
        v = p
        path_n[0] = v
        le = 0
        while v != w:
            path_e[le] = tree_arc[v]
            le += 1
            v = parent[v]
            ln += 1
            path_n[ln] = v
        cyc = 0
        for t in range(ln, -1, -1):
            Wn[cyc] = path_n[t]
            cyc += 1
        ne = 0
        for t in range(le - 1, -1, -1):
            We[ne] = path_e[t]
            ne += 1
        pos_i = ne
        We[ne] = i
        ne += 1
        v = q
        while v != w:
            Wn[cyc] = v
            cyc += 1
            We[ne] = tree_arc[v]
            ne += 1
            v = parent[v]

        # Leaving arc: first minimum residual scanning the cycle backwards.
        j = -1
        js = -1
        pos_j = -1
        min_res = 0.0
        for t in range(ne - 1, -1, -1):
            arc = We[t]
            node = Wn[t]
            if arc < E:
                a_s = arc // n
            else:
                vv = arc - E
                a_s = vv if vv < m else N
            if a_s == node:
                res = faux_inf - x[arc]
            else:
                res = x[arc]
            if j < 0 or res < min_res:
                min_res = res
                j = arc
                js = node
                pos_j = t
        if j < E:
            jt = m + j % n if j // n == js else j // n
        else:
            jt = N if (j - E) == js else j - E

        # Augment along the cycle.
        if min_res > 0.0:
            for t in range(ne):
                arc = We[t]
                node = Wn[t]
                if arc < E:
                    a_s = arc // n
                else:
                    vv = arc - E
                    a_s = vv if vv < m else N
                if a_s == node:
                    x[arc] += min_res
                else:
                    x[arc] -= min_res

        if i == j:
            continue

        s_lv = js
        t_lv = jt
        if parent[t_lv] != s_lv:
            s_lv, t_lv = t_lv, s_lv
        if pos_i > pos_j:
            p, q = q, p

        # remove_edge(s_lv, t_lv): detach the subtree rooted at t_lv.
        size_t = size[t_lv]
        prev_t = prv[t_lv]
        last_t = last[t_lv]
        next_last_t = nxt[last_t]
        parent[t_lv] = -1
        tree_arc[t_lv] = -1
        nxt[prev_t] = next_last_t
        prv[next_last_t] = prev_t
        nxt[last_t] = t_lv
        prv[t_lv] = last_t
        s = s_lv
        while s != -1:
            size[s] -= size_t
            if last[s] == last_t:
                last[s] = prev_t
            s = parent[s]

        # make_root(q) within the detached subtree.
        na = 0
        v = q
        while v != -1:
            anc[na] = v
            na += 1
            v = parent[v]
        for t in range(na - 1, 0, -1):
            pp = anc[t]
            qq = anc[t - 1]
            size_p = size[pp]
            last_p = last[pp]
            prev_q = prv[qq]
            last_q = last[qq]
            next_last_q = nxt[last_q]
            parent[pp] = qq
            parent[qq] = -1
            tree_arc[pp] = tree_arc[qq]
            tree_arc[qq] = -1
            size[pp] = size_p - size[qq]
            size[qq] = size_p
            nxt[prev_q] = next_last_q
            prv[next_last_q] = prev_q
            nxt[last_q] = qq
            prv[qq] = last_q
            if last_p == last_q:
                last[pp] = prev_q
                last_p = prev_q
            prv[pp] = last_q
            nxt[last_q] = pp
            nxt[last_p] = qq
            prv[qq] = last_p
            last[qq] = last_p

        # add_edge(i, p, q): hang the subtree rooted at q under p.
        last_p = last[p]
        next_last_p = nxt[last_p]
        size_q = size[q]
        last_q = last[q]
        parent[q] = p
        tree_arc[q] = i
        nxt[last_p] = q
        prv[q] = last_p
        prv[next_last_p] = last_q
        nxt[last_q] = next_last_p
        v = p
        while v != -1:
            size[v] += size_q
            if last[v] == last_p:
                last[v] = last_q
            v = parent[v]

        # update_potentials over the re-hung subtree only.
        i_t = m + i % n
        if q == i_t:
            d = pi[p] - C[i] - pi[q]
        else:
            d = pi[p] + C[i] - pi[q]
        pi[q] += d
        v = q
        stop = last[q]
        while v != stop:
            v = nxt[v]
            pi[v] += d
    return STATUS_OK


@njit(cache=True)
def _objective(C, x, E):
    cost = 0.0
    for e in range(E):
        if x[e] != 0.0:
            cost += C[e] * x[e]
    return cost


@njit(cache=True)
def _scale_params(C, supply):
    csum = 0.0
    cmax = 0.0
    for e in range(C.shape[0]):
        c = abs(C[e])
        csum += c
        if c > cmax:
            cmax = c
    total = 0.0
    for i in range(supply.shape[0]):
        total += supply[i]
    faux_inf = 3.0 * csum
    if 3.0 * total > faux_inf:
        faux_inf = 3.0 * total
    if faux_inf < 1.0:
        faux_inf = 1.0
    tol = 1e-10 * (cmax if cmax > 1.0 else 1.0)
    return faux_inf, tol, total


@njit(cache=True)
def solve_transport(C, supply, demand):  # pragma: no cover - exercised via wrappers
    """Minimize sum_e C[e] x[e] over couplings of supply with demand.

    C is the flattened cost matrix, row-major over (supply atom, demand atom)
    pairs.  Totals of supply and demand must match.  Returns (cost, status).
    """
    m = supply.shape[0]
    n = demand.shape[0]
    N = m + n
    E = m * n
    faux_inf, tol, total = _scale_params(C, supply)

    x = np.zeros(E + N)
    pi = np.empty(N + 1)
    parent = np.empty(N + 1, np.int64)
    tree_arc = np.empty(N + 1, np.int64)
    size = np.empty(N + 1, np.int64)
    nxt = np.empty(N + 1, np.int64)
    prv = np.empty(N + 1, np.int64)
    last = np.empty(N + 1, np.int64)
    cap = 2 * N + 4
    Wn = np.empty(cap, np.int64)
    We = np.empty(cap, np.int64)
    path_n = np.empty(cap, np.int64)
    path_e = np.empty(cap, np.int64)
    anc = np.empty(N + 2, np.int64)

    _init_basis(m, n, supply, demand, faux_inf, x, pi, parent, tree_arc, size, nxt, prv, last)
    status = _pivot_loop(C, m, n, faux_inf, tol, x, pi, parent, tree_arc, size,
                         nxt, prv, last, Wn, We, path_n, path_e, anc)
    if status != STATUS_OK:
        return 0.0, status
    flow_tol = 1e-9 * (total if total > 1.0 else 1.0)
    for v in range(N):
        if x[E + v] > flow_tol:
            return 0.0, STATUS_INFEASIBLE
    return _objective(C, x, E), STATUS_OK


@njit(cache=True)
def w1_locals_vs_global(D, idx):  # pragma: no cover - exercised via wrappers
    """W1 between each local uniform law and the global uniform law.

    D is the (N, N) pairwise distance matrix over the N pooled atoms; row s of
    idx lists the r atoms carrying local law s.  Supplies are scaled to
    integers (local atoms weigh N each, global atoms weigh r each) so the
    simplex runs on exact integral flows.  Returns (values, statuses), one
    entry per local law.

    Solve s+1 warm-starts from the optimal basis of solve s: the marginals
    never change, so the old tree still carries a feasible flow under the new
    costs and only the potentials need recomputing before pivoting resumes.
    """
    n_solve, r = idx.shape
    N_atoms = D.shape[0]
    m = r
    n = N_atoms
    N = m + n
    E = m * n
    supply = np.full(m, float(n))
    demand = np.full(n, float(m))
    scale = float(m) * float(n)

    C = np.empty(E)
    x = np.zeros(E + N)
    pi = np.empty(N + 1)
    parent = np.empty(N + 1, np.int64)
    tree_arc = np.empty(N + 1, np.int64)
    size = np.empty(N + 1, np.int64)
    nxt = np.empty(N + 1, np.int64)
    prv = np.empty(N + 1, np.int64)
    last = np.empty(N + 1, np.int64)
    cap = 2 * N + 4
    Wn = np.empty(cap, np.int64)
    We = np.empty(cap, np.int64)
    path_n = np.empty(cap, np.int64)
    path_e = np.empty(cap, np.int64)
    anc = np.empty(N + 2, np.int64)

    values = np.empty(n_solve)
    statuses = np.zeros(n_solve, np.int64)

    # Shared conservative big-M/tolerance across the batch (D holds every
    # cost any solve can see).
    dmax = 0.0
    dsum = 0.0
    for a in range(N_atoms):
        for b in range(N_atoms):
            c = D[a, b]
            dsum += c
            if c > dmax:
                dmax = c
    faux_inf = 3.0 * (dsum if dsum > scale else scale)
    if faux_inf < 1.0:
        faux_inf = 1.0
    tol = 1e-10 * (dmax if dmax > 1.0 else 1.0)

    warm = False
    for s in range(n_solve):
        for a in range(m):
            row = idx[s, a]
            base = a * n
            for b in range(n):
                C[base + b] = D[row, b]
        if not warm:
            _init_basis(m, n, supply, demand, faux_inf, x, pi, parent, tree_arc,
                        size, nxt, prv, last)
        else:
            _recompute_potentials(C, m, n, faux_inf, pi, parent, tree_arc, nxt)
        status = _pivot_loop(C, m, n, faux_inf, tol, x, pi, parent, tree_arc,
                             size, nxt, prv, last, Wn, We, path_n, path_e, anc)
        if status != STATUS_OK:
            # One cold retry before reporting failure for this entry.
            _init_basis(m, n, supply, demand, faux_inf, x, pi, parent, tree_arc,
                        size, nxt, prv, last)
            status = _pivot_loop(C, m, n, faux_inf, tol, x, pi, parent, tree_arc,
                                 size, nxt, prv, last, Wn, We, path_n, path_e, anc)
        feasible = True
        for v in range(N):
            if x[E + v] > 1e-9 * scale:
                feasible = False
        if status == STATUS_OK and not feasible:
            status = STATUS_INFEASIBLE
        values[s] = _objective(C, x, E) / scale
        statuses[s] = status
        warm = status == STATUS_OK
    return values, statuses


@njit(cache=True)
def max_w1_locals_vs_global(D, idx, order, ub):  # pragma: no cover - exercised via wrappers
    """Max over local laws of W1(local, global), with exact pruning.

    Entries are visited in the given order (callers sort by a descending W1
    lower bound so a large value is found early); an entry whose upper bound
    ub cannot beat the running max is skipped without solving.  W1 is
    nonnegative, so the running max starts at zero and every skip is exact.
    Returns (best, n_solved, worst_status).
    """
    n_solve, r = idx.shape
    N_atoms = D.shape[0]
    m = r
    n = N_atoms
    N = m + n
    E = m * n
    supply = np.full(m, float(n))
    demand = np.full(n, float(m))
    scale = float(m) * float(n)

    C = np.empty(E)
    x = np.zeros(E + N)
    pi = np.empty(N + 1)
    parent = np.empty(N + 1, np.int64)
    tree_arc = np.empty(N + 1, np.int64)
    size = np.empty(N + 1, np.int64)
    nxt = np.empty(N + 1, np.int64)
    prv = np.empty(N + 1, np.int64)
    last = np.empty(N + 1, np.int64)
    cap = 2 * N + 4
    Wn = np.empty(cap, np.int64)
    We = np.empty(cap, np.int64)
    path_n = np.empty(cap, np.int64)
    path_e = np.empty(cap, np.int64)
    anc = np.empty(N + 2, np.int64)

    dmax = 0.0
    dsum = 0.0
    for a in range(N_atoms):
        for b in range(N_atoms):
            c = D[a, b]
            dsum += c
            if c > dmax:
                dmax = c
    faux_inf = 3.0 * (dsum if dsum > scale else scale)
    if faux_inf < 1.0:
        faux_inf = 1.0
    tol = 1e-10 * (dmax if dmax > 1.0 else 1.0)

    best = 0.0
    n_solved = 0
    worst_status = STATUS_OK
    warm = False
    for t in range(order.shape[0]):
        s = order[t]
        if ub[s] <= best:
            continue
        for a in range(m):
            row = idx[s, a]
            base = a * n
            for b in range(n):
                C[base + b] = D[row, b]
        if not warm:
            _init_basis(m, n, supply, demand, faux_inf, x, pi, parent, tree_arc,
                        size, nxt, prv, last)
        else:
            _recompute_potentials(C, m, n, faux_inf, pi, parent, tree_arc, nxt)
        status = _pivot_loop(C, m, n, faux_inf, tol, x, pi, parent, tree_arc,
                             size, nxt, prv, last, Wn, We, path_n, path_e, anc)
        if status != STATUS_OK:
            _init_basis(m, n, supply, demand, faux_inf, x, pi, parent, tree_arc,
                        size, nxt, prv, last)
            status = _pivot_loop(C, m, n, faux_inf, tol, x, pi, parent, tree_arc,
                                 size, nxt, prv, last, Wn, We, path_n, path_e, anc)
        for v in range(N):
            if status == STATUS_OK and x[E + v] > 1e-9 * scale:
                status = STATUS_INFEASIBLE
        n_solved += 1
        if status != STATUS_OK:
            if status > worst_status:
                worst_status = status
            warm = False
            continue
        val = _objective(C, x, E) / scale
        if val > best:
            best = val
        warm = True
    return best, n_solved, worst_status
