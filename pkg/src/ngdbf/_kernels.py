"""Compiled inner loops.  Semantics are mirrored operation-for-operation by the
numpy building blocks in :mod:`ngdbf.decoder`; the test suite checks that the
two agree bit-for-bit.
"""

from __future__ import annotations

import numpy as np
from numba import njit

RUNNING = 0
CONVERGED = 1


@njit(cache=True)
def ngdbf_iterations(
    cptr, cidx, sptr, sidx,
    y, x, theta_k, counters, q,
    t, T, lam, w, smooth_from, stop_on_codeword,
    e_rec, x_rec, record, first_ok,
):
    """Run up to ``q.shape[0]`` iterations starting at iteration count ``t``.

    Returns (status, t, first_ok).  ``first_ok`` is the first iteration count
    at which the syndrome was fully satisfied (-1 if never).  With
    ``stop_on_codeword`` the loop returns CONVERGED at that point.
    """
    m = cptr.shape[0] - 1
    n = x.shape[0]
    s = np.empty(m, dtype=np.int8)
    flips = np.empty(n, dtype=np.int64)
    unsat = 0
    for i in range(m):
        p = 1
        for e in range(cptr[i], cptr[i + 1]):
            p *= x[cidx[e]]
        s[i] = p
        if p < 0:
            unsat += 1
    for b in range(q.shape[0]):
        if t >= T:
            break
        if unsat == 0:
            if first_ok < 0:
                first_ok = t
            if stop_on_codeword:
                return CONVERGED, t, first_ok
        # all E_k read the pre-update x and s
        nflip = 0
        for k in range(n):
            acc = 0
            for e in range(sptr[k], sptr[k + 1]):
                acc += s[sidx[e]]
            ek = x[k] * y[k] + w * acc + q[b, k]
            if record:
                e_rec[t, k] = ek
            if ek < theta_k[k]:
                flips[nflip] = k
                nflip += 1
            else:
                theta_k[k] = lam * theta_k[k]
        for f in range(nflip):
            k = flips[f]
            x[k] = -x[k]
            for e in range(sptr[k], sptr[k + 1]):
                i = sidx[e]
                s[i] = -s[i]
                if s[i] < 0:
                    unsat += 1
                else:
                    unsat -= 1
        t += 1
        if t > smooth_from:
            for k in range(n):
                counters[k] += x[k]
        if record:
            for k in range(n):
                x_rec[t, k] = x[k]
    if unsat == 0 and first_ok < 0:
        first_ok = t
    return RUNNING, t, first_ok


@njit(cache=True)
def all_satisfied(cptr, cidx, x):
    for i in range(cptr.shape[0] - 1):
        p = 1
        for e in range(cptr[i], cptr[i + 1]):
            p *= x[cidx[e]]
        if p < 0:
            return False
    return True


@njit(cache=True)
def nms_iterations(cptr, cidx, sptr, sidx, edge_of_sym, llr, alpha, T):
    """Flooding normalized min-sum.  Returns (hard decision bits, iterations, ok)."""
    m = cptr.shape[0] - 1
    n = llr.shape[0]
    n_edges = cidx.shape[0]
    v2c = np.empty(n_edges)
    c2v = np.zeros(n_edges)
    post = llr.copy()
    hard = np.empty(n, dtype=np.int8)
    for k in range(n):
        hard[k] = 1 if post[k] < 0 else 0
    it = 0
    while True:
        ok = True
        for i in range(m):
            par = 0
            for e in range(cptr[i], cptr[i + 1]):
                par ^= hard[cidx[e]]
            if par:
                ok = False
                break
        if ok or it >= T:
            return hard, it, ok
        # variable-to-check (extrinsic); edges are indexed in check order
        for k in range(n):
            for a in range(sptr[k], sptr[k + 1]):
                e = edge_of_sym[a]
                v2c[e] = post[k] - c2v[e]
        for i in range(m):
            min1 = np.inf
            min2 = np.inf
            arg = -1
            sgn = 1.0
            for e in range(cptr[i], cptr[i + 1]):
                v = v2c[e]
                a = abs(v)
                if v < 0:
                    sgn = -sgn
                if a < min1:
                    min2 = min1
                    min1 = a
                    arg = e
                elif a < min2:
                    min2 = a
            for e in range(cptr[i], cptr[i + 1]):
                mag = min2 if e == arg else min1
                sg = -sgn if v2c[e] < 0 else sgn
                c2v[e] = alpha * sg * mag
        for k in range(n):
            tot = llr[k]
            for a in range(sptr[k], sptr[k + 1]):
                tot += c2v[edge_of_sym[a]]
            post[k] = tot
            hard[k] = 1 if tot < 0 else 0
        it += 1
