"""Regenerate the alist files bundled in src/ngdbf/data.

    python tools/make_codes.py

* hamming_7_4.alist          - textbook Hamming(7,4).
* toy_reg36_96x48.alist      - small (3,6)-regular code, PEG construction.
* peg_reg36_504x1008.alist   - (3,6)-regular 504x1008 code, PEG construction
                               (same parameters as PEGReg504x1008).
* ieee8023an_rs_2048x384.alist - (6,32)-regular n=2048 code from the RS(32,2)
                               over GF(64) construction used by 10GBASE-T.

Output is deterministic for the seeds below.
"""

from __future__ import annotations

import sys
from collections import deque
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from ngdbf.tanner import ParityCheckMatrix, save_alist  # noqa: E402

DATA = ROOT / "src" / "ngdbf" / "data"


def peg(n: int, m: int, dv: int, dc: int, seed: int) -> ParityCheckMatrix:
    """Progressive edge growth with a hard cap on check degree."""
    rng = np.random.default_rng(seed)
    sym_adj: list[list[int]] = [[] for _ in range(n)]
    chk_adj: list[list[int]] = [[] for _ in range(m)]
    deg = np.zeros(m, dtype=int)
    for j in range(n):
        for _ in range(dv):
            # BFS depth (in check layers) of every check from symbol j
            dist = np.full(m, np.iinfo(np.int64).max)
            seen_sym = {j}
            frontier = deque()
            for c in sym_adj[j]:
                dist[c] = 0
                frontier.append(c)
            while frontier:
                c = frontier.popleft()
                for s in chk_adj[c]:
                    if s in seen_sym:
                        continue
                    seen_sym.add(s)
                    for c2 in sym_adj[s]:
                        if dist[c2] > dist[c] + 1:
                            dist[c2] = dist[c] + 1
                            frontier.append(c2)
            open_ = np.flatnonzero((deg < dc) & ~np.isin(np.arange(m), sym_adj[j]))
            far = dist[open_].max()
            cand = open_[dist[open_] == far]
            cand = cand[deg[cand] == deg[cand].min()]
            c = int(rng.choice(cand))
            sym_adj[j].append(c)
            chk_adj[c].append(j)
            deg[c] += 1
    return ParityCheckMatrix.from_check_neighbors(chk_adj, n)


def gf64_tables(poly: int = 0b1000011) -> tuple[list[int], list[int]]:
    exp = [0] * 126
    log = [0] * 64
    v = 1
    for i in range(63):
        exp[i] = v
        log[v] = i
        v <<= 1
        if v & 64:
            v ^= poly
    for i in range(63, 126):
        exp[i] = exp[i - 63]
    return exp, log


def rs_8023an(gammas_log: tuple[int | None, ...] = (None, 0, 1, 2, 3, 4)) -> ParityCheckMatrix:
    """RS-based (6,32)-regular LDPC code of length 2048.

    The (32,2) shortened RS code over GF(64) has generator
    g(X) = prod_{i=1..30} (X + a^i).  A weight-32 codeword b spans a 1-D
    subcode; each coset {beta*b + gamma*g} expands (via 64-bit location
    vectors) into a row of 32 permutation matrices.  Six cosets give H.
    Two rows from different cosets share at most one column (dmin = 31),
    so the Tanner graph is 4-cycle free.
    """
    exp, log = gf64_tables()

    def mul(a: int, b: int) -> int:
        return 0 if a == 0 or b == 0 else exp[log[a] + log[b]]

    g = [1]
    for i in range(1, 31):
        root = exp[i]
        nxt = [0] * (len(g) + 1)
        for k, c in enumerate(g):
            nxt[k + 1] ^= c
            nxt[k] ^= mul(c, root)
        g = nxt
    g = g + [0]  # length 32
    xg = [0] + g[:-1]

    b = None
    for a0 in range(1, 64):
        for a1 in range(1, 64):
            cw = [mul(a0, u) ^ mul(a1, v) for u, v in zip(g, xg)]
            if all(cw):
                b = cw
                break
        if b:
            break
    assert b is not None

    rows = []
    for gl in gammas_log:
        gamma = 0 if gl is None else exp[gl]
        for beta in range(64):
            cw = [mul(beta, bv) ^ mul(gamma, gv) for bv, gv in zip(b, g)]
            rows.append([pos * 64 + (0 if s == 0 else log[s] + 1) for pos, s in enumerate(cw)])
    return ParityCheckMatrix.from_check_neighbors(rows, 2048)


HAMMING = [
    [1, 1, 0, 1, 1, 0, 0],
    [1, 0, 1, 1, 0, 1, 0],
    [0, 1, 1, 1, 0, 0, 1],
]


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    save_alist(ParityCheckMatrix.from_dense(HAMMING), DATA / "hamming_7_4.alist")
    save_alist(peg(96, 48, 3, 6, seed=7), DATA / "toy_reg36_96x48.alist")
    save_alist(peg(1008, 504, 3, 6, seed=504), DATA / "peg_reg36_504x1008.alist")
    h = rs_8023an()
    print("802.3an-family rank", h.gf2_rank(), "-> k =", h.n - h.gf2_rank())
    save_alist(h, DATA / "ieee8023an_rs_2048x384.alist")


if __name__ == "__main__":
    main()
