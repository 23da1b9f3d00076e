"""Sparse parity-check matrices with Tanner-graph adjacency and alist I/O.

Indices are 0-based everywhere in the API; the alist format is 1-based and
is converted on read/write.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class AlistError(ValueError):
    """Malformed alist input.  ``line`` is the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def _csr(lists: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(lists) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(l) for l in lists])
    idx = np.fromiter((v for l in lists for v in l), dtype=np.int64, count=int(ptr[-1]))
    ptr.setflags(write=False)
    idx.setflags(write=False)
    return ptr, idx


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """Binary m x n parity-check matrix stored as both-direction adjacency.

    ``check_ptr/check_idx`` is the CSR view of the rows (N(i)) and
    ``sym_ptr/sym_idx`` the CSR view of the columns (M(j)).  Instances are
    immutable and can be shared between workers.
    """

    m: int
    n: int
    check_ptr: np.ndarray
    check_idx: np.ndarray
    sym_ptr: np.ndarray
    sym_idx: np.ndarray
    name: str = ""

    @classmethod
    def from_check_neighbors(
        cls, check_neighbors: Sequence[Iterable[int]], n: int, name: str = ""
    ) -> "ParityCheckMatrix":
        rows = [sorted(int(j) for j in row) for row in check_neighbors]
        m = len(rows)
        if m < 1:
            raise ValueError("parity-check matrix needs at least one check")
        cols: list[list[int]] = [[] for _ in range(n)]
        for i, row in enumerate(rows):
            if not row:
                raise ValueError(f"check {i} has no neighbors")
            if len(set(row)) != len(row):
                raise ValueError(f"check {i} has duplicate neighbors")
            for j in row:
                if not 0 <= j < n:
                    raise ValueError(f"check {i}: symbol index {j} out of range")
                cols[j].append(i)
        cptr, cidx = _csr(rows)
        sptr, sidx = _csr(cols)
        return cls(m, n, cptr, cidx, sptr, sidx, name)

    @classmethod
    def from_dense(cls, h: np.ndarray | Sequence[Sequence[int]], name: str = "") -> "ParityCheckMatrix":
        h = np.asarray(h)
        if h.ndim != 2:
            raise ValueError("dense matrix must be 2-D")
        return cls.from_check_neighbors([np.flatnonzero(row) for row in h], h.shape[1], name)

    @property
    def check_neighbors(self) -> list[list[int]]:
        p, ix = self.check_ptr, self.check_idx
        return [ix[p[i] : p[i + 1]].tolist() for i in range(self.m)]

    @property
    def symbol_neighbors(self) -> list[list[int]]:
        p, ix = self.sym_ptr, self.sym_idx
        return [ix[p[j] : p[j + 1]].tolist() for j in range(self.n)]

    @property
    def check_degrees(self) -> np.ndarray:
        return np.diff(self.check_ptr)

    @property
    def symbol_degrees(self) -> np.ndarray:
        return np.diff(self.sym_ptr)

    @property
    def n_edges(self) -> int:
        return int(self.check_ptr[-1])

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.m, self.n), dtype=np.uint8)
        rows = np.repeat(np.arange(self.m), self.check_degrees)
        h[rows, self.check_idx] = 1
        return h

    def gf2_rank(self) -> int:
        """Rank of H over GF(2) (dense elimination, fine up to a few thousand columns)."""
        a = self.to_dense().astype(bool)
        rank = 0
        for col in range(self.n):
            pivots = np.flatnonzero(a[rank:, col])
            if pivots.size == 0:
                continue
            p = rank + pivots[0]
            if p != rank:
                a[[rank, p]] = a[[p, rank]]
            below = np.flatnonzero(a[:, col])
            below = below[below != rank]
            a[below] ^= a[rank]
            rank += 1
            if rank == self.m:
                break
        return rank

    @property
    def rate(self) -> float:
        """Design rate 1 - m/n (ignores redundant rows)."""
        return 1.0 - self.m / self.n

    def is_transpose_consistent(self) -> bool:
        rows = {(i, j) for i, row in enumerate(self.check_neighbors) for j in row}
        cols = {(i, j) for j, col in enumerate(self.symbol_neighbors) for i in col}
        return rows == cols

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ParityCheckMatrix):
            return NotImplemented
        return (
            self.m == other.m
            and self.n == other.n
            and np.array_equal(self.check_ptr, other.check_ptr)
            and np.array_equal(self.check_idx, other.check_idx)
        )

    def __hash__(self) -> int:
        return hash((self.m, self.n, self.check_idx.tobytes()))

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"ParityCheckMatrix{label}(m={self.m}, n={self.n}, edges={self.n_edges})"


def _as_bipolar(h: ParityCheckMatrix, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (h.n,):
        raise ValueError(f"expected vector of length {h.n}, got shape {x.shape}")
    return x


def syndrome(h: ParityCheckMatrix, x) -> np.ndarray:
    """Bipolar syndrome: s_i is the product of x_j over the neighbors of check i."""
    x = _as_bipolar(h, x)
    neg = (x[h.check_idx] < 0).astype(np.int64)
    parity = np.add.reduceat(neg, h.check_ptr[:-1])
    return np.where(parity & 1, -1, 1).astype(np.int8)


def is_codeword(h: ParityCheckMatrix, x) -> bool:
    return bool(np.all(syndrome(h, x) == 1))


def induced_subgraph(h: ParityCheckMatrix, symbols: Iterable[int]) -> ParityCheckMatrix:
    """Restrict H to ``symbols``, keeping every check that touches at least one of them.

    Columns of the result follow the sorted order of ``symbols``.  Checks with
    a single selected neighbor are kept as degree-1 rows.
    """
    sel = sorted(set(int(s) for s in symbols))
    if not sel:
        raise ValueError("symbol set is empty")
    if sel[0] < 0 or sel[-1] >= h.n:
        raise ValueError("symbol index out of range")
    remap = {j: k for k, j in enumerate(sel)}
    checks = sorted({i for j in sel for i in h.sym_idx[h.sym_ptr[j] : h.sym_ptr[j + 1]]})
    rows = [
        [remap[j] for j in h.check_idx[h.check_ptr[i] : h.check_ptr[i + 1]] if j in remap]
        for i in checks
    ]
    return ParityCheckMatrix.from_check_neighbors(rows, len(sel), name=f"{h.name}[sub]" if h.name else "")


def parse_alist(text: str, name: str = "") -> ParityCheckMatrix:
    """Parse alist text.  Zero entries in neighbor lists are padding."""
    lines = [(k + 1, line.split()) for k, line in enumerate(text.splitlines())]
    lines = [(k, toks) for k, toks in lines if toks]
    pos = 0

    def ints(count: int | None = None) -> tuple[int, list[int]]:
        nonlocal pos
        if pos >= len(lines):
            raise AlistError("unexpected end of file", lines[-1][0] + 1 if lines else 1)
        lineno, toks = lines[pos]
        pos += 1
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise AlistError(f"non-integer token in {' '.join(toks)!r}", lineno) from None
        if count is not None and len(vals) != count:
            raise AlistError(f"expected {count} integers, found {len(vals)}", lineno)
        return lineno, vals

    lineno, (n, m) = ints(2)
    if n < 1 or m < 1:
        raise AlistError("dimensions must be positive", lineno)
    lineno, (max_col, max_row) = ints(2)
    col_line, col_deg = ints(n)
    row_line, row_deg = ints(m)
    if max(col_deg) > max_col:
        raise AlistError(f"column degree exceeds declared maximum {max_col}", col_line)
    if max(row_deg) > max_row:
        raise AlistError(f"row degree exceeds declared maximum {max_row}", row_line)

    def neighbor_lists(count: int, degrees: list[int], bound: int) -> list[tuple[int, list[int]]]:
        out = []
        for k in range(count):
            lineno, vals = ints()
            nz = [v for v in vals if v != 0]
            if len(nz) != degrees[k]:
                raise AlistError(f"degree {degrees[k]} declared but {len(nz)} neighbors listed", lineno)
            if any(v < 1 or v > bound for v in nz):
                raise AlistError(f"neighbor index out of range 1..{bound}", lineno)
            if len(set(nz)) != len(nz):
                raise AlistError("duplicate neighbor", lineno)
            out.append((lineno, [v - 1 for v in nz]))
        return out

    cols = neighbor_lists(n, col_deg, m)
    rows = neighbor_lists(m, row_deg, n)
    if any(d == 0 for d in row_deg):
        raise AlistError("check node with degree 0", row_line)

    h = ParityCheckMatrix.from_check_neighbors([r for _, r in rows], n, name=name)
    for j, (lineno, col) in enumerate(cols):
        if sorted(col) != h.symbol_neighbors[j]:
            raise AlistError(f"column {j + 1} disagrees with the row lists", lineno)
    return h


def load_alist(source: str | Path, name: str | None = None) -> ParityCheckMatrix:
    path = Path(source)
    return parse_alist(path.read_text(), name=path.stem if name is None else name)


def emit_alist(h: ParityCheckMatrix) -> str:
    """Canonical alist text: sorted neighbor lists, zero-padded to the max degree."""
    cdeg, rdeg = h.symbol_degrees, h.check_degrees
    max_c, max_r = int(cdeg.max()), int(rdeg.max())

    def padded(lists: list[list[int]], width: int) -> list[str]:
        return [" ".join(str(v + 1) for v in l) + " 0" * (width - len(l)) for l in lists]

    out = [
        f"{h.n} {h.m}",
        f"{max_c} {max_r}",
        " ".join(map(str, cdeg)),
        " ".join(map(str, rdeg)),
        *padded(h.symbol_neighbors, max_c),
        *padded(h.check_neighbors, max_r),
    ]
    return "\n".join(out) + "\n"


def save_alist(h: ParityCheckMatrix, path: str | Path) -> None:
    Path(path).write_text(emit_alist(h))


# Bundled codes, see tools/make_codes.py for how the generated ones were built.
BUNDLED_CODES = {
    "hamming7": "hamming_7_4.alist",
    "toy96": "toy_reg36_96x48.alist",
    "peg1008": "peg_reg36_504x1008.alist",
    "ieee8023an": "ieee8023an_rs_2048x384.alist",
}


@lru_cache(maxsize=None)
def bundled_code(key: str) -> ParityCheckMatrix:
    """Load one of the alist files shipped in ``ngdbf/data`` by short name."""
    try:
        fname = BUNDLED_CODES[key]
    except KeyError:
        raise KeyError(f"unknown bundled code {key!r}; choose from {sorted(BUNDLED_CODES)}") from None
    text = resources.files("ngdbf.data").joinpath(fname).read_text()
    return parse_alist(text, name=key)


def resolve_code(ref: str | Path) -> ParityCheckMatrix:
    """Bundled short name or path to an alist file."""
    if str(ref) in BUNDLED_CODES:
        return bundled_code(str(ref))
    return load_alist(ref)


@lru_cache(maxsize=32)
def code_rate(h: ParityCheckMatrix) -> float:
    """True rate (n - rank H) / n."""
    return (h.n - h.gf2_rank()) / h.n


def degree_summary(h: ParityCheckMatrix) -> str:
    dv = np.unique(h.symbol_degrees)
    dc = np.unique(h.check_degrees)
    if dv.size == 1 and dc.size == 1:
        return f"regular ({dv[0]},{dc[0]})"
    return "irregular"
