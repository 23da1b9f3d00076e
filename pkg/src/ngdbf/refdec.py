"""Flooding normalized min-sum, kept as an independent check on the harness."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import _kernels
from .decoder import PhaseResult
from .tanner import ParityCheckMatrix


@dataclass(frozen=True)
class NmsConfig:
    T: int = 100
    alpha: float = 0.8

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")

    KEYS = ("T", "alpha")

    def to_dict(self) -> dict:
        return {"T": self.T, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, d: Mapping) -> "NmsConfig":
        unknown = set(d) - set(cls.KEYS)
        if unknown:
            raise KeyError(f"unknown NMS config key(s): {', '.join(sorted(unknown))}")
        kw = dict(d)
        if "T" in kw:
            kw["T"] = int(kw["T"])
        if "alpha" in kw:
            kw["alpha"] = float(kw["alpha"])
        return cls(**kw)


@lru_cache(maxsize=16)
def _edge_of_symbol(h: ParityCheckMatrix) -> np.ndarray:
    # position in the check-ordered edge list of each (symbol, check) entry
    rows = np.repeat(np.arange(h.m), h.check_degrees)
    key = {(int(i), int(j)): e for e, (i, j) in enumerate(zip(rows, h.check_idx))}
    cols = np.repeat(np.arange(h.n), h.symbol_degrees)
    return np.array([key[(int(i), int(j))] for i, j in zip(h.sym_idx, cols)], dtype=np.int64)


def nms_decode(h: ParityCheckMatrix, llr, config: NmsConfig = NmsConfig()) -> PhaseResult:
    """Decode channel LLRs (positive favours bit 0, i.e. symbol +1)."""
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape != (h.n,):
        raise ValueError(f"llr must have length {h.n}, got shape {llr.shape}")
    bits, iters, ok = _kernels.nms_iterations(
        h.check_ptr, h.check_idx, h.sym_ptr, h.sym_idx, _edge_of_symbol(h), llr, config.alpha, config.T
    )
    return PhaseResult(bool(ok), np.where(bits == 1, -1, 1).astype(np.int8), int(iters))


def channel_llr(y, sigma2: float) -> np.ndarray:
    return 2.0 * np.asarray(y, dtype=np.float64) / sigma2
