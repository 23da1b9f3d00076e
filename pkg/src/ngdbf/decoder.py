"""Noisy gradient-descent bit flipping (GDBF / NGDBF / SM-NGDBF) with re-decoding.

The per-step functions (:func:`compute_inversions`, :func:`flip_and_adapt`,
...) are plain numpy and define the algorithm; :func:`decode_phase` runs the
same steps through a compiled loop.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Mapping

import numpy as np

from . import _kernels
from .tanner import ParityCheckMatrix

# perturbation rows are drawn in growing blocks; the variate sequence seen by
# iteration t does not depend on the block sizes
_FIRST_BLOCK = 8
_MAX_BLOCK = 256


@dataclass(frozen=True)
class DecoderConfig:
    """Scalar knobs of the decoder family.

    ``lam`` is serialized under the key ``lambda``.  ``eta=0`` with ``w=1``
    is plain GDBF.
    """

    T: int = 100
    theta: float = -0.6
    lam: float = 1.0
    w: float = 1.0
    eta: float = 0.0
    y_max: float | None = None
    smoothing_window: int | None = None
    phi: int = 1

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if not self.theta < 0:
            raise ValueError("theta must be negative")
        if not 0 < self.lam <= 1:
            raise ValueError("lambda must be in (0, 1]")
        if not 0 <= self.eta <= 1:
            raise ValueError("eta must be in [0, 1]")
        if self.y_max is not None and self.y_max <= 0:
            raise ValueError("y_max must be positive")
        if self.smoothing_window is not None and not 1 <= self.smoothing_window <= self.T:
            raise ValueError("smoothing_window must be in [1, T]")
        if self.phi < 1:
            raise ValueError("phi must be >= 1")

    KEYS = ("T", "theta", "lambda", "w", "eta", "y_max", "smoothing_window", "phi")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return {k: d[k] for k in self.KEYS}

    @classmethod
    def from_dict(cls, d: Mapping) -> "DecoderConfig":
        unknown = set(d) - set(cls.KEYS)
        if unknown:
            raise KeyError(f"unknown decoder config key(s): {', '.join(sorted(unknown))}")
        kw = dict(d)
        if "lambda" in kw:
            kw["lam"] = kw.pop("lambda")
        for k in ("T", "phi", "smoothing_window"):
            if kw.get(k) is not None:
                kw[k] = int(kw[k])
        for k in ("theta", "lam", "w", "eta", "y_max"):
            if kw.get(k) is not None:
                kw[k] = float(kw[k])
        return cls(**kw)

    def with_(self, **changes) -> "DecoderConfig":
        return replace(self, **changes)

    @property
    def smooth_from(self) -> int:
        """Counters accumulate after iterations t > smooth_from."""
        return self.T if self.smoothing_window is None else self.T - self.smoothing_window


# Parameter sets used in the simulations this package reproduces.
GDBF_TRAPSET = DecoderConfig(T=100, theta=-0.6, lam=1.0, w=1.0, eta=0.0)
NGDBF_TRAPSET = GDBF_TRAPSET.with_(eta=1.0)
SM_NGDBF_PEG = DecoderConfig(T=300, theta=-0.6, lam=0.98, w=0.816, eta=0.75, smoothing_window=64)
NGDBF_8023AN = DecoderConfig(T=1000, theta=-0.525, lam=1.0, w=0.20833, eta=0.92)


@dataclass
class DecoderState:
    x: np.ndarray
    theta_k: np.ndarray
    counters: np.ndarray
    t: int = 0


@dataclass
class PhaseResult:
    success: bool
    output: np.ndarray
    iterations: int
    used_smoothed: bool = False


@dataclass
class DecodeResult:
    success: bool
    output: np.ndarray
    phases_used: int
    total_iterations: int
    phases: list[PhaseResult] = field(default_factory=list, repr=False)


def sign(v) -> np.ndarray:
    """Bipolar sign with sign(0) = +1."""
    return np.where(np.asarray(v) < 0, -1, 1).astype(np.int8)


def saturate(y, y_max: float | None) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y_max is None:
        return y
    if y_max <= 0:
        raise ValueError("y_max must be positive")
    return np.clip(y, -y_max, y_max)


def compute_inversions(h: ParityCheckMatrix, x, y, s, w: float, q) -> np.ndarray:
    """E_k = x_k y_k + w * sum_{i in M(k)} s_i + q_k."""
    x, y, s, q = (np.asarray(a) for a in (x, y, s, q))
    if x.shape != (h.n,) or y.shape != (h.n,) or q.shape != (h.n,):
        raise ValueError("x, y and q must have length n")
    if s.shape != (h.m,):
        raise ValueError("s must have length m")
    ssum = np.add.reduceat(s[h.sym_idx].astype(np.int64), h.sym_ptr[:-1])
    return x.astype(np.float64) * y + w * ssum + q


def perturbation_std(eta: float, n0: float) -> float:
    return eta * math.sqrt(n0 / 2.0)


def sample_perturbations(n: int, eta: float, n0: float, stream: np.random.Generator) -> np.ndarray:
    """n i.i.d. N(0, eta^2 N0/2) samples; exact zeros (no draw) when eta == 0."""
    if eta < 0 or n0 <= 0:
        raise ValueError("need eta >= 0 and n0 > 0")
    if eta == 0:
        return np.zeros(n)
    return stream.standard_normal(n) * perturbation_std(eta, n0)


def initial_state(y, theta: float) -> DecoderState:
    x = sign(y)
    return DecoderState(x=x, theta_k=np.full(x.size, float(theta)), counters=np.zeros(x.size, dtype=np.int64))


def flip_and_adapt(state: DecoderState, E, lam: float) -> DecoderState:
    """Flip every symbol with E_k < theta_k; scale the others' thresholds by lam.

    All symbols are judged against the pre-update state.
    """
    E = np.asarray(E)
    if E.shape != state.x.shape:
        raise ValueError("E must match x in length")
    flip = E < state.theta_k
    x = np.where(flip, -state.x, state.x).astype(np.int8)
    theta_k = np.where(flip, state.theta_k, lam * state.theta_k)
    return DecoderState(x=x, theta_k=theta_k, counters=state.counters.copy(), t=state.t + 1)


def decode_phase(
    h: ParityCheckMatrix,
    y,
    n0: float,
    config: DecoderConfig,
    stream: np.random.Generator | None = None,
) -> PhaseResult:
    """One decoding phase from the initial state (Steps 0-4 plus smoothing)."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (h.n,):
        raise ValueError(f"y must have length {h.n}, got shape {y.shape}")
    if config.eta > 0 and stream is None:
        raise ValueError("a perturbation stream is required when eta > 0")
    y = saturate(y, config.y_max)
    st = initial_state(y, config.theta)
    x, theta_k, counters = st.x, st.theta_k, st.counters
    empty2 = np.empty((0, 0))
    empty_x = np.empty((0, 0), dtype=np.int8)
    sd = perturbation_std(config.eta, n0) if config.eta > 0 else 0.0

    t = 0
    block = _FIRST_BLOCK
    while True:
        nb = min(block, config.T - t)
        q = stream.standard_normal((nb, h.n)) * sd if sd > 0 else np.zeros((nb, h.n))
        status, t, _ = _kernels.ngdbf_iterations(
            h.check_ptr, h.check_idx, h.sym_ptr, h.sym_idx,
            y, x, theta_k, counters, q,
            t, config.T, config.lam, config.w, config.smooth_from, True,
            empty2, empty_x, False, -1,
        )
        if status == _kernels.CONVERGED:
            return PhaseResult(True, x, t)
        if t >= config.T:
            break
        block = min(2 * block, _MAX_BLOCK)

    if _kernels.all_satisfied(h.check_ptr, h.check_idx, x):
        return PhaseResult(True, x, t)
    if config.smoothing_window is None:
        return PhaseResult(False, x, t)
    xbar = sign(counters)
    return PhaseResult(bool(_kernels.all_satisfied(h.check_ptr, h.check_idx, xbar)), xbar, t, True)


PhaseStreams = Callable[[int], np.random.Generator]


def decode(
    h: ParityCheckMatrix,
    y,
    n0: float,
    config: DecoderConfig,
    streams: PhaseStreams | None = None,
) -> DecodeResult:
    """Decode with up to ``config.phi`` phases on the same ``y``.

    ``streams(p)`` must return the perturbation stream for phase p
    (1-based).  Every phase restarts from the initial state.
    """
    phases: list[PhaseResult] = []
    for p in range(1, config.phi + 1):
        if config.eta == 0 and phases:
            # deterministic decoder: every phase repeats phase 1
            res = phases[0]
        else:
            res = decode_phase(h, y, n0, config, streams(p) if streams is not None else None)
        phases.append(res)
        if res.success:
            break
    last = phases[-1]
    return DecodeResult(
        success=last.success,
        output=last.output,
        phases_used=len(phases),
        total_iterations=sum(r.iterations for r in phases),
        phases=phases,
    )
