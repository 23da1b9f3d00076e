"""BPSK over AWGN and keyed noise streams.

Every random draw in the package comes from a stream keyed by
(master_seed, frame, phase, role), so results never depend on how frames are
scheduled across workers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class StreamRole(enum.IntEnum):
    CHANNEL = 0
    PERTURBATION = 1


@dataclass(frozen=True)
class NoiseStreamKey:
    master_seed: int
    frame_index: int
    phase_index: int = 0
    stream_role: StreamRole = StreamRole.CHANNEL


def make_stream(key: NoiseStreamKey) -> np.random.Generator:
    """Independent generator for ``key``; identical keys give identical streams."""
    seq = np.random.SeedSequence(
        entropy=key.master_seed,
        spawn_key=(key.frame_index, key.phase_index, int(key.stream_role)),
    )
    return np.random.Generator(np.random.PCG64(seq))


def channel_stream(master_seed: int, frame: int) -> np.random.Generator:
    return make_stream(NoiseStreamKey(master_seed, frame, 0, StreamRole.CHANNEL))


def perturbation_stream(master_seed: int, frame: int, phase: int) -> np.random.Generator:
    return make_stream(NoiseStreamKey(master_seed, frame, phase, StreamRole.PERTURBATION))


@dataclass(frozen=True)
class ChannelParams:
    ebn0_db: float
    rate: float

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")

    @property
    def n0(self) -> float:
        return 1.0 / (self.rate * 10.0 ** (self.ebn0_db / 10.0))

    @property
    def sigma2(self) -> float:
        return self.n0 / 2.0


def ebn0_to_sigma2(ebn0_db: float, rate: float) -> float:
    """Noise variance N0/2 for unit-energy BPSK, with Eb = 1/rate.

    ``rate == 1`` is accepted as a degenerate uncoded setting.
    """
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    return ChannelParams(ebn0_db, rate).sigma2


def transmit(c, sigma2: float, stream: np.random.Generator) -> np.ndarray:
    """y = c + z with z ~ N(0, sigma2) i.i.d."""
    if sigma2 < 0:
        raise ValueError("sigma2 must be non-negative")
    c = np.asarray(c, dtype=np.float64)
    if sigma2 == 0:
        return c.copy()
    return c + math.sqrt(sigma2) * stream.standard_normal(c.shape)
