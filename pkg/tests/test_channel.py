import math

import numpy as np
import pytest
from scipy import stats

from ngdbf.channel import (
    ChannelParams,
    NoiseStreamKey,
    StreamRole,
    channel_stream,
    ebn0_to_sigma2,
    make_stream,
    perturbation_stream,
    transmit,
)


def test_sigma2_closed_form():
    # 1 / (2 * 0.5 * 10**0.3)
    assert ebn0_to_sigma2(3.0, 0.5) == pytest.approx(0.501187, abs=1e-6)
    assert ebn0_to_sigma2(0.0, 1.0) == 0.5
    assert ebn0_to_sigma2(200.0, 0.5) < 1e-19
    assert ebn0_to_sigma2(math.inf, 0.5) == 0.0


def test_channel_params():
    p = ChannelParams(3.0, 0.5)
    assert p.sigma2 == pytest.approx(p.n0 / 2)
    with pytest.raises(ValueError):
        ChannelParams(3.0, 0.0)
    with pytest.raises(ValueError):
        ebn0_to_sigma2(1.0, 1.5)


def test_noiseless_transmit():
    y = transmit(np.ones(10), 0.0, channel_stream(0, 0))
    assert np.array_equal(y, np.ones(10))
    with pytest.raises(ValueError):
        transmit(np.ones(3), -1.0, channel_stream(0, 0))


def test_noise_moments():
    y = transmit(np.ones(10**6), 1.0, channel_stream(3, 0))
    assert abs(y.mean() - 1) < 0.01
    assert abs(y.var() - 1) < 0.02


def test_noise_normality():
    z = make_stream(NoiseStreamKey(11, 0)).standard_normal(10**5)
    assert stats.kstest(z, "norm").pvalue > 0.01


def test_stream_keying():
    draw = lambda key: make_stream(key).standard_normal(16)  # noqa: E731
    base = NoiseStreamKey(5, 3, 1, StreamRole.PERTURBATION)
    assert np.array_equal(draw(base), draw(NoiseStreamKey(5, 3, 1, StreamRole.PERTURBATION)))
    assert not np.array_equal(draw(base), draw(NoiseStreamKey(5, 3, 2, StreamRole.PERTURBATION)))
    assert not np.array_equal(draw(base), draw(NoiseStreamKey(5, 4, 1, StreamRole.PERTURBATION)))
    assert not np.array_equal(draw(base), draw(NoiseStreamKey(6, 3, 1, StreamRole.PERTURBATION)))
    assert not np.array_equal(draw(base), draw(NoiseStreamKey(5, 3, 1, StreamRole.CHANNEL)))


def test_same_key_same_frame():
    a = transmit(np.ones(50), 0.7, channel_stream(9, 2))
    b = transmit(np.ones(50), 0.7, channel_stream(9, 2))
    assert np.array_equal(a, b)


def test_streams_uncorrelated():
    a = perturbation_stream(1, 0, 1).standard_normal(10**5)
    b = perturbation_stream(1, 0, 2).standard_normal(10**5)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.02


def test_block_draws_match_sequential_draws():
    # the decoder draws perturbation rows in blocks; values must not depend on block size
    g1, g2 = perturbation_stream(4, 1, 1), perturbation_stream(4, 1, 1)
    whole = g1.standard_normal((12, 7))
    parts = np.vstack([g2.standard_normal((k, 7)) for k in (1, 3, 8)])
    assert np.array_equal(whole, parts)
