import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwscatter.wavepacket import (
    GaussianPacket,
    WavePacketError,
    dtft,
    embed,
    momentum_amplitude_approx,
    momentum_amplitude_exact,
    momentum_weight,
    sample_position,
    tail_mass,
    validity_check,
)

K_GRID = np.linspace(-math.pi, math.pi, 4001)[1:]


def test_sampled_packet_normalised():
    j, psi = sample_position(GaussianPacket(-40.0, 10.0, 1.0))
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-14)
    assert j[0] == -120 and j[-1] == 40


def test_norm_const_matches_continuum():
    p = GaussianPacket(0.0, 5.0, 0.5)
    assert p.norm_const == pytest.approx((math.sqrt(math.pi) * 5.0) ** -0.5, rel=1e-14)


def test_narrow_window_rejected():
    with pytest.raises(WavePacketError):
        sample_position(GaussianPacket(0.0, 10.0, 1.0), window=(-20, 20))


def test_tail_mass_small_at_default():
    p = GaussianPacket(0.3, 7.0, 1.0)
    assert tail_mass(p, p.default_window()) < 1e-12


@pytest.mark.parametrize("sigma, k0", [(0.0, 1.0), (-1.0, 1.0), (5.0, -math.pi), (5.0, 4.0)])
def test_bad_packets(sigma, k0):
    with pytest.raises(WavePacketError):
        GaussianPacket(0.0, sigma, k0)


def test_embed_places_center():
    psi = embed(np.array([-1, 0, 1]), np.array([1, 2, 3]), 7)
    np.testing.assert_array_equal(psi, [0, 0, 1, 2, 3, 0, 0])
    with pytest.raises(WavePacketError):
        embed(np.array([2, 3, 4]), np.ones(3), 7)


@pytest.mark.parametrize("mu, sigma, k0", [(0.0, 5.0, math.pi / 2), (-50.0, 15.0, 0.44), (3.0, 6.0, -1.1)])
def test_weight_parseval(mu, sigma, k0):
    # uniform rule is spectrally accurate for a smooth periodic integrand
    w = momentum_weight(GaussianPacket(mu, sigma, k0), K_GRID)
    assert w.sum() * (2 * math.pi / K_GRID.size) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("k0", [0.44, 1.0, 1.6, 2.5])
def test_mean_momentum(k0):
    w = momentum_weight(GaussianPacket(0.0, 15.0, k0), K_GRID)
    assert (w * K_GRID).sum() / w.sum() == pytest.approx(k0, abs=1e-12)


@pytest.mark.parametrize("mu, sigma, k0", [(3.0, 6.0, 1.1), (-50.0, 15.0, 0.44), (0.0, 1.5, 0.2)])
def test_exact_matches_dtft(mu, sigma, k0):
    p = GaussianPacket(mu, sigma, k0)
    j, psi = sample_position(p)
    k = K_GRID[::10]
    lhs = momentum_amplitude_exact(p, k)
    rhs = np.exp(-1j * mu * k0) * dtft(j, psi, k)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_dtft_negative_control():
    p = GaussianPacket(3.0, 6.0, 1.1)
    j, psi = sample_position(p)
    k = K_GRID[::10]
    assert np.abs(momentum_amplitude_exact(p, k) - dtft(j, psi, k)).max() > 0.1


def test_poisson_regime_boundary():
    narrow = GaussianPacket(0.0, 5.0, math.pi / 2)
    wide = GaussianPacket(0.0, 0.5, 0.0)
    assert np.abs(momentum_amplitude_exact(narrow, K_GRID) - momentum_amplitude_approx(narrow, K_GRID)).max() < 1e-10
    assert np.abs(momentum_amplitude_exact(wide, K_GRID) - momentum_amplitude_approx(wide, K_GRID)).max() > 1e-3


def test_zero_images_equals_approx():
    p = GaussianPacket(2.0, 8.0, 0.9)
    np.testing.assert_allclose(momentum_amplitude_exact(p, K_GRID, n_terms=0), momentum_amplitude_approx(p, K_GRID), atol=1e-15)
    with pytest.raises(WavePacketError):
        momentum_amplitude_exact(p, K_GRID, n_terms=-1)


def test_validity():
    assert validity_check(GaussianPacket(0.0, 15.0, 1.6))
    v = validity_check(GaussianPacket(0.0, 5.0, 0.3))
    assert not v and len(v.reasons) == 1
    assert not validity_check(GaussianPacket(0.0, 3.0, 1.6))
    assert not validity_check(GaussianPacket(0.0, 15.0, math.pi - 0.1))


@settings(max_examples=30, deadline=None)
@given(st.floats(-30, 30), st.floats(2.0, 20.0), st.floats(-3.0, 3.0))
def test_exact_amplitude_unit_norm(mu, sigma, k0):
    p = GaussianPacket(mu, sigma, k0)
    amp = momentum_amplitude_exact(p, K_GRID)
    assert (np.abs(amp) ** 2).sum() * (2 * math.pi / K_GRID.size) == pytest.approx(1.0, abs=1e-10)
