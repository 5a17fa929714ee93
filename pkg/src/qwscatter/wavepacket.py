"""Discretised Gaussian wave packets and their momentum-space amplitudes."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

# Packets closer than OVERLAP_SIGMAS/sigma to k = 0 or k = pi split into
# reflected and transmitted parts that overlap in momentum space.
OVERLAP_SIGMAS = 5.0
MIN_SIGMA = 5.0
WINDOW_SIGMAS = 8.0
TAIL_TOL = 1e-12


class WavePacketError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianPacket:
    """Lattice Gaussian exp(-(j - mu)^2 / (2 sigma^2)) exp(i k0 j).

    ``norm_const`` is the exact lattice normalisation; it agrees with
    ``(sqrt(pi) sigma)**-0.5`` up to terms of order exp(-pi^2 sigma^2).
    """

    mu: float
    sigma: float
    k0: float
    norm_const: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.sigma > 0:
            raise WavePacketError(f"sigma must be positive, got {self.sigma!r}")
        if not (-math.pi < self.k0 <= math.pi):
            raise WavePacketError(f"k0={self.k0!r} outside (-pi, pi]")
        # image sum of the squared envelope, converged to double precision
        half = math.ceil(WINDOW_SIGMAS * self.sigma) + 2
        j = np.arange(math.floor(self.mu) - half, math.ceil(self.mu) + half + 1)
        total = np.sum(np.exp(-((j - self.mu) ** 2) / self.sigma**2))
        object.__setattr__(self, "norm_const", float(1.0 / math.sqrt(total)))

    def default_window(self):
        half = math.ceil(WINDOW_SIGMAS * self.sigma)
        return math.floor(self.mu) - half, math.ceil(self.mu) + half


def tail_mass(packet: GaussianPacket, window) -> float:
    """Approximate probability of the packet outside ``[lo, hi]``."""
    lo, hi = window
    left = max(packet.mu - lo, 0.0)
    right = max(hi - packet.mu, 0.0)
    return 0.5 * float(erfc(left / packet.sigma) + erfc(right / packet.sigma))


def sample_position(packet: GaussianPacket, window=None):
    """Site labels and unit-norm amplitudes of the packet over ``window``.

    ``window`` is an inclusive ``(lo, hi)`` pair of site labels and defaults to
    mu +- ceil(8 sigma).
    """
    if window is None:
        window = packet.default_window()
    lo, hi = int(window[0]), int(window[1])
    if hi < lo:
        raise WavePacketError(f"empty window {window!r}")
    tail = tail_mass(packet, (lo, hi))
    if tail > TAIL_TOL:
        raise WavePacketError(f"window {window!r} too narrow: tail mass {tail:.2e} > {TAIL_TOL:g}")
    j = np.arange(lo, hi + 1)
    psi = np.exp(-((j - packet.mu) ** 2) / (2 * packet.sigma**2)) * np.exp(1j * packet.k0 * j)
    psi /= np.linalg.norm(psi)
    return j, psi


def embed(sites, amplitudes, n_sites: int):
    """Place amplitudes given on ``sites`` into a centred lattice of ``n_sites``."""
    half = (n_sites - 1) // 2
    sites = np.asarray(sites)
    if sites[0] < -half or sites[-1] > half:
        raise WavePacketError(f"sites {sites[0]}..{sites[-1]} exceed lattice -{half}..{half}")
    psi = np.zeros(n_sites, dtype=complex)
    psi[sites + half] = amplitudes
    return psi


def momentum_amplitude_approx(packet: GaussianPacket, k):
    """Single-image Gaussian approximation of the momentum amplitude."""
    k = np.asarray(k, dtype=float)
    amp = math.sqrt(packet.sigma / math.sqrt(math.pi))
    return amp * np.exp(-((k - packet.k0) ** 2) * packet.sigma**2 / 2) * np.exp(-1j * packet.mu * k)


def momentum_weight(packet: GaussianPacket, k):
    """|g(k)|^2 of the approximate momentum amplitude."""
    return np.abs(momentum_amplitude_approx(packet, k)) ** 2


def momentum_amplitude_exact(packet: GaussianPacket, k, n_terms: int = 3):
    """Poisson-summed momentum amplitude keeping images n = -n_terms..n_terms.

    Uses the exact lattice normalisation and drops the constant phase
    exp(i mu k0), so ``n_terms=0`` reproduces the approximate form whenever the
    normalisation does.
    """
    if n_terms < 0:
        raise WavePacketError("n_terms must be non-negative")
    k = np.asarray(k, dtype=float)
    sigma, mu, k0 = packet.sigma, packet.mu, packet.k0
    total = np.zeros(k.shape, dtype=complex)
    for n in range(-n_terms, n_terms + 1):
        shifted = 2 * math.pi * n + k
        total = total + np.exp(-((shifted - k0) ** 2) * sigma**2 / 2) * np.exp(-1j * mu * shifted)
    return packet.norm_const * sigma * total


def dtft(sites, amplitudes, k):
    """Direct sum (2 pi)^{-1/2} sum_j psi_j exp(-i k j) on the given sites."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    sites = np.asarray(sites, dtype=float)
    return np.exp(-1j * np.outer(k, sites)) @ np.asarray(amplitudes, dtype=complex) / math.sqrt(2 * math.pi)


@dataclass(frozen=True)
class Validity:
    ok: bool
    reasons: tuple = ()

    def __bool__(self):
        return self.ok


def validity_check(packet: GaussianPacket) -> Validity:
    reasons = []
    gap = min(abs(packet.k0), math.pi - abs(packet.k0))
    if gap < OVERLAP_SIGMAS / packet.sigma:
        reasons.append(
            f"k0={packet.k0:.4g} is within {OVERLAP_SIGMAS:g}/sigma of 0 or pi: "
            "reflected and transmitted packets overlap in k"
        )
    if packet.sigma < MIN_SIGMA:
        reasons.append(f"sigma={packet.sigma:g} < {MIN_SIGMA:g}: single-image momentum form degrades")
    return Validity(not reasons, tuple(reasons))
