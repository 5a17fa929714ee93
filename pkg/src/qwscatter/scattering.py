"""Scattering of momentum states and Gaussian packets off the single-site defect."""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .quadrature import integrate
from .wavepacket import GaussianPacket, WavePacketError, momentum_amplitude_approx, momentum_weight, validity_check

QUAD_TOL = 1e-10
PEAK_SPLIT = 10.0


@dataclass(frozen=True)
class ScatterData:
    delta: float
    k: float
    reflection: float
    transmission: float
    phase_b: float
    d_reflection: float
    d_transmission: float
    d_phase_b: float
    degenerate: bool = False


def scatter_point(delta: float, k: float) -> ScatterData:
    """Closed-form R, T, phi_B and their delta-derivatives at one momentum.

    At delta = 0 with sin k = 0 the direction is undefined; the
    full-transmission limit is returned with ``degenerate=True``.
    """
    fields = kernels.scatter_fields_numpy(delta, k)
    values = [float(f) for f in fields[:6]]
    return ScatterData(float(delta), float(k), *values, degenerate=bool(fields[6]))


def scatter_grid(delta, k):
    """Vectorised closed forms; returns a dict of arrays broadcast over inputs."""
    refl, trans, phase, d_refl, d_trans, d_phase, degenerate = kernels.scatter_fields(delta, k)
    return {
        "reflection": refl,
        "transmission": trans,
        "phase_b": phase,
        "d_reflection": d_refl,
        "d_transmission": d_trans,
        "d_phase_b": d_phase,
        "degenerate": degenerate,
    }


def amplitude_ratios(delta: float, k: float):
    """B/A and C/A of the stationary state matching at the defect.

    For delta = 0 the free limit (0, 1) is returned.
    """
    s = math.sin(k)
    if delta == 0.0:
        if s == 0.0:
            raise ValueError("delta = 0 with sin k = 0 has no scattering direction")
        return 0j, 1 + 0j
    if s == 0.0:
        # band edge: total reflection with a node at the defect
        return -1 + 0j, 0j
    x = 2j * s / delta
    return 1.0 / (x - 1.0), 1.0 / (1.0 - 1.0 / x)


def scattering_state(delta: float, k: float, sites):
    """Amplitudes A e^{ikj} + B e^{-ikj} (j <= 0), C e^{ikj} (j >= 0), with A = 1."""
    b, c = amplitude_ratios(delta, k)
    j = np.asarray(sites)
    left = np.exp(1j * k * j) + b * np.exp(-1j * k * j)
    right = c * np.exp(1j * k * j)
    return np.where(j <= 0, left, right)


def breakpoints(k0: float, sigma: float):
    """Partition of (-pi, pi] that isolates the Gaussian peak and sin k = 0."""
    pts = [-math.pi, math.pi, 0.0, k0]
    for edge in (k0 - PEAK_SPLIT / sigma, k0 + PEAK_SPLIT / sigma):
        if -math.pi < edge < math.pi:
            pts.append(edge)
    return sorted(set(pts))


def packet_integrals(k0: float, sigma: float, delta: float, mu: float = 0.0, tol: float = QUAD_TOL):
    """All momentum-space averages over |g(k)|^2 needed for one packet.

    Returns a dict with the weight norm, rho_G, tau_G, d tau_G/d delta, the
    mean of d phi_B/d delta, and the first QFI integral.
    """
    packet = GaussianPacket(mu, sigma, k0)

    def integrand(k):
        return kernels.packet_integrands(k, momentum_weight(packet, k), delta)

    res = integrate(integrand, breakpoints(k0, sigma), epsabs=tol)
    v = res.value
    return {
        "norm": v[kernels.WEIGHT],
        "rho": v[kernels.REFL],
        "tau": v[kernels.TRANS],
        "d_tau": v[kernels.D_TRANS],
        "mean_d_phase": v[kernels.D_PHASE],
        "info": v[kernels.INFO],
        "error": float(res.error.max()),
        "n_intervals": res.n_intervals,
    }


def gaussian_probs(k0: float, sigma: float, delta: float, tol: float = QUAD_TOL):
    """Asymptotic reflection and transmission probabilities (rho_G, tau_G)."""
    v = packet_integrals(k0, sigma, delta, tol=tol)
    return float(v["rho"]), float(v["tau"])


@dataclass(frozen=True)
class ScatteredPacket:
    """Momentum amplitudes of the asymptotic scattered state.

    The reflected branch lives around -k0 and the transmitted one around k0;
    both are evaluated lazily on any momentum grid.
    """

    source: GaussianPacket
    delta: float

    def _mirror(self):
        return GaussianPacket(self.source.mu, self.source.sigma, -self.source.k0 if self.source.k0 != math.pi else math.pi)

    def reflected_amplitude(self, k):
        k = np.asarray(k, dtype=float)
        f = scatter_grid(self.delta, k)
        env = np.abs(momentum_amplitude_approx(self._mirror(), k))
        return np.sqrt(f["reflection"]) * env * np.exp(-1j * f["phase_b"]) * np.exp(1j * self.source.mu * k)

    def transmitted_amplitude(self, k):
        k = np.asarray(k, dtype=float)
        f = scatter_grid(self.delta, k)
        g = momentum_amplitude_approx(self.source, k)
        return 1j * np.sqrt(f["transmission"]) * g * np.exp(1j * f["phase_b"])

    def masses(self, tol: float = QUAD_TOL):
        """(reflected, transmitted) probability by quadrature of |amplitude|^2."""
        k0, sigma = self.source.k0, self.source.sigma

        def integrand(k):
            return np.stack([np.abs(self.reflected_amplitude(k)) ** 2, np.abs(self.transmitted_amplitude(k)) ** 2])

        pts = sorted(set(breakpoints(k0, sigma)) | set(breakpoints(-k0, sigma)))
        res = integrate(integrand, pts, epsabs=tol)
        return float(res.value[0]), float(res.value[1])


def scatter_packet(packet: GaussianPacket, delta: float) -> ScatteredPacket:
    check = validity_check(packet)
    if not check:
        raise WavePacketError("; ".join(check.reasons))
    return ScatteredPacket(packet, float(delta))
