"""Fisher information of the scattered packet with respect to the barrier height."""

import math
from dataclasses import dataclass

from scipy.optimize import minimize_scalar

from .scattering import QUAD_TOL, packet_integrals

OPT_BOUNDS = (0.05, 4.0)
OPT_XTOL = 1e-4


class OutOfDomainError(ValueError):
    pass


class SearchError(RuntimeError):
    pass


def qfi_gaussian(k0: float, sigma: float, delta: float, mu: float = 0.0, tol: float = QUAD_TOL) -> float:
    """Quantum Fisher information of the scattered Gaussian packet."""
    v = packet_integrals(k0, sigma, delta, mu=mu, tol=tol)
    return float(v["info"] - 4.0 * v["mean_d_phase"] ** 2)


def fi_dichotomic(k0: float, sigma: float, delta: float, mu: float = 0.0, tol: float = QUAD_TOL) -> float:
    """Fisher information of the left/right-of-barrier measurement.

    Exactly zero at delta = 0, where d tau_G / d delta vanishes by symmetry.
    """
    if delta == 0.0:
        return 0.0
    v = packet_integrals(k0, sigma, delta, mu=mu, tol=tol)
    tau = float(v["tau"])
    if not 0.0 < tau < 1.0:
        raise OutOfDomainError(f"tau_G={tau!r} at the boundary; dichotomic FI undefined")
    return float(v["d_tau"] ** 2 / (tau * (1.0 - tau)))


def qfi_leading(k0: float, delta: float) -> float:
    """Large-sigma limit of both informations, 16 sin^2 k0 / (delta^2 + 4 sin^2 k0)^2."""
    s2 = math.sin(k0) ** 2
    if s2 == 0.0:
        return 0.0
    return 16.0 * s2 / (2.0 + delta * delta - 2.0 * math.cos(2 * k0)) ** 2


def _gap(k0, delta):
    den = delta * delta + 2.0 * (1.0 - math.cos(2 * k0))
    if den == 0.0:
        raise OutOfDomainError("k0 = 0 with delta = 0: expansion coefficient undefined")
    return den


def g_h(k0: float, delta: float) -> float:
    """1/sigma^2 coefficient of the QFI expansion.

    Coefficient of cos 2k0 is (3 delta^4 - 19); ``g_h_printed`` is the variant
    with an extra factor 3 there.
    """
    d2 = delta * delta
    c2, c4, c6 = math.cos(2 * k0), math.cos(4 * k0), math.cos(6 * k0)
    num = 3 * c6 + 2 * (5 * d2 - 1) * c4 + (3 * d2 * d2 - 19) * c2 + d2 * d2 - 10 * d2 + 18
    return 4.0 * num / _gap(k0, delta) ** 4


def g_h_printed(k0: float, delta: float) -> float:
    """Variant with 3(3 delta^4 - 19) on cos 2k0, kept for comparison; equals g_h only where cos 2k0 = 0."""
    d2 = delta * delta
    c2, c4, c6 = math.cos(2 * k0), math.cos(4 * k0), math.cos(6 * k0)
    num = 3 * c6 + 2 * (5 * d2 - 1) * c4 + 3 * (3 * d2 * d2 - 19) * c2 + d2 * d2 - 10 * d2 + 18
    return 4.0 * num / _gap(k0, delta) ** 4


def g_f(k0: float, delta: float) -> float:
    """1/sigma^2 coefficient of the dichotomic FI expansion."""
    d2 = delta * delta
    c2, c4, c6 = math.cos(2 * k0), math.cos(4 * k0), math.cos(6 * k0)
    num = c6 + 6 * d2 * c4 + (d2 * d2 - 9) * c2 - 6 * d2 + 8
    return 8.0 * num / _gap(k0, delta) ** 4


def qsnr(k0: float, sigma: float, delta: float, mu: float = 0.0) -> float:
    if delta == 0.0:
        return 0.0
    return delta * delta * qfi_gaussian(k0, sigma, delta, mu=mu)


def optimal_delta(k0: float) -> float:
    """Leading-order QSNR optimum, where R = T = 1/2."""
    return math.sqrt(2.0 * (1.0 - math.cos(2 * k0)))


@dataclass(frozen=True)
class Optimum:
    delta: float
    qsnr: float
    leading_delta: float
    n_evals: int


def refine_optimal_delta(k0: float, sigma: float, bounds=OPT_BOUNDS, xtol=OPT_XTOL) -> Optimum:
    """Maximise the finite-sigma QSNR over delta in ``bounds``."""
    res = minimize_scalar(
        lambda d: -qsnr(k0, sigma, d), bounds=bounds, method="bounded", options={"xatol": xtol}
    )
    if not res.success:
        raise SearchError(f"QSNR search failed for k0={k0}, sigma={sigma}: {res.message}")
    lo, hi = bounds
    if res.x - lo < 10 * xtol or hi - res.x < 10 * xtol:
        raise SearchError(f"no interior QSNR maximum in {bounds} (search ended at {res.x:.5g})")
    return Optimum(float(res.x), float(-res.fun), optimal_delta(k0), int(res.nfev))


@dataclass(frozen=True)
class CramerRaoBound:
    info: float
    m_samples: int
    variance_bound: float


def cr_bound(info: float, m_samples: int) -> CramerRaoBound:
    if not info > 0:
        raise ValueError(f"information must be positive, got {info!r}")
    if int(m_samples) != m_samples or m_samples < 1:
        raise ValueError(f"m_samples must be a positive integer, got {m_samples!r}")
    return CramerRaoBound(float(info), int(m_samples), 1.0 / (m_samples * info))


@dataclass(frozen=True)
class EstimationReport:
    k0: float
    sigma: float
    delta: float
    qfi: float
    fi: float
    qsnr: float
    gamma: float
    qfi_leading: float
    g_h: float
    g_f: float

    @property
    def quantum_bound(self):
        return cr_bound(self.qfi, 1)

    @property
    def classical_bound(self):
        return cr_bound(self.fi, 1)


def estimate(k0: float, sigma: float, delta: float, mu: float = 0.0) -> EstimationReport:
    """QFI, dichotomic FI and derived figures of merit from one quadrature pass."""
    v = packet_integrals(k0, sigma, delta, mu=mu)
    qfi = float(v["info"] - 4.0 * v["mean_d_phase"] ** 2)
    tau = float(v["tau"])
    if delta == 0.0:
        fi = 0.0
    elif 0.0 < tau < 1.0:
        fi = float(v["d_tau"] ** 2 / (tau * (1.0 - tau)))
    else:
        raise OutOfDomainError(f"tau_G={tau!r} at the boundary; dichotomic FI undefined")
    try:
        gh, gf = g_h(k0, delta), g_f(k0, delta)
    except OutOfDomainError:
        gh = gf = math.nan
    return EstimationReport(
        k0=k0,
        sigma=sigma,
        delta=delta,
        qfi=qfi,
        fi=fi,
        qsnr=delta * delta * qfi,
        gamma=fi / qfi if qfi > 0 else math.nan,
        qfi_leading=qfi_leading(k0, delta),
        g_h=gh,
        g_f=gf,
    )
