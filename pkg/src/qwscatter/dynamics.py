"""Exact time evolution on the truncated chain and region probabilities."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from . import kernels
from .lattice import LatticeSpec, build_hamiltonian
from .scattering import gaussian_probs
from .wavepacket import GaussianPacket, embed, sample_position

EDGE_SITES = 5
BOUNDARY_TOL = 1e-6
NORM_TOL = 1e-10

PLATEAU_DEFECT_TOL = 1e-4
PLATEAU_SLOPE_TOL = 1e-5
PLATEAU_TAIL = 0.1


class DynamicsError(RuntimeError):
    pass


class TruncationError(DynamicsError):
    def __init__(self, time, mass):
        super().__init__(f"boundary mass {mass:.3e} exceeds {BOUNDARY_TOL:g} at t={time:g}")
        self.time = time
        self.mass = mass


@dataclass
class DynamicsTrace:
    times: np.ndarray
    rho: np.ndarray
    tau: np.ndarray
    defect: np.ndarray
    boundary_mass: np.ndarray
    final_state: np.ndarray = field(default=None, repr=False)
    metadata: dict = field(default_factory=dict)

    @property
    def norm(self):
        return self.rho + self.tau + self.defect


class Propagator:
    """e^{-iHt} from one eigendecomposition of the tridiagonal Hamiltonian."""

    def __init__(self, spec: LatticeSpec):
        self.spec = spec
        ham = build_hamiltonian(spec)
        try:
            self.energies, self.vectors = eigh_tridiagonal(ham.diagonal, ham.offdiagonal)
        except LinAlgError as exc:
            raise DynamicsError(f"eigensolver failed for n_sites={spec.n_sites}") from exc

    def coefficients(self, psi0):
        return self.vectors.T @ np.asarray(psi0, dtype=complex)

    def state(self, psi0, t: float):
        c = self.coefficients(psi0)
        return self.vectors @ (np.exp(-1j * self.energies * t) * c)


def evolve(spec: LatticeSpec, initial, times, check_boundary=True) -> DynamicsTrace:
    """Evolve ``initial`` (one amplitude per lattice site) to every time in ``times``."""
    psi0 = np.asarray(initial, dtype=complex)
    if psi0.shape != (spec.n_sites,):
        raise ValueError(f"initial state has shape {psi0.shape}, lattice has {spec.n_sites} sites")
    norm0 = np.linalg.norm(psi0)
    if abs(norm0 - 1.0) > NORM_TOL:
        raise ValueError(f"initial state not normalised (norm {norm0!r})")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) < 0):
        raise ValueError("times must be a 1-D ascending sequence")

    prop = Propagator(spec)
    coeffs = prop.coefficients(psi0)
    probs = kernels.region_probabilities(
        prop.vectors, coeffs, prop.energies, times, spec.defect_index, EDGE_SITES
    )
    trace = DynamicsTrace(
        times,
        probs[kernels.RHO],
        probs[kernels.TAU],
        probs[kernels.DEFECT],
        probs[kernels.BOUNDARY],
        final_state=prop.state(psi0, times[-1]) if times.size else psi0,
    )

    drift = np.abs(trace.norm - 1.0)
    if drift.size and drift.max() > NORM_TOL:
        i = int(np.argmax(drift > NORM_TOL))
        raise DynamicsError(f"norm drift {drift[i]:.3e} at t={times[i]:g}")
    if check_boundary:
        bad = np.flatnonzero(trace.boundary_mass > BOUNDARY_TOL)
        if bad.size:
            raise TruncationError(float(times[bad[0]]), float(trace.boundary_mass[bad[0]]))
    return trace


@dataclass(frozen=True)
class Plateau:
    converged: bool
    value: float
    t_start: float
    t_end: float
    slope: float
    max_defect: float
    reason: str = ""


def plateau_value(trace: DynamicsTrace, tail=PLATEAU_TAIL, defect_tol=PLATEAU_DEFECT_TOL, slope_tol=PLATEAU_SLOPE_TOL):
    """Mean of tau over the final ``tail`` fraction of the trace, if it has settled.

    Settled means the defect probability stays below ``defect_tol`` and the
    least-squares slope of tau over the window is below ``slope_tol``.
    """
    t = trace.times
    if t.size < 3:
        return Plateau(False, math.nan, math.nan, math.nan, math.nan, math.nan, "trace too short")
    t_start = t[-1] - tail * (t[-1] - t[0])
    sel = t >= t_start
    if sel.sum() < 3:
        sel[-3:] = True
    tw, tau = t[sel], trace.tau[sel]
    slope = float(np.polyfit(tw, tau, 1)[0]) if tw[-1] > tw[0] else 0.0
    max_defect = float(trace.defect[sel].max())
    reasons = []
    if max_defect >= defect_tol:
        reasons.append(f"defect {max_defect:.2e} >= {defect_tol:g}")
    if abs(slope) >= slope_tol:
        reasons.append(f"slope {slope:.2e} >= {slope_tol:g}")
    return Plateau(
        not reasons, float(tau.mean()), float(tw[0]), float(tw[-1]), slope, max_defect, "; ".join(reasons)
    )


@dataclass(frozen=True)
class Geometry:
    mu: float
    t_max: float
    n_sites: int


def required_sites(mu: float, sigma: float, t_max: float) -> int:
    n = 2 * math.ceil(abs(mu) + 2 * t_max + 8 * sigma) + 1
    return n


def default_geometry(k0: float, sigma: float, mu=None, t_max=None, n_sites=None) -> Geometry:
    """Packet left of the barrier, run until it has crossed it once over."""
    if mu is None:
        mu = -max(5 * sigma, 50.0)
    if t_max is None:
        v = abs(2 * math.sin(k0))
        if v == 0:
            raise ValueError("k0 has zero group velocity; give t_max explicitly")
        t_max = 2 * abs(mu) / v
    needed = required_sites(mu, sigma, t_max)
    if n_sites is None:
        n_sites = needed
    elif n_sites < needed:
        raise ValueError(f"n_sites={n_sites} below the sizing rule minimum {needed}")
    return Geometry(float(mu), float(t_max), int(n_sites))


def scattering_run(k0: float, sigma: float, delta: float, n_times=401, mu=None, t_max=None, n_sites=None):
    """Evolve a Gaussian packet through the barrier and compare with tau_G.

    Returns the trace; its ``metadata`` records the geometry, the plateau and
    the quadrature reference.
    """
    geo = default_geometry(k0, sigma, mu, t_max, n_sites)
    spec = LatticeSpec(geo.n_sites, delta)
    packet = GaussianPacket(geo.mu, sigma, k0)
    sites, amps = sample_position(packet)
    psi0 = embed(sites, amps, spec.n_sites)
    times = np.linspace(0.0, geo.t_max, n_times) if n_times > 1 else np.array([0.0])
    trace = evolve(spec, psi0, times)
    plateau = plateau_value(trace)
    _, tau_g = gaussian_probs(k0, sigma, delta)
    trace.metadata.update(
        k0=k0, sigma=sigma, delta=delta, mu=geo.mu, t_max=geo.t_max, n_sites=geo.n_sites,
        n_times=int(times.size), plateau=plateau, tau_g=tau_g,
    )
    return trace
