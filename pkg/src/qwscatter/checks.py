"""Self-check suite run by ``qwscatter check``.

Each check returns a :class:`CheckResult` carrying the measured quantity, so
the report shows how close a property is to its threshold, not just a verdict.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import estimation as est
from .dynamics import scattering_run
from .lattice import LatticeSpec, build_hamiltonian, recurrence_residual, split_laplacian_potential
from .scattering import amplitude_ratios, gaussian_probs, packet_integrals, scatter_grid, scatter_point, scattering_state
from .wavepacket import GaussianPacket, momentum_amplitude_approx, momentum_amplitude_exact, validity_check

FD_STEP = 1e-5


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.measured}"


def _rng(seed=12345):
    return np.random.default_rng(seed)


def check_closed_forms(n=100):
    delta = np.linspace(-4, 4, n)
    k = np.linspace(-math.pi, math.pi, n + 1)[1:]
    d, kk = np.meshgrid(delta, k, indexing="ij")
    f = scatter_grid(d, kk)
    sum_err = np.abs(f["reflection"] + f["transmission"] - 1).max()
    dsum_err = np.abs(f["d_reflection"] + f["d_transmission"]).max()
    sym_d = np.array_equal(scatter_grid(-d, kk)["reflection"], f["reflection"])
    sym_k = np.array_equal(scatter_grid(d, -kk)["reflection"], f["reflection"])
    ok = sum_err <= 1e-15 and dsum_err <= 1e-15 and sym_d and sym_k
    return CheckResult(
        "closed forms: R+T=1, dR+dT=0, R even in delta and k",
        bool(ok),
        f"max|R+T-1|={sum_err:.2e}, max|dR+dT|={dsum_err:.2e}, sym_delta={sym_d}, sym_k={sym_k}",
    )


def check_scattering_states(n=50, seed=1):
    rng = _rng(seed)
    worst = 0.0
    sites = np.arange(-3, 4)
    for _ in range(n):
        delta = rng.uniform(-4, 4)
        k = rng.uniform(0.05, math.pi - 0.05) * rng.choice([-1, 1])
        psi = scattering_state(delta, k, sites)
        worst = max(worst, recurrence_residual(psi, 2 - 2 * math.cos(k), delta, sites))
    return CheckResult("scattering states obey the defect recurrence", worst < 1e-12, f"max residual={worst:.2e}")


def check_lattice():
    worst = 0.0
    symmetric = True
    for n, delta in [(3, 0.0), (5, -2.0), (101, 1.3)]:
        spec = LatticeSpec(n, delta)
        h = build_hamiltonian(spec).to_dense()
        lap, pot = split_laplacian_potential(spec)
        worst = max(worst, np.abs(-lap + pot - h).max())
        symmetric &= bool(np.array_equal(h, h.T))
    ev = np.linalg.eigvalsh(build_hamiltonian(LatticeSpec(201, 0.0)).to_dense())
    in_band = ev.min() > -1e-12 and ev.max() < 4 + 1e-12
    return CheckResult(
        "lattice: H=-L+V, symmetric, free spectrum in [0,4]",
        worst == 0.0 and symmetric and in_band,
        f"max|-L+V-H|={worst:.1e}, symmetric={symmetric}, spectrum=[{ev.min():.3e}, {ev.max():.6f}]",
    )


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def check_derivatives(n=100, seed=2, scatter=scatter_point):
    """Analytic delta-derivatives against central differences."""
    rng = _rng(seed)
    worst = 0.0
    h = FD_STEP
    for _ in range(n):
        delta = rng.uniform(0.3, 4) * rng.choice([-1, 1])
        k = rng.uniform(0.3, math.pi - 0.3) * rng.choice([-1, 1])
        p, plus, minus = scatter(delta, k), scatter(delta + h, k), scatter(delta - h, k)
        fd_r = (plus.reflection - minus.reflection) / (2 * h)
        fd_t = (plus.transmission - minus.transmission) / (2 * h)
        fd_p = (plus.phase_b - minus.phase_b) / (2 * h)
        worst = max(worst, _rel(p.d_reflection, fd_r), _rel(p.d_transmission, fd_t), _rel(p.d_phase_b, fd_p))
    return CheckResult("dR, dT, dphi_B match central differences", worst < 1e-6, f"max rel err={worst:.2e}")


def _tau_reference(k0, sigma, delta):
    """tau_G with scipy's QUADPACK, independent of the package integrator."""
    def f(k):
        s2 = math.sin(k) ** 2
        return sigma / math.sqrt(math.pi) * math.exp(-((k - k0) * sigma) ** 2) * 4 * s2 / (delta**2 + 4 * s2)

    pts = [p for p in (k0 - 10 / sigma, k0, k0 + 10 / sigma, 0.0) if -math.pi < p < math.pi]
    return quad(f, -math.pi, math.pi, points=sorted(pts), epsabs=1e-14, epsrel=1e-13, limit=400)[0]


def check_tau_derivative(n=100, seed=3):
    rng = _rng(seed)
    worst = 0.0
    h = FD_STEP
    for _ in range(n):
        sigma = rng.choice([10.0, 15.0, 20.0])
        k0 = rng.uniform(5 / sigma + 0.05, math.pi - 5 / sigma - 0.05)
        delta = rng.uniform(0.3, 4)
        d_tau = packet_integrals(k0, sigma, delta)["d_tau"]
        fd = (_tau_reference(k0, sigma, delta + h) - _tau_reference(k0, sigma, delta - h)) / (2 * h)
        worst = max(worst, _rel(d_tau, fd))
    return CheckResult("d tau_G/d delta matches central differences", worst < 1e-6, f"max rel err={worst:.2e}")


def check_poisson_regime():
    k = np.linspace(-math.pi, math.pi, 2001)[1:]
    narrow = GaussianPacket(0.0, 5.0, math.pi / 2)
    wide = GaussianPacket(0.0, 0.5, 0.0)
    err_narrow = np.abs(momentum_amplitude_exact(narrow, k) - momentum_amplitude_approx(narrow, k)).max()
    err_wide = np.abs(momentum_amplitude_exact(wide, k) - momentum_amplitude_approx(wide, k)).max()
    return CheckResult(
        "single-image momentum form: exact at sigma=5, fails at sigma=0.5",
        err_narrow < 1e-10 and err_wide > 1e-3,
        f"sigma=5: {err_narrow:.2e}, sigma=0.5: {err_wide:.2e}",
    )


def check_dynamics(cases=((1.6, 1.0), (0.78, 1.0), (0.44, 1.0), (1.6, 2.0), (1.6, 3.0)), sigma=15.0):
    worst = 0.0
    parts = []
    converged = True
    for k0, delta in cases:
        trace = scattering_run(k0, sigma, delta)
        meta = trace.metadata
        plateau = meta["plateau"]
        converged &= plateau.converged
        gap = abs(plateau.value - meta["tau_g"])
        worst = max(worst, gap)
        parts.append(f"({k0},{delta}):{plateau.value:.4f}")
    return CheckResult(
        "dynamics plateau of tau(t) equals tau_G",
        converged and worst < 1e-2,
        f"max|plateau-tau_G|={worst:.2e}, converged={converged}, " + " ".join(parts),
    )


def check_sigma_expansion(k0s=(math.pi / 4, math.pi / 3, math.pi / 2), deltas=(0.5, 1.0, 2.0)):
    worst_h = worst_f = math.inf
    for k0 in k0s:
        for d in deltas:
            lead = est.qfi_leading(k0, d)
            rh = [abs(est.qfi_gaussian(k0, s, d) - lead - est.g_h(k0, d) / s**2) for s in (20, 40)]
            rf = [abs(est.fi_dichotomic(k0, s, d) - lead - est.g_f(k0, d) / s**2) for s in (20, 40)]
            worst_h = min(worst_h, rh[0] / rh[1])
            worst_f = min(worst_f, rf[0] / rf[1])
    return CheckResult(
        "1/sigma^2 expansion: residual shrinks >=4x from sigma=20 to 40",
        worst_h >= 4 and worst_f >= 4,
        f"min ratio QFI={worst_h:.2f}, FI={worst_f:.2f}",
    )


def check_qsnr_optimum(sigma=20.0):
    worst_loc = 0.0
    worst_peak = 0.0
    worst_rt = 0.0
    for k0 in (math.pi / 4, math.pi / 3, math.pi / 2):
        opt = est.refine_optimal_delta(k0, sigma)
        worst_loc = max(worst_loc, abs(opt.delta / (2 * abs(math.sin(k0))) - 1))
        worst_peak = max(worst_peak, abs(opt.qsnr - 1))
        p = scatter_point(est.optimal_delta(k0), k0)
        worst_rt = max(worst_rt, abs(p.reflection - 0.5), abs(p.transmission - 0.5))
    ok = worst_loc < 0.1 and worst_peak < 0.05 and worst_rt < 1e-3
    return CheckResult(
        "QSNR optimum near 2|sin k0| with peak 1 and R=T=1/2",
        ok,
        f"max loc dev={worst_loc:.2e}, max|peak-1|={worst_peak:.2e}, max|R-1/2|={worst_rt:.1e}",
    )


def gamma_grid(sigmas=(5.0, 10.0, 20.0), deltas=None, k0s=None, valid_only=False):
    deltas = np.linspace(0.1, 4, 40) if deltas is None else deltas
    k0s = np.linspace(0.3, math.pi - 0.3, 20) if k0s is None else k0s
    out = []
    for sigma in sigmas:
        for k0 in k0s:
            if valid_only and not validity_check(GaussianPacket(0.0, sigma, float(k0))):
                continue
            for d in deltas:
                out.append((sigma, float(k0), float(d), est.estimate(float(k0), sigma, float(d)).gamma))
    return out


def check_gamma(valid_only=False):
    grid = gamma_grid(valid_only=valid_only)
    sigma, k0, d, g = min(grid, key=lambda r: r[3])
    label = "gamma = F/H > 0.95" + (" (valid packets only)" if valid_only else " on the full grid")
    return CheckResult(label, g > 0.95, f"min gamma={g:.4f} at sigma={sigma:g}, k0={k0:.3f}, delta={d:.2f} ({len(grid)} points)")


def check_fisher_hierarchy():
    worst_order = -math.inf
    worst_sym = 0.0
    worst_mu = 0.0
    for sigma in (5.0, 20.0):
        for k0 in np.linspace(0.3, math.pi - 0.3, 12):
            for d in np.linspace(0.1, 4, 12):
                r = est.estimate(k0, sigma, d)
                worst_order = max(worst_order, r.fi - r.qfi)
                worst_sym = max(worst_sym, abs(r.qfi - est.qfi_gaussian(k0, sigma, -d)))
                worst_mu = max(worst_mu, abs(est.qfi_gaussian(k0, sigma, d, mu=-50) - est.qfi_gaussian(k0, sigma, d, mu=-200)))
    ok = worst_order <= 1e-9 and worst_sym <= 1e-9 and worst_mu <= 1e-9
    return CheckResult(
        "FI <= QFI, QFI even in delta, QFI independent of mu",
        ok,
        f"max(FI-QFI)={worst_order:.2e}, max|QFI(d)-QFI(-d)|={worst_sym:.1e}, max mu drift={worst_mu:.1e}",
    )


def check_amplitude_ratios(n=50, seed=4):
    rng = _rng(seed)
    worst = 0.0
    for _ in range(n):
        delta = rng.uniform(0.1, 4) * rng.choice([-1, 1])
        k = rng.uniform(0.1, math.pi - 0.1) * rng.choice([-1, 1])
        b, c = amplitude_ratios(delta, k)
        p = scatter_point(delta, k)
        worst = max(worst, abs(abs(b) ** 2 - p.reflection), abs(abs(c) ** 2 - p.transmission), abs(c / b - 2j * math.sin(k) / delta))
    return CheckResult("|B/A|^2=R, |C/A|^2=T, C/B=2i sin k/delta", worst < 1e-12, f"max err={worst:.2e}")


def check_gaussian_limit():
    worst = 0.0
    for sigma in (10.0, 20.0, 40.0):
        rho, tau = gaussian_probs(1.2, sigma, 1.5)
        p = scatter_point(1.5, 1.2)
        worst = max(worst, abs(tau - p.transmission) * sigma**2)
    return CheckResult("tau_G -> T(delta,k0) like 1/sigma^2", worst < 5, f"max sigma^2|tau_G-T|={worst:.3f}")


CHECKS = [
    check_lattice,
    check_closed_forms,
    check_scattering_states,
    check_amplitude_ratios,
    check_derivatives,
    check_tau_derivative,
    check_poisson_regime,
    check_gaussian_limit,
    check_dynamics,
    check_sigma_expansion,
    check_qsnr_optimum,
    check_fisher_hierarchy,
    lambda: check_gamma(valid_only=False),
    lambda: check_gamma(valid_only=True),
]


def run_all(checks=None, echo=print):
    results = []
    for fn in checks or CHECKS:
        try:
            res = fn()
        except Exception as exc:  # a crashing check is a failed check
            name = getattr(fn, "__name__", "check")
            res = CheckResult(name, False, f"raised {type(exc).__name__}: {exc}")
        results.append(res)
        if echo:
            echo(res.line())
    return results
