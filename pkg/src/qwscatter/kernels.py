"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

The public ``scatter_fields`` and ``packet_integrands`` are bound to the numba
versions unless numba is unavailable or ``QWSCATTER_DISABLE_NUMBA`` is set;
``region_probabilities`` always uses the GEMM variant, which is faster. Both variants are always
importable under ``*_numpy`` / ``*_numba`` so tests and the benchmark can
compare them directly.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit, prange

# rows of the array returned by packet_integrands
WEIGHT, REFL, TRANS, D_TRANS, D_PHASE, INFO = range(6)
N_INTEGRANDS = 6

# rows of the array returned by region_probabilities
RHO, TAU, DEFECT, BOUNDARY = range(4)


# ---------------------------------------------------------------------------
# closed-form single-momentum scattering data on a grid
# ---------------------------------------------------------------------------


def scatter_fields_numpy(delta, k):
    """Elementwise R, T, phi_B, dR, dT, dphi_B and a degeneracy mask."""
    delta, k = np.broadcast_arrays(np.asarray(delta, dtype=float), np.asarray(k, dtype=float))
    s = np.sin(k)
    s2 = s * s
    d2 = delta * delta
    den = d2 + 4.0 * s2
    degenerate = den == 0.0
    safe = np.where(degenerate, 1.0, den)

    refl = np.where(degenerate, 0.0, d2 / safe)
    trans = np.where(degenerate, 1.0, 4.0 * s2 / safe)
    d_refl = np.where(degenerate, 0.0, 8.0 * delta * s2 / (safe * safe))
    d_trans = -d_refl
    d_phase = np.where(degenerate, 0.0, -2.0 * s / safe)
    with np.errstate(divide="ignore", invalid="ignore"):
        phase = np.where(
            delta == 0.0,
            np.where(s < 0.0, -0.5 * np.pi, 0.5 * np.pi),
            np.arctan(2.0 * s / np.where(delta == 0.0, 1.0, delta)),
        )
    return refl, trans, phase, d_refl, d_trans, d_phase, degenerate


@njit(cache=True)
def _scatter_fields_flat(delta, k, out, degenerate):
    half_pi = 0.5 * math.pi
    for i in range(k.shape[0]):
        s = math.sin(k[i])
        d = delta[i]
        s2 = s * s
        den = d * d + 4.0 * s2
        if den == 0.0:
            out[0, i] = 0.0
            out[1, i] = 1.0
            out[2, i] = half_pi
            out[3, i] = 0.0
            out[4, i] = 0.0
            out[5, i] = 0.0
            degenerate[i] = True
            continue
        out[0, i] = d * d / den
        out[1, i] = 4.0 * s2 / den
        if d == 0.0:
            out[2, i] = -half_pi if s < 0.0 else half_pi
        else:
            out[2, i] = math.atan(2.0 * s / d)
        dr = 8.0 * d * s2 / (den * den)
        out[3, i] = dr
        out[4, i] = -dr
        out[5, i] = -2.0 * s / den
        degenerate[i] = False


def scatter_fields_numba(delta, k):
    delta, k = np.broadcast_arrays(np.asarray(delta, dtype=float), np.asarray(k, dtype=float))
    shape = k.shape
    flat_d = np.ascontiguousarray(delta).ravel()
    flat_k = np.ascontiguousarray(k).ravel()
    out = np.empty((6, flat_k.size))
    degenerate = np.empty(flat_k.size, dtype=np.bool_)
    _scatter_fields_flat(flat_d, flat_k, out, degenerate)
    rows = [out[i].reshape(shape) for i in range(6)]
    return (*rows, degenerate.reshape(shape))


# ---------------------------------------------------------------------------
# integrands for the wave-packet averages
# ---------------------------------------------------------------------------
#
# INFO is the first integral of the quantum Fisher information,
#   (dR)^2/R + (dT)^2/T + 4 (dphi)^2 = 16 s^2/D^2 + 16 s^2/D^2,
# with s = sin k and D = delta^2 + 4 s^2. The reduced form has no 0/0 at
# delta = 0.


def packet_integrands_numpy(k, weight, delta):
    k = np.asarray(k, dtype=float)
    s = np.sin(k)
    s2 = s * s
    den = delta * delta + 4.0 * s2
    degenerate = den == 0.0
    safe = np.where(degenerate, 1.0, den)
    out = np.empty((N_INTEGRANDS, k.size))
    out[WEIGHT] = weight
    out[REFL] = np.where(degenerate, 0.0, weight * (delta * delta) / safe)
    out[TRANS] = np.where(degenerate, weight, weight * 4.0 * s2 / safe)
    out[D_TRANS] = np.where(degenerate, 0.0, -weight * 8.0 * delta * s2 / (safe * safe))
    out[D_PHASE] = np.where(degenerate, 0.0, -weight * 2.0 * s / safe)
    out[INFO] = np.where(degenerate, 0.0, weight * 32.0 * s2 / (safe * safe))
    return out


@njit(cache=True)
def _packet_integrands_loop(k, weight, delta, out):
    d2 = delta * delta
    for i in range(k.shape[0]):
        s = math.sin(k[i])
        s2 = s * s
        den = d2 + 4.0 * s2
        w = weight[i]
        out[0, i] = w
        if den == 0.0:
            out[1, i] = 0.0
            out[2, i] = w
            out[3, i] = 0.0
            out[4, i] = 0.0
            out[5, i] = 0.0
            continue
        inv = 1.0 / den
        out[1, i] = w * d2 * inv
        out[2, i] = w * 4.0 * s2 * inv
        out[3, i] = -w * 8.0 * delta * s2 * inv * inv
        out[4, i] = -w * 2.0 * s * inv
        out[5, i] = w * 32.0 * s2 * inv * inv


def packet_integrands_numba(k, weight, delta):
    k = np.ascontiguousarray(k, dtype=float)
    weight = np.ascontiguousarray(weight, dtype=float)
    out = np.empty((N_INTEGRANDS, k.size))
    _packet_integrands_loop(k, weight, float(delta), out)
    return out


# ---------------------------------------------------------------------------
# region probabilities of e^{-iHt} psi0 from an eigendecomposition
# ---------------------------------------------------------------------------


def region_probabilities_numpy(vectors, coeffs, energies, times, center, n_edge, chunk=64):
    """rho, tau, defect and edge mass for every time, via blocked GEMMs."""
    times = np.asarray(times, dtype=float)
    out = np.empty((4, times.size))
    n = vectors.shape[0]
    vc = vectors.astype(complex)
    for start in range(0, times.size, chunk):
        t = times[start:start + chunk]
        phases = np.exp(-1j * np.outer(energies, t)) * coeffs[:, None]
        prob = np.abs(vc @ phases) ** 2
        out[RHO, start:start + chunk] = prob[:center].sum(axis=0)
        out[TAU, start:start + chunk] = prob[center + 1:].sum(axis=0)
        out[DEFECT, start:start + chunk] = prob[center]
        out[BOUNDARY, start:start + chunk] = prob[:n_edge].sum(axis=0) + prob[n - n_edge:].sum(axis=0)
    return out


@njit(cache=True, parallel=True)
def _region_probabilities_loop(vectors, coeffs_re, coeffs_im, energies, times, center, n_edge, out):
    n = vectors.shape[0]
    for it in prange(times.shape[0]):
        t = times[it]
        a_re = np.empty(n)
        a_im = np.empty(n)
        for m in range(n):
            c = math.cos(energies[m] * t)
            s = math.sin(energies[m] * t)
            # (x + iy)(c - is)
            a_re[m] = coeffs_re[m] * c + coeffs_im[m] * s
            a_im[m] = coeffs_im[m] * c - coeffs_re[m] * s
        rho = 0.0
        tau = 0.0
        defect = 0.0
        edge = 0.0
        for j in range(n):
            re = 0.0
            im = 0.0
            for m in range(n):
                v = vectors[j, m]
                re += v * a_re[m]
                im += v * a_im[m]
            p = re * re + im * im
            if j < center:
                rho += p
            elif j > center:
                tau += p
            else:
                defect += p
            if j < n_edge or j >= n - n_edge:
                edge += p
        out[0, it] = rho
        out[1, it] = tau
        out[2, it] = defect
        out[3, it] = edge


def region_probabilities_numba(vectors, coeffs, energies, times, center, n_edge):
    times = np.ascontiguousarray(times, dtype=float)
    out = np.empty((4, times.size))
    coeffs = np.asarray(coeffs, dtype=complex)
    _region_probabilities_loop(
        np.ascontiguousarray(vectors, dtype=float),
        np.ascontiguousarray(coeffs.real),
        np.ascontiguousarray(coeffs.imag),
        np.ascontiguousarray(energies, dtype=float),
        times,
        int(center),
        int(n_edge),
        out,
    )
    return out


# BLAS GEMM beats the compiled loop for region_probabilities on every size
# benchmarked (benchmarks/bench_kernels.py), so it stays the default either way
region_probabilities = region_probabilities_numpy
if USE_NUMBA:
    scatter_fields = scatter_fields_numba
    packet_integrands = packet_integrands_numba
else:
    scatter_fields = scatter_fields_numpy
    packet_integrands = packet_integrands_numpy
