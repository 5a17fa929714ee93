"""Tight-binding walk Hamiltonian on a truncated line with one defect site."""

import math
from dataclasses import dataclass

import numpy as np


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeSpec:
    """Open-ended chain of ``n_sites`` sites, labelled -(n-1)/2 ... (n-1)/2.

    The defect of height ``delta`` sits on the central site j = 0. The hopping
    amplitude is fixed to 1, so energies and times are in units of it.
    """

    n_sites: int
    delta: float = 0.0

    coupling = 1.0

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 1 or self.n_sites % 2 == 0:
            raise LatticeError(f"n_sites must be a positive odd integer, got {self.n_sites!r}")
        if not math.isfinite(self.delta):
            raise LatticeError(f"delta must be finite, got {self.delta!r}")

    @property
    def half_width(self) -> int:
        return (self.n_sites - 1) // 2

    @property
    def defect_index(self) -> int:
        """Array index of the site j = 0."""
        return self.half_width

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.half_width, self.half_width + 1)

    def index_of(self, j: int) -> int:
        return j + self.half_width


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    """Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray

    def to_dense(self) -> np.ndarray:
        n = self.diagonal.size
        h = np.zeros((n, n))
        h[np.arange(n), np.arange(n)] = self.diagonal
        if n > 1:
            h[np.arange(n - 1), np.arange(1, n)] = self.offdiagonal
            h[np.arange(1, n), np.arange(n - 1)] = self.offdiagonal
        return h

    def matvec(self, psi):
        psi = np.asarray(psi)
        out = self.diagonal * psi
        out[:-1] += self.offdiagonal * psi[1:]
        out[1:] += self.offdiagonal * psi[:-1]
        return out


def build_hamiltonian(spec: LatticeSpec) -> TridiagonalHamiltonian:
    diagonal = np.full(spec.n_sites, 2.0)
    diagonal[spec.defect_index] += spec.delta
    offdiagonal = np.full(spec.n_sites - 1, -spec.coupling)
    return TridiagonalHamiltonian(diagonal, offdiagonal)


def split_laplacian_potential(spec: LatticeSpec):
    """Return ``(L, V)`` as dense matrices with ``H = -L + V``.

    ``L`` is the graph Laplacian of the chain (diagonal -2, neighbours +1) and
    ``V`` is diagonal with the defect height on the central site.
    """
    n = spec.n_sites
    lap = TridiagonalHamiltonian(np.full(n, -2.0), np.full(n - 1, spec.coupling)).to_dense()
    pot = np.zeros((n, n))
    pot[spec.defect_index, spec.defect_index] = spec.delta
    return lap, pot


@dataclass(frozen=True)
class DispersionPoint:
    k: float
    energy: float
    group_velocity: float
    phase_velocity: float


def dispersion(k: float) -> DispersionPoint:
    if not (-math.pi < k <= math.pi):
        raise LatticeError(f"k={k!r} outside (-pi, pi]; fold it into the Brillouin zone first")
    energy = 2.0 - 2.0 * math.cos(k)
    phase_velocity = 0.0 if k == 0.0 else energy / k
    return DispersionPoint(k, energy, 2.0 * math.sin(k), phase_velocity)


def recurrence_residual(amplitudes, energy: float, delta: float, sites=None) -> float:
    """Largest violation of the three-term eigen-recurrence over interior sites.

    ``amplitudes[i]`` is the amplitude on site ``sites[i]``; by default the
    window is centred so that the middle entry is j = 0. The defect potential
    ``delta`` acts on j = 0 only.
    """
    psi = np.asarray(amplitudes, dtype=complex)
    if sites is None:
        if psi.size % 2 == 0:
            raise LatticeError("an even-length window needs explicit site labels")
        half = psi.size // 2
        sites = np.arange(-half, half + 1)
    sites = np.asarray(sites)
    if sites.size != psi.size or np.any(np.diff(sites) != 1):
        raise LatticeError("sites must be a contiguous ascending range matching amplitudes")
    if psi.size < 3 or not (sites[0] < 0 < sites[-1]):
        raise LatticeError("window must contain j=0 with at least one neighbour on each side")

    inner = psi[1:-1]
    potential = np.where(sites[1:-1] == 0, delta, 0.0)
    lhs = -psi[2:] + 2.0 * inner - psi[:-2] + potential * inner
    return float(np.max(np.abs(lhs - energy * inner)))
