"""Time the numba and pure-numpy variants of each hot kernel on identical inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import math
import time

import numpy as np

from qwscatter import kernels
from qwscatter._accel import HAS_NUMBA
from qwscatter.dynamics import Propagator
from qwscatter.lattice import LatticeSpec
from qwscatter.wavepacket import GaussianPacket, embed, momentum_weight, sample_position


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    rng = np.random.default_rng(0)
    d = rng.uniform(-4, 4, 1_000_000)
    k = rng.uniform(-math.pi, math.pi, 1_000_000)
    yield "scatter_fields (1e6 points)", (d, k), kernels.scatter_fields_numpy, kernels.scatter_fields_numba

    kk = np.linspace(-math.pi, math.pi, 200_001)[1:]
    w = momentum_weight(GaussianPacket(0.0, 15.0, 1.0), kk)
    yield "packet_integrands (2e5 nodes)", (kk, w, 1.3), kernels.packet_integrands_numpy, kernels.packet_integrands_numba

    spec = LatticeSpec(801, 1.0)
    prop = Propagator(spec)
    sites, amps = sample_position(GaussianPacket(-75.0, 15.0, 1.6))
    c = prop.coefficients(embed(sites, amps, spec.n_sites))
    t = np.linspace(0, 80, 401)
    args = (prop.vectors, c, prop.energies, t, spec.defect_index, 5)
    yield "region_probabilities (N=801, 401 times)", args, kernels.region_probabilities_numpy, kernels.region_probabilities_numba


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<42}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}{'max |diff|':>12}")
    for name, inputs, f_np, f_nb in cases():
        f_nb(*inputs)  # compile
        t_np, a = best_of(lambda: f_np(*inputs), args.repeat)
        t_nb, b = best_of(lambda: f_nb(*inputs), args.repeat)
        diff = max(float(np.max(np.abs(np.asarray(x, float) - np.asarray(y, float)))) for x, y in zip(a, b))
        print(f"{name:<42}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>9.2f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
