"""Command-line experiment runner writing deterministic CSV files."""

import argparse
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from ._accel import backend_name
from .config import COMMANDS, PRESETS, ConfigError, RunConfig, load_config_file, resolve, with_preset
from .dynamics import DynamicsError, scattering_run
from .estimation import OutOfDomainError, estimate
from .lattice import LatticeError
from .quadrature import QuadratureError
from .scattering import scatter_grid
from .wavepacket import GaussianPacket, WavePacketError, validity_check

log = logging.getLogger("qwscatter")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICS, EXIT_CHECKS = 0, 1, 2, 3


def fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value) + 0.0  # drops the sign of -0.0
    if math.isnan(value):
        return "nan"
    return format(value, ".11e")


def render_csv(config: RunConfig, columns, rows, meta_lines=()):
    """CSV text with ``#`` metadata lines; LF endings, fixed float format."""
    out = io.StringIO(newline="")
    out.write(f"# qwscatter {__version__} backend={backend_name()}\n")
    out.write(f"# command: {config.command}\n")
    out.write(f"# config: {json.dumps(config.to_obj(), sort_keys=True)}\n")
    out.write("# columns: " + "; ".join(f"{name} = {desc}" for name, desc in columns) + "\n")
    for line in meta_lines:
        out.write(f"# {line}\n")
    out.write(",".join(name for name, _ in columns) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")
    return out.getvalue()


def emit(text, path):
    if not path or path == "-":
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head)
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def _map(func, items, threads):
    if threads <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


COEFF_COLUMNS = [
    ("delta", "barrier height"),
    ("k", "momentum"),
    ("R", "reflection coefficient"),
    ("T", "transmission coefficient"),
    ("phi_b", "reflected phase arctan(2 sin k/delta)"),
    ("dR", "dR/d delta"),
    ("dT", "dT/d delta"),
    ("dphi", "d phi_b/d delta"),
    ("degenerate", "1 where delta = 0 and sin k = 0"),
]


def run_coeffs(config: RunConfig):
    deltas = config.delta.points()
    ks = config.k0.points()
    d, k = np.meshgrid(deltas, ks, indexing="ij")
    f = scatter_grid(d.ravel(), k.ravel())
    rows = zip(
        d.ravel(), k.ravel(), f["reflection"], f["transmission"], f["phase_b"],
        f["d_reflection"], f["d_transmission"], f["d_phase_b"], f["degenerate"],
    )
    return render_csv(config, COEFF_COLUMNS, rows), EXIT_OK


DYNAMICS_COLUMNS = [
    ("run", "index of the (k0, delta) run described in the metadata"),
    ("t", "time in units of 1/J0"),
    ("rho", "probability on j < 0"),
    ("tau", "probability on j > 0"),
    ("delta_prob", "probability on the defect site"),
    ("boundary_mass", "probability on the outer 5 sites of each end"),
]


def run_dynamics(config: RunConfig):
    combos = [(s, k0, d) for s in config.sigma.points() for k0 in config.k0.points() for d in config.delta.points()]

    def one(combo):
        sigma, k0, delta = (float(x) for x in combo)
        return scattering_run(
            k0, sigma, delta, n_times=config.n_times, mu=config.mu, t_max=config.t_max, n_sites=config.n_sites
        )

    traces = _map(one, combos, config.threads)
    meta, rows = [], []
    for i, tr in enumerate(traces):
        m = tr.metadata
        p = m["plateau"]
        meta.append(
            f"run {i}: k0={fmt(m['k0'])} sigma={fmt(m['sigma'])} delta={fmt(m['delta'])} "
            f"mu={fmt(m['mu'])} n_sites={m['n_sites']} t_max={fmt(m['t_max'])} n_times={m['n_times']} "
            f"plateau={fmt(p.value)} plateau_converged={int(p.converged)} window=[{fmt(p.t_start)},{fmt(p.t_end)}] "
            f"tau_g={fmt(m['tau_g'])}" + (f" note={p.reason!r}" if p.reason else "")
        )
        for j in range(tr.times.size):
            rows.append((i, tr.times[j], tr.rho[j], tr.tau[j], tr.defect[j], tr.boundary_mass[j]))
    return render_csv(config, DYNAMICS_COLUMNS, rows, meta), EXIT_OK


ESTIMATE_COLUMNS = [
    ("k0", "central momentum"),
    ("sigma", "packet width"),
    ("delta", "barrier height"),
    ("qfi", "quantum Fisher information H_G"),
    ("fi", "dichotomic left/right Fisher information F_G"),
    ("qsnr", "delta^2 H_G"),
    ("gamma", "F_G/H_G"),
    ("qfi_leading", "large-sigma limit of H_G and F_G"),
    ("g_h", "1/sigma^2 coefficient of H_G"),
    ("g_f", "1/sigma^2 coefficient of F_G"),
    ("flag", "ok | invalid (packet fails validity check) | nonconverged"),
]


def _estimate_row(args):
    sigma, k0, delta = (float(x) for x in args)
    flag = "ok" if validity_check(GaussianPacket(0.0, sigma, k0)) else "invalid"
    try:
        r = estimate(k0, sigma, delta)
    except (QuadratureError, OutOfDomainError) as exc:
        log.warning("k0=%g sigma=%g delta=%g: %s", k0, sigma, delta, exc)
        return (k0, sigma, delta) + (math.nan,) * 7 + ("nonconverged",)
    return (k0, sigma, delta, r.qfi, r.fi, r.qsnr, r.gamma, r.qfi_leading, r.g_h, r.g_f, flag)


def run_estimate(config: RunConfig):
    combos = [(s, k0, d) for s in config.sigma.points() for k0 in config.k0.points() for d in config.delta.points()]
    rows = _map(_estimate_row, combos, config.threads)
    failed = sum(r[-1] == "nonconverged" for r in rows)
    code = EXIT_NUMERICS if failed else EXIT_OK
    return render_csv(config, ESTIMATE_COLUMNS, rows), code


RUNNERS = {"coeffs": run_coeffs, "dynamics": run_dynamics, "estimate": run_estimate}


def run_sweep(config: RunConfig):
    """Every figure preset, one CSV each, into the directory ``output_path``."""
    outdir = config.output_path or "sweep"
    os.makedirs(outdir, exist_ok=True)
    worst = EXIT_OK
    for name in sorted(PRESETS):
        cfg = with_preset(config, name)
        text, code = RUNNERS[cfg.command](cfg)
        emit(text, os.path.join(outdir, f"{name}.csv"))
        print(f"{name}: wrote {os.path.join(outdir, name + '.csv')}")
        worst = max(worst, code)
    return None, worst


def run_check(config: RunConfig):
    from .checks import run_all

    results = run_all()
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return None, EXIT_CHECKS if n_fail else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="qwscatter", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="YAML config file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="figure preset")
    p.add_argument("--out", dest="output_path", help="output CSV (directory for sweep); stdout if omitted")
    p.add_argument("--delta", help="MIN:MAX:N, a value, or a comma list")
    p.add_argument("--k0", help="MIN:MAX:N, a value, or a comma list (k grid for coeffs)")
    p.add_argument("--sigma", help="packet width(s)")
    p.add_argument("--mu", type=float, help="initial packet centre")
    p.add_argument("--n-sites", dest="n_sites", type=int)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--n-times", dest="n_times", type=int)
    p.add_argument("--quad-tol", dest="quad_tol", type=float)
    p.add_argument("--threads", type=int)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


_RANGE_FLAGS = ("--delta", "--k0", "--sigma", "--mu")


def _attach_values(argv):
    """Rewrite ``--delta -4:4:80`` as ``--delta=-4:4:80`` so argparse keeps negative ranges."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _RANGE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = {
        k: getattr(args, k)
        for k in ("delta", "k0", "sigma", "mu", "n_sites", "t_max", "n_times", "output_path", "quad_tol", "threads")
    }
    try:
        file_values = load_config_file(args.config) if args.config else {}
        config = resolve(args.command, args.preset, file_values, overrides)
        if config.command == "sweep":
            _, code = run_sweep(config)
        elif config.command == "check":
            _, code = run_check(config)
        else:
            text, code = RUNNERS[config.command](config)
            emit(text, config.output_path)
    except (QuadratureError, DynamicsError, OutOfDomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except (ConfigError, LatticeError, WavePacketError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return code


if __name__ == "__main__":
    sys.exit(main())
