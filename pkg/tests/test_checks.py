from dataclasses import replace

from qwscatter import checks
from qwscatter.scattering import scatter_point


def _flipped_phase(delta, k):
    p = scatter_point(delta, k)
    return replace(p, d_phase_b=-p.d_phase_b)


def test_derivative_check_passes():
    assert checks.check_derivatives().passed


def test_derivative_check_catches_sign_error():
    res = checks.check_derivatives(scatter=_flipped_phase)
    assert not res.passed
    assert "max rel err" in res.measured


def test_crashing_check_counts_as_failure():
    def boom():
        raise RuntimeError("nope")

    lines = []
    (res,) = checks.run_all([boom], echo=lines.append)
    assert not res.passed and lines[0].startswith("[FAIL]")


def test_fast_checks_pass():
    for fn in (checks.check_lattice, checks.check_closed_forms, checks.check_scattering_states,
               checks.check_amplitude_ratios, checks.check_poisson_regime, checks.check_gaussian_limit):
        assert fn().passed, fn.__name__
