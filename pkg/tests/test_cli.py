import io
import math

import pandas as pd
import pytest

from qwscatter import cli
from qwscatter.config import ConfigError, Range, resolve


def _read(path):
    return pd.read_csv(path, comment="#")


def test_range_parsing():
    assert Range.parse("0:1:3").points().tolist() == [0.0, 0.5, 1.0]
    assert Range.parse("2").points().tolist() == [2.0]
    assert Range.parse("1,2,5").points().tolist() == [1.0, 2.0, 5.0]
    with pytest.raises(ConfigError):
        Range.parse("a:b")
    with pytest.raises(ConfigError):
        Range(0.0, 1.0, 0)


def test_resolve_precedence(tmp_path):
    cfg = resolve("estimate", "fig4", {"sigma": [7.0]}, {"sigma": "9"})
    assert cfg.sigma.points().tolist() == [9.0]
    assert cfg.k0.points().size == 3
    with pytest.raises(ConfigError):
        resolve("dynamics", "fig4")
    with pytest.raises(ConfigError):
        resolve("estimate", "nope")


def test_coeffs_csv(tmp_path):
    out = tmp_path / "c.csv"
    assert cli.main(["coeffs", "--delta", "-1,1", "--k0", "0.5:1.5:3", "--out", str(out)]) == 0
    df = _read(out)
    assert len(df) == 6
    assert (df["R"] + df["T"] - 1).abs().max() < 1e-10
    assert out.read_text().startswith("# qwscatter")


def test_yaml_config(tmp_path):
    conf = tmp_path / "run.yaml"
    conf.write_text(
        "ranges:\n  delta: {min: 0.5, max: 1.5, count: 2}\n  k0: [1.0]\n  sigma: 15\n"
        f"output: {tmp_path / 'e.csv'}\n"
    )
    assert cli.main(["estimate", "--config", str(conf)]) == 0
    df = _read(tmp_path / "e.csv")
    assert df.delta.tolist() == [0.5, 1.5]
    assert (df.flag == "ok").all()
    assert (df.fi <= df.qfi + 1e-9).all()


def test_unknown_key_exit_validation(tmp_path, capsys):
    conf = tmp_path / "bad.yaml"
    conf.write_text("bogus: 1\n")
    assert cli.main(["estimate", "--config", str(conf)]) == cli.EXIT_VALIDATION
    assert "unknown config keys" in capsys.readouterr().err


def test_bad_geometry_exit_validation(capsys):
    assert cli.main(["dynamics", "--k0", "1.6", "--delta", "1", "--sigma", "15", "--n-sites", "101"]) == cli.EXIT_VALIDATION


def test_singular_point_flags_nonconverged(tmp_path):
    out = tmp_path / "e.csv"
    code = cli.main(["estimate", "--k0", "0.3", "--sigma", "5", "--delta", "0", "--out", str(out)])
    assert code == cli.EXIT_NUMERICS
    assert _read(out).flag.tolist() == ["nonconverged"]


def test_dynamics_csv(tmp_path):
    out = tmp_path / "d.csv"
    assert cli.main(["dynamics", "--k0", "1.6", "--delta", "1", "--sigma", "15", "--n-times", "101", "--out", str(out)]) == 0
    text = out.read_text()
    assert "plateau_converged=1" in text
    df = _read(out)
    assert (df.rho + df.tau + df.delta_prob - 1).abs().max() < 1e-10


def test_estimate_deterministic_across_threads(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["estimate", "--preset", "fig4", "--sigma", "20", "--delta", "0.5:3:6"]
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--threads", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_stdout(capsys):
    assert cli.main(["coeffs", "--delta", "1", "--k0", "1"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1].startswith("1.00000000000e+00,1.00000000000e+00,")


def test_fmt():
    assert cli.fmt(math.nan) == "nan"
    assert cli.fmt(3) == "3"
    assert cli.fmt(True) == "1"
    assert cli.fmt(0.5) == "5.00000000000e-01"
