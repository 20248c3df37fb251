import json

import numpy as np
import pytest

from muntz import __version__
from muntz.cli import main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


def test_coeffs_reference(capsys):
    code, out, _ = run(capsys, "coeffs", "--lambdas", "1,2", "--n", "2")
    assert code == 0
    assert out.startswith(f"# muntz {__version__}\n# config: ")
    values = {tuple(r.split(",")[:2]): float(r.split(",")[3]) for r in rows(out)[1:]}
    assert values[("a", "1")] == pytest.approx(-12) and values[("a", "2")] == pytest.approx(20)
    assert values[("system_residual", "")] < 1e-12


def test_coeffs_hyperharmonic_note(capsys):
    code, out, _ = run(capsys, "coeffs", "--family", "hyperharmonic", "--r", "1", "--n", "2",
                       "--out", "json")
    doc = json.loads(out)
    assert code == 0 and doc["notes"]
    a = [r["value"] for r in doc["rows"] if r["quantity"] == "a"]
    np.testing.assert_allclose(a, [3, -1.5])


@pytest.mark.parametrize("args,code", [
    (["coeffs", "--lambdas", "1,1.0000001"], 2),
    (["coeffs", "--lambdas=-0.7,1"], 2),
    (["coeffs", "--lambdas=-0.25,1,3", "--n", "5"], 2),
    (["coeffs", "--lambdas", "a,b"], 2),
    (["classify", "--family", "hyperharmonic"], 2),
    (["coeffs", "--lambdas", ",".join(str(x) for x in np.linspace(0, 1.4, 15)), "--gap", "1e-9"], 3),
    (["spectral", "--family", "hyperharmonic", "--r", "1", "--truncate", "10"], 2),
])
def test_exit_codes(capsys, args, code):
    got, _, err = run(capsys, *args)
    assert got == code and "error" in err


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--lambdas", "1,2")
    assert code == 0
    table = [r.split(",") for r in rows(out)[1:]]
    names = {t[0] for t in table}
    assert {"self_reproduction", "gram_inverse", "fourier_agreement", "cauchy_l2"} <= names
    assert all(t[3] == "pass" and float(t[1]) < 1e-10 for t in table)


def test_verify_vacuous_and_perturbed(capsys):
    assert run(capsys, "verify", "--lambdas", "1,2", "--n", "0")[0] == 0
    code, out, _ = run(capsys, "verify", "--lambdas", "1,2", "--perturb", "1e-3")
    assert code == 1
    assert "self_reproduction" in [r.split(",")[0] for r in rows(out) if r.endswith("FAIL")]


@pytest.mark.parametrize("args,expected", [
    (["--family", "hyperharmonic", "--r", "2"], "InfiniteOrderSemimartingale"),
    (["--family", "hyperharmonic", "--r", "1"], "FiniteOrderOnly"),
    (["--family", "geometric-p", "--base", "2"], "InfiniteOrderNonSemimartingale"),
])
def test_classify(capsys, args, expected):
    code, out, _ = run(capsys, "classify", *args)
    assert code == 0 and f"class,,{expected}" in out


def test_spectral(capsys):
    code, out, _ = run(capsys, "spectral", "--lambdas", "1,2")
    table = np.array([[float(v) for v in r.split(",")] for r in rows(out)[1:]])
    assert code == 0 and table.shape == (25, 4)
    np.testing.assert_allclose(table[:, 3], 1 / np.sqrt(table[:, 0] ** 2 + 0.25), rtol=1e-14)
    zero = table[table[:, 0] == 0][0]
    np.testing.assert_allclose(zero[1:3], [2.0, 0.0], atol=1e-15)


def test_spectral_truncated(capsys):
    code, out, _ = run(capsys, "spectral", "--family", "hyperharmonic", "--r", "2",
                       "--truncate", "50", "--xi-count", "5")
    assert code == 0 and "xi = 0 excluded" in out
    assert rows(out)[0] == "xi,re,im,abs,tail_bound"
    assert "0,nan,nan,nan,nan" in rows(out)


def test_gram(capsys):
    code, out, _ = run(capsys, "gram", "--lambdas", "1,2")
    assert code == 0 and "alpha,1,1,48" in out


def test_simulate_small(capsys, tmp_path):
    args = ["simulate", "--paths", "256", "--grid", "64", "--iterate", "2", "--bridge"]
    code, out, _ = run(capsys, *args)
    header = json.loads(out.splitlines()[1][len("# config: "):])
    assert header["seed"] == 42 and header["paths"] == 256 and "workers" not in header
    assert rows(out)[0] == "statistic,estimate,std_error,target,z_score"
    assert code in (0, 1)


def test_simulate_too_few_paths(capsys):
    code, out, err = run(capsys, "simulate", "--paths", "2", "--grid", "16")
    assert code == 0 and "warning" in err and "verdict" not in out.split("note")[0]


def test_seed_sources(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("MUNTZ_SEED", "9")
    _, out, _ = run(capsys, "simulate", "--paths", "64", "--grid", "16")
    assert '"seed": 9' in out
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": 5, "paths": 64, "grid": 16}))
    _, out, _ = run(capsys, "simulate", "--config", str(cfg))
    assert '"seed": 5' in out
    _, out, _ = run(capsys, "simulate", "--config", str(cfg), "--seed", "6")
    assert '"seed": 6' in out


def test_seed_changes_estimates(capsys):
    a = run(capsys, "simulate", "--paths", "128", "--grid", "32", "--seed", "1")[1]
    b = run(capsys, "simulate", "--paths", "128", "--grid", "32", "--seed", "2")[1]
    assert rows(a) != rows(b)


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"bogus": 1}')
    assert run(capsys, "coeffs", "--config", str(cfg))[0] == 2


def test_output_file(capsys, tmp_path):
    target = tmp_path / "o.csv"
    assert run(capsys, "gram", "--output", str(target))[0] == 0
    assert target.read_text().startswith("# muntz")
