import json
import subprocess
import sys

import numpy as np
import pytest

from powerpos import cli, harness
from powerpos.characters import Character
from powerpos.entrywise import classify_entrywise
from powerpos.errors import PreconditionError, WitnessSearchFailed
from powerpos.io import (
    dumps,
    matrix_from_json,
    matrix_to_json,
    verdict_from_json,
    verdict_to_json,
    witness_from_json,
    witness_to_json,
)
from powerpos.rng import make_rng, random_gram


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


# -- io ---------------------------------------------------------------------------


def test_matrix_json_is_bit_exact():
    A = random_gram(make_rng(1), 4)
    B, m = matrix_from_json(json.loads(json.dumps(matrix_to_json(A, m=2))))
    assert np.array_equal(A, B) and m == 2


def test_matrix_json_shape_check():
    with pytest.raises(ValueError):
        matrix_from_json({"n": 2, "entries": [[[1, 0]]]})


def test_verdict_round_trip():
    v = classify_entrywise(3, Character.Psi(2, 0.5))
    back = verdict_from_json(json.loads(dumps(verdict_to_json(v))))
    assert back.status is v.status and back.name == v.name
    assert np.array_equal(back.witness.input, v.witness.input) and back.witness.verifies()
    w = witness_from_json(witness_to_json(v.witness))
    assert w.value == v.witness.value


# -- harness ----------------------------------------------------------------------


def test_verify_is_deterministic_and_worker_independent():
    cfg = harness.RunConfig("verify", n=4, alpha=2.5, beta=0, samples=60, seed=9)
    a = harness.run_verify(cfg)
    b = harness.run_verify(cfg)
    c = harness.run_verify(harness.RunConfig("verify", n=4, alpha=2.5, beta=0, samples=60, seed=9, workers=4))
    assert a == b == c
    assert harness.run_verify(harness.RunConfig("verify", n=4, alpha=2.5, samples=60, seed=10)) != a


def test_verify_histogram_counts_samples():
    rep = harness.run_verify(harness.RunConfig("verify", n=3, alpha=0.9, samples=100))
    assert sum(rep["histogram"]["counts"]) == 100
    assert rep["violations"] > 0


@pytest.mark.parametrize("regime", ["entrywise", "blockwise", "commuting", "trace"])
def test_samples_are_psd(regime):
    from powerpos.linalg import psd_check

    rng = make_rng(2)
    for fam in (Character.f(2), Character.Psi(2, 1)):
        if regime == "commuting" and fam.family.value == "Psi":
            continue
        A = harness.sample_input(regime, fam, 2, 3, rng)
        assert psd_check(A).is_psd


def test_tolerance_environment(monkeypatch):
    cfg = harness.RunConfig("verify")
    assert cfg.tolerances().psd == 1e-9
    monkeypatch.setenv(harness.TOLERANCE_ENV, "1e-6")
    assert cfg.tolerances().psd == 1e-6
    assert harness.RunConfig("verify", psd_tol=1e-4).tolerances().psd == 1e-4


def test_witness_reverifies_from_file(tmp_path):
    out = tmp_path / "w.json"
    res = harness.run_witness(harness.RunConfig("witness", n=3, alpha=1, beta=0.5, output=str(out)))
    assert res["verification"]["verified"]
    assert res["verification"]["det3"] == pytest.approx(-4.0)
    assert json.loads(out.read_text()) == res["witness"]


@pytest.mark.parametrize(
    "regime,family,alpha,beta",
    [("blockwise", "Psi", 1, 2), ("commuting", "f", 2.5, 0), ("trace", "Psi", 0.5, 0)],
)
def test_witness_regimes(regime, family, alpha, beta):
    cfg = harness.RunConfig("witness", regime=regime, m=2, n=5, family=family, alpha=alpha, beta=beta)
    assert harness.run_witness(cfg)["verification"]["verified"]


def test_witness_on_preserving_map_is_an_error():
    with pytest.raises(PreconditionError):
        harness.run_witness(harness.RunConfig("witness", n=3, alpha=2, beta=0))


def test_monotone_reports():
    bad = harness.run_monotone(harness.RunConfig("monotone", family="f", alpha=2))
    assert bad["status"] == "violated" and bad["violating_pair"] == [1, 2] and bad["det"] == -1
    assert bad["gadget_lambda_min"] < 0
    ok = harness.run_monotone(harness.RunConfig("monotone", family="f", alpha=0.5))
    assert ok["status"] == "consistent"


# -- cli --------------------------------------------------------------------------


def test_cli_classify(capsys):
    code, out = run_cli(capsys, "classify", "--n", "3", "--alpha", "2.5", "--beta", "1")
    assert code == 0 and out["status"] == "preserves" and out["certificate"]["name"] == "Zhan3"


def test_cli_output_is_byte_stable(capsys):
    cli.main(["classify", "--regime", "blockwise", "--family", "f", "--alpha", "0.5"])
    first = capsys.readouterr().out
    cli.main(["classify", "--regime", "blockwise", "--family", "f", "--alpha", "0.5"])
    assert capsys.readouterr().out == first


def test_cli_apply(tmp_path, capsys):
    A = np.array([[4.0, 1.0], [1.0, 9.0]])
    p = tmp_path / "a.json"
    p.write_text(json.dumps(matrix_to_json(A)))
    code, out = run_cli(capsys, "apply", "--family", "f", "--alpha", "0.5", "--input", str(p))
    B, _ = matrix_from_json(out)
    assert code == 0 and np.allclose(B, np.sqrt(A))


def test_cli_exit_codes(tmp_path, capsys, monkeypatch):
    assert run_cli(capsys, "classify", "--alpha", "nope")[0] == 2
    assert run_cli(capsys, "witness", "--n", "3", "--alpha", "2")[0] == 2
    assert run_cli(capsys, "apply")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run_cli(capsys, "apply", "--input", str(bad))[0] == 2
    assert run_cli(capsys, "verify", "--samples", "0")[0] == 2

    def boom(cfg):
        raise WitnessSearchFailed("no luck", best=-1e-17)

    monkeypatch.setattr(harness, "run_classify", boom)
    code, out = run_cli(capsys, "classify")
    assert code == 3 and out["error"] == "witness_search_failed"


def test_cli_writes_output(tmp_path, capsys):
    p = tmp_path / "v.json"
    code, out = run_cli(capsys, "verify", "--n", "3", "--alpha", "3", "--beta", "1", "--samples", "20", "--output", str(p))
    assert code == 0 and json.loads(p.read_text()) == out and out["violations"] == 0


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "powerpos", "classify", "--n", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["status"] == "preserves"
