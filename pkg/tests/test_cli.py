"""End-to-end CLI tests: determinism, exit codes, file outputs."""

import json
import os
from fractions import Fraction

import numpy as np
import pytest

from hitchin_strata import cli

NODAL = """
schema_version = 1

[profile]
flavor = "irreducible"
genus = 2
even = [2]
odd = [1, 1]
"""

REDUCIBLE = """
schema_version = 1

[profile]
flavor = "reducible"
genus = 2
half_divisor = [2]

[datum]
D = [2]
d_plus = -1
"""

HARMONIC = """
schema_version = 1

[harmonic]
grid = 64
epsilon = 0.0625
punctures = [[0.25, 0.5, "1/2"], [0.75, 0.5, "-1/2"]]
"""


def run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_strata_deterministic(tmp_path, capsys):
    path = write(tmp_path, "nodal.toml", NODAL)
    code1, out1 = run(capsys, ["strata", "--input", path])
    code2, out2 = run(capsys, ["strata", "--input", path])
    assert code1 == code2 == 0
    assert out1 == out2
    report = json.loads(out1)
    assert report["command"] == "strata"
    assert report["results"]["stratum_count"] == 2
    assert report["results"]["normalization_genus"] == 4
    rows = report["results"]["strata"]
    assert [(r["N"], r["n"]) for r in rows] == [(1, 0), (2, 2)]
    assert [(r["k1"], r["k2"]) for r in rows] == [(1, 0), (0, 0)]


def test_strata_threaded_output_identical(tmp_path, capsys):
    path = write(tmp_path, "nodal.toml", NODAL)
    _, serial = run(capsys, ["strata", "--input", path])
    os.environ["HITCHIN_STRATA_THREADS"] = "4"
    try:
        _, threaded = run(capsys, ["strata", "--input", path])
    finally:
        del os.environ["HITCHIN_STRATA_THREADS"]
    assert serial == threaded


def test_limits_nodal_values(tmp_path, capsys):
    path = write(tmp_path, "nodal.toml", NODAL)
    code, out = run(capsys, ["limits", "--input", path, "--stratum", "1"])
    assert code == 0
    results = json.loads(out)["results"]
    assert (results["N"], results["n"]) == (2, 2)
    limits = [results["main"]] + results["branches"]
    pairs = {
        (lw["prym_weights"].get("e0+", "0"), lw["prym_weights"].get("e0-", "0"))
        for lw in limits
    }
    assert pairs == {("1/2", "1/2"), ("1", "0"), ("0", "1")}


def test_limits_stratum_out_of_range(tmp_path, capsys):
    path = write(tmp_path, "nodal.toml", NODAL)
    code, out = run(capsys, ["limits", "--input", path, "--stratum", "5"])
    assert code == cli.EXIT_DOMAIN
    assert "out of range" in json.loads(out)["error"]


def test_validation_errors(tmp_path, capsys):
    bad_field = NODAL + "\nsurprise = 1\n"
    path = write(tmp_path, "bad.toml", bad_field)
    code, out = run(capsys, ["strata", "--input", path])
    assert code == cli.EXIT_VALIDATION
    assert "surprise" in json.loads(out)["error"]

    path = write(tmp_path, "schema.toml", NODAL.replace("schema_version = 1", "schema_version = 2"))
    code, _ = run(capsys, ["strata", "--input", path])
    assert code == cli.EXIT_VALIDATION

    path = write(tmp_path, "broken.toml", "not toml [")
    code, _ = run(capsys, ["strata", "--input", path])
    assert code == cli.EXIT_VALIDATION

    code, _ = run(capsys, ["strata", "--input", str(tmp_path / "missing.toml")])
    assert code == cli.EXIT_VALIDATION

    bad_profile = NODAL.replace("odd = [1, 1]", "odd = [1]")
    path = write(tmp_path, "badprof.toml", bad_profile)
    code, out = run(capsys, ["strata", "--input", path])
    assert code == cli.EXIT_VALIDATION
    assert json.loads(out)["details"]  # violations listed


def test_reducible_report(tmp_path, capsys):
    path = write(tmp_path, "red.toml", REDUCIBLE)
    code, out = run(capsys, ["reducible", "--input", path])
    assert code == 0
    results = json.loads(out)["results"]
    assert results["genus_verdict"]["continuous_on_stable"] is True
    datum = results["datum"]
    assert datum["stability"] == "stable"
    assert datum["c"] == "0"
    assert datum["exotic"] is False
    assert datum["pair"][0]["degree"] == "0"
    assert datum["pair"][1]["degree"] == "0"


def test_reducible_unstable_datum(tmp_path, capsys):
    bad = REDUCIBLE.replace("d_plus = -1", "d_plus = 1")
    path = write(tmp_path, "red.toml", bad)
    code, out = run(capsys, ["reducible", "--input", path])
    assert code == cli.EXIT_DOMAIN
    assert "unstable" in json.loads(out)["error"]


def test_reducible_genus3_witness(tmp_path, capsys):
    doc = REDUCIBLE.replace("genus = 2", "genus = 3").replace(
        "half_divisor = [2]", "half_divisor = [2, 2]"
    ).replace("D = [2]", "D = [2, 1]").replace("d_plus = -1", "d_plus = -2")
    path = write(tmp_path, "red3.toml", doc)
    code, out = run(capsys, ["reducible", "--input", path])
    assert code == 0
    verdict = json.loads(out)["results"]["genus_verdict"]
    assert verdict["continuous_on_stable"] is False
    assert verdict["witness"]["mismatch"] is True


def test_anmod_report(capsys):
    code, out = run(capsys, ["anmod", "--family", "even", "--n", "2"])
    assert code == 0
    results = json.loads(out)["results"]
    assert results["all_match"] is True
    assert [(r["k"], r["ell"], r["b"], r["tor_total"]) for r in results["rows"]] == [
        (1, 2, 2, 4),
        (3, 1, 1, 2),
        (5, 0, 0, 0),
    ]
    code, out = run(capsys, ["anmod", "--family", "odd", "--n", "2"])
    assert code == 0
    assert json.loads(out)["results"]["all_match"] is True


def test_anmod_bad_truncation(capsys):
    code, _ = run(capsys, ["anmod", "--family", "even", "--n", "3", "--truncation", "4"])
    assert code == cli.EXIT_VALIDATION


def test_harmonic_report_and_outputs(tmp_path, capsys):
    path = write(tmp_path, "harm.toml", HARMONIC)
    out_path = str(tmp_path / "field.bin")
    code, out = run(capsys, ["harmonic", "--input", path, "--out", out_path])
    assert code == 0
    results = json.loads(out)["results"]
    assert results["residual"] <= 1e-10
    for entry in results["exponents"]:
        assert abs(entry["estimate"] - float(Fraction(entry["weight"]))) <= 0.05
    for suffix in ("", ".dat", ".png"):
        assert os.path.exists(out_path + suffix)

    grid, side, punctures, values = cli.read_field_dump(out_path)
    assert grid == 64 and side == 1.0
    assert punctures == [(0.25, 0.5, Fraction(1, 2)), (0.75, 0.5, Fraction(-1, 2))]
    assert values.shape == (64, 64)
    assert np.isfinite(values).all()
    # ASCII table has one row per grid point plus blank separators.
    with open(out_path + ".dat") as fh:
        lines = fh.read().splitlines()
    assert sum(1 for ln in lines if ln.strip()) == 64 * 64
    with open(out_path + ".png", "rb") as fh:
        assert fh.read(8) == b"\x89PNG\r\n\x1a\n"


def test_harmonic_degree_obstruction(tmp_path, capsys):
    doc = HARMONIC.replace('"-1/2"', '"-1/4"')
    path = write(tmp_path, "bad.toml", doc)
    code, out = run(capsys, ["harmonic", "--input", path])
    assert code == cli.EXIT_DOMAIN
    assert "obstruction" in json.loads(out)["error"]


def test_field_dump_roundtrip_exact(tmp_path):
    from hitchin_strata.harmonic_lab import Puncture, TorusConfig, solve_harmonic

    cfg = TorusConfig(
        32,
        (Puncture(0.2, 0.3, Fraction(2, 3)), Puncture(0.7, 0.8, Fraction(-2, 3))),
        0.125,
    )
    field = solve_harmonic(cfg)
    path = str(tmp_path / "dump.bin")
    cli.write_field_dump(path, field)
    grid, side, punctures, values = cli.read_field_dump(path)
    assert (grid, side) == (32, 1.0)
    assert punctures[0][2] == Fraction(2, 3)
    assert np.array_equal(values, field.values)
