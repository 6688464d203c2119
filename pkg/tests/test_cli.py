import filecmp
import json
import os

import pytest
from click.testing import CliRunner

from chromaperc.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_verify_single_edge(runner):
    res = runner.invoke(main, ["verify", "--case", "single_edge"])
    assert res.exit_code == 0, res.output
    reports = json.loads(res.stdout)
    assert [r["lhs"] for r in reports] == [{"num": "0", "den": "1"},
                                           {"num": "1", "den": "4"}]
    assert all(r["holds"] for r in reports)


@pytest.mark.parametrize("case,extra", [
    ("thm1_bc", []),
    ("down_ad", []),
    ("hk", []),
    ("multi", ["--k", "2"]),
    ("octo", ["--ground-size", "2"]),
])
def test_verify_cases_pass(runner, case, extra):
    args = ["verify", "--case", case, "--batches", "5", "--seed", "1"] + extra
    if "--ground-size" not in extra:
        args += ["--ground-size", "3"]
    res = runner.invoke(main, args)
    assert res.exit_code == 0, res.output
    assert all(r["holds"] for r in json.loads(res.stdout))


def test_verify_csv_format(runner):
    res = runner.invoke(main, ["verify", "--case", "thm1_ad", "--batches", "3",
                               "--seed", "2", "--format", "csv"])
    assert res.exit_code == 0
    header = res.stdout.splitlines()[0]
    assert header.split(",")[:3] == ["batch", "case", "ground_size"]


def test_verify_rejects_large_ground(runner):
    res = runner.invoke(main, ["verify", "--case", "hk", "--ground-size", "13"])
    assert res.exit_code == 2


def test_verify_rejects_huge_multi(runner):
    res = runner.invoke(main, ["verify", "--case", "multi", "--k", "4",
                               "--ground-size", "8"])
    assert res.exit_code == 2


def test_seed_env_fallback(runner, tmp_path, monkeypatch):
    out1, out2, out3 = (str(tmp_path / d) for d in ("a", "b", "c"))
    args = ["crossing", "--lattice", "rectangle", "--size", "2",
            "--trials", "2000"]
    monkeypatch.setenv("CHROMAPERC_SEED", "123")
    r1 = runner.invoke(main, args + ["--out", out1])
    monkeypatch.delenv("CHROMAPERC_SEED")
    r2 = runner.invoke(main, args + ["--seed", "123", "--out", out2])
    r3 = runner.invoke(main, args + ["--seed", "124", "--out", out3])
    assert r1.exit_code == r2.exit_code == r3.exit_code == 0
    row1 = json.loads(open(os.path.join(out1, "results.json")).read())
    row2 = json.loads(open(os.path.join(out2, "results.json")).read())
    row3 = json.loads(open(os.path.join(out3, "results.json")).read())
    assert row1 == row2
    assert row3["p_hat"] != row1["p_hat"] or row3["seed"] != row1["seed"]


def test_seed_env_bad_value(runner, monkeypatch):
    monkeypatch.setenv("CHROMAPERC_SEED", "not-a-number")
    res = runner.invoke(main, ["verify", "--case", "single_edge"])
    assert res.exit_code == 2


def test_crossing_outputs_deterministic_across_workers(runner, tmp_path):
    outs = [str(tmp_path / f"w{w}") for w in (1, 4)]
    for out, workers in zip(outs, (1, 4)):
        res = runner.invoke(main, [
            "crossing", "--lattice", "rhombus", "--size", "6",
            "--pattern", "bc", "--trials", "20000", "--seed", "77",
            "--workers", str(workers), "--out", out,
        ])
        assert res.exit_code == 0, res.output
    for name in ("results.csv", "results.json"):
        assert filecmp.cmp(os.path.join(outs[0], name),
                           os.path.join(outs[1], name), shallow=False)


def test_crossing_csv_appends(runner, tmp_path):
    out = str(tmp_path / "r")
    args = ["crossing", "--lattice", "rectangle", "--size", "2",
            "--trials", "1000", "--seed", "5", "--out", out]
    assert runner.invoke(main, args).exit_code == 0
    assert runner.invoke(main, args).exit_code == 0
    lines = open(os.path.join(out, "results.csv")).read().splitlines()
    assert len(lines) == 3  # header + two appended runs
    assert lines[1] == lines[2]
    manifest = json.loads(open(os.path.join(out, "manifest.json")).read())
    assert manifest["command"] == "crossing"
    assert "wall_time_s" in manifest and "code_version" in manifest


def test_crossing_exact_rhombus(runner, tmp_path):
    out = str(tmp_path / "x")
    res = runner.invoke(main, ["crossing", "--lattice", "rhombus", "--size", "2",
                               "--exact", "--out", out])
    assert res.exit_code == 0, res.output
    payload = json.loads(open(os.path.join(out, "results.json")).read())
    assert payload["p_half_crossing"] == {"num": "1", "den": "2"}
    assert payload["joint_bc"] == {"num": "3", "den": "32"}
    assert payload["joint_ad"] == {"num": "5", "den": "32"}
    assert payload["duality_exactly_one"] is True


def test_crossing_exact_too_large(runner, tmp_path):
    res = runner.invoke(main, ["crossing", "--lattice", "rhombus", "--size", "10",
                               "--exact", "--out", str(tmp_path / "y")])
    assert res.exit_code == 2


def test_crossing_bad_lattice(runner):
    res = runner.invoke(main, ["crossing", "--lattice", "torus", "--size", "3"])
    assert res.exit_code == 2


def test_sweep_requires_sizes(runner):
    res = runner.invoke(main, ["sweep", "--family", "tri_site"])
    assert res.exit_code == 2


def test_sweep_rejects_bad_grid(runner, tmp_path):
    res = runner.invoke(main, ["sweep", "--family", "tri_site",
                               "--sizes", "4,6", "--alpha-grid", "0.3:0.4:4",
                               "--out", str(tmp_path / "s")])
    assert res.exit_code == 2


def test_sweep_end_to_end(runner, tmp_path):
    out = str(tmp_path / "s")
    svg = str(tmp_path / "curves.svg")
    res = runner.invoke(main, [
        "sweep", "--family", "tri_site", "--sizes", "4,6",
        "--alpha-grid", "0.05:0.25:4", "--trials", "300", "--seed", "3",
        "--svg-out", svg, "--out", out,
    ])
    assert res.exit_code == 0, res.output
    summary = json.loads(open(os.path.join(out, "results.json")).read())
    assert len(summary["curves"]) == 8
    assert summary["alpha_c"]["bound_ok"] is True
    assert "conjectured_equality" in summary["alpha_c"]
    assert open(svg).read().startswith("<svg")
    lines = open(os.path.join(out, "curves.csv")).read().splitlines()
    assert lines[0] == "family,L,alpha,p_hat,stderr,N,seed"
    assert len(lines) == 9
