import hashlib
import json
import subprocess
import sys

import pytest

from fracsq.cli import (EXIT_BUDGET, EXIT_USAGE, census_csv, census_sets, expected_product_forms,
                        main, run_census)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_components_example(capsys):
    code, out, _ = run(capsys, "components", "--preset", "ex21", "--depth", "3", "--json")
    assert code == 0
    assert json.loads(out)["beta0"] == [1, 1, 3]


def test_components_budget_partial(capsys, monkeypatch):
    monkeypatch.setenv("FRACSQ_BUDGET_CELLS", str(3 ** 6))
    code, out, _ = run(capsys, "components", "--preset", "carpet3", "--depth", "5")
    assert code == EXIT_BUDGET
    j = json.loads(out)
    assert j["beta0"] == [1, 1, 1] and j["budget_exceeded"] == {"requested": 5, "reached": 3}


def test_classify_d3(capsys):
    code, out, _ = run(capsys, "classify", "--preset", "d3_5", "--json")
    j = json.loads(out)
    assert code == 0 and j["lambda"] == "{0,1}"
    assert abs(j["dim_lambda1"]["value"] - 1.4306765580733931) < 1e-12


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", "--grid", "101/101/101")
    assert code == 0 and "lambda(K) = {1}" in out


@pytest.mark.parametrize("argv", [
    ["classify"],
    ["classify", "--grid", "1/0"],
    ["classify", "--preset", "nope"],
    ["classify", "--digits", "N=3; D=(0,0)"],
    ["digitop", "1/2@0"],
    ["digitop", "--n", "3", "garbage"],
    ["omega", "--preset", "carpet3", "--slope", "1/5"],
    ["approx", "--preset", "carpet3", "--depth", "2", "--px", "10"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and "error" in err


def test_argparse_error_exit_code():
    with pytest.raises(SystemExit) as e:
        main(["no-such-command"])
    assert e.value.code == 2


def test_digitop(capsys):
    code, out, _ = run(capsys, "digitop", "--n", "3", "1/2@0", "0@2/3", "--json")
    assert code == 0
    assert len(json.loads(out)["digits"]["digits"]) == 8


def test_approx_writes_png(capsys, tmp_path):
    path = tmp_path / "carpet.png"
    code, out, _ = run(capsys, "approx", "--preset", "carpet3", "--depth", "1", "--px", "81",
                       "--out", str(path))
    j = json.loads(out)
    assert code == 0 and j["foreground"] == 5832
    assert hashlib.sha256(path.read_bytes()).hexdigest() == j["sha256"]


def test_hata_omega_probe_pi1_presets(capsys, tmp_path):
    code, out, _ = run(capsys, "hata", "--preset", "ex21", "--json")
    assert code == 0 and json.loads(out)["certificate"] == "disconnected"
    code, out, _ = run(capsys, "omega", "--preset", "d3_5", "--slope", "1", "--depth", "2",
                       "--out", str(tmp_path / "o.svg"))
    row = json.loads(out)[0]
    assert code == 0 and row["cells"] == [0, 4] and row["levels"][1]["cells"] == [0, 4, 20, 24]
    assert (tmp_path / "o.svg").read_text().startswith("<?xml")
    code, out, _ = run(capsys, "probe", "--preset", "diag5", "--json")
    assert code == 0 and json.loads(out)["outcome"] == "case1"
    code, out, _ = run(capsys, "pi1", "--preset", "vicsek3")
    assert out.strip() == "trivial_certified"
    code, out, _ = run(capsys, "presets", "--json")
    assert "d3_5" in json.loads(out)


def test_census_sets_order():
    masks = [m for m, _ in census_sets(3)]
    assert len(masks) == 502 and masks == sorted(masks)
    first = next(census_sets(3))[1]
    assert first.digits == {(0, 0), (0, 1)}


def test_expected_product_forms():
    assert [expected_product_forms(N) for N in (2, 3, 4, 5)] == [0, 6, 20, 50]


@pytest.fixture(scope="module")
def census_runs():
    a = run_census(3, jobs=1)
    b = run_census(3, jobs=2)
    return a, b


def test_census_summary(census_runs):
    rows, summary = census_runs[0]
    assert summary["rows"] == summary["expected_rows"] == 502
    assert summary["counts"] == {"{0,1}": 4, "{0}": 492, "{1}": 6}
    assert summary["by_rule"] == {"R1": 1, "R2": 6, "R3": 137, "R4": 218, "R5": 136, "R6": 4}
    assert summary["recheck_failures"] == 0
    assert summary["product_cross_check"] is True


def test_census_deterministic_across_jobs(census_runs):
    (r1, s1), (r2, s2) = census_runs
    assert census_csv(r1) == census_csv(r2) and s1 == s2


def test_census_subprocess_bytes_identical(tmp_path):
    outs = []
    for jobs in ("1", "2"):
        path = tmp_path / f"c{jobs}.csv"
        p = subprocess.run([sys.executable, "-m", "fracsq.cli", "census", "--n", "3",
                            "--jobs", jobs, "--out", str(path)],
                           capture_output=True, text=True, check=True)
        outs.append((p.stdout, path.read_bytes()))
    assert outs[0] == outs[1]
