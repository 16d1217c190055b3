"""End-to-end tests of the command-line interface.

Every test drives ``d2dcost.cli.main`` in-process with a temp output
directory, asserting on exit codes, file bytes, and the documented
round-trip guarantees.
"""

import json
import math

import pytest

from d2dcost import CostQuery, NetworkParams, Scheme, derive_code, overall_cost
from d2dcost.cli import canon, main

BASE_CONFIG = {
    "network": {"M": 30.0, "mu": 1.0, "omega": 0.02, "rho_bs": 40.0, "rho_d2d": 1.0},
    "code": [
        {"family": "mds", "m": 9, "h": 3, "r": 3},
        {"family": "replication", "m": 2},
    ],
    "scheme": ["conventional", "hybrid"],
    "grid": {"delta": [0.0, 0.5, 2.0]},
}


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(BASE_CONFIG), encoding="utf-8")
    return path


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


# ---------------------------------------------------------------------------
# analytic


def test_analytic_writes_expected_table(tmp_path, config_path):
    out = tmp_path / "out"
    assert run_cli("analytic", "--config", config_path, "--out", out) == 0
    lines = (out / "analytic.csv").read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    assert header == ["family", "m", "h", "r", "scheme", "delta", "repair_bs",
                      "repair_d2d", "download_bs", "download_d2d", "total",
                      "normalized"]
    # codes x schemes x grid, in config order
    assert len(lines) == 1 + 2 * 2 * 3
    first = lines[1].split(",")
    assert first[:6] == ["mds", "9", "3", "3", "conventional", "0"]


def test_analytic_round_trips_exactly(tmp_path, config_path):
    out = tmp_path / "out"
    run_cli("analytic", "--config", config_path, "--out", out)
    lines = (out / "analytic.csv").read_text(encoding="utf-8").splitlines()[1:]

    params = NetworkParams(**BASE_CONFIG["network"])
    codes = {"mds": derive_code("mds", 9, 3, 3),
             "replication": derive_code("replication", 2)}
    for line in lines:
        cells = line.split(",")
        code = codes[cells[0]]
        cost = overall_cost(CostQuery(params=params, code=code,
                                      delta=float(cells[5]),
                                      scheme=Scheme(cells[4])))
        expected = [cost.repair_bs, cost.repair_d2d, cost.download_bs,
                    cost.download_d2d, cost.total, cost.normalized]
        for cell, value in zip(cells[6:], expected):
            parsed = float(cell)
            assert parsed == canon(value)       # parse(write(x)) == canon(x)
            assert parsed == canon(parsed)      # stable under re-canonning


def test_analytic_zero_delta_row_is_the_limit(tmp_path, config_path):
    from d2dcost import limit_cost_zero

    out = tmp_path / "out"
    run_cli("analytic", "--config", config_path, "--out", out)
    lines = (out / "analytic.csv").read_text(encoding="utf-8").splitlines()
    row = lines[1].split(",")
    params = NetworkParams(**BASE_CONFIG["network"])
    limit = limit_cost_zero(params, derive_code("mds", 9, 3, 3))
    assert float(row[7]) == canon(limit.repair_d2d)
    assert float(row[10]) == canon(limit.total)


def test_analytic_runs_are_byte_identical(tmp_path, config_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run_cli("analytic", "--config", config_path, "--out", out_a)
    run_cli("analytic", "--config", config_path, "--out", out_b)
    assert (out_a / "analytic.csv").read_bytes() == (out_b / "analytic.csv").read_bytes()


def test_refuses_to_overwrite_without_force(tmp_path, config_path, capsys):
    out = tmp_path / "out"
    assert run_cli("analytic", "--config", config_path, "--out", out) == 0
    assert run_cli("analytic", "--config", config_path, "--out", out) == 2
    assert "refusing to overwrite" in capsys.readouterr().err
    assert run_cli("analytic", "--config", config_path, "--out", out, "--force") == 0


def test_set_overrides_reach_the_table(tmp_path, config_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run_cli("analytic", "--config", config_path, "--out", out_a)
    run_cli("analytic", "--config", config_path, "--out", out_b,
            "--set", "network.omega=0.05")
    a = (out_a / "analytic.csv").read_text(encoding="utf-8")
    b = (out_b / "analytic.csv").read_text(encoding="utf-8")
    assert a != b


@pytest.mark.parametrize(
    "override",
    [
        "grid.delta=[]",                      # empty grid
        "grid.delta=[-1.0]",                  # negative interval
        "network.omega=-1",                   # invalid rate
        "network.bogus=1",                    # unknown key
        "scheme=\"teleport\"",                # unknown scheme
        "code=[{\"family\": \"mds\", \"m\": 9, \"h\": 3, \"r\": 4}]",
    ],
)
def test_bad_configs_exit_2(tmp_path, config_path, override):
    out = tmp_path / "out"
    assert run_cli("analytic", "--config", config_path, "--out", out,
                   "--set", override) == 2


def test_missing_config_exits_2(tmp_path):
    assert run_cli("analytic", "--config", tmp_path / "nope.json",
                   "--out", tmp_path / "out") == 2
    assert run_cli("analytic", "--out", tmp_path / "out") == 2


# ---------------------------------------------------------------------------
# simulate


@pytest.fixture()
def sim_config_path(tmp_path):
    cfg = {
        "network": BASE_CONFIG["network"],
        "code": {"family": "mds", "m": 9, "h": 3, "r": 3},
        "grid": {"delta": [0.5]},
        "sim": {"horizon": 2000.0, "seed": 7},
    }
    path = tmp_path / "sim.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return path


def test_simulate_writes_canonical_records(tmp_path, sim_config_path):
    out = tmp_path / "out"
    assert run_cli("simulate", "--config", sim_config_path, "--out", out) == 0
    lines = (out / "records.jsonl").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1
    record = json.loads(lines[0])
    assert record["seed"] == 7
    assert record["delta"] == 0.5
    assert set(record["cost"]) == {"repair_bs", "repair_d2d", "download_bs",
                                   "download_d2d", "total", "normalized"}
    assert "z_total" in record and "flagged" in record
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["runs"] == 1
    assert isinstance(report["flagged"], list)


def test_simulate_reruns_are_byte_identical(tmp_path, sim_config_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run_cli("simulate", "--config", sim_config_path, "--out", out_a)
    run_cli("simulate", "--config", sim_config_path, "--out", out_b)
    assert (out_a / "records.jsonl").read_bytes() == (out_b / "records.jsonl").read_bytes()


def test_simulate_seed_flag_changes_the_run(tmp_path, sim_config_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run_cli("simulate", "--config", sim_config_path, "--out", out_a)
    run_cli("simulate", "--config", sim_config_path, "--out", out_b, "--seed", "8")
    a = json.loads((out_a / "records.jsonl").read_text(encoding="utf-8"))
    b = json.loads((out_b / "records.jsonl").read_text(encoding="utf-8"))
    assert b["seed"] == 8
    assert a["cost"]["total"] != b["cost"]["total"]


def test_simulate_requires_sim_section_and_seed(tmp_path, config_path, sim_config_path):
    out = tmp_path / "out"
    assert run_cli("simulate", "--config", config_path, "--out", out) == 2
    assert run_cli("simulate", "--config", sim_config_path, "--out", out,
                   "--set", "sim.seed=null") == 2


def test_simulate_zero_requests_has_no_download_cost(tmp_path, sim_config_path):
    out = tmp_path / "out"
    assert run_cli("simulate", "--config", sim_config_path, "--out", out,
                   "--set", "network.omega=0") == 0
    record = json.loads((out / "records.jsonl").read_text(encoding="utf-8"))
    assert record["cost"]["download_bs"] == 0.0
    assert record["cost"]["download_d2d"] == 0.0
    assert record["cost"]["normalized"] is None     # NaN serializes as null


# ---------------------------------------------------------------------------
# search


def test_search_winner_table(tmp_path, config_path):
    out = tmp_path / "out"
    assert run_cli("search", "--config", config_path, "--out", out,
                   "--set", "scheme=\"conventional\"") == 0
    lines = (out / "winners.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "delta,family,m,h,r,cost,normalized"
    zero = lines[1].split(",")
    assert zero[0] == "0"
    assert zero[1] == "replication" and zero[2] == "2"
    assert float(zero[5]) == 2.6


def test_search_rejects_multiple_schemes(tmp_path, config_path):
    out = tmp_path / "out"
    assert run_cli("search", "--config", config_path, "--out", out) == 2


# ---------------------------------------------------------------------------
# figures


def test_figures_emits_all_reference_datasets(tmp_path):
    out = tmp_path / "out"
    assert run_cli("figures", "--out", out) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "cost_curves.csv",
        "incoming_cost_curves.csv",
        "incoming_winner_map.csv",
        "interval_ceiling_vs_price.csv",
        "repair_locality_sweep.csv",
        "request_ratio_sweep.csv",
        "scheme_comparison.csv",
        "winner_map.csv",
        "winner_map_hybrid.csv",
    ]
    assert run_cli("figures", "--out", out) == 2    # no silent overwrite


# ---------------------------------------------------------------------------
# validate


def test_validate_missing_golden_file_exits_2(tmp_path):
    out = tmp_path / "out"
    assert run_cli("validate", "--out", out,
                   "--set", "golden.path=/nonexistent/goldens.json") == 2


def test_validate_corrupted_golden_syntax_exits_1(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    out = tmp_path / "out"
    assert run_cli("validate", "--out", out,
                   "--set", f"golden.path={broken}") == 1
    report = json.loads((out / "validation.json").read_text(encoding="utf-8"))
    assert report["passed"] is False
    assert report["criteria"] == []
    assert any(not row["passed"] for row in report["golden_checks"])


def test_validate_corrupted_golden_value_exits_1(tmp_path):
    from importlib import resources

    payload = json.loads(
        resources.files("d2dcost").joinpath("data/goldens.json").read_text()
    )
    payload["entries"]["p_d2d_quadrature"]["rows"][0]["value"] += 1e-3
    doctored = tmp_path / "doctored.json"
    doctored.write_text(json.dumps(payload), encoding="utf-8")
    out = tmp_path / "out"
    assert run_cli("validate", "--out", out,
                   "--set", f"golden.path={doctored}") == 1
    report = json.loads((out / "validation.json").read_text(encoding="utf-8"))
    assert report["passed"] is False
    assert report["criteria"] == []     # golden failure short-circuits
    failed = [row["label"] for row in report["golden_checks"] if not row["passed"]]
    assert failed == ["golden p_d2d_quadrature"]


def test_validate_reports_documented_limit_gaps(tmp_path, capsys):
    # the fast path still runs everything except the simulation sweep; the
    # large-interval and high-locality small-interval rows fail as documented
    out = tmp_path / "out"
    code = run_cli("validate", "--out", out, "--set", "validate.skip_slow=true")
    assert code == 1
    report = json.loads((out / "validation.json").read_text(encoding="utf-8"))
    assert report["passed"] is False
    assert report["skipped_slow"] is True
    assert all(row["passed"] for row in report["golden_checks"])
    by_number = {c["number"]: c for c in report["criteria"]}
    assert sorted(by_number) == [1, 2, 3, 4, 6, 7, 8, 9, 10]
    assert by_number[1]["passed"] is False
    failing = [row["label"] for row in by_number[1]["rows"] if not row["passed"]]
    assert len(failing) == 8
    assert all(by_number[n]["passed"] for n in (2, 3, 4, 6, 7, 8, 9, 10))
    text = capsys.readouterr().out
    assert "validation: FAIL" in text
