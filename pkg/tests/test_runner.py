import json

import pytest

from stabforge.runner import (
    EXPERIMENTS,
    SUITES,
    ConfigError,
    ExperimentConfig,
    parse_edges,
    render_report,
    run_experiment,
    verify_suite,
)


def strip_time(report: dict) -> str:
    data = json.loads(render_report(report))
    data.pop("timestamp")
    return json.dumps(data, sort_keys=True)


def run(kind, seed=None, **params):
    return run_experiment(ExperimentConfig(kind, params, seed))


def test_code_soundness_report():
    rep = run("code-soundness", family="hadamard", t=2)
    assert rep["passed"]
    assert rep["results"]["method"] == "exhaustive"
    assert rep["results"]["rho_float"] > 0


def test_graph_defect_report():
    rep = run("graph-defect", k=4, edges="0-1,2-3")
    assert rep["results"]["expected"] == "1/3"
    assert abs(rep["results"]["epsilon"] - 1 / 3) <= 1e-12
    assert rep["passed"]


def test_qld_perfect_report():
    rep = run("qld-perfect", t=2, m=1, d=1)
    res = rep["results"]
    assert abs(res["omega"] - 1) <= 1e-9
    assert res["pauli_dimension"] == 16
    assert res["min_dimension_bound"] == 16


def test_report_echoes_config_and_version():
    rep = run("kappa", k=4, dist="basis")
    assert rep["config"]["params"] == {"k": 4, "dist": "basis"}
    assert rep["version"]
    assert set(rep["timestamp"]) == {"utc", "wall_time_s"}
    assert rep["results"]["kappa"] == "2"


@pytest.mark.parametrize(
    "kind,params",
    [
        ("battery", {"trials": 30}),
        ("extraction-sweep", {"points": 4}),
        ("perturbation-sweep", {"points": 3}),
    ],
)
def test_seeded_reports_are_identical(kind, params):
    a = run(kind, seed=3, **params)
    b = run(kind, seed=3, **params)
    assert strip_time(a) == strip_time(b)
    assert a["passed"]
    assert strip_time(a) != strip_time(run(kind, seed=4, **params))


def test_csv_for_sweeps():
    rep = run("extraction-sweep", seed=0, points=3)
    text = render_report(rep, "csv")
    assert text.splitlines()[0] == "theta,game_deficit,presentation_defect"
    assert len(text.splitlines()) == 4
    with pytest.raises(ConfigError):
        render_report(run("dimbound"), "csv")


@pytest.mark.parametrize(
    "cfg",
    [
        {"kind": "nope"},
        {"kind": "battery"},
        {"kind": "code-soundness", "params": {"budget": 0}},
        {"kind": "kappa", "schema": 99},
        {"kind": "kappa", "format": "xml"},
        {"kind": "kappa", "seed": -1},
        {"params": {}},
        {"kind": "kappa", "colour": "red"},
    ],
)
def test_invalid_configs(cfg):
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig.from_dict(cfg))


def test_dimbound_rejects_delta_one():
    with pytest.raises(ConfigError):
        run("dimbound", k=2, delta=1.0)


def test_parse_edges():
    assert parse_edges("0-1,2-3") == [(0, 1), (2, 3)]
    assert parse_edges([[1, 2]]) == [(1, 2)]
    assert parse_edges("") == []


def test_every_experiment_registered():
    assert set(EXPERIMENTS) >= {"code-soundness", "qld-perfect", "graph-defect", "battery", "extraction-sweep"}


@pytest.mark.parametrize("name", sorted(SUITES))
def test_verify_suites_pass(name):
    summary = verify_suite(name)
    failed = [c for c in summary["checks"] if not c["passed"]]
    assert summary["passed"], failed


def test_verify_unknown_suite():
    with pytest.raises(ConfigError):
        verify_suite("everything")
