import json

import numpy as np
import pytest

from wguide.asymptotics import CRITICAL_ALPHA_NEG, MAIN, STRIP_CRITICAL
from wguide.catalog import ASYMMETRIC_STRIP, SYMMETRIC_STRIP, fixture
from wguide.errors import ConfigError
from wguide.experiment import (
    COLUMNS,
    ExperimentConfig,
    SweepReport,
    mode_table,
    parse_cross_section,
    predict,
    run_sweep,
    verify,
)
from wguide.settings import Settings
from wguide.threshold_solver import INDETERMINATE, modes_for

from conftest import TEMPLATES


def _config(config_dict, overrides=None):
    return ExperimentConfig.from_settings(Settings.from_dict(config_dict), overrides)


def test_config_from_settings(config_dict):
    config = _config(config_dict)
    assert config.h_values == (0.2,)
    assert config.solver.j_max == 10
    assert config.potential.name == "box"
    assert config.formats == ("csv", "json")


def test_overrides(config_dict):
    config = _config(config_dict, {
        "alpha": 0.5, "h": [0.1, 0.05], "mode": "series", "j_max": 5,
        "potential": "linear_box", "emit": "json", "output": "elsewhere",
    })
    assert config.alpha == 0.5
    assert config.h_values == (0.1, 0.05)
    assert config.solver.mode == "series" and config.solver.j_max == 5
    assert config.potential_name == "linear_box" and config.potential_params == {}
    assert config.formats == ("json",)
    assert config.output_folder == "elsewhere"
    both = _config(config_dict, {"emit": "both", "params": {"amplitude": -3.0}})
    assert both.formats == ("csv", "json")
    assert both.potential_params == {"amplitude": -3.0}


def test_h_range_is_geometric(config_dict):
    config_dict["experiment"] = {"alpha": 0.0, "h_range": {"start": 0.2, "stop": 0.025, "num": 4}}
    np.testing.assert_allclose(_config(config_dict).h_values, [0.2, 0.1, 0.05, 0.025])


@pytest.mark.parametrize("section, values", [
    ("experiment", {"alpha": 0.0, "h": [1.5]}),
    ("experiment", {"alpha": 1.0, "h": [0.1]}),
    ("experiment", {"alpha": 0.0}),
    ("experiment", {"h": [0.1], "h_range": {"start": 0.1, "stop": 0.05, "num": 2}}),
    ("experiment", {"h_range": {"start": 0.1, "num": 2}}),
    ("output", {"formats": ["pdf"]}),
    ("solver", {"series_order": "many"}),
    ("solver", {"mode": "iterative"}),
    ("cross_section", {"n": 4}),
    ("cross_section", {"n": 2, "interval": [0.2, 1.0]}),
    ("cross_section", {"n": 3, "rectangle": [[-1.0, 1.0], [0.5, 2.0]]}),
    ("potential", {"name": "box", "params": {"width": 2.0}}),
])
def test_invalid_configs(config_dict, section, values):
    config_dict[section] = values
    with pytest.raises(ConfigError):
        _config(config_dict)


def test_solver_values_are_coerced(config_dict):
    config_dict["solver"] = {"tol_k": "1e-13", "max_iter": "20"}
    solver = _config(config_dict).solver
    assert solver.tol_k == 1e-13 and solver.max_iter == 20


def test_parse_rectangle():
    cs = parse_cross_section({"n": 3, "rectangle": [[-1.0, 1.0], [-0.5, 2.0]]})
    assert cs.n == 3 and cs.lengths == (2.0, 2.5)
    with pytest.raises(ConfigError):
        parse_cross_section({"n": 3, "interval": [-1.0, 1.0]})


def test_mode_table(symmetric_strip):
    rows = mode_table(symmetric_strip, 3)
    assert [row["j"] for row in rows] == [0, 1, 2]
    assert rows[0]["mu"] == pytest.approx(1.0)
    assert rows[1]["k_rate_at_zero"] == pytest.approx(np.sqrt(3.0))
    assert rows[0]["phi_origin"] ** 2 == pytest.approx(2.0 / np.pi)


@pytest.mark.parametrize("cs, name, alpha, regime", [
    (SYMMETRIC_STRIP, "box", 0.0, MAIN),
    (ASYMMETRIC_STRIP, "linear_box", -1.0, CRITICAL_ALPHA_NEG),
    (ASYMMETRIC_STRIP, "odd_linear", 0.25, STRIP_CRITICAL),
    (ASYMMETRIC_STRIP, "odd_linear", 0.75, MAIN),
])
def test_predict_dispatch(cs, name, alpha, regime):
    config = ExperimentConfig(cross_section=cs, potential_name=name, potential_params={},
                              alpha=alpha, h_values=(0.05,))
    assert predict(config, 0.05).regime == regime


def test_zero_potential_sweep(config_dict, tmp_path):
    config_dict["potential"] = {"name": "zero"}
    config_dict["experiment"]["h"] = [0.2, 0.1]
    config_dict["output"] = {"folder": str(tmp_path), "formats": ["csv", "json", "html"]}
    rows = run_sweep(_config(config_dict))
    assert [row.status for row in rows] == ["ok", "ok"]
    for row in rows:
        assert row.k_bs == 0 and row.k_asym == 0
        assert row.verdict_bs == INDETERMINATE and row.verdict_asym == INDETERMINATE
        assert row.ratio is None

    report = SweepReport(_config(config_dict), rows, template_folder=TEMPLATES)
    for output_format in ("csv", "json", "html"):
        report.generate(output_format)
    lines = (tmp_path / "sweep.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# schema=1"
    assert lines[1].split(",") == COLUMNS
    assert len(lines) == 4
    records = [json.loads(line) for line in (tmp_path / "sweep.jsonl").read_text().splitlines()]
    assert [r["h"] for r in records] == [0.2, 0.1]
    assert records[0]["solution"]["verdict"] == INDETERMINATE
    assert "Threshold sweep" in (tmp_path / "sweep.html").read_text(encoding="utf-8")
    assert report.generate("xlsx") == "Unsupported format!"


def test_sweep_csv_is_reproducible(config_dict, tmp_path):
    outputs = []
    for run in ("first", "second"):
        config_dict["output"] = {"folder": str(tmp_path / run), "formats": ["csv"]}
        config = _config(config_dict)
        SweepReport(config, run_sweep(config)).generate("csv")
        outputs.append((tmp_path / run / "sweep.csv").read_bytes())
    assert outputs[0] == outputs[1]


def test_records_carry_inputs(config_dict):
    config = _config(config_dict)
    record = run_sweep(config)[0].record
    assert record["h"] == 0.2 and record["alpha"] == 0.0
    assert record["potential"] == "box"
    assert record["potential_params"] == {"amplitude": -1.0}
    assert record["cross_section"] == config.cross_section.describe()
    assert record["solver"]["j_max"] == 10 and record["solver"]["mode"] == "direct"
    assert record["solution"]["diagnostics"]["j_max"] == 10


def test_default_solver_records_resolved_mode_count(config_dict):
    config_dict["solver"] = {"nodes_per_panel": 12}
    record = run_sweep(_config(config_dict))[0].record
    assert record["solver"]["j_max"] is None
    assert record["solution"]["diagnostics"]["j_max"] == modes_for(SYMMETRIC_STRIP, 0.2)


def test_sweep_records_row_failures(config_dict):
    config_dict["cross_section"] = {"n": 2, "interval": [-0.2, 0.2]}
    config_dict["experiment"]["h"] = [0.9, 0.1]
    rows = run_sweep(_config(config_dict))
    assert rows[0].status.startswith("DomainError")
    assert rows[1].status == "ok"


def test_verify_lemma_probe():
    checks = verify("lemma_probe")
    assert len(checks) == 2
    assert all(check.passed for check in checks)


def test_verify_dichotomy():
    checks = verify("dichotomy")
    assert len(checks) == 4
    assert all(check.passed for check in checks), [c.to_record() for c in checks]


def test_cross_validation_oracle_is_not_matched_to_the_solver():
    fx = fixture("cross_validation")
    assert fx.extra == {"oracle_modes": 28}


def test_verify_unknown_tag():
    with pytest.raises(ConfigError):
        verify("supercritical")


@pytest.mark.slow
@pytest.mark.parametrize("tag", [
    "main", "de_baseline", "critical_alpha_neg", "strip_critical", "cross_validation",
])
def test_verify_regimes(tag):
    checks = verify(tag)
    assert checks
    assert all(check.passed for check in checks), [c.to_record() for c in checks]
