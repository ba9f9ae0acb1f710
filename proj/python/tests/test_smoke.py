import math

import pytest

import twostrain as ts


def small(name="case1", nodes=11, steps=240):
    cfg = ts.preset(name)
    cfg.nodes = nodes
    cfg.steps_per_period = steps
    return cfg


def test_presets_listed():
    assert ts.preset_names() == ["baseline", "case1", "case2", "case3"]


def test_case1_preset_fields():
    cfg = ts.preset("case1")
    s1, s2 = cfg.strains
    assert s1.gamma == 0.096 and s1.c == 0.25
    assert s2.alpha == 0.6
    assert cfg.p == 0.8 and cfg.l == 0.2


def test_round_trip_hash():
    cfg = ts.preset("case2")
    again = ts.parse_config(cfg.dump())
    assert again.hash() == cfg.hash()
    assert again == cfg


def test_bias_constraint_rejected():
    with pytest.raises(ts.ConfigError, match="p >= l"):
        ts.parse_config("preset: case1\nmodel: {p: 0.2, l: 0.8}\n")


def test_constant_oracle():
    # Homogeneous constant coefficients: R = sqrt(c beta * alpha beta p M / (l N (d+gamma) eta)).
    cfg = small()
    cfg.beta = ts.FieldSpec()
    cfg.beta.value = 2.0
    model = ts.Model(cfg)
    out = model.basic_numbers(tol=1e-9)
    d = 1.0 / 864.0
    for key, s in (("R1", cfg.strains[0]), ("R2", cfg.strains[1])):
        oracle = math.sqrt(s.c * 2.0 * s.alpha * 2.0 * 0.8 * 220.0 / (0.2 * 110.0 * (d + s.gamma) * 0.8))
        assert out[key]["value"] == pytest.approx(oracle, rel=1e-6)


def test_zero_initial_stays_disease_free():
    model = ts.Model(small())
    res = model.simulate(initial="zero", t_end=24.0, burn_in=12.0)
    assert res["classification"] == "disease-free"
    assert res["final_state"].shape == (4, 11)
    assert float(abs(res["final_state"]).max()) == 0.0


def test_vector_bias_law():
    rows = ts.vector_bias_scaling(small(), [0.25, 1.0], tol=1e-8)
    assert rows[0]["R0"] / rows[1]["R0"] == pytest.approx(2.0, rel=1e-4)


def test_seasonal_beta_mean_form():
    assert ts.seasonal_beta(0.0, a0=5.0, b0=0.5) == pytest.approx(2.5)


def test_run_scenario_writes_outputs(tmp_path, monkeypatch):
    monkeypatch.setenv("TWOSTRAIN_OUTPUT_ROOT", str(tmp_path))
    cfg = small()
    cfg.periods = 2
    cfg.burn_in_periods = 1
    man = ts.run_scenario(cfg, invasion=False, simulate=True)
    assert man["ok"], man["stages"]
    names = {o["path"] for o in man["outputs"]}
    assert {"numbers.csv", "trajectory.csv", "persistence.csv"} <= names
