import math
import os

import pytest

import poise

ROUTINES = os.path.join(os.path.dirname(__file__), "..", "..", "routines")


def quiet():
    cfg = poise.SimConfig()
    cfg.noise_sigma = 0.0
    return cfg


def test_scale_round_trip():
    z = poise.scale([48.0], [40.0], [56.0])
    assert z == [0.5]
    assert poise.unscale(z, [40.0], [56.0]) == [48.0]
    with pytest.raises(poise.PoiseError) as err:
        poise.scale([39.0], [40.0], [56.0])
    assert err.value.kind == "bounds-violation"


@pytest.mark.parametrize("algorithm", ["nm", "mds", "tr"])
def test_minimize_python_objective(algorithm):
    res = poise.minimize(lambda x: (x[0] - 2.0) ** 2, [-10.0], [10.0], [0.0], [1e-3],
                         algorithm=algorithm, max_fev=200)
    assert abs(res["x_best"][0] - 2.0) <= 1e-3
    assert res["nfev"] == len(res["trajectory"])


def test_grid_search():
    res = poise.grid_search(lambda x: (x[0] - 2.0) ** 2, [0.0], [4.0], [0.5], steps=[5])
    assert [x for x, _ in res["trajectory"]] == [[0.0], [1.0], [2.0], [3.0], [4.0]]
    assert res["x_best"] == [2.0]


def test_routine_round_trip():
    r = poise.load_routine("p1cal", ROUTINES)
    assert r.pars == ["p1"]
    assert poise.parse_routine(poise.write_routine(r)) == r
    assert "solvsupp4" in poise.list_routines(ROUTINES)
    with pytest.raises(poise.PoiseError) as err:
        poise.parse_routine('{"name": "x"}')
    assert err.value.kind == "validation"


def test_costs():
    s = poise.Spectrum([3.0, -3.0], [4.0, 4.0], 1000.0, 0.0, 100.0)
    assert poise.cost("minabsint", s) == 10.0
    assert poise.cost("zerorealint", s) == 6.0
    assert poise.cost("specdiff", s, target=s) == pytest.approx(0.0, abs=1e-15)
    assert "dosy_2p" in poise.cost_names()
    with pytest.raises(poise.PoiseError) as err:
        poise.cost("nosuchcost", s)
    assert err.value.kind == "unknown-cost"


def test_run_and_log(tmp_path):
    out = poise.run("p1cal", sim_config=quiet(), out_dir=str(tmp_path), routines_dir=ROUTINES)
    assert abs(out["x_best"][0] - 48.4) <= 0.2
    assert out["nfev"] <= 12
    log = poise.parse_log(out["log_path"])
    assert len(log["rows"]) == out["nfev"]
    assert log["f_best"] == out["f_best"]
    assert log["error"] is None


def test_sim_config_text():
    cfg = poise.SimConfig.from_text("p360_true = 50\n")
    assert cfg.p360_true == 50.0
    assert poise.SimConfig.from_text(cfg.to_text()).p360_true == 50.0
    assert math.isclose(poise.ernst_angle_deg(1.2, 1.75), 59.76, abs_tol=0.05)


def test_dosy_drivers():
    still = quiet()
    still.diffusion_d = 0.0
    with pytest.raises(poise.PoiseError) as err:
        poise.dosy_sequential(sim_config=still, routines_dir=ROUTINES)
    assert err.value.kind == "insufficient-diffusion-weighting"
    out = poise.dosy_simultaneous(sim_config=quiet(), max_fev=6, routines_dir=ROUTINES)
    assert out["acquisitions"] == 2 * out["nfev"]
