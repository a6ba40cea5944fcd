import filecmp
import math
import os

import pytest

import coldloop


def test_design_point_and_analytic_cost():
    d = coldloop.DesignPoint(12.0, 15.0, 0.0)
    assert d.v == 12.0 and d.r == 15.0 and d.theta == 0.0
    fast = coldloop.analytic_flattening_cost(d)
    slow = coldloop.analytic_flattening_cost(coldloop.DesignPoint(4.0, 15.0, 0.0))
    assert 0.0 < fast < slow


def test_lattice_count():
    assert coldloop.fcc_atom_count([36.1, 36.1, 18.05], 3.61) == 2000


def test_latin_hypercube_strata():
    pts = coldloop.latin_hypercube(10, 3, 5)
    assert len(pts) == 10
    for k in range(3):
        assert sorted(int(p[k] * 10) for p in pts) == list(range(10))


def test_minimize_python_callable():
    calls = []

    def sphere(x):
        calls.append(1)
        return sum(v * v for v in x)

    res = coldloop.minimize(sphere, [-5.0] * 3, [5.0] * 3, "pso", seed=3, population=20, generations=100)
    assert res["calls"] == 2000 == len(calls)
    assert res["best_f"] < 1e-4
    fs = [e["best_f"] for e in res["trace"]]
    assert all(b <= a for a, b in zip(fs, fs[1:]))


def test_config_round_trip_and_errors():
    c = coldloop.RunConfig()
    c.seed = 42
    c.design = coldloop.DesignPoint(11.0, 12.5, 7.25)
    back = coldloop.RunConfig.from_ini(c.to_ini())
    assert back == c and back.seed == 42
    assert coldloop.RunConfig.full_scale().substrate_lengths == [240.0, 240.0, 50.0]
    assert len(coldloop.config_schema()) > 40
    with pytest.raises(coldloop.ParseError, match=":3:"):
        coldloop.RunConfig.from_ini("[md]\ndt = 0.001\nbogus = 1\n")


def test_budgets_on_analytic_objective(tmp_path):
    c = coldloop.RunConfig()
    c.objective = "analytic"
    out = str(tmp_path)
    runs = []
    for alg, tp in (("ego", 120), ("pso", 2000), ("de", 2000)):
        c.algorithm = alg
        r = coldloop.optimize(c, out)
        assert r["ledger"]["total_tp"] == tp
        runs.append(r["run_dir"])
    c.epochs = 100
    t = coldloop.train_surrogate(c, out)
    assert t["ledger"]["modeling_tp"] == 1000 and t["ledger"]["optimization_tp"] == 0
    assert len(t["validation_mse"]) == 100
    net_path = os.path.join(t["run_dir"], "network.json")
    net = coldloop.MLPNetwork.load(net_path)
    assert net.layers == [3, 5, 5, 5, 1]
    assert math.isfinite(net.forward([8.0, 15.0, 10.0]))
    c.algorithm = "pso"
    c.verify = True
    s = coldloop.surrogate_optimize(c, net_path, out)
    assert s["ledger"]["optimization_tp"] == 0 and s["ledger"]["verification_tp"] == 1
    assert s["verified_c"] is not None
    md = coldloop.report(runs + [s["run_dir"]], out)
    assert "| BPNN-PSO | 1000 t_p | - | 1000 t_p | 1 t_p |" in md


def test_simulate_measure_and_determinism(tmp_path):
    c = coldloop.RunConfig.from_ini(
        "[scene]\nsubstrate_x = 43.32\nsubstrate_y = 43.32\nsubstrate_z = 14.44\nstandoff = 6\n"
        "[md]\npost_contact_time = 1\nequilibration_time = 0.1\n[design]\nv = 12\nr = 10\n"
    )
    a = coldloop.simulate(c, str(tmp_path / "a"))
    b = coldloop.simulate(c, str(tmp_path / "b"))
    assert a["frames"] == 4
    names = sorted(os.listdir(os.path.join(a["run_dir"], "dumps")))
    match, mismatch, errors = filecmp.cmpfiles(
        os.path.join(a["run_dir"], "dumps"), os.path.join(b["run_dir"], "dumps"), names, shallow=False
    )
    assert mismatch == [] and errors == [] and len(match) == 4
    img = coldloop.read_png(os.path.join(a["run_dir"], "topview_t0.png"))
    assert img.ndim == 2 and img.max() > 0
    m = coldloop.measure(c, os.path.join(a["run_dir"], "dumps"), str(tmp_path / "m"), audit=True)
    assert m["S_m"] > 0 and m["frames"] >= 1
    assert len(os.listdir(os.path.join(m["run_dir"], "audit"))) == 5 * m["frames"]
