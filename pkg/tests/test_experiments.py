import json
import math

import numpy as np
import pytest

from nibp import experiments as ex


def small(**kw):
    base = dict(graphs={"count": 2}, p_min=1, p_max=2, restarts=1, random_points=2, shots=50,
                optimizer={"max_evals": 20}, verify={"instances": 6},
                gradcheck={"instances": 3, "n_max": 2, "L_max": 2},
                landscape={"p_values": [1, 2], "grid": 3})
    base.update(kw)
    return ex.config_from_dict(base)


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        ex.config_from_dict({"nosie": 0.9})
    with pytest.raises(ValueError, match="unknown"):
        ex.config_from_dict({"verify": {"instance": 3}})
    with pytest.raises(ValueError):
        ex.config_from_dict({"noise": {"qx": 0.9, "qy": -0.9, "qz": 0.9}})
    with pytest.raises(ValueError):
        ex.config_from_dict({"backend": "gpu"})


def test_config_round_trip(tmp_path):
    cfg = small(seed=9)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    again = ex.load_config(path)
    assert again == cfg
    assert ex.load_config(path, seed=3).seed == 3


def test_seed_streams_are_disjoint():
    a = ex.rng_for(0, 2, 5).random()
    b = ex.rng_for(0, 2, 6).random()
    c = ex.rng_for(1, 2, 5).random()
    assert len({a, b, c}) == 3
    assert ex.rng_for(0, 2, 5).random() == a


def test_linear_fit():
    fit = ex.linear_fit([1, 2, 3], [2.0, 4.0, 6.0])
    assert fit["slope"] == pytest.approx(2.0) and fit["r2"] == pytest.approx(1.0)


def test_csv_writer_full_precision(tmp_path):
    ex.write_csv(tmp_path / "r.csv", ["a", "b"], [{"a": 0.1 + 0.2, "b": True}])
    assert (tmp_path / "r.csv").read_text() == "a,b\n0.30000000000000004,true\n"


def test_json_writer_maps_nan_to_null(tmp_path):
    ex.write_json(tmp_path / "s.json", {"x": math.nan, "y": np.float64(1.5)})
    assert json.loads((tmp_path / "s.json").read_text()) == {"x": None, "y": 1.5}


def test_verify_outputs(tmp_path):
    summary = ex.run_bound_verification(small(), tmp_path)
    assert summary["violations"] == 0
    header = (tmp_path / "results.csv").read_text().splitlines()[0]
    assert header.split(",") == ex.VERIFY_COLUMNS
    assert (tmp_path / "config.resolved").exists()


def test_verify_independent_of_jobs():
    cfg = small(verify={"instances": 4})
    rows1 = [ex.verify_instance(0, i, cfg.verify, "dense") for i in range(4)]
    rows2 = [ex.verify_instance(0, i, cfg.verify, "dense") for i in reversed(range(4))][::-1]
    assert rows1 == rows2


def test_qaoa_small_run(tmp_path):
    rows, summary = ex.run_qaoa_experiment(small(), tmp_path)
    assert len(rows) == 4
    assert summary["noise_is_stand_in"] is True
    assert summary["violations"] == 0
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert lines[0].split(",") == ex.QAOA_COLUMNS and len(lines) == 5


def test_edgeless_graph_is_a_missing_record(tmp_path):
    g = tmp_path / "empty.txt"
    g.write_text("# nodes 3\n")
    h = tmp_path / "edge.txt"
    h.write_text("# nodes 3\n0 1\n")
    cfg = small(n=3, graphs={"files": [str(g), str(h)]})
    rows, summary = ex.run_qaoa_experiment(cfg)
    assert summary["excluded_edgeless"] == [0]
    assert all(math.isnan(r["ratio_noise_free_training"]) for r in rows if r["graph_id"] == 0)
    assert summary["per_p"]["1"]["graphs"] == 1


def test_landscape_and_gradcheck(tmp_path):
    res = ex.run_landscape(small(), tmp_path / "land")
    assert set(res["per_p"]) == {"1", "2"}
    assert (tmp_path / "land" / "landscape_p2.csv").exists()
    summary = ex.run_gradcheck(small(), tmp_path / "gc")
    assert summary["failures"] == 0


def test_depolarized_instances_sit_at_centre():
    from nibp import gradient as gr
    from nibp.channels import NoiseSpec
    opts = ex.VerifyOptions(instances=12)
    for i in range(12):
        family, a, o, rho, noise, theta = ex.sample_instance(0, i, opts)
        dead = NoiseSpec.uniform(a.n, 0.0)
        assert gr.cost(a, theta, o, rho, dead) == pytest.approx(o.trace / 2**a.n, abs=1e-14)


def test_single_qubit_rows_are_tight():
    opts = ex.VerifyOptions(instances=40)
    i = next(i for i in range(40) if ex.sample_instance(0, i, opts)[0] == "single_qubit")
    from nibp import gradient as gr
    from nibp import bounds as bd
    from nibp.channels import NoiseSpec
    rho_a = ex.sample_instance(0, i, opts)[1]
    spec = NoiseSpec.uniform(1, 0.8)
    z = ex.PauliSum(1, {"Z": 1.0})
    ratio = abs(gr.exact_partial(rho_a, [np.pi / 2], z, (0, 0), noise=spec)) / \
        bd.factor_bound(rho_a, (0, 0), z, 0.8)
    assert ratio == pytest.approx(1.0, abs=1e-9)


def test_p_zero_rejected():
    with pytest.raises(ValueError):
        ex.config_from_dict({"p_min": 0})


def test_landscape_limits():
    from nibp import ansatz as az
    from nibp import state as sv
    from nibp.channels import NoiseSpec
    from nibp.maxcut import cycle_graph, maxcut_hamiltonian
    g = cycle_graph(3)
    a = az.build_qaoa(g, 1)
    hp = maxcut_hamiltonian(g)
    _, clean = ex.landscape(a, hp, [0, 0], (0, 1), 5)
    _, near = ex.landscape(a, hp, [0, 0], (0, 1), 5, NoiseSpec.uniform(3, 1 - 1e-13))
    np.testing.assert_allclose(near, clean, atol=1e-9)
    _, flat = ex.landscape(a, hp, [0, 0], (0, 1), 5, NoiseSpec.uniform(3, 0.7),
                           sv.maximally_mixed(3))
    np.testing.assert_allclose(flat, hp.trace / 8, atol=1e-15)
    with pytest.raises(ValueError):
        ex.landscape(a, hp, [0, 0], (1, 1), 5)


def test_records_carry_bounds(tmp_path):
    rows, _ = ex.run_qaoa_experiment(small())
    for r in rows:
        assert r["within_bounds"] and r["mean_abs_cost"] <= r["cost_bound"]
