import math

import pytest

import mvsp


def tiny():
    return mvsp.Instance.random((2, 2, 1, 2), 7, load_mean=2.0)


def test_exact_matches_oracle():
    inst = tiny()
    exact = mvsp.solve(inst)
    oracle = mvsp.solve(inst, method="oracle")
    assert exact["status"] == "optimal"
    assert abs(exact["objective"] - oracle["objective"]) <= 1e-9
    assert mvsp.check_feasibility(inst, exact["solution"])["feasible"]
    assert math.isclose(mvsp.objective(inst, exact["solution"]), exact["objective"], rel_tol=0, abs_tol=1e-12)


def test_heuristic_never_beats_exact():
    inst = mvsp.Instance.random((4, 3, 2, 3), 5, load_mean=2.0)
    exact = mvsp.solve(inst, max_nodes=200_000)
    heur = mvsp.solve(inst, method="heuristic")
    assert heur["status"] in ("feasible", "infeasible")
    if exact["status"] == "optimal" and heur["solution"] is not None:
        assert heur["objective"] >= exact["objective"] - 1e-9


def test_json_round_trip(tmp_path):
    inst = mvsp.Instance.random((3, 2, 2, 3), 4, load_mean=2.0)
    assert mvsp.Instance.from_json(inst.to_json()) == inst
    path = tmp_path / "inst.json"
    inst.save(path)
    assert mvsp.Instance.load(path) == inst
    sol = mvsp.solve(inst, max_nodes=10_000)["solution"]
    back = mvsp.Solution.from_json(inst, sol.to_json(inst))
    assert mvsp.objective(inst, back) == mvsp.objective(inst, sol)


def test_validation_error_names_field():
    with pytest.raises(mvsp.ValidationError, match="topology"):
        mvsp.Instance.from_json('{"catalog": {}, "demand": {}}')
    with pytest.raises(mvsp.ParseError):
        mvsp.Instance.from_json("{")


def test_comm_latency_round_trip_doubles():
    inst = tiny()
    edge = inst.edge_nodes[0]
    assert inst.comm_latency(inst.iot_nodes[0], edge) > 0


def test_import_rejects_fractional_binary():
    inst = tiny()
    name = next(n for n in mvsp.column_names(inst) if n.startswith("x_"))
    with pytest.raises(mvsp.IntegrityError):
        mvsp.import_values(inst, [(name, 0.5)])


def test_external_solver_round_trip(tmp_path):
    highspy = pytest.importorskip("highspy")
    inst = mvsp.Instance.random((3, 2, 1, 2), 11, load_mean=2.0)
    path = tmp_path / "model.mps"
    mvsp.export_mps(inst, str(path))

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 0.0)
    assert h.readModel(str(path)) == highspy.HighsStatus.kOk
    h.run()
    status = h.getModelStatus()
    exact = mvsp.solve(inst)
    if exact["status"] == "infeasible":
        assert status == highspy.HighsModelStatus.kInfeasible
        return
    assert status == highspy.HighsModelStatus.kOptimal

    lp = h.getLp()
    values = list(zip(lp.col_names_, h.getSolution().col_value))
    solution, report = mvsp.import_values(inst, values)
    assert report["feasible"], report["violations"]
    assert math.isclose(mvsp.objective(inst, solution), exact["objective"], rel_tol=1e-6, abs_tol=1e-6)
    assert math.isclose(h.getInfo().objective_function_value, exact["objective"], rel_tol=1e-6, abs_tol=1e-6)
