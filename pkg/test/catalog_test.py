from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from fracsubspace import catalog
from fracsubspace.errors import Inconsistent, NotInvariantError, ParamOutOfRange, SchemaError, UnknownExample
from fracsubspace.examples import example_ids, problem_spec
from fracsubspace.fode import fode_residual
from fracsubspace.series import series_eval
from fracsubspace.spec import STAGE_CLASSICAL, STAGE_INVARIANCE, STAGE_PSI, STAGE_RESIDUAL, STAGE_SOLVER

IDS = example_ids()


def failed(report):
    return [f"{s.name}: {s.detail}" for s in report.stages if not s.passed]


def test_catalog_lists_ten_problems():
    listed = catalog.list_examples()
    assert len(listed) == 10
    assert [eid for eid, _, _ in listed] == IDS
    assert all(title and provenance for _, title, provenance in listed)


@pytest.mark.parametrize("example_id", IDS)
def test_reduction_matches_recorded_right_sides(example_id):
    report = catalog.verify(example_id, stages=(STAGE_INVARIANCE, STAGE_PSI))
    assert report.passed, failed(report)
    assert [s.name for s in report.stages] == [STAGE_INVARIANCE, STAGE_PSI]


@pytest.mark.parametrize("example_id", IDS)
def test_full_verification_at_defaults(example_id):
    report = catalog.verify(example_id)
    assert report.passed, failed(report)
    assert report.stage(STAGE_RESIDUAL).value <= 1e-8


@pytest.mark.parametrize("example_id", IDS)
def test_residual_at_random_orders(example_id):
    for draw in catalog.random_draws(example_id, 3, seed=11):
        report = catalog.verify(example_id, draw, stages=(STAGE_INVARIANCE, STAGE_RESIDUAL))
        assert report.passed, (draw, failed(report))


@pytest.mark.parametrize("example_id", ["boussinesq-system", "boussinesq-2d", "diffusion-like"])
def test_classical_limits(example_id):
    report = catalog.verify(example_id, stages=(STAGE_INVARIANCE, STAGE_CLASSICAL))
    assert report.stage(STAGE_CLASSICAL).passed, failed(report)


def test_second_subspace_is_invariant_without_closed_form():
    report = catalog.verify("boussinesq-2d", subspace="quartic")
    assert report.passed, failed(report)
    names = [s.name for s in report.stages]
    assert STAGE_RESIDUAL not in names
    assert STAGE_CLASSICAL not in names


def test_exponential_subspace_of_dispersive_kdv():
    report = catalog.verify("dispersive-kdv", subspace="ml")
    assert report.passed, failed(report)


def test_dispersive_kdv_structure_size():
    report = catalog.verify("dispersive-kdv", {"n": 3}, stages=(STAGE_INVARIANCE, STAGE_PSI, STAGE_RESIDUAL))
    assert report.passed, failed(report)
    bound = catalog.bind("dispersive-kdv", {"n": 3})
    assert bound.spec.variables == ["x1", "x2", "x3"]
    with pytest.raises(UnknownExample):
        catalog.bind("dispersive-kdv", {"n": 0})
    with pytest.raises(ParamOutOfRange):
        catalog.bind("dispersive-kdv", {"n": Fraction(3, 2)})


def test_non_invariant_problem_is_reported():
    spec = replace(problem_spec("boussinesq-system"), operators=["-D(g,x,beta)", "f*f"])
    report = catalog.verify(spec)
    assert not report.passed
    assert [s.name for s in report.stages] == [STAGE_INVARIANCE]
    assert "leaves the subspace" in report.stage(STAGE_INVARIANCE).detail
    with pytest.raises(NotInvariantError):
        catalog.sample(spec)


@pytest.mark.parametrize("example_id,params,error", [
    ("no-such-problem", {}, UnknownExample),
    ("burgers-coupled", {"alpha": "1/2"}, ParamOutOfRange),
    ("burgers-coupled", {"alpha": 1}, ParamOutOfRange),
    ("burgers-coupled", {"a1": 0}, ParamOutOfRange),
    ("kdv-system", {"a1": 5}, ParamOutOfRange),
    ("mixed", {"gamma": "0.9"}, ParamOutOfRange),
    ("mixed", {"delta": 1}, SchemaError),
])
def test_bind_rejects(example_id, params, error):
    with pytest.raises(error):
        catalog.bind(example_id, params)


def test_bind_rejects_unknown_subspace():
    with pytest.raises(UnknownExample, match="no subspace"):
        catalog.bind("mixed", subspace="quartic")


def test_verify_rejects_bad_arguments():
    with pytest.raises(SchemaError):
        catalog.verify("mixed", stages=("telepathy",))
    with pytest.raises(SchemaError):
        catalog.verify("mixed", tol=0.0)


def test_split_settings():
    spec = problem_spec("burgers-coupled")
    params, bindings = catalog.split_settings(spec, {"alpha": "3/10", "M1": 2.0})
    assert params == {"alpha": "3/10"}
    assert bindings == {"M1": 2.0}
    with pytest.raises(SchemaError, match="known:"):
        catalog.split_settings(spec, {"zeta": 1})


@pytest.mark.parametrize("text,values,margin,expected", [
    ("gamma < alpha1", {"gamma": 0.3, "alpha1": 0.7}, 0.0, True),
    ("gamma < alpha1", {"gamma": 0.7, "alpha1": 0.7}, 0.0, False),
    ("alpha1 - gamma >= 3/10", {"gamma": 0.3, "alpha1": 0.7}, 0.0, True),
    ("b1 + b2 > a1", {"b1": 2.0, "b2": 1.0, "a1": 2.9}, 0.2, False),
])
def test_constraint_holds(text, values, margin, expected):
    assert catalog.constraint_holds(text, values, margin) is expected


def test_random_draws_are_reproducible_and_admissible():
    first = catalog.random_draws("mixed", 5, seed=3)
    assert first == catalog.random_draws("mixed", 5, seed=3)
    for draw in first:
        assert set(draw) == {"alpha1", "alpha2", "beta", "gamma"}
        assert all(v.denominator in (1, 2, 4, 5, 10, 20, 25, 50, 100) for v in draw.values())
        assert draw["alpha1"] - draw["gamma"] >= Fraction(3, 10)
        assert draw["alpha2"] - draw["gamma"] >= Fraction(3, 10)
        catalog.bind("mixed", draw)


def test_random_draws_avoid_excluded_orders():
    for draw in catalog.random_draws("burgers-coupled", 20, seed=5):
        assert abs(draw["alpha"] - Fraction(1, 2)) >= Fraction(1, 20)
        assert draw["alpha"] <= Fraction(19, 20)


def test_reduce_problem_and_solve():
    system = catalog.reduce_problem("boussinesq-system")
    assert system.unknowns == ["K1", "K2", "L1", "L2"]
    _, branches = catalog.solve("burgers-coupled")
    assert branches and all(set(b.series) == {"K1", "K2", "L1", "L2"} for b in branches)
    _, [sol] = catalog.solve("diffusion-like")
    assert set(sol.series) == {"K1", "K2", "K3"}
    with pytest.raises(Inconsistent):
        catalog.solve("boussinesq-2d", subspace="quartic")


def test_solver_stage_finds_power_branch():
    report = catalog.verify("kdv-system", bindings={"M1": 0.5, "sigma": -1.0},
                            stages=(STAGE_INVARIANCE, STAGE_SOLVER))
    solver = report.stage(STAGE_SOLVER)
    assert solver.passed, solver.detail
    assert "branch" in solver.detail


def test_build_returns_bound_spec():
    spec, known = catalog.build("coupled-system", {"alpha1": "0.6"}, {"c1": 2.0})
    assert spec.params["alpha1"].value == Fraction(3, 5)
    assert spec.free_constants["c1"] == 2.0
    assert known is not None and set(known.coefficients) == {"K1", "K2", "L1"}
    # the default catalog entry is untouched
    assert problem_spec("coupled-system").params["alpha1"].value == Fraction(1, 2)


def test_sample_shape_and_determinism():
    frame = catalog.sample("boussinesq-system")
    assert list(frame.columns) == ["t", "x", "f", "g"]
    assert len(frame) == 25
    assert np.all(np.isfinite(frame.to_numpy()))
    again = catalog.sample("boussinesq-system")
    assert frame.equals(again)


def test_sample_values_match_closed_form():
    frame = catalog.sample("diffusion-like", params={"alpha": 1, "beta": 1, "gamma": 1},
                           grid={"t": [0.2, 1.0, 3], "x": [0.5, 1.5, 2], "y": [0.5, 1.5, 2]})
    assert len(frame) == 12
    want = np.sinh(frame["t"]) * frame["x"] ** 2 + np.cosh(frame["t"]) * frame["y"] ** 2
    np.testing.assert_allclose(frame["f"], want, rtol=1e-10)


def test_sample_requires_closed_form():
    with pytest.raises(SchemaError, match="no closed-form"):
        catalog.sample("boussinesq-2d", subspace="quartic", force=True)


def test_sample_rejects_bad_grid():
    with pytest.raises(SchemaError):
        catalog.sample("mixed", grid={"z": [0, 1, 2]})
    with pytest.raises(SchemaError):
        catalog.sample("mixed", grid={"t": [1.0, 0.1, 3]})


def test_verify_many_orders_reports_by_id():
    reports = catalog.verify_many(["mixed", "coupled-system"], stages=(STAGE_INVARIANCE,))
    assert list(reports) == ["coupled-system", "mixed"]
    assert all(r.passed for r in reports.values())


def test_population_nim_reaches_the_series_solution():
    report = catalog.verify("population", stages=(STAGE_INVARIANCE, STAGE_SOLVER))
    solver = report.stage(STAGE_SOLVER)
    assert solver.passed, solver.detail
    assert "NIM" in solver.detail


def test_population_nim_residual_decreases():
    bound = catalog.bind("population")
    known = bound.known.coefficients
    sums = catalog.nim_partials(bound, 8)
    assert len(sums) == 9
    t = np.linspace(0.1, 1.0, 5)
    worst = []
    for s in sums[1:]:
        res = fode_residual(bound.system, {"K1": s, "K2": known["K2"], "K3": known["K3"]})["K1"]
        worst.append(float(np.max(np.abs(series_eval(res, {"t": t})))))
    assert all(b < a for a, b in zip(worst, worst[1:])), worst


def test_nim_partials_needs_nim_data():
    with pytest.raises(SchemaError, match="no NIM data"):
        catalog.nim_partials(catalog.bind("mixed"))


def test_residual_sees_solution_terms_far_from_t0():
    spec = problem_spec("dispersive-kdv")
    ml = spec.subspaces["ml"]
    wrong = dict(ml.solution, K1="a1*E(t,alpha,-lambda1^3) + t^(8*alpha)/1000")
    spec = replace(spec, subspaces={**spec.subspaces, "ml": replace(ml, solution=wrong)})
    report = catalog.verify(spec, subspace="ml", stages=(STAGE_RESIDUAL,))
    assert not report.passed
    assert report.stage(STAGE_RESIDUAL).value > 1e-8
