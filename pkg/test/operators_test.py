import math
from fractions import Fraction

import numpy as np
import pytest

from fracsubspace.errors import NotInvariantError, ParseError, SchemaError
from fracsubspace.fracalc import ml_exp_series
from fracsubspace.operators import (OperatorContext, SolutionForm, TimeOperator, build_basis, build_series,
                                    check_invariant, compile_operator, format_system, generic_element, mesh,
                                    op_apply, reduce, residual)
from fracsubspace.poly import Poly
from fracsubspace.series import ExponentVector, GenSeries, ParamTable, series_eval
from fracsubspace.types import TimeTerm

ALPHA = ExponentVector.param("alpha")
HALF = Fraction(1, 2)


@pytest.fixture
def ctx():
    table = ParamTable({"alpha": HALF, "beta": HALF, "gamma": Fraction(1, 4)})
    return OperatorContext(space_variables=("x",), params=table, values={**table.as_floats(), "lam": -1.5},
                           components=("u",), order_names=("alpha", "beta", "gamma"))


def caputo_time(alpha=ALPHA):
    return TimeOperator({"u": [TimeTerm(1.0, alpha)]})


def test_compile_shapes(ctx):
    op = compile_operator("-2*D(u, x, beta, 2) + u*D(u, x, beta)", ctx)
    assert "D(u,x,beta,2)" in str(op)
    assert [r.name for r in op.component_refs()] == ["u", "u", "u"]


@pytest.mark.parametrize("text,message", [
    ("D(u, t, alpha)", "expected one of the variables"),
    ("foo(u)", "unknown function"),
    ("u/u", "division by scalars"),
    ("D(u, x)", "takes 3\\+ arguments"),
    ("u^beta", "non-negative integer"),
])
def test_compile_errors(ctx, text, message):
    with pytest.raises(ParseError, match=message):
        compile_operator(text, ctx)


def test_build_series_special_functions(ctx):
    e = build_series("E(x, beta, -2)", ctx)
    assert series_eval(e, {"x": 0.0}) == pytest.approx(1.0)
    x_pow = build_series("3*x^beta", ctx)
    assert series_eval(x_pow, {"x": 4.0}) == pytest.approx(6.0)


def test_op_apply_on_concrete_field(ctx):
    u = build_series("x^(2*beta)", ctx)
    [image] = op_apply([compile_operator("D(u, x, beta)", ctx)], [u], ctx)
    # D^(1/2) x = Gamma(2)/Gamma(3/2) x^(1/2)
    assert series_eval(image, {"x": 4.0}) == pytest.approx(2.0 / math.gamma(1.5))


def test_generic_element(ctx):
    basis = build_basis([["1", "x^beta"]], [["K1", "K2"]], ctx)
    [(_, u)] = generic_element(basis, ctx).items()
    assert u.coefficient_symbols() == {"K1", "K2"}


def test_invariant_quadratic_operator(ctx):
    N = [compile_operator("u*D(u, x, beta)", ctx)]
    basis = build_basis([["1", "x^beta"]], [["K1", "K2"]], ctx)
    report = check_invariant(N, basis, ctx)
    assert report.invariant
    g = math.gamma(1.5)
    k1, k2 = Poly.symbol("K1"), Poly.symbol("K2")
    assert report.psi[0][0].close_to(g * k1 * k2)
    assert report.psi[0][1].close_to(g * k2 * k2)


def test_non_invariant_operator(ctx):
    N = [compile_operator("u*u", ctx)]
    basis = build_basis([["1", "x^beta"]], [["K1", "K2"]], ctx)
    report = check_invariant(N, basis, ctx)
    assert not report.invariant
    assert report.warnings and "leaves the subspace" in report.warnings[0]
    with pytest.raises(NotInvariantError):
        reduce(caputo_time(), N, basis, ctx, report)


def test_reduce_and_format(ctx):
    N = [compile_operator("u*D(u, x, beta)", ctx)]
    basis = build_basis([["1", "x^beta"]], [["K1", "K2"]], ctx)
    system = reduce(caputo_time(), N, basis, ctx)
    assert system.unknowns == ["K1", "K2"]
    lines = format_system(system)
    assert len(lines) == 2
    assert lines[0].startswith("D^(alpha)[K1] = ")
    assert "K1*K2" in lines[0]
    assert lines[1].endswith("*K2^2")


def test_mixed_derivative_symbols(ctx):
    N = [compile_operator("Dt(u, gamma) + u", ctx)]
    basis = build_basis([["1"]], [["K1"]], ctx)
    system = reduce(caputo_time(), N, basis, ctx)
    assert system.derivative_symbols == {"D[gamma]K1": ("K1", ExponentVector.param("gamma"))}
    assert system.equations[0].rhs.close_to(Poly.symbol("D[gamma]K1") + Poly.symbol("K1"))


def test_time_operator_validation(ctx):
    caputo_time().validate(ctx.params)
    TimeOperator({"u": [TimeTerm(1.0, ALPHA), TimeTerm(2.0, ALPHA + 1)]}).validate(ctx.params)
    TimeOperator({"u": [TimeTerm(1.0, ALPHA), TimeTerm(1.0, ALPHA, repeat=2)]}).validate(ctx.params)
    with pytest.raises(SchemaError):
        TimeOperator({"u": [TimeTerm(1.0, ALPHA), TimeTerm(1.0, ALPHA * 3)]}).validate(ctx.params)
    with pytest.raises(SchemaError):
        TimeOperator({"u": []}).validate(ctx.params)
    with pytest.raises(SchemaError):
        TimeOperator({"u": [TimeTerm(1.0, ALPHA)]}, kind="grunwald").validate(ctx.params)


def test_residual_of_mittag_leffler_solution(ctx):
    N = [compile_operator("lam*u", ctx)]
    basis = build_basis([["x^beta"]], [["K1"]], ctx)
    grid = {"t": np.linspace(0.1, 1.0, 5), "x": np.linspace(0.1, 1.0, 5)}
    good = ml_exp_series(("t",), ctx.params, "t", ALPHA, -1.5, frontier=Fraction(6))
    form = SolutionForm.from_coefficients({"K1": good}, basis, ctx)
    assert residual(caputo_time(), N, form, grid, ctx) < 1e-12
    bad = ml_exp_series(("t",), ctx.params, "t", ALPHA, -3.0, frontier=Fraction(6))
    wrong = SolutionForm.from_coefficients({"K1": bad}, basis, ctx)
    assert residual(caputo_time(), N, wrong, grid, ctx) > 1e-3


def test_solution_form_evaluate_matches_assembled(ctx):
    basis = build_basis([["x^beta"]], [["K1"]], ctx)
    k = GenSeries.monomial(("t",), ctx.params, "t", ALPHA, 2.0)
    form = SolutionForm.from_coefficients({"K1": k}, basis, ctx)
    point = mesh({"t": [1.0, 4.0], "x": [1.0, 9.0]}, ("t", "x"))
    direct = form.evaluate(point)["u"]
    assembled = series_eval(form.assemble(("t", "x"))["u"], point)
    np.testing.assert_allclose(direct, assembled)
    np.testing.assert_allclose(direct, 2.0 * np.sqrt(point["t"]) * np.sqrt(point["x"]))


def test_solution_form_missing_symbol(ctx):
    basis = build_basis([["1", "x^beta"]], [["K1", "K2"]], ctx)
    with pytest.raises(SchemaError):
        SolutionForm.from_coefficients({"K1": GenSeries.zero(("t",), ctx.params)}, basis, ctx)


def test_psi_reassembles_numeric_images(ctx):
    N = [compile_operator("u*D(u, x, beta) - 3*u + D(u, x, beta, 2)", ctx)]
    basis = build_basis([["1", "x^beta"]], [["K1", "K2"]], ctx)
    report = check_invariant(N, basis, ctx)
    assert report.invariant
    generic = generic_element(basis, ctx)["u"]
    xs = np.linspace(0.1, 2.0, 7)
    rng = np.random.default_rng(5)
    for _ in range(50):
        k = {"K1": float(rng.uniform(-2, 2)), "K2": float(rng.uniform(-2, 2))}
        [image] = op_apply(N, [generic.substitute(k)], ctx)
        got = np.asarray(series_eval(image, {"x": xs})) * np.ones_like(xs)
        want = sum(psi.evaluate(k) * series_eval(phi, {"x": xs})
                   for psi, phi in zip(report.psi[0], basis.functions[0])) * np.ones_like(xs)
        np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-12)


def test_psi_follows_rescaled_basis(ctx):
    N = [compile_operator("u*D(u, x, beta) - 3*u", ctx)]
    plain = check_invariant(N, build_basis([["1", "x^beta"]], [["K1", "K2"]], ctx), ctx)
    scaled = check_invariant(N, build_basis([["1", "3*x^beta"]], [["K1", "K2"]], ctx), ctx)
    assert scaled.invariant
    # K2 on 3*x^beta plays the role of 3*K2 on x^beta
    sub = {"K2": 3 * Poly.symbol("K2")}
    assert scaled.psi[0][0].close_to(plain.psi[0][0].substitute(sub))
    assert (scaled.psi[0][1] * 3).close_to(plain.psi[0][1].substitute(sub))
