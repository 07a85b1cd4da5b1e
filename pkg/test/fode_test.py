import math
from fractions import Fraction

import numpy as np
import pytest

from fracsubspace.errors import Inconsistent, PoleError, StepError, TruncationStall
from fracsubspace.fode import (adams_pece, match_power_branch, nim_iteration_count, nim_partial_sums, nim_solve,
                               power_law_rate, solve_power_ansatz, solve_series, two_order_closed_form,
                               two_order_series)
from fracsubspace.poly import Poly
from fracsubspace.series import ExponentVector, GenSeries, ParamTable, series_eval
from fracsubspace.spec import CAPUTO, RIEMANN_LIOUVILLE
from fracsubspace.specfun import MLParams, mittag_leffler
from fracsubspace.types import FODEEquation, FODESystem, TimeTerm

ALPHA = ExponentVector.param("alpha")
K = Poly.symbol("K")


def linear_system(alpha, c, kind=CAPUTO):
    table = ParamTable({"alpha": Fraction(alpha)})
    return FODESystem([FODEEquation("K", [TimeTerm(1.0, ALPHA)], c * K)], kind, params=table)


@pytest.mark.parametrize("alpha", [Fraction(1, 2), Fraction(3, 4)])
def test_solve_series_linear_is_mittag_leffler(alpha):
    sol = solve_series(linear_system(alpha, -1.0), {"K": [1.0]}, frontier=Fraction(24))
    assert sol.tags == {"K": "Series"}
    for t in (0.2, 0.5, 0.9):
        expected = mittag_leffler(MLParams(float(alpha)), -t ** float(alpha))
        assert series_eval(sol.series["K"], {"t": t}) == pytest.approx(expected, rel=1e-10)


def test_solve_series_quadratic_matches_adams():
    # D^alpha K = -K^2, K(0) = 1/2
    table = ParamTable({"alpha": Fraction(4, 5)})
    sys = FODESystem([FODEEquation("K", [TimeTerm(1.0, ALPHA)], -1.0 * K * K)], CAPUTO, params=table)
    sol = solve_series(sys, {"K": [0.5]}, frontier=Fraction(12))
    times, traj = adams_pece(sys, {"K": [0.5]}, h=1e-3, horizon=0.5)
    assert series_eval(sol.series["K"], {"t": 0.5}) == pytest.approx(traj["K"][-1], abs=1e-4)


def test_solve_series_two_order_equation():
    # D^(3/2) K + 1/2 D^(1/2) K = -K, K(0) = 1, K'(0) = 0
    mu, nu = ExponentVector(Fraction(3, 2)), ExponentVector(Fraction(1, 2))
    table = ParamTable()
    sys = FODESystem([FODEEquation("K", [TimeTerm(1.0, mu), TimeTerm(0.5, nu)], -1.0 * K)], CAPUTO, params=table)
    sol = solve_series(sys, {"K": [1.0, 0.0]}, frontier=Fraction(20))
    closed = two_order_closed_form(0.8, 1.5, 0.5, 0.5, -1.0, [1.0, 0.0])
    assert series_eval(sol.series["K"], {"t": 0.8}) == pytest.approx(closed, rel=1e-7)
    two = two_order_series(("t",), table, "t", mu, nu, 0.5, -1.0, [1.0, 0.0], frontier=Fraction(20))
    assert series_eval(two, {"t": 0.8}) == pytest.approx(closed, rel=1e-7)


def test_solve_series_errors():
    with pytest.raises(Inconsistent, match="needs 1 initial values"):
        solve_series(linear_system(Fraction(1, 2), 1.0), {})
    with pytest.raises(Inconsistent):
        solve_series(linear_system(Fraction(1, 2), 1.0, RIEMANN_LIOUVILLE), {"K": [1.0]})


def test_adams_pece_against_mittag_leffler():
    times, traj = adams_pece(linear_system(Fraction(7, 10), -1.0), {"K": 1.0}, h=1e-3, horizon=1.0)
    assert times[-1] == pytest.approx(1.0)
    expected = np.array([mittag_leffler(MLParams(0.7), -t ** 0.7) for t in times])
    assert np.max(np.abs(traj["K"] - expected)) <= 1e-4


def test_adams_pece_error_shrinks_with_step():
    sys = linear_system(Fraction(7, 10), -1.0)

    def max_error(h):
        times, traj = adams_pece(sys, {"K": 1.0}, h=h, horizon=1.0)
        expected = np.array([mittag_leffler(MLParams(0.7), -t ** 0.7) for t in times])
        return np.max(np.abs(traj["K"] - expected))

    coarse, fine = max_error(1e-2), max_error(5e-3)
    assert fine < coarse / 1.5


def test_adams_pece_rejects_bad_steps():
    sys = linear_system(Fraction(1, 2), -1.0)
    with pytest.raises(StepError):
        adams_pece(sys, {"K": 1.0}, h=0.0, horizon=1.0)
    with pytest.raises(Inconsistent):
        adams_pece(linear_system(Fraction(3, 2), -1.0), {"K": [1.0, 0.0]}, h=0.1, horizon=1.0)


def test_nim_partial_sums_converge():
    table = ParamTable({"alpha": Fraction(1, 2)})
    g0 = GenSeries.constant(("t",), table, 1.0)
    sums = nim_partial_sums(g0, 0.25, ALPHA, 8, frontier=Fraction(8))
    assert len(sums) == 9
    exact = mittag_leffler(MLParams(0.5), 0.25)
    errors = [abs(series_eval(s, {"t": 1.0}) - exact) for s in sums]
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] <= 1e-6


def test_nim_truncation_stall():
    table = ParamTable({"alpha": Fraction(1, 2)})
    g0 = GenSeries.constant(("t",), table, 1.0)
    with pytest.raises(TruncationStall):
        nim_partial_sums(g0, 1.0, ALPHA, 5, frontier=Fraction(1))


def test_nim_iteration_count_stops_at_frontier():
    table = ParamTable({"alpha": Fraction(1, 2)})
    g0 = GenSeries.constant(("t",), table, 1.0)
    n = nim_iteration_count(g0, ALPHA, Fraction(8))
    assert n == 16
    sums = nim_partial_sums(g0, 1.0, ALPHA, n, frontier=Fraction(8))
    assert len(sums) == n + 1
    with pytest.raises(TruncationStall):
        nim_partial_sums(g0, 1.0, ALPHA, n + 1, frontier=Fraction(8))

    shifted = GenSeries.monomial(("t",), table, "t", ALPHA, 1.0)
    assert nim_iteration_count(shifted, ALPHA, Fraction(8)) == 15
    assert nim_iteration_count(GenSeries.zero(("t",), table), ALPHA, Fraction(8)) == 0


def test_nim_solve_without_rate_returns_source():
    table = ParamTable({"alpha": Fraction(1, 2)})
    g0 = GenSeries.constant(("t",), table, 2.0)
    sol = nim_solve(g0, 0.0, ALPHA, 4, unknown="K1")
    assert sol.tags == {"K1": "Series"}
    assert series_eval(sol.series["K1"], {"t": 0.7}) == pytest.approx(2.0)


def test_power_ansatz_single_equation():
    alpha = Fraction(3, 10)
    sys = linear_system(alpha, 0.0, RIEMANN_LIOUVILLE)
    sys.equations[0].rhs = 2.0 * K * K
    rho = power_law_rate(ALPHA, sys.params)
    branches = solve_power_ansatz(sys)
    [c] = branches[0].series["K"].terms.values()
    assert c == pytest.approx(rho / 2)
    assert branches[-1].series["K"].is_zero()
    idx, consts, err = match_power_branch(branches, {"K": rho / 2})
    assert (idx, consts) == (0, {})
    assert err < 1e-10
    idx, _, _ = match_power_branch(branches, {"K": rho / 2 + 1.0})
    assert idx == -1


def test_power_ansatz_free_constant():
    # D^a K1 = 2 K1^2, D^a K2 = 2 K1 K2 leaves K2's coefficient free on the nonzero branch
    table = ParamTable({"alpha": Fraction(3, 10)})
    k1, k2 = Poly.symbol("K1"), Poly.symbol("K2")
    sys = FODESystem([FODEEquation("K1", [TimeTerm(1.0, ALPHA)], 2.0 * k1 * k1),
                      FODEEquation("K2", [TimeTerm(1.0, ALPHA)], 2.0 * k1 * k2)], RIEMANN_LIOUVILLE, params=table)
    rho = power_law_rate(ALPHA, table)
    branches = solve_power_ansatz(sys)
    idx, consts, err = match_power_branch(branches, {"K1": rho / 2, "K2": 3.0})
    assert idx >= 0
    assert branches[idx].free_constants
    assert list(consts.values()) == [pytest.approx(3.0)]
    assert err < 1e-8


def test_power_ansatz_pole_and_kind():
    with pytest.raises(PoleError):
        solve_power_ansatz(linear_system(Fraction(1, 2), 1.0, RIEMANN_LIOUVILLE))
    with pytest.raises(Inconsistent):
        solve_power_ansatz(linear_system(Fraction(3, 10), 1.0))


def test_two_order_closed_form_reduces_to_cosine():
    # D^2 K + 0 D^1 K = -K with K(0)=1, K'(0)=0 is cos(t); nu must stay below mu
    value = two_order_closed_form(1.1, 2.0, 1.0, 0.0, -1.0, [1.0, 0.0])
    assert value == pytest.approx(math.cos(1.1), rel=1e-10)
