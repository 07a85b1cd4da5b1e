from __future__ import annotations

import logging
import math
import warnings
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

from .errors import (ConvergenceError, DomainError, Inconsistent, LatticeError, NoPowerLawSolution, PoleError,
                     StepError, TruncationStall)
from .fracalc import caputo_deriv, epsilon_series, rl_deriv, rl_integral, sequential_deriv
from .poly import Poly
from .series import ExponentVector, GenSeries, ParamTable
from .spec import CAPUTO, DEFAULT_FRONTIER, LATTICE_CAP, PICARD_EXTRA_SWEEPS, RIEMANN_LIOUVILLE, ZERO_CLEANUP
from .specfun import MLParams, epsilon_fn, gamma_real, is_pole
from .types import FODEEquation, FODESolution, FODESystem, TimeTerm

logger = logging.getLogger(__name__)

FODEInitialData = Dict[str, List[float]]


def _top_term(eq: FODEEquation, params: ParamTable) -> Tuple[TimeTerm, List[TimeTerm]]:
    ranked = sorted(eq.lhs, key=lambda term: params.value(term.order) * term.repeat)
    top = ranked[-1]
    if top.coef == 0:
        raise Inconsistent(f"leading time coefficient of {eq.unknown} is zero")
    return top, ranked[:-1]


def _apply_time(term: TimeTerm, k: GenSeries, var: str, kind: str) -> GenSeries:
    return sequential_deriv(k, var, term.order, term.repeat, kind).scale(term.coef)


def initial_value_count(term: TimeTerm, params: ParamTable) -> int:
    """Number of initial values the leading time term needs."""
    if term.repeat > 1:
        return term.repeat
    return max(1, math.ceil(params.value(term.order)))


def _initial_series(term: TimeTerm, values: Sequence[float], variables: Tuple[str, ...], params: ParamTable,
                    var: str) -> GenSeries:
    out = GenSeries.zero(variables, params)
    if term.repeat > 1:
        # sequential initial values (D^a)^i K(0) multiply t^(i a)/Gamma(i a + 1)
        for i, v in enumerate(values):
            e = term.order * i
            out = out + GenSeries.monomial(variables, params, var, e, v / gamma_real(params.value(e) + 1))
        return out
    for k, v in enumerate(values):
        out = out + GenSeries.monomial(variables, params, var, ExponentVector(k), v / math.factorial(k))
    return out


def _series_close(a: GenSeries, b: GenSeries, rtol: float = 1e-13) -> bool:
    if a.terms.keys() != b.terms.keys():
        return False
    ref = max(a.max_abs(), b.max_abs(), 1e-300)
    for key, c in a.terms.items():
        d = c - b.terms[key]
        if (d.max_abs() if isinstance(d, Poly) else abs(d)) > rtol * ref:
            return False
    return True


def _rhs_values(sys: FODESystem, current: Mapping[str, GenSeries]) -> Dict[str, GenSeries]:
    values: Dict[str, GenSeries] = dict(current)
    for sym, (unknown, order) in sys.derivative_symbols.items():
        values[sym] = caputo_deriv(current[unknown], sys.time_var, order)
    return values


def solve_series(sys: FODESystem, ics: FODEInitialData, frontier: Fraction = DEFAULT_FRONTIER) -> FODESolution:
    """Solve a Caputo FODE system as generalized power series in t.

    Each unknown is iterated as K = initial terms + I^mu[(psi - lower terms) / lambda_top]
    until the truncated iterate no longer changes. Right sides may be
    polynomial and may contain derivative symbols D[nu]K of lower order.

    Raises:
        Inconsistent: missing initial values, zero leading coefficient or no positive shift.
        LatticeError: the exponent lattice grows beyond LATTICE_CAP points.
    """
    if sys.kind != CAPUTO:
        raise Inconsistent("solve_series handles Caputo systems; use solve_power_ansatz for RL systems")
    if sys.params is None:
        raise Inconsistent("FODE system carries no parameter table")
    params = sys.params
    var = sys.time_var
    variables = (var,)
    frontier = Fraction(frontier)

    plan = {}
    shifts: List[Fraction] = []
    for eq in sys.equations:
        top, lower = _top_term(eq, params)
        mu = params.value(top.order) * top.repeat
        if mu <= 0:
            raise Inconsistent(f"order of {eq.unknown} must be positive, got {mu}")
        if top.repeat > 1 and params.value(top.order) > 1:
            raise Inconsistent(f"sequential leading term of {eq.unknown} needs order <= 1")
        need = initial_value_count(top, params)
        given = list(ics.get(eq.unknown, []))
        if len(given) != need:
            raise Inconsistent(f"{eq.unknown} needs {need} initial values, got {len(given)}")
        shifts.append(mu)
        for term in lower:
            shifts.append(mu - params.value(term.order) * term.repeat)
        for sym in eq.rhs.symbols():
            if sym in sys.derivative_symbols:
                shifts.append(mu - params.value(sys.derivative_symbols[sym][1]))
        plan[eq.unknown] = (top, lower, _initial_series(top, given, variables, params, var))
    min_shift = min(shifts)
    if min_shift <= 0:
        raise Inconsistent(f"right side reaches the leading order (shift {min_shift}); no Picard structure")

    current = {u: plan[u][2].truncate(frontier) for u in plan}
    max_sweeps = math.ceil(frontier / min_shift) + PICARD_EXTRA_SWEEPS + 1
    zero = GenSeries.zero(variables, params)
    for sweep in range(max_sweeps):
        values = _rhs_values(sys, current)
        nxt: Dict[str, GenSeries] = {}
        for eq in sys.equations:
            top, lower, init = plan[eq.unknown]
            rhs = eq.rhs.evaluate(values, zero=zero)
            if not isinstance(rhs, GenSeries):
                rhs = GenSeries.constant(variables, params, rhs)
            for term in lower:
                rhs = rhs - _apply_time(term, current[eq.unknown], var, CAPUTO)
            total = top.order * top.repeat
            k = init + rl_integral(rhs.scale(1.0 / top.coef), var, total)
            k = k.truncate(frontier)
            if len(k) > LATTICE_CAP:
                raise LatticeError(f"{eq.unknown}: {len(k)} exponents exceed the lattice cap {LATTICE_CAP}")
            nxt[eq.unknown] = k
        done = all(_series_close(nxt[u], current[u]) for u in nxt)
        current = nxt
        if done:
            logger.debug("solve_series converged after %d sweeps", sweep + 1)
            return FODESolution(series=current, tags={u: "Series" for u in current})
    raise LatticeError(f"series iteration did not settle within {max_sweeps} sweeps")


def fode_residual(sys: FODESystem, solution: Mapping[str, GenSeries]) -> Dict[str, GenSeries]:
    """Termwise residual lhs - psi of each equation, exact up to the truncation frontier."""
    params = sys.params
    var = sys.time_var
    values = _rhs_values(sys, solution) if sys.kind == CAPUTO else dict(solution)
    out: Dict[str, GenSeries] = {}
    for eq in sys.equations:
        k = solution[eq.unknown]
        zero = GenSeries.zero(k.variables, params)
        lhs = zero
        for term in eq.lhs:
            lhs = lhs + _apply_time(term, k, var, sys.kind)
        rhs = eq.rhs.evaluate(values, zero=zero)
        out[eq.unknown] = (lhs - rhs)
    return out


# --- power-law ansatz for Riemann-Liouville systems ----------------------------------

def power_law_rate(alpha: ExponentVector, params: ParamTable, var: str = "t") -> float:
    """rho with RL D^alpha t^(-alpha) = rho t^(-2 alpha)."""
    a = params.value(alpha)
    if a.denominator != 1 and is_pole(1 - 2 * a):
        raise PoleError(f"Gamma(1-2*alpha) has a pole at alpha={a}; the power-law family is excluded")
    mono = GenSeries.monomial((var,), params, var, -alpha)
    image = rl_deriv(mono, var, alpha)
    return float(sum(image.terms.values())) if image.terms else 0.0


def solve_power_ansatz(sys: FODESystem) -> List[FODESolution]:
    """Substitute K_j = c_j t^(-alpha) and solve for the c_j.

    Returns every real branch; coefficients left undetermined become free
    constants M1, M2, ... carried as Poly symbols.

    Raises:
        NoPowerLawSolution: the algebraic system has no real solution.
        PoleError: 1 - 2 alpha is a pole of Gamma.
    """
    if sys.kind != RIEMANN_LIOUVILLE:
        raise Inconsistent("power-law ansatz needs a Riemann-Liouville system")
    params = sys.params
    var = sys.time_var
    orders = set()
    for eq in sys.equations:
        if len(eq.lhs) != 1 or eq.lhs[0].repeat != 1:
            raise Inconsistent(f"{eq.unknown}: the power-law ansatz needs a single time term")
        orders.add(eq.lhs[0].order)
        if any(s in sys.derivative_symbols for s in eq.rhs.symbols()):
            raise Inconsistent("the power-law ansatz does not handle time derivatives on the right side")
    if len(orders) != 1:
        raise Inconsistent("the power-law ansatz needs one common time order")
    alpha = orders.pop()
    rho = power_law_rate(alpha, params, var)

    unknowns = sys.unknowns
    csyms = sympy.symbols([f"c_{u}" for u in unknowns])
    cmap = dict(zip(unknowns, csyms))
    equations = []
    for eq in sys.equations:
        by_degree: Dict[int, Any] = {}
        for mono, coef in eq.rhs.terms.items():
            d = sum(p for _, p in mono)
            term = sympy.Float(coef)
            for sym, p in mono:
                term = term * cmap[sym] ** p
            by_degree[d] = by_degree.get(d, 0) + term
        lam = eq.lhs[0].coef
        by_degree[2] = by_degree.get(2, 0) - sympy.Float(lam * rho) * cmap[eq.unknown]
        equations.extend(e for e in by_degree.values() if e != 0)
    raw = sympy.solve(equations, csyms, dict=True) if equations else [{}]
    if not raw:
        raise NoPowerLawSolution("the power-law algebraic system has no solution")

    branches: List[FODESolution] = []
    for sol in raw:
        free = [c for c in csyms if c not in sol]
        names = {c: sympy.Symbol(f"M{i + 1}") for i, c in enumerate(free)}
        exprs = {c: sympy.sympify(sol.get(c, c)).subs(names) for c in csyms}
        if any(e.has(sympy.I) for e in exprs.values()):
            continue
        mnames = [str(m) for m in names.values()]
        series: Dict[str, GenSeries] = {}
        ok = True
        for u, c in cmap.items():
            expr = sympy.expand(exprs[c])
            try:
                coeff = _to_poly(expr, list(names.values()))
            except ValueError:
                warnings.warn(f"power-law branch for {u} is not polynomial in its free constants: {expr}")
                ok = False
                break
            series[u] = GenSeries.monomial((var,), params, var, -alpha,
                                           coeff.constant_value() if coeff.is_constant() else coeff)
        if ok:
            branches.append(FODESolution(series=series, tags={u: "PowerLaw" for u in unknowns},
                                         free_constants={m: 1.0 for m in mnames}))
    if not branches:
        raise NoPowerLawSolution("no real power-law branch")
    branches.sort(key=lambda b: all(s.is_zero() for s in b.series.values()))
    return branches


def _to_poly(expr: Any, free: Sequence[Any]) -> Poly:
    if not free:
        value = complex(sympy.N(expr))
        if abs(value.imag) > 1e-12 * max(1.0, abs(value.real)):
            raise ValueError("complex coefficient")
        return Poly.constant(value.real)
    p = sympy.Poly(expr, *free)
    if p.domain.is_Composite and not p.domain.is_Numerical:
        raise ValueError("non-numeric coefficient")
    out = Poly()
    for powers, coef in p.terms():
        mono = tuple((str(s), int(k)) for s, k in zip(free, powers) if k)
        out = out + Poly({tuple(sorted(mono)): float(coef)})
    return out


def match_power_branch(branches: Sequence[FODESolution], target: Mapping[str, float],
                       rtol: float = 1e-8) -> Tuple[int, Dict[str, float], float]:
    """Find the branch and free-constant values reproducing target coefficients of t^(-alpha).

    Free constants must enter linearly. Returns (branch index, constants, relative error);
    the index is -1 when no branch matches.
    """
    best = (-1, {}, math.inf)
    scale = max([abs(v) for v in target.values()] + [1e-300])
    for idx, branch in enumerate(branches):
        names = sorted(branch.free_constants)
        rows, rhs = [], []
        for u, s in branch.series.items():
            c = next(iter(s.terms.values()), 0.0)
            p = Poly.lift(c)
            if p.degree() > 1:
                break
            const, lin = p.linear_parts()
            rows.append([lin.get(n, 0.0) for n in names])
            rhs.append(target.get(u, 0.0) - const)
        else:
            if names:
                sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
                values = {n: float(v) for n, v in zip(names, sol)}
                err = float(np.max(np.abs(np.array(rows) @ sol - np.array(rhs)))) / scale
            else:
                values = {}
                err = float(np.max(np.abs(np.array(rhs)))) / scale if rhs else 0.0
            if err < best[2]:
                best = (idx, values, err)
    if best[2] > rtol:
        return -1, best[1], best[2]
    return best


# --- closed forms --------------------------------------------------------------------

def _two_order_pieces(mu: ExponentVector, nu: ExponentVector, params: ParamTable, ics: Sequence[float],
                      c: float) -> List[Tuple[float, ExponentVector]]:
    """(weight, beta offset) pairs of the Laplace numerator, beta = offset + nu m."""
    m_mu = math.ceil(params.value(mu))
    m_nu = math.ceil(params.value(nu))
    if len(ics) != m_mu:
        raise Inconsistent(f"two-order closed form needs {m_mu} initial values, got {len(ics)}")
    pieces = [(float(ics[k]), ExponentVector(1 + k)) for k in range(m_mu)]
    pieces += [(c * float(ics[k]), mu - nu + (1 + k)) for k in range(m_nu)]
    return [(w, b) for w, b in pieces if w != 0.0]


def two_order_series(variables: Sequence[str], params: ParamTable, var: str, mu: ExponentVector,
                     nu: ExponentVector, c: float, lam: float, ics: Sequence[float],
                     frontier: Fraction = DEFAULT_FRONTIER) -> GenSeries:
    """Series solution of D^mu K + c D^nu K = lam K (0 < nu < mu, Caputo).

    K = sum_m lam^m/m! sum_w w eps_m(t, -c; mu - nu, offset + nu m).
    """
    gap = mu - nu
    if params.value(gap) <= 0 or params.value(nu) <= 0:
        raise DomainError(f"two-order form needs 0 < nu < mu, got mu={mu}, nu={nu}")
    pieces = _two_order_pieces(mu, nu, params, ics, c)
    out = GenSeries.zero(variables, params).truncate(Fraction(frontier), var)
    m = 0
    while params.value(mu) * m <= frontier:
        weight = lam ** m / math.factorial(m)
        if weight != 0.0:
            for w, offset in pieces:
                beta = offset + nu * m
                out = out + epsilon_series(variables, params, var, m, -c, gap, beta, frontier).scale(weight * w)
        if lam == 0:
            break
        m += 1
    return out


def two_order_closed_form(t: float, mu: float, nu: float, c: float, lam: float, ics: Sequence[float],
                          max_terms: int = 200, tol: float = 1e-16) -> float:
    """Numeric value of the same solution from specfun.epsilon_fn."""
    if not 0 < nu < mu:
        raise DomainError(f"two-order form needs 0 < nu < mu, got mu={mu}, nu={nu}")
    m_mu, m_nu = math.ceil(mu), math.ceil(nu)
    pieces = [(float(ics[k]), 1.0 + k) for k in range(m_mu)]
    pieces += [(c * float(ics[k]), mu - nu + 1.0 + k) for k in range(m_nu)]
    total = 0.0
    for m in range(max_terms):
        term = 0.0
        for w, offset in pieces:
            if w != 0.0:
                term += w * epsilon_fn(m, t, c, MLParams(mu - nu, offset + nu * m), sign=-1)
        term *= lam ** m / math.factorial(m)
        total += term
        if lam == 0 or (m > 2 and abs(term) <= tol * max(abs(total), 1e-300)):
            return total
    raise ConvergenceError(f"two-order closed form did not converge in {max_terms} terms")


# --- NIM ------------------------------------------------------------------------------

def nim_iterates(g0: GenSeries, c: float, alpha: ExponentVector, var: str = "t") -> Iterator[GenSeries]:
    """K^0 = g0, K^m = c I^alpha K^(m-1)."""
    k = g0
    yield k
    while True:
        k = rl_integral(k, var, alpha).scale(c)
        yield k


def nim_partial_sums(g0: GenSeries, c: float, alpha: ExponentVector, n_iters: int, var: str = "t",
                     frontier: Fraction = DEFAULT_FRONTIER) -> List[GenSeries]:
    """Partial sums S_0..S_n of the NIM iterates, each truncated at the frontier.

    Raises:
        TruncationStall: an iterate vanishes by truncation while c != 0.
    """
    sums: List[GenSeries] = []
    total = None
    for m, k in enumerate(nim_iterates(g0.truncate(frontier, var), c, alpha, var)):
        k = k.truncate(frontier, var)
        if m > 0 and k.is_zero():
            if c == 0 or g0.is_zero():
                sums.extend([total] * (n_iters + 1 - len(sums)))
                return sums
            raise TruncationStall(f"NIM iterate {m} vanished within the frontier {frontier}")
        total = k if total is None else total + k
        sums.append(total)
        if m >= n_iters:
            return sums
    return sums


def nim_iteration_count(g0: GenSeries, alpha: ExponentVector, frontier: Fraction = DEFAULT_FRONTIER,
                        var: str = "t") -> int:
    """Largest m whose iterate I^(m alpha) g0 still has a term at or below the frontier."""
    lowest = g0.truncate(frontier, var).min_exponents()[g0.var_index(var)]
    if lowest is None:
        return 0
    step = g0.params.value(alpha)
    return max(0, math.floor((Fraction(frontier) - lowest) / step))


def nim_solve(g0: GenSeries, c: float, alpha: ExponentVector, n_iters: int, unknown: str = "K",
              var: str = "t", frontier: Fraction = DEFAULT_FRONTIER) -> FODESolution:
    """Partial sum of the NIM iteration for K = g0 + c I^alpha K."""
    sums = nim_partial_sums(g0, c, alpha, n_iters, var, frontier)
    return FODESolution(series={unknown: sums[-1]}, tags={unknown: "Series"})


# --- Adams predictor-corrector oracle -----------------------------------------------------

def adams_pece(sys: FODESystem, ics: Mapping[str, Any], h: float, horizon: float
               ) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
    """Fractional Adams-Bashforth-Moulton predictor-corrector on a uniform grid.

    Each equation must read lambda D^a K = psi(K) with 0 < a <= 1; the orders
    may differ between unknowns.

    Raises:
        StepError: h <= 0, or the trajectory overflows.
    """
    if not (h > 0) or not math.isfinite(h):
        raise StepError(f"step must be positive, got {h}")
    if horizon < 0:
        raise StepError(f"horizon must be non-negative, got {horizon}")
    if sys.kind != CAPUTO:
        raise Inconsistent("adams_pece needs a Caputo system")
    params = sys.params
    unknowns = sys.unknowns
    orders, rhs = [], []
    for eq in sys.equations:
        if len(eq.lhs) != 1 or eq.lhs[0].repeat != 1:
            raise Inconsistent(f"{eq.unknown}: adams_pece needs a single-order equation")
        a = float(params.value(eq.lhs[0].order))
        if not 0 < a <= 1:
            raise Inconsistent(f"{eq.unknown}: adams_pece needs 0 < order <= 1, got {a}")
        if any(s in sys.derivative_symbols for s in eq.rhs.symbols()):
            raise Inconsistent("adams_pece does not handle time derivatives on the right side")
        orders.append(a)
        rhs.append(eq.rhs / eq.lhs[0].coef)
    y0 = []
    for u in unknowns:
        v = ics[u]
        y0.append(float(v[0] if isinstance(v, (list, tuple)) else v))
    y0 = np.array(y0)

    n_steps = int(round(horizon / h))
    times = np.arange(n_steps + 1) * h
    m = len(unknowns)
    y = np.zeros((m, n_steps + 1))
    f = np.zeros((m, n_steps + 1))
    y[:, 0] = y0

    def field(state: np.ndarray) -> np.ndarray:
        values = dict(zip(unknowns, state))
        return np.array([float(p.evaluate(values)) for p in rhs])

    f[:, 0] = field(y0)
    a_arr = np.array(orders)
    idx = np.arange(n_steps + 3, dtype=float)
    bpow = [idx ** a for a in orders]
    apow = [idx ** (a + 1) for a in orders]
    pred_scale = np.array([h ** a / math.gamma(a + 1) for a in orders])
    corr_scale = np.array([h ** a / math.gamma(a + 2) for a in orders])
    for n in range(n_steps):
        pred = np.empty(m)
        corr_hist = np.empty(m)
        for j in range(m):
            b = (bpow[j][1:n + 2] - bpow[j][0:n + 1])[::-1]
            pred[j] = y0[j] + pred_scale[j] * np.dot(b, f[j, :n + 1])
            a = a_arr[j]
            a0 = n ** (a + 1) - (n - a) * (n + 1) ** a
            if n > 0:
                i = np.arange(n)  # i = n - k for k = n..1
                ak = (apow[j][i + 2] + apow[j][i] - 2 * apow[j][i + 1])[::-1]
                corr_hist[j] = a0 * f[j, 0] + np.dot(ak, f[j, 1:n + 1])
            else:
                corr_hist[j] = a0 * f[j, 0]
        fp = field(pred)
        y[:, n + 1] = y0 + corr_scale * (fp + corr_hist)
        if not np.all(np.isfinite(y[:, n + 1])):
            raise StepError(f"trajectory overflow at t={times[n + 1]:.6g}")
        f[:, n + 1] = field(y[:, n + 1])
    return times, {u: y[j] for j, u in enumerate(unknowns)}
