from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence, Tuple, Union

from .errors import DomainError, FracSubspaceError, UndefinedCaputo, annotate
from .series import ExponentVector, GenSeries, ParamTable
from .spec import CAPUTO, DEFAULT_FRONTIER, RIEMANN_LIOUVILLE
from .specfun import gamma_ratio, rgamma

OrderLike = Union[ExponentVector, int, Fraction]


@dataclass(frozen=True)
class FracOrder:
    value: ExponentVector

    @classmethod
    def of(cls, order: Union["FracOrder", OrderLike]) -> "FracOrder":
        if isinstance(order, FracOrder):
            return order
        if isinstance(order, ExponentVector):
            return cls(order)
        return cls(ExponentVector(order))

    def numeric(self, params: ParamTable) -> Fraction:
        return params.value(self.value)

    def ceiling(self, params: ParamTable) -> int:
        return math.ceil(self.numeric(params))

    def __str__(self) -> str:
        return str(self.value)


def _falling(gamma: Fraction, m: int) -> float:
    out = 1.0
    for i in range(m):
        out *= float(gamma - i)
    return out


def _order_value(s: GenSeries, order: Union[FracOrder, OrderLike]) -> Tuple[ExponentVector, Fraction]:
    o = FracOrder.of(order)
    a = o.numeric(s.params)
    if a < 0:
        raise DomainError(f"order {o} evaluates to {a} < 0")
    return o.value, a


def rl_integral(s: GenSeries, var: str, order: Union[FracOrder, OrderLike]) -> GenSeries:
    """Riemann-Liouville integral: c var^g -> c Gamma(g+1)/Gamma(g+a+1) var^(g+a)."""
    ev, a = _order_value(s, order)
    if a == 0:
        return s
    params = s.params

    def rule(e: ExponentVector, c: Any):
        g = params.value(e)
        if g <= -1:
            raise DomainError(f"I^({ev}) undefined on {var}^({e}) (exponent {g} <= -1)")
        return e + ev, c * gamma_ratio(g + 1, g + a + 1)

    return s.map_var(var, rule, a)


def caputo_deriv(s: GenSeries, var: str, order: Union[FracOrder, OrderLike]) -> GenSeries:
    """Caputo derivative, termwise.

    Raises:
        UndefinedCaputo: a term has a non-integer exponent g <= n-1 with n = ceil(order).
    """
    ev, a = _order_value(s, order)
    if a == 0:
        return s
    params = s.params
    if a.denominator == 1:
        m = int(a)

        def classical(e: ExponentVector, c: Any):
            g = params.value(e)
            f = _falling(g, m)
            if f == 0.0:
                return None
            return e - ev, c * f

        return s.map_var(var, classical, -a)
    n = math.ceil(a)

    def rule(e: ExponentVector, c: Any):
        g = params.value(e)
        if g.denominator == 1 and 0 <= g <= n - 1:
            return None
        if (g.denominator == 1 and g >= n) or g > n - 1:
            return e - ev, c * gamma_ratio(g + 1, g - a + 1)
        raise UndefinedCaputo(f"Caputo D^({ev}) is not defined on {var}^({e}) "
                              f"(exponent {g} must be an integer in [0,{n - 1}] or exceed {n - 1})")

    return s.map_var(var, rule, -a)


def rl_deriv(s: GenSeries, var: str, order: Union[FracOrder, OrderLike]) -> GenSeries:
    """Riemann-Liouville derivative, termwise; 1/Gamma at a pole counts as 0."""
    ev, a = _order_value(s, order)
    if a == 0:
        return s
    params = s.params
    if a.denominator == 1:
        m = int(a)

        def classical(e: ExponentVector, c: Any):
            g = params.value(e)
            f = _falling(g, m)
            if f == 0.0:
                return None
            return e - ev, c * f

        return s.map_var(var, classical, -a)

    def rule(e: ExponentVector, c: Any):
        g = params.value(e)
        if g <= -1:
            raise DomainError(f"RL D^({ev}) undefined on {var}^({e}) (exponent {g} <= -1)")
        r = rgamma(g - a + 1)
        if r == 0.0:
            return None
        return e - ev, c * gamma_ratio(g + 1, Fraction(1)) * r

    return s.map_var(var, rule, -a)


def derivative(s: GenSeries, var: str, order: Union[FracOrder, OrderLike], kind: str = CAPUTO) -> GenSeries:
    if kind == CAPUTO:
        return caputo_deriv(s, var, order)
    if kind == RIEMANN_LIOUVILLE:
        return rl_deriv(s, var, order)
    raise ValueError(f"Unknown derivative kind '{kind}'")


def sequential_deriv(s: GenSeries, var: str, order: Union[FracOrder, OrderLike], k: int,
                     kind: str = CAPUTO) -> GenSeries:
    """k-fold composition of the single-order derivative."""
    if k < 1:
        raise ValueError(f"sequential derivative needs k >= 1, got {k}")
    out = s
    for stage in range(k):
        try:
            out = derivative(out, var, order, kind)
        except FracSubspaceError as e:
            if k == 1:
                raise
            raise annotate(e, f"stage {stage + 1} of {k}") from e
    return out


# --- special functions as truncated series --------------------------------

def _ev(x: Union[ExponentVector, int, Fraction]) -> ExponentVector:
    return x if isinstance(x, ExponentVector) else ExponentVector(x)


def ml_series(variables: Sequence[str], params: ParamTable, var: str,
              a: OrderLike, b: OrderLike, lam: float, shift: OrderLike = 0,
              frontier: Fraction = DEFAULT_FRONTIER) -> GenSeries:
    """sum_k lam^k var^(a k + shift) / Gamma(a k + b), truncated at the frontier.

    E_{a,b}(lam var^a) is the case shift = 0.
    """
    a, b, shift = _ev(a), _ev(b), _ev(shift)
    step = params.value(a)
    if step <= 0:
        raise DomainError(f"series step {a} must be positive")
    terms = []
    k = 0
    while True:
        e = a * k + shift
        if params.value(e) > frontier:
            break
        coef = lam ** k * rgamma(params.value(a * k + b))
        if coef != 0.0:
            terms.append((e, coef))
        if lam == 0:
            break
        k += 1
    return GenSeries.univariate(variables, params, var, terms, Fraction(frontier))


def ml_exp_series(variables: Sequence[str], params: ParamTable, var: str, order: OrderLike, lam: float,
                  frontier: Fraction = DEFAULT_FRONTIER) -> GenSeries:
    """E_order(lam var^order)."""
    return ml_series(variables, params, var, order, 1, lam, 0, frontier)


def frac_cos_series(variables: Sequence[str], params: ParamTable, var: str, order: OrderLike, lam: float,
                    frontier: Fraction = DEFAULT_FRONTIER) -> GenSeries:
    """cos_order(lam var^order)."""
    g = _ev(order)
    return ml_series(variables, params, var, g * 2, 1, -lam * lam, 0, frontier)


def frac_sin_series(variables: Sequence[str], params: ParamTable, var: str, order: OrderLike, lam: float,
                    frontier: Fraction = DEFAULT_FRONTIER) -> GenSeries:
    """sin_order(lam var^order)."""
    g = _ev(order)
    return ml_series(variables, params, var, g * 2, g + 1, -lam * lam, g, frontier).scale(lam)


def epsilon_series(variables: Sequence[str], params: ParamTable, var: str, n: int, a: float,
                   alpha: OrderLike, beta: OrderLike, frontier: Fraction = DEFAULT_FRONTIER) -> GenSeries:
    """eps_n(var, a; alpha, beta) = var^(alpha n + beta - 1) E^(n)_{alpha,beta}(a var^alpha), truncated."""
    alpha, beta = _ev(alpha), _ev(beta)
    if params.value(alpha) <= 0 or params.value(beta) <= 0:
        raise DomainError(f"epsilon series needs positive alpha, beta (got {alpha}, {beta})")
    terms = []
    k = 0
    while True:
        e = alpha * (k + n) + beta - 1
        if params.value(e) > frontier:
            break
        falling = math.prod(range(k + 1, k + n + 1))
        coef = falling * a ** k * rgamma(params.value(alpha * (k + n) + beta))
        if coef != 0.0:
            terms.append((e, coef))
        if a == 0:
            break
        k += 1
    return GenSeries.univariate(variables, params, var, terms, Fraction(frontier))


def coordinate(variables: Sequence[str], params: ParamTable, var: str, exponent: OrderLike) -> GenSeries:
    """The exact monomial var^exponent."""
    return GenSeries.monomial(variables, params, var, _ev(exponent))
