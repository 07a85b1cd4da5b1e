from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DependentBasis, DomainError, ParseError, UnspecializedPoly, VariableMismatch
from .poly import Poly
from .spec import FIT_TOL, ZERO_CLEANUP
from .types import FitResult, ParamDecl

Coeff = Union[float, Poly]


def to_fraction(value: Any) -> Fraction:
    """Exact rational for a user value; floats go through their shortest repr (0.3 -> 3/10)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a numeric parameter value")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"Non-finite value: {value}")
        return Fraction(repr(value))
    text = str(value).strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"Not a rational number: '{value}'") from None


class ExponentVector:
    """Exact exponent: a rational constant plus rational multiples of order parameters."""

    __slots__ = ("constant", "coeffs", "_hash")

    def __init__(self, constant: Any = 0, coeffs: Union[Mapping[str, Any], Iterable[Tuple[str, Any]]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged: Dict[str, Fraction] = {}
        for name, c in items:
            merged[name] = merged.get(name, Fraction(0)) + to_fraction(c)
        self.constant = to_fraction(constant)
        self.coeffs: Tuple[Tuple[str, Fraction], ...] = tuple(sorted((n, c) for n, c in merged.items() if c != 0))
        self._hash = hash((self.constant, self.coeffs))

    @classmethod
    def param(cls, name: str, multiple: Any = 1) -> "ExponentVector":
        return cls(0, {name: multiple})

    def is_constant(self) -> bool:
        return not self.coeffs

    def symbols(self) -> List[str]:
        return [n for n, _ in self.coeffs]

    def __add__(self, other: Any) -> "ExponentVector":
        if isinstance(other, (int, Fraction)):
            other = ExponentVector(other)
        if not isinstance(other, ExponentVector):
            return NotImplemented
        return ExponentVector(self.constant + other.constant, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self) -> "ExponentVector":
        return ExponentVector(-self.constant, [(n, -c) for n, c in self.coeffs])

    def __sub__(self, other: Any) -> "ExponentVector":
        if isinstance(other, (int, Fraction)):
            other = ExponentVector(other)
        if not isinstance(other, ExponentVector):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "ExponentVector":
        return ExponentVector(other) - self

    def __mul__(self, k: Any) -> "ExponentVector":
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        k = Fraction(k)
        return ExponentVector(self.constant * k, [(n, c * k) for n, c in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return not self.coeffs and self.constant == other
        if not isinstance(other, ExponentVector):
            return NotImplemented
        return self.constant == other.constant and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "ExponentVector") -> bool:
        # structural order, only used for deterministic printing
        return (self.coeffs, self.constant) < (other.coeffs, other.constant)

    def __str__(self) -> str:
        parts: List[str] = []
        for name, c in self.coeffs:
            if c == 1:
                body = name
            elif c == -1:
                body = f"-{name}"
            else:
                body = f"{c}*{name}"
            parts.append(body)
        if self.constant != 0 or not parts:
            parts.append(str(self.constant))
        text = parts[0]
        for p in parts[1:]:
            text += p if p.startswith("-") else f"+{p}"
        return text

    def __repr__(self) -> str:
        return f"ExponentVector({self})"


ZERO_EXP = ExponentVector(0)


class ParamTable:
    """Ordered assignment of exact rational values to parameter symbols."""

    def __init__(self, values: Union[Mapping[str, Any], Iterable[Tuple[str, Any]]] = (),
                 decls: Optional[Mapping[str, ParamDecl]] = None):
        items = list(values.items()) if isinstance(values, Mapping) else list(values)
        self.values: Dict[str, Fraction] = {}
        for name, v in items:
            if name in self.values:
                raise ValueError(f"Duplicate parameter '{name}'")
            try:
                self.values[name] = to_fraction(v)
            except (ValueError, TypeError) as e:
                raise ValueError(f"Parameter {name}: {e}") from None
        self.decls: Dict[str, ParamDecl] = dict(decls or {})
        for name, decl in self.decls.items():
            if name in self.values:
                decl.check(self.values[name])
        self._cache: Dict[ExponentVector, Fraction] = {}

    @property
    def names(self) -> List[str]:
        return list(self.values)

    def __contains__(self, name: str) -> bool:
        return name in self.values

    def __getitem__(self, name: str) -> Fraction:
        return self.values[name]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ParamTable):
            return NotImplemented
        return self.values == other.values

    def __hash__(self) -> int:
        return hash(tuple(self.values.items()))

    def as_floats(self) -> Dict[str, float]:
        return {n: float(v) for n, v in self.values.items()}

    def with_values(self, overrides: Mapping[str, Any]) -> "ParamTable":
        merged = dict(self.values)
        merged.update(overrides)
        return ParamTable(merged, self.decls)

    def value(self, ev: ExponentVector) -> Fraction:
        """Exact numeric value of an exponent under this assignment."""
        v = self._cache.get(ev)
        if v is None:
            v = ev.constant
            for name, c in ev.coeffs:
                if name not in self.values:
                    raise ParseError(f"Exponent {ev} uses unknown parameter '{name}'")
                v += c * self.values[name]
            self._cache[ev] = v
        return v

    def num(self, ev: ExponentVector) -> float:
        return float(self.value(ev))

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}={v}" for n, v in self.values.items())
        return f"ParamTable({inner})"


Key = Tuple[ExponentVector, ...]
Bound = Optional[Fraction]

_EPS = 1e-9


def _coeff_abs(c: Coeff) -> float:
    return c.max_abs() if isinstance(c, Poly) else abs(c)


def _is_negligible(c: Coeff, ref: float) -> bool:
    if isinstance(c, Poly):
        return c.cleaned(ZERO_CLEANUP, scale=ref).is_zero()
    return abs(c) <= ZERO_CLEANUP * ref


def _clean(c: Coeff, ref: float) -> Coeff:
    if isinstance(c, Poly):
        return c.cleaned(ZERO_CLEANUP, scale=ref)
    return c


def _min_bound(a: Bound, b: Bound) -> Bound:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class GenSeries:
    """Sparse generalized power series with exact exponents.

    ``bounds[i]`` is the largest exponent of variable i up to which the
    series is exact; ``None`` means no truncation in that variable.
    Instances are treated as immutable.
    """

    __slots__ = ("variables", "params", "terms", "bounds", "truncated", "_nums")

    def __init__(self, variables: Sequence[str], params: ParamTable,
                 terms: Optional[Mapping[Key, Coeff]] = None,
                 bounds: Optional[Sequence[Bound]] = None, truncated: bool = False):
        self.variables: Tuple[str, ...] = tuple(variables)
        self.params = params
        self.bounds: Tuple[Bound, ...] = tuple(bounds) if bounds is not None else (None,) * len(self.variables)
        if len(self.bounds) != len(self.variables):
            raise VariableMismatch("bounds do not match variables")
        self.truncated = truncated or any(b is not None for b in self.bounds)
        self._nums: Dict[Key, Tuple[float, ...]] = {}
        kept: Dict[Key, Coeff] = {}
        for key, c in (terms or {}).items():
            if len(key) != len(self.variables):
                raise VariableMismatch(f"term {key} has wrong arity for {self.variables}")
            if isinstance(c, Poly):
                if c.is_zero():
                    continue
            elif c == 0:
                continue
            if self._above_bound(key):
                continue
            kept[key] = c
        self.terms: Dict[Key, Coeff] = kept

    # --- construction ----------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str], params: ParamTable) -> "GenSeries":
        return cls(variables, params, {})

    @classmethod
    def constant(cls, variables: Sequence[str], params: ParamTable, value: Coeff) -> "GenSeries":
        key = (ZERO_EXP,) * len(tuple(variables))
        return cls(variables, params, {key: value})

    @classmethod
    def monomial(cls, variables: Sequence[str], params: ParamTable, var: str, exponent: ExponentVector,
                 coef: Coeff = 1.0) -> "GenSeries":
        variables = tuple(variables)
        if var not in variables:
            raise VariableMismatch(f"Unknown variable '{var}' (have {variables})")
        key = tuple(exponent if v == var else ZERO_EXP for v in variables)
        return cls(variables, params, {key: coef})

    @classmethod
    def univariate(cls, variables: Sequence[str], params: ParamTable, var: str,
                   terms: Iterable[Tuple[ExponentVector, Coeff]], bound: Bound) -> "GenSeries":
        """Series in one variable from (exponent, coefficient) pairs, exact up to bound."""
        variables = tuple(variables)
        if var not in variables:
            raise VariableMismatch(f"Unknown variable '{var}' (have {variables})")
        idx = variables.index(var)
        out: Dict[Key, Coeff] = {}
        for e, c in terms:
            key = tuple(e if i == idx else ZERO_EXP for i in range(len(variables)))
            out[key] = out.get(key, 0.0) + c
        bounds = tuple(bound if i == idx else None for i in range(len(variables)))
        return cls(variables, params, out, bounds)

    def _derived(self, terms: Mapping[Key, Coeff], bounds: Sequence[Bound]) -> "GenSeries":
        return GenSeries(self.variables, self.params, terms, bounds, self.truncated)

    # --- numeric exponents ------------------------------------------------

    def nums(self, key: Key) -> Tuple[float, ...]:
        v = self._nums.get(key)
        if v is None:
            v = tuple(self.params.num(e) for e in key)
            self._nums[key] = v
        return v

    def _above_bound(self, key: Key) -> bool:
        for e, b in zip(key, self.bounds):
            if b is not None and self.params.value(e) > b:
                return True
        return False

    def min_exponents(self) -> Tuple[Optional[Fraction], ...]:
        out: List[Optional[Fraction]] = []
        for i in range(len(self.variables)):
            vals = [self.params.value(k[i]) for k in self.terms]
            out.append(min(vals) if vals else None)
        return tuple(out)

    # --- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def max_abs(self) -> float:
        return max((_coeff_abs(c) for c in self.terms.values()), default=0.0)

    def has_poly(self) -> bool:
        return any(isinstance(c, Poly) for c in self.terms.values())

    def coefficient_symbols(self) -> set:
        out: set = set()
        for c in self.terms.values():
            if isinstance(c, Poly):
                out |= c.symbols()
        return out

    def var_index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise VariableMismatch(f"Unknown variable '{var}' (have {self.variables})") from None

    def exponents(self, var: str) -> List[Fraction]:
        """Distinct exact numeric exponents of var, ascending."""
        i = self.var_index(var)
        return sorted({self.params.value(k[i]) for k in self.terms})

    def _check_compatible(self, other: "GenSeries") -> None:
        if self.variables != other.variables:
            raise VariableMismatch(f"variables {self.variables} vs {other.variables}")
        if self.params is not other.params and self.params != other.params:
            raise VariableMismatch("series were built under different parameter tables")

    # --- ring operations ----------------------------------------------------

    def __add__(self, other: Any) -> "GenSeries":
        if isinstance(other, (int, float, Poly)):
            other = GenSeries.constant(self.variables, self.params, other)
        if not isinstance(other, GenSeries):
            return NotImplemented
        self._check_compatible(other)
        bounds = [_min_bound(a, b) for a, b in zip(self.bounds, other.bounds)]
        out: Dict[Key, Coeff] = dict(self.terms)
        for key, c in other.terms.items():
            if key in out:
                a = out[key]
                ref = max(_coeff_abs(a), _coeff_abs(c))
                s = a + c
                if _is_negligible(s, ref):
                    del out[key]
                else:
                    out[key] = _clean(s, ref)
            else:
                out[key] = c
        return self._derived(out, bounds)

    __radd__ = __add__

    def __neg__(self) -> "GenSeries":
        return self._derived({k: -c for k, c in self.terms.items()}, self.bounds)

    def __sub__(self, other: Any) -> "GenSeries":
        if isinstance(other, (int, float, Poly)):
            return self + (-other)
        if not isinstance(other, GenSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "GenSeries":
        return (-self) + other

    def scale(self, factor: Coeff) -> "GenSeries":
        if isinstance(factor, (int, float)) and factor == 0:
            return self._derived({}, self.bounds)
        return self._derived({k: c * factor for k, c in self.terms.items()}, self.bounds)

    def __mul__(self, other: Any) -> "GenSeries":
        if isinstance(other, (int, float, Poly)):
            return self.scale(other)
        if not isinstance(other, GenSeries):
            return NotImplemented
        return series_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "GenSeries":
        if not isinstance(other, (int, float)):
            return NotImplemented
        return self.scale(1.0 / other)

    def __pow__(self, n: int) -> "GenSeries":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = GenSeries.constant(self.variables, self.params, 1.0)
        for _ in range(n):
            out = series_mul(out, self)
        return out

    # --- structural helpers ---------------------------------------------------

    def map_var(self, var: str, fn: Callable[[ExponentVector, Coeff], Optional[Tuple[ExponentVector, Coeff]]],
                bound_shift: Fraction) -> "GenSeries":
        """Apply a termwise rule in one variable; fn returns (new exponent, new coefficient) or None."""
        i = self.var_index(var)
        out: Dict[Key, Coeff] = {}
        for key, c in self.terms.items():
            res = fn(key[i], c)
            if res is None:
                continue
            e, nc = res
            nk = key[:i] + (e,) + key[i + 1:]
            if nk in out:
                out[nk] = out[nk] + nc
            else:
                out[nk] = nc
        bounds = list(self.bounds)
        if bounds[i] is not None:
            bounds[i] = bounds[i] + bound_shift
        return self._derived(out, bounds)

    def truncate(self, frontier: Fraction, var: Optional[str] = None) -> "GenSeries":
        """Impose (or tighten) the truncation bound in one or all variables."""
        idx = range(len(self.variables)) if var is None else [self.var_index(var)]
        bounds = list(self.bounds)
        for i in idx:
            bounds[i] = _min_bound(bounds[i], Fraction(frontier))
        return self._derived(self.terms, bounds)

    def embed(self, variables: Sequence[str]) -> "GenSeries":
        """Same series viewed over a larger variable list."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = []
        for v in self.variables:
            if v not in variables:
                raise VariableMismatch(f"cannot embed {self.variables} into {variables}")
            pos.append(variables.index(v))
        out: Dict[Key, Coeff] = {}
        for key, c in self.terms.items():
            nk = [ZERO_EXP] * len(variables)
            for i, p in enumerate(pos):
                nk[p] = key[i]
            out[tuple(nk)] = c
        bounds: List[Bound] = [None] * len(variables)
        for i, p in enumerate(pos):
            bounds[p] = self.bounds[i]
        return GenSeries(variables, self.params, out, bounds, self.truncated)

    def specialize(self, values: Mapping[str, float]) -> "GenSeries":
        """Substitute numbers for Poly symbols, giving a scalar series."""
        out: Dict[Key, Coeff] = {}
        for key, c in self.terms.items():
            out[key] = c.evaluate(values) if isinstance(c, Poly) else c
        return self._derived(out, self.bounds)

    def substitute(self, values: Mapping[str, Any]) -> "GenSeries":
        """Replace Poly symbols by numbers or other polynomials."""
        out: Dict[Key, Coeff] = {}
        for key, c in self.terms.items():
            if isinstance(c, Poly):
                nc = c.substitute(values)
                out[key] = nc.constant_value() if nc.is_constant() else nc
            else:
                out[key] = c
        return self._derived(out, self.bounds)

    def cleaned(self, rel: float = ZERO_CLEANUP) -> "GenSeries":
        """Drop coefficients below rel times the largest coefficient of the series."""
        ref = self.max_abs()
        out: Dict[Key, Coeff] = {}
        for key, c in self.terms.items():
            if isinstance(c, Poly):
                c = c.cleaned(rel, scale=ref)
                if c.is_zero():
                    continue
            elif abs(c) <= rel * ref:
                continue
            out[key] = c
        return self._derived(out, self.bounds)

    def with_bounds(self, bounds: Sequence[Bound]) -> "GenSeries":
        """Tighten the per-variable bounds to the given ones."""
        return self._derived(self.terms, [_min_bound(a, b) for a, b in zip(self.bounds, bounds)])

    def sorted_terms(self) -> List[Tuple[Key, Coeff]]:
        return sorted(self.terms.items(), key=lambda kc: (self.nums(kc[0]), kc[0]))

    # --- evaluation -------------------------------------------------------------

    def evaluate(self, point: Union[Mapping[str, Any], Sequence[Any]]) -> Any:
        return series_eval(self, point)

    def __repr__(self) -> str:
        return f"GenSeries({self.to_text(max_terms=8)})"

    def to_text(self, max_terms: Optional[int] = None, digits: int = 12) -> str:
        parts: List[str] = []
        items = self.sorted_terms()
        shown = items if max_terms is None else items[:max_terms]
        for key, c in shown:
            factors = []
            for v, e in zip(self.variables, key):
                if e == 0:
                    continue
                factors.append(f"{v}^({e})")
            coef = f"({c})" if isinstance(c, Poly) else f"{c:.{digits}g}"
            parts.append("*".join([coef] + factors))
        if max_terms is not None and len(items) > max_terms:
            parts.append("...")
        return " + ".join(parts) if parts else "0"


def _check_pair(a: GenSeries, b: GenSeries) -> None:
    if not isinstance(a, GenSeries) or not isinstance(b, GenSeries):
        raise VariableMismatch("expected two GenSeries")
    a._check_compatible(b)


def series_add(a: GenSeries, b: GenSeries) -> GenSeries:
    _check_pair(a, b)
    return a + b


def series_scale(a: GenSeries, factor: Coeff) -> GenSeries:
    return a.scale(factor)


def series_mul(a: GenSeries, b: GenSeries) -> GenSeries:
    """Truncated product; exponents add exactly, terms above the product's bound are dropped."""
    _check_pair(a, b)
    variables = a.variables
    params = a.params
    if a.is_zero() or b.is_zero():
        return GenSeries(variables, params, {}, [_min_bound(x, y) for x, y in zip(a.bounds, b.bounds)])
    amin = a.min_exponents()
    bmin = b.min_exponents()
    bounds: List[Bound] = []
    for i in range(len(variables)):
        cand: List[Fraction] = []
        if a.bounds[i] is not None:
            cand.append(a.bounds[i] + bmin[i])
        if b.bounds[i] is not None:
            cand.append(b.bounds[i] + amin[i])
        bounds.append(min(cand) if cand else None)
    fbounds = [None if x is None else float(x) + _EPS for x in bounds]

    sums: List[Dict[Tuple[ExponentVector, ExponentVector], ExponentVector]] = [dict() for _ in variables]
    acc: Dict[Key, Coeff] = {}
    ref: Dict[Key, float] = {}
    bitems = [(k, c, b.nums(k)) for k, c in b.terms.items()]
    for ka, ca in a.terms.items():
        na = a.nums(ka)
        for kb, cb, nb in bitems:
            skip = False
            for i, fb in enumerate(fbounds):
                if fb is not None and na[i] + nb[i] > fb:
                    skip = True
                    break
            if skip:
                continue
            key_parts = []
            for i in range(len(variables)):
                pair = (ka[i], kb[i])
                s = sums[i].get(pair)
                if s is None:
                    s = ka[i] + kb[i]
                    sums[i][pair] = s
                key_parts.append(s)
            key = tuple(key_parts)
            prod = ca * cb
            if key in acc:
                acc[key] = acc[key] + prod
                ref[key] = max(ref[key], _coeff_abs(prod))
            else:
                acc[key] = prod
                ref[key] = _coeff_abs(prod)
    out: Dict[Key, Coeff] = {}
    for key, c in acc.items():
        if _is_negligible(c, ref[key]):
            continue
        out[key] = _clean(c, ref[key])
    return GenSeries(variables, params, out, bounds, a.truncated or b.truncated)


def _point_arrays(s: GenSeries, point: Union[Mapping[str, Any], Sequence[Any]]) -> List[np.ndarray]:
    if isinstance(point, Mapping):
        try:
            vals = [point[v] for v in s.variables]
        except KeyError as e:
            raise VariableMismatch(f"no value for variable {e}") from None
    else:
        vals = list(point)
        if len(vals) != len(s.variables):
            raise VariableMismatch(f"point has {len(vals)} values for {len(s.variables)} variables")
    return [np.asarray(v, dtype=float) for v in vals]


def series_eval(s: GenSeries, point: Union[Mapping[str, Any], Sequence[Any]]) -> Any:
    """Evaluate at a point, or elementwise over broadcastable numpy arrays.

    Raises:
        UnspecializedPoly: a coefficient still carries symbols.
        DomainError: a non-positive base meets a fractional or negative exponent.
    """
    arrays = _point_arrays(s, point)
    shape = np.broadcast_shapes(*[a.shape for a in arrays]) if arrays else ()
    total = np.zeros(shape, dtype=float)
    powers: List[Dict[Fraction, np.ndarray]] = [dict() for _ in arrays]
    for key, c in s.terms.items():
        if isinstance(c, Poly):
            if not c.is_constant():
                raise UnspecializedPoly(f"series coefficient {c} has free symbols {sorted(c.symbols())}")
            c = c.constant_value()
        term = np.full(shape, c, dtype=float)
        for i, e in enumerate(key):
            if e == 0:
                continue
            ev = s.params.value(e)
            pw = powers[i].get(ev)
            if pw is None:
                base = arrays[i]
                if ev.denominator != 1 and np.any(base < 0):
                    raise DomainError(f"{s.variables[i]}^({e}) at a negative point")
                if ev < 0 and np.any(base == 0):
                    raise DomainError(f"{s.variables[i]}^({e}) at {s.variables[i]}=0")
                pw = np.power(base, float(ev)) if ev.denominator != 1 else np.power(base, int(ev))
                powers[i][ev] = pw
            term = term * pw
        total = total + term
    if total.shape == ():
        return float(total)
    return total


def series_fit_to_basis(s: GenSeries, basis: Sequence[GenSeries], tol: float = FIT_TOL) -> FitResult:
    """Express s in the span of basis, comparing terms up to the joint truncation frontier.

    Terms are matched by exact numeric exponent. Rows above the frontier of s
    or of any basis function are not compared; they are counted as
    truncation artifacts.

    Raises:
        DependentBasis: the basis rows compared are rank deficient.
    """
    if not basis:
        raise DependentBasis("empty basis")
    for phi in basis:
        _check_pair(s, phi)
        if phi.has_poly():
            raise UnspecializedPoly("basis functions must have scalar coefficients")
    bounds: List[Bound] = list(s.bounds)
    for phi in basis:
        bounds = [_min_bound(x, y) for x, y in zip(bounds, phi.bounds)]
    params = s.params

    def numeric(key: Key) -> Tuple[Fraction, ...]:
        return tuple(params.value(e) for e in key)

    def inside(nk: Tuple[Fraction, ...]) -> bool:
        return all(b is None or v <= b for v, b in zip(nk, bounds))

    rows: Dict[Tuple[Fraction, ...], int] = {}
    artifacts = 0
    for series in [s, *basis]:
        for key in series.terms:
            nk = numeric(key)
            if inside(nk):
                rows.setdefault(nk, len(rows))
            elif series is s:
                artifacts += 1
    order = sorted(rows)
    rows = {nk: i for i, nk in enumerate(order)}
    n = len(basis)
    A = np.zeros((len(rows), n))
    for j, phi in enumerate(basis):
        for key, c in phi.terms.items():
            nk = numeric(key)
            if nk in rows:
                A[rows[nk], j] += c
    rhs: List[Coeff] = [0.0] * len(rows)
    for key, c in s.terms.items():
        nk = numeric(key)
        if nk in rows:
            rhs[rows[nk]] = rhs[rows[nk]] + c
    if len(rows) < n or np.linalg.matrix_rank(A) < n:
        raise DependentBasis(f"basis of {n} functions has rank {np.linalg.matrix_rank(A) if len(rows) else 0} "
                             f"on the compared exponents")
    weights = np.linalg.pinv(A)
    coeffs: List[Coeff] = []
    for j in range(n):
        c: Coeff = 0.0
        for i in range(len(rows)):
            w = float(weights[j, i])
            if w != 0.0:
                c = c + rhs[i] * w
        if isinstance(c, Poly):
            c = c.cleaned(ZERO_CLEANUP)
        coeffs.append(c)

    recon = GenSeries.zero(s.variables, params)
    for c, phi in zip(coeffs, basis):
        recon = recon + phi.scale(c)
    residual = (s - recon).with_bounds(bounds)
    scale = max(s.max_abs(), recon.max_abs(), 1e-300)
    remaining = {k: c for k, c in residual.terms.items() if not _is_small(c, tol * scale)}
    residual = GenSeries(s.variables, params, remaining, residual.bounds)
    return FitResult(coefficients=coeffs, residual=residual, in_span=residual.is_zero(), artifact_terms=artifacts)


def _is_small(c: Coeff, limit: float) -> bool:
    return _coeff_abs(c) <= limit
