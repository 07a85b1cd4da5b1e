from __future__ import annotations

from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import UnspecializedPoly
from .spec import FIT_TOL, ZERO_CLEANUP

# a monomial is a sorted tuple of (symbol, power) with power >= 1
Monomial = Tuple[Tuple[str, int], ...]

ONE: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers: Dict[str, int] = dict(a)
    for sym, p in b:
        powers[sym] = powers.get(sym, 0) + p
    return tuple(sorted(powers.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(p for _, p in m)


def _mono_text(m: Monomial) -> str:
    return "*".join(sym if p == 1 else f"{sym}^{p}" for sym, p in m)


def _coef_text(c: float) -> str:
    if c == int(c) and abs(c) < 1e15:
        return str(int(c))
    return repr(c)


class Poly:
    """Sparse multivariate polynomial with real coefficients.

    Coefficients are floats; the monomial structure is exact. Arithmetic
    mixes freely with floats and ints.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, float]] = None):
        self.terms: Dict[Monomial, float] = {m: float(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def symbol(cls, name: str) -> "Poly":
        return cls({((name, 1),): 1.0})

    @classmethod
    def constant(cls, value: float) -> "Poly":
        return cls({ONE: value})

    @staticmethod
    def lift(value: Any) -> "Poly":
        if isinstance(value, Poly):
            return value
        return Poly.constant(float(value))

    # --- inspection -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == ONE for m in self.terms)

    def constant_value(self) -> float:
        return self.terms.get(ONE, 0.0)

    def symbols(self) -> set:
        return {sym for m in self.terms for sym, _ in m}

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=0)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def coefficient(self, *symbols: str) -> float:
        """Coefficient of the monomial formed by the given symbols (with repetition)."""
        mono: Monomial = ONE
        for s in symbols:
            mono = _mono_mul(mono, ((s, 1),))
        return self.terms.get(mono, 0.0)

    def linear_parts(self) -> Tuple[float, Dict[str, float]]:
        """Split a degree <= 1 polynomial into its constant and its symbol coefficients."""
        if self.degree() > 1:
            raise ValueError(f"Polynomial is not linear: {self}")
        lin = {m[0][0]: c for m, c in self.terms.items() if m}
        return self.constant_value(), lin

    # --- arithmetic -----------------------------------------------------

    def __add__(self, other: Any) -> "Poly":
        if not isinstance(other, (Poly, int, float)):
            return NotImplemented
        other = Poly.lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0.0) + c
            if v == 0.0:
                out.pop(m, None)
            else:
                out[m] = v
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Any) -> "Poly":
        if not isinstance(other, (Poly, int, float)):
            return NotImplemented
        return self + (-Poly.lift(other))

    def __rsub__(self, other: Any) -> "Poly":
        return Poly.lift(other) - self

    def __mul__(self, other: Any) -> "Poly":
        if isinstance(other, (int, float)):
            if other == 0:
                return Poly()
            return Poly({m: c * other for m, c in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        out: Dict[Monomial, float] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, 0.0) + ca * cb
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "Poly":
        if not isinstance(other, (int, float)):
            return NotImplemented
        return self * (1.0 / other)

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Poly.constant(1.0)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, float)):
            other = Poly.constant(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    # --- cleanup and comparison ----------------------------------------

    def cleaned(self, rel: float = ZERO_CLEANUP, scale: Optional[float] = None) -> "Poly":
        """Drop monomials whose |coefficient| is below rel times scale (default: own max)."""
        ref = self.max_abs() if scale is None else scale
        if ref == 0.0:
            return Poly()
        return Poly({m: c for m, c in self.terms.items() if abs(c) > rel * ref})

    def close_to(self, other: Any, rtol: float = FIT_TOL) -> bool:
        other = Poly.lift(other)
        ref = max(self.max_abs(), other.max_abs(), 1e-300)
        diff = (self - other).max_abs()
        return diff <= rtol * ref

    # --- evaluation -----------------------------------------------------

    def evaluate(self, values: Mapping[str, Any], zero: Any = 0.0) -> Any:
        """Evaluate over any ring supporting +, * and integer powers.

        Raises:
            UnspecializedPoly: if a symbol has no value.
        """
        total = zero
        for mono, coef in self.terms.items():
            term: Any = coef
            for sym, p in mono:
                if sym not in values:
                    raise UnspecializedPoly(f"No value for symbol '{sym}' in {self}")
                v = values[sym]
                term = term * (v if p == 1 else v ** p)
            total = total + term
        return total

    def substitute(self, values: Mapping[str, Any]) -> "Poly":
        """Replace the given symbols by polynomials or numbers; others stay symbolic."""
        out = Poly()
        for mono, coef in self.terms.items():
            term = Poly.constant(coef)
            for sym, p in mono:
                base = Poly.lift(values[sym]) if sym in values else Poly.symbol(sym)
                term = term * base ** p
            out = out + term
        return out

    # --- canonical form -------------------------------------------------

    def canonical(self) -> List[Tuple[Monomial, float]]:
        """Terms in graded-lex order: higher total degree first, then by symbols."""
        return sorted(self.terms.items(), key=lambda mc: (-_mono_degree(mc[0]), mc[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: List[str] = []
        for mono, coef in self.canonical():
            mag = abs(coef)
            if not mono:
                body = _coef_text(mag)
            elif mag == 1.0:
                body = _mono_text(mono)
            else:
                body = f"{_coef_text(mag)}*{_mono_text(mono)}"
            sign = "-" if coef < 0 else "+"
            if not parts:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Poly({self})"


def poly_sum(items: Iterable[Any]) -> Poly:
    out = Poly()
    for item in items:
        out = out + item
    return out


def derivative_symbol(name: str, order: Any) -> str:
    """Symbol standing for the order-th time derivative of the unknown name, e.g. D[gamma]K1."""
    return f"D[{order}]{name}"
