"""Operator expression trees and the invariant subspace reduction.

Operators, basis functions and solution templates share one textual
language (see doc/operator_syntax.md). A compiled tree is applied to
GenSeries fields; with symbolic (Poly) coefficients this yields the
expansion coefficients psi, and with solution series in t it yields the
residual of the original equation.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, FracSubspaceError, NotInvariantError, ParseError, SchemaError, annotate
from .expr_parser import ast_names, exponent_from_ast, parse, scalar_from_ast
from .fode import two_order_series
from .fracalc import (caputo_deriv, coordinate, epsilon_series, frac_cos_series, frac_sin_series, ml_exp_series,
                      ml_series, sequential_deriv)
from .poly import Poly, derivative_symbol
from .series import ExponentVector, GenSeries, ParamTable, series_eval, series_fit_to_basis
from .spec import CAPUTO, DEFAULT_FRONTIER, FIT_TOL, RIEMANN_LIOUVILLE
from .types import FODEEquation, FODESystem, InvarianceReport, TimeTerm

logger = logging.getLogger(__name__)

Fields = Union[Mapping[str, GenSeries], Sequence[GenSeries]]


@dataclass
class OperatorContext:
    """Everything a tree needs to turn into series: variables, parameter values, truncation."""
    space_variables: Tuple[str, ...]
    params: ParamTable
    values: Dict[str, float]
    components: Tuple[str, ...] = ()
    order_names: Tuple[str, ...] = ()
    time_var: str = "t"
    frontier: Fraction = DEFAULT_FRONTIER
    with_time: bool = False
    # filled while applying Dt(...) to symbolic coefficients: symbol -> (unknown, order)
    derivative_symbols: Dict[str, Tuple[str, ExponentVector]] = field(default_factory=dict)

    @property
    def variables(self) -> Tuple[str, ...]:
        return ((self.time_var,) if self.with_time else ()) + tuple(self.space_variables)

    def timed(self) -> "OperatorContext":
        return replace(self, with_time=True)

    def time_only(self) -> "OperatorContext":
        return replace(self, space_variables=(), components=(), with_time=True)

    def scalar(self, ast) -> float:
        return scalar_from_ast(ast, self.values)

    def exponent(self, ast) -> ExponentVector:
        return exponent_from_ast(ast, self.order_names)


# --- expression nodes -----------------------------------------------------------------

class OperatorExpr:
    """Base of the operator tree; apply() maps component fields to a GenSeries."""

    def apply(self, fields: Mapping[str, GenSeries], ctx: OperatorContext) -> GenSeries:
        raise NotImplementedError

    def component_refs(self) -> List["ComponentRef"]:
        return []


@dataclass(frozen=True, eq=False)
class ComponentRef(OperatorExpr):
    index: int
    name: str

    def apply(self, fields, ctx):
        return fields[self.name]

    def component_refs(self):
        return [self]

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=False)
class SpaceDeriv(OperatorExpr):
    """k-fold sequential Caputo derivative in a space variable."""
    child: OperatorExpr
    var: str
    order: ExponentVector
    k: int = 1

    def apply(self, fields, ctx):
        inner = self.child.apply(fields, ctx)
        try:
            return sequential_deriv(inner, self.var, self.order, self.k, CAPUTO)
        except FracSubspaceError as e:
            raise annotate(e, f"in {self}") from e

    def component_refs(self):
        return self.child.component_refs()

    def __str__(self):
        tail = f",{self.k}" if self.k != 1 else ""
        return f"D({self.child},{self.var},{self.order}{tail})"


@dataclass(frozen=True, eq=False)
class MixedDeriv(OperatorExpr):
    """Caputo time derivative of a space expression.

    Without a time variable the operand carries symbolic coefficients; each
    linear coefficient K is replaced by the symbol D[order]K.
    """
    child: OperatorExpr
    order: ExponentVector

    def apply(self, fields, ctx):
        inner = self.child.apply(fields, ctx)
        if ctx.time_var in inner.variables:
            try:
                return caputo_deriv(inner, ctx.time_var, self.order)
            except FracSubspaceError as e:
                raise annotate(e, f"in {self}") from e
        out = {}
        for key, c in inner.terms.items():
            if not isinstance(c, Poly):
                continue
            const, lin = _linear_or_raise(c, self)
            dc = Poly()
            for sym, coef in lin.items():
                name = derivative_symbol(sym, self.order)
                ctx.derivative_symbols[name] = (sym, self.order)
                dc = dc + Poly.symbol(name) * coef
            if not dc.is_zero():
                out[key] = dc
        return GenSeries(inner.variables, inner.params, out, inner.bounds)

    def component_refs(self):
        return self.child.component_refs()

    def __str__(self):
        return f"Dt({self.child},{self.order})"


def _linear_or_raise(c: Poly, node: OperatorExpr):
    try:
        return c.linear_parts()
    except ValueError:
        raise DomainError(f"in {node}: time derivative of a nonlinear coefficient {c}") from None


@dataclass(frozen=True, eq=False)
class CoordMonomial(OperatorExpr):
    var: str
    exponent: ExponentVector

    def apply(self, fields, ctx):
        return coordinate(ctx.variables, ctx.params, self.var, self.exponent)

    def __str__(self):
        return f"{self.var}^({self.exponent})"


@dataclass(frozen=True, eq=False)
class SpecialFn(OperatorExpr):
    """Named special function of one variable, expanded to a truncated series."""
    kind: str
    var: str
    exponents: Tuple[ExponentVector, ...]
    scalars: Tuple[float, ...]
    n: int = 0

    def apply(self, fields, ctx):
        v, p, fr = ctx.variables, ctx.params, ctx.frontier
        if self.kind == 'E':
            return ml_exp_series(v, p, self.var, self.exponents[0], self.scalars[0], fr)
        if self.kind == 'ml':
            a, b = self.exponents
            return ml_series(v, p, self.var, a, b, self.scalars[0], b - 1, fr)
        if self.kind == 'sin':
            return frac_sin_series(v, p, self.var, self.exponents[0], self.scalars[0], fr)
        if self.kind == 'cos':
            return frac_cos_series(v, p, self.var, self.exponents[0], self.scalars[0], fr)
        if self.kind == 'eps':
            a, b = self.exponents
            return epsilon_series(v, p, self.var, self.n, self.scalars[0], a, b, fr)
        if self.kind == 'twoorder':
            mu, nu = self.exponents
            c, lam, *ics = self.scalars
            return two_order_series(v, p, self.var, mu, nu, c, lam, ics, fr)
        raise ParseError(f"unknown special function '{self.kind}'")

    def __str__(self):
        args = [self.var] + ([str(self.n)] if self.kind == 'eps' else [])
        args += [str(e) for e in self.exponents] + [repr(s) for s in self.scalars]
        return f"{self.kind}({','.join(args)})"


@dataclass(frozen=True, eq=False)
class Const(OperatorExpr):
    value: float

    def apply(self, fields, ctx):
        return GenSeries.constant(ctx.variables, ctx.params, self.value)

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True, eq=False)
class Sum(OperatorExpr):
    children: Tuple[OperatorExpr, ...]

    def apply(self, fields, ctx):
        out = self.children[0].apply(fields, ctx)
        for child in self.children[1:]:
            out = out + child.apply(fields, ctx)
        return out

    def component_refs(self):
        return [r for c in self.children for r in c.component_refs()]

    def __str__(self):
        return "(" + " + ".join(str(c) for c in self.children) + ")"


@dataclass(frozen=True, eq=False)
class Product(OperatorExpr):
    children: Tuple[OperatorExpr, ...]

    def apply(self, fields, ctx):
        out = self.children[0].apply(fields, ctx)
        for child in self.children[1:]:
            out = out * child.apply(fields, ctx)
        return out

    def component_refs(self):
        return [r for c in self.children for r in c.component_refs()]

    def __str__(self):
        return "*".join(str(c) for c in self.children)


@dataclass(frozen=True, eq=False)
class Scale(OperatorExpr):
    factor: float
    child: OperatorExpr

    def apply(self, fields, ctx):
        return self.child.apply(fields, ctx).scale(self.factor)

    def component_refs(self):
        return self.child.component_refs()

    def __str__(self):
        return f"{self.factor!r}*{self.child}"


@dataclass(frozen=True, eq=False)
class Power(OperatorExpr):
    child: OperatorExpr
    n: int

    def apply(self, fields, ctx):
        return self.child.apply(fields, ctx) ** self.n

    def component_refs(self):
        return self.child.component_refs()

    def __str__(self):
        return f"({self.child})^{self.n}"


# --- compilation ----------------------------------------------------------------------

_STRUCTURAL = {'D', 'Dt', 'mono', 'E', 'ml', 'sin', 'cos', 'eps', 'twoorder'}
_ARITY = {'D': (3, 4), 'Dt': (2, 2), 'mono': (2, 2), 'E': (3, 3), 'ml': (4, 4), 'sin': (3, 3), 'cos': (3, 3),
          'eps': (5, 5), 'twoorder': (6, 99)}


def _has_structural_call(ast) -> bool:
    kind = ast[0]
    if kind == 'call':
        return ast[1] in _STRUCTURAL or any(_has_structural_call(a) for a in ast[2])
    if kind in ('num', 'name'):
        return False
    if kind == 'neg':
        return _has_structural_call(ast[1])
    return _has_structural_call(ast[1]) or _has_structural_call(ast[2])


def _is_scalar(ast, ctx: OperatorContext) -> bool:
    if ast_names(ast) & (set(ctx.components) | set(ctx.variables)):
        return False
    return not _has_structural_call(ast)


def _var_name(ast, ctx: OperatorContext, where: str) -> str:
    if ast[0] != 'name' or ast[1] not in ctx.variables:
        raise ParseError(f"{where}: expected one of the variables {ctx.variables}")
    return ast[1]


def _int_arg(ast, ctx: OperatorContext, where: str) -> int:
    v = ctx.scalar(ast)
    if v != int(v) or v < 0:
        raise ParseError(f"{where}: expected a non-negative integer, got {v}")
    return int(v)


def compile_operator(source, ctx: OperatorContext) -> OperatorExpr:
    """Compile operator, basis or template text (or a parsed AST) into a tree.

    Raises:
        ParseError: syntax errors, unknown names and malformed primitives.
    """
    ast = parse(source) if isinstance(source, str) else source
    return _compile(ast, ctx)


def _compile(ast, ctx: OperatorContext) -> OperatorExpr:
    if _is_scalar(ast, ctx):
        return Const(ctx.scalar(ast))
    kind = ast[0]
    if kind == 'name':
        name = ast[1]
        if name in ctx.components:
            return ComponentRef(ctx.components.index(name), name)
        return CoordMonomial(name, ExponentVector(1))
    if kind == 'neg':
        return Scale(-1.0, _compile(ast[1], ctx))
    if kind in ('add', 'sub'):
        left = _compile(ast[1], ctx)
        right = _compile(ast[2], ctx)
        if kind == 'sub':
            right = Scale(-1.0, right)
        parts = []
        for node in (left, right):
            parts.extend(node.children if isinstance(node, Sum) else (node,))
        return Sum(tuple(parts))
    if kind == 'mul':
        if _is_scalar(ast[1], ctx):
            return Scale(ctx.scalar(ast[1]), _compile(ast[2], ctx))
        if _is_scalar(ast[2], ctx):
            return Scale(ctx.scalar(ast[2]), _compile(ast[1], ctx))
        left, right = _compile(ast[1], ctx), _compile(ast[2], ctx)
        parts = []
        for node in (left, right):
            parts.extend(node.children if isinstance(node, Product) else (node,))
        return Product(tuple(parts))
    if kind == 'div':
        if not _is_scalar(ast[2], ctx):
            raise ParseError("only division by scalars is supported")
        d = ctx.scalar(ast[2])
        if d == 0:
            raise ParseError("division by zero")
        return Scale(1.0 / d, _compile(ast[1], ctx))
    if kind == 'pow':
        base = ast[1]
        if base[0] == 'name' and base[1] in ctx.variables:
            return CoordMonomial(base[1], ctx.exponent(ast[2]))
        if not _is_scalar(ast[2], ctx):
            raise ParseError("powers of expressions need a scalar integer exponent")
        return Power(_compile(base, ctx), _int_arg(ast[2], ctx, "power"))
    if kind == 'call':
        return _compile_call(ast[1], ast[2], ctx)
    raise ParseError(f"cannot compile {ast}")


def _compile_call(fname: str, args: tuple, ctx: OperatorContext) -> OperatorExpr:
    if fname not in _ARITY:
        raise ParseError(f"unknown function '{fname}' outside a scalar expression")
    lo, hi = _ARITY[fname]
    if not lo <= len(args) <= hi:
        raise ParseError(f"{fname}() takes {lo}{'' if lo == hi else '+'} arguments, got {len(args)}")
    if fname == 'D':
        var = _var_name(args[1], ctx, "D()")
        if var == ctx.time_var and ctx.with_time and var not in ctx.space_variables:
            raise ParseError("D() differentiates in space; use Dt() for time")
        k = _int_arg(args[3], ctx, "D() repeat") if len(args) == 4 else 1
        if k < 1:
            raise ParseError("D() repeat must be >= 1")
        return SpaceDeriv(_compile(args[0], ctx), var, ctx.exponent(args[2]), k)
    if fname == 'Dt':
        return MixedDeriv(_compile(args[0], ctx), ctx.exponent(args[1]))
    if fname == 'mono':
        return CoordMonomial(_var_name(args[0], ctx, "mono()"), ctx.exponent(args[1]))
    var = _var_name(args[0], ctx, f"{fname}()")
    if fname in ('E', 'sin', 'cos'):
        return SpecialFn(fname, var, (ctx.exponent(args[1]),), (ctx.scalar(args[2]),))
    if fname == 'ml':
        return SpecialFn(fname, var, (ctx.exponent(args[1]), ctx.exponent(args[2])), (ctx.scalar(args[3]),))
    if fname == 'eps':
        return SpecialFn(fname, var, (ctx.exponent(args[3]), ctx.exponent(args[4])), (ctx.scalar(args[2]),),
                         n=_int_arg(args[1], ctx, "eps() index"))
    # twoorder(var, mu, nu, c, lam, k0, k1, ...)
    exps = (ctx.exponent(args[1]), ctx.exponent(args[2]))
    return SpecialFn(fname, var, exps, tuple(ctx.scalar(a) for a in args[3:]))


def build_series(source, ctx: OperatorContext) -> GenSeries:
    """Series of a field-free expression such as a basis function or a K(t) template."""
    return compile_operator(source, ctx).apply({}, ctx)


# --- operator application and invariance ---------------------------------------------------

def _field_map(fields: Fields, ctx: OperatorContext) -> Dict[str, GenSeries]:
    if isinstance(fields, Mapping):
        return dict(fields)
    if len(fields) != len(ctx.components):
        raise ValueError(f"{len(fields)} fields for {len(ctx.components)} components")
    return dict(zip(ctx.components, fields))


def op_apply(N: Sequence[OperatorExpr], fields: Fields, ctx: OperatorContext) -> List[GenSeries]:
    """Image of the field tuple under each component operator."""
    fmap = _field_map(fields, ctx)
    for node in N:
        for ref in node.component_refs():
            if ref.index >= len(ctx.components):
                raise ValueError(f"operator refers to component {ref.index} of {len(ctx.components)}")
    return [node.apply(fmap, ctx) for node in N]


@dataclass
class SubspaceBasis:
    functions: List[List[GenSeries]]  # functions[p][j]
    symbols: List[List[str]]  # coefficient symbols, e.g. [["K1", "K2"], ["L1"]]
    texts: List[List[str]] = field(default_factory=list)

    def check(self) -> None:
        """Raises DependentBasis if some component's functions are linearly dependent."""
        if len(self.functions) != len(self.symbols):
            raise SchemaError("basis and symbol lists differ in length")
        for p, fns in enumerate(self.functions):
            if not fns:
                raise SchemaError(f"component {p} has an empty basis")
            if len(fns) != len(self.symbols[p]):
                raise SchemaError(f"component {p}: {len(fns)} functions but {len(self.symbols[p])} symbols")
            series_fit_to_basis(fns[0], fns)

    @property
    def all_symbols(self) -> List[str]:
        return [s for row in self.symbols for s in row]


def build_basis(texts: Sequence[Sequence[str]], symbols: Sequence[Sequence[str]],
                ctx: OperatorContext) -> SubspaceBasis:
    functions = [[build_series(t, ctx) for t in row] for row in texts]
    basis = SubspaceBasis(functions, [list(s) for s in symbols], [list(t) for t in texts])
    basis.check()
    return basis


def generic_element(basis: SubspaceBasis, ctx: OperatorContext) -> Dict[str, GenSeries]:
    """sum_j k_pj phi_p^j with Poly coefficients k_pj, one series per component."""
    out = {}
    for comp, fns, syms in zip(ctx.components, basis.functions, basis.symbols):
        total = GenSeries.zero(ctx.variables, ctx.params)
        for phi, sym in zip(fns, syms):
            total = total + phi.scale(Poly.symbol(sym))
        out[comp] = total
    return out


def check_invariant(N: Sequence[OperatorExpr], basis: SubspaceBasis, ctx: OperatorContext,
                    tol: float = FIT_TOL) -> InvarianceReport:
    """Decide invariance in the Poly ring and extract the expansion coefficients psi."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        images = op_apply(N, generic_element(basis, ctx), ctx)
        psi: List[List[Poly]] = []
        residuals: List[GenSeries] = []
        invariant = True
        artifacts = 0
        for comp, image, fns in zip(ctx.components, images, basis.functions):
            fit = series_fit_to_basis(image, fns, tol)
            psi.append([Poly.lift(c).cleaned() for c in fit.coefficients])
            residuals.append(fit.residual)
            artifacts += fit.artifact_terms
            if not fit.in_span:
                invariant = False
                warnings.warn(f"image of {comp} leaves the subspace: {fit.residual.to_text(max_terms=4)}")
    if artifacts:
        logger.debug("invariance fit ignored %d terms above the frontier %s", artifacts, ctx.frontier)
    return InvarianceReport(invariant=invariant, psi=psi, residuals=residuals, symbols=basis.symbols,
                            artifact_terms=artifacts, frontier=ctx.frontier,
                            warnings=[str(w.message) for w in caught])


# --- time operators and reduction ------------------------------------------------------------

@dataclass
class TimeOperator:
    """Left side sum_i lambda_i D^gamma(i) f_p for each component."""
    terms: Dict[str, List[TimeTerm]]
    kind: str = CAPUTO

    def validate(self, params: ParamTable) -> None:
        """Orders must read i*alpha or alpha+i-1 (i = 1..m) for each component.

        Raises:
            SchemaError: unknown kind, empty or non-finite terms, or orders off both families.
        """
        if self.kind not in (CAPUTO, RIEMANN_LIOUVILLE):
            raise SchemaError(f"unknown derivative kind '{self.kind}'")
        for comp, terms in self.terms.items():
            if not terms:
                raise SchemaError(f"component {comp} has no time terms")
            if any(not np.isfinite(t.coef) for t in terms):
                raise SchemaError(f"component {comp} has a non-finite time coefficient")
            orders = sorted((t.order * t.repeat for t in terms), key=params.value)
            alpha = orders[0]
            if params.value(alpha) <= 0:
                raise SchemaError(f"component {comp}: time orders must be positive")
            multiples = all(o == alpha * (i + 1) for i, o in enumerate(orders))
            shifted = all(o == alpha + i for i, o in enumerate(orders))
            if not (multiples or shifted):
                raise SchemaError(f"component {comp}: orders {[str(o) for o in orders]} follow neither "
                                  f"i*alpha nor alpha+i-1")

    def apply(self, comp: str, s: GenSeries, var: str) -> GenSeries:
        out = GenSeries.zero(s.variables, s.params)
        for term in self.terms[comp]:
            try:
                d = sequential_deriv(s, var, term.order, term.repeat, self.kind)
            except FracSubspaceError as e:
                raise annotate(e, f"time operator of {comp}") from e
            out = out + d.scale(term.coef)
        return out


def reduce(T: TimeOperator, N: Sequence[OperatorExpr], basis: SubspaceBasis, ctx: OperatorContext,
           report: Optional[InvarianceReport] = None) -> FODESystem:
    """Emit sum_i lambda_i D^gamma(i) K_pj = psi_p^j for every component p and index j.

    Raises:
        NotInvariantError: the subspace is not invariant under N.
    """
    if report is None:
        report = check_invariant(N, basis, ctx)
    if not report.invariant:
        raise NotInvariantError("; ".join(report.warnings) or "subspace is not invariant")
    equations = []
    used = set()
    for comp, syms, psis in zip(ctx.components, basis.symbols, report.psi):
        for sym, psi in zip(syms, psis):
            lhs = [TimeTerm(t.coef, t.order, t.repeat) for t in T.terms[comp]]
            equations.append(FODEEquation(sym, lhs, psi))
            used |= psi.symbols()
    dsyms = {k: v for k, v in ctx.derivative_symbols.items() if k in used}
    return FODESystem(equations, T.kind, params=ctx.params, time_var=ctx.time_var, derivative_symbols=dsyms)


def _coef_prefix(c: float) -> str:
    if c == 1:
        return ""
    if c == -1:
        return "-"
    return f"{c:.12g}*"


def format_system(sys: FODESystem) -> List[str]:
    """One canonical line per equation: sum_i lambda_i D^(gamma_i)[K] = psi."""
    lines = []
    tag = "RL " if sys.kind == RIEMANN_LIOUVILLE else ""
    for eq in sys.equations:
        parts = []
        for term in eq.lhs:
            d = f"D^({term.order})" if term.repeat == 1 else f"(D^({term.order}))^{term.repeat}"
            parts.append(f"{_coef_prefix(term.coef)}{tag}{d}[{eq.unknown}]")
        lines.append(f"{' + '.join(parts)} = {eq.rhs}")
    return lines


# --- candidate solutions ---------------------------------------------------------------------

@dataclass
class SolutionForm:
    """f_p = sum_j K_pj(t) phi_p^j(x), kept factorized."""
    factors: Dict[str, List[Tuple[GenSeries, GenSeries]]]

    @classmethod
    def from_coefficients(cls, coefficients: Mapping[str, GenSeries], basis: SubspaceBasis,
                          ctx: OperatorContext) -> "SolutionForm":
        factors = {}
        for comp, fns, syms in zip(ctx.components, basis.functions, basis.symbols):
            missing = [s for s in syms if s not in coefficients]
            if missing:
                raise SchemaError(f"no solution given for {missing}")
            factors[comp] = [(coefficients[s], phi) for s, phi in zip(syms, fns)]
        return cls(factors)

    def assemble(self, variables: Sequence[str]) -> Dict[str, GenSeries]:
        out = {}
        for comp, pairs in self.factors.items():
            total = None
            for k, phi in pairs:
                term = k.embed(variables) * phi.embed(variables)
                total = term if total is None else total + term
            out[comp] = total
        return out

    def evaluate(self, point: Mapping[str, np.ndarray]) -> Dict[str, np.ndarray]:
        """Field values on broadcastable arrays, evaluating each factor on its own variables."""
        out = {}
        for comp, pairs in self.factors.items():
            total = 0.0
            for k, phi in pairs:
                kv = series_eval(k, {v: point[v] for v in k.variables})
                pv = series_eval(phi, {v: point[v] for v in phi.variables})
                total = total + np.asarray(kv) * np.asarray(pv)
            out[comp] = np.asarray(total, dtype=float)
        return out


def mesh(grid: Mapping[str, Sequence[float]], variables: Sequence[str]) -> Dict[str, np.ndarray]:
    """Meshgrid ('ij' order) over the given variables."""
    missing = [v for v in variables if v not in grid]
    if missing:
        raise SchemaError(f"grid has no axis for {missing}")
    axes = [np.asarray(grid[v], dtype=float) for v in variables]
    return dict(zip(variables, np.meshgrid(*axes, indexing='ij')))


def residual(T: TimeOperator, N: Sequence[OperatorExpr], candidate: SolutionForm,
             grid: Mapping[str, Sequence[float]], ctx: OperatorContext) -> float:
    """max |lhs - rhs| / (1 + max |f|) over the grid and all components."""
    tctx = ctx.timed()
    fields = candidate.assemble(tctx.variables)
    images = op_apply(N, fields, tctx)
    point = mesh(grid, tctx.variables)
    worst = 0.0
    fmax = 0.0
    for comp, image in zip(tctx.components, images):
        r = T.apply(comp, fields[comp], tctx.time_var) - image
        worst = max(worst, float(np.max(np.abs(series_eval(r, point)))))
        fmax = max(fmax, float(np.max(np.abs(series_eval(fields[comp], point)))))
    return worst / (1.0 + fmax)
