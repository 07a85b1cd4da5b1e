"""Binding, verification and sampling of catalog problems.

A ProblemSpec is bound to parameter values (``bind``), which compiles its
operators, basis and known solution. ``verify`` then replays the whole
pipeline: invariance, reduced right sides, residual of the closed form,
the FODE solvers, a numeric oracle and the classical limit.
"""
from __future__ import annotations

import logging
import re
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import (FracSubspaceError, Inconsistent, NotInvariantError, ParamOutOfRange, SchemaError,
                     UnknownExample)
from .examples import STRUCTURAL_PARAMS, example_ids, problem_spec
from .expr_parser import array_from_ast, parse, parse_poly
from .fode import (FODEInitialData, adams_pece, match_power_branch, nim_iteration_count, nim_partial_sums,
                   solve_power_ansatz, solve_series)
from .fracalc import rl_integral
from .operators import (OperatorContext, OperatorExpr, SolutionForm, SubspaceBasis, TimeOperator, build_basis,
                        build_series, check_invariant, compile_operator, mesh, reduce, residual)
from .poly import derivative_symbol
from .series import ExponentVector, GenSeries, ParamTable, series_eval, series_fit_to_basis, to_fraction
from .spec import (CAPUTO, CLASSICAL_TOL, DEFAULT_FRONTIER, DRAW_ATTEMPTS, DRAW_DIGITS, DRAW_LOW, DRAW_MARGIN,
                   ORACLE_HORIZON, ORACLE_STEP, ORACLE_TOL, PRIMARY_SUBSPACE, PSI_TOL,
                   RESIDUAL_TOL, RIEMANN_LIOUVILLE, SAMPLE_FRONTIER, SERIES_SOLUTION, SOLVER_TOL, STAGE_CLASSICAL,
                   STAGE_INVARIANCE, STAGE_ORACLE, STAGE_PSI, STAGE_RESIDUAL, STAGE_SOLVER, STAGES)
from .types import (FODESolution, FODESystem, InvarianceReport, ProblemSpec, StageResult, SubspaceSpec, TimeTerm,
                    VerificationReport)

logger = logging.getLogger(__name__)

Problem = Union[str, ProblemSpec]
Settings = Optional[Mapping[str, Any]]

_CONSTRAINT_RE = re.compile(r"^(.*?)(<=|>=|==|!=|<|>)(.*)$")


@dataclass
class KnownSolution:
    coefficients: Dict[str, GenSeries]  # symbol -> series in t
    form: SolutionForm
    provenance: str
    tags: Dict[str, str]


@dataclass
class BoundProblem:
    spec: ProblemSpec
    subspace_name: str
    subspace: SubspaceSpec
    ctx: OperatorContext
    T: TimeOperator
    N: List[OperatorExpr]
    basis: SubspaceBasis
    ics: FODEInitialData
    axes: Dict[str, np.ndarray]
    known: Optional[KnownSolution] = None

    @property
    def table(self) -> ParamTable:
        return self.ctx.params

    @property
    def time_ctx(self) -> OperatorContext:
        return self.ctx.time_only()

    @cached_property
    def invariance(self) -> InvarianceReport:
        return check_invariant(self.N, self.basis, self.ctx)

    @cached_property
    def system(self) -> FODESystem:
        return reduce(self.T, self.N, self.basis, self.ctx, self.invariance)

    def point(self) -> Dict[str, np.ndarray]:
        return mesh(self.axes, ("t",) + tuple(self.spec.variables))


# --- parameters -------------------------------------------------------------------------

def resolve(problem: Problem, params: Settings = None) -> Tuple[ProblemSpec, Dict[str, Any]]:
    """ProblemSpec for an id or spec, and the params left after removing structural sizes."""
    params = dict(params or {})
    if isinstance(problem, ProblemSpec):
        return problem, params
    structure = {}
    for name in STRUCTURAL_PARAMS.get(problem, []):
        if name in params:
            value = to_fraction(params.pop(name))
            if value.denominator != 1:
                raise ParamOutOfRange(f"{problem}: structural parameter {name} must be an integer, got {value}")
            structure[name] = int(value)
    return problem_spec(problem, structure), params


def split_settings(spec: ProblemSpec, settings: Mapping[str, Any]) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """Route name=value settings to declared parameters or free constants.

    Raises:
        SchemaError: a name is neither.
    """
    params, bindings = {}, {}
    structural = STRUCTURAL_PARAMS.get(spec.id, [])
    for name, value in settings.items():
        if name in spec.params or name in structural:
            params[name] = value
        elif name in spec.free_constants:
            bindings[name] = value
        else:
            known = sorted(list(spec.params) + list(spec.free_constants) + structural)
            raise SchemaError(f"{spec.id} has no parameter or constant '{name}' (known: {', '.join(known)})")
    return params, bindings


def _constraint_gap(text: str, values: Mapping[str, float]) -> Tuple[str, float]:
    m = _CONSTRAINT_RE.match(text.strip())
    if m is None:
        raise SchemaError(f"cannot read constraint '{text}'")
    lhs, op, rhs = m.groups()
    a = parse_poly(lhs, (), values).constant_value()
    b = parse_poly(rhs, (), values).constant_value()
    return op, a - b


def constraint_holds(text: str, values: Mapping[str, float], margin: float = 0.0) -> bool:
    """True when `lhs op rhs` holds; strict comparisons also need a gap of at least margin."""
    op, d = _constraint_gap(text, values)
    if op == "<":
        return d < 0 and -d >= margin
    if op == ">":
        return d > 0 and d >= margin
    if op == "<=":
        return d <= 0
    if op == ">=":
        return d >= 0
    if op == "==":
        return d == 0
    return d != 0


def bind_values(spec: ProblemSpec, params: Settings = None, bindings: Settings = None
                ) -> Tuple[ParamTable, Dict[str, float]]:
    """Parameter table and free-constant values after overrides and range checks.

    Raises:
        ParamOutOfRange: a value outside its declared range, or a violated constraint.
        SchemaError: an override names an unknown parameter or constant.
    """
    params = dict(params or {})
    bindings = dict(bindings or {})
    unknown = [n for n in params if n not in spec.params]
    if unknown:
        raise SchemaError(f"{spec.id} has no parameter {unknown}")
    values = {}
    for name, decl in spec.params.items():
        try:
            values[name] = to_fraction(params[name]) if name in params else decl.value
        except (TypeError, ValueError) as e:
            raise ParamOutOfRange(f"Parameter {name}: {e}") from None
    table = ParamTable(values, spec.params)
    unknown = [n for n in bindings if n not in spec.free_constants]
    if unknown:
        raise SchemaError(f"{spec.id} has no free constant {unknown}")
    free = {n: float(bindings.get(n, v)) for n, v in spec.free_constants.items()}
    floats = table.as_floats()
    for c in spec.constraints:
        if not constraint_holds(c, floats):
            raise ParamOutOfRange(f"{spec.id}: parameters violate {spec.constraint_text or c}")
    return table, free


def grid_axes(spec: ProblemSpec, grid: Optional[Mapping[str, Sequence[float]]] = None) -> Dict[str, np.ndarray]:
    """Axes of the sampling grid; entries of grid replace the problem's defaults per variable.

    Raises:
        SchemaError: a missing axis, count < 1, low > high, or an unknown variable.
    """
    merged = {k: list(v) for k, v in spec.grid.items()}
    for var, axis in (grid or {}).items():
        if var != "t" and var not in spec.variables:
            raise SchemaError(f"{spec.id} has no variable '{var}'")
        merged[var] = list(axis)
    axes = {}
    for var in ("t",) + tuple(spec.variables):
        if var not in merged:
            raise SchemaError(f"{spec.id}: no grid for '{var}'")
        lo, hi, count = merged[var]
        count = int(count)
        if count < 1:
            raise SchemaError(f"grid count for '{var}' must be >= 1, got {count}")
        if lo > hi:
            raise SchemaError(f"grid for '{var}' has low {lo} > high {hi}")
        axes[var] = np.linspace(float(lo), float(hi), count)
    return axes


# --- binding ----------------------------------------------------------------------------

def _time_operator(spec: ProblemSpec, ctx: OperatorContext) -> TimeOperator:
    terms = {}
    for comp in spec.components:
        if comp not in spec.time_operator:
            raise SchemaError(f"{spec.id}: no time operator for component {comp}")
        terms[comp] = [TimeTerm(ctx.scalar(parse(coef)), ctx.exponent(parse(order)), int(repeat))
                       for coef, order, repeat in spec.time_operator[comp]]
    op = TimeOperator(terms, spec.time_kind)
    op.validate(ctx.params)
    return op


def initial_from_functions(bound_ctx: OperatorContext, basis: SubspaceBasis,
                           functions: Mapping[str, Sequence[str]]) -> FODEInitialData:
    """K_pj(0), K'_pj(0), ... from initial functions f_p(0, x), f_p,t(0, x), ... fitted to the basis.

    Raises:
        SchemaError: an initial function is not in the span of its component's basis.
    """
    ics: FODEInitialData = {}
    for comp, fns, syms in zip(bound_ctx.components, basis.functions, basis.symbols):
        texts = functions.get(comp, [])
        for sym in syms:
            ics.setdefault(sym, [])
        for k, text in enumerate(texts):
            fit = series_fit_to_basis(build_series(text, bound_ctx), fns)
            if not fit.in_span:
                raise SchemaError(f"initial function {k} of {comp} is not in the subspace: {text}")
            for sym, c in zip(syms, fit.coefficients):
                ics[sym].append(float(c))
    return ics


def _initial_data(sub: SubspaceSpec, ctx: OperatorContext, basis: SubspaceBasis) -> FODEInitialData:
    if sub.initial:
        return {sym: [ctx.scalar(parse(v)) for v in vals] for sym, vals in sub.initial.items()}
    if sub.initial_functions:
        return initial_from_functions(ctx, basis, sub.initial_functions)
    return {}


def _known_solution(bound: BoundProblem) -> Optional[KnownSolution]:
    sub = bound.subspace
    if sub.invariance_only or not sub.solution:
        return None
    tctx = bound.time_ctx
    coefficients: Dict[str, GenSeries] = {}
    tags: Dict[str, str] = {}
    deferred = []
    for sym, text in sub.solution.items():
        if text.strip() == SERIES_SOLUTION:
            deferred.append(sym)
            continue
        coefficients[sym] = build_series(text, tctx)
        tags[sym] = "Template"
    if deferred:
        solved = solve_series(bound.system, bound.ics, bound.ctx.frontier)
        for sym in deferred:
            coefficients[sym] = solved.series[sym]
            tags[sym] = "Series"
    form = SolutionForm.from_coefficients(coefficients, bound.basis, bound.ctx)
    return KnownSolution(coefficients, form, sub.solution_source or bound.spec.provenance, tags)


def bind(problem: Problem, params: Settings = None, bindings: Settings = None, *,
         subspace: str = PRIMARY_SUBSPACE, frontier: Fraction = DEFAULT_FRONTIER,
         grid: Optional[Mapping[str, Sequence[float]]] = None) -> BoundProblem:
    """Compile a problem at concrete parameter values.

    Raises:
        UnknownExample: unknown id or subspace.
        ParamOutOfRange: parameters outside their ranges or constraints.
        SchemaError, ParseError: malformed problem text.
    """
    spec, params = resolve(problem, params)
    if subspace not in spec.subspaces:
        raise UnknownExample(f"{spec.id} has no subspace '{subspace}' (have {', '.join(spec.subspaces)})")
    table, free = bind_values(spec, params, bindings)
    values = table.as_floats()
    values.update(free)
    ctx = OperatorContext(space_variables=tuple(spec.variables), params=table, values=values,
                          components=tuple(spec.components), order_names=tuple(spec.order_params),
                          frontier=Fraction(frontier))
    if len(spec.operators) != len(spec.components):
        raise SchemaError(f"{spec.id}: {len(spec.operators)} operators for {len(spec.components)} components")
    T = _time_operator(spec, ctx)
    N = [compile_operator(text, ctx) for text in spec.operators]
    sub = spec.subspaces[subspace]
    basis = build_basis(sub.basis, sub.symbols, ctx)
    ics = _initial_data(sub, ctx, basis)
    bound = BoundProblem(spec=spec, subspace_name=subspace, subspace=sub, ctx=ctx, T=T, N=N, basis=basis, ics=ics,
                         axes=grid_axes(spec, grid))
    bound.known = _known_solution(bound)
    logger.debug("bound %s/%s at %s", spec.id, subspace, table)
    return bound


def build(example_id: str, params: Settings = None, bindings: Settings = None, *,
          subspace: str = PRIMARY_SUBSPACE, frontier: Fraction = DEFAULT_FRONTIER
          ) -> Tuple[ProblemSpec, Optional[KnownSolution]]:
    """Fully bound spec of a catalog entry and its known solution."""
    bound = bind(example_id, params, bindings, subspace=subspace, frontier=frontier)
    return bound_spec(bound.spec, params, bindings), bound.known


def bound_spec(spec: ProblemSpec, params: Settings = None, bindings: Settings = None) -> ProblemSpec:
    """Copy of spec whose defaults are replaced by the given values (validated)."""
    spec, params = resolve(spec, params)
    for name in STRUCTURAL_PARAMS.get(spec.id, []):
        params.pop(name, None)
    table, free = bind_values(spec, params, bindings)
    decls = {n: replace(d, value=table[n], exclude=list(d.exclude)) for n, d in spec.params.items()}
    return replace(spec, params=decls, free_constants=free)


def list_examples() -> List[Tuple[str, str, str]]:
    """(id, title, provenance) for every catalog entry."""
    out = []
    for eid in example_ids():
        spec = problem_spec(eid)
        out.append((spec.id, spec.title, spec.provenance))
    return out


def reduce_problem(problem: Problem, params: Settings = None, bindings: Settings = None, *,
                   subspace: str = PRIMARY_SUBSPACE, frontier: Fraction = DEFAULT_FRONTIER) -> FODESystem:
    """Reduced FODE system of a problem.

    Raises:
        NotInvariantError: the subspace is not invariant.
    """
    return bind(problem, params, bindings, subspace=subspace, frontier=frontier).system


def solve(problem: Problem, params: Settings = None, bindings: Settings = None, *,
          subspace: str = PRIMARY_SUBSPACE, frontier: Fraction = DEFAULT_FRONTIER
          ) -> Tuple[FODESystem, List[FODESolution]]:
    """Solve the reduced system: power-law branches for RL, series from the initial data for Caputo.

    Raises:
        Inconsistent: a Caputo problem without initial data.
    """
    bound = bind(problem, params, bindings, subspace=subspace, frontier=frontier)
    system = bound.system
    if system.kind == RIEMANN_LIOUVILLE:
        return system, solve_power_ansatz(system)
    if not _has_initial_data(bound):
        raise Inconsistent(f"{bound.spec.id}/{subspace} carries no initial data to solve from")
    return system, [solve_series(system, bound.ics, frontier)]


# --- verification stages ------------------------------------------------------------------

def _has_initial_data(bound: BoundProblem) -> bool:
    return bool(bound.ics) and all(bound.ics.get(u) for u in bound.basis.all_symbols)


def _call_symbol(ctx: OperatorContext, symbols: Iterable[str]) -> Callable[[str, tuple], Optional[str]]:
    names = set(symbols)

    def call_symbol(fname: str, args: tuple) -> Optional[str]:
        if fname == "Dt" and len(args) == 2 and args[0][0] == "name" and args[0][1] in names:
            return derivative_symbol(args[0][1], ctx.exponent(args[1]))
        return None

    return call_symbol


def _invariance_stage(bound: BoundProblem) -> StageResult:
    r = bound.invariance
    detail = "; ".join(r.warnings) if r.warnings else "invariant"
    return StageResult(STAGE_INVARIANCE, r.invariant, float(r.artifact_terms), detail)


def _psi_stage(bound: BoundProblem) -> Optional[StageResult]:
    targets = bound.subspace.psi
    if not targets:
        return None
    r = bound.invariance
    symbols = bound.basis.all_symbols
    call_symbol = _call_symbol(bound.ctx, symbols)
    worst = 0.0
    mismatches = []
    for syms, got_row, text_row in zip(r.symbols, r.psi, targets):
        if len(text_row) != len(got_row):
            raise SchemaError(f"{len(text_row)} psi targets for {len(got_row)} basis functions")
        for sym, got, text in zip(syms, got_row, text_row):
            want = parse_poly(text, symbols, bound.ctx.values, call_symbol)
            scale = max(1.0, got.max_abs(), want.max_abs())
            err = (got - want).max_abs() / scale
            worst = max(worst, err)
            if err > PSI_TOL:
                mismatches.append(f"{sym}: got {got}, expected {want}")
    detail = "; ".join(mismatches) if mismatches else "all reduced right sides match"
    return StageResult(STAGE_PSI, not mismatches, worst, detail)


def _residual_stage(bound: BoundProblem, tol: float) -> Optional[StageResult]:
    if bound.known is None:
        return None
    factors = {comp: [(k.truncate(bound.ctx.frontier), phi) for k, phi in pairs]
               for comp, pairs in bound.known.form.factors.items()}
    value = residual(bound.T, bound.N, SolutionForm(factors), bound.axes, bound.ctx)
    return StageResult(STAGE_RESIDUAL, value <= tol, value, f"max_residual={value:.3e} (tol {tol:.1e})")


def _grid_error(got: GenSeries, want: GenSeries, t: np.ndarray) -> float:
    a = np.asarray(series_eval(got, {"t": t}), dtype=float)
    b = np.asarray(series_eval(want, {"t": t}), dtype=float)
    return float(np.max(np.abs(a - b))) / (1.0 + float(np.max(np.abs(b))))


def _power_coefficient(k: GenSeries) -> float:
    if k.is_zero():
        return 0.0
    if len(k) != 1:
        raise Inconsistent(f"expected a single power t^(-alpha), got {k.to_text(max_terms=3)}")
    return float(next(iter(k.terms.values())))


def _nim_start(bound: BoundProblem) -> Tuple[GenSeries, float, ExponentVector]:
    nim = bound.subspace.nim
    if nim is None:
        raise SchemaError(f"{bound.spec.id} subspace '{bound.subspace_name}' has no NIM data")
    tctx = bound.time_ctx
    order = tctx.exponent(parse(nim.order))
    source = build_series(nim.source, tctx)
    g0 = rl_integral(source, "t", order) + tctx.scalar(parse(nim.constant))
    return g0, tctx.scalar(parse(nim.c)), order


def nim_partials(bound: BoundProblem, n_iters: Optional[int] = None) -> List[GenSeries]:
    """NIM partial sums S_0..S_n for the NIM unknown of a bound problem.

    n defaults to the last iterate that still reaches below the truncation frontier.

    Raises:
        SchemaError: the subspace carries no NIM data.
        TruncationStall: n asks for an iterate beyond the frontier.
    """
    g0, c, order = _nim_start(bound)
    if n_iters is None:
        n_iters = nim_iteration_count(g0, order, bound.ctx.frontier)
    return nim_partial_sums(g0, c, order, n_iters, frontier=bound.ctx.frontier)


def _nim_series(bound: BoundProblem) -> GenSeries:
    return nim_partials(bound)[-1]


def _solver_stage(bound: BoundProblem) -> Optional[StageResult]:
    known = bound.known
    if known is None:
        return None
    system = bound.system
    if system.kind == RIEMANN_LIOUVILLE:
        branches = solve_power_ansatz(system)
        target = {u: _power_coefficient(known.coefficients[u]) for u in system.unknowns}
        idx, consts, err = match_power_branch(branches, target)
        detail = (f"branch {idx + 1} of {len(branches)}, free constants {consts}" if idx >= 0
                  else f"no branch of {len(branches)} matches")
        return StageResult(STAGE_SOLVER, idx >= 0, err, detail)
    if not _has_initial_data(bound):
        return None
    t = bound.axes["t"]
    solved = solve_series(system, bound.ics, bound.ctx.frontier)
    errs = {u: _grid_error(solved.series[u], known.coefficients[u], t) for u in system.unknowns}
    detail = f"series solver max error {max(errs.values()):.3e}"
    if bound.subspace.nim is not None:
        nim = bound.subspace.nim
        errs["NIM"] = _grid_error(_nim_series(bound), solved.series[nim.unknown], t)
        detail += f"; NIM {errs['NIM']:.3e}"
    worst = max(errs.values())
    return StageResult(STAGE_SOLVER, worst <= SOLVER_TOL, worst, detail)


def _oracle_applies(bound: BoundProblem) -> bool:
    system = bound.system
    if system.kind != CAPUTO or system.derivative_symbols or not _has_initial_data(bound) or bound.known is None:
        return False
    for eq in system.equations:
        if len(eq.lhs) != 1 or eq.lhs[0].repeat != 1:
            return False
        if not 0 < bound.table.value(eq.lhs[0].order) <= 1:
            return False
    return True


def _oracle_stage(bound: BoundProblem) -> Optional[StageResult]:
    if not _oracle_applies(bound):
        return None
    system = bound.system
    orders = [float(bound.table.value(eq.lhs[0].order)) for eq in system.equations]
    rate = max([1.0] + [sum(abs(c) for c in eq.rhs.terms.values()) / abs(eq.lhs[0].coef)
                        for eq in system.equations])
    # shrink the horizon so the fastest linear rate stays of order one
    horizon = ORACLE_HORIZON * min(1.0, rate ** (-1.0 / min(orders)))
    h = ORACLE_STEP * horizon
    times, traj = adams_pece(system, bound.ics, h, horizon)
    worst = 0.0
    for u in system.unknowns:
        want = np.asarray(series_eval(bound.known.coefficients[u], {"t": times}), dtype=float)
        err = float(np.max(np.abs(traj[u] - want))) / max(1.0, float(np.max(np.abs(want))))
        worst = max(worst, err)
    tol = max(ORACLE_TOL, 10.0 * h ** (1.0 + min(orders)))
    return StageResult(STAGE_ORACLE, worst <= tol, worst,
                       f"Adams PECE on [0,{horizon:.3g}] with h={h:.2e}: max error {worst:.3e} (tol {tol:.1e})")


def _classical_stage(bound: BoundProblem, params: Settings, bindings: Settings,
                     grid: Optional[Mapping[str, Sequence[float]]]) -> Optional[StageResult]:
    limit = bound.spec.classical
    if limit is None or bound.subspace_name != PRIMARY_SUBSPACE:
        return None
    merged = {n: v for n, v in (params or {}).items() if n in bound.spec.params and not bound.spec.params[n].order}
    merged.update(limit.params)
    cb = bind(bound.spec, merged, bindings, frontier=SAMPLE_FRONTIER, grid=grid)
    point = cb.point()
    got = cb.known.form.evaluate(point)
    values: Dict[str, Any] = dict(cb.ctx.values)
    values.update(point)
    worst = 0.0
    for comp, text in limit.fields.items():
        want = array_from_ast(parse(text), values)
        worst = max(worst, float(np.max(np.abs(got[comp] - want))))
    return StageResult(STAGE_CLASSICAL, worst <= CLASSICAL_TOL, worst,
                       f"{limit.source or 'classical limit'}: max deviation {worst:.3e}")


def _run(report: VerificationReport, name: str, fn: Callable[[], Optional[StageResult]]) -> Optional[StageResult]:
    try:
        result = fn()
    except FracSubspaceError as e:
        result = StageResult(name, False, detail=f"{type(e).__name__}: {e}")
    if result is not None:
        report.stages.append(result)
        logger.info("%s/%s %s: %s (%s)", report.example_id, report.subspace, name,
                    "pass" if result.passed else "FAIL", result.detail)
    return result


def verify(problem: Problem, params: Settings = None, bindings: Settings = None, *,
           subspace: str = PRIMARY_SUBSPACE, grid: Optional[Mapping[str, Sequence[float]]] = None,
           frontier: Fraction = DEFAULT_FRONTIER, tol: float = RESIDUAL_TOL,
           stages: Optional[Iterable[str]] = None, print_messages: bool = False) -> VerificationReport:
    """Replay the reduction pipeline for one problem and report every stage.

    Stage failures, including solver errors, are report entries. Invalid
    parameters or an unknown id raise as in ``bind``.
    """
    wanted = set(STAGES if stages is None else stages)
    unknown = wanted - set(STAGES)
    if unknown:
        raise SchemaError(f"unknown verification stages {sorted(unknown)}")
    if tol <= 0:
        raise SchemaError(f"tolerance must be positive, got {tol}")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        bound = bind(problem, params, bindings, subspace=subspace, frontier=frontier, grid=grid)
        report = VerificationReport(bound.spec.id, subspace)
        inv = _run(report, STAGE_INVARIANCE, lambda: _invariance_stage(bound))
        if inv.passed:
            plan = [
                (STAGE_PSI, lambda: _psi_stage(bound)),
                (STAGE_RESIDUAL, lambda: _residual_stage(bound, tol)),
                (STAGE_SOLVER, lambda: _solver_stage(bound)),
                (STAGE_ORACLE, lambda: _oracle_stage(bound)),
                (STAGE_CLASSICAL, lambda: _classical_stage(bound, params, bindings, grid)),
            ]
            for name, fn in plan:
                if name in wanted:
                    _run(report, name, fn)
    report.warnings = [str(w.message) for w in caught]
    if print_messages:
        for w in report.warnings:
            print(f"Warning: {w}")
    return report


def _verify_one(args: Tuple[str, Dict[str, Any]]) -> VerificationReport:
    example_id, kwargs = args
    return verify(example_id, **kwargs)


def verify_many(ids: Optional[Sequence[str]] = None, *, workers: int = 1, **kwargs) -> Dict[str, VerificationReport]:
    """Verify several catalog entries, in a process pool when workers > 1; reports ordered by id."""
    ids = sorted(ids if ids is not None else example_ids())
    jobs = [(eid, kwargs) for eid in ids]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_verify_one, jobs))
    else:
        reports = [_verify_one(job) for job in jobs]
    return {r.example_id: r for r in reports}


# --- random parameter draws ---------------------------------------------------------------

def random_draws(problem: Problem, count: int, seed: int = 0) -> List[Dict[str, Fraction]]:
    """In-range values of the order parameters, rounded to DRAW_DIGITS decimals.

    Draws stay DRAW_MARGIN away from open bounds and excluded points, and
    satisfy the problem constraints and draw constraints with the same margin.

    Raises:
        ParamOutOfRange: no admissible draw was found within DRAW_ATTEMPTS tries.
    """
    spec, _ = resolve(problem)
    rng = np.random.default_rng(seed)
    scale = 10 ** DRAW_DIGITS
    margin = float(DRAW_MARGIN)
    ranges = {}
    for name in spec.order_params:
        d = spec.params[name]
        lo = max(d.low if d.low is not None else DRAW_LOW, DRAW_LOW)
        if d.low is not None and d.low_open and lo - d.low < DRAW_MARGIN:
            lo = d.low + DRAW_MARGIN
        hi = d.high if d.high is not None else lo + 1
        if d.high_open:
            hi -= DRAW_MARGIN
        ranges[name] = (float(lo), float(hi))
    base = {n: float(d.value) for n, d in spec.params.items()}
    draws: List[Dict[str, Fraction]] = []
    for _ in range(count):
        for _attempt in range(DRAW_ATTEMPTS):
            draw = {n: Fraction(round(rng.uniform(lo, hi) * scale), scale) for n, (lo, hi) in ranges.items()}
            if _admissible(spec, draw, base, margin):
                draws.append(draw)
                break
        else:
            raise ParamOutOfRange(f"{spec.id}: no admissible parameter draw in {DRAW_ATTEMPTS} attempts")
    return draws


def _admissible(spec: ProblemSpec, draw: Mapping[str, Fraction], base: Mapping[str, float], margin: float) -> bool:
    for name, v in draw.items():
        d = spec.params[name]
        if any(abs(v - e) < DRAW_MARGIN for e in d.exclude):
            return False
        try:
            d.check(v)
        except ParamOutOfRange:
            return False
    values = dict(base)
    values.update({n: float(v) for n, v in draw.items()})
    return all(constraint_holds(c, values, margin) for c in spec.constraints + spec.draw_constraints)


# --- samples ----------------------------------------------------------------------------

def sample(problem: Problem, params: Settings = None, bindings: Settings = None, *,
           subspace: str = PRIMARY_SUBSPACE, grid: Optional[Mapping[str, Sequence[float]]] = None,
           frontier: Fraction = SAMPLE_FRONTIER, force: bool = False) -> pd.DataFrame:
    """Known solution on the grid: columns t, space variables, components; rows in C order of ('ij') axes.

    Unless force is set, the invariance and residual stages must pass first.

    Raises:
        NotInvariantError: the pre-check failed.
        SchemaError: the subspace has no closed form.
    """
    if not force:
        report = verify(problem, params, bindings, subspace=subspace, grid=grid,
                        stages=(STAGE_INVARIANCE, STAGE_RESIDUAL))
        if not report.passed:
            failed = [f"{s.name}: {s.detail}" for s in report.stages if not s.passed]
            raise NotInvariantError(f"{report.example_id}/{subspace} failed verification: {'; '.join(failed)}")
    bound = bind(problem, params, bindings, subspace=subspace, frontier=frontier, grid=grid)
    if bound.known is None:
        raise SchemaError(f"{bound.spec.id}/{subspace} has no closed-form solution to sample")
    point = bound.point()
    fields = bound.known.form.evaluate(point)
    columns: Dict[str, np.ndarray] = {v: np.ravel(a) for v, a in point.items()}
    for comp in bound.spec.components:
        columns[comp] = np.ravel(np.broadcast_to(fields[comp], point["t"].shape))
    return pd.DataFrame(columns)
