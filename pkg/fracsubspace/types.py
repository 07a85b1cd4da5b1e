from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

from .errors import ParamOutOfRange

if TYPE_CHECKING:
    from .poly import Poly
    from .series import ExponentVector, GenSeries, ParamTable


@dataclass
class ParamDecl:
    name: str
    value: Fraction
    low: Optional[Fraction] = None
    high: Optional[Fraction] = None
    low_open: bool = True
    high_open: bool = False
    exclude: List[Fraction] = field(default_factory=list)
    order: bool = False  # order parameters get exponents; they are the ones drawn at random
    range_text: str = ""  # human readable, e.g. "alpha in (0,1)\{1/2}"

    def check(self, value: Fraction) -> None:
        bad = False
        if self.low is not None:
            bad |= value < self.low or (self.low_open and value == self.low)
        if self.high is not None:
            bad |= value > self.high or (self.high_open and value == self.high)
        bad |= value in self.exclude
        if bad:
            text = self.range_text or self.interval_text()
            raise ParamOutOfRange(f"Parameter {self.name}={value} is not admissible: {text}")

    def interval_text(self) -> str:
        lo = "-inf" if self.low is None else str(self.low)
        hi = "inf" if self.high is None else str(self.high)
        left = "(" if self.low_open or self.low is None else "["
        right = ")" if self.high_open or self.high is None else "]"
        text = f"{self.name} in {left}{lo},{hi}{right}"
        if self.exclude:
            text += "\\{" + ",".join(str(e) for e in self.exclude) + "}"
        return text


@dataclass
class FitResult:
    coefficients: List[Any]  # float or Poly, one per basis function
    residual: "GenSeries"
    in_span: bool
    artifact_terms: int = 0  # residual terms above the truncation frontier (ignored)


@dataclass
class InvarianceReport:
    invariant: bool
    psi: List[List["Poly"]]  # psi[p][j]
    residuals: List["GenSeries"]  # one per component
    symbols: List[List[str]]  # coefficient symbol names, symbols[p][j]
    artifact_terms: int = 0
    frontier: Optional[Fraction] = None
    warnings: List[str] = field(default_factory=list)


@dataclass
class TimeTerm:
    coef: float
    order: "ExponentVector"
    repeat: int = 1  # (D^order)^repeat, a sequential derivative when > 1


@dataclass
class FODEEquation:
    unknown: str
    lhs: List[TimeTerm]
    rhs: "Poly"


@dataclass
class FODESystem:
    equations: List[FODEEquation]
    kind: str  # caputo | rl
    params: Optional["ParamTable"] = None
    time_var: str = "t"
    # Poly symbols that stand for D^order of an unknown: name -> (unknown, order)
    derivative_symbols: Dict[str, Tuple[str, "ExponentVector"]] = field(default_factory=dict)

    @property
    def unknowns(self) -> List[str]:
        return [eq.unknown for eq in self.equations]

    def equation(self, unknown: str) -> FODEEquation:
        for eq in self.equations:
            if eq.unknown == unknown:
                return eq
        raise KeyError(unknown)


@dataclass
class FODESolution:
    series: Dict[str, "GenSeries"]  # unknown -> series in t
    tags: Dict[str, str] = field(default_factory=dict)  # MittagLeffler | FracTrig | EpsilonSeries | PowerLaw | Series
    free_constants: Dict[str, float] = field(default_factory=dict)


@dataclass
class StageResult:
    name: str
    passed: bool
    value: Optional[float] = None
    detail: str = ""


@dataclass
class VerificationReport:
    example_id: str
    subspace: str
    stages: List[StageResult] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.stages)

    def stage(self, name: str) -> StageResult:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)


# --- problem definitions ------------------------------------------------------------------
# All expressions are kept as text in the operator language so that a problem
# serializes to JSON unchanged.

@dataclass
class NIMSpec:
    unknown: str
    constant: str  # K(0)
    source: str  # template in t; g0 = constant + I^order[source]
    c: str  # linear rate, K = g0 + c I^order K
    order: str


@dataclass
class SubspaceSpec:
    basis: List[List[str]]  # basis[p][j], one row per component
    symbols: List[List[str]]
    psi: List[List[str]] = field(default_factory=list)  # targets of the reduced right sides
    initial: Dict[str, List[str]] = field(default_factory=dict)  # symbol -> [K(0), K'(0), ...]
    # component -> [f(0, x), f_t(0, x), ...], fitted to the basis when `initial` is empty
    initial_functions: Dict[str, List[str]] = field(default_factory=dict)
    solution: Dict[str, str] = field(default_factory=dict)  # symbol -> template in t, or "@series"
    solution_source: str = ""
    invariance_only: bool = False
    nim: Optional[NIMSpec] = None


@dataclass
class ClassicalLimit:
    params: Dict[str, str]
    fields: Dict[str, str]  # component -> array expression in t and the space variables
    source: str = ""


@dataclass
class ProblemSpec:
    id: str
    title: str
    provenance: str
    variables: List[str]  # space variables
    components: List[str]
    params: Dict[str, ParamDecl]
    time_kind: str
    time_operator: Dict[str, List[Tuple[str, str, int]]]  # component -> [(coef, order, repeat)]
    operators: List[str]
    subspaces: Dict[str, SubspaceSpec]
    free_constants: Dict[str, float] = field(default_factory=dict)
    constraints: List[str] = field(default_factory=list)  # e.g. "gamma < alpha1"
    constraint_text: str = ""
    draw_constraints: List[str] = field(default_factory=list)  # extra conditions on random draws only
    grid: Dict[str, List[float]] = field(default_factory=dict)  # var -> [low, high, count], t included
    classical: Optional[ClassicalLimit] = None
    structure: Dict[str, int] = field(default_factory=dict)  # structural sizes, e.g. {"n": 2}

    @property
    def order_params(self) -> List[str]:
        return [n for n, d in self.params.items() if d.order]
