from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Tuple

from packaging.version import InvalidVersion, Version

from . import spec
from .errors import SchemaError, annotate
from .series import to_fraction
from .types import ClassicalLimit, NIMSpec, ParamDecl, ProblemSpec, SubspaceSpec

_REQUIRED = (spec.FIELD_ID, spec.FIELD_VARIABLES, spec.FIELD_COMPONENTS, spec.FIELD_PARAMS, spec.FIELD_TIME_KIND,
             spec.FIELD_TIME_OPERATOR, spec.FIELD_OPERATORS, spec.FIELD_SUBSPACES)


def _check_version(raw: Mapping[str, Any], warnings_list: List[str]) -> None:
    text = str(raw.get(spec.FIELD_SCHEMA_VERSION, "")).strip()
    if not text:
        warnings_list.append(f"No {spec.FIELD_SCHEMA_VERSION}; assuming {spec.SCHEMA_VERSION}")
        return
    try:
        found = Version(text)
    except InvalidVersion:
        raise SchemaError(f"Invalid {spec.FIELD_SCHEMA_VERSION} '{text}'") from None
    supported = Version(spec.SCHEMA_VERSION)
    if found.major > supported.major:
        raise SchemaError(f"Problem schema {found} is newer than supported {supported}")
    if found > supported:
        warnings_list.append(f"Problem schema {found} is newer than {supported}; unknown fields are ignored")


def _frac(raw: Any, where: str) -> Fraction:
    try:
        return to_fraction(raw)
    except (TypeError, ValueError) as e:
        raise SchemaError(f"{where}: {e}") from None


def _param(name: str, raw: Any) -> ParamDecl:
    if not isinstance(raw, Mapping):
        return ParamDecl(name, _frac(raw, f"param {name}"))
    if spec.PARAM_VALUE not in raw:
        raise SchemaError(f"param {name}: missing '{spec.PARAM_VALUE}'")
    low = raw.get(spec.PARAM_LOW)
    high = raw.get(spec.PARAM_HIGH)
    return ParamDecl(
        name=name,
        value=_frac(raw[spec.PARAM_VALUE], f"param {name}"),
        low=None if low is None else _frac(low, f"param {name} low"),
        high=None if high is None else _frac(high, f"param {name} high"),
        low_open=bool(raw.get(spec.PARAM_LOW_OPEN, True)),
        high_open=bool(raw.get(spec.PARAM_HIGH_OPEN, False)),
        exclude=[_frac(e, f"param {name} exclude") for e in raw.get(spec.PARAM_EXCLUDE, [])],
        order=bool(raw.get(spec.PARAM_ORDER, False)),
        range_text=str(raw.get(spec.PARAM_RANGE_TEXT, "")),
    )


def _text_rows(raw: Any, where: str) -> List[List[str]]:
    if not isinstance(raw, list) or not all(isinstance(row, list) for row in raw):
        raise SchemaError(f"{where} must be a list of lists")
    return [[str(x) for x in row] for row in raw]


def _subspace(name: str, raw: Mapping[str, Any]) -> SubspaceSpec:
    where = f"subspace {name}"
    for key in (spec.SUB_BASIS, spec.SUB_SYMBOLS):
        if key not in raw:
            raise SchemaError(f"{where}: missing '{key}'")
    nim = raw.get(spec.SUB_NIM)
    if nim is not None:
        try:
            nim = NIMSpec(unknown=nim[spec.NIM_UNKNOWN], constant=str(nim[spec.NIM_CONSTANT]),
                          source=str(nim[spec.NIM_SOURCE]), c=str(nim[spec.NIM_RATE]), order=str(nim[spec.NIM_ORDER]))
        except KeyError as e:
            raise SchemaError(f"{where}: nim entry misses {e}") from None
    return SubspaceSpec(
        basis=_text_rows(raw[spec.SUB_BASIS], f"{where} basis"),
        symbols=_text_rows(raw[spec.SUB_SYMBOLS], f"{where} symbols"),
        psi=_text_rows(raw.get(spec.SUB_PSI, []), f"{where} psi"),
        initial={k: [str(x) for x in v] for k, v in raw.get(spec.SUB_INITIAL, {}).items()},
        initial_functions={k: [str(x) for x in v] for k, v in raw.get(spec.SUB_INITIAL_FUNCTIONS, {}).items()},
        solution={k: str(v) for k, v in raw.get(spec.SUB_SOLUTION, {}).items()},
        solution_source=str(raw.get(spec.SUB_SOLUTION_SOURCE, "")),
        invariance_only=bool(raw.get(spec.SUB_INVARIANCE_ONLY, False)),
        nim=nim,
    )


def _time_operator(raw: Mapping[str, Any]) -> Dict[str, List[Tuple[str, str, int]]]:
    out = {}
    for comp, terms in raw.items():
        rows = []
        for term in terms:
            if spec.TERM_ORDER not in term:
                raise SchemaError(f"time operator of {comp}: term without '{spec.TERM_ORDER}'")
            rows.append((str(term.get(spec.TERM_COEF, "1")), str(term[spec.TERM_ORDER]),
                         int(term.get(spec.TERM_REPEAT, 1))))
        out[comp] = rows
    return out


def _grid(raw: Mapping[str, Any]) -> Dict[str, List[float]]:
    out = {}
    for var, axis in raw.items():
        if not isinstance(axis, list) or len(axis) != 3:
            raise SchemaError(f"grid for '{var}' must be [low, high, count]")
        out[var] = [float(axis[0]), float(axis[1]), int(axis[2])]
    return out


def problem_from_dict(raw: Mapping[str, Any]) -> Tuple[ProblemSpec, List[str]]:
    """ProblemSpec from its JSON form, plus validation warnings.

    Raises:
        SchemaError: a missing field, a malformed value or an unsupported schema version.
    """
    warnings_list: List[str] = []
    if not isinstance(raw, Mapping):
        raise SchemaError("problem JSON must be an object")
    _check_version(raw, warnings_list)
    missing = [k for k in _REQUIRED if k not in raw]
    if missing:
        raise SchemaError(f"problem misses fields {missing}")
    if raw[spec.FIELD_TIME_KIND] not in (spec.CAPUTO, spec.RIEMANN_LIOUVILLE):
        raise SchemaError(f"time_kind must be '{spec.CAPUTO}' or '{spec.RIEMANN_LIOUVILLE}'")
    classical = raw.get(spec.FIELD_CLASSICAL)
    if classical is not None:
        classical = ClassicalLimit(params={k: str(v) for k, v in classical.get(spec.CLASSICAL_PARAMS, {}).items()},
                                   fields={k: str(v) for k, v in classical.get(spec.CLASSICAL_FIELDS, {}).items()},
                                   source=str(classical.get(spec.CLASSICAL_SOURCE, "")))
    problem = ProblemSpec(
        id=str(raw[spec.FIELD_ID]),
        title=str(raw.get(spec.FIELD_TITLE, "")),
        provenance=str(raw.get(spec.FIELD_PROVENANCE, "")),
        variables=[str(v) for v in raw[spec.FIELD_VARIABLES]],
        components=[str(c) for c in raw[spec.FIELD_COMPONENTS]],
        params={n: _param(n, p) for n, p in raw[spec.FIELD_PARAMS].items()},
        time_kind=raw[spec.FIELD_TIME_KIND],
        time_operator=_time_operator(raw[spec.FIELD_TIME_OPERATOR]),
        operators=[str(n) for n in raw[spec.FIELD_OPERATORS]],
        subspaces={n: _subspace(n, s) for n, s in raw[spec.FIELD_SUBSPACES].items()},
        free_constants={k: float(v) for k, v in raw.get(spec.FIELD_FREE_CONSTANTS, {}).items()},
        constraints=[str(c) for c in raw.get(spec.FIELD_CONSTRAINTS, [])],
        constraint_text=str(raw.get(spec.FIELD_CONSTRAINT_TEXT, "")),
        draw_constraints=[str(c) for c in raw.get(spec.FIELD_DRAW_CONSTRAINTS, [])],
        grid=_grid(raw.get(spec.FIELD_GRID, {})),
        classical=classical,
        structure={k: int(v) for k, v in raw.get(spec.FIELD_STRUCTURE, {}).items()},
    )
    if spec.PRIMARY_SUBSPACE not in problem.subspaces:
        warnings_list.append(f"{problem.id} has no '{spec.PRIMARY_SUBSPACE}' subspace")
    return problem, warnings_list


def read_problem(path: str) -> Tuple[ProblemSpec, List[str]]:
    """Read a problem JSON file.

    Raises:
        SchemaError: unreadable JSON or an invalid problem; the message names the file.
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: invalid JSON: {e}") from None
    except OSError as e:
        raise SchemaError(f"{path}: {e.strerror}") from None
    try:
        return problem_from_dict(raw)
    except SchemaError as e:
        raise annotate(e, path) from None
