from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

import openpyxl
import pandas as pd
from openpyxl.styles import Font, PatternFill

from . import spec
from .errors import SchemaError
from .types import ParamDecl, ProblemSpec, SubspaceSpec

HEADER_FILL = PatternFill(start_color="D9E1F2", end_color="D9E1F2", fill_type="solid")


def _frac_text(v: Optional[Fraction]) -> Optional[str]:
    return None if v is None else str(v)


def _param_to_dict(d: ParamDecl) -> Dict[str, Any]:
    out: Dict[str, Any] = {spec.PARAM_VALUE: str(d.value)}
    if d.low is not None:
        out[spec.PARAM_LOW] = _frac_text(d.low)
        out[spec.PARAM_LOW_OPEN] = d.low_open
    if d.high is not None:
        out[spec.PARAM_HIGH] = _frac_text(d.high)
        out[spec.PARAM_HIGH_OPEN] = d.high_open
    if d.exclude:
        out[spec.PARAM_EXCLUDE] = [str(e) for e in d.exclude]
    if d.order:
        out[spec.PARAM_ORDER] = True
    if d.range_text:
        out[spec.PARAM_RANGE_TEXT] = d.range_text
    return out


def _subspace_to_dict(s: SubspaceSpec) -> Dict[str, Any]:
    out: Dict[str, Any] = {spec.SUB_BASIS: s.basis, spec.SUB_SYMBOLS: s.symbols}
    if s.psi:
        out[spec.SUB_PSI] = s.psi
    if s.initial:
        out[spec.SUB_INITIAL] = s.initial
    if s.initial_functions:
        out[spec.SUB_INITIAL_FUNCTIONS] = s.initial_functions
    if s.solution:
        out[spec.SUB_SOLUTION] = s.solution
    if s.solution_source:
        out[spec.SUB_SOLUTION_SOURCE] = s.solution_source
    if s.invariance_only:
        out[spec.SUB_INVARIANCE_ONLY] = True
    if s.nim is not None:
        out[spec.SUB_NIM] = {spec.NIM_UNKNOWN: s.nim.unknown, spec.NIM_CONSTANT: s.nim.constant,
                             spec.NIM_SOURCE: s.nim.source, spec.NIM_RATE: s.nim.c, spec.NIM_ORDER: s.nim.order}
    return out


def problem_to_dict(problem: ProblemSpec) -> Dict[str, Any]:
    """JSON-ready form of a problem; exact rationals are written as strings."""
    out: Dict[str, Any] = {
        spec.FIELD_SCHEMA_VERSION: spec.SCHEMA_VERSION,
        spec.FIELD_ID: problem.id,
        spec.FIELD_TITLE: problem.title,
        spec.FIELD_PROVENANCE: problem.provenance,
        spec.FIELD_VARIABLES: list(problem.variables),
        spec.FIELD_COMPONENTS: list(problem.components),
        spec.FIELD_PARAMS: {n: _param_to_dict(d) for n, d in problem.params.items()},
        spec.FIELD_TIME_KIND: problem.time_kind,
        spec.FIELD_TIME_OPERATOR: {
            comp: [{spec.TERM_COEF: c, spec.TERM_ORDER: o, spec.TERM_REPEAT: r} for c, o, r in terms]
            for comp, terms in problem.time_operator.items()
        },
        spec.FIELD_OPERATORS: list(problem.operators),
        spec.FIELD_SUBSPACES: {name: _subspace_to_dict(s) for name, s in problem.subspaces.items()},
        spec.FIELD_GRID: {v: list(axis) for v, axis in problem.grid.items()},
    }
    if problem.free_constants:
        out[spec.FIELD_FREE_CONSTANTS] = dict(problem.free_constants)
    if problem.constraints:
        out[spec.FIELD_CONSTRAINTS] = list(problem.constraints)
        out[spec.FIELD_CONSTRAINT_TEXT] = problem.constraint_text
    if problem.draw_constraints:
        out[spec.FIELD_DRAW_CONSTRAINTS] = list(problem.draw_constraints)
    if problem.classical is not None:
        out[spec.FIELD_CLASSICAL] = {
            spec.CLASSICAL_PARAMS: dict(problem.classical.params),
            spec.CLASSICAL_FIELDS: dict(problem.classical.fields),
            spec.CLASSICAL_SOURCE: problem.classical.source,
        }
    if problem.structure:
        out[spec.FIELD_STRUCTURE] = dict(problem.structure)
    return out


def write_problem(problem: ProblemSpec, path: str) -> None:
    """Write a problem as JSON; '-' writes to stdout."""
    text = json.dumps(problem_to_dict(problem), indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _write_xlsx(frame: pd.DataFrame, path: str) -> None:
    wb = openpyxl.Workbook()
    ws = wb.active
    ws.title = "Samples"
    ws.append(list(frame.columns))
    for cell in ws[1]:
        cell.font = Font(bold=True)
        cell.fill = HEADER_FILL
    for row in frame.itertuples(index=False):
        ws.append([float(v) for v in row])
    ws.freeze_panes = "A2"
    wb.save(path)


def write_samples(frame: pd.DataFrame, path: str, fmt: str = "csv") -> None:
    """Write sampled fields as CSV (full float precision) or XLSX; '-' writes CSV to stdout.

    Raises:
        SchemaError: unknown format, or XLSX requested on stdout.
    """
    if fmt not in spec.SAMPLE_FORMATS:
        raise SchemaError(f"unknown sample format '{fmt}' (use one of {', '.join(spec.SAMPLE_FORMATS)})")
    if fmt == "xlsx":
        if path == "-":
            raise SchemaError("XLSX output needs a file path")
        _write_xlsx(frame, path)
        return
    target = sys.stdout if path == "-" else path
    frame.to_csv(target, index=False, float_format=spec.CSV_FLOAT_FORMAT, lineterminator="\n")
