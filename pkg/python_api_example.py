"""
fracsubspace Python API Examples
================================

Install from source:
    pip install -e .

The main functions:
    verify(problem, params=None, bindings=None, **options)
    sample(problem, params=None, bindings=None, grid=None, **options)
    build(example_id, params=None, bindings=None, **options)

`problem` is a catalog id or a ProblemSpec. verify returns a report:
    report.passed        bool
    report.stages        list of StageResult(name, passed, value, detail)
    report.warnings      list[str], all messages produced
"""

import os
from dataclasses import replace

from fracsubspace import build, random_draws, read_problem, sample, verify, verify_many, write_problem
from fracsubspace.catalog import list_examples, reduce_problem, solve
from fracsubspace.examples import problem_spec
from fracsubspace.operators import format_system
from fracsubspace.problem_writer import write_samples

_CLEANUP: list[str] = []   # accumulate temp files for final removal


# ── 1. Catalog ───────────────────────────────────────────────────────────────
print("=== 1. Catalog ===")
for eid, title, _ in list_examples():
    print(f"  {eid:18s} {title}")


# ── 2. Verify one problem ────────────────────────────────────────────────────
print("\n=== 2. Verify burgers-coupled ===")
report = verify("burgers-coupled", {"alpha": "0.3", "beta": "0.8"})
for stage in report.stages:
    print(f"  {stage.name:10s} {'ok' if stage.passed else 'FAIL'}  {stage.detail}")
print(f"  passed: {report.passed}")


# ── 3. Random order parameters ───────────────────────────────────────────────
# Draws respect each parameter's range, exclusions and the problem constraints.
print("\n=== 3. Random draws for coupled-system ===")
for draw in random_draws("coupled-system", 3, seed=7):
    result = verify("coupled-system", draw, stages=("invariance", "residual"))
    print(f"  {dict((k, str(v)) for k, v in draw.items())} -> {result.passed}")


# ── 4. Reduced system ────────────────────────────────────────────────────────
print("\n=== 4. Reduced system of boussinesq-system ===")
for line in format_system(reduce_problem("boussinesq-system")):
    print(f"  {line}")


# ── 5. Solve the reduced system ──────────────────────────────────────────────
# RL systems are solved with a power-law ansatz, Caputo systems as series
# from the recorded initial data.
print("\n=== 5. Solve ===")
_, branches = solve("kdv-system", bindings={"sigma": -1})
print(f"  kdv-system: {len(branches)} power-law branches")
_, (series_solution,) = solve("diffusion-like")
for name, s in series_solution.series.items():
    print(f"  {name} [{series_solution.tags.get(name, 'Series')}] = {s}")


# ── 6. Sample the known solution ─────────────────────────────────────────────
print("\n=== 6. Sample scale-wave ===")
frame = sample("scale-wave", grid={"t": [0.1, 1.0, 5], "x": [0.0, 1.0, 3]})
print(frame.head())
write_samples(frame, "scale_wave.csv")
write_samples(frame, "scale_wave.xlsx", "xlsx")
_CLEANUP.extend(["scale_wave.csv", "scale_wave.xlsx"])


# ── 7. Problem files ─────────────────────────────────────────────────────────
# A bound problem can be written as JSON, edited by hand, and loaded back.
print("\n=== 7. Export and reload mixed ===")
spec, _ = build("mixed", {"alpha1": "0.9"})
write_problem(spec, "mixed.json")
_CLEANUP.append("mixed.json")
loaded, messages = read_problem("mixed.json")
print(f"  reloaded {loaded.id}, warnings: {messages}")
print(f"  verifies: {verify(loaded).passed}")


# ── 8. Whole catalog ─────────────────────────────────────────────────────────
print("\n=== 8. verify_many ===")
reports = verify_many(workers=2)
for eid, r in reports.items():
    print(f"  {eid:18s} {'PASS' if r.passed else 'FAIL'}")


# ── 9. Inspecting warnings ───────────────────────────────────────────────────
# A subspace that is not invariant shows up in the report, not as an exception.
print("\n=== 9. Non-invariant subspace ===")
broken = replace(problem_spec("boussinesq-system"), operators=["-D(g,x,beta)", "f*f"])
r = verify(broken, stages=("invariance",))
print(f"  {r.stage('invariance').detail}")
for w in r.warnings:
    print(f"  warning: {w}")


# ── Cleanup ──────────────────────────────────────────────────────────────────
for path in _CLEANUP:
    if os.path.exists(path):
        os.remove(path)
print("\nDone.")
