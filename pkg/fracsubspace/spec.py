from __future__ import annotations
from fractions import Fraction

# version
VERSION = "0.2.0"

# series truncation (max numeric exponent per variable)
DEFAULT_FRONTIER = Fraction(12)
SAMPLE_FRONTIER = Fraction(40)

# coefficient cleanup, relative to the largest coefficient of a series
ZERO_CLEANUP = 1e-12
# a fit residual below this (relative) counts as zero
FIT_TOL = 1e-10

# Mittag-Leffler summation
ML_TOL = 1e-15
ML_TERM_CAP = 10_000

# graded Laplace quadrature toward t = 0
QUAD_DEPTH = 40
QUAD_RATIO = 0.5
QUAD_TOL = 1e-9

# solvers
# two incommensurate orders near 0.3 give ~800 lattice points below the default frontier
LATTICE_CAP = 1000
PICARD_EXTRA_SWEEPS = 3
ADAMS_DEFAULT_STEP = 1e-3

# verification thresholds
RESIDUAL_TOL = 1e-8
CLASSICAL_TOL = 1e-10
SOLVER_TOL = 1e-7
ORACLE_TOL = 1e-4
ORACLE_STEP = 1e-3
ORACLE_HORIZON = 1.0
# reduced right sides against their targets, relative to max(1, largest coefficient)
PSI_TOL = 1e-9

# sample output
CSV_FLOAT_FORMAT = "%.17g"
SAMPLE_FORMATS = ("csv", "xlsx")

# problem JSON schema
SCHEMA_VERSION = "1.0"
FIELD_SCHEMA_VERSION = "schema_version"
FIELD_ID = "id"
FIELD_TITLE = "title"
FIELD_PROVENANCE = "provenance"
FIELD_VARIABLES = "variables"
FIELD_COMPONENTS = "components"
FIELD_PARAMS = "params"
FIELD_TIME_KIND = "time_kind"
FIELD_TIME_OPERATOR = "T"
FIELD_OPERATORS = "N"
FIELD_SUBSPACES = "subspaces"
FIELD_FREE_CONSTANTS = "free_constants"
FIELD_GRID = "grid"
FIELD_CLASSICAL = "classical"
FIELD_CONSTRAINTS = "constraints"
FIELD_CONSTRAINT_TEXT = "constraint_text"
FIELD_DRAW_CONSTRAINTS = "draw_constraints"
FIELD_STRUCTURE = "structure"

# param declaration fields
PARAM_VALUE = "value"
PARAM_LOW = "low"
PARAM_HIGH = "high"
PARAM_LOW_OPEN = "low_open"
PARAM_HIGH_OPEN = "high_open"
PARAM_EXCLUDE = "exclude"
PARAM_ORDER = "order"
PARAM_RANGE_TEXT = "range_text"

# subspace fields
SUB_BASIS = "basis"
SUB_SYMBOLS = "symbols"
SUB_PSI = "psi"
SUB_INITIAL = "initial"
SUB_SOLUTION = "solution"
SUB_SOLUTION_SOURCE = "solution_source"
SUB_INVARIANCE_ONLY = "invariance_only"
SUB_INITIAL_FUNCTIONS = "initial_functions"
SUB_NIM = "nim"

# time operator terms and classical limits
TERM_COEF = "coef"
TERM_ORDER = "order"
TERM_REPEAT = "repeat"
CLASSICAL_PARAMS = "params"
CLASSICAL_FIELDS = "fields"
CLASSICAL_SOURCE = "source"
NIM_UNKNOWN = "unknown"
NIM_CONSTANT = "constant"
NIM_SOURCE = "source"
NIM_RATE = "c"
NIM_ORDER = "order"

# derivative kinds
CAPUTO = "caputo"
RIEMANN_LIOUVILLE = "rl"

# name of the primary subspace of a problem
PRIMARY_SUBSPACE = "default"

# random parameter draws
DRAW_MARGIN = Fraction(1, 20)
DRAW_DIGITS = 2
# order parameters are not drawn below this value
DRAW_LOW = Fraction(3, 10)
DRAW_ATTEMPTS = 1000

# verification stages, in report order
STAGE_INVARIANCE = "invariance"
STAGE_PSI = "psi_match"
STAGE_RESIDUAL = "residual"
STAGE_SOLVER = "solver"
STAGE_ORACLE = "oracle"
STAGE_CLASSICAL = "classical"
STAGES = (STAGE_INVARIANCE, STAGE_PSI, STAGE_RESIDUAL, STAGE_SOLVER, STAGE_ORACLE, STAGE_CLASSICAL)

# marks a coefficient solved from the reduced system instead of a template
SERIES_SOLUTION = "@series"
