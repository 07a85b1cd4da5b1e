__all__ = [
    "bind",
    "build",
    "verify",
    "verify_many",
    "sample",
    "random_draws",
    "read_problem",
    "write_problem",
    "spec",
    "types",
    "series",
    "fracalc",
    "operators",
    "fode",
    "specfun",
]

from .spec import VERSION
from .catalog import bind, build, random_draws, sample, verify, verify_many
from .problem_reader import read_problem
from .problem_writer import write_problem

__version__ = VERSION
