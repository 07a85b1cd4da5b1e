import re
from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

from .errors import SchemaError
from .series import to_fraction


# identifiers for parameters, constants and variables
NAME_PATTERN = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')


def is_valid_name(identifier: str) -> bool:
    """
    Check if identifier can name a parameter, free constant or variable.

    Args:
        identifier: The identifier string to validate

    Returns:
        True if it starts with a letter or underscore and continues with letters, digits or underscores
    """
    if not identifier or not isinstance(identifier, str):
        return False
    return bool(NAME_PATTERN.match(identifier))


def _split_assignment(item: str, option: str) -> Tuple[str, str]:
    if "=" not in item:
        raise SchemaError(f"{option} expects name=value, got '{item}'")
    name, value = item.split("=", 1)
    name = name.strip()
    if not is_valid_name(name):
        raise SchemaError(f"{option}: '{name}' is not a valid name")
    if not value.strip():
        raise SchemaError(f"{option}: no value for '{name}'")
    return name, value.strip()


def parse_settings(items: Iterable[str]) -> Dict[str, Fraction]:
    """
    Parse repeated ``name=value`` options into exact rationals.

    Decimal and fraction notation are both accepted (``alpha=0.35``,
    ``alpha=7/20``); a name given twice keeps the last value.

    Raises:
        SchemaError: malformed item or a value that is not a rational number.
    """
    out: Dict[str, Fraction] = {}
    for item in items:
        name, value = _split_assignment(item, "--set")
        try:
            out[name] = to_fraction(value)
        except (TypeError, ValueError) as e:
            raise SchemaError(f"--set {name}: {e}") from None
    return out


def parse_grid(items: Iterable[str]) -> Dict[str, List[float]]:
    """
    Parse repeated ``var=min:max:count`` options.

    Raises:
        SchemaError: malformed item, low > high or count < 1.
    """
    out: Dict[str, List[float]] = {}
    for item in items:
        var, value = _split_assignment(item, "--grid")
        parts = value.split(":")
        if len(parts) != 3:
            raise SchemaError(f"--grid {var}: expected min:max:count, got '{value}'")
        try:
            lo, hi = float(to_fraction(parts[0])), float(to_fraction(parts[1]))
            count = int(parts[2])
        except (TypeError, ValueError):
            raise SchemaError(f"--grid {var}: cannot read '{value}'") from None
        if count < 1:
            raise SchemaError(f"--grid {var}: count must be >= 1")
        if lo > hi:
            raise SchemaError(f"--grid {var}: min {lo} exceeds max {hi}")
        out[var] = [lo, hi, count]
    return out
