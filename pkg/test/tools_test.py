from fractions import Fraction

import pytest

from fracsubspace.errors import SchemaError
from fracsubspace.tools import is_valid_name, parse_grid, parse_settings


@pytest.mark.parametrize("name,ok", [
    ("alpha", True), ("beta_2", True), ("_M1", True), ("2x", False), ("a-b", False), ("", False), (None, False),
])
def test_is_valid_name(name, ok):
    assert is_valid_name(name) is ok


def test_parse_settings():
    assert parse_settings(["alpha=0.35", "beta = 7/20", "alpha=1/4"]) == {"alpha": Fraction(1, 4),
                                                                          "beta": Fraction(7, 20)}


@pytest.mark.parametrize("item", ["alpha", "alpha=", "2a=1", "alpha=abc"])
def test_parse_settings_rejects(item):
    with pytest.raises(SchemaError):
        parse_settings([item])


def test_parse_grid():
    assert parse_grid(["t=0.1:1:5", "x=0:1/2:3"]) == {"t": [0.1, 1.0, 5], "x": [0.0, 0.5, 3]}


@pytest.mark.parametrize("item", ["t=0:1", "t=1:0:3", "t=0:1:0", "t=a:b:c"])
def test_parse_grid_rejects(item):
    with pytest.raises(SchemaError):
        parse_grid([item])
