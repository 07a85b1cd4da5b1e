from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Callable, Iterable, List, Mapping, Optional

import numpy as np

from .errors import ParseError
from .poly import Poly
from .series import ExponentVector
from .specfun import gamma_real, rl_power_rate


class Token:
    def __init__(self, kind: str, value: str):
        self.kind = kind
        self.value = value

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.value!r})"


_SINGLE = {
    '+': 'PLUS',
    '-': 'MINUS',
    '*': 'STAR',
    '/': 'SLASH',
    '^': 'CARET',
    '(': 'LP',
    ')': 'RP',
    ',': 'COMMA',
}


def tokenize(expr: str) -> List[Token]:
    """
    Tokenize an operator, basis or polynomial expression.

    Numbers are decimal literals (``0.5``, ``3``, ``1e-3``); identifiers are
    letters, digits and underscores starting with a letter or underscore;
    ``**`` is accepted as a synonym of ``^``.
    """
    s = expr.replace(" ", "").replace("\t", "").replace("\n", "")
    tokens: List[Token] = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch.isdigit() or (ch == '.' and i + 1 < len(s) and s[i + 1].isdigit()):
            j = i
            while j < len(s) and (s[j].isdigit() or s[j] == '.'):
                j += 1
            # exponent part, only when followed by digits
            if j < len(s) and s[j] in 'eE':
                k = j + 1
                if k < len(s) and s[k] in '+-':
                    k += 1
                if k < len(s) and s[k].isdigit():
                    while k < len(s) and s[k].isdigit():
                        k += 1
                    j = k
            tokens.append(Token('NUM', s[i:j]))
            i = j
            continue
        if ch.isalpha() or ch == '_':
            j = i + 1
            while j < len(s) and (s[j].isalnum() or s[j] == '_'):
                j += 1
            tokens.append(Token('ID', s[i:j]))
            i = j
            continue
        if ch == '*' and i + 1 < len(s) and s[i + 1] == '*':
            tokens.append(Token('CARET', '**'))
            i += 2
            continue
        if ch in _SINGLE:
            tokens.append(Token(_SINGLE[ch], ch))
            i += 1
            continue
        raise ParseError(f"Unexpected character '{ch}' in expression: {expr}")
    return tokens


# A minimal AST represented as nested tuples
# ('num', Fraction) | ('name', id) | ('add'|'sub'|'mul'|'div'|'pow', left, right) | ('neg', node)
# | ('call', fname, (arg, ...))


def parse(expr: str):
    """Parse an expression into a nested-tuple AST."""
    tokens = tokenize(expr)
    if not tokens:
        raise ParseError("Empty expression")
    pos = 0

    def peek() -> Optional[Token]:
        return tokens[pos] if pos < len(tokens) else None

    def consume(kind: Optional[str] = None) -> Token:
        nonlocal pos
        t = peek()
        if t is None:
            if kind == 'RP':
                open_count = sum(1 for tk in tokens if tk.kind == 'LP')
                close_count = sum(1 for tk in tokens if tk.kind == 'RP')
                raise ParseError(
                    f"Unexpected end of expression. Missing closing parenthesis ')'. "
                    f"Found {open_count} opening '(' but only {close_count} closing ')' in: {expr}"
                )
            raise ParseError(f"Unexpected end of expression. Expected more tokens after: {expr}")
        if kind and t.kind != kind:
            if kind == 'RP':
                open_count = sum(1 for tk in tokens if tk.kind == 'LP')
                close_count = sum(1 for tk in tokens if tk.kind == 'RP')
                raise ParseError(
                    f"Expected closing parenthesis ')', got '{t.value}'. "
                    f"Check parentheses balance: {open_count} opening '(' vs {close_count} closing ')'"
                )
            raise ParseError(f"Expected {kind}, got '{t.value}' in: {expr}")
        pos += 1
        return t

    def parse_atom():
        t = peek()
        if t is None:
            raise ParseError(f"Unexpected end of expression: {expr}")
        if t.kind == 'NUM':
            text = consume('NUM').value
            try:
                return ('num', Fraction(text))
            except ValueError:
                raise ParseError(f"Bad number '{text}' in: {expr}") from None
        if t.kind == 'ID':
            name = consume('ID').value
            nxt = peek()
            if nxt is not None and nxt.kind == 'LP':
                consume('LP')
                args = []
                if peek() is not None and peek().kind == 'RP':
                    consume('RP')
                    return ('call', name, tuple(args))
                args.append(parse_expr())
                while peek() is not None and peek().kind == 'COMMA':
                    consume('COMMA')
                    args.append(parse_expr())
                consume('RP')
                return ('call', name, tuple(args))
            return ('name', name)
        if t.kind == 'LP':
            consume('LP')
            node = parse_expr()
            consume('RP')
            return node
        raise ParseError(f"Unexpected token '{t.value}' in: {expr}")

    def parse_power():
        base = parse_atom()
        t = peek()
        if t is not None and t.kind == 'CARET':
            consume('CARET')
            exponent = parse_unary()
            return ('pow', base, exponent)
        return base

    def parse_unary():
        t = peek()
        if t is not None and t.kind == 'MINUS':
            consume('MINUS')
            return ('neg', parse_unary())
        if t is not None and t.kind == 'PLUS':
            consume('PLUS')
            return parse_unary()
        return parse_power()

    def parse_term():
        node = parse_unary()
        while True:
            t = peek()
            if t and t.kind == 'STAR':
                consume('STAR')
                node = ('mul', node, parse_unary())
            elif t and t.kind == 'SLASH':
                consume('SLASH')
                node = ('div', node, parse_unary())
            else:
                break
        return node

    def parse_expr():
        node = parse_term()
        while True:
            t = peek()
            if t and t.kind == 'PLUS':
                consume('PLUS')
                node = ('add', node, parse_term())
            elif t and t.kind == 'MINUS':
                consume('MINUS')
                node = ('sub', node, parse_term())
            else:
                break
        return node

    ast = parse_expr()
    if peek() is not None:
        raise ParseError(f"Unexpected trailing tokens: '{peek().value}' for expression: {expr}")
    return ast


def ast_names(ast) -> set:
    """Every identifier used as a plain name in the AST."""
    kind = ast[0]
    if kind == 'name':
        return {ast[1]}
    if kind == 'num':
        return set()
    if kind == 'neg':
        return ast_names(ast[1])
    if kind == 'call':
        out: set = set()
        for a in ast[2]:
            out |= ast_names(a)
        return out
    return ast_names(ast[1]) | ast_names(ast[2])


def exponent_from_ast(ast, params: Iterable[str]) -> ExponentVector:
    """Exact linear exponent from an AST over the order-parameter names."""
    names = set(params)

    def walk(node) -> ExponentVector:
        kind = node[0]
        if kind == 'num':
            return ExponentVector(node[1])
        if kind == 'name':
            if node[1] not in names:
                raise ParseError(f"'{node[1]}' is not an order parameter (have {sorted(names)})")
            return ExponentVector.param(node[1])
        if kind == 'neg':
            return -walk(node[1])
        if kind in ('add', 'sub'):
            a, b = walk(node[1]), walk(node[2])
            return a + b if kind == 'add' else a - b
        if kind == 'mul':
            a, b = walk(node[1]), walk(node[2])
            if a.is_constant():
                return b * a.constant
            if b.is_constant():
                return a * b.constant
            raise ParseError(f"exponent is not linear in the parameters: {node}")
        if kind == 'div':
            a, b = walk(node[1]), walk(node[2])
            if not b.is_constant() or b.constant == 0:
                raise ParseError(f"exponent divides by a non-constant or zero: {node}")
            return a * (1 / b.constant)
        raise ParseError(f"unsupported construct in an exponent: {node[0]}")

    return walk(ast)


_SCALAR_FUNCS: Mapping[str, Callable[..., float]] = {
    'gamma': gamma_real,
    'sqrt': math.sqrt,
    'exp': math.exp,
    'abs': abs,
    'rlrate': rl_power_rate,
}
_ARRAY_FUNCS: Mapping[str, Callable[..., Any]] = {
    'sqrt': np.sqrt,
    'exp': np.exp,
    'log': np.log,
    'abs': np.abs,
    'sin': np.sin,
    'cos': np.cos,
    'sinh': np.sinh,
    'cosh': np.cosh,
}
_SCALAR_CONSTANTS = {'pi': math.pi, 'e': math.e}


def _evaluate(ast, values: Mapping[str, Any], funcs: Mapping[str, Callable[..., Any]],
              fallback: Mapping[str, Callable[..., Any]]):
    kind = ast[0]
    if kind == 'num':
        return float(ast[1])
    if kind == 'name':
        name = ast[1]
        if name in values:
            return values[name]
        if name in _SCALAR_CONSTANTS:
            return _SCALAR_CONSTANTS[name]
        raise ParseError(f"Unknown symbol '{name}'")
    if kind == 'neg':
        return -_evaluate(ast[1], values, funcs, fallback)
    if kind == 'call':
        args = [_evaluate(a, values, funcs, fallback) for a in ast[2]]
        fn = funcs.get(ast[1])
        if fn is None:
            fn = fallback.get(ast[1])
        if fn is None:
            raise ParseError(f"Unknown function '{ast[1]}'")
        return fn(*args)
    a = _evaluate(ast[1], values, funcs, fallback)
    b = _evaluate(ast[2], values, funcs, fallback)
    if kind == 'add':
        return a + b
    if kind == 'sub':
        return a - b
    if kind == 'mul':
        return a * b
    if kind == 'div':
        if np.isscalar(b) and b == 0:
            raise ParseError("division by zero")
        return a / b
    if kind == 'pow':
        return a ** b
    raise ParseError(f"Unknown AST node {kind}")


def scalar_from_ast(ast, values: Mapping[str, float]) -> float:
    """Numeric value of a scalar AST. ``pi`` and ``e`` are predefined unless bound in values."""
    return float(_evaluate(ast, values, _SCALAR_FUNCS, {}))


def array_from_ast(ast, values: Mapping[str, Any]) -> np.ndarray:
    """Elementwise value over numpy arrays bound in values, e.g. ``sinh(t)*x^2 + cosh(t)*y^2``."""
    return np.asarray(_evaluate(ast, values, _ARRAY_FUNCS, _SCALAR_FUNCS), dtype=float)


def poly_from_ast(ast, symbols: Iterable[str], values: Mapping[str, float],
                  call_symbol: Optional[Callable[[str, tuple], str]] = None) -> Poly:
    """Polynomial over the given symbols; every other subexpression must be scalar.

    call_symbol maps a function call that stands for a symbol (for example
    ``Dt(K1, gamma)``) to the symbol's name; it returns None for ordinary
    scalar functions.
    """
    syms = set(symbols)

    def walk(node) -> Poly:
        kind = node[0]
        if kind == 'name' and node[1] in syms:
            return Poly.symbol(node[1])
        if kind == 'call' and call_symbol is not None:
            name = call_symbol(node[1], node[2])
            if name is not None:
                return Poly.symbol(name)
        if not (ast_names(node) & syms) and not _has_symbol_call(node):
            return Poly.constant(scalar_from_ast(node, values))
        if kind == 'neg':
            return -walk(node[1])
        if kind == 'add':
            return walk(node[1]) + walk(node[2])
        if kind == 'sub':
            return walk(node[1]) - walk(node[2])
        if kind == 'mul':
            return walk(node[1]) * walk(node[2])
        if kind == 'div':
            den = walk(node[2])
            if not den.is_constant() or den.constant_value() == 0:
                raise ParseError("polynomial division by a non-constant or zero")
            return walk(node[1]) / den.constant_value()
        if kind == 'pow':
            exp = walk(node[2])
            p = exp.constant_value() if exp.is_constant() else -1
            if p < 0 or p != int(p):
                raise ParseError("polynomial powers must be non-negative integers")
            return walk(node[1]) ** int(p)
        raise ParseError(f"cannot read {node} as a polynomial")

    def _has_symbol_call(node) -> bool:
        if call_symbol is None:
            return False
        kind = node[0]
        if kind == 'call':
            return call_symbol(node[1], node[2]) is not None or any(_has_symbol_call(a) for a in node[2])
        if kind in ('num', 'name'):
            return False
        if kind == 'neg':
            return _has_symbol_call(node[1])
        return _has_symbol_call(node[1]) or _has_symbol_call(node[2])

    return walk(ast)


def parse_poly(text: str, symbols: Iterable[str], values: Mapping[str, float],
               call_symbol: Optional[Callable[[str, tuple], str]] = None) -> Poly:
    return poly_from_ast(parse(text), symbols, values, call_symbol)
