"""Univariate expression trees: parsing, evaluation, symbolic differentiation.

The grammar (EBNF) accepted by :func:`parse`::

    expr  := term (('+'|'-') term)*
    term  := unary (('*'|'/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?
    atom  := NUMBER | 'x' | IDENT '(' expr ')' | '(' expr ')'

``^`` binds tightest and is right-associative; unary minus binds looser
than ``^``, so ``-x^2`` parses as ``-(x^2)``.  The only variable is ``x``,
angles are radians and ``ln`` is the natural logarithm.

Expression nodes are frozen dataclasses, so trees are immutable, hashable
and safe to share between threads.  All operations here are pure functions.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    NonFiniteError,
    ParseError,
    PreconditionError,
    UnknownIdentifierError,
)

__all__ = [
    "Expression",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "Function",
    "FUNCTION_NAMES",
    "parse",
    "evaluate",
    "differentiate",
    "to_source",
]

FUNCTION_NAMES = ("sin", "cos", "tan", "exp", "ln", "sqrt", "abs", "asin", "acos", "atan")

BINARY_OPS = ("+", "-", "*", "/", "^")


class Expression:
    """Base class for AST nodes.  Instances are immutable."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Expression):
    value: float


@dataclass(frozen=True)
class Var(Expression):
    """The sole variable ``x``."""


@dataclass(frozen=True)
class Neg(Expression):
    operand: Expression


@dataclass(frozen=True)
class BinOp(Expression):
    op: str
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Call(Expression):
    name: str
    arg: Expression


# --------------------------------------------------------------------------
# Tokenizer / parser
# --------------------------------------------------------------------------

_ATOM_EXPECTED = ("number", "'x'", "function name", "'('", "'-'")


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | lparen | rparen | end
    text: str
    offset: int  # byte offset into the UTF-8 source


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(source)

    def byte_offset(char_index: int) -> int:
        return len(source[:char_index].encode("utf-8"))

    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        start = i
        if c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            i += 1
            while i < n and source[i].isdigit():
                i += 1
            if i < n and source[i] == ".":
                i += 1
                while i < n and source[i].isdigit():
                    i += 1
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    i = j + 1
                    while i < n and source[i].isdigit():
                        i += 1
            tokens.append(_Token("number", source[start:i], byte_offset(start)))
            continue
        if c.isalpha() or c == "_":
            i += 1
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            tokens.append(_Token("ident", source[start:i], byte_offset(start)))
            continue
        if c in "+-*/^":
            tokens.append(_Token("op", c, byte_offset(start)))
            i += 1
            continue
        if c == "(":
            tokens.append(_Token("lparen", c, byte_offset(start)))
            i += 1
            continue
        if c == ")":
            tokens.append(_Token("rparen", c, byte_offset(start)))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", byte_offset(start), _ATOM_EXPECTED)
    tokens.append(_Token("end", "", byte_offset(n)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected: tuple[str, ...]) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"unexpected token {tok.text!r}" if tok.text else "unexpected end of input",
                             tok.offset, expected)
        return self.advance()

    def parse_expr(self) -> Expression:
        node = self.parse_term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expression:
        node = self.parse_unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> Expression:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expression:
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            return BinOp("^", base, self.parse_unary())
        return base

    def parse_atom(self) -> Expression:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Const(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if tok.text == "x":
                return Var()
            if tok.text in FUNCTION_NAMES:
                self.expect("lparen", ("'('",))
                arg = self.parse_expr()
                self.expect("rparen", ("')'",))
                return Call(tok.text, arg)
            raise UnknownIdentifierError(tok.text, tok.offset)
        if tok.kind == "lparen":
            self.advance()
            inner = self.parse_expr()
            self.expect("rparen", ("')'", "operator"))
            return inner
        raise ParseError(f"unexpected token {tok.text!r}" if tok.text else "unexpected end of input",
                         tok.offset, _ATOM_EXPECTED)


def parse(source: str) -> Expression:
    """Parse ``source`` into an expression tree.

    Raises :class:`ParseError` with the byte offset and the expected token
    set on malformed input, and :class:`UnknownIdentifierError` for
    identifiers outside the supported set.
    """
    parser = _Parser(_tokenize(source))
    node = parser.parse_expr()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ParseError(f"unexpected token {trailing.text!r}", trailing.offset,
                         ("operator", "end of input"))
    return node


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------


def _first_offending(mask, x):
    """The first input value for which ``mask`` is true."""
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return float(x) if np.ndim(x) == 0 else float(np.asarray(x).flat[0])
    idx = int(np.argmax(mask))
    if np.ndim(x) == 0:
        return float(x)
    return float(np.asarray(x).flat[idx])


def _check_finite(result, node, x):
    if not np.all(np.isfinite(result)):
        raise NonFiniteError(
            f"{to_source(node)} overflowed to a non-finite value",
            node, _first_offending(~np.isfinite(np.asarray(result)), x))
    return result


def _eval(node: Expression, x):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    if isinstance(node, BinOp):
        left = _eval(node.left, x)
        right = _eval(node.right, x)
        if node.op == "+":
            return _check_finite(left + right, node, x)
        if node.op == "-":
            return _check_finite(left - right, node, x)
        if node.op == "*":
            return _check_finite(left * right, node, x)
        if node.op == "/":
            if np.any(right == 0):
                raise DomainError(
                    f"division by zero in {to_source(node)}",
                    node, _first_offending(np.asarray(right) == 0, x))
            return _check_finite(left / right, node, x)
        # '^'
        base = np.asarray(left, dtype=float)
        expo = np.asarray(right, dtype=float)
        bad = (base == 0) & (expo < 0)
        if np.any(bad):
            raise DomainError(
                f"zero raised to a negative power in {to_source(node)}",
                node, _first_offending(bad, x))
        bad = (base < 0) & (expo != np.floor(expo))
        if np.any(bad):
            raise DomainError(
                f"negative base with non-integer exponent in {to_source(node)}",
                node, _first_offending(bad, x))
        with np.errstate(over="ignore"):
            return _check_finite(np.power(base, expo), node, x)
    if isinstance(node, Call):
        arg = np.asarray(_eval(node.arg, x), dtype=float)
        name = node.name
        if name == "sqrt":
            if np.any(arg < 0):
                raise DomainError(f"sqrt of a negative value in {to_source(node)}",
                                  node, _first_offending(arg < 0, x))
            return np.sqrt(arg)
        if name == "ln":
            if np.any(arg <= 0):
                raise DomainError(f"ln of a non-positive value in {to_source(node)}",
                                  node, _first_offending(arg <= 0, x))
            return np.log(arg)
        if name in ("asin", "acos"):
            bad = (arg < -1) | (arg > 1)
            if np.any(bad):
                raise DomainError(f"{name} argument outside [-1, 1] in {to_source(node)}",
                                  node, _first_offending(bad, x))
            return np.arcsin(arg) if name == "asin" else np.arccos(arg)
        with np.errstate(over="ignore"):
            if name == "sin":
                return np.sin(arg)
            if name == "cos":
                return np.cos(arg)
            if name == "tan":
                return np.tan(arg)
            if name == "exp":
                return _check_finite(np.exp(arg), node, x)
            if name == "abs":
                return np.abs(arg)
            if name == "atan":
                return np.arctan(arg)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(expression: Expression, x):
    """Evaluate ``expression`` at ``x`` in IEEE double precision.

    ``x`` may be a scalar or a NumPy array; the result has the same shape.
    The order of operations is fixed by the tree shape, so results are
    deterministic across runs.

    Raises :class:`DomainError` when a subexpression leaves its domain
    (division by zero, sqrt/ln/asin/acos out of range) and
    :class:`NonFiniteError` when an operation overflows to a non-finite
    value.
    """
    scalar = np.ndim(x) == 0
    if scalar:
        if not np.isfinite(x):
            raise PreconditionError("evaluation point must be finite", field="x")
        x_in = float(x)
    else:
        x_in = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x_in)):
            raise PreconditionError("evaluation points must be finite", field="x")
    result = _eval(expression, x_in)
    result = np.asarray(result, dtype=float)
    if not np.all(np.isfinite(result)):
        raise NonFiniteError(
            f"{to_source(expression)} overflowed to a non-finite value",
            expression, _first_offending(~np.isfinite(result), x))
    if scalar:
        return float(result)
    return np.broadcast_to(result, np.shape(x)).copy() if result.shape != np.shape(x) else result


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------


def to_source(node: Expression) -> str:
    """Render a tree as parseable source.

    Composite nodes are fully parenthesized, so ``parse(to_source(e))``
    reproduces the tree shape and therefore the exact evaluation order.
    """
    if isinstance(node, Const):
        v = node.value
        if v < 0 or (v == 0 and math.copysign(1.0, v) < 0):
            # Parenthesized so a negative literal cannot re-associate under
            # '^', which binds tighter than unary minus.
            return f"(-{repr(-v)})"
        return repr(v)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({to_source(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


# --------------------------------------------------------------------------
# Symbolic differentiation
# --------------------------------------------------------------------------


def _is_const(node, value=None):
    return isinstance(node, Const) and (value is None or node.value == value)


def _fold_binary(op: str, a: float, b: float):
    """Constant-fold ``a op b`` when the result is an ordinary finite float."""
    try:
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        elif op == "/":
            r = a / b if b != 0 else None
        else:
            r = a ** b if not (a < 0 and b != int(b)) and not (a == 0 and b < 0) else None
    except OverflowError:
        return None
    if r is None or not np.isfinite(r):
        return None
    return r


def _add(a: Expression, b: Expression) -> Expression:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if _is_const(a) and _is_const(b):
        folded = _fold_binary("+", a.value, b.value)
        if folded is not None:
            return Const(folded)
    return BinOp("+", a, b)


def _sub(a: Expression, b: Expression) -> Expression:
    if _is_const(b, 0.0):
        return a
    if _is_const(a) and _is_const(b):
        folded = _fold_binary("-", a.value, b.value)
        if folded is not None:
            return Const(folded)
    return BinOp("-", a, b)


def _mul(a: Expression, b: Expression) -> Expression:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b):
        folded = _fold_binary("*", a.value, b.value)
        if folded is not None:
            return Const(folded)
    return BinOp("*", a, b)


def _div(a: Expression, b: Expression) -> Expression:
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b):
        folded = _fold_binary("/", a.value, b.value)
        if folded is not None:
            return Const(folded)
    return BinOp("/", a, b)


def _pow(a: Expression, b: Expression) -> Expression:
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return Const(1.0)
    if _is_const(a) and _is_const(b):
        folded = _fold_binary("^", a.value, b.value)
        if folded is not None:
            return Const(folded)
    return BinOp("^", a, b)


@functools.lru_cache(maxsize=4096)
def differentiate(expression: Expression) -> Expression:
    """Symbolic derivative with respect to ``x``.

    Applies the sum, product, quotient, chain and constant-exponent power
    rules; a variable exponent is handled through the exp/ln rewrite
    ``u^v = exp(v*ln(u))``.  Simplification is deliberately light: zero and
    one elimination plus constant folding, nothing CAS-grade.
    """
    node = expression
    if isinstance(node, Const):
        return Const(0.0)
    if isinstance(node, Var):
        return Const(1.0)
    if isinstance(node, Neg):
        return Neg(differentiate(node.operand))
    if isinstance(node, BinOp):
        u, v = node.left, node.right
        du = differentiate(u)
        dv = differentiate(v)
        if node.op == "+":
            return _add(du, dv)
        if node.op == "-":
            return _sub(du, dv)
        if node.op == "*":
            return _add(_mul(du, v), _mul(u, dv))
        if node.op == "/":
            return _div(_sub(_mul(du, v), _mul(u, dv)), _pow(v, Const(2.0)))
        # '^'
        if isinstance(v, Const):
            c = v.value
            return _mul(_mul(Const(c), _pow(u, Const(c - 1.0))), du)
        return differentiate(Call("exp", _mul(v, Call("ln", u))))
    if isinstance(node, Call):
        u = node.arg
        du = differentiate(u)
        name = node.name
        if name == "sin":
            return _mul(Call("cos", u), du)
        if name == "cos":
            return Neg(_mul(Call("sin", u), du))
        if name == "tan":
            return _div(du, _pow(Call("cos", u), Const(2.0)))
        if name == "exp":
            return _mul(Call("exp", u), du)
        if name == "ln":
            return _div(du, u)
        if name == "sqrt":
            return _div(du, _mul(Const(2.0), Call("sqrt", u)))
        if name == "abs":
            return _mul(_div(u, Call("abs", u)), du)
        if name == "asin":
            return _div(du, Call("sqrt", _sub(Const(1.0), _pow(u, Const(2.0)))))
        if name == "acos":
            return Neg(_div(du, Call("sqrt", _sub(Const(1.0), _pow(u, Const(2.0))))))
        if name == "atan":
            return _div(du, _add(Const(1.0), _pow(u, Const(2.0))))
    raise TypeError(f"not an expression node: {node!r}")


# --------------------------------------------------------------------------
# Named functions over an interval
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Function:
    """A real function on a closed interval, given as an expression tree.

    ``derivative`` and ``antiderivative`` are optional caller-supplied
    expressions.  A supplied derivative is expected to agree numerically
    with the symbolic derivative of ``body`` wherever both evaluate; a
    supplied antiderivative is spot-checked against ``body`` before any
    fundamental-theorem evaluation trusts it.
    """

    body: Expression
    domain: tuple[float, float]
    derivative: Expression | None = None
    antiderivative: Expression | None = None

    def __post_init__(self):
        a, b = self.domain
        if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
            raise PreconditionError(
                f"domain must be a finite interval with a < b, got [{a}, {b}]",
                field="domain")
        object.__setattr__(self, "domain", (float(a), float(b)))

    @classmethod
    def from_sources(cls, body: str, domain: tuple[float, float],
                     derivative: str | None = None,
                     antiderivative: str | None = None) -> "Function":
        return cls(
            body=parse(body),
            domain=domain,
            derivative=parse(derivative) if derivative is not None else None,
            antiderivative=parse(antiderivative) if antiderivative is not None else None,
        )

    def __call__(self, x):
        return evaluate(self.body, x)

    def derivative_expression(self) -> Expression:
        """The supplied derivative if present, else the symbolic one."""
        if self.derivative is not None:
            return self.derivative
        return differentiate(self.body)

    def contains(self, *points: float) -> bool:
        a, b = self.domain
        return all(a <= p <= b for p in points)
