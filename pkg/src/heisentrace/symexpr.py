"""A small expression language for symbols and tail coefficients.

Grammar (highest precedence first)::

    atom    := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")"
    power   := atom [ "^" exponent ]          right associative
    exponent:= "-" exponent | power
    unary   := "-" unary | power
    term    := unary { ("*" | "/") unary }
    expr    := term { ("+" | "-") term }

Names are the variables ``x1 .. x2n``, ``r``, ``theta1 .. theta3``, the
constants ``i`` and ``pi``, and the functions ``exp sin cos sqrt abs``
plus ``norm2(x)`` (squared Euclidean norm of the whole vector ``x``).
Exponents must evaluate to integers or half-integers; half-integer powers
and ``sqrt`` require a real nonnegative base.

Evaluation is vectorized: bindings may be numpy arrays that broadcast
against each other.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import DomainError, ParseError, UnboundVariableError, UnknownIdentifierError

FUNCTIONS = ("exp", "sin", "cos", "sqrt", "abs")
CONSTANTS = ("i", "pi")
_VARIABLE_RE = re.compile(r"^(x[1-9][0-9]*|theta[1-9][0-9]*|r)$")


# ---------------------------------------------------------------- AST nodes


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


@dataclass(frozen=True)
class Norm2:
    """``norm2(x)``; the argument is always the full vector ``x``."""


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Const, Var, Neg, Call, Norm2, BinOp]

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def free_variables(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Norm2):
        return {"x"}
    if isinstance(e, Neg):
        return free_variables(e.operand)
    if isinstance(e, Call):
        return free_variables(e.arg)
    if isinstance(e, BinOp):
        return free_variables(e.left) | free_variables(e.right)
    return set()


# ------------------------------------------------------------------ printing


def to_text(e: Expr) -> str:
    """Render ``e`` with the minimal parentheses needed to parse back to ``e``."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Norm2):
        return "norm2(x)"
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    if isinstance(e, Neg):
        inner = to_text(e.operand)
        if _prec(e.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    # BinOp
    p = _PREC[e.op]
    left, right = to_text(e.left), to_text(e.right)
    if e.op == "^":
        if _prec(e.left) < _PREC["atom"]:
            left = f"({left})"
        if _prec(e.right) < _PREC["neg"]:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


# ------------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<num>(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, chunk, line, pos - line_start + 1))
        for k, ch in enumerate(chunk):
            if ch == "\n":
                line += 1
                line_start = pos + k + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, variables):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.variables = variables

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def _expect(self, text: str) -> _Token:
        t = self.tok
        if t.text != text:
            found = "end of input" if t.kind == "eof" else repr(t.text)
            raise ParseError(f"expected {text!r}, found {found}", t.line, t.col)
        return self._advance()

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.line, self.tok.col)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.tok.text in ("+", "-"):
            op = self._advance().text
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.tok.text in ("*", "/"):
            op = self._advance().text
            e = BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.tok.text == "-":
            self._advance()
            return Neg(self.unary())
        return self.power()

    def exponent(self) -> Expr:
        if self.tok.text == "-":
            self._advance()
            return Neg(self.exponent())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.text == "^":
            self._advance()
            return BinOp("^", base, self.exponent())
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self._advance()
            return Num(float(t.text))
        if t.text == "(":
            self._advance()
            e = self.expr()
            self._expect(")")
            return e
        if t.kind == "name":
            self._advance()
            if self.tok.text == "(":
                return self._call(t)
            if t.text in CONSTANTS:
                return Const(t.text)
            if t.text in FUNCTIONS or t.text == "norm2":
                raise ParseError(f"function {t.text!r} needs an argument", t.line, t.col)
            if not self._known_variable(t.text):
                raise UnknownIdentifierError(f"unknown identifier {t.text!r}", t.line, t.col)
            return Var(t.text)
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"unexpected {found}", t.line, t.col)

    def _call(self, name: _Token) -> Expr:
        self._expect("(")
        if name.text == "norm2":
            arg = self.tok
            if arg.text != "x":
                raise ParseError("norm2 takes the vector 'x' as its argument", arg.line, arg.col)
            self._advance()
            self._expect(")")
            return Norm2()
        if name.text not in FUNCTIONS:
            raise UnknownIdentifierError(f"unknown function {name.text!r}", name.line, name.col)
        arg = self.expr()
        self._expect(")")
        return Call(name.text, arg)

    def _known_variable(self, name: str) -> bool:
        if self.variables is None:
            return bool(_VARIABLE_RE.match(name))
        return name in self.variables


def parse(text: str, variables=None) -> Expr:
    """Parse ``text`` into an AST.

    ``variables`` restricts the admissible variable names; by default any
    ``x<k>``, ``theta<k>`` or ``r`` is accepted.
    """
    return _Parser(text, variables).parse()


# ---------------------------------------------------------------- evaluation

_HALF_TOL = 1e-12


def _as_complex(v):
    return np.asarray(v, dtype=complex)


def _real_nonneg(base, what: str):
    if np.any(np.abs(base.imag) > 0) or np.any(base.real < 0):
        raise DomainError(f"{what} of a negative or complex base")
    return base.real


def _power(base, expo):
    if np.any(expo.imag != 0):
        raise DomainError("complex exponent")
    twice = 2.0 * expo.real
    k = np.rint(twice)
    if np.any(np.abs(twice - k) > _HALF_TOL):
        raise DomainError("exponent must be an integer or half-integer")
    base, k = np.broadcast_arrays(base, k.astype(np.int64))
    if np.any((base == 0) & (k < 0)):
        raise DomainError("zero raised to a negative power")
    odd = (k % 2) == 1
    out = np.empty(base.shape, dtype=complex)
    out[~odd] = base[~odd] ** (k[~odd] // 2)
    if np.any(odd):
        root = np.sqrt(_real_nonneg(base[odd], "half-integer power"))
        out[odd] = root ** k[odd].astype(float)
    return out


def _vector_x(bindings):
    if "x" in bindings:
        return np.asarray(bindings["x"])
    comps = sorted((int(k[1:]), v) for k, v in bindings.items() if re.match(r"^x[0-9]+$", k))
    if not comps:
        raise UnboundVariableError("norm2(x) needs the vector 'x' or its components x1..")
    return np.stack(np.broadcast_arrays(*[np.asarray(v) for _, v in comps]), axis=-1)


def _eval(e: Expr, b: Mapping):
    if isinstance(e, Num):
        return complex(e.value)
    if isinstance(e, Const):
        return 1j if e.name == "i" else complex(np.pi)
    if isinstance(e, Var):
        try:
            return _as_complex(b[e.name])
        except KeyError:
            raise UnboundVariableError(f"variable {e.name!r} is not bound") from None
    if isinstance(e, Norm2):
        x = _vector_x(b)
        return _as_complex(np.sum(np.abs(x) ** 2 if np.iscomplexobj(x) else x * x, axis=-1))
    if isinstance(e, Neg):
        return -_eval(e.operand, b)
    if isinstance(e, Call):
        a = _as_complex(_eval(e.arg, b))
        if e.func == "exp":
            return np.exp(a)
        if e.func == "sin":
            return np.sin(a)
        if e.func == "cos":
            return np.cos(a)
        if e.func == "abs":
            return _as_complex(np.abs(a))
        return _as_complex(np.sqrt(_real_nonneg(a, "sqrt")))
    left = _as_complex(_eval(e.left, b))
    right = _as_complex(_eval(e.right, b))
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    if e.op == "/":
        if np.any(right == 0):
            raise DomainError("division by zero")
        return left / right
    return _as_complex(_power(left, right))


def evaluate(e: Expr, bindings: Mapping):
    """Evaluate ``e``; returns a complex scalar or a complex ndarray."""
    with np.errstate(all="ignore"):
        out = _as_complex(_eval(e, bindings))
    if not np.all(np.isfinite(out)):
        raise DomainError("expression produced a non-finite value")
    return complex(out) if out.ndim == 0 else out
