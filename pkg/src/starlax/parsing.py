"""Expression parser for symbols, differential polynomials and q-operators.

Grammar (both contexts)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := primary ("^" unary)?          # right associative
    primary := NUMBER | NAME | JET | "(" expr ")"

Exponents must evaluate to integers.  Division is only by nonzero
constants (and, for q-operators, by invertible multipliers such as
``x^2`` or ``1 + q``).

Symbol names: ``p``, ``k`` (kappa), ``x`` and jet variables ``u``,
``u_x``, ``u_xx``, ``u1``, ``u2_xxx``, ...; a jet name followed directly by
``^(n)`` is its n-th x-derivative, so ``u^(4)`` is u'''' and not u to the
fourth power.  ``u0`` is an alias of ``u``.

q-operator names: ``dq`` (q-derivative), ``T`` (shift), ``x`` and ``q``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .diffalg import DiffPoly
from .errors import EngineError, FloorTooDeep, ParseError
from .qcalc import QLaurent, QOperator, compose
from .scalars import QScalar
from .symbols import MOYAL, PhaseSymbol, ProductKind, star

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<num>\d+)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9]*(?:_x+)?)"
    r"|(?P<op>[-+*/^()])"
)
_JET = re.compile(r"u(\d*)(?:_(x+))?$")
_JET_DERIV = re.compile(r"\^\((\d+)\)")

_PRIMARY = ("number", "name", "(", "-")


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, jet, op, end
    text: str
    line: int
    column: int
    value: object = None


def tokenize(src: str):
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col, _PRIMARY + ("+", "*", "/", "^", ")"))
        text = m.group()
        kind = m.lastgroup
        if kind == "name":
            jm = _JET.match(text)
            dm = _JET_DERIV.match(src, m.end())
            if jm and not jm.group(2) and dm:
                field = int(jm.group(1)) if jm.group(1) else 0
                tokens.append(Token("jet", text + dm.group(), line, col, (field, int(dm.group(1)))))
                col += len(text) + len(dm.group())
                pos = dm.end()
                continue
        if kind != "ws":
            tokens.append(Token(kind, text, line, col))
        for ch in text:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    tokens.append(Token("end", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class Node:
    op: str  # num, name, jet, neg, +, -, *, /, ^
    args: tuple
    token: Token


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, message, expected):
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"{message}: unexpected {what}", t.line, t.column, expected)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail("trailing input", ("+", "-", "*", "/", "^", "end of input"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            t = self.tok
            self.i += 1
            node = Node(t.text, (node, self.term()), t)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            t = self.tok
            self.i += 1
            node = Node(t.text, (node, self.unary()), t)
        return node

    def unary(self) -> Node:
        t = self.tok
        if t.kind == "op" and t.text == "-":
            self.i += 1
            return Node("neg", (self.unary(),), t)
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        t = self.tok
        if t.kind == "op" and t.text == "^":
            self.i += 1
            return Node("^", (base, self.unary()), t)
        return base

    def primary(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Node("num", (Fraction(int(t.text)),), t)
        if t.kind == "name":
            self.i += 1
            return Node("name", (t.text,), t)
        if t.kind == "jet":
            self.i += 1
            return Node("jet", t.value, t)
        if t.kind == "op" and t.text == "(":
            self.i += 1
            node = self.expr()
            if not (self.tok.kind == "op" and self.tok.text == ")"):
                self.fail("unbalanced parenthesis", (")", "+", "-", "*", "/", "^"))
            self.i += 1
            return node
        self.fail("expected a value", _PRIMARY)


def parse_tree(src: str) -> Node:
    return _Parser(src).parse()


def _leftmost(node: Node) -> Token:
    while node.op in ("+", "-", "*", "/", "^"):
        node = node.args[0]
    return node.token


def _error_at(node: Node, message: str, expected=()):
    t = _leftmost(node)
    return ParseError(message, t.line, t.column, expected)


# ---------------------------------------------------------------------------
# evaluation: phase-space symbols


class _SymbolEval:
    names = ("p", "k", "x", "u", "u<n>", "u_x", "u<n>_x")

    def __init__(self, star_mode: bool, kind: ProductKind, floor):
        self.star_mode = star_mode
        self.kind = kind
        self.floor = floor

    def atom(self, node: Node) -> PhaseSymbol:
        if node.op == "num":
            return PhaseSymbol.const(node.args[0])
        if node.op == "jet":
            field, order = node.args
            return PhaseSymbol.const(DiffPoly.var(field, order))
        name = node.args[0]
        if name == "p":
            return PhaseSymbol.p()
        if name == "k":
            return PhaseSymbol.const(DiffPoly.kappa())
        if name == "x":
            return PhaseSymbol.const(DiffPoly.x())
        m = _JET.match(name)
        if m:
            field = int(m.group(1)) if m.group(1) else 0
            order = len(m.group(2)) if m.group(2) else 0
            return PhaseSymbol.const(DiffPoly.var(field, order))
        raise _error_at(node, f"unknown name {name!r}", self.names)

    def constant(self, value: PhaseSymbol):
        """Rational value of a constant symbol, or None."""
        if value.floor is not None:
            return None
        c = value.coeffs
        if not c:
            return Fraction(0)
        if set(c) != {0} or not c[0].is_constant() or c[0].kappa_degree():
            return None
        return c[0].constant_term()[0]

    def mul(self, a, b):
        if not self.star_mode:
            return a * b
        try:
            return star(a, b, self.kind)
        except FloorTooDeep:
            if self.floor is None:
                raise
            return star(a, b, self.kind, self.floor)

    def power(self, node, base, n: int):
        if n < 0:
            c = self.constant(base)
            if c is not None:
                if c == 0:
                    raise _error_at(node, "zero to a negative power")
                return PhaseSymbol.const(c**n)
            coeffs = base.coeffs
            if base.floor is None and len(coeffs) == 1:
                (e, coeff), = coeffs.items()
                if coeff == DiffPoly.const(1):
                    return PhaseSymbol.p(e * n)
            raise _error_at(node, "negative powers are only defined for p and constants", ("non-negative integer",))
        out = PhaseSymbol.const(1)
        for _ in range(n):
            out = self.mul(out, base)
        return out

    def divide(self, node, a, b):
        c = self.constant(b)
        if c is None or c == 0:
            raise _error_at(node, "division is only by nonzero rational constants", ("nonzero constant",))
        return a / c


# ---------------------------------------------------------------------------
# evaluation: q-operators


class _QEval:
    names = ("dq", "T", "x", "q")

    def __init__(self, floor):
        self.floor = floor

    def atom(self, node: Node) -> QOperator:
        if node.op == "num":
            return QOperator.mul(QLaurent.const(node.args[0]))
        if node.op == "jet":
            raise _error_at(node, "jet variables are not part of the q-operator grammar", self.names)
        name = node.args[0]
        if name == "dq":
            return QOperator.dq(1)
        if name == "T":
            return QOperator.shift(1)
        if name == "x":
            return QOperator.mul(QLaurent.x(1))
        if name == "q":
            return QOperator.mul(QLaurent.const(QScalar.q(1)))
        raise _error_at(node, f"unknown name {name!r}", self.names)

    def constant(self, value: QOperator):
        """Rational value of a constant operator, or None."""
        t = value.terms
        if value.floor is not None:
            return None
        if not t:
            return Fraction(0)
        if set(t) != {(0, 0)} or not t[(0, 0)].is_scalar():
            return None
        c = t[(0, 0)][0]
        return c.constant() if c.is_constant() else None

    def _inverse(self, value: QOperator):
        """Inverse of a multiplier ``c x^m`` or a single letter, else None."""
        t = value.terms
        if value.floor is not None or len(t) != 1:
            return None
        (a, b), f = next(iter(t.items()))
        coeffs = f.coeffs
        if len(coeffs) != 1:
            return None
        (m, c), = coeffs.items()
        if (a, b) == (0, 0):
            return QOperator.mul(QLaurent.x(-m, 1 / c))
        if m == 0 and c == 1 and (a == 0 or b == 0):
            return QOperator({(-a, -b): QLaurent.const(1)})
        return None

    def mul(self, a, b):
        try:
            return compose(a, b)
        except FloorTooDeep:
            if self.floor is None:
                raise
            return compose(a, b, self.floor)

    def power(self, node, base, n: int):
        if n < 0:
            inv = self._inverse(base)
            if inv is None:
                raise _error_at(node, "negative powers need a monomial multiplier, T or dq", ("non-negative integer",))
            base, n = inv, -n
        out = QOperator.identity()
        for _ in range(n):
            out = self.mul(out, base)
        return out

    def divide(self, node, a, b):
        t = b.terms
        if b.floor is None and set(t) == {(0, 0)} and t[(0, 0)].is_scalar() and t[(0, 0)]:
            return a.scale(1 / t[(0, 0)][0])
        inv = self._inverse(b)
        if inv is None or inv.terms.keys() != {(0, 0)}:
            raise _error_at(node, "division is only by q-scalars or monomial multipliers", ("invertible multiplier",))
        return self.mul(a, inv)


def _evaluate(node: Node, ev):
    op = node.op
    if op in ("num", "name", "jet"):
        return ev.atom(node)
    if op == "neg":
        return -_evaluate(node.args[0], ev)
    if op in "+-":
        a, b = (_evaluate(x, ev) for x in node.args)
        return a + b if op == "+" else a - b
    if op == "*":
        a, b = (_evaluate(x, ev) for x in node.args)
        return ev.mul(a, b)
    if op == "/":
        a, b = (_evaluate(x, ev) for x in node.args)
        return ev.divide(node, a, b)
    if op == "^":
        base = _evaluate(node.args[0], ev)
        exp = _evaluate(node.args[1], ev)
        n = ev.constant(exp)
        if n is None or n.denominator != 1:
            raise _error_at(node.args[1], "exponent must be an integer", ("integer",))
        return ev.power(node, base, int(n))
    raise AssertionError(op)


# ---------------------------------------------------------------------------
# public entry points


def parse_symbol(src: str, star_mode: bool = False, kind: ProductKind = MOYAL, floor=None) -> PhaseSymbol:
    """Parse a phase-space symbol.

    By default ``*`` is the pointwise product.  With ``star_mode`` it is the
    star product of ``kind`` (so ``u*p`` means ``u ★ p``); ``floor`` bounds
    infinite products with negative powers of p.
    """
    tree = parse_tree(src)
    try:
        out = _evaluate(tree, _SymbolEval(star_mode, kind, floor))
        if floor is not None and (out.floor is None or out.floor < floor):
            out = out.truncate(floor)
        return out
    except EngineError as exc:
        raise ParseError(str(exc), tree.token.line, tree.token.column, ("--floor",)) from exc


def parse_diffpoly(src: str) -> DiffPoly:
    """Parse a differential polynomial (no p allowed)."""
    sym = parse_symbol(src)
    c = sym.coeffs
    if set(c) - {0}:
        raise ParseError("p is not allowed in a differential polynomial", 1, 1, ("u", "k", "x", "number"))
    return c.get(0, DiffPoly())


def parse_qoperator(src: str, floor=None) -> QOperator:
    tree = parse_tree(src)
    try:
        out = _evaluate(tree, _QEval(floor))
        if floor is not None and (out.floor is None or out.floor < floor):
            out = out.truncate(floor)
        return out
    except EngineError as exc:
        raise ParseError(str(exc), tree.token.line, tree.token.column, ("--floor",)) from exc


def parse_symbol_expr(src: str, context: str = "symbol", **options):
    """Dispatch on grammar context: ``symbol``, ``diffpoly`` or ``q``."""
    if context == "symbol":
        return parse_symbol(src, **options)
    if context == "diffpoly":
        return parse_diffpoly(src)
    if context == "q":
        return parse_qoperator(src, **options)
    raise ValueError(f"unknown grammar context {context!r}")
