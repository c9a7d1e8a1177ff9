"""q-difference operator calculus.

``dq f(x) = (f(qx) - f(x)) / ((q - 1) x)`` and ``T f(x) = f(qx)`` act on
Laurent polynomials in x with coefficients in Q(q).  Operators are kept in
the normal form ``sum f_ab T^a dq^b`` with coefficient functions on the
left, and satisfy ``dq T = q T dq``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import FloorTooDeep, InsufficientCoefficients, NotIntegrable
from .scalars import QScalar, format_rational, latex_rational, q_binomial, q_number


_DQ_TEX = "\\partial_q"
_TAU_TEX = "\\tau"


def _qs(value) -> QScalar:
    return QScalar.coerce(value)


def _simple(c: QScalar) -> bool:
    """True when c is a signed monomial ``c q^e`` (e may be negative)."""
    return sum(1 for v in c.num.c if v) == 1 and sum(1 for v in c.den.c if v) == 1


def _monomial_text(v, e: int, latex: bool) -> str:
    """Text for the positive monomial ``v q^e``."""
    if e == 0:
        return latex_rational(v) if latex else format_rational(v)
    qs = "q" if e == 1 else (f"q^{{{e}}}" if latex and not 0 <= e <= 9 else f"q^{e}")
    if v == 1:
        return qs
    return f"{latex_rational(v)} {qs}" if latex else f"{format_rational(v)}*{qs}"


def _scalar_factor(c: QScalar, latex: bool):
    """(sign, text or None) for a coefficient in front of other factors."""
    if _simple(c):
        e = c.num.degree - c.den.degree
        v = c.num.c[c.num.degree]
        sign = "-" if v < 0 else "+"
        if abs(v) == 1 and e == 0:
            return sign, None
        return sign, _monomial_text(abs(v), e, latex)
    return "+", (f"\\left({c.latex()}\\right)" if latex else f"({c})")


def _join(parts) -> str:
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _pow_text(base: str, e: int, latex: bool) -> str:
    if e == 1:
        return base
    if latex:
        return f"{base}^{e}" if 0 <= e <= 9 else f"{base}^{{{e}}}"
    return f"{base}^{e}"


class QLaurent:
    """Finite Laurent polynomial ``sum c_m x^m`` with c_m in Q(q)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        out = {}
        for m, c in (coeffs or {}).items():
            c = _qs(c)
            if c:
                out[int(m)] = c
        self._c = out

    @classmethod
    def x(cls, power: int = 1, coeff=1) -> "QLaurent":
        return cls({power: coeff})

    @classmethod
    def const(cls, c) -> "QLaurent":
        return cls({0: c})

    @classmethod
    def coerce(cls, value) -> "QLaurent":
        return value if isinstance(value, QLaurent) else cls.const(value)

    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def exponents(self):
        return sorted(self._c)

    def __getitem__(self, m: int) -> QScalar:
        return self._c.get(m, QScalar(0))

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if not isinstance(other, QLaurent):
            try:
                other = QLaurent.coerce(other)
            except TypeError:
                return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def is_scalar(self) -> bool:
        return set(self._c) <= {0}

    def __add__(self, other):
        other = QLaurent.coerce(other)
        out = dict(self._c)
        for m, c in other._c.items():
            out[m] = out[m] + c if m in out else c
        return QLaurent(out)

    __radd__ = __add__

    def __neg__(self):
        return QLaurent({m: -c for m, c in self._c.items()})

    def __sub__(self, other):
        return self + (-QLaurent.coerce(other))

    def __rsub__(self, other):
        return QLaurent.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, QLaurent):
            other = _qs(other)
            return QLaurent({m: c * other for m, c in self._c.items()})
        out = {}
        for m1, c1 in self._c.items():
            for m2, c2 in other._c.items():
                out[m1 + m2] = out[m1 + m2] + c1 * c2 if m1 + m2 in out else c1 * c2
        return QLaurent(out)

    __rmul__ = __mul__

    def shift(self, a: int = 1) -> "QLaurent":
        """``T^a``: x^m -> q^(a m) x^m."""
        return QLaurent({m: c * QScalar.q(a * m) for m, c in self._c.items()})

    def dq(self, n: int = 1) -> "QLaurent":
        """``dq^n``; negative n integrates (x^-1 is not in the image)."""
        out = self
        if n >= 0:
            for _ in range(n):
                out = QLaurent({m - 1: c * q_number(m) for m, c in out._c.items() if m})
            return out
        for _ in range(-n):
            if -1 in out._c:
                raise NotIntegrable("x^-1 has no q-antiderivative among Laurent polynomials")
            out = QLaurent({m + 1: c / q_number(m + 1) for m, c in out._c.items()})
        return out

    def at_q(self, value) -> "QLaurent":
        return QLaurent({m: c.at(value) for m, c in self._c.items()})

    def render(self, latex: bool = False, var: str = "x") -> str:
        parts = []
        for m in sorted(self._c):
            c = self._c[m]
            if m == 0:
                if _simple(c):
                    sign, body = _scalar_factor(c, latex)
                    parts.append((sign, body or "1"))
                else:
                    parts.append(_scalar_factor(c, latex))
                continue
            sign, pre = _scalar_factor(c, latex)
            xs = _pow_text(var, m, latex)
            if pre is None:
                body = xs
            else:
                body = f"{pre} {xs}" if latex else f"{pre}*{xs}"
            parts.append((sign, body))
        return _join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"QLaurent({self.render()})"


def _term_count(f: QLaurent) -> int:
    return len(f.coeffs)


class QOperator:
    """``sum f_ab T^a dq^b`` in normal form.

    ``floor`` is the lowest dq-exponent still exact; ``None`` means the
    operator is known completely.
    """

    __slots__ = ("_c", "floor")

    def __init__(self, terms=None, floor=None):
        out = {}
        for (a, b), f in (terms or {}).items():
            if floor is not None and b < floor:
                continue
            f = QLaurent.coerce(f)
            if f:
                out[(int(a), int(b))] = f
        self._c = out
        self.floor = floor

    @classmethod
    def identity(cls) -> "QOperator":
        return cls({(0, 0): QLaurent.const(1)})

    @classmethod
    def mul(cls, f) -> "QOperator":
        """Multiplication by the function f."""
        return cls({(0, 0): QLaurent.coerce(f)})

    @classmethod
    def shift(cls, a: int = 1) -> "QOperator":
        return cls({(a, 0): QLaurent.const(1)})

    @classmethod
    def dq(cls, b: int = 1) -> "QOperator":
        return cls({(0, b): QLaurent.const(1)})

    @classmethod
    def coerce(cls, value) -> "QOperator":
        if isinstance(value, QOperator):
            return value
        return cls.mul(value)

    @property
    def terms(self) -> dict:
        return dict(self._c)

    def __getitem__(self, key) -> QLaurent:
        a, b = key
        return self._c.get((a, b), QLaurent())

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if not isinstance(other, QOperator):
            try:
                other = QOperator.coerce(other)
            except TypeError:
                return NotImplemented
        return self._c == other._c and self.floor == other.floor

    def __hash__(self):
        return hash((frozenset(self._c.items()), self.floor))

    def agrees_with(self, other, floor=None) -> bool:
        """Equality of all terms with dq-exponent >= floor."""
        other = QOperator.coerce(other)
        keys = set(self._c) | set(other._c)
        return all(self[k] == other[k] for k in keys if floor is None or k[1] >= floor)

    def top(self):
        return max((b for _, b in self._c), default=None)

    def _effective_top(self):
        tops = [b for _, b in self._c]
        if self.floor is not None:
            tops.append(self.floor - 1)
        return max(tops, default=None)

    def _sum_floor(self, other):
        fs = [f for f in (self.floor, other.floor) if f is not None]
        return max(fs) if fs else None

    def __add__(self, other):
        other = QOperator.coerce(other)
        out = dict(self._c)
        for k, f in other._c.items():
            out[k] = out[k] + f if k in out else f
        return QOperator(out, self._sum_floor(other))

    __radd__ = __add__

    def __neg__(self):
        return QOperator({k: -f for k, f in self._c.items()}, self.floor)

    def __sub__(self, other):
        return self + (-QOperator.coerce(other))

    def __rsub__(self, other):
        return QOperator.coerce(other) - self

    def scale(self, c) -> "QOperator":
        return QOperator({k: f * _qs(c) for k, f in self._c.items()}, self.floor)

    def __mul__(self, other):
        if isinstance(other, (QOperator, QLaurent)):
            return compose(self, QOperator.coerce(other))
        return self.scale(other)

    def __rmul__(self, other):
        return compose(QOperator.coerce(other), self)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of operators are not supported; use dq(-n)")
        out = QOperator.identity()
        for _ in range(n):
            out = out * self
        return out

    def truncate(self, floor: int) -> "QOperator":
        if self.floor is not None and floor < self.floor:
            raise FloorTooDeep(f"cannot truncate to {floor}: tracked only down to {self.floor}")
        return QOperator(self._c, floor)

    def at_q(self, value) -> "QOperator":
        return QOperator({k: f.at_q(value) for k, f in self._c.items()}, self.floor)

    def apply(self, f) -> QLaurent:
        """Act on a Laurent polynomial."""
        if self.floor is not None:
            raise FloorTooDeep("a truncated operator has no exact action")
        f = QLaurent.coerce(f)
        out = QLaurent()
        for (a, b), g in self._c.items():
            out = out + g * f.dq(b).shift(a)
        return out

    def render(self, latex: bool = False) -> str:
        parts = []
        for (a, b) in sorted(self._c, key=lambda k: (-k[1], -k[0])):
            f = self._c[(a, b)]
            ops = []
            if a:
                ops.append(_pow_text("\\tau" if latex else "T", a, latex))
            if b:
                ops.append(_pow_text("\\partial_q" if latex else "dq", b, latex))
            if not ops:
                parts.extend(_laurent_parts(f, latex))
                continue
            opstr = (" " if latex else "*").join(ops)
            if _term_count(f) == 1:
                (m, c), = f.coeffs.items()
                if m == 0 and _simple(c):
                    sign, pre = _scalar_factor(c, latex)
                    body = opstr if pre is None else (f"{pre} {opstr}" if latex else f"{pre}*{opstr}")
                    parts.append((sign, body))
                    continue
                sign, body = _laurent_parts(f, latex)[0]
                parts.append((sign, f"{body} {opstr}" if latex else f"{body}*{opstr}"))
                continue
            inner = f.render(latex)
            wrapped = f"\\left({inner}\\right)" if latex else f"({inner})"
            parts.append(("+", f"{wrapped} {opstr}" if latex else f"{wrapped}*{opstr}"))
        return _join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"QOperator({self.render()}, floor={self.floor})"


def _laurent_parts(f: QLaurent, latex: bool):
    text = f.render(latex)
    if _term_count(f) <= 1:
        if text.startswith("-"):
            return [("-", text[1:])]
        return [("+", text)]
    # several terms: reuse QLaurent's own signs
    parts = []
    for m in sorted(f.coeffs):
        sub = QLaurent({m: f[m]}).render(latex)
        parts.append(("-", sub[1:]) if sub.startswith("-") else ("+", sub))
    return parts


def _product_floor(A: QOperator, B: QOperator, floor):
    bounds = []
    if A.floor is not None:
        tb = B._effective_top()
        if tb is not None:
            bounds.append(A.floor + tb)
    if B.floor is not None:
        ta = A._effective_top()
        if ta is not None:
            bounds.append(B.floor + ta)
    if floor is not None:
        bounds.append(floor)
    return max(bounds) if bounds else None


def compose(A: QOperator, B: QOperator, floor=None) -> QOperator:
    """Normal form of ``A B``.

    Uses ``T^a dq^b g = sum_k [b, k]_q (T^(a+b-k) dq^k g) T^a dq^(b-k)`` and
    ``dq^e T^c = q^(c e) T^c dq^e``; the sum is infinite for b < 0 and is
    cut at the result floor.
    """
    out_floor = _product_floor(A, B, floor)
    out = {}
    for (a, b), f in A.terms.items():
        for (c, d), g in B.terms.items():
            if b < 0 and out_floor is None and min(g.exponents()) < 0:
                raise FloorTooDeep("products with dq^-n need a floor")
            k = 0
            h = g
            while True:
                e = b - k + d
                if b >= 0 and k > b:
                    break
                if out_floor is not None and e < out_floor:
                    break
                if not h:
                    break
                coeff = q_binomial(b, k) * QScalar.q(c * (b - k))
                term = f * h.shift(a + b - k) * coeff
                key = (a + c, e)
                out[key] = out[key] + term if key in out else term
                k += 1
                h = h.dq(1)
    return QOperator(out, out_floor)


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class QWord:
    """A product of letters, applied right to left.

    Letters are ``("f", QLaurent)``, ``("T", a)`` and ``("dq", b)``.
    """

    letters: tuple

    def apply(self, f) -> QLaurent:
        f = QLaurent.coerce(f)
        for kind, val in reversed(self.letters):
            if kind == "f":
                f = val * f
            elif kind == "T":
                f = f.shift(val)
            elif kind == "dq":
                f = f.dq(val)
            else:
                raise ValueError(f"unknown letter {kind!r}")
        return f

    def operator(self, floor=None) -> QOperator:
        out = QOperator.identity()
        for kind, val in self.letters:
            if kind == "f":
                nxt = QOperator.mul(val)
            elif kind == "T":
                nxt = QOperator.shift(val)
            else:
                nxt = QOperator.dq(val)
            out = compose(out, nxt, floor)
        return out


def normal_form(A, floor=None) -> QOperator:
    """Normal form of a word, a list of words, or an operator."""
    if isinstance(A, QOperator):
        return A if floor is None else compose(A, QOperator.identity(), floor)
    if isinstance(A, QWord):
        return A.operator(floor)
    out = QOperator()
    for w in A:
        out = out + normal_form(w, floor)
    return out


def q_apply(A, f) -> QLaurent:
    if isinstance(A, (QOperator, QWord)):
        return A.apply(f)
    out = QLaurent()
    for w in A:
        out = out + q_apply(w, f)
    return out


def q_commutator(A, B, floor=None) -> QOperator:
    A, B = QOperator.coerce(A), QOperator.coerce(B)
    return compose(A, B, floor) - compose(B, A, floor)


# ---------------------------------------------------------------------------
# Leibniz expansion with a generic coefficient


@dataclass(frozen=True)
class LeibnizTerm:
    """``coeff * T^shift(dq^order u) * dq^power``."""

    coeff: QScalar
    shift: int
    order: int
    power: int

    def signed(self, latex: bool = False, name: str = "u"):
        """(sign, body) pair for joining into a sum."""
        if latex:
            inner = name if not self.order else f"{_pow_text(_DQ_TEX, self.order, True)} {name}"
            if self.shift:
                ufac = f"{_pow_text(_TAU_TEX, self.shift, True)}({inner})"
            else:
                ufac = f"({inner})" if self.order else name
            ops = [ufac]
            if self.power:
                ops.append(_pow_text("\\partial_q", self.power, True))
            sign, pre = _scalar_factor(self.coeff, True)
            body = " ".join(([pre] if pre else []) + ops)
            return sign, body
        inner = name if not self.order else f"{_pow_text('dq', self.order, False)} {name}"
        if self.shift:
            ufac = f"{_pow_text('T', self.shift, False)}({inner})"
        else:
            ufac = f"({inner})" if self.order else name
        ops = [ufac]
        if self.power:
            ops.append(_pow_text("dq", self.power, False))
        sign, pre = _scalar_factor(self.coeff, False)
        return sign, "*".join(([pre] if pre else []) + ops)


@dataclass(frozen=True)
class LeibnizExpansion:
    n: int
    terms: tuple
    floor: object = None

    def render(self, latex: bool = False, name: str = "u") -> str:
        lhs = f"{_pow_text(_DQ_TEX, self.n, True)} {name}" if latex else f"{_pow_text('dq', self.n, False)}*{name}"
        rhs = _join([t.signed(latex, name) for t in self.terms])
        if self.floor is not None:
            tail = f"O(\\partial_q^{{{self.floor - 1}}})" if latex else f"O(dq^{self.floor - 1})"
            rhs += f" + {tail}"
        return f"{lhs} = {rhs}"

    def substitute(self, u) -> QOperator:
        """The expansion with a concrete Laurent polynomial in place of u."""
        u = QLaurent.coerce(u)
        out = {}
        for t in self.terms:
            f = u.dq(t.order).shift(t.shift) * t.coeff
            key = (0, t.power)
            out[key] = out[key] + f if key in out else f
        return QOperator(out, self.floor)


def leibniz_expansion(n: int, depth=None) -> LeibnizExpansion:
    """``dq^n u = sum_k [n, k]_q (T^(n-k) dq^k u) dq^(n-k)``.

    For n < 0 the sum is infinite and ``depth`` (the largest k kept) is
    required.
    """
    if n >= 0:
        ks = range(n + 1)
        floor = None
    else:
        if depth is None:
            raise FloorTooDeep("negative powers of dq need a depth")
        ks = range(depth + 1)
        floor = n - depth
    terms = tuple(LeibnizTerm(q_binomial(n, k), n - k, k, n - k) for k in ks)
    return LeibnizExpansion(n, terms, floor)


# ---------------------------------------------------------------------------
# discrete KP coefficient map


def discrete_kp_matrix(n: int, binomial: str = "q") -> dict:
    """``(i, j) -> C_ij(y)`` with ``a_i = sum_j C_ij b_j``.

    ``C_(i, i+k) = [k+i, k] / (-y (q-1) q^i)^k``, a Laurent polynomial in y
    over Q(q).  ``binomial="ordinary"`` uses integer binomials instead of
    q-binomials.
    """
    if binomial not in ("q", "ordinary"):
        raise ValueError(f"unknown binomial convention {binomial!r}")
    out = {}
    qm1 = QScalar.q(1) - 1
    for i in range(n + 1):
        for k in range(n - i + 1):
            top = q_binomial(k + i, k) if binomial == "q" else QScalar.coerce(comb(k + i, k))
            c = top * QScalar.coerce((-1) ** k) / (qm1**k * QScalar.q(i * k))
            out[(i, i + k)] = QLaurent.x(-k, c)
    return out


def discrete_kp_map(b, n: int, binomial: str = "q"):
    """``a_0 ... a_n`` from ``b_0 ... b_n`` (each a Laurent polynomial in y)."""
    if len(b) < n + 1:
        raise InsufficientCoefficients(f"need b_0 ... b_{n}, got {len(b)} entries")
    b = [QLaurent.coerce(v) for v in b]
    M = discrete_kp_matrix(n, binomial)
    return [sum((M[(i, j)] * b[j] for j in range(i, n + 1)), QLaurent()) for i in range(n + 1)]

