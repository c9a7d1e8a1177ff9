"""Exact coefficient scalars.

Rationals are :class:`fractions.Fraction`.  On top of them sit two small
exact rings: polynomials in the deformation parameter ``k`` (kappa) and
rational functions in ``q``.  Nothing here ever touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

Rational = Fraction


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rational(value: Fraction) -> str:
    """``a/b`` with the ``/1`` omitted."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def latex_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    return f"{sign}\\frac{{{abs(value.numerator)}}}{{{value.denominator}}}"


def _power_label(base: str, exp: int) -> str:
    return base if exp == 1 else f"{base}^{exp}"


# ---------------------------------------------------------------------------
# polynomials in kappa


class KappaScalar:
    """Polynomial in kappa with rational coefficients.

    Stored as a map exponent -> nonzero Fraction.  Immutable.
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs=None):
        clean = {}
        if coeffs:
            for e, c in dict(coeffs).items():
                if e < 0:
                    raise ValueError("negative kappa exponent")
                c = as_fraction(c)
                if c:
                    clean[int(e)] = c
        self._c = clean
        self._hash = None

    @classmethod
    def kappa(cls, power: int = 1) -> "KappaScalar":
        return cls({power: 1})

    @classmethod
    def coerce(cls, value) -> "KappaScalar":
        if isinstance(value, KappaScalar):
            return value
        return cls({0: as_fraction(value)})

    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def degree(self) -> int:
        return max(self._c, default=-1)

    def __getitem__(self, e: int) -> Fraction:
        return self._c.get(e, Fraction(0))

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if not isinstance(other, KappaScalar):
            try:
                other = KappaScalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def __add__(self, other):
        other = KappaScalar.coerce(other)
        out = dict(self._c)
        for e, c in other._c.items():
            out[e] = out.get(e, 0) + c
        return KappaScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return KappaScalar({e: -c for e, c in self._c.items()})

    def __sub__(self, other):
        return self + (-KappaScalar.coerce(other))

    def __rsub__(self, other):
        return KappaScalar.coerce(other) - self

    def __mul__(self, other):
        other = KappaScalar.coerce(other)
        out = {}
        for e1, c1 in self._c.items():
            for e2, c2 in other._c.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return KappaScalar(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a kappa polynomial")
        result = KappaScalar({0: 1})
        for _ in range(n):
            result = result * self
        return result

    def substitute(self, value) -> Fraction:
        value = as_fraction(value)
        return sum((c * value**e for e, c in self._c.items()), Fraction(0))

    def __repr__(self):
        return f"KappaScalar({self})"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for e in sorted(self._c):
            c = self._c[e]
            if e == 0:
                body = format_rational(abs(c))
            elif abs(c) == 1:
                body = _power_label("k", e)
            else:
                body = f"{format_rational(abs(c))}*{_power_label('k', e)}"
            parts.append(("-" if c < 0 else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def substitute_kappa(s, value) -> Fraction:
    """Evaluate a kappa polynomial at an exact rational."""
    return KappaScalar.coerce(s).substitute(value)


# ---------------------------------------------------------------------------
# univariate polynomials and rational functions in q


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return tuple(coeffs)


class QPoly:
    """Dense polynomial in q over the rationals, low degree first."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        self.c = _trim(as_fraction(x) for x in coeffs)

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "QPoly":
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        return isinstance(other, QPoly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def lead(self) -> Fraction:
        return self.c[-1]

    def __add__(self, other):
        n = max(len(self.c), len(other.c))
        a = self.c + (Fraction(0),) * (n - len(self.c))
        b = other.c + (Fraction(0),) * (n - len(other.c))
        return QPoly(x + y for x, y in zip(a, b))

    def __neg__(self):
        return QPoly(-x for x in self.c)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not self.c or not other.c:
            return QPoly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    out[i + j] += x * y
        return QPoly(out)

    def scale(self, factor) -> "QPoly":
        factor = as_fraction(factor)
        return QPoly(x * factor for x in self.c)

    def divmod(self, other):
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        quot = [Fraction(0)] * max(len(rem) - len(other.c) + 1, 0)
        lead = other.lead()
        while len(rem) >= len(other.c) and rem:
            shift = len(rem) - len(other.c)
            factor = rem[-1] / lead
            quot[shift] = factor
            for j, y in enumerate(other.c):
                rem[shift + j] -= factor * y
            rem = list(_trim(rem))
        return QPoly(quot), QPoly(rem)

    def monic(self) -> "QPoly":
        return self.scale(1 / self.lead()) if self.c else self

    def __call__(self, value):
        value = as_fraction(value)
        acc = Fraction(0)
        for x in reversed(self.c):
            acc = acc * value + x
        return acc

    def __repr__(self):
        return f"QPoly({self.render()})"

    def render(self, var: str = "q") -> str:
        if not self.c:
            return "0"
        parts = []
        for e, c in enumerate(self.c):
            if not c:
                continue
            if e == 0:
                body = format_rational(abs(c))
            elif abs(c) == 1:
                body = _power_label(var, e)
            else:
                body = f"{format_rational(abs(c))}*{_power_label(var, e)}"
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def latex(self, var: str = "q") -> str:
        if not self.c:
            return "0"
        parts = []
        for e, c in enumerate(self.c):
            if not c:
                continue
            mag = abs(c)
            if e == 0:
                body = latex_rational(mag)
            else:
                pw = var if e == 1 else f"{var}^{{{e}}}" if e > 9 else f"{var}^{e}"
                body = pw if mag == 1 else f"{latex_rational(mag)} {pw}"
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def poly_gcd(a: QPoly, b: QPoly) -> QPoly:
    while b:
        a, b = b, a.divmod(b)[1]
    return a.monic() if a else QPoly([1])


class QScalar:
    """Rational function in q, reduced with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num=None, den=None):
        num = _as_qpoly(0 if num is None else num)
        den = _as_qpoly(1 if den is None else den)
        if not den:
            raise ZeroDivisionError("QScalar with zero denominator")
        if not num:
            self.num, self.den = QPoly(), QPoly([1])
            return
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num.divmod(g)[0]
            den = den.divmod(g)[0]
        lead = den.lead()
        self.num = num.scale(1 / lead)
        self.den = den.scale(1 / lead)

    @classmethod
    def q(cls, power: int = 1) -> "QScalar":
        if power >= 0:
            return cls(QPoly.monomial(power))
        return cls(QPoly([1]), QPoly.monomial(-power))

    @classmethod
    def coerce(cls, value) -> "QScalar":
        if isinstance(value, QScalar):
            return value
        if isinstance(value, QPoly):
            return cls(value)
        return cls(QPoly([as_fraction(value)]))

    def is_constant(self) -> bool:
        return self.den.degree == 0 and self.num.degree <= 0

    def constant(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.c[0] if self.num else Fraction(0)

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if not isinstance(other, QScalar):
            try:
                other = QScalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = QScalar.coerce(other)
        if self.den == other.den:
            return QScalar(self.num + other.num, self.den)
        return QScalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        out = QScalar.__new__(QScalar)
        out.num, out.den = -self.num, self.den
        return out

    def __sub__(self, other):
        return self + (-QScalar.coerce(other))

    def __rsub__(self, other):
        return QScalar.coerce(other) - self

    def __mul__(self, other):
        other = QScalar.coerce(other)
        return QScalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QScalar.coerce(other)
        if not other:
            raise ZeroDivisionError("division by zero QScalar")
        return QScalar(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return QScalar.coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return QScalar(1) / (self ** (-n))
        result = QScalar(1)
        for _ in range(n):
            result = result * self
        return result

    def at(self, value) -> Fraction:
        """Exact specialization q -> value."""
        d = self.den(value)
        if d == 0:
            raise ZeroDivisionError(f"QScalar has a pole at q={value}")
        return self.num(value) / d

    def __repr__(self):
        return f"QScalar({self})"

    def __str__(self):
        if self.den.degree == 0:
            text = self.num.render()
            return text
        return f"({self.num.render()})/({self.den.render()})"

    def latex(self) -> str:
        if self.den.degree == 0:
            return self.num.latex()
        return f"\\frac{{{self.num.latex()}}}{{{self.den.latex()}}}"


def _as_qpoly(value) -> QPoly:
    if isinstance(value, QPoly):
        return value
    return QPoly([as_fraction(value)])


def q_number(n: int) -> QScalar:
    """(q^n - 1)/(q - 1); the polynomial 1 + q + ... + q^(n-1) for n >= 0."""
    if n >= 0:
        return QScalar(QPoly([1] * n))
    # (q^-m - 1)/(q - 1) = -(1 + ... + q^(m-1)) / q^m
    m = -n
    return QScalar(-QPoly([1] * m), QPoly.monomial(m))


def q_binomial(m: int, k: int) -> QScalar:
    """Falling-factorial q-binomial; the upper index may be negative."""
    if k < 0:
        raise ValueError("lower index of a q-binomial must be non-negative")
    num = QScalar(1)
    den = QScalar(1)
    for i in range(k):
        num = num * q_number(m - i)
        den = den * q_number(i + 1)
    return num / den
