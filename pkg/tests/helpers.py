"""Random engine values for property tests and seeded acceptance loops.

Every generator takes a ``random.Random`` so that hypothesis (which draws
the seed) and plain seeded loops share one code path.
"""

import random
from fractions import Fraction

import sympy
from hypothesis import strategies as st

from starlax.diffalg import DiffPoly
from starlax.qcalc import QLaurent, QOperator, QWord
from starlax.scalars import KappaScalar, QScalar
from starlax.symbols import PhaseSymbol


def rand_fraction(rng, span=5, den=4, nonzero=False):
    while True:
        value = Fraction(rng.randint(-span, span), rng.randint(1, den))
        if value or not nonzero:
            return value


def rand_kappa_scalar(rng, degree=3):
    return KappaScalar({e: rand_fraction(rng) for e in range(rng.randint(0, degree) + 1)})


def rand_qpoly_scalar(rng, degree=2):
    out = QScalar.coerce(0)
    for e in range(degree + 1):
        out = out + QScalar.q(e) * rand_fraction(rng)
    return out


def rand_qscalar(rng):
    num = rand_qpoly_scalar(rng)
    den = rand_qpoly_scalar(rng, 1)
    while not den:
        den = rand_qpoly_scalar(rng, 1)
    return num / den


def rand_diffpoly(rng, fields=(0,), terms=3, max_order=2, max_kappa=2, degree=2):
    out = DiffPoly()
    for _ in range(rng.randint(0, terms)):
        mono = DiffPoly.const(rand_fraction(rng, nonzero=True))
        for _ in range(rng.randint(0, degree)):
            mono = mono * DiffPoly.var(rng.choice(fields), rng.randint(0, max_order))
        out = out + mono.times_kappa(rng.randint(0, max_kappa))
    return out


def rand_symbol(rng, top=3, bottom=0, floor=None, fields=(0,), terms=3):
    """Symbol with exponents in [bottom, top]; ``floor`` marks truncation."""
    coeffs = {}
    for e in range(bottom, top + 1):
        if rng.random() < 0.6:
            coeffs[e] = rand_diffpoly(rng, fields, terms)
    return PhaseSymbol(coeffs, floor)


def rand_laurent_symbol(rng, top=2, depth=3):
    """Truncated Laurent symbol ``... + c p^-depth`` with floor ``-depth``."""
    return rand_symbol(rng, top, -depth, -depth)


def rand_qlaurent(rng, low=-2, high=3, terms=3):
    out = QLaurent()
    for _ in range(rng.randint(1, terms)):
        out = out + QLaurent.x(rng.randint(low, high), rand_qpoly_scalar(rng, 1))
    return out


def rand_qoperator(rng, max_shift=2, max_dq=3, terms=3):
    """Normal-form q-operator with non-negative dq powers."""
    out = QOperator()
    for _ in range(rng.randint(1, terms)):
        f = rand_qlaurent(rng, 0, 3, 2)
        word = QOperator.mul(f) * QOperator.shift(rng.randint(0, max_shift)) * QOperator.dq(rng.randint(0, max_dq))
        out = out + word
    return out


def rand_qword(rng, length=4, max_dq=3):
    """Word in multipliers, shifts and q-derivatives of total dq-degree <= max_dq."""
    letters, budget = [], max_dq
    for _ in range(rng.randint(1, length)):
        kind = rng.choice(["f", "T", "dq"])
        if kind == "f":
            letters.append(("f", rand_qlaurent(rng, 0, 3, 2)))
        elif kind == "T":
            letters.append(("T", rng.randint(-1, 2)))
        else:
            b = rng.randint(0, min(2, budget))
            budget -= b
            letters.append(("dq", b))
    return QWord(tuple(letters))


# seeded generators; hypothesis varies (and shrinks) the seed
randoms = st.integers(min_value=0, max_value=2**32 - 1).map(random.Random)


def fay_oracle(values, order):
    """Coefficients of the logarithm at numeric F_1n, expanded by sympy."""
    x, y, s = sympy.symbols("x y s")
    inner = 0
    for n in range(1, order):
        quotient = sympy.cancel(-x * y * (x**n - y**n) / (x - y))
        inner += quotient * sympy.Rational(values[n].numerator, values[n].denominator) / n
    expr = sympy.log(1 - inner).subs({x: s * x, y: s * y})
    ser = sympy.expand(sympy.series(expr, s, 0, order + 1).removeO().subs(s, 1))
    poly = sympy.Poly(ser, x, y)
    return {(m, n): Fraction(str(c)) for (m, n), c in poly.terms()}
