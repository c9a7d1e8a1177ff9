"""Differential polynomials in jet variables over kappa polynomials.

A jet variable ``(field, order)`` stands for the ``order``-th x-derivative of
the dependent field ``u_field``.  Field ``X_FIELD`` is the independent
coordinate x itself: its derivative is 1, so it never appears with a
nonzero order.

Internally a polynomial is a dict ``(monomial, kappa_power) -> Fraction``
where a monomial is a sorted tuple of ``(field, order, exponent)``.  Folding
the kappa power into the key keeps products flat; :meth:`DiffPoly.coeff`
gives the :class:`KappaScalar` view.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .scalars import KappaScalar, as_fraction

X_FIELD = -1

UNIT = ()


class JetVariable(NamedTuple):
    field: int = 0
    order: int = 0


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    acc = {}
    for f, o, e in a:
        acc[(f, o)] = e
    for f, o, e in b:
        acc[(f, o)] = acc.get((f, o), 0) + e
    return tuple(sorted((f, o, e) for (f, o), e in acc.items()))


def _mono_weight(mono: tuple) -> int:
    w = 0
    for f, o, e in mono:
        w += (-1 if f == X_FIELD else o + 2) * e
    return w


def monomial_sort_key(mono: tuple, kpow: int):
    """Graded lex order: kappa power, then weight, then the variables."""
    return (kpow, _mono_weight(mono), tuple((-f, -o, -e) for f, o, e in reversed(mono)))


class DiffPoly:
    """Immutable differential polynomial."""

    __slots__ = ("_t", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, c in terms.items():
                if c:
                    clean[key] = c if isinstance(c, Fraction) else as_fraction(c)
        self._t = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "DiffPoly":
        out = cls.__new__(cls)
        out._t = terms
        out._hash = None
        return out

    # -- constructors -----------------------------------------------------

    @classmethod
    def const(cls, value) -> "DiffPoly":
        if isinstance(value, KappaScalar):
            return cls({(UNIT, e): c for e, c in value.coeffs.items()})
        return cls({(UNIT, 0): as_fraction(value)})

    @classmethod
    def var(cls, field: int = 0, order: int = 0) -> "DiffPoly":
        if field == X_FIELD:
            if order > 1:
                return cls()
            if order == 1:
                return cls.const(1)
        elif field < 0 or order < 0:
            raise ValueError("jet variables need non-negative field and order")
        return cls({(((field, order, 1),), 0): Fraction(1)})

    @classmethod
    def x(cls) -> "DiffPoly":
        return cls.var(X_FIELD, 0)

    @classmethod
    def kappa(cls, power: int = 1) -> "DiffPoly":
        return cls({(UNIT, power): Fraction(1)})

    @classmethod
    def coerce(cls, value) -> "DiffPoly":
        if isinstance(value, DiffPoly):
            return value
        return cls.const(value)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict:
        """``(monomial, kappa_power) -> Fraction`` copy."""
        return dict(self._t)

    def items(self):
        return self._t.items()

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def __eq__(self, other):
        if not isinstance(other, DiffPoly):
            try:
                other = DiffPoly.coerce(other)
            except TypeError:
                return NotImplemented
        return self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def coeff(self, monomial=UNIT) -> KappaScalar:
        return KappaScalar({k: c for (m, k), c in self._t.items() if m == monomial})

    def monomials(self) -> set:
        return {m for m, _ in self._t}

    def variables(self) -> set:
        return {JetVariable(f, o) for m, _ in self._t for f, o, _ in m}

    def fields(self) -> set:
        return {f for m, _ in self._t for f, _, _ in m if f != X_FIELD}

    def kappa_degree(self) -> int:
        return max((k for _, k in self._t), default=-1)

    def constant_term(self) -> KappaScalar:
        return self.coeff(UNIT)

    def is_constant(self) -> bool:
        return all(not m for m, _ in self._t)

    def x_degree(self):
        """Number of x-derivatives after which this vanishes, or None if never."""
        deg = 0
        for m, _ in self._t:
            for f, _, e in m:
                if f != X_FIELD:
                    return None
                deg = max(deg, e)
        return deg

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        other = DiffPoly.coerce(other)
        if not other._t:
            return self
        out = dict(self._t)
        for key, c in other._t.items():
            v = out.get(key)
            if v is None:
                out[key] = c
            else:
                v += c
                if v:
                    out[key] = v
                else:
                    del out[key]
        return DiffPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._raw({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        return self + (-DiffPoly.coerce(other))

    def __rsub__(self, other):
        return DiffPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = DiffPoly.coerce(other)
        out = {}
        for (m1, k1), c1 in self._t.items():
            for (m2, k2), c2 in other._t.items():
                key = (_mono_mul(m1, m2), k1 + k2)
                v = out.get(key)
                out[key] = c1 * c2 if v is None else v + c1 * c2
        return DiffPoly._raw({k: c for k, c in out.items() if c})

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        return self.scale(1 / as_fraction(other))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a differential polynomial")
        result = DiffPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, factor) -> "DiffPoly":
        factor = as_fraction(factor)
        if not factor:
            return DiffPoly()
        if factor == 1:
            return self
        return DiffPoly._raw({k: c * factor for k, c in self._t.items()})

    def times_kappa(self, power: int = 1) -> "DiffPoly":
        return DiffPoly._raw({(m, k + power): c for (m, k), c in self._t.items()})

    def div_kappa(self, power: int = 1) -> "DiffPoly":
        """Exact division by kappa**power.

        Raises InexactKappaDivision if some term has too few kappas.
        """
        from .errors import InexactKappaDivision

        out = {}
        for (m, k), c in self._t.items():
            if k < power:
                raise InexactKappaDivision(f"term with kappa^{k} is not divisible by kappa^{power}")
            out[(m, k - power)] = c
        return DiffPoly._raw(out)

    # -- kappa specializations --------------------------------------------

    def substitute_kappa(self, value) -> "DiffPoly":
        value = as_fraction(value)
        out = {}
        for (m, k), c in self._t.items():
            key = (m, 0)
            out[key] = out.get(key, 0) + c * value**k
        return DiffPoly(out)

    def scale_kappa(self, factor) -> "DiffPoly":
        """kappa -> factor * kappa."""
        factor = as_fraction(factor)
        return DiffPoly({(m, k): c * factor**k for (m, k), c in self._t.items()})

    # -- calculus ---------------------------------------------------------

    def diff(self, times: int = 1) -> "DiffPoly":
        """Total x-derivative, applied ``times`` times."""
        out = self
        for _ in range(times):
            out = out._diff_once()
        return out

    def _diff_once(self) -> "DiffPoly":
        out = {}
        for (m, k), c in self._t.items():
            for idx, (f, o, e) in enumerate(m):
                rest = m[:idx] + ((f, o, e - 1),) + m[idx + 1 :] if e > 1 else m[:idx] + m[idx + 1 :]
                if f == X_FIELD:
                    new = rest
                else:
                    new = _mono_mul(rest, ((f, o + 1, 1),))
                key = (new, k)
                v = out.get(key)
                out[key] = c * e if v is None else v + c * e
        return DiffPoly._raw({k: c for k, c in out.items() if c})

    def partial(self, variable) -> "DiffPoly":
        """Formal partial derivative with respect to one jet variable."""
        f0, o0 = variable
        out = {}
        for (m, k), c in self._t.items():
            for idx, (f, o, e) in enumerate(m):
                if f == f0 and o == o0:
                    rest = m[:idx] + ((f, o, e - 1),) + m[idx + 1 :] if e > 1 else m[:idx] + m[idx + 1 :]
                    key = (rest, k)
                    out[key] = out.get(key, 0) + c * e
        return DiffPoly(out)

    def max_order(self, field: int) -> int:
        return max((o for m, _ in self._t for f, o, _ in m if f == field), default=-1)

    def substitute(self, mapping: dict) -> "DiffPoly":
        """Replace base fields by differential polynomials.

        ``mapping`` sends a field index to a DiffPoly; the jet ``(f, j)`` is
        replaced by the j-th total derivative of ``mapping[f]``.  Fields not
        in the mapping are left alone.
        """
        cache = {}

        def image(f, o):
            if (f, o) not in cache:
                if f in mapping:
                    cache[(f, o)] = DiffPoly.coerce(mapping[f]).diff(o)
                else:
                    cache[(f, o)] = DiffPoly.var(f, o)
            return cache[(f, o)]

        total = DiffPoly()
        for (m, k), c in self._t.items():
            term = DiffPoly({(UNIT, k): c})
            for f, o, e in m:
                term = term * image(f, o) ** e
            total = total + term
        return total

    def evolve(self, rhs: dict) -> "DiffPoly":
        """Time derivative of ``self`` when ``u_f,t = rhs[f]``.

        This is the evolutionary derivation sum_j d/du_f^(j) * D^j(rhs[f]).
        """
        total = DiffPoly()
        derivs = {}
        for var in self.variables():
            f, o = var
            if f == X_FIELD or f not in rhs:
                continue
            if (f, o) not in derivs:
                derivs[(f, o)] = DiffPoly.coerce(rhs[f]).diff(o)
            total = total + self.partial(var) * derivs[(f, o)]
        return total

    def weight(self, kappa_weight: int = 0, field_weights=None):
        """Set of term weights; jet (f, j) weighs j + field_weights.get(f, 2)."""
        field_weights = field_weights or {}
        weights = set()
        for (m, k), _ in self._t.items():
            w = k * kappa_weight
            for f, o, e in m:
                base = -1 if f == X_FIELD else field_weights.get(f, 2)
                w += (o + base) * e
            weights.add(w)
        return weights

    def derivative_balance(self):
        """Set of (number of x-derivatives - kappa power) over the terms.

        Every star-product step pairs one kappa with one x-derivative, so
        quantities built from Lax symbols have a single balance value.
        """
        return {sum(o * e for f, o, e in m if f != X_FIELD) - k for (m, k), _ in self._t.items()}

    def sorted_terms(self):
        return sorted(self._t.items(), key=lambda kv: monomial_sort_key(kv[0][0], kv[0][1]))

    def __repr__(self):
        from .render import render_diffpoly

        return f"DiffPoly({render_diffpoly(self)})"

    def __str__(self):
        from .render import render_diffpoly

        return render_diffpoly(self)


def u(order: int = 0, field: int = 0) -> DiffPoly:
    """Shorthand for the jet ``u_field^(order)``."""
    return DiffPoly.var(field, order)


def total_x_derivative(f: DiffPoly) -> DiffPoly:
    return DiffPoly.coerce(f).diff()


def variational_derivative(f: DiffPoly, v=JetVariable(0, 0)) -> DiffPoly:
    """sum_i (-1)^i D^i (df/du^(i)) for the base field of ``v``."""
    field, order = v
    if order != 0:
        raise ValueError("variational derivative is taken with respect to a base field")
    f = DiffPoly.coerce(f)
    total = DiffPoly()
    for i in range(f.max_order(field) + 1):
        part = f.partial((field, i))
        if part:
            term = part.diff(i)
            total = total + (term if i % 2 == 0 else -term)
    return total


def equals_mod_total_derivative(f: DiffPoly, g: DiffPoly) -> bool:
    """True iff f - g is the total x-derivative of a differential polynomial.

    Constants are never total derivatives.  Explicit x-dependence is not
    supported here.
    """
    h = DiffPoly.coerce(f) - DiffPoly.coerce(g)
    if not h:
        return True
    if any(f_ == X_FIELD for (m, _), _c in h.items() for f_, _, _ in m):
        raise ValueError("trace equivalence is only decided for x-free densities")
    if h.constant_term():
        return False
    return all(not variational_derivative(h, JetVariable(fld, 0)) for fld in h.fields())
