"""Truncated Laurent symbols in the momentum letter p.

A :class:`PhaseSymbol` is ``sum_i c_i p^i`` with differential-polynomial
coefficients.  ``floor`` is the lowest exponent whose coefficient is known;
anything below it is untracked.  ``floor=None`` means the map is complete.

Coefficients are stored as plain phase-space functions: the symbol
``u * p`` is the function u(x) times p.  Star-ordered expressions such as
``u ★ p`` are expanded on construction (``u ★ p = u p - k u_x``).

Two deformed products are provided:

* ``MOYAL``: sum_s k^s/s! sum_j (-1)^j C(s,j) (dx^j dp^(s-j) f)(dx^(s-j) dp^j g)
* ``PSDO_LEFT``: sum_n k^n/n! (dp^n f)(dx^n g)

Both degenerate to the pointwise product at k = 0.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from math import comb, factorial

from .diffalg import DiffPoly, equals_mod_total_derivative
from .errors import FloorTooDeep, FloorTooShallow
from .scalars import as_fraction


class ProductKind(enum.Enum):
    MOYAL = "moyal"
    PSDO_LEFT = "psdo"


MOYAL = ProductKind.MOYAL
PSDO_LEFT = ProductKind.PSDO_LEFT


def falling(i: int, r: int) -> int:
    """i (i-1) ... (i-r+1); valid for negative i."""
    out = 1
    for t in range(r):
        out *= i - t
    return out


def _min_floor(*floors):
    known = [f for f in floors if f is not None]
    return max(known) if known else None


class PhaseSymbol:
    """Immutable truncated Laurent series in p over DiffPoly."""

    __slots__ = ("_c", "floor", "_hash")

    def __init__(self, coeffs=None, floor=None):
        clean = {}
        if coeffs:
            for e, c in dict(coeffs).items():
                c = DiffPoly.coerce(c)
                if c and (floor is None or e >= floor):
                    clean[int(e)] = c
        self._c = clean
        self.floor = floor
        self._hash = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def p(cls, power: int = 1) -> "PhaseSymbol":
        return cls({power: DiffPoly.const(1)})

    @classmethod
    def const(cls, value) -> "PhaseSymbol":
        return cls({0: DiffPoly.coerce(value)})

    @classmethod
    def coerce(cls, value) -> "PhaseSymbol":
        if isinstance(value, PhaseSymbol):
            return value
        return cls.const(value)

    # -- inspection -------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.floor is None

    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def __getitem__(self, e: int) -> DiffPoly:
        if self.floor is not None and e < self.floor:
            raise FloorTooShallow(f"coefficient of p^{e} is below the tracked floor {self.floor}")
        return self._c.get(e, DiffPoly())

    def exponents(self):
        return sorted(self._c, reverse=True)

    def top(self):
        """Highest exponent present, or None for the zero symbol."""
        return max(self._c, default=None)

    def bottom(self):
        return min(self._c, default=None)

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if not isinstance(other, PhaseSymbol):
            try:
                other = PhaseSymbol.coerce(other)
            except TypeError:
                return NotImplemented
        return self._c == other._c and self.floor == other.floor

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self._c.items()), self.floor))
        return self._hash

    def agrees_with(self, other: "PhaseSymbol", floor=None) -> bool:
        """Equal on every exponent at or above ``floor`` (default: both floors)."""
        other = PhaseSymbol.coerce(other)
        if floor is None:
            floor = _min_floor(self.floor, other.floor)
        for f in (self.floor, other.floor):
            if floor is not None and f is not None and floor < f:
                raise FloorTooShallow(f"cannot compare below tracked floor {f}")
        keys = set(self._c) | set(other._c)
        return all(
            self._c.get(e, DiffPoly()) == other._c.get(e, DiffPoly())
            for e in keys
            if floor is None or e >= floor
        )

    # -- linear structure -------------------------------------------------

    def _combine(self, other, sign):
        other = PhaseSymbol.coerce(other)
        floor = _min_floor(self.floor, other.floor)
        out = dict(self._c)
        for e, c in other._c.items():
            out[e] = out.get(e, DiffPoly()) + (c if sign > 0 else -c)
        return PhaseSymbol(out, floor)

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return PhaseSymbol.coerce(other)._combine(self, -1)

    def __neg__(self):
        return PhaseSymbol({e: -c for e, c in self._c.items()}, self.floor)

    def scale(self, factor) -> "PhaseSymbol":
        if isinstance(factor, DiffPoly):
            return PhaseSymbol({e: c * factor for e, c in self._c.items()}, self.floor)
        factor = as_fraction(factor)
        return PhaseSymbol({e: c.scale(factor) for e, c in self._c.items()}, self.floor)

    def __mul__(self, other):
        """Pointwise (commutative) product of phase-space functions."""
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = PhaseSymbol.coerce(other)
        floor = _product_bound(self, other)
        out = {}
        for i, a in self._c.items():
            for k, b in other._c.items():
                e = i + k
                if floor is not None and e < floor:
                    continue
                out[e] = out.get(e, DiffPoly()) + a * b
        return PhaseSymbol(out, floor)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.scale(1 / as_fraction(other))

    # -- maps -------------------------------------------------------------

    def map_coeffs(self, fn) -> "PhaseSymbol":
        return PhaseSymbol({e: fn(c) for e, c in self._c.items()}, self.floor)

    def substitute_kappa(self, value) -> "PhaseSymbol":
        return self.map_coeffs(lambda c: c.substitute_kappa(value))

    def scale_kappa(self, factor) -> "PhaseSymbol":
        return self.map_coeffs(lambda c: c.scale_kappa(factor))

    def diff_x(self, times: int = 1) -> "PhaseSymbol":
        return self.map_coeffs(lambda c: c.diff(times))

    def diff_p(self, times: int = 1) -> "PhaseSymbol":
        floor = None if self.floor is None else self.floor - times
        return PhaseSymbol({e - times: c.scale(falling(e, times)) for e, c in self._c.items()}, floor)

    def truncate(self, floor: int) -> "PhaseSymbol":
        if self.floor is not None and floor < self.floor:
            raise FloorTooDeep(f"cannot truncate to {floor}: only tracked down to {self.floor}")
        return PhaseSymbol(self._c, floor)

    def with_floor(self, floor) -> "PhaseSymbol":
        """Re-label the floor without checks (for exact symbols made finite)."""
        return PhaseSymbol(self._c, floor)

    def __repr__(self):
        from .render import render_symbol

        return f"PhaseSymbol({render_symbol(self)}, floor={self.floor})"

    def __str__(self):
        from .render import render_symbol

        return render_symbol(self)


# ---------------------------------------------------------------------------
# floor bookkeeping


def _effective_top(s: PhaseSymbol):
    """Highest exponent that may be nonzero, counting untracked terms."""
    t = s.top()
    if s.floor is not None:
        t = s.floor - 1 if t is None else max(t, s.floor - 1)
    return t


def _product_bound(f: PhaseSymbol, g: PhaseSymbol):
    """Lowest exponent at which a product of f and g is fully determined.

    Unknown terms of f sit at exponents <= floor_f - 1; a product never
    raises the p-degree, so they reach at most floor_f - 1 + top(g).
    """
    bounds = []
    for a, b in ((f, g), (g, f)):
        if a.floor is not None:
            tb = _effective_top(b)
            if tb is not None:
                bounds.append(a.floor + tb)
    return max(bounds) if bounds else None


def contamination_bound(f: PhaseSymbol, g: PhaseSymbol, bracket: bool = False):
    """Deepest floor a star product (or bracket) of f and g can be trusted to."""
    bound = _product_bound(f, g)
    if bound is not None and bracket:
        # the s = 0 parts of f★g and g★f cancel, unknown ones included
        bound -= 1
    return bound


def _pdeg_limit(i: int):
    return i if i >= 0 else None


def _minopt(*vals):
    known = [v for v in vals if v is not None]
    return min(known) if known else None


class _DerivCache:
    def __init__(self, poly: DiffPoly):
        self.items = [poly]

    def __getitem__(self, j: int) -> DiffPoly:
        while len(self.items) <= j:
            self.items.append(self.items[-1].diff())
        return self.items[j]


def _raw_star(f: PhaseSymbol, g: PhaseSymbol, kind: ProductKind, floor):
    """Star product truncated at ``floor`` (None: must be finite)."""
    out = {}
    fcache = {i: _DerivCache(a) for i, a in f._c.items()}
    gcache = {k: _DerivCache(b) for k, b in g._c.items()}
    fx = {i: a.x_degree() for i, a in f._c.items()}
    gx = {k: b.x_degree() for k, b in g._c.items()}

    def add(e, poly, kpow, factor):
        if not factor or not poly:
            return
        term = poly.times_kappa(kpow).scale(factor) if kpow else poly.scale(factor)
        prev = out.get(e)
        out[e] = term if prev is None else prev + term

    for i, a in f._c.items():
        for k, b in g._c.items():
            if kind is MOYAL:
                jmax = _minopt(fx[i], _pdeg_limit(k))
                rmax = _minopt(_pdeg_limit(i), gx[k])
                smax = None if jmax is None or rmax is None else jmax + rmax
            else:
                jmax = None
                smax = _minopt(_pdeg_limit(i), gx[k])
            if floor is not None:
                smax = _minopt(smax, i + k - floor)
            if smax is None:
                raise FloorTooDeep(
                    "the exact product is an infinite series; request an integer floor"
                )
            for s in range(smax + 1):
                e = i + k - s
                inv = Fraction(1, factorial(s))
                if kind is PSDO_LEFT:
                    c = falling(i, s)
                    if c and (gx[k] is None or s <= gx[k]):
                        add(e, fcache[i][0] * gcache[k][s], s, inv * c)
                    continue
                acc = None
                for j in range(s + 1):
                    r = s - j
                    if jmax is not None and j > jmax:
                        break
                    if rmax is not None and r > rmax:
                        continue
                    c = falling(i, r) * falling(k, j)
                    if not c:
                        continue
                    c *= comb(s, j)
                    if j % 2:
                        c = -c
                    da = fcache[i][j]
                    db = gcache[k][r]
                    if not da or not db:
                        continue
                    piece = (da * db).scale(c)
                    acc = piece if acc is None else acc + piece
                if acc is not None:
                    add(e, acc, s, inv)
    return PhaseSymbol(out, floor)


def _resolve_floor(f, g, floor, bracket=False):
    bound = contamination_bound(f, g, bracket)
    if floor is None:
        return bound
    if bound is not None and floor < bound:
        raise FloorTooDeep(f"requested floor {floor} is below the trustworthy bound {bound}")
    return floor


def star(f, g, kind: ProductKind = MOYAL, floor=None) -> PhaseSymbol:
    """Deformed product of two symbols.

    ``floor=None`` picks the deepest trustworthy floor (or an exact result
    when both operands are exact and the product is a finite sum).
    """
    f = PhaseSymbol.coerce(f)
    g = PhaseSymbol.coerce(g)
    floor = _resolve_floor(f, g, floor)
    return _raw_star(f, g, kind, floor)


def star_power(f, n: int, kind: ProductKind = MOYAL, floor=None) -> PhaseSymbol:
    """n-fold star product ``f ★ ... ★ f``.

    For exact operands with negative powers the series is infinite and a
    floor is required.  Intermediate products are kept just deep enough for
    the requested floor.
    """
    f = PhaseSymbol.coerce(f)
    if n < 0:
        raise ValueError("negative star power")
    if n == 0:
        return PhaseSymbol.const(1)
    top = _effective_top(f)
    if top is None:
        return f
    acc = f
    for step in range(2, n + 1):
        need = None if floor is None else floor - top * (n - step)
        acc = star(f, acc, kind, need)
    if floor is not None and n == 1:
        acc = acc.truncate(floor)
    return acc


def bracket(f, g, kind: ProductKind = MOYAL, floor=None) -> PhaseSymbol:
    """(f★g - g★f)/(2k) for MOYAL, (f∘g - g∘f)/k for PSDO_LEFT."""
    f = PhaseSymbol.coerce(f)
    g = PhaseSymbol.coerce(g)
    floor = _resolve_floor(f, g, floor, bracket=True)
    fg = _raw_star(f, g, kind, floor)
    gf = _raw_star(g, f, kind, floor)
    diff = fg - gf
    half = Fraction(1, 2) if kind is MOYAL else Fraction(1)
    return PhaseSymbol({e: c.div_kappa(1).scale(half) for e, c in diff._c.items()}, floor)


def poisson_bracket(f, g) -> PhaseSymbol:
    """dp f * dx g - dx f * dp g, computed directly."""
    f = PhaseSymbol.coerce(f)
    g = PhaseSymbol.coerce(g)
    floor = contamination_bound(f, g, bracket=True)
    out = f.diff_p().with_floor(None) * g.diff_x().with_floor(None) - f.diff_x().with_floor(
        None
    ) * g.diff_p().with_floor(None)
    if floor is not None:
        out = out.with_floor(floor)
    return out


def commutative_product(f, g) -> PhaseSymbol:
    return PhaseSymbol.coerce(f) * PhaseSymbol.coerce(g)


def project(f: PhaseSymbol, m: int = 0) -> PhaseSymbol:
    """Terms with p-exponent >= m; the result is exact."""
    f = PhaseSymbol.coerce(f)
    if f.floor is not None and f.floor > m:
        raise FloorTooShallow(f"projection onto p^>={m} needs coefficients down to {m}, tracked only to {f.floor}")
    return PhaseSymbol({e: c for e, c in f._c.items() if e >= m})


def residue(f: PhaseSymbol) -> DiffPoly:
    """Coefficient of p^-1."""
    f = PhaseSymbol.coerce(f)
    if f.floor is not None and f.floor > -1:
        raise FloorTooShallow("the p^-1 coefficient is not tracked")
    return f[-1]


def trace_equal(f, g) -> bool:
    """Residues agree modulo total x-derivatives."""
    return equals_mod_total_derivative(residue(f), residue(g))


def star_from_left(coeff, power: int, kind: ProductKind = MOYAL, floor=None) -> PhaseSymbol:
    """``coeff ★ p^power`` as a plain symbol."""
    return star(PhaseSymbol.const(coeff), PhaseSymbol.p(power), kind, floor)
