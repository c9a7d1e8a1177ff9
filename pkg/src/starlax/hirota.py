"""Schur polynomials, Hirota derivatives on exponential sums, and the
relations among second derivatives of the dispersionless free energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InconsistentExpansion
from .render import JSON_SCHEMA
from .scalars import as_fraction, format_rational, latex_rational


class MultiPoly:
    """Polynomial over Q in commuting letters drawn from any sortable key set.

    A monomial is a sorted tuple of ``(letter, exponent)`` pairs.  Letters
    are plain ints for the hierarchy times ``t_n`` and the Hirota letters
    ``D_n``, and ``(a, b)`` pairs for the unknowns ``F_ab``.
    """

    __slots__ = ("_t",)

    def __init__(self, terms=None):
        self._t = {}
        if terms:
            for mono, c in terms.items():
                c = as_fraction(c)
                if c:
                    self._t[mono] = self._t.get(mono, 0) + c
            self._t = {m: c for m, c in self._t.items() if c}

    @classmethod
    def const(cls, c) -> "MultiPoly":
        return cls({(): c})

    @classmethod
    def var(cls, letter, power: int = 1) -> "MultiPoly":
        return cls({((letter, power),): 1}) if power else cls.const(1)

    @classmethod
    def coerce(cls, value) -> "MultiPoly":
        return value if isinstance(value, MultiPoly) else cls.const(value)

    @property
    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return sorted(self._t.items())

    def letters(self):
        return sorted({v for mono in self._t for v, _ in mono})

    def coeff(self, mono) -> Fraction:
        return self._t.get(tuple(mono), Fraction(0))

    def constant_term(self) -> Fraction:
        return self._t.get((), Fraction(0))

    def __bool__(self):
        return bool(self._t)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                other = MultiPoly.coerce(as_fraction(other))
            except TypeError:
                return NotImplemented
        return self._t == other._t

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def __add__(self, other):
        other = MultiPoly.coerce(other)
        out = dict(self._t)
        for m, c in other._t.items():
            out[m] = out.get(m, 0) + c
        return MultiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        return self + (-MultiPoly.coerce(other))

    def __rsub__(self, other):
        return MultiPoly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            other = as_fraction(other)
            return MultiPoly({m: c * other for m, c in self._t.items()})
        out = {}
        for m1, c1 in self._t.items():
            for m2, c2 in other._t.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return MultiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = MultiPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def substitute(self, mapping) -> "MultiPoly":
        """Replace letters by polynomials or numbers; unmapped letters stay."""
        out = MultiPoly()
        for mono, c in self._t.items():
            term = MultiPoly.const(c)
            for v, e in mono:
                if v in mapping:
                    term = term * MultiPoly.coerce(mapping[v]) ** e
                else:
                    term = term * MultiPoly.var(v, e)
            out = out + term
        return out

    def evaluate(self, values) -> Fraction:
        total = Fraction(0)
        for mono, c in self._t.items():
            for v, e in mono:
                c = c * as_fraction(values[v]) ** e
            total += c
        return total

    def render(self, letter_name, latex: bool = False) -> str:
        """Render with ``letter_name(letter) -> str`` naming each letter."""
        if not self._t:
            return "0"
        parts = []
        for mono, c in sorted(self._t.items(), key=lambda mc: (_degree(mc[0]), mc[0])):
            factors = []
            for v, e in mono:
                name = letter_name(v)
                if e != 1:
                    name = f"{name}^{e}" if not latex or e < 10 else f"{name}^{{{e}}}"
                factors.append(name)
            mag = abs(c)
            if factors and mag == 1:
                body = (" " if latex else "*").join(factors)
            else:
                num = latex_rational(mag) if latex else format_rational(mag)
                body = (" " if latex else "*").join([num] + factors)
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"MultiPoly({self.render(str)})"


def _degree(mono) -> int:
    return sum(e for _, e in mono)


def _mono_mul(m1, m2):
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in d.items() if e))


# ---------------------------------------------------------------------------
# Schur polynomials


def schur_polys(N: int):
    """``p_0 ... p_N`` with ``exp(sum t_n z^n) = sum p_j z^j``.

    Uses ``j p_j = sum_{n=1}^{j} n t_n p_{j-n}``, the coefficient form of
    ``d/dz exp(T) = T' exp(T)``.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    ps = [MultiPoly.const(1)]
    for j in range(1, N + 1):
        acc = MultiPoly()
        for n in range(1, j + 1):
            acc = acc + MultiPoly.var(n) * ps[j - n] * n
        ps.append(acc * Fraction(1, j))
    return ps


def time_name(n: int) -> str:
    return f"t{n}"


def hirota_name(n: int) -> str:
    return f"D{n}"


def D(n: int, power: int = 1) -> MultiPoly:
    """The Hirota letter ``D_n`` as a polynomial."""
    return MultiPoly.var(n, power)


# ---------------------------------------------------------------------------
# exponential sums


def _wave(vec) -> tuple:
    return tuple(sorted((int(j), as_fraction(k)) for j, k in dict(vec).items() if as_fraction(k)))


class ExpSum:
    """Finite sum ``sum c exp(sum_j k_j t_j)`` with rational c and k_j."""

    __slots__ = ("_t",)

    def __init__(self, terms=None):
        out = {}
        for wave, c in (terms or {}).items():
            wave = _wave(wave)
            out[wave] = out.get(wave, 0) + as_fraction(c)
        self._t = {w: c for w, c in out.items() if c}

    @classmethod
    def const(cls, c=1) -> "ExpSum":
        return cls({(): c})

    @classmethod
    def exp(cls, wave, c=1) -> "ExpSum":
        return cls({_wave(wave): c})

    @property
    def terms(self) -> dict:
        return dict(self._t)

    def __bool__(self):
        return bool(self._t)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self._t
        if not isinstance(other, ExpSum):
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def __add__(self, other):
        out = dict(self._t)
        for w, c in other._t.items():
            out[w] = out.get(w, 0) + c
        return ExpSum(out)

    def __neg__(self):
        return ExpSum({w: -c for w, c in self._t.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ExpSum":
        c = as_fraction(c)
        return ExpSum({w: v * c for w, v in self._t.items()})

    def __mul__(self, other):
        if not isinstance(other, ExpSum):
            return self.scale(other)
        out = {}
        for w1, c1 in self._t.items():
            for w2, c2 in other._t.items():
                w = _wave(_add_waves(w1, w2))
                out[w] = out.get(w, 0) + c1 * c2
        return ExpSum(out)

    __rmul__ = __mul__

    def render(self, latex: bool = False) -> str:
        if not self._t:
            return "0"
        parts = []
        for w, c in sorted(self._t.items()):
            mag = abs(c)
            if not w:
                body = latex_rational(mag) if latex else format_rational(mag)
            else:
                lin = _render_linear(w, latex)
                e = f"e^{{{lin}}}" if latex else f"exp({lin})"
                if mag == 1:
                    body = e
                else:
                    num = latex_rational(mag) if latex else format_rational(mag)
                    body = f"{num} {e}" if latex else f"{num}*{e}"
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> dict:
        return {
            "schema": JSON_SCHEMA,
            "type": "expsum",
            "terms": [
                {"coeff": format_rational(c), "wave": {str(j): format_rational(k) for j, k in w}}
                for w, c in sorted(self._t.items())
            ],
        }

    def __repr__(self):
        return f"ExpSum({self.render()})"


def _add_waves(w1, w2):
    d = dict(w1)
    for j, k in w2:
        d[j] = d.get(j, 0) + k
    return d


def _render_linear(w, latex):
    parts = []
    for j, k in w:
        mag = abs(k)
        var = f"t_{{{j}}}" if latex else f"t{j}"
        if mag == 1:
            body = var
        else:
            num = latex_rational(mag) if latex else format_rational(mag)
            body = f"{num} {var}" if latex else f"{num}*{var}"
        parts.append(("-" if k < 0 else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def soliton_wave(a, b, N: int = 10) -> dict:
    """Wave vector ``k_j = a^j - b^j`` for j = 1..N (one KP soliton)."""
    a, b = as_fraction(a), as_fraction(b)
    return {j: a**j - b**j for j in range(1, N + 1)}


def soliton_tau(a, b, c=1, N: int = 10) -> ExpSum:
    """``1 + c exp(sum_j (a^j - b^j) t_j)`` with times up to t_N."""
    return ExpSum.const(1) + ExpSum.exp(soliton_wave(a, b, N), c)


# ---------------------------------------------------------------------------
# Hirota calculus


def hirota_apply(P, a: ExpSum, b: ExpSum) -> ExpSum:
    """Bilinear action of a polynomial in the letters ``D_j`` on ``(a, b)``.

    On pure exponentials ``prod D_j^m e^{k.t} . e^{l.t} =
    prod (k_j - l_j)^m e^{(k+l).t}``.
    """
    P = MultiPoly.coerce(P)
    out = {}
    for wa, ca in a.terms.items():
        da = dict(wa)
        for wb, cb in b.terms.items():
            db = dict(wb)
            diff = {j: da.get(j, 0) - db.get(j, 0) for j in P.letters()}
            val = P.evaluate(diff)
            if val:
                w = _wave(_add_waves(wa, wb))
                out[w] = out.get(w, 0) + ca * cb * val
    return ExpSum(out)


def kp_bilinear_operator(n: int) -> MultiPoly:
    """``D_1 D_n - 2 p_{n+1}(D_1, D_2/2, D_3/3, ...)``."""
    if n < 2:
        raise ValueError("the bilinear KP equations start at n = 2")
    p = schur_polys(n + 1)[n + 1]
    scaled = p.substitute({j: D(j) * Fraction(1, j) for j in range(1, n + 2)})
    return D(1) * D(n) - scaled * 2


def kp_bilinear_residual(n: int, tau: ExpSum) -> ExpSum:
    """Left side of the n-th bilinear KP equation evaluated on ``tau . tau``.

    The wave vectors of ``tau`` must carry every time up to ``t_{n+1}``;
    missing entries are read as zero.
    """
    return hirota_apply(kp_bilinear_operator(n), tau, tau)


# ---------------------------------------------------------------------------
# dispersionless differential Fay identity


def F(a: int, b: int) -> MultiPoly:
    """The unknown ``F_ab`` with the symmetric identification ``F_ab = F_ba``."""
    return MultiPoly.var((min(a, b), max(a, b)))


def f_name(letter) -> str:
    a, b = letter
    return f"F_{{{a},{b}}}"


def p_name(letter) -> str:
    return f"P_{{{letter[1]}}}"


def f_text(letter) -> str:
    a, b = letter
    return f"F{a}{b}" if b < 10 else f"F{a}_{b}"


def p_text(letter) -> str:
    return f"P{letter[1]}"


def _series_mul(A, B, order):
    out = {}
    for (i1, j1), c1 in A.items():
        for (i2, j2), c2 in B.items():
            if i1 + i2 + j1 + j2 <= order:
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, MultiPoly()) + c1 * c2
    return {k: v for k, v in out.items() if v}


def fay_log_series(order: int) -> dict:
    """Coefficients ``(m, n) -> [x^m y^n] log(1 - X)`` up to total degree ``order``.

    ``x = 1/mu``, ``y = 1/lambda`` and
    ``X = -sum_n F_1n/n sum_{a+b=n-1} x^(a+1) y^(b+1)``, which is the
    difference quotient ``(mu^-n - lambda^-n)/(mu - lambda)`` rewritten in
    x and y.
    """
    X = {}
    for n in range(1, order - 1 + 1):
        for a in range(n):
            b = n - 1 - a
            if a + 1 + b + 1 <= order:
                key = (a + 1, b + 1)
                X[key] = X.get(key, MultiPoly()) - F(1, n) * Fraction(1, n)
    # log(1 - X) = -sum_r X^r / r; X has total degree >= 2
    out = {}
    power = dict(X)
    r = 1
    while power:
        for key, c in power.items():
            out[key] = out.get(key, MultiPoly()) - c * Fraction(1, r)
        r += 1
        power = _series_mul(power, X, order)
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class FRelation:
    """``F_mn = rhs`` with rhs a polynomial in the unknowns ``F_1k``."""

    m: int
    n: int
    rhs: MultiPoly

    def reparametrized(self) -> "FRelation":
        """Rewrite in the unknowns ``P_(j+1) = F_1j / j`` (letters ``("P", j+1)``)."""
        mapping = {(1, j): MultiPoly.var(("P", j + 1)) * j for (_, j) in self.rhs.letters()}
        return FRelation(self.m, self.n, self.rhs.substitute(mapping))

    def render(self, latex: bool = False, reparam: bool = False) -> str:
        rel = self.reparametrized() if reparam else self
        if reparam:
            namer = p_name if latex else p_text
        else:
            namer = f_name
        return f"F_{{{self.m},{self.n}}} = {rel.rhs.render(namer, latex)}"

    def to_json(self, reparam: bool = False) -> dict:
        rel = self.reparametrized() if reparam else self
        key = "P" if reparam else "F"
        rhs = []
        for mono, c in rel.rhs.items():
            letters = []
            for v, e in mono:
                letters.extend([v[1] if reparam else list(v)] * e)
            rhs.append([format_rational(c), {key: letters}])
        return {"m": self.m, "n": self.n, "rhs": rhs}


@dataclass(frozen=True)
class RelationSet:
    order: int
    relations: tuple
    tautologies: tuple = field(default=())

    def get(self, m: int, n: int) -> FRelation:
        for r in self.relations:
            if (r.m, r.n) == (m, n):
                return r
        raise KeyError((m, n))

    def solution(self) -> dict:
        """``{(m, n): rhs}`` for every generated relation, both index orders."""
        return {(r.m, r.n): r.rhs for r in self.relations}

    def __len__(self):
        return len(self.relations)

    def __iter__(self):
        return iter(self.relations)

    def render(self, latex: bool = False, reparam: bool = False) -> str:
        return "\n".join(r.render(latex, reparam) for r in self.relations)

    def to_json(self, reparam: bool = False) -> dict:
        return {
            "schema": JSON_SCHEMA,
            "order": self.order,
            "relations": [r.to_json(reparam) for r in self.relations],
        }


def dfay_relations(order: int) -> RelationSet:
    """Match ``sum x^m y^n F_mn/(mn)`` against ``log(1 - X)`` up to ``order``.

    Rows with m = 1 or n = 1 must reproduce ``F_1n`` itself; the others
    give ``F_mn`` as a polynomial in the ``F_1k``.  Both (m, n) and (n, m)
    are generated independently.
    """
    series = fay_log_series(order)
    relations = []
    tautologies = []
    for total in range(2, order + 1):
        for m in range(1, total):
            n = total - m
            value = series.get((m, n), MultiPoly()) * (m * n)
            if m == 1 or n == 1:
                if value != F(m, n):
                    raise InconsistentExpansion(f"row ({m},{n}) gives {value!r} instead of F_{m}{n}")
                tautologies.append((m, n))
            else:
                relations.append(FRelation(m, n, value))
    return RelationSet(order, tuple(relations), tuple(tautologies))


def dhirota_check(order: int) -> list:
    """Compare ``F_ij = p_(j+1)(0, Z_2, ..., Z_(j+1))``, ``Z_k = sum_{m+n=k} F_mn/(mn)``.

    Each entry is a dict with the pair, a status and the residual:
    ``tautology`` when the two sides agree before using any relation,
    ``identity`` when they agree after substituting the relations from
    :func:`dfay_relations`, ``residual`` otherwise.
    """
    rels = dfay_relations(order).solution()

    def reduce(poly):
        return poly.substitute({(a, b): rels[(a, b)] for (a, b) in poly.letters() if a >= 2})

    report = []
    for i in range(1, order):
        for j in range(1, order):
            if i + j > order or j + 1 > order:
                continue
            Z = {1: MultiPoly()}
            for k in range(2, j + 2):
                Z[k] = sum((F(m, k - m) * Fraction(1, m * (k - m)) for m in range(1, k)), MultiPoly())
            p = schur_polys(j + 1)[j + 1]
            rhs = p.substitute(Z)
            diff = F(i, j) - rhs
            if not diff:
                status, residual = "tautology", diff
            else:
                residual = reduce(diff)
                status = "identity" if not residual else "residual"
            report.append({"i": i, "j": j, "status": status, "residual": residual})
    return report
