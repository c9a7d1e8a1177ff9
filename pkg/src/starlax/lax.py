"""Lax operators on phase space: star roots, fractional powers, flows, charges."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .diffalg import DiffPoly
from .errors import FloorTooDeep, InconsistentFlow, InsufficientCoefficients
from .render import JSON_SCHEMA, field_name, render_diffpoly
from .symbols import (
    MOYAL,
    PSDO_LEFT,
    PhaseSymbol,
    ProductKind,
    bracket,
    falling,
    project,
    residue,
    star,
    star_power,
)


def _gen_binomial(top: int, s: int) -> Fraction:
    return Fraction(falling(top, s), factorial(s))


@dataclass(frozen=True, eq=False)
class LaxOperator:
    """Monic symbol ``p^order + ...`` together with its field layout.

    ``fields`` maps a p-exponent to the index of the dependent field that
    sits there.  With ``ordering="plain"`` the field is the plain
    coefficient of ``p^e``; with ``ordering="star"`` the operator is
    ``sum u_f ★ p^e`` and the plain coefficients are derived from it.
    """

    order: int
    symbol: PhaseSymbol
    fields: dict = field(default_factory=dict)
    ordering: str = "plain"
    hierarchy: str = "custom"

    @classmethod
    def from_fields(cls, order, fields, ordering="plain", floor=None, hierarchy="custom"):
        if ordering not in ("plain", "star"):
            raise ValueError(f"unknown ordering {ordering!r}")
        sym = PhaseSymbol.p(order)
        if floor is not None:
            sym = sym.with_floor(floor)
        for e, f in sorted(fields.items(), reverse=True):
            coeff = PhaseSymbol.const(DiffPoly.var(f))
            if ordering == "plain":
                term = PhaseSymbol({e: DiffPoly.var(f)})
            else:
                term = star(coeff, PhaseSymbol.p(e), MOYAL, floor)
            sym = sym + (term if floor is None else term.with_floor(floor))
        return cls(order, sym, dict(fields), ordering, hierarchy)

    @classmethod
    def from_symbol(cls, sym: PhaseSymbol, hierarchy="custom") -> "LaxOperator":
        """Wrap a monic symbol; bare coefficients ``u_f`` become fields."""
        n = sym.top()
        if n is None or n < 1 or sym[n] != DiffPoly.const(1):
            raise ValueError("a Lax operator must be monic of positive order")
        fields = {}
        for e in sym.exponents():
            c = sym[e]
            if e < n and len(c) == 1 and len(c.variables()) == 1:
                (v,) = c.variables()
                if v.order == 0 and v.field >= 0 and c == DiffPoly.var(v.field):
                    fields[e] = v.field
        return cls(n, sym, fields, "plain", hierarchy)

    @classmethod
    def kdv(cls) -> "LaxOperator":
        """``p^2 + u``."""
        return cls.from_fields(2, {0: 0}, hierarchy="kdv")

    @classmethod
    def boussinesq(cls) -> "LaxOperator":
        """``p^3 + u1 ★ p + u2``."""
        return cls.from_fields(3, {1: 1, 0: 2}, ordering="star", hierarchy="boussinesq")

    @classmethod
    def kp(cls, tail_depth: int) -> "LaxOperator":
        """``p + u p^-1 + u1 p^-2 + ...`` tracked down to ``p^-tail_depth``."""
        if tail_depth < 1:
            raise ValueError("KP operator needs at least one tail coefficient")
        fields = {-1 - j: j for j in range(tail_depth)}
        return cls.from_fields(1, fields, floor=-tail_depth, hierarchy="kp")


# ---------------------------------------------------------------------------
# roots and powers


def nth_root(L: LaxOperator, depth: int, kind: ProductKind = MOYAL) -> PhaseSymbol:
    """``R = p + a_0 + a_1 p^-1 + ... + a_depth p^-depth`` with ``R^n = L``.

    Each a_i is fixed by the coefficient of ``p^(n-1-i)``: with a_i set to
    zero the power misses exactly ``n * a_i`` there.
    """
    n = L.order
    sym = L.symbol
    if n == 1:
        if sym.floor is not None and sym.floor > -depth:
            raise FloorTooDeep(f"root depth {depth} needs L down to p^{-depth}")
        return sym.truncate(-depth)
    coeffs = {1: DiffPoly.const(1)}
    for i in range(0, depth + 1):
        e = n - 1 - i
        if sym.floor is not None and e < sym.floor:
            raise FloorTooDeep(f"root depth {depth} needs L down to p^{e}")
        partial = PhaseSymbol(coeffs)
        got = star_power(partial, n, kind, floor=e)[e]
        a_i = (sym[e] - got).scale(Fraction(1, n))
        if a_i:
            coeffs[-i] = a_i
    return PhaseSymbol(coeffs, -depth)


def frac_power(L: LaxOperator, k: int, depth=None, kind: ProductKind = MOYAL) -> PhaseSymbol:
    """``L^(k/n)`` as the k-fold star power of the n-th root.

    The result is tracked down to ``p^(k-1-depth)``; ``depth`` defaults to
    ``k`` so that the residue is available.
    """
    n = L.order
    if k % n == 0:
        return star_power(L.symbol, k // n, kind)
    if depth is None:
        depth = k
    root = nth_root(L, depth, kind)
    return star_power(root, k, kind)


# ---------------------------------------------------------------------------
# flows


@dataclass(frozen=True)
class FlowResult:
    hierarchy: str
    k: int
    m: int
    rhs: dict
    untracked: tuple = ()

    def __getitem__(self, fld: int) -> DiffPoly:
        return self.rhs[fld]

    def dispersionless(self) -> "FlowResult":
        return FlowResult(
            self.hierarchy,
            self.k,
            self.m,
            {f: r.substitute_kappa(0) for f, r in self.rhs.items()},
            self.untracked,
        )

    def render(self, latex: bool = False) -> str:
        lines = []
        for fld in sorted(self.rhs):
            if latex:
                t = f"t_{self.k}" if self.k <= 9 else f"t_{{{self.k}}}"
                lhs = f"u_{{{t}}}" if fld == 0 else f"u_{{{fld},{t}}}"
            else:
                lhs = f"{field_name(fld)}_t{self.k}"
            lines.append(f"{lhs} = {render_diffpoly(self.rhs[fld], latex)}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "schema": JSON_SCHEMA,
            "hierarchy": self.hierarchy,
            "k": self.k,
            "m": self.m,
            "rhs": {field_name(f): render_diffpoly(self.rhs[f]) for f in sorted(self.rhs)},
        }


def generator(L: LaxOperator, k: int, m: int = 0, kind: ProductKind = MOYAL) -> PhaseSymbol:
    """``(L^(k/n))_{>=m}``, with the root depth chosen automatically."""
    depth = max(k - 1 - m, 0)
    return project(frac_power(L, k, depth, kind), m)


def lax_flow(
    L: LaxOperator,
    k: int,
    m: int = 0,
    kind: ProductKind = MOYAL,
    sign: str = "d22",
    normalize: bool = False,
) -> FlowResult:
    """Evolution of the fields of L under ``{(L^(k/n))_{>=m}, L}``.

    ``sign="d16"`` uses ``{L, (L^(k/n))_{>=m}}`` instead (time reversal).
    ``normalize`` divides the right-hand sides by k.
    """
    n = L.order
    if n > 1 and k % n == 0:
        raise ValueError(f"k={k} is a multiple of the order {n}; the flow is trivial")
    if m not in (0, 1, 2):
        raise ValueError("only the projections m = 0, 1, 2 give consistent Lax equations")
    if kind is PSDO_LEFT and L.ordering != "plain":
        raise ValueError("star-ordered operators are defined for the Moyal product only")
    B = generator(L, k, m, kind)
    R = bracket(B, L.symbol, kind)
    if sign == "d16":
        R = -R
    elif sign != "d22":
        raise ValueError(f"unknown sign convention {sign!r}")
    if normalize:
        R = R.scale(Fraction(1, k))
    return _extract_flow(L, R, k, m)


def _extract_flow(L: LaxOperator, R: PhaseSymbol, k: int, m: int) -> FlowResult:
    tracked = lambda e: R.floor is None or e >= R.floor  # noqa: E731
    rhs = {}
    untracked = []
    top = R.top()
    exps = set(R.exponents()) | set(L.fields)
    for e in sorted(exps, reverse=True):
        if not tracked(e):
            if e in L.fields:
                untracked.append(L.fields[e])
            continue
        value = R[e]
        if L.ordering == "star":
            for s in range(1, (top if top is not None else e) - e + 1):
                above = e + s
                if above in L.fields and L.fields[above] in rhs:
                    c = _gen_binomial(above, s) * (-1) ** s
                    value = value - rhs[L.fields[above]].diff(s).times_kappa(s).scale(c)
        if e in L.fields:
            if e == L.order - 1 and value:
                raise InconsistentFlow(f"u at p^{e} must have trivial evolution, got {value}")
            rhs[L.fields[e]] = value
        elif value:
            raise InconsistentFlow(f"flow leaves a residual term at p^{e}: {value}")
    return FlowResult(L.hierarchy, k, m, rhs, tuple(sorted(untracked)))


# ---------------------------------------------------------------------------
# charges and limits


def conserved_charge(L: LaxOperator, k: int, depth=None, kind: ProductKind = MOYAL) -> DiffPoly:
    """Density of ``Tr L^(k/n)``, i.e. the residue of the fractional power."""
    n = L.order
    if n > 1 and k % n == 0:
        raise ValueError(f"k={k} is a multiple of the order {n}")
    return residue(frac_power(L, k, depth, kind))


def charge_rate(density: DiffPoly, flow: FlowResult) -> DiffPoly:
    """d/dt of a density along a flow; conserved iff a total x-derivative."""
    return DiffPoly.coerce(density).evolve(flow.rhs)


def dispersionless_limit(value):
    """Set kappa to zero."""
    if isinstance(value, FlowResult):
        return value.dispersionless()
    if isinstance(value, (PhaseSymbol, DiffPoly)):
        return value.substitute_kappa(0)
    raise TypeError(f"no dispersionless limit for {type(value).__name__}")


# ---------------------------------------------------------------------------
# Sato <-> Moyal coefficients


def sato_to_moyal(v, n_max=None, kappa=Fraction(1, 2)):
    """``u_n = sum_j kappa^j C(n, j) D^j v_(n-j)``.

    At kappa = 1/2 this is the dictionary between the standard-ordered
    (Sato) coefficients of ``d + v_0 d^-1 + ...`` and the Moyal symbol
    coefficients of ``p + u_0 p^-1 + ...``.  Pass ``kappa=None`` to keep
    kappa symbolic.
    """
    v = [DiffPoly.coerce(x) for x in v]
    if n_max is None:
        n_max = len(v) - 1
    if n_max >= len(v):
        raise InsufficientCoefficients(f"u_{n_max} needs v_0 ... v_{n_max}; got {len(v)} coefficients")
    out = []
    for n in range(n_max + 1):
        total = DiffPoly()
        for j in range(n + 1):
            term = v[n - j].diff(j).scale(comb(n, j))
            if kappa is None:
                term = term.times_kappa(j)
            else:
                term = term.scale(Fraction(kappa) ** j)
            total = total + term
        out.append(total)
    return out


def moyal_to_sato(u_coeffs, n_max=None, kappa=Fraction(1, 2)):
    """Inverse of :func:`sato_to_moyal`."""
    if kappa is None:
        u_coeffs = [DiffPoly.coerce(x) for x in u_coeffs]
        n_max = len(u_coeffs) - 1 if n_max is None else n_max
        if n_max >= len(u_coeffs):
            raise InsufficientCoefficients("list too short")
        return [
            sum(
                (u_coeffs[n - j].diff(j).times_kappa(j).scale(comb(n, j) * (-1) ** j) for j in range(n + 1)),
                DiffPoly(),
            )
            for n in range(n_max + 1)
        ]
    return sato_to_moyal(u_coeffs, n_max, -Fraction(kappa))


# ---------------------------------------------------------------------------
# phase-space dynamics


def hamilton_velocity(H, sign: str = "d22"):
    """(x-dot, p-dot) generated by H under the flow convention ``sign``.

    With the default convention a quantity evolves as ``{H, f}``, so the
    velocities are ``{H, x}`` and ``{H, p}``.
    """
    H = PhaseSymbol.coerce(H)
    x = PhaseSymbol.const(DiffPoly.x())
    p = PhaseSymbol.p()
    if sign == "d22":
        return bracket(H, x), bracket(H, p)
    if sign == "d16":
        return bracket(x, H), bracket(p, H)
    raise ValueError(f"unknown sign convention {sign!r}")


def sato_intertwining(tail_depth: int = 3, k: int = 2, kappa=Fraction(1, 2)):
    """Compare the Moyal KP flow with the standard-ordered flow under the
    coefficient dictionary.

    The standard-ordered operator ``xi + v_0 xi^-1 + ...`` evolves under the
    left (PSDO) product at ``2 kappa``; the Moyal operator with
    ``u = sato_to_moyal(v)`` evolves under the Moyal product at ``kappa``.
    Returns ``{field: residual}`` with ``residual = u_t(moyal) - map(v_t)``
    for every field tracked by both flows; all zero means the dictionary
    intertwines the two flows.
    """
    kappa = Fraction(kappa)
    L = LaxOperator.kp(tail_depth)
    sato = lax_flow(L, k, kind=PSDO_LEFT)
    moyal = lax_flow(L, k, kind=MOYAL)
    fields = sorted(set(sato.rhs) & set(moyal.rhs))
    n_max = max(fields)
    v = [DiffPoly.var(f) for f in range(tail_depth)]
    u_of_v = dict(enumerate(sato_to_moyal(v, tail_depth - 1, kappa)))
    # Moyal right-hand side with u replaced by the dictionary image of v
    lhs = {f: moyal.rhs[f].substitute_kappa(kappa).substitute(u_of_v) for f in fields}
    vt = [sato.rhs[f].substitute_kappa(2 * kappa) for f in range(n_max + 1)]
    rhs = sato_to_moyal(vt, n_max, kappa)
    return {f: lhs[f] - rhs[f] for f in fields}
