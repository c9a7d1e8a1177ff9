"""Diagnostic report: engine values set against reference values.

Nothing here asserts.  Each section states the computed value, the
reference value, and a verdict, so that known discrepancies in the
reference formulas are recorded in one place.
"""

from __future__ import annotations

from fractions import Fraction

from .diffalg import DiffPoly, equals_mod_total_derivative
from .hirota import dhirota_check, f_text
from .lax import (
    LaxOperator,
    conserved_charge,
    generator,
    hamilton_velocity,
    lax_flow,
    nth_root,
    sato_intertwining,
)
from .parsing import parse_diffpoly, parse_symbol
from .render import render
from .symbols import PhaseSymbol, star

# Reference formulas as published, transcribed verbatim into the parser
# grammar (k is kappa).  Keys name the quantity, not its source.
REFERENCE = {
    "p^3 * u": "k^3*u_xxx + 3*k^2*u_xx*p + 3*k*u_x*p^2 + u*p^3",
    "u * p^3": "-k^3*u_xxx + 3*k^2*p - 3*k*u_x*p^2 + p^3",
    "p^3 * u - u * p^3": "2*k^3*u_xxx + 6*k*u_x*p^2",
    "Xi": "-6*k*u_x*p^2 + 6*k*u_xx*p",
    "3/2 (u*p*u - u*u*p)": "3*k*u^2",
    "3/2 k (u_x*p^2 - p^2*u_x)": "-6*k*u_xx*p",
    "Gamma": "2*k^3*u_xxx + 3*k*u*u_x",
    "a7": "-5/128*u^4 - 5/16*k^2*(u*u_x^2 - 2*u^2*u_xx) - 1/8*k^2*(u_xx^2 - 2*u_x*u_xxx + 2*u*u^(4))",
    "H1": "u/2",
    "H2": "u^2/4",
    "H3": "4*k*u_xx*u + u^3",
}


def bracket_audit() -> dict:
    """Engine values of the intermediate products in the t3 KdV bracket."""
    p = PhaseSymbol.p
    u = PhaseSymbol.const(DiffPoly.var(0))
    ux = PhaseSymbol.const(DiffPoly.var(0, 1))
    k = PhaseSymbol.const(DiffPoly.kappa())
    h = Fraction(3, 2)
    up = star(u, p())
    out = {
        "p^3 * u": star(p(3), u),
        "u * p^3": star(u, p(3)),
        "p^3 * u - u * p^3": star(p(3), u) - star(u, p(3)),
        "Xi": (star(u, p(3)) - star(p(2), up)).scale(h),
        "3/2 (u*p*u - u*u*p)": (star(up, u) - star(star(u, u), p())).scale(h),
        "3/2 k (u_x*p^2 - p^2*u_x)": (star(ux, p(2)) - star(p(2), ux)).scale(h) * k,
    }
    B = parse_symbol("p^3 + 3/2*u*p + 3/2*k*u_x", star_mode=True)
    L = LaxOperator.kdv().symbol
    out["Gamma"] = star(B, L) - star(L, B)
    return out


def _verdict(engine, reference) -> str:
    if engine == reference:
        return "agrees exactly"
    if engine.substitute_kappa(1) == reference.substitute_kappa(1):
        return "differs only in powers of kappa"
    return "differs"


def _charge_verdict(engine: DiffPoly, reference: DiffPoly) -> str:
    if equals_mod_total_derivative(engine, reference):
        return "agrees modulo total derivatives"
    return "differs modulo total derivatives"


def build_report() -> str:
    lines = ["# starlax diagnostic report", ""]

    # -- bracket audit -----------------------------------------------------
    lines += ["## Intermediate products of the t3 KdV bracket", ""]
    for name, value in bracket_audit().items():
        ref = parse_symbol(REFERENCE[name])
        lines.append(f"- `{name}`")
        lines.append(f"  - engine:    `{render(value)}`")
        lines.append(f"  - reference: `{render(ref)}`")
        lines.append(f"  - verdict: {_verdict(value, ref)}")
    lines.append("")

    # -- a7 ----------------------------------------------------------------
    L = LaxOperator.kdv()
    a7 = nth_root(L, 7)[-7]
    ref = parse_diffpoly(REFERENCE["a7"])
    balance = a7.derivative_balance()
    lines += [
        "## Square-root coefficient a7 of p^2 + u",
        "",
        f"- engine:    `{render(a7)}`",
        f"- reference: `{render(ref)}`",
        f"- verdict: {_verdict(a7, ref)}",
        f"- every engine term has (number of x-derivatives) - (power of kappa) = {balance};"
        " the reference group with u_xx^2 carries kappa^2 against four derivatives.",
        "",
    ]

    # -- charges -----------------------------------------------------------
    lines += ["## Conserved densities of p^2 + u (residue of L^(k/2))", ""]
    for k, key in ((1, "H1"), (3, "H2"), (5, "H3")):
        eng = conserved_charge(L, k)
        ref = parse_diffpoly(REFERENCE[key])
        t3 = lax_flow(L, 3)
        rate = eng.evolve(t3.rhs)
        lines.append(f"- k = {k}")
        lines.append(f"  - engine:    `{render(eng)}`")
        lines.append(f"  - reference: `{render(ref)}`")
        lines.append(f"  - verdict: {_charge_verdict(eng, ref)}")
        lines.append(
            "  - engine density conserved along t3: "
            f"{'yes' if equals_mod_total_derivative(rate, DiffPoly()) else 'no'}"
        )
        ref_rate = ref.evolve(t3.rhs)
        lines.append(
            "  - reference density conserved along t3: "
            f"{'yes' if equals_mod_total_derivative(ref_rate, DiffPoly()) else 'no'}"
        )
    lines.append("")

    # -- flows -------------------------------------------------------------
    t3 = lax_flow(L, 3)
    lines += [
        "## KdV flows",
        "",
        f"- t3: `{t3.render()}`",
        f"- t3 at kappa = 1/2: `u_t3 = {render(t3[0].substitute_kappa(Fraction(1, 2)))}`",
        f"- t3 at kappa = 0: `u_t3 = {render(t3[0].substitute_kappa(0))}`",
        "",
    ]

    # -- phase space -------------------------------------------------------
    lines += ["## Phase-space velocities", ""]
    H3 = generator(L, 3)
    oscillator = parse_symbol("(p^2 + x^2)/2")
    for label, H in (("(L^(3/2))_+", H3), ("(p^2 + x^2)/2", oscillator)):
        xv, pv = hamilton_velocity(H, "d16")
        lines.append(f"- H = {label}: `{render(H)}`")
        lines.append(f"  - {{x, H}} = `{render(xv)}`;  d_p H = `{render(H.diff_p())}`")
        lines.append(f"  - {{p, H}} = `{render(pv)}`;  -d_x H = `{render(-H.diff_x())}`")
        xs, ps = hamilton_velocity(H, "d22")
        ok = xs == H.diff_p() and ps == -H.diff_x()
        lines.append(f"  - {{H, x}} = d_p H and {{H, p}} = -d_x H: {'yes' if ok else 'no'}")
    lines.append("")

    # -- standard ordering dictionary -------------------------------------
    lines += ["## Standard-ordered vs Moyal KP, tail depth 3, flow t2", ""]
    res = sato_intertwining(3, 2)
    for f, r in sorted(res.items()):
        lines.append(f"- residual for u{f if f else ''}: `{render(r)}`")
    verdict = "the dictionary intertwines the two flows" if not any(res.values()) else "the flows are not intertwined"
    lines += [f"- verdict: {verdict}", ""]

    # -- dispersionless Hirota --------------------------------------------
    lines += ["## Dispersionless Hirota form against the Fay relations (order 6)", ""]
    for row in dhirota_check(6):
        extra = "" if row["status"] != "residual" else f": `{row['residual'].render(f_text)}`"
        lines.append(f"- (i, j) = ({row['i']}, {row['j']}): {row['status']}{extra}")
    lines.append("")
    return "\n".join(lines)

