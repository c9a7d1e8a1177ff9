"""Text, LaTeX and JSON renderings.

Text output is valid parser input: ``3/2*k*u*u_x*p^-1``.  Jet names are
``u, u_x, u_xx, u_xxx, u^(4), ...`` for field 0 and ``u1, u1_x, ...`` for
field 1 and up; ``x`` is the coordinate and ``k`` is kappa.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .diffalg import X_FIELD, DiffPoly
from .scalars import format_rational, latex_rational

JSON_SCHEMA = 1


def field_name(field: int) -> str:
    return "u" if field == 0 else f"u{field}"


def jet_text(field: int, order: int) -> str:
    if field == X_FIELD:
        return "x"
    name = field_name(field)
    if order == 0:
        return name
    if order <= 3:
        return f"{name}_{'x' * order}"
    return f"{name}^({order})"


def jet_latex(field: int, order: int) -> str:
    if field == X_FIELD:
        return "x"
    sub = "" if field == 0 else str(field)
    if order == 0:
        return "u" if not sub else f"u_{{{sub}}}"
    if order <= 3:
        xs = "x" * order
        if not sub:
            return f"u_{xs}" if order == 1 else f"u_{{{xs}}}"
        return f"u_{{{sub},{xs}}}"
    base = "u" if not sub else f"u_{{{sub}}}"
    return f"{base}^{{({order})}}"


def _latex_exp(e: int) -> str:
    return str(e) if 0 <= e <= 9 else f"{{{e}}}"


def _latex_power(base: str, e: int) -> str:
    if e == 1:
        return base
    if "^" in base:
        base = f"({base})"
    return f"{base}^{_latex_exp(e)}"


def _text_power(base: str, e: int) -> str:
    return base if e == 1 else f"{base}^{e}"


def _factors(mono, kpow, pexp, latex):
    out = []
    if kpow:
        out.append(_latex_power("\\kappa", kpow) if latex else _text_power("k", kpow))
    for f, o, e in mono:
        name = jet_latex(f, o) if latex else jet_text(f, o)
        out.append(_latex_power(name, e) if latex else _text_power(name, e))
    if pexp:
        out.append(_latex_power("p", pexp) if latex else _text_power("p", pexp))
    return out


def _term(coeff: Fraction, factors, latex):
    """(sign, body) for one term."""
    mag = abs(coeff)
    sign = "-" if coeff < 0 else "+"
    if not factors:
        return sign, latex_rational(mag) if latex else format_rational(mag)
    if mag == 1:
        body = factors
    else:
        body = [latex_rational(mag) if latex else format_rational(mag)] + factors
    return sign, (" " if latex else "*").join(body)


def join_terms(terms) -> str:
    if not terms:
        return "0"
    sign, body = terms[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def _poly_terms(poly: DiffPoly, pexp: int, latex: bool):
    return [_term(c, _factors(m, k, pexp, latex), latex) for (m, k), c in poly.sorted_terms()]


def render_diffpoly(poly: DiffPoly, latex: bool = False) -> str:
    return join_terms(_poly_terms(DiffPoly.coerce(poly), 0, latex))


def render_symbol(sym, latex: bool = False) -> str:
    terms = []
    for e in sym.exponents():
        terms.extend(_poly_terms(sym[e], e, latex))
    text = join_terms(terms)
    return text


def render(value, latex: bool = False) -> str:
    from .symbols import PhaseSymbol

    if isinstance(value, PhaseSymbol):
        return render_symbol(value, latex)
    if isinstance(value, DiffPoly):
        return render_diffpoly(value, latex)
    if isinstance(value, Fraction):
        return latex_rational(value) if latex else format_rational(value)
    return str(value)


def symbol_json(sym) -> dict:
    return {
        "schema": JSON_SCHEMA,
        "type": "symbol",
        "floor": sym.floor,
        "text": render_symbol(sym),
        "terms": [{"p": e, "coeff": render_diffpoly(sym[e])} for e in sym.exponents()],
    }


def diffpoly_json(poly: DiffPoly) -> dict:
    return {"schema": JSON_SCHEMA, "type": "diffpoly", "value": render_diffpoly(poly)}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
