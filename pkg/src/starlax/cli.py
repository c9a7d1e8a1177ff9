"""Command-line interface.

Exit codes: 0 on success, 1 on parse or usage errors, 2 on domain errors
raised by the engine (floor problems, inconsistent flows, ...).  Results
go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import EngineError, ParseError
from .hirota import ExpSum, dfay_relations, dhirota_check, f_text, kp_bilinear_residual, schur_polys, soliton_tau, time_name
from .lax import (
    LaxOperator,
    conserved_charge,
    dispersionless_limit,
    frac_power,
    generator,
    lax_flow,
    moyal_to_sato,
    nth_root,
    sato_to_moyal,
)
from .parsing import parse_diffpoly, parse_qoperator, parse_symbol
from .qcalc import QLaurent, discrete_kp_map, discrete_kp_matrix, leibniz_expansion, q_commutator
from .render import JSON_SCHEMA, dumps, render, render_diffpoly, symbol_json
from .symbols import MOYAL, PSDO_LEFT, PhaseSymbol, bracket, poisson_bracket, star


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


KINDS = {"moyal": MOYAL, "psdo": PSDO_LEFT}


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _emit(fmt: str, text: str, latex: str, payload) -> str:
    if fmt == "json":
        return dumps(payload)
    return latex if fmt == "latex" else text


# ---------------------------------------------------------------------------
# commands


def _hierarchy(name: str, tail: int) -> LaxOperator:
    if name == "kdv":
        return LaxOperator.kdv()
    if name == "boussinesq":
        return LaxOperator.boussinesq()
    if name == "kp":
        return LaxOperator.kp(tail)
    raise UsageError(f"unknown hierarchy {name!r}")


def _flow_job(job):
    hierarchy, tail, k, m, kind, sign, normalize = job
    return lax_flow(_hierarchy(hierarchy, tail), k, m, KINDS[kind], sign, normalize)


def _run_jobs(fn, jobs, n_jobs):
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_flow(args):
    jobs = [(args.hierarchy, args.tail, k, args.m, args.kind, args.sign, args.normalize) for k in args.k]
    results = _run_jobs(_flow_job, jobs, args.jobs)
    if args.dispersionless:
        results = [dispersionless_limit(r) for r in results]
    text = "\n".join(r.render() for r in results)
    latex = "\n".join(r.render(latex=True) for r in results)
    payload = results[0].to_json() if len(results) == 1 else [r.to_json() for r in results]
    return _emit(args.format, text, latex, payload)


def _lax(expr: str) -> LaxOperator:
    try:
        return LaxOperator.from_symbol(parse_symbol(expr))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise UsageError(str(exc)) from exc


def _symbol_out(args, sym: PhaseSymbol):
    return _emit(args.format, render(sym), render(sym, latex=True), symbol_json(sym))


def cmd_root(args):
    R = nth_root(_lax(args.L), args.depth, KINDS[args.kind])
    return _symbol_out(args, R)


def cmd_power(args):
    L = _lax(args.L)
    if args.plus is not None:
        return _symbol_out(args, generator(L, args.k, args.plus, KINDS[args.kind]))
    return _symbol_out(args, frac_power(L, args.k, args.depth, KINDS[args.kind]))


def _operand(src, args):
    # exact when the expression is finite; the floor only bounds infinite products
    try:
        return parse_symbol(src, star_mode=args.star_input)
    except ParseError:
        if args.floor is None:
            raise
    return parse_symbol(src, star_mode=args.star_input, floor=args.floor)


def _operands(args):
    return _operand(args.lhs, args), _operand(args.rhs, args)


def cmd_star(args):
    lhs, rhs = _operands(args)
    return _symbol_out(args, star(lhs, rhs, KINDS[args.kind], args.floor))


def cmd_bracket(args):
    lhs, rhs = _operands(args)
    if args.poisson:
        return _symbol_out(args, poisson_bracket(lhs, rhs))
    return _symbol_out(args, bracket(lhs, rhs, KINDS[args.kind], args.floor))


def _charge_job(job):
    expr, k, depth, kind = job
    return conserved_charge(_lax(expr), k, depth, KINDS[kind])


def cmd_charge(args):
    jobs = [(args.L, k, args.depth, args.kind) for k in args.k]
    values = _run_jobs(_charge_job, jobs, args.jobs)
    text = "\n".join(f"h_{k} = {render(v)}" for k, v in zip(args.k, values))
    latex = "\n".join(f"h_{{{k}}} = {render(v, latex=True)}" for k, v in zip(args.k, values))
    payload = {
        "schema": JSON_SCHEMA,
        "type": "charges",
        "densities": {str(k): render_diffpoly(v) for k, v in zip(args.k, values)},
    }
    return _emit(args.format, text, latex, payload)


def _read_source(args):
    if (args.expr is None) == (args.file is None):
        raise UsageError("give exactly one of --expr or --file")
    return args.expr if args.expr is not None else Path(args.file).read_text()


def cmd_limit(args):
    sym = dispersionless_limit(parse_symbol(_read_source(args), floor=args.floor))
    return _symbol_out(args, sym)


def _parse_soliton(text: str):
    values = {"c": Fraction(1)}
    for part in text.split(","):
        if "=" not in part:
            raise UsageError(f"soliton entries look like a=2, got {part!r}")
        key, val = part.split("=", 1)
        key = key.strip()
        if key not in ("a", "b", "c"):
            raise UsageError(f"unknown soliton parameter {key!r}")
        try:
            values[key] = Fraction(val.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"not a rational number: {val!r}") from exc
    if "a" not in values or "b" not in values:
        raise UsageError("--soliton needs a and b")
    return values


def _read_tau(path: str) -> ExpSum:
    data = json.loads(Path(path).read_text())
    terms = data["terms"] if isinstance(data, dict) else data
    out = ExpSum()
    for t in terms:
        wave = {int(j): Fraction(k) for j, k in t.get("wave", {}).items()}
        out = out + ExpSum.exp(wave, Fraction(t["coeff"]))
    return out


def cmd_hirota(args):
    if (args.soliton is None) == (args.tau_file is None):
        raise UsageError("give exactly one of --soliton or --tau-file")
    if args.n < 2:
        raise UsageError("n must be at least 2")
    if args.soliton is not None:
        s = _parse_soliton(args.soliton)
        tau = soliton_tau(s["a"], s["b"], s["c"], N=max(args.n + 1, 2))
    else:
        tau = _read_tau(args.tau_file)
    res = kp_bilinear_residual(args.n, tau)
    payload = res.to_json()
    payload["zero"] = not res
    return _emit(args.format, f"residual = {res.render()}", f"\\text{{residual}} = {res.render(latex=True)}", payload)


def cmd_dfay(args):
    rs = dfay_relations(args.order)
    return _emit(args.format, rs.render(reparam=args.reparam), rs.render(latex=True, reparam=args.reparam), rs.to_json(args.reparam))


def cmd_dhirota(args):
    rows = dhirota_check(args.order)
    text = "\n".join(
        f"({r['i']},{r['j']}) {r['status']}" + (f": {r['residual'].render(f_text)}" if r["status"] == "residual" else "")
        for r in rows
    )
    payload = {
        "schema": JSON_SCHEMA,
        "type": "dhirota",
        "rows": [
            {"i": r["i"], "j": r["j"], "status": r["status"], "residual": r["residual"].render(f_text)} for r in rows
        ],
    }
    return _emit(args.format, text, text, payload)


def cmd_schur(args):
    ps = schur_polys(args.N)
    text = "\n".join(f"p_{j} = {p.render(time_name)}" for j, p in enumerate(ps))
    latex = "\n".join(f"p_{{{j}}} = {p.render(lambda n: f't_{{{n}}}', latex=True)}" for j, p in enumerate(ps))
    payload = {"schema": JSON_SCHEMA, "type": "schur", "polys": [p.render(time_name) for p in ps]}
    return _emit(args.format, text, latex, payload)


def cmd_qleibniz(args):
    if (args.n is None) == (args.word is None):
        raise UsageError("give exactly one of --n or --word")
    if args.n is not None:
        exp = leibniz_expansion(args.n, args.depth)
        text, latex = exp.render(), exp.render(latex=True)
        payload = {"schema": JSON_SCHEMA, "type": "leibniz", "n": args.n, "text": text}
        return _emit(args.format, text, latex, payload)
    op = parse_qoperator(args.word, floor=args.floor)
    payload = {"schema": JSON_SCHEMA, "type": "qoperator", "floor": op.floor, "text": op.render()}
    return _emit(args.format, op.render(), op.render(latex=True), payload)


def cmd_qcomm(args):
    A = parse_qoperator(args.lhs, floor=args.floor)
    B = parse_qoperator(args.rhs, floor=args.floor)
    op = q_commutator(A, B, args.floor)
    payload = {"schema": JSON_SCHEMA, "type": "qoperator", "floor": op.floor, "text": op.render()}
    return _emit(args.format, op.render(), op.render(latex=True), payload)


def _coeff_list(args):
    if (args.coeffs is None) == (args.coeff_file is None):
        raise UsageError("give exactly one of --coeffs or --coeff-file")
    src = args.coeffs if args.coeffs is not None else Path(args.coeff_file).read_text()
    entries = [e.strip() for e in src.replace("\n", ";").split(";") if e.strip()]
    return [parse_diffpoly(e) for e in entries]


def cmd_map_sato(args):
    coeffs = _coeff_list(args)
    kappa = None if args.kappa == "k" else _fraction(args.kappa)
    fn = moyal_to_sato if args.inverse else sato_to_moyal
    out = fn(coeffs, args.n, kappa)
    name = "v" if args.inverse else "u"
    text = "\n".join(f"{name}_{i} = {render(c)}" for i, c in enumerate(out))
    latex = "\n".join(f"{name}_{{{i}}} = {render(c, latex=True)}" for i, c in enumerate(out))
    payload = {"schema": JSON_SCHEMA, "type": "coefficients", "name": name, "values": [render_diffpoly(c) for c in out]}
    return _emit(args.format, text, latex, payload)


def _dkp_coeffs(args):
    """b_0 ... b_n as Laurent polynomials in y (parsed with the q grammar)."""
    if args.coeffs is None and args.coeff_file is None:
        return None
    if args.coeffs is not None and args.coeff_file is not None:
        raise UsageError("give at most one of --coeffs or --coeff-file")
    src = args.coeffs if args.coeffs is not None else Path(args.coeff_file).read_text()
    out = []
    for entry in (e.strip() for e in src.replace("\n", ";").split(";")):
        if not entry:
            continue
        op = parse_qoperator(entry.replace("y", "x"))
        if set(op.terms) - {(0, 0)}:
            raise UsageError(f"coefficient {entry!r} is not a Laurent polynomial in y")
        out.append(op.terms.get((0, 0), QLaurent()))
    return out


def cmd_map_dkp(args):
    b = _dkp_coeffs(args)
    if b is not None:
        a = discrete_kp_map(b, args.n, args.binomial)
        text = "\n".join(f"a_{i} = {c.render(var='y')}" for i, c in enumerate(a))
        latex = "\n".join(f"a_{{{i}}} = {c.render(latex=True, var='y')}" for i, c in enumerate(a))
        payload = {
            "schema": JSON_SCHEMA,
            "type": "dkp_coefficients",
            "binomial": args.binomial,
            "values": [c.render(var="y") for c in a],
        }
        return _emit(args.format, text, latex, payload)
    M = discrete_kp_matrix(args.n, args.binomial)
    text_lines, latex_lines, rows = [], [], []
    for i in range(args.n + 1):
        parts, lparts, row = [], [], {}
        for j in range(i, args.n + 1):
            c = M[(i, j)]
            row[str(j)] = c.render(var="y")
            parts.append(f"b_{j}" if c == 1 else f"({c.render(var='y')})*b_{j}")
            lparts.append(f"b_{{{j}}}" if c == 1 else f"\\left({c.render(latex=True, var='y')}\\right) b_{{{j}}}")
        text_lines.append(f"a_{i} = " + " + ".join(parts))
        latex_lines.append(f"a_{{{i}}} = " + " + ".join(lparts))
        rows.append(row)
    payload = {"schema": JSON_SCHEMA, "type": "dkp_map", "binomial": args.binomial, "rows": rows}
    return _emit(args.format, "\n".join(text_lines), "\n".join(latex_lines), payload)


def cmd_report(args):
    from .report import build_report

    text = build_report()
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n")
        return f"report written to {out}"
    return text


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="starlax", description="Exact Moyal and PSDO symbol calculus for Lax hierarchies.")
    parser.add_argument("--version", action="version", version=f"starlax {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_text, floor=False, kind=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=("text", "latex", "json"), default="text")
        if floor:
            p.add_argument("--floor", type=int, default=None, help="lowest p- (or dq-) exponent to track")
        if kind:
            p.add_argument("--kind", choices=tuple(KINDS), default="moyal")
        p.set_defaults(func=fn)
        return p

    p = add("flow", cmd_flow, "Lax flows of a hierarchy", kind=True)
    p.add_argument("--hierarchy", choices=("kdv", "boussinesq", "kp"), default="kdv")
    p.add_argument("--k", type=int, nargs="+", required=True)
    p.add_argument("--m", type=int, default=0, choices=(0, 1, 2))
    p.add_argument("--sign", choices=("d22", "d16"), default="d22", help="d16 reverses time")
    p.add_argument("--normalize", action="store_true", help="divide each flow by k")
    p.add_argument("--tail", type=int, default=4, help="KP tail depth")
    p.add_argument("--dispersionless", action="store_true", help="set kappa to zero")
    p.add_argument("--jobs", type=int, default=1)

    p = add("root", cmd_root, "n-th star root of a monic symbol", kind=True)
    p.add_argument("--L", default="p^2 + u")
    p.add_argument("--depth", type=int, required=True)

    p = add("power", cmd_power, "fractional star power L^(k/n)", kind=True)
    p.add_argument("--L", default="p^2 + u")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--depth", type=int, help="root depth (default k)")
    p.add_argument("--plus", type=int, metavar="M", help="print only the part with p-exponent >= M")

    for name, fn, text in (("star", cmd_star, "star product"), ("bracket", cmd_bracket, "star bracket")):
        p = add(name, fn, text, floor=True, kind=True)
        p.add_argument("--lhs", required=True)
        p.add_argument("--rhs", required=True)
        p.add_argument("--star-input", action="store_true", help="read '*' in the operands as the star product")
        if name == "bracket":
            p.add_argument("--poisson", action="store_true", help="Poisson bracket instead")

    p = add("charge", cmd_charge, "conserved densities (residues)", kind=True)
    p.add_argument("--L", default="p^2 + u")
    p.add_argument("--k", type=int, nargs="+", required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)

    p = add("limit", cmd_limit, "dispersionless limit of a symbol", floor=True)
    p.add_argument("--expr")
    p.add_argument("--file")

    p = add("hirota", cmd_hirota, "bilinear KP residual on an exponential sum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--soliton", help="a=2,b=1/3,c=1")
    p.add_argument("--tau-file", help="JSON list of {coeff, wave}")

    p = add("dfay", cmd_dfay, "relations among F_mn from the dispersionless Fay identity")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--reparam", action="store_true", help="write in P_(j+1) = F_1j / j")

    p = add("dhirota", cmd_dhirota, "compare the dispersionless Hirota form with the Fay relations")
    p.add_argument("--order", type=int, required=True)

    p = add("schur", cmd_schur, "elementary Schur polynomials")
    p.add_argument("--N", type=int, required=True)

    p = add("qleibniz", cmd_qleibniz, "q-Leibniz expansion or normal form of a word", floor=True)
    p.add_argument("--n", type=int)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--word")

    p = add("qcomm", cmd_qcomm, "commutator of two q-operators", floor=True)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)

    p = add("map-sato", cmd_map_sato, "standard-ordered to Moyal coefficients")
    p.add_argument("--coeffs", help="semicolon separated list")
    p.add_argument("--coeff-file")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--kappa", default="1/2", help="rational value or 'k' to keep kappa")
    p.add_argument("--inverse", action="store_true")

    p = add("map-dkp", cmd_map_dkp, "discrete KP coefficient map")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--binomial", choices=("q", "ordinary"), default="q")
    p.add_argument("--coeffs", help="b_0; b_1; ... in y; without them the matrix is printed")
    p.add_argument("--coeff-file")

    p = add("report", cmd_report, "diagnostic report")
    p.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        out = args.func(args)
    except ParseError as exc:
        print(f"starlax: parse error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError) as exc:
        print(f"starlax: error: {exc}", file=sys.stderr)
        return 1
    except EngineError as exc:
        print(f"starlax: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"starlax: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
