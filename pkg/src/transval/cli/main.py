"""``tvf``: batch front-end to the transval library.

Exit status: 0 on success, 1 on usage or parse errors, 2 on typed domain
errors (see ``EXIT_CODES``).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Type

from .. import errors as E
from ..diffpoly import DiffPoly
from ..fields import QQ, field_from_spec
from ..hahn import as_cut, as_root
from ..sigma import INF, SigmaRational
from ..solver import (
    Budget,
    Certificate,
    root_distances,
    root_in_ball,
    hensel_lift,
    solve_additive,
)
from ..tropical import Ball, herbrand, newton_polygon, singular_points, strictly_increasing, tropical_roots
from .parser import parse_poly, parse_series, parse_sigma_rational
from .plot import emit_plot

SCHEMA = "transval/v1"

# every library error type, mapped to its exit status
EXIT_CODES: Dict[Type[E.TransvalError], int] = {
    E.ParseError: 1,
    E.ExprTypeError: 1,
    E.DivisionByZero: 2,
    E.CharacteristicOne: 2,
    E.DenominatorVanishes: 2,
    E.NotOmegaIncreasing: 2,
    E.MixedCoefficientRings: 2,
    E.NonUnitScale: 2,
    E.ZeroPolynomial: 2,
    E.SupportCollision: 2,
    E.PrecisionLoss: 2,
    E.BudgetExceeded: 2,
    E.NonNegativeValuation: 2,
    E.PreconditionFailed: 2,
    E.ResidueSearchExhausted: 2,
    E.SymbolicResidueUnsupported: 2,
    E.LimitNotRational: 2,
}


def exit_code(exc: BaseException) -> int:
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    return 2 if isinstance(exc, E.TransvalError) else 1


class UsageError(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# session
# ---------------------------------------------------------------------------

@dataclass
class Session:
    p: int = 1
    field_spec: Optional[str] = None
    prec: Optional[str] = None
    q: Optional[int] = None
    budget: Budget = field(default_factory=Budget)
    fmt: str = "text"
    display_q: int = 4

    @property
    def field(self):
        spec = self.field_spec or ("Q" if self.p == 1 else f"F{self.p}")
        f = field_from_spec(spec, self.p)
        if (f is QQ) != (self.p == 1):
            raise UsageError(f"field {spec} does not match p = {self.p}")
        return f

    def poly(self, text: str) -> DiffPoly:
        return parse_poly(text, self.field, self.p)

    def series(self, text: str):
        return parse_series(text, self.field, self.p)

    def rational(self, text: str) -> SigmaRational:
        return parse_sigma_rational(text, self.p)


def read_config(path: str) -> Dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out: Dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for n, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            k, v = line.split("=", 1)
            out[k.strip().lower()] = v.strip().strip('"')
    return out


def build_session(args) -> Session:
    cfg = read_config(args.config) if args.config else {}
    s = Session()
    try:
        if "p" in cfg:
            s.p = int(cfg["p"])
        s.field_spec = cfg.get("field")
        s.prec = cfg.get("prec")
        if "q" in cfg:
            s.q = int(cfg["q"])
        if "display_q" in cfg:
            s.display_q = int(cfg["display_q"])
        if cfg.get("json", "").lower() in ("1", "true", "yes"):
            s.fmt = "json"
        budget = Budget.parse(cfg["budget"]) if "budget" in cfg else Budget()
        budget = Budget.from_env(budget)
        if args.budget:
            budget = Budget.parse(args.budget, budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    s.budget = budget
    if args.p is not None:
        s.p = args.p
    if args.field is not None:
        s.field_spec = args.field
    if args.prec is not None:
        s.prec = args.prec
    if args.q is not None:
        s.q = args.q
    if args.display_q is not None:
        s.display_q = args.display_q
    if args.json:
        s.fmt = "json"
    if s.p != 1 and s.p < 2:
        raise UsageError("--p must be 1 or a prime")
    return s


# ---------------------------------------------------------------------------
# rendering helpers
# ---------------------------------------------------------------------------

def _val_json(v):
    return "inf" if v is INF else v.to_json()


def _val_text(v):
    return "inf" if v is INF else str(v)


def _need(value, flag):
    if value is None:
        raise UsageError(f"this command needs {flag}")
    return value


# ---------------------------------------------------------------------------
# commands: each returns (result_json, text)
# ---------------------------------------------------------------------------

def cmd_taylor(s: Session, a):
    f = s.poly(a.expr)
    ders = sorted(f.taylor().items(), key=lambda kv: kv[0])
    res = {"derivatives": [{"exp": mu.to_json(), "expText": str(mu), "poly": g.to_json(), "text": str(g)} for mu, g in ders]}
    text = "\n".join(f"f_[{mu}] = {g}" for mu, g in ders)
    return res, text


def cmd_polygon(s: Session, a):
    poly = newton_polygon(s.poly(a.expr))
    lines = ["vertices (beta, mu):"] + [f"  ({b}, {m})" for b, m in poly.hull]
    lines.append("slopes: " + ", ".join(str(x) for x in poly.slopes))
    return poly.to_json(), "\n".join(lines)


def cmd_tropical(s: Session, a):
    roots = tropical_roots(s.poly(a.expr))
    return {"roots": [_val_json(r) for r in roots]}, "\n".join(_val_text(r) for r in roots)


def _approx_root(s: Session, f: DiffPoly):
    finite = [r for r in tropical_roots(f) if r is not INF]
    if not finite:
        return None
    budget = Budget(max_steps=min(s.budget.max_steps, 8), max_terms=s.budget.max_terms,
                    max_field_power=s.budget.max_field_power, cancel=s.budget.cancel)
    rep = root_in_ball(f, Ball(None, max(finite)), budget=budget)
    if isinstance(rep, Certificate):
        raise E.PreconditionFailed("no root to stand above")
    return rep.root


def cmd_herbrand(s: Session, a):
    f = s.poly(a.expr)
    if a.above_root:
        center = _approx_root(s, f)
        psi = herbrand(f, center, assume_root=True)
    elif a.radius is not None:
        center = s.series(a.center) if a.center else None
        psi = herbrand(f, Ball(center, s.rational(a.radius)))
    else:
        center = s.series(a.center) if a.center else None
        psi = herbrand(f, center)
    if a.svg:
        with open(a.svg, "w", encoding="utf-8") as fh:
            fh.write(emit_plot(psi, s.display_q))
    sing = singular_points(psi)
    res = dict(psi.to_json())
    res["singularPoints"] = [x.to_json() for x in sing]
    res["strictlyIncreasing"] = strictly_increasing(psi)
    rows = ["from\tto\tslope\tintercept"] + ["\t".join(r) for r in psi.table()]
    rows.append("singular points: " + (", ".join(str(x) for x in sing) or "none"))
    return res, "\n".join(rows)


def _report(rep):
    if isinstance(rep, Certificate):
        return {"certificate": rep.to_json()}, f"certificate: {rep.kind}"
    text = "\n".join(
        [
            f"root: {rep.root}",
            f"residual valuation: {_val_text(rep.residual_valuation)}",
            f"steps: {rep.steps}",
            f"distance to seed: {_val_text(rep.distance_to_seed)}",
            f"converged: {str(rep.converged).lower()}",
        ]
    )
    return {"report": rep.to_json()}, text


def _target(s: Session):
    return s.rational(s.prec) if s.prec else None


def cmd_solve(s: Session, a):
    f = s.poly(a.expr)
    if a.rhs is not None:
        tau, c = f, s.series(a.rhs)
    else:
        c = -f.constant_term
        tau = f + DiffPoly.const(f.ring, c)
    mode = "specialized" if a.mode == "specialized" else "symbolic"
    rep = solve_additive(tau, c, _target(s), s.budget, mode, s.q)
    return _report(rep)


def cmd_lift(s: Session, a):
    f = s.poly(a.expr)
    seed = s.series(a.seed) if a.seed else DiffPoly.const(f.ring, 0).constant_term
    target = _need(_target(s), "--prec")
    return _report(hensel_lift(f, seed, target, s.budget, twist=a.twist))


def cmd_ball(s: Session, a):
    f = s.poly(a.expr)
    center = s.series(a.center) if a.center else None
    ball = Ball(center, s.rational(_need(a.radius, "--radius")))
    rep = root_in_ball(f, ball, a.mode, s.q, s.budget, _target(s))
    return _report(rep)


def cmd_distances(s: Session, a):
    tau = s.poly(a.expr)
    c = s.series(a.rhs) if a.rhs else None
    d = root_distances(tau, _need(s.q, "--q"), a.m, c, s.budget)
    return {"distances": [x.to_json() for x in d]}, "\n".join(str(x) for x in d) or "(none)"


def cmd_specialize(s: Session, a):
    f = s.poly(a.expr)
    g = f.specialize_sigma(_need(s.q, "--q"), coefficients=a.coefficients)
    return {"poly": g.to_json(), "text": str(g)}, str(g)


def _series_json(b):
    return {"series": b.to_json(), "text": str(b)}


def cmd_asroot(s: Session, a):
    x = s.series(a.series)
    b = as_root(x, a.n)
    p = x.field.p
    residual = b ** p - b - x
    res = {"root": _series_json(b), "residual": _series_json(residual),
           "residualValuation": _val_json(residual.valuation())}
    return res, f"root: {b}\nresidual: {residual}"


def cmd_cut(s: Session, a):
    cut = as_cut(s.series(a.series), a.n)
    text = "samples: " + ", ".join(str(x) for x in cut.samples)
    text += f"\nlimit: {cut.limit} ({'closed' if cut.closed_at_limit else 'open'})"
    return cut.to_json(), text


COMMANDS: Dict[str, Callable] = {
    "taylor": cmd_taylor,
    "polygon": cmd_polygon,
    "tropical": cmd_tropical,
    "herbrand": cmd_herbrand,
    "solve": cmd_solve,
    "lift": cmd_lift,
    "ball": cmd_ball,
    "distances": cmd_distances,
    "specialize": cmd_specialize,
    "asroot": cmd_asroot,
    "cut": cmd_cut,
}


def build_parser() -> argparse.ArgumentParser:
    common = _ArgParser(add_help=False)
    common.add_argument("--p", type=int, help="characteristic exponent (1 or a prime)")
    common.add_argument("--field", help="coefficient field: Q, F4, F9:1 (q and sigma power)")
    common.add_argument("--prec", help="target precision, a sigma-expression")
    common.add_argument("--q", type=int, help="specialization sigma -> q")
    common.add_argument("--budget", help="step limit, or steps=N,terms=N,field=N")
    common.add_argument("--json", action="store_true", help="emit a JSON document")
    common.add_argument("--svg", help="write an SVG plot (herbrand)")
    common.add_argument("--display-q", type=int, dest="display_q", help="q used to draw plots")
    common.add_argument("--config", help="key = value file with session defaults")

    ap = _ArgParser(prog="tvf", description="Computations in omega-increasing transformal valued fields.")
    sub = ap.add_subparsers(dest="command", parser_class=_ArgParser)
    for name in ("taylor", "polygon", "tropical", "specialize"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("expr")
        if name == "specialize":
            sp.add_argument("--coefficients", action="store_true", help="specialize coefficient series too")
    sp = sub.add_parser("herbrand", parents=[common])
    sp.add_argument("expr")
    sp.add_argument("--center")
    sp.add_argument("--radius")
    sp.add_argument("--above-root", action="store_true", dest="above_root")
    sp = sub.add_parser("solve", parents=[common])
    sp.add_argument("expr")
    sp.add_argument("rhs", nargs="?")
    sp.add_argument("--mode", choices=("symbolic", "specialized"), default="symbolic")
    sp = sub.add_parser("lift", parents=[common])
    sp.add_argument("expr")
    sp.add_argument("--seed")
    sp.add_argument("--twist", action="store_true")
    sp = sub.add_parser("ball", parents=[common])
    sp.add_argument("expr")
    sp.add_argument("--center")
    sp.add_argument("--radius")
    sp.add_argument("--mode", choices=("symbolic", "specialized"), default="symbolic")
    sp = sub.add_parser("distances", parents=[common])
    sp.add_argument("expr")
    sp.add_argument("rhs", nargs="?")
    sp.add_argument("--m", type=int, default=1, help="search field F_{q^m}")
    for name in ("asroot", "cut"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("series")
        sp.add_argument("--n", type=int, default=4)
    return ap


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(list(argv) if argv is not None else None)
        if not args.command:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        session = build_session(args)
        result, text = COMMANDS[args.command](session, args)
    except UsageError as exc:
        print(f"tvf: usage error: {exc}", file=err)
        return 1
    except E.TransvalError as exc:
        code = exit_code(exc)
        kind = "parse error" if code == 1 else "error"
        print(f"tvf: {kind}: {type(exc).__name__}: {exc}", file=err)
        return code
    except (ValueError, OSError) as exc:
        print(f"tvf: usage error: {exc}", file=err)
        return 1
    if session.fmt == "json":
        json.dump({"schema": SCHEMA, "command": args.command, "result": result}, out, indent=2)
        out.write("\n")
    else:
        out.write(text + "\n")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
