"""Command-line surface: file ingestion, dispatch, deterministic reports.

Every run produces a Report carrying the command payload plus an echo
of the inputs and the tool version; rendering is byte-deterministic for
identical inputs (sorted keys, no timestamps).  Exit codes: 0 ok,
2 parse, 3 validation, 4 computation, 5 hypothesis violated.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__, fixtures
from .ahss import (
    Page,
    TwistClass,
    e2_page,
    first_differential,
    integral_first_differential,
    turn_page,
    twist_term,
)
from .errors import MoravakError, ParseError, ValidationError
from .fgl import (
    FGL,
    grouplike_check,
    height,
    series_from_coefficients,
    solve_theta,
    two_series,
)
from .obstruct import (
    ManifoldData,
    fivebrane_check,
    heterotic_check,
    integral_sw,
    phase_invariance_check,
    quadratic_refinement_check,
    relative_obstruction,
    twisted_string_check,
    wu_sq,
)
from .rbk import (
    RbkModule,
    StandardModule,
    TensorModule,
    bar_e2,
    khorami_quotient,
    tor,
)
from .spacefile import parse_file, parse_module, serialize_model
from . import twistgroup
from .steenrod import TriState


@dataclass
class Report:
    command: str
    inputs: dict
    payload: dict
    version: str = __version__

    def to_json(self) -> str:
        doc = {"command": self.command, "inputs": self.inputs,
               "payload": self.payload, "version": self.version}
        return json.dumps(doc, sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"moravak {self.version} :: {self.command}"]
        for key in sorted(self.inputs):
            if key == "echo":
                continue  # the full model echo lives in the JSON block
            lines.append(f"  input {key} = {self.inputs[key]}")
        lines.extend(_render(self.payload, indent=1))
        return "\n".join(lines)

    def render(self, json_only: bool = False) -> str:
        if json_only:
            return self.to_json()
        return self.to_text() + "\n--- json ---\n" + self.to_json()


def _render(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for key in sorted(value, key=str):
            sub = value[key]
            if isinstance(sub, (dict, list)):
                lines.append(f"{pad}{key}:")
                lines.extend(_render(sub, indent + 1))
            else:
                lines.append(f"{pad}{key}: {sub}")
    elif isinstance(value, list):
        for sub in value:
            lines.append(f"{pad}- {sub}")
    else:
        lines.append(f"{pad}{value}")
    return lines


def _resolve_path(raw: str, prefer: str | None = None) -> Path:
    p = Path(raw)
    if p.exists():
        return p
    bundled = fixtures.path(raw, prefer)
    if bundled is not None:
        return bundled
    raise ParseError(f"no such file or bundled fixture: {raw}")


def _tristate(t: TriState) -> str:
    return t.value


# -- twist --------------------------------------------------------------------

def _parse_exponent_list(raw: str) -> tuple[int, ...]:
    raw = raw.strip().strip("()").strip()
    if not raw:
        return ()
    try:
        return tuple(int(x) for x in raw.replace(",", " ").split())
    except ValueError:
        raise ParseError(f"bad exponent list {raw!r}") from None


def cmd_twist(args) -> Report:
    M = args.truncation
    inputs = {"truncation": M}
    payload: dict = {}
    if args.encode is not None:
        f = twistgroup.from_exponents(_parse_exponent_list(args.encode), M)
        inputs["encode"] = args.encode
        payload["element"] = str(f)
        payload["series"] = f.series_string()
        payload["encoded"] = twistgroup.encode(f).value
    if args.decode is not None:
        d = twistgroup.Dyadic(args.decode % (1 << M), M)
        f = twistgroup.decode(d)
        inputs["decode"] = args.decode
        payload["element"] = str(f)
        payload["series"] = f.series_string()
        payload["exponents"] = list(f.exponents)
    if args.multiply is not None:
        f = twistgroup.from_exponents(_parse_exponent_list(args.multiply[0]), M)
        g = twistgroup.from_exponents(_parse_exponent_list(args.multiply[1]), M)
        prod = twistgroup.multiply(f, g)
        inputs["multiply"] = list(args.multiply)
        payload["product"] = str(prod)
        payload["product_encoded"] = twistgroup.encode(prod).value
    if args.hom is not None:
        f = twistgroup.from_exponents(_parse_exponent_list(args.hom), M)
        hom = twistgroup.to_algebra_hom(f, args.n, args.factors)
        inputs["hom"] = args.hom
        payload["assignments"] = {
            f"b{k}": (f"v^{hom.assignment(k)}" if hom.assignment(k) is not None else "0")
            for k in range(hom.truncation)}
    if args.vanishing is not None:
        m, n = args.vanishing
        verdict = twistgroup.vanishing_check(m, n, args.p)
        inputs["vanishing"] = [m, n]
        inputs["p"] = args.p
        payload["verdict"] = verdict.value
        payload["degree_note"] = twistgroup.degree_obstruction_report(n, args.p)
    if not payload:
        raise ParseError("twist: nothing to do "
                         "(use --encode/--decode/--multiply/--hom/--vanishing)")
    return Report("twist", inputs, payload)


# -- tor / khorami ------------------------------------------------------------

def _module_payload(mod) -> dict:
    if isinstance(mod, TensorModule):
        return {"kind": "tensor", "n": mod.n, "truncation": mod.truncation,
                "rank": mod.rank, "degrees": list(mod.degrees)}
    return {"kind": "single", "n": mod.n, "k": mod.k,
            "rank": mod.rank, "degrees": list(mod.degrees)}


def cmd_tor(args) -> Report:
    mod = parse_module(_resolve_path(args.module, ".module"))
    if isinstance(mod, TensorModule):
        mod = mod.factor(args.k)
    lo, hi = args.i
    entries = {}
    for i in range(lo, hi + 1):
        result = tor(mod, StandardModule(args.against), i)
        entries[f"Tor_{i}"] = {"rank": result.rank,
                               "degrees_mod_v": list(result.degree_classes)}
    return Report("tor",
                  {"module": Path(args.module).name, "against": args.against,
                   "range": [lo, hi], **_module_payload(mod)},
                  entries)


def cmd_khorami(args) -> Report:
    mod = parse_module(_resolve_path(args.module, ".module"))
    if isinstance(mod, RbkModule):
        mod = TensorModule.from_single(mod)
    quotient = khorami_quotient(mod)
    hom = twistgroup.AlgebraHom.universal(mod.n, mod.truncation)
    page = bar_e2(mod, hom, max_degree=args.max_degree)
    payload = {
        "quotient": {"rank": quotient.rank,
                     "degrees_mod_v": list(quotient.degree_classes)},
        "bar_page": {f"degree_{m}": entry.rank for m, entry in enumerate(page)},
        "agrees": page[0].rank == quotient.rank,
    }
    return Report("khorami",
                  {"module": Path(args.module).name, **_module_payload(mod)},
                  payload)


# -- ahss ----------------------------------------------------------------------

def _twist_from_arg(space, n: int, raw: str) -> TwistClass:
    algebra = space.algebra
    if raw == "0":
        return TwistClass(algebra.zero, integral=True)
    if raw == "fundamental":
        basis = algebra.basis_elements(n + 2)
        if len(basis) != 1:
            raise ValidationError(
                f"'fundamental' needs a rank-1 degree-{n + 2} space; rank is {len(basis)}")
        return TwistClass(basis[0], integral=True)
    return TwistClass(algebra.element(raw), integral=True)


def _page_payload(page: Page) -> dict:
    ranks = {}
    for p in page.window:
        if page.is_incomplete(p):
            ranks[f"p={p:02d}"] = "edge-incomplete"
        else:
            ranks[f"p={p:02d}"] = page.rank(p)
    return {"label": page.label, "ranks": ranks}


def cmd_ahss(args) -> Report:
    parsed = parse_file(_resolve_path(args.space))
    model = parsed.model
    space = model.space if isinstance(model, ManifoldData) else model
    n = args.n
    twist = _twist_from_arg(space, n, args.twist)
    page2 = e2_page(space, n)
    phi = twist_term(space, twist, n)
    payload: dict = {
        "twist_term": str(phi),
        "differential": f"d_{2 ** (n + 1) - 1}",
        "E2": _page_payload(page2),
    }
    if args.integral:
        result = integral_first_differential(page2, space, twist)
        filled = result.page
        certs = {}
        for p in sorted(result.certificates):
            row = result.certificates[p]
            if row:
                certs[f"p={p:02d}"] = [_tristate(t) for t in row]
        payload["certificates"] = certs
    else:
        filled = first_differential(page2, space, twist)
    turned = turn_page(filled)
    payload[turned.label] = _page_payload(turned)
    payload["note"] = (f"{turned.label} ranks are upper bounds for the limit; "
                       "higher differentials are not determined here")
    return Report("ahss",
                  {"space": Path(args.space).name, "n": n, "twist": args.twist,
                   "integral": bool(args.integral), "echo": serialize_model(parsed)},
                  payload)


# -- fgl -------------------------------------------------------------------------

def _parse_series(raw: str, trunc: int, modulus: int):
    coeffs: dict[int, int] = {}
    for chunk in raw.replace("-", "+").split("+"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if chunk.isdigit():
            coeffs[0] = coeffs.get(0, 0) + int(chunk)
        elif chunk == "x":
            coeffs[1] = coeffs.get(1, 0) + 1
        elif chunk.startswith("x^"):
            coeffs[int(chunk[2:])] = coeffs.get(int(chunk[2:]), 0) + 1
        else:
            raise ParseError(f"bad series term {chunk!r}")
    top = max(coeffs, default=0)
    return series_from_coefficients(
        [coeffs.get(i, 0) for i in range(top + 1)], trunc, modulus)


def _law(name: str, trunc: int, modulus: int) -> FGL:
    name = name.lower()
    if name in ("gm", "multiplicative"):
        return FGL.multiplicative(trunc, modulus)
    if name == "additive":
        return FGL.additive(trunc, modulus)
    raise ParseError(f"unknown law {name!r} (use gm or additive)")


def cmd_fgl(args) -> Report:
    F = _law(args.law, args.truncation, args.modulus)
    inputs = {"law": args.law, "truncation": args.truncation,
              "modulus": args.modulus}
    payload: dict = {}
    if args.two_series:
        payload["two_series"] = str(two_series(F))
    if args.solve_theta is not None:
        thetas = solve_theta(F, args.solve_theta)
        payload["theta"] = {f"theta_{i}": v
                            for i, v in enumerate(thetas.values, start=1)}
    if args.height:
        h = height(F)
        payload["height"] = h if h is not None else \
            f">= log2({args.truncation}) (2-series vanishes within truncation)"
    if args.check_grouplike is not None:
        alpha = _parse_series(args.check_grouplike, args.truncation, args.modulus)
        inputs["series"] = args.check_grouplike
        payload["grouplike"] = grouplike_check(alpha, F)
    if not payload:
        raise ParseError("fgl: nothing to do (use --two-series/--solve-theta/"
                         "--height/--check-grouplike)")
    return Report("fgl", inputs, payload)


# -- obstruct ---------------------------------------------------------------------

def cmd_obstruct(args) -> Report:
    parsed = parse_file(_resolve_path(args.manifold))
    model = parsed.model
    if not isinstance(model, ManifoldData):
        raise ValidationError("obstruct needs manifold metadata in the space file")
    algebra = model.space.algebra
    elem = lambda raw: algebra.element(raw)  # noqa: E731
    inputs = {"manifold": Path(args.manifold).name, "check": args.check,
              "echo": serialize_model(parsed)}
    check = args.check
    if check == "string":
        report = twisted_string_check(model, TwistClass(elem(args.h4)))
        inputs["h4"] = args.h4
        payload = {"status": report.status, "obstruction": str(report.obstruction),
                   "certificate": _tristate(report.certificate),
                   "warnings": list(report.warnings)}
    elif check == "relative":
        report = relative_obstruction(model, TwistClass(elem(args.h4)))
        inputs["h4"] = args.h4
        payload = {"status": report.status, "obstruction": str(report.obstruction),
                   "certificate": _tristate(report.certificate),
                   "warnings": list(report.warnings)}
    elif check == "heterotic":
        report = heterotic_check(model, elem(args.a), elem(args.b))
        inputs["a"], inputs["b"] = args.a, args.b
        payload = {"status": report.status, "obstruction": str(report.obstruction),
                   "certificate": _tristate(report.certificate),
                   "hypothesis_ok": report.hypothesis_ok,
                   "failed_hypotheses": list(report.failed_hypotheses)}
    elif check == "fivebrane":
        report = fivebrane_check(model, elem(args.h5))
        inputs["h5"] = args.h5
        payload = {"status": report.status, "obstruction": str(report.obstruction),
                   "certificate": _tristate(report.certificate),
                   "alpha8": str(report.alpha8),
                   "cross_check_agrees": report.cross_check_agrees,
                   "warnings": list(report.warnings)}
    elif check == "quadratic":
        if parsed.index is None:
            raise ValidationError("quadratic check needs an index table in the file")
        ok = quadratic_refinement_check(model, parsed.index, elem(args.a), elem(args.a2))
        inputs["a"], inputs["a2"] = args.a, args.a2
        payload = {"refinement_holds": ok}
    elif check == "phase":
        if parsed.index is None:
            raise ValidationError("phase check needs an index table in the file")
        report = phase_invariance_check(model, parsed.index, elem(args.a), elem(args.b))
        inputs["a"], inputs["b"] = args.a, args.b
        payload = {"invariant": report.invariant, "correction": report.correction,
                   "sq3_condition_holds": report.sq3_condition_holds,
                   "orientation_status": report.orientation_status,
                   "orientation_certificate": _tristate(report.orientation_certificate)}
    elif check == "wu":
        result = wu_sq(model, args.i, args.j)
        inputs["i"], inputs["j"] = args.i, args.j
        payload = {"wu": str(result)}
    elif check == "integral-sw":
        rep, cert = integral_sw(model, args.i)
        inputs["i"] = args.i
        payload = {"shadow": str(rep), "certificate": _tristate(cert)}
    else:  # pragma: no cover - argparse restricts choices
        raise ParseError(f"unknown check {check!r}")
    return Report("obstruct", inputs, payload)


# -- dispatch ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moravak",
        description="Desk-scale twisted Morava K-theory computations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="emit only the machine-readable JSON block")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("twist", help="the 2-adic group of twists", parents=[common])
    p.add_argument("--encode", help="exponent list like \"(0,1)\"")
    p.add_argument("--decode", type=int, help="dyadic value")
    p.add_argument("--multiply", nargs=2, metavar=("F", "G"))
    p.add_argument("--hom", help="exponent list; emit the coefficient action")
    p.add_argument("--vanishing", nargs=2, type=int, metavar=("M", "N"))
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--n", type=int, default=2, help="height for --hom")
    p.add_argument("--factors", type=int, default=6, help="tensor truncation for --hom")
    p.add_argument("--truncation", type=int, default=8, help="truncation order M")
    p.set_defaults(func=cmd_twist)

    p = sub.add_parser("tor", parents=[common], help="Tor against the cyclic quotients")
    p.add_argument("--module", required=True)
    p.add_argument("--against", choices=["M", "N"], default="M")
    p.add_argument("--k", type=int, default=0,
                   help="tensor factor to restrict to, for tensor module files")
    p.add_argument("--i", nargs=2, type=int, default=(0, 4), metavar=("LO", "HI"))
    p.set_defaults(func=cmd_tor)

    p = sub.add_parser("khorami", parents=[common], help="twisted homology via the quotient")
    p.add_argument("--module", required=True)
    p.add_argument("--max-degree", type=int, default=4)
    p.set_defaults(func=cmd_khorami)

    p = sub.add_parser("ahss", parents=[common], help="twisted page at the first differential")
    p.add_argument("--space", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--twist", default="0", help="expression, 'fundamental', or 0")
    p.add_argument("--integral", action="store_true",
                   help="emit vanishing certificates for the integral lift")
    p.set_defaults(func=cmd_ahss)

    p = sub.add_parser("fgl", parents=[common], help="formal group 2-series arithmetic")
    p.add_argument("--law", default="gm")
    p.add_argument("--modulus", type=int, default=2)
    p.add_argument("--truncation", type=int, default=16)
    p.add_argument("--two-series", action="store_true")
    p.add_argument("--solve-theta", type=int, metavar="I")
    p.add_argument("--height", action="store_true")
    p.add_argument("--check-grouplike", metavar="SERIES")
    p.set_defaults(func=cmd_fgl)

    p = sub.add_parser("obstruct", parents=[common], help="orientation obstruction checks")
    p.add_argument("--manifold", required=True)
    p.add_argument("--check", required=True,
                   choices=["string", "heterotic", "fivebrane", "quadratic",
                            "phase", "relative", "wu", "integral-sw"])
    p.add_argument("--h4", default="0")
    p.add_argument("--h5", default="0")
    p.add_argument("--a", default="0")
    p.add_argument("--b", default="0")
    p.add_argument("--a2", default="0")
    p.add_argument("--i", type=int, default=7)
    p.add_argument("--j", type=int, default=8)
    p.set_defaults(func=cmd_obstruct)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except MoravakError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    print(report.render(json_only=args.json))
    return 0


if __name__ == "__main__":
    sys.exit(main())
