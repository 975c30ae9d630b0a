"""Command line entry point ``algebroid-kit``.

Exit codes: 0 pass, 1 fail or computation error, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .algebroid import AxiomReport, check_axioms, check_morphism, cotangent_algebroid
from .bvhom import BVOperator, duality_check, homology
from .cecomplex import CochainComplex, check_bialgebroid, dual_cochain_map
from .connection import Connection, check_flat
from .errors import AlgebroidKitError, NotPoisson, SemanticError, SpecParseError, UnknownFixture
from .exterior import gerstenhaber_morphism_check, sn_bracket
from .fixtures import NAMES, bundled_text, fixture
from .specfile import Bundle, emit_spec, load_spec
from .uepbw import check_ue_functor, pbw_parse

SCHEMA = 1


class _Usage(Exception):
    pass


def _load(ref: str) -> Bundle:
    if os.path.exists(ref):
        return load_spec(ref)
    if ref in NAMES:
        return fixture(ref)
    raise _Usage(f"{ref!r} is neither a spec file nor a fixture name")


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _reports(pairs) -> tuple[str, dict]:
    payload = {name: rep.as_dict() for name, rep in pairs}
    return _status(all(rep.passed for _, rep in pairs)), payload


# -- commands ------------------------------------------------------------

def cmd_check(args):
    b = _load(args.spec)
    pairs = [("axioms", check_axioms(b.algebroid, args.samples, args.seed))]
    if b.connection is not None:
        pairs.append(("flatness", check_flat(b.connection)))
    if b.morphism is not None:
        pairs.append(("morphism", check_morphism(b.morphism)))
    if b.dual is not None:
        pairs.append(("dual_axioms", check_axioms(b.dual, args.samples, args.seed)))
    if b.bivector is not None:
        rep = AxiomReport(checked=1)
        pp = sn_bracket(b.bivector, b.bivector)
        if pp:
            rep.add("poisson", ("[pi,pi]",), pp, 0)
        else:
            # the bivector describes the dual when present, else the algebroid itself
            described = b.dual if b.dual is not None else b.algebroid
            expected = cotangent_algebroid(b.ring, b.bivector, described.var_weights, described.name)
            rep.checked += 1
            if expected != described:
                rep.add("cotangent_match", (described.name,), described, expected)
        pairs.append(("bivector", rep))
    return _reports(pairs)


def _complex(b: Bundle, twisted: bool) -> CochainComplex:
    if not twisted:
        return CochainComplex(b.algebroid)
    if b.connection is None:
        raise _Usage("--twisted needs a [connection] section")
    # bundled connections act on the top exterior power
    return CochainComplex(b.algebroid, b.connection, coefficient_weight=b.algebroid.top_weight())


def _table(rep) -> dict:
    return rep.as_dict()


def cmd_cohomology(args):
    b = _load(args.spec)
    rep = _complex(b, args.twisted).cohomology(args.max_weight)
    return "pass", {"cohomology": _table(rep)}


def _connection(b: Bundle) -> Connection:
    return b.connection if b.connection is not None else Connection.trivial(b.algebroid)


def cmd_homology(args):
    b = _load(args.spec)
    rep = homology(BVOperator(b.algebroid, _connection(b), seed=args.seed), args.max_weight)
    return "pass", {"homology": _table(rep)}


def cmd_duality(args):
    b = _load(args.spec)
    phi = None
    if args.morphism:
        src = _load(args.morphism)
        if src.morphism is None:
            raise _Usage(f"{args.morphism} has no [morphism] section")
        if src.morphism.target != b.algebroid:
            raise SemanticError(f"the morphism in {args.morphism} does not target {args.spec}")
        phi = src.morphism
        phi = type(phi)(phi.source, b.algebroid, phi.matrix)
    rep = duality_check(b.algebroid, _connection(b), phi, args.max_weight)
    return _status(rep.passed), rep.as_dict()


def cmd_bv_verify(args):
    b = _load(args.spec)
    B = BVOperator(b.algebroid, _connection(b), validate=False)
    pairs = [("square_zero", B.check_square_zero()),
             ("generating_identity", B.check_generating_identity(args.samples, args.seed))]
    rec = AxiomReport(checked=1)
    got = B.recover_connection()
    want = B.connection.multipliers()
    if got != want:
        rec.add("connection_recovery", ("d_BV(top)",), ", ".join(map(str, got)), ", ".join(map(str, want)))
    pairs.append(("connection_recovery", rec))
    status, payload = _reports(pairs)
    payload["global_sign"] = B.global_sign
    return status, payload


def cmd_bialgebroid(args):
    b = _load(args.spec)
    dual = b.dual
    if dual is None:
        if b.bivector is None:
            raise _Usage("bialgebroid needs [dual.*] sections or a [bivector]")
        dual = cotangent_algebroid(b.ring, b.bivector)
    return _reports([("bialgebroid", check_bialgebroid(b.algebroid, dual, args.samples, args.seed))])


def cmd_pbw(args):
    b = _load(args.spec)
    if args.expr is None:
        raise _Usage("pbw needs --expr")
    try:
        value = pbw_parse(b.algebroid, args.expr)
    except AlgebroidKitError as exc:
        raise _Usage(str(exc)) from None
    return "pass", {"expr": args.expr, "normal_form": str(value), "degree": value.degree()}


def cmd_morphism_check(args):
    b = _load(args.spec)
    if b.morphism is None:
        raise _Usage("morphism-check needs a [morphism] section")
    phi = b.morphism
    pairs = [("morphism", check_morphism(phi))]
    if pairs[0][1].passed:
        pairs += [("gerstenhaber", gerstenhaber_morphism_check(phi, 2, args.samples, args.seed)),
                  ("cochain_map", dual_cochain_map(phi, args.samples, args.seed)),
                  ("enveloping", check_ue_functor(phi, 2, args.samples, args.seed))]
    return _reports(pairs)


def cmd_cotangent(args):
    b = _load(args.spec)
    if b.bivector is None:
        raise _Usage("cotangent needs a [bivector] section")
    try:
        L = cotangent_algebroid(b.ring, b.bivector, b.algebroid.var_weights, name="cotangent")
    except NotPoisson as exc:
        return "fail", {"error": "NotPoisson", "witness": str(exc.witness)}
    text = emit_spec(Bundle(L, L.name, "", bivector=b.bivector))
    rep = check_axioms(L, args.samples, args.seed)
    return _status(rep.passed), {"spec": text, "axioms": rep.as_dict()}


def cmd_fixtures(args):
    if args.action == "list":
        return "pass", {"fixtures": list(NAMES)}
    if not args.name:
        raise _Usage("fixtures emit needs a fixture name")
    try:
        return "pass", {"name": args.name, "spec": bundled_text(args.name)}
    except UnknownFixture as exc:
        raise _Usage(str(exc)) from None


COMMANDS = {
    "check": cmd_check, "cohomology": cmd_cohomology, "homology": cmd_homology, "duality": cmd_duality,
    "bv-verify": cmd_bv_verify, "bialgebroid": cmd_bialgebroid, "pbw": cmd_pbw,
    "morphism-check": cmd_morphism_check, "cotangent": cmd_cotangent, "fixtures": cmd_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="algebroid-kit",
                                description="Exact checks and invariants of Lie algebroids over polynomial rings.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default 0)")
    common.add_argument("--samples", type=int, default=100, help="random samples per suite (default 100)")
    sub = p.add_subparsers(dest="command", required=True)

    def spec_cmd(name, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("spec", help="spec file or fixture name")
        return sp

    spec_cmd("check", "validate the algebroid and its optional sections")
    sp = spec_cmd("cohomology", "weight-graded Chevalley-Eilenberg cohomology")
    sp.add_argument("--max-weight", type=int, default=6)
    sp.add_argument("--twisted", action="store_true", help="use the [connection] as coefficients")
    sp = spec_cmd("homology", "homology of the BV operator of the [connection]")
    sp.add_argument("--max-weight", type=int, default=6)
    sp = spec_cmd("duality", "compare homology with twisted cohomology")
    sp.add_argument("--max-weight", type=int, default=4)
    sp.add_argument("--morphism", help="spec or fixture whose [morphism] maps into SPEC")
    spec_cmd("bv-verify", "square-zero, generating identity and connection recovery")
    spec_cmd("bialgebroid", "bialgebroid compatibility with the dual algebroid")
    sp = spec_cmd("pbw", "PBW normal form in the enveloping algebra")
    sp.add_argument("--expr", help="expression in ring variables and basis names")
    spec_cmd("morphism-check", "check the [morphism] and its induced maps")
    spec_cmd("cotangent", "build the cotangent algebroid of the [bivector]")
    sp = sub.add_parser("fixtures", parents=[common], help="list or emit bundled fixtures")
    sp.add_argument("action", choices=("list", "emit"))
    sp.add_argument("name", nargs="?")
    return p


# -- output --------------------------------------------------------------

def _color(text: str, status: str, stream) -> str:
    mode = os.environ.get("ALGEBROID_KIT_COLOR", "auto")
    if mode == "never" or not getattr(stream, "isatty", lambda: False)():
        return text
    code = {"pass": "32", "fail": "31", "error": "31"}.get(status, "0")
    return f"\033[{code}m{text}\033[0m"


def _human(command: str, status: str, payload: dict, out) -> None:
    if command == "pbw" and status == "pass":
        print(payload["normal_form"], file=out)
        return
    if command == "fixtures" and status == "pass":
        if "fixtures" in payload:
            print("\n".join(payload["fixtures"]), file=out)
        else:
            out.write(payload["spec"])
        return
    if command == "cotangent" and "spec" in payload:
        out.write(payload["spec"])
    _human_payload(payload, out, "")
    print(_color(status.upper(), status, out), file=out)


def _human_payload(payload, out, indent):
    for key, value in payload.items():
        if key == "spec":
            continue
        if isinstance(value, dict) and "pieces" in value:
            print(f"{indent}{key} ({value['kind']}, weights {value['min_weight']}..{value['max_weight']})", file=out)
            print(f"{indent}  totals by degree: {value['totals']}", file=out)
            for piece in value["pieces"]:
                print(f"{indent}  degree {piece['degree']:>2}  weight {piece['weight']:>3}  dim {piece['dim']}", file=out)
        elif isinstance(value, dict) and "violations" in value:
            print(f"{indent}{key}: {'ok' if value['passed'] else 'FAILED'} ({value['checked']} checks)", file=out)
            for v in value["violations"][:5]:
                print(f"{indent}  {v['axiom']} at {', '.join(v['witness'])}: {v['lhs']} != {v['rhs']}", file=out)
        elif isinstance(value, dict):
            print(f"{indent}{key}:", file=out)
            _human_payload(value, out, indent + "  ")
        else:
            print(f"{indent}{key}: {value}", file=out)


def _emit(args, status: str, payload: dict, out) -> None:
    if getattr(args, "json", False):
        doc = {"schema": SCHEMA, "command": args.command, "input": getattr(args, "spec", None),
               "status": status, "seed": args.seed, "payload": payload}
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        _human(args.command, status, payload, out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        status, payload = COMMANDS[args.command](args)
    except (_Usage, SpecParseError, SemanticError) as exc:
        payload = {"error": type(exc).__name__.lstrip("_"), "message": str(exc)}
        if isinstance(exc, SpecParseError):
            payload.update(line=exc.line, column=exc.column)
        _emit(args, "error", payload, out)
        if not args.json:
            print(f"algebroid-kit: error: {exc}", file=sys.stderr)
        return 2
    except AlgebroidKitError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        _emit(args, "error", payload, out)
        return 1
    _emit(args, status, payload, out)
    return 0 if status == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
