"""Reading and writing the ``.alg`` spec-file format.

A spec file is line oriented.  ``#`` starts a comment line, ``[section]``
opens a section and every other non-blank line is ``key = value``::

    [ring]
    variables = x, y
    weights = 1, 1

    [algebroid]
    name = log-xy
    basis = e1, e2
    weights = 0, 0

    [anchor]
    e1 = x, 0            # one polynomial per ring variable
    e2 = 0, y

    [bracket]
    "e1,e2" = 0, 0       # coefficients of [e1, e2] on the basis

    [connection]          # operator matrices, rows separated by ';'
    rank = 1
    e1 = 1
    e2 = 1

    [morphism]
    target = tangent      # tangent | log:VARS | fixture:NAME | path
    matrix = x, 0; 0, y

    [bivector]
    "x,y" = 1

The ``dual.algebroid``, ``dual.anchor`` and ``dual.bracket`` sections describe a
second algebroid on the same ring, used by the bialgebroid check.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Optional

from .algebroid import (Algebroid, AlgebroidMorphism, log_tangent_fixture, tangent_algebroid)
from .connection import Connection
from .errors import (AlgebroidKitError, ExpressionSyntaxError, NonConstantDivisor, SemanticError,
                     SpecParseError, UnknownFixture, UnknownVariable)
from .exterior import Multivector
from .polycore import IDENTIFIER, Derivation, PolyRing, format_poly, poly_parse

SECTIONS = ("ring", "algebroid", "anchor", "bracket", "connection", "morphism", "bivector",
            "dual.algebroid", "dual.anchor", "dual.bracket")

_HEADER = re.compile(r"\[([a-z]+(?:\.[a-z]+)?)\]\s*\Z")
_ENTRY = re.compile(r'("[^"]*"|[A-Za-z][A-Za-z0-9_]*)\s*=\s*(.*?)\s*\Z')


@dataclass
class Bundle:
    """Objects described by one spec file."""

    algebroid: Algebroid
    name: str = ""
    description: str = ""
    connection: Optional[Connection] = None
    morphism: Optional[AlgebroidMorphism] = None
    target_ref: str = ""
    bivector: Optional[Multivector] = None
    dual: Optional[Algebroid] = None

    @property
    def ring(self) -> PolyRing:
        return self.algebroid.ring


@dataclass
class _Value:
    text: str
    line: int
    column: int


@dataclass
class _Section:
    name: str
    line: int
    entries: dict = field(default_factory=dict)


def _split(value: _Value, sep: str = ","):
    """Split a value on ``sep`` outside parentheses, keeping columns."""
    out, depth, start = [], 0, 0
    text = value.text
    for i, ch in enumerate(text + sep):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0 or i == len(text):
            piece = text[start:i]
            lead = len(piece) - len(piece.lstrip())
            out.append(_Value(piece.strip(), value.line, value.column + start + lead))
            start = i + 1
    if len(out) == 1 and not out[0].text:
        return []
    return out


def _lex(text: str):
    sections: dict[str, _Section] = {}
    description = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if not sections:
                description.append(stripped[1:].strip())
            continue
        # trailing comments
        body = raw.split("#", 1)[0].rstrip()
        stripped = body.strip()
        col0 = len(body) - len(body.lstrip()) + 1
        if stripped.startswith("["):
            m = _HEADER.match(stripped)
            if not m or m.group(1) not in SECTIONS:
                raise SpecParseError(f"malformed section header {stripped!r}; expected one of "
                                     + ", ".join(f"[{s}]" for s in SECTIONS), lineno, col0)
            name = m.group(1)
            if name in sections:
                raise SpecParseError(f"duplicate section [{name}]", lineno, col0)
            current = sections[name] = _Section(name, lineno)
            continue
        m = _ENTRY.match(stripped)
        if not m:
            raise SpecParseError(f"expected 'key = value', got {stripped!r}", lineno, col0)
        if current is None:
            raise SpecParseError("entry before any section header", lineno, col0)
        key = m.group(1)
        if key in current.entries:
            raise SpecParseError(f"duplicate key {key} in [{current.name}]", lineno, col0)
        current.entries[key] = _Value(m.group(2), lineno, col0 + m.start(2))
    return sections, " ".join(description)


def _expr(ring: PolyRing, v: _Value):
    try:
        return poly_parse(ring, v.text)
    except ExpressionSyntaxError as exc:
        raise SpecParseError(f"expected {exc.expected} in {v.text!r}", v.line, v.column + exc.position) from None
    except UnknownVariable as exc:
        raise SemanticError(f"line {v.line}: unknown variable {exc.name!r}") from None
    except (NonConstantDivisor, ZeroDivisionError) as exc:
        raise SpecParseError(str(exc), v.line, v.column) from None


def _names(v: _Value, what: str):
    names = [p.text for p in _split(v)]
    for p in _split(v):
        if not IDENTIFIER.match(p.text):
            raise SpecParseError(f"invalid {what} name {p.text!r}", p.line, p.column)
    if len(set(names)) != len(names):
        raise SemanticError(f"line {v.line}: repeated {what} name")
    return names


def _ints(v: _Value):
    out = []
    for p in _split(v):
        try:
            out.append(int(p.text))
        except ValueError:
            raise SpecParseError(f"expected an integer, got {p.text!r}", p.line, p.column) from None
    return out


def _require(sections, name, line=None):
    if name not in sections:
        raise SemanticError(f"missing section [{name}]")
    return sections[name]


def _get(sec: _Section, key: str) -> _Value:
    if key not in sec.entries:
        raise SemanticError(f"[{sec.name}] (line {sec.line}) lacks '{key}'")
    return sec.entries[key]


def _polys(ring, v: _Value, count: int, what: str):
    parts = _split(v)
    if len(parts) != count:
        raise SemanticError(f"line {v.line}: {what} needs {count} entries, got {len(parts)}")
    return [_expr(ring, p) for p in parts]


def _pair_key(key: str, v: _Value, names):
    if not (key.startswith('"') and key.endswith('"')):
        raise SpecParseError(f'bracket keys must be quoted pairs like "a,b", got {key}', v.line, 1)
    parts = [p.strip() for p in key[1:-1].split(",")]
    if len(parts) != 2:
        raise SpecParseError(f"expected two names in {key}", v.line, 1)
    for p in parts:
        if p not in names:
            raise SemanticError(f"line {v.line}: undeclared name {p!r}")
    i, j = names.index(parts[0]), names.index(parts[1])
    if not i < j:
        raise SemanticError(f"line {v.line}: key {key} must list its names in increasing basis order")
    return i, j


def _algebroid(sections, ring, vw, prefix=""):
    head = _require(sections, prefix + "algebroid")
    basis = _names(_get(head, "basis"), "basis")
    overlap = set(basis) & set(ring.variables)
    if overlap:
        raise SemanticError(f"names used both as variables and basis elements: {sorted(overlap)}")
    name = head.entries["name"].text if "name" in head.entries else ""
    bw = None
    if "weights" in head.entries:
        bw = _ints(head.entries["weights"])
        if len(bw) != len(basis):
            raise SemanticError(f"line {head.entries['weights'].line}: need {len(basis)} basis weights")
    if (bw is None) != (vw is None):
        raise SemanticError("weights must be given for both the ring and the algebroid, or neither")
    anchor_sec = sections.get(prefix + "anchor", _Section(prefix + "anchor", head.line))
    anchor = []
    for b in basis:
        if b not in anchor_sec.entries:
            raise SemanticError(f"[{anchor_sec.name}] lacks an entry for {b}")
        anchor.append(Derivation(ring, _polys(ring, anchor_sec.entries[b], ring.nvars, f"anchor of {b}")))
    for k, v in anchor_sec.entries.items():
        if k not in basis:
            raise SemanticError(f"line {v.line}: undeclared basis name {k!r}")
    bracket = {}
    for k, v in sections.get(prefix + "bracket", _Section("", 0)).entries.items():
        i, j = _pair_key(k, v, basis)
        bracket[(i, j)] = tuple(_polys(ring, v, len(basis), f"bracket {k}"))
    return Algebroid(ring, basis, anchor, bracket, vw, bw, name)


def _matrix(ring, v: _Value, rows: int, cols: int):
    out = []
    row_vals = _split(v, ";")
    if len(row_vals) != rows:
        raise SemanticError(f"line {v.line}: expected {rows} rows, got {len(row_vals)}")
    for rv in row_vals:
        out.append(_polys(ring, rv, cols, "matrix row"))
    return out


def resolve_target(ref: str, ring: PolyRing, base_dir: str | None = None) -> Algebroid:
    if ref == "tangent":
        return tangent_algebroid(ring)
    if ref.startswith("log:"):
        vars_ = [p.strip() for p in ref[4:].split(",")]
        for p in vars_:
            if p not in ring.variables:
                raise SemanticError(f"morphism target log:{ref[4:]} uses unknown variable {p!r}")
        return log_tangent_fixture(ring, vars_)
    if ref.startswith("fixture:"):
        from .fixtures import fixture
        return fixture(ref[8:]).algebroid
    path = ref if base_dir is None else os.path.join(base_dir, ref)
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read(), base_dir=os.path.dirname(path)).algebroid


def parse_spec(text: str, base_dir: str | None = None) -> Bundle:
    sections, description = _lex(text)
    ring_sec = _require(sections, "ring")
    variables = _names(ring_sec.entries["variables"], "variable") if "variables" in ring_sec.entries else []
    ring = PolyRing(tuple(variables))
    vw = None
    if "weights" in ring_sec.entries:
        vw = _ints(ring_sec.entries["weights"])
        if len(vw) != ring.nvars:
            raise SemanticError(f"line {ring_sec.entries['weights'].line}: need {ring.nvars} variable weights")
        if any(w < 0 for w in vw):
            raise SemanticError("variable weights must be nonnegative")
    L = _algebroid(sections, ring, vw)
    bundle = Bundle(L, L.name, description)

    if "connection" in sections:
        sec = sections["connection"]
        r = _ints(_get(sec, "rank"))
        if len(r) != 1 or r[0] < 1:
            raise SemanticError(f"line {sec.line}: connection rank must be a positive integer")
        mats = []
        for b in L.basis_names:
            mats.append(_matrix(ring, _get(sec, b), r[0], r[0]))
        for k, v in sec.entries.items():
            if k != "rank" and k not in L.basis_names:
                raise SemanticError(f"line {v.line}: undeclared basis name {k!r}")
        bundle.connection = Connection(L, mats)

    if "morphism" in sections:
        sec = sections["morphism"]
        ref = _get(sec, "target").text
        try:
            T = resolve_target(ref, ring, base_dir)
        except (OSError, UnknownFixture) as exc:
            raise SemanticError(f"cannot resolve morphism target {ref!r}: {exc}") from None
        if T.ring != ring:
            raise SemanticError("morphism target lives over a different ring")
        bundle.morphism = AlgebroidMorphism(L, T, _matrix(ring, _get(sec, "matrix"), T.rank, L.rank))
        bundle.target_ref = ref

    if "bivector" in sections:
        T = tangent_algebroid(ring)
        comps = {}
        for k, v in sections["bivector"].entries.items():
            comps[_pair_key(k, v, list(ring.variables))] = _expr(ring, v)
        bundle.bivector = Multivector(T, comps)

    if "dual.algebroid" in sections:
        bundle.dual = _algebroid(sections, ring, vw, prefix="dual.")
    for s in ("dual.anchor", "dual.bracket"):
        if s in sections and "dual.algebroid" not in sections:
            raise SemanticError(f"[{s}] needs a [dual.algebroid] section")
    return bundle


def load_spec(path: str) -> Bundle:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read(), base_dir=os.path.dirname(os.path.abspath(path)))


# -- emission ----------------------------------------------------------------

def _join(polys) -> str:
    return ", ".join(format_poly(p) for p in polys)


def _emit_algebroid(L: Algebroid, prefix: str, out: list):
    out.append(f"[{prefix}algebroid]")
    if L.name:
        out.append(f"name = {L.name}")
    out.append("basis = " + ", ".join(L.basis_names))
    if L.has_weights:
        out.append("weights = " + ", ".join(str(w) for w in L.basis_weights))
    out.append("")
    out.append(f"[{prefix}anchor]")
    for b, d in zip(L.basis_names, L.anchor):
        out.append(f"{b} = {_join(d.components)}")
    out.append("")
    out.append(f"[{prefix}bracket]")
    for (i, j), vec in sorted(L.bracket.items()):
        if any(vec):
            out.append(f'"{L.basis_names[i]},{L.basis_names[j]}" = {_join(vec)}')
    out.append("")


def _emit_matrix(m) -> str:
    return "; ".join(_join(row) for row in m)


def emit_spec(bundle: Bundle) -> str:
    L = bundle.algebroid
    out = []
    if bundle.description:
        out.append(f"# {bundle.description}")
    out.append("[ring]")
    out.append("variables = " + ", ".join(L.ring.variables))
    if L.has_weights:
        out.append("weights = " + ", ".join(str(w) for w in L.var_weights))
    out.append("")
    _emit_algebroid(L, "", out)
    if bundle.connection is not None:
        c = bundle.connection
        out.append("[connection]")
        out.append(f"rank = {c.module_rank}")
        for b, m in zip(L.basis_names, c.matrices):
            out.append(f"{b} = {_emit_matrix(m)}")
        out.append("")
    if bundle.morphism is not None:
        out.append("[morphism]")
        out.append(f"target = {bundle.target_ref}")
        out.append(f"matrix = {_emit_matrix(bundle.morphism.matrix)}")
        out.append("")
    if bundle.bivector is not None:
        out.append("[bivector]")
        names = L.ring.variables
        for (i, j), c in sorted(bundle.bivector.components.items()):
            out.append(f'"{names[i]},{names[j]}" = {format_poly(c)}')
        out.append("")
    if bundle.dual is not None:
        _emit_algebroid(bundle.dual, "dual.", out)
    while out and out[-1] == "":
        out.pop()
    return "\n".join(out) + "\n"


def bundle_error_location(exc: AlgebroidKitError) -> dict:
    if isinstance(exc, SpecParseError):
        return {"line": exc.line, "column": exc.column}
    return {}
