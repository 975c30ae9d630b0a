"""Bundled example algebroids.

The constructors here are the source of truth; the ``.alg`` files shipped in
``fixtures/`` are generated from them by :func:`emit_fixture` and a test keeps
the two byte-identical.
"""
from __future__ import annotations

from importlib import resources

from .algebroid import (Algebroid, AlgebroidMorphism, bivector_entry, cotangent_algebroid,
                        log_tangent_fixture, tangent_algebroid)
from .connection import Connection, induced_top_connection
from .errors import UnknownFixture
from .exterior import Multivector
from .polycore import Derivation, PolyRing
from .specfile import Bundle, emit_spec, parse_spec

NAMES = ("tangent-A1", "tangent-A2", "log-x", "log-xy", "sl2", "poisson-symplectic", "poisson-logx",
         "bialgebroid-symplectic")


def sl2_algebroid(ring: PolyRing | None = None) -> Algebroid:
    """sl2 with basis (e, f, h), zero anchor, over ``ring`` (default: no variables)."""
    ring = ring or PolyRing(())
    z, one = ring.zero(), ring.one()
    two = ring.const(2)
    bracket = {
        (0, 1): (z, z, one),     # [e, f] = h
        (0, 2): (-two, z, z),    # [e, h] = -2e
        (1, 2): (z, two, z),     # [f, h] = 2f
    }
    return Algebroid(ring, ("e", "f", "h"), [Derivation.zero(ring)] * 3, bracket,
                     (1,) * ring.nvars, (0, 0, 0), "sl2")


def _tangent(n: int) -> Bundle:
    ring = PolyRing(("x", "y")[:n])
    L = tangent_algebroid(ring, name=f"tangent-A{n}")
    return Bundle(L, L.name, f"tangent algebroid of affine {n}-space; trivial connection on the top power",
                  connection=Connection.trivial(L))


def _log(vars_) -> Bundle:
    ring = PolyRing(tuple(vars_))
    L = log_tangent_fixture(ring, vars_, name="log-" + "".join(vars_))
    T = tangent_algebroid(ring)
    m = [[ring.var(i) if i == j else ring.zero() for j in range(ring.nvars)] for i in range(ring.nvars)]
    phi = AlgebroidMorphism(L, T, m)
    nabla = induced_top_connection(Connection.trivial(T), phi)
    return Bundle(L, L.name, f"logarithmic derivations along {'*'.join(vars_)}; connection induced from the "
                  "inclusion into the tangent algebroid", connection=nabla, morphism=phi, target_ref="tangent")


def _sl2() -> Bundle:
    L = sl2_algebroid()
    return Bundle(L, "sl2", "sl2 over a point with basis (e, f, h)", connection=Connection.trivial(L))


def _poisson(pi_text: str, name: str, description: str, target_ref: str) -> Bundle:
    from .specfile import resolve_target

    ring = PolyRing(("x", "y"))
    T = tangent_algebroid(ring)
    pi = Multivector(T, {(0, 1): ring.parse(pi_text)})
    L = cotangent_algebroid(ring, pi, name=name)
    target = resolve_target(target_ref, ring)
    # pi~(dx_i) = sum_j pi(dx_i, dx_j) d/dx_j, written in the target basis
    sharp = [[bivector_entry(pi, i, j) for j in range(2)] for i in range(2)]
    if target_ref == "tangent":
        cols = sharp
    else:
        # target basis (x d/dx, d/dy): a d/dx component must be divisible by x
        cols = [[_div_x(col[0]), col[1]] for col in sharp]
    m = [[cols[j][i] for j in range(2)] for i in range(2)]
    phi = AlgebroidMorphism(L, target, m)
    return Bundle(L, name, description, connection=Connection.trivial(L), morphism=phi,
                  target_ref=target_ref, bivector=pi)


def _div_x(p):
    from .polycore import poly_divide_exact
    return poly_divide_exact(p, p.ring.var(0))


def _bialgebroid() -> Bundle:
    ring = PolyRing(("x", "y"))
    L = tangent_algebroid(ring, name="tangent-A2")
    pi = Multivector(L, {(0, 1): ring.one()})
    dual = cotangent_algebroid(ring, pi, name="cotangent-symplectic")
    return Bundle(L, "bialgebroid-symplectic", "tangent algebroid of the plane paired with the cotangent "
                  "algebroid of d/dx^d/dy", connection=Connection.trivial(L), bivector=pi, dual=dual)


_BUILDERS = {
    "tangent-A1": lambda: _tangent(1),
    "tangent-A2": lambda: _tangent(2),
    "log-x": lambda: _log(["x"]),
    "log-xy": lambda: _log(["x", "y"]),
    "sl2": _sl2,
    "poisson-symplectic": lambda: _poisson("1", "poisson-symplectic",
                                           "cotangent algebroid of the symplectic bivector d/dx^d/dy",
                                           "tangent"),
    "poisson-logx": lambda: _poisson("x", "poisson-logx",
                                     "cotangent algebroid of x*d/dx^d/dy, anchored in the log-x derivations",
                                     "log:x"),
    "bialgebroid-symplectic": _bialgebroid,
}


def fixture(name: str) -> Bundle:
    try:
        build = _BUILDERS[name]
    except KeyError:
        raise UnknownFixture(name) from None
    return build()


def list_fixtures() -> tuple:
    return NAMES


def emit_fixture(name: str) -> str:
    return emit_spec(fixture(name))


def bundled_text(name: str) -> str:
    if name not in _BUILDERS:
        raise UnknownFixture(name)
    return resources.files("algebroid_kit").joinpath("fixtures", f"{name}.alg").read_text(encoding="utf-8")


def load_bundled(name: str) -> Bundle:
    return parse_spec(bundled_text(name))
