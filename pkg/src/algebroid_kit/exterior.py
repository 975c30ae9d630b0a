"""Multivectors, forms, the Schouten-Nijenhuis bracket and Cartan calculus.

Elements are stored on sorted index tuples.  Sign conventions, fixed once:

* ``wedge`` sorts the concatenated index list; the sign is the parity of that sort.
* ``contract(eps_I, e_J) = sign(J + (I minus J)) * eps_(I minus J)``; on a single
  vector this is the left derivation ``i_{e_k} eps_I = (-1)^pos eps_(I minus k)``.
* The bracket against a function: ``[D_1^...^D_p, g] = sum_i (-1)^(p-i) a(D_i)(g) D_1^..^D_i-hat..^D_p``
  and ``[g, P] = -(-1)^(p-1) [P, g]``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Mapping

from .algebroid import (Algebroid, AlgebroidMorphism, AxiomReport, bracket_sections, same_algebroid)
from .errors import AlgebroidMismatch, DegreeError
from .polycore import Poly, format_combination


def merge_sign(seq) -> int:
    """Parity of the permutation sorting ``seq``; 0 if an index repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    inv = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inv += 1
    return -1 if inv % 2 else 1


class _Graded:
    _kind = "?"
    _symbol = "?"

    __slots__ = ("algebroid", "components")

    def __init__(self, algebroid: Algebroid, components: Mapping | None = None):
        comps = {}
        for idx, c in (components or {}).items():
            idx = tuple(idx)
            if list(idx) != sorted(set(idx)) or any(not 0 <= i < algebroid.rank for i in idx):
                raise ValueError(f"index tuple {idx} is not strictly increasing in range")
            if not isinstance(c, Poly):
                c = algebroid.ring.const(c)
            if c:
                comps[idx] = comps[idx] + c if idx in comps else c
        self.algebroid = algebroid
        self.components = {k: v for k, v in comps.items() if v}

    @classmethod
    def basis(cls, algebroid, idx):
        return cls(algebroid, {tuple(idx): algebroid.ring.one()})

    @classmethod
    def function(cls, algebroid, f):
        return cls(algebroid, {(): f})

    @classmethod
    def zero(cls, algebroid):
        return cls(algebroid)

    def _new(self, comps):
        return type(self)(self.algebroid, comps)

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        same_algebroid(self.algebroid, other.algebroid)

    def coefficient(self, idx) -> Poly:
        return self.components.get(tuple(idx), self.algebroid.ring.zero())

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self):
        return bool(self.components)

    def degrees(self) -> set[int]:
        return {len(k) for k in self.components}

    def degree(self) -> int:
        """Degree of a homogeneous nonzero element (0 for zero)."""
        ds = self.degrees()
        if len(ds) > 1:
            raise DegreeError(f"element of mixed degrees {sorted(ds)}")
        return ds.pop() if ds else 0

    def part(self, k: int):
        return self._new({i: c for i, c in self.components.items() if len(i) == k})

    def __add__(self, other):
        self._check(other)
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = out[k] + v if k in out else v
        return self._new(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._new({k: -v for k, v in self.components.items()})

    def scale(self, f):
        return self._new({k: f * v for k, v in self.components.items()})

    def __mul__(self, f):
        if isinstance(f, _Graded):
            return NotImplemented
        return self.scale(f)

    __rmul__ = __mul__

    def wedge(self, other):
        self._check(other)
        out = {}
        for I, f in self.components.items():
            for J, g in other.components.items():
                s = merge_sign(I + J)
                if s:
                    K = tuple(sorted(I + J))
                    t = f * g if s > 0 else -(f * g)
                    out[K] = out[K] + t if K in out else t
        return self._new(out)

    def __xor__(self, other):
        return self.wedge(other)

    def _basis_weight(self, idx, basis_weights) -> int:
        raise NotImplementedError

    def weighted_degrees(self, var_weights, basis_weights) -> set[int]:
        out = set()
        for idx, c in self.components.items():
            bw = self._basis_weight(idx, basis_weights)
            out |= {w + bw for w in c.weighted_degrees(var_weights)}
        return out

    def homogeneous_weight(self, var_weights, basis_weights):
        ws = self.weighted_degrees(var_weights, basis_weights)
        if not ws:
            return None
        if len(ws) > 1:
            raise ValueError(f"not weight-homogeneous: weights {sorted(ws)}")
        return ws.pop()

    def __eq__(self, other):
        return (type(other) is type(self) and self.algebroid == other.algebroid
                and self.components == other.components)

    def __hash__(self):
        return hash(frozenset(self.components.items()))

    def _label(self, idx) -> str:
        names = self.algebroid.basis_names
        return "^".join(f"{self._symbol}{names[i]}" if self._symbol else names[i] for i in idx)

    def __str__(self):
        order = sorted(self.components, key=lambda t: (len(t), t))
        return format_combination((self.components[idx], self._label(idx)) for idx in order)

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class Multivector(_Graded):
    """Element of the exterior algebra of L over A, on the basis e_I."""

    __slots__ = ()
    _symbol = ""

    @classmethod
    def from_section(cls, algebroid, u):
        return cls(algebroid, {(i,): c for i, c in enumerate(u)})

    def to_section(self):
        if any(len(k) != 1 for k in self.components):
            raise DegreeError("not a degree-1 multivector")
        return tuple(self.coefficient((i,)) for i in range(self.algebroid.rank))

    def _basis_weight(self, idx, basis_weights):
        return sum(basis_weights[i] for i in idx)


class Form(_Graded):
    """Element of the exterior algebra of the dual, on the dual basis eps_I."""

    __slots__ = ()
    _symbol = "eps_"

    def _label(self, idx):
        return "^".join(f"eps{i + 1}" for i in idx)

    def _basis_weight(self, idx, basis_weights):
        return -sum(basis_weights[i] for i in idx)


def wedge(a, b):
    return a.wedge(b)


# -- SN bracket ------------------------------------------------------------

def _monomial_bracket(L: Algebroid, I, f: Poly, J, g: Poly) -> Multivector:
    p, q = len(I), len(J)
    ring = L.ring
    if p == 0 and q == 0:
        return Multivector.zero(L)
    if q == 0:
        out = {}
        for a, i in enumerate(I):
            val = f * L.anchor[i](g)
            if val:
                rest = I[:a] + I[a + 1:]
                sign = (-1) ** (p - 1 - a)
                out[rest] = out.get(rest, ring.zero()) + (val if sign > 0 else -val)
        return Multivector(L, out)
    if p == 0:
        r = _monomial_bracket(L, J, g, I, f)
        return r if (q - 1) % 2 else -r
    # decomposable formula with D_1 = f e_{I_1}, E_1 = g e_{J_1}
    Ds = [L.basis_section(i) for i in I]
    Es = [L.basis_section(j) for j in J]
    one = ring.one()
    Ds[0] = tuple(f * c for c in Ds[0])
    Es[0] = tuple(g * c for c in Es[0])
    total = Multivector.zero(L)
    for a in range(p):
        for b in range(q):
            br = bracket_sections(L, Ds[a], Es[b])
            if all(not c for c in br):
                continue
            term = Multivector.from_section(L, br)
            # scalar factors carried by the omitted D_1 or E_1 stay in the rest
            coef = one
            if a == 0:
                rest_d = I[1:]
            else:
                rest_d = I[:a] + I[a + 1:]
                coef = coef * f
            if b == 0:
                rest_e = J[1:]
            else:
                rest_e = J[:b] + J[b + 1:]
                coef = coef * g
            rest = Multivector(L, {rest_d: coef}).wedge(Multivector.basis(L, rest_e))
            t = term.wedge(rest)
            total = total + (t if (a + b) % 2 == 0 else -t)
    return total


def sn_bracket(P: Multivector, Q: Multivector) -> Multivector:
    """Schouten-Nijenhuis bracket on the exterior algebra of L."""
    if not isinstance(P, Multivector) or not isinstance(Q, Multivector):
        raise TypeError("sn_bracket expects multivectors")
    if P.algebroid is not Q.algebroid and P.algebroid != Q.algebroid:
        raise AlgebroidMismatch("multivectors over different algebroids")
    L = P.algebroid
    total = Multivector.zero(L)
    for I, f in P.components.items():
        for J, g in Q.components.items():
            total = total + _monomial_bracket(L, I, f, J, g)
    return total


@dataclass(frozen=True)
class GerstenhaberStructure:
    """The Gerstenhaber algebra of an algebroid; its bracket is always derived."""

    algebroid: Algebroid

    def bracket(self, P: Multivector, Q: Multivector) -> Multivector:
        return sn_bracket(P, Q)

    def product(self, P: Multivector, Q: Multivector) -> Multivector:
        return P.wedge(Q)


def gerstenhaber_from_algebroid(L: Algebroid) -> GerstenhaberStructure:
    return GerstenhaberStructure(L)


# -- contraction, pairing, Cartan calculus -------------------------------

def contract(omega: Form, P: Multivector) -> Form:
    if not isinstance(omega, Form) or not isinstance(P, Multivector):
        raise TypeError("contract expects (Form, Multivector)")
    same_algebroid(omega.algebroid, P.algebroid)
    L = omega.algebroid
    out = {}
    for J, g in P.components.items():
        for I, f in omega.components.items():
            if len(J) > len(I):
                raise DegreeError(f"cannot contract a degree-{len(I)} form with a degree-{len(J)} multivector")
            if not set(J) <= set(I):
                continue
            rest = tuple(i for i in I if i not in J)
            s = merge_sign(J + rest)
            t = f * g if s > 0 else -(f * g)
            out[rest] = out[rest] + t if rest in out else t
    return Form(L, out)


def pairing(omega: Form, P: Multivector) -> Poly:
    same_algebroid(omega.algebroid, P.algebroid)
    if omega.degrees() | P.degrees() and len(omega.degrees() | P.degrees()) > 1:
        raise DegreeError("pairing needs equal homogeneous degrees")
    total = omega.algebroid.ring.zero()
    for I, f in omega.components.items():
        g = P.components.get(I)
        if g is not None:
            total = total + f * g
    return total


def interior(D, omega: Form) -> Form:
    """Contraction with a section given as a tuple of Poly; functions contract to 0."""
    positive = Form(omega.algebroid, {I: f for I, f in omega.components.items() if I})
    return contract(positive, Multivector.from_section(omega.algebroid, D))


def lie_derivative(L: Algebroid, D, omega: Form) -> Form:
    """Cartan's formula L_D = d i_D + i_D d with the trivial-coefficient CE differential."""
    from .cecomplex import ce_differential_trivial

    same_algebroid(L, omega.algebroid)
    D = tuple(D)
    return (ce_differential_trivial(L, interior(D, omega))
            + interior(D, ce_differential_trivial(L, omega)))


# -- induced maps --------------------------------------------------------

def wedge_map(phi: AlgebroidMorphism, P: Multivector) -> Multivector:
    """The exterior power of phi applied to a multivector of the source."""
    same_algebroid(P.algebroid, phi.source)
    T = phi.target
    images = [Multivector.from_section(T, phi.column(j)) for j in range(phi.source.rank)]
    total = Multivector.zero(T)
    for J, f in P.components.items():
        m = Multivector.function(T, f)
        for j in J:
            m = m.wedge(images[j])
            if not m:
                break
        total = total + m
    return total


# -- axiom suites ----------------------------------------------------------

Bracket = Callable[[Multivector, Multivector], Multivector]


def _random_homogeneous(L, rng, max_degree):
    from .sampling import random_multivector
    k = rng.randint(0, min(max_degree, L.rank))
    return random_multivector(L, k, rng, max_degree=1), k


def check_gerstenhaber(L: Algebroid, max_degree: int = 2, samples: int = 20, seed: int = 0,
                       bracket: Bracket | None = None) -> AxiomReport:
    """Randomized check of the Gerstenhaber axioms for the SN bracket (or an override)."""
    br = bracket or sn_bracket
    rng = random.Random(seed)
    report = AxiomReport()

    def sgn(e):
        return 1 if e % 2 == 0 else -1

    for _ in range(samples):
        (a, i), (b, j), (c, k) = (_random_homogeneous(L, rng, max_degree) for _ in range(3))
        wit = (a, b, c)
        report.checked += 5
        if a.wedge(b) != b.wedge(a).scale(sgn(i * j)):
            report.add("wedge_commutativity", wit[:2], a.wedge(b), b.wedge(a).scale(sgn(i * j)))
        if a.wedge(b).wedge(c) != a.wedge(b.wedge(c)):
            report.add("wedge_associativity", wit, a.wedge(b).wedge(c), a.wedge(b.wedge(c)))
        ab, ba = br(a, b), br(b, a)
        if ab != -ba.scale(sgn((i - 1) * (j - 1))):
            report.add("bracket_antisymmetry", wit[:2], ab, -ba.scale(sgn((i - 1) * (j - 1))))
        jac = (br(a, br(b, c)).scale(sgn((i - 1) * (k - 1)))
               + br(b, br(c, a)).scale(sgn((j - 1) * (i - 1)))
               + br(c, br(a, b)).scale(sgn((k - 1) * (j - 1))))
        if jac:
            report.add("jacobi", wit, jac, 0)
        lhs = br(a, b.wedge(c))
        rhs = br(a, b).wedge(c) + b.wedge(br(a, c)).scale(sgn((i - 1) * j))
        if lhs != rhs:
            report.add("leibniz", wit, lhs, rhs)
    return report


def gerstenhaber_morphism_check(phi: AlgebroidMorphism, max_degree: int = 2, samples: int = 20,
                                seed: int = 0) -> AxiomReport:
    rng = random.Random(seed)
    report = AxiomReport()
    S = phi.source
    for _ in range(samples):
        (P, _), (Q, _) = (_random_homogeneous(S, rng, max_degree) for _ in range(2))
        fP, fQ = wedge_map(phi, P), wedge_map(phi, Q)
        report.checked += 2
        lhs, rhs = wedge_map(phi, P.wedge(Q)), fP.wedge(fQ)
        if lhs != rhs:
            report.add("wedge_preserved", (P, Q), lhs, rhs)
        lhs, rhs = wedge_map(phi, sn_bracket(P, Q)), sn_bracket(fP, fQ)
        if lhs != rhs:
            report.add("bracket_preserved", (P, Q), lhs, rhs)
    return report
