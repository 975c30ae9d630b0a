"""Lie algebroids (Lie-Rinehart algebras) on free modules over a polynomial ring.

An :class:`Algebroid` stores the anchor of each basis element as a
:class:`~algebroid_kit.polycore.Derivation` and the structure constants
``[e_i, e_j] = sum_k c[i][j][k] e_k`` for ``i < j``.  Brackets of arbitrary
sections are defined from these by bilinearity and the Leibniz rule, so the
Leibniz rule holds by construction; :func:`check_axioms` verifies the rest.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (AlgebroidMismatch, DuplicateVariable, RankMismatch, RingMismatch)
from .polycore import IDENTIFIER, Derivation, Poly, PolyRing, format_combination

Section = tuple  # tuple of Poly, one per basis element


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    lhs: str
    rhs: str

    def as_dict(self):
        return {"axiom": self.axiom, "witness": list(self.witness), "lhs": self.lhs, "rhs": self.rhs}


@dataclass
class AxiomReport:
    violations: list = field(default_factory=list)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, axiom, witness, lhs, rhs):
        self.violations.append(Violation(axiom, tuple(str(w) for w in witness), str(lhs), str(rhs)))

    def merge(self, other: "AxiomReport") -> "AxiomReport":
        self.violations.extend(other.violations)
        self.checked += other.checked
        return self

    def as_dict(self):
        return {"passed": self.passed, "checked": self.checked,
                "violations": [v.as_dict() for v in self.violations]}

    def __bool__(self):
        return self.passed


class Algebroid:
    """A Lie algebroid structure on the free module A^n, A = Q[variables]."""

    def __init__(self, ring: PolyRing, basis_names: Sequence[str], anchor: Sequence[Derivation],
                 bracket: dict | None = None, var_weights: Sequence[int] | None = None,
                 basis_weights: Sequence[int] | None = None, name: str = ""):
        basis_names = tuple(basis_names)
        n = len(basis_names)
        for b in basis_names:
            if not IDENTIFIER.match(b):
                raise ValueError(f"invalid basis name {b!r}")
        if len(set(basis_names)) != n:
            raise ValueError(f"duplicate basis names in {basis_names}")
        anchor = tuple(anchor)
        if len(anchor) != n:
            raise RankMismatch(f"anchor has {len(anchor)} entries for rank {n}")
        for d in anchor:
            if d.ring != ring:
                raise RingMismatch("anchor over a different ring")
        zero = tuple(ring.zero() for _ in range(n))
        table = {}
        for (i, j), vec in (bracket or {}).items():
            if not 0 <= i < j < n:
                raise ValueError(f"bracket keys must satisfy i < j < rank, got {(i, j)}")
            vec = tuple(vec)
            if len(vec) != n:
                raise RankMismatch(f"bracket value for {(i, j)} has length {len(vec)}")
            table[(i, j)] = vec
        self.ring = ring
        self.basis_names = basis_names
        self.anchor = anchor
        self._bracket = {(i, j): table.get((i, j), zero) for i in range(n) for j in range(i + 1, n)}
        if (var_weights is None) != (basis_weights is None):
            raise ValueError("give both variable and basis weights, or neither")
        if var_weights is not None:
            var_weights = tuple(int(w) for w in var_weights)
            basis_weights = tuple(int(w) for w in basis_weights)
            if len(var_weights) != ring.nvars or len(basis_weights) != n:
                raise ValueError("weight vectors have the wrong length")
            if any(w < 0 for w in var_weights):
                raise ValueError("variable weights must be nonnegative")
        self.var_weights = var_weights
        self.basis_weights = basis_weights
        self.name = name

    @property
    def rank(self) -> int:
        return len(self.basis_names)

    @property
    def has_weights(self) -> bool:
        return self.var_weights is not None

    @property
    def bracket(self) -> dict:
        return dict(self._bracket)

    def structure_constants(self, i: int, j: int) -> Section:
        """Coefficients of [e_i, e_j] for any i, j (antisymmetric, zero on the diagonal)."""
        if i == j:
            return self.zero_section()
        if i < j:
            return self._bracket[(i, j)]
        return tuple(-c for c in self._bracket[(j, i)])

    def zero_section(self) -> Section:
        return tuple(self.ring.zero() for _ in range(self.rank))

    def basis_section(self, i: int) -> Section:
        return tuple(self.ring.one() if k == i else self.ring.zero() for k in range(self.rank))

    def anchor_of(self, u: Section) -> Derivation:
        out = Derivation.zero(self.ring)
        for f, d in zip(u, self.anchor):
            if f:
                out = out + d.scale(f)
        return out

    def index(self, name: str) -> int:
        try:
            return self.basis_names.index(name)
        except ValueError:
            raise KeyError(f"unknown basis element {name!r}") from None

    def top_weight(self) -> int:
        return sum(self.basis_weights) if self.has_weights else 0

    def with_weights(self, var_weights, basis_weights) -> "Algebroid":
        return Algebroid(self.ring, self.basis_names, self.anchor, self._bracket, var_weights,
                         basis_weights, self.name)

    def _key(self):
        return (self.ring, self.basis_names, self.anchor, tuple(sorted(self._bracket.items())),
                self.var_weights, self.basis_weights)

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Algebroid) and self._key() == other._key()

    def __hash__(self):
        return hash((self.ring, self.basis_names))

    def format_section(self, u: Section) -> str:
        return format_combination(zip(u, self.basis_names))

    def __repr__(self):
        return f"Algebroid({self.name or '?'}, rank={self.rank}, ring={self.ring})"


def same_algebroid(a: Algebroid, b: Algebroid):
    if a is not b and a != b:
        raise AlgebroidMismatch(f"{a!r} vs {b!r}")


# -- section arithmetic ------------------------------------------------------

def section_add(u: Section, v: Section) -> Section:
    return tuple(a + b for a, b in zip(u, v))


def section_sub(u: Section, v: Section) -> Section:
    return tuple(a - b for a, b in zip(u, v))


def section_scale(f, u: Section) -> Section:
    return tuple(f * a for a in u)


def section_is_zero(u: Section) -> bool:
    return all(not a for a in u)


def bracket_sections(L: Algebroid, u: Section, v: Section) -> Section:
    """Bracket of arbitrary sections via bilinearity and the Leibniz rule.

    [sum u_i e_i, sum v_j e_j] = sum u_i v_j [e_i, e_j] + a(u)(v_k) e_k - a(v)(u_k) e_k
    """
    u, v = tuple(u), tuple(v)
    if len(u) != L.rank or len(v) != L.rank:
        raise RankMismatch(f"sections must have length {L.rank}")
    out = [L.ring.zero() for _ in range(L.rank)]
    for i, ui in enumerate(u):
        if not ui:
            continue
        for j, vj in enumerate(v):
            if not vj or i == j:
                continue
            c = L.structure_constants(i, j)
            coef = ui * vj
            for k, ck in enumerate(c):
                if ck:
                    out[k] = out[k] + coef * ck
    au, av = L.anchor_of(u), L.anchor_of(v)
    for k in range(L.rank):
        out[k] = out[k] + au(v[k]) - av(u[k])
    return tuple(out)


# -- axioms -----------------------------------------------------------------

def weight_violations(L: Algebroid) -> list:
    """(description, witness) for every structure datum breaking weight-homogeneity."""
    if not L.has_weights:
        return []
    bad = []
    vw, bw = L.var_weights, L.basis_weights
    for i, d in enumerate(L.anchor):
        for v, comp in enumerate(d.components):
            expected = bw[i] + vw[v]
            ws = comp.weighted_degrees(vw)
            if ws and ws != {expected}:
                bad.append((f"anchor({L.basis_names[i]}) d/d{L.ring.variables[v]}", str(comp), expected, sorted(ws)))
    for (i, j), vec in L.bracket.items():
        for k, c in enumerate(vec):
            expected = bw[i] + bw[j] - bw[k]
            ws = c.weighted_degrees(vw)
            if ws and ws != {expected}:
                bad.append((f"[{L.basis_names[i]},{L.basis_names[j]}] along {L.basis_names[k]}", str(c),
                            expected, sorted(ws)))
    return bad


def check_axioms(L: Algebroid, samples: int = 10, seed: int = 0) -> AxiomReport:
    """Jacobi and anchor compatibility on basis elements, weights, and a Leibniz guard."""
    report = AxiomReport()
    n = L.rank
    names = L.basis_names
    e = [L.basis_section(i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                jac = section_add(section_add(
                    bracket_sections(L, e[i], bracket_sections(L, e[j], e[k])),
                    bracket_sections(L, e[j], bracket_sections(L, e[k], e[i]))),
                    bracket_sections(L, e[k], bracket_sections(L, e[i], e[j])))
                report.checked += 1
                if not section_is_zero(jac):
                    report.add("jacobi", (names[i], names[j], names[k]), L.format_section(jac), "0")
    for i in range(n):
        for j in range(i + 1, n):
            lhs = L.anchor_of(L.structure_constants(i, j))
            rhs = L.anchor[i].commutator(L.anchor[j])
            report.checked += 1
            if lhs != rhs:
                report.add("anchor_homomorphism", (names[i], names[j]), lhs, rhs)
    for desc, comp, expected, found in weight_violations(L):
        report.add("weight_homogeneity", (desc,), f"{comp} has weights {found}", f"weight {expected}")
    rng = random.Random(seed)
    from .sampling import random_poly, random_section
    for _ in range(samples if n else 0):
        f = random_poly(L.ring, rng)
        D, D2 = random_section(L, rng), random_section(L, rng)
        lhs = bracket_sections(L, D, section_scale(f, D2))
        rhs = section_add(section_scale(f, bracket_sections(L, D, D2)),
                          section_scale(L.anchor_of(D)(f), D2))
        report.checked += 1
        if lhs != rhs:
            report.add("leibniz", (L.format_section(D), f, L.format_section(D2)),
                       L.format_section(lhs), L.format_section(rhs))
    return report


# -- morphisms -------------------------------------------------------------

class AlgebroidMorphism:
    """phi(e'_j) = sum_i matrix[i][j] e_i from source (primed) to target."""

    def __init__(self, source: Algebroid, target: Algebroid, matrix: Sequence[Sequence[Poly]]):
        if source.ring != target.ring:
            raise RingMismatch("morphism between algebroids over different rings")
        matrix = tuple(tuple(row) for row in matrix)
        if len(matrix) != target.rank or any(len(r) != source.rank for r in matrix):
            raise RankMismatch(f"matrix must be {target.rank}x{source.rank}")
        self.source = source
        self.target = target
        self.matrix = matrix

    def __call__(self, u: Section) -> Section:
        return tuple(sum((self.matrix[i][j] * u[j] for j in range(self.source.rank)), self.source.ring.zero())
                     for i in range(self.target.rank))

    def column(self, j: int) -> Section:
        return tuple(self.matrix[i][j] for i in range(self.target.rank))

    def determinant(self) -> Poly:
        if self.source.rank != self.target.rank:
            raise RankMismatch("determinant needs equal ranks")
        return _det([list(r) for r in self.matrix], self.source.ring)

    def __eq__(self, other):
        return (isinstance(other, AlgebroidMorphism) and self.source == other.source
                and self.target == other.target and self.matrix == other.matrix)

    def __repr__(self):
        return f"AlgebroidMorphism({self.source.name or '?'} -> {self.target.name or '?'})"


def _det(m, ring) -> Poly:
    n = len(m)
    if n == 0:
        return ring.one()
    total = ring.zero()
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            term = m[0][j] * _det(minor, ring)
            total = total + term if j % 2 == 0 else total - term
    return total


def identity_morphism(L: Algebroid) -> AlgebroidMorphism:
    one, zero = L.ring.one(), L.ring.zero()
    return AlgebroidMorphism(L, L, [[one if i == j else zero for j in range(L.rank)] for i in range(L.rank)])


def compose_morphisms(phi: AlgebroidMorphism, psi: AlgebroidMorphism) -> AlgebroidMorphism:
    """phi ∘ psi."""
    same_algebroid(psi.target, phi.source)
    ring = phi.source.ring
    m = [[sum((phi.matrix[i][k] * psi.matrix[k][j] for k in range(phi.source.rank)), ring.zero())
          for j in range(psi.source.rank)] for i in range(phi.target.rank)]
    return AlgebroidMorphism(psi.source, phi.target, m)


def check_morphism(phi: AlgebroidMorphism) -> AxiomReport:
    """Bracket compatibility on source basis pairs and a_target∘phi = a_source."""
    S, T = phi.source, phi.target
    if S.ring != T.ring:
        raise RingMismatch("morphism between algebroids over different rings")
    report = AxiomReport()
    images = [phi.column(j) for j in range(S.rank)]
    for i in range(S.rank):
        for j in range(i + 1, S.rank):
            lhs = phi(S.structure_constants(i, j))
            rhs = bracket_sections(T, images[i], images[j])
            report.checked += 1
            if lhs != rhs:
                report.add("bracket_compatibility", (S.basis_names[i], S.basis_names[j]),
                           T.format_section(lhs), T.format_section(rhs))
    for j in range(S.rank):
        lhs = T.anchor_of(images[j])
        report.checked += 1
        if lhs != S.anchor[j]:
            report.add("anchor_compatibility", (S.basis_names[j],), lhs, S.anchor[j])
    return report


# -- constructions -----------------------------------------------------------

def tangent_algebroid(ring: PolyRing, var_weights: Sequence[int] | None = None, name: str = "") -> Algebroid:
    """Basis d/dx_1..d/dx_m named e1..em; zero brackets; identity anchor."""
    vw = tuple(var_weights) if var_weights is not None else (1,) * ring.nvars
    anchor = [Derivation.partial(ring, i) for i in range(ring.nvars)]
    return Algebroid(ring, [f"e{i + 1}" for i in range(ring.nvars)], anchor, {},
                     vw, [-w for w in vw], name or f"tangent({','.join(ring.variables)})")


def log_tangent_fixture(ring: PolyRing, divisor_variables: Sequence, name: str = "") -> Algebroid:
    """Logarithmic derivations along the monomial divisor x_1...x_k.

    Basis x_i d/dx_i for the selected variables followed by d/dx_j for the others,
    named e1..em.  All brackets vanish.
    """
    idx = [v if isinstance(v, int) else ring.index(v) for v in divisor_variables]
    if len(set(idx)) != len(idx):
        raise DuplicateVariable(f"repeated variable in divisor {list(divisor_variables)}")
    rest = [j for j in range(ring.nvars) if j not in idx]
    anchor = []
    for i in idx:
        comps = [ring.zero()] * ring.nvars
        comps[i] = ring.var(i)
        anchor.append(Derivation(ring, comps))
    anchor += [Derivation.partial(ring, j) for j in rest]
    vw = (1,) * ring.nvars
    bw = [0] * len(idx) + [-1] * len(rest)
    return Algebroid(ring, [f"e{i + 1}" for i in range(ring.nvars)], anchor, {}, vw, bw,
                     name or f"log({'*'.join(ring.variables[i] for i in idx)})")


def bivector_entry(pi, i: int, j: int) -> Poly:
    """pi(dx_i, dx_j) for a bivector stored on sorted pairs."""
    if i == j:
        return pi.algebroid.ring.zero()
    if i < j:
        return pi.coefficient((i, j))
    return -pi.coefficient((j, i))


def _koszul_algebroid(ring: PolyRing, pi, var_weights=None, name: str = "", bracket_sign: int = 1) -> Algebroid:
    """Cotangent algebroid data of a bivector without the Poisson guard.

    Anchor: pi~(dx_i) = sum_j pi(dx_i, dx_j) d/dx_j, so pi~(w)(f) = pi(w, df).
    Bracket: [dx_i, dx_j] = L_{pi~ dx_i} dx_j - L_{pi~ dx_j} dx_i - d(pi(dx_i, dx_j)),
    computed with Lie derivatives on the tangent algebroid's forms.
    ``bracket_sign`` exists only so tests can build deliberately broken data.
    """
    from .cecomplex import ce_differential_trivial
    from .exterior import Form, lie_derivative

    T = pi.algebroid
    m = ring.nvars
    anchor = [Derivation(ring, [bivector_entry(pi, i, j) for j in range(m)]) for i in range(m)]
    sharp = [tuple(bivector_entry(pi, i, j) for j in range(m)) for i in range(m)]
    dx = [Form(T, {(i,): ring.one()}) for i in range(m)]
    bracket = {}
    for i in range(m):
        for j in range(i + 1, m):
            w = (lie_derivative(T, sharp[i], dx[j]) - lie_derivative(T, sharp[j], dx[i])
                 - ce_differential_trivial(T, Form(T, {(): bivector_entry(pi, i, j)})))
            bracket[(i, j)] = tuple(w.coefficient((k,)) * bracket_sign for k in range(m))
    vw = tuple(var_weights) if var_weights is not None else (1,) * m
    bw = None
    try:
        wpi = pi.homogeneous_weight(vw, T.basis_weights if T.has_weights else [-w for w in vw])
    except ValueError:
        wpi = False
    if wpi is not False:
        wpi = wpi or 0
        bw = [wpi + vw[i] for i in range(m)]
    return Algebroid(ring, [f"d{v}" for v in ring.variables], anchor, bracket,
                     vw if bw is not None else None, bw, name or "cotangent")


def cotangent_algebroid(ring: PolyRing, pi, var_weights=None, name: str = "") -> Algebroid:
    """The Koszul-bracket algebroid on 1-forms of a Poisson bivector pi."""
    from .errors import NotPoisson
    from .exterior import sn_bracket

    if pi.algebroid.ring != ring:
        raise RingMismatch("bivector over a different ring")
    if any(len(k) != 2 for k in pi.components):
        raise ValueError("pi must be a homogeneous bivector")
    pp = sn_bracket(pi, pi)
    if not pp.is_zero():
        idx, c = next(iter(sorted(pp.components.items())))
        raise NotPoisson(f"{c} on {idx}")
    return _koszul_algebroid(ring, pi, var_weights, name)


def algebroid_from_gerstenhaber(G) -> Algebroid:
    """Read off the degree-1 bracket and the anchor D -> [D, .] on functions."""
    from .exterior import Multivector

    L = G.algebroid
    ring = L.ring
    e = [Multivector.basis(L, (i,)) for i in range(L.rank)]
    bracket = {}
    for i in range(L.rank):
        for j in range(i + 1, L.rank):
            b = G.bracket(e[i], e[j])
            bracket[(i, j)] = tuple(b.coefficient((k,)) for k in range(L.rank))
    anchor = []
    for i in range(L.rank):
        comps = [G.bracket(e[i], Multivector.function(L, ring.var(v))).coefficient(()) for v in range(ring.nvars)]
        anchor.append(Derivation(ring, comps))
    return Algebroid(ring, L.basis_names, anchor, bracket, L.var_weights, L.basis_weights, L.name)


def permute_basis(L: Algebroid, perm: Sequence[int]) -> Algebroid:
    """Algebroid with basis e'_a = e_{perm[a]}."""
    perm = list(perm)
    n = L.rank
    bracket = {}
    for a in range(n):
        for b in range(a + 1, n):
            c = L.structure_constants(perm[a], perm[b])
            bracket[(a, b)] = tuple(c[perm[k]] for k in range(n))
    bw = [L.basis_weights[p] for p in perm] if L.has_weights else None
    return Algebroid(L.ring, [L.basis_names[p] for p in perm], [L.anchor[p] for p in perm], bracket,
                     L.var_weights, bw, L.name)
