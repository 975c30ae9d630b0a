"""Atiyah operators, algebroid connections on free modules, curvature, pullbacks.

An operator on A^r is stored split as ``(matrix, symbol)`` and acts by
``D(s) = matrix @ s + symbol(s)`` entrywise.  Curvature is
``R(D, D') = nabla_[D, D'] - [nabla_D, nabla_D']_c``.
"""
from __future__ import annotations

import random
from typing import Sequence

from .algebroid import Algebroid, AlgebroidMorphism, AxiomReport
from .errors import (AlgebroidMismatch, MorphismInvalid, NonFlat, NotDivisible, NotInjective,
                     Obstructed, RankMismatch, RingMismatch)
from .polycore import Derivation, Poly, PolyRing, poly_divide_exact


def _matmul(a, b, ring):
    r = len(a)
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(r)), ring.zero()) for j in range(r))
                 for i in range(r))


class AtiyahOperator:
    """First-order operator on A^r with scalar symbol."""

    __slots__ = ("matrix", "symbol")

    def __init__(self, matrix: Sequence[Sequence[Poly]], symbol: Derivation):
        matrix = tuple(tuple(row) for row in matrix)
        if any(len(row) != len(matrix) for row in matrix):
            raise RankMismatch("operator matrix must be square")
        for row in matrix:
            for c in row:
                if c.ring != symbol.ring:
                    raise RingMismatch("matrix entry over a different ring")
        self.matrix = matrix
        self.symbol = symbol

    @property
    def module_rank(self) -> int:
        return len(self.matrix)

    @property
    def ring(self) -> PolyRing:
        return self.symbol.ring

    @classmethod
    def zero(cls, ring: PolyRing, r: int) -> "AtiyahOperator":
        return cls([[ring.zero()] * r for _ in range(r)], Derivation.zero(ring))

    def __call__(self, s: Sequence[Poly]) -> tuple:
        r = self.module_rank
        if len(s) != r:
            raise RankMismatch(f"section of length {len(s)} for module rank {r}")
        return tuple(sum((self.matrix[a][b] * s[b] for b in range(r)), self.ring.zero()) + self.symbol(s[a])
                     for a in range(r))

    def __add__(self, other):
        return AtiyahOperator([[x + y for x, y in zip(ra, rb)] for ra, rb in zip(self.matrix, other.matrix)],
                              self.symbol + other.symbol)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, f) -> "AtiyahOperator":
        return AtiyahOperator([[f * x for x in row] for row in self.matrix], self.symbol.scale(f))

    def commutator(self, other: "AtiyahOperator") -> "AtiyahOperator":
        ring = self.ring
        m1, m2 = self.matrix, other.matrix
        p12, p21 = _matmul(m1, m2, ring), _matmul(m2, m1, ring)
        r = self.module_rank
        mat = [[p12[i][j] - p21[i][j] + self.symbol(m2[i][j]) - other.symbol(m1[i][j]) for j in range(r)]
               for i in range(r)]
        return AtiyahOperator(mat, self.symbol.commutator(other.symbol))

    def is_zero(self) -> bool:
        return self.symbol.is_zero() and all(not c for row in self.matrix for c in row)

    def __eq__(self, other):
        return isinstance(other, AtiyahOperator) and (self.matrix, self.symbol) == (other.matrix, other.symbol)

    def __hash__(self):
        return hash((self.matrix, self.symbol))

    def __str__(self):
        rows = "; ".join(", ".join(str(c) for c in row) for row in self.matrix)
        return f"[{rows}] + {self.symbol}"

    __repr__ = __str__


class Connection:
    """An L-connection on A^r: one operator per basis element, with symbol = anchor."""

    def __init__(self, algebroid: Algebroid, matrices: Sequence[Sequence[Sequence[Poly]]],
                 module_rank: int | None = None):
        matrices = list(matrices)
        if len(matrices) != algebroid.rank:
            raise RankMismatch(f"need {algebroid.rank} matrices, got {len(matrices)}")
        ops = tuple(AtiyahOperator(m, d) for m, d in zip(matrices, algebroid.anchor))
        ranks = {op.module_rank for op in ops}
        if module_rank is not None:
            ranks.add(module_rank)
        if len(ranks) > 1:
            raise RankMismatch(f"inconsistent module ranks {sorted(ranks)}")
        self.algebroid = algebroid
        # a rank-0 algebroid has no operators, so the module rank must be given
        self.module_rank = ranks.pop() if ranks else 1
        self.operators = ops

    @classmethod
    def trivial(cls, algebroid: Algebroid, r: int = 1) -> "Connection":
        z = algebroid.ring.zero()
        return cls(algebroid, [[[z] * r for _ in range(r)] for _ in range(algebroid.rank)], r)

    @classmethod
    def rank_one(cls, algebroid: Algebroid, multipliers: Sequence) -> "Connection":
        """Rank-1 connection with nabla_{e_i} = g_i + anchor(e_i)."""
        ring = algebroid.ring
        gs = [g if isinstance(g, Poly) else ring.const(g) for g in multipliers]
        return cls(algebroid, [[[g]] for g in gs])

    @property
    def matrices(self):
        return tuple(op.matrix for op in self.operators)

    def multipliers(self) -> tuple:
        if self.module_rank != 1:
            raise RankMismatch("multipliers are defined for rank-1 modules")
        return tuple(op.matrix[0][0] for op in self.operators)

    def along(self, u: Sequence[Poly]) -> AtiyahOperator:
        """nabla_u for a section u = sum u_i e_i."""
        out = AtiyahOperator.zero(self.algebroid.ring, self.module_rank)
        for f, op in zip(u, self.operators):
            if f:
                out = out + op.scale(f)
        return out

    def __call__(self, u, s):
        return self.along(u)(s)

    def __eq__(self, other):
        return (isinstance(other, Connection) and self.algebroid == other.algebroid
                and self.operators == other.operators)

    def __repr__(self):
        return f"Connection(rank {self.module_rank} over {self.algebroid!r})"


def curvature(nabla: Connection, i: int, j: int) -> AtiyahOperator:
    L = nabla.algebroid
    return nabla.along(L.structure_constants(i, j)) - nabla.operators[i].commutator(nabla.operators[j])


def curvature_sections(nabla: Connection, u, v) -> AtiyahOperator:
    from .algebroid import bracket_sections
    return nabla.along(bracket_sections(nabla.algebroid, u, v)) - nabla.along(u).commutator(nabla.along(v))


def check_flat(nabla: Connection) -> AxiomReport:
    L = nabla.algebroid
    report = AxiomReport()
    for i in range(L.rank):
        for j in range(i + 1, L.rank):
            R = curvature(nabla, i, j)
            report.checked += 1
            if not R.is_zero():
                axiom = "flatness" if R.symbol.is_zero() else "curvature_symbol"
                report.add(axiom, (L.basis_names[i], L.basis_names[j]), R, 0)
    return report


def compose_connection(nabla: Connection, phi: AlgebroidMorphism) -> Connection:
    """nabla' = nabla o phi on the source of phi."""
    if phi.target is not nabla.algebroid and phi.target != nabla.algebroid:
        raise AlgebroidMismatch("morphism target differs from the connection's algebroid")
    S = phi.source
    ops = [nabla.along(phi.column(j)) for j in range(S.rank)]
    for j, op in enumerate(ops):
        if op.symbol != S.anchor[j]:
            raise MorphismInvalid(f"anchor of phi({S.basis_names[j]}) differs from the source anchor")
    return Connection(S, [op.matrix for op in ops])


def induced_top_connection(nabla: Connection, phi: AlgebroidMorphism) -> Connection:
    """Connection on the top power of the source induced through theta = det(phi).

    g'_j = sum_i M[i][j] g_i + a(phi e'_j)(h) / h with h = det M, divided exactly.
    """
    S, T = phi.source, phi.target
    if T is not nabla.algebroid and T != nabla.algebroid:
        raise AlgebroidMismatch("morphism target differs from the connection's algebroid")
    if S.rank != T.rank:
        raise RankMismatch(f"ranks differ: {S.rank} vs {T.rank}")
    if nabla.module_rank != 1:
        raise RankMismatch("the top exterior power is a rank-1 module")
    h = phi.determinant()
    if not h:
        raise NotInjective("det(phi) vanishes")
    if not check_flat(nabla).passed:
        raise NonFlat("input connection is not flat")
    g = nabla.multipliers()
    new = []
    for j in range(S.rank):
        col = phi.column(j)
        numerator = T.anchor_of(col)(h)
        try:
            q = poly_divide_exact(numerator, h)
        except NotDivisible:
            raise Obstructed(h, numerator, S.basis_names[j]) from None
        new.append(sum((col[i] * g[i] for i in range(T.rank)), S.ring.zero()) + q)
    return Connection.rank_one(S, new)


def check_induced_law(nabla: Connection, induced: Connection, phi: AlgebroidMorphism,
                      samples: int = 20, seed: int = 0) -> AxiomReport:
    """theta(nabla'_{D'} s') == nabla_{phi D'}(theta s') with theta = multiplication by det(phi)."""
    from .sampling import random_poly, random_section

    rng = random.Random(seed)
    h = phi.determinant()
    report = AxiomReport()
    for _ in range(samples):
        D = random_section(phi.source, rng)
        s = random_poly(phi.source.ring, rng)
        lhs = h * induced.along(D)((s,))[0]
        rhs = nabla.along(phi(D))((h * s,))[0]
        report.checked += 1
        if lhs != rhs:
            report.add("induced_operator_law", (phi.source.format_section(D), s), lhs, rhs)
    return report
