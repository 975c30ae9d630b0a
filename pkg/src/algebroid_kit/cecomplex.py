"""Chevalley-Eilenberg complexes of an algebroid and their weight-graded cohomology.

Cohomology here is that of the complex of global polynomial sections.  Each
(form degree, weight) piece is a finite-dimensional Q-vector space when every
variable weight is positive, so dimensions are computed exactly by rank.

Form monomial weight: weight(f) - sum of the basis weights in I, plus the
coefficient module weight.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .algebroid import (Algebroid, AlgebroidMorphism, AxiomReport, check_axioms, check_morphism,
                        same_algebroid, weight_violations)
from .connection import Connection, check_flat
from .errors import (NonFlat, NotHomogeneous, RankMismatch, WeightUnbounded)
from .exactlin import QMatrix, quotient_dim
from .exterior import Form, Multivector, sn_bracket
from .polycore import Poly, monomials_of_weight


def _ce(L: Algebroid, comps: Sequence[dict], matrices=None) -> list[dict]:
    """Core CE differential on E-valued forms given as r component dicts.

    dw(J) = sum_a (-1)^a rho(e_ja)(w(J - ja))
            + sum_{a<b} (-1)^(a+b) w([e_ja, e_jb] ^ e_(J - ja - jb))
    """
    n = L.rank
    r = len(comps)
    out = [dict() for _ in range(r)]

    def acc(alpha, J, val):
        if val:
            d = out[alpha]
            d[J] = d[J] + val if J in d else val

    for alpha in range(r):
        for I, f in comps[alpha].items():
            Iset = set(I)
            for j in range(n):
                if j in Iset:
                    continue
                J = tuple(sorted(I + (j,)))
                a = J.index(j)
                sgn = 1 if a % 2 == 0 else -1
                acc(alpha, J, L.anchor[j](f) * sgn)
                if matrices is not None:
                    m = matrices[j]
                    for beta in range(r):
                        if m[beta][alpha]:
                            acc(beta, J, m[beta][alpha] * f * sgn)
            for pos, m_idx in enumerate(I):
                R = I[:pos] + I[pos + 1:]
                s_mr = 1 if pos % 2 == 0 else -1
                Rset = set(R)
                free = [k for k in range(n) if k not in Rset]
                for ja, jb in combinations(free, 2):
                    c = L.structure_constants(ja, jb)[m_idx]
                    if not c:
                        continue
                    J = tuple(sorted(R + (ja, jb)))
                    a, b = J.index(ja), J.index(jb)
                    sgn = s_mr * (1 if (a + b) % 2 == 0 else -1)
                    acc(alpha, J, c * f * sgn)
    return [{k: v for k, v in d.items() if v} for d in out]


def ce_differential_trivial(L: Algebroid, omega: Form) -> Form:
    same_algebroid(L, omega.algebroid)
    return Form(L, _ce(L, [omega.components])[0])


def _connection_homogeneity(nabla: Connection) -> list:
    L = nabla.algebroid
    bad = []
    for i, m in enumerate(nabla.matrices):
        for row in m:
            for c in row:
                ws = c.weighted_degrees(L.var_weights)
                if ws and ws != {L.basis_weights[i]}:
                    bad.append((f"connection matrix along {L.basis_names[i]}", str(c), L.basis_weights[i], sorted(ws)))
    return bad


@dataclass
class CohomologyReport:
    dims: dict = field(default_factory=dict)  # (k, w) -> dim
    max_weight: int = 0
    min_weight: int = 0
    rank: int = 0
    kind: str = "cohomology"

    def total(self, k: int) -> int:
        return sum(d for (kk, _), d in self.dims.items() if kk == k)

    def totals(self) -> tuple:
        return tuple(self.total(k) for k in range(self.rank + 1))

    def nonzero(self) -> dict:
        return {key: d for key, d in sorted(self.dims.items()) if d}

    def as_dict(self):
        return {"kind": self.kind, "max_weight": self.max_weight, "min_weight": self.min_weight,
                "totals": list(self.totals()),
                "pieces": [{"degree": k, "weight": w, "dim": d} for (k, w), d in sorted(self.dims.items()) if d]}


class CochainComplex:
    """Forms on L with values in A^r (trivial when no connection is given)."""

    def __init__(self, algebroid: Algebroid, connection: Connection | None = None, coefficient_weight: int = 0):
        if connection is not None:
            same_algebroid(algebroid, connection.algebroid)
            report = check_flat(connection)
            if not report.passed:
                v = report.violations[0]
                raise NonFlat(f"coefficient connection has curvature {v.lhs} on {v.witness}")
        self.algebroid = algebroid
        self.connection = connection
        self.coefficient_weight = coefficient_weight

    @property
    def module_rank(self) -> int:
        return self.connection.module_rank if self.connection else 1

    def differential(self, omega):
        """Apply d to a Form (module rank 1) or to a tuple of Forms (one per module basis element)."""
        L = self.algebroid
        single = isinstance(omega, Form)
        forms = (omega,) if single else tuple(omega)
        if len(forms) != self.module_rank:
            raise RankMismatch(f"expected {self.module_rank} form components, got {len(forms)}")
        for w in forms:
            same_algebroid(L, w.algebroid)
        mats = self.connection.matrices if self.connection else None
        res = [Form(L, d) for d in _ce(L, [w.components for w in forms], mats)]
        return res[0] if single else tuple(res)

    # weight-graded pieces
    def require_weights(self):
        L = self.algebroid
        if not L.has_weights:
            raise NotHomogeneous(f"{L.name or 'algebroid'} carries no weights")
        if any(w <= 0 for w in L.var_weights):
            raise WeightUnbounded("every variable needs positive weight for finite weight pieces")
        bad = weight_violations(L)
        if self.connection is not None:
            bad += _connection_homogeneity(self.connection)
        if bad:
            desc, comp, expected, found = bad[0]
            raise NotHomogeneous(f"{desc} = {comp} has weights {found}, expected {expected}", witness=bad[0])

    def min_weight(self) -> int:
        L = self.algebroid
        return self.coefficient_weight + min(-sum(L.basis_weights[i] for i in I)
                                             for k in range(L.rank + 1) for I in combinations(range(L.rank), k))

    def piece_basis(self, k: int, w: int) -> list:
        """(alpha, I, exponent) triples spanning the (k, w) piece."""
        L = self.algebroid
        if k < 0 or k > L.rank:
            return []
        out = []
        for I in combinations(range(L.rank), k):
            fw = w - self.coefficient_weight + sum(L.basis_weights[i] for i in I)
            for exp in monomials_of_weight(L.var_weights, fw):
                for alpha in range(self.module_rank):
                    out.append((alpha, I, exp))
        return out

    def matrix(self, k: int, w: int) -> QMatrix:
        """Matrix of d from the (k, w) piece to the (k+1, w) piece."""
        src = self.piece_basis(k, w)
        dst = self.piece_basis(k + 1, w)
        index = {b: i for i, b in enumerate(dst)}
        L = self.algebroid
        r = self.module_rank
        mats = self.connection.matrices if self.connection else None
        cols = []
        for alpha, I, exp in src:
            comps = [dict() for _ in range(r)]
            comps[alpha][I] = Poly(L.ring, {exp: 1})
            col = [0] * len(dst)
            for beta, d in enumerate(_ce(L, comps, mats)):
                for J, c in d.items():
                    for e2, coef in c.items():
                        key = (beta, J, e2)
                        if key not in index:
                            raise NotHomogeneous(f"differential leaves weight {w} at {key}")
                        col[index[key]] += coef
            cols.append(col)
        return QMatrix.from_columns(cols, len(dst))

    def cohomology(self, max_weight: int) -> CohomologyReport:
        self.require_weights()
        L = self.algebroid
        lo = self.min_weight()
        rep = CohomologyReport(max_weight=max_weight, min_weight=lo, rank=L.rank)
        for w in range(lo, max_weight + 1):
            mats = {k: self.matrix(k, w) for k in range(-1, L.rank + 1)}
            for k in range(L.rank + 1):
                rep.dims[(k, w)] = quotient_dim(mats[k], mats[k - 1])
        return rep


def ce_differential(C: CochainComplex, omega):
    return C.differential(omega)


def cohomology(C: CochainComplex, max_weight: int) -> CohomologyReport:
    return C.cohomology(max_weight)


# -- dual algebroid ------------------------------------------------------

def dual_differential(Lstar: Algebroid):
    """d_* on multivectors of the primal: Lstar's CE differential, basis i paired with eps_i."""

    def d_star(P: Multivector) -> Multivector:
        L = P.algebroid
        if L.rank != Lstar.rank or L.ring != Lstar.ring:
            raise RankMismatch("primal and dual algebroids must share ring and rank")
        return Multivector(L, _ce(Lstar, [P.components])[0])

    return d_star


def check_bialgebroid(L: Algebroid, Lstar: Algebroid, samples: int = 20, seed: int = 0,
                      phi: AlgebroidMorphism | None = None, psi: AlgebroidMorphism | None = None) -> AxiomReport:
    """d_*[D1, D2] == [d_* D1, D2] + [D1, d_* D2] on degree-1 sections of L.

    Both sides must also be Lie algebroids; their axiom violations follow the
    compatibility ones, prefixed "L:" and "Lstar:". With ``phi: L -> M`` and
    ``psi: Lstar -> M`` both morphisms are checked too.
    """
    if L.rank != Lstar.rank:
        raise RankMismatch(f"ranks differ: {L.rank} vs {Lstar.rank}")
    from .sampling import random_multivector

    d = dual_differential(Lstar)
    report = AxiomReport()

    def test(D1, D2, witness):
        lhs = d(sn_bracket(D1, D2))
        rhs = sn_bracket(d(D1), D2) + sn_bracket(D1, d(D2))
        report.checked += 1
        if lhs != rhs:
            report.add("bialgebroid_compatibility", witness, lhs, rhs)

    e = [Multivector.basis(L, (i,)) for i in range(L.rank)]
    for i in range(L.rank):
        for j in range(i + 1, L.rank):
            test(e[i], e[j], (L.basis_names[i], L.basis_names[j]))
    rng = random.Random(seed)
    for _ in range(samples if L.rank else 0):
        D1, D2 = random_multivector(L, 1, rng), random_multivector(L, 1, rng)
        test(D1, D2, (D1, D2))
    subs = [("L", check_axioms(L, seed=seed)), ("Lstar", check_axioms(Lstar, seed=seed))]
    subs += [(label, check_morphism(m)) for label, m in (("phi", phi), ("psi", psi)) if m is not None]
    for label, sub in subs:
        for v in sub.violations:
            report.add(f"{label}:{v.axiom}", v.witness, v.lhs, v.rhs)
        report.checked += sub.checked
    return report


# -- pullback of forms ---------------------------------------------------

def pullback_form(phi: AlgebroidMorphism, omega: Form) -> Form:
    """phi~*: eps_i -> sum_j M[i][j] eps'_j, extended multiplicatively."""
    same_algebroid(omega.algebroid, phi.target)
    S = phi.source
    images = [Form(S, {(j,): phi.matrix[i][j] for j in range(S.rank)}) for i in range(phi.target.rank)]
    total = Form.zero(S)
    for I, f in omega.components.items():
        t = Form.function(S, f)
        for i in I:
            t = t.wedge(images[i])
            if not t:
                break
        total = total + t
    return total


def dual_cochain_map(phi: AlgebroidMorphism, samples: int = 10, seed: int = 0) -> AxiomReport:
    """Verify d_source o phi~* == phi~* o d_target on basis forms, coordinates and random forms."""
    from .sampling import random_form

    S, T = phi.source, phi.target
    report = AxiomReport()

    def test(omega, witness):
        lhs = ce_differential_trivial(S, pullback_form(phi, omega))
        rhs = pullback_form(phi, ce_differential_trivial(T, omega))
        report.checked += 1
        if lhs != rhs:
            report.add("cochain_map", (witness,), lhs, rhs)

    for k in range(T.rank + 1):
        for I in combinations(range(T.rank), k):
            test(Form.basis(T, I), Form.basis(T, I))
            for v in range(T.ring.nvars):
                omega = Form(T, {I: T.ring.var(v)})
                test(omega, omega)
    rng = random.Random(seed)
    for _ in range(samples):
        omega = random_form(T, rng.randint(0, T.rank), rng)
        test(omega, omega)
    return report
