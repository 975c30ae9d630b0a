import random

import pytest

from algebroid_kit.algebroid import (AlgebroidMorphism, bracket_sections, compose_morphisms, identity_morphism,
                                     tangent_algebroid)
from algebroid_kit.errors import AlgebroidMismatch, DegreeError
from algebroid_kit.exterior import (Form, Multivector, check_gerstenhaber, contract, gerstenhaber_morphism_check,
                                    lie_derivative, merge_sign, pairing, sn_bracket, wedge, wedge_map)
from algebroid_kit.fixtures import NAMES, fixture, sl2_algebroid
from algebroid_kit.polycore import Derivation, PolyRing
from algebroid_kit.sampling import random_form, random_multivector, random_poly, random_section

R1 = PolyRing(("x",))
R2 = PolyRing(("x", "y"))
R3 = PolyRing(("x", "y", "z"))
T1, T2, T3 = (tangent_algebroid(R) for R in (R1, R2, R3))


def mv(L, comps):
    return Multivector(L, {tuple(k): L.ring.parse(v) if isinstance(v, str) else v for k, v in comps.items()})


# -- independent oracle: polyvector fields as superfunctions in odd variables xi_i ---------

def _right_xi_derivative(P, i):
    out = {}
    for I, f in P.items():
        if i in I:
            after = len(I) - 1 - I.index(i)
            rest = tuple(j for j in I if j != i)
            out[rest] = out.get(rest, f.ring.zero()) + (f if after % 2 == 0 else -f)
    return out


def _x_derivative(P, i):
    d = Derivation.partial(next(iter(P.values())).ring, i) if P else None
    return {I: d(f) for I, f in P.items()}


def _super_mul(P, Q):
    out = {}
    for I, f in P.items():
        for J, g in Q.items():
            s = merge_sign(I + J)
            if s:
                K = tuple(sorted(I + J))
                out[K] = out.get(K, f.ring.zero()) + (f * g if s > 0 else -(f * g))
    return out


def schouten_oracle(P, p, Q, q):
    """Classical Schouten bracket sum_i (P d<-/dxi_i)(d_i Q) - (-1)^{(p-1)(q-1)} (Q d<-/dxi_i)(d_i P)."""
    n = P.algebroid.ring.nvars
    total = {}
    sign = -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1
    for i in range(n):
        for K, c in _super_mul(_right_xi_derivative(P.components, i), _x_derivative(Q.components, i)).items():
            total[K] = total.get(K, c.ring.zero()) + c
        for K, c in _super_mul(_right_xi_derivative(Q.components, i), _x_derivative(P.components, i)).items():
            total[K] = total.get(K, c.ring.zero()) + (c if sign > 0 else -c)
    return Multivector(P.algebroid, total)


def test_wedge_examples():
    e1, e2 = Multivector.basis(T2, (0,)), Multivector.basis(T2, (1,))
    assert wedge(e1, e2).components == {(0, 1): R2.one()}
    assert wedge(e2, e1) == -wedge(e1, e2)
    x = R2.var(0)
    assert wedge(e1 * x + e2, e2) == Multivector(T2, {(0, 1): x})
    with pytest.raises(AlgebroidMismatch):
        wedge(e1, Multivector.basis(T1, (0,)))


def test_sn_examples():
    d = Multivector.basis(T1, (0,))
    assert sn_bracket(d, Multivector.function(T1, R1.var(0))) == Multivector.function(T1, R1.one())
    for name in NAMES:
        L = fixture(name).algebroid
        e = Multivector.basis(L, (0,))
        assert sn_bracket(e, e).is_zero()
    pi = Multivector.basis(T2, (0, 1))
    assert sn_bracket(pi, pi).is_zero()


def test_sn_matches_schouten_oracle():
    rng = random.Random(11)
    for _ in range(150):
        p, q = rng.randint(0, 3), rng.randint(0, 3)
        P, Q = random_multivector(T3, p, rng), random_multivector(T3, q, rng)
        assert sn_bracket(P, Q) == schouten_oracle(P, p, Q, q)


def test_sn_nonpoisson_witness():
    pi = mv(T3, {(0, 1): "y", (1, 2): "x"})
    assert sn_bracket(pi, pi) == mv(T3, {(0, 1, 2): "-2*x"})
    assert schouten_oracle(pi, 2, pi, 2) == sn_bracket(pi, pi)


@pytest.mark.parametrize("name", NAMES)
def test_low_degree_bracket_matches_algebroid(name):
    L = fixture(name).algebroid
    n = L.rank
    gens = [L.ring.var(v) for v in range(L.ring.nvars)] + [L.ring.one()]
    for i in range(n):
        ei = Multivector.basis(L, (i,))
        for j in range(n):
            got = sn_bracket(ei, Multivector.basis(L, (j,)))
            assert got == Multivector.from_section(L, bracket_sections(L, L.basis_section(i), L.basis_section(j)))
        for f in gens:
            assert sn_bracket(ei, Multivector.function(L, f)) == Multivector.function(L, L.anchor[i](f))


def test_pairing_and_contract():
    eps12 = Form.basis(T2, (0, 1))
    assert pairing(eps12, Multivector.basis(T2, (0, 1))) == R2.one()
    e2 = Multivector.basis(T2, (1,))
    e1 = Multivector.basis(T2, (0,))
    assert pairing(eps12, e2.wedge(e1)) == -R2.one()
    assert contract(eps12, e1) == Form.basis(T2, (1,))
    assert contract(eps12, e2) == -Form.basis(T2, (0,))
    with pytest.raises(DegreeError):
        contract(Form.basis(T2, (0,)), e1.wedge(e2))


def test_contract_is_partial_pairing():
    # <i_P w, Q> = <w, P ^ Q>
    rng = random.Random(2)
    for _ in range(60):
        k = rng.randint(0, 3)
        j = rng.randint(0, k)
        w = random_form(T3, k, rng)
        P, Q = random_multivector(T3, j, rng), random_multivector(T3, k - j, rng)
        assert pairing(contract(w, P), Q) == pairing(w, P.wedge(Q))


def test_lie_derivative_examples():
    x = R1.var(0)
    eps = Form.basis(T1, (0,))
    assert lie_derivative(T1, (R1.one(),), eps * x) == eps
    assert lie_derivative(T1, (x,), Form.function(T1, x)) == Form.function(T1, x)


def test_lie_derivative_is_derivation_and_representation():
    rng = random.Random(4)
    for name in ("tangent-A2", "sl2", "log-xy", "poisson-logx"):
        L = fixture(name).algebroid
        for _ in range(25):
            D, D2 = random_section(L, rng), random_section(L, rng)
            a, b = rng.randint(0, L.rank), rng.randint(0, L.rank)
            w, eta = random_form(L, a, rng), random_form(L, b, rng)
            lhs = lie_derivative(L, D, w.wedge(eta))
            assert lhs == lie_derivative(L, D, w).wedge(eta) + w.wedge(lie_derivative(L, D, eta))
            comm = lie_derivative(L, D, lie_derivative(L, D2, w)) - lie_derivative(L, D2, lie_derivative(L, D, w))
            assert lie_derivative(L, bracket_sections(L, D, D2), w) == comm


def test_check_gerstenhaber_fixtures():
    assert check_gerstenhaber(T2, max_degree=2, samples=100).passed
    assert check_gerstenhaber(sl2_algebroid(), max_degree=3, samples=100).passed


def test_wrong_sign_bracket_fails_jacobi():
    # flip the bracket of positive-degree arguments but keep the anchor action
    def mutant(P, Q):
        out = sn_bracket(P, Q)
        if P.degrees() - {0} and Q.degrees() - {0}:
            return -out
        return out

    rep = check_gerstenhaber(fixture("tangent-A2").algebroid, max_degree=2, samples=60, seed=1, bracket=mutant)
    assert not rep.passed
    assert "jacobi" in {v.axiom for v in rep.violations}


def test_gerstenhaber_morphisms():
    for name in ("tangent-A2", "sl2", "log-xy"):
        L = fixture(name).algebroid
        assert gerstenhaber_morphism_check(identity_morphism(L), max_degree=2, samples=40).passed
    assert gerstenhaber_morphism_check(fixture("log-xy").morphism, max_degree=2, samples=60).passed
    zero = AlgebroidMorphism(sl2_algebroid(R1), T1, [[R1.zero()] * 3])
    assert gerstenhaber_morphism_check(zero, max_degree=3, samples=40).passed


def test_wedge_map_functorial():
    log = fixture("log-xy")
    phi = log.morphism
    x, y = R2.gens()
    swap = AlgebroidMorphism(T2, T2, [[R2.zero(), R2.one()], [R2.one(), R2.zero()]])
    rng = random.Random(9)
    for _ in range(40):
        k = rng.randint(0, 2)
        P = random_multivector(log.algebroid, k, rng)
        assert wedge_map(compose_morphisms(swap, phi), P) == wedge_map(swap, wedge_map(phi, P))
    assert wedge_map(phi, Multivector.basis(log.algebroid, (0, 1))) == Multivector(T2, {(0, 1): x * y})


def test_graded_commutativity_random():
    rng = random.Random(6)
    L = sl2_algebroid()
    for _ in range(100):
        a, b = rng.randint(0, 3), rng.randint(0, 3)
        P, Q = random_form(L, a, rng), random_form(L, b, rng)
        assert P.wedge(Q) == Q.wedge(P).scale(-1 if a * b % 2 else 1)


def test_jacobi_up_to_total_degree_five():
    rng = random.Random(8)
    L = fixture("poisson-logx").algebroid
    for _ in range(60):
        degs = [rng.randint(0, 2) for _ in range(3)]
        if sum(degs) > 5:
            continue
        P, Q, S = (random_multivector(L, d, rng, 1) for d in degs)
        p, q, s = degs

        def sg(e):
            return -1 if e % 2 else 1
        jac = (sn_bracket(P, sn_bracket(Q, S)).scale(sg((p - 1) * (s - 1)))
               + sn_bracket(Q, sn_bracket(S, P)).scale(sg((q - 1) * (p - 1)))
               + sn_bracket(S, sn_bracket(P, Q)).scale(sg((s - 1) * (q - 1))))
        assert jac.is_zero()


def test_function_leibniz_in_bracket():
    # [P, f g] = [P, f] g + f [P, g] for degree-1 P
    rng = random.Random(3)
    L = fixture("log-xy").algebroid
    for _ in range(30):
        P = random_multivector(L, 1, rng)
        f, g = random_poly(L.ring, rng), random_poly(L.ring, rng)
        F, G = Multivector.function(L, f), Multivector.function(L, g)
        assert sn_bracket(P, Multivector.function(L, f * g)) == sn_bracket(P, F).wedge(G) + F.wedge(sn_bracket(P, G))
