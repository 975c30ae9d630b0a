import random

import pytest

from algebroid_kit.algebroid import AlgebroidMorphism, identity_morphism, tangent_algebroid
from algebroid_kit.connection import (AtiyahOperator, Connection, check_flat, check_induced_law, compose_connection,
                                      curvature, curvature_sections, induced_top_connection)
from algebroid_kit.errors import (AlgebroidMismatch, MorphismInvalid, NonFlat, NotInjective, Obstructed,
                                  RankMismatch)
from algebroid_kit.fixtures import fixture
from algebroid_kit.polycore import Derivation, PolyRing
from algebroid_kit.sampling import random_poly, random_section

R1 = PolyRing(("x",))
R2 = PolyRing(("x", "y"))
T1, T2 = tangent_algebroid(R1), tangent_algebroid(R2)


def exact_connection(L, f):
    """Rank-1 connection with multipliers a(e_i)(f); flat because the multipliers form a closed 1-form."""
    return Connection.rank_one(L, [d(f) for d in L.anchor])


def test_atiyah_operator_action():
    x, y = R2.gens()
    op = AtiyahOperator([[x]], Derivation.partial(R2, 1))
    assert op((y * y,)) == (x * y * y + y * 2,)
    assert op.commutator(op).is_zero()


def test_trivial_connection_is_flat():
    nabla = Connection.trivial(T2)
    for i in range(2):
        for j in range(2):
            assert curvature(nabla, i, j).is_zero()
    assert check_flat(nabla).passed


def test_log_xy_constant_connection_is_flat():
    L = fixture("log-xy").algebroid
    nabla = Connection.rank_one(L, [1, 0])
    assert curvature(nabla, 0, 1).is_zero()
    assert check_flat(nabla).passed


def test_non_flat_example():
    nabla = Connection.rank_one(T2, [R2.var(1), R2.zero()])
    R = curvature(nabla, 0, 1)
    # R(D, D') = nabla_[D,D'] - [nabla_D, nabla_D']: here 0 - (-1)
    assert R.symbol.is_zero()
    assert R.matrix == ((R2.one(),),)
    rep = check_flat(nabla)
    assert [v.axiom for v in rep.violations] == ["flatness"]


def test_curvature_bilinear_and_antisymmetric():
    nabla = Connection.rank_one(T2, [R2.var(1), R2.var(0) * R2.var(0)])
    rng = random.Random(0)
    for _ in range(20):
        u, v = random_section(T2, rng), random_section(T2, rng)
        f = random_poly(R2, rng)
        Ruv = curvature_sections(nabla, u, v)
        assert curvature_sections(nabla, u, tuple(f * c for c in v)) == Ruv.scale(f)
        assert curvature_sections(nabla, v, u) == Ruv.scale(-R2.one())
        assert Ruv.symbol.is_zero()


def test_symbol_equals_anchor():
    for name in ("log-xy", "sl2", "poisson-logx"):
        b = fixture(name)
        for op, a in zip(b.connection.operators, b.algebroid.anchor):
            assert op.symbol == a


def test_compose_connection_examples():
    nabla = exact_connection(T2, R2.parse("x^2*y"))
    assert compose_connection(nabla, identity_morphism(T2)) == nabla
    log = fixture("log-xy")
    composed = compose_connection(Connection.trivial(T2), log.morphism)
    assert check_flat(composed).passed
    assert composed.operators[0].symbol == log.algebroid.anchor[0]
    bad = Connection.rank_one(T2, [R2.var(1), R2.zero()])
    pulled = compose_connection(bad, log.morphism)
    x, y = R2.gens()
    assert curvature(pulled, 0, 1).matrix == ((x * y,),)


def test_compose_connection_errors():
    with pytest.raises(AlgebroidMismatch):
        compose_connection(Connection.trivial(T1), identity_morphism(T2))
    not_a_morphism = AlgebroidMorphism(T2, T2, [[R2.zero(), R2.one()], [R2.one(), R2.zero()]])
    with pytest.raises(MorphismInvalid):
        compose_connection(Connection.trivial(T2), not_a_morphism)


@pytest.mark.parametrize("name", ["log-xy", "poisson-symplectic", "poisson-logx"])
def test_compose_preserves_flatness(name):
    b = fixture(name)
    T = b.morphism.target
    rng = random.Random(name)
    for _ in range(5):
        nabla = exact_connection(T, random_poly(T.ring, rng, 3))
        assert check_flat(nabla).passed
        assert check_flat(compose_connection(nabla, b.morphism)).passed


def test_induced_top_connection_log_xy():
    log = fixture("log-xy")
    induced = induced_top_connection(Connection.trivial(T2), log.morphism)
    assert induced.multipliers() == (R2.one(), R2.one())
    assert check_flat(induced).passed
    assert check_induced_law(Connection.trivial(T2), induced, log.morphism, samples=30).passed
    assert induced == log.connection


def test_induced_top_connection_identity_and_log_x():
    nabla = exact_connection(T2, R2.parse("x*y + y^3"))
    assert induced_top_connection(nabla, identity_morphism(T2)) == nabla
    b = fixture("log-x")
    induced = induced_top_connection(Connection.trivial(T1), b.morphism)
    assert induced.multipliers() == (R1.one(),)


def test_induced_law_with_nontrivial_input():
    log = fixture("log-xy")
    nabla = exact_connection(T2, R2.parse("x^2 - 3*y"))
    induced = induced_top_connection(nabla, log.morphism)
    assert check_flat(induced).passed
    assert check_induced_law(nabla, induced, log.morphism, samples=40, seed=3).passed
    x, y = R2.gens()
    # g'_1 = x * 2x + 1, g'_2 = y * (-3) + 1
    assert induced.multipliers() == (x * x * 2 + 1, y * -3 + 1)


def test_induced_errors():
    x = R2.var(0)
    z, one = R2.zero(), R2.one()
    with pytest.raises(NotInjective):
        induced_top_connection(Connection.trivial(T2), AlgebroidMorphism(T2, T2, [[one, z], [one, z]]))
    with pytest.raises(NonFlat):
        induced_top_connection(Connection.rank_one(T2, [R2.var(1), z]), identity_morphism(T2))
    with pytest.raises(RankMismatch):
        induced_top_connection(Connection.trivial(T2, 2), identity_morphism(T2))
    # columns d/dx and x d/dy: d/dx(det) = 1 is not divisible by det = x
    with pytest.raises(Obstructed) as exc:
        induced_top_connection(Connection.trivial(T2), AlgebroidMorphism(T2, T2, [[one, z], [z, x]]))
    assert exc.value.determinant == x
