"""The universal enveloping algebra of an algebroid in PBW normal form.

An element is a sum of f * e_i1 ... e_ik with i1 <= ... <= ik and the
polynomial coefficient f on the left.  Products are normalized with

    e_j e_i -> e_i e_j + [e_j, e_i]   (j > i)
    e_i f   -> f e_i + a(e_i)(f)

:func:`rewrite_normal_form` applies these rules literally in a chosen order and
serves as an independent check of :func:`ue_mul`.
"""
from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, permutations
from math import factorial
from typing import Mapping

from .algebroid import Algebroid, AlgebroidMorphism, AxiomReport, check_morphism, same_algebroid
from .errors import MorphismInvalid, UnknownVariable
from .polycore import ExpressionAlgebra, ExpressionParser, Poly, format_term, join_signed


def _gen_label(L: Algebroid, K) -> str:
    parts = []
    i = 0
    while i < len(K):
        j = i
        while j < len(K) and K[j] == K[i]:
            j += 1
        name = L.basis_names[K[i]]
        parts.append(name if j - i == 1 else f"{name}^{j - i}")
        i = j
    return "*".join(parts)


def _format(L: Algebroid, terms: Mapping) -> str:
    pieces = []
    for K in sorted(terms, key=lambda k: (-len(k), k)):
        label = _gen_label(L, K)
        for exp, c in terms[K].sorted_terms():
            pieces.append((c < 0, format_term(L.ring, exp, c, label)))
    return join_signed(pieces)


class _PolyTerms:
    __slots__ = ("algebroid", "terms")

    def __init__(self, algebroid: Algebroid, terms: Mapping | None = None):
        out = {}
        for K, f in (terms or {}).items():
            K = tuple(K)
            if list(K) != sorted(K) or any(not 0 <= i < algebroid.rank for i in K):
                raise ValueError(f"index tuple {K} is not nondecreasing in range")
            if not isinstance(f, Poly):
                f = algebroid.ring.const(f)
            out[K] = out[K] + f if K in out else f
        self.algebroid = algebroid
        self.terms = {K: f for K, f in out.items() if f}

    def _new(self, terms):
        return type(self)(self.algebroid, terms)

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        same_algebroid(self.algebroid, other.algebroid)

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for K, f in other.terms.items():
            out[K] = out[K] + f if K in out else f
        return self._new(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._new({K: -f for K, f in self.terms.items()})

    def scale(self, f):
        return self._new({K: f * g for K, g in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        """Filtration degree; -1 for zero."""
        return max((len(K) for K in self.terms), default=-1)

    def part(self, k: int):
        return self._new({K: f for K, f in self.terms.items() if len(K) == k})

    def coefficient(self, K) -> Poly:
        return self.terms.get(tuple(K), self.algebroid.ring.zero())

    def __eq__(self, other):
        return type(other) is type(self) and self.algebroid == other.algebroid and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        return _format(self.algebroid, self.terms)

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class UEnvElement(_PolyTerms):
    """Element of U(A, L) in PBW normal form."""

    __slots__ = ()

    @classmethod
    def function(cls, L, f):
        return cls(L, {(): f})

    @classmethod
    def generator(cls, L, i):
        return cls(L, {(i,): L.ring.one()})

    def __mul__(self, other):
        if isinstance(other, UEnvElement):
            return ue_mul(self, other)
        return self.scale(other)

    def __pow__(self, k: int):
        out = UEnvElement.function(self.algebroid, self.algebroid.ring.one())
        for _ in range(k):
            out = ue_mul(out, self)
        return out


class SymElement(_PolyTerms):
    """Element of the symmetric algebra of L over A; keys are sorted multisets."""

    __slots__ = ()

    def __mul__(self, other):
        if isinstance(other, SymElement):
            return sym_mul(self, other)
        return self.scale(other)


def iota(L: Algebroid, u) -> UEnvElement:
    """Image of a section sum u_i e_i."""
    return UEnvElement(L, {(i,): c for i, c in enumerate(u)})


class _Normalizer:
    def __init__(self, L: Algebroid):
        self.L = L
        self.cache = {}

    def mul_gen(self, i: int, X: dict) -> dict:
        """e_i * X for X in normal form (dict K -> Poly)."""
        L = self.L
        out = {}

        def add(K, f):
            if f:
                out[K] = out[K] + f if K in out else f

        for K, h in X.items():
            for K2, c in self.gen_word(i, K).items():
                add(K2, h * c)
            add(K, L.anchor[i](h))
        return {K: f for K, f in out.items() if f}

    def gen_word(self, i: int, K: tuple) -> dict:
        """Normal form of e_i e_K for a sorted K."""
        key = (i, K)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        L = self.L
        if not K or i <= K[0]:
            res = {(i,) + K: L.ring.one()}
        else:
            k1, rest = K[0], K[1:]
            res = dict(self.mul_gen(k1, self.gen_word(i, rest)))
            for m, c in enumerate(L.structure_constants(i, k1)):
                if c:
                    for K2, h in self.gen_word(m, rest).items():
                        v = c * h
                        res[K2] = res[K2] + v if K2 in res else v
            res = {K2: f for K2, f in res.items() if f}
        self.cache[key] = res
        return res


@lru_cache(maxsize=64)
def _normalizer(L: Algebroid) -> _Normalizer:
    return _Normalizer(L)


def ue_mul(a: UEnvElement, b: UEnvElement) -> UEnvElement:
    same_algebroid(a.algebroid, b.algebroid)
    L = a.algebroid
    N = _normalizer(L)
    total = {}
    for K, f in a.terms.items():
        X = b.terms
        for i in reversed(K):
            X = N.mul_gen(i, X)
        for K2, h in X.items():
            v = f * h
            total[K2] = total[K2] + v if K2 in total else v
    return UEnvElement(L, total)


def sym_mul(a: SymElement, b: SymElement) -> SymElement:
    same_algebroid(a.algebroid, b.algebroid)
    out = {}
    for K, f in a.terms.items():
        for K2, g in b.terms.items():
            M = tuple(sorted(K + K2))
            out[M] = out[M] + f * g if M in out else f * g
    return SymElement(a.algebroid, out)


def ue_gr(a: UEnvElement) -> SymElement:
    d = a.degree()
    return SymElement(a.algebroid, {K: f for K, f in a.terms.items() if len(K) == d})


def gr_part(a: UEnvElement, k: int) -> SymElement:
    """Degree-k symbol of an element of filtration degree <= k."""
    return SymElement(a.algebroid, {K: f for K, f in a.terms.items() if len(K) == k})


def symmetrize(m: SymElement) -> UEnvElement:
    L = m.algebroid
    total = UEnvElement(L)
    for K, f in m.terms.items():
        acc = UEnvElement(L)
        for perm in permutations(K):
            w = UEnvElement.function(L, L.ring.one())
            for i in perm:
                w = ue_mul(w, UEnvElement.generator(L, i))
            acc = acc + w
        total = total + acc.scale(f * Fraction(1, factorial(len(K))))
    return total


# -- literal rewriting oracle -----------------------------------------------

def _is_normal(word) -> bool:
    start = 1 if word and word[0][0] == "p" else 0
    gens = word[start:]
    if any(t[0] != "g" for t in gens):
        return False
    return all(gens[a][1] <= gens[a + 1][1] for a in range(len(gens) - 1))


def _violations(word):
    out = []
    for a in range(len(word) - 1):
        s, t = word[a], word[a + 1]
        if s[0] == "p" and t[0] == "p":
            out.append(a)
        elif s[0] == "g" and t[0] == "p":
            out.append(a)
        elif s[0] == "g" and t[0] == "g" and s[1] > t[1]:
            out.append(a)
    return out


def rewrite_normal_form(L: Algebroid, words, strategy: str = "leftmost", seed: int = 0,
                        max_steps: int = 1_000_000) -> UEnvElement:
    """Normalize a sum of words by applying the rewriting rules one at a time.

    A word is a sequence of ``("p", Poly)`` and ``("g", index)`` tokens.
    ``strategy`` is ``"leftmost"`` or ``"random"``.
    """
    rng = random.Random(seed)
    ring = L.ring
    stack = [tuple(w) for w in words]
    result = UEnvElement(L)
    steps = 0
    while stack:
        steps += 1
        if steps > max_steps:
            raise RuntimeError("rewriting did not terminate within the step budget")
        word = stack.pop(rng.randrange(len(stack)) if strategy == "random" else -1)
        if any(t[0] == "p" and not t[1] for t in word):
            continue
        if _is_normal(word):
            if word and word[0][0] == "p":
                f, gens = word[0][1], word[1:]
            else:
                f, gens = ring.one(), word
            result = result + UEnvElement(L, {tuple(t[1] for t in gens): f})
            continue
        viol = _violations(word)
        a = rng.choice(viol) if strategy == "random" else viol[0]
        s, t = word[a], word[a + 1]
        pre, post = word[:a], word[a + 2:]
        if s[0] == "p":
            stack.append(pre + (("p", s[1] * t[1]),) + post)
        elif t[0] == "p":
            stack.append(pre + (t, s) + post)
            stack.append(pre + (("p", L.anchor[s[1]](t[1])),) + post)
        else:
            stack.append(pre + (t, s) + post)
            for m, c in enumerate(L.structure_constants(s[1], t[1])):
                if c:
                    stack.append(pre + (("p", c), ("g", m)) + post)
    return result


def element_words(a: UEnvElement):
    """Words of a normal-form element, for feeding back into the rewriter."""
    return [(("p", f),) + tuple(("g", i) for i in K) for K, f in a.terms.items()]


# -- parsing ---------------------------------------------------------------

def pbw_parse(L: Algebroid, text: str) -> UEnvElement:
    """Parse an expression over ring variables and basis names into normal form."""
    ring = L.ring

    def atom(name):
        if name in L.basis_names:
            return UEnvElement.generator(L, L.basis_names.index(name))
        if name in ring.variables:
            return UEnvElement.function(L, ring.var(name))
        raise UnknownVariable(name)

    def as_constant(a):
        if not a.terms:
            return Fraction(0)
        if set(a.terms) == {()} and a.terms[()].is_constant():
            return a.terms[()].constant_value()
        return None

    alg = ExpressionAlgebra(const=lambda c: UEnvElement.function(L, ring.const(c)), atom=atom,
                            as_constant=as_constant)
    return ExpressionParser(alg).parse(text)


# -- functoriality -----------------------------------------------------------

class UFunctor:
    """U(phi): e'_j -> sum_i M[i][j] e_i, extended multiplicatively and A-linearly."""

    def __init__(self, phi: AlgebroidMorphism):
        self.phi = phi
        T = phi.target
        self.images = [iota(T, phi.column(j)) for j in range(phi.source.rank)]

    def __call__(self, a: UEnvElement) -> UEnvElement:
        same_algebroid(a.algebroid, self.phi.source)
        T = self.phi.target
        total = UEnvElement(T)
        for K, f in a.terms.items():
            w = UEnvElement.function(T, f)
            for j in K:
                w = ue_mul(w, self.images[j])
            total = total + w
        return total


def ue_functor(phi: AlgebroidMorphism, validate: bool = True) -> UFunctor:
    if validate:
        rep = check_morphism(phi)
        if not rep.passed:
            v = rep.violations[0]
            raise MorphismInvalid(f"{v.axiom} fails on {v.witness}: {v.lhs} != {v.rhs}")
    return UFunctor(phi)


def sym_functor(phi: AlgebroidMorphism, m: SymElement) -> SymElement:
    T = phi.target
    images = [SymElement(T, {(i,): c for i, c in enumerate(phi.column(j))}) for j in range(phi.source.rank)]
    total = SymElement(T)
    for K, f in m.terms.items():
        w = SymElement(T, {(): f})
        for j in K:
            w = sym_mul(w, images[j])
        total = total + w
    return total


def _monomials(L: Algebroid, max_degree: int):
    for k in range(max_degree + 1):
        for K in combinations_with_replacement(range(L.rank), k):
            yield K


def random_ue(L: Algebroid, rng: random.Random, max_degree: int = 3) -> UEnvElement:
    from .sampling import random_poly
    terms = {}
    for _ in range(rng.randint(1, 3)):
        k = rng.randint(0, max_degree) if L.rank else 0
        K = tuple(sorted(rng.randrange(L.rank) for _ in range(k)))
        terms[K] = random_poly(L.ring, rng, max_degree=1)
    return UEnvElement(L, terms)


def check_ue_functor(phi: AlgebroidMorphism, max_degree: int = 3, samples: int = 20, seed: int = 0) -> AxiomReport:
    """U(phi) is multiplicative and gr(U(phi)) agrees with Sym(phi) degreewise."""
    U = ue_functor(phi, validate=False)
    S = phi.source
    report = AxiomReport()
    rng = random.Random(seed)
    monos = list(_monomials(S, max_degree))
    for K in monos:
        a = UEnvElement(S, {K: S.ring.one()})
        for v in range(S.ring.nvars):
            probe = a.scale(S.ring.var(v))
            _square(U, phi, probe, len(K), report)
        _square(U, phi, a, len(K), report)
    for K1 in monos:
        for K2 in monos:
            if len(K1) + len(K2) <= max_degree:
                a, b = UEnvElement(S, {K1: S.ring.one()}), UEnvElement(S, {K2: S.ring.one()})
                _multiplicative(U, a, b, report)
    for _ in range(samples):
        a, b = random_ue(S, rng, max_degree), random_ue(S, rng, max_degree)
        _multiplicative(U, a, b, report)
        _square(U, phi, a, a.degree(), report)
    return report


def _multiplicative(U, a, b, report):
    lhs, rhs = U(ue_mul(a, b)), ue_mul(U(a), U(b))
    report.checked += 1
    if lhs != rhs:
        report.add("algebra_map", (a, b), lhs, rhs)


def _square(U, phi, a, k, report):
    lhs = sym_functor(phi, gr_part(a, k))
    rhs = gr_part(U(a), k)
    report.checked += 1
    if lhs != rhs:
        report.add("graded_square", (a,), lhs, rhs)


def check_enveloping_relations(L: Algebroid) -> AxiomReport:
    """e_i e_j - e_j e_i = [e_i, e_j] and e_i x - x e_i = a(e_i)(x) on all generators."""
    report = AxiomReport()
    e = [UEnvElement.generator(L, i) for i in range(L.rank)]
    for i in range(L.rank):
        for j in range(L.rank):
            lhs = ue_mul(e[i], e[j]) - ue_mul(e[j], e[i])
            rhs = iota(L, L.structure_constants(i, j))
            report.checked += 1
            if lhs != rhs:
                report.add("bracket_relation", (L.basis_names[i], L.basis_names[j]), lhs, rhs)
        for v in range(L.ring.nvars):
            x = UEnvElement.function(L, L.ring.var(v))
            lhs = ue_mul(e[i], x) - ue_mul(x, e[i])
            rhs = UEnvElement.function(L, L.anchor[i](L.ring.var(v)))
            report.checked += 1
            if lhs != rhs:
                report.add("anchor_relation", (L.basis_names[i], L.ring.variables[v]), lhs, rhs)
    return report
