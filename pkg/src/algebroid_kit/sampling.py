"""Seeded random elements for the randomized axiom suites.

Every randomized check takes an explicit ``random.Random`` so runs with the
same seed are reproducible.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from .polycore import Poly, PolyRing


def random_rational(rng: random.Random, bound: int = 3) -> Fraction:
    num = rng.randint(-bound, bound)
    den = rng.choice((1, 1, 1, 2, 3))
    return Fraction(num, den)


def random_poly(ring: PolyRing, rng: random.Random, max_degree: int = 2, max_terms: int = 3) -> Poly:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        exp = [0] * ring.nvars
        for _ in range(rng.randint(0, max_degree)):
            if ring.nvars:
                exp[rng.randrange(ring.nvars)] += 1
        terms[tuple(exp)] = terms.get(tuple(exp), 0) + random_rational(rng)
    return Poly(ring, terms)


def random_section(algebroid, rng: random.Random, max_degree: int = 2) -> tuple[Poly, ...]:
    return tuple(random_poly(algebroid.ring, rng, max_degree) for _ in range(algebroid.rank))


def random_components(algebroid, degree: int, rng: random.Random, max_degree: int = 2,
                      density: float = 0.6) -> dict:
    comps = {}
    for idx in combinations(range(algebroid.rank), degree):
        if rng.random() < density:
            p = random_poly(algebroid.ring, rng, max_degree)
            if p:
                comps[idx] = p
    return comps


def random_multivector(algebroid, degree: int, rng: random.Random, max_degree: int = 2):
    from .exterior import Multivector
    return Multivector(algebroid, random_components(algebroid, degree, rng, max_degree))


def random_form(algebroid, degree: int, rng: random.Random, max_degree: int = 2):
    from .exterior import Form
    return Form(algebroid, random_components(algebroid, degree, rng, max_degree))
