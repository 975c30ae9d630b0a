"""Shared strategies and small utilities for the test suite."""
from fractions import Fraction
from itertools import combinations

import sympy

from hypothesis import strategies as st

from algebroid_kit.polycore import Poly

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)

# acceptance lines, filled by test_acceptance and printed in the terminal summary
ACCEPTANCE = {}


def polys(ring, max_degree=3, max_terms=4):
    exps = st.tuples(*[st.integers(0, max_degree)] * ring.nvars)
    return st.dictionaries(exps, rationals, max_size=max_terms).map(lambda d: Poly(ring, d))


def evaluate_point(rng, n):
    return [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]


def sl2_dims_by_hand():
    """CE complex of sl2 from the evaluation formula, with sympy ranks."""
    names = ["e", "f", "h"]
    c = {("e", "f"): {"h": 1}, ("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}}
    br = {}
    for (a, b), v in c.items():
        br[(a, b)] = v
        br[(b, a)] = {k: -s for k, s in v.items()}
    idx = {n: i for i, n in enumerate(names)}

    def sort_sign(seq):
        seq = list(seq)
        s = 1
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                if seq[i] == seq[j]:
                    return 0, None
                if seq[i] > seq[j]:
                    s = -s
        return s, tuple(sorted(seq))

    def dmatrix(k):
        rows = list(combinations(range(3), k + 1))
        cols = list(combinations(range(3), k))
        M = sympy.zeros(len(rows), len(cols))
        for ci, I in enumerate(cols):
            # (d w)(x_0..x_k) = sum_{i<j} (-1)^(i+j) w([x_i, x_j], x_0..^..^..x_k), w = eps_I
            for ri, X in enumerate(rows):
                total = 0
                for i in range(k + 1):
                    for j in range(i + 1, k + 1):
                        rest = [X[t] for t in range(k + 1) if t not in (i, j)]
                        for name, coef in br.get((names[X[i]], names[X[j]]), {}).items():
                            s, key = sort_sign([idx[name]] + rest)
                            if s and key == I:
                                total += (-1) ** (i + j) * coef * s
                M[ri, ci] = total
        return M

    mats = {k: dmatrix(k) for k in range(3)}
    dims = [len(list(combinations(range(3), k))) for k in range(4)]
    out = []
    for k in range(4):
        rank_out = mats[k].rank() if k < 3 else 0
        rank_in = mats[k - 1].rank() if k > 0 else 0
        out.append(dims[k] - rank_out - rank_in)
    return tuple(out)
