"""Shared brute-force oracles and cached pipeline builders for the tests.

Oracles here recompute expectations from first principles (exhaustive
enumeration, ideal closures, determinantal divisors) and never reuse the
code paths they are checking.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

from igmax.dclass import anchors, build_grid
from igmax.groupid import identify
from igmax.presentation import build_presentation
from igmax.ptrans import Monoid, PartialMap, compose
from igmax.schreier import build_schreier, verify_schreier
from igmax.squares import enumerate_singular_squares

MONOIDS = {"pt": Monoid.PARTIAL, "t": Monoid.TOTAL}


# ---------------------------------------------------------------------------
# brute enumeration of the monoids


@lru_cache(maxsize=None)
def all_partial_maps(n: int) -> tuple[PartialMap, ...]:
    vals = range(-1, n)
    return tuple(PartialMap(t) for t in itertools.product(vals, repeat=n))


@lru_cache(maxsize=None)
def all_total_maps(n: int) -> tuple[PartialMap, ...]:
    return tuple(PartialMap(t) for t in itertools.product(range(n), repeat=n))


def all_maps(n: int, monoid: Monoid) -> tuple[PartialMap, ...]:
    return all_total_maps(n) if monoid is Monoid.TOTAL else all_partial_maps(n)


def brute_idempotents(n: int, k: int, monoid: Monoid) -> set[PartialMap]:
    return {
        m
        for m in all_maps(n, monoid)
        if m.rank() == k and compose(m, m) == m
    }


# ---------------------------------------------------------------------------
# Green's relations via one-sided ideal closures (independent of rank/kernel
# characterizations)


@lru_cache(maxsize=None)
def green_ideals(n: int, monoid_key: str):
    monoid = MONOIDS[monoid_key]
    elems = all_maps(n, monoid)
    rights = {}
    lefts = {}
    twosided = {}
    for a in elems:
        right = {a} | {compose(a, s) for s in elems}
        left = {a} | {compose(s, a) for s in elems}
        two = set(right)
        for x in list(right):
            two.update(compose(s, x) for s in elems)
        rights[a] = frozenset(right)
        lefts[a] = frozenset(left)
        twosided[a] = frozenset(two)
    return elems, rights, lefts, twosided


# ---------------------------------------------------------------------------
# determinantal divisors: an independent oracle for Smith normal form


def minor_gcd_invariants(matrix: list[list[int]]) -> list[int]:
    """Invariant factors d_i = D_i / D_{i-1} with D_i = gcd of all i x i minors."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    divisors = [1]
    for size in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), size):
            for cols in itertools.combinations(range(n), size):
                g = math.gcd(g, _det([[matrix[i][j] for j in cols] for i in rows]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[i] // divisors[i - 1] for i in range(1, len(divisors))]


def _det(matrix: list[list[int]]) -> int:
    size = len(matrix)
    if size == 1:
        return matrix[0][0]
    total = 0
    for j in range(size):
        if matrix[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
            total += (-1) ** j * matrix[0][j] * _det(minor)
    return total


# ---------------------------------------------------------------------------
# cached pipelines shared across test modules


@lru_cache(maxsize=None)
def pipeline(monoid_key: str, n: int, k: int, anchor_rule: str = "lex", tie_break: str = "least"):
    monoid = MONOIDS[monoid_key]
    grid = build_grid(n, k, monoid)
    anchors_map = anchors(grid, anchor_rule)
    sys_ = build_schreier(grid, tie_break)
    assert verify_schreier(grid, sys_) == []
    singulars = enumerate_singular_squares(grid)
    pres = build_presentation(grid, sys_, anchors_map, singulars)
    return grid, anchors_map, sys_, singulars, pres


@lru_cache(maxsize=None)
def cached_identify(monoid_key: str, n: int, k: int, anchor_rule: str = "lex",
                    tie_break: str = "least"):
    return identify(n, k, MONOIDS[monoid_key], anchor_rule=anchor_rule, tie_break=tie_break)


# ---------------------------------------------------------------------------
# fixed small presentations with verified permutation realizations


def _make_presentation(gens, rels):
    from igmax.presentation import GroupPresentation

    return GroupPresentation(tuple(gens), tuple(rels), tuple("type3" for _ in rels))


def _power(g: int, n: int):
    e = 1 if n > 0 else -1
    return tuple((g, e) for _ in range(abs(n)))


def oracle_presentations():
    """(name, presentation, generator permutations or None, order, abelianization).

    The permutations realize the presented group faithfully; the realization
    is re-verified against the relators wherever it is used, so the closure
    order is an independent oracle for coset enumeration.
    """
    x = _power
    return [
        ("trivial", _make_presentation(["a"], [x(0, 1)]), [(0,)], 1, []),
        ("c2", _make_presentation(["a"], [x(0, 2)]), [(1, 0)], 2, [2]),
        ("c3", _make_presentation(["a"], [x(0, 3)]), [(1, 2, 0)], 3, [3]),
        ("c5", _make_presentation(["a"], [x(0, 5)]), [(1, 2, 3, 4, 0)], 5, [5]),
        ("c6_two_gen",
         _make_presentation(["a", "b"], [x(0, 2), x(1, 3), ((0, 1), (1, 1), (0, -1), (1, -1))]),
         [(1, 0, 2, 3, 4), (0, 1, 3, 4, 2)], 6, [6]),
        ("klein4",
         _make_presentation(["a", "b"], [x(0, 2), x(1, 2), (x(0, 1) + x(1, 1)) * 2]),
         [(1, 0, 2, 3), (0, 1, 3, 2)], 4, [2, 2]),
        ("s3_coxeter",
         _make_presentation(["a", "b"], [x(0, 2), x(1, 2), (x(0, 1) + x(1, 1)) * 3]),
         [(1, 0, 2), (0, 2, 1)], 6, [2]),
        ("s3_cyclic",
         _make_presentation(["r", "s"], [x(0, 3), x(1, 2), ((1, 1), (0, 1), (1, 1), (0, 1))]),
         [(1, 2, 0), (1, 0, 2)], 6, [2]),
        ("d4",
         _make_presentation(["a", "b"], [x(0, 2), x(1, 2), (x(0, 1) + x(1, 1)) * 4]),
         [(1, 0, 3, 2), (0, 3, 2, 1)], 8, [2, 2]),
        ("d5",
         _make_presentation(["a", "b"], [x(0, 2), x(1, 2), (x(0, 1) + x(1, 1)) * 5]),
         [(0, 4, 3, 2, 1), (2, 1, 0, 4, 3)], 10, [2]),
        ("q8",
         _make_presentation(["a", "b"],
                            [x(0, 4), x(0, 2) + x(1, -2), ((1, -1), (0, 1), (1, 1), (0, 1))]),
         None, 8, [2, 2]),
    ]
