"""Independent reference computations used to cross-check the library.

Everything here is deliberately naive: explicit enumeration, sympy linear
algebra, and closed formulas that only hold in low rank.
"""

from __future__ import annotations

import itertools

import sympy

from toroidal_k.fan import Cone, Fan


def ray_coordinates(sigma: Cone, v) -> list[sympy.Rational]:
    """Coefficients of v in the ray basis of a simplicial full-dimensional cone."""
    R = sympy.Matrix([list(r) for r in sigma.rays]).T
    return list(R.solve(sympy.Matrix(list(v))))


def oracle_tau(sigma: Cone, v) -> frozenset:
    """Rays with negative coefficient: v is a positive combination of the others modulo their span."""
    coords = ray_coordinates(sigma, v)
    if any(c == 0 for c in coords):
        raise ValueError("cocharacter is not generic for this cone")
    return frozenset(r for r, c in zip(sigma.rays, coords) if c < 0)


def oracle_quotient_smooth(sigma: Cone, tau: frozenset) -> bool:
    """Smoothness of sigma modulo the span of tau, for ambient rank at most 2."""
    n = sigma.ambient_rank
    if n > 2:
        raise NotImplementedError("the closed-form oracle covers rank <= 2")
    k = len(tau)
    if k == len(sigma.rays) or n - k == 1:
        # a point, or a ray in a rank-one lattice, after taking primitive images
        return True
    return abs(sympy.Matrix([list(r) for r in sigma.rays]).det()) == 1


def oracle_verdict(F: Fan, v) -> bool:
    """Exhaustive search over orderings of the maximal cones."""
    taus = [oracle_tau(s, v) for s in F.maximal]
    if not all(oracle_quotient_smooth(s, t) for s, t in zip(F.maximal, taus)):
        return False
    m = len(F.maximal)
    need = [(i, j) for i in range(m) for j in range(m) if i != j and taus[i] <= frozenset(F.maximal[j].rays)]
    for perm in itertools.permutations(range(m)):
        pos = {c: p for p, c in enumerate(perm)}
        if all(pos[i] < pos[j] for i, j in need):
            return True
    return False


def matrix_group_closure(generators) -> set:
    """All products of the generators, by breadth-first closure on integer matrices."""
    gens = [sympy.ImmutableMatrix(g) for g in generators]
    n = gens[0].shape[0]
    seen = {sympy.ImmutableMatrix(sympy.eye(n))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = sympy.ImmutableMatrix(a * g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


def toric_fans() -> dict[str, Fan]:
    """Small complete fans with at most six maximal cones."""

    def mk(n, *cones):
        return Fan(n, [Cone(c, n) for c in cones])

    return {
        "P1": mk(1, [(1,)], [(-1,)]),
        "P2": mk(2, [(1, 0), (0, 1)], [(0, 1), (-1, -1)], [(-1, -1), (1, 0)]),
        "weighted P(1,1,2)": mk(2, [(1, 0), (0, 1)], [(0, 1), (-1, -2)], [(-1, -2), (1, 0)]),
        "Hirzebruch F1": mk(2, [(1, 0), (0, 1)], [(0, 1), (-1, 1)], [(-1, 1), (0, -1)], [(0, -1), (1, 0)]),
        "P1 x P1": mk(2, [(1, 0), (0, 1)], [(0, 1), (-1, 0)], [(-1, 0), (0, -1)], [(0, -1), (1, 0)]),
        "hexagon (dP6)": mk(2, [(1, 0), (1, 1)], [(1, 1), (0, 1)], [(0, 1), (-1, 0)],
                            [(-1, 0), (-1, -1)], [(-1, -1), (0, -1)], [(0, -1), (1, 0)]),
        "A2 chamber orbit": mk(2, [(2, 1), (1, 2)], [(1, 2), (-1, 1)], [(-1, 1), (-2, -1)],
                               [(-2, -1), (-1, -2)], [(-1, -2), (1, -1)], [(1, -1), (2, 1)]),
    }
