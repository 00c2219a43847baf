"""Rational polyhedral cones and fans, and the cellularity criterion for toric varieties.

Cones are given by primitive ray generators in N = Z^n.  All geometry is
exact: facet normals are integer vectors computed from integer kernels, and
every membership test is a sign test on integer pairings.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .lattice import (
    Vector,
    integer_kernel,
    invariant_factors,
    lex_positive,
    primitive,
    quotient_lattice,
    rank as matrix_rank,
    rational_inverse,
    saturation,
)


class FanError(ValueError):
    pass


class NonGenericError(ValueError):
    pass


def _dot(u, x) -> int:
    return sum(a * b for a, b in zip(u, x))


class Cone:
    """A strongly convex rational polyhedral cone spanned by primitive rays."""

    __slots__ = ("rays", "ambient_rank", "_facets", "_faces", "_dim")

    def __init__(self, rays: Iterable[Sequence[int]], ambient_rank: int | None = None, *, check: bool = True):
        prim = []
        for r in rays:
            r = tuple(int(x) for x in r)
            if ambient_rank is None:
                ambient_rank = len(r)
            if len(r) != ambient_rank:
                raise FanError(f"ray {r} does not have rank {ambient_rank}")
            if not any(r):
                raise FanError("the zero vector is not a ray")
            prim.append(primitive(r))
        if ambient_rank is None:
            raise FanError("ambient rank needed for the zero cone")
        self.rays: tuple[Vector, ...] = tuple(sorted(set(prim)))
        self.ambient_rank = ambient_rank
        self._facets = None
        self._faces = None
        self._dim = matrix_rank([list(r) for r in self.rays]) if self.rays else 0
        if check:
            self._validate()

    # identity is the ray set
    def key(self):
        return (self.ambient_rank, self.rays)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Cone({[list(r) for r in self.rays]})"

    @property
    def dim(self) -> int:
        return self._dim

    def contains_ray(self, r) -> bool:
        return tuple(r) in self.rays

    def is_face_of(self, other: "Cone") -> bool:
        return frozenset(self.rays) in other.face_raysets()

    def orthogonal_basis(self) -> list[Vector]:
        """Z-basis of the characters vanishing on the span of the cone."""
        if not self.rays:
            return integer_kernel([], self.ambient_rank)
        return integer_kernel([list(r) for r in self.rays], self.ambient_rank)

    # -- facets -------------------------------------------------------------
    def facets(self) -> list[tuple[Vector, frozenset]]:
        """List of (inward normal u, rays on the facet).

        Normals are only determined modulo the characters orthogonal to the
        cone, but their values on the rays are canonical.
        """
        if self._facets is not None:
            return self._facets
        d = self._dim
        out: dict[frozenset, Vector] = {}
        if d >= 1:
            for sub in itertools.combinations(self.rays, d - 1):
                if sub and matrix_rank([list(r) for r in sub]) != d - 1:
                    continue
                ker = integer_kernel([list(r) for r in sub], self.ambient_rank)
                u = next((b for b in ker if any(_dot(b, r) for r in self.rays)), None)
                if u is None:
                    continue
                vals = [_dot(u, r) for r in self.rays]
                if all(x >= 0 for x in vals):
                    pass
                elif all(x <= 0 for x in vals):
                    u = tuple(-x for x in u)
                else:
                    continue
                on = frozenset(r for r in self.rays if _dot(u, r) == 0)
                out.setdefault(on, u)
        self._facets = sorted(((u, s) for s, u in out.items()), key=lambda p: sorted(p[1]))
        return self._facets

    def face_raysets(self) -> frozenset:
        if self._faces is not None:
            return self._faces
        full = frozenset(self.rays)
        faces = {full}
        frontier = [s for _, s in self.facets()]
        facet_sets = list(frontier)
        while frontier:
            nxt = []
            for s in frontier:
                if s not in faces:
                    faces.add(s)
                    for t in facet_sets:
                        nxt.append(s & t)
            frontier = nxt
        self._faces = frozenset(faces)
        return self._faces

    def _validate(self):
        if not self.rays:
            return
        facets = self.facets()
        common = frozenset(self.rays)
        for _, s in facets:
            common &= s
        if common or (self._dim >= 1 and not facets):
            raise FanError(f"cone {self!r} is not strongly convex")
        raysets = self.face_raysets()
        for r in self.rays:
            if frozenset([r]) not in raysets:
                raise FanError(f"ray {list(r)} is not extremal in {self!r}")

    def inequalities(self) -> list[Vector]:
        """Integer u's with cone = {x : <u, x> >= 0 for all u}."""
        ineq = [u for u, _ in self.facets()]
        for k in self.orthogonal_basis():
            ineq.append(tuple(k))
            ineq.append(tuple(-x for x in k))
        return ineq


def faces(sigma: Cone) -> list[Cone]:
    """All faces of sigma, including {0} and sigma, ordered by dimension then rays."""
    out = [Cone(sorted(s), sigma.ambient_rank, check=False) for s in sigma.face_raysets()]
    return sorted(out, key=lambda c: (c.dim, c.rays))


def is_smooth_cone(sigma: Cone) -> bool:
    """True iff the rays extend to a Z-basis of the ambient lattice."""
    if not sigma.rays:
        return True
    if len(sigma.rays) != sigma.dim:
        return False
    return all(d == 1 for d in invariant_factors([list(r) for r in sigma.rays]))


def _extreme_rays(ineq: Sequence[Vector], n: int) -> set[Vector]:
    """Extreme rays of the pointed cone {x : <u,x> >= 0}, by brute force."""
    found = set()
    for sub in itertools.combinations(ineq, n - 1):
        ker = integer_kernel([list(u) for u in sub], n) if sub else integer_kernel([], n)
        if len(ker) != 1:
            continue
        r = ker[0]
        for cand in (r, tuple(-x for x in r)):
            if all(_dot(u, cand) >= 0 for u in ineq):
                found.add(primitive(cand))
    return found


def _common_face_ok(a: Cone, b: Cone) -> bool:
    n = a.ambient_rank
    shared = frozenset(a.rays) & frozenset(b.rays)
    if shared not in a.face_raysets() or shared not in b.face_raysets():
        return False
    ineq = a.inequalities() + b.inequalities()
    if n == 1:
        # the intersection is {0} or a ray; rays are +-1
        pts = {primitive(r) for r in ((1,), (-1,)) if all(_dot(u, r) >= 0 for u in ineq)}
        return pts == set(shared)
    return _extreme_rays(ineq, n) <= set(shared)


@dataclass
class Fan:
    """A fan given by its maximal cones; all faces are materialised.

    ``maximal`` preserves the input order of the maximal cones, which is the
    tie-breaking order used by the cellularity report.
    """

    ambient_rank: int
    maximal: list[Cone]
    cones: list[Cone] = field(default_factory=list)

    def __post_init__(self):
        seen = {}
        for sigma in self.maximal:
            if sigma.ambient_rank != self.ambient_rank:
                raise FanError("cone rank does not match the fan")
        if len({s for s in self.maximal}) != len(self.maximal):
            raise FanError("repeated maximal cone")
        dims = {s.dim for s in self.maximal}
        if len(dims) > 1:
            raise FanError("maximal cones must all have the same dimension")
        for sigma in self.maximal:
            for tau in faces(sigma):
                seen.setdefault(tau.key(), tau)
        for a, b in itertools.combinations(self.maximal, 2):
            if not _common_face_ok(a, b):
                raise FanError(f"cones {a!r} and {b!r} do not meet in a common face")
        self.cones = sorted(seen.values(), key=lambda c: (c.dim, c.rays))
        self._index = {c.key(): i for i, c in enumerate(self.cones)}

    @property
    def dim(self) -> int:
        return self.maximal[0].dim if self.maximal else 0

    def index_of(self, sigma: Cone) -> int:
        return self._index[sigma.key()]

    def __contains__(self, sigma: Cone) -> bool:
        return sigma.key() in self._index

    def maximal_index(self, sigma: Cone) -> int:
        return self.maximal.index(sigma)

    def cones_of_dim(self, d: int) -> list[Cone]:
        return [c for c in self.cones if c.dim == d]

    def rays(self) -> list[Vector]:
        return sorted({r for c in self.maximal for r in c.rays})

    # -- serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        return {"ambient_rank": self.ambient_rank,
                "cones": [[list(r) for r in c.rays] for c in self.maximal]}

    @classmethod
    def from_json(cls, data) -> "Fan":
        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["ambient_rank"])
        return cls(n, [Cone(c, n) for c in data["cones"]])


def fan_from_cones(cones: Iterable[Iterable[Sequence[int]]], ambient_rank: int | None = None) -> Fan:
    cones = [list(c) for c in cones]
    if ambient_rank is None:
        ambient_rank = len(cones[0][0])
    return Fan(ambient_rank, [Cone(c, ambient_rank) for c in cones])


def star_quotient(F: Fan, tau: Cone) -> Fan:
    """The fan star(tau) in N / N_tau."""
    if tau not in F:
        raise FanError(f"{tau!r} is not a cone of the fan")
    n = F.ambient_rank
    Q = quotient_lattice(n, saturation([list(r) for r in tau.rays], n))
    assert not Q.torsion_invariants
    images = []
    for sigma in F.maximal:
        if not tau.is_face_of(sigma):
            continue
        rays = [Q.project(r) for r in sigma.rays if r not in tau.rays]
        images.append(Cone([primitive(r) for r in rays], Q.free_rank))
    return Fan(Q.free_rank, images)


def walls(F: Fan) -> list[tuple[int, int, Vector]]:
    """(i, j, chi) for maximal cones i < j meeting in a codimension-one face.

    Indices refer to ``F.maximal``; chi is primitive and lexicographically
    positive.
    """
    n = F.ambient_rank
    out = []
    for i, j in itertools.combinations(range(len(F.maximal)), 2):
        shared = sorted(frozenset(F.maximal[i].rays) & frozenset(F.maximal[j].rays))
        if (matrix_rank([list(r) for r in shared]) if shared else 0) != n - 1:
            continue
        ker = integer_kernel([list(r) for r in shared], n) if shared else integer_kernel([], n)
        assert len(ker) == 1
        out.append((i, j, lex_positive(primitive(ker[0]))))
    return out


def inward_wall_normal(sigma: Cone, chi: Vector) -> Vector:
    """Orient a wall normal so it is nonnegative on sigma."""
    vals = [_dot(chi, r) for r in sigma.rays]
    if all(x >= 0 for x in vals):
        return tuple(chi)
    return tuple(-x for x in chi)


def _qualifies(sigma: Cone, gamma: frozenset, v: Sequence[int]) -> bool:
    # image of v must lie in the span of sigma / R gamma ...
    if any(_dot(k, v) for k in sigma.orthogonal_basis()):
        return False
    # ... and be strictly positive on every facet of sigma/R gamma, i.e. every
    # facet of sigma containing gamma.
    return all(_dot(u, v) > 0 for u, s in sigma.facets() if gamma <= s)


def minimal_face(sigma: Cone, v: Sequence[int]) -> Cone:
    """The minimal face tau of sigma with v in the relative interior of sigma/R tau."""
    v = tuple(v)
    qual = [s for s in sigma.face_raysets() if _qualifies(sigma, s, v)]
    if not qual:
        raise NonGenericError(f"no face of {sigma!r} contains the image of {list(v)} in its relative interior")
    tau = frozenset.intersection(*qual)
    if tau not in qual:
        raise NonGenericError("qualifying faces have no least element")
    return Cone(sorted(tau), sigma.ambient_rank, check=False)


def is_generic(F: Fan, v: Sequence[int]) -> bool:
    """v avoids the hyperplanes spanned by the (n-1)-dimensional cones."""
    n = F.ambient_rank
    for gamma in F.cones_of_dim(n - 1):
        ker = gamma.orthogonal_basis()
        if len(ker) == 1 and _dot(ker[0], v) == 0:
            return False
    return True


def dual_generators(sigma: Cone) -> list[Vector]:
    """Generating set of the semigroup of lattice points in the dual cone.

    Dual rays scaled to primitive vectors plus the nonzero lattice points of
    their half-open fundamental parallelepiped.
    """
    n = sigma.ambient_rank
    if sigma.dim != n or len(sigma.rays) != n:
        raise FanError("dual generators are implemented for simplicial full-dimensional cones only")
    R = [list(r) for r in sigma.rays]
    inv = rational_inverse(R)  # R * inv = I, so column i of inv pairs to delta with ray i
    duals = []
    for i in range(n):
        col = [inv[k][i] for k in range(n)]
        scale = lcm(*[x.denominator for x in col])
        u = primitive([int(x * scale) for x in col])
        assert _dot(u, R[i]) > 0
        duals.append(u)
    U = [list(u) for u in duals]
    Uinv = rational_inverse(U)
    lo = [sum(min(0, u[k]) for u in duals) for k in range(n)]
    hi = [sum(max(0, u[k]) for u in duals) for k in range(n)]
    extra = []
    for p in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        if not any(p):
            continue
        t = [sum(Fraction(p[k]) * Uinv[k][j] for k in range(n)) for j in range(n)]
        if all(0 <= x < 1 for x in t):
            extra.append(tuple(p))
    return sorted(set(duals)) + sorted(set(extra) - set(duals))


def is_generic_dual(F: Fan, v: Sequence[int]) -> bool:
    """No dual generator of any maximal cone vanishes on v."""
    return all(_dot(mu, v) != 0 for sigma in F.maximal for mu in dual_generators(sigma))


def psg_perturbation(F: Fan, lam: Sequence[int], lam2: Sequence[int]) -> bool:
    diff = [a - b for a, b in zip(lam, lam2)]
    for sigma in F.maximal:
        for mu in dual_generators(sigma):
            if not abs(_dot(mu, diff)) < abs(_dot(mu, lam)):
                return False
    return True


@dataclass
class CellularityReport:
    taus: list[Cone]
    quotient_smooth: list[bool]
    cell_dims: list[int]
    order: list[int] | None
    verdict: bool

    def to_json(self) -> dict:
        return {
            "cells": [
                {"cone": i, "tau": [list(r) for r in t.rays], "quotient_smooth": q, "cell_dim": d}
                for i, (t, q, d) in enumerate(zip(self.taus, self.quotient_smooth, self.cell_dims))
            ],
            "order": self.order if self.order is not None else "no valid order",
            "verdict": self.verdict,
        }


def _all_simplicial(F: Fan) -> bool:
    return all(len(s.rays) == s.dim == F.ambient_rank for s in F.maximal)


def quotient_cone_is_smooth(sigma: Cone, tau: Cone) -> bool:
    """Smoothness of the image of sigma in N / N_tau."""
    n = sigma.ambient_rank
    Q = quotient_lattice(n, saturation([list(r) for r in tau.rays], n))
    rays = [primitive(Q.project(r)) for r in sigma.rays if r not in tau.rays]
    return is_smooth_cone(Cone(rays, Q.free_rank, check=False))


def cellularity_report(F: Fan, v: Sequence[int]) -> CellularityReport:
    """Decide cellularity of the toric variety of F for the one-parameter subgroup v."""
    v = tuple(v)
    if not is_generic(F, v):
        raise NonGenericError(f"{list(v)} lies on a hyperplane spanned by a codimension-one cone")
    if _all_simplicial(F) and not is_generic_dual(F, v):
        raise NonGenericError(f"a dual generator of some maximal cone vanishes on {list(v)}")
    m = len(F.maximal)
    n = F.ambient_rank
    taus = [minimal_face(s, v) for s in F.maximal]
    succ = {i: [j for j in range(m) if j != i and taus[i].is_face_of(F.maximal[j])] for i in range(m)}
    indeg = [0] * m
    for i in range(m):
        for j in succ[i]:
            indeg[j] += 1
    order, ready = [], [i for i in range(m) if indeg[i] == 0]
    while ready:
        ready.sort()
        i = ready.pop(0)
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    order = order if len(order) == m else None
    smooth = [quotient_cone_is_smooth(s, t) for s, t in zip(F.maximal, taus)]
    dims = [n - t.dim for t in taus]
    return CellularityReport(taus, smooth, dims, order, order is not None and all(smooth))
