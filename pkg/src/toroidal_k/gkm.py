"""GKM graphs, their congruence rings, and piecewise Laurent polynomial functions.

Edge convention: an edge (i, j, chi) stores the tangent character chi at
endpoint i; at endpoint j the same curve has character -chi.  Congruences
only see the line through chi, so this matters for orientations only.  An
edge is outgoing at an endpoint whose tangent character pairs negatively
with the chosen cocharacter.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .fan import Cone, Fan, FanError, inward_wall_normal, walls
from .lattice import QuotientLattice, Vector, pairing, quotient_lattice
from .laurent import LaurentPoly, divisible_by_one_minus_exp, one_minus_exp, residue_witness
from .weyl import ConsistencyError, RootDatum, WeylElement, orbit_fan, orbit_fan_index


class GKMError(ValueError):
    """Malformed GKM data (bad edge, duplicate edge, proportional characters)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def _proportional(a: Sequence[int], b: Sequence[int]) -> bool:
    n = len(a)
    return all(a[i] * b[j] == a[j] * b[i] for i in range(n) for j in range(i + 1, n))


@dataclass
class GKMGraph:
    vertices: list
    edges: list  # (i, j, chi) with chi the tangent character at vertex i
    torus_rank: int
    tags: list = field(default_factory=list)

    def __post_init__(self):
        if not self.tags:
            self.tags = ["edge"] * len(self.edges)
        self.validate()

    def validate(self) -> None:
        seen = {}
        at_vertex: dict[int, list[tuple[int, Vector]]] = {i: [] for i in range(len(self.vertices))}
        for k, (i, j, chi) in enumerate(self.edges):
            if len(chi) != self.torus_rank:
                raise GKMError(f"edge {k} has a character of the wrong rank", {"edge": k})
            if not any(chi):
                raise GKMError(f"edge {k} has the zero character", {"edge": k})
            if i == j:
                raise GKMError(f"edge {k} is a loop", {"edge": k})
            pair = (min(i, j), max(i, j))
            if pair in seen:
                raise GKMError(
                    f"vertices {self.vertices[i]} and {self.vertices[j]} are joined by two edges",
                    {"edges": [seen[pair], k]},
                )
            seen[pair] = k
            at_vertex[i].append((k, chi))
            at_vertex[j].append((k, tuple(-x for x in chi)))
        for v, lst in at_vertex.items():
            for a in range(len(lst)):
                for b in range(a + 1, len(lst)):
                    if _proportional(lst[a][1], lst[b][1]):
                        raise GKMError(
                            f"edges {lst[a][0]} and {lst[b][0]} at vertex {self.vertices[v]} have proportional characters",
                            {"vertex": v, "edges": [lst[a][0], lst[b][0]]},
                        )

    def incident(self, v: int) -> list[tuple[int, int, Vector]]:
        """(edge index, other endpoint, tangent character at v) for edges at v."""
        out = []
        for k, (i, j, chi) in enumerate(self.edges):
            if i == v:
                out.append((k, j, chi))
            elif j == v:
                out.append((k, i, tuple(-x for x in chi)))
        return out

    def orientation(self, nu: Sequence[int]) -> dict[int, int]:
        """edge index -> the endpoint at which the edge is outgoing for nu."""
        out = {}
        for k, (i, j, chi) in enumerate(self.edges):
            p = pairing(chi, nu)
            if p == 0:
                raise GKMError(f"edge {k} character {list(chi)} is annihilated by {list(nu)}", {"edge": k})
            out[k] = i if p < 0 else j
        return out

    def to_json(self) -> dict:
        return {
            "vertices": [str(v) for v in self.vertices],
            "edges": [{"from": i, "to": j, "character": list(chi), "type": t}
                      for (i, j, chi), t in zip(self.edges, self.tags)],
            "torus_rank": self.torus_rank,
        }


@dataclass(frozen=True)
class GKMClass:
    """A tuple of Laurent polynomials, one per vertex, in graph vertex order."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __add__(self, other):
        return GKMClass(a + b for a, b in zip(self.values, other.values))

    def __sub__(self, other):
        return GKMClass(a - b for a, b in zip(self.values, other.values))

    def __mul__(self, other):
        if isinstance(other, GKMClass):
            return GKMClass(a * b for a, b in zip(self.values, other.values))
        return GKMClass(a * other for a in self.values)

    __rmul__ = __mul__

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def to_json(self) -> dict:
        return {str(i): str(v) for i, v in enumerate(self.values)}


@dataclass
class Membership:
    """Result of a congruence test; truthy iff every congruence holds."""

    ok: bool
    witness: dict | None = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"member": self.ok, "witness": self.witness}


def constant_class(Gamma: GKMGraph, f: LaurentPoly) -> GKMClass:
    return GKMClass([f] * len(Gamma.vertices))


# ---------------------------------------------------------------------------
# toric graphs


def toric_gkm_graph(F: Fan) -> GKMGraph:
    """Vertices are the maximal cones (by index); one edge per wall.

    The stored character is the wall normal oriented inward on the first cone.
    """
    if any(s.dim != F.ambient_rank for s in F.maximal):
        raise FanError("toric GKM graphs need full-dimensional maximal cones")
    edges = [(i, j, inward_wall_normal(F.maximal[i], chi)) for i, j, chi in walls(F)]
    return GKMGraph(list(range(len(F.maximal))), edges, F.ambient_rank, ["wall"] * len(edges))


def is_gkm_class(Gamma: GKMGraph, a: GKMClass) -> Membership:
    """Every edge congruence a_i = a_j mod (1 - e^chi); witness is the first failing edge."""
    if len(a) != len(Gamma.vertices):
        raise GKMError("class is not defined on every vertex")
    for k, (i, j, chi) in enumerate(Gamma.edges):
        diff = a[i] - a[j]
        if not divisible_by_one_minus_exp(diff, chi):
            key, residue = residue_witness(diff, chi)
            return Membership(False, {"edge": k, "vertices": [i, j], "character": list(chi),
                                      "residue_class": list(key), "residue": residue})
    return Membership(True)


def euler_class(Gamma: GKMGraph, vertex: int, orientation: dict[int, int]) -> LaurentPoly:
    """Product of (1 - e^chi) over edges outgoing at the vertex, chi oriented away from it."""
    out = LaurentPoly.one(Gamma.torus_rank)
    for k, _, chi in Gamma.incident(vertex):
        if orientation[k] == vertex:
            out = out * one_minus_exp(chi)
    return out


def bump_class(Gamma: GKMGraph, vertex: int, scale: LaurentPoly | None = None) -> GKMClass:
    """Product of (1 - e^chi) over all edges at the vertex there, zero elsewhere."""
    e = LaurentPoly.one(Gamma.torus_rank)
    for _, _, chi in Gamma.incident(vertex):
        e = e * one_minus_exp(chi)
    if scale is not None:
        e = e * scale
    zero = LaurentPoly.zero(Gamma.torus_rank)
    return GKMClass([e if v == vertex else zero for v in range(len(Gamma.vertices))])


def random_gkm_class(Gamma: GKMGraph, rng: random.Random, spread: int = 1) -> GKMClass:
    """A random member of the congruence ring: constants plus scaled bump classes, sometimes multiplied."""
    n = Gamma.torus_rank

    def small():
        return LaurentPoly(
            [(tuple(rng.randint(-spread, spread) for _ in range(n)), rng.randint(-2, 2)) for _ in range(2)], n
        )

    def one_term():
        a = constant_class(Gamma, small())
        for v in range(len(Gamma.vertices)):
            if rng.random() < 0.5:
                a = a + bump_class(Gamma, v, small())
        return a

    a = one_term()
    if rng.random() < 0.5:
        a = a * one_term()
    return a


# ---------------------------------------------------------------------------
# piecewise Laurent polynomials


@dataclass(frozen=True)
class QuotientRingElement:
    """Element of Z[M / L]; exponents are projected coordinates with torsion reduced."""

    base: QuotientLattice
    poly: LaurentPoly

    @classmethod
    def project(cls, base: QuotientLattice, f: LaurentPoly) -> "QuotientRingElement":
        k = len(base.torsion_invariants) + base.free_rank
        return cls(base, f.map_exponents(base.project, rank=k))

    def __eq__(self, other):
        return isinstance(other, QuotientRingElement) and self.base == other.base and self.poly == other.poly

    def __hash__(self):
        return hash((self.base, self.poly))


def face_quotient(tau: Cone) -> QuotientLattice:
    """M / (M meet tau-perp): the character lattice of the torus acting on the tau-orbit closure chart."""
    return quotient_lattice(tau.ambient_rank, tau.orthogonal_basis())


@dataclass
class PLPFunction:
    fan: Fan
    values: tuple  # LaurentPoly per maximal cone, in fan.maximal order
    face_values: dict = field(default_factory=dict)  # cone key -> QuotientRingElement

    def __post_init__(self):
        self.values = tuple(self.values)
        if len(self.values) != len(self.fan.maximal):
            raise ValueError("one value per maximal cone is required")

    def __add__(self, other):
        return PLPFunction(self.fan, [a + b for a, b in zip(self.values, other.values)])

    def __mul__(self, other):
        return PLPFunction(self.fan, [a * b for a, b in zip(self.values, other.values)])

    def to_json(self) -> dict:
        return {str(i): str(v) for i, v in enumerate(self.values)}


def _plp_witness(F: Fan, values: Sequence[LaurentPoly]):
    for tau in F.cones:
        containing = [i for i, s in enumerate(F.maximal) if tau.is_face_of(s)]
        if len(containing) < 2:
            continue
        Q = face_quotient(tau)
        first = QuotientRingElement.project(Q, values[containing[0]])
        for i in containing[1:]:
            if QuotientRingElement.project(Q, values[i]) != first:
                return {"face": [list(r) for r in tau.rays], "cones": [containing[0], i]}
    return None


def is_plp(F: Fan, p: PLPFunction) -> Membership:
    """Face compatibility: values of maximal cones sharing a face agree in Z[M / M meet face-perp]."""
    w = _plp_witness(F, p.values)
    return Membership(w is None, w)


def gkm_from_plp(p: PLPFunction) -> GKMClass:
    return GKMClass(p.values)


def plp_from_gkm(F: Fan, a: GKMClass) -> PLPFunction:
    """Rebuild the face values by projecting from every containing maximal cone."""
    if len(a) != len(F.maximal):
        raise GKMError("class is not defined on every maximal cone")
    faces = {}
    for tau in F.cones:
        containing = [i for i, s in enumerate(F.maximal) if tau.is_face_of(s)]
        Q = face_quotient(tau)
        vals = {QuotientRingElement.project(Q, a[i]) for i in containing}
        if len(vals) != 1:
            raise GKMError(f"projections to the face {tau!r} disagree",
                           {"face": [list(r) for r in tau.rays], "cones": containing})
        faces[tau.key()] = vals.pop()
    return PLPFunction(F, a.values, faces)


@dataclass
class PLFunction:
    """A piecewise linear function: one character per maximal cone."""

    fan: Fan
    values: tuple

    def __post_init__(self):
        self.values = tuple(tuple(int(x) for x in h) for h in self.values)
        for i, si in enumerate(self.fan.maximal):
            for j in range(i + 1, len(self.fan.maximal)):
                for r in set(si.rays) & set(self.fan.maximal[j].rays):
                    if pairing(self.values[i], r) != pairing(self.values[j], r):
                        raise GKMError(f"linear pieces on cones {i} and {j} disagree on ray {list(r)}",
                                       {"cones": [i, j], "ray": list(r)})


def line_bundle_class(F_plus: Fan, h: PLFunction) -> PLPFunction:
    p = PLPFunction(F_plus, [LaurentPoly.monomial(x) for x in h.values])
    m = is_plp(F_plus, p)
    if not m:
        raise ConsistencyError("line bundle class fails face compatibility", m.witness)
    return p


# ---------------------------------------------------------------------------
# Weyl group actions on fans


def fan_vertex_action(rd: RootDatum, F: Fan) -> Callable[[WeylElement, int], int]:
    """sigma -> w(sigma) on the maximal cones of a W-stable fan."""
    pos = {c.key(): k for k, c in enumerate(F.maximal)}
    table = {}
    for w in rd.weyl:
        for k, sigma in enumerate(F.maximal):
            image = Cone([w.act_N(r) for r in sigma.rays], F.ambient_rank, check=False)
            if image.key() not in pos:
                raise GKMError("the fan is not stable under the Weyl group")
            table[(w, k)] = pos[image.key()]
    return lambda w, k: table[(w, k)]


def dot_act(rd: RootDatum, w: WeylElement, a: GKMClass, vertex_action: Callable[[WeylElement, int], int]) -> GKMClass:
    """(w . a)_x = w(a_{w^{-1} x})."""
    n = len(a)
    winv = rd.inverse(w)
    pre = [vertex_action(winv, x) for x in range(n)]
    if sorted(pre) != list(range(n)):
        raise GKMError("vertex action is not a permutation")
    return GKMClass([a[pre[x]].act(w.matrix_on_M) for x in range(n)])


def symmetrize(rd: RootDatum, F_plus: Fan, a_plus: GKMClass) -> GKMClass:
    """Class on W . F_plus with value w(a_sigma) at w(sigma)."""
    F = orbit_fan(rd, F_plus)
    idx = orbit_fan_index(rd, F_plus, F)
    vals: list = [None] * len(F.maximal)
    for (w, i), k in idx.items():
        v = a_plus[i].act(w.matrix_on_M)
        if vals[k] is None:
            vals[k] = v
        elif vals[k] != v:
            raise ConsistencyError("two Weyl translates give different values on one cone", {"cone": k})
    out = GKMClass(vals)
    m = is_gkm_class(toric_gkm_graph(F), out)
    if not m:
        raise ConsistencyError("symmetrized class fails the full-fan congruences", m.witness)
    return out
