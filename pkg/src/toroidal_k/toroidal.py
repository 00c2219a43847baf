"""The toroidal embedding attached to a fan in the dominant chamber.

Classes live in Z[M + M].  Two exponent coordinate systems are used:

* the product coordinates (chi1, chi2), one block per factor of the torus;
* the (u, v) coordinates u = chi1, v = chi1 + chi2, in which the diagonal
  torus only sees the v-block.

A reduced class is one Laurent polynomial per maximal cone of F_plus in
product coordinates; the full class on the fixed points is recovered by the
Weyl group action (w1, w2) . f_sigma.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import lcm
from typing import Sequence

from .fan import Cone, Fan, FanError, NonGenericError, cellularity_report, dual_generators, inward_wall_normal
from .fan import is_generic, psg_perturbation, walls
from .gkm import GKMClass, GKMGraph, Membership, is_gkm_class, random_gkm_class, toric_gkm_graph
from .lattice import Vector, pairing, primitive, rational_inverse
from .laurent import LaurentPoly, NotDivisibleError, divide_by_one_minus_exp, divisible_by_one_minus_exp
from .laurent import one_minus_exp, residue_witness
from .weyl import ConsistencyError, RootDatum, WeylElement, c_index
from .weyl import orbit_fan, random_invariant, steinberg_basis, steinberg_decompose, structure_constants


# ---------------------------------------------------------------------------
# coordinates


@dataclass(frozen=True)
class UVCoordinates:
    """(chi1, chi2) <-> (u, v) = (chi1, chi1 + chi2) on exponents of rank 2l."""

    l: int

    def forward(self, e: Sequence[int]) -> Vector:
        a, b = e[: self.l], e[self.l:]
        return tuple(a) + tuple(x + y for x, y in zip(a, b))

    def inverse(self, e: Sequence[int]) -> Vector:
        u, v = e[: self.l], e[self.l:]
        return tuple(u) + tuple(y - x for x, y in zip(u, v))

    def to_uv(self, f: LaurentPoly) -> LaurentPoly:
        return f.map_exponents(self.forward)

    def from_uv(self, f: LaurentPoly) -> LaurentPoly:
        return f.map_exponents(self.inverse)


def _block(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    n, m = len(A), len(B)
    out = [[0] * (n + m) for _ in range(n + m)]
    for i in range(n):
        for j in range(n):
            out[i][j] = A[i][j]
    for i in range(m):
        for j in range(m):
            out[n + i][n + j] = B[i][j]
    return out


def pair_action(w1: WeylElement, w2: WeylElement) -> list[list[int]]:
    """The matrix of (w1, w2) on M + M."""
    return _block(w1.matrix_on_M, w2.matrix_on_M)


def u_char(chi: Sequence[int], l: int) -> Vector:
    """The character chi(u) in (u, v) coordinates."""
    return tuple(chi) + (0,) * l


def v_embed(f: LaurentPoly) -> LaurentPoly:
    """f(v) in (u, v) coordinates."""
    l = f.rank
    return f.map_exponents(lambda e: (0,) * l + tuple(e), rank=2 * l)


def u_embed(f: LaurentPoly) -> LaurentPoly:
    """f(u) in (u, v) coordinates."""
    l = f.rank
    return f.map_exponents(lambda e: tuple(e) + (0,) * l, rank=2 * l)


# ---------------------------------------------------------------------------
# chamber data


def chamber_rays(rd: RootDatum) -> list[Vector]:
    """Primitive generators of the dominant chamber (multiples of fundamental coweights)."""
    if rd.c:
        raise FanError("with a central torus the dominant chamber is not strongly convex")
    inv = rational_inverse([list(r) for r in rd.cartan])
    out = []
    for j in range(rd.r):
        col = [inv[i][j] for i in range(rd.r)]
        scale = lcm(*[x.denominator for x in col])
        out.append(primitive([int(x * scale) for x in col]))
    return out


def chamber_fan(rd: RootDatum) -> Fan:
    return Fan(rd.l, [Cone(chamber_rays(rd), rd.l)])


def check_in_chamber(rd: RootDatum, F_plus: Fan) -> None:
    for sigma in F_plus.maximal:
        for r in sigma.rays:
            if not rd.is_dominant(r):
                raise FanError(f"ray {list(r)} lies outside the dominant chamber")
    if any(s.dim != rd.l for s in F_plus.maximal):
        raise FanError("maximal cones of F_plus must be full-dimensional")


def simple_facets(rd: RootDatum, sigma: Cone) -> list[int]:
    """Simple roots alpha with sigma meet alpha-perp a facet of sigma."""
    out = []
    for i, alpha in enumerate(rd.simple_roots):
        on = frozenset(r for r in sigma.rays if pairing(alpha, r) == 0)
        if any(on == s for _, s in sigma.facets()):
            out.append(i)
    return out


def interior_walls(F_plus: Fan) -> list[tuple[int, int, Vector]]:
    """(i, j, chi) with chi the wall normal oriented inward on cone i."""
    return [(i, j, inward_wall_normal(F_plus.maximal[i], chi)) for i, j, chi in walls(F_plus)]


# ---------------------------------------------------------------------------
# fixed points and the graph


Vertex = tuple  # (w1, w2, sigma index)


def fixed_points(rd: RootDatum, F_plus: Fan) -> list[Vertex]:
    """All (w1, w2, sigma): by cone index, then length-lex on w1, then on w2."""
    check_in_chamber(rd, F_plus)
    return [(w1, w2, i) for i in range(len(F_plus.maximal)) for w1 in rd.weyl for w2 in rd.weyl]


def vertex_name(x: Vertex) -> str:
    return f"({x[0].name()},{x[1].name()},{x[2]})"


@dataclass
class ToroidalGraph(GKMGraph):
    rd: RootDatum = None
    F_plus: Fan = None
    index: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = super().to_json()
        out["vertices"] = [vertex_name(x) for x in self.vertices]
        out["counts"] = {t: self.tags.count(t) for t in
                         ("closed_orbit_left", "closed_orbit_right", "simple_wall", "interior_wall")}
        return out


RIGHT_ORBIT_SIGN = 1


def toroidal_gkm_graph(rd: RootDatum, F_plus: Fan, right_sign: int = RIGHT_ORBIT_SIGN) -> ToroidalGraph:
    """Fixed points joined by closed-orbit, simple-wall and interior-wall curves.

    Characters at (w1, w2, sigma):
      left closed orbit   (w1 alpha, 0)           to (w1 s_alpha, w2, sigma), alpha > 0
      right closed orbit  (0, w2 alpha)           to (w1, w2 s_alpha, sigma), alpha > 0
      simple wall         (w1 alpha, -w2 alpha)   to (w1 s_alpha, w2 s_alpha, sigma),
                          alpha simple with sigma meet alpha-perp a facet of sigma
      interior wall       (w1 chi, -w2 chi)       to (w1, w2, sigma'), chi inward on sigma
    ``right_sign`` = -1 flips the right closed-orbit characters.
    """
    verts = fixed_points(rd, F_plus)
    index = {x: k for k, x in enumerate(verts)}
    l = rd.l
    zero = (0,) * l
    neg = lambda v: tuple(-x for x in v)
    edges, tags, seen = [], [], set()

    def add(x, y, chi, tag):
        i, j = index[x], index[y]
        key = (min(i, j), max(i, j))
        if key in seen:
            return
        seen.add(key)
        edges.append((i, j, tuple(chi)))
        tags.append(tag)

    facets = [simple_facets(rd, s) for s in F_plus.maximal]
    inner = interior_walls(F_plus)
    for x in verts:
        w1, w2, s = x
        for alpha in rd.positive_roots:
            ref = rd.reflection(alpha)
            add(x, (rd.mul(w1, ref), w2, s), w1.act_M(alpha) + zero, "closed_orbit_left")
        for alpha in rd.positive_roots:
            ref = rd.reflection(alpha)
            chi = w2.act_M(alpha)
            add(x, (w1, rd.mul(w2, ref), s), zero + (chi if right_sign > 0 else neg(chi)), "closed_orbit_right")
        for i in facets[s]:
            alpha = rd.simple_roots[i]
            si = rd.simple_reflection(i)
            add(x, (rd.mul(w1, si), rd.mul(w2, si), s), w1.act_M(alpha) + neg(w2.act_M(alpha)), "simple_wall")
        for i, j, chi in inner:
            if s == i:
                add(x, (w1, w2, j), w1.act_M(chi) + neg(w2.act_M(chi)), "interior_wall")
            elif s == j:
                chi2 = neg(chi)
                add(x, (w1, w2, i), w1.act_M(chi2) + neg(w2.act_M(chi2)), "interior_wall")
    return ToroidalGraph(verts, edges, 2 * l, tags, rd=rd, F_plus=F_plus, index=index)


def is_tt_class(Gamma: ToroidalGraph, a: GKMClass) -> Membership:
    return is_gkm_class(Gamma, a)


# ---------------------------------------------------------------------------
# reduced classes


def expand_invariant(rd: RootDatum, F_plus: Fan, f: Sequence[LaurentPoly]) -> GKMClass:
    """a_(w1, w2, sigma) = (w1, w2) . f_sigma."""
    if len(f) != len(F_plus.maximal):
        raise ValueError("one value per maximal cone is required")
    return GKMClass([f[s].act(pair_action(w1, w2)) for w1, w2, s in fixed_points(rd, F_plus)])


def dot_act_pair(Gamma: ToroidalGraph, w1: WeylElement, w2: WeylElement, a: GKMClass) -> GKMClass:
    """((w1, w2) . a)_x = (w1, w2)(a_{(w1, w2)^{-1} x})."""
    rd = Gamma.rd
    i1, i2 = rd.inverse(w1), rd.inverse(w2)
    M = pair_action(w1, w2)
    out = []
    for x1, x2, s in Gamma.vertices:
        src = Gamma.index[(rd.mul(i1, x1), rd.mul(i2, x2), s)]
        out.append(a[src].act(M))
    return GKMClass(out)


def reduce_invariant(Gamma: ToroidalGraph, a: GKMClass) -> list[LaurentPoly]:
    """f_sigma = a_(e, e, sigma), after checking invariance under the simple reflection pairs."""
    rd = Gamma.rd
    e = rd.identity_element()
    for i in range(rd.r):
        s = rd.simple_reflection(i)
        for g in ((s, e), (e, s)):
            if dot_act_pair(Gamma, g[0], g[1], a) != a:
                raise ValueError(f"class is not invariant under ({g[0].name()}, {g[1].name()})")
    return [a[Gamma.index[(e, e, k)]] for k in range(len(Gamma.F_plus.maximal))]


def _gg_product_form(rd: RootDatum, F_plus: Fan, f: Sequence[LaurentPoly]):
    for k, sigma in enumerate(F_plus.maximal):
        for i in simple_facets(rd, sigma):
            s = rd.simple_reflection(i)
            alpha = rd.simple_roots[i]
            diff = f[k].act(pair_action(s, s)) - f[k]
            chi = tuple(-x for x in alpha) + tuple(alpha)
            if not divisible_by_one_minus_exp(diff, chi):
                return {"condition": "simple wall", "cone": k, "root": i, "residue": residue_witness(diff, chi)[1]}
    for i, j, chi in interior_walls(F_plus):
        diff = f[i] - f[j]
        c = tuple(-x for x in chi) + tuple(chi)
        if not divisible_by_one_minus_exp(diff, c):
            return {"condition": "interior wall", "cones": [i, j], "residue": residue_witness(diff, c)[1]}
    return None


def _gg_uv_form(rd: RootDatum, F_plus: Fan, f: Sequence[LaurentPoly]):
    l = rd.l
    uv = UVCoordinates(l)
    g = [uv.to_uv(x) for x in f]
    e = rd.identity_element()
    for k, sigma in enumerate(F_plus.maximal):
        for i in simple_facets(rd, sigma):
            s = rd.simple_reflection(i)
            diff = g[k].act(pair_action(e, s)) - g[k]
            chi = u_char(tuple(-x for x in rd.simple_roots[i]), l)
            if not divisible_by_one_minus_exp(diff, chi):
                return {"condition": "simple wall", "cone": k, "root": i, "residue": residue_witness(diff, chi)[1]}
    for i, j, chi in interior_walls(F_plus):
        diff = g[i] - g[j]
        c = u_char(tuple(-x for x in chi), l)
        if not divisible_by_one_minus_exp(diff, c):
            return {"condition": "interior wall", "cones": [i, j], "residue": residue_witness(diff, c)[1]}
    return None


def is_gg_class(rd: RootDatum, F_plus: Fan, f: Sequence[LaurentPoly]) -> Membership:
    """Membership of a reduced class, checked in product and in (u, v) coordinates."""
    w1 = _gg_product_form(rd, F_plus, f)
    w2 = _gg_uv_form(rd, F_plus, f)
    if (w1 is None) != (w2 is None):
        raise ConsistencyError("the two forms of the membership conditions disagree",
                                    {"product_form": w1, "uv_form": w2})
    return Membership(w1 is None, w1)


def multiply(f: Sequence[LaurentPoly], g: Sequence[LaurentPoly]) -> list[LaurentPoly]:
    return [a * b for a, b in zip(f, g)]


# ---------------------------------------------------------------------------
# decomposition over the Steinberg basis


def root_product(rd: RootDatum, I) -> LaurentPoly:
    """prod_{alpha in I} (1 - e^{alpha(u)}) in (u, v) coordinates."""
    out = LaurentPoly.one(2 * rd.l)
    for i in sorted(I):
        out = out * one_minus_exp(u_char(rd.simple_roots[i], rd.l))
    return out


def _divide_root_product(rd: RootDatum, c: LaurentPoly, I) -> LaurentPoly:
    for i in sorted(I):
        c = divide_by_one_minus_exp(c, u_char(rd.simple_roots[i], rd.l))
    return c


@dataclass
class DecompositionResult:
    """coefficients[(I, v)] is the family (c_sigma) in (u, v) coordinates."""

    coefficients: dict
    order: list  # the keys (I, v) in Weyl order of v

    def family(self, v: WeylElement) -> tuple:
        for I, w in self.order:
            if w == v:
                return self.coefficients[(I, w)]
        raise KeyError(v)

    def to_json(self) -> dict:
        out = {}
        for I, v in self.order:
            fam = self.coefficients[(I, v)]
            out[v.name()] = {"I": sorted(i + 1 for i in I), "coefficients": [str(c) for c in fam]}
        return out


def _v_slice_decompose(rd: RootDatum, g: LaurentPoly) -> dict[WeylElement, LaurentPoly]:
    """Steinberg decomposition in the v-block with u-block scalars (g in (u, v) coordinates)."""
    l = rd.l
    slices: dict[Vector, dict] = {}
    for e, c in g.terms():
        slices.setdefault(e[:l], {})[e[l:]] = c
    out = {v: LaurentPoly.zero(2 * l) for v in rd.weyl}
    for u, terms in slices.items():
        coeffs = steinberg_decompose(rd, LaurentPoly(terms, l))
        for v, c in coeffs.items():
            if not c.is_zero():
                out[v] = out[v] + v_embed(c).shift(u + (0,) * l)
    return out


def decompose(rd: RootDatum, F_plus: Fan, f: Sequence[LaurentPoly], check_membership: bool = True) -> DecompositionResult:
    """Coefficients of a valid reduced class over the basis prod_{alpha in I}(1 - e^{alpha(u)}) f_v(v).

    Raises ConsistencyError if a coefficient is not divisible by its
    root product, a coefficient family fails the congruences of F_plus, or
    the reconstruction differs from the input.
    """
    if check_membership:
        m = is_gg_class(rd, F_plus, f)
        if not m:
            raise ValueError(f"not a valid class: {m.witness}")
    l = rd.l
    uv = UVCoordinates(l)
    idx = c_index(rd)
    per_cone = [_v_slice_decompose(rd, uv.to_uv(x)) for x in f]
    coefficients, order = {}, []
    for v in rd.weyl:
        I = idx[v]
        fam = []
        for k, coeffs in enumerate(per_cone):
            try:
                fam.append(_divide_root_product(rd, coeffs[v], I))
            except NotDivisibleError as exc:
                raise ConsistencyError(
                    f"coefficient of f_{v.name()} on cone {k} is not divisible by the root product over I",
                    {"cone": k, "v": v.name(), "I": sorted(i + 1 for i in I),
                     "coefficient": str(coeffs[v]), "residue": exc.witness},
                ) from exc
        for i, j, chi in interior_walls(F_plus):
            if not divisible_by_one_minus_exp(fam[i] - fam[j], u_char(chi, l)):
                raise ConsistencyError(
                    f"coefficient family of f_{v.name()} fails the wall congruence between cones {i} and {j}",
                    {"v": v.name(), "cones": [i, j]},
                )
        coefficients[(I, v)] = tuple(fam)
        order.append((I, v))
    result = DecompositionResult(coefficients, order)
    rebuilt = compose(rd, F_plus, result)
    for k, (a, b) in enumerate(zip(rebuilt, f)):
        if a != b:
            raise ConsistencyError("reconstruction differs from the input", {"cone": k})
    return result


def compose(rd: RootDatum, F_plus: Fan, result: DecompositionResult | dict) -> list[LaurentPoly]:
    """sum over (I, v) of prod_{alpha in I}(1 - e^{alpha(u)}) c_sigma f_v(v), back in product coordinates."""
    coeffs = result.coefficients if isinstance(result, DecompositionResult) else result
    l = rd.l
    uv = UVCoordinates(l)
    data = steinberg_basis(rd)
    m = len(F_plus.maximal)
    out = [LaurentPoly.zero(2 * l) for _ in range(m)]
    for (I, v), fam in coeffs.items():
        b = root_product(rd, I) * v_embed(data.f[v])
        for k in range(m):
            if not fam[k].is_zero():
                out[k] = out[k] + fam[k] * b
    return [uv.from_uv(x) for x in out]


def basis_element(rd: RootDatum, F_plus: Fan, v: WeylElement) -> list[LaurentPoly]:
    """prod_{alpha in I}(1 - e^{alpha(u)}) (1 tensor f_v) on every cone, product coordinates."""
    I = c_index(rd)[v]
    b = UVCoordinates(rd.l).from_uv(root_product(rd, I) * v_embed(steinberg_basis(rd).f[v]))
    return [b] * len(F_plus.maximal)


def random_coefficients(rd: RootDatum, F_plus: Fan, rng: random.Random, density: float = 0.6) -> dict:
    """Random coefficient families: sums of (class of F_plus in u) times (W-invariant in v)."""
    Gp = toric_gkm_graph(F_plus) if len(F_plus.maximal) > 1 else None
    l = rd.l
    idx = c_index(rd)
    out = {}
    for v in rd.weyl:
        fam = [LaurentPoly.zero(2 * l)] * len(F_plus.maximal)
        if rng.random() < density:
            for _ in range(rng.randint(1, 2)):
                if Gp is not None:
                    p = random_gkm_class(Gp, rng).values
                else:
                    p = [random_small(l, rng)]
                q = v_embed(random_invariant(rd, rng, terms=1, spread=1))
                fam = [a + u_embed(b) * q for a, b in zip(fam, p)]
        out[(idx[v], v)] = tuple(fam)
    return out


def random_small(rank: int, rng: random.Random) -> LaurentPoly:
    return LaurentPoly([(tuple(rng.randint(-1, 1) for _ in range(rank)), rng.randint(-2, 2)) for _ in range(2)], rank)


def reduced_bump(rd: RootDatum, F_plus: Fan, k: int, g: LaurentPoly) -> list[LaurentPoly]:
    """A valid class supported on one cone: the product of (1 - e^{-alpha(u)}) over its simple facets
    and (1 - e^{chi(u)}) over its interior walls, times an arbitrary g (product coordinates)."""
    l = rd.l
    uv = UVCoordinates(l)
    e = LaurentPoly.one(2 * l)
    for i in simple_facets(rd, F_plus.maximal[k]):
        e = e * one_minus_exp(u_char(tuple(-x for x in rd.simple_roots[i]), l))
    for i, j, chi in interior_walls(F_plus):
        if k in (i, j):
            e = e * one_minus_exp(u_char(chi, l))
    vals = [LaurentPoly.zero(2 * l) for _ in F_plus.maximal]
    vals[k] = uv.from_uv(e) * g
    return vals


def random_valid_class(rd: RootDatum, F_plus: Fan, rng: random.Random) -> list[LaurentPoly]:
    """A valid reduced class built without the decomposition basis.

    Sums and products of: constants W-invariant in v, reduced bump classes
    with arbitrary multipliers, and basis elements.
    """
    l = rd.l
    m = len(F_plus.maximal)
    uv = UVCoordinates(l)

    def piece():
        kind = rng.randrange(3)
        if kind == 0:
            c = uv.from_uv(v_embed(random_invariant(rd, rng, terms=1, spread=1)) * u_embed(random_small(l, rng)))
            return [c] * m
        if kind == 1:
            return reduced_bump(rd, F_plus, rng.randrange(m), random_small(2 * l, rng))
        v = rng.choice(rd.weyl)
        p = uv.from_uv(u_embed(random_small(l, rng)))
        return [x * p for x in basis_element(rd, F_plus, v)]

    f = piece()
    for _ in range(rng.randint(0, 2)):
        f = [a + b for a, b in zip(f, piece())]
    if rng.random() < 0.3:
        f = multiply(f, piece())
    return f


# ---------------------------------------------------------------------------
# multiplication rule


def multstr_check(rd: RootDatum, F_plus: Fan, v: WeylElement, v2: WeylElement) -> dict:
    """Compare the decomposition of a product of two basis elements with the rule built from
    the Steinberg structure constants."""
    idx = c_index(rd)
    I, I2 = idx[v], idx[v2]
    prod = multiply(basis_element(rd, F_plus, v), basis_element(rd, F_plus, v2))
    got = decompose(rd, F_plus, prod, check_membership=False)
    a = structure_constants(rd, v, v2)
    m = len(F_plus.maximal)
    mismatches = []
    for J, w in got.order:
        factor = root_product(rd, I & I2) * root_product(rd, (I | I2) - J) if J <= (I | I2) else None
        expected = LaurentPoly.zero(2 * rd.l) if factor is None else factor * v_embed(a[w])
        if a[w].is_zero():
            expected = LaurentPoly.zero(2 * rd.l)
        for k in range(m):
            if got.coefficients[(J, w)][k] != expected:
                mismatches.append({"w": w.name(), "cone": k})
    return {"v": v.name(), "v2": v2.name(), "ok": not mismatches, "mismatches": mismatches}


# ---------------------------------------------------------------------------
# wonderful case and comparison


@dataclass
class ToroidalEmbedding:
    rd: RootDatum
    F_plus: Fan

    @property
    def m(self) -> int:
        return len(self.F_plus.maximal)

    def graph(self) -> ToroidalGraph:
        return toroidal_gkm_graph(self.rd, self.F_plus)

    def basis(self) -> dict:
        return {v: basis_element(self.rd, self.F_plus, v) for v in self.rd.weyl}


def wonderful_ring(rd: RootDatum) -> ToroidalEmbedding:
    return ToroidalEmbedding(rd, chamber_fan(rd))


def _unit_exponents(n: int) -> list[Vector]:
    out = []
    for i in range(n):
        for sign in (1, -1):
            e = [0] * n
            e[i] = sign
            out.append(tuple(e))
    return out


def relwond_check(rd: RootDatum, F_plus: Fan, rng: random.Random | None = None, samples: int = 5) -> dict:
    """Structural comparison with the wonderful case.

    products: wonderful basis element times a class of F_plus in the u-block is valid
      and decomposes to that class at the basis element's index.
    pullback_products: products of pulled-back basis elements decompose with
      coefficients constant over the cones and equal to the wonderful ones.
    surjective: sampled valid classes all decompose over the pulled-back basis.
    """
    rng = rng or random.Random(0)
    l = rd.l
    m = len(F_plus.maximal)
    W = wonderful_ring(rd).F_plus if rd.c == 0 else None
    uv = UVCoordinates(l)
    Gp = toric_gkm_graph(F_plus) if m > 1 else None
    report = {"products": True, "pullback_products": True, "surjective": True, "failures": []}
    for v in rd.weyl:
        for _ in range(samples):
            p = random_gkm_class(Gp, rng).values if Gp else [random_small(l, rng)]
            f = [b * uv.from_uv(u_embed(x)) for b, x in zip(basis_element(rd, F_plus, v), p)]
            if not is_gg_class(rd, F_plus, f):
                report["products"] = False
                report["failures"].append({"check": "products", "v": v.name()})
                continue
            res = decompose(rd, F_plus, f)
            for (J, w), fam in res.coefficients.items():
                want = tuple(u_embed(x) for x in p) if w == v else tuple(LaurentPoly.zero(2 * l) for _ in p)
                if fam != want:
                    report["products"] = False
                    report["failures"].append({"check": "products", "v": v.name(), "w": w.name()})
    if W is not None:
        for v in rd.weyl:
            for v2 in rd.weyl:
                prod = multiply(basis_element(rd, F_plus, v), basis_element(rd, F_plus, v2))
                res = decompose(rd, F_plus, prod)
                ref = decompose(rd, W, [prod[0]])
                for key, fam in res.coefficients.items():
                    if any(x != ref.coefficients[key][0] for x in fam):
                        report["pullback_products"] = False
                        report["failures"].append({"check": "pullback_products", "v": v.name(), "v2": v2.name()})
    # Bump classes with unit multipliers first, so the verdict does not hinge on sampling luck.
    units = [LaurentPoly.one(2 * l)] + [LaurentPoly({e: 1}, 2 * l) for e in _unit_exponents(2 * l)]
    candidates = [reduced_bump(rd, F_plus, k, g) for k in range(m) for g in units]
    candidates += [random_valid_class(rd, F_plus, rng) for _ in range(samples)]
    for f in candidates:
        try:
            decompose(rd, F_plus, f)
        except ConsistencyError as exc:
            report["surjective"] = False
            report["failures"].append({"check": "surjective", "witness": exc.witness})
            break
    report["ok"] = report["products"] and report["pullback_products"] and report["surjective"]
    return report


# ---------------------------------------------------------------------------
# ordinary K-theory


def ordinary_k(rd: RootDatum, F_plus: Fan) -> dict:
    """Rank of the non-equivariant K-ring after augmentation in both blocks.

    Generators: a cone of F_plus (a free basis of its equivariant ring over
    R(T) has one element per maximal cone), a Steinberg basis element in the
    u-block (R(T) over R(G)), and a basis element of the decomposition.
    """
    check_in_chamber(rd, F_plus)
    m = len(F_plus.maximal)
    W = rd.weyl
    idx = c_index(rd)
    generators = [{"cone": k, "u": w.name(), "v": v.name(), "I": sorted(i + 1 for i in idx[v])}
                  for k in range(m) for w in W for v in W]
    rank = len(generators)
    points = len(fixed_points(rd, F_plus))
    if rank != points:
        raise ConsistencyError("rank differs from the number of fixed points", {"rank": rank, "points": points})
    return {"rank": rank, "fixed_points": points, "generators": generators}


# ---------------------------------------------------------------------------
# one-parameter subgroups


def default_nu2(rd: RootDatum) -> Vector:
    """Minus the sum of the positive coroots: regular and anti-dominant."""
    out = [0] * rd.l
    for a in rd.positive_roots:
        for k, x in enumerate(rd.coroot(a)):
            out[k] -= x
    return tuple(out)


def _dominant_translate(rd: RootDatum, lam: Sequence[int], anti: bool = False) -> tuple[WeylElement, Vector]:
    for w in rd.weyl:
        x = w.act_N(lam)
        if (rd.is_antidominant(x) if anti else rd.is_dominant(x)):
            return w, x
    raise AssertionError("every cocharacter has a dominant translate")


def transfer_factor(F: Fan, rd: RootDatum, nu0: Sequence[int], nu2: Sequence[int]) -> int:
    best = 0
    for sigma in F.maximal:
        for mu in dual_generators(sigma):
            d = abs(pairing(mu, nu0))
            if d == 0:
                raise NonGenericError(f"dual generator {list(mu)} vanishes on {list(nu0)}")
            for w in rd.weyl:
                best = max(best, abs(pairing(mu, w.act_N(nu2))) // d)
    return best + 1


def transfer_psg(rd: RootDatum, F: Fan, direction: str, data: dict) -> dict:
    """Move a generic one-parameter subgroup between the toric variety of F and the toroidal embedding.

    toric->toroidal: data = {"nu0": dominant generic, "nu2": optional regular anti-dominant};
      returns nu1 = N nu0 with N past the perturbation bound.
    toroidal->toric: data = {"nu1", "nu2"}; returns w1 nu1 - w2 nu2 with w1 nu1 dominant and
      w2 nu2 anti-dominant.
    """
    if direction == "toric->toroidal":
        nu0 = tuple(data["nu0"])
        if not rd.is_dominant(nu0) or not rd.is_regular(nu0):
            raise NonGenericError(f"{list(nu0)} is not dominant and regular")
        if not is_generic(F, nu0):
            raise NonGenericError(f"{list(nu0)} is not generic for the fan")
        nu2 = tuple(data.get("nu2") or default_nu2(rd))
        if not rd.is_antidominant(nu2) or not rd.is_regular(nu2):
            raise NonGenericError(f"{list(nu2)} is not anti-dominant and regular")
        N = transfer_factor(F, rd, nu0, nu2)
        return {"N": N, "nu1": [N * x for x in nu0], "nu2": list(nu2)}
    if direction == "toroidal->toric":
        nu1, nu2 = tuple(data["nu1"]), tuple(data["nu2"])
        w1, a = _dominant_translate(rd, nu1)
        w2, b = _dominant_translate(rd, nu2, anti=True)
        return {"w1": w1.name(), "w2": w2.name(), "nu0": [x - y for x, y in zip(a, b)]}
    raise ValueError(f"unknown direction {direction!r}")


def orientation_check(Gamma: ToroidalGraph, nu: Sequence[int]) -> dict:
    """Orient every edge by the sign of its character on nu and check the Bialynicki-Birula shape:
    acyclic, one vertex of out-degree 0, one vertex of out-degree equal to the dimension."""
    rd = Gamma.rd
    nu = tuple(nu)
    orient = Gamma.orientation(nu)
    n = len(Gamma.vertices)
    out_deg = [0] * n
    succ = {i: [] for i in range(n)}
    for k, (i, j, _) in enumerate(Gamma.edges):
        src = orient[k]
        dst = j if src == i else i
        out_deg[src] += 1
        succ[src].append(dst)
    indeg = [0] * n
    for i in range(n):
        for j in succ[i]:
            indeg[j] += 1
    ready = [i for i in range(n) if indeg[i] == 0]
    seen = 0
    while ready:
        i = ready.pop()
        seen += 1
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    dim = rd.l + 2 * len(rd.positive_roots)
    top = max(out_deg)
    sinks = [i for i in range(n) if out_deg[i] == 0]
    sources = [i for i in range(n) if out_deg[i] == top]
    report = {
        "acyclic": seen == n,
        "sinks": [vertex_name(Gamma.vertices[i]) for i in sinks],
        "sources": [vertex_name(Gamma.vertices[i]) for i in sources],
        "max_out_degree": top,
        "dimension": dim,
        "out_degree_sum": sum(out_deg),
        "edges": len(Gamma.edges),
        "out_degrees": {vertex_name(x): d for x, d in zip(Gamma.vertices, out_deg)},
    }
    report["ok"] = (report["acyclic"] and len(sinks) == 1 and len(sources) == 1 and top == dim
                    and report["out_degree_sum"] == report["edges"])
    return report


def cellularity_transfer(rd: RootDatum, F_plus: Fan, nu0: Sequence[int], nu2: Sequence[int] | None = None) -> dict:
    """Compare the toric verdict for nu0 with the toroidal side under transfer_psg."""
    F = orbit_fan(rd, F_plus)
    toric = cellularity_report(F, nu0).verdict
    fwd = transfer_psg(rd, F, "toric->toroidal", {"nu0": list(nu0), "nu2": list(nu2) if nu2 else None})
    nu = tuple(fwd["nu1"]) + tuple(fwd["nu2"])
    orient = orientation_check(toroidal_gkm_graph(rd, F_plus), nu)
    back = transfer_psg(rd, F, "toroidal->toric", {"nu1": fwd["nu1"], "nu2": fwd["nu2"]})
    scaled = [fwd["N"] * x for x in nu0]
    close = psg_perturbation(F, scaled, back["nu0"])
    toroidal = orient["ok"] and cellularity_report(F, back["nu0"]).verdict
    return {"toric": toric, "toroidal": toroidal, "orientation_ok": orient["ok"], "perturbation_ok": close,
            "nu": list(nu), "back": back["nu0"], "agree": toric == toroidal}
