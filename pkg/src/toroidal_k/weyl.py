"""Root data, Weyl groups, parabolic coset data and the Steinberg basis.

Coordinates: the cocharacter lattice N has basis (simple coroots, central
basis) and the character lattice M has the dual basis (fundamental weights,
central duals).  So the simple root alpha_i is row i of the Cartan matrix,
padded with zeros in the central coordinates, and a cocharacter lam is
dominant iff cartan . lam >= 0 on the semisimple block.
"""

from __future__ import annotations

import itertools
from math import lcm
import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .fan import Cone, Fan, FanError
from .lattice import Matrix, Vector, determinant, identity, integer_inverse, matmul, rational_inverse, transpose
from .laurent import LaurentPoly, NotDivisibleError, bareiss_solve, exact_divide

CARTAN_TYPES = {
    "A1": [[2]],
    "A1xA1": [[2, 0], [0, 2]],
    "A2": [[2, -1], [-1, 2]],
    "B2": [[2, -1], [-2, 2]],
    "G2": [[2, -1], [-3, 2]],
}
_ALIASES = {"A1×A1": "A1xA1", "A1*A1": "A1xA1", "A1+A1": "A1xA1"}

WEYL_BOUND = 10_000


class RootDatumError(ValueError):
    pass


class ConsistencyError(AssertionError):
    """A property the theory guarantees failed to hold.

    ``witness`` carries whatever data locates the failure.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def _check_cartan(A: Sequence[Sequence[int]]) -> None:
    r = len(A)
    if any(len(row) != r for row in A):
        raise RootDatumError("Cartan matrix must be square")
    for i in range(r):
        if A[i][i] != 2:
            raise RootDatumError("Cartan matrix needs 2 on the diagonal")
        for j in range(r):
            if i != j and (A[i][j] > 0 or (A[i][j] == 0) != (A[j][i] == 0)):
                raise RootDatumError(f"bad off-diagonal entries at ({i}, {j})")
    # symmetrize: find d > 0 with d_i A_ij = d_j A_ji
    d: list[Fraction | None] = [None] * r
    for start in range(r):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(r):
                if j != i and A[i][j] != 0:
                    want = d[i] * A[i][j] / A[j][i]
                    if d[j] is None:
                        d[j] = want
                        stack.append(j)
                    elif d[j] != want:
                        raise RootDatumError("Cartan matrix is not symmetrizable")
    S = [[d[i] * A[i][j] for j in range(r)] for i in range(r)]
    for k in range(1, r + 1):
        # leading principal minors of a rational matrix
        sub = [row[:k] for row in S[:k]]
        den = 1
        for row in sub:
            for x in row:
                den = lcm(den, x.denominator)
        if determinant([[int(x * den) for x in row] for row in sub]) <= 0:
            raise RootDatumError("symmetrized Cartan matrix is not positive definite")


@dataclass(frozen=True, eq=False)
class WeylElement:
    matrix_on_M: tuple[tuple[int, ...], ...]
    length: int
    reduced_word: tuple[int, ...]
    matrix_on_N: tuple[tuple[int, ...], ...] = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.matrix_on_M == other.matrix_on_M

    def __hash__(self):
        return hash(self.matrix_on_M)

    def act_M(self, chi: Sequence[int]) -> Vector:
        return tuple(sum(a * x for a, x in zip(row, chi)) for row in self.matrix_on_M)

    def act_N(self, lam: Sequence[int]) -> Vector:
        return tuple(sum(a * x for a, x in zip(row, lam)) for row in self.matrix_on_N)

    def sort_key(self):
        return (self.length, self.reduced_word)

    def name(self) -> str:
        if not self.reduced_word:
            return "e"
        return "s" + "s".join(str(i + 1) for i in self.reduced_word)

    def __repr__(self):
        return f"WeylElement({self.name()})"


class RootDatum:
    """A root datum in simply-connected coordinates plus a central torus."""

    def __init__(self, cartan: Sequence[Sequence[int]], central_rank: int = 0, type_tag: str | None = None):
        cartan = [[int(x) for x in row] for row in cartan]
        _check_cartan(cartan)
        if central_rank < 0:
            raise RootDatumError("central rank must be nonnegative")
        self.cartan = tuple(tuple(r) for r in cartan)
        self.r = len(cartan)
        self.c = central_rank
        self.l = self.r + self.c
        self.type_tag = type_tag
        self.simple_roots: tuple[Vector, ...] = tuple(tuple(row) + (0,) * self.c for row in cartan)
        self.simple_coroots: tuple[Vector, ...] = tuple(tuple(int(i == j) for j in range(self.l)) for i in range(self.r))
        self.fundamental_weights: tuple[Vector, ...] = self.simple_coroots
        self._lock = threading.RLock()
        self._cache: dict = {}

    def __repr__(self):
        return f"RootDatum({self.type_tag or [list(r) for r in self.cartan]}, central_rank={self.c})"

    def to_json(self) -> dict:
        if self.type_tag is not None:
            out = {"type": self.type_tag}
            if self.c:
                out["central_rank"] = self.c
            return out
        return {"cartan": [list(r) for r in self.cartan], "central_rank": self.c}

    # -- cached structure -----------------------------------------------------
    def _cached(self, key, builder):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = builder()
            return self._cache[key]

    def simple_reflection_M(self, i: int) -> Matrix:
        # s_i(chi) = chi - <chi, alpha_i^vee> alpha_i = chi - chi_i * alpha_i
        S = identity(self.l)
        for k in range(self.l):
            S[k][i] -= self.simple_roots[i][k]
        return S

    @property
    def weyl(self) -> list[WeylElement]:
        return self._cached("weyl", lambda: _enumerate_weyl(self, WEYL_BOUND))

    def weyl_lookup(self) -> dict:
        return self._cached("lookup", lambda: {w.matrix_on_M: w for w in self.weyl})

    def identity_element(self) -> WeylElement:
        return self.weyl[0]

    def longest_element(self) -> WeylElement:
        return max(self.weyl, key=lambda w: w.length)

    def mul(self, a: WeylElement, b: WeylElement) -> WeylElement:
        m = tuple(tuple(r) for r in matmul(a.matrix_on_M, b.matrix_on_M))
        return self.weyl_lookup()[m]

    def inverse(self, a: WeylElement) -> WeylElement:
        return self._cached(("inv", a.matrix_on_M),
                            lambda: self.weyl_lookup()[tuple(tuple(r) for r in transpose(a.matrix_on_N))])

    def simple_reflection(self, i: int) -> WeylElement:
        return self.weyl_lookup()[tuple(tuple(r) for r in self.simple_reflection_M(i))]

    def simple_root_coordinates(self, chi: Sequence[int]) -> tuple[Fraction, ...]:
        inv = self._cached("cartan_inv", lambda: rational_inverse([list(r) for r in self.cartan]))
        return tuple(sum(Fraction(chi[i]) * inv[i][j] for i in range(self.r)) for j in range(self.r))

    def is_positive_root(self, chi: Sequence[int]) -> bool:
        return all(x >= 0 for x in self.simple_root_coordinates(chi))

    @property
    def roots(self) -> list[Vector]:
        def build():
            found = {w.act_M(a) for w in self.weyl for a in self.simple_roots}
            return sorted(found)
        return self._cached("roots", build)

    @property
    def positive_roots(self) -> list[Vector]:
        def build():
            pos = [a for a in self.roots if self.is_positive_root(a)]
            return sorted(pos, key=lambda a: (sum(self.simple_root_coordinates(a)), a))
        return self._cached("pos", build)

    def reflection(self, alpha: Sequence[int]) -> WeylElement:
        """The reflection s_alpha for a (positive or negative) root alpha."""
        alpha = tuple(alpha)

        def build():
            table = {}
            for w in self.weyl:
                for i, a in enumerate(self.simple_roots):
                    beta = w.act_M(a)
                    if beta not in table:
                        s = self.mul(self.mul(w, self.simple_reflection(i)), self.inverse(w))
                        table[beta] = s
                        table[tuple(-x for x in beta)] = s
            return table
        return self._cached("reflections", build)[alpha]

    def coroot(self, alpha: Sequence[int]) -> Vector:
        alpha = tuple(alpha)
        for w in self.weyl:
            for i, a in enumerate(self.simple_roots):
                if w.act_M(a) == alpha:
                    return w.act_N(self.simple_coroots[i])
        raise RootDatumError(f"{alpha} is not a root")

    def is_dominant(self, lam: Sequence[int]) -> bool:
        return all(sum(a * x for a, x in zip(alpha, lam)) >= 0 for alpha in self.simple_roots)

    def is_antidominant(self, lam: Sequence[int]) -> bool:
        return all(sum(a * x for a, x in zip(alpha, lam)) <= 0 for alpha in self.simple_roots)

    def is_regular(self, lam: Sequence[int]) -> bool:
        return all(sum(a * x for a, x in zip(alpha, lam)) != 0 for alpha in self.positive_roots)

    def descent_set(self, w: WeylElement) -> frozenset:
        """{i : w(alpha_i) is negative}."""
        return frozenset(i for i, a in enumerate(self.simple_roots) if not self.is_positive_root(w.act_M(a)))

    def subsets(self) -> list[frozenset]:
        idx = range(self.r)
        return [frozenset(s) for k in range(self.r + 1) for s in itertools.combinations(idx, k)]


def build_root_datum(kind, central_rank: int = 0) -> RootDatum:
    """Root datum from a type tag ('A1', 'A1xA1', 'A2', 'B2', 'G2') or an explicit Cartan matrix."""
    if isinstance(kind, str):
        tag = _ALIASES.get(kind, kind)
        if tag not in CARTAN_TYPES:
            raise RootDatumError(f"unknown Cartan type {kind!r}")
        return RootDatum(CARTAN_TYPES[tag], central_rank, tag)
    return RootDatum(kind, central_rank)


def root_datum_from_json(data: dict) -> RootDatum:
    c = int(data.get("central_rank", 0))
    if "type" in data:
        return build_root_datum(data["type"], c)
    if "cartan" in data:
        return build_root_datum(data["cartan"], c)
    raise RootDatumError("root datum needs 'type' or 'cartan'")


def _enumerate_weyl(rd: RootDatum, bound: int) -> list[WeylElement]:
    gens = [rd.simple_reflection_M(i) for i in range(rd.r)]
    start = tuple(tuple(r) for r in identity(rd.l))
    words = {start: ()}
    layer = [start]
    while layer:
        nxt = []
        for m in layer:  # layer is in lexicographic order of words
            for i, g in enumerate(gens):
                m2 = tuple(tuple(r) for r in matmul(m, g))
                if m2 not in words:
                    words[m2] = words[m] + (i,)
                    nxt.append(m2)
                    if len(words) > bound:
                        raise RootDatumError(f"Weyl group exceeds the bound of {bound} elements")
        layer = sorted(nxt, key=lambda m: words[m])
    out = []
    for m, word in words.items():
        mN = tuple(tuple(r) for r in transpose(integer_inverse(m)))
        out.append(WeylElement(m, len(word), word, mN))
    out.sort(key=WeylElement.sort_key)
    return out


def weyl_elements(rd: RootDatum) -> list[WeylElement]:
    return list(rd.weyl)


# ---------------------------------------------------------------------------
# chamber and orbit fan


def in_dominant_chamber(rd: RootDatum, cone: Cone) -> bool:
    return all(rd.is_dominant(r) for r in cone.rays)


def orbit_fan(rd: RootDatum, F_plus: Fan) -> Fan:
    """The fan W . F_plus; maximal cones ordered by Weyl element, then by F_plus order."""
    for sigma in F_plus.maximal:
        for r in sigma.rays:
            if not rd.is_dominant(r):
                raise FanError(f"ray {list(r)} lies outside the dominant chamber")
    cones, seen = [], set()
    for w in rd.weyl:
        for sigma in F_plus.maximal:
            image = Cone([w.act_N(r) for r in sigma.rays], F_plus.ambient_rank, check=False)
            if image.key() not in seen:
                seen.add(image.key())
                cones.append(image)
    return Fan(F_plus.ambient_rank, cones)


def orbit_fan_index(rd: RootDatum, F_plus: Fan, F: Fan) -> dict:
    """(w, i) -> index in F.maximal of w(F_plus.maximal[i])."""
    pos = {c.key(): k for k, c in enumerate(F.maximal)}
    out = {}
    for w in rd.weyl:
        for i, sigma in enumerate(F_plus.maximal):
            image = Cone([w.act_N(r) for r in sigma.rays], F_plus.ambient_rank, check=False)
            out[(w, i)] = pos[image.key()]
    return out


# ---------------------------------------------------------------------------
# parabolic data


def minimal_coset_reps(rd: RootDatum, I: Iterable[int]) -> list[WeylElement]:
    """W^I = {w : w(alpha) > 0 for every alpha in I}, sorted by length then word."""
    I = list(I)
    return [w for w in rd.weyl if all(rd.is_positive_root(w.act_M(rd.simple_roots[i])) for i in I)]


def c_sets(rd: RootDatum) -> dict[frozenset, list[WeylElement]]:
    """C^I = W^{Delta minus I} minus the union of W^{Delta minus J} over proper subsets J of I."""
    delta = frozenset(range(rd.r))
    out = {}
    for I in rd.subsets():
        base = minimal_coset_reps(rd, delta - I)
        smaller = set()
        for J in rd.subsets():
            if J < I:
                smaller.update(minimal_coset_reps(rd, delta - J))
        out[I] = [w for w in base if w not in smaller]
    return out


def c_index(rd: RootDatum) -> dict[WeylElement, frozenset]:
    """v -> the unique I with v in C^I."""
    return rd._cached("c_index", lambda: {v: I for I, vs in c_sets(rd).items() for v in vs})


# ---------------------------------------------------------------------------
# Steinberg basis


def _weight_sum(rd: RootDatum, I: Iterable[int]) -> Vector:
    out = [0] * rd.l
    for i in I:
        out[i] += 1
    return tuple(out)


def _orbit_sum(rd: RootDatum, chi: Vector, gens: Sequence[int]) -> LaurentPoly:
    """Sum of e^x over the orbit of chi under the subgroup generated by the given simple reflections."""
    mats = [rd.simple_reflection_M(i) for i in gens]
    orbit, stack = {chi}, [chi]
    while stack:
        x = stack.pop()
        for S in mats:
            y = tuple(sum(a * b for a, b in zip(row, x)) for row in S)
            if y not in orbit:
                orbit.add(y)
                stack.append(y)
    return LaurentPoly({x: 1 for x in orbit}, rd.l)


def _variant_monomial(rd, inverse_outside=False, negate=False, right_descent=False):
    def build(v: WeylElement) -> LaurentPoly:
        vinv = rd.inverse(v)
        if right_descent:
            D = rd.descent_set(v)
        else:
            D = rd.descent_set(vinv)
        lam = _weight_sum(rd, D)
        if negate:
            lam = tuple(-x for x in lam)
        g = vinv if inverse_outside else v
        return LaurentPoly.monomial(g.act_M(lam))
    return build


def _variant_parabolic(rd):
    # v in C^I, so v has right descent set I: symmetrize v^{-1}(e^lambda_v)
    # over the parabolic subgroup generated by the simple reflections outside
    # I.  lambda_v is dominant and v sends those simple roots to positive
    # roots, so v^{-1}(lambda_v) is dominant for that subgroup.
    def build(v: WeylElement) -> LaurentPoly:
        vinv = rd.inverse(v)
        mu = vinv.act_M(_weight_sum(rd, rd.descent_set(vinv)))
        return _orbit_sum(rd, mu, sorted(set(range(rd.r)) - rd.descent_set(v)))
    return build


STEINBERG_VARIANTS = (
    ("v(e^lambda), lambda over v^-1 descents", lambda rd: _variant_monomial(rd)),
    ("v^-1 outside", lambda rd: _variant_monomial(rd, inverse_outside=True)),
    ("e^-lambda", lambda rd: _variant_monomial(rd, negate=True)),
    ("lambda over v descents", lambda rd: _variant_monomial(rd, right_descent=True)),
    ("parabolic orbit sums", _variant_parabolic),
)


@dataclass
class SteinbergData:
    f: dict  # WeylElement -> LaurentPoly
    c_sets: dict  # frozenset -> list[WeylElement]
    convention: str
    determinant: LaurentPoly
    rejected: list = field(default_factory=list)

    def basis_in_order(self, rd: RootDatum) -> list[tuple[WeylElement, LaurentPoly]]:
        return [(v, self.f[v]) for v in rd.weyl]


def weyl_discriminant(rd: RootDatum) -> LaurentPoly:
    """prod over positive roots of (1 - e^alpha)."""
    out = LaurentPoly.one(rd.l)
    for a in rd.positive_roots:
        out = out * (LaurentPoly.one(rd.l) - LaurentPoly.monomial(a))
    return out


def _is_unit(p: LaurentPoly) -> bool:
    return p.is_monomial() and abs(p.leading_term()[1]) == 1


def _basis_matrix(rd: RootDatum, f: dict) -> list[list[LaurentPoly]]:
    return [[f[v].act(u.matrix_on_M) for v in rd.weyl] for u in rd.weyl]


def verify_basis(rd: RootDatum, f: dict) -> tuple[bool, str, LaurentPoly | None]:
    """Check that {f_v} is an R(G)-basis of R(T) compatible with the sets C^I.

    Two tests:
      * det(u(f_v)) equals a unit times disc^{|W|/2}, disc = prod_{alpha>0}(1 - e^alpha).
        This is the determinant of a basis; a family with that determinant is
        related to a basis by a matrix over R(G) with unit determinant.
      * f_v is invariant under the parabolic subgroup generated by the simple
        reflections outside I when v lies in C^I, so that the v in W^{Delta minus I}
        index elements of the corresponding invariant ring.
    """
    idx = c_index(rd)
    for v, I in idx.items():
        for j in set(range(rd.r)) - I:
            if f[v].act(rd.simple_reflection_M(j)) != f[v]:
                return False, f"f_{v.name()} is not invariant under s{j + 1}", None
    M = _basis_matrix(rd, f)
    try:
        d, _ = bareiss_solve(M, [[LaurentPoly.zero(rd.l)] for _ in M])
    except ArithmeticError:
        return False, "singular basis matrix", None
    half = len(rd.weyl) // 2
    disc = weyl_discriminant(rd) ** half
    try:
        q = exact_divide(d, disc)
    except NotDivisibleError:
        return False, "determinant is not divisible by the discriminant power", d
    if not _is_unit(q):
        return False, "determinant differs from the discriminant power by a non-unit", d
    return True, "ok", d


def steinberg_basis(rd: RootDatum) -> SteinbergData:
    def build():
        rejected = []
        for name, make in STEINBERG_VARIANTS:
            builder = make(rd)
            f = {v: builder(v) for v in rd.weyl}
            if f[rd.identity_element()] != LaurentPoly.one(rd.l):
                rejected.append((name, "f_e != 1"))
                continue
            ok, why, d = verify_basis(rd, f)
            if ok:
                return SteinbergData(f, c_sets(rd), name, d, rejected)
            rejected.append((name, why))
        raise ConsistencyError("no Steinberg convention passed verification", witness=rejected)
    return rd._cached("steinberg", build)


def _solver(rd: RootDatum):
    """(d, X) with X = d * inverse of the matrix (u(f_v))_{u,v}."""
    def build():
        data = steinberg_basis(rd)
        M = _basis_matrix(rd, data.f)
        n = len(M)
        eye = [[LaurentPoly.one(rd.l) if i == j else LaurentPoly.zero(rd.l) for j in range(n)] for i in range(n)]
        return bareiss_solve(M, eye)
    return rd._cached("solver", build)


def is_weyl_invariant(rd: RootDatum, f: LaurentPoly) -> bool:
    return all(f.act(rd.simple_reflection_M(i)) == f for i in range(rd.r))


def steinberg_decompose(rd: RootDatum, g: LaurentPoly) -> dict[WeylElement, LaurentPoly]:
    """Coefficients c_v in R(G) with g = sum_v c_v f_v."""
    if g.rank != rd.l:
        raise RootDatumError("polynomial rank does not match the root datum")
    d, X = _solver(rd)
    images = [g.act(u.matrix_on_M) for u in rd.weyl]
    out = {}
    for k, v in enumerate(rd.weyl):
        num = LaurentPoly.zero(rd.l)
        for u_idx in range(len(images)):
            if not X[k][u_idx].is_zero() and not images[u_idx].is_zero():
                num = num + X[k][u_idx] * images[u_idx]
        try:
            c = exact_divide(num, d)
        except NotDivisibleError as exc:
            raise ConsistencyError(f"coefficient of f_{v.name()} is not a Laurent polynomial",
                                        witness={"v": v.name()}) from exc
        if not is_weyl_invariant(rd, c):
            raise ConsistencyError(f"coefficient of f_{v.name()} is not W-invariant", witness={"v": v.name()})
        out[v] = c
    return out


def recombine(rd: RootDatum, coeffs: dict) -> LaurentPoly:
    f = steinberg_basis(rd).f
    out = LaurentPoly.zero(rd.l)
    for v, c in coeffs.items():
        out = out + c * f[v]
    return out


def structure_constants(rd: RootDatum, v: WeylElement, v2: WeylElement) -> dict[WeylElement, LaurentPoly]:
    """a^w_{v,v'} with f_v f_v' = sum_w a^w f_w, plus the support check J within I union I'."""
    data = steinberg_basis(rd)
    a = steinberg_decompose(rd, data.f[v] * data.f[v2])
    idx = c_index(rd)
    allowed = idx[v] | idx[v2]
    for w, coeff in a.items():
        if not coeff.is_zero() and not idx[w] <= allowed:
            raise ConsistencyError(
                f"f_{v.name()} f_{v2.name()} has a nonzero coefficient at {w.name()} outside the allowed support",
                witness={"v": v.name(), "v2": v2.name(), "w": w.name()},
            )
    return a


def random_invariant(rd: RootDatum, rng: random.Random, terms: int = 2, spread: int = 2) -> LaurentPoly:
    """A random element of R(G): integer combination of W-orbit sums."""
    out = LaurentPoly.zero(rd.l)
    for _ in range(terms):
        chi = tuple(rng.randint(-spread, spread) for _ in range(rd.l))
        orbit = {w.act_M(chi) for w in rd.weyl}
        out = out + LaurentPoly({x: 1 for x in orbit}, rd.l) * rng.randint(-3, 3)
    return out


def random_laurent(rank: int, rng: random.Random, terms: int = 4, spread: int = 2) -> LaurentPoly:
    return LaurentPoly(
        [(tuple(rng.randint(-spread, spread) for _ in range(rank)), rng.randint(-4, 4)) for _ in range(terms)],
        rank,
    )
