"""Exact integer lattice algebra.

Everything here works on plain Python integers: matrices are lists of rows,
vectors are tuples.  The Smith normal form drives quotient lattices,
kernels, saturation and smoothness tests elsewhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Matrix = list[list[int]]
Vector = tuple[int, ...]

CHARACTER = "M"
COCHARACTER = "N"


class LatticeError(ValueError):
    """Raised on malformed lattice input (rank mismatch, zero ray, ...)."""


@dataclass(frozen=True)
class LatticeVector:
    """An integer vector tagged with the lattice it lives in.

    ``side`` is ``"M"`` for characters and ``"N"`` for cocharacters.  Most of
    the package passes bare tuples around; this wrapper exists for callers
    that want the side checked by :func:`pairing`.
    """

    coords: Vector
    side: str = CHARACTER

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if self.side not in (CHARACTER, COCHARACTER):
            raise LatticeError(f"unknown lattice side {self.side!r}")

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


def _coords(v) -> Vector:
    if isinstance(v, LatticeVector):
        return v.coords
    return tuple(int(c) for c in v)


def pairing(chi, lam) -> int:
    """Dual pairing of a character with a cocharacter (dot product)."""
    if isinstance(chi, LatticeVector) and isinstance(lam, LatticeVector):
        if chi.side == lam.side:
            raise LatticeError("pairing needs one character and one cocharacter")
    a, b = _coords(chi), _coords(lam)
    if len(a) != len(b):
        raise LatticeError(f"rank mismatch in pairing: {len(a)} vs {len(b)}")
    return sum(x * y for x, y in zip(a, b))


def content(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v) -> Vector:
    """Divide an integer vector by the gcd of its entries."""
    c = _coords(v)
    g = content(c)
    if g == 0:
        raise LatticeError("the zero vector has no primitive direction")
    return tuple(x // g for x in c)


def lex_positive(v: Vector) -> Vector:
    """Return v or -v, whichever has a positive first nonzero entry."""
    for x in v:
        if x != 0:
            return v if x > 0 else tuple(-y for y in v)
    return v


# ---------------------------------------------------------------------------
# small matrix helpers


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: Sequence[Sequence[int]]) -> Matrix:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    Bt = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def determinant(A: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(map(int, row)) for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rational_inverse(A: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Exact inverse over Q; raises LatticeError if A is singular."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise LatticeError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [x / p for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def integer_inverse(A: Sequence[Sequence[int]]) -> Matrix:
    """Inverse of a unimodular integer matrix."""
    inv = rational_inverse(A)
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise LatticeError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U*A*V = D diagonal, d_i | d_{i+1}, U and V unimodular.

    Pivoting always moves the entry of smallest absolute value into place,
    which keeps intermediate numbers small for the matrix sizes used here.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(map(int, row)) for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] != 0 and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    clean = clean and D[t][j] == 0
            if not clean:
                # a smaller remainder appeared in row/column t: make it the pivot
                cand = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
                cand += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
                _, i, j = min(cand)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return U, D, V


def invariant_factors(A: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    if not A or not A[0]:
        return []
    _, D, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]))) if D[i][i] != 0]


def rank(A: Sequence[Sequence[int]]) -> int:
    return len(invariant_factors(A))


def integer_kernel(rows: Sequence[Sequence[int]], n: int | None = None) -> list[Vector]:
    """Z-basis of {x in Z^n : <r, x> = 0 for every row r}.

    The result is a basis of a saturated sublattice.
    """
    rows = [list(map(int, r)) for r in rows]
    if n is None:
        if not rows:
            raise LatticeError("ambient rank needed for an empty row list")
        n = len(rows[0])
    if not rows:
        return [tuple(r) for r in identity(n)]
    _, D, V = smith_normal_form(rows)
    r = sum(1 for i in range(min(len(D), n)) if D[i][i] != 0)
    return [tuple(V[i][j] for i in range(n)) for j in range(r, n)]


def saturation(vectors: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Z-basis of span_R(vectors) intersected with Z^n."""
    if not vectors:
        return []
    return integer_kernel(integer_kernel(vectors, n), n)


def unimodular_to_axis(chi: Sequence[int]) -> tuple[Matrix, int]:
    """Find unimodular U and d > 0 with U*chi = d*e_1."""
    chi = [int(x) for x in chi]
    if not any(chi):
        raise LatticeError("zero vector")
    U, D, V = smith_normal_form([[x] for x in chi])
    d = D[0][0] * V[0][0]
    if d < 0:
        U[0] = [-x for x in U[0]]
        d = -d
    return U, d


# ---------------------------------------------------------------------------
# quotient lattices


@dataclass(frozen=True)
class QuotientLattice:
    """Z^n modulo a sublattice, presented as (torsion part) x (free part).

    ``projection`` has one row per output coordinate; the first
    ``len(torsion_invariants)`` outputs are read modulo the invariants.
    """

    ambient_rank: int
    torsion_invariants: tuple[int, ...]
    free_rank: int
    projection: tuple[Vector, ...]

    def project(self, x: Sequence[int]) -> Vector:
        if len(x) != self.ambient_rank:
            raise LatticeError("rank mismatch in projection")
        raw = [sum(a * b for a, b in zip(row, x)) for row in self.projection]
        t = len(self.torsion_invariants)
        return tuple([raw[i] % self.torsion_invariants[i] for i in range(t)] + raw[t:])


def quotient_lattice(ambient_rank: int, sublattice: Iterable[Sequence[int]]) -> QuotientLattice:
    gens = [_coords(v) for v in sublattice]
    for g in gens:
        if len(g) != ambient_rank:
            raise LatticeError("sublattice generator has the wrong rank")
    gens = [g for g in gens if any(g)]
    if not gens:
        return QuotientLattice(ambient_rank, (), ambient_rank, tuple(tuple(r) for r in identity(ambient_rank)))
    # rows of A are generators; U A V = D, so x -> x V sends the sublattice to
    # the row space of D.
    _, D, V = smith_normal_form([list(g) for g in gens])
    k = min(len(D), ambient_rank)
    diag = [D[i][i] for i in range(k)]
    r = sum(1 for d in diag if d != 0)
    col = lambda j: tuple(V[i][j] for i in range(ambient_rank))
    torsion = [(diag[j], col(j)) for j in range(r) if diag[j] > 1]
    free = [col(j) for j in range(r, ambient_rank)]
    return QuotientLattice(
        ambient_rank,
        tuple(d for d, _ in torsion),
        len(free),
        tuple([c for _, c in torsion] + free),
    )
