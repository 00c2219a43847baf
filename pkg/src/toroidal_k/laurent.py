"""Laurent polynomials with integer coefficients, i.e. the group ring Z[M].

A :class:`LaurentPoly` is an immutable map from exponent tuples to nonzero
integers.  Canonical term order is lexicographic on exponents, so equality,
hashing and the text form ``c*e[(a1,...,an)]`` are all deterministic.
"""

from __future__ import annotations

import re
from typing import Callable, Iterable, Mapping, Sequence

from .lattice import LatticeError, integer_inverse, unimodular_to_axis

Exponent = tuple[int, ...]


class NotDivisibleError(ArithmeticError):
    """Exact division failed; ``witness`` describes a nonvanishing residue."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SingularMatrixError(ArithmeticError):
    pass


class LaurentPoly:
    __slots__ = ("_t", "rank", "_hash")

    def __init__(self, terms: Mapping[Exponent, int] | Iterable[tuple[Exponent, int]] = (), rank: int | None = None):
        t: dict[Exponent, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            e = tuple(int(x) for x in e)
            if rank is None:
                rank = len(e)
            elif len(e) != rank:
                raise LatticeError(f"exponent {e} does not have rank {rank}")
            c = t.get(e, 0) + int(c)
            if c:
                t[e] = c
            else:
                t.pop(e, None)
        if rank is None:
            raise LatticeError("rank of an empty Laurent polynomial must be given")
        self._t = t
        self.rank = rank
        self._hash = None

    @classmethod
    def _raw(cls, t: dict, rank: int) -> "LaurentPoly":
        # trusted constructor: t already has no zero coefficients
        p = cls.__new__(cls)
        p._t = t
        p.rank = rank
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, rank: int) -> "LaurentPoly":
        return cls._raw({}, rank)

    @classmethod
    def constant(cls, c: int, rank: int) -> "LaurentPoly":
        return cls._raw({(0,) * rank: int(c)} if c else {}, rank)

    @classmethod
    def one(cls, rank: int) -> "LaurentPoly":
        return cls.constant(1, rank)

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff: int = 1) -> "LaurentPoly":
        e = tuple(int(x) for x in exponent)
        return cls._raw({e: int(coeff)} if coeff else {}, len(e))

    # -- inspection -------------------------------------------------------
    def terms(self) -> list[tuple[Exponent, int]]:
        """Terms in canonical (lexicographically increasing) order."""
        return sorted(self._t.items())

    def coefficient(self, e: Sequence[int]) -> int:
        return self._t.get(tuple(e), 0)

    def exponents(self):
        return self._t.keys()

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def leading_term(self) -> tuple[Exponent, int]:
        e = max(self._t)
        return e, self._t[e]

    def trailing_term(self) -> tuple[Exponent, int]:
        e = min(self._t)
        return e, self._t[e]

    # -- ring operations ----------------------------------------------------
    def _check(self, other):
        if not isinstance(other, LaurentPoly):
            if isinstance(other, int):
                return LaurentPoly.constant(other, self.rank)
            return NotImplemented
        if other.rank != self.rank:
            raise LatticeError(f"rank mismatch: {self.rank} vs {other.rank}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        t = dict(self._t)
        for e, c in other._t.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = s
            else:
                del t[e]
        return LaurentPoly._raw(t, self.rank)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({e: -c for e, c in self._t.items()}, self.rank)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return LaurentPoly.zero(self.rank)
            return LaurentPoly._raw({e: c * other for e, c in self._t.items()}, self.rank)
        other = self._check(other)
        if other is NotImplemented:
            return other
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        t: dict[Exponent, int] = {}
        get = t.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple([x + y for x, y in zip(ea, eb)])
                t[e] = get(e, 0) + ca * cb
        return LaurentPoly._raw({e: c for e, c in t.items() if c}, self.rank)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ArithmeticError("only monomials are invertible")
            (e, c), = self._t.items()
            if c not in (1, -1):
                raise ArithmeticError("only monomials with unit coefficient are invertible")
            return LaurentPoly.monomial(tuple(x * k for x in e), c ** (-k))
        out = LaurentPoly.one(self.rank)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            return self == LaurentPoly.constant(other, self.rank)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.rank == other.rank and self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rank, frozenset(self._t.items())))
        return self._hash

    # -- exponent maps ------------------------------------------------------
    def map_exponents(self, f: Callable[[Exponent], Exponent], rank: int | None = None) -> "LaurentPoly":
        t: dict[Exponent, int] = {}
        for e, c in self._t.items():
            e2 = f(e)
            s = t.get(e2, 0) + c
            if s:
                t[e2] = s
            else:
                t.pop(e2, None)
        return LaurentPoly._raw(t, self.rank if rank is None else rank)

    def act(self, matrix: Sequence[Sequence[int]]) -> "LaurentPoly":
        """Apply a lattice automorphism to every exponent (column-vector action)."""
        rows = [tuple(r) for r in matrix]
        if len(rows) != self.rank:
            raise LatticeError("matrix does not act on this character lattice")
        # automorphisms are injective, so no terms collide
        return LaurentPoly._raw(
            {tuple([sum(a * x for a, x in zip(r, e)) for r in rows]): c for e, c in self._t.items()},
            self.rank,
        )

    def shift(self, e: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial e^e."""
        e = tuple(e)
        return LaurentPoly._raw({tuple(x + y for x, y in zip(k, e)): c for k, c in self._t.items()}, self.rank)

    def augmentation(self) -> int:
        return sum(self._t.values())

    # -- text ---------------------------------------------------------------
    def __str__(self):
        return format_laurent(self)

    def __repr__(self):
        return f"LaurentPoly({format_laurent(self)!r})"


# ---------------------------------------------------------------------------
# text form

_TERM = re.compile(r"([+-]?)\s*(-?\d+)\s*\*\s*e\[\(\s*([-\d,\s]*)\)\]")


def format_laurent(f: LaurentPoly) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for i, (e, c) in enumerate(f.terms()):
        mono = f"{abs(c)}*e[({','.join(str(x) for x in e)})]"
        if i == 0:
            parts.append(mono if c > 0 else "-" + mono)
        else:
            parts.append(("+ " if c > 0 else "- ") + mono)
    return " ".join(parts)


def parse_laurent(text: str, rank: int) -> LaurentPoly:
    """Inverse of :func:`format_laurent`."""
    s = text.strip()
    if s == "0":
        return LaurentPoly.zero(rank)
    pos, terms = 0, []
    for m in _TERM.finditer(s):
        if s[pos:m.start()].strip():
            raise ValueError(f"cannot parse Laurent polynomial near {s[pos:m.start()]!r}")
        sign = -1 if m.group(1) == "-" else 1
        body = m.group(3).strip()
        e = tuple(int(x) for x in body.split(",") if x.strip()) if body else ()
        if len(e) != rank:
            raise ValueError(f"exponent {e} does not have rank {rank}")
        terms.append((e, sign * int(m.group(2))))
        pos = m.end()
    if s[pos:].strip() or not terms:
        raise ValueError(f"cannot parse Laurent polynomial {text!r}")
    return LaurentPoly(terms, rank)


# ---------------------------------------------------------------------------
# the operations named in the module contract


def lp_arith(f: LaurentPoly, g: LaurentPoly, op: str) -> LaurentPoly:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown operation {op!r}")


def weyl_act(w, f: LaurentPoly) -> LaurentPoly:
    """Apply a Weyl element (anything with ``matrix_on_M``) or a raw matrix."""
    matrix = getattr(w, "matrix_on_M", w)
    return f.act(matrix)


def augmentation(f: LaurentPoly) -> int:
    return f.augmentation()


def one_minus_exp(chi: Sequence[int]) -> LaurentPoly:
    chi = tuple(chi)
    return LaurentPoly.one(len(chi)) - LaurentPoly.monomial(chi)


def _residue_classes(f: LaurentPoly, chi: Sequence[int]):
    """Group terms of f by their class in the residue decomposition along chi.

    After a unimodular change of coordinates U with U*chi = d*e_1, every term
    lands in the class (first coordinate mod d, remaining coordinates); within
    a class, terms differ by powers of e^chi.
    """
    chi = tuple(int(x) for x in chi)
    if len(chi) != f.rank:
        raise LatticeError("character rank does not match the polynomial")
    if not any(chi):
        raise LatticeError("(1 - e^0) = 0 is not a valid divisor")
    U, d = unimodular_to_axis(chi)
    classes: dict[tuple, dict[int, int]] = {}
    for e, c in f._t.items():
        y = [sum(a * x for a, x in zip(row, e)) for row in U]
        r, k = y[0] % d, y[0] // d
        key = (r,) + tuple(y[1:])
        classes.setdefault(key, {})[k] = c
    return U, d, classes


def divisible_by_one_minus_exp(f: LaurentPoly, chi: Sequence[int]) -> bool:
    _, _, classes = _residue_classes(f, chi)
    return all(sum(ks.values()) == 0 for ks in classes.values())


def residue_witness(f: LaurentPoly, chi: Sequence[int]):
    """First nonvanishing residue (class key, value), or None if divisible."""
    _, _, classes = _residue_classes(f, chi)
    for key in sorted(classes):
        s = sum(classes[key].values())
        if s:
            return key, s
    return None


def divide_by_one_minus_exp(f: LaurentPoly, chi: Sequence[int]) -> LaurentPoly:
    """Return g with (1 - e^chi) * g == f, or raise NotDivisibleError."""
    U, d, classes = _residue_classes(f, chi)
    Uinv = integer_inverse(U)
    out: dict[Exponent, int] = {}
    for key in sorted(classes):
        ks = classes[key]
        if sum(ks.values()):
            raise NotDivisibleError(
                f"{format_laurent(f)} is not divisible by 1 - e^{tuple(chi)}",
                witness={"class": key, "residue": sum(ks.values())},
            )
        # f_class = sum c_k t^k with t = e^chi; quotient coefficient at t^k is
        # the partial sum of c_j over j <= k.
        lo, hi = min(ks), max(ks)
        running = 0
        for k in range(lo, hi):
            running += ks.get(k, 0)
            if running:
                y = (key[0] + k * d,) + key[1:]
                e = tuple(sum(a * x for a, x in zip(row, y)) for row in Uinv)
                out[e] = running
    return LaurentPoly._raw(out, f.rank)


def exact_divide(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Exact quotient f / g in Z[M]; raises NotDivisibleError otherwise.

    Long division on lexicographically leading terms.  The lex order is a
    group order on Z^n, so if g divides f the quotient's smallest exponent is
    trailing(f) - trailing(g), which bounds the loop.
    """
    if g.is_zero():
        raise ZeroDivisionError("division by the zero Laurent polynomial")
    if f.is_zero():
        return LaurentPoly.zero(f.rank)
    if g.is_monomial():
        (ge, gc), = g._t.items()
        t = {}
        for e, c in f._t.items():
            q, r = divmod(c, gc)
            if r:
                raise NotDivisibleError("coefficient not divisible by monomial coefficient")
            t[tuple(x - y for x, y in zip(e, ge))] = q
        return LaurentPoly._raw(t, f.rank)
    ge, gc = g.leading_term()
    low = tuple(x - y for x, y in zip(f.trailing_term()[0], g.trailing_term()[0]))
    rem = dict(f._t)
    q: dict[Exponent, int] = {}
    gt = list(g._t.items())
    while rem:
        re_, rc = max(rem.items())
        qe = tuple(x - y for x, y in zip(re_, ge))
        if qe < low:
            raise NotDivisibleError("not divisible", witness={"remainder_lead": re_})
        qc, r = divmod(rc, gc)
        if r:
            raise NotDivisibleError("not divisible", witness={"remainder_lead": re_})
        q[qe] = qc
        for e, c in gt:
            k = tuple(x + y for x, y in zip(qe, e))
            s = rem.get(k, 0) - qc * c
            if s:
                rem[k] = s
            else:
                rem.pop(k, None)
    return LaurentPoly._raw(q, f.rank)


# ---------------------------------------------------------------------------
# gcd and linear solving over the fraction field


def _to_sympy(f: LaurentPoly, gens):
    from sympy import Poly

    lows = [min(e[i] for e in f._t) for i in range(f.rank)]
    data = {tuple(x - l for x, l in zip(e, lows)): c for e, c in f._t.items()}
    return Poly.from_dict(data, *gens, domain="ZZ"), lows


def laurent_gcd(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """A gcd of f and g in Z[M], defined up to a unit (signed monomial)."""
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    if f.rank == 0:
        from math import gcd

        return LaurentPoly.constant(gcd(f.augmentation(), g.augmentation()), 0)
    from sympy import symbols

    gens = symbols(f"x0:{f.rank}")
    pf, _ = _to_sympy(f, gens)
    pg, _ = _to_sympy(g, gens)
    h = pf.gcd(pg)
    return LaurentPoly({tuple(e): int(c) for e, c in h.as_dict().items()}, f.rank)


def normalize_fraction(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Cancel common factors; the denominator's lex-leading term becomes +1*e^0 times a positive integer."""
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return LaurentPoly.zero(den.rank), LaurentPoly.one(den.rank)
    g = laurent_gcd(num, den)
    num, den = exact_divide(num, g), exact_divide(den, g)
    e, c = den.leading_term()
    shift = tuple(-x for x in e)
    sign = 1 if c > 0 else -1
    return num.shift(shift) * sign, den.shift(shift) * sign


def bareiss_solve(M: Sequence[Sequence[LaurentPoly]], B: Sequence[Sequence[LaurentPoly]]):
    """Fraction-free Gauss-Jordan elimination on [M | B].

    Returns (d, X) with M * X = B / d entrywise, where d = +-det(M) and X has
    Laurent polynomial entries.  Every division performed is exact.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix must be square")
    if len(B) != n:
        raise ValueError("right-hand side has the wrong number of rows")
    k_rhs = len(B[0]) if n else 0
    rank = M[0][0].rank
    A = [list(M[i]) + list(B[i]) for i in range(n)]
    width = n + k_rhs
    prev = LaurentPoly.one(rank)
    for k in range(n):
        piv = next((r for r in range(k, n) if not A[r][k].is_zero()), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular over the fraction field")
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
        p = A[k][k]
        rowk = A[k]
        for i in range(n):
            if i == k:
                continue
            row = A[i]
            a_ik = row[k]
            for j in range(k + 1, width):
                val = p * row[j]
                if not a_ik.is_zero() and not rowk[j].is_zero():
                    val = val - a_ik * rowk[j]
                row[j] = exact_divide(val, prev) if not prev == 1 else val
            row[k] = LaurentPoly.zero(rank)
            if i < k:
                row[i] = p
        prev = p
    return prev, [row[n:] for row in A]


def solve_linear(M: Sequence[Sequence[LaurentPoly]], b: Sequence[LaurentPoly]) -> list[tuple[LaurentPoly, LaurentPoly]]:
    """Solve M x = b over Frac(Z[M]); entries are returned as reduced fractions."""
    d, X = bareiss_solve(M, [[x] for x in b])
    return [normalize_fraction(row[0], d) for row in X]
