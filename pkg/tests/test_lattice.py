from __future__ import annotations

import itertools
from math import gcd

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from toroidal_k.lattice import (
    LatticeError,
    LatticeVector,
    determinant,
    integer_inverse,
    integer_kernel,
    invariant_factors,
    lex_positive,
    matmul,
    pairing,
    primitive,
    quotient_lattice,
    rank,
    saturation,
    smith_normal_form,
    unimodular_to_axis,
)

small_int = st.integers(-6, 6)


def matrices(max_rows=3, max_cols=3):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(small_int, min_size=n, max_size=n), min_size=m, max_size=m)
        )
    )


def determinantal_divisors(A) -> list[int]:
    """Invariant factors from gcds of k x k minors, computed with sympy determinants."""
    m, n = len(A), len(A[0])
    M = sympy.Matrix(A)
    divisors = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = gcd(g, int(M.extract(list(rows), list(cols)).det()))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[k] // divisors[k - 1] for k in range(1, len(divisors))]


def test_pairing_checks_sides():
    chi = LatticeVector((1, 2), "M")
    lam = LatticeVector((3, -1), "N")
    assert pairing(chi, lam) == 1
    with pytest.raises(LatticeError):
        pairing(chi, chi)


def test_primitive_and_lex_positive():
    assert primitive((4, -6)) == (2, -3)
    assert lex_positive((0, -2, 1)) == (0, 2, -1)
    with pytest.raises(LatticeError):
        primitive((0, 0))


def test_determinant_of_known_matrix():
    assert determinant([[2, -1], [-1, 2]]) == 3
    assert determinant([[2, -1], [-2, 2]]) == 2


@given(matrices())
def test_smith_form_matches_determinantal_divisors(A):
    assert invariant_factors(A) == determinantal_divisors(A)


@given(matrices())
def test_smith_form_is_a_unimodular_factorisation(A):
    U, D, V = smith_normal_form(A)
    assert matmul(matmul(U, A), V) == D
    assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


@given(matrices())
def test_rank_matches_sympy(A):
    assert rank(A) == sympy.Matrix(A).rank()


@given(matrices(3, 4))
def test_integer_kernel_is_a_saturated_basis(A):
    n = len(A[0])
    K = integer_kernel(A, n)
    assert len(K) == n - sympy.Matrix(A).rank()
    for k in K:
        assert all(sum(a * x for a, x in zip(row, k)) == 0 for row in A)
    if K:
        assert invariant_factors([list(k) for k in K]) == [1] * len(K)


def test_saturation_of_a_nonsaturated_lattice():
    S = saturation([(2, 0), (0, 2)], 2)
    assert abs(determinant([list(s) for s in S])) == 1
    S = saturation([(2, 2, 0)], 3)
    assert S == [(1, 1, 0)] or S == [(-1, -1, 0)]


def test_integer_inverse_rejects_non_unimodular():
    assert matmul(integer_inverse([[2, 1], [1, 1]]), [[2, 1], [1, 1]]) == [[1, 0], [0, 1]]
    with pytest.raises(LatticeError):
        integer_inverse([[2, 0], [0, 1]])


@given(st.lists(small_int, min_size=1, max_size=4).filter(any))
def test_unimodular_to_axis(chi):
    U, d = unimodular_to_axis(chi)
    image = [sum(a * x for a, x in zip(row, chi)) for row in U]
    assert image == [d] + [0] * (len(chi) - 1)
    assert d == abs(gcd(*chi)) and abs(determinant(U)) == 1


def test_quotient_lattice_torsion_and_free_parts():
    Q = quotient_lattice(2, [(2, 0)])
    assert Q.torsion_invariants == (2,) and Q.free_rank == 1
    assert Q.project((2, 0)) == Q.project((0, 0))
    assert Q.project((1, 0)) != Q.project((0, 0))
    Q = quotient_lattice(3, [(1, 1, 0)])
    assert Q.torsion_invariants == () and Q.free_rank == 2
    assert Q.project((1, 1, 0)) == (0, 0)


@given(st.lists(st.lists(small_int, min_size=3, max_size=3), min_size=1, max_size=2), st.lists(small_int, min_size=3, max_size=3))
def test_quotient_projection_kills_exactly_the_sublattice(gens, x):
    Q = quotient_lattice(3, gens)
    for g in gens:
        assert Q.project(g) == Q.project((0, 0, 0))
    # x maps to zero iff x lies in the Z-span of the generators
    in_span = sympy.Matrix([list(g) for g in gens] + [x]).rank() == sympy.Matrix(gens).rank() and (
        invariant_factors([list(g) for g in gens] + [list(x)]) == invariant_factors([list(g) for g in gens])
    )
    assert (Q.project(x) == Q.project((0, 0, 0))) == in_span
