from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import matrix_group_closure
from toroidal_k.fan import Cone, Fan
from toroidal_k.laurent import LaurentPoly
from toroidal_k.weyl import (
    ConsistencyError,
    RootDatumError,
    build_root_datum,
    c_index,
    c_sets,
    is_weyl_invariant,
    minimal_coset_reps,
    orbit_fan,
    orbit_fan_index,
    recombine,
    root_datum_from_json,
    steinberg_basis,
    steinberg_decompose,
    structure_constants,
    verify_basis,
    weyl_discriminant,
)

TYPES = ["A1", "A1xA1", "A2", "B2", "G2"]
# (|W|, |positive roots|) for each type
ORDERS = {"A1": (2, 1), "A1xA1": (4, 2), "A2": (6, 3), "B2": (8, 4), "G2": (12, 6)}


@pytest.mark.parametrize("t", TYPES)
def test_weyl_group_order_matches_matrix_closure(t):
    rd = build_root_datum(t)
    closure = matrix_group_closure([rd.simple_reflection_M(i) for i in range(rd.r)])
    assert len(rd.weyl) == len(closure) == ORDERS[t][0]


@pytest.mark.parametrize("t", TYPES)
def test_roots_and_longest_element(t):
    rd = build_root_datum(t)
    assert len(rd.positive_roots) == ORDERS[t][1]
    assert len(rd.roots) == 2 * ORDERS[t][1]
    w0 = rd.longest_element()
    assert w0.length == len(rd.positive_roots)
    assert all(not rd.is_positive_root(w0.act_M(a)) for a in rd.positive_roots)


@pytest.mark.parametrize("t", TYPES)
def test_group_law(t):
    rd = build_root_datum(t)
    e = rd.identity_element()
    for w in rd.weyl:
        assert rd.mul(w, rd.inverse(w)) == e
        assert len(w.reduced_word) == w.length
        x = e
        for i in w.reduced_word:
            x = rd.mul(x, rd.simple_reflection(i))
        assert x == w


def test_reflection_and_coroot_pairing():
    rd = build_root_datum("B2")
    for a in rd.positive_roots:
        ca = rd.coroot(a)
        assert sum(x * y for x, y in zip(a, ca)) == 2
        s = rd.reflection(a)
        assert s.act_M(a) == tuple(-x for x in a)


def test_cartan_validation_and_json():
    with pytest.raises(RootDatumError):
        build_root_datum([[2, 1], [-1, 2]])
    with pytest.raises(RootDatumError):
        build_root_datum("E9")
    rd = root_datum_from_json({"cartan": [[2, -1], [-1, 2]], "central_rank": 1})
    assert rd.l == 3 and rd.c == 1 and len(rd.weyl) == 6
    assert root_datum_from_json(rd.to_json()).cartan == rd.cartan


@pytest.mark.parametrize("t", ["A1", "A1xA1", "A2", "B2"])
def test_c_sets_partition_the_group(t):
    rd = build_root_datum(t)
    cs = c_sets(rd)
    members = [v for vs in cs.values() for v in vs]
    assert sorted(members, key=lambda w: w.sort_key()) == sorted(rd.weyl, key=lambda w: w.sort_key())
    assert sum(len(vs) for vs in cs.values()) == len(rd.weyl)
    for I, vs in cs.items():
        for v in vs:
            assert rd.descent_set(v) == I


def test_minimal_coset_reps_count():
    rd = build_root_datum("B2")
    assert len(minimal_coset_reps(rd, [0])) == 4
    assert len(minimal_coset_reps(rd, [0, 1])) == 1


@pytest.mark.parametrize("t", ["A1", "A1xA1", "A2", "B2"])
def test_steinberg_basis_verifies(t):
    rd = build_root_datum(t)
    data = steinberg_basis(rd)
    ok, why, d = verify_basis(rd, data.f)
    assert ok, why
    assert data.f[rd.identity_element()] == LaurentPoly.one(rd.l)


def test_a1_basis_is_monomial():
    rd = build_root_datum("A1")
    data = steinberg_basis(rd)
    assert data.f[rd.simple_reflection(0)] == LaurentPoly.monomial((-1,))
    assert data.convention == "v(e^lambda), lambda over v^-1 descents"


def test_a2_needs_orbit_sums():
    rd = build_root_datum("A2")
    data = steinberg_basis(rd)
    assert data.convention == "parabolic orbit sums"
    assert len(data.rejected) == 4
    assert all("not invariant" in why for _, why in data.rejected)


def test_discriminant_is_anti_invariant_up_to_unit():
    rd = build_root_datum("A2")
    disc = weyl_discriminant(rd)
    s = rd.simple_reflection(0)
    image = disc.act(s.matrix_on_M)
    # s permutes positive roots other than alpha_1 and sends alpha_1 to -alpha_1
    assert image * LaurentPoly.monomial(rd.simple_roots[0]) == disc * -1


def test_verify_basis_rejects_a_bad_family():
    rd = build_root_datum("A1")
    f = {w: LaurentPoly.one(1) for w in rd.weyl}
    ok, why, _ = verify_basis(rd, f)
    assert not ok


def laurent(rank, spread=2):
    term = st.tuples(st.tuples(*[st.integers(-spread, spread)] * rank), st.integers(-3, 3))
    return st.lists(term, max_size=3).map(lambda ts: LaurentPoly(ts, rank))


@pytest.mark.parametrize("t", ["A1", "A2"])
@given(data=st.data())
def test_decomposition_round_trip(t, data):
    rd = build_root_datum(t)
    g = data.draw(laurent(rd.l))
    coeffs = steinberg_decompose(rd, g)
    assert all(is_weyl_invariant(rd, c) for c in coeffs.values())
    assert recombine(rd, coeffs) == g


def test_decomposition_of_basis_elements_is_a_delta():
    rd = build_root_datum("B2")
    f = steinberg_basis(rd).f
    for v in rd.weyl:
        coeffs = steinberg_decompose(rd, f[v])
        for w, c in coeffs.items():
            assert c == (LaurentPoly.one(2) if w == v else LaurentPoly.zero(2))


def test_structure_constants_support():
    rd = build_root_datum("A2")
    idx = c_index(rd)
    f = steinberg_basis(rd).f
    for v in rd.weyl:
        for v2 in rd.weyl:
            a = structure_constants(rd, v, v2)
            assert recombine(rd, a) == f[v] * f[v2]
            for w, c in a.items():
                if not c.is_zero():
                    assert idx[w] <= idx[v] | idx[v2]


def test_decompose_rejects_wrong_rank():
    with pytest.raises(RootDatumError):
        steinberg_decompose(build_root_datum("A2"), LaurentPoly.one(1))


def test_orbit_fan_of_the_a2_chamber():
    rd = build_root_datum("A2")
    F = orbit_fan(rd, Fan(2, [Cone([(2, 1), (1, 2)], 2)]))
    assert len(F.maximal) == 6
    idx = orbit_fan_index(rd, Fan(2, [Cone([(2, 1), (1, 2)], 2)]), F)
    assert sorted(idx.values()) == list(range(6))


def test_consistency_error_carries_witness():
    err = ConsistencyError("boom", {"v": "s1"})
    assert err.witness == {"v": "s1"}
