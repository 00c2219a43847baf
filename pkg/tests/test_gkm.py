from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import toric_fans
from toroidal_k.fan import Cone, Fan
from toroidal_k.gkm import (
    GKMClass,
    GKMError,
    GKMGraph,
    PLFunction,
    PLPFunction,
    bump_class,
    constant_class,
    euler_class,
    gkm_from_plp,
    is_gkm_class,
    is_plp,
    line_bundle_class,
    plp_from_gkm,
    random_gkm_class,
    symmetrize,
    toric_gkm_graph,
)
from toroidal_k.laurent import LaurentPoly, one_minus_exp
from toroidal_k.weyl import ConsistencyError, build_root_datum

FANS = toric_fans()


def test_graph_rejects_bad_edges():
    with pytest.raises(GKMError):
        GKMGraph([0, 1], [(0, 1, (1, 0)), (1, 0, (0, 1))], 2)
    with pytest.raises(GKMError):
        GKMGraph([0, 1, 2], [(0, 1, (1, 0)), (0, 2, (2, 0))], 2)
    with pytest.raises(GKMError):
        GKMGraph([0, 1], [(0, 1, (0, 0))], 2)


def test_p2_graph_shape():
    G = toric_gkm_graph(FANS["P2"])
    assert len(G.vertices) == 3 and len(G.edges) == 3
    assert all(len(G.incident(v)) == 2 for v in range(3))


def test_constants_and_bumps_are_members():
    G = toric_gkm_graph(FANS["Hirzebruch F1"])
    x = LaurentPoly({(1, -1): 2, (0, 0): -1}, 2)
    assert is_gkm_class(G, constant_class(G, x))
    for v in range(4):
        assert is_gkm_class(G, bump_class(G, v, x))


def test_non_member_has_edge_witness():
    G = toric_gkm_graph(FANS["P2"])
    a = GKMClass([LaurentPoly.monomial((1, 0)), LaurentPoly.one(2), LaurentPoly.one(2)])
    m = is_gkm_class(G, a)
    assert not m and m.witness["edge"] in range(3)


def test_euler_class_degree_matches_orientation():
    G = toric_gkm_graph(FANS["P2"])
    orient = G.orientation((2, 3))
    outs = [sum(1 for k, _, _ in G.incident(v) if orient[k] == v) for v in range(3)]
    assert sorted(outs) == [0, 1, 2]
    for v in range(3):
        e = euler_class(G, v, orient)
        assert len(e.terms()) == 2 ** outs[v]


@pytest.mark.parametrize("name", ["P2", "Hirzebruch F1", "hexagon (dP6)", "A2 chamber orbit"])
def test_plp_round_trip_and_products(name):
    F = FANS[name]
    G = toric_gkm_graph(F)
    rng = random.Random(name)
    for _ in range(10):
        a, b = random_gkm_class(G, rng), random_gkm_class(G, rng)
        pa, pb = plp_from_gkm(F, a), plp_from_gkm(F, b)
        assert is_plp(F, pa)
        assert gkm_from_plp(pa) == a
        assert gkm_from_plp(plp_from_gkm(F, a * b)) == gkm_from_plp(pa * pb)


term2 = st.tuples(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), st.integers(-2, 2))


@given(st.lists(st.lists(term2, max_size=3), min_size=4, max_size=4))
def test_face_compatibility_agrees_with_wall_congruences(raw):
    # two routes to membership: projection to face quotients, and edge divisibility
    F = FANS["Hirzebruch F1"]
    vals = [LaurentPoly(ts, 2) for ts in raw]
    assert bool(is_plp(F, PLPFunction(F, vals))) == bool(is_gkm_class(toric_gkm_graph(F), GKMClass(vals)))


def test_plp_rejects_incompatible_values():
    F = FANS["P1"]
    # e^1 - e^2 = e^1 (1 - e^1) is divisible, so this pair is compatible
    assert is_plp(F, PLPFunction(F, [LaurentPoly.monomial((1,)), LaurentPoly.monomial((2,))]))
    p = PLPFunction(F, [LaurentPoly.monomial((1,)), LaurentPoly.monomial((2,)) * 2])
    assert not is_plp(F, p)
    with pytest.raises(GKMError):
        plp_from_gkm(F, GKMClass(p.values))


def test_line_bundle_of_a_piecewise_linear_function():
    F = Fan(2, [Cone([(1, 0), (1, 1)], 2), Cone([(1, 1), (0, 1)], 2)])
    h = PLFunction(F, [(0, 1), (1, 0)])
    p = line_bundle_class(F, h)
    assert is_plp(F, p)
    with pytest.raises(GKMError):
        PLFunction(F, [(0, 1), (0, 2)])


def test_symmetrize_a1a1_subdivision():
    rd = build_root_datum("A1xA1")
    F_plus = Fan(2, [Cone([(1, 0), (1, 1)], 2), Cone([(1, 1), (0, 1)], 2)])
    # each a_i is fixed by the reflection of its simple facet, and a_0 - a_1 is
    # divisible by 1 - e^{(1,-1)}: residues along (1,-1) cancel in pairs
    a0 = LaurentPoly.monomial((0, 1)) + LaurentPoly.monomial((0, -1))
    a1 = LaurentPoly.monomial((1, 0)) + LaurentPoly.monomial((-1, 0))
    full = symmetrize(rd, F_plus, GKMClass([a0, a1]))
    assert len(full) == 8
    # (0,1) and (2,0) differ by (2,-1), not a multiple of (1,-1): the interior wall congruence fails
    bad = LaurentPoly.monomial((2, 0)) + LaurentPoly.monomial((-2, 0))
    with pytest.raises(ConsistencyError):
        symmetrize(rd, F_plus, GKMClass([a0, bad]))


def test_symmetrize_spreads_the_chamber_value():
    rd = build_root_datum("A1")
    F_plus = Fan(1, [Cone([(1,)], 1)])
    full = symmetrize(rd, F_plus, GKMClass([one_minus_exp((2,)) + LaurentPoly.one(1)]))
    assert is_gkm_class(toric_gkm_graph(Fan(1, [Cone([(1,)], 1), Cone([(-1,)], 1)])), full)
