from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import oracle_tau, oracle_verdict, toric_fans
from toroidal_k.fan import (
    Cone,
    Fan,
    FanError,
    NonGenericError,
    cellularity_report,
    dual_generators,
    faces,
    fan_from_cones,
    inward_wall_normal,
    is_generic,
    is_smooth_cone,
    minimal_face,
    psg_perturbation,
    quotient_cone_is_smooth,
    star_quotient,
    walls,
)

FANS = toric_fans()


def generic_vector(F: Fan, rng: random.Random, bound: int = 7):
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(F.ambient_rank))
        try:
            cellularity_report(F, v)
            return v
        except NonGenericError:
            continue


def test_cone_rejects_non_convex_input():
    with pytest.raises(FanError):
        Cone([(1, 0), (-1, 0)], 2)


def test_faces_of_a_square_cone():
    sigma = Cone([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3)
    assert len(faces(sigma)) == 8
    assert faces(sigma)[0].dim == 0 and faces(sigma)[-1] == sigma


def test_smoothness():
    assert is_smooth_cone(Cone([(1, 0), (1, 1)], 2))
    assert not is_smooth_cone(Cone([(2, 1), (1, 2)], 2))
    assert not is_smooth_cone(Cone([(1, 0), (1, 2)], 2))


def test_fan_rejects_overlapping_cones():
    with pytest.raises(FanError):
        fan_from_cones([[(1, 0), (0, 1)], [(1, 1), (-1, 1)]], 2)


def test_fan_json_round_trip():
    F = FANS["Hirzebruch F1"]
    G = Fan.from_json(F.to_json())
    assert [s.rays for s in G.maximal] == [s.rays for s in F.maximal]
    assert len(G.cones) == len(F.cones) == 1 + 4 + 4


def test_walls_and_inward_normals():
    F = FANS["P2"]
    W = walls(F)
    assert len(W) == 3
    for i, j, chi in W:
        chi_i = inward_wall_normal(F.maximal[i], chi)
        assert all(sum(a * b for a, b in zip(chi_i, r)) >= 0 for r in F.maximal[i].rays)
        assert all(sum(a * b for a, b in zip(chi_i, r)) <= 0 for r in F.maximal[j].rays)


def test_star_quotient_of_a_ray_in_p2():
    F = FANS["P2"]
    tau = Cone([(1, 0)], 2)
    Q = star_quotient(F, tau)
    assert Q.ambient_rank == 1 and len(Q.maximal) == 2


def test_minimal_face_examples():
    sigma = Cone([(1, 0), (0, 1)], 2)
    assert minimal_face(sigma, (-1, 2)).rays == ((1, 0),)
    assert minimal_face(sigma, (1, 2)).rays == ()
    # for a full-dimensional cone the whole cone qualifies when v points away from it
    assert minimal_face(sigma, (-1, -2)) == sigma


@given(st.tuples(st.integers(-9, 9), st.integers(-9, 9)))
def test_minimal_face_matches_ray_coordinates(v):
    sigma = Cone([(2, 1), (1, 2)], 2)
    if 2 * v[0] - v[1] == 0 or 2 * v[1] - v[0] == 0:
        return
    assert frozenset(minimal_face(sigma, v).rays) == oracle_tau(sigma, v)


def test_genericity_detects_walls():
    F = FANS["P2"]
    assert not is_generic(F, (1, 0))
    assert is_generic(F, (2, 3))
    with pytest.raises(NonGenericError):
        cellularity_report(F, (1, 1))


def test_dual_generators_of_a_singular_cone():
    gens = dual_generators(Cone([(2, 1), (1, 2)], 2))
    # Hilbert basis of the dual cone spanned by (2,-1) and (-1,2)
    assert set(gens) == {(2, -1), (1, 0), (0, 1), (-1, 2)}
    for u in gens:
        assert all(u[0] * r[0] + u[1] * r[1] >= 0 for r in [(2, 1), (1, 2)])


def test_quotient_smoothness():
    sigma = Cone([(2, 1), (1, 2)], 2)
    assert not quotient_cone_is_smooth(sigma, Cone([], 2))
    assert quotient_cone_is_smooth(sigma, Cone([(2, 1)], 2))


@pytest.mark.parametrize("name", sorted(FANS))
def test_cellularity_verdict_matches_brute_force(name):
    F = FANS[name]
    rng = random.Random(name)
    for _ in range(5):
        v = generic_vector(F, rng)
        assert cellularity_report(F, v).verdict == oracle_verdict(F, v), v


def test_known_verdicts():
    assert cellularity_report(FANS["P2"], (2, 3)).verdict
    assert cellularity_report(FANS["P1"], (1,)).verdict
    rep = cellularity_report(FANS["A2 chamber orbit"], (2, 3))
    assert not rep.verdict and rep.quotient_smooth[0] is False


def test_cellularity_report_order_respects_containment():
    F = FANS["Hirzebruch F1"]
    rep = cellularity_report(F, (3, 5))
    pos = {c: p for p, c in enumerate(rep.order)}
    for i, t in enumerate(rep.taus):
        for j, s in enumerate(F.maximal):
            if i != j and t.is_face_of(s):
                assert pos[i] < pos[j]


@pytest.mark.parametrize("name", ["P2", "Hirzebruch F1", "weighted P(1,1,2)"])
def test_perturbation_preserves_verdict(name):
    F = FANS[name]
    rng = random.Random(1)
    base = tuple(5 * x for x in generic_vector(F, rng, 3))
    verdict = cellularity_report(F, base).verdict
    hits = 0
    for _ in range(300):
        lam2 = tuple(x + rng.randint(-2, 2) for x in base)
        if psg_perturbation(F, base, lam2):
            hits += 1
            assert cellularity_report(F, lam2).verdict == verdict
    assert hits > 0
