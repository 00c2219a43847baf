"""Walk through the A1 and A1xA1 gallery problems with the library API.

Run with ``python3 gallery/walkthrough.py``.
"""

from pathlib import Path

from toroidal_k.cli import load_problem
from toroidal_k.fan import cellularity_report
from toroidal_k.laurent import LaurentPoly, one_minus_exp
from toroidal_k.toroidal import (
    UVCoordinates,
    basis_element,
    decompose,
    is_gg_class,
    ordinary_k,
    orientation_check,
    toroidal_gkm_graph,
    transfer_psg,
    u_embed,
    v_embed,
)
from toroidal_k.weyl import ConsistencyError, orbit_fan, steinberg_basis

HERE = Path(__file__).parent / "problems"


def show_a1():
    p = load_problem(str(HERE / "a1_wonderful.json"))
    rd, F_plus = p.root_datum, p.fan_plus
    F = orbit_fan(rd, F_plus)
    print("A1 orbit fan cones:", [list(s.rays) for s in F.maximal])
    print("toric cellular for nu0 = 1:", cellularity_report(F, [1]).verdict)
    G = toroidal_gkm_graph(rd, F_plus)
    print("toroidal graph:", len(G.vertices), "vertices,", len(G.edges), "edges")
    fwd = transfer_psg(rd, F, "toric->toroidal", {"nu0": [1]})
    rep = orientation_check(G, fwd["nu1"] + fwd["nu2"])
    print("orientation for", fwd["nu1"] + fwd["nu2"], "source", rep["sources"], "sink", rep["sinks"])
    data = steinberg_basis(rd)
    print("Steinberg basis:", {v.name(): str(f) for v, f in data.f.items()})
    b = basis_element(rd, F_plus, rd.simple_reflection(0))
    print("basis element for s1 is a valid class:", bool(is_gg_class(rd, F_plus, b)))
    print("its coefficients:", decompose(rd, F_plus, b).to_json())
    print("ordinary K rank:", ordinary_k(rd, F_plus)["rank"])


def show_a1xa1():
    p = load_problem(str(HERE / "a1xa1_two_cones.json"))
    rd, F_plus = p.root_datum, p.fan_plus
    uv = UVCoordinates(2)
    f = [uv.from_uv(u_embed(one_minus_exp((1, -1))) * v_embed(LaurentPoly.monomial((-1, 0)))), LaurentPoly.zero(4)]
    print("A1xA1 two-cone class valid:", bool(is_gg_class(rd, F_plus, f)))
    try:
        decompose(rd, F_plus, f)
    except ConsistencyError as exc:
        print("decomposition fails:", exc)


if __name__ == "__main__":
    show_a1()
    print()
    show_a1xa1()
