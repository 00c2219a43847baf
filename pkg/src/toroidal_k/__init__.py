"""Equivariant K-theory of toroidal embeddings, computed combinatorially.

Modules:
  lattice   integer lattices, Smith normal form, quotients
  laurent   Laurent polynomials Z[M], exact division, fraction-free solving
  fan       cones, fans, walls, the toric cellularity criterion
  weyl      root data, Weyl groups, parabolic data, the Steinberg basis
  gkm       GKM graphs, congruence rings, piecewise Laurent polynomials
  toroidal  the toroidal embedding: graph, invariant classes, decomposition
  cli       batch front end
"""

from .fan import Cone, Fan, cellularity_report, fan_from_cones
from .laurent import LaurentPoly, parse_laurent
from .toroidal import chamber_fan, decompose, is_gg_class, toroidal_gkm_graph, wonderful_ring
from .weyl import ConsistencyError, build_root_datum, steinberg_basis, steinberg_decompose

__all__ = [
    "Cone", "Fan", "LaurentPoly", "ConsistencyError", "build_root_datum", "cellularity_report",
    "chamber_fan", "decompose", "fan_from_cones", "is_gg_class", "parse_laurent", "steinberg_basis",
    "steinberg_decompose", "toroidal_gkm_graph", "wonderful_ring",
]
