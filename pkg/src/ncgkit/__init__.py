"""Exact-arithmetic toolkit for twisted index theory at desk scale.

Subpackages cover Clifford algebra, matrix-valued differential forms
with connections, reduced Hochschild/cyclic chains, the two twisted
character maps, derivation (Lie algebroid) cochains, finite-nerve
transition-cocycle classes, spectral triples with Sobolev scales and
Morita lifts, and concrete S^2 / T^2 geometries with a local index
evaluator.
"""

__version__ = "0.1.0"
