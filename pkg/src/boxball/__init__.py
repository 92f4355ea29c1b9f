"""Multicolor box-ball system toolkit.

Lattice dynamics through path encodings and Pitman transforms, an
independent carrier-sweep oracle, finite-window classifiers, seeded random
initial data with invariance tests, and the continuum (drifted Brownian)
generalization.
"""

__version__ = "0.1.0"
