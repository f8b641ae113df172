"""Radial harmonic analysis on real hyperbolic space.

Spherical transforms, complex-order spherical multipliers, lacunary
maximal operators, and a desk-scale verification harness for the
quantitative estimates behind their L^p bounds.
"""

__version__ = "0.1.0"
