"""Supersingular isogeny graphs and isogeny-cycle counting at desk scale.

Two independent counting routes are implemented: traces of the
non-backtracking edge operator on the graph side, and class-number sums
over imaginary quadratic orders on the arithmetic side, together with the
explicit bounds and spectral checks that tie them together.
"""

__version__ = "0.1.0"
