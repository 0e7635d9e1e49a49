"""Symmetry reduction of differential equations under non-transverse actions.

Modules: ``expr`` (exact kernel), ``geometry`` (bundles and actions),
``kinematic`` (fixed-point fibers), ``jets`` (ansatze and prolongation),
``operators`` (built-in operators), ``reduce`` (reduced operators) and
``cli`` / ``problem`` (problem files and reports).
"""

__version__ = "0.1.0"

from . import expr, geometry, jets, kinematic, linalg, operators, reduce  # noqa: F401
