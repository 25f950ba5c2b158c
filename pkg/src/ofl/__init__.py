"""Orbit-Lipschitz fixed-point laboratory.

Metric functionals, concrete spaces, semigroup actions, sampled Lipschitz
estimates, geometric constants and constructive fixed-point iterations.
"""
from .errors import ConfigError, DomainError, OFLError, UnsupportedOperation, UsageError, WordError
from .metric import (TOL, BallSpec, PointSet, admissible_cover, chebyshev_center, diameter,
                     inner_radius, sup_distance)

__version__ = "0.1.0"
