"""Seeded random points on the simplex and the positive cone.

Shared by the verification loops: densities are Dirichlet(1,...,1) draws
(mapped through the atom weights so the weighted mass is 1), cone points are
densities scaled by a log-uniform mass.
"""

from __future__ import annotations

import numpy as np

from .measure import ConeVector, Density, MeasureSpace

__all__ = ["sample_density", "sample_cone_point", "sample_positive_box"]


def sample_density(space: MeasureSpace, rng: np.random.Generator) -> Density:
    """Uniform (Dirichlet(1,...,1)) random density on ``space``."""
    d = rng.dirichlet(np.ones(space.size))
    return space.density(d / space.weights)


def sample_cone_point(
    space: MeasureSpace,
    rng: np.random.Generator,
    mass_low: float = 0.1,
    mass_high: float = 10.0,
) -> ConeVector:
    """Random positive cone point: Dirichlet direction, log-uniform mass."""
    mass = float(np.exp(rng.uniform(np.log(mass_low), np.log(mass_high))))
    return space.cone(sample_density(space, rng).values * mass)


def sample_positive_box(
    space: MeasureSpace,
    rng: np.random.Generator,
    low: float = 0.05,
    high: float = 2.0,
) -> ConeVector:
    """Componentwise uniform point, bounded away from the boundary."""
    return space.cone(rng.uniform(low, high, size=space.size))
