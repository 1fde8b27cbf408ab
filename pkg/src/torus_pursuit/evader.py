"""Analytic evader: bisector-escape potential and its closed-form minimizer.

The evader scores a candidate heading theta by sum_i (1/r_i) * cos(theta -
bearing_i) over all pursuer contacts (r_i = torus distance, bearing_i =
evader-to-pursuer angle) and runs along the heading that minimizes it. The
cosine sum collapses to A*cos(theta) + B*sin(theta) with A = sum (1/r) cos(b)
and B = sum (1/r) sin(b), so the global minimizer is atan2(-B, -A). The 1/r
weighting lets nearby pursuers bend the escape bisector harder than far ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SingularityError
from .geometry import Point2, displacement, normalize_angle

# Below this resultant magnitude the surround is treated as perfectly
# symmetric and the escape heading is drawn uniformly at random.
DEGENERACY_THRESHOLD = 1e-9


@dataclass(frozen=True)
class PolarContact:
    """One pursuer seen from the evader: distance r and bearing theta_rel."""

    r: float
    theta_rel: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.r) or self.r < 0.0:
            raise ValueError(f"contact distance must be finite and >= 0, got {self.r!r}")
        if self.r == 0.0:
            raise SingularityError("contact at zero distance (capture must be checked first)")
        object.__setattr__(self, "theta_rel", normalize_angle(self.theta_rel))


def evade_cost(theta_e: float, contacts: Sequence[PolarContact]) -> float:
    """Escape potential at heading theta_e; lower is better for the evader."""
    if not contacts:
        raise ValueError("at least one contact is required")
    return sum((1.0 / c.r) * math.cos(theta_e - c.theta_rel) for c in contacts)


def field_coefficients(contacts: Sequence[PolarContact]) -> tuple[float, float]:
    """Coefficients (A, B) of the potential written as A*cos + B*sin."""
    if not contacts:
        raise ValueError("at least one contact is required")
    a = sum(math.cos(c.theta_rel) / c.r for c in contacts)
    b = sum(math.sin(c.theta_rel) / c.r for c in contacts)
    return a, b


def contacts_from_positions(
    evader_position: Point2, pursuer_positions: Sequence[Point2]
) -> list[PolarContact]:
    """Build polar contacts from minimal wrapped displacements."""
    contacts = []
    for q in pursuer_positions:
        d = displacement(evader_position, q)
        r = d.norm()
        if r == 0.0:
            raise SingularityError("pursuer co-located with evader")
        contacts.append(PolarContact(r, d.bearing()))
    return contacts


def heading_from_contacts(contacts: Sequence[PolarContact], rng: np.random.Generator) -> float:
    """Global minimizer of the escape potential for the given contacts."""
    a, b = field_coefficients(contacts)
    if math.hypot(a, b) < DEGENERACY_THRESHOLD:
        # Perfectly balanced surround: any deterministic pick would be
        # exploitable, so break the symmetry randomly.
        return normalize_angle(rng.uniform(-math.pi, math.pi))
    return normalize_angle(math.atan2(-b, -a))


def evade_heading(
    evader_position: Point2,
    pursuer_positions: Sequence[Point2],
    rng: np.random.Generator,
) -> float:
    """Escape heading for an evader at evader_position, in [-pi, pi)."""
    if not pursuer_positions:
        raise ValueError("at least one pursuer is required")
    return heading_from_contacts(contacts_from_positions(evader_position, pursuer_positions), rng)
