"""Geometry of the obstructed strip and its spectral thresholds.

The full waveguide is the strip (-inf, inf) x (-1, 1) with a rectangular
obstacle (-a, a) x (-(1-delta), 1-delta) removed, so only two thin channels
of height ``delta`` remain above and below the obstacle.  Everything here
works on the half problem obtained from the symmetries y -> -y (the obstacle
forces a Dirichlet line on y = 0 outside the obstacle) and x -> -x: the
computational domain is

    (0, a) x (1 - delta, 1)   union   (a, inf) x (0, 1),

with a Neumann or Dirichlet condition on the cut x = 0 selecting the even or
odd family in x.  All walls and obstacle faces are Neumann; y = 0 is
Dirichlet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "FIRST_THRESHOLD",
    "SymmetryVariant",
    "Thresholds",
    "Geometry",
    "make_geometry",
    "is_integer_half_length",
]

FIRST_THRESHOLD = math.pi**2 / 4.0
"""Bottom of the essential spectrum: the lowest transverse cutoff pi^2/4."""


class SymmetryVariant(Enum):
    """Boundary condition imposed on the symmetry cut x = 0."""

    NEUMANN_AT_CUT = "N"
    DIRICHLET_AT_CUT = "D"

    @classmethod
    def from_label(cls, label: str) -> "SymmetryVariant":
        """Map a one-letter label ('N' or 'D') to the enum member."""
        try:
            return cls(label.upper())
        except ValueError:
            raise ValueError(f"unknown symmetry variant {label!r}; use 'N' or 'D'")

    @property
    def label(self) -> str:
        return self.value


class Thresholds:
    """Transverse cutoffs of the unobstructed half strip (0, 1) in y.

    The y-modes satisfying Dirichlet at 0 and Neumann at 1 are
    sin((2k-1) pi y / 2), k = 1, 2, ..., with cutoffs ((2k-1) pi / 2)^2.
    Discrete eigenvalues of the obstructed guide live below ``nu1``,
    the k = 1 cutoff.
    """

    nu1: float = FIRST_THRESHOLD

    @staticmethod
    def cutoff(k: int) -> float:
        """Cutoff of the k-th transverse mode, k >= 1.

        Examples
        --------
        >>> import math
        >>> abs(Thresholds.cutoff(1) - math.pi ** 2 / 4) < 1e-15
        True
        >>> abs(Thresholds.cutoff(2) - 9 * math.pi ** 2 / 4) < 1e-14
        True
        """
        if k < 1:
            raise ValueError(f"transverse mode index must be >= 1, got {k}")
        return ((2 * k - 1) * math.pi / 2.0) ** 2


@dataclass(frozen=True)
class Geometry:
    """Half-length ``a`` of the obstacle and channel clearance ``delta``.

    Parameters
    ----------
    a : float
        Obstacle half-length, a > 0.
    delta : float
        Channel height above the obstacle, 0 < delta < 1.
    """

    a: float
    delta: float

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and math.isfinite(self.a)):
            raise ValueError(f"obstacle half-length must be positive, got a={self.a}")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"channel clearance must satisfy 0 < delta < 1, got delta={self.delta}")

    @property
    def wall_top(self) -> float:
        """y-coordinate of the obstacle's top face, 1 - delta."""
        return 1.0 - self.delta

    def in_domain(self, x: float, y: float) -> bool:
        """Membership in the closed half domain (x >= 0 side)."""
        if x < 0.0 or y < 0.0 or y > 1.0:
            return False
        if x >= self.a:
            return True
        return y >= self.wall_top

    def on_dirichlet_boundary(self, x: float, y: float, variant: SymmetryVariant) -> bool:
        """True when a boundary point carries the Dirichlet condition."""
        if y == 0.0 and x >= self.a:
            return True
        return variant is SymmetryVariant.DIRICHLET_AT_CUT and x == 0.0


def make_geometry(a: float, delta: float) -> Geometry:
    """Validated constructor for :class:`Geometry`.

    Examples
    --------
    >>> make_geometry(0.5, 0.1)
    Geometry(a=0.5, delta=0.1)
    >>> make_geometry(0.5, 1.0)
    Traceback (most recent call last):
        ...
    ValueError: channel clearance must satisfy 0 < delta < 1, got delta=1.0
    """
    return Geometry(float(a), float(delta))


def is_integer_half_length(a: float, tol: float = 1e-9) -> bool:
    """Whether ``a`` is an integer up to ``tol``.

    The asymptotic regime switches between non-integer a (rate delta^2) and
    integer a (rate delta^(2/3)); the switch is detected with an absolute
    tolerance so that nearby floats behave like the intended integer.

    Examples
    --------
    >>> is_integer_half_length(1.0)
    True
    >>> is_integer_half_length(1.0 + 5e-10)
    True
    >>> is_integer_half_length(1.5)
    False
    """
    if a <= 0.0:
        raise ValueError(f"obstacle half-length must be positive, got a={a}")
    return abs(a - round(a)) <= tol
