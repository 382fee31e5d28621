"""Small-clearance asymptotics of the trapped-mode eigenvalues.

As the channel clearance delta shrinks, the top eigenvalue approaches the
first threshold nu1 = pi^2/4 like

    lambda = nu1 - M(a) * delta^p + o(delta^p),

with p = 2 and M(a) = pi^2 tan^2(pi {a} / 2) for non-integer half-length a
({a} is the fractional part), and p = 2/3 and M(a) = (pi^2 / a)^(2/3) for
integer a.  The eigenvalue count below nu1 and its split between the two
symmetry families depend only on ceil(a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import FIRST_THRESHOLD, Geometry, is_integer_half_length

__all__ = [
    "AsymptoticPrediction",
    "CountSplit",
    "M_of_a",
    "predict",
    "eigen_count",
    "decay_rate",
]


@dataclass(frozen=True)
class AsymptoticPrediction:
    """Leading-order prediction for the top eigenvalue at one geometry."""

    lambda_leading: float
    exponent: float
    constant: float
    remainder_order: float


@dataclass(frozen=True)
class CountSplit:
    """How many eigenvalues live below nu1 and which family holds them."""

    total: int
    from_neumann: int
    from_dirichlet: int
    top_is_neumann: bool


def M_of_a(a: float, tol: float = 1e-9) -> float:
    """Rate constant M(a) of the small-clearance law.

    For non-integer a the constant depends only on the fractional part:
    M(a) = pi^2 tan^2(pi {a} / 2).  For integer a, M(a) = (pi^2 / a)^(2/3).

    Examples
    --------
    >>> import math
    >>> abs(M_of_a(0.5) - math.pi ** 2) < 1e-12
    True
    >>> abs(M_of_a(1.0) - math.pi ** (4 / 3)) < 1e-12
    True
    >>> abs(M_of_a(2.5) - math.pi ** 2) < 1e-12
    True
    """
    if is_integer_half_length(a, tol):
        return (math.pi**2 / round(a)) ** (2.0 / 3.0)
    frac = a - math.floor(a)
    return math.pi**2 * math.tan(math.pi * frac / 2.0) ** 2


def predict(geometry: Geometry, tol: float = 1e-9) -> AsymptoticPrediction:
    """Leading-order top eigenvalue and the order of the neglected remainder.

    Examples
    --------
    >>> from .geometry import make_geometry
    >>> p = predict(make_geometry(0.5, 0.1))
    >>> (p.exponent, p.remainder_order)
    (2.0, 3.0)
    >>> abs(p.lambda_leading - 2.368705056261446) < 1e-12
    True
    """
    constant = M_of_a(geometry.a, tol)
    if is_integer_half_length(geometry.a, tol):
        exponent, remainder = 2.0 / 3.0, 4.0 / 3.0
    else:
        exponent, remainder = 2.0, 3.0
    lam = FIRST_THRESHOLD - constant * geometry.delta**exponent
    return AsymptoticPrediction(lam, exponent, constant, remainder)


def eigen_count(a: float, tol: float = 1e-9) -> CountSplit:
    """Number of eigenvalues below nu1 and their split between families.

    The total is ceil(a) (equal to a itself at integer a).  Eigenvalues
    alternate between the Neumann-cut and Dirichlet-cut families starting
    with Neumann, so the Neumann family holds ceil(total/2) of them and the
    top one is Neumann exactly when the total is odd.

    Examples
    --------
    >>> eigen_count(0.5)
    CountSplit(total=1, from_neumann=1, from_dirichlet=0, top_is_neumann=True)
    >>> eigen_count(2.0)
    CountSplit(total=2, from_neumann=1, from_dirichlet=1, top_is_neumann=False)
    >>> eigen_count(2.5).total
    3
    """
    if is_integer_half_length(a, tol):
        total = int(round(a))
    else:
        total = math.ceil(a)
    from_n = (total + 1) // 2
    return CountSplit(total, from_n, total - from_n, total % 2 == 1)


def decay_rate(geometry: Geometry, tol: float = 1e-9) -> float:
    """Leading-order decay rate of the trapped mode along the open strip.

    The top mode behaves like exp(-beta (x - a)) with
    beta = sqrt(nu1 - lambda) = sqrt(M(a)) * delta^(p/2) to leading order:
    sqrt(M(a)) * delta for non-integer a and (pi^2/a)^(1/3) * delta^(1/3)
    for integer a.
    """
    p = predict(geometry, tol)
    return math.sqrt(p.constant) * geometry.delta ** (p.exponent / 2.0)
