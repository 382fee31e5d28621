"""Trial functions and variational upper bounds.

Every trial function here is a product of an elementary x-profile and the
first cross-sectional mode sin(pi y / 2): on the channel (0, a) x (1-delta, 1)
the profile is cos(nu x) (or sin(nu x) for the odd-cut family), and on the
strip x > a it continues with the matching amplitude times a decaying
exponential.  Such products make every energy and mass integral elementary,
so Rayleigh quotients and min-max pencils are evaluated in closed form;
numerical quadrature appears only as a cross-check in the test suite.

The catalogue:

* ``naive_phi1``: flat channel profile with tail rate delta; its quotient
  is pi^2/4 - K delta^2 + O(delta^3) with the suboptimal K = pi^2 a - 1.
* ``fractional_optimal``: cos(pi x/2) channel profile with tail rate
  sqrt(M(a)) delta; sharp to O(delta^3) for non-integer a.
* ``integer_a1``: the a = 1 profile cos(nu x) with nu = pi/2 -
  pi^(1/3) delta^(2/3) and tail rate pi^(2/3) delta^(1/3); sharp to
  O(delta^(4/3)).
* ``build_multimode_family``: for non-integer a with even integer part 2l,
  the l+1 profiles cos(mu_j x) with mu_j solving mu tan(mu a) =
  sqrt(M(a))/2 and mu_{l+1} = pi/2 exactly; their span bounds the first
  l+1 even-cut eigenvalues through the generalized pencil.  The analogous
  odd-integer-part family (sin profiles, cot relation) is built the same
  way but flagged experimental.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .asymptotics import M_of_a
from .geometry import Geometry, SymmetryVariant, is_integer_half_length
from .oned import solve_mu_tan, solve_minus_mu_cot

__all__ = [
    "TrialFunction",
    "PencilBounds",
    "naive_constant",
    "naive_phi1",
    "fractional_optimal",
    "integer_a1",
    "build_multimode_family",
    "rayleigh_quotient",
    "energy_product",
    "mass_product",
    "minimax_upper_bounds",
]


def naive_constant(a: float) -> float:
    """The suboptimal rate constant K = pi^2 a - 1 of the flat trial function."""
    return math.pi**2 * a - 1.0


@dataclass(frozen=True)
class TrialFunction:
    """x-profile times sin(pi y/2), continuous across the junction.

    ``nu`` is the channel frequency, ``decay`` the strip tail rate m; the
    strip amplitude is the channel profile evaluated at x = a.  ``odd_cut``
    selects sin(nu x) channel profiles (vanishing at x = 0, admissible for
    the odd family); the default cos(nu x) has a Neumann-compatible even
    extension.  ``experimental`` marks family constructions the underlying
    theory only sketches.
    """

    label: str
    a: float
    delta: float
    nu: float
    decay: float
    odd_cut: bool = False
    experimental: bool = False

    def __post_init__(self) -> None:
        if self.a <= 0.0 or not (0.0 < self.delta < 1.0):
            raise ValueError(f"invalid geometry parameters a={self.a}, delta={self.delta}")
        if self.decay <= 0.0:
            raise ValueError(f"tail must decay: rate {self.decay}")
        if self.nu < 0.0:
            raise ValueError(f"channel frequency must be nonnegative: {self.nu}")
        if self.odd_cut and self.nu == 0.0:
            raise ValueError("an odd-cut profile with zero frequency vanishes identically")

    @property
    def variant(self) -> SymmetryVariant:
        return SymmetryVariant.DIRICHLET_AT_CUT if self.odd_cut else SymmetryVariant.NEUMANN_AT_CUT

    def channel_profile(self, x: np.ndarray | float) -> np.ndarray | float:
        return np.sin(self.nu * np.asarray(x)) if self.odd_cut else np.cos(self.nu * np.asarray(x))

    @property
    def junction_value(self) -> float:
        return float(self.channel_profile(self.a))

    def evaluate(self, x: np.ndarray | float, y: np.ndarray | float) -> np.ndarray:
        """Pointwise phi(x, y); zero outside the half domain."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        channel = (x >= 0.0) & (x <= self.a) & (y >= 1.0 - self.delta) & (y <= 1.0)
        strip = (x > self.a) & (y >= 0.0) & (y <= 1.0)
        out = np.zeros_like(x)
        out[channel] = self.channel_profile(x[channel])
        out[strip] = self.junction_value * np.exp(-self.decay * (x[strip] - self.a))
        return out * np.sin(0.5 * math.pi * y)


def naive_phi1(geometry: Geometry) -> TrialFunction:
    return TrialFunction("naive_phi1", geometry.a, geometry.delta, 0.0, geometry.delta)


def fractional_optimal(geometry: Geometry) -> TrialFunction:
    if is_integer_half_length(geometry.a):
        raise ValueError(
            f"the cos(pi x/2) profile is tuned to non-integer a, got a = {geometry.a}"
        )
    rate = math.sqrt(M_of_a(geometry.a)) * geometry.delta
    return TrialFunction("fractional_optimal", geometry.a, geometry.delta, 0.5 * math.pi, rate)


def integer_a1(geometry: Geometry) -> TrialFunction:
    if geometry.a != 1.0:
        raise ValueError(f"this profile is specific to a = 1, got a = {geometry.a}")
    nu = 0.5 * math.pi - math.pi ** (1.0 / 3.0) * geometry.delta ** (2.0 / 3.0)
    rate = math.pi ** (2.0 / 3.0) * geometry.delta ** (1.0 / 3.0)
    return TrialFunction("integer_a1", 1.0, geometry.delta, nu, rate)


def build_multimode_family(a: float, delta: float) -> list[TrialFunction]:
    """Trial functions spanning all trapped modes of one symmetry family.

    For even integer part 2l: the l+1 cos(mu_j x) profiles with mu_j the
    ascending solutions of mu tan(mu a) = sqrt(M(a))/2; the last root is
    pi/2 exactly and is snapped to it.  For odd integer part the analogous
    sin(mu_j x) profiles solve -mu cot(mu a) = sqrt(M(a))/2 (experimental).
    All members share the tail rate sqrt(M(a)) delta.
    """
    if is_integer_half_length(a):
        raise ValueError(f"multi-mode families need non-integer a, got {a}")
    geometry = Geometry(a, delta)  # validates ranges
    sigma = 0.5 * math.sqrt(M_of_a(a))
    floor_a = int(math.floor(a))
    count = floor_a // 2 + 1
    odd_floor = floor_a % 2 == 1
    if odd_floor:
        roots = solve_minus_mu_cot(a, sigma, count=count).roots
    else:
        roots = solve_mu_tan(a, sigma, count=count).roots
    if abs(roots[-1] - 0.5 * math.pi) > 1e-8:
        raise RuntimeError(
            f"last family frequency {roots[-1]} should be pi/2; root solver disagrees"
        )
    rate = math.sqrt(M_of_a(a)) * delta
    return [
        TrialFunction(
            f"multimode_{j + 1}",
            geometry.a,
            geometry.delta,
            0.5 * math.pi if j == len(roots) - 1 else mu,
            rate,
            odd_cut=odd_floor,
            experimental=odd_floor,
        )
        for j, mu in enumerate(roots)
    ]


def _channel_y_integrals(delta: float) -> tuple[float, float]:
    # int over (1-delta, 1) of sin^2(pi y/2) and of cos^2(pi y/2)
    s = math.sin(math.pi * delta) / (2.0 * math.pi)
    return 0.5 * delta + s, 0.5 * delta - s


def _sinc(x: float) -> float:
    return float(np.sinc(x / math.pi))


def _profile_integrals(first: TrialFunction, second: TrialFunction) -> tuple[float, float]:
    """int_0^a f g and int_0^a f' g' for two channel profiles."""
    if first.odd_cut != second.odd_cut:
        raise ValueError("cannot mix even-cut and odd-cut profiles in one integral")
    a = first.a
    p, q = first.nu, second.nu
    plus = 0.5 * a * _sinc((p + q) * a)
    minus = 0.5 * a * _sinc((p - q) * a)
    if first.odd_cut:
        return minus - plus, p * q * (minus + plus)
    return minus + plus, p * q * (minus - plus)


def _check_compatible(first: TrialFunction, second: TrialFunction) -> None:
    if first.a != second.a or first.delta != second.delta:
        raise ValueError("trial functions live on different geometries")


def mass_product(first: TrialFunction, second: TrialFunction) -> float:
    """int over the half domain of phi_i phi_j, in closed form."""
    _check_compatible(first, second)
    y_sin, _ = _channel_y_integrals(first.delta)
    profile, _ = _profile_integrals(first, second)
    tail = first.junction_value * second.junction_value / (2.0 * (first.decay + second.decay))
    return y_sin * profile + tail


def energy_product(first: TrialFunction, second: TrialFunction) -> float:
    """int over the half domain of grad phi_i . grad phi_j, in closed form."""
    _check_compatible(first, second)
    y_sin, y_cos = _channel_y_integrals(first.delta)
    quarter_pi_sq = 0.25 * math.pi**2
    profile, profile_grad = _profile_integrals(first, second)
    channel = y_sin * profile_grad + quarter_pi_sq * y_cos * profile
    m1, m2 = first.decay, second.decay
    tail = (
        first.junction_value
        * second.junction_value
        * (m1 * m2 + quarter_pi_sq)
        / (2.0 * (m1 + m2))
    )
    return channel + tail


def rayleigh_quotient(phi: TrialFunction, geometry: Geometry) -> float:
    """Q(phi) = energy / mass; an upper bound for the lowest eigenvalue
    of the matching symmetry family."""
    if phi.a != geometry.a or phi.delta != geometry.delta:
        raise ValueError("trial function does not match the geometry")
    return energy_product(phi, phi) / mass_product(phi, phi)


@dataclass
class PencilBounds:
    """Generalized eigenvalues of the trial-span pencil (energy, mass).

    ``bounds[i]`` is a rigorous upper bound for the (i+1)-th eigenvalue of
    the family's symmetry variant; ``dropped`` counts trial directions
    removed by mass-matrix conditioning.
    """

    energy: np.ndarray
    mass: np.ndarray
    bounds: list[float]
    dropped: int


def minimax_upper_bounds(family: list[TrialFunction], geometry: Geometry) -> PencilBounds:
    """Upper bounds for the first len(family) eigenvalues via min-max.

    The mass matrix is conditioned spectrally: directions with mass
    eigenvalue below 1e-12 tr(S)/m are dropped (nearly dependent trial
    functions as delta -> 0) and the bound count shrinks accordingly.
    """
    if not family:
        raise ValueError("need at least one trial function")
    for phi in family:
        if phi.a != geometry.a or phi.delta != geometry.delta:
            raise ValueError("family member does not match the geometry")
    m = len(family)
    energy = np.empty((m, m))
    mass = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            energy[i, j] = energy[j, i] = energy_product(family[i], family[j])
            mass[i, j] = mass[j, i] = mass_product(family[i], family[j])

    mass_vals, mass_vecs = np.linalg.eigh(mass)
    drop_tol = 1e-12 * float(np.trace(mass)) / m
    keep = mass_vals > drop_tol
    basis = mass_vecs[:, keep]
    reduced_energy = basis.T @ energy @ basis
    reduced_mass = basis.T @ mass @ basis
    values = scipy.linalg.eigh(reduced_energy, reduced_mass, eigvals_only=True)
    return PencilBounds(energy, mass, [float(v) for v in values], int(m - keep.sum()))
