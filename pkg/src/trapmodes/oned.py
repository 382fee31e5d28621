"""One-dimensional reductions: transcendental roots, Robin eigenvalues, forms.

Separating variables in the channel reduces every question about the guide to
segment problems -f'' = mu^2 f on (0, a) with a Robin coupling sigma at the
far end and Neumann or Dirichlet at 0.  The dispersion relations are

    Neumann at 0:    mu tan(mu a) = sigma,
    Dirichlet at 0:  -mu cot(mu a) = sigma,

both with one root per interval between consecutive poles of the left side.
This module also evaluates the two quadratic forms behind the eigenvalue
bounds (a half-line decay form and a segment form with a boundary reward)
on sampled or closed-form profiles, with composite Gauss-Legendre panels
aligned to the sample nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .asymptotics import M_of_a
from .geometry import FIRST_THRESHOLD, SymmetryVariant

__all__ = [
    "RobinProblem",
    "RootList",
    "SampledFunction",
    "solve_mu_tan",
    "solve_minus_mu_cot",
    "robin_eigenvalues",
    "lemma_right_residual",
    "lemma_left_lhs",
    "lemma_a1_lhs",
    "integer_expansion_defect",
]

# Relative inset applied at the poles of mu*tan(mu*a) before bisecting.
_POLE_MARGIN = 1e-12
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class RobinProblem:
    """Segment eigenproblem -f'' = mu^2 f on (0, length).

    ``sigma`` is the Robin coupling in f'(length) = -sigma f(length); the
    condition at 0 is Neumann or Dirichlet, reusing the symmetry-cut enum.
    """

    length: float
    sigma: float
    at_zero: SymmetryVariant = SymmetryVariant.NEUMANN_AT_CUT

    def __post_init__(self) -> None:
        if not self.length > 0.0:
            raise ValueError(f"segment length must be positive, got {self.length}")
        if self.sigma < 0.0:
            raise ValueError(f"Robin coupling must be nonnegative, got {self.sigma}")


@dataclass
class RootList:
    """Ascending roots with the bracket and residual recorded per root."""

    roots: list[float]
    residuals: list[float]
    brackets: list[tuple[float, float]]

    def __post_init__(self) -> None:
        if not all(b < c for b, c in zip(self.roots, self.roots[1:])):
            raise ValueError("roots must be strictly ascending")


def _bisect_increasing(g: Callable[[float], float], lo: float, hi: float) -> float:
    """Bisect an increasing g with g(lo) < 0 < g(hi) to float resolution."""
    glo, ghi = g(lo), g(hi)
    if glo > 0.0 or ghi < 0.0:
        raise ValueError(f"bracket [{lo}, {hi}] does not straddle a sign change")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _tan_brackets(a: float, count: int) -> list[tuple[float, float]]:
    """First ``count`` inter-pole intervals of mu tan(mu a) on mu > 0."""
    poles = [(2 * j - 1) * math.pi / (2.0 * a) for j in range(1, count + 1)]
    edges = [0.0] + poles
    return [(edges[i], edges[i + 1]) for i in range(count)]


def solve_mu_tan(a: float, c: float, count: int = 1, tol: float = 1e-10) -> RootList:
    """First ``count`` roots of mu tan(mu a) = c for c > 0.

    Between consecutive poles (2j-1)pi/(2a) the left side increases from
    -inf (or 0 on the first interval) to +inf, so each interval holds exactly
    one root; bisection inside the margin-trimmed bracket is guaranteed.

    Parameters
    ----------
    a : float
        Segment length, a > 0.
    c : float
        Right-hand side, c > 0.
    count : int
        Number of roots requested.
    tol : float
        Acceptance bound on the residual |mu tan(mu a) - c|, scaled by
        max(1, c) so that steep large-c roots are judged relative to c.

    Returns
    -------
    RootList
        Roots ascending, one per bracket, with residuals and brackets.

    Examples
    --------
    >>> r = solve_mu_tan(1.0, 1.0)
    >>> abs(r.roots[0] - 0.8603335890193798) < 1e-12
    True
    """
    if a <= 0.0:
        raise ValueError(f"segment length must be positive, got a={a}")
    if c <= 0.0:
        raise ValueError(f"right-hand side must be positive, got c={c}")
    if count < 1:
        raise ValueError(f"root count must be >= 1, got {count}")

    def g(mu: float) -> float:
        return mu * math.tan(mu * a) - c

    roots: list[float] = []
    residuals: list[float] = []
    brackets: list[tuple[float, float]] = []
    for lo, hi in _tan_brackets(a, count):
        width = hi - lo
        blo, bhi = lo + _POLE_MARGIN * width, hi - _POLE_MARGIN * width
        root = _bisect_increasing(g, blo, bhi)
        res = abs(g(root))
        if not res <= tol * max(1.0, c):
            raise ArithmeticError(
                f"root residual {res:.3e} exceeds tol={tol:.3e} in bracket ({lo}, {hi})"
            )
        roots.append(root)
        residuals.append(res)
        brackets.append((lo, hi))
    return RootList(roots, residuals, brackets)


def solve_minus_mu_cot(a: float, sigma: float, count: int = 1, tol: float = 1e-10) -> RootList:
    """First ``count`` roots of -mu cot(mu a) = sigma, sigma >= 0.

    The Dirichlet-at-zero companion of ``solve_mu_tan``: -mu cot(mu a) is
    strictly increasing between its poles at mu = j pi / a, so each bracket
    (j pi/a, (j+1) pi/a) carries exactly one root.
    """

    def g(mu: float) -> float:
        return -mu / math.tan(mu * a) - sigma

    roots: list[float] = []
    residuals: list[float] = []
    brackets: list[tuple[float, float]] = []
    for j in range(count):
        lo, hi = j * math.pi / a, (j + 1) * math.pi / a
        width = hi - lo
        blo = max(lo + _POLE_MARGIN * width, 1e-300)
        root = _bisect_increasing(g, blo, hi - _POLE_MARGIN * width)
        res = abs(g(root))
        if not res <= tol * max(1.0, sigma):
            raise ArithmeticError(
                f"root residual {res:.3e} exceeds tol={tol:.3e} in bracket ({lo}, {hi})"
            )
        roots.append(root)
        residuals.append(res)
        brackets.append((lo, hi))
    return RootList(roots, residuals, brackets)


def robin_eigenvalues(problem: RobinProblem, count: int = 1, tol: float = 1e-10) -> RootList:
    """Frequencies mu_j whose squares are the Robin segment eigenvalues.

    Neumann at 0 solves mu tan(mu a) = sigma; Dirichlet at 0 solves
    -mu cot(mu a) = sigma.  A vanishing coupling is handled in closed form
    (for Neumann at 0 the first eigenvalue is 0, with mu_j = j pi / a).

    Examples
    --------
    >>> import math
    >>> p = RobinProblem(0.5, math.pi / 2)
    >>> r = robin_eigenvalues(p)
    >>> abs(r.roots[0] ** 2 - math.pi ** 2 / 4) < 1e-10
    True
    """
    a, sigma = problem.length, problem.sigma
    if problem.at_zero is SymmetryVariant.NEUMANN_AT_CUT:
        if sigma == 0.0:
            mus = [j * math.pi / a for j in range(count)]
            return RootList(mus, [0.0] * count, [(m, m) for m in mus])
        return solve_mu_tan(a, sigma, count, tol)
    return solve_minus_mu_cot(a, sigma, count, tol)


@dataclass
class SampledFunction:
    """A profile known at nodes, optionally with closed-form callables.

    Integrals treat the node intervals as quadrature panels (16-node
    Gauss-Legendre per panel).  Derivatives come from the analytic closure
    when one is attached, otherwise from a cubic spline through the samples.
    """

    nodes: np.ndarray
    values: np.ndarray
    func: Callable[[np.ndarray], np.ndarray] | None = None
    deriv: Callable[[np.ndarray], np.ndarray] | None = None
    _spline: CubicSpline | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.nodes.ndim != 1 or self.nodes.size < 2:
            raise ValueError("need at least two sample nodes")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise ValueError("sample nodes must be strictly increasing")
        if self.values.shape != self.nodes.shape:
            raise ValueError("values must match nodes in shape")

    @classmethod
    def from_callable(
        cls,
        func: Callable[[np.ndarray], np.ndarray],
        nodes: Sequence[float],
        deriv: Callable[[np.ndarray], np.ndarray] | None = None,
    ) -> "SampledFunction":
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, np.asarray(func(nodes), dtype=float), func=func, deriv=deriv)

    def _ensure_spline(self) -> CubicSpline:
        if self._spline is None:
            self._spline = CubicSpline(self.nodes, self.values)
        return self._spline

    def eval(self, x: np.ndarray) -> np.ndarray:
        if self.func is not None:
            return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)
        return self._ensure_spline()(np.asarray(x, dtype=float))

    def eval_deriv(self, x: np.ndarray) -> np.ndarray:
        if self.deriv is not None:
            return np.asarray(self.deriv(np.asarray(x, dtype=float)), dtype=float)
        return self._ensure_spline()(np.asarray(x, dtype=float), nu=1)

    def quadrature(self, integrand: Callable[[np.ndarray], np.ndarray]) -> float:
        """Composite Gauss-Legendre integral of ``integrand`` over the nodes."""
        lo = self.nodes[:-1]
        half = 0.5 * np.diff(self.nodes)
        # panel points: shape (panels, 16), affine image of the reference nodes
        pts = lo[:, None] + half[:, None] * (_GL_NODES[None, :] + 1.0)
        vals = integrand(pts.ravel()).reshape(pts.shape)
        return float(np.sum(half * (vals @ _GL_WEIGHTS)))

    @property
    def endpoint_value(self) -> float:
        return float(self.values[-1])


def lemma_right_residual(phi: SampledFunction, m: float) -> float:
    """Defect integral of the half-line decay bound.

    Evaluates integral of (phi' + m phi)^2 over the sampled range.  It is
    nonnegative for every profile and vanishes exactly on multiples of
    exp(-m x); its value equals the gap in
    m phi(0)^2 <= integral (phi'^2 + m^2 phi^2) once phi decays at the far
    end.
    """
    if m <= 0.0:
        raise ValueError(f"decay rate must be positive, got m={m}")

    def integrand(x: np.ndarray) -> np.ndarray:
        return (phi.eval_deriv(x) + m * phi.eval(x)) ** 2

    return phi.quadrature(integrand)


def lemma_left_lhs(f: SampledFunction, a: float) -> float:
    """Segment form with boundary reward, valid for 0 < a < 1.

    Evaluates

        integral_0^a f'^2 - (pi^2/4) integral_0^a f^2
            + sqrt(M(a)) f(a)^2 / 2,

    which is nonnegative for every profile and vanishes exactly on
    multiples of cos(pi x / 2).
    """
    if not 0.0 < a < 1.0:
        raise ValueError(f"the boundary-reward form needs 0 < a < 1, got a={a}")
    if abs(f.nodes[0]) > 1e-12 or abs(f.nodes[-1] - a) > 1e-12:
        raise ValueError("profile must be sampled on [0, a]")
    energy = f.quadrature(lambda x: f.eval_deriv(x) ** 2)
    mass = f.quadrature(lambda x: f.eval(x) ** 2)
    reward = 0.5 * math.sqrt(M_of_a(a)) * f.endpoint_value**2
    return energy - FIRST_THRESHOLD * mass + reward


def lemma_a1_lhs(f: SampledFunction, delta: float, c1: float = 0.0) -> float:
    """Unit-segment form for the integer case a = 1.

    Evaluates

        integral_0^1 f'^2
            - (pi^2/4 - M delta^(2/3) - c1 delta^(4/3)) integral_0^1 f^2
            + sqrt(M) f(1)^2 / (2 delta^(2/3)),

    with M = pi^(4/3).  For large enough c1 this is nonnegative for every
    profile; on the matched profile cos(mu x) with
    mu^2 = pi^2/4 - M delta^(2/3) the value at c1 = 0 is of order
    delta^(4/3) times the squared norm.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"clearance must satisfy 0 < delta < 1, got {delta}")
    if abs(f.nodes[0]) > 1e-12 or abs(f.nodes[-1] - 1.0) > 1e-12:
        raise ValueError("profile must be sampled on [0, 1]")
    m_const = math.pi ** (4.0 / 3.0)
    d23 = delta ** (2.0 / 3.0)
    energy = f.quadrature(lambda x: f.eval_deriv(x) ** 2)
    mass = f.quadrature(lambda x: f.eval(x) ** 2)
    level = FIRST_THRESHOLD - m_const * d23 - c1 * delta ** (4.0 / 3.0)
    reward = math.sqrt(m_const) * f.endpoint_value**2 / (2.0 * d23)
    return energy - level * mass + reward


def integer_expansion_defect(delta: float, tol: float = 1e-10) -> float:
    """Two-term expansion defect of the a = 1 dispersion relation.

    The near-threshold frequency solves mu tan(mu) = sqrt(M) / (2 delta^(2/3))
    with M = pi^(4/3); its square equals pi^2/4 - M delta^(2/3) up to a
    remainder of order delta^(4/3).  Returns mu_1^2 minus the two-term value,
    so defect / delta^(4/3) stays bounded as delta -> 0.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"clearance must satisfy 0 < delta < 1, got {delta}")
    m_const = math.pi ** (4.0 / 3.0)
    sigma = math.sqrt(m_const) / (2.0 * delta ** (2.0 / 3.0))
    mu1 = solve_mu_tan(1.0, sigma, count=1, tol=tol).roots[0]
    return mu1**2 - (FIRST_THRESHOLD - m_const * delta ** (2.0 / 3.0))
