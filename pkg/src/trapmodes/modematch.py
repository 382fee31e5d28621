"""Mode-matching eigenvalue solver for the obstructed half strip.

The field is expanded in transverse modes on both sides of the junction line
x = a: modes sin((2k-1) pi y / 2) on the open strip (a, inf) x (0, 1) and
cosine channel modes on (1 - delta, 1) above the obstacle.  Continuity of the
trace and of the normal flux across the junction segment condenses to a
symmetric matrix family

    A(lambda) = diag(beta_k) + O^T diag(d_j) O,

where beta_k = sqrt(cutoff_k - lambda) are the strip decay rates, d_j are the
channel impedances (logarithmic derivatives of the channel x-profiles at
x = a) and O is the junction overlap matrix.  lambda below the first
threshold is an eigenvalue exactly when A(lambda) is singular.

Root detection tracks the negative-eigenvalue count of A(lambda), which is
computed cheaply through a congruence: with B = diag(beta) positive definite,
A is congruent to I + C^T D C with C = O B^(-1/2), and the nonzero spectrum
of C^T D C equals that of the small symmetric matrix
G^(1/2) diag(d) G^(1/2), G = O B^(-1) O^T.  The count increases by one at
every eigenvalue and also jumps at the poles of d_0, which are known in
closed form and excluded from the scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .asymptotics import eigen_count
from .geometry import FIRST_THRESHOLD, Geometry, SymmetryVariant, Thresholds

__all__ = [
    "ModeBases",
    "MatchingSystem",
    "EigenvalueResult",
    "SolveOptions",
    "overlap",
    "overlap_matrix",
    "assemble",
    "eigenvalues_below_threshold",
    "field_evaluate",
]


def _sinc(x: np.ndarray) -> np.ndarray:
    """sin(x)/x with the removable singularity filled in."""
    return np.sinc(np.asarray(x, dtype=float) / math.pi)


def overlap(j: int, k: int, delta: float) -> float:
    """Junction overlap of channel mode j with strip mode k.

    Channel modes on (1-delta, 1): delta^(-1/2) for j = 0 and
    sqrt(2/delta) cos(pi j (1-y)/delta) for j >= 1.  Strip modes on (0, 1):
    sqrt(2) sin((2k-1) pi y / 2), k >= 1.  The integral over the junction
    segment evaluates in closed form; with omega = (2k-1) pi delta / 2,

        O_{0k} = sqrt(2 delta) (-1)^(k+1) sinc(omega),
        O_{jk} = sqrt(delta) (-1)^(k+1) [sinc(pi j - omega) + sinc(pi j + omega)].

    Examples
    --------
    >>> import math
    >>> abs(overlap(0, 1, 0.1) - math.sqrt(0.2) * math.sin(0.05 * math.pi)
    ...     / (0.05 * math.pi)) < 1e-15
    True
    """
    if j < 0 or k < 1:
        raise ValueError(f"need j >= 0 and k >= 1, got j={j}, k={k}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"clearance must satisfy 0 < delta < 1, got {delta}")
    omega = (2 * k - 1) * math.pi * delta / 2.0
    sign = -1.0 if k % 2 == 0 else 1.0
    if j == 0:
        return math.sqrt(2.0 * delta) * sign * float(_sinc(omega))
    return math.sqrt(delta) * sign * float(_sinc(math.pi * j - omega) + _sinc(math.pi * j + omega))


def overlap_matrix(n_left: int, n_right: int, delta: float) -> np.ndarray:
    """Vectorized (n_left x n_right) junction overlap matrix."""
    k = np.arange(1, n_right + 1)
    omega = (2 * k - 1) * (math.pi * delta / 2.0)
    sign = np.where(k % 2 == 0, -1.0, 1.0)
    rows = [math.sqrt(2.0 * delta) * sign * _sinc(omega)]
    for j in range(1, n_left):
        rows.append(math.sqrt(delta) * sign * (_sinc(math.pi * j - omega) + _sinc(math.pi * j + omega)))
    return np.vstack(rows)


@dataclass(frozen=True)
class ModeBases:
    """Transverse bases on either side of the junction, with truncations."""

    delta: float
    n_left: int
    n_right: int

    def __post_init__(self) -> None:
        if self.n_left < 2:
            raise ValueError(f"need at least two channel modes, got {self.n_left}")
        if self.n_right < self.n_left:
            raise ValueError("strip truncation must be at least the channel truncation")

    def strip_mode(self, k: int, y: np.ndarray) -> np.ndarray:
        """sqrt(2) sin((2k-1) pi y / 2) on (0, 1)."""
        return math.sqrt(2.0) * np.sin((2 * k - 1) * math.pi * np.asarray(y) / 2.0)

    def channel_mode(self, j: int, y: np.ndarray) -> np.ndarray:
        """Normalized cosine mode on (1-delta, 1)."""
        y = np.asarray(y, dtype=float)
        if j == 0:
            return np.full_like(y, self.delta**-0.5)
        return math.sqrt(2.0 / self.delta) * np.cos(math.pi * j * (1.0 - y) / self.delta)


def default_n_left(delta: float, n_right: int) -> int:
    """Channel truncation coupled to the strip truncation.

    max(2, ceil(2 delta N_r)), clamped to N_r so wide channels cannot demand
    more junction modes than strip modes.
    """
    return min(max(2, math.ceil(2.0 * delta * n_right)), n_right)


def suggested_n_right(delta: float) -> int:
    """Strip truncation that resolves the junction at clearance delta.

    The overlap coefficients only start decaying past mode index ~ 1/delta,
    so a thin channel needs proportionally more strip modes.  Capped so
    sweeps over very small delta stay affordable.
    """
    return int(min(3200, max(200, math.ceil(8.0 / delta))))


@dataclass
class MatchingSystem:
    """The symmetric matching matrix assembled at one spectral parameter."""

    geometry: Geometry
    variant: SymmetryVariant
    lam: float
    bases: ModeBases
    matrix: np.ndarray
    beta: np.ndarray
    impedance: np.ndarray
    overlaps: np.ndarray


class _SystemBuilder:
    """Caches the lambda-independent pieces of the matching family."""

    def __init__(self, geometry: Geometry, variant: SymmetryVariant, n_left: int, n_right: int):
        self.geometry = geometry
        self.variant = variant
        self.bases = ModeBases(geometry.delta, n_left, n_right)
        self.overlaps = overlap_matrix(n_left, n_right, geometry.delta)
        k = np.arange(1, n_right + 1)
        self._cutoffs = ((2 * k - 1) * math.pi / 2.0) ** 2
        j = np.arange(1, n_left)
        self._channel_cutoffs = (math.pi * j / geometry.delta) ** 2

    def beta(self, lam: float) -> np.ndarray:
        if lam >= self._cutoffs[0]:
            raise ValueError(f"spectral parameter {lam} is not below the first threshold")
        return np.sqrt(self._cutoffs - lam)

    def impedance(self, lam: float) -> np.ndarray:
        """Logarithmic derivatives d_j of the channel x-profiles at x = a."""
        a = self.geometry.a
        s = math.sqrt(lam)
        gam = np.sqrt(self._channel_cutoffs - lam)
        if self.variant is SymmetryVariant.NEUMANN_AT_CUT:
            d0 = -s * math.tan(s * a)
            dj = gam * np.tanh(gam * a)
        else:
            d0 = s / math.tan(s * a)
            dj = gam / np.tanh(gam * a)
        return np.concatenate(([d0], dj))

    def d0_poles(self, lam_max: float) -> list[float]:
        """Poles of d_0 in (0, lam_max), in closed form."""
        a = self.geometry.a
        poles = []
        m = 1
        while True:
            if self.variant is SymmetryVariant.NEUMANN_AT_CUT:
                root = (2 * m - 1) * math.pi / (2.0 * a)
            else:
                root = m * math.pi / a
            lam = root * root
            if lam >= lam_max:
                return poles
            poles.append(lam)
            m += 1

    def dense(self, lam: float) -> np.ndarray:
        beta = self.beta(lam)
        d = self.impedance(lam)
        coupling = self.overlaps.T @ (d[:, None] * self.overlaps)
        # exact symmetry, not just up to matmul rounding
        coupling = 0.5 * (coupling + coupling.T)
        return np.diag(beta) + coupling

    def system(self, lam: float) -> MatchingSystem:
        return MatchingSystem(
            self.geometry,
            self.variant,
            lam,
            self.bases,
            self.dense(lam),
            self.beta(lam),
            self.impedance(lam),
            self.overlaps,
        )

    def negative_count(self, lam: float) -> int:
        """Number of negative eigenvalues of A(lambda), via the small congruence."""
        beta = self.beta(lam)
        d = self.impedance(lam)
        scaled = self.overlaps / np.sqrt(beta)[None, :]
        gram = scaled @ scaled.T
        vals, vecs = np.linalg.eigh(gram)
        half = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
        core = half @ (d[:, None] * half)
        w = np.linalg.eigvalsh(0.5 * (core + core.T))
        return int(np.count_nonzero(1.0 + w < 0.0))

    def apply(self, lam: float, vec: np.ndarray) -> np.ndarray:
        """A(lambda) @ vec without forming the dense matrix."""
        beta = self.beta(lam)
        d = self.impedance(lam)
        return beta * vec + self.overlaps.T @ (d * (self.overlaps @ vec))

    def singularity_ratio(self, lam: float, iterations: int = 6) -> float:
        """|smallest eigenvalue| of A(lambda) relative to the diagonal scale.

        Inverse iteration with the rank-n_left update inverted by the
        identity A^-1 = B^-1 - B^-1 O^T D (I + G D)^-1 O B^-1, which stays
        valid when entries of D vanish.  Linear cost in n_right, so it
        serves as the residual check at truncations where a dense solve
        is out of reach.
        """
        beta = self.beta(lam)
        d = self.impedance(lam)
        inv_beta = 1.0 / beta
        gram = (self.overlaps * inv_beta[None, :]) @ self.overlaps.T
        core = np.eye(len(d)) + gram * d[None, :]

        def solve(rhs: np.ndarray) -> np.ndarray:
            tail = inv_beta * rhs
            try:
                small = np.linalg.solve(core, self.overlaps @ tail)
            except np.linalg.LinAlgError:
                small = np.linalg.lstsq(core, self.overlaps @ tail, rcond=None)[0]
            return tail - inv_beta * (self.overlaps.T @ (d * small))

        vec = np.full(self.overlaps.shape[1], 1.0)
        vec /= np.linalg.norm(vec)
        theta = float("inf")
        for _ in range(iterations):
            nxt = solve(vec)
            norm = np.linalg.norm(nxt)
            if not np.isfinite(norm) or norm == 0.0:
                break
            vec = nxt / norm
            candidate = float(vec @ self.apply(lam, vec))
            if abs(candidate - theta) <= 1e-3 * abs(candidate):
                theta = candidate
                break
            theta = candidate
        return abs(theta) / float(beta[-1])


@dataclass
class SolveOptions:
    """Knobs for the scan/bisect eigenvalue search."""

    n_right: int = 200
    n_left: int | None = None
    scan_points: int = 400
    # move-per-doubling stop; the reentrant corner caps the truncation rate
    # near N^(-4/3), so 1e-5 is reachable at moderate cost and 1e-6 is not
    tol: float = 1e-5
    auto_refine: bool = True
    max_n_right: int = 1600
    lambda_min: float = 1e-6
    threshold_margin: float = 1e-12

    def __post_init__(self) -> None:
        if self.scan_points < 64:
            raise ValueError(f"scan needs at least 64 points, got {self.scan_points}")
        if self.n_right < 8:
            raise ValueError(f"strip truncation too small: {self.n_right}")
        # a large explicit start means "refine from here", never "cap below start"
        self.max_n_right = max(self.max_n_right, self.n_right)


@dataclass
class EigenvalueResult:
    """Eigenvalues below the first threshold for one geometry and variant."""

    geometry: Geometry
    variant: SymmetryVariant
    values: list[float]
    residuals: list[float]
    truncation: tuple[int, int]
    converged: list[bool]
    warnings: list[str] = field(default_factory=list)


_POLE_WINDOW = 1e-10


def _scan_grid(lo: float, hi: float, base_points: int) -> np.ndarray:
    """Uniform grid plus geometric clustering toward the right endpoint."""
    width = hi - lo
    uniform = np.linspace(lo, hi, max(base_points, 16))
    tail = hi - width * 2.0 ** -np.arange(1.0, 47.0)
    return np.unique(np.concatenate([uniform, tail]))


def _bisect_level(counter: Callable[[float], int], lo: float, hi: float, level: int, xtol: float) -> float:
    """Smallest lambda in (lo, hi] where the negative count reaches ``level``."""
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if counter(mid) >= level:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _locate_roots(builder: _SystemBuilder, opts: SolveOptions) -> list[float]:
    lam_max = FIRST_THRESHOLD - opts.threshold_margin
    edges = [opts.lambda_min]
    for p in builder.d0_poles(lam_max):
        edges.extend([p - _POLE_WINDOW, p + _POLE_WINDOW])
    edges.append(lam_max)

    xtol = max(1e-13, 0.01 * opts.tol)
    roots: list[float] = []
    total_width = lam_max - opts.lambda_min
    for seg_lo, seg_hi in zip(edges[::2], edges[1::2]):
        if seg_hi <= seg_lo:
            continue
        points = max(32, int(opts.scan_points * (seg_hi - seg_lo) / total_width))
        grid = _scan_grid(seg_lo, seg_hi, points)
        counts = [builder.negative_count(g) for g in grid]
        for idx in range(len(grid) - 1):
            lo_count, hi_count = counts[idx], counts[idx + 1]
            for level in range(lo_count + 1, hi_count + 1):
                roots.append(_bisect_level(builder.negative_count, grid[idx], grid[idx + 1], level, xtol))
    return sorted(roots)


def _relocate_roots(
    builder: _SystemBuilder, previous: list[float], opts: SolveOptions
) -> list[float] | None:
    """Re-find each root near its previous location at a finer truncation.

    Returns None when a local bracket cannot be certified (count mismatch),
    in which case the caller falls back to a full scan.
    """
    lam_max = FIRST_THRESHOLD - opts.threshold_margin
    poles = builder.d0_poles(lam_max)
    xtol = max(1e-13, 0.01 * opts.tol)
    refined: list[float] = []
    for root in previous:
        seg_lo, seg_hi = opts.lambda_min, lam_max
        for p in poles:
            if p < root:
                seg_lo = max(seg_lo, p + _POLE_WINDOW)
            else:
                seg_hi = min(seg_hi, p - _POLE_WINDOW)
        width = max(1e-6, 1e-3 * (FIRST_THRESHOLD - root))
        for _ in range(20):
            lo = max(seg_lo, root - width)
            hi = min(seg_hi, root + width)
            base, top = builder.negative_count(lo), builder.negative_count(hi)
            if top - base == 1:
                refined.append(_bisect_level(builder.negative_count, lo, hi, base + 1, xtol))
                break
            if lo <= seg_lo and hi >= seg_hi:
                return None
            width *= 4.0
        else:
            return None
    return refined


def assemble(
    geometry: Geometry,
    variant: SymmetryVariant,
    lam: float,
    n_left: int | None = None,
    n_right: int = 200,
) -> MatchingSystem:
    """Assemble the symmetric matching matrix at one spectral parameter.

    ``n_left`` defaults to the coupled truncation max(2, ceil(2 delta N_r)).
    """
    if n_left is None:
        n_left = default_n_left(geometry.delta, n_right)
    return _SystemBuilder(geometry, variant, n_left, n_right).system(lam)


def eigenvalues_below_threshold(
    geometry: Geometry,
    variant: SymmetryVariant,
    opts: SolveOptions | None = None,
) -> EigenvalueResult:
    """All eigenvalues below the first threshold for one symmetry family.

    Scans the negative-eigenvalue count of the matching family over
    (lambda_min, nu1 - margin) with the d_0 poles excluded, bisects each
    count increment, then (with ``auto_refine``) doubles both truncations
    until no eigenvalue moves by more than ``tol``.
    """
    if opts is None:
        opts = SolveOptions()

    def run(n_right: int, previous: list[float] | None) -> list[float]:
        n_left = opts.n_left
        if n_left is None:
            n_left = default_n_left(geometry.delta, n_right)
        else:
            n_left = min(max(2, round(n_left * n_right / opts.n_right)), n_right)
        builder = _SystemBuilder(geometry, variant, n_left, n_right)
        if previous is not None:
            local = _relocate_roots(builder, previous, opts)
            if local is not None:
                return local
        return _locate_roots(builder, opts)

    warnings: list[str] = []
    n_right = opts.n_right
    values = run(n_right, None)
    converged = [False] * len(values)
    if opts.auto_refine:
        while True:
            if 2 * n_right > opts.max_n_right:
                warnings.append(
                    f"truncation cap {opts.max_n_right} reached before moves fell below tol"
                )
                break
            finer = run(2 * n_right, values)
            n_right *= 2
            if len(finer) != len(values):
                warnings.append(
                    f"eigenvalue count changed from {len(values)} to {len(finer)} on refinement"
                )
                values = finer
                converged = [False] * len(values)
                continue
            moves = [abs(f - v) for f, v in zip(finer, values)]
            values = finer
            converged = [m <= opts.tol for m in moves]
            if all(converged):
                break

    n_left = opts.n_left
    if n_left is None:
        n_left = default_n_left(geometry.delta, n_right)
    builder = _SystemBuilder(geometry, variant, n_left, n_right)
    residuals = [builder.singularity_ratio(lam) for lam in values]

    expected = eigen_count(geometry.a)
    want = expected.from_neumann if variant is SymmetryVariant.NEUMANN_AT_CUT else expected.from_dirichlet
    if len(values) != want:
        warnings.append(
            f"found {len(values)} eigenvalues but the small-clearance count predicts {want}"
        )
    return EigenvalueResult(
        geometry, variant, values, residuals, (n_left, n_right), converged, warnings
    )


def _cosh_ratio(gam: np.ndarray, x: float, a: float) -> np.ndarray:
    """cosh(gam x)/cosh(gam a) for 0 <= x <= a without overflow."""
    return np.exp(gam * (x - a)) * (1.0 + np.exp(-2.0 * gam * x)) / (1.0 + np.exp(-2.0 * gam * a))


def _sinh_ratio(gam: np.ndarray, x: float, a: float) -> np.ndarray:
    """sinh(gam x)/sinh(gam a) for 0 <= x <= a without overflow."""
    return np.exp(gam * (x - a)) * (1.0 - np.exp(-2.0 * gam * x)) / (1.0 - np.exp(-2.0 * gam * a))


def field_evaluate(
    geometry: Geometry,
    variant: SymmetryVariant,
    lam: float,
    points: np.ndarray,
    n_left: int | None = None,
    n_right: int = 200,
) -> np.ndarray:
    """Evaluate the matched field of the eigenvalue nearest ``lam`` at points.

    The null vector of A(lambda) provides the strip coefficients; the
    junction projection provides the channel coefficients.  The returned
    field is normalized to a unit strip coefficient vector with a positive
    first component.  Points outside the closed half domain raise.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    for x, y in pts:
        if not geometry.in_domain(x, y):
            raise ValueError(f"point ({x}, {y}) lies outside the domain")
    if n_left is None:
        n_left = default_n_left(geometry.delta, n_right)
    builder = _SystemBuilder(geometry, variant, n_left, n_right)
    system = builder.system(lam)
    spectrum, vectors = np.linalg.eigh(system.matrix)
    b = vectors[:, int(np.argmin(np.abs(spectrum)))]
    nonzero = np.flatnonzero(np.abs(b) > 1e-12 * np.max(np.abs(b)))
    if b[nonzero[0]] < 0.0:
        b = -b
    c = system.overlaps @ b

    a, delta = geometry.a, geometry.delta
    s = math.sqrt(lam)
    gam = np.sqrt((math.pi * np.arange(1, n_left) / delta) ** 2 - lam)
    beta = system.beta
    out = np.empty(len(pts))
    for idx, (x, y) in enumerate(pts):
        if x >= a:
            modes = system.bases.strip_mode(np.arange(1, n_right + 1), y)
            out[idx] = float(np.sum(b * np.exp(-beta * (x - a)) * modes))
        else:
            if variant is SymmetryVariant.NEUMANN_AT_CUT:
                prof0 = math.cos(s * x) / math.cos(s * a)
                profj = _cosh_ratio(gam, x, a)
            else:
                prof0 = math.sin(s * x) / math.sin(s * a)
                profj = _sinh_ratio(gam, x, a)
            profiles = np.concatenate(([prof0], profj))
            modes = np.array(
                [system.bases.channel_mode(j, y) for j in range(n_left)], dtype=float
            ).ravel()
            out[idx] = float(np.sum(c * profiles * modes))
    return out
