from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from trapmodes import (
    FIRST_THRESHOLD,
    ModeBases,
    SolveOptions,
    SymmetryVariant,
    assemble,
    eigenvalues_below_threshold,
    field_evaluate,
    make_geometry,
    overlap,
    suggested_n_right,
)
from trapmodes.modematch import _SystemBuilder, default_n_left, overlap_matrix

N = SymmetryVariant.NEUMANN_AT_CUT
D = SymmetryVariant.DIRICHLET_AT_CUT

# eigenvalues under default SolveOptions, validated against the independent
# finite-difference brackets in test_fdoracle
FROZEN = {
    (0.5, 0.2, "N"): [2.140337007630],
    (0.5, 0.1, "N"): [2.354418490450],
    (0.5, 0.05, "N"): [2.437947773252],
    (0.5, 0.025, "N"): [2.460355879389],
    (1.5, 0.2, "N"): [0.708949360254],
    (1.5, 0.2, "D"): [2.218239808994],
    (1.5, 0.1, "D"): [2.368133187994],
    (2.5, 0.1, "N"): [0.333793748925, 2.377994339348],
}


# -- junction overlaps ------------------------------------------------------


def test_overlap_doc_value() -> None:
    expected = math.sqrt(0.2) * math.sin(0.05 * math.pi) / (0.05 * math.pi)
    assert overlap(0, 1, 0.1) == pytest.approx(expected, abs=1e-15)


def test_overlap_closed_form_matches_quadrature() -> None:
    delta = 0.3
    bases = ModeBases(delta, 4, 8)
    for j in range(4):
        for k in (1, 2, 5, 8):
            numeric, _ = quad(
                lambda y: bases.channel_mode(j, y) * bases.strip_mode(k, y),
                1.0 - delta,
                1.0,
                epsabs=1e-13,
            )
            assert overlap(j, k, delta) == pytest.approx(numeric, abs=1e-11)


def test_overlap_matrix_agrees_with_scalar() -> None:
    matrix = overlap_matrix(3, 5, 0.17)
    assert matrix.shape == (3, 5)
    for j in range(3):
        for k in range(1, 6):
            assert matrix[j, k - 1] == pytest.approx(overlap(j, k, 0.17), abs=1e-15)


def test_overlap_validation() -> None:
    with pytest.raises(ValueError):
        overlap(-1, 1, 0.1)
    with pytest.raises(ValueError):
        overlap(0, 0, 0.1)
    with pytest.raises(ValueError):
        overlap(0, 1, 1.0)


def test_bases_are_orthonormal() -> None:
    delta = 0.25
    bases = ModeBases(delta, 3, 6)
    for j in range(3):
        for i in range(j + 1):
            numeric, _ = quad(
                lambda y: bases.channel_mode(i, y) * bases.channel_mode(j, y),
                1.0 - delta,
                1.0,
                epsabs=1e-13,
            )
            assert numeric == pytest.approx(1.0 if i == j else 0.0, abs=1e-11)
    for k in (1, 2, 3):
        for m in range(1, k + 1):
            numeric, _ = quad(
                lambda y: bases.strip_mode(m, y) * bases.strip_mode(k, y),
                0.0,
                1.0,
                epsabs=1e-13,
            )
            assert numeric == pytest.approx(1.0 if m == k else 0.0, abs=1e-11)


# -- truncation policies ----------------------------------------------------


def test_default_n_left_coupling() -> None:
    assert default_n_left(0.2, 800) == 320
    assert default_n_left(0.01, 200) == 4
    assert default_n_left(0.9, 100) == 100  # clamped to n_right
    assert default_n_left(1e-4, 200) == 2


def test_suggested_n_right_resolves_junction() -> None:
    assert suggested_n_right(0.2) == 200
    assert suggested_n_right(0.01) == 800
    assert suggested_n_right(1e-4) == 3200  # capped
    for delta in (0.3, 0.05, 0.004):
        assert suggested_n_right(delta) * delta >= 8.0 or suggested_n_right(delta) == 3200


def test_solve_options_validation() -> None:
    with pytest.raises(ValueError):
        SolveOptions(scan_points=32)
    with pytest.raises(ValueError):
        SolveOptions(n_right=4)
    # an explicit large start raises the cap instead of being capped below it
    opts = SolveOptions(n_right=3200, max_n_right=1600)
    assert opts.max_n_right == 3200


# -- matching system --------------------------------------------------------


def test_system_matrix_is_symmetric() -> None:
    system = assemble(make_geometry(0.5, 0.2), N, 1.8, n_right=64)
    assert np.max(np.abs(system.matrix - system.matrix.T)) == 0.0


def test_negative_count_matches_dense_inertia() -> None:
    builder = _SystemBuilder(make_geometry(0.5, 0.2), N, 24, 60)
    for lam in (0.5, 1.7, 2.2, 2.42):
        dense = builder.dense(lam)
        expected = int(np.sum(np.linalg.eigvalsh(dense) < 0.0))
        assert builder.negative_count(lam) == expected


def test_matrix_free_apply_matches_dense() -> None:
    builder = _SystemBuilder(make_geometry(0.5, 0.15), N, 20, 50)
    rng = np.random.RandomState(3)
    vec = rng.standard_normal(50)
    for lam in (1.2, 2.3):
        assert np.allclose(builder.apply(lam, vec), builder.dense(lam) @ vec, atol=1e-10)


def test_singularity_ratio_separates_root_from_offroot() -> None:
    builder = _SystemBuilder(make_geometry(0.5, 0.2), N, 80, 200)
    # locate the root at this exact truncation by bisecting the inertia jump
    lo, hi = 2.10, 2.18
    level = builder.negative_count(hi)
    assert level == builder.negative_count(lo) + 1
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if builder.negative_count(mid) >= level:
            hi = mid
        else:
            lo = mid
    at_root = builder.singularity_ratio(0.5 * (lo + hi))
    off_root = builder.singularity_ratio(2.0)
    assert at_root < 1e-10
    assert off_root > 1e-6


# -- eigenvalue driver ------------------------------------------------------


def test_frozen_eigenvalues_reproduce() -> None:
    for (a, delta, label), expected in FROZEN.items():
        result = eigenvalues_below_threshold(
            make_geometry(a, delta), SymmetryVariant.from_label(label)
        )
        assert len(result.values) == len(expected)
        for got, want in zip(result.values, expected):
            assert got == pytest.approx(want, abs=1e-8)
        assert all(result.converged)
        assert all(r < 1e-8 for r in result.residuals)
        assert all(v < FIRST_THRESHOLD for v in result.values)


def test_counts_and_alternation_at_desk_clearance() -> None:
    for a in (0.5, 1.5, 2.0, 2.5):
        merged = []
        for variant in (N, D):
            result = eigenvalues_below_threshold(make_geometry(a, 0.1), variant)
            merged.extend((v, variant.label) for v in result.values)
        merged.sort()
        labels = "".join(tag for _, tag in merged)
        expected_total = round(a) if a == round(a) else math.ceil(a)
        assert len(merged) == expected_total
        # strict alternation starting from the even family
        assert labels[0] == "N"
        assert all(x != y for x, y in zip(labels, labels[1:]))


def test_deep_eigenvalue_matches_wide_obstacle_limit() -> None:
    # as delta -> 0 with a fixed, the deep channel mode approaches the
    # quarter-wavelength value (pi/(2a))^2 of the hard-walled segment
    result = eigenvalues_below_threshold(make_geometry(2.5, 0.1), N)
    assert result.values[0] == pytest.approx((math.pi / 5.0) ** 2, rel=0.2)


def test_empty_family_returns_no_values() -> None:
    # a < 1 traps nothing in the odd family
    result = eigenvalues_below_threshold(make_geometry(0.5, 0.1), D)
    assert result.values == []


# -- matched field ----------------------------------------------------------


def test_field_continuous_across_junction() -> None:
    geometry = make_geometry(0.5, 0.2)
    lam = 2.140337007630
    ys = np.linspace(0.82, 0.98, 9)
    eps = 1e-9
    left = field_evaluate(geometry, N, lam, [(0.5 - eps, y) for y in ys])
    right = field_evaluate(geometry, N, lam, [(0.5 + eps, y) for y in ys])
    scale = np.max(np.abs(right))
    assert scale > 0.1
    assert np.max(np.abs(left - right)) < 1e-3 * scale


def test_field_vanishes_on_dirichlet_cut() -> None:
    geometry = make_geometry(1.5, 0.2)
    values = field_evaluate(
        geometry, D, 2.218239808994, [(0.0, y) for y in np.linspace(0.82, 0.98, 5)]
    )
    assert np.max(np.abs(values)) == 0.0


def test_field_decays_at_first_threshold_rate() -> None:
    geometry = make_geometry(0.5, 0.2)
    lam = 2.140337007630
    near = field_evaluate(geometry, N, lam, [(1.5, 0.5)])[0]
    far = field_evaluate(geometry, N, lam, [(2.5, 0.5)])[0]
    assert far / near == pytest.approx(math.exp(-math.sqrt(FIRST_THRESHOLD - lam)), rel=0.01)


def test_field_rejects_outside_points() -> None:
    geometry = make_geometry(0.5, 0.2)
    with pytest.raises(ValueError):
        field_evaluate(geometry, N, 2.14, [(0.25, 0.5)])  # inside the obstacle
