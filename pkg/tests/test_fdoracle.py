from __future__ import annotations

import math

import numpy as np
import pytest

from trapmodes import (
    FIRST_THRESHOLD,
    GridSpec,
    MIN_ORACLE_DELTA,
    SymmetryVariant,
    TruncationCondition,
    assemble_grid,
    assemble_strip,
    bracketed_eigenvalue,
    eigenvalues_below_threshold,
    lowest_eigenvalues,
    make_geometry,
    strip_benchmark,
)
from trapmodes.fdoracle import default_truncation_abscissa

N = SymmetryVariant.NEUMANN_AT_CUT
D = SymmetryVariant.DIRICHLET_AT_CUT


# -- grid plumbing ----------------------------------------------------------


def test_grid_spec_requires_commensurate_box() -> None:
    GridSpec(0.25, 2.0, TruncationCondition.DIRICHLET_AT_X)
    with pytest.raises(ValueError):
        GridSpec(0.3, 2.0, TruncationCondition.DIRICHLET_AT_X)  # 1/h not integral
    with pytest.raises(ValueError):
        GridSpec(0.25, 2.1, TruncationCondition.DIRICHLET_AT_X)  # X off-grid


def test_assemble_rejects_off_grid_geometry() -> None:
    spec = GridSpec(0.25, 2.0, TruncationCondition.DIRICHLET_AT_X)
    with pytest.raises(ValueError):
        assemble_grid(make_geometry(0.4, 0.5), N, spec)  # a not on the grid
    with pytest.raises(ValueError):
        assemble_grid(make_geometry(0.5, 0.3), N, spec)  # wall top not on the grid


def test_node_counts_match_hand_enumeration() -> None:
    # a=0.5, delta=0.5, h=0.25, X=2: counted by hand from the stencil rules
    geometry = make_geometry(0.5, 0.5)
    expected = {
        (TruncationCondition.DIRICHLET_AT_X, "N"): 30,
        (TruncationCondition.DIRICHLET_AT_X, "D"): 27,
        (TruncationCondition.NEUMANN_AT_X, "N"): 34,
        (TruncationCondition.NEUMANN_AT_X, "D"): 31,
    }
    for (trunc, label), count in expected.items():
        op = assemble_grid(geometry, SymmetryVariant.from_label(label), GridSpec(0.25, 2.0, trunc))
        assert op.dimension == count


def test_operators_are_exactly_symmetric() -> None:
    geometry = make_geometry(0.5, 0.5)
    for trunc in TruncationCondition:
        op = assemble_grid(geometry, N, GridSpec(0.25, 2.0, trunc))
        assert np.abs(op.stiffness - op.stiffness.T).max() == 0.0
        assert (op.mass < 0).nnz == 0 if hasattr(op.mass, "nnz") else np.all(op.mass > 0)


def test_standard_form_eigenvalues_are_positive() -> None:
    op = assemble_grid(make_geometry(0.5, 0.5), N, GridSpec(0.25, 2.0, TruncationCondition.DIRICHLET_AT_X))
    spectrum = np.linalg.eigvalsh(op.standard_form().toarray())
    assert spectrum[0] > 0.0


def test_default_abscissa_scales_with_decay_length() -> None:
    shallow = default_truncation_abscissa(make_geometry(0.5, 0.2))
    deep = default_truncation_abscissa(make_geometry(0.5, 0.1))
    assert deep > shallow > 0.5


# -- inner eigensolver ------------------------------------------------------


def test_lowest_eigenvalues_match_dense_solve() -> None:
    op = assemble_grid(make_geometry(0.5, 0.5), N, GridSpec(0.125, 2.0, TruncationCondition.DIRICHLET_AT_X))
    dense = np.linalg.eigvalsh(op.standard_form().toarray())
    got = lowest_eigenvalues(op, 3, tol=1e-9)
    assert got == pytest.approx(dense[:3].tolist(), abs=1e-7)


def test_lowest_eigenvalues_ascending_and_deflated() -> None:
    op = assemble_strip(GridSpec(0.1, 2.0, TruncationCondition.DIRICHLET_AT_X))
    values = lowest_eigenvalues(op, 3, tol=1e-8)
    assert values[0] < values[1] < values[2]


# -- separable benchmark ----------------------------------------------------


def test_strip_benchmark_is_second_order() -> None:
    errors = strip_benchmark()
    assert len(errors) == 3
    for coarse, fine in zip(errors, errors[1:]):
        assert 3.6 < coarse / fine < 4.4


# -- brackets ---------------------------------------------------------------


def test_bracket_validation() -> None:
    geometry = make_geometry(0.5, 0.2)
    with pytest.raises(ValueError):
        bracketed_eigenvalue(make_geometry(0.5, 0.05), N, 1)  # below validity floor
    with pytest.raises(ValueError):
        bracketed_eigenvalue(geometry, N, 0)
    with pytest.raises(ValueError):
        bracketed_eigenvalue(geometry, N, 1, h_list=(0.05,))
    with pytest.raises(ValueError):
        bracketed_eigenvalue(geometry, N, 1, h_list=(0.025, 0.05))


def test_validity_floor_is_documented_constant() -> None:
    assert MIN_ORACLE_DELTA == 0.1


def test_bracket_contains_independent_eigenvalue() -> None:
    # the oracle never sees the mode-matching solver; agreement is evidence
    geometry = make_geometry(0.5, 0.2)
    lo, hi = bracketed_eigenvalue(geometry, N, 1, h_list=(0.1, 0.05, 0.025))
    lam = eigenvalues_below_threshold(geometry, N).values[0]
    assert lo < lam < hi
    assert hi - lo < 5e-3
    assert hi < FIRST_THRESHOLD


def test_bracket_deep_mode_without_shift() -> None:
    # a=1.5 even family holds one deep eigenvalue; the near-threshold shift
    # must stay off so the iteration converges to the requested index
    geometry = make_geometry(1.5, 0.2)
    lo, hi = bracketed_eigenvalue(geometry, N, 1, h_list=(0.1, 0.05))
    lam = eigenvalues_below_threshold(geometry, N).values[0]
    assert lo < lam < hi
    assert lam == pytest.approx(0.708949360254, abs=1e-8)


def test_bracket_index_two_targets_second_mode() -> None:
    geometry = make_geometry(2.5, 0.2)
    lo, hi = bracketed_eigenvalue(geometry, N, 2, h_list=(0.1, 0.05))
    values = eigenvalues_below_threshold(geometry, N).values
    assert len(values) == 2
    assert lo < values[1] < hi
    assert values[0] < lo  # the bracket excludes the deep mode


def test_truncation_conditions_bracket_from_both_sides() -> None:
    # Neumann truncation relaxes, Dirichlet constrains: lambda_N <= lambda_D
    geometry = make_geometry(0.5, 0.2)
    x_max = 6.0
    for h in (0.1, 0.05):
        low = lowest_eigenvalues(
            assemble_grid(geometry, N, GridSpec(h, x_max, TruncationCondition.NEUMANN_AT_X)), 1
        )[0]
        high = lowest_eigenvalues(
            assemble_grid(geometry, N, GridSpec(h, x_max, TruncationCondition.DIRICHLET_AT_X)), 1
        )[0]
        assert low <= high
