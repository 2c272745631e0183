import numpy as np
import pytest

from simulcomp.contrasts import (ContrastMatrix, dunnett_contrasts, joint_matrix, pooled_contrasts,
                                 stratified_block_matrix, stratum_size_weights)
from simulcomp.exceptions import ValidationError

DOSES = ["0", "62.5", "125", "250", "500", "1000"]

# transcription of the joint contrast listing (rows f, m, pooled)
LISTING = """
-1.0  1.0 0.0 0.0 0.0  0.0  0.0 0.0 0.0 0.0 0.0 0.0
-1.0  0.0 1.0 0.0 0.0  0.0  0.0 0.0 0.0 0.0 0.0 0.0
-1.0  0.0 0.0 1.0 0.0  0.0  0.0 0.0 0.0 0.0 0.0 0.0
-1.0  0.0 0.0 0.0 1.0  0.0  0.0 0.0 0.0 0.0 0.0 0.0
-1.0  0.0 0.0 0.0 0.0  1.0  0.0 0.0 0.0 0.0 0.0 0.0
 0.0  0.0 0.0 0.0 0.0  0.0 -1.0 1.0 0.0 0.0 0.0 0.0
 0.0  0.0 0.0 0.0 0.0  0.0 -1.0 0.0 1.0 0.0 0.0 0.0
 0.0  0.0 0.0 0.0 0.0  0.0 -1.0 0.0 0.0 1.0 0.0 0.0
 0.0  0.0 0.0 0.0 0.0  0.0 -1.0 0.0 0.0 0.0 1.0 0.0
 0.0  0.0 0.0 0.0 0.0  0.0 -1.0 0.0 0.0 0.0 0.0 1.0
-0.5  0.5 0.0 0.0 0.0  0.0 -0.5 0.5 0.0 0.0 0.0 0.0
-0.5  0.0 0.5 0.0 0.0  0.0 -0.5 0.0 0.5 0.0 0.0 0.0
-0.5  0.0 0.0 0.5 0.0  0.0 -0.5 0.0 0.0 0.5 0.0 0.0
-0.5  0.0 0.0 0.0 0.5  0.0 -0.5 0.0 0.0 0.0 0.5 0.0
-0.5  0.0 0.0 0.0 0.0  0.5 -0.5 0.0 0.0 0.0 0.0 0.5
"""
LISTING_K = np.array([[float(v) for v in line.split()] for line in LISTING.strip().splitlines()])


def test_dunnett_basic():
    du = dunnett_contrasts(DOSES, "0")
    assert du.shape == (5, 6)
    assert du.coefficients[0].tolist() == [-1, 1, 0, 0, 0, 0]
    assert du.row_labels[0] == "62.5 - 0"
    assert du.col_labels == tuple(DOSES)


def test_dunnett_two_levels():
    assert dunnett_contrasts(["A", "B"], "A").coefficients.tolist() == [[-1, 1]]


def test_dunnett_non_first_control():
    du = dunnett_contrasts(["A", "B", "C"], control="B")
    assert du.coefficients.tolist() == [[1, -1, 0], [0, -1, 1]]
    assert du.row_labels == ("A - B", "C - B")


def test_dunnett_errors():
    with pytest.raises(ValidationError):
        dunnett_contrasts(["A", "B"], "Z")
    with pytest.raises(ValidationError):
        dunnett_contrasts(["A"])


def test_stratified_blocks_match_listing():
    K = stratified_block_matrix(dunnett_contrasts(DOSES), ["f", "m"])
    assert K.shape == (10, 12)
    np.testing.assert_array_equal(K.coefficients, LISTING_K[:10])
    assert K.row_labels[0] == "f:62.5 - 0" and K.row_labels[5] == "m:62.5 - 0"


def test_stratified_small():
    K = stratified_block_matrix(dunnett_contrasts(["A", "B"]), ["f", "m"])
    assert K.coefficients.tolist() == [[-1, 1, 0, 0], [0, 0, -1, 1]]


def test_block_supports_disjoint():
    K = stratified_block_matrix(dunnett_contrasts(DOSES), ["f", "m"]).coefficients
    for f_row in K[:5]:
        for m_row in K[5:]:
            assert not np.any((f_row != 0) & (m_row != 0))


def test_pooled_uniform():
    P = pooled_contrasts(dunnett_contrasts(DOSES), 2)
    np.testing.assert_array_equal(P.coefficients, LISTING_K[10:])
    assert P.row_labels == ("p:62.5-0", "p:125-0", "p:250-0", "p:500-0", "p:1000-0")


def test_pooled_degenerate_weights():
    du = dunnett_contrasts(DOSES)
    P = pooled_contrasts(du, 2, weights=(1, 0))
    S = stratified_block_matrix(du, ["f", "m"])
    np.testing.assert_array_equal(P.coefficients, S.coefficients[:5])


def test_pooled_weights_must_sum_to_one():
    with pytest.raises(ValidationError):
        pooled_contrasts(dunnett_contrasts(DOSES), 2, weights=(0.5, 0.6))


@pytest.mark.parametrize("w", [(0.5, 0.5), (0.3, 0.7), (1, 0)])
def test_pooled_is_weighted_sum_of_strata(w):
    du = dunnett_contrasts(DOSES)
    P = pooled_contrasts(du, 2, weights=w).coefficients
    S = stratified_block_matrix(du, ["f", "m"]).coefficients
    np.testing.assert_allclose(P, w[0] * S[:5] + w[1] * S[5:], atol=1e-15)


def test_joint_golden():
    K = joint_matrix(dunnett_contrasts(DOSES), ["f", "m"])
    assert K.shape == (15, 12)
    np.testing.assert_array_equal(K.coefficients, LISTING_K)
    assert K.col_labels == tuple(DOSES) * 2


def test_joint_text_listing():
    text = joint_matrix(dunnett_contrasts(DOSES), ["f", "m"]).to_text()
    lines = text.splitlines()
    assert lines[0].split() == DOSES * 2
    assert lines[1].split() == ["f:62.5", "-", "0"] + [f"{v:.1f}" for v in LISTING_K[0] + 0.0]
    assert lines[-1].split() == ["p:1000-0"] + [f"{v:.1f}" for v in LISTING_K[-1] + 0.0]
    assert "-0.0" not in text


@pytest.mark.parametrize("k", range(1, 11))
def test_joint_dimensions(k):
    levels = [str(i) for i in range(k + 1)]
    K = joint_matrix(dunnett_contrasts(levels), ["f", "m"])
    assert K.shape == (3 * k, 2 * (k + 1))
    assert np.all(np.abs(K.coefficients.sum(axis=1)) < 1e-15)
    du = dunnett_contrasts(levels).coefficients
    assert np.all((du == -1).sum(axis=1) == 1) and np.all((du == 1).sum(axis=1) == 1)


def test_invariants_enforced():
    with pytest.raises(ValidationError, match="sum to zero"):
        ContrastMatrix(np.array([[1.0, 0.0]]), ["a"], ["x", "y"])
    with pytest.raises(ValidationError, match="all-zero"):
        ContrastMatrix(np.array([[0.0, 0.0]]), ["a"], ["x", "y"])


def test_cell_size_weights():
    w = stratum_size_weights(np.array([2, 2, 2, 4, 4, 4]), 2)
    np.testing.assert_allclose(w, [1 / 3, 2 / 3])
