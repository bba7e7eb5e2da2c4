import numpy as np
import pytest

from ssbc import FdSketch, NumericalError, ParameterError, svd_thin
from ssbc.evaluation import spectral_norm


def test_new_sketch_state():
    sk = FdSketch(4, 3)
    assert sk.buffer.shape == (4, 3)
    assert np.all(sk.buffer == 0)
    assert sk.next_zero_row == 0
    assert sk.rows_seen == 0


def test_new_sketch_rejects_bad_params():
    with pytest.raises(ParameterError):
        FdSketch(1, 5)
    with pytest.raises(ParameterError):
        FdSketch(4, 0)


def test_insert_dimension_mismatch():
    sk = FdSketch(3, 2)
    with pytest.raises(ParameterError):
        sk.insert(np.ones(3))


def test_insert_without_fill_does_not_shrink():
    sk = FdSketch(2, 2)
    sk.insert([1.0, 0.0])
    assert sk.shrink_count == 0
    assert np.array_equal(sk.buffer, [[1.0, 0.0], [0.0, 0.0]])
    assert sk.next_zero_row == 1


def test_identity_fill_shrinks_to_zero():
    # singular values of [[1,0],[0,1]] are (1,1); subtracting the second
    # squared value annihilates the whole buffer
    sk = FdSketch(2, 2)
    sk.insert([1.0, 0.0])
    sk.insert([0.0, 1.0])
    assert sk.shrink_count == 1
    assert np.all(sk.buffer == 0)
    assert sk.next_zero_row == 0


def test_zero_row_insert_consumes_slot_only():
    sk = FdSketch(3, 2)
    sk.insert([2.0, 1.0])
    before = sk.buffer.T @ sk.buffer
    sk.insert([0.0, 0.0])
    assert sk.rows_seen == 2
    assert sk.next_zero_row == 2
    assert np.array_equal(sk.buffer.T @ sk.buffer, before)


def test_shrink_orthogonal_rows():
    # rows (3,0) and (0,1): s = (3,1), shrunk to (sqrt(8), 0)
    sk = FdSketch(2, 2)
    sk.insert([3.0, 0.0])
    sk.insert([0.0, 1.0])
    gram = sk.buffer.T @ sk.buffer
    assert np.allclose(gram, [[8.0, 0.0], [0.0, 0.0]], atol=1e-12)
    assert np.all(sk.buffer[1] == 0)
    assert sk.next_zero_row == 1


def test_every_structurally_zero_row_is_freed():
    # three equal singular values tied with the smallest: the shrink must
    # free all of them at once, not just the last row
    sk = FdSketch(3, 3)
    sk.insert([1.0, 0.0, 0.0])
    sk.insert([0.0, 1.0, 0.0])
    sk.insert([0.0, 0.0, 1.0])
    assert sk.next_zero_row == 0
    assert np.all(sk.buffer == 0)


def test_shrink_leaves_exact_zero_rows_on_correlated_stream():
    # near-tied singular values once bit a variant of this code that squared
    # the cutoff singular value separately from the vector of squares; the
    # last shrunk value then came out a few ulp above zero and the buffer
    # was left with no free row
    rng = np.random.default_rng(42)
    rows = rng.standard_normal((120, 8)) @ rng.standard_normal((8, 30))
    rows += 1e-9 * rng.standard_normal(rows.shape)
    sk = FdSketch(10, 30)
    for row in rows:
        sk.insert(row)
        assert sk.next_zero_row < sk.ell
        assert np.all(sk.buffer[sk.next_zero_row:] == 0)


def test_tall_buffer_shrink_is_lossless():
    # ell > m: the ell-th singular value is structurally zero, so a shrink
    # changes nothing about the gram matrix
    rng = np.random.default_rng(3)
    rows = rng.standard_normal((6, 3))
    sk = FdSketch(6, 3)
    for row in rows[:-1]:
        sk.insert(row)
    before = rows.T @ rows
    sk.insert(rows[-1])
    assert sk.shrink_count == 1
    assert sk.next_zero_row <= 3
    assert np.allclose(sk.buffer.T @ sk.buffer, before, atol=1e-10)


def test_fd_guarantee_and_psd_order():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((60, 20))
    fro2 = np.sum(a * a)
    for ell in (5, 10):
        sk = FdSketch(ell, 20)
        for row in a:
            sk.insert(row)
        diff = a.T @ a - sk.buffer.T @ sk.buffer
        assert spectral_norm(diff) <= 2.0 * fro2 / ell
        for _ in range(30):
            x = rng.standard_normal(20)
            x /= np.linalg.norm(x)
            gap = x @ diff @ x
            assert gap >= -1e-9


def test_shrink_weakly_decreases_singular_values():
    rng = np.random.default_rng(5)
    rows = rng.standard_normal((4, 6))
    sk = FdSketch(4, 6)
    for row in rows[:-1]:
        sk.insert(row)
    full = np.vstack([sk.buffer[:3], rows[-1]])
    s_before = np.linalg.svd(full, compute_uv=False)
    sk.insert(rows[-1])
    s_after = np.linalg.svd(sk.buffer, compute_uv=False)
    assert np.all(s_after <= s_before + 1e-12)


def test_insert_order_robustness():
    rng = np.random.default_rng(17)
    rows = rng.standard_normal((40, 12))
    bound = 2.0 * np.sum(rows * rows) / 6
    gram = rows.T @ rows
    for trial in range(5):
        perm = rng.permutation(40)
        sk = FdSketch(6, 12)
        for i in perm:
            sk.insert(rows[i])
        err = spectral_norm(gram - sk.buffer.T @ sk.buffer)
        assert err <= bound


def test_basis_diagonal_case():
    sk = FdSketch(4, 2)
    sk.insert([2.0, 0.0])
    sk.insert([0.0, 1.0])
    b = sk.basis(1)
    assert b.shape == (2, 1)
    assert np.allclose(np.abs(b[:, 0]), [1.0, 0.0], atol=1e-12)


def test_basis_full_width_is_orthonormal():
    rng = np.random.default_rng(23)
    sk = FdSketch(3, 5)
    for row in rng.standard_normal((2, 5)):
        sk.insert(row)
    v = sk.basis(3)
    assert np.allclose(v.T @ v, np.eye(3), atol=1e-8)


def test_basis_matches_dense_svd():
    rng = np.random.default_rng(29)
    rows = rng.standard_normal((5, 4))
    sk = FdSketch(6, 4)
    for row in rows:
        sk.insert(row)
    v = sk.basis(2)
    _, _, vt = np.linalg.svd(rows)
    for j in range(2):
        assert abs(abs(v[:, j] @ vt[j]) - 1.0) < 1e-9


def test_basis_errors():
    sk = FdSketch(3, 5)
    with pytest.raises(NumericalError):
        sk.basis(1)
    sk.insert(np.ones(5))
    with pytest.raises(ParameterError):
        sk.basis(4)
    small = FdSketch(4, 2)
    small.insert([1.0, 2.0])
    with pytest.raises(ParameterError):
        small.basis(3)


def test_svd_thin_identity_and_diagonal():
    tri = svd_thin(np.eye(3))
    assert np.allclose(tri.s, [1.0, 1.0, 1.0])
    tri = svd_thin(np.diag([5.0, 3.0]))
    assert np.allclose(tri.s, [5.0, 3.0])
    assert np.allclose(np.abs(tri.u), np.eye(2), atol=1e-12)
    assert np.allclose(np.abs(tri.v), np.eye(2), atol=1e-12)


def test_svd_thin_reconstructs_wide_matrix():
    rng = np.random.default_rng(31)
    mat = rng.standard_normal((5, 8))
    tri = svd_thin(mat)
    rebuilt = tri.u @ np.diag(tri.s) @ tri.v.T
    rel = np.linalg.norm(rebuilt - mat) / np.linalg.norm(mat)
    assert rel < 1e-6
    assert np.all(np.diff(tri.s) <= 0)
    assert np.all(tri.s >= 0)
    assert np.allclose(tri.v.T @ tri.v, np.eye(5), atol=1e-8)


def test_svd_thin_rejects_tall_input():
    with pytest.raises(ParameterError):
        svd_thin(np.ones((4, 2)))
