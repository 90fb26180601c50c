import numpy as np
import pytest

from mrline import hankel

from conftest import random_row


def dense_hankel(e, cfg):
    """Loop-built cascaded Hankel matrix, independent of the library path."""
    h = np.zeros((cfg.g, cfg.bj), dtype=complex)
    for j in range(cfg.j):
        for p in range(cfg.g):
            for q in range(cfg.b):
                h[p, j * cfg.b + q] = e[p + q, j]
    return h


def dense_toeplitz(q, cfg):
    """Loop-built cascaded Toeplitz matrix acting on coil-stacked vec(e)."""
    t = np.zeros((cfg.g, cfg.n * cfg.j), dtype=complex)
    for j in range(cfg.j):
        for p in range(cfg.g):
            for tap in range(cfg.b):
                t[p, j * cfg.n + p + tap] += q[j * cfg.b + tap]
    return t


def dense_filterbank(qmat, cfg):
    """Vertical cascade of dense Toeplitz blocks, one per column of qmat."""
    return np.vstack([dense_toeplitz(qmat[:, c], cfg) for c in range(qmat.shape[1])])


def vec(e):
    return e.ravel(order="F")


def unvec(v, cfg):
    return v.reshape(cfg.n, cfg.j, order="F")


class TestLift:
    def test_single_coil_example(self):
        cfg = hankel.HankelConfig(n=4, j=1, b=2)
        e = np.array([[1.0], [2.0], [3.0], [4.0]], dtype=complex)
        np.testing.assert_array_equal(hankel.hankel_lift(e, cfg), [[1, 2], [2, 3], [3, 4]])

    def test_two_coil_cascade(self):
        cfg = hankel.HankelConfig(n=4, j=2, b=2)
        e = np.array([[1, 5], [2, 6], [3, 7], [4, 8]], dtype=complex)
        np.testing.assert_array_equal(
            hankel.hankel_lift(e, cfg), [[1, 2, 5, 6], [2, 3, 6, 7], [3, 4, 7, 8]]
        )

    def test_zero_row(self):
        cfg = hankel.HankelConfig(n=6, j=2, b=3)
        assert not hankel.hankel_lift(np.zeros((6, 2), dtype=complex), cfg).any()

    def test_matches_dense_oracle(self, rng):
        cfg = hankel.HankelConfig(n=9, j=3, b=4)
        e = random_row(rng, 9, 3)
        np.testing.assert_array_equal(hankel.hankel_lift(e, cfg), dense_hankel(e, cfg))

    def test_dimension_mismatch(self, rng):
        cfg = hankel.HankelConfig(n=9, j=3, b=4)
        with pytest.raises(ValueError):
            hankel.hankel_lift(random_row(rng, 8, 3), cfg)


class TestAdjoint:
    def test_all_ones_counts(self):
        cfg = hankel.HankelConfig(n=4, j=1, b=2)
        out = hankel.hankel_adjoint(np.ones((3, 2), dtype=complex), cfg)
        np.testing.assert_array_equal(out[:, 0], [1, 2, 2, 1])

    def test_adjoint_identity(self, rng):
        cfg = hankel.HankelConfig(n=10, j=2, b=4)
        e = random_row(rng, 10, 2)
        y = rng.standard_normal((cfg.g, cfg.bj)) + 1j * rng.standard_normal((cfg.g, cfg.bj))
        lhs = np.vdot(y, hankel.hankel_lift(e, cfg))
        rhs = np.vdot(hankel.hankel_adjoint(y, cfg), e)
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs)

    def test_adjoint_of_lift_is_count_weighting(self, rng):
        cfg = hankel.HankelConfig(n=11, j=2, b=4)
        e = random_row(rng, 11, 2)
        out = hankel.hankel_adjoint(hankel.hankel_lift(e, cfg), cfg)
        counts = np.zeros(cfg.n)
        for p in range(cfg.g):
            for q in range(cfg.b):
                counts[p + q] += 1
        np.testing.assert_allclose(out, counts[:, None] * e, rtol=1e-13)


class TestToeplitz:
    def test_direct_expansion(self):
        cfg = hankel.HankelConfig(n=4, j=1, b=2)
        e = np.array([[1.0], [2.0], [3.0], [4.0]], dtype=complex)
        np.testing.assert_allclose(
            hankel.toeplitz_apply(np.array([1.0, 1.0], dtype=complex), e, cfg), [3, 5, 7]
        )

    def test_unit_filter_slices_window(self, rng):
        cfg = hankel.HankelConfig(n=8, j=1, b=3)
        e = random_row(rng, 8, 1)
        q = np.zeros(3, dtype=complex)
        q[0] = 1.0
        np.testing.assert_allclose(hankel.toeplitz_apply(q, e, cfg), e[: cfg.g, 0], atol=1e-15)

    def test_commutes_with_lift(self, rng):
        cfg = hankel.HankelConfig(n=9, j=2, b=3)
        e = random_row(rng, 9, 2)
        q = rng.standard_normal(cfg.bj) + 1j * rng.standard_normal(cfg.bj)
        via_matrix = dense_hankel(e, cfg) @ q
        np.testing.assert_allclose(hankel.toeplitz_apply(q, e, cfg), via_matrix, rtol=1e-12)


class TestGram:
    def test_single_entry(self):
        cfg = hankel.HankelConfig(n=4, j=1, b=2)
        e = np.array([[1.0], [0.0], [0.0], [0.0]], dtype=complex)
        np.testing.assert_array_equal(hankel.gram(e, cfg), [[1, 0], [0, 0]])

    def test_zero(self):
        cfg = hankel.HankelConfig(n=6, j=2, b=2)
        assert not hankel.gram(np.zeros((6, 2), dtype=complex), cfg).any()

    def test_matches_dense_product(self, rng):
        cfg = hankel.HankelConfig(n=9, j=3, b=4)
        e = random_row(rng, 9, 3)
        h = dense_hankel(e, cfg)
        np.testing.assert_allclose(hankel.gram(e, cfg), h.conj().T @ h, rtol=1e-12)


class TestWeightUpdate:
    def test_diagonal_example(self):
        w = hankel.weight_update(np.diag([3.0, 0.0]).astype(complex), 1.0)
        np.testing.assert_allclose(w, np.diag([0.5, 1.0]), atol=1e-14)

    def test_zero_matrix(self):
        w = hankel.weight_update(np.zeros((3, 3), dtype=complex), 4.0)
        np.testing.assert_allclose(w, 0.5 * np.eye(3), atol=1e-14)

    def test_inverse_residual(self, rng):
        x = rng.standard_normal((30, 24)) + 1j * rng.standard_normal((30, 24))
        a = x.conj().T @ x
        eps = 1e-3 * float(np.linalg.eigvalsh(a)[-1])
        w = hankel.weight_update(a, eps)
        resid = w @ (a + eps * np.eye(24)) @ w - np.eye(24)
        assert np.linalg.norm(resid) / np.linalg.norm(np.eye(24)) <= 1e-8

    def test_hermitian_positive_definite(self, rng):
        x = rng.standard_normal((10, 8)) + 1j * rng.standard_normal((10, 8))
        a = x.conj().T @ x
        w = hankel.weight_update(a, 0.5)
        assert np.linalg.norm(w - w.conj().T) <= 1e-12 * np.linalg.norm(w)
        assert np.linalg.eigvalsh(w)[0] > 0

    def test_spectral_norm_bound(self, rng):
        x = rng.standard_normal((12, 8)) + 1j * rng.standard_normal((12, 8))
        a = x.conj().T @ x
        eps = 0.3
        w = hankel.weight_update(a, eps)
        assert np.linalg.norm(w, 2) <= eps**-0.5 * (1 + 1e-12)

    def test_rejects_non_hermitian(self, rng):
        a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        with pytest.raises(ValueError, match="Hermitian"):
            hankel.weight_update(a, 1.0)

    def test_rejects_bad_eps(self):
        with pytest.raises(ValueError):
            hankel.weight_update(np.eye(3, dtype=complex), 0.0)


class TestLowrankGrad:
    def test_identity_weight_single_entry(self):
        cfg = hankel.HankelConfig(n=4, j=1, b=2)
        e = np.array([[1.0], [0.0], [0.0], [0.0]], dtype=complex)
        out = hankel.lowrank_grad(e, np.eye(2, dtype=complex), cfg)
        np.testing.assert_array_equal(out, e)

    def test_zero_weight(self, rng):
        cfg = hankel.HankelConfig(n=6, j=2, b=3)
        e = random_row(rng, 6, 2)
        assert not hankel.lowrank_grad(e, np.zeros((6, 6), dtype=complex), cfg).any()

    def test_matches_dense_filterbank_normal_equations(self, rng):
        cfg = hankel.HankelConfig(n=9, j=2, b=3)
        e = random_row(rng, 9, 2)
        x = rng.standard_normal((8, cfg.bj)) + 1j * rng.standard_normal((8, cfg.bj))
        w = x.conj().T @ x / 8
        q = hankel.weight_sqrt(w)
        pq = dense_filterbank(q, cfg)
        expected = unvec(pq.conj().T @ (pq @ vec(e)), cfg)
        got = hankel.lowrank_grad(e, w, cfg)
        assert np.linalg.norm(got - expected) <= 1e-10 * np.linalg.norm(expected)

    def test_linear_and_self_adjoint(self, rng):
        cfg = hankel.HankelConfig(n=10, j=2, b=4)
        x = random_row(rng, 10, 2)
        y = random_row(rng, 10, 2)
        m = rng.standard_normal((12, cfg.bj)) + 1j * rng.standard_normal((12, cfg.bj))
        w = m.conj().T @ m
        ax = hankel.lowrank_grad(x, w, cfg)
        ay = hankel.lowrank_grad(y, w, cfg)
        two = hankel.lowrank_grad(2.0 * x + 1j * y, w, cfg)
        np.testing.assert_allclose(two, 2.0 * ax + 1j * ay, rtol=1e-11, atol=1e-12)
        lhs = np.vdot(y, ax)
        rhs = np.vdot(ay, x)
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1e-30)


class TestFilterbankIdentities:
    """Structural identities between the Hankel and Toeplitz pictures."""

    @pytest.mark.parametrize("n,j,b,seed", [(8, 1, 3, 0), (12, 2, 4, 1), (9, 3, 3, 2), (16, 4, 5, 3)])
    def test_hankel_times_filter_is_convolution(self, n, j, b, seed):
        rng = np.random.default_rng(seed)
        cfg = hankel.HankelConfig(n=n, j=j, b=b)
        e = random_row(rng, n, j)
        q = rng.standard_normal(cfg.bj) + 1j * rng.standard_normal(cfg.bj)
        lhs = hankel.hankel_lift(e, cfg) @ q
        rhs = hankel.toeplitz_apply(q, e, cfg)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(lhs)

    @pytest.mark.parametrize("n,j,b,seed", [(8, 2, 3, 0), (12, 2, 4, 1), (10, 3, 3, 2)])
    def test_frobenius_equivalence(self, n, j, b, seed):
        rng = np.random.default_rng(seed)
        cfg = hankel.HankelConfig(n=n, j=j, b=b)
        e = random_row(rng, n, j)
        x = rng.standard_normal((cfg.bj, cfg.bj)) + 1j * rng.standard_normal((cfg.bj, cfg.bj))
        w = x.conj().T @ x
        q = hankel.weight_sqrt(w)
        lhs = np.linalg.norm(hankel.hankel_lift(e, cfg) @ q) ** 2
        rhs = np.linalg.norm(dense_filterbank(q, cfg) @ vec(e)) ** 2
        assert abs(lhs - rhs) <= 1e-10 * lhs


class TestConfig:
    def test_rejects_bad_filter_length(self):
        with pytest.raises(ValueError):
            hankel.HankelConfig(n=8, j=1, b=8)  # b > (n+1)/2
        with pytest.raises(ValueError):
            hankel.HankelConfig(n=8, j=1, b=0)

    def test_eps_schedule(self):
        cfg = hankel.HankelConfig(n=16, j=1, b=4, eps0=1e-2, eps_decay=0.5, eps_min=1e-3)
        assert cfg.eps_at(1, 2.0) == pytest.approx(1e-2 * 0.5 * 2.0)
        assert cfg.eps_at(50, 2.0) == pytest.approx(1e-3 * 2.0)
