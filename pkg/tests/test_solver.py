import math

import numpy as np
import pytest

from tgv import grid_ops as go
from tgv.errors import ArgumentError
from tgv.evaluate import TgvParams
from tgv.grid_ops import Image
from tgv.solver import (ForwardOp, SolverConfig, add_gaussian_noise, default_alphas,
                        estimate_operator_norm, restore, restore_objective, synthetic_ramp)


def small_noisy(seed=3, size=16):
    clean = synthetic_ramp(size)
    return clean, add_gaussian_noise(clean, 0.05, seed)


class TestForwardOp:
    @pytest.mark.parametrize("ks", [3, 5])
    def test_adjoint(self, ks, rng):
        shape = (9, 11)
        for _ in range(20):
            K = ForwardOp.convolution(rng.standard_normal((ks, ks)))
            x, y = rng.standard_normal((2, 99))
            lhs = np.vdot(K.apply(x, shape), y)
            rhs = np.vdot(x, K.adjoint(y, shape))
            assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)

    def test_matches_dense_circulant(self, rng):
        shape = (5, 6)
        kern = rng.standard_normal((3, 3))
        K = ForwardOp.convolution(kern)
        dense = np.zeros((30, 30))
        for r, c in np.ndindex(*shape):
            for a, b in np.ndindex(3, 3):
                # (K u)(r, c) = sum k[a, b] u(r - (a-1), c - (b-1))
                src = ((r - (a - 1)) % 5) * 6 + (c - (b - 1)) % 6
                dense[r * 6 + c, src] += kern[a, b]
        x = rng.standard_normal(30)
        np.testing.assert_allclose(K.apply(x, shape), dense @ x, atol=1e-13)
        np.testing.assert_allclose(K.adjoint(x, shape), dense.T @ x, atol=1e-13)

    def test_identity(self, rng):
        x = rng.standard_normal(12)
        K = ForwardOp.identity()
        np.testing.assert_array_equal(K.apply(x, (3, 4)), x)
        np.testing.assert_array_equal(K.adjoint(x, (3, 4)), x)

    def test_validation(self):
        with pytest.raises(ArgumentError):
            ForwardOp.convolution(np.ones((2, 3)))
        with pytest.raises(ArgumentError):
            ForwardOp.convolution([[np.nan]])
        with pytest.raises(ArgumentError):
            ForwardOp("fourier")
        with pytest.raises(ArgumentError):
            ForwardOp("convolution")


class TestOperatorNorm:
    def test_identity(self, rng):
        x0 = rng.standard_normal(50)
        assert estimate_operator_norm(lambda x: x, lambda x: x, x0) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("W", [7, 8, 9, 10])
    def test_dx_on_a_row(self, W, rng):
        shape = (1, W)
        est = estimate_operator_norm(lambda x: go.dx(x, shape), lambda y: go.dx_adjoint(y, shape),
                                     rng.standard_normal(W))
        assert est == pytest.approx(2 * math.sin(math.pi * (W // 2) / W), rel=1e-6)

    def test_stacked_gradient_vs_svd(self, rng):
        shape = (4, 4)
        G = np.vstack([go.gradient_matrix(shape, "x"), go.gradient_matrix(shape, "y")])
        est = estimate_operator_norm(
            lambda x: np.concatenate([go.dx(x, shape), go.dy(x, shape)]),
            lambda y: go.dx_adjoint(y[:16], shape) + go.dy_adjoint(y[16:], shape),
            rng.standard_normal(16))
        assert abs(est - np.linalg.norm(G, 2)) <= 1e-5

    def test_zero_operator(self, rng):
        assert estimate_operator_norm(np.zeros_like, np.zeros_like, rng.standard_normal(5)) == 0.0


class TestNoise:
    def test_zero_sigma(self):
        f = synthetic_ramp(16)
        np.testing.assert_array_equal(add_gaussian_noise(f, 0.0, 1).data, f.data)

    def test_deterministic(self):
        f = synthetic_ramp(16)
        np.testing.assert_array_equal(add_gaussian_noise(f, 0.1, 5).data,
                                      add_gaussian_noise(f, 0.1, 5).data)
        assert not np.array_equal(add_gaussian_noise(f, 0.1, 5).data,
                                  add_gaussian_noise(f, 0.1, 6).data)

    def test_empirical_std(self):
        f = Image.from_array(np.zeros((128, 128)))
        z = add_gaussian_noise(f, 0.05, 11).data
        assert abs(z.std() - 0.05) <= 0.05 * 0.05

    def test_negative_sigma(self):
        with pytest.raises(ArgumentError):
            add_gaussian_noise(synthetic_ramp(8), -1.0, 0)


def test_default_alphas():
    assert default_alphas(1) == (1.0,)
    assert default_alphas(2) == (2.0, 1.0)
    assert default_alphas(3, 0.5) == (2.0, 1.0, 0.5)
    with pytest.raises(ArgumentError):
        default_alphas(0)


def test_synthetic_ramp_range():
    img = synthetic_ramp(64)
    assert img.shape == (64, 64)
    assert 0.0 <= img.data.min() and img.data.max() <= 1.0


def test_config_validation():
    for bad in (dict(max_iters=0), dict(tol=0.0), dict(data_weight=-1.0)):
        with pytest.raises(ArgumentError):
            SolverConfig(**bad)


class TestRestore:
    def test_huge_data_weight_returns_input(self):
        _, f = small_noisy()
        out = restore(f, ForwardOp.identity(), TgvParams(2, (2.0, 1.0)),
                      SolverConfig(data_weight=1e6, max_iters=2000))
        assert np.max(np.abs(out.image.data - f.data)) <= 1e-3

    def test_constant_input_is_fixed(self):
        f = Image.from_array(np.full((8, 8), 0.3))
        out = restore(f, ForwardOp.identity(), TgvParams(3, default_alphas(3)),
                      SolverConfig(data_weight=5.0))
        np.testing.assert_array_equal(out.image.data, f.data)
        assert out.converged and out.objective == 0.0

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_objective_decreases(self, n):
        _, f = small_noisy()
        params = TgvParams(n, default_alphas(n, 0.1))
        out = restore(f, ForwardOp.identity(), params, SolverConfig(data_weight=10.0))
        assert out.objective < out.initial_objective
        assert out.objective == pytest.approx(
            restore_objective(out.image, out.fields, f, ForwardOp.identity(), params, 10.0),
            rel=1e-12)
        assert out.objective_trace and out.objective_trace[-1][1] == out.objective
        assert out.image.shape == f.shape
        assert [p.shape[1] for p in out.fields] == list(range(2, n + 1))

    def test_deblur_improves_on_blurred_input(self):
        clean = synthetic_ramp(24)
        K = ForwardOp.convolution(np.full((3, 3), 1 / 9))
        blurred = clean.with_data(K.apply(clean.data, clean.shape))
        f = add_gaussian_noise(blurred, 0.01, 2)
        out = restore(f, K, TgvParams(2, default_alphas(2, 1.0)),
                      SolverConfig(data_weight=1000.0, max_iters=3000))
        err_in = np.mean((f.data - clean.data) ** 2)
        err_out = np.mean((out.image.data - clean.data) ** 2)
        assert err_out < err_in
        assert out.objective < out.initial_objective

    def test_against_conic_solver(self):
        cp = pytest.importorskip("cvxpy")
        _, f = small_noisy(size=8)
        lam, alphas = 10.0, (0.2, 0.1)
        h, w = f.shape
        Dx = go.gradient_matrix((h, w), "x")
        Dy = go.gradient_matrix((h, w), "y")
        u, p0, p1 = cp.Variable(64), cp.Variable(64), cp.Variable(64)
        first = cp.vstack([Dx @ u - p0, Dy @ u - p1])
        second = cp.vstack([Dx @ p0, (Dy @ p0 + Dx @ p1) / math.sqrt(2), Dy @ p1])
        cost = (lam / 2 * cp.sum_squares(u - f.data)
                + alphas[1] * cp.sum(cp.norm(first, 2, axis=0))
                + alphas[0] * cp.sum(cp.norm(second, 2, axis=0)))
        ref = cp.Problem(cp.Minimize(cost)).solve(solver="CLARABEL")
        out = restore(f, ForwardOp.identity(), TgvParams(2, alphas),
                      SolverConfig(data_weight=lam, tol=1e-10, max_iters=20000))
        assert abs(out.objective - ref) / ref <= 1e-4
        np.testing.assert_allclose(out.image.data, u.value, atol=1e-3)

    def test_rejects_bad_input(self):
        f = Image.from_array(np.array([[0.0, np.nan], [1.0, 1.0]]))
        with pytest.raises(ArgumentError):
            restore(f, ForwardOp.identity(), TgvParams(1, (1.0,)))
