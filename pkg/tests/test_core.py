"""Tests for the shared round-trip / log-det / quadrature machinery."""

import numpy as np
import pytest
from scipy.integrate import quad

from casimir import blockmat, core
from casimir.blockmat import random_contraction
from casimir.core import (
    EnergyResult,
    QuadratureSpec,
    RoundTripAssembly,
    integrate_semiinfinite,
    log_det_one_minus,
    round_trip_matrix,
)
from casimir.errors import BranchRisk, ChannelMismatch, NotConverged


class TestRoundTripMatrix:
    def test_zero_factor(self):
        z = np.zeros((2, 2))
        a = RoundTripAssembly(z, np.eye(2), np.eye(2), np.eye(2))
        assert np.all(round_trip_matrix(a) == 0)

    def test_scalar_product(self):
        a = RoundTripAssembly(
            np.array([[0.5]]), np.array([[0.8j]]), np.array([[0.5]]), np.array([[0.8j]])
        )
        assert round_trip_matrix(a)[0, 0] == pytest.approx(0.25 * (0.8j) ** 2)

    @pytest.mark.parametrize("seed", range(6))
    def test_norm_submultiplicative(self, seed):
        mats = [random_contraction(4, seed + 10 * k) for k in range(4)]
        a = RoundTripAssembly(*mats)
        m = round_trip_matrix(a)
        bound = np.prod([np.linalg.svd(x, compute_uv=False)[0] for x in mats])
        assert np.linalg.svd(m, compute_uv=False)[0] <= bound * (1 + 1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ChannelMismatch):
            RoundTripAssembly(np.eye(2), np.eye(3), np.eye(2), np.eye(2))


class TestLogDetOneMinus:
    def test_zero(self):
        assert log_det_one_minus(np.zeros((3, 3))) == 0

    def test_scalar_half(self):
        val = log_det_one_minus(np.array([[0.5]]))
        assert val.real == pytest.approx(np.log(0.5), abs=1e-15)
        assert val.imag == 0

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_factorization_oracle(self, seed):
        m = random_contraction(6, seed)
        via_eig = log_det_one_minus(m)
        via_lu = blockmat.logdet(np.eye(6) - m)
        assert abs(via_eig - via_lu) < 1e-10

    def test_branch_risk(self):
        with pytest.raises(BranchRisk):
            log_det_one_minus(np.eye(2))

    def test_real_nonpositive_for_psd_products(self):
        # products similar to Hermitian PSD contractions, as on the
        # imaginary axis with identical mirrors
        rng = np.random.default_rng(3)
        for _ in range(10):
            g = rng.standard_normal((4, 4))
            h = g @ g.T
            h = 0.9 * h / np.max(np.abs(np.linalg.eigvalsh(h)))
            val = log_det_one_minus(h.astype(complex))
            assert abs(val.imag) < 1e-12
            assert val.real <= 0


class TestIntegrateSemiInfinite:
    def test_exponential(self):
        value, err, _ = integrate_semiinfinite(
            lambda x: np.exp(-x), QuadratureSpec(base_order=32, tol=1e-12), scale=1.0
        )
        assert value == pytest.approx(1.0, abs=1e-10)

    def test_x_exponential(self):
        value, _, _ = integrate_semiinfinite(
            lambda x: x * np.exp(-x), QuadratureSpec(base_order=32, tol=1e-12)
        )
        assert value == pytest.approx(1.0, abs=1e-10)

    def test_lifshitz_like_slice_vs_adaptive_oracle(self):
        # single-q slice of a two-mirror integrand on the imaginary axis
        L, c, r2 = 1e-6, 299792458.0, 0.8

        def f(xi):
            return np.log1p(-r2 * np.exp(-2 * xi * L / c))

        value, _, _ = integrate_semiinfinite(
            f, QuadratureSpec(base_order=64, tol=1e-10), scale=c / L
        )
        # independent adaptive oracle; the tail beyond 60 c/(2L) is below
        # r2 * exp(-60) * c/(2L) ~ 1e-12 relative
        oracle, _ = quad(f, 0, 30 * c / L, epsabs=1e-3, epsrel=1e-12, limit=400)
        assert value == pytest.approx(oracle, rel=1e-8)

    def test_error_estimate_shrinks(self):
        _, _, history = integrate_semiinfinite(
            lambda x: np.exp(-(x**2)), QuadratureSpec(base_order=16, tol=1e-13, max_doublings=5)
        )
        vals = [v for _, v in history]
        diffs = [abs(b - a) for a, b in zip(vals, vals[1:])]
        assert all(d2 <= d1 for d1, d2 in zip(diffs, diffs[1:]))

    def test_not_converged_carries_best(self):
        spec = QuadratureSpec(base_order=8, max_doublings=0, tol=1e-14)
        with pytest.raises(NotConverged) as err:
            integrate_semiinfinite(lambda x: np.exp(-x), spec)
        assert err.value.result is not None

    def test_quadspec_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(base_order=4)
        with pytest.raises(ValueError):
            QuadratureSpec(tol=0.0)


class TestEnergyResult:
    def test_error_nonnegative(self):
        with pytest.raises(ValueError):
            EnergyResult(value=-1.0, error_estimate=-1e-3)

    def test_constants(self):
        assert core.HBAR == 1.054571817e-34
        assert core.C_LIGHT == 299792458.0
