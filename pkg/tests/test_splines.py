import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wienerlab import (
    Filter,
    PeriodizationError,
    TailBoundError,
    amalgam_norm,
    bspline_generator,
    bspline_samples,
    bspline_value,
    convolve,
    generator_from_json,
    green_power_generator,
    interpolate,
    kernel_to_csv,
    lagrange_kernel_fourier,
    lagrange_kernel_space,
    polynomial_weight,
    reproduction_check,
)

RATE = np.log(2 + np.sqrt(3))


class TestBsplineValue:
    def test_degree0_box(self):
        assert bspline_value(0, 0.0) == 1.0
        assert bspline_value(0, 0.49) == 1.0
        assert bspline_value(0, 0.51) == 0.0

    def test_degree1_hat(self):
        assert bspline_value(1, 0.0) == 1.0
        assert bspline_value(1, 0.5) == 0.5
        assert bspline_value(1, 1.0) == 0.0

    def test_cubic_integer_samples(self):
        assert bspline_value(3, 0.0) == pytest.approx(4.0 / 6, abs=0)
        assert bspline_value(3, 1.0) == pytest.approx(1.0 / 6, abs=0)
        assert bspline_value(3, 2.0) == 0.0

    def test_cubic_half_samples(self):
        # exact rationals: beta3(1/2) = 23/48, beta3(3/2) = 1/48
        assert bspline_value(3, 0.5) == 23.0 / 48
        assert bspline_value(3, 1.5) == 1.0 / 48

    @given(st.integers(0, 11), st.floats(-8, 8))
    @settings(max_examples=100, deadline=None)
    def test_nonnegative_and_supported(self, n, x):
        v = bspline_value(n, x)
        assert v >= 0.0
        if abs(x) >= (n + 1) / 2:
            assert v == 0.0

    @given(st.integers(0, 9), st.floats(-4, 4, allow_nan=False))
    @settings(max_examples=60, deadline=None)
    def test_partition_of_unity(self, n, x):
        total = sum(bspline_value(n, x - k) for k in range(-10, 11))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_symmetry(self):
        for n in range(12):
            for x in (0.3, 1.7, 2.2):
                assert bspline_value(n, x) == bspline_value(n, -x)

    def test_degree_out_of_range(self):
        with pytest.raises(ValueError):
            bspline_value(12, 0.0)


class TestBsplineSamples:
    def test_cubic_1d(self):
        f = bspline_samples(3)
        assert f.origin == (-1,)
        np.testing.assert_allclose(f.coeffs, np.array([1, 4, 1]) / 6.0)

    def test_tensor_2d(self):
        f = bspline_samples(3, d=2)
        line = np.array([1, 4, 1]) / 6.0
        np.testing.assert_allclose(f.coeffs, np.outer(line, line))

    def test_degree1_is_delta(self):
        f = bspline_samples(1)
        assert f.origin == (0,) and f.coeffs[0] == 1.0


@pytest.fixture(scope="module")
def kernel():
    return lagrange_kernel_space(bspline_generator(3), grid_step=1.0 / 16, K=20)


@pytest.fixture(scope="module")
def wide_kernel():
    return lagrange_kernel_space(bspline_generator(3), grid_step=1.0 / 16, K=47)


class TestLagrangeKernelSpace:
    def test_interpolating_at_integers(self, kernel):
        want = (np.arange(-20, 21) == 0).astype(float)
        np.testing.assert_allclose(kernel.integer_samples, want, atol=1e-9)

    def test_decay_rate(self, kernel):
        assert kernel.decay.model == "exponential"
        assert kernel.decay.rate == pytest.approx(RATE, abs=1e-3)

    def test_evaluate_on_and_off_grid(self, kernel):
        on = kernel.evaluate([0.0625])[0]
        assert on == kernel.samples[list(kernel.positions).index(0.0625)]
        off = kernel.evaluate([0.03])[0]
        lo, hi = kernel.evaluate([0.0])[0], on
        assert min(lo, hi) <= off <= max(lo, hi)
        assert kernel.evaluate([25.0])[0] == 0.0

    def test_even_symmetry(self, kernel):
        mid = len(kernel.samples) // 2
        np.testing.assert_allclose(kernel.samples, kernel.samples[::-1], atol=1e-12)
        assert kernel.samples[mid] == pytest.approx(1.0, abs=1e-12)


class TestLagrangeKernelFourier:
    def test_route_equivalence(self):
        ks = lagrange_kernel_space(bspline_generator(3), grid_step=1.0 / 16, K=20)
        kf = lagrange_kernel_fourier(
            green_power_generator(4), n_trunc=64, grid_step=1.0 / 16, K=20
        )
        assert np.max(np.abs(ks.samples - kf.samples)) <= 1e-6
        assert kf.decay.rate == pytest.approx(RATE, abs=1e-3)

    def test_bspline_symbol_route(self):
        # periodizing the B-spline symbol itself (no pole) gives the
        # same kernel as the space route
        ks = lagrange_kernel_space(bspline_generator(3), grid_step=1.0 / 16, K=20)
        kf = lagrange_kernel_fourier(
            bspline_generator(3), n_trunc=64, grid_step=1.0 / 16, K=20
        )
        assert np.max(np.abs(ks.samples - kf.samples)) <= 1e-6

    def test_interpolating_at_integers(self):
        kf = lagrange_kernel_fourier(green_power_generator(4), K=20)
        want = (np.arange(-20, 21) == 0).astype(float)
        np.testing.assert_allclose(kf.integer_samples, want, atol=1e-6)

    def test_unconverged_periodization_raises(self):
        with pytest.raises(PeriodizationError):
            lagrange_kernel_fourier(green_power_generator(4), n_trunc=1, K=8)

    def test_generator_validation(self):
        with pytest.raises(ValueError):
            green_power_generator(3)


class TestInterpolate:
    def test_integer_data_reproduced(self):
        rng = np.random.default_rng(0)
        data = Filter((-5,), rng.standard_normal(11))
        c = interpolate(data, bspline_generator(3))
        recon = convolve(bspline_samples(3), c)
        for k in range(-5, 6):
            assert recon.coeff_at((k,)) == pytest.approx(data.coeff_at((k,)), abs=1e-9)

    def test_2d(self):
        rng = np.random.default_rng(1)
        data = Filter((-2, -2), rng.standard_normal((5, 5)))
        c = interpolate(data, bspline_generator(3))
        recon = convolve(bspline_samples(3, d=2), c)
        for i in range(-2, 3):
            for j in range(-2, 3):
                assert recon.coeff_at((i, j)) == pytest.approx(
                    data.coeff_at((i, j)), abs=1e-8
                )


class TestReproduction:
    def test_truncated_cubic(self, wide_kernel):
        xs = np.arange(-5.0, 5.0 + 1e-9, 1.0 / 16)
        res = reproduction_check(
            lambda k: np.where(k >= 0, k.astype(float) ** 3, 0.0),
            wide_kernel,
            lambda x: max(x, 0.0) ** 3,
            xs,
            K_sum=40,
            tol=1e-6,
        )
        assert res["max_residual"] <= 1e-6

    def test_absolute_cubic(self, wide_kernel):
        xs = np.arange(-5.0, 5.0 + 1e-9, 1.0 / 16)
        res = reproduction_check(
            lambda k: np.abs(k.astype(float)) ** 3,
            wide_kernel,
            lambda x: abs(x) ** 3,
            xs,
            K_sum=40,
            tol=1e-6,
        )
        assert res["max_residual"] <= 1e-6

    def test_tail_bound_enforced(self, wide_kernel):
        xs = np.array([0.5])
        with pytest.raises(TailBoundError):
            reproduction_check(
                lambda k: np.abs(k.astype(float)) ** 3,
                wide_kernel,
                lambda x: abs(x) ** 3,
                xs,
                K_sum=5,
                tol=1e-12,
            )


class TestAmalgamNorm:
    def test_bspline_partition_bound(self):
        # with the flat weight the cubic B-spline sums to 1 at every offset
        w = polynomial_weight(0)
        phi = lambda xs: np.array([bspline_value(3, x) for x in np.atleast_1d(xs)])
        assert amalgam_norm(phi, w, K=4) == pytest.approx(1.0, abs=1e-12)

    def test_transfer_inequality(self):
        w = polynomial_weight(2)
        phi = lambda xs: np.array([bspline_value(3, x) for x in np.atleast_1d(xs)])
        phi_norm = amalgam_norm(phi, w, K=6)
        rng = np.random.default_rng(2)
        from wienerlab import weighted_norm

        for _ in range(20):
            vals = rng.standard_normal(7)
            a = Filter((-3,), vals)

            def psi(xs, vals=vals):
                xs = np.atleast_1d(xs)
                return sum(v * phi(xs - k) for k, v in zip(range(-3, 4), vals))

            lhs = amalgam_norm(psi, w, K=12)
            rhs = phi_norm * weighted_norm(a, 1, w)
            assert lhs <= rhs * (1 + 1e-9)


class TestFormats:
    def test_csv_round_trip(self, tmp_path):
        kernel = lagrange_kernel_space(bspline_generator(3), K=20)
        path = tmp_path / "kernel.csv"
        kernel_to_csv(kernel, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# wienerlab lagrange kernel")
        assert lines[1] == "x,value"
        xs, vs = np.loadtxt(lines[2:], delimiter=",", unpack=True)
        np.testing.assert_allclose(xs, kernel.positions)
        np.testing.assert_allclose(vs, kernel.samples)

    def test_generator_json(self):
        g = generator_from_json({"kind": "bspline", "params": {"degree": 3}})
        assert g.params["degree"] == 3
        g = generator_from_json({"kind": "green_power", "params": {"order": 4}})
        assert g.pole_order == 4
        with pytest.raises(ValueError):
            generator_from_json({"kind": "wavelet", "params": {}})
