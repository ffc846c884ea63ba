import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wienerlab import (
    Filter,
    NotInvertibleError,
    SingularSymbolError,
    ToleranceUnreachableError,
    WrongBranchError,
    convolve,
    decay_fit,
    invert_exact_1d,
    invert_singular_1d,
    invert_stable,
    residual_sup,
    toeplitz_oracle,
)

SQRT3 = np.sqrt(3.0)


def cubic():
    return Filter((-1,), np.array([1.0, 4.0, 1.0]) / 6.0)


def stable_filter(rng, deg, min_gap=0.02, shift_range=3):
    """Random real filter whose symbol roots lie in 0.05 <= |z| <= 0.8.

    Root pairs closer than min_gap are resampled: partial-fraction
    residues scale like 1/gap and would dominate the route-agreement
    error budget without bounding the conditioning.
    """
    while True:
        roots = []
        while len(roots) < deg:
            if deg - len(roots) >= 2 and rng.random() < 0.5:
                rad = rng.uniform(0.05, 0.8)
                ang = rng.uniform(0.0, np.pi)
                z = rad * np.exp(1j * ang)
                roots += [z, np.conj(z)]
            else:
                roots.append(complex(rng.uniform(0.05, 0.8) * rng.choice([-1, 1])))
        gaps = [abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1 :]]
        if min(gaps, default=1.0) >= min_gap:
            break
    shift = int(rng.integers(-shift_range, shift_range + 1))
    return Filter((shift,), np.real(np.poly(roots)))


class TestExact1D:
    def test_cubic_closed_form(self):
        ex = invert_exact_1d(cubic())
        assert ex.evaluate([0])[0] == pytest.approx(SQRT3, abs=1e-12)
        assert ex.evaluate([1])[0] == pytest.approx(SQRT3 * (SQRT3 - 2), abs=1e-12)
        assert ex.evaluate([-1])[0] == pytest.approx(SQRT3 * (SQRT3 - 2), abs=1e-12)
        assert ex.decay_rate == pytest.approx(np.log(2 + SQRT3), abs=1e-12)

    def test_symmetric_inverse_of_symmetric_filter(self):
        ex = invert_exact_1d(cubic())
        ks = np.arange(1, 20)
        np.testing.assert_allclose(ex.evaluate(ks), ex.evaluate(-ks), atol=1e-14)

    def test_geometric_inverse(self):
        # (delta - a delta_{.-1})^{-1}[k] = a^k for k >= 0
        h = Filter((0,), np.array([1.0, -0.5]))
        ex = invert_exact_1d(h)
        ks = np.arange(-5, 15)
        want = np.where(ks >= 0, 0.5 ** np.maximum(ks, 0), 0.0)
        np.testing.assert_allclose(ex.evaluate(ks), want, atol=1e-14)
        assert ex.decay_rate == pytest.approx(np.log(2.0), abs=1e-12)

    def test_multiple_root(self):
        # (delta - a delta_{.-1})^2 inverse is (k+1) a^k
        a = 0.5
        base = Filter((0,), np.array([1.0, -a]))
        h = convolve(base, base)
        ex = invert_exact_1d(h)
        ks = np.arange(0, 12)
        # a double root is only locatable to ~1e-12, which the powers amplify
        np.testing.assert_allclose(ex.evaluate(ks), (ks + 1) * a**ks, rtol=1e-9)

    def test_residual_is_delta(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            h = stable_filter(rng, int(rng.integers(1, 9)))
            g = invert_exact_1d(h).to_filter(150)
            assert residual_sup(h, g, 100) < 1e-10

    def test_monomial_symbol(self):
        h = Filter((2,), np.array([4.0]))
        ex = invert_exact_1d(h)
        assert ex.evaluate([-2])[0] == pytest.approx(0.25)
        assert ex.evaluate([0])[0] == 0.0

    def test_unit_root_raises(self):
        with pytest.raises(SingularSymbolError) as exc:
            invert_exact_1d(Filter((0,), np.array([1.0, -1.0])))
        assert len(exc.value.unit_roots) == 1

    def test_2d_rejected(self):
        with pytest.raises(ValueError):
            invert_exact_1d(Filter((0, 0), np.ones((2, 2))))


class TestInvertStable:
    def test_cubic_residual_contract(self):
        h = cubic()
        g = invert_stable(h, tail_tol=1e-12, window_radius=40)
        assert residual_sup(h, g, 39) <= 1e-12

    def test_matches_exact(self):
        h = cubic()
        g = invert_stable(h, 1e-12, 40)
        ev = invert_exact_1d(h).evaluate(np.arange(-35, 36))
        got = np.array([g.coeff_at((k,)) for k in range(-35, 36)])
        assert np.max(np.abs(got - ev)) < 1e-12

    def test_involution(self):
        h = cubic()
        g = invert_stable(h, 1e-10, 40)
        hh = invert_stable(g, 1e-8, 60)
        for k in (-1, 0, 1):
            assert hh.coeff_at((k,)) == pytest.approx(h.coeff_at((k,)), abs=1e-7)

    def test_not_invertible_raises(self):
        with pytest.raises(NotInvertibleError) as exc:
            invert_stable(Filter((0,), np.array([1.0, -1.0])))
        assert exc.value.certificate.status == "likely-singular"

    def test_tolerance_unreachable(self):
        # a tolerance below the roundoff floor cannot be met at any grid
        # size, so the doubling loop must stop at the cap and report the
        # best residual it saw
        with pytest.raises(ToleranceUnreachableError) as exc:
            invert_stable(cubic(), tail_tol=1e-18, window_radius=12)
        assert exc.value.best_residual > 1e-18

    def test_2d_separable(self):
        line = np.array([1.0, 4.0, 1.0]) / 6.0
        h2 = Filter((-1, -1), np.outer(line, line))
        g2 = invert_stable(h2, 1e-10, 30)
        ev = invert_exact_1d(cubic()).evaluate(np.arange(-20, 21))
        tensor = np.outer(ev, ev)
        got = np.array(
            [[g2.coeff_at((i, j)) for j in range(-20, 21)] for i in range(-20, 21)]
        )
        assert np.max(np.abs(got - tensor)) < 1e-9


class TestToeplitzOracle:
    def test_cubic_agreement(self):
        h = cubic()
        go = toeplitz_oracle(h, 30)
        ev = invert_exact_1d(h).evaluate(np.arange(-30, 31))
        got = np.array([go.coeff_at((k,)) for k in range(-30, 31)])
        assert np.max(np.abs(got - ev)) < 1e-8

    def test_requires_certificate(self):
        with pytest.raises(NotInvertibleError):
            toeplitz_oracle(Filter((0,), np.array([1.0, -1.0])), 10)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=10, deadline=None)
    def test_three_routes_agree(self, seed):
        rng = np.random.default_rng(seed)
        h = stable_filter(rng, int(rng.integers(1, 7)))
        g = invert_stable(h, 1e-10, 120)
        go = toeplitz_oracle(h, 90)
        ev = invert_exact_1d(h).evaluate(np.arange(-30, 31))
        gv = np.array([g.coeff_at((k,)) for k in range(-30, 31)])
        ov = np.array([go.coeff_at((k,)) for k in range(-30, 31)])
        assert np.max(np.abs(gv - ev)) < 1e-8
        assert np.max(np.abs(ov - gv)) < 1e-8


class TestSingular1D:
    def test_difference_gives_unit_step(self):
        h = Filter((0,), np.array([1.0, -1.0]))
        seq = invert_singular_1d(h, 40)
        assert seq.growth_order == 0
        np.testing.assert_array_equal(seq.values, np.ones(41))
        assert seq.residual == 0.0

    def test_squared_difference_gives_ramp(self):
        h = Filter((0,), np.array([1.0, -2.0, 1.0]))
        seq = invert_singular_1d(h, 40)
        assert seq.growth_order == 1
        np.testing.assert_array_equal(seq.values, np.arange(1.0, 42.0))
        assert seq.residual == 0.0

    def test_convolution_is_delta_on_window(self):
        h = Filter((0,), np.array([1.0, -2.0, 1.0]))
        seq = invert_singular_1d(h, 40)
        conv = convolve(h, seq.to_filter())
        assert conv.coeff_at((0,)) == pytest.approx(1.0, abs=1e-12)
        for k in range(1, 38):
            assert abs(conv.coeff_at((k,))) < 1e-12

    def test_mixed_stable_and_unit(self):
        h = convolve(cubic(), Filter((0,), np.array([1.0, -1.0])))
        seq = invert_singular_1d(h, 40)
        assert seq.growth_order == 0
        assert seq.residual < 1e-12
        # far to the right the inverse tends to the step height 1
        assert seq.values[-1] == pytest.approx(1.0, abs=1e-10)

    def test_alternating_difference(self):
        # delta + delta_{.-1} has its unit zero at z = -1
        h = Filter((0,), np.array([1.0, 1.0]))
        seq = invert_singular_1d(h, 30)
        np.testing.assert_allclose(seq.values, (-1.0) ** np.arange(31), atol=1e-12)

    def test_growth_bound_holds(self):
        h = Filter((0,), np.array([1.0, -2.0, 1.0]))
        seq = invert_singular_1d(h, 50)
        ks = np.arange(seq.window.origin[0], seq.window.origin[0] + seq.window.size)
        assert np.all(
            np.abs(seq.values) <= seq.bound_constant * (1 + np.abs(ks)) ** seq.growth_order + 1e-12
        )

    def test_stable_filter_raises_wrong_branch(self):
        with pytest.raises(WrongBranchError):
            invert_singular_1d(cubic(), 20)


class TestDecayFit:
    def test_exponential_classified(self):
        g = invert_exact_1d(cubic()).to_filter(25)
        rep = decay_fit(g)
        assert rep.model == "exponential"
        assert rep.rate == pytest.approx(np.log(2 + SQRT3), abs=1e-3)

    def test_algebraic_classified(self):
        ks = np.arange(-60, 61).astype(float)
        g = Filter((-60,), 1.0 / (1.0 + np.abs(ks)) ** 3)
        rep = decay_fit(g)
        assert rep.model == "algebraic"
        assert rep.order == pytest.approx(-3.0, abs=0.05)

    def test_polynomial_growth_order(self):
        seq = invert_singular_1d(Filter((0,), np.array([1.0, -2.0, 1.0])), 40)
        rep = decay_fit(seq)
        assert rep.order == pytest.approx(1.0, abs=0.02)

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            decay_fit(Filter((0,), np.array([1.0])))
