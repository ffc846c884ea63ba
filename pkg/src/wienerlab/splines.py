"""Cardinal spline interpolation: generators, Lagrange kernels, identities.

The Lagrange (interpolation) kernel of a generator phi is
phi_int(x) = sum_k h[k] phi(x - k), with h the discrete convolution
inverse of the integer samples phi[.]. Two independent construction
routes are provided: the space-domain assembly above, and the
Fourier-domain periodization phihat_int = phihat / sum_n phihat(. - 2 pi n),
which also covers slowly increasing Green's-function generators.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PeriodizationError, TailBoundError
from .inversion import decay_fit_samples, invert_exact_1d, invert_stable
from .lattice import Filter, convolve
from .spectrum import min_modulus_certified

__all__ = [
    "bspline_value",
    "bspline_samples",
    "Generator",
    "bspline_generator",
    "green_power_generator",
    "custom_generator",
    "LagrangeKernel",
    "lagrange_kernel_space",
    "lagrange_kernel_fourier",
    "interpolate",
    "reproduction_check",
    "amalgam_norm",
    "kernel_to_csv",
    "generator_from_json",
]

MAX_BSPLINE_DEGREE = 11


def bspline_value(degree, x):
    """Centered B-spline of the given degree at x, evaluated exactly.

    Uses the truncated-power expansion in rational arithmetic (floats are
    dyadic rationals, so any float input is exact) and returns a float.
    """
    n = int(degree)
    if not 0 <= n <= MAX_BSPLINE_DEGREE:
        raise ValueError(f"degree must be in [0, {MAX_BSPLINE_DEGREE}]")
    xf = Fraction(x)
    half_sup = Fraction(n + 1, 2)
    if xf <= -half_sup or xf >= half_sup:
        return 0.0
    total = Fraction(0)
    for j in range(n + 2):
        t = xf + half_sup - j
        if t > 0:
            total += (-1) ** j * math.comb(n + 1, j) * t**n
    return float(total / math.factorial(n))


def bspline_grid(degree, grid_step):
    """(positions, values) of the degree-n B-spline on its support grid."""
    n = int(degree)
    M = int(round(1.0 / grid_step))
    half = n + 1  # cover [-(n+1)/2, (n+1)/2] with margin
    js = np.arange(-half * M // 2 - 1, half * M // 2 + 2)
    xs = js / M
    vals = np.array([bspline_value(n, Fraction(int(j), M)) for j in js])
    return xs, vals


def bspline_samples(degree, d=1):
    """Integer samples of the centered tensor-product B-spline."""
    n = int(degree)
    if not 0 <= n <= MAX_BSPLINE_DEGREE:
        raise ValueError(f"degree must be in [0, {MAX_BSPLINE_DEGREE}]")
    k0 = n // 2
    line = np.array([bspline_value(n, k) for k in range(-k0, k0 + 1)])
    coeffs = line
    for _ in range(d - 1):
        coeffs = np.multiply.outer(coeffs, line)
    return Filter((-k0,) * d, coeffs)


@dataclass
class Generator:
    """Shift-invariant-space generator: point evaluation and/or symbol."""

    kind: str
    params: dict
    space_eval: object = None  # x -> phi(x), vectorized over arrays
    symbol_eval: object = None  # omega -> phihat(omega), vectorized
    pole_order: int = 0  # order of the symbol's pole at omega = 0


def bspline_generator(degree):
    n = int(degree)
    if not 0 <= n <= MAX_BSPLINE_DEGREE:
        raise ValueError(f"degree must be in [0, {MAX_BSPLINE_DEGREE}]")

    def space(xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        return np.array([bspline_value(n, x) for x in xs])

    def symbol(omega):
        # sinc^{n+1} form of the centered B-spline transform
        omega = np.asarray(omega, dtype=float)
        return np.sinc(omega / (2.0 * np.pi)) ** (n + 1)

    return Generator("bspline", {"degree": n}, space, symbol, 0)


def green_power_generator(order=4):
    """Green's-function generator for L = D^order: phihat = 1/|omega|^order."""
    p = int(order)
    if p < 2 or p % 2:
        raise ValueError("order must be an even integer >= 2")

    def symbol(omega):
        omega = np.asarray(omega, dtype=float)
        with np.errstate(divide="ignore"):
            return np.abs(omega) ** (-float(p))

    return Generator("green_power", {"order": p}, None, symbol, p)


def custom_generator(space_eval=None, symbol_eval=None, pole_order=0, params=None):
    return Generator("custom", params or {}, space_eval, symbol_eval, pole_order)


def generator_from_json(obj):
    """Generator JSON: {"kind": "bspline"|"green_power", "params": {...}}."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("kind")
    params = obj.get("params", {})
    if kind == "bspline":
        return bspline_generator(int(params["degree"]))
    if kind == "green_power":
        return green_power_generator(int(params.get("order", 4)))
    raise ValueError(f"unknown generator kind {kind!r} (custom has no JSON form)")


@dataclass
class LagrangeKernel:
    """Sampled interpolation kernel on a uniform fine grid.

    positions[i] = i-th grid point; samples[i] = phi_int there. Points
    outside the grid evaluate to 0 (the decay report quantifies the
    dropped tail).
    """

    grid_step: float
    positions: np.ndarray
    samples: np.ndarray
    integer_samples: np.ndarray
    integer_range: int
    inverse_filter: Filter
    decay: object

    def evaluate(self, xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        lo = self.positions[0]
        idx = (xs - lo) / self.grid_step
        near = np.rint(idx)
        out = np.zeros_like(xs)
        inside = (near >= 0) & (near <= len(self.samples) - 1)
        on_grid = inside & (np.abs(idx - near) < 1e-9)
        out[on_grid] = self.samples[near[on_grid].astype(int)]
        off = inside & ~on_grid
        if np.any(off):
            i0 = np.clip(np.floor(idx[off]).astype(int), 0, len(self.samples) - 2)
            frac = idx[off] - i0
            out[off] = (1 - frac) * self.samples[i0] + frac * self.samples[i0 + 1]
        return out


def _inverse_filter_for(phi_samples, tail_tol):
    """Windowed inverse of the generator's integer samples, wide enough
    that the dropped coefficients are below tail_tol."""
    cert = min_modulus_certified(phi_samples)
    if phi_samples.coeffs.size == 1:
        return Filter(
            (0,) * phi_samples.dim, np.array([1.0 / phi_samples.coeffs.ravel()[0]]).reshape((1,) * phi_samples.dim)
        )
    exact = invert_exact_1d(phi_samples)
    rate = exact.decay_rate
    scale = max(abs(exact.evaluate([0])[0]), 1.0)
    radius = int(np.ceil(np.log(scale / tail_tol) / rate)) + 4
    return invert_stable(
        phi_samples, tail_tol=min(tail_tol, 1e-10), window_radius=radius, certificate=cert
    )


def lagrange_kernel_space(gen, grid_step=1.0 / 16, K=20, tail_tol=1e-12):
    """Space-domain Lagrange kernel: phi_int = sum_k h[k] phi(. - k)."""
    if gen.kind == "bspline":
        degree = gen.params["degree"]
        phi_samples = bspline_samples(degree)
        phi_xs, phi_vals = bspline_grid(degree, grid_step)
    else:
        if gen.space_eval is None:
            raise ValueError("space route needs a point-evaluable generator")
        # sample the generator until its values drop below tail_tol
        R = 2
        while True:
            if abs(gen.space_eval(np.array([R]))[0]) < tail_tol and R > 8:
                break
            R += 2
        M = int(round(1.0 / grid_step))
        js = np.arange(-R * M, R * M + 1)
        phi_xs = js / M
        phi_vals = gen.space_eval(phi_xs)
        ks = np.arange(-R, R + 1)
        phi_samples = Filter((-R,), gen.space_eval(ks.astype(float)))

    M = int(round(1.0 / grid_step))
    h = _inverse_filter_for(phi_samples, tail_tol)
    hk = h.indices().ravel()
    hv = h.coeffs.ravel()
    keep = np.abs(hv) >= tail_tol
    hk, hv = hk[keep], hv[keep]

    # phi_int on the fine grid as an upsampled discrete convolution
    pad = int(np.max(np.abs(hk))) + int(np.ceil(np.max(np.abs(phi_xs)))) + 1
    n_side = (K + pad) * M
    acc = np.zeros(2 * n_side + 1)
    base = np.rint(phi_xs * M).astype(int)
    for k, v in zip(hk, hv):
        idx = base + k * M + n_side
        ok = (idx >= 0) & (idx < len(acc))
        acc[idx[ok]] += v * phi_vals[ok]
    sel = np.arange(-K * M, K * M + 1) + n_side
    positions = np.arange(-K * M, K * M + 1) / M
    samples = acc[sel]
    integer_samples = acc[np.arange(-K, K + 1) * M + n_side]
    decay = decay_fit_samples(positions, samples)
    return LagrangeKernel(
        grid_step=1.0 / M,
        positions=positions,
        samples=samples,
        integer_samples=integer_samples,
        integer_range=K,
        inverse_filter=h,
        decay=decay,
    )


def _periodized_symbol(symbol, pole_order, omega0, n_trunc, rel_tol=1e-6):
    """T(w0) = w0^p * sum_{|n| <= n_trunc} phihat(w0 - 2 pi n), with the
    pole factored out so the n = 0 term is finite. Raises when the shell
    terms have not converged at n_trunc."""
    p = pole_order
    if p > 0:
        eps = 1e-5
        pole_limit = float(np.asarray(symbol(np.array([eps]))).ravel()[0] * eps**p)
        with np.errstate(invalid="ignore", divide="ignore"):
            raw = np.abs(omega0) ** p * symbol(omega0)
        central = np.where(np.abs(omega0) < 1e-14, pole_limit, raw)
        weight = np.abs(omega0) ** p
    else:
        central = symbol(omega0)
        weight = np.ones_like(omega0)
    total = np.array(central, dtype=float)
    last_shell = None
    for n in range(1, n_trunc + 1):
        shell = weight * (symbol(omega0 - 2 * np.pi * n) + symbol(omega0 + 2 * np.pi * n))
        total += shell
        last_shell = np.max(np.abs(shell))
    scale = np.min(np.abs(total))
    if last_shell is None:
        tail_estimate = 0.0
    else:
        # ~algebraic shell decay: tail behaves like (n_trunc / (gamma-1)) terms
        tail_estimate = last_shell * n_trunc
    if scale <= 0 or tail_estimate > rel_tol * scale:
        raise PeriodizationError(
            f"periodization tail estimate {tail_estimate:.3e} exceeds "
            f"{rel_tol:.1e} of the symbol scale; increase n_trunc"
        )
    return total, tail_estimate


def lagrange_kernel_fourier(
    gen,
    n_trunc=64,
    grid_step=1.0 / 16,
    K=20,
    freq_oversample=8,
    periodization_tol=1e-6,
):
    """Fourier-domain Lagrange kernel via symbol periodization.

    phihat_int(w) = phihat(w) / sum_n phihat(w - 2 pi n); for generators
    whose symbol has a pole at 0 (Green's functions) the ratio is
    evaluated in pole-free form w0^p phihat(w) / (w0^p sum ...). Space
    samples come from an FFT quadrature of the inverse transform on a
    frequency grid oversampled by freq_oversample relative to pi/grid_step.
    """
    symbol = gen.symbol_eval if isinstance(gen, Generator) else gen
    pole_order = gen.pole_order if isinstance(gen, Generator) else 0
    if symbol is None:
        raise ValueError("Fourier route needs a symbol-evaluable generator")
    M = int(round(1.0 / grid_step))
    Mf = M * int(freq_oversample)
    x_half = max(4 * K, 64)  # aliasing period half-width in x
    N = 2 * Mf * x_half
    omega = 2.0 * np.pi * Mf * np.fft.fftfreq(N)
    omega0 = omega - 2.0 * np.pi * np.round(omega / (2.0 * np.pi))
    denom, tail = _periodized_symbol(symbol, pole_order, omega0, n_trunc, periodization_tol)

    at_zero = np.abs(omega) < 1e-14
    at_lattice = (np.abs(omega0) < 1e-14) & ~at_zero
    if pole_order > 0:
        with np.errstate(invalid="ignore", divide="ignore"):
            numer = np.abs(omega0) ** pole_order * symbol(omega)
        numer = np.where(at_zero | at_lattice, 0.0, numer)
        with np.errstate(invalid="ignore"):
            phihat_int = numer / denom
        # the pole-free ratio tends to 1 at omega = 0 and to 0 at the
        # other lattice frequencies 2 pi n
        phihat_int = np.where(at_zero, 1.0, phihat_int)
        phihat_int = np.where(at_lattice, 0.0, phihat_int)
    else:
        phihat_int = symbol(omega) / denom

    space = np.fft.ifft(phihat_int).real * Mf
    js = np.arange(-K * M, K * M + 1)
    samples = space[(js * freq_oversample) % N]
    positions = js / M
    integer_samples = space[(np.arange(-K, K + 1) * Mf) % N]
    decay = decay_fit_samples(positions, samples)
    return LagrangeKernel(
        grid_step=1.0 / M,
        positions=positions,
        samples=samples,
        integer_samples=integer_samples,
        integer_range=K,
        inverse_filter=None,
        decay=decay,
    )


def interpolate(data, gen, tail_tol=1e-12):
    """Expansion coefficients c with sum_k c[k] phi(. - k) matching data
    at the integers: c = h * data, h the inverse of phi[.]."""
    if gen.kind == "bspline":
        phi_samples = bspline_samples(gen.params["degree"], d=data.dim)
    elif gen.space_eval is not None and data.dim == 1:
        ks = np.arange(-8, 9).astype(float)
        phi_samples = Filter((-8,), gen.space_eval(ks))
    else:
        raise ValueError("interpolate needs integer samples of the generator")
    if data.dim == 1:
        h = _inverse_filter_for(phi_samples, tail_tol)
    else:
        extent = max(data.coeffs.shape) + 20
        h = invert_stable(phi_samples, tail_tol=1e-10, window_radius=extent)
    return convolve(h, data)


def reproduction_check(p, kernel, target, xs, K_sum, tol=1e-9):
    """Max residual of sum_{|k| <= K_sum} p[k] phi_int(x - k) against target.

    p: callable k -> value (vectorized over an int array). A tail
    estimate from the kernel's decay report is computed first; if it
    exceeds tol the sum cannot certify the identity and an error is
    raised.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ks = np.arange(-K_sum, K_sum + 1)
    pk = np.asarray(p(ks), dtype=float)

    decay = kernel.decay
    if decay.model != "exponential" or decay.rate <= 0:
        raise ValueError("reproduction needs a kernel with exponential decay")
    x_max = float(np.max(np.abs(xs)))
    edge = np.max(np.abs(pk[[0, -1]])) + 1.0
    tail = (
        2.0
        * edge
        * decay.fit_constant
        * np.exp(-decay.rate * max(K_sum - x_max, 0.0))
        / max(1.0 - np.exp(-decay.rate), 1e-12)
    )
    if tail > tol:
        raise TailBoundError(
            f"tail estimate {tail:.3e} exceeds tolerance {tol:.1e}; increase K_sum",
            tail_estimate=tail,
        )
    vals = np.empty_like(xs)
    for i, x in enumerate(xs):
        vals[i] = float(np.dot(pk, kernel.evaluate(x - ks)))
    residual = float(np.max(np.abs(vals - np.asarray([target(x) for x in xs]))))
    return {"max_residual": residual, "tail_estimate": float(tail), "values": vals}


def amalgam_norm(f, w, x0_grid=None, K=40):
    """Lower bound of the Wiener amalgam norm sup_{x0} sum_k |f(x0+k)| w[k].

    f: callable over float arrays (d = 1). The sup is taken over the
    offsets in x0_grid (default: step-1/16 grid of [0, 1)).
    """
    if x0_grid is None:
        x0_grid = np.arange(0.0, 1.0, 1.0 / 16)
    ks = np.arange(-K, K + 1)
    wv = w.eval(ks[:, None].astype(float))
    best = 0.0
    for x0 in np.atleast_1d(x0_grid):
        vals = np.abs(np.asarray(f(x0 + ks.astype(float)), dtype=float))
        best = max(best, float(np.dot(vals, wv)))
    return best


def kernel_to_csv(kernel, path):
    """Kernel CSV: metadata header comment, then x,value rows."""
    meta = (
        f"# wienerlab lagrange kernel grid_step={kernel.grid_step!r} "
        f"K={kernel.integer_range} decay_model={kernel.decay.model} "
        f"decay_rate={kernel.decay.rate:.17g} decay_order={kernel.decay.order:.17g}\n"
    )
    with open(path, "w") as fh:
        fh.write(meta)
        fh.write("x,value\n")
        for x, v in zip(kernel.positions, kernel.samples):
            fh.write(f"{x:.17g},{v:.17g}\n")
