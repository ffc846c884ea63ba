"""Finitely supported sequences on the integer lattice.

A Filter stores its coefficients on a multi-index box (origin + shape),
row-major. All operations are pure; filters are immutable after
construction and canonically trimmed, so support comparison is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Box",
    "Filter",
    "kronecker",
    "delta_shift",
    "convolve",
    "weighted_norm",
    "sup_difference",
    "filter_to_json",
    "filter_from_json",
]

# Supports up to this many points use the direct double sum; larger ones
# go through the FFT path (both agree to 1e-10 relative, see tests).
DIRECT_CONVOLUTION_CUTOFF = 4096


@dataclass(frozen=True)
class Box:
    """Axis-aligned box of multi-indices: origin <= k < origin + shape."""

    origin: tuple
    shape: tuple

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(int(x) for x in self.origin))
        object.__setattr__(self, "shape", tuple(int(x) for x in self.shape))
        if len(self.origin) != len(self.shape):
            raise ValueError("origin and shape must have the same length")
        if len(self.shape) < 1:
            raise ValueError("dimension must be >= 1")
        if any(s < 1 for s in self.shape):
            raise ValueError("all shape entries must be >= 1")

    @property
    def dim(self):
        return len(self.shape)

    @property
    def size(self):
        return int(np.prod(self.shape))

    def contains(self, k):
        k = tuple(int(x) for x in k)
        return all(o <= x < o + s for o, x, s in zip(self.origin, k, self.shape))

    def indices(self):
        """All multi-indices in the box, row-major, as an (size, dim) array."""
        grids = np.meshgrid(
            *[np.arange(o, o + s) for o, s in zip(self.origin, self.shape)],
            indexing="ij",
        )
        return np.stack([g.ravel() for g in grids], axis=-1)


class Filter:
    """Finitely supported sequence h[k] on Z^d.

    Coefficients are stored as a d-dimensional array aligned with the
    support box; zero boundary slabs are trimmed on construction.
    """

    __slots__ = ("origin", "coeffs")

    def __init__(self, origin, coeffs):
        coeffs = np.asarray(coeffs)
        if coeffs.dtype.kind not in "fc":
            coeffs = coeffs.astype(float)
        origin = tuple(int(x) for x in origin)
        if coeffs.ndim != len(origin):
            raise ValueError(
                f"coeffs ndim {coeffs.ndim} does not match origin length {len(origin)}"
            )
        if coeffs.ndim < 1:
            raise ValueError("dimension must be >= 1")
        origin, coeffs = _trim(origin, coeffs)
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        self.origin = origin
        self.coeffs = coeffs

    # -- structure ----------------------------------------------------------

    @property
    def dim(self):
        return self.coeffs.ndim

    @property
    def support(self):
        return Box(self.origin, self.coeffs.shape)

    @property
    def is_complex(self):
        return self.coeffs.dtype.kind == "c"

    def coeff_at(self, k):
        """h[k]; zero outside the support box."""
        k = tuple(int(x) for x in np.atleast_1d(k))
        if not self.support.contains(k):
            return 0.0
        idx = tuple(x - o for x, o in zip(k, self.origin))
        return self.coeffs[idx]

    def indices(self):
        return self.support.indices()

    def real_if_close(self, tol=1e-9):
        if not self.is_complex:
            return self
        scale = max(np.max(np.abs(self.coeffs)), 1.0)
        if np.max(np.abs(self.coeffs.imag)) <= tol * scale:
            return Filter(self.origin, self.coeffs.real.copy())
        return self

    def __eq__(self, other):
        if not isinstance(other, Filter):
            return NotImplemented
        return (
            self.origin == other.origin
            and self.coeffs.shape == other.coeffs.shape
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __repr__(self):
        return f"Filter(origin={self.origin}, shape={self.coeffs.shape})"

    def __setattr__(self, name, value):
        if hasattr(self, "coeffs"):
            raise AttributeError("Filter is immutable")
        object.__setattr__(self, name, value)


def _trim(origin, coeffs):
    """Drop all-zero boundary slabs so the support is canonical."""
    if not np.any(coeffs):
        return tuple(0 for _ in origin), np.zeros((1,) * len(origin), coeffs.dtype)
    origin = list(origin)
    for axis in range(coeffs.ndim):
        nz = np.nonzero(np.any(coeffs != 0, axis=tuple(a for a in range(coeffs.ndim) if a != axis)))[0]
        lo, hi = nz[0], nz[-1] + 1
        sl = [slice(None)] * coeffs.ndim
        sl[axis] = slice(lo, hi)
        coeffs = coeffs[tuple(sl)]
        origin[axis] += int(lo)
    return tuple(origin), coeffs


# -- constructors ------------------------------------------------------------


def kronecker(d):
    """Kronecker delta on Z^d: the neutral element of convolution."""
    if d < 1:
        raise ValueError(f"invalid dimension {d}; need d >= 1")
    return Filter((0,) * d, np.ones((1,) * d))


def delta_shift(d, k):
    """Shifted impulse delta[. - k]."""
    k = tuple(int(x) for x in np.atleast_1d(k))
    if len(k) != d:
        raise ValueError("shift length must equal dimension")
    return Filter(k, np.ones((1,) * d))


# -- operations --------------------------------------------------------------


def convolve(a, b, method=None):
    """Exact finite convolution; support is the Minkowski sum of supports.

    method: None (auto by size), "direct", or "fft".
    """
    if not isinstance(a, Filter) or not isinstance(b, Filter):
        raise TypeError("convolve expects Filter operands")
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    out_shape = tuple(sa + sb - 1 for sa, sb in zip(a.coeffs.shape, b.coeffs.shape))
    out_origin = tuple(oa + ob for oa, ob in zip(a.origin, b.origin))
    if method is None:
        method = "direct" if int(np.prod(out_shape)) <= DIRECT_CONVOLUTION_CUTOFF else "fft"
    if method == "direct":
        out = _convolve_direct(a.coeffs, b.coeffs, out_shape)
    elif method == "fft":
        out = _convolve_fft(a.coeffs, b.coeffs, out_shape)
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    return Filter(out_origin, out)


def _convolve_direct(ca, cb, out_shape):
    # Direct double sum: accumulate a shifted copy of b for every nonzero
    # coefficient of a. This is the oracle path.
    if ca.size > cb.size:
        ca, cb = cb, ca
    dtype = np.result_type(ca.dtype, cb.dtype)
    out = np.zeros(out_shape, dtype=dtype)
    for idx in np.ndindex(ca.shape):
        v = ca[idx]
        if v == 0:
            continue
        sl = tuple(slice(i, i + s) for i, s in zip(idx, cb.shape))
        out[sl] += v * cb
    return out


def _convolve_fft(ca, cb, out_shape):
    dtype = np.result_type(ca.dtype, cb.dtype)
    axes = tuple(range(len(out_shape)))
    if dtype.kind == "c":
        fa = np.fft.fftn(ca, out_shape, axes=axes)
        fb = np.fft.fftn(cb, out_shape, axes=axes)
        return np.fft.ifftn(fa * fb, axes=axes)
    fa = np.fft.rfftn(ca, out_shape, axes=axes)
    fb = np.fft.rfftn(cb, out_shape, axes=axes)
    return np.fft.irfftn(fa * fb, out_shape, axes=axes)


def weighted_norm(a, p, w):
    """Weighted norm ||w[.] a[.]||_{l_p} over the finite support, p in {1,2,inf}."""
    if p not in (1, 2, np.inf, "inf"):
        raise ValueError("p must be 1, 2, or inf")
    ks = a.indices()
    wv = np.asarray(w.eval(ks), dtype=float)
    if np.any(wv <= 0) or not np.all(np.isfinite(wv)):
        raise ValueError("invalid weight: non-positive or non-finite value on the support")
    vals = wv * np.abs(a.coeffs.ravel())
    if p == 1:
        return float(np.sum(vals))
    if p == 2:
        return float(np.sqrt(np.sum(vals**2)))
    return float(np.max(vals))


def sup_difference(a, b):
    """sup_k |a[k] - b[k]| over the union of supports."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    lo = tuple(min(oa, ob) for oa, ob in zip(a.origin, b.origin))
    hi = tuple(
        max(oa + sa, ob + sb)
        for oa, sa, ob, sb in zip(a.origin, a.coeffs.shape, b.origin, b.coeffs.shape)
    )
    shape = tuple(h - l for l, h in zip(lo, hi))
    dtype = np.result_type(a.coeffs.dtype, b.coeffs.dtype)
    buf = np.zeros(shape, dtype=dtype)
    sla = tuple(slice(o - l, o - l + s) for o, l, s in zip(a.origin, lo, a.coeffs.shape))
    slb = tuple(slice(o - l, o - l + s) for o, l, s in zip(b.origin, lo, b.coeffs.shape))
    buf[sla] += a.coeffs
    buf[slb] -= b.coeffs
    return float(np.max(np.abs(buf)))


# -- JSON format (shared with the CLI) ---------------------------------------


def filter_to_json(a):
    """Shared Filter JSON schema: dim, origin, shape, row-major coeffs."""
    if a.is_complex:
        raise ValueError("Filter JSON format stores real coefficients only")
    return {
        "dim": a.dim,
        "origin": list(a.origin),
        "shape": list(a.coeffs.shape),
        "coeffs": [float(x) for x in a.coeffs.ravel()],
    }


def filter_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        dim = int(obj["dim"])
        origin = [int(x) for x in obj["origin"]]
        shape = [int(x) for x in obj["shape"]]
        coeffs = np.asarray(obj["coeffs"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed Filter JSON: {exc}") from exc
    if len(origin) != dim or len(shape) != dim:
        raise ValueError("origin/shape length does not match dim")
    if coeffs.size != int(np.prod(shape)):
        raise ValueError("coeffs length does not match product(shape)")
    return Filter(tuple(origin), coeffs.reshape(shape))
