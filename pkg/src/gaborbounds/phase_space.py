"""Short-time Fourier transform, ambiguity function and Wigner distribution.

All pointwise transforms are computed by quadrature of the defining integral.
Windows are tensor products, so a transform in dimension d is the product of
d one-dimensional integrals.  Every evaluator accepts a single point (and
returns a complex scalar) or an ``(n, 2d)`` array of points.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .lattice import PhaseSpacePoint, as_points
from .quadrature import integrate_rows
from .windows import Window, reflect

_CHUNK = 4096


def _stft_1d(f, g, x, w):
    def fun(t, rows):
        xr = x[rows, None]
        return f(t) * np.conj(g(t - xr)) * np.exp(-2j * np.pi * w[rows, None] * t)

    lo = np.maximum(-f.radius, x - g.radius)
    hi = np.minimum(f.radius, x + g.radius)
    return integrate_rows(fun, lo, hi)


def _ambiguity_1d(f, g, x, w):
    def fun(t, rows):
        h = 0.5 * x[rows, None]
        return f(t + h) * np.conj(g(t - h)) * np.exp(-2j * np.pi * w[rows, None] * t)

    lo = np.maximum(-f.radius - 0.5 * x, -g.radius + 0.5 * x)
    hi = np.minimum(f.radius - 0.5 * x, g.radius + 0.5 * x)
    return integrate_rows(fun, lo, hi)


def _wigner_1d(f, g, x, w):
    def fun(t, rows):
        xr = x[rows, None]
        return f(xr + 0.5 * t) * np.conj(g(xr - 0.5 * t)) * np.exp(-2j * np.pi * w[rows, None] * t)

    lo = np.maximum(-2.0 * (f.radius + x), 2.0 * (x - g.radius))
    hi = np.minimum(2.0 * (f.radius - x), 2.0 * (x + g.radius))
    return integrate_rows(fun, lo, hi)


def _separable(kernel, f: Window, g: Window, l):
    if f.dim_d != g.dim_d:
        raise ValueError("windows have different dimensions")
    scalar = isinstance(l, PhaseSpacePoint) or np.ndim(l) == 1
    pts = as_points(l)
    d = f.dim_d
    if pts.shape[1] != 2 * d:
        raise ValueError(f"points have dimension {pts.shape[1]}, expected {2 * d}")
    out = np.ones(len(pts), dtype=complex)
    for i in range(d):
        pairs, inverse = np.unique(pts[:, [i, d + i]], axis=0, return_inverse=True)
        vals = np.empty(len(pairs), dtype=complex)
        for s in range(0, len(pairs), _CHUNK):
            blk = pairs[s:s + _CHUNK]
            vals[s:s + _CHUNK] = kernel(f.factors[i], g.factors[i], blk[:, 0], blk[:, 1])
        out *= vals[inverse.ravel()]
    return complex(out[0]) if scalar else out


def stft(f: Window, g: Window, l):
    """``V_g f(x, w) = int f(t) conj(g(t - x)) exp(-2 pi i w.t) dt``."""
    return _separable(_stft_1d, f, g, l)


def ambiguity(f: Window, g: Window, l):
    """``A_g f(x, w) = int f(t + x/2) conj(g(t - x/2)) exp(-2 pi i w.t) dt``."""
    return _separable(_ambiguity_1d, f, g, l)


def wigner(f: Window, g: Window, l):
    """``W_g f(x, w) = int f(x + t/2) conj(g(x - t/2)) exp(-2 pi i w.t) dt``."""
    return _separable(_wigner_1d, f, g, l)


def wigner_via_ambiguity(f: Window, g: Window, l):
    """Wigner distribution from the ambiguity function of the reflected window.

    ``W_g f(l) = 2^d A_{g~} f(2 l)`` where ``g~(t) = g(-t)``.
    """
    pts = as_points(l)
    vals = 2.0**f.dim_d * ambiguity(f, reflect(g), 2.0 * pts)
    if isinstance(l, PhaseSpacePoint) or np.ndim(l) == 1:
        return complex(vals[0])
    return vals


# gridded phase-space functions

@dataclass(frozen=True)
class PhaseSpaceFunctionSample:
    """Samples of a function on a rectangular grid in R^{2d}.

    ``axes`` holds ``(min, max, count)`` per axis in the order
    ``x_1..x_d, w_1..w_d``; ``values`` has shape ``tuple(counts)``.
    """

    axes: tuple
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        axes = tuple((float(a), float(b), int(n)) for a, b, n in self.axes)
        if len(axes) % 2 or not axes:
            raise ValueError("need an even number of axes")
        if any(n < 2 or b <= a for a, b, n in axes):
            raise ValueError("each axis needs min < max and at least 2 points")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != tuple(n for _, _, n in axes):
            raise ValueError(f"values shape {vals.shape} does not match grid")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)

    @property
    def dim_d(self) -> int:
        return len(self.axes) // 2

    def coords(self) -> list[np.ndarray]:
        return [np.linspace(a, b, n) for a, b, n in self.axes]

    def points(self) -> np.ndarray:
        grids = np.meshgrid(*self.coords(), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)


def tabulate(fun, axes, meta=None) -> PhaseSpaceFunctionSample:
    """Sample a pointwise evaluator ``fun((n, 2d) array) -> (n,)`` on a grid."""
    axes = tuple((float(a), float(b), int(n)) for a, b, n in axes)
    grids = np.meshgrid(*[np.linspace(a, b, n) for a, b, n in axes], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    vals = np.asarray(fun(pts), dtype=complex).reshape(tuple(n for _, _, n in axes))
    return PhaseSpaceFunctionSample(axes, vals, dict(meta or {}))


class GridError(ValueError):
    pass


def _boundary_max(values):
    m = 0.0
    for ax in range(values.ndim):
        for idx in (0, -1):
            m = max(m, float(np.max(np.abs(np.take(values, idx, axis=ax)))))
    return m


def symplectic_fourier(F: PhaseSpaceFunctionSample, out_axes, decay_tol: float = 1e-8):
    """Symplectic Fourier transform evaluated on ``out_axes``.

    ``F_s F(l) = int F(l') exp(-2 pi i sigma(l, l')) dl'`` by the trapezoidal
    rule on the input grid.  The kernel factorizes over the pairs
    ``(x_k, w_k)``: input axis ``x'_k`` feeds output axis ``w_k`` and input
    axis ``w'_k`` feeds output axis ``x_k``.
    """
    d = F.dim_d
    if d not in (1, 2):
        raise GridError("gridded symplectic Fourier transform supports 2d in {2, 4}")
    out_axes = tuple((float(a), float(b), int(n)) for a, b, n in out_axes)
    if len(out_axes) != 2 * d or any(n < 2 or b <= a for a, b, n in out_axes):
        raise GridError("output grid does not match the input dimension")
    if _boundary_max(F.values) > decay_tol:
        raise GridError("input does not decay below tolerance at the grid boundary")
    in_c = F.coords()
    out_c = [np.linspace(a, b, n) for a, b, n in out_axes]
    partner = [(k + d) % (2 * d) for k in range(2 * d)]

    mats = []
    for p in range(2 * d):
        q = partner[p]
        h = in_c[p][1] - in_c[p][0]
        extent = max(abs(out_c[q][0]), abs(out_c[q][-1]))
        if extent > 0.5 / h:
            raise GridError(f"input grid too coarse on axis {p} for output extent {extent:g}")
        w = np.full(len(in_c[p]), h)
        w[0] = w[-1] = 0.5 * h
        # exp(-2 pi i (x w' - w x')): x' pairs with +w, w' pairs with -x
        sign = 1.0 if p < d else -1.0
        mats.append(np.exp(2j * np.pi * sign * np.outer(out_c[q], in_c[p])) * w[None, :])

    letters_in = "abcd"[:2 * d]
    letters_out = "efgh"[:2 * d]
    terms = [letters_in]
    for p in range(2 * d):
        terms.append(letters_out[partner[p]] + letters_in[p])
    expr = ",".join(terms) + "->" + letters_out
    vals = np.einsum(expr, F.values, *mats, optimize=True)
    meta = dict(F.meta)
    meta["transform"] = "symplectic_fourier(" + str(F.meta.get("transform", "F")) + ")"
    return PhaseSpaceFunctionSample(out_axes, vals, meta)


def dilate(F: PhaseSpaceFunctionSample, alpha: float) -> PhaseSpaceFunctionSample:
    """Samples of ``D_alpha F(l) = F(alpha l)``: same values, grid divided by ``alpha``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    axes = tuple((a / alpha, b / alpha, n) for a, b, n in F.axes)
    meta = dict(F.meta)
    meta["dilation"] = meta.get("dilation", 1.0) * alpha
    return PhaseSpaceFunctionSample(axes, F.values, meta)


def _column_names(d):
    if d == 1:
        return ["x", "omega"]
    return [f"x{i + 1}" for i in range(d)] + [f"w{i + 1}" for i in range(d)]


def write_sample(F: PhaseSpaceFunctionSample, path) -> None:
    """Write ``F`` as CSV plus a ``<path>.json`` sidecar with the grid metadata."""
    pts = F.points()
    vals = F.values.ravel()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_column_names(F.dim_d) + ["re", "im"])
        for p, v in zip(pts, vals):
            w.writerow([repr(float(c)) for c in p] + [repr(float(v.real)), repr(float(v.imag))])
    with open(str(path) + ".json", "w") as fh:
        json.dump({"axes": [list(a) for a in F.axes], "meta": F.meta}, fh, indent=2, sort_keys=True)


def read_sample(path) -> PhaseSpaceFunctionSample:
    with open(str(path) + ".json") as fh:
        side = json.load(fh)
    axes = [tuple(a) for a in side["axes"]]
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    vals = (data[:, -2] + 1j * data[:, -1]).reshape(tuple(int(a[2]) for a in axes))
    return PhaseSpaceFunctionSample(axes, vals, side.get("meta", {}))
