"""Window functions g on R^d.

Windows are tensor products of one-dimensional factors.  Hermite functions
use the Fourier-invariant convention with Gaussian weight ``exp(-pi t^2)``,
so that ``h_0(t) = 2^{1/4} exp(-pi t^2)`` and ``h_n`` is an eigenfunction of
the Fourier transform with eigenvalue ``(-i)^n``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

MAX_HERMITE_ORDER = 20
# |g(t)| below this beyond the support radius
SUPPORT_EPS = 1e-16
PARITY_TOL = 1e-8


class WindowError(ValueError):
    pass


def hermite_function(n: int, t) -> np.ndarray:
    """Evaluate the L2-normalized Hermite function ``h_n`` by the three-term recurrence."""
    t = np.asarray(t, dtype=float)
    u = math.sqrt(2.0 * math.pi) * t
    h_prev = np.zeros_like(t)
    h = 2.0**0.25 * np.exp(-math.pi * t * t)
    for k in range(n):
        h_prev, h = h, math.sqrt(2.0 / (k + 1)) * u * h - math.sqrt(k / (k + 1)) * h_prev
    return h


@lru_cache(maxsize=None)
def _hermite_radius(n: int) -> float:
    t = np.arange(0.0, 20.0, 0.01)
    big = np.nonzero(np.abs(hermite_function(n, t)) >= SUPPORT_EPS)[0]
    return float(t[big[-1]] + 0.02)


class _Hermite1D:
    def __init__(self, n: int):
        self.n = n
        self.radius = _hermite_radius(n)

    def __call__(self, t):
        return hermite_function(self.n, t)


class _Sampled1D:
    def __init__(self, t, samples):
        self.t = t
        self.samples = samples
        self.radius = float(t[-1])
        self._re = CubicSpline(t, samples.real)
        self._im = CubicSpline(t, samples.imag)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) <= self.radius
        tc = np.where(inside, t, 0.0)
        return np.where(inside, self._re(tc) + 1j * self._im(tc), 0.0)


class _Reflected1D:
    def __init__(self, base):
        self.base = base
        self.radius = base.radius

    def __call__(self, t):
        return self.base(-np.asarray(t, dtype=float))


@dataclass(frozen=True)
class Window:
    """A tensor-product window with the metadata the frame theorems need.

    ``decay_ok`` stands in for membership in Feichtinger's algebra: it is
    exact for the Hermite family and a tail-decay heuristic for sampled data.
    """

    dim_d: int
    kind: str
    parity: str
    decay_ok: bool
    factors: tuple
    index: tuple | None = None
    label: str = ""

    @property
    def parity_sign(self) -> int:
        return {"even": 1, "odd": -1}.get(self.parity, 0)

    @property
    def radius(self) -> float:
        return max(f.radius for f in self.factors)

    def __call__(self, t):
        return evaluate(self, t)


def _parity_of_sum(n) -> str:
    return "even" if sum(n) % 2 == 0 else "odd"


def hermite_window(n, d: int = 1) -> Window:
    """Tensor product Hermite function ``h_n``, ``n`` an int or a multi-index."""
    if d < 1:
        raise WindowError("d must be >= 1")
    n = (int(n),) * d if np.isscalar(n) else tuple(int(k) for k in n)
    if len(n) != d:
        raise WindowError(f"multi-index {n} does not match d = {d}")
    if any(k < 0 for k in n):
        raise WindowError("Hermite indices must be non-negative")
    if any(k > MAX_HERMITE_ORDER for k in n):
        raise WindowError(f"Hermite order exceeds cap {MAX_HERMITE_ORDER}")
    label = "hermite:" + ",".join(map(str, n))
    return Window(d, "hermite", _parity_of_sum(n), True,
                  tuple(_Hermite1D(k) for k in n), n, label)


def gaussian_window(d: int = 1) -> Window:
    """``2^{d/4} exp(-pi |t|^2)``."""
    if d < 1:
        raise WindowError("d must be >= 1")
    return Window(d, "gaussian", "even", True, tuple(_Hermite1D(0) for _ in range(d)),
                  (0,) * d, "gaussian")


def _l2_norm_sampled(t, spline_eval):
    # 4-point Gauss on every cell integrates the piecewise polynomial |g|^2 to rounding
    x, w = np.polynomial.legendre.leggauss(4)
    a, b = t[:-1], t[1:]
    nodes = (0.5 * (a + b))[:, None] + (0.5 * (b - a))[:, None] * x[None, :]
    vals = np.abs(spline_eval(nodes)) ** 2
    return math.sqrt(float(np.sum(vals * w[None, :] * (0.5 * (b - a))[:, None])))


def sampled_window(samples, grid) -> Window:
    """Window interpolating complex samples on a symmetric uniform grid.

    ``grid`` is ``(t_min, t_max, count)`` or the array of grid points.  The
    count must be odd and the grid symmetric about 0.
    """
    samples = np.asarray(samples, dtype=complex).ravel()
    if isinstance(grid, tuple) and len(grid) == 3:
        t = np.linspace(grid[0], grid[1], int(grid[2]))
    else:
        t = np.asarray(grid, dtype=float).ravel()
    if t.size != samples.size:
        raise WindowError("samples and grid differ in length")
    if t.size < 5 or t.size % 2 == 0:
        raise WindowError("grid needs an odd number (>= 5) of points")
    step = np.diff(t)
    if np.any(step <= 0) or np.max(np.abs(step - step.mean())) > 1e-9 * max(1.0, abs(step.mean())):
        raise WindowError("grid must be uniform and increasing")
    if abs(t[0] + t[-1]) > 1e-9 * max(1.0, t[-1]):
        raise WindowError("grid must be symmetric about 0")
    if not np.all(np.isfinite(samples)):
        raise WindowError("samples must be finite")
    peak = float(np.max(np.abs(samples)))
    if peak == 0:
        raise WindowError("all-zero samples")
    t = t - 0.5 * (t[0] + t[-1])
    raw = _Sampled1D(t, samples)
    norm = _l2_norm_sampled(t, raw)
    samples = samples / norm
    factor = _Sampled1D(t, samples)

    rev = samples[::-1]
    scale = float(np.max(np.abs(samples)))
    if np.max(np.abs(rev - samples)) <= PARITY_TOL * scale:
        parity = "even"
    elif np.max(np.abs(rev + samples)) <= PARITY_TOL * scale:
        parity = "odd"
    else:
        parity = "neither"
    outer = np.abs(t) >= 0.9 * t[-1]
    decay_ok = bool(np.max(np.abs(samples[outer])) < 1e-6 * scale)
    return Window(1, "sampled", parity, decay_ok, (factor,), None, "sampled")


def read_window_csv(path) -> Window:
    """Read a sampled window from a CSV file with header ``t,re,im``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["t", "re", "im"]:
            raise WindowError(f"expected header t,re,im, got {','.join(header)}")
        try:
            rows = [[float(v) for v in row] for row in reader if row]
        except ValueError as exc:
            raise WindowError(f"non-numeric entry in {path}") from exc
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != 3:
        raise WindowError("window CSV must have three columns")
    w = sampled_window(data[:, 1] + 1j * data[:, 2], data[:, 0])
    return Window(w.dim_d, w.kind, w.parity, w.decay_ok, w.factors, None, f"sampled:{path}")


def evaluate(g: Window, t):
    """``g(t)`` for ``t`` of shape ``(..., d)`` (a scalar is accepted when d = 1)."""
    t = np.asarray(t, dtype=float)
    if g.dim_d == 1 and (t.ndim == 0 or t.shape[-1] != 1):
        t = t[..., None]
    if t.shape[-1] != g.dim_d:
        raise WindowError(f"evaluation point has dimension {t.shape[-1]}, window has {g.dim_d}")
    out = np.ones(t.shape[:-1], dtype=complex)
    for i, f in enumerate(g.factors):
        out = out * f(t[..., i])
    return out[()] if out.ndim == 0 else out


def reflect(g: Window) -> Window:
    """The reflection ``t -> g(-t)``."""
    factors = tuple(f.base if isinstance(f, _Reflected1D) else _Reflected1D(f) for f in g.factors)
    return Window(g.dim_d, g.kind, g.parity, g.decay_ok, factors, g.index,
                  g.label[:-1] if g.label.endswith("~") else g.label + "~")


def parse_window_spec(spec: str, d: int = 1) -> Window:
    """Parse ``hermite:N``, ``hermite:N1,N2``, ``gaussian`` or ``sampled:PATH``."""
    spec = spec.strip()
    if spec == "gaussian":
        return gaussian_window(d)
    kind, _, arg = spec.partition(":")
    if kind == "hermite" and arg:
        try:
            idx = [int(v) for v in arg.split(",")]
        except ValueError as exc:
            raise WindowError(f"bad Hermite index in {spec!r}") from exc
        return hermite_window(idx[0] if len(idx) == 1 else idx, d if len(idx) == 1 else len(idx))
    if kind == "sampled" and arg:
        return read_window_csv(arg)
    raise WindowError(f"unknown window spec {spec!r}")
