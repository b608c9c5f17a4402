"""Optimal Gabor frame bounds.

Three routes are provided:

* :func:`frame_bounds_janssen` -- extrema of the periodic series
  ``phi(z) = vol^{-1} sum_{m in L adj} A g(m) exp(2 pi i sigma(m, z))``,
  valid when ``vol(L)^{-1/d}`` is an even integer;
* :func:`janssen_separable` -- the same bounds for ``alpha Z x beta Z`` from
  the STFT-based series;
* :func:`frame_bounds_gram` -- extreme eigenvalues of a finite section of
  the Gram matrix of the adjoint system (any lattice).

With the adjoint generator ``J M^{-T}``, ``sigma(m_k, M u) = k . u``, so
``phi(M u)`` is an ordinary Fourier series on the unit torus in ``u``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .lattice import (
    Lattice,
    adjoint_lattice,
    enumerate_indices,
    is_symplectic_lattice,
    shape_lattice,
    symplectic_matrix,
)
from .phase_space import ambiguity, stft
from .summation import (
    DEFAULT_TARGET_TAIL,
    ConvergenceError,
    even_redundancy,
    lattice_terms,
    phi_series,
)
from .windows import Window

DEFAULT_GRID_RES = 64
EXTREMA_TOL = 1e-6
# cap on phi grid points per refinement level
DEFAULT_MAX_GRID_POINTS = 2**22
NEGATIVE_SLACK = 1e-9
GRAM_ENTRY_TAIL = 1e-12
THREADS_ENV = "GABORBOUNDS_THREADS"


class PhaseModeError(ValueError):
    """``vol^{-1/d}`` is odd: the Gram matrix carries alternating signs."""


@dataclass(frozen=True)
class FrameBoundsResult:
    lower_A: float
    upper_B: float
    method: str
    grid_res: int
    truncation_radius: float
    converged: bool
    lattice: Lattice | None = None

    def __post_init__(self):
        if not (self.lower_A >= -NEGATIVE_SLACK and self.lower_A <= self.upper_B + NEGATIVE_SLACK):
            raise RuntimeError(f"inconsistent bounds A={self.lower_A!r}, B={self.upper_B!r}")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "lattice": self.lattice.to_dict() if self.lattice is not None else None,
            "A": self.lower_A,
            "B": self.upper_B,
            "converged": self.converged,
            "grid_res": self.grid_res,
            "truncation_radius": self.truncation_radius,
        }


@dataclass(frozen=True)
class JanssenSeries:
    """Coefficients ``A g(m)`` on the adjoint lattice."""

    lattice: Lattice
    base: Lattice
    indices: np.ndarray
    coefficients: np.ndarray
    phase_mode: str
    truncation_radius: float
    tail_estimate: float

    def coefficient(self, k) -> complex:
        k = np.asarray(k)
        hit = np.nonzero(np.all(self.indices == k, axis=1))[0]
        return complex(self.coefficients[hit[0]]) if hit.size else 0j

    def phi(self, z) -> np.ndarray:
        """Direct evaluation of the series at points ``z`` of shape ``(n, 2d)``."""
        z = np.atleast_2d(np.asarray(z, dtype=float))
        u = np.linalg.solve(self.base.generator, z.T).T
        vals = np.exp(2j * np.pi * (u @ self.indices.T)) @ self.coefficients
        return vals.real / self.base.volume

    def phi_grid(self, res: int) -> np.ndarray:
        """Values on ``fundamental_domain_grid(base, res)``, shape ``(res,) * 2d``."""
        return _torus_values(self.indices, self.coefficients, res) / self.base.volume


def _torus_values(indices, coeffs, res):
    n = indices.shape[1]
    C = np.zeros((res,) * n, dtype=complex)
    np.add.at(C, tuple((indices % res).T), coeffs)
    vals = np.fft.ifftn(C) * float(res) ** n
    imag = float(np.max(np.abs(vals.imag)))
    if imag > 1e-9 * max(1.0, float(np.max(np.abs(vals.real)))):
        raise RuntimeError(f"series is not real (imaginary part {imag:g})")
    return vals.real


def _polish(indices, coeffs, scale, u0, sign):
    """Refine a grid extremum of ``scale * Re sum c_k e^{2 pi i k.u}``."""
    k = indices.astype(float)

    def f(u):
        e = np.exp(2j * np.pi * (k @ u)) * coeffs
        val = sign * scale * float(np.sum(e).real)
        grad = sign * scale * (2 * np.pi * (k.T @ (1j * e))).real
        return val, grad

    res = minimize(f, u0, jac=True, method="BFGS", options={"gtol": 1e-12})
    return sign * float(res.fun), res.x


def _torus_extrema(indices, coeffs, scale, grid_res, tol, max_points, polish=True):
    n = indices.shape[1]
    res = int(grid_res)
    if res < 1 or res**n > max_points:
        raise ValueError(f"grid_res {grid_res} is not in [1, {max_points}^(1/{n})]")
    prev = None
    while True:
        vals = _torus_values(indices, coeffs, res) * scale
        lo, hi = float(vals.min()), float(vals.max())
        if polish:
            jmin = np.array(np.unravel_index(np.argmin(vals), vals.shape)) / res
            jmax = np.array(np.unravel_index(np.argmax(vals), vals.shape)) / res
            lo = min(lo, _polish(indices, coeffs, scale, jmin, 1.0)[0])
            hi = max(hi, _polish(indices, coeffs, scale, jmax, -1.0)[0])
        if prev is not None and abs(lo - prev[0]) < tol and abs(hi - prev[1]) < tol:
            return lo, hi, res, True
        if (2 * res) ** n > max_points:
            return lo, hi, res, False
        prev = (lo, hi)
        res *= 2


def _check_window(g: Window, L: Lattice):
    if g.dim_d != L.dim_d:
        raise ValueError("window and lattice dimensions differ")


def janssen_coefficients(g: Window, L: Lattice,
                         target_tail: float = DEFAULT_TARGET_TAIL) -> JanssenSeries:
    """Ambiguity function of ``g`` on the adjoint lattice, truncated to ``target_tail``."""
    _check_window(g, L)
    k = even_redundancy(L)
    if L.dim_d > 1 and not is_symplectic_lattice(L):
        raise ValueError("Laurent structure needs a symplectic lattice for d > 1")
    if k % 2:
        raise PhaseModeError(
            f"vol^(-1/d) = {k} is odd: alternating phase factors are not supported"
        )
    adj = adjoint_lattice(L)
    terms = lattice_terms(lambda p: ambiguity(g, g, p), adj, None, target_tail * L.volume)
    series = JanssenSeries(adj, L, terms.indices, terms.values, "trivial",
                           terms.truncation_radius, terms.tail_estimate)
    c0 = series.coefficient(np.zeros(2 * L.dim_d, dtype=int))
    if abs(c0 - 1.0) > 1e-8:
        raise ValueError(f"window is not normalized: A g(0) = {c0}")
    _check_hermitian(terms.indices, terms.values)
    return series


def _check_hermitian(indices, values, tol=1e-9):
    lookup = {tuple(k): v for k, v in zip(indices, values)}
    for k, v in lookup.items():
        w = lookup.get(tuple(-np.asarray(k)))
        if w is None or abs(w - np.conj(v)) > tol:
            raise RuntimeError(f"coefficients are not Hermitian at index {k}")


def frame_bounds_janssen(g: Window, L: Lattice, grid_res: int = DEFAULT_GRID_RES,
                         target_tail: float = DEFAULT_TARGET_TAIL, tol: float = EXTREMA_TOL,
                         max_points: int = DEFAULT_MAX_GRID_POINTS,
                         polish: bool = True) -> FrameBoundsResult:
    """Frame bounds as the extrema of the series over a fundamental-domain grid.

    The grid resolution doubles until both extrema move by less than ``tol``.
    Each grid extremum is refined by a local optimizer when ``polish`` is set;
    the reported values are attained values of the series, so the lower bound
    is an upper estimate of the essential infimum and vice versa.
    """
    if not g.decay_ok:
        raise ValueError("window fails the decay check")
    series = janssen_coefficients(g, L, target_tail)
    lo, hi, res, ok = _torus_extrema(series.indices, series.coefficients, 1.0 / L.volume,
                                     grid_res, tol, max_points, polish)
    return FrameBoundsResult(lo, hi, "janssen_series", res, series.truncation_radius, ok, L)


def janssen_separable(g: Window, alpha: float, beta: float, grid_res: int = DEFAULT_GRID_RES,
                      target_tail: float = DEFAULT_TARGET_TAIL, tol: float = EXTREMA_TOL,
                      max_points: int = DEFAULT_MAX_GRID_POINTS,
                      polish: bool = True) -> FrameBoundsResult:
    """Frame bounds of ``alpha Z x beta Z`` from the STFT series.

    ``(alpha beta)^{-1} sum_{k,l} V g(k / beta, l / alpha) e^{2 pi i (k s + l t)}``
    is 1-periodic in ``(s, t)``; it is evaluated on a grid over one period,
    i.e. over the cell ``[0, alpha) x [0, beta)`` with ``s = x / alpha``,
    ``t = w / beta``.
    """
    if g.dim_d != 1:
        raise ValueError("separable formula is one-dimensional")
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    L = Lattice(np.diag([alpha, beta]))
    r = even_redundancy(L)
    if r % 2:
        raise PhaseModeError(f"redundancy {r} is odd: alternating phase factors are not supported")
    if not g.decay_ok:
        raise ValueError("window fails the decay check")
    coeff_lattice = Lattice(np.diag([1.0 / beta, 1.0 / alpha]))
    terms = lattice_terms(lambda p: stft(g, g, p), coeff_lattice, None, target_tail / r)
    lo, hi, res, ok = _torus_extrema(terms.indices, terms.values, float(r), grid_res, tol,
                                     max_points, polish)
    return FrameBoundsResult(lo, hi, "janssen_separable", res, terms.truncation_radius, ok, L)


def gram_section(g: Window, L: Lattice, section_radius: float):
    """Finite section ``vol^{-1} (<rho(m) g, rho(m') g>)`` over adjoint points within the radius.

    Returns ``(matrix, points)``.
    """
    _check_window(g, L)
    adj = adjoint_lattice(L)
    ks = enumerate_indices(adj, section_radius)
    if len(ks) < 9:
        raise ValueError(f"section of radius {section_radius:g} has only {len(ks)} points")
    pts = ks @ adj.generator.T
    # entries beyond the tail-controlled ball are below GRAM_ENTRY_TAIL in total
    terms = lattice_terms(lambda p: ambiguity(g, g, p), adj, None, GRAM_ENTRY_TAIL)
    dk, vals = terms.indices, terms.values
    if np.max(np.abs(vals.imag)) == 0.0:
        vals = vals.real
    lo = np.minimum(dk.min(axis=0), (ks.min(axis=0) - ks.max(axis=0)))
    shape = np.maximum(dk.max(axis=0), ks.max(axis=0) - ks.min(axis=0)) - lo + 1
    table = np.zeros(int(np.prod(shape)), dtype=vals.dtype)
    strides = np.cumprod(np.concatenate([shape[1:], [1]])[::-1])[::-1]
    table[(dk - lo) @ strides] = vals
    n = len(ks)
    idx = np.zeros((n, n), dtype=np.int32 if table.size < 2**31 else np.int64)
    for a in range(ks.shape[1]):
        idx += (ks[None, :, a] - ks[:, None, a] - lo[a]) * strides[a]
    G = table[idx]
    del idx
    # sigma(m_i, m_j) = k_i^T (M^T J M) k_j
    S = adj.generator.T @ symplectic_matrix(L.dim_d) @ adj.generator
    sig = (ks @ S) @ ks.T
    parity = np.rint(sig)
    if np.max(np.abs(sig - parity)) <= 1e-9:
        odd = (parity % 2) != 0
        if np.any(odd):
            G[odd] *= -1
    else:
        G = G * np.exp(1j * np.pi * sig)
    G /= L.volume
    return G, pts


def _extreme_eigs(G):
    e = np.linalg.eigvalsh(G)
    return float(e[0]), float(e[-1])


def frame_bounds_gram(g: Window, L: Lattice, section_radius: float = 6.0,
                      inner_ratio: float = 0.8, rel_tol: float = 1e-3) -> FrameBoundsResult:
    """Extreme eigenvalues of a finite Gram section of the adjoint system.

    A nested section of radius ``inner_ratio * section_radius`` is solved as
    well: by eigenvalue interlacing its spectrum must lie inside the larger
    one.  ``converged`` reports whether the extremes moved less than
    ``rel_tol * B`` between the two sections.
    """
    G, pts = gram_section(g, L, section_radius)
    if np.max(np.abs(np.diag(G) - 1.0 / L.volume)) > 1e-8 / L.volume:
        raise RuntimeError("Gram diagonal is not constant; window is not normalized")
    lo, hi = _extreme_eigs(G)
    inner = np.linalg.norm(pts, axis=1) <= inner_ratio * section_radius
    ok = True
    if np.count_nonzero(inner) >= 9:
        lo_i, hi_i = _extreme_eigs(G[np.ix_(inner, inner)])
        slack = 1e-10 * max(1.0, abs(hi))
        if lo > lo_i + slack or hi < hi_i - slack:
            raise RuntimeError("eigenvalues of nested sections do not interlace")
        ok = max(lo_i - lo, hi - hi_i) <= rel_tol * hi
    return FrameBoundsResult(lo, hi, "gram_finite_section", 0, float(section_radius), ok, L)


@dataclass(frozen=True)
class TheoremReport:
    hypotheses_met: bool
    parity_odd: bool
    symplectic: bool
    critical_volume: bool
    phi_at_zero: float | None
    lower_A: float | None
    upper_B: float | None
    conclusion: str
    passed: bool
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def verify_theorem_main(g: Window, L: Lattice, grid_res: int = DEFAULT_GRID_RES,
                        target_tail: float = DEFAULT_TARGET_TAIL, phi_tol: float = 1e-8,
                        bound_ratio: float = 1e-6, volume_tol: float = 1e-10) -> TheoremReport:
    """Check that an odd window on a symplectic lattice of volume ``2^-d`` gives no frame."""
    notes = []
    parity = g.parity == "odd"
    if not parity:
        notes.append(f"window parity is {g.parity}, not odd")
    try:
        symp = g.dim_d == L.dim_d and is_symplectic_lattice(L)
    except ValueError as exc:
        symp = False
        notes.append(str(exc))
    if not symp:
        notes.append("lattice is not symplectic")
    crit = abs(L.volume - 2.0 ** (-L.dim_d)) <= volume_tol
    if not crit:
        notes.append(f"volume {L.volume:.12g} differs from 2^-d")
    met = parity and symp and crit

    phi0 = lower = upper = None
    try:
        phi0 = phi_series(g, L, None, target_tail)
        fb = frame_bounds_janssen(g, L, grid_res, target_tail)
        lower, upper = fb.lower_A, fb.upper_B
        if not fb.converged:
            notes.append("grid extrema did not converge")
    except (ValueError, ConvergenceError) as exc:
        notes.append(f"bounds not computed: {exc}")

    if not met:
        return TheoremReport(False, parity, symp, crit, phi0, lower, upper,
                             "hypotheses not met; no conclusion", False, notes)
    if phi0 is None or lower is None:
        return TheoremReport(True, parity, symp, crit, phi0, lower, upper,
                             "computation failed", False, notes)
    vanished = abs(phi0) <= phi_tol and lower <= bound_ratio * upper
    conclusion = "not a frame: lower frame bound vanishes" if vanished else \
        "inconsistent: lower frame bound does not vanish"
    return TheoremReport(True, parity, symp, crit, phi0, lower, upper, conclusion, vanished, notes)


# lattice shape scans

@dataclass(frozen=True)
class ScanRow:
    s: float
    tau: float
    h: float
    A: float
    B: float
    converged: bool
    error: str = ""


def default_shape_grid(n: int = 11) -> tuple[np.ndarray, np.ndarray]:
    """``tau`` in ``[0, 1/2]`` and ``h`` values that contain both 1 and ``sqrt(3)/2``.

    The grid therefore contains the square (0, 1) and hexagonal
    (1/2, sqrt(3)/2) shapes.
    """
    if n < 6:
        raise ValueError("shape grid needs at least 6 points per axis")
    taus = np.linspace(0.0, 0.5, n)
    step = (1.0 - math.sqrt(3.0) / 2.0) / 5.0
    hs = math.sqrt(3.0) / 2.0 + step * (np.arange(n) - (n - 6) // 2)
    return taus, hs


def _thread_count(threads):
    if threads is not None:
        return max(1, int(threads))
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def scan_lattices(g: Window, density: float = 2.0, taus=None, hs=None, method: str = "auto",
                  grid_res: int = 32, target_tail: float = DEFAULT_TARGET_TAIL,
                  section_radius: float = 6.0, threads: int | None = None) -> list[ScanRow]:
    """Frame bounds over lattices ``s [[1, tau], [0, h]]`` of fixed density.

    Rows are ordered by ``tau`` then ``h``.  Rows that fail keep their place
    with NaN bounds and the error message.
    """
    if g.dim_d != 1:
        raise ValueError("shape scans are two-dimensional (d = 1)")
    if taus is None or hs is None:
        dt, dh = default_shape_grid()
        taus = dt if taus is None else taus
        hs = dh if hs is None else hs
    if method == "auto":
        r = density
        method = "janssen" if abs(r - round(r)) < 1e-9 and round(r) % 2 == 0 else "gram"
    if method not in ("janssen", "gram"):
        raise ValueError(f"unknown method {method!r}")
    params = [(float(t), float(h)) for t in taus for h in hs]

    def row(p):
        tau, h = p
        L, s = shape_lattice(tau, h, density)
        try:
            if method == "janssen":
                fb = frame_bounds_janssen(g, L, grid_res, target_tail)
            else:
                fb = frame_bounds_gram(g, L, section_radius)
            return ScanRow(s, tau, h, fb.lower_A, fb.upper_B, fb.converged)
        except (ValueError, RuntimeError) as exc:
            return ScanRow(s, tau, h, math.nan, math.nan, False, str(exc))

    n = _thread_count(threads)
    if n == 1:
        return [row(p) for p in params]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(row, params))


def scan_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "tau", "h", "A", "B", "converged"])
    for r in rows:
        w.writerow([repr(r.s), repr(r.tau), repr(r.h), repr(r.A), repr(r.B), str(r.converged).lower()])
    return buf.getvalue()


def result_to_json(result) -> str:
    payload = result.to_dict() if hasattr(result, "to_dict") else result
    return json.dumps(payload, indent=2) + "\n"
