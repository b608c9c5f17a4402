"""Truncated lattice sums, Poisson summation checks and the periodized series.

Sums grow the truncation ball until a Gaussian envelope fitted to the
outermost terms predicts a remainder below ``target_tail``.  Reductions use
``math.fsum`` on real and imaginary parts, so results do not depend on the
order of the terms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from .lattice import (
    DEFAULT_POINT_CAP,
    Lattice,
    PhaseSpacePoint,
    adjoint_lattice,
    dual_lattice,
    enumerate_indices,
    is_symplectic_lattice,
    symplectic_form,
    symplectic_matrix,
)
from .phase_space import ambiguity, wigner
from .windows import Window

DEFAULT_TARGET_TAIL = 1e-10
NOISE_FLOOR = 1e-15


class ConvergenceError(RuntimeError):
    """A truncated sum hit the point cap before meeting its tail target."""


@dataclass(frozen=True)
class LatticeSumResult:
    value: complex
    truncation_radius: float
    tail_estimate: float
    terms_used: int


@dataclass(frozen=True)
class LatticeTerms:
    """Individual terms of a truncated lattice sum, sorted by norm then index."""

    indices: np.ndarray
    points: np.ndarray
    values: np.ndarray
    truncation_radius: float
    tail_estimate: float


def exact_sum(values) -> complex:
    values = np.asarray(values, dtype=complex)
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _zvec(z, n):
    if z is None:
        return np.zeros(n)
    v = z.as_array() if isinstance(z, PhaseSpacePoint) else np.asarray(z, dtype=float).ravel()
    if v.size != n:
        raise ValueError("shift z has the wrong dimension")
    return v


def _tail_bound(r, mags, R, vol, n, spacing):
    """Remainder estimate from a fit ``C exp(-a r^2)`` to the outer shell envelope."""
    outer = r >= 0.5 * R
    if np.count_nonzero(outer) < 4:
        return math.inf
    rr, mm = r[outer], mags[outer]
    # quadrature noise is not decay information
    mm = np.where(mm > NOISE_FLOOR * float(np.max(mags)), mm, 0.0)
    if not np.any(mm > 0):
        return 0.0
    edges = np.linspace(0.5 * R, R * (1 + 1e-12), 9)
    bins = np.digitize(rr, edges) - 1
    centers, peaks = [], []
    for b in range(8):
        sel = (bins == b) & (mm > 0)
        if np.any(sel):
            k = np.argmax(mm[sel])
            centers.append(rr[sel][k])
            peaks.append(mm[sel][k])
    centers = np.array(centers)
    peaks = np.maximum(np.array(peaks), 1e-300)
    if len(centers) < 3:
        return math.inf
    slope = np.polyfit(centers**2, np.log(peaks), 1)[0]
    a = -slope
    if not a > 0:
        return math.inf
    logC = float(np.max(np.log(peaks) + a * centers**2))
    # integral over the complement of the ball, started one spacing early
    r0 = max(R - spacing, 0.0)
    sphere = 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)
    integral = 0.5 * math.gamma(n / 2) * gammaincc(n / 2, a * r0 * r0) / a ** (n / 2)
    return float(math.exp(logC) * sphere * integral / vol)


def lattice_terms(F, L: Lattice, z=None, target_tail: float = DEFAULT_TARGET_TAIL,
                  radius: float | None = None, growth: float = 1.25,
                  cap: int = DEFAULT_POINT_CAP) -> LatticeTerms:
    """Evaluate ``F(l + z)`` for lattice points in a ball grown to meet ``target_tail``.

    ``F`` maps an ``(m, 2d)`` array of points to ``m`` values.  Values already
    computed for a smaller ball are reused when the ball grows.
    """
    if target_tail <= 0:
        raise ValueError("target_tail must be positive")
    n = 2 * L.dim_d
    zv = _zvec(z, n)
    spacing = float(np.max(np.linalg.norm(L.generator, axis=0)))
    R = radius if radius is not None else 3.0 * spacing
    known: dict[tuple, complex] = {}
    while True:
        ks = enumerate_indices(L, R, cap)
        pts = ks @ L.generator.T
        keys = [tuple(k) for k in ks]
        new = [i for i, k in enumerate(keys) if k not in known]
        if new:
            vals_new = np.asarray(F(pts[new] + zv), dtype=complex).reshape(-1)
            for i, v in zip(new, vals_new):
                known[keys[i]] = v
        vals = np.array([known[k] for k in keys], dtype=complex)
        r = np.linalg.norm(pts, axis=1)
        tail = _tail_bound(r, np.abs(vals), R, L.volume, n, spacing)
        if tail <= target_tail:
            order = np.lexsort(tuple(ks.T[::-1]) + (np.round(r, 12),))
            return LatticeTerms(ks[order], pts[order], vals[order], R, tail)
        R *= growth
        expected = math.pi ** (n / 2) / math.gamma(n / 2 + 1) * R**n / L.volume
        if expected > cap:
            raise ConvergenceError(
                f"lattice sum did not reach tail {target_tail:g} before the point cap "
                f"(radius {R:g}, tail estimate {tail:g})"
            )


def lattice_sum(F, L: Lattice, z=None, target_tail: float = DEFAULT_TARGET_TAIL,
                **kwargs) -> LatticeSumResult:
    """``sum_{l in L} F(l + z)`` with a tail estimate."""
    terms = lattice_terms(F, L, z, target_tail, **kwargs)
    return LatticeSumResult(exact_sum(terms.values), terms.truncation_radius,
                            terms.tail_estimate, len(terms.values))


# test functions with closed-form transforms

def gaussian_function(P):
    """``F(l) = exp(-pi l^T P l)`` with its Fourier and symplectic Fourier transforms."""
    P = np.asarray(P, dtype=float)
    Pinv = np.linalg.inv(P)
    scale = 1.0 / math.sqrt(np.linalg.det(P))
    J = symplectic_matrix(P.shape[0] // 2)

    def F(l):
        l = np.atleast_2d(l)
        return np.exp(-np.pi * np.einsum("ij,jk,ik->i", l, P, l)).astype(complex)

    def F_hat(xi):
        xi = np.atleast_2d(xi)
        return scale * np.exp(-np.pi * np.einsum("ij,jk,ik->i", xi, Pinv, xi)).astype(complex)

    def F_sigma(l):
        # sigma(l, l') = (J^T l) . l'
        return F_hat(np.atleast_2d(l) @ J)

    return F, F_hat, F_sigma


def poisson_check(F, F_hat, L: Lattice, z=None, target_tail: float = DEFAULT_TARGET_TAIL):
    """Both sides of ``sum F(l + z) = vol^{-1} sum_{dual} F_hat(m) exp(2 pi i m.z)``."""
    zv = _zvec(z, 2 * L.dim_d)
    lhs = lattice_sum(F, L, zv, target_tail).value
    D = dual_lattice(L)

    def modulated(m):
        return F_hat(m) * np.exp(2j * np.pi * (m @ zv))

    rhs = lattice_sum(modulated, D, None, target_tail * L.volume).value / L.volume
    return lhs, rhs, abs(lhs - rhs)


def symplectic_poisson_check(F, F_sigma, L: Lattice, z=None,
                             target_tail: float = DEFAULT_TARGET_TAIL):
    """Both sides of the Poisson formula over the adjoint lattice."""
    zv = _zvec(z, 2 * L.dim_d)
    lhs = lattice_sum(F, L, zv, target_tail).value
    A = adjoint_lattice(L)

    def modulated(m):
        return F_sigma(m) * np.exp(2j * np.pi * symplectic_form(m, zv))

    rhs = lattice_sum(modulated, A, None, target_tail * L.volume).value / L.volume
    return lhs, rhs, abs(lhs - rhs)


def _check_critical(g: Window, L: Lattice, tol: float):
    if g.parity != "odd":
        raise ValueError("window g must be odd")
    if g.dim_d != L.dim_d:
        raise ValueError("window and lattice dimensions differ")
    if not is_symplectic_lattice(L):
        raise ValueError("lattice is not symplectic")
    if abs(L.volume - 2.0 ** (-L.dim_d)) > tol:
        raise ValueError(f"lattice volume {L.volume:g} is not 2^-d")


def vanishing_sum_check(f: Window, g: Window, L: Lattice,
                        target_tail: float = DEFAULT_TARGET_TAIL,
                        mode: str = "direct", volume_tol: float = 1e-10):
    """Lattice sums that vanish for odd ``g`` on a symplectic lattice of volume ``2^-d``.

    ``mode="direct"`` returns ``(sum_L W_g f, sum_{L adj} A_g f)``.
    ``mode="dilation"`` rescales to the self-adjoint lattice ``sqrt(2) L`` and
    returns ``(sum W_g f(l / sqrt 2), sum 2^d A_g f(sqrt 2 m))`` over that
    lattice and its adjoint; both vanish as well.
    """
    _check_critical(g, L, volume_tol)
    d = L.dim_d
    if mode == "direct":
        ws = lattice_sum(lambda p: wigner(f, g, p), L, None, target_tail).value
        As = lattice_sum(lambda p: ambiguity(f, g, p), adjoint_lattice(L), None, target_tail).value
        return ws, As
    if mode == "dilation":
        L1 = L.scaled(math.sqrt(2.0))
        r2 = math.sqrt(2.0)
        ws = lattice_sum(lambda p: wigner(f, g, p / r2), L1, None, target_tail).value
        As = lattice_sum(lambda p: 2.0**d * ambiguity(f, g, r2 * p), adjoint_lattice(L1),
                         None, target_tail).value
        return ws, As
    raise ValueError(f"unknown mode {mode!r}")


def even_redundancy(L: Lattice, tol: float = 1e-9) -> int:
    """``vol(L)^{-1/d}`` as an integer; raises ``ValueError`` if it is not one."""
    r = L.volume ** (-1.0 / L.dim_d)
    k = round(r)
    if k < 1 or abs(r - k) > tol * max(1.0, r):
        raise ValueError(f"vol^(-1/d) = {r:.12g} is not a positive integer")
    return k


def phi_series(g: Window, L: Lattice, z=None, target_tail: float = DEFAULT_TARGET_TAIL) -> float:
    """``vol^{-1} sum_{m in L adj} A g(m) exp(2 pi i sigma(m, z))`` (real valued).

    Requires ``vol(L)^{-1/d}`` to be an even integer.
    """
    k = even_redundancy(L)
    if k % 2:
        raise ValueError("vol^(-1/d) is odd: alternating phase factors are not supported")
    zv = _zvec(z, 2 * L.dim_d)

    def F(m):
        return ambiguity(g, g, m) * np.exp(2j * np.pi * symplectic_form(m, zv))

    res = lattice_sum(F, adjoint_lattice(L), None, target_tail * L.volume)
    val = res.value / L.volume
    if abs(val.imag) > 1e-9:
        raise RuntimeError(f"series has imaginary part {val.imag:g}")
    return val.real
