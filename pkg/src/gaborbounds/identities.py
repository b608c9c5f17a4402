"""Numerical identity suites used by ``check-identities`` and the test-suite.

Every suite returns a :class:`SuiteResult` holding the largest residual
seen, the tolerance it was held to and the number of cases.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .lattice import Lattice, hexagonal_lattice, square_lattice
from .phase_space import (
    ambiguity,
    dilate,
    stft,
    symplectic_fourier,
    tabulate,
    wigner,
    wigner_via_ambiguity,
)
from .summation import (
    gaussian_function,
    poisson_check,
    symplectic_poisson_check,
    vanishing_sum_check,
)
from .windows import hermite_window

SEED = 20240611


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    max_residual: float
    tolerance: float
    cases: int
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _result(name, residuals, tol, detail=""):
    worst = float(max(residuals)) if residuals else math.inf
    return SuiteResult(name, bool(worst <= tol), worst, tol, len(residuals), detail)


def random_lattices(n: int, rng, vol_range=(0.3, 3.0)) -> list[Lattice]:
    """Random 2x2 generators rescaled to volumes drawn from ``vol_range``."""
    out = []
    while len(out) < n:
        M = rng.normal(size=(2, 2))
        if np.linalg.cond(M) > 8:
            continue
        v = rng.uniform(*vol_range)
        out.append(Lattice(M * math.sqrt(v / abs(np.linalg.det(M)))))
    return out


def poisson_suite(n_lattices: int = 5, tol: float = 1e-9, seed: int = SEED) -> SuiteResult:
    """Standard and symplectic Poisson summation for Gaussians on random lattices."""
    rng = np.random.default_rng(seed)
    res = []
    for L in random_lattices(n_lattices, rng):
        B = rng.normal(size=(2, 2))
        P = B @ B.T + 0.7 * np.eye(2)
        F, F_hat, F_sigma = gaussian_function(P)
        z = rng.uniform(-1, 1, size=2)
        res.append(poisson_check(F, F_hat, L, z)[2])
        res.append(symplectic_poisson_check(F, F_sigma, L, z)[2])
    return _result("poisson", res, tol)


def symplectic_fourier_suite(n: int = 41, tol: float = 1e-6, windows=(0, 1)) -> SuiteResult:
    """``F_sigma(A g)`` against the Wigner distribution on an ``n x n`` grid."""
    res = []
    in_axes = ((-6.0, 6.0, n),) * 2
    out_axes = ((-1.5, 1.5, n),) * 2
    for k in windows:
        g = hermite_window(k)
        A = tabulate(lambda p: ambiguity(g, g, p), in_axes, {"transform": "ambiguity"})
        FA = symplectic_fourier(A, out_axes)
        W = tabulate(lambda p: wigner(g, g, p), out_axes)
        res.append(float(np.max(np.abs(FA.values - W.values))))
    return _result("symplectic_fourier", res, tol, f"grid {n}x{n}")


def algebraic_suite(n_points: int = 100, tol: float = 1e-8, seed: int = SEED) -> SuiteResult:
    """Wigner against rescaled ambiguity, and the ambiguity/STFT phase relation."""
    rng = np.random.default_rng(seed + 1)
    pts = rng.uniform(-2.5, 2.5, size=(n_points, 2))
    res = []
    for nf, ng in ((2, 2), (0, 1), (3, 1)):
        f, g = hermite_window(nf), hermite_window(ng)
        res.append(float(np.max(np.abs(wigner(f, g, pts) - wigner_via_ambiguity(f, g, pts)))))
        phase = np.exp(1j * np.pi * pts[:, 0] * pts[:, 1])
        res.append(float(np.max(np.abs(ambiguity(f, g, pts) - phase * stft(f, g, pts)))))
    return _result("algebraic", res, tol, f"{n_points} points")


def eigenfunction_samples(nf: int, ng: int, n_in: int = 81, n_out: int = 41):
    """``(F_sigma(D_sqrt2 A_g f), D_sqrt2 A_g f)`` sampled on a common output grid."""
    r2 = math.sqrt(2.0)
    f, g = hermite_window(nf), hermite_window(ng)
    base = tabulate(lambda p: ambiguity(f, g, p), ((-5.0 * r2, 5.0 * r2, n_in),) * 2)
    out_axes = ((-3.0, 3.0, n_out),) * 2
    FF = symplectic_fourier(dilate(base, r2), out_axes)
    ref = tabulate(lambda p: ambiguity(f, g, r2 * p), out_axes)
    return FF.values, ref.values


def eigenfunction_suite(n_in: int = 81, n_out: int = 41, tol: float = 1e-6,
                        pairs=((0, 0), (1, 0), (0, 1), (1, 1))) -> SuiteResult:
    """``F_sigma(D_sqrt2 A_g f) = +-D_sqrt2 A_g f`` with the sign given by the parity of g."""
    res, bad = [], []
    for nf, ng in pairs:
        FF, ref = eigenfunction_samples(nf, ng, n_in, n_out)
        sign = hermite_window(ng).parity_sign
        r = float(np.max(np.abs(FF - sign * ref)))
        res.append(r)
        if r > tol:
            bad.append(f"f=h{nf},g=h{ng}: {r:.3g}")
    return _result("eigenfunction_sign", res, tol, "; ".join(bad))


def vanishing_lattices() -> list[tuple[str, Lattice]]:
    """Three symplectic lattices of volume 1/2."""
    shear = np.array([[1.0, 0.3], [0.0, 1.0]]) / math.sqrt(2.0)
    return [("square", square_lattice(0.5)), ("hexagonal", hexagonal_lattice(0.5)),
            ("sheared", Lattice(shear))]


VANISHING_CASES = (
    (0, 1, "square"), (2, 3, "square"), (0, 1, "hexagonal"), (1, 1, "hexagonal"),
    (2, 1, "sheared"), (3, 3, "sheared"), (4, 1, "square"), (4, 3, "hexagonal"),
    (1, 3, "square"), (3, 1, "sheared"),
)


def vanishing_suite(cases=VANISHING_CASES, tol: float = 1e-7) -> SuiteResult:
    """Wigner and ambiguity lattice sums for odd g on volume-1/2 lattices."""
    lat = dict(vanishing_lattices())
    res = []
    for nf, ng, name in cases:
        ws, As = vanishing_sum_check(hermite_window(nf), hermite_window(ng), lat[name])
        res.extend([abs(ws), abs(As)])
    # the dilation route on the first case
    nf, ng, name = cases[0]
    ws, As = vanishing_sum_check(hermite_window(nf), hermite_window(ng), lat[name],
                                 mode="dilation")
    res.extend([abs(ws), abs(As)])
    return _result("vanishing_sums", res, tol, f"{len(cases)} combinations")


def run_all(quick: bool = False) -> dict:
    """Run every suite; quick mode shrinks the cases and relaxes tolerances 100-fold."""
    if quick:
        suites = [
            poisson_suite(2, 1e-7),
            symplectic_fourier_suite(41, 1e-4, windows=(0,)),
            algebraic_suite(20, 1e-6),
            eigenfunction_suite(65, 21, 1e-4),
            vanishing_suite(VANISHING_CASES[:3], 1e-5),
        ]
    else:
        suites = [
            poisson_suite(),
            symplectic_fourier_suite(),
            algebraic_suite(),
            eigenfunction_suite(),
            vanishing_suite(),
        ]
    return {
        "quick": quick,
        "passed": all(s.passed for s in suites),
        "suites": [s.to_dict() for s in suites],
    }
