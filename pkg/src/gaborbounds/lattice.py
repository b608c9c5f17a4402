"""Lattices in phase space R^{2d}.

A lattice is stored through one generator matrix ``M`` whose columns are
basis vectors, so that the lattice is ``M @ Z^{2d}``.  Phase-space vectors
are laid out as ``(x_1, ..., x_d, omega_1, ..., omega_d)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_SYMPLECTIC_TOL = 1e-9
DEFAULT_POINT_CAP = 10**7


class LatticeError(ValueError):
    """Raised for invalid lattices or truncation requests that exceed a cap."""


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PhaseSpacePoint:
    """A point ``(x, omega)`` of the time-frequency plane."""

    x: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        x = _frozen(np.atleast_1d(self.x))
        omega = _frozen(np.atleast_1d(self.omega))
        if x.ndim != 1 or x.shape != omega.shape:
            raise ValueError("x and omega must be vectors of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(omega))):
            raise ValueError("phase-space point must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "omega", omega)

    @property
    def dim_d(self) -> int:
        return self.x.shape[0]

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.omega])

    @classmethod
    def from_array(cls, v) -> "PhaseSpacePoint":
        v = np.asarray(v, dtype=float).ravel()
        if v.size % 2:
            raise ValueError("phase-space vector must have even length")
        d = v.size // 2
        return cls(v[:d], v[d:])


def as_points(points) -> np.ndarray:
    """Coerce a point, a sequence of points or an ``(n, 2d)`` array to an ``(n, 2d)`` array."""
    if isinstance(points, PhaseSpacePoint):
        return points.as_array()[None, :]
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], PhaseSpacePoint):
        return np.array([p.as_array() for p in points])
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] % 2:
        raise ValueError(f"expected points of shape (n, 2d), got {arr.shape}")
    return arr


def symplectic_matrix(d: int) -> np.ndarray:
    """The standard symplectic matrix ``J = [[0, I], [-I, 0]]``."""
    eye = np.eye(d)
    zero = np.zeros((d, d))
    return np.block([[zero, eye], [-eye, zero]])


def symplectic_form(l, lp):
    """``sigma(l, l') = x . omega' - omega . x'``.

    Accepts :class:`PhaseSpacePoint` objects or arrays; array inputs of shape
    ``(..., 2d)`` broadcast against each other.
    """
    a = l.as_array() if isinstance(l, PhaseSpacePoint) else np.asarray(l, dtype=float)
    b = lp.as_array() if isinstance(lp, PhaseSpacePoint) else np.asarray(lp, dtype=float)
    if a.shape[-1] != b.shape[-1] or a.shape[-1] % 2:
        raise ValueError("symplectic_form: dimension mismatch")
    d = a.shape[-1] // 2
    out = np.sum(a[..., :d] * b[..., d:], axis=-1) - np.sum(a[..., d:] * b[..., :d], axis=-1)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class SymplecticCheck:
    is_symplectic: bool
    scale_c: float | None
    residual: float


def is_symplectic_matrix(S, tol: float = DEFAULT_SYMPLECTIC_TOL) -> SymplecticCheck:
    """Test whether ``S = c * S0`` with ``S0`` symplectic and ``c > 0``.

    ``c`` is fixed as ``|det S|^{1/2d}``; the residual is the max-norm of
    ``S0^T J S0 - J``.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
        raise ValueError("S must be a square matrix of even size")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = S.shape[0]
    det = np.linalg.det(S)
    if not np.isfinite(det) or abs(det) <= 1e-300 or np.linalg.cond(S) > 1e14:
        raise LatticeError("matrix is singular")
    c = abs(det) ** (1.0 / n)
    S0 = S / c
    J = symplectic_matrix(n // 2)
    residual = float(np.max(np.abs(S0.T @ J @ S0 - J)))
    ok = residual <= tol
    return SymplecticCheck(ok, c if ok else None, residual)


@dataclass(frozen=True)
class Lattice:
    """Full-rank lattice ``M Z^{2d}``."""

    generator: np.ndarray
    dim_d: int = field(init=False)
    volume: float = field(init=False)

    def __post_init__(self):
        M = _frozen(self.generator)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2 or M.shape[0] == 0:
            raise LatticeError("generator must be a non-empty 2d x 2d matrix")
        if not np.all(np.isfinite(M)):
            raise LatticeError("generator must be finite")
        vol = abs(float(np.linalg.det(M)))
        if vol <= 0 or np.linalg.cond(M) > 1e14:
            raise LatticeError("generator is not full rank")
        object.__setattr__(self, "generator", M)
        object.__setattr__(self, "dim_d", M.shape[0] // 2)
        object.__setattr__(self, "volume", vol)

    @property
    def density(self) -> float:
        return 1.0 / self.volume

    def point(self, k) -> np.ndarray:
        return self.generator @ np.asarray(k, dtype=float)

    def scaled(self, c: float) -> "Lattice":
        return Lattice(c * self.generator)

    def to_dict(self) -> dict:
        return {"M": self.generator.tolist()}


def square_lattice(volume: float, d: int = 1) -> Lattice:
    """``volume^{1/2d} Z^{2d}``."""
    if volume <= 0:
        raise LatticeError("volume must be positive")
    return Lattice(volume ** (1.0 / (2 * d)) * np.eye(2 * d))


def hexagonal_lattice(volume: float) -> Lattice:
    """Hexagonal lattice of the given volume in the plane (d = 1)."""
    if volume <= 0:
        raise LatticeError("volume must be positive")
    c = math.sqrt(2.0 * volume / math.sqrt(3.0))
    return Lattice(c * np.array([[1.0, 0.5], [0.0, math.sqrt(3.0) / 2.0]]))


def shape_lattice(tau: float, h: float, density: float) -> tuple[Lattice, float]:
    """Lattice ``s [[1, tau], [0, h]] Z^2`` normalized to ``density``; returns ``(lattice, s)``."""
    if h <= 0 or density <= 0:
        raise LatticeError("h and density must be positive")
    s = math.sqrt(1.0 / (density * h))
    return Lattice(s * np.array([[1.0, tau], [0.0, h]])), s


def is_symplectic_lattice(L: Lattice, tol: float = DEFAULT_SYMPLECTIC_TOL) -> bool:
    return is_symplectic_matrix(L.generator, tol).is_symplectic


def dual_lattice(L: Lattice) -> Lattice:
    """``M^{-T} Z^{2d}``."""
    return Lattice(np.linalg.inv(L.generator).T)


def adjoint_lattice(L: Lattice) -> Lattice:
    """``J M^{-T} Z^{2d}``.

    With this particular generator, ``sigma(adj.point(k), L.point(u)) = k . u``
    for all ``k, u``; the frame-bound code relies on that identity.
    """
    J = symplectic_matrix(L.dim_d)
    return Lattice(J @ np.linalg.inv(L.generator).T)


def _index_box(L: Lattice, radius: float, center=None) -> list[range]:
    Minv = np.linalg.inv(L.generator)
    c = np.zeros(2 * L.dim_d) if center is None else Minv @ center
    half = radius * np.linalg.norm(Minv, axis=1)
    return [range(int(math.floor(ci - hi)), int(math.ceil(ci + hi)) + 1) for ci, hi in zip(c, half)]


def enumerate_indices(L: Lattice, radius: float, cap: int = DEFAULT_POINT_CAP) -> np.ndarray:
    """Integer vectors ``k`` with ``|M k| <= radius`` in lexicographic order."""
    if radius < 0 or not np.isfinite(radius):
        raise LatticeError("radius must be finite and non-negative")
    n = 2 * L.dim_d
    expected = math.pi ** (n / 2) / math.gamma(n / 2 + 1) * radius**n / L.volume
    box = _index_box(L, radius)
    box_size = math.prod(len(r) for r in box)
    if expected > cap or box_size > 50 * cap:
        raise LatticeError(
            f"enumeration radius {radius:g} needs ~{expected:.3g} points (cap {cap})"
        )
    grids = np.meshgrid(*[np.arange(r.start, r.stop) for r in box], indexing="ij")
    ks = np.stack([g.ravel() for g in grids], axis=1)
    pts = ks @ L.generator.T
    # small slack so boundary points are not lost to rounding
    keep = np.einsum("ij,ij->i", pts, pts) <= radius * radius * (1 + 1e-12) + 1e-300
    ks = ks[keep]
    if len(ks) > cap:
        raise LatticeError(f"{len(ks)} points within radius {radius:g} exceed cap {cap}")
    return ks


def enumerate_points(L: Lattice, radius: float, cap: int = DEFAULT_POINT_CAP) -> np.ndarray:
    """Lattice points within ``radius`` of the origin as an ``(n, 2d)`` array.

    Rows are ordered lexicographically in the integer coordinates.
    """
    return enumerate_indices(L, radius, cap) @ L.generator.T


def fundamental_domain_grid(L: Lattice, res: int, cap: int = DEFAULT_POINT_CAP) -> np.ndarray:
    """Uniform grid ``M (j / res)``, ``j in {0..res-1}^{2d}``, as an ``(res^{2d}, 2d)`` array."""
    if int(res) != res or res < 1:
        raise LatticeError("res must be a positive integer")
    n = 2 * L.dim_d
    if res**n > cap:
        raise LatticeError(f"grid of {res}^{n} points exceeds cap {cap}")
    u = np.indices((res,) * n).reshape(n, -1).T / res
    return u @ L.generator.T


def same_point_set(L1: Lattice, L2: Lattice, radius: float = 5.0, tol: float = 1e-10) -> bool:
    """Compare two lattices as point sets inside a ball.

    Points within ``tol`` of the sphere are ignored to avoid boundary flicker.
    """
    if L1.dim_d != L2.dim_d:
        return False
    a = enumerate_points(L1, radius + 2 * tol)
    b = enumerate_points(L2, radius + 2 * tol)
    a = a[np.linalg.norm(a, axis=1) <= radius - tol]
    b = b[np.linalg.norm(b, axis=1) <= radius - tol]
    if len(a) != len(b):
        return False
    # every point of a has a match in the lattice L2 and vice versa
    for P, other in ((a, L2), (b, L1)):
        k = np.linalg.solve(other.generator, P.T).T
        if np.max(np.abs(P - np.rint(k) @ other.generator.T), initial=0.0) > tol:
            return False
    return True
