import json
import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from gaborbounds.frame_bounds import (
    FrameBoundsResult,
    PhaseModeError,
    default_shape_grid,
    frame_bounds_gram,
    frame_bounds_janssen,
    gram_section,
    janssen_coefficients,
    janssen_separable,
    result_to_json,
    scan_lattices,
    scan_to_csv,
    verify_theorem_main,
)
from gaborbounds.lattice import (
    Lattice,
    fundamental_domain_grid,
    hexagonal_lattice,
    shape_lattice,
    square_lattice,
)
from gaborbounds.windows import hermite_function, hermite_window, sampled_window

SQ = square_lattice(0.5)
HEX = hexagonal_lattice(0.5)


def theta(s):
    return float(mpmath.jtheta(3, mpmath.pi * s, mpmath.exp(-mpmath.pi)))


def test_gaussian_square_bounds_match_theta_functions():
    # phi factorizes into 2 theta(s) theta(t) for the Gaussian on (1/sqrt 2) Z^2
    fb = frame_bounds_janssen(hermite_window(0), SQ)
    assert fb.converged
    assert fb.lower_A == pytest.approx(2 * theta(0.5) ** 2, abs=1e-9)
    assert fb.upper_B == pytest.approx(2 * theta(0.0) ** 2, abs=1e-9)


def test_coefficients_of_gaussian():
    series = janssen_coefficients(hermite_window(0), SQ)
    pts = series.indices @ series.lattice.generator.T
    hit = np.nonzero(np.all(np.abs(pts - [math.sqrt(2), 0.0]) < 1e-12, axis=1))[0]
    assert series.coefficients[hit[0]] == pytest.approx(math.exp(-math.pi), abs=1e-14)
    assert series.coefficient([0, 0]) == pytest.approx(1.0)
    assert series.phase_mode == "trivial"


def test_coefficients_of_h1_follow_sign_pattern():
    series = janssen_coefficients(hermite_window(1), HEX)
    pts = series.indices @ series.lattice.generator.T
    r2 = np.sum(pts**2, axis=1)
    expect = (1 - np.pi * r2) * np.exp(-np.pi * r2 / 2)
    np.testing.assert_allclose(series.coefficients, expect, atol=1e-12)


def test_coefficients_are_hermitian():
    series = janssen_coefficients(hermite_window(2), shape_lattice(0.3, 0.9, 2.0)[0])
    lookup = {tuple(k): v for k, v in zip(series.indices, series.coefficients)}
    for k, v in lookup.items():
        assert lookup[tuple(-np.array(k))] == pytest.approx(np.conj(v), abs=1e-9)


def test_phi_grid_matches_direct_evaluation():
    series = janssen_coefficients(hermite_window(2), HEX)
    res = 8
    grid = series.phi_grid(res).ravel()
    direct = series.phi(fundamental_domain_grid(HEX, res))
    np.testing.assert_allclose(grid, direct, atol=1e-12)


def test_odd_window_critical_density():
    for L in (SQ, HEX):
        fb = frame_bounds_janssen(hermite_window(1), L)
        assert fb.lower_A <= 1e-6 * fb.upper_B
        assert fb.lower_A >= -1e-9


def test_h2_square_lower_bound_vanishes():
    fb = frame_bounds_janssen(hermite_window(2), SQ)
    assert fb.lower_A <= 1e-4 * fb.upper_B


def test_upper_bound_below_absolute_series():
    g = hermite_window(2)
    series = janssen_coefficients(g, HEX)
    fb = frame_bounds_janssen(g, HEX)
    assert fb.upper_B <= np.sum(np.abs(series.coefficients)) / HEX.volume + 1e-9


def test_preconditions():
    with pytest.raises(PhaseModeError):
        frame_bounds_janssen(hermite_window(0), square_lattice(1.0))
    with pytest.raises(ValueError):
        frame_bounds_janssen(hermite_window(0), square_lattice(0.4))
    t = np.linspace(-2, 2, 41)
    poor = sampled_window(np.exp(-t * t), t)
    with pytest.raises(ValueError):
        frame_bounds_janssen(poor, SQ)
    with pytest.raises(ValueError):
        frame_bounds_janssen(hermite_window(0, d=2), SQ)


def test_result_invariants_and_json():
    with pytest.raises(RuntimeError):
        FrameBoundsResult(2.0, 1.0, "janssen_series", 64, 1.0, True)
    with pytest.raises(RuntimeError):
        FrameBoundsResult(-0.1, 1.0, "janssen_series", 64, 1.0, True)
    fb = frame_bounds_janssen(hermite_window(0), HEX, grid_res=16)
    d = json.loads(result_to_json(fb))
    assert set(d) == {"method", "lattice", "A", "B", "converged", "grid_res", "truncation_radius"}
    assert d["method"] == "janssen_series"
    np.testing.assert_allclose(d["lattice"]["M"], HEX.generator)


def rho_inner(g, l1, l2):
    """``<rho(l1) g, rho(l2) g>`` by direct quadrature, rho(x, w) g(s) = e^{-pi i x w} e^{2 pi i w s} g(s - x)."""
    def shifted(l, s):
        x, w = l
        return np.exp(-1j * np.pi * x * w) * np.exp(2j * np.pi * w * s) * hermite_function(g, s - x)

    def f(s):
        return shifted(l1, s) * np.conj(shifted(l2, s))

    re = integrate.quad(lambda s: f(s).real, -9, 9, limit=400, epsabs=1e-13)[0]
    im = integrate.quad(lambda s: f(s).imag, -9, 9, limit=400, epsabs=1e-13)[0]
    return complex(re, im)


def test_gram_entries_against_direct_inner_products():
    L = Lattice(np.array([[0.9, 0.2], [0.0, 0.75]]))
    G, pts = gram_section(hermite_window(2), L, 3.0)
    rng = np.random.default_rng(1)
    for i, j in rng.integers(0, len(pts), size=(12, 2)):
        expect = rho_inner(2, pts[j], pts[i]) / L.volume
        assert G[i, j] == pytest.approx(expect, abs=1e-10)


def test_gram_diagonal_and_symmetry():
    G, _ = gram_section(hermite_window(1), HEX, 3.0)
    np.testing.assert_allclose(np.diag(G) * HEX.volume, 1.0, atol=1e-12)
    np.testing.assert_allclose(G, np.conj(G.T), atol=1e-13)


def test_gram_agrees_with_janssen_for_gaussian():
    jb = frame_bounds_janssen(hermite_window(0), SQ)
    gb = frame_bounds_gram(hermite_window(0), SQ, 20.0)
    assert gb.method == "gram_finite_section"
    assert abs(gb.lower_A - jb.lower_A) <= 2e-3 * jb.upper_B
    assert abs(gb.upper_B - jb.upper_B) <= 2e-3 * jb.upper_B


def test_gram_lowest_eigenvalue_decreases_for_odd_window():
    lows = [frame_bounds_gram(hermite_window(1), SQ, r).lower_A for r in (4.0, 8.0, 12.0)]
    assert lows[0] > lows[1] > lows[2] >= -1e-9
    assert lows[2] < 0.1


def test_gram_handles_odd_redundancy():
    fb = frame_bounds_gram(hermite_window(0), square_lattice(1.0), 8.0)
    assert fb.lower_A >= -1e-9


def test_gram_section_too_small():
    with pytest.raises(ValueError):
        gram_section(hermite_window(0), SQ, 0.5)


@pytest.mark.parametrize("n", [0, 2])
def test_separable_series_agrees(n):
    a = 1 / math.sqrt(2)
    sep = janssen_separable(hermite_window(n), a, a)
    ref = frame_bounds_janssen(hermite_window(n), SQ)
    assert sep.method == "janssen_separable"
    assert abs(sep.lower_A - ref.lower_A) <= 1e-6
    assert abs(sep.upper_B - ref.upper_B) <= 1e-6


def test_separable_rectangular_lattice():
    sep = janssen_separable(hermite_window(0), 0.5, 1.0)
    ref = frame_bounds_janssen(hermite_window(0), Lattice(np.diag([0.5, 1.0])))
    assert abs(sep.lower_A - ref.lower_A) <= 1e-6
    assert abs(sep.upper_B - ref.upper_B) <= 1e-6


def test_separable_odd_window_and_refusal():
    a = 1 / math.sqrt(2)
    assert janssen_separable(hermite_window(1), a, a).lower_A <= 1e-6
    with pytest.raises(PhaseModeError):
        janssen_separable(hermite_window(0), 1.0, 1.0)
    with pytest.raises(ValueError):
        janssen_separable(hermite_window(0), 0.7, 0.7)


def test_verify_reports():
    rep = verify_theorem_main(hermite_window(1), SQ)
    assert rep.hypotheses_met and rep.passed
    assert abs(rep.phi_at_zero) <= 1e-8
    assert rep.lower_A <= 1e-6 * rep.upper_B
    rep = verify_theorem_main(hermite_window(3), HEX)
    assert rep.passed
    rep = verify_theorem_main(hermite_window(0), SQ)
    assert not rep.hypotheses_met and not rep.parity_odd and not rep.passed
    assert rep.conclusion.startswith("hypotheses not met")
    rep = verify_theorem_main(hermite_window(1), square_lattice(0.25))
    assert not rep.critical_volume and not rep.passed
    assert set(rep.to_dict()) >= {"hypotheses_met", "phi_at_zero", "lower_A", "conclusion"}


def test_default_shape_grid_contains_square_and_hexagon():
    taus, hs = default_shape_grid()
    assert len(taus) == len(hs) == 11
    assert np.any(np.isclose(hs, 1.0)) and np.any(np.isclose(hs, math.sqrt(3) / 2))
    assert taus[0] == 0.0 and taus[-1] == 0.5


def test_scan_order_csv_and_thread_independence():
    taus, hs = [0.0, 0.5], [math.sqrt(3) / 2, 1.0]
    g = hermite_window(0)
    rows1 = scan_lattices(g, 2.0, taus, hs, grid_res=16, threads=1)
    rows3 = scan_lattices(g, 2.0, taus, hs, grid_res=16, threads=3)
    assert scan_to_csv(rows1) == scan_to_csv(rows3)
    assert [(r.tau, r.h) for r in rows1] == [(t, h) for t in taus for h in hs]
    text = scan_to_csv(rows1)
    assert text.splitlines()[0] == "s,tau,h,A,B,converged"
    assert len(text.splitlines()) == 5


def test_scan_flags_failed_rows():
    rows = scan_lattices(hermite_window(0), 2.0, [0.0], [1.0], method="janssen",
                         grid_res=10**6)
    assert not rows[0].converged and math.isnan(rows[0].A) and rows[0].error


def test_scan_auto_uses_gram_for_odd_density():
    rows = scan_lattices(hermite_window(0), 1.5, [0.0], [1.0], section_radius=5.0)
    assert rows[0].A > 0


def test_separable_scan_extremes():
    taus, hs = default_shape_grid()
    rows = scan_lattices(hermite_window(0), 2.0, [0.0], hs, grid_res=32)
    A = [r.A for r in rows]
    assert rows[int(np.argmax(A))].h == pytest.approx(1.0)
    rows = scan_lattices(hermite_window(2), 2.0, [0.0], hs, grid_res=32)
    A = [r.A for r in rows]
    assert rows[int(np.argmin(A))].h == pytest.approx(1.0)

