import math

import numpy as np
import pytest
from scipy import integrate, special

from gaborbounds.windows import (
    MAX_HERMITE_ORDER,
    WindowError,
    evaluate,
    gaussian_window,
    hermite_function,
    hermite_window,
    parse_window_spec,
    read_window_csv,
    reflect,
    sampled_window,
)


def physicist_hermite(n, t):
    # independent closed form: h_n(t) = c_n H_n(sqrt(2 pi) t) exp(-pi t^2)
    c = 2.0**0.25 / math.sqrt(2.0**n * math.factorial(n))
    return c * special.eval_hermite(n, math.sqrt(2 * math.pi) * t) * np.exp(-math.pi * t * t)


@pytest.mark.parametrize("n", range(8))
def test_recurrence_matches_closed_form(n):
    t = np.linspace(-3, 3, 41)
    np.testing.assert_allclose(hermite_function(n, t), physicist_hermite(n, t), atol=1e-12)


def test_orthonormality_by_independent_quadrature():
    for m in range(5):
        for n in range(5):
            val = integrate.quad(lambda t: hermite_function(m, t) * hermite_function(n, t),
                                 -np.inf, np.inf, epsabs=1e-13)[0]
            assert val == pytest.approx(float(m == n), abs=1e-10)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_fourier_eigenfunction(n):
    w = 0.37
    re = integrate.quad(lambda t: hermite_function(n, t) * math.cos(2 * math.pi * w * t), -8, 8)[0]
    im = integrate.quad(lambda t: -hermite_function(n, t) * math.sin(2 * math.pi * w * t), -8, 8)[0]
    assert complex(re, im) == pytest.approx((-1j) ** n * hermite_function(n, w), abs=1e-10)


def test_parity_and_metadata():
    assert hermite_window(0).parity == "even"
    assert hermite_window(3).parity == "odd"
    assert hermite_window(3).parity_sign == -1
    assert hermite_window((1, 2), d=2).parity == "odd"
    assert hermite_window(1, d=2).parity == "even"
    assert hermite_window(2).decay_ok
    assert gaussian_window(2).dim_d == 2


def test_hermite_cap_and_errors():
    hermite_window(MAX_HERMITE_ORDER)
    with pytest.raises(WindowError):
        hermite_window(MAX_HERMITE_ORDER + 1)
    with pytest.raises(WindowError):
        hermite_window(-1)
    with pytest.raises(WindowError):
        hermite_window((1, 2), d=3)


def test_support_radius_is_tight():
    for n in (0, 4, 10):
        g = hermite_window(n)
        assert abs(hermite_function(n, g.radius)) < 1e-16
        assert g.radius < 8.0


def test_tensor_evaluation():
    g = hermite_window((1, 2), d=2)
    t = np.array([[0.3, -0.4], [1.0, 0.2]])
    expect = hermite_function(1, t[:, 0]) * hermite_function(2, t[:, 1])
    np.testing.assert_allclose(evaluate(g, t), expect)
    with pytest.raises(WindowError):
        evaluate(g, np.zeros(3))


def test_reflection():
    g = hermite_window(3)
    t = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(reflect(g)(t), -g(t))
    np.testing.assert_allclose(reflect(reflect(g))(t), g(t))


def test_sampled_window_recovers_hermite():
    t = np.linspace(-6, 6, 1201)
    g = sampled_window(3.0 * hermite_function(1, t), t)
    assert g.parity == "odd"
    assert g.decay_ok
    s = np.linspace(-2, 2, 17)
    np.testing.assert_allclose(g(s).real, hermite_function(1, s), atol=1e-6)


def test_sampled_window_detects_poor_decay_and_parity():
    t = np.linspace(-2, 2, 41)
    g = sampled_window(np.exp(-t * t) * (1 + 0.1 * t), t)
    assert g.parity == "neither"
    assert not g.decay_ok


def test_sampled_window_validation():
    t = np.linspace(-2, 2, 41)
    with pytest.raises(WindowError):
        sampled_window(np.ones(40), np.linspace(-2, 2, 40))
    with pytest.raises(WindowError):
        sampled_window(np.ones(41), np.linspace(-1, 3, 41))
    with pytest.raises(WindowError):
        sampled_window(np.zeros(41), t)
    bad = t.copy()
    bad[3] += 0.01
    with pytest.raises(WindowError):
        sampled_window(np.ones(41), bad)


def test_window_csv_roundtrip(tmp_path):
    t = np.linspace(-5, 5, 501)
    vals = hermite_function(2, t)
    path = tmp_path / "g.csv"
    rows = "\n".join(f"{float(a)!r},{float(b)!r},0.0" for a, b in zip(t, vals))
    path.write_text("t,re,im\n" + rows + "\n")
    g = read_window_csv(path)
    assert g.parity == "even"
    assert g(0.0).real == pytest.approx(hermite_function(2, 0.0), abs=1e-6)
    assert parse_window_spec(f"sampled:{path}").kind == "sampled"


def test_window_csv_header_checked(tmp_path):
    path = tmp_path / "g.csv"
    path.write_text("x,y\n0,1\n")
    with pytest.raises(WindowError):
        read_window_csv(path)


def test_parse_window_spec():
    assert parse_window_spec("hermite:3").index == (3,)
    assert parse_window_spec("hermite:1,2").dim_d == 2
    assert parse_window_spec("hermite:2", d=2).index == (2, 2)
    assert parse_window_spec("gaussian").kind == "gaussian"
    for bad in ("hermite:", "hermite:x", "cosine", "sampled:"):
        with pytest.raises(WindowError):
            parse_window_spec(bad)
