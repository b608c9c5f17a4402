"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest -v tests/test_acceptance.py`` or directly as
``python tests/test_acceptance.py``.  Lines are printed even under pytest's
output capture.
"""
import math
import time

import numpy as np
import pytest

from gaborbounds.frame_bounds import (
    default_shape_grid,
    frame_bounds_gram,
    frame_bounds_janssen,
    janssen_separable,
    scan_lattices,
    verify_theorem_main,
)
from gaborbounds.identities import run_all
from gaborbounds.lattice import hexagonal_lattice, square_lattice
from gaborbounds.windows import hermite_window

SQ = square_lattice(0.5)
HEX = hexagonal_lattice(0.5)
LATTICES = {"square": SQ, "hexagonal": HEX}
# Gram section radius for the cross-method comparison
GRAM_RADIUS = 55.0


def criterion_1():
    parts, ok = [], True
    for n in (1, 3):
        for name, L in LATTICES.items():
            t0 = time.perf_counter()
            rep = verify_theorem_main(hermite_window(n), L)
            dt = time.perf_counter() - t0
            good = (rep.hypotheses_met and abs(rep.phi_at_zero) <= 1e-8
                    and rep.lower_A <= 1e-6 * rep.upper_B and dt < 30)
            ok &= good
            parts.append(f"h{n}/{name}: phi(0)={rep.phi_at_zero:.1e} A={rep.lower_A:.1e} "
                         f"B={rep.upper_B:.4f} {dt:.1f}s")
    return ok, "; ".join(parts)


def criterion_2():
    t0 = time.perf_counter()
    fb = frame_bounds_janssen(hermite_window(2), SQ)
    dt = time.perf_counter() - t0
    return fb.lower_A <= 1e-3 and dt < 60, f"A={fb.lower_A:.3e} B={fb.upper_B:.5f} {dt:.1f}s"


def criterion_3():
    t0 = time.perf_counter()
    fb = frame_bounds_janssen(hermite_window(2), HEX)
    dt = time.perf_counter() - t0
    ok = abs(fb.lower_A - 0.29) <= 0.02 and dt < 60
    return ok, f"A={fb.lower_A:.3e} (target 0.29 +- 0.02) B={fb.upper_B:.5f} {dt:.1f}s"


def criterion_4():
    parts, ok = [], True
    t0 = time.perf_counter()
    for n in (0, 2):
        for name, L in LATTICES.items():
            g = hermite_window(n)
            jb = frame_bounds_janssen(g, L)
            gb = frame_bounds_gram(g, L, GRAM_RADIUS)
            # relative to B: A may vanish
            ra = abs(gb.lower_A - jb.lower_A) / jb.upper_B
            rb = abs(gb.upper_B - jb.upper_B) / jb.upper_B
            ok &= ra <= 1e-3 and rb <= 1e-3
            parts.append(f"h{n}/{name}: dA={ra:.1e} dB={rb:.1e}")
    dt = time.perf_counter() - t0
    ok &= dt < 300
    return ok, "; ".join(parts) + f"; {dt:.0f}s"


def criterion_5():
    t0 = time.perf_counter()
    summary = run_all(quick=False)
    dt = time.perf_counter() - t0
    parts = []
    for s in summary["suites"]:
        mark = "ok" if s["passed"] else "FAILED"
        extra = f" [{s['detail']}]" if not s["passed"] and s["detail"] else ""
        parts.append(f"{s['name']} {s['max_residual']:.1e}<={s['tolerance']:.0e} {mark}{extra}")
    return summary["passed"] and dt < 300, "; ".join(parts) + f"; {dt:.1f}s"


def criterion_6():
    a = 1 / math.sqrt(2)
    parts, ok = [], True
    t0 = time.perf_counter()
    for n in (0, 2):
        sep = janssen_separable(hermite_window(n), a, a)
        ref = frame_bounds_janssen(hermite_window(n), SQ)
        da, db = abs(sep.lower_A - ref.lower_A), abs(sep.upper_B - ref.upper_B)
        ok &= da <= 1e-6 and db <= 1e-6
        parts.append(f"h{n}: dA={da:.1e} dB={db:.1e}")
    dt = time.perf_counter() - t0
    return ok and dt < 60, "; ".join(parts) + f"; {dt:.1f}s"


def _at(rows, tau, h):
    return next(r for r in rows if abs(r.tau - tau) < 1e-12 and abs(r.h - h) < 1e-12)


def criterion_7():
    t0 = time.perf_counter()
    taus, hs = default_shape_grid(11)
    h_sq = float(hs[np.argmin(np.abs(hs - 1.0))])
    h_hex = float(hs[np.argmin(np.abs(hs - math.sqrt(3) / 2))])
    rows0 = scan_lattices(hermite_window(0), 2.0, taus, hs, method="janssen", grid_res=32)
    rows2 = scan_lattices(hermite_window(2), 2.0, taus, hs, method="janssen", grid_res=32)
    dt = time.perf_counter() - t0
    tie = 1e-9
    A0 = np.array([r.A for r in rows0])
    B0 = np.array([r.B for r in rows0])
    sq0, hex0 = _at(rows0, 0.0, h_sq), _at(rows0, 0.5, h_hex)
    sep2 = [r for r in rows2 if r.tau == 0.0]
    sq2 = _at(sep2, 0.0, h_sq)
    checks = {
        "h0 square max A": sq0.A >= A0.max() - tie,
        "h0 hexagonal min B": hex0.B <= B0.min() + tie,
        "h2 square min A (separable)": sq2.A <= min(r.A for r in sep2) + tie,
    }
    argmax = rows0[int(np.argmax(A0))]
    ok = all(checks.values()) and all(r.converged for r in rows0 + rows2) and dt < 1800
    detail = "; ".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in checks.items())
    detail += (f"; h0 A(square)={sq0.A:.4f}, grid max A={argmax.A:.4f} at "
               f"(tau={argmax.tau:.2f}, h={argmax.h:.4f}); {dt:.1f}s")
    return ok, detail


CRITERIA = [
    (1, "odd windows at volume 1/2 are not frames", criterion_1),
    (2, "h2 on the square lattice has vanishing lower bound", criterion_2),
    (3, "h2 on the hexagonal lattice has lower bound 0.29", criterion_3),
    (4, "series and Gram finite section agree", criterion_4),
    (5, "identity suites", criterion_5),
    (6, "separable STFT series agrees with the adjoint series", criterion_6),
    (7, "extremal lattices on the 11x11 shape grid", criterion_7),
]


def report(num, title, fn):
    ok, detail = fn()
    line = f"CRITERION {num} {'PASS' if ok else 'FAIL'}: {title} -- {detail}"
    return ok, line


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, line = report(num, title, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [report(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
