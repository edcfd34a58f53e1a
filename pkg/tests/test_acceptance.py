"""Acceptance criteria, each at its stated tolerance.

Every test records its outcome under the criterion number; the terminal
summary prints one PASS/FAIL line per criterion.
"""

import json
import math
import time

import mpmath
import numpy as np
import pytest

from cifslab.cli import main
from cifslab.comparison import (
    F_STRICTLY_GREATER,
    L_of_t,
    compare,
    delta_t,
    irregular_witness,
    lambda0_locate,
    psi,
    q_func,
)
from cifslab.digits import AffineFamily, LogFamily, PolynomialFamily, SystemSpec, example_sequence, tail_shift
from cifslab.dimension import C1, C2, dimension_gap_threshold, dimension_report, hausdorff_dim
from cifslab.geometry import disc_tree, generator_disc, mobius_image, rasterize, Disc, word_disc
from cifslab.pressure import (
    _word_log_derivs,
    letter,
    pressure_F,
    pressure_G_sandwich,
    theta,
    theta_estimate,
    word_derivative,
)
from cifslab.series import PowerOfShift, _digit_array, s_lambda, sum_series


def clear_caches():
    for f in (pressure_F, pressure_G_sandwich, _word_log_derivs, _digit_array):
        f.cache_clear()


# ---------------------------------------------------------------- 1


def test_criterion_1_telescoping_dimension(criterion, tmp_path):
    clear_caches()
    spec = SystemSpec("F", AffineFamily(2, 0), 2)
    t0 = time.perf_counter()
    P = pressure_F(spec, 1.0, 100_000).value
    h = hausdorff_dim(spec, 1e-8, 100_000)
    elapsed = time.perf_counter() - t0
    out = tmp_path / "dim.json"
    code = main(["dim", "--d", "2n", "--T", "2", "--tol", "1e-8", "--M", "100000", "--out", str(out)])
    h_cli = json.loads(out.read_text())["results"]["h"]
    ok = (
        code == 0
        and 1 - 1e-6 <= h_cli[0] and h_cli[1] <= 1 + 1e-6
        and 1 - 1e-6 <= h.lo and h.hi <= 1 + 1e-6
        and P.contains(0.0) and P.width < 1e-8
        and elapsed < 1.0
    )
    criterion(1, ok, f"h = {h}, P_F(1) = {P} (width {P.width:.2e}), {elapsed:.2f} s")
    assert ok


# ---------------------------------------------------------------- 2

EX = example_sequence()


@pytest.fixture(scope="module")
def example_reports():
    clear_caches()
    t0 = time.perf_counter()
    rF = dimension_report(SystemSpec("F", EX, 4), 1e-8)
    rG = dimension_report(SystemSpec("G", EX, 4), 1e-8, K=30, N=3)
    v = compare(rF, rG)
    return rF, rG, v, time.perf_counter() - t0


def test_criterion_2_reciprocal_sum_window(criterion):
    S = sum_series(EX, PowerOfShift(0.5, -1), 100_000).scale(4)
    ok = 0.99 <= S.lo and S.hi <= 116 / 117 + 1e-9
    criterion(2, ok, f"4 sum 1/(d_n-1) = {S} against [0.99, 116/117 + 1e-9]")
    assert ok


def test_criterion_2_dimensions_and_verdict(criterion, example_reports):
    rF, rG, v, elapsed = example_reports
    ok = (
        rF.h.hi < 0.5
        and rG.h.hi < rF.h.lo
        and v.kind == F_STRICTLY_GREATER
        and v.tag == "four-rotation-half-corollary"
        and elapsed < 30
    )
    criterion(2, ok, f"h_F = {rF.h}, h_G = {rG.h}, verdict {v.label()}, {elapsed:.1f} s")
    assert ok


# ---------------------------------------------------------------- 3


@pytest.mark.parametrize("gamma", [1, 2, 3])
def test_criterion_3_polynomial_theta(criterion, gamma):
    seq = PolynomialFamily(2, gamma)
    th = theta(seq)
    est = theta_estimate(seq, 1_000_000)
    exact = 1 / (2 * gamma)
    ok = th.exact and th.value.lo == th.value.hi == exact and abs(est.estimate - exact) <= 0.02
    criterion(3, ok, f"gamma={gamma}: theta {th.value.lo:g}, estimate {est.estimate:.4f}")
    assert ok


def test_criterion_3_log_theta(criterion):
    th = theta(LogFamily(1.7))
    ok = th.exact and th.value.lo == th.value.hi == 0.5
    criterion(3, ok, f"log family theta {th.value.lo:g}")
    assert ok


# ---------------------------------------------------------------- 4

DELTA = 0.1


def test_criterion_4_odd_square_sum(criterion):
    S = sum_series(AffineFamily(2, 1), PowerOfShift(1.0, 0), 100_000)
    ok = 0.2337 - 5e-5 <= S.lo and S.hi <= 0.2337 + 5e-5 and S.contains(math.pi**2 / 8 - 1)
    criterion(4, ok, f"sum (2n+1)^-2 = {S}")
    assert ok


def test_criterion_4_delta_family(criterion):
    seq = AffineFamily(2, 1 + DELTA)
    Sd = sum_series(seq, PowerOfShift(1.0, 0), 100_000)
    flags = {T: dimension_report(SystemSpec("G", seq, T), 1e-3).flags for T in (1, 2, 5, 6)}
    ok = Sd.lo > 0.2
    ok &= all(C2 in flags[T] and C1 not in flags[T] for T in (5, 6))
    ok &= all(C1 in flags[T] and "restricted-interval-gap" in flags[T][C1] for T in (1, 2))
    criterion(4, ok, f"delta={DELTA}: sum {Sd.lo:.5f} > 0.2, flags {flags}")
    assert ok


# ---------------------------------------------------------------- 5


def test_criterion_5_q_and_delta(criterion):
    ts = np.linspace(0.05, 0.95, 19)
    q0 = [q_func(t, 0.0) for t in ts]
    ds = [delta_t(t) for t in ts]
    res = max(abs(q_func(t, d) - 4) for t, d in zip(ts, ds))
    ok = all(q == 4.0 for q in q0) and res <= 1e-8 and all(a > b for a, b in zip(ds, ds[1:]))
    criterion(5, ok, f"q(t,0)=4 on 19 t, max |q(t,delta_t)-4| = {res:.1e}, delta_t decreasing")
    assert ok


def test_criterion_5_L(criterion):
    grid = [round(0.01 * k, 2) for k in range(1, 51)]
    L75 = L_of_t(0.75)
    ok = all(L_of_t(t) == 2.0 for t in grid) and L75 <= 2.45
    criterion(5, ok, f"L = 2 on (0, 0.5], L(0.75) = {L75:.5f}")
    assert ok


def test_criterion_5_psi_argmax(criterion):
    rng = np.random.default_rng(20240501)
    worst = 0.0
    for _ in range(50):
        a = rng.uniform(2, 12)
        t = rng.uniform(0.05, 2.0)
        r = rng.uniform(0.05, 1.0)
        T = int(rng.integers(1, 9))
        # at least 10^4 points, aligned so that the lattice k/T lies on the grid
        n = -(-10_000 // T)
        grid = np.arange(n * T) / (n * T)
        v = psi(r, a, t, T, grid)
        on_lattice = v[::n].max()
        # grid maximum is attained on the lattice, up to rounding in the sum
        worst = max(worst, (v.max() - on_lattice) / on_lattice)
    ok = worst <= 1e-13
    criterion(5, ok, f"psi grid maximum on k/T for 50 draws (excess {worst:.1e})")
    assert ok


# ---------------------------------------------------------------- 6


def test_criterion_6_lambda0(criterion):
    t0 = time.perf_counter()
    lam = lambda0_locate(1e-3)
    s15, s2 = s_lambda(1.5), s_lambda(2.0)
    elapsed = time.perf_counter() - t0
    iv = lam.interval
    ok = 1.5 < iv.lo and iv.hi < 2 and iv.width <= 1e-3 and s15.lo > 1 and s2.hi < 1 and elapsed < 60
    criterion(6, ok, f"lambda_0 in {iv}, s(1.5) = {s15.lo:.5f}, s(2) = {s2.hi:.5f}, {elapsed:.1f} s")
    assert ok


def test_criterion_6_irregular_witness(criterion):
    t0 = time.perf_counter()
    w = irregular_witness(1, 0.05)
    elapsed = time.perf_counter() - t0
    ok = w.g_irregular and w.f_regular and elapsed < 60
    criterion(6, ok, f"delta=0.05: P_G(1/2) <= {w.PG_half_upper.hi:.5f}, P_F(1/2) in {w.PF_half}")
    assert ok


# ---------------------------------------------------------------- 7


def test_criterion_7_level_one_closed_form(criterion):
    spec = SystemSpec("G", AffineFamily(2, 1), 5)
    tree = disc_tree(spec, 1, K=10)
    alpha = spec.alphabet(10)
    exact = all(
        tree.centers[i] == generator_disc(a).center and tree.radii[i] == generator_disc(a).radius
        for i, a in enumerate(alpha)
    )
    # independent evaluation: |alpha| = d_n exactly, so |alpha|^2 - 1 = d_n^2 - 1
    d = np.repeat(AffineFamily(2, 1).digits(np.arange(1, 11)), 5)
    m = d * d - 1
    dev = max(np.max(np.abs(tree.centers - np.conj(alpha) / m)), np.max(np.abs(tree.radii - 1 / m)))
    hand = generator_disc(2) == Disc(2 / 3, 1 / 3) and generator_disc(2j).center == -2j / 3
    ok = tree.radii.size == 50 and exact and dev <= 1e-15 and hand
    criterion(7, ok, f"level-1 discs equal the closed form (max deviation {dev:.1e} from d_n^2 - 1 form)")
    assert ok


def test_criterion_7_tangency(criterion):
    errs = []
    for d in (2.0, 4.0, 6.0, 10.0, 100.0):
        a, b = generator_disc(d + 2), generator_disc(d)
        # rightmost point of the disc of d+2 and leftmost of the disc of d
        touch_a = a.center.real + a.radius
        touch_b = b.center.real - b.radius
        errs += [abs(touch_a - 1 / (d + 1)), abs(touch_b - 1 / (d + 1))]
    ok = max(errs) <= 1e-12
    criterion(7, ok, f"tangency residual {max(errs):.1e}")
    assert ok


def test_criterion_7_mobius_boundary(criterion):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        alpha = complex(*rng.normal(size=2))
        alpha *= rng.uniform(2, 20) / abs(alpha)
        c = complex(*rng.uniform(-0.5, 0.5, size=2))
        rho = rng.uniform(0, 1 - abs(c))
        img = mobius_image(alpha, Disc(c, rho))
        z = c + rho * np.exp(2j * np.pi * np.arange(64) / 64)
        w = 1 / (z + alpha)
        worst = max(worst, float(np.max(np.abs(np.abs(w - img.center) - img.radius))))
    ok = worst <= 1e-10
    criterion(7, ok, f"64-point boundary residual {worst:.1e}")
    assert ok


@pytest.mark.parametrize("family", ["F", "G"])
def test_criterion_7_nesting(criterion, family):
    rng = np.random.default_rng(11)
    spec = SystemSpec(family, AffineFamily(2, 1), 4)
    bad = 0
    for _ in range(1000):
        L = int(rng.integers(2, 7))
        word = [letter(spec, int(rng.integers(1, 9)), int(rng.integers(0, 4))) for _ in range(L)]
        if not word_disc(spec, word[:-1]).contains(word_disc(spec, word), 1e-12):
            bad += 1
    ok = bad == 0
    criterion(7, ok, f"{family}: {bad} nesting failures in 1000 words")
    assert ok


def test_criterion_7_depth_one_pixel_identical(criterion):
    seq = AffineFamily(2, 1e-9)
    imgs = []
    for fam in "FG":
        tree = disc_tree(SystemSpec(fam, seq, 5), 1, K=200)
        imgs.append(rasterize(tree.centers, tree.radii, 300, 300))
    ok = np.array_equal(imgs[0], imgs[1])
    criterion(7, ok, "depth-1 renders of F and G pixel-identical")
    assert ok


# ---------------------------------------------------------------- 8


def test_criterion_8_dimension_gap(criterion):
    # c = 1, gamma = 2; offset L = 1 so that d_1 = 4 >= 2
    spec = SystemSpec("F", PolynomialFamily(1, 2, 1), 1)
    g = dimension_gap_threshold(spec)
    h = hausdorff_dim(SystemSpec("F", tail_shift(spec.digits, g.q), 1), 1e-8)
    prev_fails = g.at_q_minus_1 is None or not g.at_q_minus_1.hi < 1
    ok = g.at_q.hi < 1 and prev_fails and h.hi < 1 / 3
    criterion(8, ok, f"q = {g.q}, series {g.at_q} at q and {g.at_q_minus_1} at q-1, shifted h = {h}")
    assert ok


# ---------------------------------------------------------------- 9


def _mp_apply(alphas, z, family):
    z = mpmath.mpc(z)
    for a in reversed(alphas):
        a = mpmath.mpc(a)
        if family == "F":
            z = (z + mpmath.conj(a)) / (abs(a) ** 2 - 1)
        else:
            z = 1 / (z + a)
    return z


def test_criterion_9_word_derivative_vs_finite_differences(criterion):
    rng = np.random.default_rng(9)
    worst = 0.0
    with mpmath.workdps(60):
        for k in range(100):
            family = "F" if k % 2 else "G"
            T = int(rng.integers(1, 7))
            spec = SystemSpec(family, AffineFamily(2, 1), T)
            L = int(rng.integers(1, 7))
            word = [(int(rng.integers(1, 6)), int(rng.integers(0, T))) for _ in range(L)]
            z = complex(*rng.uniform(-0.6, 0.6, size=2))
            alphas = [letter(spec, n, j) for n, j in word]
            h = mpmath.mpf("1e-20")
            fd = (_mp_apply(alphas, z + h, family) - _mp_apply(alphas, z - h, family)) / (2 * h)
            got = word_derivative(spec, word, z)
            worst = max(worst, float(abs(got - complex(fd)) / abs(fd)))
    ok = worst <= 1e-6
    criterion(9, ok, f"max relative error {worst:.1e} on 100 words")
    assert ok


# ---------------------------------------------------------------- 10


def test_criterion_10_determinism(criterion, tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    codes = []
    for p in paths:
        clear_caches()
        codes.append(main(["reproduce", "all", "--out", str(p)]))
    capsys.readouterr()
    ok = paths[0].read_bytes() == paths[1].read_bytes()
    criterion(10, ok, f"reproduce all twice: identical reports, exit codes {codes}")
    assert ok
