"""Pressure functions of F(d, T) and G(d, T), the threshold theta and regularity.

P_F has a closed form, log(T sum (d_n^2 - 1)^-t). P_G is only bracketed:
single-letter sandwich bounds, a cosine-corrected upper bound for T >= 2,
a rotation-average lower bound for T >= 3, and finite-word refinements.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .digits import DigitSequence, ExplicitPrefix, SystemSpec
from .series import (
    INF,
    M_DEFAULT,
    CosineQuadratic,
    Interval,
    PowerOfShift,
    PowerOfSquareMinusOne,
    _down,
    _up,
    digit_array,
    partial_sum,
    sum_series,
)

WORD_BUDGET = 4_000_000
PRUNE_FLOOR = 1e-300


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PressureValue:
    value: Interval
    method: str  # ClosedFormF, SandwichG, GeneralTUpper, T1Upper, RotationAverageLower, WordRefined

    @property
    def is_infinite(self):
        return math.isinf(self.value.lo)


def _log_T(S: Interval, T: int) -> Interval:
    return S.scale(T).log()


@lru_cache(maxsize=4096)
def pressure_F(spec: SystemSpec, t: float, M: int = M_DEFAULT) -> PressureValue:
    """log(T * sum (d_n^2 - 1)^-t)."""
    S = sum_series(spec.digits, PowerOfSquareMinusOne(t), M)
    return PressureValue(_log_T(S, spec.T), "ClosedFormF")


def rotation_lower_applies(t: float, T: int, d1: float) -> bool:
    """Whether sum_j |a e(j/T) + y|^-2t >= T a^-2t holds for all |y| <= 1, a >= d1.

    Expanding |1 + u|^-2t in powers of u = y e(-j/T)/a and averaging over the
    T rotations keeps the diagonal terms (>= 1 + t^2 |u|^2) and the cross terms
    whose index gap is a multiple of T (<= 2|u|^T / ((1-|u|^2)(1-|u|^T)) once the
    binomial coefficients are <= 1, i.e. t <= 1).
    """
    if T < 3 or not (0 < t <= 1):
        return False
    rho = 1.0 / d1
    return t * t >= 2.0 * rho ** (T - 2) / ((1 - rho * rho) * (1 - rho**T)) * (1 + 1e-12)


@lru_cache(maxsize=4096)
def pressure_G_sandwich(spec: SystemSpec, t: float, M: int = M_DEFAULT):
    """(lower, upper) PressureValues bracketing P_G(t)."""
    seq, T = spec.digits, spec.T
    lower = PressureValue(_log_T(sum_series(seq, PowerOfShift(t, 1), M), T), "SandwichG")
    if lower.is_infinite:
        inf = PressureValue(Interval(INF, INF), "SandwichG")
        return inf, inf
    if rotation_lower_applies(t, T, seq.digit(1)):
        rot = PressureValue(_log_T(sum_series(seq, PowerOfShift(t, 0), M), T), "RotationAverageLower")
        if rot.value.lo > lower.value.lo:
            lower = rot
    uppers = [PressureValue(_log_T(sum_series(seq, PowerOfShift(t, -1), M), T), "SandwichG")]
    if T == 1:
        uppers.append(PressureValue(sum_series(seq, PowerOfShift(t, 0), M).log(), "T1Upper"))
    else:
        uppers.append(PressureValue(cosine_sum(seq, t, T, M).log(), "GeneralTUpper"))
    upper = min(uppers, key=lambda pv: pv.value.hi)
    return lower, upper


def cosine_sum(seq: DigitSequence, t: float, T: int, M: int = M_DEFAULT) -> Interval:
    """sum_n sum_j (d_n^2 + 1 - 2 d_n cos(2 pi j / T))^-t."""
    total = None
    for j in range(T):
        iv = sum_series(seq, CosineQuadratic(t, 2 * math.pi * j / T), M)
        total = iv if total is None else total + iv
    return total


def generic_upper_G(spec: SystemSpec, t: float, M: int = M_DEFAULT) -> Interval:
    return _log_T(sum_series(spec.digits, PowerOfShift(t, -1), M), spec.T)


# ---------------------------------------------------------------- words


def letter(spec: SystemSpec, n: int, j: int) -> complex:
    return spec.digits.digit(n) * complex(math.cos(2 * math.pi * j / spec.T), math.sin(2 * math.pi * j / spec.T))


def continued_fraction(alphas, z: complex = 0j) -> complex:
    """[a_1, ..., a_N + z] = 1/(a_1 + 1/(a_2 + ... + 1/(a_N + z)))."""
    alphas = list(alphas)
    if not alphas:
        raise ValueError("empty continued fraction")
    x = 1.0 / (alphas[-1] + z)
    for a in reversed(alphas[:-1]):
        x = 1.0 / (a + x)
    return x


def apply_word(spec: SystemSpec, word, z: complex) -> complex:
    """s_{w_1} o ... o s_{w_N} (z)."""
    for n, j in reversed(list(word)):
        a = letter(spec, n, j)
        if spec.family == "F":
            z = (z + a.conjugate()) / (abs(a) ** 2 - 1.0)
        else:
            z = 1.0 / (z + a)
    return z


def word_derivative(spec: SystemSpec, word, z: complex = 0j) -> complex:
    """(s_w)'(z) from the product formulas."""
    alphas = [letter(spec, n, j) for n, j in word]
    if spec.family == "F":
        return complex(math.prod(1.0 / (abs(a) ** 2 - 1.0) for a in alphas))
    prod = 1.0 + 0j
    x = z
    for a in reversed(alphas):
        x = 1.0 / (a + x)
        prod *= x * x
    return (-1) ** len(alphas) * prod


def bdp_constant(r: float, eps: Optional[float] = None) -> float:
    """((2r + eps)/eps)^4, default eps = sqrt(r^2 - 4)/2."""
    if not r > 2:
        raise ValueError("distortion bound needs r > 2")
    top = math.sqrt(r * r - 4)
    if eps is None:
        eps = top / 2
    if not 0 < eps < top:
        raise ValueError(f"eps must lie in (0, {top:g})")
    return ((2 * r + eps) / eps) ** 4


@lru_cache(maxsize=8)
def _word_log_derivs(digits: DigitSequence, T: int, K: int, N: int):
    """log |g_w'(0)| for every word of length N over the first K digits, plus pruned count."""
    spec = SystemSpec("G", digits, T)
    alpha = spec.alphabet(K)
    x = 1.0 / alpha
    logd = 2.0 * np.log(np.abs(x))
    floor = math.log(PRUNE_FLOOR)
    pruned = 0
    for _ in range(N - 1):
        xn = 1.0 / (alpha[:, None] + x[None, :])
        logd = (logd[None, :] + 2.0 * np.log(np.abs(xn))).ravel()
        x = xn.ravel()
        keep = logd >= floor
        if not keep.all():
            pruned = pruned * alpha.size + int((~keep).sum())
            logd, x = logd[keep], x[keep]
        else:
            pruned *= alpha.size
    logd.flags.writeable = False
    return logd, pruned


def _expsum(logd: np.ndarray, t: float) -> Interval:
    v = np.exp(t * logd)
    s = float(v.sum())
    err = (v.size + 4) * 2.3e-16 * s
    return Interval(_down(s - err), _up(s + err))


@dataclass(frozen=True)
class WordRefinement:
    lower: float
    upper: float
    sandwich_lower: float
    sandwich_upper: float
    K: int
    N: int
    B: float

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def gain(self) -> str:
        parts = []
        if self.lower > self.sandwich_lower:
            parts.append("lower")
        if self.upper < self.sandwich_upper:
            parts.append("upper")
        return "+".join(parts) if parts else "no-gain"


def suggest_budget(K: int, T: int, N: int, budget: int):
    for n in range(N, 0, -1):
        k = int((budget ** (1.0 / n)) // T)
        if k >= 1:
            return min(k, K), n
    return 1, 1


def pressure_G_word_refine(
    spec: SystemSpec,
    t: float,
    K: int,
    N: int,
    eps: Optional[float] = None,
    M: int = M_DEFAULT,
    budget: int = WORD_BUDGET,
) -> WordRefinement:
    """Bracket P_G(t) with length-N words over the first K digits."""
    if spec.family != "G":
        raise ValueError("word refinement is for family G")
    if (K * spec.T) ** N > budget:
        k, n = suggest_budget(K, spec.T, N, budget)
        raise BudgetExceeded(
            f"{(K * spec.T) ** N} words exceed the budget {budget}; try K={k}, N={n}"
        )
    r = spec.digits.digit(1)
    B = bdp_constant(r, eps)
    logd, pruned = _word_log_derivs(spec.digits, spec.T, K, N)
    Sw = _expsum(logd, t)
    lower = _down((math.log(Sw.lo) - t * math.log(B)) / N)

    full = sum_series(spec.digits, PowerOfShift(t, -1), M).scale(spec.T)
    dK = digit_array(spec.digits, K) if K >= 1 else np.empty(0)
    SK = partial_sum((dK - 1.0) ** (-2.0 * t)).scale(spec.T)
    if math.isinf(full.hi):
        upper = INF
    else:
        escape = max(0.0, full.hi**N - SK.lo**N) * (1 + 1e-12)
        pruned_mass = pruned * (B * PRUNE_FLOOR) ** t
        upper = _up(math.log(B**t * Sw.hi + escape + pruned_mass) / N)
    lo_s, up_s = pressure_G_sandwich(spec, t, M)
    return WordRefinement(lower, upper, lo_s.value.lo, up_s.value.hi, K, N, B)


# ---------------------------------------------------------------- theta


@dataclass(frozen=True)
class ThetaResult:
    value: Interval
    exact: bool
    estimate: Optional[float] = None
    method: str = ""


def theta_estimate(seq: DigitSequence, N_max: int = 1_000_000) -> ThetaResult:
    """Numeric estimate of limsup log N / (2 log d_N) over the last decade of N.

    The interval runs from the windowed maximum of the raw ratio to the largest
    Stolz-Cesaro increment ratio on the same window; the raw ratio approaches
    its limit only like 1/log N, the increment ratio much faster.
    """
    lo_N = max(2, N_max // 10)
    N = np.arange(lo_N, N_max + 1, dtype=np.int64)
    d = seq.digits(N)
    raw = np.log(N) / (2 * np.log(d))
    raw_max = float(raw.max())
    grid = np.unique(np.geomspace(lo_N, N_max, 41).astype(np.int64))
    dg = seq.digits(grid)
    stolz = np.diff(np.log(grid)) / (2 * np.diff(np.log(dg)))
    stolz_max = float(stolz.max())
    lo, hi = min(raw_max, stolz_max), max(raw_max, stolz_max)
    return ThetaResult(Interval(lo, hi), False, stolz_max, "windowed limsup estimate")


def theta(seq: DigitSequence, N_max: int = 1_000_000) -> ThetaResult:
    if isinstance(seq, ExplicitPrefix) and seq.tail is None:
        return ThetaResult(Interval(0.0, 0.0), True, 0.0, "finite alphabet")
    th = seq.theta_exact()
    if th is not None:
        return ThetaResult(Interval(th, th), True, th, "closed form")
    return theta_estimate(seq, N_max)


# ---------------------------------------------------------------- regularity

HEREDITARILY_REGULAR = "HereditarilyRegular"
REGULAR_NOT_HEREDITARILY = "RegularNotHereditarily"
IRREGULAR = "Irregular"
UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Regularity:
    kind: str
    width: Optional[float] = None
    detail: str = ""

    @property
    def is_regular(self):
        return self.kind in (HEREDITARILY_REGULAR, REGULAR_NOT_HEREDITARILY)

    def label(self):
        if self.kind == UNDETERMINED:
            return f"Undetermined({self.width:.3g})"
        return self.kind


def pressure_bounds(spec: SystemSpec, t: float, M: int = M_DEFAULT) -> Interval:
    """Best certified [lower, upper] for P(t) from the single-letter bounds."""
    if spec.family == "F":
        return pressure_F(spec, t, M).value
    lo, up = pressure_G_sandwich(spec, t, M)
    if lo.is_infinite:
        return Interval(INF, INF)
    return Interval(lo.value.lo, max(up.value.hi, lo.value.lo))


def find_negative(spec: SystemSpec, start: float, M: int = M_DEFAULT, cap: float = 64.0):
    """Smallest doubling step t >= start with certified P(t) < 0, or None."""
    step = max(start, 1e-3)
    t = start + step
    while t <= cap:
        if pressure_bounds(spec, t, M).hi < 0:
            return t
        step *= 2
        t = start + step
    return None


def classify(spec: SystemSpec, M: int = M_DEFAULT) -> Regularity:
    seq = spec.digits
    if isinstance(seq, ExplicitPrefix) and seq.tail is None:
        return Regularity(HEREDITARILY_REGULAR, None, "finite alphabet")
    th = theta(seq)
    if not th.exact:
        return Regularity(UNDETERMINED, th.value.width, "theta is only an estimate")
    P = pressure_bounds(spec, th.value.hi, M)
    if math.isinf(P.lo):
        return Regularity(HEREDITARILY_REGULAR, None, f"series diverges at theta = {th.value.hi:g}")
    if P.hi < 0:
        return Regularity(IRREGULAR, None, f"P(theta) <= {P.hi:.6g} < 0")
    if P.lo >= 0:
        if find_negative(spec, th.value.hi, M) is not None:
            return Regularity(REGULAR_NOT_HEREDITARILY, None, f"P(theta) in {P}")
        return Regularity(UNDETERMINED, INF, "no certified negative pressure found below t = 64")
    return Regularity(UNDETERMINED, P.width, f"P(theta) in {P} straddles 0")
