"""Certified sums of sum_n term(d_n).

A sum is a finite partial sum plus two-sided integral-test bounds on the
tail, each end rounded once via math.fsum and widened by 4 ulp per term for
the term evaluation. Every form here behaves like ratio(d) * d^(-p) with the ratio
squeezed into a known range once d exceeds d_{M+1}, so the sequence only has
to bound sum_{n>M} d_n^(-p).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .digits import DigitError, DigitSequence, LogFamily, MissingTailCertificate

INF = math.inf
M_DEFAULT = 100_000
# relative slack on closed-form tail integrals and ratio bounds
_TAIL_REL = 1e-12


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"bad interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        if math.isinf(self.hi):
            return self.hi
        return 0.5 * (self.lo + self.hi)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def subset_of(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def scale(self, k: float) -> "Interval":
        return Interval(_down(self.lo * k), _up(self.hi * k))

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    def log(self) -> "Interval":
        lo = -INF if self.lo <= 0 else _down(math.log(self.lo))
        hi = INF if math.isinf(self.hi) else _up(math.log(self.hi))
        if math.isinf(self.lo):
            lo = INF
        return Interval(lo, hi)

    def to_list(self):
        return [self.lo, self.hi]

    def __str__(self):
        return f"[{self.lo:.12g}, {self.hi:.12g}]"


def _down(x):
    return x if math.isinf(x) else math.nextafter(x, -INF)


def _up(x):
    return x if math.isinf(x) else math.nextafter(x, INF)


def compare_to(iv: Interval, threshold: float) -> str:
    """'below', 'above' or 'undetermined at width w' for a strict threshold."""
    if iv.hi < threshold:
        return "below"
    if iv.lo > threshold:
        return "above"
    return f"undetermined at width {iv.width:.3g}"


# ---------------------------------------------------------------- term forms


@dataclass(frozen=True)
class PowerOfSquareMinusOne:
    """(d^2 - 1)^(-t)"""

    t: float

    @property
    def exponent(self):
        return 2.0 * self.t

    def terms(self, d):
        return ((d - 1.0) * (d + 1.0)) ** (-self.t)

    def ratio_bounds(self, D):
        return 1.0, (1.0 - 1.0 / D**2) ** (-self.t)


@dataclass(frozen=True)
class PowerOfShift:
    """(d + sigma)^(-2t), sigma in {-1, 0, 1}"""

    t: float
    sigma: int = 0

    def __post_init__(self):
        if self.sigma not in (-1, 0, 1):
            raise ValueError("sigma must be -1, 0 or 1")

    @property
    def exponent(self):
        return 2.0 * self.t

    def terms(self, d):
        return (d + self.sigma) ** (-2.0 * self.t)

    def ratio_bounds(self, D):
        r = (1.0 + self.sigma / D) ** (-2.0 * self.t)
        return (1.0, r) if self.sigma < 0 else (r, 1.0)


@dataclass(frozen=True)
class CosineQuadratic:
    """(d^2 + 1 - 2 d cos(theta))^(-t)"""

    t: float
    theta: float

    @property
    def exponent(self):
        return 2.0 * self.t

    def terms(self, d):
        c, s = math.cos(self.theta), math.sin(self.theta)
        return ((d - c) ** 2 + s * s) ** (-self.t)

    def ratio_bounds(self, D):
        # term / d^-2t = g(u)^-t with g(u) = 1 + u^2 - 2u cos(theta), u = 1/d in (0, 1/D]
        c = math.cos(self.theta)
        u1 = 1.0 / D
        vals = [1.0, 1.0 + u1 * u1 - 2.0 * u1 * c]
        if 0.0 < c < u1:
            vals.append(1.0 - c * c)
        return max(vals) ** (-self.t), min(vals) ** (-self.t)


@dataclass(frozen=True)
class Reciprocal:
    """1/d"""

    @property
    def exponent(self):
        return 1.0

    def terms(self, d):
        return 1.0 / d

    def ratio_bounds(self, D):
        return 1.0, 1.0


# ---------------------------------------------------------------- summation


@lru_cache(maxsize=16)
def _digit_array(seq: DigitSequence, M: int) -> np.ndarray:
    d = seq.digits(np.arange(1, M + 1, dtype=np.int64))
    d.flags.writeable = False
    return d


def digit_array(seq: DigitSequence, M: int) -> np.ndarray:
    return _digit_array(seq, int(M))


_EPS = 2.0**-52


def _widened_sum(values: list, extra: float, nonneg: bool, sign: int) -> float:
    # one correctly rounded sum, so an extra tail bound cannot be lost to the
    # rounding of the head; 5 eps * sum|x| covers 4 ulp per term plus 1 ulp
    # for the result, and grows monotonically with the sum
    values.append(extra)
    try:
        s = math.fsum(values)
        mass = s if nonneg and extra >= 0 else math.fsum(map(abs, values))
    finally:
        values.pop()
    slack = 5.0 * _EPS * mass
    return _up(s + slack) if sign > 0 else _down(s - slack)


def partial_sum(values: np.ndarray, extra_lo: float = 0.0, extra_hi: float = 0.0) -> Interval:
    """Exactly rounded sum widened by 4 ulp per term and 1 ulp for the result.

    extra_lo / extra_hi are folded into the lower / upper sum before rounding.
    """
    arr = np.asarray(values, dtype=float)
    nonneg = bool((arr >= 0).all())
    vals = arr.tolist()
    return Interval(_widened_sum(vals, extra_lo, nonneg, -1), _widened_sum(vals, extra_hi, nonneg, 1))


def sum_series(seq: DigitSequence, form, M: int = M_DEFAULT) -> Interval:
    """Interval containing sum_{n>=1} form(d_n)."""
    if M < 1:
        raise ValueError("cutoff M must be >= 1")
    if not seq.has_tail():
        raise MissingTailCertificate(
            f"{seq.kind} sequence has no declared tail law, so no tail envelope for exponent {form.exponent:g}"
        )
    p = form.exponent
    if not p > 0:
        raise ValueError("term forms need t > 0")
    if not seq.converges(p):
        return Interval(INF, INF)
    M = max(int(M), seq.tail_start)
    tlo, thi = seq.tail_power_sum(p, M)
    rlo, rhi = form.ratio_bounds(seq.digit(M + 1))
    return partial_sum(form.terms(digit_array(seq, M)), rlo * tlo * (1.0 - _TAIL_REL), rhi * thi * (1.0 + _TAIL_REL))


def tail_series(seq: DigitSequence, form, start: int, M: int = M_DEFAULT) -> Interval:
    """Interval for sum_{n >= start} form(d_n)."""
    from .digits import tail_shift

    return sum_series(tail_shift(seq, start), form, M)


def s_lambda(lam: float, M: int = M_DEFAULT) -> Interval:
    """sum_n 1/d_n for the log family with parameter lam."""
    if not lam > 1:
        raise DigitError("s(lambda) diverges for lambda <= 1")
    return sum_series(LogFamily(lam), Reciprocal(), M)


def s_lambda_bracket(lam: float):
    """Closed-form integral bracket for s(lambda)."""
    lo = math.log(3.0) / (2.0 * (lam - 1.0))
    hi = math.log(2.0) / (2.0 * (lam - 1.0)) * (math.log(3.0) / math.log(2.0)) ** lam
    return lo, hi
