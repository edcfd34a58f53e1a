"""Hausdorff dimension by bisection on certified pressure bounds, and the
measure phenomena that follow from polynomial growth.

Flags:
    C1_HausdorffMeasureZero   H_h(J) = 0
    C2_PackingMeasureInfinite Pi_h(J) = infinity
    C3_DimGap                 dim_H J < lower box dimension
    DensityAtZeroVanishes     m(B(0, r)) / r^h -> 0
"""

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .digits import DigitError, DigitSequence, GrowthProfile, SystemSpec, tail_shift
from .pressure import (
    Regularity,
    classify,
    pressure_bounds,
    pressure_G_word_refine,
    suggest_budget,
    theta,
    WORD_BUDGET,
)
from .series import (
    M_DEFAULT,
    Interval,
    PowerOfShift,
    PowerOfSquareMinusOne,
    sum_series,
)

C1 = "C1_HausdorffMeasureZero"
C2 = "C2_PackingMeasureInfinite"
C3 = "C3_DimGap"
DENSITY = "DensityAtZeroVanishes"


class DimensionUndetermined(RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class DimensionReport:
    spec: SystemSpec
    theta: Interval
    h: Interval
    regularity: Regularity
    packing_dim: Optional[Interval] = None
    flags: dict = field(default_factory=dict)  # flag -> justifying tag
    trace: list = field(default_factory=list)  # (tag, inputs, verdict)

    def add(self, tag, inputs, verdict):
        self.trace.append((tag, inputs, verdict))

    def to_dict(self):
        return {
            "spec": self.spec.to_config(),
            "theta": self.theta.to_list(),
            "h": self.h.to_list(),
            "regularity": self.regularity.label(),
            "packing_dim": None if self.packing_dim is None else self.packing_dim.to_list(),
            "flags": {k: self.flags[k] for k in sorted(self.flags)},
            "trace": [{"tag": t, "inputs": i, "verdict": v} for t, i, v in self.trace],
        }


# ---------------------------------------------------------------- bisection


def _bisect(pred, good, bad, tol):
    """Shrink [good, bad] (either order) keeping pred(good) true and pred(bad) false."""
    while abs(bad - good) > tol:
        m = 0.5 * (good + bad)
        if pred(m):
            good = m
        else:
            bad = m
    return good, bad


class _Curves:
    """Certified lower/upper bounds for P(t), with optional word refinement for G."""

    def __init__(self, spec, M, K, N, budget, words):
        self.spec, self.M = spec, M
        self.K, self.N = K, N
        self.words = words and spec.family == "G" and spec.digits.digit(1) > 2
        if self.words and (K * spec.T) ** N > budget:
            self.K, self.N = suggest_budget(K, spec.T, N, budget)
        self.budget = budget
        self.used_words = False

    def lower(self, t):
        P = pressure_bounds(self.spec, t, self.M)
        lo = P.lo
        if self.words and not math.isinf(lo):
            w = pressure_G_word_refine(self.spec, t, self.K, self.N, M=self.M, budget=self.budget)
            if w.lower > lo:
                lo, self.used_words = w.lower, True
        return lo

    def upper(self, t):
        P = pressure_bounds(self.spec, t, self.M)
        hi = P.hi
        if self.words and not math.isinf(hi):
            w = pressure_G_word_refine(self.spec, t, self.K, self.N, M=self.M, budget=self.budget)
            if w.upper < hi:
                hi, self.used_words = w.upper, True
        return hi


def hausdorff_dim(
    spec: SystemSpec,
    tol: float = 1e-8,
    M: int = M_DEFAULT,
    K: int = 30,
    N: int = 3,
    budget: int = WORD_BUDGET,
    words: bool = True,
    trace: Optional[list] = None,
) -> Interval:
    """Certified interval for dim_H J = inf{t : P(t) < 0}.

    h.lo is the last t with lower-bound pressure >= 0, h.hi the first t with
    upper-bound pressure <= 0; theta is a lower bound in every case.
    """
    trace = [] if trace is None else trace
    th = theta(spec.digits)
    if not th.exact:
        raise DimensionUndetermined(f"theta is only estimated in {th.value}")
    t0 = th.value.hi
    cv = _Curves(spec, M, K, N, budget, words)

    step, t_neg = tol, None
    while t0 + step <= 64.0:
        if cv.upper(t0 + step) < 0:
            t_neg = t0 + step
            break
        step *= 2
    if t_neg is None:
        raise DimensionUndetermined("no certified negative pressure below t = 64")

    if cv.lower(t0) >= 0:
        lo, _ = _bisect(lambda t: cv.lower(t) >= 0, t0, t_neg, tol)
    else:
        lo = t0
    if cv.upper(t0) <= 0:
        hi = t0
    else:
        hi, _ = _bisect(lambda t: cv.upper(t) <= 0, t_neg, t0, tol)
    trace.append((
        "pressure-zero-bisection",
        {"family": spec.family, "tol": tol, "M": M, "theta": t0,
         "words": [cv.K, cv.N] if cv.used_words else None},
        f"P(lo) >= 0 at {lo:.12g}, P(hi) <= 0 at {hi:.12g}",
    ))
    return Interval(lo, max(lo, hi))


def dimension_report(spec: SystemSpec, tol: float = 1e-8, M: int = M_DEFAULT, **kw) -> DimensionReport:
    th = theta(spec.digits)
    reg = classify(spec, M)
    rep = DimensionReport(spec, th.value, th.value, reg)
    rep.add("theta", {"method": th.method}, str(th.value))
    rep.add("regularity", {"M": M}, reg.label() + (f": {reg.detail}" if reg.detail else ""))
    trace = []
    rep.h = hausdorff_dim(spec, tol, M, trace=trace, **kw)
    rep.trace.extend(trace)
    if reg.kind == "Irregular":
        rep.add("irregular-dimension", {"theta": th.value.hi}, "h = theta")
    prof = spec.digits.profile()
    return measure_phenomena(spec, prof, rep, M)


# ---------------------------------------------------------------- phenomena


def restricted_interval_gap(spec: SystemSpec) -> bool:
    """For T <= 2 all letters are real, the system acts on [-1, 1] and the
    level-1 images miss (1/(d_1 - 1), 1) when d_1 > 2, which forces h < 1."""
    return spec.T <= 2 and spec.digits.digit(1) > 2


def large_T_rule(spec: SystemSpec, prof: GrowthProfile) -> bool:
    return spec.T >= prof.c2 ** (2.0 / prof.gamma) * (prof.N + 1)


def measure_phenomena(spec: SystemSpec, prof: Optional[GrowthProfile], report: DimensionReport, M: int = M_DEFAULT):
    """Set C1/C2/C3/density flags from the certified h interval and the growth profile.

    A flag's value lists every route that certified it, joined by '+'.
    """
    rep = replace(report, flags=dict(report.flags), trace=list(report.trace))
    h = rep.h
    c1, c2 = [], []

    # density at zero: P(h/2) finite, checked at the adverse endpoint h.lo
    Ph = pressure_bounds(spec, h.lo / 2.0, M)
    if not math.isinf(Ph.hi):
        c2.append("finite-pressure-at-half-dimension")
        rep.add("finite-pressure-at-half-dimension", {"t": h.lo / 2.0}, f"P(t) <= {Ph.hi:.6g} < inf")
    else:
        rep.add("finite-pressure-at-half-dimension", {"t": h.lo / 2.0}, "P(t) = inf, no conclusion")

    if prof is not None:
        g = prof.gamma
        crit = 1.0 / g
        if h.hi < crit:
            c1.append("polynomial-zero-hausdorff-measure")
            rep.add("polynomial-zero-hausdorff-measure", {"h_hi": h.hi, "1/gamma": crit}, "h < 1/gamma")
        elif h.lo > crit:
            c2.append("polynomial-infinite-packing-measure")
            rep.add("polynomial-infinite-packing-measure", {"h_lo": h.lo, "1/gamma": crit}, "h > 1/gamma")
        else:
            Pc = pressure_bounds(spec, crit, M)
            if Pc.lo > 0:
                c2.append("positive-pressure-at-inverse-gamma")
                rep.add("positive-pressure-at-inverse-gamma", {"t": crit}, f"P(1/gamma) >= {Pc.lo:.6g} > 0")
            elif Pc.hi < 0:
                c1.append("negative-pressure-at-inverse-gamma")
                rep.add("negative-pressure-at-inverse-gamma", {"t": crit}, f"P(1/gamma) <= {Pc.hi:.6g} < 0")
            else:
                rep.add("polynomial-measure-criteria", {"h": h.to_list(), "1/gamma": crit},
                        f"undetermined at width {h.width:.3g}")
        if g == 1 and restricted_interval_gap(spec):
            c1.append("restricted-interval-gap")
            rep.add("restricted-interval-gap", {"T": spec.T, "d1": spec.digits.digit(1)},
                    "level-1 images miss (1/(d_1-1), 1) in [-1, 1], so h < 1 = 1/gamma")
        if large_T_rule(spec, prof):
            c2.append("large-T-criterion")
            rep.add("large-T-criterion", {"T": spec.T, "c2": prof.c2, "gamma": g, "N": prof.N},
                    "T >= c2^(2/gamma) (N+1) gives h > 1/gamma")
        d1 = spec.digits.digit(1)
        if spec.family == "F" and g == 1 and d1 * d1 - 1 <= spec.T:
            c2.append("first-digit-criterion")
            rep.add("first-digit-criterion", {"T": spec.T, "d1": d1},
                    "P_F(1) > log(T/(d_1^2-1)) >= 0 gives h > 1")
        if g > 1 and h.hi < 1.0 / (g + 1):
            rep.flags[C3] = "dimension-gap"
            rep.add("dimension-gap", {"h_hi": h.hi, "1/(gamma+1)": 1.0 / (g + 1)}, "h < lower box dimension")

    if c1 and c2:
        raise AssertionError(f"C1 ({c1}) and C2 ({c2}) both certified")
    if c1:
        rep.flags[C1] = "+".join(c1)
    if c2:
        rep.flags[C2] = "+".join(c2)
        if "finite-pressure-at-half-dimension" in c2:
            rep.flags[DENSITY] = "finite-pressure-at-half-dimension"
        rep.packing_dim = h
        rep.add("packing-dimension", {}, "dim_P = h")
    elif prof is not None:
        b = 1.0 / (prof.gamma + 1)
        rep.packing_dim = Interval(max(h.lo, b), max(h.hi, b))
        rep.add("orbit-box-dimension", {"1/(gamma+1)": b}, "dim_P = max(h, 1/(gamma+1))")
    return rep


# ---------------------------------------------------------------- gap threshold


@dataclass(frozen=True)
class GapThreshold:
    q: int
    at_q: Interval
    at_q_minus_1: Optional[Interval]


def _gap_form(spec, gamma):
    t = 1.0 / (gamma + 1.0)
    return PowerOfSquareMinusOne(t) if spec.family == "F" else PowerOfShift(t, -1)


def gap_tail(spec: SystemSpec, l: int, gamma: float, M: int = M_DEFAULT) -> Interval:
    """T * sum_{n >= l} term(d_n) at t = 1/(gamma+1)."""
    return sum_series(tail_shift(spec.digits, l), _gap_form(spec, gamma), M).scale(spec.T)


def dimension_gap_threshold(spec: SystemSpec, profile: Optional[GrowthProfile] = None, M: int = 20_000) -> GapThreshold:
    """Smallest l with T sum_{n>=l} (d_n^2 - 1)^(-1/(gamma+1)) certified < 1."""
    prof = profile or spec.digits.profile()
    if prof is None:
        raise DigitError("dimension gap threshold needs a polynomial growth profile")
    g = prof.gamma
    if not g > 1:
        raise DigitError("dimension gap needs gamma > 1")

    def ok(l):
        return gap_tail(spec, l, g, M).hi < 1.0

    lo, hi = 0, 1
    while not ok(hi):
        lo, hi = hi, hi * 2
        if hi > 1 << 40:
            raise RuntimeError("gap threshold search did not terminate")
    # ok(hi) true, ok(lo) false (lo = 0 stands for "before index 1")
    while hi - lo > 1:
        m = (lo + hi) // 2
        if ok(m):
            hi = m
        else:
            lo = m
    q = hi
    prev = gap_tail(spec, q - 1, g, M) if q > 1 else None
    return GapThreshold(q, gap_tail(spec, q, g, M), prev)


# ---------------------------------------------------------------- density at 0


def n_of_r(seq: DigitSequence, r: float) -> int:
    """max{n : 1/(d_n + 1) >= r}."""
    d1 = seq.digit(1)
    if not 0 < r <= 1.0 / (d1 + 1.0):
        raise ValueError(f"r must lie in (0, 1/(d_1+1)] = (0, {1 / (d1 + 1):g}]")

    def ok(n):
        return 1.0 / (seq.digit(n) + 1.0) >= r

    lo, hi = 1, 2
    while ok(hi):
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        m = (lo + hi) // 2
        if ok(m):
            lo = m
        else:
            hi = m
    return lo


def density_bounds_at_zero(spec: SystemSpec, h: float, r: float, M: int = M_DEFAULT) -> Interval:
    """Bounds on m(B(0, r)) / r^h from the tail sums at n(r)+2 and n(r)+1."""
    k = n_of_r(spec.digits, r)
    if spec.family == "F":
        f_lo = f_hi = PowerOfSquareMinusOne(h)
    else:
        f_lo, f_hi = PowerOfShift(h, 1), PowerOfShift(h, -1)
    lo = sum_series(tail_shift(spec.digits, k + 2), f_lo, M).scale(spec.T)
    hi = sum_series(tail_shift(spec.digits, k + 1), f_hi, M).scale(spec.T)
    if math.isinf(hi.hi) or math.isinf(lo.lo):
        raise ValueError(f"tail series diverges at h = {h:g}; h is inconsistent with this system")
    rh = r**h
    return Interval(lo.lo / rh, hi.hi / rh)


def explore_density(spec: SystemSpec, h: float, radii, out_path=None, M: int = M_DEFAULT):
    """Ratio trend m(B(0,r))/r^h over radii, as rows; exploratory only, sets no flag."""
    rows = []
    for r in radii:
        iv = density_bounds_at_zero(spec, h, r, M)
        rows.append({"r": r, "n_of_r": n_of_r(spec.digits, r), "ratio_lo": iv.lo, "ratio_hi": iv.hi})
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["r", "n_of_r", "ratio_lo", "ratio_hi"])
            w.writeheader()
            w.writerows(rows)
    return rows
