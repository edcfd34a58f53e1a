"""Comparing dim_H J_F with dim_H J_G.

q(t, v) = 2 cosh(tv) + 2 cosh(v)^-t equals 4 at v = 0, dips below 4 and
crosses back at a unique delta_t > 0. With delta~_t = tanh(delta_t / 2) the
T = 4 comparison needs d_1 >= L(t) = max(2, 1/delta~_t).
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .digits import LogFamily, SystemSpec
from .pressure import pressure_F, pressure_G_sandwich
from .series import Interval, s_lambda


def _check_t(t):
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")


def q_func(t: float, v: float) -> float:
    _check_t(t)
    if v < 0:
        raise ValueError("v must be >= 0")
    return 2.0 * math.cosh(t * v) + 2.0 * math.cosh(v) ** (-t)


def _q_minus_4(t, v):
    # cancellation-free form of q(t, v) - 4
    a = 4.0 * math.sinh(0.5 * t * v) ** 2
    logcosh = math.log1p(2.0 * math.sinh(0.5 * v) ** 2)
    return a + 2.0 * math.expm1(-t * logcosh)


def delta_t(t: float, tol: float = 1e-12) -> float:
    """Unique v > 0 with q(t, v) = 4."""
    _check_t(t)
    v1, v2 = 1e-6, 64.0
    if _q_minus_4(t, v1) >= 0:
        raise ArithmeticError("lower bracket end does not satisfy q < 4")
    while _q_minus_4(t, v2) <= 0:
        v2 *= 2
    while v2 - v1 > tol:
        m = 0.5 * (v1 + v2)
        if _q_minus_4(t, m) < 0:
            v1 = m
        else:
            v2 = m
    return 0.5 * (v1 + v2)


def xi_t(t: float) -> float:
    """cosh(xi_t) = (3 - t)/(1 + t), a lower bound for delta_t."""
    return math.acosh((3.0 - t) / (1.0 + t))


def tilde_delta(t: float, tol: float = 1e-12) -> float:
    return math.tanh(0.5 * delta_t(t, tol))


def tilde_q(t: float, x: float) -> float:
    if not 0 <= x < 1:
        raise ValueError("x must lie in [0, 1)")
    a = (1.0 + x) / (1.0 - x)
    return a**t + a ** (-t) + 2.0 * ((1.0 - x * x) / (1.0 + x * x)) ** t


def L_upper_bound(t: float) -> float:
    """1 + (1+t)/(1 - t + sqrt(2(1-t))), valid for t > 1/2."""
    return 1.0 + (1.0 + t) / (1.0 - t + math.sqrt(2.0 * (1.0 - t)))


def L_of_t(t: float, tol: float = 1e-12) -> float:
    val = max(2.0, 1.0 / tilde_delta(t, tol))
    if t > 0.5 and val > L_upper_bound(t) + 1e-9:
        raise ArithmeticError(f"L({t}) = {val} exceeds its closed-form bound {L_upper_bound(t)}")
    return val


def phi(a: float, t: float, T: int, z) -> np.ndarray:
    """sum_j |a e(j/T) + z|^-2t; z may be an array."""
    z = np.asarray(z, dtype=complex)
    rot = a * np.exp(2j * np.pi * np.arange(T) / T)
    return (np.abs(rot[:, None] + z.ravel()[None, :]) ** (-2.0 * t)).sum(axis=0).reshape(z.shape)


def psi(r: float, a: float, t: float, T: int, theta) -> np.ndarray:
    """phi(a, t, T, -r e(theta)), periodic with period 1/T."""
    theta = np.asarray(theta, dtype=float)
    return phi(a, t, T, -r * np.exp(2j * np.pi * theta))


# ---------------------------------------------------------------- verdicts

F_STRICTLY_GREATER = "F_strictly_greater"
F_GEQ = "F_geq"
G_GEQ = "G_geq"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Verdict:
    kind: str
    tag: str = ""
    reason: str = ""
    hypotheses: dict = field(default_factory=dict)

    def label(self):
        return f"{self.kind}({self.tag or self.reason})"

    def to_dict(self):
        return {"kind": self.kind, "tag": self.tag, "reason": self.reason,
                "hypotheses": {k: self.hypotheses[k] for k in sorted(self.hypotheses)}}


def compare(report_F, report_G, tol: float = 1e-12) -> Verdict:
    """Decision cascade for h_F versus h_G given both dimension reports."""
    sF, sG = report_F.spec, report_G.spec
    if sF.family != "F" or sG.family != "G":
        raise ValueError("compare expects an F report and a G report")
    if sF.digits != sG.digits or sF.T != sG.T:
        raise ValueError("F and G reports must share the digit sequence and T")
    T = sF.T
    regF, regG = report_F.regularity, report_G.regularity
    hF, hG = report_F.h, report_G.h

    if regF.kind == "Irregular":
        return Verdict(G_GEQ, "irregular-F-bound", hypotheses={"F": "Irregular"})
    if regG.kind == "Irregular":
        return Verdict(F_GEQ, "irregular-G-bound", hypotheses={"G": "Irregular"})
    g_regular = regG.is_regular
    if T == 1 and g_regular:
        return Verdict(F_STRICTLY_GREATER, "single-rotation-strict", hypotheses={"T": 1, "G": regG.kind})
    if T == 4 and g_regular:
        if 0 < hG.lo and hG.hi <= 0.5:
            return Verdict(F_STRICTLY_GREATER, "four-rotation-half-corollary",
                           hypotheses={"T": 4, "G": regG.kind, "h_G_hi": hG.hi})
        d1 = sG.digits.digit(1)
        if 0 < hG.lo and hG.hi < 1:
            L = L_of_t(hG.hi, tol)
            if d1 >= L:
                return Verdict(F_STRICTLY_GREATER, "four-rotation-L-threshold",
                               hypotheses={"T": 4, "G": regG.kind, "h_G_hi": hG.hi, "d1": d1, "L": L})
    if hF.lo > hG.hi:
        return Verdict(F_STRICTLY_GREATER, "numeric-separation",
                       hypotheses={"h_F_lo": hF.lo, "h_G_hi": hG.hi})
    return Verdict(INCONCLUSIVE, reason="no proven route applies and the dimension intervals overlap")


# ---------------------------------------------------------------- lambda_0


@dataclass(frozen=True)
class Lambda0:
    interval: Interval
    s_at_lo: Interval
    s_at_hi: Interval


def lambda0_locate(tol: float = 1e-3, M: int = 1_000_000, budget: int = 60) -> Lambda0:
    """Bracket the lambda in (3/2, 2) with s(lambda) = 1 (s is decreasing)."""
    lo, hi = 1.5, 2.0
    s_lo, s_hi = s_lambda(lo, M), s_lambda(hi, M)
    if not (s_lo.lo > 1 and s_hi.hi < 1):
        raise ArithmeticError("s(3/2) > 1 > s(2) could not be certified")
    steps = 0
    while hi - lo > tol and steps < budget:
        steps += 1
        m = 0.5 * (lo + hi)
        s = s_lambda(m, M)
        if s.lo > 1:
            lo, s_lo = m, s
        elif s.hi < 1:
            hi, s_hi = m, s
        else:
            # straddle: narrow each side separately
            a, b = lo, m
            while b - a > tol / 4 and steps < budget:
                steps += 1
                c = 0.5 * (a + b)
                sc = s_lambda(c, M)
                if sc.lo > 1:
                    a, lo, s_lo = c, c, sc
                else:
                    b = c
            a, b = m, hi
            while b - a > tol / 4 and steps < budget:
                steps += 1
                c = 0.5 * (a + b)
                sc = s_lambda(c, M)
                if sc.hi < 1:
                    b, hi, s_hi = c, c, sc
                else:
                    a = c
            break
    return Lambda0(Interval(lo, hi), s_lo, s_hi)


@dataclass(frozen=True)
class IrregularWitness:
    lam: float
    T: int
    PG_half_upper: Interval  # upper-bound interval for P_G(1/2)
    PF_half: Interval
    g_irregular: bool
    f_regular: bool
    finite_at_theta: bool

    def to_dict(self):
        return {"lam": self.lam, "T": self.T, "PG_half_upper": self.PG_half_upper.to_list(),
                "PF_half": self.PF_half.to_list(), "g_irregular": self.g_irregular,
                "f_regular": self.f_regular, "finite_at_theta": self.finite_at_theta}


def irregular_witness(T: int, delta: float, M: int = 1_000_000, lam0: Optional[Lambda0] = None) -> IrregularWitness:
    """Log family at lambda = lambda_0 + delta (taken from the certified upper end)."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    lam0 = lam0 or lambda0_locate(1e-6, M)
    lam = lam0.interval.hi + delta
    seq = LogFamily(lam)
    sG, sF = SystemSpec("G", seq, T), SystemSpec("F", seq, T)
    _, up = pressure_G_sandwich(sG, 0.5, M)
    PF = pressure_F(sF, 0.5, M).value
    g_irr = up.value.hi < 0
    f_reg = PF.lo > 0 and not math.isinf(PF.hi)
    return IrregularWitness(lam, T, up.value, PF, g_irr, f_reg, not math.isinf(PF.hi))
