"""Digit sequences d = {d_n} with d_1 >= 2 and d_{n+1} - d_n >= 2.

Every sequence knows how to evaluate itself on an index array, how fast it
grows (for the integral-test tail envelopes used by the series engine) and,
where one exists, an analytic certificate that the gap condition holds on
the whole tail.
"""

import math
from dataclasses import dataclass
from typing import ClassVar, Optional

import mpmath
import numpy as np

PROBE_DEFAULT = 10_000
INF = math.inf


class DigitError(ValueError):
    pass


class MissingTailCertificate(DigitError):
    """Raised when a sequence cannot bound its own tail (finite tables)."""


@dataclass(frozen=True)
class GrowthProfile:
    """c1 n^g <= d_n <= c2 n^g and d_{n+1} - d_n >= c3 n^(g-1) for n >= N."""

    c1: float
    c2: float
    c3: float
    gamma: float
    N: int


def _first_N(c1: float, gamma: float, start: int = 1) -> int:
    N = max(1, int(start))
    while c1 * N**gamma <= 1.0:
        N += 1
    return N


class DigitSequence:
    kind: ClassVar[str] = ""

    # first index M for which tail_power_sum(p, M) is available
    tail_start: ClassVar[int] = 0

    def digits(self, n) -> np.ndarray:
        raise NotImplementedError

    def digit(self, n: int) -> float:
        if n < 1:
            raise DigitError(f"digit index must be >= 1, got {n}")
        return float(self.digits(np.array([n], dtype=np.int64))[0])

    def has_tail(self) -> bool:
        return True

    def converges(self, p: float) -> bool:
        """Whether sum_n d_n^(-p) is finite."""
        raise NotImplementedError

    def tail_power_sum(self, p: float, M: int):
        """(lo, hi) bounding sum_{n > M} d_n^(-p) by the integral test."""
        raise NotImplementedError

    def theta_exact(self) -> Optional[float]:
        return None

    def profile(self) -> Optional[GrowthProfile]:
        return None

    def gap_certificate(self) -> Optional[int]:
        """Index n0 such that d_{n+1} - d_n >= 2 is proven for all n >= n0."""
        return None

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PolynomialFamily(DigitSequence):
    """d_n = c (n + L)^gamma + s."""

    c: float
    gamma: float
    L: int = 0
    s: float = 0.0
    kind: ClassVar[str] = "polynomial"

    def __post_init__(self):
        if not self.c > 0:
            raise DigitError("polynomial scale c must be positive")
        if not self.gamma >= 1:
            raise DigitError("polynomial exponent gamma must be >= 1")
        if int(self.L) != self.L or self.L < 0:
            raise DigitError("polynomial offset L must be a non-negative integer")
        if not self.s >= 0:
            raise DigitError("polynomial shift s must be >= 0")

    def digits(self, n):
        n = np.asarray(n, dtype=float)
        return self.c * (n + self.L) ** self.gamma + self.s

    def converges(self, p):
        return self.gamma * p > 1.0

    def tail_power_sum(self, p, M):
        if not self.converges(p):
            return INF, INF
        c, g, L, s = self.c, self.gamma, self.L, self.s
        e = g * p - 1.0
        # d(x) >= c (x+L)^g gives the upper integral from M
        hi = c ** (-p) * (M + L) ** (-e) / e if M + L > 0 else INF
        # d(x) <= c (x+L)^g (1 + s/(c (M+1+L)^g)) for x >= M+1
        X = M + 1 + L
        lo = (1.0 + s / (c * X**g)) ** (-p) * c ** (-p) * X ** (-e) / e
        return lo, hi

    def theta_exact(self):
        return 1.0 / (2.0 * self.gamma)

    def profile(self):
        N = _first_N(self.c, self.gamma)
        c2 = self.c * (1.0 + self.L / N) ** self.gamma + self.s / N**self.gamma
        return GrowthProfile(self.c, c2, self.c * self.gamma, self.gamma, N)

    def gap_certificate(self):
        # mean value theorem: gap_n >= c*gamma*(n+L)^(gamma-1)
        cg = self.c * self.gamma
        if self.gamma == 1:
            return 1 if self.c >= 2 else None
        n0 = math.ceil((2.0 / cg) ** (1.0 / (self.gamma - 1.0)) - self.L)
        return max(1, n0)

    def to_config(self):
        return {"kind": self.kind, "c": self.c, "gamma": self.gamma, "L": self.L, "s": self.s}


@dataclass(frozen=True)
class AffineFamily(DigitSequence):
    """d_n = a n + b."""

    a: float
    b: float = 0.0
    kind: ClassVar[str] = "affine"

    def __post_init__(self):
        if not self.a >= 2:
            raise DigitError("affine slope a must be >= 2")
        if not self.b >= 0:
            raise DigitError("affine intercept b must be >= 0")

    def digits(self, n):
        n = np.asarray(n, dtype=float)
        return self.a * n + self.b

    def converges(self, p):
        return p > 1.0

    def tail_power_sum(self, p, M):
        if not self.converges(p):
            return INF, INF
        a, b = self.a, self.b

        def integral(X):
            return (a * X + b) ** (1.0 - p) / (a * (p - 1.0))

        hi = integral(M) if a * M + b > 0 else INF
        return integral(M + 1), hi

    def theta_exact(self):
        return 0.5

    def profile(self):
        return GrowthProfile(self.a, self.a + self.b, self.a, 1.0, 1)

    def gap_certificate(self):
        return 1

    def to_config(self):
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class LogFamily(DigitSequence):
    """d_n = 2 (n+2) log(n+2)^lam / log(3)^lam."""

    lam: float
    kind: ClassVar[str] = "log"

    def __post_init__(self):
        if not self.lam > 1:
            raise DigitError("log family needs lam > 1")

    def digits(self, n):
        x = np.asarray(n, dtype=float) + 2.0
        return 2.0 * x * (np.log(x) / math.log(3.0)) ** self.lam

    def converges(self, p):
        return p >= 1.0

    def _integral(self, p, X):
        # int_X^inf d(x)^-p dx with u = log(x+2):  K^p int_u0^inf e^{(1-p)u} u^{-lam p} du
        lam = self.lam
        K = math.log(3.0) ** lam / 2.0
        u0 = math.log(X + 2.0)
        if p == 1.0:
            return K * u0 ** (1.0 - lam) / (lam - 1.0)
        with mpmath.workdps(30):
            val = (
                mpmath.mpf(K) ** p
                * mpmath.mpf(p - 1.0) ** (lam * p - 1.0)
                * mpmath.gammainc(1.0 - lam * p, (p - 1.0) * u0)
            )
        return float(val)

    def tail_power_sum(self, p, M):
        if not self.converges(p):
            return INF, INF
        return self._integral(p, M + 1), self._integral(p, M)

    def theta_exact(self):
        return 0.5

    def gap_certificate(self):
        # gap_n >= 2 (log(n+2))^lam / (log 3)^lam >= 2
        return 1

    def to_config(self):
        return {"kind": self.kind, "lam": self.lam}


@dataclass(frozen=True)
class ExplicitPrefix(DigitSequence):
    """Explicit head values followed by an analytic tail evaluated at the absolute index."""

    head: tuple
    tail: Optional[DigitSequence] = None
    splice_index: Optional[int] = None
    kind: ClassVar[str] = "prefix"

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(float(x) for x in self.head))
        if self.splice_index is None:
            object.__setattr__(self, "splice_index", len(self.head) + 1)
        if self.splice_index != len(self.head) + 1:
            raise DigitError(
                f"splice_index must be len(head)+1 = {len(self.head) + 1}, got {self.splice_index}"
            )

    @property
    def tail_start(self):
        return len(self.head)

    def has_tail(self):
        return self.tail is not None

    def digits(self, n):
        n = np.asarray(n, dtype=np.int64)
        out = np.empty(n.shape, dtype=float)
        inside = n <= len(self.head)
        if np.any(inside):
            out[inside] = np.asarray(self.head)[n[inside] - 1]
        if not np.all(inside):
            if self.tail is None:
                raise DigitError(
                    f"index {int(n[~inside].min())} is beyond the explicit head and no tail law is declared"
                )
            out[~inside] = self.tail.digits(n[~inside])
        return out

    def _need_tail(self):
        if self.tail is None:
            raise MissingTailCertificate(
                "explicit table without a tail law has no tail envelope"
            )
        return self.tail

    def converges(self, p):
        return self._need_tail().converges(p)

    def tail_power_sum(self, p, M):
        if M < len(self.head):
            raise DigitError("tail bound requested inside the explicit head")
        return self._need_tail().tail_power_sum(p, M)

    def theta_exact(self):
        return None if self.tail is None else self.tail.theta_exact()

    def profile(self):
        if self.tail is None:
            return None
        pr = self.tail.profile()
        if pr is None:
            return None
        N = _first_N(pr.c1, pr.gamma, max(pr.N, self.splice_index))
        return GrowthProfile(pr.c1, pr.c2, pr.c3, pr.gamma, N)

    def gap_certificate(self):
        if self.tail is None:
            return None
        n0 = self.tail.gap_certificate()
        return None if n0 is None else max(n0, self.splice_index)

    def to_config(self):
        cfg = {"kind": self.kind, "head": list(self.head), "splice_index": self.splice_index}
        cfg["tail"] = None if self.tail is None else self.tail.to_config()
        return cfg


@dataclass(frozen=True)
class Shifted(DigitSequence):
    """d'_n = base(n + drop), i.e. the tail starting at index l = drop + 1."""

    base: DigitSequence
    drop: int
    kind: ClassVar[str] = "shifted"

    def __post_init__(self):
        if int(self.drop) != self.drop or self.drop < 0:
            raise DigitError("shift drop must be a non-negative integer")

    @property
    def tail_start(self):
        return max(0, self.base.tail_start - self.drop)

    def has_tail(self):
        return self.base.has_tail()

    def digits(self, n):
        return self.base.digits(np.asarray(n, dtype=np.int64) + self.drop)

    def converges(self, p):
        return self.base.converges(p)

    def tail_power_sum(self, p, M):
        return self.base.tail_power_sum(p, M + self.drop)

    def theta_exact(self):
        return self.base.theta_exact()

    def profile(self):
        pr = self.base.profile()
        if pr is None:
            return None
        k = self.drop
        N = _first_N(pr.c1, pr.gamma, max(1, pr.N - k))
        c2 = pr.c2 * (1.0 + k / N) ** pr.gamma
        return GrowthProfile(pr.c1, c2, pr.c3, pr.gamma, N)

    def gap_certificate(self):
        n0 = self.base.gap_certificate()
        return None if n0 is None else max(1, n0 - self.drop)

    def to_config(self):
        return {"kind": self.kind, "base": self.base.to_config(), "drop": self.drop}


def example_sequence() -> ExplicitPrefix:
    """17, 19, then n^3 from n = 3 on."""
    return ExplicitPrefix((17.0, 19.0), PolynomialFamily(1.0, 3.0))


def tail_shift(seq: DigitSequence, l: int) -> Shifted:
    """Sequence n -> d_{n+l-1}; shifts compose additively in the drop."""
    if int(l) != l or l < 1:
        raise DigitError("shift l must be an integer >= 1")
    if isinstance(seq, Shifted):
        return Shifted(seq.base, seq.drop + l - 1)
    return Shifted(seq, l - 1)


# ---------------------------------------------------------------- validity


@dataclass(frozen=True)
class MembershipReport:
    valid: bool
    witness: Optional[int]
    confidence: str  # "symbolic" or "probe-only"
    message: str
    probe: int


def validate_membership(seq: DigitSequence, probe: int = PROBE_DEFAULT) -> MembershipReport:
    """Check d_1 >= 2 and the gap condition on 1..probe, plus any tail certificate."""
    if probe < 2:
        raise DigitError("probe must be >= 2")
    n_hi = probe + 1
    if isinstance(seq, ExplicitPrefix) and seq.tail is None:
        n_hi = min(n_hi, len(seq.head))
    n = np.arange(1, n_hi + 1, dtype=np.int64)
    d = seq.digits(n)
    if d[0] < 2:
        return MembershipReport(False, 1, "symbolic", f"d_1 = {d[0]:g} < 2", probe)
    gaps = np.diff(d)
    # a gap of exactly 2 can lose a few ulps in the subtraction
    slack = 4 * np.spacing(d[1:])
    bad = np.nonzero(gaps < 2.0 - slack)[0]
    if bad.size:
        k = int(bad[0]) + 1
        return MembershipReport(
            False, k, "symbolic", f"gap d_{k + 1} - d_{k} = {gaps[k - 1]:g} < 2", probe
        )
    n0 = seq.gap_certificate()
    if isinstance(seq, ExplicitPrefix) and seq.tail is None:
        return MembershipReport(True, None, "symbolic", "finite table checked in full", probe)
    if n0 is not None and n0 <= n_hi:
        return MembershipReport(
            True, None, "symbolic", f"probed 1..{n_hi}, gap certified analytically from n = {n0}", probe
        )
    return MembershipReport(True, None, "probe-only", f"probed 1..{n_hi}, no tail certificate", probe)


@dataclass(frozen=True)
class SystemSpec:
    family: str  # "F" or "G"
    digits: DigitSequence
    T: int

    def __post_init__(self):
        if self.family not in ("F", "G"):
            raise DigitError(f"family must be 'F' or 'G', got {self.family!r}")
        if int(self.T) != self.T or self.T < 1:
            raise DigitError("rotation count T must be a positive integer")
        object.__setattr__(self, "T", int(self.T))

    def with_family(self, family: str) -> "SystemSpec":
        return SystemSpec(family, self.digits, self.T)

    def alphabet(self, K: int) -> np.ndarray:
        """Letters alpha = e(j/T) d_n for n <= K, n-major then j."""
        d = self.digits.digits(np.arange(1, K + 1))
        rot = np.exp(2j * np.pi * np.arange(self.T) / self.T)
        return (d[:, None] * rot[None, :]).ravel()

    def to_config(self) -> dict:
        return {"family": self.family, "T": self.T, "digits": self.digits.to_config()}


@dataclass(frozen=True)
class CifsReport:
    valid: bool
    bound: float
    reasons: tuple
    membership: MembershipReport


def cifs_check(spec: SystemSpec, probe: int = PROBE_DEFAULT) -> CifsReport:
    """T <= pi / arcsin(1/d_1), and d_1 > 2 for the continued-fraction family."""
    mem = validate_membership(spec.digits, probe)
    d1 = spec.digits.digit(1)
    bound = math.pi / math.asin(1.0 / d1) if d1 >= 1 else 0.0
    reasons = []
    if not mem.valid:
        reasons.append(f"digit class violated: {mem.message}")
    # pi/arcsin(1/2) is 6 up to rounding
    if spec.T > bound * (1 + 1e-12):
        reasons.append(f"T = {spec.T} exceeds pi/arcsin(1/d_1) = {bound:.6g}")
    if spec.family == "G" and not d1 > 2:
        reasons.append("family G needs d_1 > 2")
    return CifsReport(not reasons, bound, tuple(reasons), mem)


# ---------------------------------------------------------------- config

_FIELDS = {
    "polynomial": ({"c", "gamma"}, {"L", "s"}),
    "affine": ({"a"}, {"b"}),
    "log": ({"lam"}, set()),
    "prefix": ({"head"}, {"tail", "splice_index"}),
    "shifted": ({"base", "drop"}, set()),
}


def sequence_from_config(cfg: dict) -> DigitSequence:
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise DigitError("digit config needs a 'kind' field")
    kind = cfg["kind"]
    if kind not in _FIELDS:
        raise DigitError(f"unknown digit kind {kind!r}")
    required, optional = _FIELDS[kind]
    keys = set(cfg) - {"kind"}
    unknown = keys - required - optional
    if unknown:
        raise DigitError(f"unknown key {sorted(unknown)[0]!r} for digit kind {kind!r}")
    missing = required - keys
    if missing:
        raise DigitError(f"missing key {sorted(missing)[0]!r} for digit kind {kind!r}")
    if kind == "polynomial":
        return PolynomialFamily(float(cfg["c"]), float(cfg["gamma"]), int(cfg.get("L", 0)), float(cfg.get("s", 0.0)))
    if kind == "affine":
        return AffineFamily(float(cfg["a"]), float(cfg.get("b", 0.0)))
    if kind == "log":
        return LogFamily(float(cfg["lam"]))
    if kind == "prefix":
        tail = cfg.get("tail")
        return ExplicitPrefix(
            tuple(cfg["head"]),
            None if tail is None else sequence_from_config(tail),
            cfg.get("splice_index"),
        )
    return Shifted(sequence_from_config(cfg["base"]), int(cfg["drop"]))


def parse_digits(text: str) -> DigitSequence:
    """Short command-line form: '2n', 'example', 'affine:2,0', 'poly:c,gamma[,L,s]', 'log:lam'."""
    t = text.strip().replace(" ", "")
    if t == "example":
        return example_sequence()
    if t.endswith("n") and t[:-1].replace(".", "", 1).isdigit():
        return AffineFamily(float(t[:-1]), 0.0)
    name, _, args = t.partition(":")
    vals = [float(v) for v in args.split(",") if v]
    if name == "affine" and 1 <= len(vals) <= 2:
        return AffineFamily(*vals)
    if name == "poly" and 2 <= len(vals) <= 4:
        c, g, *rest = vals
        L = int(rest[0]) if rest else 0
        s = rest[1] if len(rest) > 1 else 0.0
        return PolynomialFamily(c, g, L, s)
    if name == "log" and len(vals) == 1:
        return LogFamily(vals[0])
    raise DigitError(f"cannot parse digit sequence {text!r}")
