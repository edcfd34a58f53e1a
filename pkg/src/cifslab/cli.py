"""Command-line interface: `cifslab <command> [options]`.

Config documents are JSON with three sections, all optional except `system`
for commands that need one:

    {
      "system": {"family": "F", "T": 2, "digits": {"kind": "affine", "a": 2, "b": 0}},
      "knobs":  {"M": 100000, "K": 30, "N": 3, "tol": 1e-8, "t": [0.5, 1.0],
                 "depth": null, "min_radius": null, "width": 512, "height": 512,
                 "probe": 10000, "shade_depth": false},
      "output": {"out": "report.json", "png": null, "metadata": null}
    }

Digit kinds and their fields are those of `cifslab.digits.sequence_from_config`.
Command-line flags override config values. See docs/config.md.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from typing import Optional

from . import __version__
from .comparison import (
    F_STRICTLY_GREATER,
    INCONCLUSIVE,
    L_of_t,
    L_upper_bound,
    compare,
    delta_t,
    irregular_witness,
    lambda0_locate,
    q_func,
    xi_t,
)
from .digits import (
    AffineFamily,
    DigitError,
    LogFamily,
    PolynomialFamily,
    SystemSpec,
    cifs_check,
    example_sequence,
    parse_digits,
    sequence_from_config,
    tail_shift,
)
from .dimension import (
    C1,
    C2,
    DimensionUndetermined,
    dimension_gap_threshold,
    dimension_report,
    hausdorff_dim,
)
from .geometry import disc_tree, generator_disc, osc_report, render
from .pressure import (
    UNDETERMINED,
    classify,
    pressure_F,
    pressure_G_sandwich,
    pressure_G_word_refine,
    theta,
    theta_estimate,
)
from .series import PowerOfShift, s_lambda, s_lambda_bracket, sum_series

COMMANDS = ("validate", "pressure", "dim", "classify", "gap", "compare", "render", "reproduce")
EXIT_OK, EXIT_ERROR, EXIT_UNDETERMINED = 0, 1, 2
M_CAP = 10_000_000


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    spec: Optional[SystemSpec] = None
    M: int = 100_000
    K: Optional[int] = None  # digit cutoff; 30 for word sums, 200 for rendering
    N: int = 3
    tol: float = 1e-8
    t: tuple = ()
    depth: Optional[int] = None
    min_radius: Optional[float] = None
    width: int = 512
    height: int = 512
    probe: int = 10_000
    shade_depth: bool = False
    out: Optional[str] = None
    png: Optional[str] = None
    metadata: Optional[str] = None
    case: str = "all"
    pretty: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown command {self.command!r}")
        if self.K is None:
            self.K = 200 if self.command == "render" else 30
        for key in ("M", "K", "N", "width", "height", "probe"):
            v = getattr(self, key)
            if int(v) != v or v < 1:
                raise ConfigError(f"{key}: must be a positive integer, got {v!r}")
        if not 0 < self.tol <= 1e-2:
            raise ConfigError(f"tol: must lie in (0, 1e-2], got {self.tol!r}")
        if self.depth is not None and (int(self.depth) != self.depth or self.depth < 1):
            raise ConfigError(f"depth: must be a positive integer, got {self.depth!r}")
        if self.min_radius is not None and not self.min_radius > 0:
            raise ConfigError(f"min_radius: must be positive, got {self.min_radius!r}")
        if any(not x > 0 for x in self.t):
            raise ConfigError("t: every pressure argument must be positive")
        if self.command not in ("reproduce",) and self.spec is None:
            raise ConfigError("system: a digit sequence is required (use --d or a config document)")

    def budgets(self):
        return {"M": self.M, "K": self.K, "N": self.N, "tol": self.tol}


_SECTIONS = {
    "system": {"family", "T", "digits"},
    "knobs": {"M", "K", "N", "tol", "t", "depth", "min_radius", "width", "height", "probe", "shade_depth"},
    "output": {"out", "png", "metadata"},
}


def _check_keys(where, doc, allowed):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected a mapping")
    for k in doc:
        if k not in allowed:
            raise ConfigError(f"{where}.{k}: unknown key" if where else f"{k}: unknown key")


def parse_config(doc: dict, command: Optional[str] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Validate a config document (plus flag overrides) into a RunConfig."""
    _check_keys("", doc, set(_SECTIONS) | {"command"})
    vals = {}
    for sec, allowed in _SECTIONS.items():
        part = doc.get(sec, {})
        _check_keys(sec, part, allowed)
        if sec != "system":
            vals.update(part)
    sysdoc = dict(doc.get("system", {}))
    ov = {k: v for k, v in (overrides or {}).items() if v is not None}
    for k in ("family", "T", "digits"):
        if k in ov:
            sysdoc[k] = ov.pop(k)
    vals.update(ov)
    spec = None
    if "digits" in sysdoc:
        d = sysdoc["digits"]
        try:
            seq = parse_digits(d) if isinstance(d, str) else sequence_from_config(d)
            spec = SystemSpec(sysdoc.get("family", "F"), seq, sysdoc.get("T", 1))
        except DigitError as e:
            raise ConfigError(f"system: {e}") from e
    elif set(sysdoc) - {"family", "T"}:
        raise ConfigError("system.digits: missing")
    if "t" in vals:
        t = vals["t"]
        vals["t"] = tuple(t) if isinstance(t, (list, tuple)) else (t,)
    command = command or doc.get("command")
    if command is None:
        raise ConfigError("command: missing")
    return RunConfig(command=command, spec=spec, **vals)


# ---------------------------------------------------------------- reports


def _clean(x):
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "to_list"):
        return _clean(x.to_list())
    if hasattr(x, "item"):  # numpy scalars
        return _clean(x.item())
    return x


def make_report(cfg: RunConfig, results, trace, budgets=None) -> dict:
    return _clean({
        "spec": None if cfg.spec is None else cfg.spec.to_config(),
        "command": cfg.command,
        "results": results,
        "trace": trace,
        "budgets": budgets or cfg.budgets(),
        "version": __version__,
    })


def dumps(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def pretty(report) -> str:
    lines = [f"cifslab {report['version']}  {report['command']}"]
    if report["spec"]:
        lines.append(f"system: {json.dumps(report['spec'], sort_keys=True)}")

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}{k}.", obj[k])
        else:
            lines.append(f"  {prefix[:-1]}: {obj}")

    walk("", report["results"])
    for row in report["trace"]:
        if isinstance(row, dict) and "tag" in row:
            lines.append(f"  [{row['tag']}] {row.get('verdict', '')}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands


def cmd_validate(cfg):
    rep = cifs_check(cfg.spec, cfg.probe)
    K = min(cfg.K, 50)
    if not cfg.spec.digits.has_tail():
        K = min(K, len(cfg.spec.digits.head))
    osc = osc_report(cfg.spec, K=K)
    res = {
        "valid": rep.valid,
        "cifs_bound": rep.bound,
        "reasons": list(rep.reasons),
        "membership": {"valid": rep.membership.valid, "witness": rep.membership.witness,
                       "confidence": rep.membership.confidence, "message": rep.membership.message},
        "osc": {"disjoint": osc.disjoint, "overlaps": len(osc.overlaps), "tangencies": len(osc.tangencies),
                "half_angle": osc.half_angle, "sector": osc.sector, "cone_ok": osc.cone_ok},
    }
    trace = [("cifs-sufficiency", {"T": cfg.spec.T, "bound": rep.bound}, "valid" if rep.valid else "; ".join(rep.reasons))]
    return res, trace, (EXIT_OK if rep.valid else EXIT_ERROR)


def cmd_pressure(cfg):
    if not cfg.t:
        raise ConfigError("t: the pressure command needs at least one --t value")
    spec, out, trace = cfg.spec, {}, []
    for t in cfg.t:
        key = repr(float(t))
        if spec.family == "F":
            pv = pressure_F(spec, t, cfg.M)
            out[key] = {"interval": pv.value, "method": pv.method}
            trace.append(("affine-pressure-closed-form", {"t": t, "M": cfg.M}, str(pv.value)))
            continue
        lo, up = pressure_G_sandwich(spec, t, cfg.M)
        entry = {"lower": lo.value, "lower_method": lo.method, "upper": up.value, "upper_method": up.method}
        if not lo.is_infinite and spec.digits.digit(1) > 2:
            w = pressure_G_word_refine(spec, t, cfg.K, cfg.N, M=cfg.M)
            entry["words"] = {"lower": w.lower, "upper": w.upper, "K": w.K, "N": w.N, "B": w.B, "gain": w.gain}
        out[key] = entry
        trace.append(("continued-fraction-pressure-sandwich", {"t": t, "M": cfg.M}, f"[{lo.value.lo:.12g}, {up.value.hi:.12g}]"))
    return out, trace, EXIT_OK


def _escalate(run, cfg, is_undetermined, trace):
    res = run(cfg)
    if is_undetermined(res) and cfg.M * 10 <= M_CAP:
        bigger = replace(cfg, M=cfg.M * 10)
        trace.append(("budget-escalation", {"M": bigger.M}, "retry after undetermined result"))
        return run(bigger), bigger
    return res, cfg


def cmd_classify(cfg):
    trace = []
    reg, used = _escalate(lambda c: classify(c.spec, c.M), cfg, lambda r: r.kind == UNDETERMINED, trace)
    th = theta(cfg.spec.digits)
    trace.insert(0, ("theta", {"method": th.method}, str(th.value)))
    trace.append(("regularity", {"M": used.M}, reg.label() + (f": {reg.detail}" if reg.detail else "")))
    res = {"regularity": reg.label(), "theta": th.value, "detail": reg.detail}
    return res, trace, (EXIT_UNDETERMINED if reg.kind == UNDETERMINED else EXIT_OK), used


def _dim(cfg):
    try:
        return dimension_report(cfg.spec, cfg.tol, cfg.M, K=cfg.K, N=cfg.N)
    except DimensionUndetermined as e:
        return e


def cmd_dim(cfg):
    trace = []
    rep, used = _escalate(_dim, cfg, lambda r: isinstance(r, DimensionUndetermined), trace)
    if isinstance(rep, DimensionUndetermined):
        return {"h": None, "undetermined": str(rep)}, trace, EXIT_UNDETERMINED, used
    d = rep.to_dict()
    trace.extend(d.pop("trace"))
    d.pop("spec")
    return d, trace, EXIT_OK, used


def cmd_gap(cfg):
    g = dimension_gap_threshold(cfg.spec, M=min(cfg.M, 20_000))
    prof = cfg.spec.digits.profile()
    shifted = SystemSpec(cfg.spec.family, tail_shift(cfg.spec.digits, g.q), cfg.spec.T)
    h = hausdorff_dim(shifted, cfg.tol, cfg.M, K=cfg.K, N=cfg.N)
    bound = 1.0 / (prof.gamma + 1.0)
    res = {"q": g.q, "series_at_q": g.at_q, "series_at_q_minus_1": g.at_q_minus_1,
           "shifted_h": h, "box_dimension": bound, "dimension_gap": h.hi < bound}
    trace = [("dimension-gap-threshold", {"gamma": prof.gamma, "T": cfg.spec.T}, f"q = {g.q}"),
             ("dimension-gap", {"l": g.q, "h_hi": h.hi, "1/(gamma+1)": bound},
              "h < lower box dimension" if h.hi < bound else "not certified")]
    return res, trace, EXIT_OK if h.hi < bound else EXIT_UNDETERMINED


def _compare(cfg):
    rF = dimension_report(cfg.spec.with_family("F"), cfg.tol, cfg.M, K=cfg.K, N=cfg.N)
    rG = dimension_report(cfg.spec.with_family("G"), cfg.tol, cfg.M, K=cfg.K, N=cfg.N)
    return rF, rG, compare(rF, rG)


def cmd_compare(cfg):
    trace = []
    (rF, rG, v), used = _escalate(_compare, cfg, lambda r: r[2].kind == INCONCLUSIVE, trace)
    trace.append(("comparison", v.hypotheses, v.label()))
    res = {"verdict": v.to_dict(), "F": {"h": rF.h, "regularity": rF.regularity.label()},
           "G": {"h": rG.h, "regularity": rG.regularity.label()}}
    return res, trace, (EXIT_UNDETERMINED if v.kind == INCONCLUSIVE else EXIT_OK), used


def cmd_render(cfg):
    if not cfg.out:
        raise ConfigError("out: render needs an output path")
    info = render(cfg.spec, cfg.out, depth=cfg.depth, min_radius=cfg.min_radius, K=cfg.K,
                  width=cfg.width, height=cfg.height, png=cfg.png, metadata=cfg.metadata,
                  shade_depth=cfg.shade_depth)
    trace = [("disc-tree-render", {"depth": info["depth"], "K": cfg.K}, f"{info['discs']} leaf discs")]
    return info, trace, EXIT_OK


# ---------------------------------------------------------------- reproduce


def _row(name, expected, computed, ok, tol=None):
    return {"check": name, "expected": expected, "computed": computed, "tol": tol, "ok": bool(ok)}


def case_example_2n_T2():
    spec = SystemSpec("F", AffineFamily(2, 0), 2)
    P = pressure_F(spec, 1.0, 100_000).value
    h = hausdorff_dim(spec, 1e-8, 100_000)
    return [
        _row("P_F(1) contains 0", 0.0, P, P.contains(0.0)),
        _row("P_F(1) width", "< 1e-8", P.width, P.width < 1e-8),
        _row("h_F", 1.0, h, 1 - 1e-6 <= h.lo and h.hi <= 1 + 1e-6, 1e-6),
    ]


def case_example_17_19():
    seq = example_sequence()
    S = sum_series(seq, PowerOfShift(0.5, -1), 100_000).scale(4)
    sF, sG = SystemSpec("F", seq, 4), SystemSpec("G", seq, 4)
    rF = dimension_report(sF, 1e-8)
    rG = dimension_report(sG, 1e-8, K=30, N=3)
    v = compare(rF, rG)
    return [
        _row("4 sum 1/(d_n - 1)", "<= 116/117", S, S.hi <= 116 / 117 + 1e-9),
        _row("h_F < 1/2", 0.5, rF.h, rF.h.hi < 0.5),
        _row("h_G < h_F", "h_G.hi < h_F.lo", [rG.h.hi, rF.h.lo], rG.h.hi < rF.h.lo),
        _row("compare", F_STRICTLY_GREATER, v.label(), v.kind == F_STRICTLY_GREATER),
        _row("C2 for F", C2, rF.flags.get(C2), C2 in rF.flags),
        _row("C2 for G", C2, rG.flags.get(C2), C2 in rG.flags),
    ]


def case_c1_polynomial():
    seq = PolynomialFamily(1, 2, 10, 1)
    rows = []
    for fam in "FG":
        spec = SystemSpec(fam, seq, 2)
        rep = dimension_report(spec, 1e-6)
        rows.append(_row(f"{fam} is a CIFS", True, cifs_check(spec).valid, cifs_check(spec).valid))
        rows.append(_row(f"C1 for {fam}", C1, rep.flags.get(C1), C1 in rep.flags and C2 not in rep.flags))
    return rows


def case_c2_affine():
    rows = []
    for T in (3, 4, 5, 6):
        spec = SystemSpec("F", AffineFamily(2, 0), T)
        rep = dimension_report(spec, 1e-6)
        rows.append(_row(f"T={T} is a CIFS", True, cifs_check(spec).valid, cifs_check(spec).valid))
        rows.append(_row(f"T={T} h_F > 1", "> 1", rep.h, rep.h.lo > 1))
        rows.append(_row(f"T={T} C2", C2, rep.flags.get(C2), C2 in rep.flags))
    return rows


DELTA = 0.1


def case_pi2_over_8():
    S = sum_series(AffineFamily(2, 1), PowerOfShift(1.0, 0), 100_000)
    ref = math.pi**2 / 8 - 1
    Sd = sum_series(AffineFamily(2, 1 + DELTA), PowerOfShift(1.0, 0), 100_000)
    return [
        _row("sum (2n+1)^-2", ref, S, S.contains(ref), 5e-5),
        _row("sum (2n+1)^-2 near 0.2337", 0.2337, S, abs(S.mid - 0.2337) <= 5e-5, 5e-5),
        _row(f"sum (2n+1+{DELTA})^-2 > 0.2", 0.2, Sd, Sd.lo > 0.2),
    ]


def case_delta_family():
    rows = []
    seq = AffineFamily(2, 1 + DELTA)
    for T in (1, 2, 5, 6):
        rep = dimension_report(SystemSpec("G", seq, T), 1e-3)
        if T <= 2:
            ok = C1 in rep.flags and "restricted-interval-gap" in rep.flags[C1]
            rows.append(_row(f"T={T} C1 (h_G < 1)", C1, rep.flags.get(C1), ok and rep.h.hi < 1))
        else:
            rows.append(_row(f"T={T} C2 (h_G > 1)", C2, rep.flags.get(C2), C2 in rep.flags))
    return rows


def case_lambda0():
    lam = lambda0_locate(1e-3)
    s15, s2 = s_lambda(1.5, 1_000_000), s_lambda(2.0, 1_000_000)
    b15, b2 = s_lambda_bracket(1.5), s_lambda_bracket(2.0)
    iv = lam.interval
    return [
        _row("lambda_0 in (1.5, 2)", [1.5, 2.0], iv, 1.5 < iv.lo and iv.hi < 2.0),
        _row("lambda_0 width", "<= 1e-3", iv.width, iv.width <= 1e-3),
        _row("s(1.5) > 1", 1.0, s15, s15.lo > 1),
        _row("s(2) < 1", 1.0, s2, s2.hi < 1),
        _row("s(1.5) within closed-form bracket", list(b15), s15, b15[0] <= s15.lo and s15.hi <= b15[1]),
        _row("s(2) within closed-form bracket", list(b2), s2, b2[0] <= s2.lo and s2.hi <= b2[1]),
    ]


def case_irregular_witness():
    w = irregular_witness(1, 0.001)
    return [
        _row("P_G(1/2) < 0", "< 0", w.PG_half_upper, w.g_irregular),
        _row("0 < P_F(1/2) < inf", "(0, inf)", w.PF_half, w.f_regular),
    ]


def case_theta():
    rows = []
    for g in (1, 2, 3):
        seq = PolynomialFamily(2, g)
        th = theta(seq)
        est = theta_estimate(seq, 1_000_000)
        rows.append(_row(f"theta gamma={g}", 1 / (2 * g), th.value, th.exact and th.value.lo == 1 / (2 * g)))
        rows.append(_row(f"theta estimate gamma={g}", 1 / (2 * g), est.estimate, abs(est.estimate - 1 / (2 * g)) <= 0.02, 0.02))
    th = theta(LogFamily(1.5))
    rows.append(_row("theta log family", 0.5, th.value, th.exact and th.value.lo == 0.5))
    return rows


def case_L_grid():
    ts = [round(0.01 * k, 2) for k in range(1, 51)]
    half = all(L_of_t(t) == 2.0 for t in ts)
    upper = [round(0.5 + 0.01 * k, 2) for k in range(1, 50)]
    within = all(L_of_t(t) <= L_upper_bound(t) for t in upper)
    L75 = L_of_t(0.75)
    return [
        _row("L(t) = 2 on (0, 0.5]", 2.0, half, half),
        _row("L(t) <= closed-form bound on (0.5, 1)", True, within, within),
        _row("L(0.75)", "<= 2.45", L75, L75 <= 2.45),
    ]


def case_delta_grid():
    ts = [0.05 * k for k in range(1, 20)]
    q0 = max(abs(q_func(t, 0.0) - 4.0) for t in ts)
    ds = [delta_t(t) for t in ts]
    res = max(abs(q_func(t, d) - 4.0) for t, d in zip(ts, ds))
    dec = all(a > b for a, b in zip(ds, ds[1:]))
    xi = all(xi_t(t) <= d for t, d in zip(ts, ds))
    return [
        _row("q(t, 0) = 4", 4.0, q0, q0 <= 4 * sys.float_info.epsilon),
        _row("q(t, delta_t) = 4", 4.0, res, res <= 1e-8, 1e-8),
        _row("delta_t strictly decreasing", True, dec, dec),
        _row("xi_t <= delta_t", True, xi, xi),
    ]


def case_dimension_gap():
    spec = SystemSpec("F", PolynomialFamily(1, 2, 1), 1)
    g = dimension_gap_threshold(spec)
    h = hausdorff_dim(SystemSpec("F", tail_shift(spec.digits, g.q), 1), 1e-6)
    prev_ok = g.at_q_minus_1 is None or not g.at_q_minus_1.hi < 1
    return [
        _row("series < 1 at q", "< 1", g.at_q, g.at_q.hi < 1),
        _row("series not < 1 at q-1", ">= 1 or undetermined", g.at_q_minus_1, prev_ok),
        _row("shifted h < 1/3", 1 / 3, h, h.hi < 1 / 3),
    ]


def case_figure_1():
    spec = SystemSpec("G", AffineFamily(2, 1e-9), 5)
    osc = osc_report(spec, 10)
    tree = disc_tree(spec, 1, K=10)
    exact = all(
        tree.centers[i] == generator_disc(a).center and tree.radii[i] == generator_disc(a).radius
        for i, a in enumerate(spec.alphabet(10))
    )
    return [
        _row("CIFS", True, cifs_check(spec).valid, cifs_check(spec).valid),
        _row("level-1 discs disjoint", True, osc.disjoint, osc.disjoint),
        _row("50 level-1 discs", 50, int(tree.radii.size), tree.radii.size == 50),
        _row("level-1 discs closed form", True, exact, exact),
    ]


CASES = {
    "example-2n-T2": case_example_2n_T2,
    "example-17-19-n3-T4": case_example_17_19,
    "c1-polynomial": case_c1_polynomial,
    "c2-affine-d1-2": case_c2_affine,
    "pi2-over-8": case_pi2_over_8,
    "delta-family": case_delta_family,
    "lambda0": case_lambda0,
    "irregular-witness": case_irregular_witness,
    "theta": case_theta,
    "dimension-gap": case_dimension_gap,
    "figure-1-geometry": case_figure_1,
    "L-grid": case_L_grid,
    "delta-grid": case_delta_grid,
}


def reproduce(case: str = "all"):
    names = list(CASES) if case == "all" else [case]
    results = {}
    for name in names:
        if name not in CASES:
            raise ConfigError(f"case: unknown reproduce case {name!r}; known: {', '.join(CASES)}")
        rows = CASES[name]()
        results[name] = {"ok": all(r["ok"] for r in rows), "checks": rows}
    return results


def table(results) -> str:
    lines = []
    for name, res in results.items():
        lines.append(f"{'PASS' if res['ok'] else 'FAIL'}  {name}")
        for r in res["checks"]:
            tol = "" if r["tol"] is None else f"  tol {r['tol']}"
            lines.append(f"    {'ok ' if r['ok'] else 'BAD'} {r['check']}: expected {r['expected']}, got {r['computed']}{tol}")
    return "\n".join(lines) + "\n"


def cmd_reproduce(cfg):
    results = _clean(reproduce(cfg.case))
    sys.stdout.write(table(results))
    trace = [("reproduce-case", {"case": k}, "pass" if v["ok"] else "fail") for k, v in results.items()]
    return results, trace, EXIT_OK if all(v["ok"] for v in results.values()) else EXIT_ERROR


HANDLERS = {
    "validate": cmd_validate,
    "pressure": cmd_pressure,
    "dim": cmd_dim,
    "classify": cmd_classify,
    "gap": cmd_gap,
    "compare": cmd_compare,
    "render": cmd_render,
    "reproduce": cmd_reproduce,
}


def run(cfg: RunConfig):
    """Dispatch one command; returns (report, exit code)."""
    out = HANDLERS[cfg.command](cfg)
    results, trace, code = out[:3]
    used = out[3] if len(out) > 3 else cfg
    budgets = used.budgets()
    budgets["escalated"] = used.M != cfg.M
    rows = [row if isinstance(row, dict) else {"tag": row[0], "inputs": row[1], "verdict": row[2]} for row in trace]
    return make_report(cfg, results, rows, budgets), code


# ---------------------------------------------------------------- argparse


def build_parser():
    p = argparse.ArgumentParser(prog="cifslab", description="Dimension laboratory for the rotated affine and continued-fraction CIFS families.")
    p.add_argument("--version", action="version", version=f"cifslab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config document")
        sp.add_argument("--d", dest="digits", help="digit sequence: 2n, example, affine:a,b, poly:c,gamma[,L,s], log:lam")
        sp.add_argument("--T", type=int)
        sp.add_argument("--family", choices=["F", "G"])
        sp.add_argument("--tol", type=float)
        sp.add_argument("--M", type=int)
        sp.add_argument("--K", type=int)
        sp.add_argument("--N", type=int)
        sp.add_argument("--out", help="report path (render: image path)")
        sp.add_argument("--pretty", action="store_true", help="human-readable output on stdout")
        if name == "pressure":
            sp.add_argument("--t", type=float, action="append", help="pressure argument, repeatable")
        if name == "render":
            sp.add_argument("--depth", type=int)
            sp.add_argument("--min-radius", type=float, dest="min_radius")
            sp.add_argument("--width", type=int)
            sp.add_argument("--height", type=int)
            sp.add_argument("--png")
            sp.add_argument("--metadata", help="line-delimited leaf disc records")
            sp.add_argument("--report", help="JSON report path")
            sp.add_argument("--shade-depth", action="store_true", dest="shade_depth", default=None)
        if name == "reproduce":
            sp.add_argument("case", nargs="?", default="all")
        if name == "validate":
            sp.add_argument("--probe", type=int)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ns = vars(args)
    command = ns.pop("command")
    pretty_out = ns.pop("pretty")
    config_path = ns.pop("config")
    report_path = ns.pop("report", None)
    try:
        doc = {}
        if config_path:
            with open(config_path) as fh:
                doc = json.load(fh)
        if ns.get("t") is not None:
            ns["t"] = tuple(ns["t"])
        cfg = parse_config(doc, command, ns)
        cfg.pretty = pretty_out
        report, code = run(cfg)
    except (ConfigError, DigitError, OSError, ArithmeticError, RuntimeError, json.JSONDecodeError) as e:
        sys.stderr.write(f"cifslab: error: {e}\n")
        return EXIT_ERROR
    text = dumps(report)
    # render's --out is the image; its report goes to --report or stdout
    dest = report_path if command == "render" else cfg.out
    if dest:
        with open(dest, "w") as fh:
            fh.write(text)
    if pretty_out:
        sys.stdout.write(pretty(report))
    elif not dest and command != "reproduce":
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
