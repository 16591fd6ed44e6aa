"""Batch commands behind the CLI.

Each ``cmd_*`` takes a parameter dict and returns a :class:`Report`: the
inputs echoed back, the results, and a verification block in which every
postcondition of the underlying computation is checked again.  Reports are
plain data so that the same parameters and seed always serialise to the same
bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import adic, characters, kakutani, monothetic, polars, torus
from .errors import ParameterError

COMMANDS = ("metric", "kakutani", "polar", "hull", "monothetic", "adic")


@dataclass
class Report:
    command: str
    inputs: dict
    seed: int
    results: dict
    verification: list = field(default_factory=list)
    trace: list | None = None  # rows of (N, product) for delimited output
    timing: dict | None = None
    figures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v["passed"] for v in self.verification)

    def check(self, name: str, passed: bool, **detail) -> None:
        self.verification.append({"check": name, "passed": bool(passed), **detail})

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "inputs": self.inputs,
            "config": {"seed": self.seed},
            "results": self.results,
            "verification": {"passed": self.passed, "checks": self.verification},
        }
        if self.figures:
            out["figures"] = self.figures
        if self.timing is not None:
            out["timing"] = self.timing
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_jsonable)

    def to_csv(self) -> str:
        """Two-column output: the product trace when there is one, else flattened key/value rows."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.trace is not None:
            w.writerow(["N", "product"])
            for n, p in self.trace:
                w.writerow([n, repr(p)])
            return buf.getvalue()
        w.writerow(["key", "value"])
        flat = _flatten({"results": self.results, "verification": {c["check"]: c["passed"] for c in self.verification}})
        flat["verification.passed"] = self.passed
        flat["config.seed"] = self.seed
        for k in sorted(flat):
            w.writerow([k, _scalar(flat[k])])
        return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _scalar(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return json.dumps(v, default=_jsonable)
    return str(v)


# ---------------------------------------------------------------- param helpers


def _get(params: dict, key: str, default: Any = ..., kind: Callable = None):
    if key not in params:
        if default is ...:
            raise ParameterError(f"missing parameter '{key}'")
        return default
    value = params[key]
    if kind is not None:
        try:
            value = kind(value)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"bad value for '{key}': {value!r}") from exc
    return value


def _float_list(value) -> list:
    if not isinstance(value, (list, tuple)):
        raise ParameterError(f"expected a list of numbers, got {value!r}")
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"expected a list of numbers, got {value!r}") from exc
    if not all(math.isfinite(v) for v in out):
        raise ParameterError("sequence entries must be finite")
    return out


def _character(value, cls=characters.Character) -> characters.Character:
    if not isinstance(value, dict):
        raise ParameterError(f"a character is a JSON object index -> coefficient, got {value!r}")
    try:
        return cls.from_dict(value)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"malformed character {value!r}") from exc


def _fraction(value) -> Fraction:
    try:
        return Fraction(str(value))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"not an exact rational: {value!r}") from exc


def _base(params: dict) -> adic.GammaSeq:
    if "a" in params:
        return adic.GammaSeq(tuple(int(x) for x in params["a"]))
    return adic.GammaSeq.squares(_get(params, "length", 8, int))


# ---------------------------------------------------------------- commands


def cmd_metric(params: dict, seed: int = 0) -> Report:
    """``d_p``, ``rho_p`` and the quotient metric for two real sequences, with both sandwiches."""
    x = _float_list(_get(params, "x"))
    y = _float_list(_get(params, "y"))
    p = torus.validate_p(_get(params, "p", 2.0, float))
    samples = _get(params, "samples", 0, int)
    rep = Report("metric", {"x": x, "y": y, "p": p, "samples": samples}, seed, {})

    tx, ty = torus.quotient_iso(x), torus.quotient_iso(y)
    d = torus.dist_p(tx, ty, p)
    rho = torus.rho_p(tx, ty, p)
    rep.results.update(dist_p=d, rho_p=rho)
    n = max(len(x), len(y))
    diffs = list(torus.canonical_angles(np.asarray(y + [0.0] * (n - len(y))) - np.asarray(x + [0.0] * (n - len(x)))))
    rep.check("chord_sandwich", torus.chord_sandwich_holds(diffs, p) if p > 0 else True)
    if p >= 1:
        dstar = torus.quotient_dist(torus.RealSeq(tuple(x), p), torus.RealSeq(tuple(y), p))
        rep.results["quotient_dist"] = dstar
        rep.check("quotient_sandwich", math.pi * dstar <= d * (1 + 1e-12) + 1e-15 and d <= 2 * math.pi * dstar * (1 + 1e-12) + 1e-15)
        rep.check("rho_equals_quotient", abs(rho - dstar) <= 1e-12 * max(1.0, rho))
    if samples:
        rng = np.random.default_rng(seed)
        worst = math.inf
        for _ in range(samples):
            a = rng.uniform(-3, 3, len(x) or 1)
            b = rng.uniform(-3, 3, len(x) or 1)
            dd = torus.dist_p(torus.quotient_iso(a), torus.quotient_iso(b), p)
            r = torus.rho_p(torus.quotient_iso(a), torus.quotient_iso(b), p)
            if r > 0:
                worst = min(worst, dd / (math.pi * r) - 1, 2 - dd / (math.pi * r))
        rep.results["sampled_min_slack"] = worst if math.isfinite(worst) else 0.0
        rep.check("sampled_sandwich", worst >= -1e-12)
    rep.results["diffs"] = [float(t) for t in diffs]
    return rep


def _shift(spec, n_max: int) -> list:
    if isinstance(spec, (list, tuple)):
        return _float_list(spec)
    if isinstance(spec, (int, float)):
        return [float(spec)] * n_max
    if isinstance(spec, dict):
        if "constant" in spec:
            return [float(spec["constant"])] * n_max
        if "reciprocal" in spec:
            off = float(spec["reciprocal"])
            scale = float(spec.get("scale", 1.0))
            return [scale / (n + off) for n in range(1, n_max + 1)]
        if "power" in spec:
            s = float(spec["power"])
            scale = float(spec.get("scale", 1.0))
            return [scale * n**-s for n in range(1, n_max + 1)]
    raise ParameterError(f"unrecognised shift spec {spec!r}")


def cmd_kakutani(params: dict, seed: int = 0) -> Report:
    n_max = _get(params, "n_max", None, int) or _get(params, "N", 1000, int)
    family_name = _get(params, "family", "exp", str)
    shift_spec = _get(params, "shift", 0.0)
    phis = _shift(shift_spec, n_max)
    if family_name in ("linear", "LinearShift"):
        family = kakutani.DensityFamily.linear()
    elif family_name in ("exp", "ExpFamily"):
        c = _get(params, "c", 1.0)
        cs = _float_list(c) if isinstance(c, (list, tuple)) else [float(c)] * n_max
        family = kakutani.DensityFamily.exponential(cs)
    else:
        raise ParameterError(f"unknown family {family_name!r}")
    p_eq = _get(params, "p_eq", kakutani.DEFAULT_P_EQ, float)
    p_sing = _get(params, "p_sing", kakutani.DEFAULT_P_SING, float)
    inputs = {"family": family.kind.value, "shift": shift_spec, "n_max": n_max, "p_eq": p_eq, "p_sing": p_sing}
    if family.kind is kakutani.Kind.EXP_FAMILY:
        inputs["c"] = _get(params, "c", 1.0)
    rep = Report("kakutani", inputs, seed, {})

    trace = kakutani.kakutani_classify(family, phis, n_max, p_eq, p_sing)
    prods = trace.partial_products
    rep.results.update(verdict=trace.verdict.value, final_product=prods[-1], n=len(prods))
    rep.trace = list(enumerate(prods, start=1))
    rep.check("products_in_unit_interval", all(0 <= q <= 1 for q in prods))
    rep.check("products_nonincreasing", all(b <= a for a, b in zip(prods, prods[1:])))
    rep.check("verdict_consistent", kakutani._classify(prods, p_eq, p_sing) is trace.verdict)
    if family.kind is kakutani.Kind.EXP_FAMILY:
        # closed form against quadrature on a few distinct leading factors
        worst = 0.0
        seen = set()
        for i, phi in enumerate(phis[:n_max]):
            key = (family.c_list[i], float(torus.canonical_angle(phi)))
            if key in seen:
                continue
            seen.add(key)
            worst = max(worst, abs(kakutani.hellinger_closed(*key) - kakutani.hellinger_quad(family, i + 1, phi)))
            if len(seen) >= 5:
                break
        rep.results["closed_vs_quadrature"] = worst
        rep.check("closed_form_matches_quadrature", worst <= 1e-9)
    return rep


def cmd_polar(params: dict, seed: int = 0) -> Report:
    chi = _character(_get(params, "chi"))
    eps = _get(params, "eps", kind=float)
    p = _get(params, "p", 2.0, float)
    rep = Report("polar", {"chi": chi.as_dict(), "eps": eps, "p": p}, seed, {})
    verdict = polars.polar_member_closed(chi, eps, p)
    radius = 1.0 / (4 * eps)
    rep.results.update(verdict=verdict.value, radius=radius)
    if p > 1:
        q = torus.conjugate(p)
        oracle = polars.polar_sup_oracle(chi, eps, p) if chi else 0.0
        rep.results.update(norm_q=characters.norm(chi, q), q=q, oracle_sup=oracle)
        oracle_member = oracle <= 0.25 * (1 + characters.TIE_SLACK)
        rep.results["oracle_verdict"] = (polars.PolarVerdict.MEMBER if oracle_member else polars.PolarVerdict.NON_MEMBER).value
        rep.check("closed_form_matches_oracle", oracle_member == (verdict is polars.PolarVerdict.MEMBER))
        if chi:
            point = polars.holder_extremal(chi, eps, p)
            on_sphere = torus.rho_p(point, (), p)
            rep.results["extremal_point"] = list(point.angles)
            rep.check("extremal_on_sphere", abs(on_sphere - eps) <= 1e-12)
    else:
        nb = characters.norm(chi, "b")
        rep.results.update(norm_b=nb, lower_threshold=radius, upper_threshold=2 * radius)
        expected = (
            polars.PolarVerdict.MEMBER if nb <= radius * (1 + characters.TIE_SLACK)
            else polars.PolarVerdict.NON_MEMBER if nb > 2 * radius * (1 + characters.TIE_SLACK)
            else polars.PolarVerdict.BOUNDARY_ZONE
        )
        rep.check("verdict_matches_thresholds", expected is verdict)
    return rep


def cmd_hull(params: dict, seed: int = 0) -> Report:
    p = _get(params, "p", 2.0, float)
    eps = _get(params, "eps", kind=float)
    radius = _get(params, "radius", 10.0, float)
    rep = Report("hull", {"p": p, "eps": eps, "radius": radius}, seed, {})
    res = polars.hull_witness(p, eps, radius)
    if isinstance(res, polars.BoundedCertificate):
        rep.results.update(kind="BoundedCertificate", **json.loads(res.to_json()))
        r = 1.0 / (4 * eps)
        rep.check("m_times_unit_in_polar", res.m <= r * (1 + characters.TIE_SLACK))
        rep.check("bound_is_quarter_over_m", res.per_coordinate_bound == 1.0 / (4 * res.m))
    else:
        rep.results.update(kind="HullWitness", **json.loads(res.to_json()))
        rep.check("distance_at_least_radius", res.distance >= radius)
        rep.check("bipolar_sup_at_most_quarter", res.bipolar_sup <= 0.25)
        rep.check("witness_in_polar_ball_budget", res.m0 <= (1 / (4 * eps)) ** torus.conjugate(p) * (1 + characters.TIE_SLACK))
    return rep


def cmd_monothetic(params: dict, seed: int = 0) -> Report:
    n_max = _get(params, "n_max", 3, int)
    cap = int(_get(params, "cap", 10**7, float))
    rep_inputs = {"n_max": n_max, "cap": cap}
    omega = params.get("omega")
    if omega is not None:
        omega = _float_list(omega)
        eps = _get(params, "eps", kind=float)
        p = _get(params, "p", 2.0, float)
        rep_inputs.update(omega=omega, eps=eps, p=p)
    rep = Report("monothetic", rep_inputs, seed, {})
    spec = monothetic.build_generator(n_max, cap)
    rep.results["generator"] = json.loads(spec.to_json())
    rep.check("generator_conditions", not spec.check(), violations=spec.check())
    if omega is not None:
        res = monothetic.approx_power(omega, eps, spec, p, cap)
        rep.results["power"] = {
            "k": res.k, "level": res.level, "searched_coords": res.searched_coords,
            "tol": res.tol, "residuals": list(res.residuals), "distance": res.distance,
        }
        direct = torus.dist_p(omega, spec.power(res.k), p)
        rep.check("direct_distance_below_eps", direct < eps, distance=direct)
        rep.check("residuals_below_tol", all(r < res.tol for r in res.residuals))
    return rep


def cmd_adic(params: dict, seed: int = 0) -> Report:
    op = _get(params, "op", "annihilator", str)
    base = _base(params)
    inputs = {"op": op, "a": [str(x) for x in base.a]}
    rep = Report("adic", inputs, seed, {"gamma": [str(g) for g in base.gammas]})
    R = rep.results

    if op in ("annihilator", "quotient_reduce"):
        chi = _character(_get(params, "chi"), adic.SparseGammaChar)
        inputs["chi"] = {str(k): v for k, v in chi.items}
        value = adic.quotient_reduce(chi, base)
        ann = adic.annihilator_test(chi, base)
        R.update(annihilator=ann, quotient=str(value))
        rep.check("kernel_matches_annihilator", ann == (value == 0))
        depth = min(len(base), chi.max_index + 1)
        xs = [Fraction(j, base.gamma(depth)) for j in range(0, base.gamma(depth), max(1, base.gamma(depth) // 64))]
        if ann:
            rep.check("annihilator_pairs_trivially", all(adic.pair_sparse(chi, x, base) == 0 for x in xs))
        rep.check(
            "pairing_through_quotient",
            all(adic.pair_sparse(chi, x, base) == adic.pair_gp(value, x, base) for x in xs),
        )
    elif op == "digits":
        x = _fraction(_get(params, "x"))
        n = _get(params, "n", len(base), int)
        inputs.update(x=str(x), n=n)
        d = adic.digits_of(x, base, n)
        R.update(digits=list(d.digits), remainder=str(d.remainder), exact=d.exact)
        rep.check("round_trip", adic.from_digits(d) + d.remainder == x)
        rep.check("digits_in_range", all(0 <= e < base.base(k) for k, e in enumerate(d.digits, start=1)))
    elif op == "q_approx":
        digits = [int(e) for e in _get(params, "digits")]
        eps = _fraction(_get(params, "eps"))
        inputs.update(digits=digits, eps=str(eps))
        d = adic.AdicDigits(tuple(digits), base)
        res = adic.q_approx(d, eps)
        x = adic.from_digits(d)
        R.update(x=str(x), approximation=str(res.value), level=res.level, r0=str(res.distance))
        exact = adic.r0_dist(x, res.value, base, len(base) + 1)
        rep.check("r0_below_eps", exact < eps, r0=str(exact))
        rep.check("level_base_exceeds_inverse_eps", base.base(res.level - 1) > 1 / eps)
    elif op == "pair":
        n = _get(params, "n", kind=int)
        x = _fraction(_get(params, "x"))
        inputs.update(n=n, x=str(x))
        chi = adic.int_to_digitchar(n, base)
        direct = adic.pair_gp(n, x, base)
        via_digits = adic.pair_digitchar(chi, x)
        R.update(phase=str(direct), head=list(chi.head), tail=chi.tail.value, phase_from_digits=str(via_digits))
        rep.check("digit_form_inverts", adic.digitchar_to_int(chi) == n)
        rep.check("pairings_agree", direct == via_digits)
    elif op == "norm":
        x = _fraction(_get(params, "x"))
        p = _get(params, "p", 2.0, float)
        n = _get(params, "n", len(base) + 1, int)
        inputs.update(x=str(x), p=p, n=n)
        value = adic.norm_gp(x, base, p, n)
        emb = adic.embed_Sp(x, base, n)
        R.update(norm=value, embedding=list(emb.angles))
        rep.check("norm_equals_chordal_distance", abs(value - torus.dist_p(emb, (), p)) <= 1e-12 * max(1.0, value))
    else:
        raise ParameterError(f"unknown adic op {op!r}")
    return rep


DISPATCH = {
    "metric": cmd_metric,
    "kakutani": cmd_kakutani,
    "polar": cmd_polar,
    "hull": cmd_hull,
    "monothetic": cmd_monothetic,
    "adic": cmd_adic,
}


def run(command: str, params: dict, seed: int = 0) -> Report:
    if command not in DISPATCH:
        raise ParameterError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    if not isinstance(params, dict):
        raise ParameterError("params must be a JSON object")
    return DISPATCH[command](params, seed)
