"""Command-line front end: JSON scenarios in, canonical reports out.

Input files are plain JSON with integer data only; every rational in the
output is a reduced "p/q" string, so no floating-point number ever appears
on either side.  JSON output is canonical (sorted keys, two-space indent)
and round-trips byte-identically.

Exit codes: 0 analysis completed (whatever the verdict), 2 invalid input,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .curve_model import (ChainCurve, GeneratedPairData, LineBundleTwist, SheafNumerics,
                          kernel_numerics, sheaf_from_multidegree, twist)
from .errors import InternalInvariantError, ValidationError
from .feasibility import (FeasibleRegion, InfeasibilityCertificate, Polarization,
                          RationalInterval, find_polarization)
from .oracle import GridSpec, cross_validate
from .stability import Report, Verdict, analyze, analyze_sheaf

SCHEMA_TEXT = """\
Scenario file format (a single JSON object):

{
  "curve":   {"genera": [g1, ..., gn]},              # integers >= 2, n >= 2
  "subject": {"sheaf": {...}} or {"pair": {...}},    # exactly one
  "twist":   {"multidegree": [t1, ..., tn]}          # optional line-bundle twist
}

sheaf fields:
  multirank:    [r1, ..., rn]   non-negative integers
  multidegree:  [d1, ..., dn]   integers

pair fields:
  rank:         positive integer (rank of the generated bundle)
  sections:     integer > rank (dimension of the generating section space)
  multidegree:  [d1, ..., dn]   non-negative integers
  optional hypothesis flags, each a list of n booleans (default all false):
    restriction_semistable, restriction_stable,
    kernel_restriction_semistable, kernel_restriction_stable,
    ker_rho_nonzero, twisted_sections_nonzero, h1_vanishes

Commands:
  polarize  feasibility region and witness for the subject's weight system
  check     full criterion analysis with certificates
  oracle    brute-force grid cross-validation (--denominator, --twist-range)
  schema    print this description

All numbers in scenario files are integers; rationals appear only in output,
as reduced "p/q" strings.  Exit codes: 0 analysis completed, 2 invalid
input, 3 internal invariant violation.
"""


@dataclass(frozen=True)
class Scenario:
    curve: ChainCurve
    sheaf: Optional[SheafNumerics]
    pair: Optional[GeneratedPairData]
    twist: Optional[LineBundleTwist]


def _expect(obj, key, where, required=True):
    if key not in obj:
        if required:
            raise ValidationError(f"{where}: missing required field {key!r}")
        return None
    return obj[key]


def _as_dict(value, where):
    if not isinstance(value, dict):
        raise ValidationError(f"{where}: expected an object, got {type(value).__name__}")
    return value


def _as_list(value, where):
    if not isinstance(value, list):
        raise ValidationError(f"{where}: expected a list, got {type(value).__name__}")
    return value


def _as_int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    return value


def parse_scenario(data: dict) -> Scenario:
    data = _as_dict(data, "scenario")
    unknown = set(data) - {"curve", "subject", "twist"}
    if unknown:
        raise ValidationError(f"scenario: unknown fields {sorted(unknown)}")
    curve_obj = _as_dict(_expect(data, "curve", "scenario"), "curve")
    genera = [_as_int(g, "curve.genera") for g in _as_list(_expect(curve_obj, "genera", "curve"),
                                                           "curve.genera")]
    curve = ChainCurve(tuple(genera))

    subject = _as_dict(_expect(data, "subject", "scenario"), "subject")
    if set(subject) == {"sheaf"}:
        sh = _as_dict(subject["sheaf"], "subject.sheaf")
        ranks = [_as_int(r, "sheaf.multirank") for r in
                 _as_list(_expect(sh, "multirank", "subject.sheaf"), "sheaf.multirank")]
        degs = [_as_int(d, "sheaf.multidegree") for d in
                _as_list(_expect(sh, "multidegree", "subject.sheaf"), "sheaf.multidegree")]
        unknown = set(sh) - {"multirank", "multidegree"}
        if unknown:
            raise ValidationError(f"subject.sheaf: unknown fields {sorted(unknown)}")
        sheaf = sheaf_from_multidegree(curve, ranks, degs)
        pair = None
    elif set(subject) == {"pair"}:
        pr = _as_dict(subject["pair"], "subject.pair")
        flag_names = ("restriction_semistable", "restriction_stable",
                      "kernel_restriction_semistable", "kernel_restriction_stable",
                      "ker_rho_nonzero", "twisted_sections_nonzero", "h1_vanishes")
        unknown = set(pr) - {"rank", "sections", "multidegree", *flag_names}
        if unknown:
            raise ValidationError(f"subject.pair: unknown fields {sorted(unknown)}")
        flags = {}
        for name in flag_names:
            if name in pr:
                raw = _as_list(pr[name], f"pair.{name}")
                for v in raw:
                    if not isinstance(v, bool):
                        raise ValidationError(f"pair.{name}: expected booleans, got {v!r}")
                flags[name] = tuple(raw)
        pair = GeneratedPairData(
            rank=_as_int(_expect(pr, "rank", "subject.pair"), "pair.rank"),
            sections=_as_int(_expect(pr, "sections", "subject.pair"), "pair.sections"),
            multidegree=tuple(_as_int(d, "pair.multidegree") for d in
                              _as_list(_expect(pr, "multidegree", "subject.pair"),
                                       "pair.multidegree")),
            **flags)
        if pair.n != curve.n:
            raise ValidationError(
                f"pair.multidegree has length {pair.n} but the curve has {curve.n} components")
        sheaf = None
    else:
        raise ValidationError("subject: provide exactly one of 'sheaf' or 'pair'")

    line = None
    if "twist" in data and data["twist"] is not None:
        tw = _as_dict(data["twist"], "twist")
        unknown = set(tw) - {"multidegree"}
        if unknown:
            raise ValidationError(f"twist: unknown fields {sorted(unknown)}")
        line = LineBundleTwist(tuple(_as_int(d, "twist.multidegree") for d in
                                     _as_list(_expect(tw, "multidegree", "twist"),
                                              "twist.multidegree")))
        if line.n != curve.n:
            raise ValidationError(
                f"twist.multidegree has length {line.n} but the curve has {curve.n} components")
    return Scenario(curve, sheaf, pair, line)


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    return parse_scenario(data)


# --------------------------------------------------------------------------
# Canonical serialization: rationals as reduced "p/q" strings, sorted keys.
# --------------------------------------------------------------------------

def frac_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _interval_json(iv: RationalInterval) -> dict:
    return {
        "lower": None if iv.lower is None else frac_str(iv.lower),
        "lower_open": iv.lower_open,
        "upper": None if iv.upper is None else frac_str(iv.upper),
        "upper_open": iv.upper_open,
    }


def _witness_json(w: Optional[Polarization]):
    return None if w is None else [frac_str(x) for x in w.weights]


def _region_json(region: FeasibleRegion) -> dict:
    return {
        "status": region.status,
        "s_intervals": [_interval_json(iv) for iv in region.s_intervals],
        "witness": _witness_json(region.witness),
    }


def _certificate_json(cert: Optional[InfeasibilityCertificate]):
    if cert is None:
        return None
    return {
        "quantity": cert.quantity,
        "lower": frac_str(cert.lower),
        "lower_open": cert.lower_open,
        "lower_reason": cert.lower_reason,
        "upper": frac_str(cert.upper),
        "upper_open": cert.upper_open,
        "upper_reason": cert.upper_reason,
        "verified": cert.verify(),
    }


def _verdict_json(v: Verdict) -> dict:
    return {
        "kind": v.kind,
        "criterion": v.criterion,
        "witness": _witness_json(v.witness),
        "certificate": _certificate_json(v.certificate),
        "notes": list(v.notes),
    }


def _sheaf_json(s: SheafNumerics) -> dict:
    return {
        "multirank": list(s.multirank),
        "multidegree": list(s.multidegree),
        "chi_components": list(s.chi_components),
        "chi": s.chi,
    }


def _report_json(report: Report) -> dict:
    out = {
        "verdict": _verdict_json(report.verdict),
        "region": None if report.region is None else _region_json(report.region),
        "sheaf": _sheaf_json(report.sheaf),
        "fired": list(report.fired),
        "obstructions": list(report.obstructions),
        "notes": list(report.notes),
    }
    if report.k_bound is None:
        out["k_bound"] = None
    else:
        kb = report.k_bound
        out["k_bound"] = {
            "bound": kb.bound,
            "holds": kb.holds,
            "k_within_bound": kb.k_within_bound,
            "h0_per_component": list(kb.h0.per_component),
            "h0_methods": list(kb.h0.methods),
            "h0_total": kb.h0.total,
        }
    return out


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2)


def render_text(payload: dict) -> str:
    lines = [f"command: {payload['command']}"]
    if "verdict" in payload:
        v = payload["verdict"]
        lines.append(f"verdict: {v['kind']}")
        lines.append(f"criterion: {v['criterion']}")
        if v["witness"] is not None:
            lines.append(f"witness: ({', '.join(v['witness'])})")
        cert = v["certificate"]
        if cert is not None:
            lo_rel = ">" if cert["lower_open"] else ">="
            hi_rel = "<" if cert["upper_open"] else "<="
            lines.append(
                f"certificate: {cert['quantity']} {lo_rel} {cert['lower']} "
                f"[{cert['lower_reason']}] clashes with {cert['quantity']} {hi_rel} "
                f"{cert['upper']} [{cert['upper_reason']}]")
        for note in v["notes"]:
            lines.append(f"note: {note}")
    if payload.get("region") is not None:
        region = payload["region"]
        lines.append(f"region: {region['status']}")
        for i, iv in enumerate(region["s_intervals"], start=1):
            lo = "-inf" if iv["lower"] is None else iv["lower"]
            hi = "+inf" if iv["upper"] is None else iv["upper"]
            lb = "(" if iv["lower_open"] else "["
            rb = ")" if iv["upper_open"] else "]"
            lines.append(f"  S_{i} in {lb}{lo}, {hi}{rb}")
        if region["witness"] is not None:
            lines.append(f"  witness: ({', '.join(region['witness'])})")
    if payload.get("sheaf") is not None:
        s = payload["sheaf"]
        lines.append(f"sheaf: multirank={s['multirank']} multidegree={s['multidegree']} "
                     f"chi_components={s['chi_components']} chi={s['chi']}")
    if payload.get("k_bound") is not None:
        kb = payload["k_bound"]
        lines.append(f"section bound: {kb['bound']} (holds: {kb['holds']}, "
                     f"declared sections within bound: {kb['k_within_bound']})")
    for key in ("fired", "obstructions", "discrepancies", "notes"):
        if payload.get(key):
            lines.append(f"{key}: {payload[key]}")
    for key in ("region_status", "grid_count", "agreement", "witness_checks",
                "denominator", "twist_range"):
        if key in payload:
            lines.append(f"{key}: {payload[key]}")
    if payload.get("witness_failures"):
        for item in payload["witness_failures"][:10]:
            lines.append(f"  no destabilizer for w={item['w']} twist={item['twist']}")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# Commands.
# --------------------------------------------------------------------------

def _subject_numerics(scn: Scenario) -> SheafNumerics:
    if scn.sheaf is not None:
        subject = scn.sheaf
        if scn.twist is not None:
            subject = twist(subject, scn.twist)
        return subject
    kernel = kernel_numerics(scn.curve, scn.pair)
    if scn.twist is not None:
        kernel = twist(kernel, scn.twist)
    return kernel


def cmd_polarize(scn: Scenario) -> dict:
    subject = _subject_numerics(scn)
    region = find_polarization(subject)
    return {
        "command": "polarize",
        "curve": {"genera": list(scn.curve.genera)},
        "subject": "sheaf" if scn.sheaf is not None else "pair",
        "sheaf": _sheaf_json(subject),
        "region": _region_json(region),
    }


def cmd_check(scn: Scenario) -> dict:
    if scn.pair is not None:
        report = analyze(scn.curve, scn.pair, scn.twist)
    else:
        report = analyze_sheaf(_subject_numerics(scn))
    payload = {
        "command": "check",
        "curve": {"genera": list(scn.curve.genera)},
        "subject": "sheaf" if scn.sheaf is not None else "pair",
    }
    payload.update(_report_json(report))
    if scn.pair is not None:
        payload["pair"] = {
            "rank": scn.pair.rank,
            "sections": scn.pair.sections,
            "multidegree": list(scn.pair.multidegree),
        }
    return payload


def cmd_oracle(scn: Scenario, denominator: int, twist_range: int) -> dict:
    grid = GridSpec(denominator, scn.curve.n)
    report = cross_validate(scn.curve, grid, sheaf=scn.sheaf, pair=scn.pair,
                            line=scn.twist, twist_range=twist_range)
    return {
        "command": "oracle",
        "curve": {"genera": list(scn.curve.genera)},
        "denominator": denominator,
        "twist_range": twist_range,
        "region_status": report.region_status,
        "grid_count": report.grid_count,
        "agreement": report.agreement,
        "discrepancies": list(report.discrepancies),
        "witness_checks": report.witness_checks,
        "witness_failures": [
            {"w": [frac_str(x) for x in w.weights], "twist": list(tw.multidegree)}
            for w, tw in report.witness_failures],
        "notes": list(report.notes),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainstab",
        description="Exact-arithmetic polarization stability analyzer for sheaf data "
                    "on chain-like nodal curves.")
    parser.add_argument("command", choices=("polarize", "check", "oracle", "schema"))
    parser.add_argument("scenario", nargs="?", help="path to a scenario JSON file")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--denominator", type=int, default=60,
                        help="grid denominator for the oracle command (default 60)")
    parser.add_argument("--twist-range", type=int, default=3, dest="twist_range",
                        help="oracle sweeps twists with |deg| up to this bound (default 3)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        print(SCHEMA_TEXT, end="")
        return 0
    if args.scenario is None:
        print("error: a scenario file is required for this command", file=sys.stderr)
        return 2
    try:
        scn = load_scenario(args.scenario)
        if args.command == "polarize":
            payload = cmd_polarize(scn)
        elif args.command == "check":
            payload = cmd_check(scn)
        else:
            payload = cmd_oracle(scn, args.denominator, args.twist_range)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    if args.format == "json":
        print(canonical_json(payload))
    else:
        print(render_text(payload))
    return 0


if __name__ == "__main__":
    sys.exit(main())
