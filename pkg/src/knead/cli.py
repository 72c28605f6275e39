"""Command-line front end.

Every command writes one JSON object (or CSV for ``phi-curve`` and
``--format csv``).  Failures print ``{"error": {"code": ..., "message": ...}}``
and exit with a nonzero status.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .beta import BetaError, beta_expand_one, beta_from_kneading
from .circle import MapError, PiecewiseLinearMarkovMap, joint_check
from .enclosure import Enclosure, as_fraction
from .graph import TransferGraph, sft_from_forbidden
from .hole import IntervalConstraint, classify_critical, dimension
from .seq import Seq, _split, format_seq, is_kneading, left_endpoint_stability, minimal_kneading_above, parse_seq


class CliError(Exception):
    def __init__(self, code: str, message: str, status: int = 1):
        super().__init__(message)
        self.code, self.status = code, status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message, status=2)


@dataclass
class RunConfig:
    command: str
    m: int = 1
    c: str | None = None
    d: str | None = None
    tol: Fraction = Fraction(1, 1000)
    cap: int | None = None
    deep_cap: int | None = None
    map_path: str | None = None
    fmt: str = "json"
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tol <= 0:
            raise CliError("domain", "--tol must be positive")
        if self.cap is not None and self.cap < 1:
            raise CliError("domain", "--cap must be >= 1")
        if self.m < 1:
            raise CliError("domain", "--m must be >= 1")


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _seq(text: str, m: int) -> Seq:
    try:
        return parse_seq(text, m)
    except ValueError as exc:
        raise CliError("parse", str(exc)) from exc


def _common(p, seqs=True):
    p.add_argument("--m", type=int, default=1, help="alphabet is {0..m}")
    if seqs:
        p.add_argument("--c", help="left endpoint literal")
        p.add_argument("--d", help="right endpoint literal")
    p.add_argument("--tol", type=_rational, default=Fraction(1, 1000))
    p.add_argument("--cap", type=int, default=None, help="last depth of the unit-step schedule")
    p.add_argument("--deep-cap", type=int, default=None, help="depths double up to this value")
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="knead", description="Dimension of survivor sets, kneading sequences and beta-expansions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dim", help="certified dimension enclosure of M'_{c,d}")
    _common(p)

    p = sub.add_parser("phi-curve", help="dimension along a grid of endpoints (CSV)")
    _common(p)
    p.add_argument("--vary", choices=("c", "d"), default="d")
    p.add_argument("--length", type=int, default=6, help="grid = all words of this length followed by 0^inf")
    p.add_argument("--grid", nargs="*", default=None, help="explicit literals instead of --length")

    p = sub.add_parser("kneading", help="kneading predicates and constructions")
    p.add_argument("action", choices=("check", "minimal-above", "stability"))
    p.add_argument("literal")
    _common(p, seqs=False)

    p = sub.add_parser("beta", help="beta-expansions of 1")
    p.add_argument("action", choices=("expand", "solve"))
    p.add_argument("literal", nargs="?")
    p.add_argument("--beta", default=None, help="rational beta, or 'lo,hi' enclosure")
    p.add_argument("--digits", type=int, default=20)
    _common(p, seqs=False)
    p.set_defaults(tol=Fraction(1, 10 ** 30))

    p = sub.add_parser("joint-check", help="is (f + eps)(K) disjoint from K?")
    p.add_argument("--map", dest="map_path", default=None, help="map JSON file (default: x -> (m+1)x)")
    p.add_argument("--forbid", default=None, help="comma-separated forbidden words of the target shift")
    p.add_argument("--target", default=None, help="transfer-graph text file for the target shift")
    p.add_argument("--eps", type=_rational, default=Fraction(0))
    p.add_argument("--depth", type=int, default=8)
    _common(p, seqs=False)
    return parser


def cmd_dim(cfg: RunConfig) -> dict:
    if cfg.c is None or cfg.d is None:
        raise CliError("usage", "dim needs --c and --d", status=2)
    try:
        ic = IntervalConstraint(_seq(cfg.c, cfg.m), _seq(cfg.d, cfg.m), cfg.m)
    except ValueError as exc:
        raise CliError("domain", str(exc)) from exc
    res = dimension(ic, cfg.tol, cfg.cap, deep_cap=cfg.deep_cap)
    out = res.to_json()
    out["c"], out["d"], out["m"] = format_seq(ic.c), format_seq(ic.d), cfg.m
    out["classification"] = classify_critical(ic).to_json()
    return out


def _grid(m: int, length: int, explicit):
    if explicit:
        return sorted({parse_seq(t, m) for t in explicit})
    words = itertools.product(range(m + 1), repeat=length)
    return sorted({Seq(m, w) for w in words})


def cmd_phi_curve(cfg: RunConfig) -> list[dict]:
    vary = cfg.extra["vary"]
    fixed_text = cfg.c if vary == "d" else cfg.d
    if fixed_text is None:
        fixed_text = "(0)" if vary == "d" else f"({cfg.m})"
    fixed = _seq(fixed_text, cfg.m)
    try:
        grid = _grid(cfg.m, cfg.extra["length"], cfg.extra["grid"])
    except ValueError as exc:
        raise CliError("parse", str(exc)) from exc
    rows = []
    for x in grid:
        row = {"literal": format_seq(x), "lower": "", "upper": "", "k": "", "converged": "", "class": "", "error": ""}
        try:
            ic = IntervalConstraint(fixed, x, cfg.m) if vary == "d" else IntervalConstraint(x, fixed, cfg.m)
            res = dimension(ic, cfg.tol, cfg.cap, deep_cap=cfg.deep_cap)
            row.update(res.to_json())
            row["class"] = classify_critical(ic).kind
        except (ValueError, BetaError) as exc:
            row["error"] = str(exc)
        rows.append(row)
    return rows


def cmd_kneading(cfg: RunConfig) -> dict:
    x = _seq(cfg.extra["literal"], cfg.m)
    action = cfg.extra["action"]
    if action == "check":
        return {"literal": format_seq(x), "kneading": is_kneading(x)}
    if action == "minimal-above":
        try:
            return {"literal": format_seq(x), "minimal_above": format_seq(minimal_kneading_above(x))}
        except ValueError as exc:
            raise CliError("domain", str(exc)) from exc
    try:
        st = left_endpoint_stability(x)
    except ValueError as exc:
        raise CliError("not_kneading", str(exc)) from exc
    return {"literal": format_seq(x), "i0": st.i0, "radius": str(st.radius)}


def _beta_arg(text: str) -> Enclosure:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return Enclosure.point(as_fraction(parts[0]))
        if len(parts) == 2:
            return Enclosure(as_fraction(parts[0]), as_fraction(parts[1]))
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError("parse", f"bad --beta value {text!r}: {exc}") from exc
    raise CliError("parse", f"bad --beta value {text!r}")


def cmd_beta(cfg: RunConfig) -> dict:
    action = cfg.extra["action"]
    try:
        if action == "expand":
            if cfg.extra["beta"] is None:
                raise CliError("usage", "beta expand needs --beta", status=2)
            expn = beta_expand_one(_beta_arg(cfg.extra["beta"]), cfg.extra["digits"])
            sep = "" if max(expn.digits, default=0) < 10 else ","
            return {"digits": sep.join(map(str, expn.digits)), "truncated": expn.truncated}
        if cfg.extra["literal"] is None:
            raise CliError("usage", "beta solve needs a sequence literal", status=2)
        s = _seq(cfg.extra["literal"], cfg.m)
        beta = beta_from_kneading(s, cfg.tol)
        return {"literal": format_seq(s), "beta": list(beta.decimal(18)), "beta_exact": [str(beta.lo), str(beta.hi)]}
    except BetaError as exc:
        hint = ""
        if getattr(exc, "code", "") == "precision":
            hint = "; narrow the beta enclosure or ask for fewer digits"
        raise CliError(exc.code, f"{exc.code}: {exc}{hint}") from exc


def _load_map(path: str | None, m: int) -> PiecewiseLinearMarkovMap:
    if path is None:
        return PiecewiseLinearMarkovMap.linear(m)
    try:
        return PiecewiseLinearMarkovMap.from_json(Path(path).read_text())
    except OSError as exc:
        raise CliError("io", str(exc)) from exc
    except (MapError, ValueError) as exc:
        raise CliError("parse", f"map file: {exc}") from exc


def cmd_joint_check(cfg: RunConfig) -> dict:
    f = _load_map(cfg.map_path, cfg.m)
    if cfg.extra["target"]:
        try:
            target = TransferGraph.from_text(Path(cfg.extra["target"]).read_text())
        except OSError as exc:
            raise CliError("io", str(exc)) from exc
        except (ValueError, KeyError, IndexError) as exc:
            raise CliError("parse", f"target graph: {exc}") from exc
    elif cfg.extra["forbid"] is not None:
        try:
            words = [_split(w.strip(), f.m) for w in cfg.extra["forbid"].split(",") if w.strip()] if f.m < 10 else \
                [_split(w.strip(), f.m) for w in cfg.extra["forbid"].split(";") if w.strip()]
            target = sft_from_forbidden(f.m, words)
        except ValueError as exc:
            raise CliError("parse", str(exc)) from exc
    else:
        raise CliError("usage", "joint-check needs --forbid or --target", status=2)
    if target.m != f.m:
        raise CliError("domain", "target alphabet does not match the map")
    if target.n_vertices == 0:
        raise CliError("domain", "the target shift is empty")
    return joint_check(f, target, cfg.extra["eps"], cfg.extra["depth"]).to_json()


def _emit(result, cfg: RunConfig) -> str:
    if isinstance(result, list) or cfg.fmt == "csv":
        rows = result if isinstance(result, list) else [result]
        flat = [{k: (json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v) for k, v in r.items()} for r in rows]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(flat[0].keys()) if flat else [], lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
        return buf.getvalue()
    return json.dumps(result, sort_keys=True, indent=2) + "\n"


COMMANDS = {
    "dim": cmd_dim,
    "phi-curve": cmd_phi_curve,
    "kneading": cmd_kneading,
    "beta": cmd_beta,
    "joint-check": cmd_joint_check,
}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    base = {"command", "m", "c", "d", "tol", "cap", "deep_cap", "map_path", "fmt", "out"}
    values = vars(ns)
    extra = {k: v for k, v in values.items() if k not in base}
    return RunConfig(
        command=ns.command,
        m=ns.m,
        c=values.get("c"),
        d=values.get("d"),
        tol=ns.tol,
        cap=ns.cap,
        deep_cap=ns.deep_cap,
        map_path=values.get("map_path"),
        fmt=ns.fmt,
        out=ns.out,
        extra=extra,
    )


def main(argv=None) -> int:
    out_path = None
    try:
        ns = build_parser().parse_args(argv)
        cfg = config_from_args(ns)
        out_path = cfg.out
        text = _emit(COMMANDS[cfg.command](cfg), cfg)
        status = 0
    except CliError as exc:
        text = json.dumps({"error": {"code": exc.code, "message": str(exc)}}, sort_keys=True) + "\n"
        status = exc.status
    if out_path and status == 0:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
