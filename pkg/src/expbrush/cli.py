"""Command line entry point.

Exit codes: 0 success, 1 domain error (a check failed or a construction
was impossible), 2 usage error.  Every file is written atomically.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

from .address import ExternalAddress, parse_frac
from .boxes import BoxFamily, Rect, SeedRejected, build_families, validate_family
from .brush import ModelPoint, NotInJulia, SubBrush, classify_point, tip, tips_by_depth
from .complex_plane import (
    DEFAULT_EPS_ATTRACT,
    DEFAULT_ESCAPE_RADIUS,
    DEFAULT_MAX_STEPS,
    ExpParameter,
    Viewport,
    render,
)
from .curve import (
    CurveInvariantError,
    Polyline,
    SelfIntersection,
    assemble_jordan,
    cauchy_tail,
    curve_levels,
    escape_witnesses,
    localized_curve,
)
from .paths import PathError, path_between
from .svgout import curve_svg, path_svg
from .tower import inverse_orbit, partial_sums_inv_squares

COMMANDS = ("verify", "tip", "classify", "boxes", "curve", "path", "render")
SCHEMA_VERSION = 1

DEFAULTS: Dict[str, Any] = {
    "nmax": 10_000,
    "sums": 0,
    "depth": 64,
    "kmax": 3,
    "cert_kmax": 6,
    "offset": 0,
    "seed": "-1,1,-1,1",
    "a": -1.0,
    "viewport": "-4,4,-4,4",
    "size": "256x256",
    "max_steps": DEFAULT_MAX_STEPS,
    "escape_radius": DEFAULT_ESCAPE_RADIUS,
    "eps_attract": DEFAULT_EPS_ATTRACT,
    "eps": 0.5,
}
# escape certificates start at k = 5
COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {"tip": {"kmax": 6}, "classify": {"kmax": 6}}


class UsageError(ValueError):
    def __init__(self, problems: Sequence[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


class DomainError(RuntimeError):
    def __init__(self, message: str, payload: Any = None):
        super().__init__(message)
        self.payload = payload


@dataclass
class RunConfig:
    command: str
    options: Dict[str, Any] = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.__dict__["options"][name]
        except KeyError:
            raise AttributeError(name) from None


# --- parsing ---------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, *names: str):
    if "config" in names:
        p.add_argument("--config", help="JSON config file (schema 1); flags override its values")
    if "addresses" in names:
        p.add_argument(
            "--addresses",
            help='address set: a JSON file {"addresses": [...]} or an inline list separated by ";"',
        )
    if "depth" in names:
        p.add_argument("--depth", type=int, help=f"tip depth N (default {DEFAULTS['depth']})")
    if "kmax" in names:
        p.add_argument("--kmax", type=int, help="box levels (default 3) or largest certificate k (default 6)")
    if "offset" in names:
        p.add_argument("--offset", type=int, help="level offset l (default 0)")
    if "seed" in names:
        p.add_argument("--seed", help="seed rectangle x0,x1,y0,y1 with rational y sides (default -1,1,-1,1)")
    if "out" in names:
        p.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="expbrush", description="Brush model of e^z - 1: tips, escape checks, boxes, curves, paths.")
    sub = top.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("verify", help="table of F^-n(1) against 3/n", description="CSV rows n, F^-n(1), 3/n, pass for n = 1..nmax.")
    _add_common(p, "config", "out")
    p.add_argument("--nmax", type=int, help="largest n (default 10000)")
    p.add_argument("--sums", type=int, help="also print partial sums of F^-k^2(1) for k = 1..SUMS")

    p = sub.add_parser("tip", help="tip of a hair and an escape certificate just past it",
                       description="Depth-N tip by backward recursion, tips at smaller depths, and the double-square certificate for <tip + margin, s>.")
    _add_common(p, "config", "depth", "kmax", "out")
    p.add_argument("--address", help='address such as "1,0" or "1|2,3"')
    p.add_argument("--margin", type=float, help="certificate point sits this far right of the tip (default 1.0)")

    p = sub.add_parser("classify", help="three-state escape verdict for a model point",
                       description="CERTIFIED-ESCAPING, LEFT-DOMAIN or UNKNOWN for <potential, address>.")
    _add_common(p, "config", "depth", "kmax", "out")
    p.add_argument("--address")
    p.add_argument("--potential", type=float)

    p = sub.add_parser("boxes", help="box families for a sub-brush, with the condition report",
                       description="Build box families up to kmax and validate conditions (1)-(8) relative to the sub-brush.")
    _add_common(p, "config", "addresses", "depth", "kmax", "offset", "seed", "out")

    p = sub.add_parser("curve", help="detour curves, closed curve and Cauchy certificate (SVG + JSON sidecar)",
                       description="Build g_0..g_kmax and beta; or validate a supplied family file; or build a localized curve around a center.")
    _add_common(p, "config", "addresses", "depth", "kmax", "offset", "seed", "out")
    p.add_argument("--families", help="validate this box-family JSON instead of building one")
    p.add_argument("--center", help='localized build around T:h=p/q or T:s=ADDRESS')
    p.add_argument("--eps", type=float, help="radius for the localized build (default 0.5)")

    p = sub.add_parser("path", help="certified path between two model points (SVG + JSON)",
                       description="Endpoints are T:h=p/q (off the brush) or T:s=ADDRESS (on a hair, must certify escaping).")
    _add_common(p, "config", "addresses", "depth", "kmax", "out")
    p.add_argument("--from", dest="start")
    p.add_argument("--to", dest="end")
    p.add_argument("--cert-kmax", type=int, dest="cert_kmax", help="kmax for contact certificates (default 6)")

    p = sub.add_parser("render", help="escape-time picture of e^z + a (PNG)",
                       description="Per-pixel orbit verdicts; the colour legend is stored in the PNG text metadata.")
    _add_common(p, "config", "out")
    p.add_argument("--a", type=float, help="parameter a <= -1 (default -1)")
    p.add_argument("--viewport", help="x0,x1,y0,y1 (default -4,4,-4,4)")
    p.add_argument("--size", help="WxH (default 256x256)")
    p.add_argument("--max-steps", type=int, dest="max_steps")
    p.add_argument("--escape-radius", type=float, dest="escape_radius")
    p.add_argument("--eps-attract", type=float, dest="eps_attract")
    return top


_NUMERIC_START = re.compile(r"^-[\d.]")


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """Turn ``--seed -1,1,-1,1`` into ``--seed=-1,1,-1,1`` so argparse does not read it as a flag."""
    out: List[str] = []
    i = 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NUMERIC_START.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _load_config_file(path: str) -> Dict[str, Any]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise UsageError([f"cannot read config {path}: {err}"]) from None
    if not isinstance(data, dict):
        raise UsageError(["config must be a JSON object"])
    if data.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise UsageError([f"unsupported config schema {data.get('schema')!r}"])
    return {k.replace("-", "_"): v for k, v in data.items() if k != "schema"}


def parse_seed(text: str) -> Rect:
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 4:
        raise ValueError("seed needs four values x0,x1,y0,y1")
    x0, x1 = float(parts[0]), float(parts[1])
    try:
        y0, y1 = parse_frac(parts[2]), parse_frac(parts[3])
    except (TypeError, ValueError):
        raise ValueError(f"seed sides must be rational, got {parts[2]!r}, {parts[3]!r}") from None
    return Rect(x0, x1, y0, y1)


def parse_endpoint(text: str):
    """``T:h=p/q`` for a complement point, ``T:s=ADDR`` for a hair point."""
    m = re.fullmatch(r"\s*([^:]+):(h|s)=(.+)", str(text))
    if not m:
        raise ValueError(f"endpoint {text!r} must look like T:h=p/q or T:s=ADDRESS")
    t = float(m.group(1))
    if m.group(2) == "h":
        return (t, parse_frac(m.group(3)))
    return ModelPoint(t, ExternalAddress.parse(m.group(3)))


def load_addresses(source) -> List[ExternalAddress]:
    if isinstance(source, list):
        items = source
    elif isinstance(source, str) and os.path.isfile(source):
        with open(source) as fh:
            data = json.load(fh)
        items = data["addresses"] if isinstance(data, dict) else data
    else:
        items = [x for x in str(source).split(";") if x.strip()]
    return [ExternalAddress.parse(str(x)) for x in items]


def _as_center(e):
    return (e.t, e.s) if isinstance(e, ModelPoint) else e


_REQUIRED = {
    "tip": ("address",),
    "classify": ("address", "potential"),
    "boxes": ("addresses",),
    "curve": ("addresses",),
    "path": ("addresses", "start", "end"),
}


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Parse argv (and an optional --config file) into a validated RunConfig."""
    parser = build_parser()
    ns = parser.parse_args(_join_negative_values(argv))
    if ns.command is None:
        raise UsageError([f"a command is required: {', '.join(COMMANDS)}"])
    opts = {k: v for k, v in vars(ns).items() if k != "command"}
    cfg_path = opts.pop("config", None)
    file_opts = _load_config_file(cfg_path) if cfg_path else {}
    merged: Dict[str, Any] = {}
    for key, val in opts.items():
        if val is not None:
            merged[key] = val
        elif key in file_opts:
            merged[key] = file_opts[key]
        elif key in COMMAND_DEFAULTS.get(ns.command, {}):
            merged[key] = COMMAND_DEFAULTS[ns.command][key]
        elif key in DEFAULTS:
            merged[key] = DEFAULTS[key]
        else:
            merged[key] = None
    problems = [f"--{k.replace('_', '-')} is required for {ns.command}" for k in _REQUIRED.get(ns.command, ()) if merged.get(k) is None]
    problems += _validate(ns.command, merged)
    if problems:
        raise UsageError(problems)
    return RunConfig(ns.command, merged)


def _validate(cmd: str, o: Dict[str, Any]) -> List[str]:
    bad: List[str] = []

    def check(cond, msg):
        if not cond:
            bad.append(msg)

    def attempt(fn, key):
        if o.get(key) is None:
            return
        try:
            o[key] = fn(o[key])
        except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as err:
            bad.append(f"--{key}: {err}")

    if "depth" in o and o["depth"] is not None:
        check(o["depth"] >= 1, "--depth must be >= 1")
    if "kmax" in o and o["kmax"] is not None:
        check(o["kmax"] >= 0, "--kmax must be >= 0")
    if "offset" in o and o["offset"] is not None:
        check(o["offset"] >= 0, "--offset must be >= 0")
    if cmd == "verify":
        check(o["nmax"] >= 1, "--nmax must be >= 1")
        check(o["sums"] >= 0, "--sums must be >= 0")
    if cmd in ("tip", "classify"):
        attempt(ExternalAddress.parse, "address")
        check(o["kmax"] >= 5, "--kmax must be >= 5 for escape certificates")
        if cmd == "tip" and o.get("margin") is not None:
            check(o["margin"] >= 0, "--margin must be >= 0")
        if cmd == "classify" and o.get("potential") is not None:
            check(o["potential"] >= 0, "--potential must be >= 0")
    if cmd in ("boxes", "curve", "path"):
        attempt(load_addresses, "addresses")
        if isinstance(o.get("addresses"), list):
            check(len(o["addresses"]) > 0, "--addresses is empty")
    if cmd in ("boxes", "curve"):
        attempt(parse_seed, "seed")
    if cmd == "curve":
        attempt(lambda c: _as_center(parse_endpoint(c)), "center")
        check(o["eps"] > 0, "--eps must be positive")
    if cmd == "path":
        attempt(parse_endpoint, "start")
        attempt(parse_endpoint, "end")
        check(o["cert_kmax"] >= 5, "--cert-kmax must be >= 5")
    if cmd == "render":
        check(o["a"] <= -1, "--a must be <= -1")
        try:
            vals = [float(x) for x in str(o["viewport"]).split(",")]
            o["viewport"] = Viewport(*vals)
        except (ValueError, TypeError) as err:
            bad.append(f"--viewport: {err}")
        m = re.fullmatch(r"(\d+)x(\d+)", str(o["size"]))
        if m and int(m.group(1)) >= 1 and int(m.group(2)) >= 1:
            o["size"] = (int(m.group(1)), int(m.group(2)))
        else:
            bad.append("--size must be WxH with positive integers")
        check(o["max_steps"] >= 0, "--max-steps must be >= 0")
        check(o["escape_radius"] > 0, "--escape-radius must be positive")
        check(o["eps_attract"] > 0, "--eps-attract must be positive")
    return bad


# --- output ----------------------------------------------------------------

def write_atomic(path: str, data: bytes | str):
    """Write via a temp file in the target directory, then rename over the target."""
    if isinstance(data, str):
        data = data.encode()
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: RunConfig, text: str, out=None):
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        (out or sys.stdout).write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _sidecar(path: str) -> str:
    root, _ = os.path.splitext(path)
    return root + ".json"


# --- commands --------------------------------------------------------------

def cmd_verify(cfg: RunConfig, out) -> int:
    orbit = inverse_orbit(cfg.nmax)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "F^-n(1)", "3/n", "pass"])
    failures = 0
    for n in range(1, cfg.nmax + 1):
        ok = orbit[n] < 3 / n
        failures += not ok
        w.writerow([n, repr(orbit[n]), repr(3 / n), "true" if ok else "false"])
    if cfg.sums:
        sums = partial_sums_inv_squares(cfg.sums)
        limit = math.pi ** 2 / 2
        w.writerow([])
        w.writerow(["k", "sum_{i<=k} F^-i^2(1)", "pi^2/2", "pass"])
        prev = -math.inf
        for k, s in enumerate(sums, start=1):
            ok = s < limit and s >= prev
            failures += not ok
            prev = s
            w.writerow([k, repr(s), repr(limit), "true" if ok else "false"])
    _emit(cfg, buf.getvalue(), out)
    return 0 if failures == 0 else 1


def _cert_json(cert) -> List[dict]:
    return cert.to_json() if cert is not None else []


def cmd_tip(cfg: RunConfig, out) -> int:
    s = cfg.address
    t = tip(s, cfg.depth)
    margin = 1.0 if cfg.margin is None else cfg.margin
    depths = sorted({d for d in (8, 16, 32, cfg.depth) if d <= cfg.depth})
    state, cert, _ = classify_point(ModelPoint(t + margin, s), cfg.kmax)
    payload = {
        "address": str(s),
        "depth": cfg.depth,
        "tip": t,
        "tips_by_depth": {str(d): v for d, v in tips_by_depth(s, depths).items()},
        "certificate_point": t + margin,
        "state": state.value,
        "certificate": _cert_json(cert),
    }
    _emit(cfg, _json(payload), out)
    return 0


def cmd_classify(cfg: RunConfig, out) -> int:
    s = cfg.address
    state, cert, step = classify_point(ModelPoint(cfg.potential, s), cfg.kmax)
    payload = {
        "address": str(s),
        "depth": cfg.depth,
        "tip": tip(s, cfg.depth),
        "potential": cfg.potential,
        "state": state.value,
        "left_domain_step": step,
        "certificate": _cert_json(cert),
    }
    _emit(cfg, _json(payload), out)
    return 0


def _families_payload(seed: Rect, fams, report):
    return {"seed": seed.to_json(), "families": [f.to_json() for f in fams], "validation": report.to_json()}


def cmd_boxes(cfg: RunConfig, out) -> int:
    sb = SubBrush.build(cfg.addresses, cfg.depth)
    fams = build_families(cfg.seed, sb, cfg.kmax, cfg.offset)
    report = validate_family(fams, sb, cfg.offset)
    _emit(cfg, _json(_families_payload(cfg.seed, fams, report)), out)
    if not report.ok:
        raise DomainError("box conditions failed: " + ", ".join(f"({n})" for n in report.failed()), report)
    return 0


def _deviation_rows(arc, offset: int):
    rows = []
    for k, dev in enumerate(arc.deviations, start=1):
        w = arc.families[k].boxes[0].b - arc.families[k].boxes[0].a if arc.families[k].boxes else 0.0
        tight = math.sqrt(2) * w
        loose = 5 / (offset + k) ** 2
        rows.append({"k": k, "measured": dev, "sqrt2_width": tight, "five_over_square": loose, "pass": dev <= tight and dev < loose})
    return rows


def cmd_curve(cfg: RunConfig, out) -> int:
    sb = SubBrush.build(cfg.addresses, cfg.depth)
    if cfg.families:
        with open(cfg.families) as fh:
            data = json.load(fh)
        fams = [BoxFamily.from_json(f) for f in data["families"]]
        report = validate_family(fams, sb, fams[0].offset if fams else cfg.offset)
        payload = {"families_file": cfg.families, "validation": report.to_json()}
        if not report.ok:
            (out or sys.stdout).write("\n".join(report.lines()) + "\n")
            raise DomainError("box conditions failed: " + ", ".join(f"({n})" for n in report.failed()), payload)
        _emit(cfg, _json(payload), out)
        return 0

    if cfg.center is not None:
        lc = localized_curve(cfg.center, cfg.eps, sb, cfg.kmax)
        seed, offset, arc, jc = lc.seed, lc.offset, lc.arc, lc.jordan
        fams = list(arc.families)
        levels = curve_levels(seed, fams)
        extra = {"center_distance_max": lc.max_distance(), "encloses_center": lc.encloses_center(), "eps": cfg.eps}
    else:
        seed, offset = cfg.seed, cfg.offset
        fams = build_families(seed, sb, cfg.kmax, offset)
        levels = curve_levels(seed, fams)
        g = levels[-1]
        arc = Polyline(g.vertices, g.level, cauchy_tail(cfg.kmax, offset), g.deviations, tuple(fams))
        jc = assemble_jordan(arc, seed)
        extra = {}
    report = validate_family(fams, sb, offset)
    contacts = escape_witnesses(jc, sb)
    rows = _deviation_rows(arc, offset)
    sidecar = {
        "seed": seed.to_json(),
        "kmax": cfg.kmax,
        "offset": offset,
        "cauchy": {"levels": rows, "tail_bound": arc.cauchy_bound},
        "jordan": {"simple": True, "winding": jc.winding, "vertices": len(jc.vertices)},
        "contacts": [c.to_json() for c in contacts],
        "validation": report.to_json(),
        **extra,
    }
    svg = curve_svg(sb, fams, [g.vertices for g in levels], jc.vertices, title=f"detour curves, kmax={cfg.kmax}, l={offset}")
    if cfg.out:
        write_atomic(cfg.out, svg)
        write_atomic(_sidecar(cfg.out), _json(sidecar))
    else:
        (out or sys.stdout).write(_json(sidecar))
    failed = (
        not report.ok
        or not all(r["pass"] for r in rows)
        or abs(jc.winding) != 1
        or not all(c.passed for c in contacts)
        or (extra and not (extra["encloses_center"] and extra["center_distance_max"] < cfg.eps))
    )
    if failed:
        raise DomainError("curve certificate failed", sidecar)
    return 0


def cmd_path(cfg: RunConfig, out) -> int:
    sb = SubBrush.build(cfg.addresses, cfg.depth)
    path = path_between(cfg.start, cfg.end, sb, cfg.kmax, cfg.cert_kmax)
    payload = path.to_json()
    if cfg.out:
        write_atomic(cfg.out, path_svg(sb, path.vertices, title="certified path"))
        write_atomic(_sidecar(cfg.out), _json(payload))
    else:
        (out or sys.stdout).write(_json(payload))
    return 0


def cmd_render(cfg: RunConfig, out) -> int:
    w, h = cfg.size
    img = render(ExpParameter(cfg.a), cfg.viewport, w, h, cfg.max_steps, cfg.escape_radius, cfg.eps_attract)
    data = img.png_bytes()
    path = cfg.out or "render.png"
    write_atomic(path, data)
    counts = {k.value: v for k, v in img.counts().items()}
    (out or sys.stdout).write(_json({"out": path, "width": w, "height": h, "counts": counts}))
    return 0


DISPATCH = {
    "verify": cmd_verify,
    "tip": cmd_tip,
    "classify": cmd_classify,
    "boxes": cmd_boxes,
    "curve": cmd_curve,
    "path": cmd_path,
    "render": cmd_render,
}


def run(cfg: RunConfig, out=None, err=None) -> int:
    err = err or sys.stderr
    try:
        return DISPATCH[cfg.command](cfg, out)
    except DomainError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except (SeedRejected, PathError, NotInJulia, CurveInvariantError, SelfIntersection, ValueError, OverflowError) as exc:
        err.write(f"error: {exc}\n")
        return 1


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        for problem in exc.problems:
            sys.stderr.write(f"usage error: {problem}\n")
        return 2
    except SystemExit as exc:  # argparse already printed its message
        return int(exc.code or 0) if exc.code in (0, None) else 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
