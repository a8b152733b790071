"""Command-line entry point: ``findist <command> --config cfg.json --out dir``."""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import io
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import __version__, audit, blocks, cantor, gauge, modulus, spectra

COMMANDS = ("build", "eval", "audit", "spectra", "modulus", "measure")
EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x)) if math.isfinite(x) else ""
    return str(x)


def csv_text(header: str, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def json_text(meta: dict, payload: dict) -> str:
    meta = {k: meta[k] for k in ("version", "config_sha256")}
    return json.dumps({"meta": meta, **payload}, indent=2, sort_keys=True, allow_nan=False) + "\n"


def svg_stamp(svg: str, meta: dict, timestamp: bool) -> str:
    note = f"findist {meta['version']} config_sha256={meta['config_sha256']}"
    if timestamp:
        note += " generated " + datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    head, _, rest = svg.partition(">")
    return f"{head}>\n<!-- {note} -->{rest}\n"


# --- validation -----------------------------------------------------------------------------


def _num(cfg: dict, key: str, default=None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing {key}")
        return default
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number")
    return float(v)


def validate(cfg: dict) -> None:
    cmd = cfg["command"]
    if cmd != "modulus":
        s = _num(cfg, "s")
        if not 0 < s < 2:
            raise ConfigError("s out of (0,2)")
        if not _num(cfg, "p") > 0:
            raise ConfigError("p must be positive")
        eps = _num(cfg, "eps")
        if not 0 < eps < 2 - s:
            raise ConfigError("eps out of (0,2-s)")
        kind = str(cfg.get("construction", "I")).upper()
        if kind not in ("I", "II"):
            raise ConfigError("construction must be I or II")
        if kind == "I" and not _num(cfg, "c1", 1.0) > 0:
            raise ConfigError("c1 must be positive")
        if kind == "I" and not _num(cfg, "c2", 0.0) >= 0:
            raise ConfigError("c2 must be nonnegative")
        if cmd in ("spectra",) and kind != "I":
            raise ConfigError("spectra needs construction I")
    if cmd == "modulus":
        res = int(_num(cfg, "resolution", 256))
        if not 8 <= res <= 4096:
            raise ConfigError("resolution out of [8,4096]")
        if cfg.get("connectivity", 4) not in (4, 8):
            raise ConfigError("connectivity must be 4 or 8")
    if cmd == "measure":
        for gname in cfg.get("gauges", []):
            gauge.parse_gauge(gname)
    for key in ("levels", "N", "depth"):
        if key in cfg and not (isinstance(cfg[key], int) and cfg[key] >= 1):
            raise ConfigError(f"{key} must be a positive integer")


# --- commands --------------------------------------------------------------------------------


def _levels(cfg: dict, default) -> list:
    lv = cfg.get("level_range", default)
    if not (isinstance(lv, list) and len(lv) == 2 and all(isinstance(x, int) for x in lv) and 1 <= lv[0] <= lv[1]):
        raise ConfigError("level_range must be [first, last] with 1 <= first <= last")
    return list(range(lv[0], lv[1] + 1))


def cmd_build(c, cfg, meta):
    levels = int(cfg.get("levels", 2))
    if levels > 3:
        raise ConfigError("geometry export supports levels <= 3")
    if c.M**levels > 2_000_000:
        raise ConfigError("too many balls for geometry export; lower levels")
    rows = []
    for n in range(1, levels + 1):
        cen = cantor.level_centers(c, n)
        lr = cantor.level_inner_log_radius(c, n)
        for i, z in enumerate(cen):
            rows.append((n, i, z.real, z.imag, lr))
    files = {
        "geometry.csv": csv_text(meta["header"], ["level", "index", "center_re", "center_im", "log_radius"], rows),
        "geometry.svg": geometry_svg(c, min(levels, 3)),
    }
    info = {"construction": c.kind, "M": c.M, "r": c.r, "p": c.p, "s": c.s, "eps": c.eps,
            "lattice": "shifted" if c.pattern.shifted else "centered"}
    if c.kind == "I":
        info.update(c1=c.c1, c2=c.c2, C_block=c.C_block, K_bar=[c.K_bar(n) for n in range(1, 6)])
    else:
        info.update(R=c.R, C=c.C, log_rbar=[c.log_rbar(n) for n in range(1, 6)])
    files["construction.json"] = json_text(meta, {"construction": info})
    return files


def geometry_svg(c, levels: int, size: int = 600, max_circles: int = 20000) -> str:
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="-1.02 -1.02 2.04 2.04">',
             '<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="0.004"/>']
    drawn = 0
    for n in range(1, levels + 1):
        cen = cantor.level_centers(c, n)
        ro = math.exp(cantor.level_outer_log_radius(c, n))
        ri = math.exp(cantor.level_inner_log_radius(c, n))
        for z in cen:
            if drawn >= max_circles:
                break
            for rad, col in ((ro, "#888"), (ri, "#c00")):
                if rad * size > 0.2:
                    parts.append(f'<circle cx="{z.real:.6f}" cy="{-z.imag:.6f}" r="{rad:.6g}" fill="none" '
                                 f'stroke="{col}" stroke-width="{0.002 / n:.4g}"/>')
            drawn += 1
    parts.append("</svg>")
    return "\n".join(parts)


def cmd_eval(c, cfg, meta):
    depth = int(cfg.get("depth", 3))
    if depth > c.max_depth:
        raise ConfigError(f"depth exceeds {c.max_depth}")
    if "points" in cfg:
        pts = [complex(*p) for p in cfg["points"]]
    else:
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        n = int(cfg.get("n_points", 100))
        pts = list(rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n))
    rows = []
    for z in pts:
        v = cantor.evaluate_map(c, z, depth)
        rows.append((z.real, z.imag, depth, v.log_r, v.arg))
    return {"eval.csv": csv_text(meta["header"], ["re", "im", "depth", "log_r", "arg"], rows)}


def cmd_audit(c, cfg, meta):
    N = int(cfg.get("N", 20))
    if c.kind == "I":
        rep = audit.exp_integrability_series_i(c, N)
    else:
        rep = audit.exp_integrability_series_ii(c, min(N, cantor.MAX_DEPTH_II))
    rows = audit.report_rows(rep)
    return {"audit.csv": csv_text(meta["header"], ["level", "log_term", "cumulative_log_sum", "ratio"], rows)}


def cmd_spectra(c, cfg, meta):
    levels = _levels(cfg, [10, 30])
    samples = spectra.spectra_samples(c, levels)
    comp = spectra.fit_compression_exponent(samples)
    rot = spectra.fit_rotation_exponent(samples) if c.c2 > 0 else None
    rows = [(x.n, x.log_inv_lambda, x.neg_log_image, x.winding) for x in samples]
    files = {"spectra.csv": csv_text(meta["header"], ["n", "log_inv_lambda", "neg_log_image", "winding"], rows)}
    fits = {"compression": {"alpha": comp.alpha, "residual": comp.residual, "n_points": comp.n_points,
                            "closed_form": spectra.closed_form_alpha(c)}}
    if rot is not None:
        fits["rotation"] = {"alpha": rot.alpha, "residual": rot.residual, "n_points": rot.n_points,
                            "closed_form": spectra.closed_form_alpha(c, rotation=True)}
    seg_n = int(cfg.get("segment_levels", 0))
    if seg_n:
        addr = spectra.default_address(c, seg_n + 1)
        ray = spectra.construction_ray(c, addr, 0.0, seg_n + 1)
        eps_prime = float(cfg.get("eps_prime", 0.5))
        P = spectra.SegmentParams(c.p, c.s, eps_prime,
                                  float(cfg.get("C_bar", spectra.matched_c_bar(c, eps=eps_prime))))
        scan = spectra.scan_compressed_segments(ray, P, range(1, int(seg_n * c.log_inv_r) + 2))
        files["segments.csv"] = csv_text(meta["header"], ["m", "ratio_log", "threshold_log", "hit"],
                                         [(r.m, r.ratio_log, r.threshold_log, r.hit) for r in scan])
    files["fits.json"] = json_text(meta, {"fits": fits})
    files["fit.svg"] = fit_svg(samples, comp)
    return files


def fit_svg(samples, fit, size: int = 480) -> str:
    L = np.array([x.log_inv_lambda for x in samples])
    y = np.array([x.neg_log_image for x in samples])
    xs = np.linspace(0, L.max() * 1.02, 200)
    ys = fit.alpha * xs**2 + fit.linear * xs + fit.offset
    ymax = max(y.max(), ys.max()) * 1.05 or 1.0

    def px(a, b):
        return 40 + a / xs.max() * (size - 60), size - 30 - b / ymax * (size - 50)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">']
    pts = " ".join("{:.2f},{:.2f}".format(*px(a, b)) for a, b in zip(xs, ys))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#c00"/>')
    for a, b in zip(L, y):
        X, Y = px(a, b)
        parts.append(f'<circle cx="{X:.2f}" cy="{Y:.2f}" r="3" fill="black"/>')
    parts.append(f'<text x="45" y="20" font-size="12">alpha = {fit.alpha:.6g}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def cmd_modulus(cfg, meta):
    pb = modulus.problem_from_config(cfg)
    res = modulus.discrete_modulus(pb, method=cfg.get("method", "potential"))
    payload = {"result": json.loads(modulus.result_json(res)),
               "problem": {"preset": cfg.get("preset"), "resolution": pb.resolution,
                           "connectivity": pb.connectivity, "domain": list(pb.domain)}}
    if cfg.get("preset") == "segment_circle":
        fam = modulus.build_segment_circle_family(complex(*cfg.get("z", [0.0, 0.0])), complex(*cfg.get("Lambda", [0.1, 0.0])))
        payload["vaisala_lower_bound"] = modulus.vaisala_lower_bound(fam.E, fam.F, float(cfg.get("C_tilde", 1.0)))
    return {"modulus.json": json_text(meta, payload), "rho.svg": modulus.rho_svg(res.rho)}


def cmd_measure(c, cfg, meta):
    levels = _levels(cfg, [1, 10])
    gauges = [gauge.parse_gauge(g) for g in cfg.get("gauges", [f"power:{c.s}"])]
    rows = []
    for g in gauges:
        for n in levels:
            rep = gauge.construction_gauge_sum(c, n, g)
            rows.append((gauge.gauge_name(g), n, rep.count_log, rep.radius_log_inv, rep.gauge_sum_log))
    files = {"gauge.csv": csv_text(meta["header"], ["gauge", "level", "count_log", "radius_log_inv", "gauge_sum_log"], rows)}
    if len(levels) >= 3:
        fit = gauge.box_dimension_estimate(c, levels)
        files["dimension.json"] = json_text(meta, {"box_dimension": {"slope": fit.alpha, "residual": fit.residual,
                                                                     "n_points": fit.n_points}})
    return files


# --- driver --------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="findist", description=__doc__)
    ap.add_argument("--version", action="version", version=f"findist {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--threads", type=int, default=1, help="worker threads (computations here are sequential)")
        sp.add_argument("--no-timestamp", action="store_true", help="omit the timestamp comment in SVG output")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=JSON", help="override a config entry")
    return ap


def load_config(args) -> dict:
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config: {e}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    for item in args.set:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"bad --set {item!r}")
        try:
            cfg[key] = json.loads(val)
        except json.JSONDecodeError:
            cfg[key] = val
    cfg["command"] = args.command
    if args.threads < 1:
        raise ConfigError("threads must be >= 1")
    return cfg


def run(cfg: dict, out: str, timestamp: bool = True) -> dict:
    """Validate, compute, then write every file; nothing is written on failure."""
    validate(cfg)
    digest = config_hash(cfg)
    meta = {"version": __version__, "config_sha256": digest,
            "header": f"# findist {__version__} config_sha256={digest}"}
    cmd = cfg["command"]
    if cmd == "modulus":
        files = cmd_modulus(cfg, meta)
    else:
        try:
            c = cantor.construction_from_config(cfg)
        except (cantor.ConstructionInfeasible, cantor.ScheduleError) as e:
            raise ConfigError(str(e)) from None
        files = {"build": cmd_build, "eval": cmd_eval, "audit": cmd_audit, "spectra": cmd_spectra,
                 "measure": cmd_measure}[cmd](c, cfg, meta)
    jmeta = {k: meta[k] for k in ("version", "config_sha256")}
    os.makedirs(out, exist_ok=True)
    for name, text in sorted(files.items()):
        if name.endswith(".svg"):
            text = svg_stamp(text, jmeta, timestamp)
        with open(os.path.join(out, name), "w", newline="\n") as fh:
            fh.write(text)
    return files


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        run(cfg, args.out, timestamp=not args.no_timestamp)
    except (ConfigError, ValueError, KeyError, TypeError) as e:
        msg = str(e).splitlines()[0] if str(e) else type(e).__name__
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ArithmeticError, modulus.ModulusNotConverged, FloatingPointError, np.linalg.LinAlgError) as e:
        print(f"numeric failure: {str(e).splitlines()[0] if str(e) else type(e).__name__}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK
