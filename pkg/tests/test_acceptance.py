"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line with timing."""

import json
import math
import os
import time

import numpy as np
import pytest

from conftest import record
from findist import audit, blocks, cli, gauge, modulus, spectra
from findist.cantor import (
    build_construction_i,
    build_construction_ii,
    evaluate_map_array,
    level_centers,
    level_inner_log_radius,
    level_outer_log_radius,
)
from findist.core import Annulus, Ball, LogPolar


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def _verdict(num, name, checks, detail, seconds, limit):
    ok = all(checks) and (limit is None or seconds < limit)
    record(num, name, ok, detail, seconds)
    assert all(checks), detail
    if limit is not None:
        assert seconds < limit, f"runtime {seconds:.2f} s over {limit} s"


def _rel_gap(a: LogPolar, b: LogPolar):
    return abs(a.log_r - b.log_r) / max(1.0, abs(b.log_r)), abs(a.arg - b.arg)


def test_criterion_01_block_correctness():
    rng = np.random.default_rng(1)
    worst_lr = worst_arg = 0.0
    identity_exact = True
    with Timer() as t:
        for _ in range(100):
            P = blocks.SpiralBlockParams(rng.uniform(0.1, 3), rng.uniform(0, 3), rng.uniform(0.5, 40))
            log_R = rng.uniform(-30, 0)
            th = rng.uniform(-10, 10)
            for circle, outside, inside in (
                (log_R, lambda u: u, lambda u: blocks.spiral_annulus_formula(P, log_R, u)),
                (log_R - 1, lambda u: blocks.spiral_annulus_formula(P, log_R, u),
                 lambda u: blocks.spiral_inner_formula(P, log_R, u)),
            ):
                u = LogPolar(circle, th)
                d = _rel_gap(outside(u), inside(u))
                worst_lr, worst_arg = max(worst_lr, d[0]), max(worst_arg, d[1])
            z = np.exp(log_R + rng.uniform(0, 3, 20) + 1j * rng.uniform(0, 6.3, 20))
            identity_exact &= bool(np.all(blocks.apply_spiral_block(P, Ball(0j, math.exp(log_R)), z) == z))

            Q = blocks.LogPowerBlockParams(rng.uniform(0.1, 5), rng.uniform(0.01, 1.99))
            log_Ro = -rng.uniform(0.05, 20)
            log_ri = log_Ro - rng.uniform(0.1, 50)
            for circle, outside, inside in (
                (log_Ro, lambda u: u, lambda u: blocks.logpower_annulus_formula(Q, log_Ro, u)),
                (log_ri, lambda u: blocks.logpower_annulus_formula(Q, log_Ro, u),
                 lambda u: blocks.logpower_inner_formula(Q, log_Ro, log_ri, u)),
            ):
                u = LogPolar(circle, th)
                d = _rel_gap(outside(u), inside(u))
                worst_lr, worst_arg = max(worst_lr, d[0]), max(worst_arg, d[1])
            A = Annulus(0.3j, math.exp(log_ri), math.exp(log_Ro))
            z = 0.3j + np.exp(log_Ro + rng.uniform(0, 3, 20) + 1j * rng.uniform(0, 6.3, 20))
            identity_exact &= bool(np.all(blocks.apply_logpower_block(Q, A, z) == z))
    detail = f"gluing gap log_r {worst_lr:.1e} rel, arg {worst_arg:.1e} abs, identity outside exact={identity_exact}"
    _verdict(1, "block correctness", [worst_lr <= 1e-12, worst_arg <= 1e-12, identity_exact], detail, t.seconds, 1.0)


def test_criterion_02_distortion_law():
    with Timer() as t:
        Q = blocks.LogPowerBlockParams(1, 0.5)
        A = Annulus(0j, math.exp(-4), math.exp(-1))
        T, TH = np.meshgrid(np.linspace(-4, -1, 34)[1:-1], np.linspace(0, 2 * math.pi, 32, endpoint=False))
        z = np.exp(T + 1j * TH).ravel()
        K = blocks.distortion_field(lambda w: blocks.apply_logpower_block(Q, A, w), z, blocks.default_step(z))
        err = float(np.max(np.abs(K / blocks.logpower_distortion_law(Q, np.abs(z)) - 1)))
    _verdict(2, "distortion law", [err < 1e-3], f"max relative error {err:.2e} on 32x32", t.seconds, 5.0)


def test_criterion_03_integrability_series():
    with Timer() as t:
        c = build_construction_i(1, 1, 0.5, M=64)
        rep = audit.exp_integrability_series_i(c, 20)
        target = c.M ** (-c.eps / c.s)
        err_i = max(abs(x / target - 1) for x in rep.ratios)
        c2 = build_construction_ii(1, 1, 0.5, r=0.25)
        rep2 = audit.exp_integrability_series_ii(c2, 50)
        m = np.arange(1, 51)
        ref = m * math.log(c2.M) - c2.eps * (1 / c2.r) ** ((2 - c2.s) * (m - 1) / c2.p)
        err_ii = float(np.max(np.abs(np.asarray(rep2.per_level_log_term) - ref) / np.maximum(1, np.abs(ref))))
    detail = f"I ratio error {err_i:.1e} (target {target:.4f}); II log-term error {err_ii:.1e} for m <= 50"
    _verdict(3, "integrability series", [err_i <= 0.01, err_ii <= 1e-9], detail, t.seconds, 1.0)


def test_criterion_04_numeric_vs_analytic_integral():
    with Timer() as t:
        c = build_construction_i(1, 1, 0.5, M=64)
        g = complex(level_centers(c, 1)[7])
        A = Annulus(g, c.r, math.e * c.r)
        num = audit.numeric_exp_integral(lambda w: evaluate_map_array(c, w, 1), A, c.p, 256)
        exact = math.exp(audit.level_log_area_i(c, 1) + c.p * c.realized_K(1)) / c.M
        err_i = abs(num / exact - 1)
        c2 = build_construction_ii(1, 1, 0.5, r=0.25)
        g = complex(c2.grid_centers[0])
        A = Annulus(g, math.exp(c2.log_rbar(1)), c2.R)
        num = audit.numeric_exp_integral(lambda w: evaluate_map_array(c2, w, 1), A, c2.p, 256)
        exact = math.exp(audit.exact_level_log_integral_ii(c2, 1)) / c2.M
        err_ii = abs(num / exact - 1)
    detail = f"relative error I {err_i:.1e}, II {err_ii:.1e} at 256x256"
    _verdict(4, "numeric vs analytic integral", [err_i <= 0.02, err_ii <= 0.02], detail, t.seconds, 30.0)


SPECTRA_SETS = [(0.5, 0.375), (1.0, 0.25), (1.5, 0.2)]


def _exponent_check(rotation: bool):
    worst_fit = worst_cross = 0.0
    for s, eps in SPECTRA_SETS:
        c = build_construction_i(1, s, eps, c2=1.0)
        samples = spectra.spectra_samples(c, range(10, 31))
        fit = (spectra.fit_rotation_exponent if rotation else spectra.fit_compression_exponent)(samples)
        worst_fit = max(worst_fit, abs(fit.alpha / spectra.closed_form_alpha(c, rotation) - 1))
        composed = spectra.spectra_samples(c, range(1, 5))
        closed = spectra.spectra_samples(c, range(1, 5), composed=False)
        for a, b in zip(composed, closed):
            x, y = (a.winding, b.winding) if rotation else (a.neg_log_image, b.neg_log_image)
            worst_cross = max(worst_cross, abs(x - y))
    return worst_fit, worst_cross


def test_criterion_05_compression_exponent():
    with Timer() as t:
        fit_err, cross = _exponent_check(rotation=False)
    detail = f"fit vs closed form {fit_err:.1e} rel over s in 0.5/1/1.5; composition gap {cross:.1e}"
    _verdict(5, "compression exponent", [fit_err <= 0.05, cross <= 1e-9], detail, t.seconds, 10.0)


def test_criterion_06_rotation_exponent():
    with Timer() as t:
        fit_err, cross = _exponent_check(rotation=True)
        c = build_construction_i(1, 1, 0.5, M=64, c2=1.0)
        g = complex(level_centers(c, 1)[10])
        path = spectra.crossing_path(g, level_outer_log_radius(c, 1) - 1e-9, level_inner_log_radius(c, 1) + 1e-9)
        wind_err = max(
            abs(abs(spectra.trace_winding(lambda z: evaluate_map_array(c, z, d), g, path)) - c.c2 * c.K_bar(1))
            for d in (1, 2, 3)
        )
    detail = f"fit {fit_err:.1e} rel; composition gap {cross:.1e}; traced winding error {wind_err:.1e} rad"
    _verdict(6, "rotation exponent", [fit_err <= 0.05, cross <= 1e-9, wind_err <= 0.5], detail, t.seconds, 30.0)


def test_criterion_07_segment_scans():
    with Timer() as t:
        c = build_construction_i(1, 1, 0.5, M=64)
        params = spectra.SegmentParams(1, 1, 0.5, C_bar=spectra.matched_c_bar(c))
        ray = spectra.construction_ray(c, spectra.default_address(c, 22))
        hits = spectra.find_compressed_segments(ray, params, range(1, int(20 * c.log_inv_r) + 1))
        per_level = {n: 0 for n in range(1, 21)}
        for h in hits:
            n = spectra.level_of_scale(c, h.m)
            if n in per_level:
                per_level[n] += 1
        m0 = math.floor(params.identity_scale()) + 1
        stray = 0
        for f in (lambda w: w, lambda w: 3 * np.exp(1j) * w + 2):
            stray += len(spectra.find_compressed_segments(spectra.map_ray(f, 0.1 + 0.2j), params, range(m0, 34)))
    missing = [n for n, k in per_level.items() if k == 0]
    detail = f"{len(hits)} hits, levels without a hit {missing}; conformal-map hits beyond m={m0}: {stray}"
    _verdict(7, "segment scans", [not missing, stray == 0], detail, t.seconds, 10.0)


def test_criterion_08_packing():
    with Timer() as t:
        c = build_construction_i(1, 1, 0.5, M=64)
        s0 = c.s - 0.1
        cands = [(z, {1}) for z in c.pattern.centers]
        res = spectra.select_disjoint_balls(cands, c.r, math.e**2, s0)
        disjoint = spectra.verify_disjoint(c.pattern.centers[res.selected], res.radius)
    detail = f"count {res.count} vs target {res.target} at k={res.k}; disjoint={disjoint}"
    _verdict(8, "packing", [res.met, disjoint], detail, t.seconds, 1.0)


def test_criterion_09_discrete_modulus():
    times = []
    vals = {}
    for n in (128, 256, 512):
        with Timer() as t:
            vals[n] = modulus.discrete_modulus(modulus.ring_problem(n)).value
        times.append(t.seconds)
    with Timer() as t:
        sq = modulus.discrete_modulus(modulus.square_problem(256)).value
    times.append(t.seconds)
    ring_err = abs(vals[256] / (2 * math.pi) - 1)
    monotone = vals[128] <= vals[256] <= vals[512]
    detail = (f"ring 256: {vals[256]:.4f} ({ring_err:.1%} from 2pi); square {sq:.4f}; "
              f"refinement {vals[128]:.3f} -> {vals[256]:.3f} -> {vals[512]:.3f}; slowest {max(times):.1f} s")
    _verdict(9, "discrete modulus", [ring_err <= 0.05, abs(sq - 1) <= 0.03, monotone, max(times) < 60],
             detail, sum(times), None)


def test_criterion_10_modulus_inequality():
    ratios = []
    with Timer() as t:
        pb = modulus.ring_problem(256)
        for c2 in (0.0, 1.0):
            P = blocks.SpiralBlockParams(1.0, c2, 3.0)
            chk = modulus.check_modulus_inequality(lambda w: blocks.apply_spiral_block(P, Ball(0j, 0.9), w), pb)
            ratios.append(chk.ratio)
    detail = "ratios " + ", ".join(f"c2={c2:g}: {r:.3f}" for c2, r in zip((0, 1), ratios))
    _verdict(10, "modulus inequality", [r <= 1.05 for r in ratios], detail, t.seconds, 120.0)


def test_criterion_11_gauge_sums():
    worst = 0.0
    signs_ok = True
    with Timer() as t:
        for s, p, eb in ((1.0, 1.0, 0.5), (1.5, 2.0, 0.2)):
            c = build_construction_ii(p, s, eb)
            for beta, sign in ((p * s / (2 - s - eb), -1), (p * s / (2 - s + eb), 1)):
                vals = np.array([gauge.construction_gauge_sum(c, n, gauge.PowerLog(beta)).gauge_sum_log
                                 for n in range(1, c.max_depth + 1)])
                slope = gauge.gauge_sum_slope_ii(s, p, c.r, beta)
                signs_ok &= bool(np.sign(slope) == sign)
                worst = max(worst, float(np.max(np.abs(np.diff(vals) - slope))))
        zero = True
        for s, eps in SPECTRA_SETS:
            c = build_construction_i(1, s, eps)
            zero &= all(gauge.construction_gauge_sum(c, n, gauge.Power(s)).gauge_sum_log == 0.0
                        for n in range(1, c.max_depth + 1))
    detail = f"slope error {worst:.1e}; signs as expected={signs_ok}; Power-gauge sums exactly 0={zero}"
    _verdict(11, "gauge sums", [worst <= 1e-9, signs_ok, zero], detail, t.seconds, 1.0)


def test_criterion_12_cover_transfer():
    rng = np.random.default_rng(12)
    worst = 0.0
    with Timer() as t:
        for _ in range(100):
            s_bar = rng.uniform(0.05, 1.95)
            radii = 10 ** rng.uniform(-20, -3, rng.integers(1, 200))
            res = gauge.transfer_cover(radii, s_bar, rng.uniform(0.2, 4), rng.uniform(0.1, 3), rng.uniform(0.05, 1))
            worst = max(worst, res.ratio / 2**s_bar)
    _verdict(12, "cover transfer", [worst <= 1 + 1e-12], f"max ratio / 2^s_bar = {worst:.12f}", t.seconds, 1.0)


DETERMINISM_CASES = {
    "build": {"construction": "I", "p": 1, "s": 1, "eps": 0.5, "M": 64, "levels": 2},
    "eval": {"construction": "I", "p": 1, "s": 1, "eps": 0.5, "M": 64, "c2": 1.0, "depth": 4, "seed": 3},
    "audit": {"construction": "II", "p": 1, "s": 1, "eps": 0.5, "r": 0.25, "N": 40},
    "spectra": {"construction": "I", "p": 1, "s": 1, "eps": 0.5, "M": 64, "c2": 1.0, "segment_levels": 6},
    "modulus": {"preset": "segment_circle", "resolution": 128},
    "measure": {"construction": "I", "p": 1, "s": 1.5, "eps": 0.2, "gauges": ["power:1.5", "powerlog:1"]},
}


def test_criterion_13_determinism(tmp_path):
    same = {}
    with Timer() as t:
        for cmd, cfg in DETERMINISM_CASES.items():
            path = tmp_path / f"{cmd}.json"
            path.write_text(json.dumps(cfg))
            outs = []
            for k in range(2):
                d = tmp_path / f"{cmd}_{k}"
                code = cli.main([cmd, "--config", str(path), "--out", str(d), "--no-timestamp"])
                outs.append((code, {f: (d / f).read_bytes() for f in sorted(os.listdir(d))} if code == 0 else None))
            same[cmd] = outs[0][0] == 0 and outs[0] == outs[1]
    detail = ", ".join(f"{k}={'identical' if v else 'DIFFERENT'}" for k, v in same.items())
    _verdict(13, "determinism", list(same.values()), detail, t.seconds, None)
