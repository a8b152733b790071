"""Compression and rotation exponents at Cantor points, segment scans and ball packing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .cantor import (
    CantorAddress,
    ConstructionI,
    central_address,
    evaluate_map,
    sum_K_bar,
)
from .core import ExponentFit, LogPolar, fit_quadratic, unwind_to


@dataclass(frozen=True)
class SpectraSample:
    n: int
    log_inv_lambda: float
    neg_log_image: float
    winding: float


def spectra_samples(
    c: ConstructionI,
    levels: Iterable[int],
    address: Optional[CantorAddress] = None,
    theta: float = 0.0,
    composed: bool = True,
) -> list[SpectraSample]:
    """Samples at lambda_n = r^n e^(i theta) around the addressed Cantor point.

    With ``composed`` the image is computed by block composition (address
    form, depth = n), otherwise from the closed forms.  Winding is the
    unwound change of argument arg(f(z+lambda) - f(z)) - arg(lambda).
    """
    out = []
    levels = list(levels)
    for n in levels:
        L = n * c.log_inv_r
        if composed:
            addr = address if address is not None else default_address(c, n)
            if len(addr) < n:
                raise ValueError("address shorter than the level")
            v = evaluate_map(c, (addr.prefix(n), LogPolar(-L, theta)), n)
            out.append(SpectraSample(n, L, -v.log_r, v.arg - theta))
        else:
            from .cantor import image_log_radius, image_winding

            out.append(SpectraSample(n, L, -image_log_radius(c, n), -image_winding(c, n)))
    return out


def default_address(c, n: int) -> CantorAddress:
    """The central chain when the pattern has a ball at 0, else digit 0 repeated."""
    if c.pattern.central is not None:
        return central_address(c, n)
    return CantorAddress((0,) * n)


def closed_form_alpha(c: ConstructionI, rotation: bool = False) -> float:
    """Limit c_i (2-s-eps) s / (2 p C_block log M) of the fitted quadratic coefficient."""
    ci = c.c2 if rotation else c.c1
    return ci * (2 - c.s - c.eps) * c.s / (2 * c.p * c.C_block * math.log(c.M))


def fit_compression_exponent(samples: Sequence[SpectraSample]) -> ExponentFit:
    return fit_quadratic([x.log_inv_lambda for x in samples], [x.neg_log_image for x in samples])


def fit_rotation_exponent(samples: Sequence[SpectraSample]) -> ExponentFit:
    """Quadratic fit of the rotation magnitude |winding|; the blocks turn clockwise."""
    return fit_quadratic([x.log_inv_lambda for x in samples], [abs(x.winding) for x in samples])


# --- rays ---------------------------------------------------------------------

RayEvaluator = Callable[[np.ndarray], tuple]


def construction_ray(c, address: CantorAddress, theta: float = 0.0, depth: Optional[int] = None) -> RayEvaluator:
    """log t -> (log|f(z + t e^(i theta)) - f(z)|, unwound arg) through the addressed point."""
    if depth is None:
        depth = len(address)

    def ev(log_t):
        log_t = np.atleast_1d(np.asarray(log_t, dtype=float))
        lr = np.empty_like(log_t)
        ar = np.empty_like(log_t)
        for i, lt in enumerate(log_t):
            v = evaluate_map(c, (address, LogPolar(float(lt), theta)), depth)
            lr[i], ar[i] = v.log_r, v.arg
        return lr, ar

    return ev


def map_ray(f: Callable, z: complex, theta: float = 0.0) -> RayEvaluator:
    """Ray evaluator for a vectorized complex map.

    Differences are taken in Cartesian form, so scales where ``f(z + t)``
    and ``f(z)`` agree to machine precision raise FloatingPointError.
    """
    fz = complex(np.asarray(f(np.array([z])))[0])
    d = complex(math.cos(theta), math.sin(theta))

    def ev(log_t):
        t = np.exp(np.atleast_1d(np.asarray(log_t, dtype=float)))
        w = np.asarray(f(z + t * d)) - fz
        if np.any(w == 0):
            raise FloatingPointError("scale below the floating-point resolution of the map at z")
        return np.log(np.abs(w)), np.angle(w)

    return ev


def _unwound(ray: RayEvaluator, lo: float, hi: float, n: int, max_refine: int = 40):
    """Samples of (log|df|, arg) on [lo, hi] with args unwound by continuity.

    Consecutive samples whose principal difference exceeds pi/2 get
    bisected until they do not (or the refinement budget runs out).
    """
    t = np.linspace(lo, hi, n + 1)
    lr, ar = ray(t)
    pts = list(zip(t.tolist(), lr.tolist(), ar.tolist()))
    out = [pts[0]]
    a_prev = pts[0][2]
    stack = list(reversed(pts[1:]))
    budget = max_refine * (n + 1)
    while stack:
        tt, l, a = stack.pop()
        a = unwind_to(a, a_prev)
        if abs(a - a_prev) > math.pi / 2 and budget > 0 and tt - out[-1][0] > 1e-12:
            budget -= 1
            tm = 0.5 * (out[-1][0] + tt)
            lm, am = ray(np.array([tm]))
            stack.append((tt, l, a))
            stack.append((tm, float(lm[0]), float(am[0])))
            continue
        out.append((tt, l, a))
        a_prev = a
    arr = np.array(out)
    return arr[:, 0], arr[:, 1], arr[:, 2]


@dataclass(frozen=True)
class SegmentParams:
    p: float
    s: float
    eps: float = 0.5
    C_bar: float = 1.0
    C_tilde: float = 1.0

    def compression_threshold(self, m: int) -> float:
        return -(2 - self.eps) * (2 - self.s) * self.C_bar * m / (2 * self.p)

    def rotation_threshold(self, m: int) -> float:
        return (2 - self.eps) * (2 - self.s) * self.C_bar * math.sqrt(self.C_tilde * math.pi) * m / (math.sqrt(2) * self.p)

    def identity_scale(self) -> float:
        """Beyond this m the identity's segment ratio (-1 in log) cannot register."""
        return 2 * self.p / ((2 - self.eps) * (2 - self.s) * self.C_bar)


@dataclass(frozen=True)
class SegmentHit:
    m: int
    ratio_log: float
    threshold_log: float


@dataclass(frozen=True)
class SegmentScan:
    m: int
    ratio_log: float
    threshold_log: float
    hit: bool


def scan_compressed_segments(ray: RayEvaluator, params: SegmentParams, m_range: Iterable[int], density: int = 64):
    rows = []
    for m in m_range:
        _, lr, _ = _unwound(ray, -m, -m + 1, density)
        ratio = float(np.min(lr) - np.max(lr))
        thr = params.compression_threshold(m)
        rows.append(SegmentScan(m, ratio, thr, ratio <= thr))
    return rows


def find_compressed_segments(ray: RayEvaluator, params: SegmentParams, m_range: Iterable[int], density: int = 64) -> list[SegmentHit]:
    """Scales m where log|f(x)-f(z)| varies by at least the threshold along [e^-m, e^(1-m)]."""
    return [SegmentHit(r.m, r.ratio_log, r.threshold_log) for r in scan_compressed_segments(ray, params, m_range, density) if r.hit]


def scan_rotation_segments(ray: RayEvaluator, params: SegmentParams, m_range: Iterable[int], density: int = 64):
    rows = []
    for m in m_range:
        _, _, ar = _unwound(ray, -m, -m + 1, density)
        osc = float(np.max(ar) - np.min(ar))
        thr = params.rotation_threshold(m)
        rows.append(SegmentScan(m, osc, thr, osc >= thr))
    return rows


def find_rotation_segments(ray: RayEvaluator, params: SegmentParams, m_range: Iterable[int], density: int = 64) -> list[SegmentHit]:
    """Scales m where the unwound argument oscillates by at least the threshold."""
    return [SegmentHit(r.m, r.ratio_log, r.threshold_log) for r in scan_rotation_segments(ray, params, m_range, density) if r.hit]


def matched_c_bar(c: ConstructionI, share: float = 0.4, rotation: bool = False, C_tilde: float = 1.0,
                  eps: float = 0.5) -> float:
    """C_bar that puts the threshold at ``share`` of the per-level change of Construction I.

    Crossing annulus n changes log|df| by c1 K_bar_n (arg by c2 K_bar_n) over
    one unit of log t at scale m ~ n log(1/r).  ``eps`` is the segment
    finder's own epsilon.  An annulus straddles at most two integer scales,
    so any share below 1/2 gives one hit per level.
    """
    per_m = (2 - c.s - c.eps) / (c.p * c.C_block)  # K_bar_n / (n log(1/r))
    base = (2 - eps) * (2 - c.s) / c.p
    if rotation:
        return share * c.c2 * per_m * math.sqrt(2) / (base * math.sqrt(C_tilde * math.pi))
    return share * c.c1 * per_m * 2 / base


def level_of_scale(c: ConstructionI, m: int) -> Optional[int]:
    """Construction level whose annulus overlaps the segment log t in [-m, 1-m]."""
    lo, hi = -m, -m + 1
    n_lo = math.ceil((m - 1) / c.log_inv_r - 1e-12)
    for n in range(max(1, n_lo), int(m / c.log_inv_r) + 2):
        a0, a1 = -n * c.log_inv_r, -n * c.log_inv_r + 1
        if a0 < hi and a1 > lo:
            return n
    return None


# --- winding along a crossing path ------------------------------------------------


def trace_winding(f: Callable, z0: complex, path: np.ndarray, refine: int = 30) -> float:
    """Unwound change of arg(f(w) - f(z0)) along the polyline ``path``.

    Steps whose principal jump exceeds pi/2 are subdivided.
    """
    path = np.asarray(path, dtype=complex)
    f0 = complex(np.asarray(f(np.array([z0])))[0])

    def arg_at(w):
        return np.angle(np.asarray(f(np.atleast_1d(w))) - f0)

    args = arg_at(path)
    total = 0.0
    for i in range(len(path) - 1):
        total += _seg_turn(arg_at, path[i], path[i + 1], args[i], args[i + 1], refine)
    return total


def _seg_turn(arg_at, a, b, fa, fb, depth):
    d = (fb - fa + math.pi) % (2 * math.pi) - math.pi
    if abs(d) <= math.pi / 2 or depth == 0:
        return d
    m = 0.5 * (a + b)
    fm = float(arg_at(np.array([m]))[0])
    return _seg_turn(arg_at, a, m, fa, fm, depth - 1) + _seg_turn(arg_at, m, b, fm, fb, depth - 1)


def crossing_path(center: complex, log_outer: float, log_inner: float, theta: float = 0.3, n: int = 400) -> np.ndarray:
    """Radial path from radius e^log_outer down to e^log_inner."""
    t = np.linspace(log_outer, log_inner, n)
    return center + np.exp(t + 1j * theta)


# --- packing -------------------------------------------------------------------


@dataclass(frozen=True)
class PackingLevel:
    k: int
    count: int
    target: int


@dataclass
class PackingResult:
    k: int
    selected: list
    radius: float
    target: int
    met: bool
    levels: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.selected)


def _greedy(points: np.ndarray, idx: Sequence[int], radius: float) -> list:
    """Greedy pairwise-disjoint closed balls: centers must be > 2 radius apart."""
    cell = 2 * radius
    grid: dict = {}
    chosen = []
    for i in idx:
        z = points[i]
        gx, gy = int(math.floor(z.real / cell)), int(math.floor(z.imag / cell))
        ok = True
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in grid.get((gx + dx, gy + dy), ()):
                    if abs(points[j] - z) <= cell:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            chosen.append(i)
            grid.setdefault((gx, gy), []).append(i)
    return chosen


def packing_target(alpha: float, delta: float, k: int, s0: float) -> int:
    return int(math.floor((1.0 / (alpha * delta**k)) ** s0 * (1 + 1e-12)))


def select_disjoint_balls(candidates: Sequence[tuple], delta: float, alpha: float, s0: float) -> PackingResult:
    """Greedy sweep over k (largest radius first) for pairwise-disjoint B(z_j, alpha delta^k).

    ``candidates`` holds (center, admissible k values).  Returns the first k
    whose greedy count reaches floor((alpha delta^k)^-s0), else the k with
    the largest count.
    """
    if not candidates:
        raise ValueError("no candidates")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    pts = np.array([complex(z) for z, _ in candidates])
    ks = sorted({int(k) for _, kk in candidates for k in kk})
    levels = []
    best = None
    for k in ks:
        idx = [i for i, (_, kk) in enumerate(candidates) if k in kk]
        rad = alpha * delta**k
        sel = _greedy(pts, idx, rad)
        tgt = packing_target(alpha, delta, k, s0)
        levels.append(PackingLevel(k, len(sel), tgt))
        res = PackingResult(k, sel, rad, tgt, len(sel) >= tgt, levels)
        if res.met:
            return res
        if best is None or res.count > best.count:
            best = res
    best.levels = levels
    return best


def verify_disjoint(centers, radius: float) -> bool:
    """Exhaustive check that closed balls B(c, radius) are pairwise disjoint."""
    pts = np.asarray(centers, dtype=complex)
    if pts.size < 2:
        return True
    xy = np.column_stack([pts.real, pts.imag])
    if pts.size <= 4000:
        return bool(np.min(pdist(xy)) > 2 * radius)
    return len(cKDTree(xy).query_pairs(2 * radius)) == 0
