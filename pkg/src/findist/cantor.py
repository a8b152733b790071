"""Cantor-type constructions built from nested radial blocks.

Both constructions place ``M`` balls on a square lattice inside the unit
disk and repeat the same pattern, rescaled, inside the inner ball of every
block.  Frame ``k`` is the level-``k`` inner ball rescaled to the unit disk
(frame 0 is the unit disk itself).  Inside frame ``k`` the level-``k+1``
blocks sit at the pattern centers ``g_i`` with normalized outer radius
``exp(outer_log(k+1))`` and inner radius ``exp(inner_log(k+1))``.

Because every block is radial, the limit map restricted to a ball chain is
the composition ``psi_1 o psi_2 o ... o psi_n`` of center-relative maps, and
ball centers are fixed by all deeper levels.  The evaluator below exploits
this to stay in log space along a chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import blocks
from .core import (
    ZERO,
    LogPolar,
    as_point,
    to_log_polar,
)

E = math.e
# below this log-modulus a frame coordinate is treated as "at the center"
_TINY_LOG = -600.0
# Construction I lattice pitch in units of r: e-dilated balls keep a 2er gap
PITCH_I = 4.0 * E
# Construction II: pitch 2.1 R and a 0.05 R margin to the unit circle
PITCH_II = 2.1
MARGIN_II = 0.05
MAX_DEPTH_I = 60
MAX_DEPTH_II = 50


class ConstructionInfeasible(ValueError):
    """No admissible parameter choice below the configured cap."""


class ScheduleError(ValueError):
    """The Construction II radii schedule degenerates (inner radius >= outer)."""


class Pattern:
    """``M`` lattice points closest to the origin, with O(1) point location."""

    def __init__(self, M: int, pitch: float, shifted: bool):
        self.M = M
        self.pitch = pitch
        self.shifted = shifted
        self.offset = 0.5 if shifted else 0.0
        H = int(math.isqrt(M)) + 3
        while True:
            idx = np.arange(-H, H + 1)
            I, J = np.meshgrid(idx, idx, indexing="ij")
            X = (I + self.offset).ravel()
            Y = (J + self.offset).ravel()
            d = np.hypot(X, Y)
            if np.sum(d <= H - 1) >= M:
                break
            H *= 2
        # nearest first; ties broken by angle then index for determinism
        order = np.lexsort((np.arctan2(Y, X), np.round(d, 12)))[:M]
        self.ij = np.column_stack([I.ravel()[order], J.ravel()[order]])
        self.centers = (X[order] + 1j * Y[order]) * pitch
        self.rho = float(d[order[-1]])  # farthest center, in pitch units
        self._H = int(np.max(np.abs(self.ij))) + 1
        n = 2 * self._H + 1
        self._table = np.full((n, n), -1, dtype=np.int64)
        self._table[self.ij[:, 0] + self._H, self.ij[:, 1] + self._H] = np.arange(M)
        zero = np.flatnonzero(self.centers == 0)
        self.central: Optional[int] = int(zero[0]) if zero.size else None

    @property
    def max_center_dist(self) -> float:
        return self.rho * self.pitch

    def locate(self, w) -> np.ndarray:
        """Index of the pattern point nearest to each ``w`` (-1 if not a pattern point)."""
        w = np.asarray(w, dtype=complex)
        i = np.rint(w.real / self.pitch - self.offset).astype(np.int64)
        j = np.rint(w.imag / self.pitch - self.offset).astype(np.int64)
        ok = (np.abs(i) <= self._H) & (np.abs(j) <= self._H)
        out = np.full(w.shape, -1, dtype=np.int64)
        out[ok] = self._table[i[ok] + self._H, j[ok] + self._H]
        return out


def _lattice_count(lim: float, shifted: bool) -> int:
    """Number of lattice points (unit pitch) within distance ``lim`` of the origin."""
    if lim < 0:
        return 0
    H = int(lim) + 2
    off = 0.5 if shifted else 0.0
    i = np.arange(-H, H + 1) + off
    h2 = lim * lim - i * i
    h = np.sqrt(h2[h2 >= 0])
    cols = 2 * np.floor(h + off) + (0 if shifted else 1)
    return int(cols.sum())


def best_pattern(M: int, pitch: float, max_dist: float) -> Optional[Pattern]:
    """Pattern of ``M`` centers all within ``max_dist``; centered lattice preferred."""
    lim = max_dist / pitch
    for shifted in (False, True):
        if _lattice_count(lim, shifted) >= M:
            pat = Pattern(M, pitch, shifted)
            if pat.max_center_dist <= max_dist * (1 + 1e-12):
                return pat
    return None


# --- construction objects ------------------------------------------------


@dataclass(frozen=True)
class ConstructionI:
    """Spiral Cantor map: M balls of radius r = M^(-1/s), blocks psi_{eB, K_bar_n}."""

    p: float
    s: float
    eps: float
    M: int
    r: float
    c1: float
    c2: float
    C_block: float
    pattern: Pattern = field(repr=False, compare=False)
    kind: str = "I"

    @property
    def grid_centers(self) -> np.ndarray:
        return self.pattern.centers

    @property
    def log_inv_r(self) -> float:
        return math.log(self.M) / self.s

    @property
    def max_depth(self) -> int:
        return MAX_DEPTH_I

    def K(self, n: int) -> float:
        """Target distortion at level n: (1/p) log M^((2-s-eps) n / s)."""
        return (2 - self.s - self.eps) * n * math.log(self.M) / (self.s * self.p)

    def K_bar(self, n: int) -> float:
        return self.K(n) / self.C_block

    def block_params(self, n: int) -> blocks.SpiralBlockParams:
        return blocks.SpiralBlockParams(self.c1, self.c2, self.K_bar(n))

    def realized_K(self, n: int) -> float:
        return blocks.spiral_block_distortion(self.block_params(n))

    # frame interface
    def outer_log(self, n: int) -> float:
        return 1.0 - self.log_inv_r

    def inner_log(self, n: int) -> float:
        return -self.log_inv_r

    def frame_log_scale(self, k: int) -> float:
        return -k * self.log_inv_r

    def inner_factor(self, n: int) -> tuple[float, float]:
        kb = self.K_bar(n)
        return 1.0 - self.c1 * kb, -self.c2 * kb

    def block_rel(self, n: int, u: LogPolar) -> LogPolar:
        return blocks.spiral_annulus_formula(self.block_params(n), self.outer_log(n), u)

    def block_array(self, n: int, u: np.ndarray) -> np.ndarray:
        ro = math.exp(self.outer_log(n))
        gamma = complex(self.c1, self.c2) * self.K_bar(n)
        return ro * np.exp(gamma * np.log(np.abs(u) / ro) + 1j * np.angle(u))

    def level_log_radius(self, n: int) -> float:
        """log radius of the level-n balls B_n (the natural cover)."""
        return -n * self.log_inv_r

    def level_log_inv_radius(self, n: int) -> float:
        return n * self.log_inv_r

    def level_loglog_inv_radius(self, n: int) -> float:
        return math.log(self.level_log_inv_radius(n))


@dataclass(frozen=True)
class ConstructionII:
    """Log-power Cantor map with radii r_bar_n = exp(-(1/r)^((2-s) n / p)), R_bar_n = R r_bar_{n-1}."""

    p: float
    s: float
    eps: float
    r: float
    R: float
    M: int
    pattern: Pattern = field(repr=False, compare=False)
    kind: str = "II"

    @property
    def grid_centers(self) -> np.ndarray:
        return self.pattern.centers

    @property
    def C(self) -> float:
        return self.R / self.r ** (self.s / 2)

    @property
    def a(self) -> float:
        return (2 - self.s) / self.p

    @property
    def log_inv_r(self) -> float:
        return math.log(self.M) / self.s

    @property
    def max_depth(self) -> int:
        return MAX_DEPTH_II

    @property
    def block(self) -> blocks.LogPowerBlockParams:
        return blocks.LogPowerBlockParams(self.p, self.eps)

    def loglog_inv_rbar(self, n: int) -> float:
        """log log(1/r_bar_n) = (2-s) n log(1/r) / p, exact in log-log space."""
        return self.a * n * self.log_inv_r

    def log_rbar(self, n: int) -> float:
        if n == 0:
            return 0.0
        return -math.exp(self.loglog_inv_rbar(n))

    def log_Rbar(self, n: int) -> float:
        if n == 1:
            return math.log(self.R)
        return math.log(self.R) + self.log_rbar(n - 1)

    def annulus_log_width(self, n: int) -> float:
        """log(R_bar_n / r_bar_n); must be positive."""
        if n == 1:
            return math.log(self.R) + math.exp(self.loglog_inv_rbar(1))
        # X_n - X_{n-1} = X_{n-1} (r^-a - 1)
        x_prev = math.exp(self.loglog_inv_rbar(n - 1))
        return math.log(self.R) + x_prev * math.expm1(self.a * self.log_inv_r)

    # frame interface
    def outer_log(self, n: int) -> float:
        return math.log(self.R)

    def inner_log(self, n: int) -> float:
        return self.log_rbar(n) - self.log_rbar(n - 1)

    def frame_log_scale(self, k: int) -> float:
        return self.log_rbar(k)

    def inner_factor(self, n: int) -> tuple[float, float]:
        return blocks.logpower_inner_log_factor(self.block, self.log_Rbar(n), self.log_rbar(n)), 0.0

    def block_rel(self, n: int, u: LogPolar) -> LogPolar:
        S = self.log_rbar(n - 1)
        out = blocks.logpower_annulus_formula(self.block, self.log_Rbar(n), u.shifted(S))
        return out.shifted(-S)

    def block_array(self, n: int, u: np.ndarray) -> np.ndarray:
        S = self.log_rbar(n - 1)
        q = self.block.q
        lR = self.log_Rbar(n)
        log_mod = lR + q * math.log(-lR) - q * np.log(-(np.log(np.abs(u)) + S)) - S
        return np.exp(log_mod + 1j * np.angle(u))

    def level_log_radius(self, n: int) -> float:
        """log radius of the level-n inner balls (the cover of E)."""
        return self.log_rbar(n)

    def level_log_inv_radius(self, n: int) -> float:
        return math.exp(self.loglog_inv_rbar(n))

    def level_loglog_inv_radius(self, n: int) -> float:
        return self.loglog_inv_rbar(n)


Construction = Union[ConstructionI, ConstructionII]


def _check_common(p: float, s: float, eps: float) -> None:
    if not 0 < s < 2:
        raise ValueError("s out of (0,2)")
    if not p > 0:
        raise ValueError("p must be positive")
    if not 0 < eps < 2 - s:
        raise ValueError("eps out of (0, 2-s)")


def _pattern_i(M: int, s: float) -> Optional[Pattern]:
    r = M ** (-1.0 / s)
    return best_pattern(M, PITCH_I * r, 1.0 - 3.0 * E * r)


def minimal_m_i(s: float, max_M: int = 10**7) -> int:
    """Smallest M whose lattice fits for Construction I at dimension s."""
    # continuous estimate pi (1 - 3er)^2 / pitch^2 >= M gives a safe starting point
    M = 2
    if s > 1:
        M = max(2, int(0.5 * (PITCH_I**2 / math.pi) ** (s / (2 - s))))
    while M <= max_M:
        r = M ** (-1.0 / s)
        lim = (1.0 - 3.0 * E * r) / (PITCH_I * r)
        if max(_lattice_count(lim, False), _lattice_count(lim, True)) >= M:
            return M
        M += 1
    need = (PITCH_I**2 / math.pi) ** (s / (2 - s))
    raise ConstructionInfeasible(
        f"no feasible M <= {max_M} for s={s}; packing needs M of order {need:.3g}"
    )


def build_construction_i(
    p: float,
    s: float,
    eps: float,
    c1: float = 1.0,
    c2: float = 0.0,
    M: Optional[int] = None,
    max_M: int = 10**7,
    K_ref: Optional[float] = None,
) -> ConstructionI:
    """Construction I with r = M^(-1/s), so that M r^s = 1.

    ``M`` defaults to the smallest integer whose lattice (pitch 4er) fits in
    the unit disk with a 2er margin around the dilated balls.  The block
    constant is measured at ``K_ref`` (default ``16/c1``).
    """
    _check_common(p, s, eps)
    if not c1 > 0 or not c2 >= 0:
        raise ValueError("need c1 > 0 and c2 >= 0")
    if M is None:
        M = minimal_m_i(s, max_M)
    M = int(M)
    if M < 2:
        raise ValueError("M must be at least 2")
    pat = _pattern_i(M, s)
    if pat is None:
        raise ConstructionInfeasible(f"M={M} balls do not fit for s={s}")
    r = M ** (-1.0 / s)
    if K_ref is None:
        K_ref = 16.0 / c1
    C = blocks.spiral_block_distortion_constant(blocks.SpiralBlockParams(c1, c2, K_ref))
    return ConstructionI(p, s, eps, M, r, c1, c2, C, pat)


def _pattern_ii(M: int) -> tuple[Pattern, float]:
    best = None
    for shifted in (False, True):
        pat = Pattern(M, 1.0, shifted)
        R = 1.0 / (PITCH_II * pat.rho + 1.0 + MARGIN_II)
        if best is None or R > best[1] * (1 + 1e-12):
            best = (pat, R)
    pat, R = best
    return Pattern(M, PITCH_II * R, pat.shifted), R


def schedule_valid(c: ConstructionII, levels: int = 50) -> bool:
    return all(c.annulus_log_width(n) > 0 for n in range(1, levels + 1))


def build_construction_ii(
    p: float,
    s: float,
    eps: float,
    M: Optional[int] = None,
    r: Optional[float] = None,
    max_M: int = 10**6,
    check_levels: int = 50,
) -> ConstructionII:
    """Construction II.  ``M`` (or ``r`` with ``r^-s`` an integer) may be given;
    otherwise the smallest M with a valid radii schedule is chosen."""
    _check_common(p, s, eps)
    if r is not None:
        m_float = r ** (-s)
        M_r = round(m_float)
        if abs(M_r - m_float) > 1e-9 * m_float:
            raise ValueError(f"r^-s = {m_float} is not an integer")
        if M is not None and M != M_r:
            raise ValueError("M and r disagree")
        M = M_r
    if M is not None:
        c = _make_ii(p, s, eps, int(M))
        if not schedule_valid(c, check_levels):
            bad = next(n for n in range(1, check_levels + 1) if c.annulus_log_width(n) <= 0)
            raise ScheduleError(
                f"annulus degenerates at level {bad}: log(R_bar/r_bar) = {c.annulus_log_width(bad):.4g}"
            )
        return c
    # cheap scan: packing radius from sorted lattice distances, pattern built once
    rho_c, rho_s = _sorted_lattice_dists(max_M, False), _sorted_lattice_dists(max_M, True)
    for m in range(2, max_M + 1):
        rho = min(rho_c[m - 1], rho_s[m - 1])
        R = 1.0 / (PITCH_II * rho + 1.0 + MARGIN_II)
        probe = ConstructionII(p, s, eps, m ** (-1.0 / s), R, m, None)
        if schedule_valid(probe, check_levels):
            return _make_ii(p, s, eps, m)
    raise ConstructionInfeasible(f"no valid radii schedule with M <= {max_M}")


def _sorted_lattice_dists(M: int, shifted: bool) -> np.ndarray:
    H = int(math.sqrt(M / math.pi)) + 3
    off = 0.5 if shifted else 0.0
    idx = np.arange(-H, H + 1) + off
    d = np.hypot(idx[:, None], idx[None, :]).ravel()
    d = np.sort(d[d <= H - 1])
    return d[:M]


def _make_ii(p: float, s: float, eps: float, M: int) -> ConstructionII:
    pat, R = _pattern_ii(M)
    r = M ** (-1.0 / s)
    return ConstructionII(p, s, eps, r, R, M, pat)


# --- evaluation ----------------------------------------------------------


def evaluate_frame(c: Construction, k: int, v: LogPolar, depth: int) -> LogPolar:
    """Normalized map of frame ``k`` (levels k+1..depth) at the frame-relative point ``v``."""
    if k >= depth or v.is_zero:
        return v
    n = k + 1
    pat = c.pattern
    if v.log_r < _TINY_LOG:
        if pat.central is None:
            return v
        g, u = 0j, v
    else:
        w = v.to_complex()
        i = int(pat.locate(w))
        if i < 0:
            return v
        g = complex(pat.centers[i])
        u = v if g == 0 else to_log_polar(w - g, prev_arg=v.arg)
    if u.is_zero:
        out = ZERO
    elif u.log_r >= c.outer_log(n):
        return v
    elif u.log_r >= c.inner_log(n):
        out = c.block_rel(n, u)
    else:
        li = c.inner_log(n)
        inner = evaluate_frame(c, n, u.shifted(-li), depth)
        dl, da = c.inner_factor(n)
        out = inner.shifted(li + dl, da)
    if g == 0:
        return out
    return to_log_polar(g + out.to_complex(), prev_arg=v.arg)


@dataclass(frozen=True)
class CantorAddress:
    digits: tuple

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))

    def __len__(self):
        return len(self.digits)

    def prefix(self, n: int) -> "CantorAddress":
        return CantorAddress(self.digits[:n])


def _check_address(c: Construction, address: CantorAddress) -> None:
    for d in address.digits:
        if not 0 <= d < c.M:
            raise ValueError(f"digit {d} out of range [0, {c.M})")


def address_center(c: Construction, address: CantorAddress) -> complex:
    """Center of the addressed ball (frame)."""
    _check_address(c, address)
    z = 0j
    for k, d in enumerate(address.digits):
        z += complex(c.pattern.centers[d]) * math.exp(c.frame_log_scale(k))
    return z


def central_address(c: Construction, n: int) -> CantorAddress:
    if c.pattern.central is None:
        raise ValueError("pattern has no central ball")
    return CantorAddress((c.pattern.central,) * n)


def _check_depth(c: Construction, depth: int) -> None:
    if not 0 <= depth <= c.max_depth:
        raise ValueError(f"depth must lie in [0, {c.max_depth}]")


def evaluate_map(c: Construction, point, depth: int) -> LogPolar:
    """``f_depth`` at a point.

    ``point`` is a complex (or pair), a ``LogPolar`` absolute position, or an
    ``(address, offset)`` pair.  In the last form the result is the
    difference ``f(c_addr + offset) - f(c_addr)`` computed in log space.
    """
    _check_depth(c, depth)
    if isinstance(point, tuple) and len(point) == 2 and isinstance(point[0], (CantorAddress, list, tuple)):
        address, offset = point
        if not isinstance(address, CantorAddress):
            address = CantorAddress(address)
        if not isinstance(offset, LogPolar):
            offset = to_log_polar(offset)
        return _evaluate_relative(c, address, offset, depth)
    v = point if isinstance(point, LogPolar) else to_log_polar(point)
    return evaluate_frame(c, 0, v, depth)


def _relative_in_ball(c: Construction, address: CantorAddress, offset: LogPolar, depth: int) -> LogPolar:
    m = len(address)
    S = c.frame_log_scale(m)
    d_log, d_arg = 0.0, 0.0
    for j in range(1, min(m, depth) + 1):
        dl, da = c.inner_factor(j)
        d_log += dl
        d_arg += da
    if depth <= m:
        return offset.shifted(d_log, d_arg)
    inner = evaluate_frame(c, m, offset.shifted(-S), depth)
    return inner.shifted(S + d_log, d_arg)


def _lp_sub(a: LogPolar, b: LogPolar) -> LogPolar:
    """a - b without leaving log space for the common scale."""
    if b.is_zero:
        return a
    if a.is_zero:
        return LogPolar(b.log_r, b.arg + math.pi)
    ref = max(a.log_r, b.log_r)
    w = a.shifted(-ref).to_complex() - b.shifted(-ref).to_complex()
    if w == 0:
        return ZERO
    return to_log_polar(w, prev_arg=a.arg).shifted(ref)


def _evaluate_relative(c: Construction, address: CantorAddress, offset: LogPolar, depth: int) -> LogPolar:
    _check_address(c, address)
    m = len(address)
    if offset.is_zero or offset.log_r <= c.frame_log_scale(m) + 1e-12:
        return _relative_in_ball(c, address, offset, depth)
    # walk up to the smallest ancestor ball holding c_addr + offset; since
    # |c_addr - c_j| < r_j only ancestors with |offset| < 2 r_j qualify
    cen = [0j]
    for k, d in enumerate(address.digits):
        cen.append(cen[-1] + complex(c.pattern.centers[d]) * math.exp(c.frame_log_scale(k)))
    j = m - 1
    while j > 0 and offset.log_r > c.frame_log_scale(j) + math.log(2.0):
        j -= 1
    for j in range(j, -1, -1):
        S = c.frame_log_scale(j)
        shift = cen[m] - cen[j]
        rel = offset.shifted(-S).to_complex() + shift * math.exp(-S)
        # frame 0 takes everything: the map is the identity off the unit disk
        if j == 0 or abs(rel) <= 1 + 1e-12:
            prefix = address.prefix(j)
            base = to_log_polar(rel, prev_arg=offset.arg).shifted(S) if rel != 0 else ZERO
            fz = _relative_in_ball(c, prefix, base, depth)
            if shift == 0:
                return fz
            f0 = _relative_in_ball(c, prefix, to_log_polar(shift), depth)
            return _lp_sub(fz, f0)
    raise AssertionError("unreachable")


def evaluate_map_array(c: Construction, z, depth: int) -> np.ndarray:
    """Vectorized Cartesian ``f_depth``; fine while normalized radii stay representable."""
    _check_depth(c, depth)
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    v = z.ravel().copy()
    base = np.zeros_like(v)
    scale = np.ones_like(v)
    out = np.empty_like(v)
    active = np.arange(v.size)
    for n in range(1, depth + 1):
        if active.size == 0:
            break
        va = v[active]
        idx = c.pattern.locate(va)
        g = np.where(idx >= 0, c.pattern.centers[np.maximum(idx, 0)], 0)
        u = va - g
        au = np.abs(u)
        ro, ri = math.exp(c.outer_log(n)), math.exp(c.inner_log(n))
        ident = (idx < 0) | (au >= ro)
        ann = ~ident & (au >= ri)
        inn = ~ident & ~ann
        a_id, a_ann, a_inn = active[ident], active[ann], active[inn]
        out[a_id] = base[a_id] + scale[a_id] * v[a_id]
        if a_ann.size:
            with np.errstate(divide="ignore", invalid="ignore"):
                w = c.block_array(n, u[ann])
            w = np.where(u[ann] == 0, 0, w)
            out[a_ann] = base[a_ann] + scale[a_ann] * (g[ann] + w)
        if a_inn.size:
            dl, da = c.inner_factor(n)
            base[a_inn] = base[a_inn] + scale[a_inn] * g[inn]
            scale[a_inn] = scale[a_inn] * (math.exp(dl) * ri * complex(math.cos(da), math.sin(da)))
            v[a_inn] = u[inn] / ri
        active = a_inn
    out[active] = base[active] + scale[active] * v[active]
    return out.reshape(shape)


# --- closed forms ----------------------------------------------------------


def boundary_offset_point(c: Construction, address: CantorAddress, n: int, theta: float = 0.0) -> LogPolar:
    """Offset ``lambda_n`` from the addressed center to the level-n ball boundary."""
    if not 1 <= n <= len(address):
        raise ValueError("need 1 <= n <= len(address)")
    return LogPolar(c.level_log_radius(n), theta)


def sum_K_bar(c: ConstructionI, n: int) -> float:
    """K_bar_1 + ... + K_bar_n as an arithmetic series."""
    return (2 - c.s - c.eps) * math.log(c.M) * n * (n + 1) / (2 * c.s * c.p * c.C_block)


def image_log_radius(c: ConstructionI, n: int) -> float:
    """log |f(z + lambda_n) - f(z)| = -c1 sum K_bar + n + n log r."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return -c.c1 * sum_K_bar(c, n) + n - n * c.log_inv_r


def image_winding(c: ConstructionI, n: int) -> float:
    """Total rotation c2 (K_bar_1 + ... + K_bar_n) picked up by crossing n annuli."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return c.c2 * sum_K_bar(c, n)


# --- geometry export -------------------------------------------------------


def level_centers(c: Construction, n: int) -> np.ndarray:
    """All M^n level-n centers (absolute coordinates)."""
    cen = np.zeros(1, dtype=complex)
    for k in range(n):
        cen = (cen[:, None] + c.pattern.centers[None, :] * math.exp(c.frame_log_scale(k))).ravel()
    return cen


def level_outer_log_radius(c: Construction, n: int) -> float:
    return c.frame_log_scale(n - 1) + c.outer_log(n)


def level_inner_log_radius(c: Construction, n: int) -> float:
    return c.frame_log_scale(n)


def construction_from_config(cfg: dict) -> Construction:
    """Build from the JSON ingestion schema ``{construction, p, s, eps, c1, c2, ...}``."""
    kind = str(cfg.get("construction", "I")).upper()
    p, s, eps = float(cfg["p"]), float(cfg["s"]), float(cfg["eps"])
    if kind == "I":
        return build_construction_i(
            p, s, eps, float(cfg.get("c1", 1.0)), float(cfg.get("c2", 0.0)), M=cfg.get("M")
        )
    if kind == "II":
        return build_construction_ii(p, s, eps, M=cfg.get("M"), r=cfg.get("r"))
    raise ValueError(f"unknown construction {kind!r}")
