"""Gauge functions, cover sums over construction ball families, and the cover transfer.

Every gauge is evaluated through ``L = log(1/t)`` and returns ``log h(t)``,
so sums over covers never leave log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .core import ExponentFit, fit_line, logsumexp


@dataclass(frozen=True)
class PowerLog:
    """h(t) = log(1/t)^(-beta)."""

    beta: float
    name = "powerlog"
    rank = 1

    def log_eval(self, L):
        return -self.beta * np.log(L)

    @property
    def param(self) -> float:
        return self.beta


@dataclass(frozen=True)
class ExpSqrtLog:
    """h(t) = exp(-c sqrt(log(1/t)))."""

    c: float
    name = "expsqrtlog"
    rank = 2

    def log_eval(self, L):
        return -self.c * np.sqrt(L)

    @property
    def param(self) -> float:
        return self.c


@dataclass(frozen=True)
class Power:
    """h(t) = t^s."""

    s: float
    name = "power"
    rank = 3

    def log_eval(self, L):
        return -self.s * np.asarray(L, dtype=float)

    @property
    def param(self) -> float:
        return self.s


@dataclass(frozen=True)
class ExpLogSquared:
    """h(t) = exp(-c log^2(1/t))."""

    c: float
    name = "explogsquared"
    rank = 4

    def log_eval(self, L):
        return -self.c * np.asarray(L, dtype=float) ** 2

    @property
    def param(self) -> float:
        return self.c


Gauge = Union[PowerLog, ExpSqrtLog, Power, ExpLogSquared]
_KINDS = {k.name: k for k in (PowerLog, ExpSqrtLog, Power, ExpLogSquared)}


def parse_gauge(text: str) -> Gauge:
    """``"powerlog:2"`` style gauge names as used in configs."""
    name, _, value = text.partition(":")
    name = name.strip().lower()
    if name not in _KINDS or not value:
        raise ValueError(f"bad gauge {text!r}; expected one of {sorted(_KINDS)} as name:value")
    v = float(value)
    if not v > 0:
        raise ValueError("gauge parameter must be positive")
    return _KINDS[name](v)


def gauge_name(g: Gauge) -> str:
    return f"{g.name}:{g.param:g}"


def gauge_log_eval(g: Gauge, L):
    """log h(t) at L = log(1/t).  Scalars in, float out."""
    L_arr = np.asarray(L, dtype=float)
    if np.any(~(L_arr > 0)):
        raise ValueError("L = log(1/t) must be positive")
    out = g.log_eval(L_arr)
    return float(out) if np.ndim(out) == 0 else out


def compare_gauges(g1: Gauge, g2: Gauge) -> int:
    """Sign of lim log(h1/h2) as t -> 0: -1 when h1 is eventually much smaller, +1 larger, 0 equal."""
    if g1.rank != g2.rank:
        return -1 if g1.rank > g2.rank else 1
    if g1.param == g2.param:
        return 0
    return -1 if g1.param > g2.param else 1


def gauge_log_ratio(g1: Gauge, g2: Gauge, L) -> float:
    return gauge_log_eval(g1, L) - gauge_log_eval(g2, L)


@dataclass(frozen=True)
class CoverReport:
    level: int
    count_log: float
    radius_log_inv: float
    gauge_sum_log: float


def construction_gauge_sum(construction, level: int, g: Gauge) -> CoverReport:
    """Sum of h over the natural level-n cover: M^n balls of the level-n radius.

    h is evaluated at the ball radius (not the diameter), so that the
    Power(s) sum over Construction I is exactly zero in log.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    count_log = level * math.log(construction.M)
    if g.name == "power" and construction.kind == "I":
        # r = M^(-1/s): the sum is n log M (1 - beta/s) with no rounding at beta = s
        L = construction.level_log_inv_radius(level)
        return CoverReport(level, count_log, L, count_log * (1.0 - g.s / construction.s))
    if g.name == "powerlog":
        # log L is available exactly even when L itself is astronomically large
        log_h = -g.beta * construction.level_loglog_inv_radius(level)
        L = construction.level_log_inv_radius(level)
    else:
        L = construction.level_log_inv_radius(level)
        log_h = gauge_log_eval(g, L)
    return CoverReport(level, count_log, L, count_log + log_h)


def gauge_sum_slope_ii(s: float, p: float, r: float, beta: float) -> float:
    """Per-level increment of the PowerLog(beta) cover sum on Construction II.

    log L_n = ((2-s)/p) n log(1/r), so the sum is n log(1/r) (s - beta (2-s)/p).
    """
    return math.log(1.0 / r) * (s - beta * (2 - s) / p)


def box_dimension_estimate(construction, levels: Sequence[int]) -> ExponentFit:
    """Slope of count_log against log(1/radius) over the natural covers."""
    levels = list(levels)
    if len(levels) < 3:
        raise ValueError("need at least 3 levels")
    x = [construction.level_log_inv_radius(n) for n in levels]
    y = [n * math.log(construction.M) for n in levels]
    return fit_line(x, y)


def transfer_beta(p: float, C_tilde: float, s_bar: float, eps: float) -> float:
    return 2 * p * C_tilde / ((2 * (math.e - 1) + math.pi) * (2 - s_bar + eps))


@dataclass(frozen=True)
class TransferResult:
    ratio: float
    log_lhs: float
    log_rhs: float
    beta: float
    gauge: ExpSqrtLog


def transfer_cover(radii: Iterable[float], s_bar: float, p: float, C_tilde: float, eps: float) -> TransferResult:
    """Compare sum (2 exp(-sqrt(beta L_i)))^s_bar with sum h(r_i), h = ExpSqrtLog(s_bar sqrt(beta)).

    The first sum bounds the s_bar-content of the preimage cover; the ratio
    certifies it is at most 2^s_bar times the gauge sum.
    """
    r = np.asarray(list(radii), dtype=float)
    if r.size == 0:
        raise ValueError("empty cover")
    if np.any(~((r > 0) & (r < 1))):
        raise ValueError("radii must lie in (0, 1)")
    beta = transfer_beta(p, C_tilde, s_bar, eps)
    L = np.log(1.0 / r)
    root = np.sqrt(beta * L)
    g = ExpSqrtLog(s_bar * math.sqrt(beta))
    lhs = logsumexp(s_bar * (math.log(2.0) - root))
    rhs = logsumexp(g.log_eval(L))
    return TransferResult(math.exp(lhs - rhs), lhs, rhs, beta, g)
