"""Exponential integrability of the distortion: closed-form series and area integrals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import blocks
from .cantor import ConstructionI, ConstructionII
from .core import Annulus, logsumexp


@dataclass(frozen=True)
class IntegrabilityReport:
    """Per-level log terms of sum |A_n| e^(p K_n) and their running log sums."""

    levels: int
    per_level_log_term: tuple
    cumulative_log_sum: tuple
    ratios: tuple

    @property
    def log_partial_sum(self) -> float:
        return self.cumulative_log_sum[-1]

    @property
    def partial_sum(self) -> float:
        return math.exp(self.log_partial_sum)

    @property
    def geometric_ratio_estimate(self) -> float:
        return self.ratios[-1] if self.ratios else math.nan

    @property
    def summable(self) -> bool:
        """Heuristic: the late term ratios stay below one."""
        tail = self.ratios[len(self.ratios) // 2 :]
        return bool(tail) and max(tail) < 1 - 1e-12


def _report(terms) -> IntegrabilityReport:
    terms = np.asarray(terms, dtype=float)
    cum = np.logaddexp.accumulate(terms)
    ratios = np.exp(np.diff(terms))
    return IntegrabilityReport(len(terms), tuple(terms.tolist()), tuple(cum.tolist()), tuple(ratios.tolist()))


def level_log_area_i(c: ConstructionI, n: int) -> float:
    """log of the total area of the M^n level-n annuli eB \\ B (radius r^n)."""
    return n * math.log(c.M) + math.log(math.pi * (math.e**2 - 1)) - 2 * n * c.log_inv_r


def exp_integrability_series_i(c: ConstructionI, N: int, realized: bool = True) -> IntegrabilityReport:
    """Terms log(|A_n| e^(p K_n)).  ``realized`` uses the exact block distortion,
    otherwise the target K_n."""
    if N < 2:
        raise ValueError("N must be >= 2")
    terms = []
    for n in range(1, N + 1):
        K = c.realized_K(n) if realized else c.K(n)
        terms.append(level_log_area_i(c, n) + c.p * K)
    return _report(terms)


def series_ratio_i(c: ConstructionI) -> float:
    return c.M ** (-c.eps / c.s)


def exp_integrability_series_ii(c: ConstructionII, N: int) -> IntegrabilityReport:
    """Terms m log M - eps (1/r)^((2-s)(m-1)/p), the bound on level m's contribution."""
    if N < 2:
        raise ValueError("N must be >= 2")
    terms = [m * math.log(c.M) - c.eps * math.exp(c.loglog_inv_rbar(m - 1)) for m in range(1, N + 1)]
    return _report(terms)


def exact_level_log_integral_ii(c: ConstructionII, m: int) -> float:
    """log of M^m times the integral of e^(pK) over one level-m annulus.

    In frame coordinates the level-m annulus is a log-power block on
    R_bar_m > |u| > r_bar_m with e^(pK) = |u|^(eps-2), which integrates to
    2 pi (R_bar^eps - r_bar^eps) / eps.
    """
    lR, lr = c.log_Rbar(m), c.log_rbar(m)
    q = c.block.q
    if -lR < q:
        raise ValueError("distortion law below 1 on part of this annulus")
    # log(R^eps - r^eps) = eps lR + log(1 - exp(eps (lr - lR)))
    return m * math.log(c.M) + math.log(2 * math.pi / c.eps) + c.eps * lR + math.log(-math.expm1(c.eps * (lr - lR)))


def logpower_annulus_exp_integral(params: blocks.LogPowerBlockParams, r_outer: float, r_inner: float) -> float:
    """Closed form of the integral of e^(pK) over r_inner < |z| < r_outer for the log-power block."""
    if math.log(1 / r_outer) < params.q:
        raise ValueError("distortion law below 1 on part of this annulus")
    e = params.eps
    return 2 * math.pi * (r_outer**e - r_inner**e) / e


def numeric_exp_integral(map_eval: Callable, region: Annulus, p: float, grid: int) -> float:
    """Midpoint rule for the integral of e^(p K) over ``region``.

    The grid is uniform in (log radius, angle), so dA = rho^2 dt dtheta.
    ``map_eval`` must accept complex arrays.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    t0, t1 = math.log(region.r_inner), math.log(region.r_outer)
    dt = (t1 - t0) / grid
    dth = 2 * math.pi / grid
    t = t0 + (np.arange(grid) + 0.5) * dt
    th = (np.arange(grid) + 0.5) * dth
    T, TH = np.meshgrid(t, th, indexing="ij")
    u = np.exp(T + 1j * TH)
    z = region.center + u
    K = blocks.distortion_field(map_eval, z, 1e-8 * np.abs(u))
    return float(np.sum(np.exp(p * K) * np.exp(2 * T)) * dt * dth)


def report_rows(report: IntegrabilityReport):
    rows = []
    for i, (term, cum) in enumerate(zip(report.per_level_log_term, report.cumulative_log_sum)):
        ratio = report.ratios[i - 1] if i > 0 else math.nan
        rows.append((i + 1, term, cum, ratio))
    return rows
