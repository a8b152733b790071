"""The two radial building blocks and finite-difference distortion.

Spiral block ``psi_{B,K}`` on ``B = B(a, R)``::

    z                                          |z-a| >= R
    a + R dir(z-a) |(z-a)/R|^((c1 + i c2) K)   R/e <= |z-a| < R
    a + e^(1 - c1 K) e^(-i c2 K) (z-a)         |z-a| < R/e

Log-power block ``psi_A`` on ``A = B(a, Ro) \\ B(a, ri)`` with ``q = p/(2-eps)``::

    z                                                   |z-a| >= Ro
    a + dir(z-a) Ro log^q(1/Ro) / log^q(1/|z-a|)        ri <= |z-a| < Ro
    a + [Ro log^q(1/Ro) / (ri log^q(1/ri))] (z-a)       |z-a| < ri

Points on a gluing circle are evaluated with the formula of the region
outside it.  The ``*_rel`` functions work on center-relative log-polar
values and never leave log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ZERO, Annulus, Ball, LogPolar, as_point, to_log_polar


class OrientationError(ArithmeticError):
    """Finite-difference Jacobian is not orientation preserving."""

    def __init__(self, msg, z=None):
        super().__init__(msg)
        self.z = z


@dataclass(frozen=True)
class SpiralBlockParams:
    c1: float
    c2: float
    K_bar: float

    def __post_init__(self):
        if not self.c1 > 0:
            raise ValueError("c1 must be positive")
        if not self.c2 >= 0:
            raise ValueError("c2 must be nonnegative")
        if not self.K_bar >= 0:
            raise ValueError("K_bar must be nonnegative")

    @property
    def inner_log_factor(self) -> float:
        return 1.0 - self.c1 * self.K_bar

    @property
    def inner_rotation(self) -> float:
        return -self.c2 * self.K_bar


@dataclass(frozen=True)
class LogPowerBlockParams:
    p: float
    eps: float

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("p must be positive")
        if not 0 < self.eps < 2:
            raise ValueError("eps must lie in (0, 2)")

    @property
    def q(self) -> float:
        return self.p / (2.0 - self.eps)


@dataclass(frozen=True)
class BlockDistortionSample:
    z: complex
    K: float

    def __post_init__(self):
        if self.K < 1 - 1e-9:
            raise ValueError(f"distortion below 1: {self.K}")


# --- spiral block ---------------------------------------------------------


def spiral_annulus_formula(params: SpiralBlockParams, log_R: float, u: LogPolar) -> LogPolar:
    t = u.log_r - log_R
    return LogPolar(log_R + params.c1 * params.K_bar * t, u.arg + params.c2 * params.K_bar * t)


def spiral_inner_formula(params: SpiralBlockParams, log_R: float, u: LogPolar) -> LogPolar:
    return u.shifted(params.inner_log_factor, params.inner_rotation)


def spiral_block_rel(params: SpiralBlockParams, log_R: float, u: LogPolar) -> LogPolar:
    """Spiral block on ``B(0, e^log_R)`` applied to the center-relative value ``u``."""
    if u.is_zero:
        return ZERO
    t = u.log_r - log_R
    if t >= 0:
        return u
    if t >= -1:
        return spiral_annulus_formula(params, log_R, u)
    return spiral_inner_formula(params, log_R, u)


def eval_spiral_block(params: SpiralBlockParams, B: Ball, z) -> LogPolar:
    """Image of ``z`` as a log-polar value relative to the center of ``B``."""
    u = to_log_polar(as_point(z) - B.center)
    return spiral_block_rel(params, math.log(B.radius), u)


def apply_spiral_block(params: SpiralBlockParams, B: Ball, z):
    """Cartesian evaluation; accepts scalars or arrays.  Exact identity outside ``B``."""
    z_arr = np.asarray(z, dtype=complex)
    u = z_arr - B.center
    rho = np.abs(u) / B.radius
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.log(rho)
        gamma = complex(params.c1, params.c2) * params.K_bar
        ann = B.center + B.radius * np.exp(gamma * t + 1j * np.angle(u))
    inner = B.center + math.exp(params.inner_log_factor) * np.exp(1j * params.inner_rotation) * u
    out = np.where(rho >= 1, z_arr, np.where(rho * math.e >= 1, ann, inner))
    return out[()] if out.ndim == 0 else out


def spiral_block_distortion(params: SpiralBlockParams) -> float:
    """Exact distortion of the spiral block on its annulus.

    In coordinates ``(log|z|, arg z)`` the block is the linear map
    ``(t, th) -> (c1 K t, th + c2 K t)`` and ``exp`` is conformal, so the
    distortion is the singular-value ratio of that 2x2 matrix.
    """
    k = params.c1 * params.K_bar
    c = params.c2 * params.K_bar
    if k == 0:
        return math.inf
    tr = (k * k + c * c + 1.0) / k  # K + 1/K
    return 0.5 * (tr + math.sqrt(max(tr * tr - 4.0, 0.0)))


# --- log-power block ------------------------------------------------------


def _check_logpower_radii(log_Ro: float, log_ri: float) -> None:
    if not log_Ro < 0:
        raise ValueError("log-power block needs outer radius < 1")
    if not log_ri < log_Ro:
        raise ValueError("log-power block needs inner radius < outer radius")


def logpower_inner_log_factor(params: LogPowerBlockParams, log_Ro: float, log_ri: float) -> float:
    """log of the similarity factor on the inner ball."""
    q = params.q
    return log_Ro + q * math.log(-log_Ro) - log_ri - q * math.log(-log_ri)


def logpower_annulus_formula(params: LogPowerBlockParams, log_Ro: float, u: LogPolar) -> LogPolar:
    q = params.q
    return LogPolar(log_Ro + q * math.log(-log_Ro) - q * math.log(-u.log_r), u.arg)


def logpower_inner_formula(
    params: LogPowerBlockParams, log_Ro: float, log_ri: float, u: LogPolar
) -> LogPolar:
    return u.shifted(logpower_inner_log_factor(params, log_Ro, log_ri))


def logpower_block_rel(
    params: LogPowerBlockParams, log_Ro: float, log_ri: float, u: LogPolar
) -> LogPolar:
    """Log-power block in absolute log radii, applied to center-relative ``u``."""
    _check_logpower_radii(log_Ro, log_ri)
    if u.is_zero:
        return ZERO
    if u.log_r >= log_Ro:
        return u
    if u.log_r >= log_ri:
        return logpower_annulus_formula(params, log_Ro, u)
    return logpower_inner_formula(params, log_Ro, log_ri, u)


def eval_logpower_block(params: LogPowerBlockParams, A: Annulus, z) -> LogPolar:
    """Image of ``z`` as a log-polar value relative to the center of ``A``."""
    u = to_log_polar(as_point(z) - A.center)
    return logpower_block_rel(params, math.log(A.r_outer), math.log(A.r_inner), u)


def apply_logpower_block(params: LogPowerBlockParams, A: Annulus, z):
    log_Ro, log_ri = math.log(A.r_outer), math.log(A.r_inner)
    _check_logpower_radii(log_Ro, log_ri)
    q = params.q
    z_arr = np.asarray(z, dtype=complex)
    u = z_arr - A.center
    r = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        mod = A.r_outer * (-log_Ro) ** q / (-np.log(r)) ** q
        ann = A.center + mod * np.exp(1j * np.angle(u))
    inner = A.center + math.exp(logpower_inner_log_factor(params, log_Ro, log_ri)) * u
    out = np.where(r >= A.r_outer, z_arr, np.where(r >= A.r_inner, ann, inner))
    return out[()] if out.ndim == 0 else out


def logpower_distortion_law(params: LogPowerBlockParams, dist) -> np.ndarray:
    """Distortion ``((2-eps)/p) log(1/|z-a|)`` on the annulus (valid where it is >= 1)."""
    return np.log(1.0 / np.asarray(dist, dtype=float)) / params.q


# --- finite-difference distortion ----------------------------------------


def distortion_field(map_eval: Callable, z, h) -> np.ndarray:
    """``|Df|^2 / J_f`` from central differences, vectorized over ``z``.

    ``map_eval`` must accept complex arrays.  ``h`` may be an array matching ``z``.
    """
    z = np.asarray(z, dtype=complex)
    h = np.broadcast_to(np.asarray(h, dtype=float), z.shape)
    fx = (np.asarray(map_eval(z + h)) - np.asarray(map_eval(z - h))) / (2 * h)
    fy = (np.asarray(map_eval(z + 1j * h)) - np.asarray(map_eval(z - 1j * h))) / (2 * h)
    a = fx.real**2 + fx.imag**2
    b = fy.real**2 + fy.imag**2
    c = fx.real * fy.real + fx.imag * fy.imag
    det = fx.real * fy.imag - fy.real * fx.imag
    smax2 = 0.5 * (a + b) + np.sqrt((0.5 * (a - b)) ** 2 + c**2)
    bad = ~(det > 1e-12 * (a + b))
    if np.any(bad):
        where = z[bad].ravel()[0] if z.ndim else complex(z)
        raise OrientationError(f"Jacobian not positive at z={where}", where)
    return smax2 / det


def default_step(z, center=0j, r_inner: float = 0.0):
    """Finite-difference step ``1e-8 * max(|z - center|, r_inner)``."""
    return 1e-8 * np.maximum(np.abs(np.asarray(z) - center), r_inner)


def numeric_distortion(map_eval: Callable, z, h: float | None = None) -> BlockDistortionSample:
    z = as_point(z)
    if h is None:
        h = float(default_step(z))
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    K = float(distortion_field(map_eval, np.array([z]), h)[0])
    return BlockDistortionSample(z, K)


def spiral_block_distortion_constant(params: SpiralBlockParams, n_radii: int = 12, n_angles: int = 8) -> float:
    """sup over the annulus of the measured distortion, divided by ``K_bar``."""
    if not params.K_bar > 0:
        raise ValueError("K_bar must be positive")
    B = Ball(0j, 1.0)
    margin = 0.02
    t = np.linspace(-1 + margin, -margin, n_radii)
    th = np.linspace(0, 2 * math.pi, n_angles, endpoint=False) + 0.1
    T, TH = np.meshgrid(t, th)
    z = np.exp(T + 1j * TH).ravel()
    K = distortion_field(lambda w: apply_spiral_block(params, B, w), z, default_step(z))
    return float(np.max(K)) / params.K_bar
