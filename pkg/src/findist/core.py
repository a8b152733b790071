"""Shared numeric vocabulary: log-polar complex values, balls, annuli, fits.

Quantities that decay like ``exp(-c n^2)`` or ``exp(-4^n)`` are carried as
``(log|w|, arg w)`` pairs.  The argument is *unwound*: it is never reduced
modulo 2*pi inside a computation, so winding totals survive composition.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


def as_point(z) -> complex:
    """Coerce ``z`` (complex, real, or an ``(re, im)`` pair) to a finite complex."""
    if isinstance(z, (tuple, list)):
        z = complex(float(z[0]), float(z[1]))
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite point {z!r}")
    return z


@dataclass(frozen=True)
class LogPolar:
    """A complex number stored as natural log-modulus and unwound argument.

    ``log_r = -inf`` encodes an exact zero; its argument is then meaningless
    and ``arg_valid`` is False.
    """

    log_r: float
    arg: float
    arg_valid: bool = True

    @property
    def is_zero(self) -> bool:
        return self.log_r == -math.inf

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        return cmath.rect(math.exp(self.log_r), self.arg)

    @property
    def modulus(self) -> float:
        return math.exp(self.log_r)

    def principal_arg(self) -> float:
        """Argument reduced to (-pi, pi]; presentation only."""
        a = math.remainder(self.arg, TWO_PI)
        return math.pi if a == -math.pi else a

    def shifted(self, d_log: float, d_arg: float = 0.0) -> "LogPolar":
        """Multiply by ``exp(d_log + i d_arg)``."""
        return LogPolar(self.log_r + d_log, self.arg + d_arg, self.arg_valid)

    def __mul__(self, other: "LogPolar") -> "LogPolar":
        return log_polar_mul(self, other)


ZERO = LogPolar(-math.inf, 0.0, False)


def to_log_polar(z, prev_arg: Optional[float] = None) -> LogPolar:
    """Log-polar form of ``z``.

    With ``prev_arg`` the branch of the argument is the one within pi of
    ``prev_arg``, which is how arguments are tracked continuously along paths.
    """
    z = as_point(z)
    if z == 0:
        return LogPolar(-math.inf, 0.0 if prev_arg is None else prev_arg, False)
    a = math.atan2(z.imag, z.real)
    if prev_arg is not None:
        a = unwind_to(a, prev_arg)
    return LogPolar(math.log(abs(z)), a)


def unwind_to(a: float, ref: float) -> float:
    """Shift ``a`` by a multiple of 2*pi so that it lies within pi of ``ref``."""
    return a + TWO_PI * round((ref - a) / TWO_PI)


def log_polar_mul(a: LogPolar, b: LogPolar) -> LogPolar:
    return LogPolar(a.log_r + b.log_r, a.arg + b.arg, a.arg_valid and b.arg_valid)


def unwrap_args(args: Sequence[float]) -> np.ndarray:
    """Continuous branch along a sampled path: each step is moved within pi of the last."""
    out = np.array(args, dtype=float)
    for i in range(1, len(out)):
        out[i] = unwind_to(out[i], out[i - 1])
    return out


def logsumexp(values) -> float:
    """log(sum(exp(values))); -inf for an empty or all -inf input."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return -math.inf
    m = float(np.max(x))
    if m == -math.inf:
        return -math.inf
    if m == math.inf:
        return math.inf
    return m + math.log(float(np.sum(np.exp(x - m))))


@dataclass(frozen=True)
class Ball:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Annulus:
    center: complex
    r_inner: float
    r_outer: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not 0 < self.r_inner < self.r_outer:
            raise ValueError(
                f"annulus needs 0 < r_inner < r_outer, got {self.r_inner}, {self.r_outer}"
            )

    @property
    def area(self) -> float:
        return math.pi * (self.r_outer**2 - self.r_inner**2)


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares fit ``y ~ alpha*L^2 + linear*L + offset``.

    ``residual`` is the mean squared relative error of the full fit.  For
    first-order fits (box dimension) ``alpha`` is the slope and the linear
    coefficient is unused.
    """

    alpha: float
    residual: float
    n_points: int
    linear: float = 0.0
    offset: float = 0.0
    x_max: float = 1.0
    y_span: float = 1.0

    def __post_init__(self):
        if self.n_points < 3:
            raise ValueError("an exponent fit needs at least 3 points")

    def is_quadratic(self, rel_tol: float = 1e-6) -> bool:
        """False when the quadratic term is invisible next to the data (linear growth)."""
        return self.alpha * self.x_max**2 > rel_tol * self.y_span


class DegenerateFitError(ValueError):
    pass


def _relative_mse(y: np.ndarray, yhat: np.ndarray) -> float:
    scale = np.maximum(np.abs(y), np.finfo(float).tiny)
    return float(np.mean(((y - yhat) / scale) ** 2))


def fit_quadratic(L, y) -> ExponentFit:
    """Fit ``y = alpha L^2 + b L + c``; constant and linear terms are absorbed."""
    L = np.asarray(L, dtype=float)
    y = np.asarray(y, dtype=float)
    if L.size < 3:
        raise DegenerateFitError("need at least 3 samples")
    if np.ptp(L) == 0:
        raise DegenerateFitError("all abscissae are equal")
    # scale the abscissa so the normal matrix stays well conditioned
    s = float(np.max(np.abs(L)))
    x = L / s
    A = np.column_stack([x**2, x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    yhat = A @ coef
    return ExponentFit(
        alpha=float(coef[0] / s**2),
        residual=_relative_mse(y, yhat),
        n_points=int(L.size),
        linear=float(coef[1] / s),
        offset=float(coef[2]),
        x_max=s,
        y_span=float(np.max(np.abs(y))),
    )


def fit_line(x, y) -> ExponentFit:
    """Least-squares line; ``alpha`` is the slope."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise DegenerateFitError("need at least 3 samples")
    if np.ptp(x) == 0:
        raise DegenerateFitError("all abscissae are equal")
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return ExponentFit(
        alpha=float(coef[0]),
        residual=_relative_mse(y, A @ coef),
        n_points=int(x.size),
        offset=float(coef[1]),
        x_max=float(np.max(np.abs(x))),
        y_span=float(np.max(np.abs(y))),
    )
