"""Real-axis Gamma-family primitives.

``log_gamma`` and ``digamma`` accept scalars or numpy arrays.  The inverse
Gamma is restricted to the increasing branch ``x >= alpha`` where
``alpha ~ 1.4616`` is the abscissa of the positive-axis minimum of Gamma.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "GammaMinimum",
    "GAMMA_MIN",
    "log_gamma",
    "digamma",
    "inverse_gamma",
    "inverse_log_gamma",
    "floor_inverse_gamma",
    "floor_inverse_gamma_log",
    "log_factorials",
    "lambert_w0",
]

# ln(2*pi)/2
_HALF_LOG_2PI = 0.9189385332046727

# B_{2k} / (2k) for the digamma asymptotic expansion, k = 1..7
_PSI_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

_PSI_SHIFT = 10.0


def log_gamma(x):
    """ln Gamma(x) for x > 0 (scalar or array)."""
    if np.ndim(x) == 0:
        x = float(x)
        if not x > 0.0:
            raise DomainError(f"log_gamma requires x > 0, got {x!r}")
        return math.lgamma(x)
    x = np.asarray(x, dtype=float)
    if not np.all(x > 0.0):
        raise DomainError("log_gamma requires x > 0")
    return special.gammaln(x)


def _digamma_array(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=float, copy=True)
    acc = np.zeros_like(x)
    # shift up with psi(x) = psi(x + 1) - 1/x until the asymptotic series is accurate
    small = x < _PSI_SHIFT
    while np.any(small):
        acc[small] -= 1.0 / x[small]
        x[small] += 1.0
        small = x < _PSI_SHIFT
    inv2 = 1.0 / (x * x)
    series = np.zeros_like(x)
    for c in reversed(_PSI_ASYMPTOTIC):
        series = (series + c) * inv2
    return acc + np.log(x) - 0.5 / x - series


def digamma(x):
    """psi(x) = d/dx ln Gamma(x) for x > 0 (scalar or array).

    Upward recurrence to x >= 10 followed by the Bernoulli asymptotic
    expansion; absolute error is a few ulps of ``ln x`` on [1, 1e6].
    """
    if np.ndim(x) == 0:
        xf = float(x)
        if not xf > 0.0:
            raise DomainError(f"digamma requires x > 0, got {xf!r}")
        return float(_digamma_array(np.array([xf]))[0])
    x = np.asarray(x, dtype=float)
    if not np.all(x > 0.0):
        raise DomainError("digamma requires x > 0")
    return _digamma_array(x)


@dataclass(frozen=True)
class GammaMinimum:
    """Location and value of the minimum of Gamma on the positive axis."""

    alpha: float
    gamma_alpha: float

    @classmethod
    def locate(cls) -> "GammaMinimum":
        lo, hi = 1.4, 1.5
        # digamma is increasing on (0, inf): plain bisection to the last ulp
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if digamma(mid) < 0.0:
                lo = mid
            else:
                hi = mid
        alpha = lo if abs(digamma(lo)) <= abs(digamma(hi)) else hi
        return cls(alpha=alpha, gamma_alpha=math.exp(math.lgamma(alpha)))

    @property
    def log_gamma_alpha(self) -> float:
        return math.lgamma(self.alpha)


GAMMA_MIN = GammaMinimum.locate()


def lambert_w0(z):
    """Principal real branch of the Lambert W function for z >= -1/e."""
    z = np.asarray(z, dtype=float)
    if np.any(z < -math.exp(-1.0) - 1e-15):
        raise DomainError("lambert_w0 requires z >= -1/e")
    z = np.maximum(z, -math.exp(-1.0))
    w = np.empty_like(z)
    near = z < -0.25
    mid = (~near) & (z < 3.0)
    far = z >= 3.0
    p = np.sqrt(np.maximum(2.0 * (math.e * z[near] + 1.0), 0.0))
    w[near] = -1.0 + p - p * p / 3.0
    w[mid] = np.log1p(z[mid])
    l1 = np.log(z[far])
    l2 = np.log(l1)
    w[far] = l1 - l2 + l2 / l1
    for _ in range(30):
        ew = np.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / np.where(wp1 == 0.0, 1.0, 2.0 * wp1)
        step = np.where(denom != 0.0, f / np.where(denom == 0.0, 1.0, denom), 0.0)
        w = w - step
        if np.all(np.abs(step) <= 4e-16 * np.maximum(1.0, np.abs(w))):
            break
    return w


def _initial_inverse(log_y: np.ndarray) -> np.ndarray:
    # Gamma^{-1}(y) ~ l / W(l / e) + 1/2 with l = ln(y / sqrt(2 pi)), good to
    # a few percent everywhere on the increasing branch
    shift = np.where(log_y < 30.0, np.log(np.exp(np.minimum(log_y, 30.0)) + 0.036534) - log_y, 0.0)
    ell = log_y + shift - _HALF_LOG_2PI
    w = lambert_w0(np.maximum(ell / math.e, -math.exp(-1.0)))
    guess = np.where(np.abs(w) > 1e-12, ell / np.where(w == 0.0, 1.0, w), math.e) + 0.5
    return np.maximum(guess, GAMMA_MIN.alpha)


def inverse_log_gamma(log_y, max_iter: int = 200):
    """Solve ln Gamma(x) = log_y for x on the increasing branch x >= alpha.

    Vectorised safeguarded Newton iteration (digamma as derivative) inside a
    shrinking bracket, bisecting whenever the Newton step leaves it.  Stops
    when ``|ln Gamma(x) - log_y| <= 1e-13 * max(1, |log_y|)`` or the bracket
    is narrower than ``1e-13 * x``.
    """
    scalar = np.ndim(log_y) == 0
    target = np.atleast_1d(np.asarray(log_y, dtype=float))
    floor = GAMMA_MIN.log_gamma_alpha
    if not np.all(np.isfinite(target)):
        raise DomainError("inverse_log_gamma requires finite input")
    if np.any(target < floor - 1e-15):
        raise DomainError(
            f"no increasing-branch preimage below ln Gamma(alpha) = {floor!r}"
        )
    target = np.maximum(target, floor)
    alpha = GAMMA_MIN.alpha

    x = _initial_inverse(target)
    lo = np.full_like(target, alpha)
    hi = np.maximum(2.0 * x, 3.0)
    grow = special.gammaln(hi) < target
    while np.any(grow):
        hi[grow] *= 2.0
        grow = special.gammaln(hi) < target

    ftol = 1e-13 * np.maximum(1.0, np.abs(target))
    done = np.zeros(target.shape, dtype=bool)
    for _ in range(max_iter):
        f = special.gammaln(x) - target
        done |= (np.abs(f) <= ftol) | (hi - lo <= 1e-13 * x)
        if np.all(done):
            break
        lo = np.where(f < 0.0, np.maximum(lo, x), lo)
        hi = np.where(f > 0.0, np.minimum(hi, x), hi)
        slope = _digamma_array(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            trial = x - f / slope
        bad = ~np.isfinite(trial) | (trial <= lo) | (trial >= hi)
        trial = np.where(bad, 0.5 * (lo + hi), trial)
        x = np.where(done, x, trial)
    # one polishing Newton step, kept only where it lowers the residual
    f = special.gammaln(x) - target
    with np.errstate(divide="ignore", invalid="ignore"):
        polished = x - f / _digamma_array(x)
    ok = np.isfinite(polished) & (polished >= alpha)
    polished = np.where(ok, polished, x)
    better = np.abs(special.gammaln(polished) - target) < np.abs(f)
    x = np.where(better, polished, x)
    if scalar:
        return float(x[0])
    return x.reshape(np.shape(log_y))


def inverse_gamma(y):
    """Increasing-branch inverse of Gamma: the unique x >= alpha with Gamma(x) = y.

    Raises DomainError for ``y < Gamma(alpha) ~ 0.8856``.
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(~(y_arr >= GAMMA_MIN.gamma_alpha)):
        raise DomainError(
            f"inverse_gamma requires y >= Gamma(alpha) = {GAMMA_MIN.gamma_alpha!r}"
        )
    return inverse_log_gamma(np.log(y_arr) if np.ndim(y) else math.log(float(y)))


# n! for n = 0..171; 171! exceeds the largest double so the table brackets
# every finite float argument
_FACTORIALS = tuple(math.factorial(n) for n in range(172))


def floor_inverse_gamma(t) -> int:
    """Integer part of the increasing-branch inverse Gamma at t >= 1.

    Returns the unique k >= 2 with Gamma(k) <= t < Gamma(k + 1), found by
    bracketing ``floor(t)`` in an exact integer factorial table so that
    breakpoints ``t = (k - 1)!`` classify exactly.
    """
    t = float(t)
    if not t >= 1.0 or math.isinf(t):
        raise DomainError(f"floor_inverse_gamma requires finite t >= 1, got {t!r}")
    # (k-1)! <= t  <=>  (k-1)! <= floor(t) for integer factorials
    j = bisect.bisect_right(_FACTORIALS, int(math.floor(t))) - 1
    return j + 1


def log_factorials(n_max: int) -> np.ndarray:
    """ln n! for n = 0..n_max; exact integer factorials while they fit in a double."""
    out = np.empty(n_max + 1)
    exact = min(n_max, 170)
    out[: exact + 1] = [math.log(_FACTORIALS[n]) for n in range(exact + 1)]
    if n_max > 170:
        out[171:] = special.gammaln(np.arange(171, n_max + 1) + 1.0)
    return out


def floor_inverse_gamma_log(log_t, table: np.ndarray | None = None):
    """Vectorised ``floor_inverse_gamma`` on ln t, for arguments past the float range.

    ``table`` is a precomputed ``log_factorials`` array long enough to bracket
    every input.
    """
    log_t = np.asarray(log_t, dtype=float)
    if np.any(log_t < 0.0):
        raise DomainError("floor_inverse_gamma_log requires ln t >= 0")
    if table is None:
        top = float(np.max(log_t)) if log_t.size else 0.0
        n = 2
        while special.gammaln(n + 1.0) <= top:
            n *= 2
        table = log_factorials(n)
    if log_t.size and table[-1] <= np.max(log_t):
        raise DomainError("log-factorial table too short for the requested arguments")
    # ln 0! = ln 1! = 0: side='right' lands past both so the result is >= 2
    j = np.searchsorted(table, log_t, side="right") - 1
    k = j + 1
    if k.ndim == 0:
        return int(k)
    return k
