"""Direct summation of Z(lambda, nu) = sum_n lambda^n / (n!)^nu with certified truncation.

The terms are unimodal in n with their peak near ``lambda**(1/nu)``.  They are
built as logarithms *relative to the peak term* (a short recurrence outward
from the peak, so the partial sums stay small and lose no digits), while the
peak term itself is evaluated once in extended precision.  Only that anchor
can be huge; it is split into an integer exponent carried by ``ZResult`` and a
fractional part folded into the mantissa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DomainError, IterationCapError
from .params import ComPoissonParams, Method, ZResult

__all__ = [
    "TermLadder",
    "peak_index",
    "certified_cutoff",
    "z_series",
    "z_series_direct",
    "z_series_tail_bound",
    "DEFAULT_TOL",
    "MAX_TERMS",
]

# below half an ulp of the partial sum: the truncation never shows in a printed double
DEFAULT_TOL = 1e-16
MAX_TERMS = 1_000_000

# anchors above this are carried in the integer exponent
_EXPONENT_THRESHOLD = 500.0


def peak_index(lam: float, nu: float, cap: int = MAX_TERMS) -> int:
    """Index of the largest term: floor(lambda**(1/nu)), or 0 for lambda <= 1."""
    if lam <= 1.0:
        return 0
    x = math.log(lam) / nu
    if x > math.log(cap):
        raise IterationCapError(
            f"term peak near n = exp({x:.4g}) exceeds the {cap}-term cap"
        )
    return int(math.floor(math.exp(x)))


@dataclass(frozen=True)
class TermLadder:
    """Terms t(n) = lambda^n / (n!)^nu for n = 0..n_max, scaled by exp(-exponent)."""

    lam: float
    nu: float
    peak: int
    exponent: int
    log_scaled: np.ndarray

    @classmethod
    def build(cls, lam: float, nu: float, n_max: int) -> "TermLadder":
        if not lam > 0.0:
            raise DomainError("TermLadder needs lambda > 0")
        m = min(peak_index(lam, nu, cap=max(n_max, MAX_TERMS)), n_max)
        with mpmath.workdps(34):
            anchor = m * mpmath.log(lam) - nu * mpmath.loggamma(m + 1)
            exponent = int(mpmath.floor(anchor)) if anchor > _EXPONENT_THRESHOLD else 0
            base = float(anchor - exponent)
        steps = math.log(lam) - nu * np.log(np.arange(1, n_max + 1, dtype=float))
        rel = np.empty(n_max + 1)
        rel[m] = 0.0
        rel[m + 1 :] = np.cumsum(steps[m:])
        if m > 0:
            rel[:m] = -np.cumsum(steps[m - 1 :: -1])[::-1]
        return cls(lam=lam, nu=nu, peak=m, exponent=exponent, log_scaled=base + rel)

    @property
    def n_max(self) -> int:
        return len(self.log_scaled) - 1

    @property
    def scaled(self) -> np.ndarray:
        return np.exp(self.log_scaled)

    def ratio(self, n) -> np.ndarray:
        """t(n + 1) / t(n) = lambda / (n + 1)^nu."""
        return np.exp(math.log(self.lam) - self.nu * np.log(np.asarray(n, dtype=float) + 1.0))


def certified_cutoff(ladder: TermLadder, rtol: float, weights=None) -> int | None:
    """Smallest N whose geometric tail bound is at most ``rtol`` times the partial sum.

    The bound is ``u(N + 1) / (1 - q)`` with ``q`` the term ratio at N + 1,
    valid because the ratio ``lambda / (n + 1)^nu`` is nonincreasing in n.
    ``weights`` replaces the raw scaled terms when given; the caller is
    responsible for it being dominated by the same ratio argument.
    """
    u = ladder.scaled if weights is None else weights
    n = np.arange(len(u) - 1)
    q = ladder.ratio(n + 1)
    partial = np.cumsum(u)[:-1]
    with np.errstate(divide="ignore"):
        bound = np.where(q < 1.0, u[1:] / (1.0 - q), np.inf)
    ok = (q < 1.0) & (bound <= rtol * partial)
    if not ok.any():
        return None
    return int(np.argmax(ok))


def tail_bound_scaled(ladder: TermLadder, N: int, u=None) -> float:
    u = ladder.scaled if u is None else u
    q = float(ladder.ratio(N + 1))
    return float(u[N + 1] / (1.0 - q))


def _grow_ladder(lam: float, nu: float, rtol: float, max_terms: int, weights=None):
    m = peak_index(lam, nu, cap=max_terms)
    n_max = min(max_terms, m + int(40.0 * math.sqrt((m + 1.0) / nu)) + 64)
    while True:
        ladder = TermLadder.build(lam, nu, n_max)
        u = None if weights is None else weights(ladder)
        N = certified_cutoff(ladder, rtol, u)
        if N is not None:
            return ladder, N, u
        if n_max >= max_terms:
            raise IterationCapError(
                f"no certified truncation within {max_terms} terms (lambda={lam}, nu={nu}, tol={rtol})"
            )
        n_max = min(2 * n_max, max_terms)


def z_series(
    params: ComPoissonParams, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS
) -> ZResult:
    """Z by forward summation up to the first certified truncation point.

    The returned ``error_bound`` is the geometric tail bound, and is at most
    ``tol`` times the returned value.
    """
    if not tol > 0.0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    if params.lam == 0.0:
        return ZResult(Method.SERIES, 1.0, 0, 1, 0.0)
    ladder, N, _ = _grow_ladder(params.lam, params.nu, tol, max_terms)
    s = ladder.scaled
    total = math.fsum(s[: N + 1])
    return ZResult(
        Method.SERIES,
        total,
        ladder.exponent,
        terms_or_nodes=N + 1,
        error_bound=tail_bound_scaled(ladder, N),
    )


def z_series_direct(params: ComPoissonParams, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS) -> float:
    """Plain float summation by the term recurrence, no log-space rebasing.

    Only meaningful where every term is representable; used to cross-check the
    rebased path.
    """
    lam, nu = params.lam, params.nu
    term, total = 1.0, 1.0
    for n in range(max_terms):
        q = lam / (n + 2) ** nu
        term *= lam / (n + 1) ** nu
        total += term
        if not math.isfinite(total):
            raise OverflowError("direct summation overflowed; use z_series")
        if q < 1.0 and term * q / (1.0 - q) <= tol * total:
            return total
    raise IterationCapError(f"direct summation did not certify within {max_terms} terms")


def z_series_tail_bound(params: ComPoissonParams, N: int) -> float:
    """Bound on sum_{n > N} lambda^n / (n!)^nu by geometric domination.

    ``B = t(N + 1) / (1 - q)`` with ``q = lambda / (N + 2)^nu``; requires q < 1.
    """
    lam, nu = params.lam, params.nu
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    if lam == 0.0:
        return 0.0
    q = lam / (N + 2) ** nu
    if not q < 1.0:
        raise DomainError(
            f"tail not certifiable at N={N}: ratio lambda/(N+2)^nu = {q:.6g} >= 1"
        )
    log_term = (N + 1) * math.log(lam) - nu * math.lgamma(N + 2)
    return math.exp(log_term - math.log1p(-q))
