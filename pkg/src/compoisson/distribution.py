"""COM-Poisson distribution: P(X = n) = lambda^n / (Z (n!)^nu), n >= 0."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .compute import compute_z
from .errors import DomainError, IterationCapError
from .params import ComPoissonParams, ZResult
from .series import MAX_TERMS, TermLadder, _grow_ladder, peak_index

__all__ = ["PmfTable", "pmf", "log_pmf", "cdf", "quantile", "sample", "moments"]

# certified tail mass at the support truncation point
SUPPORT_TAIL = 1e-15


@dataclass(frozen=True, eq=False)
class PmfTable:
    """Probabilities for n = 0..support_max plus a certified bound on the mass beyond."""

    params: ComPoissonParams
    support_max: int
    probs: np.ndarray
    tail_mass_bound: float
    z: ZResult

    @classmethod
    def build(
        cls,
        params: ComPoissonParams,
        method: str = "series",
        tail: float = SUPPORT_TAIL,
        min_support: int = 0,
    ) -> "PmfTable":
        """Table truncated at the smallest N whose certified tail mass is <= ``tail``.

        ``method`` picks the evaluator that normalizes the table.
        """
        z = compute_z(params, method)
        if params.lam == 0.0:
            probs = np.zeros(max(min_support, 0) + 1)
            probs[0] = 1.0
            return cls(params, len(probs) - 1, probs, 0.0, z)
        ladder, N, _ = _grow_ladder(params.lam, params.nu, tail * 1e-3, MAX_TERMS)
        if min_support + 2 > ladder.n_max:
            ladder = TermLadder.build(params.lam, params.nu, min_support + 2)
        log_s = ladder.log_scaled
        # log Z in the ladder's scaling
        log_z = math.log(z.mantissa) + (z.exponent - ladder.exponent)
        log_p = log_s - log_z
        bounds = _tail_bounds(ladder, np.exp(log_p))
        ok = np.flatnonzero(bounds <= tail)
        N = max(int(ok[0]) if ok.size else N, min_support)
        probs = np.exp(log_p[: N + 1])
        return cls(params, N, probs, float(bounds[N]), z)

    @functools.cached_property
    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probs)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.probs)


def _tail_bounds(ladder: TermLadder, p: np.ndarray) -> np.ndarray:
    n = np.arange(len(p) - 1)
    q = ladder.ratio(n + 1)
    with np.errstate(divide="ignore"):
        return np.where(q < 1.0, p[1:] / (1.0 - q), np.inf)


@functools.lru_cache(maxsize=64)
def _table(params: ComPoissonParams, method: str = "series") -> PmfTable:
    return PmfTable.build(params, method)


def log_pmf(params: ComPoissonParams, n: int, method: str = "series") -> float:
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    n = int(n)
    z = _table(params, method).z
    if params.lam == 0.0:
        return 0.0 if n == 0 else -math.inf
    return n * math.log(params.lam) - params.nu * math.lgamma(n + 1) - z.log_value


def pmf(params: ComPoissonParams, n: int, method: str = "series") -> float:
    """lambda^n / ((n!)^nu Z), from the log-space formula at any n."""
    return math.exp(log_pmf(params, n, method))


def cdf(params: ComPoissonParams, n: int, method: str = "series") -> float:
    if n < 0:
        return 0.0
    table = _table(params, method)
    if n <= table.support_max:
        return float(min(table.cdf[n], 1.0))
    return float(min(table.cdf[-1] + math.fsum(pmf(params, k, method) for k in range(table.support_max + 1, n + 1)), 1.0))


def _extended(table: PmfTable, u_max: float) -> PmfTable:
    """Extend the table until its cdf covers u_max or the term cap is hit."""
    support = table.support_max
    tail = SUPPORT_TAIL
    while table.cdf[-1] < u_max:
        support = 2 * support + 16
        tail *= 1e-3
        if support > MAX_TERMS:
            raise IterationCapError(f"quantile {u_max!r} lies in the uncertified tail past {MAX_TERMS} terms")
        table = PmfTable.build(table.params, tail=tail, min_support=support)
    return table


def quantile(params: ComPoissonParams, u, method: str = "series"):
    """min{n : cdf(n) >= u} for u in [0, 1); vectorised over array ``u``."""
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr < 0.0) | (u_arr >= 1.0)):
        raise DomainError("quantile needs u in [0, 1)")
    table = _table(params, method)
    if u_arr.size and table.cdf[-1] < u_arr.max():
        table = _extended(table, float(u_arr.max()))
    idx = np.searchsorted(table.cdf, u_arr, side="left")
    if np.ndim(u) == 0:
        return int(idx)
    return idx


def sample(params: ComPoissonParams, rng, count: int, method: str = "series") -> np.ndarray:
    """``count`` draws by exact inversion of the cdf table.

    ``rng`` is a ``numpy.random.Generator`` or an integer seed.
    """
    if count < 0:
        raise DomainError(f"count must be >= 0, got {count}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return np.asarray(quantile(params, rng.random(count), method), dtype=np.int64)


def moments(params: ComPoissonParams, tol: float = 1e-16) -> tuple[float, float]:
    """(mean, variance) by series, truncated where the n^2-weighted tail is certified below tol.

    The ratio of n^2 t(n) is ((n+1)/n)^2 lambda/(n+1)^nu, nonincreasing in n, so the
    geometric tail argument of ``z_series_tail_bound`` carries over; the same
    bound dominates the zeroth and first moment tails.
    """
    if params.lam == 0.0:
        return 0.0, 0.0
    lam, nu = params.lam, params.nu
    m = peak_index(lam, nu)
    n_max = min(MAX_TERMS, m + int(40.0 * math.sqrt((m + 1.0) / nu)) + 64)
    while True:
        ladder = TermLadder.build(lam, nu, n_max)
        s = ladder.scaled
        n = np.arange(n_max + 1, dtype=float)
        w = n * n * s
        j = n[:-1]
        rho = ((j + 2.0) / (j + 1.0)) ** 2 * ladder.ratio(j + 1.0)
        with np.errstate(divide="ignore"):
            bound = np.where(rho < 1.0, w[1:] / (1.0 - rho), np.inf)
        ok = (rho < 1.0) & (bound <= tol * np.maximum(np.cumsum(w)[:-1], s[0]))
        if ok.any():
            N = int(np.argmax(ok))
            break
        if n_max >= MAX_TERMS:
            raise IterationCapError(f"moment series did not certify within {MAX_TERMS} terms")
        n_max = min(2 * n_max, MAX_TERMS)
    total = math.fsum(s[: N + 1])
    mean = math.fsum(n[: N + 1] * s[: N + 1]) / total
    var = math.fsum((n[: N + 1] - mean) ** 2 * s[: N + 1]) / total
    return mean, var
