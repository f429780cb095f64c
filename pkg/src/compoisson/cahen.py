"""Single-integral representation of Z over the increasing-branch inverse Gamma.

    Z(lambda, nu) = 1/(1 - lambda) + nu/(lambda - 1) * I,
    I = int_1^inf x^-(nu+1) lambda^floor(Gamma^{-1}(x)) dx.

floor(Gamma^{-1}(x)) equals k on [Gamma(k), Gamma(k+1)) = [(k-1)!, k!), so the
integrand is a power law with constant weight lambda^k on each segment.
``z_cahen_exact`` integrates every segment in closed form;
``z_cahen_quad`` treats the integrand as a black box, finds the floor of the
inverse Gamma pointwise and applies Gauss-Legendre per segment.  Both are
indeterminate at lambda = 1 and refuse |lambda - 1| <= LAMBDA_ONE_GUARD;
``z_cahen_near_one`` is the series fallback used there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, GuardError, TailPolicyError
from .gamma import floor_inverse_gamma_log, inverse_log_gamma, log_factorials
from .params import LAMBDA_ONE_GUARD, ComPoissonParams, Method, QuadConfig, ZResult, in_guard_band
from .series import DEFAULT_TOL, MAX_TERMS, _grow_ladder, peak_index, z_series

__all__ = [
    "PiecewiseSegment",
    "segments",
    "z_cahen_exact",
    "z_cahen_quad",
    "z_cahen_near_one",
]

_EXPONENT_THRESHOLD = 500.0


@dataclass(frozen=True)
class PiecewiseSegment:
    """[lo, hi) = [(k-1)!, k!) on which the integrand weight is lambda^k."""

    k: int
    lo: float
    hi: float
    weight: float


def segments(lam: float, k_max: int) -> list[PiecewiseSegment]:
    """The first ``k_max`` segments k = 2..k_max+1 from the exact factorial table.

    Endpoints are exact integers converted to float, so ``hi(k) == lo(k+1)``.
    Only defined while k! fits in a double (k <= 170).
    """
    if k_max + 1 > 170:
        raise DomainError("linear-domain segments stop at k = 170; use the log-domain quadrature")
    facts = [math.factorial(n) for n in range(k_max + 2)]
    return [
        PiecewiseSegment(k, float(facts[k - 1]), float(facts[k]), lam**k)
        for k in range(2, k_max + 2)
    ]


def _check_guard(lam: float) -> None:
    if in_guard_band(lam):
        raise GuardError(
            f"|lambda - 1| = {abs(lam - 1.0):.3g} <= {LAMBDA_ONE_GUARD}: the 1/(1 - lambda) "
            "form is indeterminate here; use z_cahen_near_one or compute_z"
        )


def _assemble(lam: float, nu: float, integral: float, exponent: int) -> float:
    """Mantissa of Z = 1/(1 - lambda) + nu/(lambda - 1) * integral * e^exponent."""
    if exponent == 0:
        return (nu * integral - 1.0) / (lam - 1.0)
    # exponent > 0 only when lambda > 1 and the constant is below e^-500 relative
    return nu * integral / (lam - 1.0)


def z_cahen_exact(params: ComPoissonParams, tol: float = DEFAULT_TOL, max_terms: int = MAX_TERMS) -> ZResult:
    """Closed-form segment sum.

    nu * I = sum_{k>=2} lambda^k ((k-1)!^-nu - k!^-nu)
           = sum_{k>=2} lambda t(k-1) (1 - k^-nu),   t(n) = lambda^n / (n!)^nu,
    truncated once the remaining segments are certified below ``tol``.
    """
    lam, nu = params.lam, params.nu
    _check_guard(lam)
    if lam == 0.0:
        return ZResult(Method.CAHEN_EXACT, 1.0, 0, 0, 0.0)
    gap = abs(lam - 1.0)

    def segment_weights(ladder):
        n = np.arange(ladder.n_max + 1, dtype=float)
        w = np.zeros(ladder.n_max + 1)
        # index n holds segment k = n + 1; k >= 2
        w[1:] = np.exp(ladder.log_scaled[1:] + math.log(lam) + np.log(-np.expm1(-nu * np.log(n[1:] + 1.0))))
        return w

    # sum_{k > K} lambda t(k-1)(1 - k^-nu) <= lambda sum_{n >= K} t(n): the weights are
    # dominated termwise by lambda * t, so the same ratio certificate applies; the
    # relative target is shrunk by |lambda - 1| which the assembly divides by
    ladder, N, w = _grow_ladder(lam, nu, tol * min(1.0, gap) / max(lam, 1.0), max_terms, segment_weights)
    seg_sum = math.fsum(w[: N + 1])
    mantissa = _assemble(lam, nu, seg_sum / nu, ladder.exponent)
    q = float(ladder.ratio(N + 1))
    tail = lam * float(ladder.scaled[N + 1]) / (1.0 - q) / gap
    return ZResult(
        Method.CAHEN_EXACT,
        mantissa,
        ladder.exponent,
        terms_or_nodes=N,
        error_bound=tail,
        diagnostics={"segments": N},
    )


def _horizon(lam: float, nu: float, quad: QuadConfig, tol: float) -> tuple[int, float]:
    """Last segment index and the log of the certified bound on Z's error beyond it.

    Tail of nu*I past segment k_last is at most lambda * sum_{n >= k_last} t(n)
    <= lambda t(k_last) / (1 - lambda/(k_last+1)^nu).  Measured against the peak
    term t(m) <= Z, after the nu/|lambda-1| assembly factor.
    """
    log_lam = math.log(lam)
    m = peak_index(lam, nu, cap=quad.max_segments)
    log_peak = m * log_lam - nu * math.lgamma(m + 1)
    log_gap = math.log(abs(lam - 1.0))

    def log_tail(k_last: np.ndarray) -> np.ndarray:
        q = np.exp(log_lam - nu * np.log(k_last + 1.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (
                log_lam
                + k_last * log_lam
                - nu * gammaln(k_last + 1.0)
                - np.log1p(-np.minimum(q, 1.0))
                - log_gap
                - log_peak
            )
        return np.where(q < 1.0, out, np.inf)

    k_min = quad.tail_segments + 1
    if not quad.extend_horizon:
        if lam / (k_min + 1.0) ** nu >= 1.0:
            raise TailPolicyError(
                f"segment weights still growing at K_max={quad.tail_segments} "
                f"(peak near k={m}); raise K_max or enable extend_horizon"
            )
        return k_min, float(log_tail(np.array([float(k_min)]))[0]) + log_peak

    span = max(k_min, m + int(60.0 * math.sqrt((m + 1.0) / nu)) + 64)
    while True:
        ks = np.arange(k_min, span + 1, dtype=float)
        lt = log_tail(ks)
        ok = lt <= math.log(tol)
        if ok.any():
            idx = int(np.argmax(ok))
            return int(ks[idx]), float(lt[idx]) + log_peak
        if span >= quad.max_segments:
            raise TailPolicyError(
                f"no certified tail within {quad.max_segments} segments (lambda={lam}, nu={nu})"
            )
        span = min(2 * span, quad.max_segments)


def z_cahen_quad(
    params: ComPoissonParams, quad: QuadConfig | None = None, tol: float = 1e-13
) -> ZResult:
    """Segment-wise Gauss-Legendre quadrature of the black-box integrand.

    Each segment [ln (k-1)!, ln k!] is integrated in u = ln x, where the
    integrand becomes exp(-nu u) * lambda^floor(Gamma^{-1}(e^u)).  The floor is
    recomputed at every node (never taken from k), so a misclassified node
    shows up as a disagreement with ``z_cahen_exact``.
    """
    quad = quad or QuadConfig.cahen()
    lam, nu = params.lam, params.nu
    _check_guard(lam)
    if lam == 0.0:
        return ZResult(Method.CAHEN_QUAD, 1.0, 0, 0, 0.0)

    k_last, log_tail = _horizon(lam, nu, quad, tol)
    lf = log_factorials(k_last + 1)
    lo = lf[1:k_last]  # ln (k-1)!, k = 2..k_last
    hi = lf[2 : k_last + 1]  # ln k!
    xi, wi = np.polynomial.legendre.leggauss(quad.nodes_per_dim)
    half = 0.5 * (hi - lo)
    u = (0.5 * (hi + lo))[:, None] + half[:, None] * xi[None, :]

    if quad.classifier == "root":
        k_hat = np.floor(inverse_log_gamma(u.ravel())).reshape(u.shape)
    else:
        k_hat = floor_inverse_gamma_log(u.ravel(), lf).reshape(u.shape).astype(float)

    log_f = k_hat * math.log(lam) - nu * u
    anchor = float(np.max(log_f))
    exponent = int(math.floor(anchor)) if anchor > _EXPONENT_THRESHOLD else 0
    contrib = (half[:, None] * wi[None, :]) * np.exp(log_f - exponent)
    integral = math.fsum(contrib.ravel())
    mantissa = _assemble(lam, nu, integral, exponent)
    expected = np.arange(2, k_last + 1, dtype=float)[:, None]
    return ZResult(
        Method.CAHEN_QUAD,
        mantissa,
        exponent,
        terms_or_nodes=int(u.size),
        error_bound=math.exp(log_tail - exponent),
        diagnostics={
            "segments": k_last - 1,
            "misclassified_nodes": int(np.count_nonzero(k_hat != expected)),
        },
    )


def z_cahen_near_one(params: ComPoissonParams, tol: float = DEFAULT_TOL) -> ZResult:
    """Series fallback for |lambda - 1| within the guard band, tagged as such."""
    if not in_guard_band(params.lam):
        raise DomainError(
            f"z_cahen_near_one is for |lambda - 1| <= {LAMBDA_ONE_GUARD}, got lambda={params.lam}"
        )
    r = z_series(params, tol)
    return ZResult(
        Method.SERIES,
        r.mantissa,
        r.exponent,
        r.terms_or_nodes,
        r.error_bound,
        fallback=True,
    )
