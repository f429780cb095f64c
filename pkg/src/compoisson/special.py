"""Integer-nu representations of Z used as independent cross-checks.

* ``z_hypergeometric``: Z(lambda, nu) = 0F_nu(-; 1, ..., 1; lambda), summed by the
  Pochhammer term recurrence.  Structurally the same series as ``z_series``;
  its worth is as a wiring check of the hypergeometric formulation.
* ``z_bessel_nu2``: Z(lambda, 2) = I_0(2 sqrt(lambda)) by the Bessel ascending series.
* ``z_shmueli``: the (nu-1)-fold integral over [-pi, pi]^(nu-1) of
  exp{sum_j exp(i x_j) + lambda exp(-i sum_j x_j)} / (2 pi)^(nu-1),
  on a periodic trapezoid tensor grid.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DiagnosticError, DomainError, IterationCapError
from .params import ComPoissonParams, Method, QuadConfig, Rule, ZResult

__all__ = ["z_hypergeometric", "z_bessel_nu2", "z_shmueli", "shmueli_integrand"]

# keep the running term inside the double range by pulling out e^_RESCALE at a time
_RESCALE = 600


def _require_integer_nu(nu, allowed=None) -> int:
    nu_f = float(nu)
    if not nu_f.is_integer() or nu_f < 1:
        raise DomainError(f"nu must be a positive integer here, got {nu!r}")
    n = int(nu_f)
    if allowed is not None and n not in allowed:
        raise DomainError(f"nu must be one of {sorted(allowed)}, got {n}")
    return n


def z_hypergeometric(lam: float, nu: int, tol: float = 1e-15, max_terms: int = 1_000_000) -> ZResult:
    """Hypergeometric form of Z by term(n+1) = term(n) * lambda / (n+1)^nu.

    With (1)_n = n!, the standard-convention 0F_{nu-1}(-; 1,...,1; lambda) has
    n-th term lambda^n / (((1)_n)^(nu-1) n!) = lambda^n / (n!)^nu.  Counting the
    implicit n! as a further unit lower parameter gives nu of them in total.
    """
    nu = _require_integer_nu(nu)
    lam = ComPoissonParams(lam, nu).lam
    if lam == 0.0:
        return ZResult(Method.HYPERGEOMETRIC, 1.0, 0, 1, 0.0)
    term, total, exponent = 1.0, 1.0, 0
    for n in range(max_terms):
        pochhammer = float(n + 1) ** nu
        term *= lam / pochhammer
        total += term
        if total > math.exp(_RESCALE):
            scale = math.exp(-_RESCALE)
            term *= scale
            total *= scale
            exponent += _RESCALE
        q = lam / float(n + 2) ** nu
        if q < 1.0 and term * q / (1.0 - q) <= tol * total:
            bound = term * q / (1.0 - q)
            return ZResult(Method.HYPERGEOMETRIC, total, exponent, n + 2, bound)
    raise IterationCapError(f"0F{nu} series did not certify within {max_terms} terms")


def z_bessel_nu2(lam: float) -> float:
    """I_0(2 sqrt(lambda)) from sum_k (x/2)^(2k) / (k!)^2 with x = 2 sqrt(lambda)."""
    if not lam >= 0.0:
        raise DomainError(f"lambda must be >= 0, got {lam!r}")
    x = 2.0 * math.sqrt(lam)
    quarter = 0.25 * x * x
    term, total, k = 1.0, 1.0, 0
    # past k > x/2 the terms shrink by at least quarter/(k+1)^2 < 1/4 per step,
    # so stopping at term < eps * total leaves less than eps/3 behind
    while True:
        k += 1
        term *= quarter / (k * k)
        total += term
        if k > x and term < 1e-17 * total:
            return total


def shmueli_integrand(x: np.ndarray, lam: float) -> np.ndarray:
    """exp{sum_j e^{i x_j} + lambda e^{-i sum_j x_j}}, x shaped (..., nu-1)."""
    return np.exp(np.sum(np.exp(1j * x), axis=-1) + lam * np.exp(-1j * np.sum(x, axis=-1)))


def z_shmueli(lam: float, nu: int, quad: QuadConfig | None = None) -> ZResult:
    """Periodic trapezoid average of the Shmueli integrand, nu in {1, 2, 3}.

    nu = 1 has no integration variables and the exponent reduces to lambda.
    The imaginary part of the grid average must cancel; it is reported in
    ``diagnostics['imag']`` and a relative residual above 1e-8 raises.
    """
    nu = _require_integer_nu(nu, allowed={1, 2, 3})
    lam = ComPoissonParams(lam, nu).lam
    dims = nu - 1
    if dims == 0:
        return ZResult(Method.SHMUELI, math.exp(lam), 0, 0, None, diagnostics={"imag": 0.0})
    quad = quad or QuadConfig.shmueli(nu)
    if quad.rule is not Rule.TRAPEZOID_PERIODIC:
        raise DomainError("the Shmueli integral uses the periodic trapezoid rule")
    n = quad.nodes_per_dim
    grid = -math.pi + 2.0 * math.pi * np.arange(n) / n
    mesh = np.stack(np.meshgrid(*([grid] * dims), indexing="ij"), axis=-1)
    values = shmueli_integrand(mesh, lam)
    # trapezoid on a full period: plain average; the (2 pi)^dims factors cancel
    avg = complex(np.mean(values))
    value = avg.real
    if not value > 0.0 or abs(avg.imag) > 1e-8 * value:
        raise DiagnosticError(
            f"Shmueli grid average {avg!r} has a non-cancelling imaginary part"
        )
    return ZResult(
        Method.SHMUELI,
        value,
        0,
        terms_or_nodes=n**dims,
        error_bound=None,
        diagnostics={"imag": avg.imag},
    )
