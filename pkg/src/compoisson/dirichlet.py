"""Dirichlet series sum_n a_n exp(-r b_n) and their Laplace-integral (Cahen) form.

For increasing exponents b_n the series equals ``r * int_0^inf exp(-r x) A(x) dx``
with ``A(x) = sum_{n: b_n <= x} a_n``.  ``A`` is a step function, so the integral
over any finite horizon is a finite sum of closed-form pieces; nothing here
uses blind quadrature.

The coefficient, exponent and inverse callables must be side-effect free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import ConvergenceError, DomainError
from .gamma import floor_inverse_gamma_log, log_factorials

__all__ = [
    "DirichletSeries",
    "CahenSum",
    "partial_sum",
    "cahen_evaluate",
    "ratio_tail",
    "compoisson_dirichlet",
]


@dataclass(frozen=True)
class DirichletSeries:
    coefficient: Callable[[int], float]
    exponent: Callable[[int], float]
    exponent_inverse: Callable[[float], int]

    def validate(self, n_max: int = 30) -> None:
        """Check monotone exponents and a consistent inverse on the first n_max terms."""
        prev = -math.inf
        for n in range(1, n_max + 1):
            b = self.exponent(n)
            if not b > prev:
                raise DomainError(f"exponents not strictly increasing at n={n}")
            if self.exponent_inverse(b) != n:
                raise DomainError(f"exponent_inverse(b_{n}) = {self.exponent_inverse(b)} != {n}")
            prev = b


@dataclass(frozen=True)
class CahenSum:
    """Result of ``cahen_evaluate``.

    ``integral`` is r * int_0^T exp(-r x) A(x) dx, ``boundary`` is A(T) exp(-r T)
    (the part of the remaining integral carried by terms already counted) and
    ``tail`` the estimate for the terms with b_n > T.
    """

    integral: float
    boundary: float
    tail: float
    steps: int

    @property
    def value(self) -> float:
        return self.integral + self.boundary + self.tail

    @property
    def truncated(self) -> float:
        return self.integral + self.boundary

    def __float__(self) -> float:
        return self.value


def partial_sum(D: DirichletSeries, x: float) -> float:
    """A(x) = sum of a_n over b_n <= x (closed at the jump points)."""
    N = D.exponent_inverse(x)
    if N < 1:
        return 0.0
    return math.fsum(D.coefficient(n) for n in range(1, N + 1))


def ratio_tail(D: DirichletSeries, r: float, N: int) -> float:
    """Tail estimate u/(1 - q) from the first two omitted terms u_{N+1}, u_{N+2}.

    Not rigorous: it assumes the terms are eventually ratio-bounded by q.
    """
    u1 = D.coefficient(N + 1) * math.exp(-r * D.exponent(N + 1))
    if u1 == 0.0:
        return 0.0
    u2 = D.coefficient(N + 2) * math.exp(-r * D.exponent(N + 2))
    q = abs(u2 / u1)
    if not q < 1.0:
        raise ConvergenceError(
            f"terms not decaying past the horizon (ratio {q:.4g} >= 1): coefficients outgrow exp(-r b_n)"
        )
    return u1 / (1.0 - q)


def cahen_evaluate(
    D: DirichletSeries,
    r: float,
    T: float,
    tail_policy: Callable[[DirichletSeries, float, int], float] = ratio_tail,
) -> CahenSum:
    """Evaluate the Dirichlet series at real r > 0 through its Laplace integral up to T.

    The integral over [0, T] is the exact step sum
    ``sum_n A(b_n) (exp(-r b_n) - exp(-r min(b_{n+1}, T)))``.
    """
    if not r > 0.0:
        raise DomainError(f"r must be > 0 on the real axis, got {r!r}")
    N = max(D.exponent_inverse(T), 0)
    pieces = []
    running = 0.0
    for n in range(1, N + 1):
        running += D.coefficient(n)
        left = D.exponent(n)
        right = min(D.exponent(n + 1), T)
        # r * int_left^right exp(-r x) dx, written to keep digits when right ~ left
        pieces.append(running * math.exp(-r * left) * -math.expm1(-r * (right - left)))
    integral = math.fsum(pieces)
    boundary = running * math.exp(-r * T) if N >= 1 else 0.0
    return CahenSum(integral, boundary, tail_policy(D, r, N), N)


def compoisson_dirichlet(lam: float) -> DirichletSeries:
    """a_n = lambda^(n-1), b_n = ln Gamma(n + 2): then Z = 1 + lambda + lambda^2 D(nu)."""

    table = log_factorials(4096)

    def exponent(n: int) -> float:
        return float(table[n + 1]) if n + 1 < len(table) else math.lgamma(n + 2)

    def inverse(x: float) -> int:
        # largest n with Gamma(n + 2) <= e^x, i.e. floor(Gamma^{-1}(e^x)) - 2,
        # bracketed in the same table that defines the exponents
        if x < 0.0:
            return 0
        return floor_inverse_gamma_log(x, table) - 2

    return DirichletSeries(
        coefficient=lambda n: lam ** (n - 1),
        exponent=exponent,
        exponent_inverse=inverse,
    )
