"""Parameter, result and quadrature-configuration types."""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, field

import mpmath

from .errors import DomainError

__all__ = ["ComPoissonParams", "Method", "ZResult", "QuadConfig", "Rule", "LAMBDA_ONE_GUARD", "in_guard_band"]

# |lambda - 1| at or below this routes the Cahen evaluators to the series
LAMBDA_ONE_GUARD = 1e-6


def in_guard_band(lam: float) -> bool:
    """|lambda - 1| <= LAMBDA_ONE_GUARD, counting decimal inputs such as 1 + 1e-6 as inside."""
    # 1 + 1e-6 is stored about 3e-17 above the band edge
    return abs(lam - 1.0) <= LAMBDA_ONE_GUARD + 4 * sys.float_info.epsilon


@dataclass(frozen=True)
class ComPoissonParams:
    """The pair (lambda, nu).

    ``lam == 0`` is accepted as a boundary case (Z = 1); everything else
    requires ``lam > 0`` and ``nu > 0``.
    """

    lam: float
    nu: float

    def __post_init__(self):
        lam, nu = float(self.lam), float(self.nu)
        if not (math.isfinite(lam) and lam >= 0.0):
            raise DomainError(f"lambda must be finite and >= 0, got {self.lam!r}")
        if not (math.isfinite(nu) and nu > 0.0):
            raise DomainError(f"nu must be finite and > 0, got {self.nu!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "nu", nu)

    @property
    def integer_nu(self) -> int | None:
        """nu as an int when it is integral, else None."""
        return int(self.nu) if self.nu.is_integer() else None


class Method(str, enum.Enum):
    SERIES = "series"
    CAHEN_EXACT = "cahen_exact"
    CAHEN_QUAD = "cahen_quad"
    HYPERGEOMETRIC = "hypergeometric"
    SHMUELI = "shmueli"


@dataclass(frozen=True)
class ZResult:
    """A computed Z(lambda, nu) stored as ``mantissa * exp(exponent)``.

    ``exponent`` is an integer and is 0 whenever the value fits comfortably in
    a double; it is nonzero only for values near or past the overflow
    threshold.  ``error_bound`` is an absolute bound on the truncation error in
    the same scaling, i.e. the bound on Z itself is ``error_bound * exp(exponent)``.
    ``fallback`` marks results routed to the series by the lambda ~ 1 guard.
    """

    method: Method
    mantissa: float
    exponent: int = 0
    terms_or_nodes: int = 0
    error_bound: float | None = None
    fallback: bool = False
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.mantissa) and self.mantissa > 0.0):
            raise DomainError(f"Z mantissa must be finite and positive, got {self.mantissa!r}")
        if self.error_bound is not None and not (
            math.isfinite(self.error_bound) and self.error_bound >= 0.0
        ):
            raise DomainError(f"error bound must be finite and >= 0, got {self.error_bound!r}")

    @property
    def log_value(self) -> float:
        return self.exponent + math.log(self.mantissa)

    @property
    def value(self) -> float:
        """Z as a float; raises OverflowError rather than saturating to inf."""
        if self.exponent == 0:
            return self.mantissa
        if not self.representable:
            raise OverflowError(
                f"Z = {self.mantissa!r} * e**{self.exponent} exceeds the double range; "
                "use log_value or decimal_string()"
            )
        return self.mantissa * math.exp(self.exponent)

    @property
    def representable(self) -> bool:
        return self.log_value < 709.78

    def scaled_to(self, exponent: int) -> float:
        """The value expressed in units of ``exp(exponent)``."""
        return self.mantissa * math.exp(self.exponent - exponent)

    def rel_diff(self, other: "ZResult | float") -> float:
        """|self - other| / |other|, computed without leaving the scaled representation."""
        if not isinstance(other, ZResult):
            other = ZResult(Method.SERIES, float(other))
        ratio = (self.mantissa / other.mantissa) * math.exp(self.exponent - other.exponent)
        return abs(ratio - 1.0)

    def abs_error_bound(self) -> float | None:
        if self.error_bound is None:
            return None
        return self.error_bound * math.exp(self.exponent)

    def decimal_string(self, digits: int = 17) -> str:
        """Value as a decimal string with ``digits`` significant digits."""
        return scaled_decimal(self.mantissa, self.exponent, digits)

    def error_bound_string(self, digits: int = 17) -> str | None:
        if self.error_bound is None:
            return None
        return scaled_decimal(self.error_bound, self.exponent, digits)


def scaled_decimal(mantissa: float, exponent: int, digits: int = 17) -> str:
    """Decimal string of ``mantissa * e**exponent``, exact to ``digits`` places past the double range."""
    if mantissa == 0.0:
        return "0"
    if exponent == 0 or exponent + math.log(mantissa) < 709.0:
        return format(mantissa * math.exp(exponent), f".{digits}g")
    with mpmath.workdps(digits + 10):
        z = mpmath.mpf(mantissa) * mpmath.exp(exponent)
        return mpmath.nstr(z, digits, min_fixed=1, max_fixed=0, strip_zeros=False)


class Rule(str, enum.Enum):
    TRAPEZOID_PERIODIC = "trapezoid_periodic"
    GAUSS_LEGENDRE = "gauss_legendre"


@dataclass(frozen=True)
class QuadConfig:
    """Grid metadata for the Shmueli tensor grid and the per-segment Cahen quadrature.

    For the Cahen integral ``nodes_per_dim`` is the Gauss order per segment and
    ``tail_segments`` the segment horizon K_max.  With ``extend_horizon`` the
    horizon grows past K_max until the certified tail is below tolerance;
    without it, a horizon that ends before the decaying regime is an error.
    ``classifier`` selects how the integrand finds floor(Gamma^{-1}(x)):
    ``"root"`` floors the Newton root of ln Gamma, ``"table"`` brackets in the
    log-factorial table.
    """

    nodes_per_dim: int = 8
    dims: int = 0
    rule: Rule = Rule.GAUSS_LEGENDRE
    tail_segments: int = 60
    extend_horizon: bool = True
    classifier: str = "root"
    max_segments: int = 2_000_000

    def __post_init__(self):
        if self.nodes_per_dim < 4:
            raise DomainError(f"nodes_per_dim must be >= 4, got {self.nodes_per_dim}")
        if self.dims < 0:
            raise DomainError(f"dims must be >= 0, got {self.dims}")
        if self.tail_segments < 1:
            raise DomainError(f"tail_segments must be >= 1, got {self.tail_segments}")
        if self.classifier not in ("root", "table"):
            raise DomainError(f"unknown classifier {self.classifier!r}")
        object.__setattr__(self, "rule", Rule(self.rule))

    @classmethod
    def cahen(cls, nodes: int = 8, k_max: int = 60, **kw) -> "QuadConfig":
        return cls(nodes_per_dim=nodes, dims=0, rule=Rule.GAUSS_LEGENDRE, tail_segments=k_max, **kw)

    @classmethod
    def shmueli(cls, nu: int, nodes: int = 64) -> "QuadConfig":
        return cls(nodes_per_dim=nodes, dims=nu - 1, rule=Rule.TRAPEZOID_PERIODIC)
