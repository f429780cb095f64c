"""Method registry and dispatcher.

``compute_z`` routes the Cahen methods to the series fallback inside the
lambda ~ 1 guard band.  ``METHODS`` maps CLI method names to evaluators taking
``(params, tol, quad)``; tests patch entries to inject faults.
"""

from __future__ import annotations

from typing import Callable

from .cahen import z_cahen_exact, z_cahen_near_one, z_cahen_quad
from .errors import DomainError
from .params import ComPoissonParams, QuadConfig, ZResult, in_guard_band
from .series import DEFAULT_TOL, z_series
from .special import z_hypergeometric, z_shmueli

__all__ = ["METHODS", "ALIASES", "compute_z", "canonical_method", "applicable"]

Evaluator = Callable[[ComPoissonParams, float, "QuadConfig | None"], ZResult]


def _series(p, tol, quad):
    return z_series(p, tol)


def _cahen_exact(p, tol, quad):
    return z_cahen_exact(p, tol)


def _cahen_quad(p, tol, quad):
    return z_cahen_quad(p, quad)


def _hyper(p, tol, quad):
    return z_hypergeometric(p.lam, p.nu, tol)


def _shmueli(p, tol, quad):
    return z_shmueli(p.lam, p.nu, quad)


METHODS: dict[str, Evaluator] = {
    "series": _series,
    "cahen-exact": _cahen_exact,
    "cahen-quad": _cahen_quad,
    "hyper": _hyper,
    "shmueli": _shmueli,
}

ALIASES = {
    "cahen_exact": "cahen-exact",
    "cahen_quad": "cahen-quad",
    "hypergeometric": "hyper",
}

_GUARDED = {"cahen-exact", "cahen-quad"}


def canonical_method(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in METHODS:
        raise DomainError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return name


def applicable(method: str, params: ComPoissonParams) -> bool:
    """Whether ``method`` is defined at ``params`` (integer-nu restrictions)."""
    method = canonical_method(method)
    if method == "hyper":
        return params.integer_nu is not None
    if method == "shmueli":
        return params.integer_nu in (1, 2, 3)
    return True


def compute_z(
    params: ComPoissonParams,
    method: str = "series",
    tol: float | None = None,
    quad: QuadConfig | None = None,
) -> ZResult:
    method = canonical_method(method)
    tol = DEFAULT_TOL if tol is None else tol
    if not tol > 0.0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    if method in _GUARDED and in_guard_band(params.lam):
        return z_cahen_near_one(params, tol)
    if not applicable(method, params):
        raise DomainError(f"method {method!r} needs integer nu (1..3 for shmueli), got nu={params.nu}")
    return METHODS[method](params, tol, quad)
