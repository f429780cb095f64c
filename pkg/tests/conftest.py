import math

import mpmath
from hypothesis import settings

# numerical cases run long on first call (mpmath anchors, table builds)
settings.register_profile("numeric", deadline=None)
settings.load_profile("numeric")

# (criterion, verdict, detail) rows collected by test_acceptance.py
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def mp_log_z(lam, nu, dps=40):
    """ln Z(lam, nu) to ``dps`` digits, summed outward from the largest term."""
    with mpmath.workdps(dps):
        lam_m, nu_m = mpmath.mpf(lam), mpmath.mpf(nu)
        m = int(math.floor(float(lam) ** (1.0 / float(nu)))) if lam > 0 else 0
        log_peak = m * mpmath.log(lam_m) - nu_m * mpmath.loggamma(m + 1)
        total = mpmath.mpf(1)
        eps = mpmath.mpf(10) ** (-dps - 5)
        t, n = mpmath.mpf(1), m
        while True:
            n += 1
            t *= lam_m / mpmath.mpf(n) ** nu_m
            total += t
            if t < eps * total:
                break
        t, n = mpmath.mpf(1), m
        while n > 0:
            t *= mpmath.mpf(n) ** nu_m / lam_m
            n -= 1
            total += t
            if t < eps * total:
                break
        return log_peak + mpmath.log(total)


def mp_z(lam, nu, dps=40):
    with mpmath.workdps(dps):
        return mpmath.exp(mp_log_z(lam, nu, dps))


def rel_to_oracle(result, lam, nu):
    """Relative error of a ZResult against the mpmath value, safe beyond double range."""
    with mpmath.workdps(40):
        log_true = mp_log_z(lam, nu)
        got = mpmath.log(result.mantissa) + result.exponent
        return float(abs(mpmath.expm1(got - log_true)))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
