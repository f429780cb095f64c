"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""

import csv
import io
import json
import math
import time
from fractions import Fraction

import mpmath
import numpy as np
from scipy import stats

from compoisson import (
    ComPoissonParams as P,
    PmfTable,
    QuadConfig,
    compute,
    compute_z,
    floor_inverse_gamma,
    inverse_gamma,
    log_gamma,
    moments,
    sample,
    z_bessel_nu2,
    z_cahen_exact,
    z_cahen_quad,
    z_series,
    z_series_tail_bound,
    z_shmueli,
)
from compoisson.cli import RunRecord, main
from compoisson.gamma import floor_inverse_gamma_log, log_factorials
from compoisson.params import ZResult

from conftest import ACCEPTANCE_LINES

LAMS_1 = [0.1, 0.5, 0.9, 1.1, 2.0, 5.0, 10.0]
NUS_1 = [0.2, 0.5, 1.0, 1.5, 2.0, 3.0]


def report(name, ok, detail):
    ACCEPTANCE_LINES.append((name, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, f"{name}: {detail}"


def run_cli(*argv):
    out = io.StringIO()
    return main(list(argv), out), out.getvalue()


def test_criterion_1_integral_grid():
    quad = QuadConfig.cahen(nodes=8, k_max=60)
    worst_exact = worst_quad = 0.0
    t0 = time.perf_counter()
    for lam in LAMS_1:
        for nu in NUS_1:
            p = P(lam, nu)
            ref = z_series(p)
            worst_exact = max(worst_exact, z_cahen_exact(p).rel_diff(ref))
            worst_quad = max(worst_quad, z_cahen_quad(p, quad).rel_diff(ref))
    elapsed = time.perf_counter() - t0
    ok = worst_exact <= 1e-12 and worst_quad <= 1e-9 and elapsed < 5.0
    report(
        "criterion 1 (integral form on grid)",
        ok,
        f"exact max rel {worst_exact:.2e} (<=1e-12), quad max rel {worst_quad:.2e} (<=1e-9), {elapsed:.2f} s (<5 s)",
    )


def test_criterion_2_poisson_degeneration():
    worst = {}
    for lam in np.geomspace(0.1, 20.0, 20):
        p = P(float(lam), 1.0)
        for method in compute.METHODS:
            r = compute_z(p, method)
            worst[method] = max(worst.get(method, 0.0), r.rel_diff(math.exp(lam)))
    ok = max(worst.values()) <= 1e-11
    detail = ", ".join(f"{m} {e:.1e}" for m, e in worst.items())
    report("criterion 2 (nu=1 gives e^lambda)", ok, f"max rel per method: {detail} (<=1e-11)")


def test_criterion_3_bessel_oracle():
    lams = np.concatenate([np.geomspace(0.01, 25.0, 60), [0.01, 25.0]])
    worst = max(abs(z_series(P(float(x), 2.0)).value / z_bessel_nu2(float(x)) - 1.0) for x in lams)
    report("criterion 3 (Bessel I0 oracle)", worst <= 1e-11, f"max rel {worst:.2e} over lambda in [0.01, 25] (<=1e-11)")


def test_criterion_4_shmueli():
    worst_rel = worst_imag = 0.0
    t0 = time.perf_counter()
    for lam in (0.25, 0.5, 1.0, 2.0):
        for nu in (2, 3):
            r = z_shmueli(lam, nu, QuadConfig.shmueli(nu, nodes=64))
            z = z_series(P(lam, nu)).value
            worst_rel = max(worst_rel, abs(r.value - z) / z)
            worst_imag = max(worst_imag, abs(r.diagnostics["imag"]) / r.value)
    elapsed = time.perf_counter() - t0
    ok = worst_rel <= 1e-8 and worst_imag <= 1e-10 and elapsed < 2.0
    report(
        "criterion 4 (Shmueli integral)",
        ok,
        f"max rel {worst_rel:.2e} (<=1e-8), imag residual {worst_imag:.2e} (<=1e-10), {elapsed:.2f} s (<2 s)",
    )


def test_criterion_5_inverse_gamma():
    y = np.geomspace(1.0, 1e15, 60)
    x = inverse_gamma(y)
    round_trip = float(np.max(np.abs(np.expm1(log_gamma(x) - np.log(y)))))
    at_factorials = max(abs(inverse_gamma(float(math.factorial(k - 1))) - k) for k in range(2, 19))

    breakpoints_ok = True
    for k in range(2, 172):
        t = float(math.factorial(k - 1))
        below = math.nextafter(t, 0.0)
        for v in (t, below):
            if v < 1.0:
                continue
            # oracle: exact rational comparison with the factorial table
            exact = next(j for j in range(2, 200) if Fraction(v) < math.factorial(j))
            breakpoints_ok &= floor_inverse_gamma(v) == exact
        if Fraction(t) == math.factorial(k - 1):
            breakpoints_ok &= floor_inverse_gamma(t) == k
    lf = log_factorials(3000)
    ks = np.arange(2, 3000)
    breakpoints_ok &= bool(np.all(floor_inverse_gamma_log(lf[ks - 1], lf) == ks))

    ok = round_trip <= 1e-11 and at_factorials <= 1e-9 and breakpoints_ok
    report(
        "criterion 5 (inverse Gamma)",
        ok,
        f"round-trip max rel {round_trip:.2e} (<=1e-11), |x-k| at (k-1)! max {at_factorials:.1e} (<=1e-9), "
        f"breakpoints exact: {breakpoints_ok}",
    )


def _true_tail(lam, nu, N, extra=200):
    with mpmath.workdps(50):
        lam_m, nu_m = mpmath.mpf(lam), mpmath.mpf(nu)
        t = mpmath.exp((N + 1) * mpmath.log(lam_m) - nu_m * mpmath.loggamma(N + 2))
        total = mpmath.mpf(0)
        for n in range(N + 1, N + 1 + extra):
            total += t
            t *= lam_m / mpmath.mpf(n + 1) ** nu_m
        return total


def test_criterion_6_tail_bound_soundness():
    # ratio precondition q = lambda/(N+2)^nu < 1, sampled with q <= 0.95
    rng = np.random.default_rng(20240611)
    violations, worst_ratio, count = 0, 0.0, 0
    while count < 200:
        lam = float(np.exp(rng.uniform(math.log(0.05), math.log(10.0))))
        nu = float(rng.uniform(0.3, 3.0))
        n_min = max(0, math.ceil((lam / 0.95) ** (1.0 / nu)) - 2)
        N = n_min + int(rng.integers(0, 20))
        if lam / (N + 2) ** nu > 0.95:
            continue
        bound = z_series_tail_bound(P(lam, nu), N)
        true = _true_tail(lam, nu, N)
        if true == 0:
            continue
        count += 1
        violations += int(mpmath.mpf(bound) < true)
        worst_ratio = max(worst_ratio, float(mpmath.mpf(bound) / true))
    ok = violations == 0 and worst_ratio <= 100.0
    report(
        "criterion 6 (tail-bound soundness)",
        ok,
        f"{count} triples, {violations} violations, max bound/true {worst_ratio:.2f} (<=100)",
    )


def test_criterion_7_continuity_at_one():
    decreasing = True
    worst_small = 0.0
    for nu in (0.5, 1.0, 2.0):
        target = z_series(P(1.0, nu))
        for sign in (1, -1):
            errs = [z_cahen_exact(P(1.0 + sign * d, nu)).rel_diff(target) for d in (1e-2, 1e-3, 1e-4)]
            decreasing &= errs[0] > errs[1] > errs[2]
            worst_small = max(worst_small, errs[2])
    routed = True
    for lam in (1.0, 1 + 1e-6, 1 - 1e-6, 1 + 5e-7, 1 - 1e-12):
        for method in ("cahen-exact", "cahen-quad"):
            r = compute_z(P(lam, 2.0), method)
            routed &= r.fallback and r.rel_diff(z_series(P(lam, 2.0))) == 0.0
    report(
        "criterion 7 (lambda=1 continuity)",
        decreasing and routed,
        f"error decreasing in delta: {decreasing} (delta=1e-4 rel {worst_small:.1e}), guard band routed: {routed}",
    )


def _chi_square(lam, nu, seed, count=100_000):
    p = P(lam, nu)
    table = PmfTable.build(p)
    draws = sample(p, seed, count)
    expected = table.probs * count
    # pool the upper tail into one bin with expected count >= 5
    last = int(np.flatnonzero(expected >= 5)[-1])
    observed = np.bincount(draws, minlength=len(expected))
    obs = np.append(observed[:last], observed[last:].sum())
    exp = np.append(expected[:last], count - expected[:last].sum())
    return stats.chisquare(obs, exp).pvalue


def test_criterion_8_distribution_layer():
    worst_norm = 0.0
    for lam in LAMS_1 + [1.0]:
        for nu in NUS_1:
            t = PmfTable.build(P(lam, nu))
            worst_norm = max(worst_norm, abs(t.total_mass + t.tail_mass_bound - 1.0))
    signs_ok = True
    for lam in (0.2, 0.7, 1.5, 4.0, 9.0):
        for nu in (0.25, 0.5, 0.75, 1.25, 2.5):
            mean, var = moments(P(lam, nu))
            signs_ok &= (var - mean) * (1.0 - nu) > 0 and abs(var - mean) > 1e-6 * mean
    pvalues = [_chi_square(0.5, 2.0, 101), _chi_square(3.0, 0.6, 202), _chi_square(8.0, 1.5, 303)]
    ok = worst_norm <= 1e-12 and signs_ok and min(pvalues) >= 0.001
    report(
        "criterion 8 (distribution layer)",
        ok,
        f"normalization max |err| {worst_norm:.1e} (<=1e-12), dispersion signs: {signs_ok}, "
        f"chi2 p-values {', '.join(f'{v:.3f}' for v in pvalues)} (>=0.001)",
    )


def test_criterion_9_cli_contract(monkeypatch):
    grid = ["--lambda-grid", ",".join(map(str, LAMS_1)), "--nu-grid", ",".join(map(str, NUS_1))]
    clean, _ = run_cli("compare", *grid)

    good = compute.METHODS["cahen-exact"]

    def corrupted(p, tol, quad):
        r = good(p, tol, quad)
        return ZResult(r.method, r.mantissa * (1 + 1e-6), r.exponent, r.terms_or_nodes, r.error_bound)

    with monkeypatch.context() as m:
        m.setitem(compute.METHODS, "cahen-exact", corrupted)
        breach, _ = run_cli("compare", *grid)

    round_trip = True
    for lam, nu, method in [(1.0, 1.0, "series"), (0.5, 2.0, "cahen-exact"), (10.0, 0.2, "cahen-quad"),
                            (4.0, 2.0, "hyper"), (1.0, 3.0, "shmueli")]:
        args = ["z", "--lambda", str(lam), "--nu", str(nu), "--method", method]
        _, text = run_cli(*args, "--format", "json")
        line = text.rstrip("\n")
        round_trip &= RunRecord.from_json(line).to_json() == line
        _, text = run_cli(*args, "--format", "csv")
        header, row = list(csv.reader(io.StringIO(text)))
        rebuilt = io.StringIO()
        csv.writer(rebuilt, lineterminator="\n").writerows([header, RunRecord.from_csv_row(row).csv_row()])
        round_trip &= rebuilt.getvalue() == text
        record = RunRecord.from_json(line)
        round_trip &= json.loads(line)["value"] == row[3] and record.value_decimal().is_finite()

    ok = clean == 0 and breach == 3 and round_trip
    report(
        "criterion 9 (CLI contract)",
        ok,
        f"compare exit {clean} (want 0), corrupted exit {breach} (want 3), JSON/CSV byte round-trip: {round_trip}",
    )
