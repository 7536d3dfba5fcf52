"""Acceptance checks shared by ``optoqht validate`` and the test suite.

Each ``check_<k>`` returns a :class:`CheckResult`. :func:`run_all` runs the
fidelity gates first, then the analytic limits, the figure presets, the
numerics (which sweep every preset) and the Monte Carlo calibration last.
"""
import functools
import math
import os
import time
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from .csl import CslParams, csl_delta
from .experiments import preset, run_scenario
from .fock import FockSpace, fock_fidelity, random_state
from .gaussian import (
    lyapunov_residual,
    lyapunov_steady_state,
    matrix_exponential,
    propagate_covariance,
    symplectic_form,
)
from .inference import (
    TestConfig,
    classical_bound,
    error_probability,
    gaussian_fidelity,
)
from .model import (
    InputNoiseSpec,
    SystemParams,
    diffusion_matrix,
    drift_matrix,
    initial_state,
    input_covariance,
    photon_to_squeezing,
)
from .montecarlo import McRun, empirical_error_rates

BOUND_TOL = 1e-9
MONOTONE_TOL = 1e-12
CSL_BAND = (10**5.5, 10**6.5)
ADVANTAGE_MARGIN = 0.01
NEAR_BOUND = 0.10
MC_TRIALS = 10**5
MC_SIGMAS = 4.0
MC_GRID = [(N, a, r) for N in (10, 100) for a in (0.01, 0.05) for r in (1.0, 1.5, 2.0, 10.0)]
THERMAL_PHOTONS = (0.0, 0.5, 1.0, 5.0)
FOCK_PAIRS = 50
FIDELITY_TOL = {"thermal": 1e-10, "fock": 1e-4, "self": 1e-12}
TIME_LIMITS = {1: 1.0, 2: 30.0, 3: 60.0, 8: 60.0}
PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8")


@dataclass
class CheckResult:
    criterion: int
    title: str
    passed: bool
    details: List[str]
    elapsed: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.criterion:2d}: {self.title} ({self.elapsed:.2f} s)"


class _Checker:
    def __init__(self):
        self.ok = True
        self.details = []

    def __call__(self, condition, message):
        condition = bool(condition)
        self.ok &= condition
        self.details.append(("ok   " if condition else "FAIL ") + message)
        return condition


_PRESET_CACHE = {}


def preset_result(name):
    """Run a preset once per process.

    Returns ``(result, seconds)`` where ``seconds`` is the cost of the original
    run if it came from the cache and 0 if it ran just now (the caller's own
    timer already covers it).
    """
    if name in _PRESET_CACHE:
        result, secs = _PRESET_CACHE[name]
        return result, secs
    t0 = time.perf_counter()
    result = run_scenario(preset(name))
    _PRESET_CACHE[name] = (result, time.perf_counter() - t0)
    return result, 0.0


def _series(result, **filters):
    return {k: result.column(k, **filters) for k in ("t_s", "V0", "V1", "F", "C", "Perr", "Q_pct")}


def _timed(criterion, title):
    def wrap(fn):
        @functools.wraps(fn)
        def inner():
            chk = _Checker()
            t0 = time.perf_counter()
            # preset runs are cached, so checks return the cost of a cached run
            extra = fn(chk) or 0.0
            elapsed = time.perf_counter() - t0 + extra
            limit = TIME_LIMITS.get(criterion)
            if limit is not None:
                chk(elapsed < limit, f"runtime {elapsed:.2f} s < {limit:g} s")
            return CheckResult(criterion, title, chk.ok, chk.details, elapsed)

        inner.criterion = criterion
        return inner

    return wrap


def thermal_fidelity_closed_form(n, n2):
    return 1.0 / (math.sqrt((n + 1.0) * (n2 + 1.0)) - math.sqrt(n * n2)) ** 2


@_timed(7, "fidelity gates: thermal closed form, Fock oracle, F(V,V)=1")
def check_7(chk):
    worst = 0.0
    for n in THERMAL_PHOTONS:
        for n2 in THERMAL_PHOTONS:
            F = gaussian_fidelity(np.eye(2) * (n + 0.5), np.eye(2) * (n2 + 0.5))
            worst = max(worst, abs(F - thermal_fidelity_closed_form(n, n2)))
    chk(worst <= FIDELITY_TOL["thermal"], f"thermal closed form max |dF| = {worst:.2e}")

    space = FockSpace()
    rng = np.random.default_rng(20240611)
    worst = 0.0
    for _ in range(FOCK_PAIRS):
        Va, Xa = random_state(rng, space)
        Vb, Xb = random_state(rng, space)
        worst = max(worst, abs(fock_fidelity(Xa, Xb) - gaussian_fidelity(Va, Vb)))
    chk(worst <= FIDELITY_TOL["fock"], f"Fock oracle ({FOCK_PAIRS} pairs, cutoff 40) max |dF| = {worst:.2e}")

    worst = 0.0
    for _ in range(FOCK_PAIRS):
        V = _random_cm(rng)
        worst = max(worst, abs(gaussian_fidelity(V, V) - 1.0))
    chk(worst <= FIDELITY_TOL["self"], f"F(V, V) max |F - 1| = {worst:.2e}")


def _random_cm(rng, modes=2):
    # Williamson form pushed through a random symplectic matrix
    omega = symplectic_form(modes)
    B = rng.normal(scale=0.4, size=(2 * modes, 2 * modes))
    S = matrix_exponential(omega @ (B + B.T))
    nu = np.repeat(rng.uniform(0.5, 5.0, modes), 2)
    V = S @ np.diag(nu) @ S.T
    return 0.5 * (V + V.T)


@_timed(10, "trivial limits: V1=V0, F=1, Delta=0")
def check_10(chk):
    worst = 0.0
    for N in (2, 10, 100, 1000):
        for alpha in (0.01, 0.05, 0.2):
            for V in (0.5, 1.0, 37.0):
                p = error_probability(TestConfig(N, alpha, V0=V, V1=V)).p_err
                worst = max(worst, abs(p - 0.5))
    chk(worst <= 1e-12, f"V1 = V0 gives P_err = 1/2, max dev {worst:.1e}")
    worst = max(abs(classical_bound(1.0, N) - 0.5) for N in (1, 10, 100, 10**6))
    chk(worst == 0.0, "F = 1 gives C = 1/2 exactly")

    cfg = preset("fig7").with_(deltas=(0.0,), name="delta0")
    result = run_scenario(cfg)
    F = np.array([r.F for r in result.rows])
    Q = np.array([r.Q_pct for r in result.rows])
    flagged = all("degenerate_hypotheses" in r.flags for r in result.rows)
    chk(np.max(np.abs(F - 1.0)) <= 1e-12, f"Delta = 0 gives F = 1, max |F - 1| = {np.max(np.abs(F - 1.0)):.1e}")
    chk(np.all(np.isnan(Q)) and flagged, "Delta = 0 rows carry Q = NaN and the degenerate flag")


@_timed(1, "CSL rate for the reference sphere in [10^5.5, 10^6.5]")
def check_1(chk):
    params = SystemParams()
    delta = csl_delta(CslParams(), params.omega_m)
    lo, hi = CSL_BAND
    chk(lo <= delta <= hi, f"Delta = {delta:.6g} (log10 {math.log10(delta):.3f}), band [{lo:.4g}, {hi:.4g}]")


@_timed(2, "classical protocol respects its bound (fig2)")
def check_2(chk):
    result, secs = preset_result("fig2")
    series = {n: _series(result, n1=n) for n in (10.0, 100.0)}
    for n, s in series.items():
        gap = np.min(s["Perr"] - s["C"])
        chk(gap >= -BOUND_TOL, f"n={n:g}: min(P_err - C) = {gap:.3e}")
    diff = np.min(series[100.0]["Perr"] - series[10.0]["Perr"])
    chk(diff >= -MONOTONE_TOL, f"P_err(n=100) - P_err(n=10) >= 0 pointwise, min {diff:.3e}")
    return secs


def _windows(mask):
    runs, start = [], None
    for i, m in enumerate(list(mask) + [False]):
        if m and start is None:
            start = i
        elif not m and start is not None:
            runs.append((start, i))
            start = None
    return runs


@_timed(3, "quantum advantage window at phi = pi (fig3)")
def check_3(chk):
    result, secs = preset_result("fig3")
    s = _series(result, phi_rad=math.pi)
    rel = (s["C"] - s["Perr"]) / s["C"]
    runs = _windows(rel >= ADVANTAGE_MARGIN)
    best = max(runs, key=lambda r: r[1] - r[0]) if runs else None
    if best:
        t0, t1 = s["t_s"][best[0]], s["t_s"][best[1] - 1]
        msg = f"window of {best[1] - best[0]} points, t in [{t0:.3g}, {t1:.3g}] s, peak margin {rel.max():.2%}"
    else:
        msg = f"no point with margin >= 1%, peak margin {rel.max():.3%}"
    chk(best is not None and best[1] - best[0] >= 2, msg)
    peaks = []
    for phi in (math.pi / 2, 5 * math.pi / 6, math.pi):
        s = _series(result, phi_rad=phi)
        peaks.append(float(np.max(s["C"] - s["Perr"])))
    chk(peaks[0] <= peaks[1] <= peaks[2], "max(C - P_err) over phi = pi/2, 5pi/6, pi: " + ", ".join(f"{p:.4g}" for p in peaks))
    return secs


@_timed(4, "no advantage for phi=0, TMS+local, thermal+EPR")
def check_4(chk):
    cases = (
        ("fig4", dict(), "phi = 0, q_plus"),
        ("fig5", dict(selector="x_out1"), "TMS + x_out1"),
        ("fig6", dict(), "thermal + q_plus"),
    )
    for name, filters, label in cases:
        result, _ = preset_result(name)
        s = _series(result, **filters)
        gap = np.min(s["Perr"] - s["C"])
        chk(gap >= -BOUND_TOL, f"{label}: min(P_err - C) = {gap:.3e}")


@_timed(5, "advantage across Delta (fig8)")
def check_5(chk):
    result, _ = preset_result("fig8")
    for delta in (1e4, 1e6, 1e7):
        s = _series(result, delta_rads=delta)
        chk(np.nanmax(s["Q_pct"]) > 0, f"Delta = {delta:.0e}: max Q = {np.nanmax(s['Q_pct']):.4g} %")
    s = _series(result, delta_rads=1e4)
    dev = np.max(np.abs(s["Perr"] - s["C"]) / s["C"])
    chk(dev <= NEAR_BOUND, f"Delta = 1e4: max |P_err - C| / C = {dev:.3e}")


@_timed(6, "sample-size monotonicity at phi = pi (fig5)")
def check_6(chk):
    result, _ = preset_result("fig5")
    s10 = _series(result, selector="q_plus", N=10)
    s100 = _series(result, selector="q_plus", N=100)
    d = np.max(s100["Perr"] - s10["Perr"])
    chk(d <= MONOTONE_TOL, f"P_err(N=100) - P_err(N=10) <= 0, max {d:.3e}")
    d = np.max(s100["C"] - s10["C"])
    chk(d <= MONOTONE_TOL, f"C(N=100) - C(N=10) <= 0, max {d:.3e}")


@_timed(9, "numerics: Lyapunov residual, midpoint composition, physicality")
def check_9(chk):
    params = SystemParams()
    A = drift_matrix(params)
    worst = 0.0
    specs = (
        InputNoiseSpec.vacuum(),
        InputNoiseSpec.thermal(100.0),
        InputNoiseSpec.two_mode_squeezed(photon_to_squeezing(100.0), math.pi),
    )
    for spec in specs:
        for delta in (0.0, 1e4, 1e6, 1e8):
            D = diffusion_matrix(params, delta, input_covariance(spec, params.kappa))
            sigma = lyapunov_steady_state(A, D)
            worst = max(worst, lyapunov_residual(A, sigma, D) / np.linalg.norm(D))
    chk(worst <= 1e-10, f"steady-state residual / ||D||_F = {worst:.2e}")

    worst = 0.0
    spec = specs[2]
    D = diffusion_matrix(params, 1e6, input_covariance(spec, params.kappa))
    sigma0 = initial_state(params, 1e6)
    for t in (1e-8, 1e-6, 1e-4, 1e-2, 1.0):
        full = propagate_covariance(A, D, sigma0, [0.0, t])[-1]
        mid = propagate_covariance(A, D, sigma0, [t / 2])[-1]
        two = propagate_covariance(A, D, mid, [t / 2])[-1]
        worst = max(worst, np.linalg.norm(two - full) / np.linalg.norm(full))
    chk(worst <= 1e-9, f"midpoint composition relative error {worst:.2e}")

    for name in PRESET_NAMES:
        result, _ = preset_result(name)
        low = min(r.min_eig_full for r in result.rows)
        chk(low >= -1e-9, f"{name}: min eigenvalue of sigma + i Omega / 2 = {low:.3e}")


@_timed(8, "Monte Carlo calibration of the chi-squared test")
def check_8(chk):
    workers = min(8, os.cpu_count() or 1)
    worst_i = worst_p = 0.0
    for k, (N, alpha, ratio) in enumerate(MC_GRID):
        cfg = TestConfig(N, alpha, V0=1.0, V1=ratio)
        exact = error_probability(cfg)
        emp = empirical_error_rates(McRun(MC_TRIALS, N, 1000 + k, cfg), workers=workers)
        se_i = math.sqrt(exact.type_i * (1 - exact.type_i) / MC_TRIALS)
        se_ii = math.sqrt(exact.type_ii * (1 - exact.type_ii) / MC_TRIALS)
        se_p = 0.5 * math.hypot(se_i, se_ii)
        z_i = abs(emp.type_i - exact.type_i) / se_i
        z_p = abs(emp.p_err - exact.p_err) / se_p
        worst_i, worst_p = max(worst_i, z_i), max(worst_p, z_p)
        chk(z_i <= MC_SIGMAS and z_p <= MC_SIGMAS,
            f"N={N} alpha={alpha} V1/V0={ratio:g}: type I {emp.type_i:.4f} ({z_i:.2f} se), "
            f"P_err {emp.p_err:.4f} vs {exact.p_err:.4f} ({z_p:.2f} se)")
    chk(True, f"worst deviations: type I {worst_i:.2f} se, P_err {worst_p:.2f} se")


ORDER = (check_7, check_10, check_1, check_2, check_3, check_4, check_5, check_6, check_9, check_8)
CHECKS: Dict[int, Callable[[], CheckResult]] = {fn.criterion: fn for fn in ORDER}


def run_all(report=print):
    results = []
    for fn in ORDER:
        res = fn()
        results.append(res)
        if report is not None:
            report(res.line())
            for d in res.details:
                report("    " + d)
    return results
