"""Protocol orchestration: preparation, evolution, readout statistics, bounds.

For every sweep point the two hypotheses are evolved from their own
preparation states (H0 without extra heating, H1 with it), the selected
output variances enter the chi-squared error probability, and the classical
bound is computed from thermal input with the same photons per mode.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ..errors import NumericalError, StabilityError
from ..gaussian import check_physicality, propagate_covariance, require_hurwitz
from ..inference import (
    classical_bound,
    error_probability_from_variances,
    gaussian_fidelity,
    quantum_advantage,
)
from ..model import (
    InputNoiseSpec,
    NoiseKind,
    diffusion_matrix,
    drift_matrix,
    initial_state,
    input_covariance,
    output_two_mode_cm,
    output_variance,
    photon_to_squeezing,
)

FLAG_DEGENERATE = "degenerate_hypotheses"
FLAG_UNPHYSICAL_OUTPUT = "output_cm_unphysical"


@dataclass
class SweepRow:
    t_s: float
    selector: str
    phi_rad: float
    delta_rads: float
    n1: float
    n2: float
    N: int
    alpha: float
    V0: float
    V1: float
    F: float
    C: float
    Perr: float
    Q_pct: float
    input_kind: str
    min_eig_full: float
    flags: Tuple[str, ...] = ()


@dataclass
class SweepResult:
    rows: List[SweepRow]
    config: object = None
    metadata: Dict = field(default_factory=dict)

    def select(self, **filters):
        out = []
        for row in self.rows:
            if all(_matches(getattr(row, k), v) for k, v in filters.items()):
                out.append(row)
        return out

    def column(self, name, **filters):
        return np.array([getattr(r, name) for r in self.select(**filters)])


def _matches(value, wanted):
    if isinstance(wanted, float) and isinstance(value, float):
        if math.isnan(wanted):
            return math.isnan(value)
        return math.isclose(value, wanted, rel_tol=1e-12, abs_tol=0.0)
    return value == wanted


def input_spec(kind, n, phi):
    if kind is NoiseKind.TMS:
        return InputNoiseSpec.two_mode_squeezed(photon_to_squeezing(n), phi)
    if kind is NoiseKind.THERMAL:
        return InputNoiseSpec.thermal(n, n)
    return InputNoiseSpec.vacuum()


def evolve(params, spec, delta, t_grid):
    """Covariance trajectory for one hypothesis, started from its preparation state."""
    A = drift_matrix(params)
    D = diffusion_matrix(params, delta, input_covariance(spec, params.kappa))
    return propagate_covariance(A, D, initial_state(params, delta), t_grid)


def _combos(cfg):
    for arm in cfg.arms:
        photons = cfg.photons if arm.input is not NoiseKind.VACUUM else (0.0,)
        phis = cfg.phis if arm.input is NoiseKind.TMS else (math.nan,)
        for n in photons:
            for phi in phis:
                for delta in cfg.deltas:
                    for N in cfg.sample_sizes:
                        for sel in arm.selectors:
                            yield arm.input, n, phi, delta, N, sel


def run_scenario(cfg, threads=1):
    """Evaluate every sweep combination of ``cfg`` on its time grid.

    Rows are ordered by arm, photon number, squeezing angle, heating rate,
    sample size, selector and time, independent of ``threads``.
    """
    params = cfg.system
    require_hurwitz(drift_matrix(params))
    t_grid = cfg.time_grid.values(params)
    combos = list(_combos(cfg))

    # every distinct (input state, heating) trajectory is computed once
    jobs = {}
    for kind, n, phi, delta, _, _ in combos:
        spec = input_spec(kind, n, phi)
        classical = spec.classical_counterpart()
        for s in (spec, classical):
            jobs.setdefault((s, 0.0), None)
            jobs.setdefault((s, delta), None)
    keys = list(jobs)

    def work(key):
        spec, delta = key
        try:
            return evolve(params, spec, delta, t_grid)
        except (StabilityError, NumericalError) as exc:
            raise type(exc)(f"{exc} [input={spec}, delta={delta}]") from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trajectories = dict(zip(keys, pool.map(work, keys)))
    else:
        trajectories = {k: work(k) for k in keys}

    fidelity_cache = {}

    def fidelity(classical, delta):
        key = (classical, delta)
        if key not in fidelity_cache:
            out0 = output_two_mode_cm(trajectories[(classical, 0.0)], params.kappa)
            out1 = output_two_mode_cm(trajectories[(classical, delta)], params.kappa)
            F = np.empty(len(t_grid))
            physical = np.ones(len(t_grid), dtype=bool)
            for i in range(len(t_grid)):
                ok0, _ = check_physicality(out0[i])
                ok1, _ = check_physicality(out1[i])
                physical[i] = ok0 and ok1
                F[i] = gaussian_fidelity(out0[i], out1[i], check=False)
            fidelity_cache[key] = (F, physical)
        return fidelity_cache[key]

    min_eig_cache = {}

    def min_eig(key):
        if key not in min_eig_cache:
            min_eig_cache[key] = np.array([check_physicality(s)[1] for s in trajectories[key]])
        return min_eig_cache[key]

    rows = []
    for kind, n, phi, delta, N, sel in combos:
        spec = input_spec(kind, n, phi)
        classical = spec.classical_counterpart()
        h0, h1 = trajectories[(spec, 0.0)], trajectories[(spec, delta)]
        V0 = output_variance(h0, sel, params.kappa)
        V1 = output_variance(h1, sel, params.kappa)
        perr = error_probability_from_variances(V0, V1, N, cfg.alpha).p_err
        F, physical = fidelity(classical, delta)
        C = classical_bound(F, N)
        eig = np.minimum(min_eig((spec, 0.0)), min_eig((spec, delta)))
        degenerate = delta == 0.0
        Q = np.full(len(t_grid), math.nan) if degenerate else quantum_advantage(C, perr)
        n1, n2 = spec.mean_photons
        for i, t in enumerate(t_grid):
            flags = []
            if degenerate:
                flags.append(FLAG_DEGENERATE)
            if not physical[i]:
                flags.append(FLAG_UNPHYSICAL_OUTPUT)
            rows.append(
                SweepRow(
                    t_s=float(t),
                    selector=sel.value,
                    phi_rad=float(phi),
                    delta_rads=float(delta),
                    n1=float(n1),
                    n2=float(n2),
                    N=int(N),
                    alpha=float(cfg.alpha),
                    V0=float(V0[i]),
                    V1=float(V1[i]),
                    F=float(F[i]),
                    C=float(C[i]),
                    Perr=float(perr[i]),
                    Q_pct=float(Q[i]),
                    input_kind=kind.value,
                    min_eig_full=float(eig[i]),
                    flags=tuple(flags),
                )
            )
    return SweepResult(rows=rows, config=cfg)
