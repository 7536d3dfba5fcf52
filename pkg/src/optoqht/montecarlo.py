"""Empirical calibration of the chi-squared variance test.

Random numbers come from numpy's Philox4x64-10 counter-based generator with
standard normals drawn by numpy's ziggurat sampler. Trials are grouped in
fixed blocks of ``BLOCK_TRIALS``; block ``b`` of hypothesis arm ``h`` reads
the stream ``SeedSequence(seed, spawn_key=(h, b))``, so results depend only
on the seed and never on how blocks are spread over workers.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from .errors import InvalidArgumentError
from .inference import TestConfig, chi2_quantile

PRNG_ALGORITHM = "numpy Philox4x64-10 (SeedSequence spawn_key=(arm, block)), ziggurat normals"
BLOCK_TRIALS = 2048

_ARM_SINGLE, _ARM_H0, _ARM_H1 = 0, 1, 2


def _generator(seed, *key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def sample_outcomes(V, N, seed):
    """Draw ``N`` i.i.d. zero-mean normal outcomes with variance ``V``."""
    if not V > 0:
        raise InvalidArgumentError(f"variance must be > 0, got {V!r}")
    if int(N) != N or N < 1:
        raise InvalidArgumentError(f"N must be a positive integer, got {N!r}")
    return math.sqrt(V) * _generator(seed, _ARM_SINGLE).standard_normal(int(N))


@dataclass(frozen=True)
class McRun:
    trials: int
    N: int
    seed: int
    cfg: TestConfig
    V_true: Optional[float] = None

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise InvalidArgumentError("trials must be a positive integer")
        if self.N != self.cfg.N:
            raise InvalidArgumentError("McRun.N must match cfg.N")


class EmpiricalRates(NamedTuple):
    type_i: float
    type_ii: float
    p_err: float
    se_type_i: float
    se_type_ii: float
    se_p_err: float


def _block_sizes(trials):
    sizes = [BLOCK_TRIALS] * (trials // BLOCK_TRIALS)
    if trials % BLOCK_TRIALS:
        sizes.append(trials % BLOCK_TRIALS)
    return sizes


def count_rejections(V, run, arm, workers=1):
    """Number of trials with data variance ``V`` that reject H0."""
    threshold = chi2_quantile(1.0 - run.cfg.significance, run.N - 1)
    sizes = _block_sizes(int(run.trials))
    scale = math.sqrt(V)

    def block(b):
        draws = _generator(run.seed, arm, b).standard_normal((sizes[b], run.N))
        return kernels.count_rejections(scale * draws, run.cfg.V0, threshold)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return sum(pool.map(block, range(len(sizes))))
    return sum(block(b) for b in range(len(sizes)))


def rejection_rate(run, workers=1):
    """Fraction of trials drawn with ``run.V_true`` that reject H0."""
    if run.V_true is None:
        raise InvalidArgumentError("rejection_rate needs run.V_true")
    return count_rejections(run.V_true, run, _ARM_SINGLE, workers) / run.trials


def empirical_error_rates(run, workers=1):
    """Type I rate from trials at ``V0``, type II from trials at ``V1``.

    Standard errors are binomial, ``sqrt(p (1 - p) / trials)``; the mean error
    probability averages the two independent arms.
    """
    n = run.trials
    type_i = count_rejections(run.cfg.V0, run, _ARM_H0, workers) / n
    type_ii = 1.0 - count_rejections(run.cfg.V1, run, _ARM_H1, workers) / n
    se_i = math.sqrt(type_i * (1.0 - type_i) / n)
    se_ii = math.sqrt(type_ii * (1.0 - type_ii) / n)
    return EmpiricalRates(
        type_i,
        type_ii,
        0.5 * (type_i + type_ii),
        se_i,
        se_ii,
        0.5 * math.hypot(se_i, se_ii),
    )
