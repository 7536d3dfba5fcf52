"""Built-in scenarios mirroring the published figure set."""
import math

from ..model import NoiseKind, QuadratureSelector
from .config import Arm, ScenarioConfig, TimeGrid

Q_PLUS = QuadratureSelector.Q_PLUS
X_OUT1 = QuadratureSelector.X_OUT1

# Q(Delta, t) map: half-decade steps over 1e3..1e8 rad/s
FIG8_DELTAS = tuple(10.0 ** (k / 2) for k in range(6, 17))


def _tms(*selectors):
    return Arm(NoiseKind.TMS, selectors)


def _thermal(*selectors):
    return Arm(NoiseKind.THERMAL, selectors)


PRESETS = {
    # thermal input, local x_out1: classical protocol vs its bound
    "fig2": dict(arms=(_thermal(X_OUT1),), photons=(10.0, 100.0)),
    # TMS input, EPR q_+, squeezing-angle dependence
    "fig3": dict(arms=(_tms(Q_PLUS),), phis=(math.pi / 2, 5 * math.pi / 6, math.pi)),
    # TMS input, EPR q_+, vanishing squeezing angle
    "fig4": dict(arms=(_tms(Q_PLUS),), phis=(0.0,), photons=(10.0, 100.0)),
    # TMS input at phi = pi, EPR and local readout, two sample sizes
    "fig5": dict(arms=(_tms(Q_PLUS, X_OUT1),), sample_sizes=(10, 100)),
    # thermal input with EPR readout
    "fig6": dict(arms=(_thermal(Q_PLUS),)),
    # protocol comparison at phi = pi
    "fig7": dict(arms=(_tms(Q_PLUS, X_OUT1), _thermal(Q_PLUS))),
    # advantage map over the heating rate, N = 10
    "fig8": dict(arms=(_tms(Q_PLUS),), sample_sizes=(10,), deltas=FIG8_DELTAS),
}


def preset(name, time_grid=None):
    """Return the :class:`ScenarioConfig` for a named preset."""
    try:
        kwargs = dict(PRESETS[name])
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return ScenarioConfig(name=name, time_grid=time_grid or TimeGrid(), **kwargs)
