"""Scenario configuration, presets, sweep pipeline and CSV export."""
from .config import Arm, ScenarioConfig, TimeGrid, from_dict, load
from .output import CSV_COLUMNS, emit_csv, read_csv
from .pipeline import SweepResult, SweepRow, run_scenario
from .presets import PRESETS, preset

__all__ = [
    "Arm", "ScenarioConfig", "TimeGrid", "from_dict", "load", "CSV_COLUMNS", "emit_csv",
    "read_csv", "SweepResult", "SweepRow", "run_scenario", "PRESETS", "preset",
]
