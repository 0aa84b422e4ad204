"""Random function iterations for stochastic feasibility problems."""

from pathlib import Path

from . import _rfi
from ._rfi import (
    ConfigError,
    DimensionError,
    Error,
    NumericError,
    Operator,
    Scenario,
    UnsupportedOperatorError,
    ball_projector,
    disk_feasibility,
    epsilon_budget,
    exp_prox,
    grad_intervals,
    grad_lines,
    halfspace_projector,
    huber,
    hyperplane_projector,
    interval_projector,
    kappa_lines,
    line_projector,
    list_builtin,
    merit_intervals,
    merit_lines,
    parse_scenario,
    rate_bound,
    rotation,
    run_scenario,
    solve_integral_equation,
)

SCENARIO_DIR = Path(__file__).resolve().parent / "scenarios"


def bundled_scenarios():
    """Names of the scenarios shipped with the package."""
    return sorted(p.stem for p in SCENARIO_DIR.glob("*.scn"))


def load_scenario(name_or_path):
    """Load a scenario file, or a bundled scenario by bare name."""
    path = Path(name_or_path)
    if not path.exists() and (SCENARIO_DIR / f"{name_or_path}.scn").exists():
        path = SCENARIO_DIR / f"{name_or_path}.scn"
    return _rfi.load_scenario(str(path))


__all__ = [n for n in dir() if not n.startswith("_") and n not in {"Path"}]
