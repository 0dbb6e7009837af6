"""Energy-minimising task offloading for ships served by UAV and LEO edge servers.

Each maritime autonomous surface ship (MASS) splits its task three ways:
bits computed on board, bits sent to its hovering UAV and bits sent up to a
low-earth-orbit satellite. The package models the energy and latency of that
split and minimises total energy under per-task deadlines.
"""
from samin.baselines import eacr_solve, eos_solve, pomt_solve, solve_all, stp_with_warm_starts
from samin.model import Metrics, evaluate_plan, leo_geometry
from samin.optimizer import SolveReport, SolverConfig, mris, stp_solve
from samin.params import Position3D, SystemParams, Task
from samin.scenario import OffloadPlan, Scenario, build_scenario, default_scenario

__version__ = "0.1.0"

__all__ = [
    "Metrics", "OffloadPlan", "Position3D", "Scenario", "SolveReport", "SolverConfig",
    "SystemParams", "Task", "build_scenario", "default_scenario", "eacr_solve",
    "eos_solve", "evaluate_plan", "leo_geometry", "mris", "pomt_solve", "solve_all",
    "stp_solve", "stp_with_warm_starts",
]
