"""Fault-tolerant computation with verified logical cluster states.

Submodules: ``pauli`` and ``tableau`` (stabilizer simulation), ``steane``
(the concatenated [[7,1,3]] code), ``blueprint``/``gadgets`` (cluster
construction and verification), ``framesim``/``montecarlo``/``enumeration``
(noisy estimation and its oracle), ``analytic`` (threshold and level
selection), ``resources`` (resource recurrences) and ``cli``.
"""

from .analytic import ComputationSize, highest_level, level_error, memory_threshold, p_q0, threshold
from .montecarlo import EstimateReport, TrialPlan, run_trials, wilson
from .pauli import NoiseModel, PauliString
from .resources import ResourceVector, SuccessTable, level1_base, recurrence_step, resources_for_computation
from .tableau import StabilizerState

__version__ = "0.1.0"

__all__ = [
    "ComputationSize",
    "EstimateReport",
    "NoiseModel",
    "PauliString",
    "ResourceVector",
    "StabilizerState",
    "SuccessTable",
    "TrialPlan",
    "highest_level",
    "level1_base",
    "level_error",
    "memory_threshold",
    "p_q0",
    "recurrence_step",
    "resources_for_computation",
    "run_trials",
    "threshold",
    "wilson",
]
