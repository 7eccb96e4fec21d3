"""Verification harness: sequential oracle, canary stress, interleaving checks."""

from stampit.canary import CanaryNode, CanaryViolation, check_alive, make_poisoning_deleter
from stampit.verify.oracle import (
    SequentialPoolOracle,
    SerializedDriver,
    drive_scheme,
    generate_history,
    replay_history,
)
from stampit.verify.stress import StressConfig, StressReport, stress_run
from stampit.verify.interleave import (
    InterleaveResult,
    StepBudgetExceeded,
    Stepper,
    interleave_check,
    run_schedule,
)

__all__ = [
    "SequentialPoolOracle",
    "SerializedDriver",
    "drive_scheme",
    "generate_history",
    "replay_history",
    "CanaryNode",
    "CanaryViolation",
    "check_alive",
    "make_poisoning_deleter",
    "StressConfig",
    "StressReport",
    "stress_run",
    "InterleaveResult",
    "StepBudgetExceeded",
    "Stepper",
    "interleave_check",
    "run_schedule",
]
