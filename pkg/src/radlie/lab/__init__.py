"""Seeded instance generators and verification suites."""

from .generators import InstanceSpec
from .report import TrialOutcome, VerificationReport
from .suites import SUITE_NAMES, run_suite, run_suites

__all__ = ["InstanceSpec", "TrialOutcome", "VerificationReport", "SUITE_NAMES",
           "run_suite", "run_suites"]
