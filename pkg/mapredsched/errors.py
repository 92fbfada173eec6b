"""Mapredsched errors.

These take in only a single argument: msg.
It's possible to attach structured details (violation lists, offending ids) with `.set_details()`.
"""
from typing import Any

class MapRedSchedException(Exception):
    """Base error for all mapredsched errors."""
    details: Any = None
    def __init__(self, msg: str, details: Any=None):
        self.msg = msg
        if details is not None:
            self.set_details(details)
    def set_details(self, details: Any):
        """Adds an optional payload to the error."""
        self.details = details
    @property
    def msg(self): return self.args[0]
    @msg.setter
    def msg(self, msg): self.args = (msg,)

class WorkloadError(MapRedSchedException):
    """Base workload validation error."""
class InvalidWorkload(WorkloadError):
    """Workload record is malformed."""
class NonPositiveSpeed(WorkloadError):
    """A machine speed is zero or negative."""
class NonPositiveTaskSize(WorkloadError):
    """A task has a zero or negative data size."""
class EmptyJob(WorkloadError):
    """A job has neither map nor reduce tasks."""
class DuplicateJobId(WorkloadError):
    """Two jobs share an id."""
class InvalidJobId(WorkloadError):
    """Job ids are not a permutation of 1..N."""
class NegativeRelease(WorkloadError):
    """A job is released before time 0."""
class NegativeWeight(WorkloadError):
    """A job has a negative weight."""

class LpError(MapRedSchedException):
    """Base LP relaxation error."""
class EmptySubset(LpError):
    """Violation asked for an empty job set."""
class TooManyJobs(LpError):
    """Exhaustive enumeration refused, too many jobs."""
class IterationLimitExceeded(LpError):
    """Row generation or pivoting did not converge within its cap."""
class LpInfeasible(LpError):
    """The restricted LP has no feasible point."""
class Unbounded(LpError):
    """The objective is not bounded below."""

class ScheduleError(MapRedSchedException):
    """Base scheduling error."""
class InvalidOrder(ScheduleError):
    """Job order is not a permutation of the job ids."""
class InvalidSchedule(ScheduleError):
    """Schedule record is malformed."""
class ScheduleDeadlock(ScheduleError):
    """A fixed assignment and order can never be executed."""
class TooLarge(ScheduleError):
    """Instance is too large for exhaustive search."""

class SimulationError(MapRedSchedException):
    """Base simulation error."""
class InvalidPerturbation(SimulationError):
    """Perturbation range or mode is not valid."""

class InvalidJson(MapRedSchedException):
    """Input file is not valid JSON."""

class ScenarioError(MapRedSchedException):
    """Base experiment error."""
class InvalidSpec(ScenarioError):
    """Scenario spec is not valid."""
class InvalidResults(ScenarioError):
    """Results file could not be parsed."""

class InvariantViolation(MapRedSchedException):
    """A guaranteed property failed at runtime. Always a bug, never bad input."""

_INTERNAL = (InvariantViolation, LpInfeasible, Unbounded, IterationLimitExceeded)

def is_internal(error: Exception) -> bool:
    """Recognizes whether an error signals a bug rather than bad input."""
    return isinstance(error, _INTERNAL) or not isinstance(error, MapRedSchedException)
