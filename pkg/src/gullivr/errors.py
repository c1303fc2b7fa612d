"""Exception types shared across the package."""


class GulliVRError(Exception):
    """Base class for all package errors."""


class DomainError(GulliVRError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class StateError(GulliVRError, RuntimeError):
    """An operation is not allowed in the current locomotion state."""


class ConfigError(GulliVRError, ValueError):
    """A configuration is missing an entry or violates an invariant.

    ``violations`` holds every problem found, not only the first one.
    """

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations) if violations else [message]


class ScenarioError(GulliVRError, RuntimeError):
    """A scenario cannot be completed (unreachable waypoint, step cap)."""

    def __init__(self, message, log=None):
        super().__init__(message)
        self.log = log
