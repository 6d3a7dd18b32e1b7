"""
Exceptions raised by the wguide package.

Library code raises these and never prints; `waveguide.py` catches
`WaveguideError` and turns it into a one-line reason plus exit status.
"""


class WaveguideError(RuntimeError):
    """Base class for every failure reported by the package."""


class ConfigError(WaveguideError):
    """Malformed or inconsistent configuration (unknown keys included)."""


class DomainError(WaveguideError):
    """A scaled support leaves the guide or the truncated computational box."""


class SingularArgumentError(WaveguideError):
    """An operator was evaluated at k = 0 where it carries a 1/k factor."""


class BranchError(WaveguideError):
    """Re K_j(k) is not positive for a retained transverse mode."""


class SeriesDivergenceError(WaveguideError):
    """Neumann series terms stopped decaying; use the direct solve instead."""


class SingularSystemError(WaveguideError):
    """The discretized (I + eps T) system or the shifted oracle matrix is singular."""


class ConvergenceError(WaveguideError):
    """An iteration did not converge; `trace` holds the visited iterates."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class NotApplicableError(WaveguideError):
    """A predictor was called outside the regime it is stated for."""
