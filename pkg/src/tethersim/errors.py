"""Exception hierarchy shared by every tethersim module."""


class TetherSimError(Exception):
    """Base class for all simulator errors."""


class InvalidParams(TetherSimError, ValueError):
    pass


class SingularAttitude(TetherSimError):
    """Pitch is inside the Euler-rate singularity guard band."""


class UnknownPreset(TetherSimError, KeyError):
    pass


class UnknownSet(TetherSimError, KeyError):
    pass


class TautCable(TetherSimError):
    """Cable length does not exceed the chord between its endpoints."""


class NoConvergence(TetherSimError):
    pass


class OutOfDomain(TetherSimError, ValueError):
    pass


class BadInitShape(TetherSimError, ValueError):
    pass


class Unstable(TetherSimError):
    """Raised when a tether node exceeds the speed limit.

    ``step_index`` is filled in by the engine when the error propagates
    out of a run.
    """

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class LengthMismatch(TetherSimError, ValueError):
    pass


class ParseError(TetherSimError):
    """Scenario text could not be parsed; message carries line/column."""


class ValidationError(TetherSimError):
    """Scenario failed validation; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
