"""Exception types shared across the package."""

from __future__ import annotations


class GeometryConfigError(ValueError):
    """Raised when a hand configuration cannot be parsed or fails validation."""

    def __init__(self, violations: list[str] | str):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GeometryInfeasible(ValueError):
    """The guide triangle cannot close for the requested retraction/angle.

    ``servo_index`` is 1-based when known (u1..u6), otherwise None.
    """

    def __init__(self, message: str, servo_index: int | None = None):
        self.servo_index = servo_index
        if servo_index is not None:
            message = f"servo u{servo_index}: {message}"
        super().__init__(message)


class ManifoldError(ValueError):
    """A joint vector is not on the ideal coupling manifold."""

    def __init__(self, digits: list[str]):
        self.digits = list(digits)
        super().__init__("joint vector off the coupling manifold for digit(s): " + ", ".join(self.digits))


class FitError(RuntimeError):
    pass


class PoseLibraryError(ValueError):
    pass
