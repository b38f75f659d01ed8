"""Exception types raised across the package."""


class XispearError(Exception):
    """Base class for all errors raised by xispear."""


class InputError(XispearError, ValueError):
    """Invalid user input (shape, values, flags)."""


class LengthMismatch(InputError):
    pass


class NonFiniteValue(InputError):
    pass


class SampleTooSmall(InputError):
    pass


class SampleSizeMismatch(InputError):
    pass


class TiesPresent(InputError):
    """Raised under the reject policy when x or y contains duplicate values."""

    def __init__(self, x_groups: int, y_groups: int):
        self.x_groups = x_groups
        self.y_groups = y_groups
        super().__init__(
            f"ties present: {x_groups} tied group(s) in x, {y_groups} tied group(s) in y; "
            "use the random tie-breaking policy with a seed to proceed"
        )

    @property
    def tied_groups(self) -> int:
        return self.x_groups + self.y_groups


class InvalidPValue(InputError):
    pass


class InvalidLevel(InputError):
    pass


class NTooLarge(InputError):
    pass


class NTooSmallForMoment(InputError):
    pass


class EvenN(InputError):
    pass


class InvalidShape(InputError):
    pass
