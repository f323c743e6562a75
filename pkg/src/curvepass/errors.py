"""Exception hierarchy shared across the package.

Error class names double as wire-level reason codes: the HTTP layer reports
``type(exc).__name__`` to clients, so renaming a class here is a protocol
change.
"""


class CurvepassError(Exception):
    """Base class for all domain errors."""

    @property
    def reason(self) -> str:
        return type(self).__name__


# --- layout / challenge generation ---

class WrongImageCount(CurvepassError):
    pass


class DuplicateImageId(CurvepassError):
    pass


class NoEligibleCells(CurvepassError):
    pass


class EmptyPolyline(CurvepassError):
    pass


# --- image pipeline ---

class TooFewImages(CurvepassError):
    pass


class UndecodableImage(CurvepassError):
    pass


# --- attack lab ---

class InvalidRange(CurvepassError):
    pass


class SpaceTooLarge(CurvepassError):
    pass


# --- statistics / session log ---

class TooFewSamples(CurvepassError):
    pass


class CorruptRecord(CurvepassError):
    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


# --- authentication service ---

class DuplicateUser(CurvepassError):
    pass


class WrongPasswordLength(CurvepassError):
    pass


class UnknownImageId(CurvepassError):
    pass


class DuplicatePassImage(CurvepassError):
    pass


class UnknownUser(CurvepassError):
    pass


class UnknownNonce(CurvepassError):
    pass


class ExpiredNonce(CurvepassError):
    pass


class ConsumedNonce(CurvepassError):
    pass


class CellOutOfRange(CurvepassError):
    pass
