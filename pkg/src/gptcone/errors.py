"""Exception hierarchy shared by every module."""


class GptError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(GptError, ValueError):
    pass


class UnsupportedRepresentation(GptError):
    """Operation needs a polyhedral cone (or otherwise unsupported input)."""


class NotProperError(GptError, ValueError):
    pass


class BudgetExceeded(GptError):
    """A configured size cap would be exceeded."""


class CertificationError(GptError):
    """A certificate clause failed; ``clause`` names it."""

    def __init__(self, clause: str, detail: str = ""):
        super().__init__(f"{clause}: {detail}" if detail else clause)
        self.clause = clause
        self.detail = detail


class WitnessInvalid(GptError, ValueError):
    """A witness fails its defining conditions."""
