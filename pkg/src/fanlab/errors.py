"""Exception hierarchy shared by every fanlab module."""


class FanlabError(Exception):
    """Base class for all fanlab errors."""


class NotRepresentable(FanlabError, ValueError):
    """The value has no canonical tower expression (negative, or too far from any F-image)."""


class TowerSyntaxError(FanlabError, ValueError):
    def __init__(self, text, pos, msg):
        super().__init__(f"{msg} at column {pos}: {text!r}")
        self.text = text
        self.pos = pos


class TooLarge(FanlabError):
    """Exact evaluation refused by the feasibility guard."""


class UnresolvedComparison(FanlabError):
    """Interval separation failed up to the precision cap."""


class NumericModeRequired(FanlabError):
    """A tower-sized magnitude reached a float-only code path."""


class HorizonExceeded(FanlabError):
    pass


class DepthInsufficient(FanlabError):
    """Backward iteration hit the depth cap before reaching the tolerance."""


class CapExceeded(FanlabError):
    pass


class InvalidInstance(FanlabError, ValueError):
    pass


class CertificateError(FanlabError):
    """A certificate that the construction guarantees failed to verify.

    ``record`` carries a JSON-ready description of the failing instance.
    """

    def __init__(self, msg, record=None):
        super().__init__(msg)
        self.record = record or {}


class SpecError(FanlabError, ValueError):
    """Malformed sequence, point or basis description."""
