"""Exception hierarchy shared by every stage of the pipeline."""


class EgoRankerError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(EgoRankerError, ValueError):
    """A single input record could not be turned into an event."""


class MalformedRecord(ParseError):
    pass


class UnknownInteractionType(ParseError):
    pass


class SelfInteraction(ParseError):
    pass


class NegativeTimestamp(ParseError):
    pass


class ParseErrors(EgoRankerError):
    """All per-line failures of a strict load, as ``(line_number, error)`` pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = ", ".join(f"line {n}: {e}" for n, e in self.errors[:10])
        more = f" (+{len(self.errors) - 10} more)" if len(self.errors) > 10 else ""
        super().__init__(f"{len(self.errors)} bad record(s): {lines}{more}")


class ConfigError(EgoRankerError, ValueError):
    pass


class TimestampBeforeEpoch(EgoRankerError, ValueError):
    pass


class UnknownFriend(EgoRankerError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class EmptyFriendSet(EgoRankerError, ValueError):
    pass


class SolveFailure(EgoRankerError, ArithmeticError):
    pass


class DuplicateFriend(EgoRankerError, ValueError):
    pass


class BadTierSpec(EgoRankerError, ValueError):
    pass


class FriendSetMismatch(EgoRankerError, ValueError):
    pass


class OutOfOrderBatch(EgoRankerError):
    pass


class CorruptState(EgoRankerError):
    pass
