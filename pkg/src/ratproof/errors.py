"""Exception hierarchy shared by every stage of the lab."""


class RatProofError(Exception):
    """Base class; ``exit_code`` is what the CLI returns when this escapes."""

    exit_code = 1


class ProtocolError(RatProofError):
    """A protocol description or verifier behaved outside its contract."""


class MalformedStrategy(RatProofError):
    """A strategy profile has no message for a history the run reached."""


class BudgetExceeded(RatProofError):
    """A message, the transcript, or the random tape went over its budget."""


class CapExceeded(RatProofError):
    exit_code = 3

    def __init__(self, what, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"{what}: {count} exceeds cap {cap}")


class RandomnessCapExceeded(CapExceeded):
    def __init__(self, count, cap):
        super().__init__("random tapes", count, cap)


class StrategyCapExceeded(CapExceeded):
    def __init__(self, count, cap):
        super().__init__("strategy profiles", count, cap)


class InvalidRIP(RatProofError):
    """Payment-maximizing profiles disagree on the answer bit."""


class BaseNotNormalized(RatProofError):
    pass


class NotNormalized(RatProofError):
    pass


class NonBinaryPayment(RatProofError):
    pass


class GapViolated(RatProofError):
    pass


class ConfigInvalid(RatProofError):
    exit_code = 2


class AuditFailed(RatProofError):
    """A resource audit found budget violations; later stages are skipped."""
