"""Exception types raised across the package."""


class NogolabError(Exception):
    """Base class for every error raised by nogolab."""


class DimensionMismatch(NogolabError, ValueError):
    pass


class DegenerateOutcome(NogolabError):
    pass


class NotUnitary(NogolabError, ValueError):
    pass


class NotProjector(NogolabError, ValueError):
    pass


class InvalidState(NogolabError, ValueError):
    pass


class CapExceeded(NogolabError, ValueError):
    pass


class InvalidParameters(NogolabError, ValueError):
    pass


class NoPreimage(NogolabError, ValueError):
    pass


class NotOrthonormal(NogolabError, ValueError):
    pass


class CodomainTooSmall(NogolabError, ValueError):
    pass


class InconsistentInputs(NogolabError, ValueError):
    pass


class InsufficientTrials(NogolabError, ValueError):
    pass


class NoMessageObserved(NogolabError, ValueError):
    pass


class MessageTooLong(NogolabError, ValueError):
    pass


class NotOrthogonal(NogolabError, ValueError):
    pass


class OutOfRange(NogolabError, ValueError):
    pass


class UnknownSlot(NogolabError, KeyError):
    pass


class NotClassicalOracle(NogolabError, TypeError):
    pass


class InconsistentModification(NogolabError, ValueError):
    pass


class SamplerFailure(NogolabError, RuntimeError):
    pass


class EmptyMessage(NogolabError, ValueError):
    pass


class MalformedCiphertext(NogolabError, ValueError):
    pass


class UnknownExperiment(NogolabError, KeyError):
    pass


class SparseBins(NogolabError, ValueError):
    pass
