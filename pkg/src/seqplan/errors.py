"""Exception hierarchy shared by all seqplan modules."""


class SeqPlanError(Exception):
    """Base class for every error raised by seqplan."""


# geometry
class NotAxisParallel(SeqPlanError):
    pass


class ZeroDisplacement(SeqPlanError):
    pass


# decoding
class DecodeError(SeqPlanError):
    pass


class EmptyPlan(DecodeError):
    pass


class UnknownAction(DecodeError):
    pass


class UnknownObject(DecodeError):
    pass


class AmbiguousStep(DecodeError):
    pass


class MissingTarget(DecodeError):
    pass


class NoSegmentsFound(DecodeError):
    pass


class MalformedCoordinate(DecodeError):
    pass


# matching
class MatchError(SeqPlanError):
    pass


class NoMatch(MatchError):
    pass


class AmbiguousMatch(MatchError):
    pass


class UnknownLabel(MatchError):
    pass


class NoBaseDefined(MatchError):
    pass


# planning
class DuplicateSize(SeqPlanError):
    pass


class Unreachable(SeqPlanError):
    pass


# execution
class ExecutionError(SeqPlanError):
    pass


class ConvergenceTimeout(ExecutionError):
    pass


class ObjectMissing(ExecutionError):
    pass


class TargetOccupied(ExecutionError):
    pass


# perception
class EmptyCluster(SeqPlanError):
    pass


# harness
class UnknownTaskFamily(SeqPlanError):
    pass


class LLMError(SeqPlanError):
    pass


class LLMTimeout(LLMError, TimeoutError):
    pass


class HttpError(LLMError):
    def __init__(self, status: int, body: str = ""):
        super().__init__(f"HTTP {status}: {body[:200]}")
        self.status = status
        self.body = body


class EmptyCompletion(LLMError):
    pass


class BackendUnavailable(SeqPlanError):
    pass
