import typing

from .utils import sanitize_message

if typing.TYPE_CHECKING:
    from .context import CommandContext


__all__ = (
    "LResNetException",
    "DimensionError",
    "ManifoldError",
    "InvalidTangentError",
    "DegeneratePairError",
    "DomainError",
    "GradientUnavailable",
    "TrainingDivergence",
    "CapacityError",
    "BadArgument",
    "CheckFailure",
)


class LResNetException(Exception):
    """The base exception for lresnet exceptions."""

    pass


class DimensionError(LResNetException, ValueError):
    """Raised when vector lengths or array shapes do not line up."""

    pass


class ManifoldError(LResNetException, ValueError):
    """Raised when a point is not on the hyperboloid, or the curvature is invalid."""

    pass


class InvalidTangentError(LResNetException, ValueError):
    """Raised when a tangent vector is time-like or not orthogonal to its base."""

    pass


class DegeneratePairError(LResNetException, ArithmeticError):
    """
    Raised when parallel transport between two points would divide by
    (almost) zero.
    """

    pass


class DomainError(LResNetException, ValueError):
    """Raised when an argument lies outside the domain of a model, like the Poincaré ball."""

    pass


class GradientUnavailable(LResNetException):
    """Raised when gradients are requested for a residual method that is forward-only."""

    pass


class TrainingDivergence(LResNetException, ArithmeticError):
    """
    Raised when training produces a non-finite loss.

    Attributes:
        epoch (`int`): The epoch the loss went non-finite in.

        layer (`int`, optional): The first layer whose output was non-finite,
        if one could be found. Layer 0 is the input.
    """

    def __init__(
        self, message: str, *, epoch: int, layer: typing.Optional[int] = None
    ) -> None:
        self.epoch = epoch
        self.layer = layer
        super().__init__(message)


class CapacityError(LResNetException, MemoryError):
    """Raised when a benchmark configuration does not fit into memory."""

    pass


class BadArgument(LResNetException):
    """A special exception for invalid arguments when using lresnet commands."""

    def __init__(self, message: typing.Optional[str] = None, *args: typing.Any) -> None:
        if message is not None:
            message = sanitize_message(message)
            super().__init__(message, *args)
        else:
            super().__init__(*args)


class CheckFailure(LResNetException):
    """
    An exception when a check fails.

    Attributes:
        context (`CommandContext`): The context for this check.

        message: (`str`, optional): The error message.

        check (`Callable[[CommandContext], bool]`, optional):
        The check that failed. This is automatically passed in if the check fails -
        there is no need to do it yourself.
    """

    def __init__(
        self,
        context: "CommandContext",
        message: typing.Optional[str] = "A check has failed.",
        *,
        check: typing.Optional[typing.Callable[["CommandContext"], bool]] = None,
    ):
        self.context = context
        self.check = check
        self.message = message

        super().__init__(message)
