import typing

from .command import CT
from .command import Command
from .errors import CheckFailure
from .utils import name_to_flag

if typing.TYPE_CHECKING:
    from .context import CommandContext


__all__ = ("check", "positive", "at_least")


def check(check: typing.Callable[["CommandContext"], bool]) -> typing.Callable[..., CT]:
    """
    Add a check to a command.

    Args:
        check: A function taking the context that returns `False` or
        raises `CheckFailure` if the command should not run.
    """

    def wrapper(func: CT) -> CT:
        if isinstance(func, Command):
            func.checks.append(check)
            return func
        if not hasattr(func, "__checks__"):
            func.__checks__ = []  # type: ignore
        func.__checks__.append(check)  # type: ignore
        return func

    return wrapper


def at_least(name: str, minimum: float) -> typing.Callable[..., CT]:
    """
    A check that the converted argument `name` is at least `minimum`.
    Arguments that were left as `None` pass.

    Args:
        name (`str`): The parameter name, as in the command's signature.
        minimum (`float`): The smallest allowed value.
    """

    def _at_least_check(ctx: "CommandContext") -> bool:
        value = ctx.kwargs.get(name)
        if value is not None and value < minimum:
            raise CheckFailure(
                ctx, f"{name_to_flag(name)} must be at least {minimum}, not {value}."
            )
        return True

    return check(_at_least_check)  # type: ignore


def positive(name: str) -> typing.Callable[..., CT]:
    """A check that the converted argument `name` is strictly positive."""

    def _positive_check(ctx: "CommandContext") -> bool:
        value = ctx.kwargs.get(name)
        if value is not None and not value > 0:
            raise CheckFailure(ctx, f"{name_to_flag(name)} must be positive, not {value}.")
        return True

    return check(_positive_check)  # type: ignore
