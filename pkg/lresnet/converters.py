import typing

from . import errors
from .context import CommandContext
from .geometry import Curvature
from .residual import METHODS

__all__ = (
    "Converter",
    "CurvatureConverter",
    "PrecisionConverter",
    "DepthsConverter",
    "MethodListConverter",
    "ThreadsConverter",
    "TYPE_TO_CONVERTER",
)


T_co = typing.TypeVar("T_co", covariant=True)


@typing.runtime_checkable
class Converter(typing.Protocol[T_co]):
    def convert(self, ctx: CommandContext, argument: str) -> T_co:
        raise NotImplementedError("Derived classes need to implement this.")


class _LiteralConverter(Converter):
    values: typing.Dict

    def __init__(self, args: typing.Any):
        self.values = {arg: type(arg) for arg in args}

    def convert(self, ctx: CommandContext, argument: str):
        for arg, converter in self.values.items():
            try:
                if (converted := converter(argument)) == arg:
                    return converted
            except Exception:
                continue

        literals_list = [str(a) for a in self.values.keys()]
        literals_str = ", ".join(literals_list[:-1]) + f", or {literals_list[-1]}"
        raise errors.BadArgument(
            f'Could not convert "{argument}" into one of {literals_str}.'
        )


def _split_list(argument: str) -> typing.List[str]:
    return [part.strip() for part in argument.split(",") if part.strip()]


class CurvatureConverter(Converter[Curvature]):
    def convert(self, ctx: CommandContext, argument: str) -> Curvature:
        try:
            return Curvature(float(argument))
        except ValueError as e:
            raise errors.BadArgument(
                f'"{argument}" is not a valid curvature: it must be a negative number.'
            ) from e


class PrecisionConverter(Converter[int]):
    def convert(self, ctx: CommandContext, argument: str) -> int:
        if argument in {"32", "float32", "f32"}:
            return 32
        if argument in {"64", "float64", "f64"}:
            return 64
        raise errors.BadArgument(f'Precision must be 32 or 64, not "{argument}".')


class DepthsConverter(Converter[typing.Tuple[int, ...]]):
    """Comma separated depths, like `4,8,16,32`. They must be ascending."""

    def convert(self, ctx: CommandContext, argument: str) -> typing.Tuple[int, ...]:
        try:
            depths = tuple(int(part) for part in _split_list(argument))
        except ValueError as e:
            raise errors.BadArgument(f'"{argument}" is not a list of depths.') from e

        if not depths:
            raise errors.BadArgument("At least one depth is needed.")
        if any(d < 0 for d in depths) or list(depths) != sorted(depths):
            raise errors.BadArgument("Depths must be non-negative and sorted ascending.")
        return depths


class MethodListConverter(Converter[typing.Tuple[str, ...]]):
    """Comma separated residual methods, like `lresnet,pt`."""

    def convert(self, ctx: CommandContext, argument: str) -> typing.Tuple[str, ...]:
        methods = tuple(_split_list(argument))
        unknown = [m for m in methods if m not in METHODS]
        if not methods or unknown:
            raise errors.BadArgument(
                f'"{argument}" is not a list of methods; pick from {", ".join(METHODS)}.'
            )
        return methods


class ThreadsConverter(Converter[typing.Union[int, str]]):
    """Either `auto` or a positive thread count."""

    def convert(self, ctx: CommandContext, argument: str) -> typing.Union[int, str]:
        if argument == "auto":
            return "auto"
        try:
            threads = int(argument)
        except ValueError:
            threads = 0
        if threads < 1:
            raise errors.BadArgument(f'Threads must be "auto" or a positive integer, not "{argument}".')
        return threads


TYPE_TO_CONVERTER: typing.Dict[type, typing.Type[Converter]] = {
    Curvature: CurvatureConverter,
}
