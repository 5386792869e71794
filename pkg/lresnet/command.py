import collections
import inspect
import typing

import attrs
import typing_extensions

from . import context
from . import converters
from . import errors
from .utils import name_to_flag

__all__ = ("Parameter", "Command", "command")

# 3.8+ compatibility
NoneType = type(None)

try:
    from types import UnionType  # type: ignore

    UNION_TYPES = {typing.Union, UnionType}
except ImportError:  # 3.8-3.9
    UNION_TYPES = {typing.Union}

MISSING = inspect.Parameter.empty


@attrs.define(slots=True)
class Parameter:
    """
    An object representing a parameter of a command.
    This class should not be instantiated directly.
    """

    name: str = attrs.field(default=None)
    "The name of the parameter."
    default: typing.Optional[typing.Any] = attrs.field(default=MISSING)
    "The default value of the parameter."
    type: typing.Type = attrs.field(default=None)
    "The type of the parameter."
    kind: inspect._ParameterKind = attrs.field(
        default=inspect.Parameter.POSITIONAL_OR_KEYWORD
    )
    """The kind of parameter this is as related to the function."""
    converters: typing.List[
        typing.Callable[[context.CommandContext, str], typing.Any]
    ] = attrs.field(factory=list)
    "A list of the converter functions for the parameter that convert to its type."
    union: bool = attrs.field(default=False)
    "Is the parameter a union?"
    switch: bool = attrs.field(default=False)
    "Is this a keyword-only boolean that takes no value?"

    @property
    def optional(self) -> bool:
        """Is this parameter optional?"""
        return self.default is not MISSING

    @property
    def positional(self) -> bool:
        """Is this parameter filled from positional tokens instead of a flag?"""
        return self.kind != inspect.Parameter.KEYWORD_ONLY

    @property
    def flag(self) -> str:
        """The `--flag` this parameter is passed with, if it is keyword-only."""
        return name_to_flag(self.name)


def _get_name(x: typing.Any):
    try:
        return x.__name__
    except AttributeError:
        return repr(x) if hasattr(x, "__origin__") else x.__class__.__name__


def _convert_to_bool(argument: str) -> bool:
    lowered = argument.lower()
    if lowered in {"yes", "y", "true", "t", "1", "enable", "on"}:
        return True
    elif lowered in {"no", "n", "false", "f", "0", "disable", "off"}:
        return False
    else:
        raise errors.BadArgument(f"{argument} is not a recognised boolean option.")


def _get_from_anno_type(anno: typing_extensions.Annotated):
    """
    Handles dealing with Annotated annotations, getting their (first) type annotation.
    This allows correct type hinting with, say, Converters,
    for example.
    """
    # the first argument is the type checkers' view, the second is ours
    args = typing_extensions.get_args(anno)[1:]
    return args[0]


def _get_converter_function(
    anno: typing.Union[typing.Type[converters.Converter], converters.Converter],
    name: str,
) -> typing.Callable[[context.CommandContext, str], typing.Any]:
    num_params = len(inspect.signature(anno.convert).parameters.values())

    # three parameters means an unbound method, so the converter has to be
    # instantiated first
    actual_anno: converters.Converter = anno() if num_params == 3 else anno  # type: ignore
    if num_params == 3:
        num_params -= 1

    if num_params != 2:
        raise ValueError(
            f"{_get_name(anno)} for {name} is invalid: converters must have exactly 2"
            " arguments."
        )

    return actual_anno.convert


def _get_converter(
    anno: type,
    name: str,
    type_to_converter: typing.Dict[type, typing.Type[converters.Converter]],
) -> typing.Callable[[context.CommandContext, str], typing.Any]:  # type: ignore
    if typing_extensions.get_origin(anno) == typing_extensions.Annotated:
        anno = _get_from_anno_type(anno)

    if isinstance(anno, converters.Converter):
        return _get_converter_function(anno, name)

    elif converter := type_to_converter.get(anno, None):
        return _get_converter_function(converter, name)

    elif typing_extensions.get_origin(anno) in (typing.Literal, typing_extensions.Literal):
        literals = typing_extensions.get_args(anno)
        return converters._LiteralConverter(literals).convert

    elif anno == bool:
        return lambda ctx, arg: _convert_to_bool(arg)

    elif anno == inspect._empty:
        return lambda ctx, arg: str(arg)

    else:
        return lambda ctx, arg: anno(arg)


def _get_params(
    signature: inspect.Signature,
    type_to_converter: typing.Dict[type, typing.Type[converters.Converter]],
) -> typing.List[Parameter]:
    cmd_params: typing.List[Parameter] = []

    # the first parameter is always the context
    for name, param in list(signature.parameters.items())[1:]:
        if param.kind in {param.VAR_POSITIONAL, param.VAR_KEYWORD}:
            raise ValueError("Commands cannot have variable arguments.")

        cmd_param = Parameter()
        cmd_param.name = name
        cmd_param.default = param.default
        cmd_param.kind = param.kind
        cmd_param.type = anno = param.annotation

        if typing_extensions.get_origin(anno) in UNION_TYPES:
            cmd_param.union = True
            for arg in typing_extensions.get_args(anno):
                if arg != NoneType:
                    converter = _get_converter(arg, name, type_to_converter)
                    cmd_param.converters.append(converter)
                elif not cmd_param.optional:
                    cmd_param.default = None
        else:
            converter = _get_converter(anno, name, type_to_converter)  # type: ignore
            cmd_param.converters.append(converter)

        if param.kind == param.KEYWORD_ONLY and anno == bool:
            if cmd_param.default is not False:
                raise ValueError(f"Switch {name} must default to False.")
            cmd_param.switch = True

        cmd_params.append(cmd_param)

    return cmd_params


def _convert(param: Parameter, ctx: context.CommandContext, arg: str) -> typing.Any:
    for converter in param.converters:
        try:
            return converter(ctx, arg)
        except Exception as e:
            if not param.union:
                if isinstance(e, errors.BadArgument):
                    raise
                raise errors.BadArgument(f"{param.name}: {e}") from e

    union_types = [t for t in typing_extensions.get_args(param.type) if t is not NoneType]
    union_names = tuple(_get_name(t) for t in union_types)
    raise errors.BadArgument(f'Could not convert "{arg}" into {" or ".join(union_names)}.')


@attrs.define(
    slots=True,
    kw_only=True,
    hash=False,
)
class Command:
    callback: typing.Callable[..., typing.Any] = attrs.field(default=None)
    "The function to be called for this command."
    name: str = attrs.field()
    "The name of the command."

    parameters: typing.List[Parameter] = attrs.field(factory=list)
    "The parameters of the command."
    help: typing.Optional[str] = attrs.field(default=None)
    """The long help text for the command."""
    brief: typing.Optional[str] = attrs.field(default=None)
    "The short help text for the command."

    checks: typing.List[typing.Callable[[context.CommandContext], bool]] = attrs.field(
        factory=list
    )
    """A list of checks for this command."""

    def __attrs_post_init__(self) -> None:
        self.parameters = _get_params(inspect.signature(self.callback), converters.TYPE_TO_CONVERTER)

        if self.help:
            self.help = inspect.cleandoc(self.help)
        else:
            self.help = inspect.getdoc(self.callback)

        if self.brief is None:
            self.brief = self.help.splitlines()[0] if self.help is not None else None

        if hasattr(self.callback, "__checks__"):
            self.checks = self.callback.__checks__

    def __hash__(self):
        return id(self)

    @property
    def usage(self) -> str:
        """
        A string displaying how the command can be used: its name and signature.
        """
        return f"{self.name} {self.signature}".strip()

    @property
    def flags(self) -> typing.Dict[str, Parameter]:
        """The keyword-only parameters, by their `--flag`."""
        return {p.flag: p for p in self.parameters if not p.positional}

    @property
    def signature(self) -> str:
        """Returns a POSIX-like signature useful for help output."""
        results = []

        for param in self.parameters:
            anno = param.type
            name = param.flag if not param.positional else param.name

            if typing_extensions.get_origin(anno) == typing_extensions.Annotated:
                anno = _get_from_anno_type(anno)

            if param.union:
                union_args = [a for a in typing_extensions.get_args(anno) if a is not NoneType]
                if len(union_args) == 1:
                    anno = union_args[0]

            value = param.name.rstrip("_").upper()
            if typing_extensions.get_origin(anno) in (typing.Literal, typing_extensions.Literal):
                # it's better to list the values it can be than display the variable name itself
                value = "|".join(str(v) for v in typing_extensions.get_args(anno))

            result_builder: typing.Deque[str] = collections.deque()
            if param.switch:
                result_builder.append(name)
            elif param.positional:
                result_builder.append(value if "|" in value else name)
            else:
                result_builder.append(f"{name} {value}")

            if param.optional and param.default is not None and not param.switch:
                if param.positional:
                    result_builder.append(f"={param.default}")

            if param.optional:
                result_builder.appendleft("[")
                result_builder.append("]")
            else:
                result_builder.appendleft("<")
                result_builder.append(">")

            results.append("".join(result_builder))

        return " ".join(results)

    def _run_checks(self, ctx: context.CommandContext) -> None:
        for c in self.checks:
            try:
                if not c(ctx):
                    raise errors.CheckFailure(ctx, check=c)
            except errors.CheckFailure as e:
                # pass in check function
                raise errors.CheckFailure(ctx, e.message, check=c)

    def parse(self, ctx: context.CommandContext) -> typing.Dict[str, typing.Any]:
        """
        Converts the raw arguments of a context into keyword arguments for
        the callback.

        Positional parameters consume plain tokens in order; keyword-only
        parameters are passed as `--flag value` or `--flag=value`, and
        keyword-only booleans as a bare `--flag`.

        Raises:
            `BadArgument`: For unknown flags, missing values or arguments,
            extra arguments, and anything a converter rejects.
        """
        flags = self.flags
        positional: typing.List[str] = []
        kwargs: typing.Dict[str, typing.Any] = {}

        tokens = iter(ctx.args)
        for token in tokens:
            if not token.startswith("--") or token == "--":
                positional.append(token)
                continue

            flag, has_value, value = token.partition("=")
            param = flags.get(flag)
            if param is None:
                raise errors.BadArgument(f"Unknown option {flag} for {self.name}.")
            if param.name in kwargs:
                raise errors.BadArgument(f"{flag} was passed more than once.")

            if param.switch:
                if has_value:
                    raise errors.BadArgument(f"{flag} does not take a value.")
                kwargs[param.name] = True
                continue

            if not has_value:
                value = next(tokens, None)
                if value is None:
                    raise errors.BadArgument(f"{flag} needs a value.")
            kwargs[param.name] = _convert(param, ctx, value)

        remaining = collections.deque(positional)
        for param in self.parameters:
            if param.positional:
                if remaining:
                    kwargs[param.name] = _convert(param, ctx, remaining.popleft())
                    continue
            elif param.name in kwargs:
                continue

            if not param.optional:
                raise errors.BadArgument(f"{param.name} is a required argument that is missing.")
            kwargs[param.name] = param.default

        if remaining:
            raise errors.BadArgument(f"Too many arguments passed to {self.name}.")

        return kwargs

    def __call__(self, ctx: context.CommandContext) -> typing.Any:
        """
        Parses the arguments, runs the checks and then the command.

        Args:
            ctx (`CommandContext`): The context to use for this command.
        """
        ctx.kwargs = self.parse(ctx)
        self._run_checks(ctx)
        return self.invoke(ctx)

    def invoke(self, ctx: context.CommandContext) -> typing.Any:
        """
        Runs the callback of this command with the already converted arguments.

        Args:
            ctx (`CommandContext`): The context to use for this command.
        """
        return self.callback(ctx, **ctx.kwargs)


def command(
    name: typing.Optional[str] = None,
    *,
    help: typing.Optional[str] = None,
    brief: typing.Optional[str] = None,
) -> typing.Callable[..., Command]:
    """
    A decorator to declare a function as a command.

    Parameters:
        name (`str`, optional): The name of the command.
        Defaults to the name of the function.

        help (`str`, optional): The long help text for the command.
        Defaults to the docstring of the function, if there is one.

        brief (`str`, optional): The short help text for the command.
        Defaults to the first line of the help text, if there is one.

    Returns:
        `Command`: The command object.
    """

    def wrapper(func):
        return Command(  # type: ignore
            callback=func,
            name=name or func.__name__,
            help=help,
            brief=brief,
        )

    return wrapper


# command typevar - can be the function or the command
CT = typing.TypeVar("CT", typing.Callable, Command)
