import logging
import sys
import traceback
import typing

import numpy as np
import typing_extensions

from . import checks
from . import errors
from .bench import BenchConfig
from .bench import run_benchmark
from .command import Command
from .command import command as _command
from .context import CommandContext
from .converters import DepthsConverter
from .converters import MethodListConverter
from .converters import PrecisionConverter
from .converters import ThreadsConverter
from .geometry import Curvature
from .residual import METHODS
from .residual import ScaleFactor
from .toynet import BlockMethod
from .toynet import LResNetModel
from .toynet import ResidualBlockConfig
from .toynet import SyntheticHierarchyDataset
from .toynet import oversmoothing_diagnostic
from .toynet import train as train_model
from .utils import sanitize_message
from .verify import SCHEMA_VERSION
from .verify import GradientTarget
from .verify import PropertyResult
from .verify import StressMode
from .verify import ValidityMethod
from .verify import check_centroid
from .verify import check_gradients
from .verify import check_lemma1
from .verify import check_noncommutativity
from .verify import check_proposition1
from .verify import check_scaling_geodesic
from .verify import check_validity
from .verify import demo_instability

__all__ = ("__version__", "EXIT_OK", "EXIT_FAILED", "EXIT_USAGE", "EXIT_ERROR", "Harness", "harness", "main")

__version__ = "0.1.0"

logger: logging.Logger = logging.getLogger("lresnet")

EXIT_OK = 0
EXIT_FAILED = 1
"Some checked property did not hold."
EXIT_USAGE = 2
EXIT_ERROR = 3
"Capacity and runtime errors."

# (flag, attribute on the parsed options, allowed values)
_GLOBAL_OPTIONS = {
    "--out": ("out_dir", None),
    "--format": ("report_format", ("json", "csv")),
    "--log-level": ("log_level", ("DEBUG", "INFO", "WARNING", "ERROR")),
}

Suite = typing_extensions.Literal[
    "lemma1",
    "noncommutativity",
    "proposition1",
    "validity",
    "centroid",
    "gradients",
    "scaling",
]


class Harness:
    """
    Dispatches a command line to one of its commands.

    Parameters:
        on_command_error (`typing.Callable`, optional): A function that takes
        in a `CommandContext` and `Exception` and returns the exit code. By
        default, usage errors are logged briefly and return 2, and anything
        else is logged with its traceback and returns 3.
    """

    def __init__(
        self,
        on_command_error: typing.Optional[
            typing.Callable[[CommandContext, Exception], int]
        ] = None,
    ) -> None:
        self.commands: typing.Dict[str, Command] = {}
        self.on_command_error = (  # type: ignore
            on_command_error if on_command_error is not None else self.on_command_error
        )

    def add_command(self, command: Command) -> None:
        """Add a command to the harness.

        Args:
            command (`Command`): The command to add.
        """
        if command.name not in self.commands:
            self.commands[command.name] = command
        else:
            raise ValueError(f"Duplicate Command! Multiple commands share the name {command.name}")

    def command(self, name: typing.Optional[str] = None, **kwargs: typing.Any) -> typing.Callable[..., Command]:
        """
        A decorator to declare a function as a command of this harness.
        Takes the same arguments as `lresnet.command`.
        """

        def wrapper(func) -> Command:
            cmd = _command(name, **kwargs)(func)
            self.add_command(cmd)
            return cmd

        return wrapper

    def usage(self) -> str:
        """The overall help text: global options, then one line per command."""
        lines = [
            "usage: lresnet [--out DIR] [--format json|csv] [--log-level LEVEL] <command> ...",
            "",
            "commands:",
        ]
        for cmd in self.commands.values():
            lines.append(f"  {cmd.usage}")
            if cmd.brief:
                lines.append(f"      {cmd.brief}")
        return "\n".join(lines)

    def on_command_error(self, context: CommandContext, error: Exception) -> int:
        """
        A function that is called when a command errors out.
        By default, this function outputs to the default logging place.

        Args:
            context (`CommandContext`): The context in which the error occured.
            error (`Exception`): The exception raised by the command.

        Returns:
            `int`: The exit code.
        """
        if isinstance(error, (errors.BadArgument, errors.CheckFailure)):
            logger.error("%s: %s", context.invoked_name, error)
            if context.command is not None:
                print(f"usage: lresnet {context.command.usage}", file=sys.stderr)
            return EXIT_USAGE

        out = traceback.format_exception(type(error), error, error.__traceback__)
        logger.error(
            "Exception in {}:{}{}".format(
                f"lresnet cmd / {context.invoked_name}",
                "\n" if len(out) > 1 else " ",
                "".join(out),
            ),
        )
        return EXIT_ERROR

    def _split_options(
        self, argv: typing.Sequence[str]
    ) -> typing.Tuple[typing.Dict[str, str], typing.List[str]]:
        options: typing.Dict[str, str] = {"out_dir": ".", "report_format": "json", "log_level": "INFO"}
        rest: typing.List[str] = []

        tokens = iter(argv)
        for token in tokens:
            flag, has_value, value = token.partition("=")
            if flag not in _GLOBAL_OPTIONS:
                rest.append(token)
                continue

            attribute, allowed = _GLOBAL_OPTIONS[flag]
            if not has_value:
                value = next(tokens, None)
                if value is None:
                    raise errors.BadArgument(f"{flag} needs a value.")
            if attribute == "log_level":
                value = value.upper()
            if allowed is not None and value not in allowed:
                raise errors.BadArgument(f"{flag} must be one of {', '.join(allowed)}, not {value}.")
            options[attribute] = value

        return options, rest

    def run(self, argv: typing.Sequence[str]) -> int:
        """
        Runs one command line, without the program name.

        Returns:
            `int`: The exit code.
        """
        try:
            options, rest = self._split_options(argv)
        except errors.BadArgument as e:
            print(f"lresnet: {e}\n\n{self.usage()}", file=sys.stderr)
            return EXIT_USAGE

        logging.basicConfig(
            level=options["log_level"], format="%(asctime)s %(levelname)s %(name)s: %(message)s"
        )
        logger.setLevel(options["log_level"])

        if not rest or rest[0] in {"help", "--help", "-h"}:
            print(self.usage(), file=sys.stdout if rest else sys.stderr)
            return EXIT_OK if rest else EXIT_USAGE

        invoked_name = rest[0]
        cmd = self.commands.get(invoked_name)
        if cmd is None:
            print(
                f"lresnet: unknown command {sanitize_message(invoked_name)!r}\n\n{self.usage()}",
                file=sys.stderr,
            )
            return EXIT_USAGE

        args = rest[1:]
        if "--help" in args or "-h" in args:
            print(f"usage: lresnet {cmd.usage}\n\n{cmd.help or ''}".rstrip())
            return EXIT_OK

        ctx = CommandContext(self, args, options["out_dir"], options["report_format"])
        ctx.invoked_name = invoked_name
        ctx.command = cmd

        try:
            result = cmd(ctx)
        except Exception as e:
            return self.on_command_error(ctx, e)
        return EXIT_OK if result is None else int(result)


harness = Harness()


@harness.command(brief="Time the four residual additions on random batches.")
@checks.at_least("dim", 2)
@checks.at_least("batch", 1)
@checks.at_least("iterations", 1)
@checks.at_least("repeats", 1)
@checks.at_least("warmup", 0)
@checks.positive("sigma")
def bench(
    ctx: CommandContext,
    *,
    dim: int = 2048,
    batch: int = 10_000,
    curvature: Curvature = Curvature(),
    precision: typing_extensions.Annotated[int, PrecisionConverter] = 32,
    iterations: int = 100,
    repeats: int = 5,
    warmup: int = 2,
    seed: typing.Optional[int] = None,
    threads: typing_extensions.Annotated[typing.Union[int, str], ThreadsConverter] = 1,
    methods: typing_extensions.Annotated[typing.Tuple[str, ...], MethodListConverter] = METHODS,
    sigma: float = 1.0,
) -> int:
    """
    Times `--iterations` full-batch additions per method and reports the
    median of `--repeats` runs, with speedups relative to lresnet. Only
    single-threaded runs are marked comparable.
    """
    config = BenchConfig(
        dim=dim,
        batch=batch,
        curvature=curvature,
        precision=precision,
        iterations=iterations,
        repeats=repeats,
        warmup=warmup,
        seed=ctx.resolve_seed(seed),
        threads=threads,
        methods=methods,
        sigma=sigma,
    )
    report = run_benchmark(config)
    if not report.comparable:
        logger.warning("Multi-threaded timings are not comparable between methods.")

    ctx.write_report("bench", report.to_record(), report.to_rows())
    return EXIT_OK


def _verify_runs(
    suite: str,
    method: typing.Optional[str],
    target: typing.Optional[str],
    common: typing.Dict[str, typing.Any],
    sigma: typing.Dict[str, typing.Any],
    precision: int,
) -> typing.List[typing.Callable[[], PropertyResult]]:
    if suite == "lemma1":
        return [lambda: check_lemma1(**common, **sigma, precision=precision)]
    if suite == "noncommutativity":
        return [lambda: check_noncommutativity(**common, **sigma)]
    if suite == "proposition1":
        methods = [method] if method else ["pt", "ts", "sa"]
        return [lambda m=m: check_proposition1(m, **common, **sigma) for m in methods]
    if suite == "validity":
        methods = [method] if method else ["lresnet", "pt", "ts", "sa", "scale"]
        return [
            lambda m=m: check_validity(m, **common, **sigma, precision=precision) for m in methods
        ]
    if suite == "centroid":
        return [lambda: check_centroid(**common, **sigma)]
    if suite == "gradients":
        targets = [target] if target else ["lresnet", "hl", "network"]
        return [lambda t=t: check_gradients(t, **common) for t in targets]
    return [lambda: check_scaling_geodesic(**common, **sigma)]


@harness.command(brief="Run the property suites and write one JSON report per check.")
@checks.positive("trials")
@checks.at_least("dim", 2)
@checks.positive("sigma")
def verify(
    ctx: CommandContext,
    suite: typing.Optional[Suite] = None,
    *,
    all_: bool = False,
    trials: typing.Optional[int] = None,
    dim: typing.Optional[int] = None,
    curvature: Curvature = Curvature(),
    sigma: typing.Optional[float] = None,
    precision: typing_extensions.Annotated[int, PrecisionConverter] = 64,
    method: typing.Optional[ValidityMethod] = None,
    target: typing.Optional[GradientTarget] = None,
    seed: typing.Optional[int] = None,
) -> int:
    """
    Runs one property suite, or every suite with `--all`, and exits with 0
    only if every check passed. `--method` picks the residual method for
    `proposition1` and `validity`, `--target` the function for `gradients`;
    without them every method (or target) is checked. `--precision` applies
    to `lemma1` and `validity`.
    """
    if (suite is None) == (not all_):
        raise errors.BadArgument("Pass either a suite or --all.")
    if method is not None and suite not in ("proposition1", "validity"):
        raise errors.BadArgument("--method only applies to proposition1 and validity.")
    if method is not None and suite == "proposition1" and method not in ("pt", "ts", "sa"):
        raise errors.BadArgument("proposition1 compares lresnet against pt, ts or sa.")
    if target is not None and suite != "gradients":
        raise errors.BadArgument("--target only applies to gradients.")

    common: typing.Dict[str, typing.Any] = {"curvature": curvature, "seed": ctx.resolve_seed(seed)}
    if trials is not None:
        common["trials"] = trials
    if dim is not None:
        common["dim"] = dim
    sigma_kwargs = {"sigma": sigma} if sigma is not None else {}

    suites = typing_extensions.get_args(Suite) if all_ else (suite,)
    results: typing.List[PropertyResult] = []
    for name in suites:
        for run in _verify_runs(name, method, target, common, sigma_kwargs, precision):
            result = run()
            log = logger.info if result.passed else logger.error
            log(
                "%s: %s, %d/%d failures, worst %s",
                result.name,
                "passed" if result.passed else "FAILED",
                result.failures,
                result.trials,
                result.worst_violation,
            )
            ctx.write_json(f"verify-{result.name}", result.to_record())
            results.append(result)

    rows = [
        {
            "name": r.name,
            "passed": r.passed,
            "trials": r.trials,
            "failures": r.failures,
            "worst_violation": r.worst_violation,
            "tolerance": r.tolerance,
        }
        for r in results
    ]
    summary = {
        "schema_version": SCHEMA_VERSION,
        "name": "verify",
        "passed": all(r.passed for r in results),
        "results": rows,
    }
    ctx.write_report("verify-summary", summary, rows)
    return EXIT_OK if summary["passed"] else EXIT_FAILED


@harness.command(brief="Show where naive 32-bit hyperbolic arithmetic overflows.")
@checks.at_least("dim", 2)
@checks.positive("samples")
def stress(
    ctx: CommandContext,
    mode: StressMode,
    *,
    dim: int = 16,
    samples: int = 256,
    seed: typing.Optional[int] = None,
) -> int:
    """
    Runs an instability demo. Exits with 0 if the reference computation
    produced NaN or Inf and the production path stayed finite.
    """
    result = demo_instability(mode, dim=dim, samples=samples, seed=ctx.resolve_seed(seed))
    ctx.write_json(result.name, result.to_record())
    return EXIT_OK if result.passed else EXIT_FAILED


@harness.command(brief="Train the toy residual network, or run the over-smoothing diagnostic.")
@checks.at_least("layers", 0)
@checks.at_least("epochs", 0)
@checks.at_least("lr", 0)
@checks.positive("batch_size")
@checks.positive("points")
@checks.positive("classes")
@checks.at_least("dim", 2)
@checks.positive("scale")
def train(
    ctx: CommandContext,
    *,
    method: BlockMethod = "lresnet",
    layers: int = 4,
    epochs: int = 200,
    lr: float = 0.05,
    batch_size: typing.Optional[int] = None,
    points: int = 600,
    classes: int = 3,
    dim: int = 8,
    scale: typing.Optional[float] = None,
    train_scale: bool = False,
    curvature: Curvature = Curvature(),
    oversmoothing: bool = False,
    depths: typing_extensions.Annotated[typing.Tuple[int, ...], DepthsConverter] = (4, 8, 16, 32),
    seed: typing.Optional[int] = None,
) -> int:
    """
    Trains a `--layers` deep network on a synthetic hierarchy and writes the
    loss and accuracy curve as CSV. With `--oversmoothing`, trains one
    network per depth in `--depths` with `--method` blocks and one without
    residual connections, and writes the table of accuracies and
    representation spreads. `--scale` applies a factor after every lresnet
    block, and `--train-scale` lets training update it.
    """
    if classes > dim:
        raise errors.BadArgument("--classes cannot exceed --dim; logits are space components.")
    if scale is not None and method != "lresnet":
        raise errors.BadArgument("--scale only applies to lresnet blocks.")
    if train_scale and scale is None:
        raise errors.BadArgument("--train-scale needs --scale for the initial factor.")

    seed = ctx.resolve_seed(seed)
    dataset = SyntheticHierarchyDataset.generate(
        num_points=points, num_classes=classes, dim=dim, seed=seed, curvature=curvature
    )

    if oversmoothing:
        rows = oversmoothing_diagnostic(depths, method, dataset, seed=seed, epochs=epochs, lr=lr)
        records = [row.to_record() for row in rows]
        ctx.write_csv(f"oversmoothing-{method}", records)
        ctx.write_json(
            f"oversmoothing-{method}",
            {
                "schema_version": SCHEMA_VERSION,
                "name": "oversmoothing",
                "method": method,
                "depths": list(depths),
                "epochs": epochs,
                "seed": seed,
                "rows": records,
            },
        )
        return EXIT_OK

    block = ResidualBlockConfig(
        method, scale=ScaleFactor(scale, trainable=train_scale) if scale is not None else None
    )
    net = LResNetModel.initialize(
        np.random.default_rng(seed), dim, layers, classes, block, curvature
    )
    curve = train_model(net, dataset, epochs=epochs, lr=lr, seed=seed, batch_size=batch_size)

    ctx.write_csv(f"train-{method}", curve.to_rows())
    ctx.write_json(
        f"train-{method}",
        {
            "schema_version": SCHEMA_VERSION,
            "name": "train",
            "method": method,
            "layers": layers,
            "epochs": epochs,
            "lr": lr,
            "seed": seed,
            "initial_loss": curve.losses[0],
            "final_loss": curve.losses[-1],
            "final_accuracy": curve.final_accuracy,
            "monotone": curve.monotone,
            "w_y": net.w_y,
            "gamma": net.gamma if block.scale is not None else None,
        },
    )
    logger.info(
        "%s with %d layers: loss %.4f -> %.4f, accuracy %.3f",
        method,
        layers,
        curve.losses[0],
        curve.losses[-1],
        curve.final_accuracy,
    )
    return EXIT_OK


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> None:
    """The `lresnet` console script."""
    if argv is None:
        argv = sys.argv[1:]
    sys.exit(harness.run(argv))
