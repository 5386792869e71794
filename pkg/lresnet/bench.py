"""
Wall-clock timing of the four residual additions on large random batches.

This is the only module that reads the clock.
"""
import logging
import os
import platform
import time
import typing

import attrs
import numpy as np

from . import errors
from .geometry import Curvature
from .geometry import as_curvature
from .geometry import lift_from_space
from .geometry import sample_space
from .residual import METHODS
from .residual import lresnet_add
from .residual import pt_add
from .residual import space_add
from .residual import ts_add
from .utils import resolve_threads

__all__ = (
    "BenchConfig",
    "BenchReport",
    "generate_inputs",
    "estimate_memory",
    "available_memory",
    "run_benchmark",
)

logger: logging.Logger = logging.getLogger("lresnet")

# peak number of (batch, dim + 1) arrays alive while timing the widest method
_LIVE_ARRAYS = 10


def _at_least(minimum: int) -> typing.Callable[[typing.Any, "attrs.Attribute", int], None]:
    def validator(_, attribute: "attrs.Attribute", value: int) -> None:
        if value < minimum:
            raise ValueError(f"{attribute.name} must be at least {minimum}, not {value}.")

    return validator


def _validate_methods(_, __, value: typing.Tuple[str, ...]) -> None:
    if not value:
        raise ValueError("At least one method must be benchmarked.")
    unknown = [m for m in value if m not in METHODS]
    if unknown:
        raise ValueError(f"Unknown method(s) {unknown}; expected some of {METHODS}.")


def _validate_threads(_, __, value: typing.Union[int, str]) -> None:
    if value != "auto" and not (isinstance(value, int) and value >= 1):
        raise ValueError(f'threads must be a positive integer or "auto", not {value!r}.')


@attrs.define(frozen=True, slots=True)
class BenchConfig:
    """What to time, and how."""

    dim: int = attrs.field(default=2048, validator=_at_least(2))
    "Space dimension of the points."
    batch: int = attrs.field(default=10_000, validator=_at_least(1))
    "Points per batch; every timed addition processes the whole batch."
    curvature: Curvature = attrs.field(default=Curvature(), converter=as_curvature)
    precision: int = attrs.field(default=32, validator=attrs.validators.in_((32, 64)))
    "Floating point bits of the inputs."
    iterations: int = attrs.field(default=100, validator=_at_least(1))
    "Additions per timed repeat."
    repeats: int = attrs.field(default=5, validator=_at_least(1))
    "Timed repeats; the median is reported."
    warmup: int = attrs.field(default=2, validator=_at_least(0))
    "Untimed additions per method before timing."
    seed: int = attrs.field(default=0)
    threads: typing.Union[int, str] = attrs.field(default=1, validator=_validate_threads)
    "1 for the single-threaded comparison, or `\"auto\"`."
    methods: typing.Tuple[str, ...] = attrs.field(
        default=METHODS, converter=tuple, validator=_validate_methods
    )
    sigma: float = attrs.field(default=1.0, converter=float)
    "Standard deviation of the sampled space components."

    @property
    def dtype(self) -> typing.Type[np.floating]:
        return np.float32 if self.precision == 32 else np.float64

    @property
    def comparable(self) -> bool:
        """Only single-threaded timings are compared between methods."""
        return self.threads == 1


def _positive_times(_, __, value: typing.Dict[str, float]) -> None:
    if any(not t > 0 for t in value.values()):
        raise ValueError("Benchmark times must be positive.")


@attrs.define(frozen=True, slots=True)
class BenchReport:
    """Median wall times per method, with what they were measured on."""

    config: BenchConfig = attrs.field()
    times: typing.Dict[str, float] = attrs.field(validator=_positive_times)
    "Median seconds for `iterations` additions, per method."
    repeats: typing.Dict[str, typing.List[float]] = attrs.field()
    "Every timed repeat, per method."
    environment: typing.Dict[str, typing.Any] = attrs.field(factory=dict)

    @property
    def comparable(self) -> bool:
        return self.config.comparable

    @property
    def speedups(self) -> typing.Dict[str, float]:
        """How many times slower than `lresnet` each method was."""
        if "lresnet" not in self.times:
            return {}
        base = self.times["lresnet"]
        return {method: t / base for method, t in self.times.items()}

    def to_record(self) -> typing.Dict[str, typing.Any]:
        config = attrs.asdict(self.config)
        config["curvature"] = self.config.curvature.k
        config["methods"] = list(self.config.methods)
        return {
            "schema_version": 1,
            "name": "bench",
            "config": config,
            "times": self.times,
            "per_addition": {m: t / self.config.iterations for m, t in self.times.items()},
            "speedups": self.speedups,
            "repeats": self.repeats,
            "comparable": self.comparable,
            "environment": self.environment,
        }

    def to_rows(self) -> typing.List[typing.Dict[str, typing.Any]]:
        speedups = self.speedups
        return [
            {
                "method": method,
                "dim": self.config.dim,
                "batch": self.config.batch,
                "precision": self.config.precision,
                "iterations": self.config.iterations,
                "median_seconds": t,
                "speedup_vs_lresnet": speedups.get(method),
                "comparable": self.comparable,
            }
            for method, t in self.times.items()
        ]


def generate_inputs(config: BenchConfig) -> typing.Tuple[np.ndarray, np.ndarray]:
    """The two random batches every method is timed on. Depends only on the config."""
    rng = np.random.default_rng(config.seed)
    x = lift_from_space(
        sample_space(rng, config.batch, config.dim, config.sigma, config.dtype), config.curvature
    )
    y = lift_from_space(
        sample_space(rng, config.batch, config.dim, config.sigma, config.dtype), config.curvature
    )
    return x, y


def estimate_memory(config: BenchConfig) -> int:
    """A rough upper bound of the bytes a run needs."""
    itemsize = np.dtype(config.dtype).itemsize
    return _LIVE_ARRAYS * config.batch * (config.dim + 1) * itemsize


def available_memory() -> typing.Optional[int]:
    """Physical memory in bytes, if the platform can tell."""
    try:
        return os.sysconf("SC_PAGE_SIZE") * os.sysconf("SC_PHYS_PAGES")
    except (AttributeError, ValueError, OSError):
        return None


def _environment(threads: int) -> typing.Dict[str, typing.Any]:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "platform": platform.platform(),
        "machine": platform.machine(),
        "cpu_count": os.cpu_count(),
        "threads": threads,
    }


def _adders(
    config: BenchConfig, threads: int
) -> typing.Dict[str, typing.Callable[[np.ndarray, np.ndarray], np.ndarray]]:
    curv = config.curvature
    return {
        "lresnet": lambda x, y: lresnet_add(x, y, None, curv, threads=threads),
        "pt": lambda x, y: pt_add(x, y, curv, threads=threads),
        "ts": lambda x, y: ts_add(x, y, 1.0, 1.0, curv, threads=threads),
        "sa": lambda x, y: space_add(x, y, curv, threads=threads),
    }


def run_benchmark(config: BenchConfig) -> BenchReport:
    """
    Times `config.iterations` full-batch additions per method, `repeats`
    times after `warmup` untimed additions, with a monotonic clock.

    Raises:
        `CapacityError`: If the configuration needs more memory than the
        machine has, or allocation fails.
    """
    needed = estimate_memory(config)
    available = available_memory()
    if available is not None and needed > available:
        raise errors.CapacityError(
            f"A {config.batch} x {config.dim} benchmark needs about {needed / 2**30:.1f} GiB,"
            f" but only {available / 2**30:.1f} GiB of memory exist."
        )

    threads = resolve_threads(config.threads)
    adders = _adders(config, threads)
    times: typing.Dict[str, float] = {}
    repeats: typing.Dict[str, typing.List[float]] = {}

    try:
        x, y = generate_inputs(config)
        for method in config.methods:
            add = adders[method]
            for _ in range(config.warmup):
                add(x, y)

            timings = []
            for repeat in range(config.repeats):
                start = time.perf_counter()
                for _ in range(config.iterations):
                    add(x, y)
                timings.append(time.perf_counter() - start)
                logger.debug("%s repeat %d: %.6f s", method, repeat, timings[-1])

            repeats[method] = timings
            times[method] = float(np.median(timings))
            logger.info(
                "%s: median %.6f s for %d additions", method, times[method], config.iterations
            )
    except MemoryError as e:
        raise errors.CapacityError(
            f"Ran out of memory benchmarking a {config.batch} x {config.dim} batch."
        ) from e

    return BenchReport(config, times, repeats, _environment(threads))
