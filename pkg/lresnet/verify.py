"""
Randomised checks of the properties the residual connection rests on.

Every check draws its inputs from `numpy.random.default_rng(seed)`, in
fixed-size chunks, so the same seed reproduces the same result bit for bit.
Checks return a `PropertyResult`; they only raise on invalid arguments.
"""
import logging
import math
import typing

import attrs
import numpy as np
import typing_extensions

from . import errors
from .geometry import Curvature
from .geometry import CurvatureLike
from .geometry import Tolerances
from .geometry import _dot
from .geometry import arcosh_ratio
from .geometry import as_curvature
from .geometry import exp_map
from .geometry import from_poincare
from .geometry import lift_from_space
from .geometry import log_map_with_diagnostics
from .geometry import lorentz_distance
from .geometry import lorentz_inner
from .geometry import lorentz_norm
from .geometry import membership_error
from .geometry import poincare_distance
from .geometry import project_to_tangent
from .geometry import sample_points
from .geometry import sample_space
from .geometry import sinhc
from .geometry import squared_lorentz_distance
from .geometry import to_klein
from .grad import fd_oracle
from .grad import hl_layer_jacobian
from .grad import hyperbolic_layer
from .grad import lresnet_jacobians
from .grad import relative_error
from .residual import ResidualWeights
from .residual import lorentz_centroid
from .residual import lresnet_add
from .residual import pt_add
from .residual import scale
from .residual import space_add
from .residual import ts_add
from .toynet import LResNetModel
from .toynet import ResidualBlockConfig
from .toynet import loss_and_grad
from .utils import encode_array
from .utils import finite_or_none

__all__ = (
    "SCHEMA_VERSION",
    "PropertyResult",
    "check_lemma1",
    "check_noncommutativity",
    "check_proposition1",
    "demo_instability",
    "check_validity",
    "check_centroid",
    "check_gradients",
    "check_scaling_geodesic",
    "SUITES",
)

logger: logging.Logger = logging.getLogger("lresnet")

SCHEMA_VERSION = 1
CHUNK = 4096
"Trials are drawn and evaluated this many at a time."

PropositionMethod = typing_extensions.Literal["pt", "ts", "sa"]
StressMode = typing_extensions.Literal["poincare_boundary", "lorentz_coshdomain"]
ValidityMethod = typing_extensions.Literal["lresnet", "pt", "ts", "sa", "scale"]
GradientTarget = typing_extensions.Literal["lresnet", "hl", "network"]

COSINE_TOLERANCE = 1e-6
MIRROR_TOLERANCE = 1e-5
GRADIENT_TOLERANCE = 1e-4
VIOLATION_BUDGET = 0.01
"Construction violations allowed in the Proposition 1 check, as a share of trials."


def _failures_at_most_trials(instance: "PropertyResult", _, value: int) -> None:
    if not 0 <= value <= instance.trials:
        raise ValueError(f"failures must lie in [0, trials], not {value}.")


@attrs.define(slots=True, eq=False)
class PropertyResult:
    """The outcome of one randomised property check."""

    name: str = attrs.field()
    "What was checked."
    trials: int = attrs.field()
    "How many random cases were evaluated."
    failures: int = attrs.field(validator=_failures_at_most_trials)
    "How many of them violated the property."
    worst_violation: float = attrs.field(converter=float)
    "The worst value of the check's error measure; see `tolerance`."
    witness: typing.Tuple[np.ndarray, ...] = attrs.field(factory=tuple, converter=tuple)
    "The inputs of the worst case."
    seed: typing.Optional[int] = attrs.field(default=None)
    precision: int = attrs.field(default=64)
    "Floating point bits the check ran at."
    curvature: float = attrs.field(default=-1.0, converter=float)
    dim: typing.Optional[int] = attrs.field(default=None)
    tolerance: typing.Optional[float] = attrs.field(default=None)
    "The bound the error measure was held to, if there is one."
    details: typing.Dict[str, typing.Any] = attrs.field(factory=dict)
    "Check-specific extras."

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_record(self) -> typing.Dict[str, typing.Any]:
        """This result as a JSON-ready dict, witnesses as base64 of little-endian doubles."""
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "passed": self.passed,
            "trials": self.trials,
            "failures": self.failures,
            "worst_violation": finite_or_none(self.worst_violation),
            "tolerance": self.tolerance,
            "witness": [
                {"shape": list(np.shape(w)), "data": encode_array(w)} for w in self.witness
            ],
            "seed": self.seed,
            "precision": self.precision,
            "curvature": self.curvature,
            "dim": self.dim,
            "details": self.details,
        }


def _dtype(precision: int) -> typing.Type[np.floating]:
    if precision == 64:
        return np.float64
    if precision == 32:
        return np.float32
    raise ValueError(f"Precision must be 32 or 64, not {precision}.")


def _check_trials(trials: int) -> None:
    if trials < 1:
        raise ValueError(f"trials must be at least 1, not {trials}.")


def _chunks(trials: int) -> typing.Iterator[int]:
    done = 0
    while done < trials:
        size = min(CHUNK, trials - done)
        yield size
        done += size


@attrs.define(slots=True)
class _Tally:
    """Accumulates failures and keeps the inputs of the worst case seen."""

    failures: int = 0
    worst: float = -math.inf
    witness: typing.Tuple[np.ndarray, ...] = ()

    def add(
        self,
        errors_: np.ndarray,
        failed: np.ndarray,
        inputs: typing.Sequence[np.ndarray],
    ) -> None:
        self.failures += int(np.count_nonzero(failed))
        # NaN counts as the worst possible outcome
        scored = np.where(np.isnan(errors_), np.inf, errors_)
        index = int(np.argmax(scored))
        if scored[index] > self.worst or not self.witness:
            self.worst = float(errors_[index])
            self.witness = tuple(np.array(arr[index], dtype=np.float64) for arr in inputs)


def _cosine(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1)
    both_zero = norms == 0
    return np.where(both_zero, 1.0, _dot(a, b) / np.where(both_zero, 1.0, norms))


def check_lemma1(
    trials: int = 10_000,
    dim: int = 16,
    curvature: CurvatureLike = -1.0,
    sigma: float = 1.0,
    seed: int = 0,
    *,
    precision: int = 64,
) -> PropertyResult:
    """
    Checks that `√(−K)·‖w_x·x + w_y·y‖_L > √(w_x² + w_y²)` for random points
    and weights `w_x > 0`, `w_y ≥ 0`.

    Every tenth trial uses `w_y = 0`, where the two sides are equal; those
    pass when they agree to rounding and are counted in
    `details["boundary_trials"]`. The error measure is the negated margin
    `√(w_x² + w_y²) − LHS`, so the worst violation of a passing run is
    negative.
    """
    _check_trials(trials)
    curv = as_curvature(curvature)
    dtype = _dtype(precision)
    slack = 64 * math.sqrt(float(np.finfo(dtype).eps))
    rng = np.random.default_rng(seed)

    tally = _Tally()
    boundary = 0
    boundary_worst = 0.0
    offset = 0
    for size in _chunks(trials):
        x = sample_points(rng, size, dim, curv, sigma, dtype).data
        y = sample_points(rng, size, dim, curv, sigma, dtype).data
        w_x = rng.uniform(0.05, 2.0, size=size)
        w_y = rng.uniform(0.01, 2.0, size=size)
        on_boundary = (np.arange(offset, offset + size) % 10) == 0
        w_y[on_boundary] = 0.0
        offset += size

        u = w_x[:, None].astype(dtype) * x + w_y[:, None].astype(dtype) * y
        lhs = curv.sqrt_neg * lorentz_norm(u).astype(np.float64)
        rhs = np.hypot(w_x, w_y)
        violation = rhs - lhs

        boundary_gap = np.abs(violation[on_boundary]) / w_x[on_boundary]
        boundary += int(np.count_nonzero(on_boundary))
        if boundary_gap.size:
            boundary_worst = max(boundary_worst, float(np.max(boundary_gap)))

        failed = np.where(on_boundary, np.abs(violation) > slack * w_x, ~(violation < 0))
        measured = np.where(on_boundary, -np.inf, violation)
        tally.add(measured, failed, (x, y, np.stack([w_x, w_y], axis=-1)))

    if boundary:
        logger.debug(
            "lemma1: %d equality-boundary trial(s) with w_y = 0, worst relative gap %.3e.",
            boundary,
            boundary_worst,
        )
    return PropertyResult(
        name="lemma1",
        trials=trials,
        failures=tally.failures,
        worst_violation=tally.worst,
        witness=tally.witness,
        seed=seed,
        precision=precision,
        curvature=curv.k,
        dim=dim,
        tolerance=0.0,
        details={
            "min_margin": finite_or_none(-tally.worst),
            "boundary_trials": boundary,
            "boundary_worst_gap": boundary_worst,
            "sigma": sigma,
        },
    )


def _mirrored_pairs(
    rng: np.random.Generator, size: int, dim: int, curv: Curvature, sigma: float
) -> typing.Tuple[np.ndarray, np.ndarray]:
    space = sample_space(rng, size, dim, sigma)
    mirrored = space.copy()
    mirrored[:, -1] *= -1
    return lift_from_space(space, curv), lift_from_space(mirrored, curv)


def check_noncommutativity(
    trials: int = 1_000,
    dim: int = 16,
    curvature: CurvatureLike = -1.0,
    seed: int = 0,
    *,
    sigma: float = 1.0,
) -> PropertyResult:
    """
    For mirrored pairs (equal except for the sign of the last space
    component) checks that `z = pt_add(x, y)` and `z' = pt_add(y, x)` differ
    exactly by the sign of their last component.

    The error measure is the largest of `|z_n + z'_n|` and `|z_i − z'_i|`
    (other coordinates), each relative to `max(1, |z_i|)`.
    `details["noncommuting_pairs"]` counts pairs where `z ≠ z'`.
    """
    _check_trials(trials)
    if dim < 2:
        raise errors.DimensionError("Mirrored pairs need at least two space components.")
    curv = as_curvature(curvature)
    rng = np.random.default_rng(seed)

    tally = _Tally()
    differing = 0
    for size in _chunks(trials):
        x, y = _mirrored_pairs(rng, size, dim, curv, sigma)
        z = pt_add(x, y, curv)
        z_rev = pt_add(y, x, curv)

        expected = z_rev.copy()
        expected[:, -1] *= -1
        err = np.max(np.abs(z - expected) / np.maximum(1, np.abs(z)), axis=-1)
        differing += int(np.count_nonzero(np.abs(z[:, -1] - z_rev[:, -1]) > 1e-9))
        tally.add(err, ~(err < MIRROR_TOLERANCE), (x, y))

    return PropertyResult(
        name="noncommutativity",
        trials=trials,
        failures=tally.failures,
        worst_violation=tally.worst,
        witness=tally.witness,
        seed=seed,
        curvature=curv.k,
        dim=dim,
        tolerance=MIRROR_TOLERANCE,
        details={"noncommuting_pairs": differing, "sigma": sigma},
    )


def _pt_weights(x: np.ndarray, y: np.ndarray, curv: Curvature) -> np.ndarray:
    # the space part of pt_add(x, y) is w_x·x_s + w_y·y_s with these weights
    s = curv.sqrt_neg
    c_u = arcosh_ratio(np.maximum(s * y[:, 0], 1))
    c_v = c_u * _dot(x[:, 1:], y[:, 1:]) / (-1.0 / curv.k + x[:, 0] / s)
    v = c_u[:, None] * y[:, 1:] + c_v[:, None] * x[:, 1:]
    v_time = c_v * (curv.radius + x[:, 0])
    alpha = np.sqrt(-curv.k * np.maximum(_dot(v, v) - v_time * v_time, 0))
    ratio = sinhc(alpha)
    return np.stack([np.cosh(alpha) + ratio * c_v, ratio * c_u], axis=-1)


def _ts_weights(x: np.ndarray, y: np.ndarray, tangent: np.ndarray, curv: Curvature) -> np.ndarray:
    s = curv.sqrt_neg
    c_1 = arcosh_ratio(np.maximum(s * x[:, 0], 1))
    c_2 = arcosh_ratio(np.maximum(s * y[:, 0], 1))
    return np.stack([tangent[:, 0] * c_1, tangent[:, 1] * c_2], axis=-1)


def check_proposition1(
    method: PropositionMethod = "pt",
    trials: int = 1_000,
    dim: int = 16,
    curvature: CurvatureLike = -1.0,
    seed: int = 0,
    *,
    sigma: float = 1.0,
) -> PropertyResult:
    """
    Checks that the output of `pt`, `ts` or `sa` addition lies on the
    geodesic ray from the origin through an `lresnet_add` output with
    suitable weights.

    The weights are derived in closed form from the inputs. Rays from the
    origin are straight in the Klein model, so the check compares Klein
    images: the cosine similarity must be at least `1 − 1e−6`. The error
    measure is `1 − cosine`.

    A non-positive derived weight is a construction violation: it is logged
    with its inputs and counted in `details["construction_violations"]`,
    and the check fails if those exceed 1% of the trials.
    """
    if method not in ("pt", "ts", "sa"):
        raise ValueError(f'method must be "pt", "ts" or "sa", not {method!r}.')
    _check_trials(trials)
    curv = as_curvature(curvature)
    rng = np.random.default_rng(seed)

    tally = _Tally()
    violations = 0
    worst_cosine = 1.0
    for size in _chunks(trials):
        x = sample_points(rng, size, dim, curv, sigma).data
        y = sample_points(rng, size, dim, curv, sigma).data

        if method == "pt":
            z = pt_add(x, y, curv)
            weights = _pt_weights(x, y, curv)
        elif method == "ts":
            tangent = rng.uniform(0.1, 2.0, size=(size, 2))
            z = np.stack(
                [ts_add(x[i], y[i], tangent[i, 0], tangent[i, 1], curv) for i in range(size)]
            )
            weights = _ts_weights(x, y, tangent, curv)
        else:
            z = space_add(x, y, curv)
            weights = np.ones((size, 2))

        valid = np.all(weights > 0, axis=-1) & np.all(np.isfinite(weights), axis=-1)
        for index in np.flatnonzero(~valid):
            logger.warning(
                "proposition1/%s: construction gave weights %s for x=%s, y=%s.",
                method,
                weights[index].tolist(),
                x[index].tolist(),
                y[index].tolist(),
            )
        violations += int(np.count_nonzero(~valid))

        safe = np.where(valid[:, None], weights, 1.0)
        m = np.stack(
            [lresnet_add(x[i], y[i], ResidualWeights(*safe[i]), curv) for i in range(size)]
        )

        cosine = _cosine(to_klein(m), to_klein(z))
        err = np.where(valid, 1 - cosine, -np.inf)
        if np.any(valid):
            worst_cosine = min(worst_cosine, float(np.min(cosine[valid])))
        tally.add(err, valid & ~(cosine >= 1 - COSINE_TOLERANCE), (x, y, weights))

    failures = tally.failures
    if violations > VIOLATION_BUDGET * trials:
        failures = min(trials, failures + violations)
    logger.info("proposition1/%s: worst Klein cosine %.12f.", method, worst_cosine)

    return PropertyResult(
        name=f"proposition1/{method}",
        trials=trials,
        failures=failures,
        worst_violation=tally.worst,
        witness=tally.witness,
        seed=seed,
        curvature=curv.k,
        dim=dim,
        tolerance=COSINE_TOLERANCE,
        details={
            "method": method,
            "worst_cosine": worst_cosine,
            "construction_violations": violations,
            "sigma": sigma,
        },
    )


def _poincare_boundary(rng: np.random.Generator, dim: int, samples: int) -> PropertyResult:
    radius = 1 - 1e-8
    directions = rng.normal(size=(samples, dim))
    directions[0] = np.eye(dim)[0]
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    near = radius * directions
    inner = rng.normal(size=(samples, dim))
    inner *= rng.uniform(0.0, 0.5, size=(samples, 1)) / np.linalg.norm(inner, axis=-1, keepdims=True)

    reference = poincare_distance(near, inner, dtype=np.float32)

    a = from_poincare(near).astype(np.float32)
    b = from_poincare(inner).astype(np.float32)
    production = lorentz_distance(a, b, -1.0)

    return _stress_result(
        "poincare_boundary", reference, production, (near[0], inner[0]), dim
    )


def _lorentz_coshdomain(rng: np.random.Generator, dim: int, samples: int) -> PropertyResult:
    magnitude = 1e4
    directions = rng.normal(size=(samples, dim))
    directions[0] = np.eye(dim)[0]
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    x = lift_from_space((magnitude * directions).astype(np.float32), -1.0)

    tol = Tolerances.for_dtype(np.float32)
    with np.errstate(invalid="ignore", divide="ignore"):
        reference, _ = log_map_with_diagnostics(x, x, -1.0, tol, clamp=False)
    production, clamped = log_map_with_diagnostics(x, x, -1.0, tol)

    result = _stress_result(
        "lorentz_coshdomain",
        np.max(np.abs(reference), axis=-1),
        np.max(np.abs(production), axis=-1),
        (x[0],),
        dim,
    )
    result.details["clamped"] = int(np.count_nonzero(clamped))
    return result


def _stress_result(
    mode: str,
    reference: np.ndarray,
    production: np.ndarray,
    witness: typing.Tuple[np.ndarray, ...],
    dim: int,
) -> PropertyResult:
    bad_reference = int(np.count_nonzero(~np.isfinite(reference)))
    bad_production = int(np.count_nonzero(~np.isfinite(production)))
    demonstrated = bad_reference > 0
    failures = int(not demonstrated) + int(bad_production > 0)

    if demonstrated:
        logger.info(
            "%s: reference path produced %d non-finite value(s) out of %d.",
            mode,
            bad_reference,
            reference.size,
        )
    else:
        logger.warning("%s: reference path stayed finite; nothing was demonstrated.", mode)

    return PropertyResult(
        name=f"stress/{mode}",
        trials=2,
        failures=failures,
        worst_violation=float(bad_production),
        witness=witness,
        precision=32,
        curvature=-1.0,
        dim=dim,
        tolerance=0.0,
        details={
            "mode": mode,
            "samples": int(reference.size),
            "reference_nonfinite": bad_reference,
            "production_nonfinite": bad_production,
            "reference_example": finite_or_none(reference.ravel()[0]),
            "production_example": finite_or_none(production.ravel()[0]),
        },
    )


def demo_instability(
    mode: StressMode, *, dim: int = 16, samples: int = 256, seed: int = 0
) -> PropertyResult:
    """
    Shows where naive 32-bit hyperbolic arithmetic breaks and that the
    production path does not.

    `poincare_boundary` evaluates the Poincaré distance for points at
    radius `1 − 1e−8`, where `1 − ‖x‖²` rounds to 0; the production path
    maps the same points to the Lorentz model in 64-bit and takes the
    clamped Lorentz distance in 32-bit. `lorentz_coshdomain` runs the
    unclamped log map on `x = y` with space components of norm `1e4`, where
    rounding pushes `K⟨x,x⟩_L` below 1; the clamped log map gets the same
    inputs.

    The result passes when the reference path produced at least one
    non-finite value and the production path produced none. The first
    sample of each run is axis-aligned, which is enough on its own.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1.")
    rng = np.random.default_rng(seed)
    if mode == "poincare_boundary":
        return _poincare_boundary(rng, dim, samples)
    if mode == "lorentz_coshdomain":
        return _lorentz_coshdomain(rng, dim, samples)
    raise ValueError(f"Unknown stress mode {mode!r}.")


def check_validity(
    method: ValidityMethod = "lresnet",
    trials: int = 10_000,
    dim: int = 16,
    curvature: CurvatureLike = -1.0,
    seed: int = 0,
    *,
    precision: int = 64,
    sigma: float = 1.0,
) -> PropertyResult:
    """
    Checks that every addition (and the scaling) returns points on the
    hyperboloid: `|K⟨z,z⟩_L − 1|` below `1e−6` at 64-bit and `1e−3` at 32-bit.
    """
    if method not in ("lresnet", "pt", "ts", "sa", "scale"):
        raise ValueError(f"Unknown method {method!r}.")
    _check_trials(trials)
    curv = as_curvature(curvature)
    dtype = _dtype(precision)
    bound = 1e-6 if precision == 64 else 1e-3
    rng = np.random.default_rng(seed)

    tally = _Tally()
    for size in _chunks(trials):
        x = sample_points(rng, size, dim, curv, sigma, dtype).data
        y = sample_points(rng, size, dim, curv, sigma, dtype).data
        params = np.stack(
            [rng.uniform(0.1, 2.0, size=size), rng.normal(0.0, 1.0, size=size)], axis=-1
        )

        if method == "lresnet":
            z = np.stack(
                [lresnet_add(x[i], y[i], tuple(params[i]), curv) for i in range(size)]
            )
        elif method == "pt":
            z = pt_add(x, y, curv)
        elif method == "ts":
            z = ts_add(x, y, 1.0, 1.0, curv)
        elif method == "sa":
            z = space_add(x, y, curv)
        else:
            z = np.stack([scale(x[i], params[i, 0], curv) for i in range(size)])

        err = membership_error(z, curv).astype(np.float64)
        tally.add(err, ~(err < bound), (x, y, params))

    return PropertyResult(
        name=f"validity/{method}",
        trials=trials,
        failures=tally.failures,
        worst_violation=tally.worst,
        witness=tally.witness,
        seed=seed,
        precision=precision,
        curvature=curv.k,
        dim=dim,
        tolerance=bound,
        details={"method": method, "sigma": sigma},
    )


def check_centroid(
    trials: int = 1_000,
    dim: int = 16,
    curvature: CurvatureLike = -1.0,
    seed: int = 0,
    *,
    epsilon: float = 1e-3,
    sigma: float = 1.0,
) -> PropertyResult:
    """
    Checks that the equal-weight `lresnet_add(x, y)` minimises the sum of
    squared Lorentzian distances to `x` and `y` locally: stepping a geodesic
    distance `epsilon` away in a random direction never decreases the sum.

    The error measure is the relative decrease. `details["max_centroid_gap"]`
    records how far `lresnet_add` is from `lorentz_centroid` of the pair.
    """
    _check_trials(trials)
    curv = as_curvature(curvature)
    rng = np.random.default_rng(seed)

    tally = _Tally()
    gap = 0.0
    for size in _chunks(trials):
        x = sample_points(rng, size, dim, curv, sigma).data
        y = sample_points(rng, size, dim, curv, sigma).data
        z = lresnet_add(x, y, None, curv)
        gap = max(gap, float(np.max(np.abs(z - lorentz_centroid(np.stack([x, y]), None, curv)))))

        direction = project_to_tangent(z, rng.normal(size=z.shape), curv)
        length = np.sqrt(np.maximum(lorentz_inner(direction, direction), 1e-300))
        p = exp_map(z, epsilon * direction / length[:, None], curv)

        def objective(point: np.ndarray) -> np.ndarray:
            return squared_lorentz_distance(point, x, curv) + squared_lorentz_distance(
                point, y, curv
            )

        at_z = objective(z)
        err = (at_z - objective(p)) / np.maximum(1, np.abs(at_z))
        tally.add(err, err > 1e-12, (x, y))

    return PropertyResult(
        name="centroid",
        trials=trials,
        failures=tally.failures,
        worst_violation=tally.worst,
        witness=tally.witness,
        seed=seed,
        curvature=curv.k,
        dim=dim,
        tolerance=1e-12,
        details={"epsilon": epsilon, "max_centroid_gap": gap, "sigma": sigma},
    )


def _lresnet_gradient_error(
    rng: np.random.Generator, dim: int, curv: Curvature
) -> typing.Tuple[float, typing.Tuple[np.ndarray, ...]]:
    x = sample_points(rng, 1, dim, curv).data[0]
    y = sample_points(rng, 1, dim, curv).data[0]
    w_x = rng.uniform(0.1, 2.0)
    w_y = rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 2.0)
    weights = ResidualWeights(w_x, w_y)

    j_x, j_y, g_wy = lresnet_jacobians(x, y, weights, curv)
    fd_x = fd_oracle(lambda p: lresnet_add(p, y, weights, curv), x)
    fd_y = fd_oracle(lambda p: lresnet_add(x, p, weights, curv), y)
    fd_w = fd_oracle(lambda p: lresnet_add(x, y, (w_x, p[0]), curv), [w_y])

    err = max(
        relative_error(j_x.matrix, fd_x.matrix),
        relative_error(j_y.matrix, fd_y.matrix),
        relative_error(g_wy[:, None], fd_w.matrix),
    )
    return err, (x, y, np.array([w_x, w_y]))


def _hl_gradient_error(
    rng: np.random.Generator, dim: int, curv: Curvature
) -> typing.Tuple[float, typing.Tuple[np.ndarray, ...]]:
    n_out = int(rng.integers(2, dim + 1))
    weight = rng.normal(0.0, 1.0 / math.sqrt(dim), size=(n_out, dim))
    x = sample_points(rng, 1, dim, curv).data[0]

    analytic = hl_layer_jacobian(weight, x, curv)
    numeric = fd_oracle(lambda p: hyperbolic_layer(weight, p, curv), x)
    return relative_error(analytic.matrix, numeric.matrix), (weight, x)


def _network_gradient_error(
    rng: np.random.Generator, dim: int, curv: Curvature, probes: int = 10
) -> typing.Tuple[float, typing.Tuple[np.ndarray, ...]]:
    classes = min(3, dim)
    net = LResNetModel.initialize(rng, dim, 2, classes, ResidualBlockConfig("lresnet"), curv)
    net.w_y = rng.uniform(0.5, 1.5, size=net.depth)
    points = sample_points(rng, 16, dim, curv).data
    labels = rng.integers(0, classes, size=16)

    _, grads = loss_and_grad(net, points, labels)
    params = [layer.weight for layer in net.layers] + [net.w_y]
    analytic = [g for g in grads.weights] + [grads.w_y]

    picked_analytic = []
    picked_numeric = []
    for _ in range(probes):
        which = int(rng.integers(0, len(params)))
        flat = params[which].reshape(-1)
        index = int(rng.integers(0, flat.size))
        original = flat[index]

        def loss_at(value: np.ndarray) -> float:
            flat[index] = value[0]
            try:
                return loss_and_grad(net, points, labels)[0]
            finally:
                flat[index] = original

        picked_numeric.append(fd_oracle(loss_at, [original]).matrix[0, 0])
        picked_analytic.append(analytic[which].reshape(-1)[index])

    err = relative_error(np.array(picked_analytic), np.array(picked_numeric))
    return err, (points, labels.astype(np.float64))


def check_gradients(
    target: GradientTarget = "lresnet",
    trials: int = 100,
    dim: int = 8,
    curvature: CurvatureLike = -1.0,
    seed: int = 0,
) -> PropertyResult:
    """
    Compares analytic derivatives with the central difference oracle
    (step `1e−5`) on random configurations; each must match within `1e−4`.

    `lresnet` covers both Jacobians and `∂z/∂w_y`, `hl` the hyperbolic
    layer, and `network` the loss gradient of a two-block network at 10
    random parameter coordinates.
    """
    runners = {
        "lresnet": _lresnet_gradient_error,
        "hl": _hl_gradient_error,
        "network": _network_gradient_error,
    }
    if target not in runners:
        raise ValueError(f"Unknown gradient target {target!r}.")
    _check_trials(trials)
    curv = as_curvature(curvature)
    rng = np.random.default_rng(seed)

    failures = 0
    worst = -math.inf
    witness: typing.Tuple[np.ndarray, ...] = ()
    for _ in range(trials):
        err, inputs = runners[target](rng, dim, curv)
        if not err < GRADIENT_TOLERANCE:
            failures += 1
        if err > worst or not witness:
            worst, witness = err, inputs

    return PropertyResult(
        name=f"gradients/{target}",
        trials=trials,
        failures=failures,
        worst_violation=worst,
        witness=witness,
        seed=seed,
        curvature=curv.k,
        dim=dim,
        tolerance=GRADIENT_TOLERANCE,
        details={"target": target},
    )


def check_scaling_geodesic(
    trials: int = 1_000,
    dim: int = 16,
    curvature: CurvatureLike = -1.0,
    seed: int = 0,
    *,
    sigma: float = 1.0,
) -> PropertyResult:
    """
    Checks that `scale(m, γ)` stays on the ray from the origin through `m`:
    their Klein images point the same way, and the Klein norm grows with γ.
    """
    _check_trials(trials)
    curv = as_curvature(curvature)
    rng = np.random.default_rng(seed)

    tally = _Tally()
    for size in _chunks(trials):
        m = sample_points(rng, size, dim, curv, sigma).data
        gamma = rng.uniform(0.1, 3.0, size=size)
        scaled = np.stack([scale(m[i], gamma[i], curv) for i in range(size)])

        before = to_klein(m)
        after = to_klein(scaled)
        err = 1 - _cosine(before, after)
        grows = np.linalg.norm(after, axis=-1) >= np.linalg.norm(before, axis=-1)
        ordered = grows == (gamma >= 1)
        tally.add(err, ~(err < 1e-12) | ~ordered, (m, gamma[:, None]))

    return PropertyResult(
        name="scaling_geodesic",
        trials=trials,
        failures=tally.failures,
        worst_violation=tally.worst,
        witness=tally.witness,
        seed=seed,
        curvature=curv.k,
        dim=dim,
        tolerance=1e-12,
        details={"sigma": sigma},
    )


SUITES: typing.Tuple[str, ...] = (
    "lemma1",
    "noncommutativity",
    "proposition1",
    "validity",
    "centroid",
    "gradients",
    "scaling",
)
"The suite names the `verify` command accepts."
