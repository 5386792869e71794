"""
The Lorentz (hyperboloid) model of hyperbolic space.

Points are stored time component first: `[x_t, x_1, ..., x_n]`. Every
function here works on plain numpy arrays of shape `(..., n + 1)` and
broadcasts over the leading axes, so the same code handles a single point
and a batch. The attrs classes at the bottom of the module are validated
value objects for the places where inputs come from outside.

Array functions do not re-check membership of their inputs on every call;
`LorentzPoint`, `LorentzBatch` and `check_membership` are where inputs get
rejected.
"""
import logging
import math
import typing

import attrs
import numpy as np

from . import errors
from .utils import ArrayLike
from .utils import coords_of

__all__ = (
    "Curvature",
    "CurvatureLike",
    "as_curvature",
    "Tolerances",
    "LorentzPoint",
    "TangentVector",
    "LorentzBatch",
    "lorentz_inner",
    "lorentz_norm",
    "origin",
    "lift_from_space",
    "exp_map",
    "log_map",
    "log_map_with_diagnostics",
    "parallel_transport",
    "project_to_tangent",
    "to_klein",
    "to_poincare",
    "from_poincare",
    "poincare_distance",
    "squared_lorentz_distance",
    "lorentz_distance",
    "membership_error",
    "check_membership",
    "renormalize",
    "sinhc",
    "arcosh_ratio",
    "sample_space",
    "sample_points",
)

logger: logging.Logger = logging.getLogger("lresnet")

# below this, parallel transport treats the pair as degenerate
TRANSPORT_DENOMINATOR_FLOOR = 1e-12


def _validate_curvature(_, __, value: float) -> None:
    if not math.isfinite(value) or value >= 0:
        raise errors.ManifoldError(
            f"Curvature must be a finite, strictly negative number, not {value}."
        )


@attrs.define(frozen=True, slots=True)
class Curvature:
    """The constant negative curvature `K` of a Lorentz model."""

    k: float = attrs.field(default=-1.0, converter=float, validator=_validate_curvature)
    "The curvature value. Always finite and `< 0`."

    @property
    def sqrt_neg(self) -> float:
        """`√(−K)`."""
        return math.sqrt(-self.k)

    @property
    def radius(self) -> float:
        """`√(−1/K)`, the time component of the origin."""
        return math.sqrt(-1.0 / self.k)

    def __float__(self) -> float:
        return self.k


CurvatureLike = typing.Union[Curvature, float, int]


def as_curvature(value: CurvatureLike) -> Curvature:
    """Turns a number into a `Curvature`, validating it. Curvatures are passed through."""
    return value if isinstance(value, Curvature) else Curvature(value)


def _resolve_curvature(
    curvature: typing.Optional[CurvatureLike], *values: typing.Any
) -> Curvature:
    if curvature is not None:
        return as_curvature(curvature)

    for value in values:
        found = getattr(value, "curvature", None)
        if isinstance(found, Curvature):
            return found
        base = getattr(value, "base", None)
        if base is not None and isinstance(getattr(base, "curvature", None), Curvature):
            return base.curvature
    return Curvature()


def _positive(_, attribute: "attrs.Attribute", value: float) -> None:
    if not value > 0:
        raise ValueError(f"{attribute.name} must be positive, not {value}.")


@attrs.define(frozen=True, slots=True)
class Tolerances:
    """Numerical tolerances used when validating and evaluating Lorentz operations."""

    membership: float = attrs.field(default=1e-9, validator=_positive)
    "Allowed absolute deviation of `K⟨x,x⟩_L` from `1`."
    orthogonality: float = attrs.field(default=1e-9, validator=_positive)
    "Allowed `|⟨base, v⟩_L|` for tangent vectors, relative to `max(1, ‖base‖‖v‖)`."
    taylor_switch: float = attrs.field(default=1e-6, validator=_positive)
    "Below this argument, `sinh(α)/α` and `cosh⁻¹(β)/√(β²−1)` use their series."
    time_scaled: bool = attrs.field(default=False)
    """
    If `True`, the membership allowance is multiplied by `max(1, −K·x_t²)`,
    which is how the rounding error of `⟨x,x⟩_L` grows. Off by default; the
    sampler turns it on for points it lifts itself.
    """

    @classmethod
    def for_dtype(cls, dtype: typing.Any, **overrides: typing.Any) -> "Tolerances":
        """The default tolerances for a floating point precision."""
        if np.dtype(dtype) == np.float32:
            overrides = {"membership": 1e-5, "orthogonality": 1e-5, **overrides}
        return cls(**overrides)


def _check_pair(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[-1] != y.shape[-1]:
        raise errors.DimensionError(
            f"Vectors have different lengths: {x.shape[-1]} and {y.shape[-1]}."
        )
    if x.shape[-1] < 2:
        raise errors.DimensionError(
            "Lorentz vectors need a time component and at least one space component."
        )


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", a, b)


def lorentz_inner(x: ArrayLike, y: ArrayLike) -> np.ndarray:
    """
    The Lorentzian inner product `−x_t·y_t + x_s·y_s`.

    Args:
        x: A vector (or batch of vectors) of length `n + 1`.
        y: A vector (or batch of vectors) of length `n + 1`.

    Returns:
        The inner product, reduced over the last axis.

    Raises:
        `DimensionError`: If the lengths differ or are below 2.
    """
    x = coords_of(x)
    y = coords_of(y)
    _check_pair(x, y)
    return _dot(x[..., 1:], y[..., 1:]) - x[..., 0] * y[..., 0]


def lorentz_norm(x: ArrayLike) -> np.ndarray:
    """The Lorentzian norm `√|⟨x,x⟩_L|`. NaN inputs propagate."""
    return np.sqrt(np.abs(lorentz_inner(x, x)))


def origin(curvature: CurvatureLike, n: int, dtype: typing.Any = np.float64) -> np.ndarray:
    """
    The origin `[√(−1/K), 0, ..., 0]` of an `n`-dimensional Lorentz model.

    Args:
        curvature: The curvature `K`.
        n (`int`): The number of space components, at least 1.
        dtype: The floating point type of the result.
    """
    if n < 1:
        raise errors.DimensionError("The Lorentz model needs at least one space dimension.")

    point = np.zeros(n + 1, dtype=dtype)
    point[0] = as_curvature(curvature).radius
    return point


def lift_from_space(space: ArrayLike, curvature: CurvatureLike = -1.0) -> np.ndarray:
    """
    Completes space components into a point by recomputing the time
    component as `√(‖x_s‖² − 1/K)`.

    Args:
        space: Space components of shape `(..., n)`.
        curvature: The curvature `K`.

    Returns:
        The point(s) of shape `(..., n + 1)`.
    """
    space = coords_of(space)
    k = as_curvature(curvature).k
    time = np.sqrt(_dot(space, space) - 1.0 / k)
    return np.concatenate([time[..., None], space], axis=-1)


def sinhc(alpha: np.ndarray, taylor_switch: float = 1e-6) -> np.ndarray:
    """`sinh(α)/α`, switching to `1 + α²/6` for `α` below `taylor_switch`."""
    alpha = np.asarray(alpha)
    small = alpha < taylor_switch
    safe = np.where(small, 1, alpha)
    return np.where(small, 1 + alpha * alpha / 6, np.sinh(safe) / safe)


def arcosh_ratio(beta: np.ndarray, taylor_switch: float = 1e-6) -> np.ndarray:
    """
    `cosh⁻¹(β)/√(β² − 1)` for `β ≥ 1`, switching to `1 − (β − 1)/3` when
    `β` is within `taylor_switch` of 1.
    """
    beta = np.asarray(beta)
    near = (beta - 1) < taylor_switch
    safe = np.where(near, 2, beta)
    exact = np.arccosh(safe) / np.sqrt((safe - 1) * (safe + 1))
    return np.where(near, 1 - (beta - 1) / 3, exact)


def exp_map(
    base: ArrayLike,
    v: ArrayLike,
    curvature: typing.Optional[CurvatureLike] = None,
    tolerances: typing.Optional[Tolerances] = None,
) -> np.ndarray:
    """
    The exponential map `cosh(α)·x + (sinh(α)/α)·v` with `α = √(−K⟨v,v⟩_L)`.

    Args:
        base: The base point `x`.
        v: A tangent vector at `x`.
        curvature: The curvature. Taken from `base` if it is a `LorentzPoint`.
        tolerances (`Tolerances`, optional): Defaults per precision.

    Returns:
        The point reached by following the geodesic from `x` along `v`.

    Raises:
        `InvalidTangentError`: If `⟨v,v⟩_L` is negative beyond tolerance.
    """
    k = _resolve_curvature(curvature, base, v).k
    x = coords_of(base)
    v = coords_of(v)
    _check_pair(x, v)
    tol = tolerances or Tolerances.for_dtype(x.dtype)

    vv = lorentz_inner(v, v)
    scale = np.maximum(1, _dot(v, v))
    if np.any(vv < -tol.orthogonality * scale):
        raise errors.InvalidTangentError(
            "Tangent vectors must be space-like: got a negative Lorentzian self product"
            f" of {float(np.min(vv))}."
        )

    alpha = np.sqrt(-k * np.maximum(vv, 0))
    return np.cosh(alpha)[..., None] * x + sinhc(alpha, tol.taylor_switch)[..., None] * v


def log_map_with_diagnostics(
    base: ArrayLike,
    y: ArrayLike,
    curvature: typing.Optional[CurvatureLike] = None,
    tolerances: typing.Optional[Tolerances] = None,
    *,
    clamp: bool = True,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    The logarithmic map, also reporting where `β = K⟨x,y⟩_L` had to be clamped.

    With `clamp=False` this is the reference formula exactly as written,
    without clamping and without the series branch, so rounding that pushes
    `β` below 1 yields NaN. It exists to demonstrate that failure.

    Args:
        base: The base point `x`.
        y: The target point.
        curvature: The curvature. Taken from the points if they carry one.
        tolerances (`Tolerances`, optional): Defaults per precision.
        clamp (`bool`): Whether to clamp `β` to `max(β, 1)`.

    Returns:
        The tangent vector at `x` and a boolean mask of where `β < 1` was seen.
    """
    k = _resolve_curvature(curvature, base, y).k
    x = coords_of(base)
    y = coords_of(y)
    _check_pair(x, y)
    tol = tolerances or Tolerances.for_dtype(x.dtype)

    beta = k * lorentz_inner(x, y)
    clamped = beta < 1

    if clamp:
        beta = np.maximum(beta, 1)
        coef = arcosh_ratio(beta, tol.taylor_switch)
    else:
        with np.errstate(invalid="ignore", divide="ignore"):
            coef = np.arccosh(beta) / np.sqrt(beta * beta - 1)

    if clamp and np.any(clamped):
        logger.debug("log_map clamped %d value(s) of beta to 1.", int(np.count_nonzero(clamped)))

    return coef[..., None] * (y - beta[..., None] * x), clamped


def log_map(
    base: ArrayLike,
    y: ArrayLike,
    curvature: typing.Optional[CurvatureLike] = None,
    tolerances: typing.Optional[Tolerances] = None,
) -> np.ndarray:
    """
    The logarithmic map `(cosh⁻¹(β)/√(β²−1))·(y − β·x)` with `β = K⟨x,y⟩_L`,
    clamped to `β ≥ 1`. Never produces NaN for finite inputs.

    Args:
        base: The base point `x`.
        y: The target point.
        curvature: The curvature. Taken from the points if they carry one.
        tolerances (`Tolerances`, optional): Defaults per precision.

    Returns:
        The tangent vector at `x` pointing at `y`.
    """
    return log_map_with_diagnostics(base, y, curvature, tolerances)[0]


def parallel_transport(
    x: ArrayLike,
    y: ArrayLike,
    z: ArrayLike,
    curvature: typing.Optional[CurvatureLike] = None,
) -> np.ndarray:
    """
    Transports a tangent vector `z` at `x` to the tangent space at `y`:
    `z + (⟨y,z⟩_L / (−1/K − ⟨x,y⟩_L))·(x + y)`.

    Raises:
        `DegeneratePairError`: If the denominator is below `1e-12` in magnitude.
    """
    k = _resolve_curvature(curvature, x, y, z).k
    x = coords_of(x)
    y = coords_of(y)
    z = coords_of(z)
    _check_pair(x, y)
    _check_pair(x, z)

    denom = -1.0 / k - lorentz_inner(x, y)
    if np.any(np.abs(denom) < TRANSPORT_DENOMINATOR_FLOOR):
        raise errors.DegeneratePairError(
            "Parallel transport is undefined for this pair: the denominator vanished."
        )

    coef = lorentz_inner(y, z) / denom
    return z + coef[..., None] * (x + y)


def project_to_tangent(
    x: ArrayLike, v: ArrayLike, curvature: typing.Optional[CurvatureLike] = None
) -> np.ndarray:
    """The Lorentz-orthogonal projection `v − K⟨x,v⟩_L·x` of `v` onto the tangent space at `x`."""
    k = _resolve_curvature(curvature, x).k
    x = coords_of(x)
    v = coords_of(v)
    return v - (k * lorentz_inner(x, v))[..., None] * x


def to_klein(x: ArrayLike) -> np.ndarray:
    """The Klein model image `x_s / x_t`. Geodesics there are straight lines."""
    x = coords_of(x)
    return x[..., 1:] / x[..., :1]


def to_poincare(x: ArrayLike, curvature: typing.Optional[CurvatureLike] = None) -> np.ndarray:
    """The Poincaré ball image `x_s / (x_t + √(−1/K))`, which lies in the unit ball."""
    radius = _resolve_curvature(curvature, x).radius
    x = coords_of(x)
    return x[..., 1:] / (x[..., :1] + radius)


def from_poincare(p: ArrayLike, curvature: CurvatureLike = -1.0) -> np.ndarray:
    """
    The inverse of `to_poincare`: `√(−1/K)·[1 + ‖p‖², 2p] / (1 − ‖p‖²)`.

    Raises:
        `DomainError`: If `p` is not strictly inside the unit ball.
    """
    radius = as_curvature(curvature).radius
    p = coords_of(p)
    sq = _dot(p, p)
    if np.any(sq >= 1):
        raise errors.DomainError("Poincaré points must lie strictly inside the unit ball.")

    denom = (1 - sq)[..., None]
    time = radius * (1 + sq)[..., None] / denom
    return np.concatenate([time, 2 * radius * p / denom], axis=-1)


def poincare_distance(
    x: ArrayLike, y: ArrayLike, dtype: typing.Optional[typing.Any] = None
) -> np.ndarray:
    """
    The curvature −1 Poincaré distance
    `cosh⁻¹(1 + 2‖x−y‖² / ((1−‖x‖²)(1−‖y‖²)))`.

    The domain check happens on the inputs as given; the formula is then
    evaluated in `dtype` (defaults to the inputs' type). Near the boundary
    the low precision evaluation can divide by zero, which shows up as Inf
    or NaN instead of raising.

    Raises:
        `DimensionError`: If the lengths differ.
        `DomainError`: If either argument is on or outside the unit ball.
    """
    x = coords_of(x)
    y = coords_of(y)
    if x.shape[-1] != y.shape[-1]:
        raise errors.DimensionError(
            f"Vectors have different lengths: {x.shape[-1]} and {y.shape[-1]}."
        )

    for arg in (x, y):
        wide = arg.astype(np.float64)
        if np.any(_dot(wide, wide) >= 1):
            raise errors.DomainError(
                "Poincaré points must lie strictly inside the unit ball."
            )

    work = np.dtype(dtype) if dtype is not None else np.result_type(x, y)
    x = x.astype(work)
    y = y.astype(work)
    diff = x - y

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = 2 * _dot(diff, diff) / ((1 - _dot(x, x)) * (1 - _dot(y, y)))
        return np.arccosh(1 + ratio)


def squared_lorentz_distance(
    x: ArrayLike, y: ArrayLike, curvature: typing.Optional[CurvatureLike] = None
) -> np.ndarray:
    """`‖x − y‖²_L = 2/K − 2⟨x,y⟩_L`, floored at zero against rounding."""
    k = _resolve_curvature(curvature, x, y).k
    return np.maximum(2.0 / k - 2 * lorentz_inner(x, y), 0)


def lorentz_distance(
    x: ArrayLike,
    y: ArrayLike,
    curvature: typing.Optional[CurvatureLike] = None,
) -> np.ndarray:
    """The geodesic distance `cosh⁻¹(max(K⟨x,y⟩_L, 1)) / √(−K)`."""
    curv = _resolve_curvature(curvature, x, y)
    beta = np.maximum(curv.k * lorentz_inner(x, y), 1)
    return np.arccosh(beta) / curv.sqrt_neg


def membership_error(
    x: ArrayLike, curvature: typing.Optional[CurvatureLike] = None
) -> np.ndarray:
    """`|K⟨x,x⟩_L − 1|`, zero for points exactly on the hyperboloid `⟨x,x⟩_L = 1/K`."""
    k = _resolve_curvature(curvature, x).k
    return np.abs(k * lorentz_inner(x, x) - 1)


def _membership_slack(x: np.ndarray, k: float, tol: Tolerances) -> typing.Union[float, np.ndarray]:
    if not tol.time_scaled:
        return tol.membership
    return tol.membership * np.maximum(1, -k * x[..., 0] * x[..., 0])


def check_membership(
    x: ArrayLike,
    curvature: typing.Optional[CurvatureLike] = None,
    tolerances: typing.Optional[Tolerances] = None,
) -> None:
    """
    Rejects points that are not on the upper sheet of the hyperboloid.

    Raises:
        `ManifoldError`: With the worst offending row in the message.
    """
    k = _resolve_curvature(curvature, x).k
    x = coords_of(x)
    tol = tolerances or Tolerances.for_dtype(x.dtype)

    rows = x.reshape(-1, x.shape[-1])
    err = membership_error(rows, k)
    slack = _membership_slack(rows, k, tol)
    bad = ~np.isfinite(err) | (err > slack) | ~(rows[:, 0] > 0)
    if np.any(bad):
        row = int(np.flatnonzero(bad)[0])
        raise errors.ManifoldError(
            f"Row {row} is not on the hyperboloid"
            f" (|K<x,x>_L - 1| = {float(err[row]):.3e}, time = {float(rows[row, 0]):.6g})."
        )


def renormalize(x: ArrayLike, curvature: typing.Optional[CurvatureLike] = None) -> np.ndarray:
    """Explicitly projects a time-like vector back onto the hyperboloid: `x / (√(−K)·‖x‖_L)`."""
    curv = _resolve_curvature(curvature, x)
    x = coords_of(x)
    return x / (curv.sqrt_neg * lorentz_norm(x))[..., None]


def sample_space(
    rng: np.random.Generator,
    m: int,
    n: int,
    sigma: float = 1.0,
    dtype: typing.Any = np.float64,
) -> np.ndarray:
    """I.i.d. Gaussian space components of shape `(m, n)`, drawn in 64-bit then cast."""
    return rng.normal(0.0, sigma, size=(m, n)).astype(dtype, copy=False)


def sample_points(
    rng: np.random.Generator,
    m: int,
    n: int,
    curvature: CurvatureLike = -1.0,
    sigma: float = 1.0,
    dtype: typing.Any = np.float64,
) -> "LorentzBatch":
    """
    Random on-manifold points: Gaussian space components lifted onto the
    hyperboloid in the target precision.

    Args:
        rng (`numpy.random.Generator`): The source of randomness.
        m (`int`): Number of points.
        n (`int`): Space dimension.
        curvature: The curvature.
        sigma (`float`): Standard deviation of the space components.
        dtype: Precision of the returned batch.
    """
    curv = as_curvature(curvature)
    data = lift_from_space(sample_space(rng, m, n, sigma, dtype), curv)
    # rounding of the lift itself grows with x_t²
    tolerances = Tolerances.for_dtype(dtype, time_scaled=True)
    return LorentzBatch(data=data, curvature=curv, tolerances=tolerances)


def _frozen_array(value: typing.Any) -> np.ndarray:
    array = np.array(coords_of(value), copy=True)
    array.setflags(write=False)
    return array


@attrs.define(frozen=True, slots=True, eq=False)
class LorentzPoint:
    """A validated point on the hyperboloid, time component first."""

    coords: np.ndarray = attrs.field(converter=_frozen_array)
    "The coordinates `[x_t, x_s...]`. Read-only."
    curvature: Curvature = attrs.field(default=Curvature(), converter=as_curvature)
    "The curvature of the model the point lives in."
    tolerances: typing.Optional[Tolerances] = attrs.field(default=None, repr=False)
    "Tolerances to validate with. Defaults per precision."

    def __attrs_post_init__(self) -> None:
        if self.coords.ndim != 1 or self.coords.shape[0] < 2:
            raise errors.DimensionError(
                "A point needs a time component and at least one space component."
            )
        check_membership(self.coords, self.curvature, self.tolerances)

    @classmethod
    def from_space(cls, space: ArrayLike, curvature: CurvatureLike = -1.0) -> "LorentzPoint":
        """Lifts space components onto the hyperboloid."""
        return cls(lift_from_space(space, curvature), curvature)

    @classmethod
    def origin(cls, curvature: CurvatureLike = -1.0, n: int = 2) -> "LorentzPoint":
        """The origin of an `n`-dimensional model."""
        return cls(origin(curvature, n), curvature)

    @property
    def time(self) -> float:
        """The time-like component."""
        return float(self.coords[0])

    @property
    def space(self) -> np.ndarray:
        """The space-like components."""
        return self.coords[1:]

    @property
    def dim(self) -> int:
        """The number of space components."""
        return self.coords.shape[0] - 1

    def log(self, other: "LorentzPoint") -> "TangentVector":
        """The tangent vector at this point that points at `other`."""
        return TangentVector(self, log_map(self.coords, other.coords, self.curvature))

    def __array__(self, dtype: typing.Any = None, copy: typing.Any = None) -> np.ndarray:
        return self.coords if dtype is None else self.coords.astype(dtype)


@attrs.define(frozen=True, slots=True, eq=False)
class TangentVector:
    """A vector in the tangent space of `base`."""

    base: LorentzPoint = attrs.field()
    "The point whose tangent space this vector belongs to."
    vec: np.ndarray = attrs.field(converter=_frozen_array)
    "The ambient coordinates of the vector. Read-only."

    def __attrs_post_init__(self) -> None:
        base = self.base.coords
        _check_pair(base, self.vec)

        tol = self.base.tolerances or Tolerances.for_dtype(base.dtype)
        product = abs(float(lorentz_inner(base, self.vec)))
        scale = max(1.0, float(np.linalg.norm(base) * np.linalg.norm(self.vec)))
        if product > tol.orthogonality * scale:
            raise errors.InvalidTangentError(
                f"Vector is not tangent at its base point (<base, v>_L = {product})."
            )

    @property
    def curvature(self) -> Curvature:
        """The curvature of the base point's model."""
        return self.base.curvature

    def exp(self) -> LorentzPoint:
        """Follows the geodesic from the base point along this vector."""
        return LorentzPoint(exp_map(self.base.coords, self.vec, self.curvature), self.curvature)

    def transport(self, to: LorentzPoint) -> "TangentVector":
        """Parallel transports this vector to the tangent space at `to`."""
        moved = parallel_transport(self.base.coords, to.coords, self.vec, self.curvature)
        return TangentVector(to, moved)

    def __array__(self, dtype: typing.Any = None, copy: typing.Any = None) -> np.ndarray:
        return self.vec if dtype is None else self.vec.astype(dtype)


def _batch_array(value: typing.Any) -> np.ndarray:
    array = np.ascontiguousarray(coords_of(value))
    if array.ndim != 2:
        raise errors.DimensionError("A batch must be a 2D array of points, one per row.")
    return array


@attrs.define(frozen=True, slots=True, eq=False)
class LorentzBatch:
    """
    `m` points of one model stored contiguously, row-major, time
    component first in each row.
    """

    data: np.ndarray = attrs.field(converter=_batch_array)
    "The `(m, n + 1)` array of points."
    curvature: Curvature = attrs.field(default=Curvature(), converter=as_curvature)
    "The curvature shared by every row."
    validate: bool = attrs.field(default=True, repr=False, kw_only=True)
    "Whether to check every row for membership on construction."
    tolerances: typing.Optional[Tolerances] = attrs.field(default=None, repr=False, kw_only=True)
    "Tolerances to validate with. Defaults per precision."

    def __attrs_post_init__(self) -> None:
        if self.data.shape[1] < 2:
            raise errors.DimensionError(
                "Points need a time component and at least one space component."
            )
        if self.validate:
            check_membership(self.data, self.curvature, self.tolerances)

    @property
    def dim(self) -> int:
        """The number of space components `n`."""
        return self.data.shape[1] - 1

    @property
    def rows(self) -> int:
        """The number of points `m`."""
        return self.data.shape[0]

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def astype(self, dtype: typing.Any) -> "LorentzBatch":
        """A copy of this batch in another precision."""
        tolerances = None
        if self.tolerances is not None:
            tolerances = Tolerances.for_dtype(dtype, time_scaled=self.tolerances.time_scaled)
        return LorentzBatch(
            self.data.astype(dtype), self.curvature, validate=self.validate, tolerances=tolerances
        )

    def __len__(self) -> int:
        return self.rows

    def __getitem__(self, index: int) -> LorentzPoint:
        return LorentzPoint(self.data[index], self.curvature)

    def __array__(self, dtype: typing.Any = None, copy: typing.Any = None) -> np.ndarray:
        return self.data if dtype is None else self.data.astype(dtype)
