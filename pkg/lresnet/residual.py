"""
Hyperbolic residual connections: the weighted-centroid connection
(`lresnet_add`) and the three earlier ways of adding two points of a
Lorentz model, plus the optional norm scaling.

Every function broadcasts over leading axes. The `threads` argument of
the additions splits 2D batches row-wise over a thread pool; `threads=1`
keeps everything on the calling thread.
"""
import logging
import math
import typing

import attrs
import numpy as np
import typing_extensions

from . import errors
from .geometry import CurvatureLike
from .geometry import Tolerances
from .geometry import _check_pair
from .geometry import _resolve_curvature
from .geometry import exp_map
from .geometry import lift_from_space
from .geometry import log_map
from .geometry import lorentz_norm
from .geometry import origin
from .geometry import parallel_transport
from .utils import ArrayLike
from .utils import coords_of
from .utils import map_row_chunks

__all__ = (
    "ResidualWeights",
    "ScaleFactor",
    "Method",
    "METHODS",
    "lresnet_add",
    "pt_add",
    "ts_add",
    "space_add",
    "scale",
    "lorentz_centroid",
    "residual_add",
)

logger: logging.Logger = logging.getLogger("lresnet")

Method = typing_extensions.Literal["lresnet", "pt", "ts", "sa"]
METHODS: typing.Tuple[str, ...] = ("lresnet", "pt", "ts", "sa")


def _finite(_, attribute: "attrs.Attribute", value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{attribute.name} must be finite, not {value}.")


def _positive(_, attribute: "attrs.Attribute", value: float) -> None:
    if not value > 0:
        raise ValueError(f"{attribute.name} must be positive, not {value}.")


@attrs.define(frozen=True, slots=True)
class ResidualWeights:
    """
    The weights of a Lorentzian residual connection.

    `w_x` is a fixed positive constant; `w_y` is free and only ever used
    through its absolute value, which keeps every pair inside the domain
    where the normalising denominator is bounded away from zero.
    """

    w_x: float = attrs.field(default=1.0, converter=float, validator=[_finite, _positive])
    "The weight of the skip input."
    w_y: float = attrs.field(default=1.0, converter=float, validator=_finite)
    "The (signed, trainable) weight of the layer output."

    @property
    def magnitude_y(self) -> float:
        """`|w_y|`, the weight actually applied."""
        return abs(self.w_y)

    @property
    def ratio(self) -> float:
        """`|w_y| / w_x`. The output only depends on this."""
        return abs(self.w_y) / self.w_x


WeightsLike = typing.Union[ResidualWeights, typing.Tuple[float, float]]


def _as_weights(value: typing.Optional[WeightsLike]) -> ResidualWeights:
    if value is None:
        return ResidualWeights()
    if isinstance(value, ResidualWeights):
        return value
    w_x, w_y = value
    return ResidualWeights(w_x, w_y)


@attrs.define(frozen=True, slots=True)
class ScaleFactor:
    """The scaling constant `γ` that slides a point along its geodesic through the origin."""

    gamma: float = attrs.field(default=1.0, converter=float, validator=[_finite, _positive])
    "The factor applied to the space components."
    trainable: bool = attrs.field(default=False, kw_only=True)
    "Whether training updates `γ` along with the other parameters. Otherwise it stays fixed."


def _as_gamma(value: typing.Union[ScaleFactor, float]) -> float:
    return value.gamma if isinstance(value, ScaleFactor) else ScaleFactor(value).gamma


def _run(
    kernel: typing.Callable[..., np.ndarray],
    x: np.ndarray,
    y: np.ndarray,
    threads: int,
    **kwargs: typing.Any,
) -> np.ndarray:
    if threads > 1 and x.ndim == 2 and x.shape == y.shape:
        return map_row_chunks(kernel, (x, y), threads, **kwargs)
    return kernel(x, y, **kwargs)


def _lemma_slack(dtype: np.dtype) -> float:
    return 64 * math.sqrt(float(np.finfo(dtype).eps))


def _lresnet_kernel(
    x: np.ndarray, y: np.ndarray, *, w_x: float, w_y: float, sqrt_neg: float
) -> np.ndarray:
    u = w_x * x + w_y * y
    denom = sqrt_neg * lorentz_norm(u)
    # non-finite inputs are left to surface in the output
    assert np.all(
        (denom >= math.hypot(w_x, w_y) * (1 - _lemma_slack(u.dtype))) | ~np.isfinite(denom)
    ), "normalising denominator fell below sqrt(w_x^2 + w_y^2)"
    return u / denom[..., None]


def lresnet_add(
    x: ArrayLike,
    y: ArrayLike,
    weights: typing.Optional[WeightsLike] = None,
    curvature: typing.Optional[CurvatureLike] = None,
    *,
    threads: int = 1,
) -> np.ndarray:
    """
    The Lorentzian residual connection
    `(w_x·x + |w_y|·y) / (√(−K)·‖w_x·x + |w_y|·y‖_L)`.

    One pass over the inputs plus a single norm evaluation, so it runs in
    `O(n)` per point. The normalising denominator is always at least
    `√(w_x² + w_y²)`; this is asserted unless Python runs with `-O`.

    Args:
        x: The skip input.
        y: The layer output.
        weights (`ResidualWeights | tuple[float, float]`, optional):
        Defaults to `(1, 1)`.
        curvature: The curvature. Taken from the points if they carry one.
        threads (`int`): Row-parallel workers for 2D batches.

    Returns:
        The weighted Lorentzian centroid of `x` and `y`.
    """
    w = _as_weights(weights)
    curv = _resolve_curvature(curvature, x, y)
    x = coords_of(x)
    y = coords_of(y)
    _check_pair(x, y)
    return _run(
        _lresnet_kernel,
        x,
        y,
        threads,
        w_x=w.w_x,
        w_y=w.magnitude_y,
        sqrt_neg=curv.sqrt_neg,
    )


def _pt_kernel(
    x: np.ndarray, y: np.ndarray, *, k: float, tolerances: typing.Optional[Tolerances]
) -> np.ndarray:
    o = origin(k, x.shape[-1] - 1, dtype=x.dtype)
    u = log_map(o, y, k, tolerances)
    v = parallel_transport(o, x, u, k)
    return exp_map(x, v, k, tolerances)


def pt_add(
    x: ArrayLike,
    y: ArrayLike,
    curvature: typing.Optional[CurvatureLike] = None,
    *,
    direction: typing_extensions.Literal["forward", "backward"] = "forward",
    tolerances: typing.Optional[Tolerances] = None,
    threads: int = 1,
) -> np.ndarray:
    """
    The parallel transport addition `exp_x(P_{o→x}(log_o(y)))`.

    This is not commutative. `direction="forward"` computes `x ⊕ y`, the
    residual form `x ⊕ f(x)`; `direction="backward"` computes `y ⊕ x`.

    Raises:
        `DegeneratePairError`: Propagated from parallel transport.
    """
    curv = _resolve_curvature(curvature, x, y)
    x = coords_of(x)
    y = coords_of(y)
    _check_pair(x, y)
    if direction == "backward":
        x, y = y, x
    elif direction != "forward":
        raise ValueError(f'direction must be "forward" or "backward", not {direction!r}.')

    result = _run(_pt_kernel, x, y, threads, k=curv.k, tolerances=tolerances)
    if __debug__ and not np.all(np.isfinite(result)):
        logger.warning(
            "pt_add produced %d non-finite value(s).",
            int(np.count_nonzero(~np.isfinite(result))),
        )
    return result


def _ts_kernel(
    x: np.ndarray,
    y: np.ndarray,
    *,
    w_x: float,
    w_y: float,
    k: float,
    tolerances: typing.Optional[Tolerances],
) -> np.ndarray:
    o = origin(k, x.shape[-1] - 1, dtype=x.dtype)
    v = w_x * log_map(o, x, k, tolerances) + w_y * log_map(o, y, k, tolerances)
    return exp_map(o, v, k, tolerances)


def ts_add(
    x: ArrayLike,
    y: ArrayLike,
    w_x: float = 1.0,
    w_y: float = 1.0,
    curvature: typing.Optional[CurvatureLike] = None,
    *,
    tolerances: typing.Optional[Tolerances] = None,
    threads: int = 1,
) -> np.ndarray:
    """
    The tangent space addition `exp_o(w_x·log_o(x) + w_y·log_o(y))`.

    Args:
        x: The first point.
        y: The second point.
        w_x (`float`): Strictly positive weight of `x`.
        w_y (`float`): Strictly positive weight of `y`.
        curvature: The curvature. Taken from the points if they carry one.
        tolerances (`Tolerances`, optional): Defaults per precision.
        threads (`int`): Row-parallel workers for 2D batches.
    """
    if not (w_x > 0 and w_y > 0):
        raise ValueError(f"Tangent space weights must be positive, not ({w_x}, {w_y}).")

    curv = _resolve_curvature(curvature, x, y)
    x = coords_of(x)
    y = coords_of(y)
    _check_pair(x, y)
    return _run(
        _ts_kernel,
        x,
        y,
        threads,
        w_x=float(w_x),
        w_y=float(w_y),
        k=curv.k,
        tolerances=tolerances,
    )


def _sa_kernel(x: np.ndarray, y: np.ndarray, *, k: float) -> np.ndarray:
    return lift_from_space(x[..., 1:] + y[..., 1:], k)


def space_add(
    x: ArrayLike,
    y: ArrayLike,
    curvature: typing.Optional[CurvatureLike] = None,
    *,
    threads: int = 1,
) -> np.ndarray:
    """The space-like dimension addition: add space parts, recompute the time part."""
    curv = _resolve_curvature(curvature, x, y)
    x = coords_of(x)
    y = coords_of(y)
    _check_pair(x, y)
    return _run(_sa_kernel, x, y, threads, k=curv.k)


def scale(
    m: ArrayLike,
    gamma: typing.Union[ScaleFactor, float],
    curvature: typing.Optional[CurvatureLike] = None,
) -> np.ndarray:
    """
    Slides `m` along the geodesic through the origin: the space part
    becomes `γ·m_s`, the time part is recomputed.
    """
    factor = _as_gamma(gamma)
    curv = _resolve_curvature(curvature, m)
    m = coords_of(m)
    return lift_from_space(factor * m[..., 1:], curv)


def lorentz_centroid(
    points: ArrayLike,
    weights: typing.Optional[ArrayLike] = None,
    curvature: typing.Optional[CurvatureLike] = None,
) -> np.ndarray:
    """
    The weighted Lorentzian centroid of `k` points, stacked along axis 0:
    the normalised weighted sum, exactly like `lresnet_add` for `k = 2`.

    Args:
        points: Array of shape `(k, ..., n + 1)`.
        weights: `k` non-negative weights, not all zero. Defaults to equal weights.
        curvature: The curvature.
    """
    curv = _resolve_curvature(curvature, points)
    points = coords_of(points)
    if weights is None:
        w = np.ones(points.shape[0], dtype=points.dtype)
    else:
        w = np.asarray(weights, dtype=points.dtype)

    if w.ndim != 1 or w.shape[0] != points.shape[0]:
        raise errors.DimensionError(
            f"Expected {points.shape[0]} weights, got an array of shape {w.shape}."
        )
    if np.any(w < 0) or not np.any(w > 0):
        raise ValueError("Centroid weights must be non-negative and not all zero.")

    u = np.tensordot(w, points, axes=1)
    return u / (curv.sqrt_neg * lorentz_norm(u))[..., None]


def residual_add(
    method: str,
    x: ArrayLike,
    y: ArrayLike,
    curvature: typing.Optional[CurvatureLike] = None,
    *,
    weights: typing.Optional[WeightsLike] = None,
    threads: int = 1,
) -> np.ndarray:
    """
    Dispatches to one of the four additions by name.

    Args:
        method (`str`): One of `"lresnet"`, `"pt"`, `"ts"` or `"sa"`.
        x: The skip input.
        y: The layer output.
        curvature: The curvature.
        weights (`ResidualWeights | tuple[float, float]`, optional):
        Used by `lresnet` and `ts`. `ts` uses `|w_y|`, which must be non-zero.
        threads (`int`): Row-parallel workers for 2D batches.
    """
    if method == "lresnet":
        return lresnet_add(x, y, weights, curvature, threads=threads)
    if method == "pt":
        return pt_add(x, y, curvature, threads=threads)
    if method == "ts":
        w = _as_weights(weights)
        return ts_add(x, y, w.w_x, w.magnitude_y, curvature, threads=threads)
    if method == "sa":
        return space_add(x, y, curvature, threads=threads)
    raise ValueError(f"Unknown residual method {method!r}; expected one of {METHODS}.")
