"""
First derivatives of the residual connection, the scaling and the
hyperbolic layer, written out by hand, plus a central finite difference
oracle to hold them to.

The `*_jacobian` functions return full matrices for single points and are
what the checks compare against the oracle. The `*_vjp` functions compute
vector-Jacobian products for whole batches from the same formulas; they are
what training uses.
"""
import typing

import attrs
import numpy as np

from .geometry import CurvatureLike
from .geometry import _dot
from .geometry import _resolve_curvature
from .geometry import as_curvature
from .geometry import lift_from_space
from .geometry import lorentz_inner
from .residual import ResidualWeights
from .residual import ScaleFactor
from .residual import WeightsLike
from .residual import _as_gamma
from .residual import _as_weights
from .utils import ArrayLike
from .utils import coords_of

__all__ = (
    "Jacobian",
    "LResNetJacobians",
    "DEFAULT_STEP",
    "ABSOLUTE_FLOOR",
    "hyperbolic_layer",
    "lresnet_jacobians",
    "lift_jacobian",
    "scale_jacobian",
    "hl_layer_jacobian",
    "fd_oracle",
    "relative_error",
    "lresnet_vjp",
    "lift_vjp",
    "scale_vjp",
    "scale_gamma_jacobian",
    "scale_gamma_vjp",
    "space_add_vjp",
    "hyperbolic_layer_vjp",
)

DEFAULT_STEP = 1e-5
"Central difference step at 64-bit."
ABSOLUTE_FLOOR = 1e-8
"Entries smaller than this are compared absolutely instead of relatively."


def _finite_matrix(_, __, value: np.ndarray) -> None:
    if value.ndim != 2:
        raise ValueError("A Jacobian must be a 2D matrix.")
    if not np.all(np.isfinite(value)):
        raise ValueError("Jacobian entries must be finite.")


@attrs.define(frozen=True, slots=True, eq=False)
class Jacobian:
    """A matrix of first derivatives: one row per output, one column per input."""

    matrix: np.ndarray = attrs.field(
        converter=lambda m: np.asarray(m, dtype=np.float64), validator=_finite_matrix
    )
    "The `(rows, cols)` entries."

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def __matmul__(self, other: ArrayLike) -> np.ndarray:
        return self.matrix @ np.asarray(other)

    def __array__(self, dtype: typing.Any = None, copy: typing.Any = None) -> np.ndarray:
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@attrs.define(frozen=True, slots=True, eq=False)
class LResNetJacobians:
    """The derivatives of `lresnet_add` with respect to both points and `w_y`."""

    j_x: Jacobian = attrs.field()
    "`∂z/∂x`."
    j_y: Jacobian = attrs.field()
    "`∂z/∂y`."
    g_wy: np.ndarray = attrs.field()
    "`∂z/∂w_y`, an `n + 1` vector."
    at_kink: bool = attrs.field(default=False)
    "Whether `w_y = 0`, where `|w_y|` has no derivative and 0 is used."

    def __iter__(self) -> typing.Iterator[typing.Any]:
        return iter((self.j_x, self.j_y, self.g_wy))


def _metric_flip(u: np.ndarray) -> np.ndarray:
    # G·u with G = diag(-1, 1, ..., 1)
    flipped = np.array(u, copy=True)
    flipped[..., 0] *= -1
    return flipped


def hyperbolic_layer(
    weight: ArrayLike, x: ArrayLike, curvature: CurvatureLike = -1.0
) -> np.ndarray:
    """
    A hyperbolic layer: multiply the space components by `weight`, then
    recompute the time component so the output is back on the hyperboloid.

    Args:
        weight: The `(n_out, n_in)` matrix.
        x: Point(s) with `n_in` space components.
        curvature: The curvature.
    """
    weight = np.asarray(weight)
    x = coords_of(x)
    return lift_from_space(x[..., 1:] @ weight.T, curvature)


def lresnet_jacobians(
    x: ArrayLike,
    y: ArrayLike,
    weights: typing.Optional[WeightsLike] = None,
    curvature: typing.Optional[CurvatureLike] = None,
) -> LResNetJacobians:
    """
    The analytic Jacobians of `lresnet_add` at a single pair.

    With `u = w_x·x + |w_y|·y` and `G = diag(−1, 1, ..., 1)`,
    `∂z/∂u = (I − u·(Gu)ᵀ/⟨u,u⟩_L) / (√(−K)·‖u‖_L)`, which is then chained
    into `x`, `y` and `w_y`.

    Returns:
        `LResNetJacobians`, which also unpacks as `(J_x, J_y, g_wy)`.
    """
    w = _as_weights(weights)
    curv = _resolve_curvature(curvature, x, y)
    x = coords_of(x).astype(np.float64)
    y = coords_of(y).astype(np.float64)

    a = w.magnitude_y
    u = w.w_x * x + a * y
    q = float(lorentz_inner(u, u))
    norm = curv.sqrt_neg * np.sqrt(-q)

    j_u = (np.eye(u.shape[0]) - np.outer(u, _metric_flip(u)) / q) / norm
    at_kink = w.w_y == 0
    g_wy = np.zeros_like(u) if at_kink else np.sign(w.w_y) * (j_u @ y)

    return LResNetJacobians(
        j_x=Jacobian(w.w_x * j_u), j_y=Jacobian(a * j_u), g_wy=g_wy, at_kink=at_kink
    )


def lift_jacobian(space: ArrayLike, curvature: CurvatureLike = -1.0) -> Jacobian:
    """The `(n + 1) × n` Jacobian of `lift_from_space`: `[sᵀ/t; I]`."""
    space = coords_of(space).astype(np.float64)
    time = lift_from_space(space, curvature)[0]
    return Jacobian(np.vstack([space[None, :] / time, np.eye(space.shape[0])]))


def scale_jacobian(
    m: ArrayLike, gamma: typing.Union[ScaleFactor, float], curvature: CurvatureLike = -1.0
) -> Jacobian:
    """The Jacobian of `scale` with respect to the full point `m` (its time column is zero)."""
    g = _as_gamma(gamma)
    m = coords_of(m).astype(np.float64)
    n = m.shape[0] - 1
    time = lift_from_space(g * m[1:], curvature)[0]

    jac = np.zeros((n + 1, n + 1))
    jac[0, 1:] = g * g * m[1:] / time
    jac[1:, 1:] = g * np.eye(n)
    return Jacobian(jac)


def scale_gamma_jacobian(
    m: ArrayLike, gamma: typing.Union[ScaleFactor, float], curvature: CurvatureLike = -1.0
) -> Jacobian:
    """The one-column Jacobian of `scale` with respect to `γ`: `[γ‖m_s‖²/t, m_s]`."""
    g = _as_gamma(gamma)
    m = coords_of(m).astype(np.float64)
    time = lift_from_space(g * m[1:], curvature)[0]

    column = np.concatenate([[g * _dot(m[1:], m[1:]) / time], m[1:]])
    return Jacobian(column[:, None])


def hl_layer_jacobian(
    weight: ArrayLike, x: ArrayLike, curvature: CurvatureLike = -1.0
) -> Jacobian:
    """
    The Jacobian of `hyperbolic_layer` with respect to the full input point.

    The time row is `(W·x_s)ᵀ·W / y_t`, the space rows are `W`, and the time
    column is zero since the layer ignores the input's time component.
    """
    weight = np.asarray(weight, dtype=np.float64)
    x = coords_of(x).astype(np.float64)
    n_out, n_in = weight.shape

    out = hyperbolic_layer(weight, x, curvature)
    jac = np.zeros((n_out + 1, n_in + 1))
    jac[0, 1:] = out[1:] @ weight / out[0]
    jac[1:, 1:] = weight
    return Jacobian(jac)


def fd_oracle(
    f: typing.Callable[[np.ndarray], ArrayLike],
    point: ArrayLike,
    step: float = DEFAULT_STEP,
) -> Jacobian:
    """
    The central difference Jacobian `(f(p + h·e_i) − f(p − h·e_i)) / 2h`,
    built one column at a time.

    Args:
        f: The map to differentiate. It receives and may return any shape;
        both are flattened.
        point: Where to differentiate.
        step (`float`): The step `h`, must be positive.
    """
    if not step > 0:
        raise ValueError(f"Finite difference step must be positive, not {step}.")

    p = np.array(coords_of(point), dtype=np.float64, copy=True)
    flat = p.reshape(-1)
    out_size = np.asarray(f(p)).size
    jac = np.empty((out_size, flat.size))

    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + step
        right = np.array(f(p), dtype=np.float64).reshape(-1)
        flat[i] = old - step
        left = np.array(f(p), dtype=np.float64).reshape(-1)
        flat[i] = old
        jac[:, i] = (right - left) / (2 * step)

    return Jacobian(jac)


def relative_error(
    analytic: ArrayLike, numeric: ArrayLike, floor: float = ABSOLUTE_FLOOR
) -> float:
    """
    How far an analytic derivative is from the oracle.

    Over the entries where the oracle exceeds `floor` in magnitude this is
    the ∞-norm of the difference relative to the ∞-norm of the oracle; the
    remaining entries are compared absolutely. The larger of the two is
    returned.
    """
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    if analytic.shape != numeric.shape:
        raise ValueError(f"Shape mismatch: {analytic.shape} and {numeric.shape}.")

    diff = np.abs(analytic - numeric)
    big = np.abs(numeric) > floor
    rel = float(np.max(diff[big]) / np.max(np.abs(numeric[big]))) if np.any(big) else 0.0
    small = float(np.max(diff[~big])) if np.any(~big) else 0.0
    return max(rel, small)


def lresnet_vjp(
    x: np.ndarray,
    y: np.ndarray,
    weights: ResidualWeights,
    grad: np.ndarray,
    curvature: CurvatureLike = -1.0,
) -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Pulls an output gradient back through `lresnet_add` for a batch.

    Returns:
        The gradients for `x`, `y` and, per row, for `w_y`.
    """
    curv = as_curvature(curvature)
    a = weights.magnitude_y
    u = weights.w_x * x + a * y
    q = lorentz_inner(u, u)
    norm = curv.sqrt_neg * np.sqrt(-q)

    g_u = (grad - _metric_flip(u) * (_dot(u, grad) / q)[..., None]) / norm[..., None]
    g_wy = np.sign(weights.w_y) * _dot(y, g_u)
    return weights.w_x * g_u, a * g_u, g_wy


def lift_vjp(space: np.ndarray, grad: np.ndarray, curvature: CurvatureLike = -1.0) -> np.ndarray:
    """Pulls an output gradient back through `lift_from_space` onto the space components."""
    time = lift_from_space(space, curvature)[..., 0]
    return grad[..., 1:] + (grad[..., 0] / time)[..., None] * space


def scale_vjp(
    m: np.ndarray,
    gamma: typing.Union[ScaleFactor, float],
    grad: np.ndarray,
    curvature: CurvatureLike = -1.0,
) -> np.ndarray:
    """Pulls an output gradient back through `scale` onto the full input point."""
    g = _as_gamma(gamma)
    out = np.zeros_like(m)
    out[..., 1:] = g * lift_vjp(g * m[..., 1:], grad, curvature)
    return out


def scale_gamma_vjp(
    m: np.ndarray,
    gamma: typing.Union[ScaleFactor, float],
    grad: np.ndarray,
    curvature: CurvatureLike = -1.0,
) -> np.ndarray:
    """Pulls an output gradient back through `scale` onto `γ`, one value per point."""
    g = _as_gamma(gamma)
    m_s = m[..., 1:]
    squared = _dot(m_s, m_s)
    time = lift_from_space(g * m_s, curvature)[..., 0]
    return grad[..., 0] * g * squared / time + _dot(grad[..., 1:], m_s)


def space_add_vjp(
    x: np.ndarray, y: np.ndarray, grad: np.ndarray, curvature: CurvatureLike = -1.0
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Pulls an output gradient back through `space_add`; both inputs get the same gradient."""
    g_s = lift_vjp(x[..., 1:] + y[..., 1:], grad, curvature)
    g = np.zeros_like(x)
    g[..., 1:] = g_s
    return g, g.copy()


def hyperbolic_layer_vjp(
    weight: np.ndarray, x: np.ndarray, grad: np.ndarray, curvature: CurvatureLike = -1.0
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Pulls an output gradient back through `hyperbolic_layer` for a batch.

    Returns:
        The gradient for the input points and for `weight`, summed over the batch.
    """
    x_s = x[..., 1:]
    g_out = lift_vjp(x_s @ weight.T, grad, curvature)

    g_x = np.zeros_like(x)
    g_x[..., 1:] = g_out @ weight
    g_w = g_out.reshape(-1, weight.shape[0]).T @ x_s.reshape(-1, weight.shape[1])
    return g_x, g_w
