"""
A small residual network of hyperbolic layers, trained by plain gradient
descent on a synthetic tree-shaped dataset.

Each block maps `h` through a hyperbolic layer to `z` and combines the two
with one of the residual methods; `"none"` keeps just `z`. Logits are the
first `C` space components of the last representation.
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
from .geometry import LorentzBatch
from .geometry import as_curvature
from .geometry import lift_from_space
from .grad import hyperbolic_layer
from .grad import hyperbolic_layer_vjp
from .grad import lresnet_vjp
from .grad import scale_gamma_vjp
from .grad import scale_vjp
from .grad import space_add_vjp
from .residual import ResidualWeights
from .residual import ScaleFactor
from .residual import lorentz_centroid
from .residual import lresnet_add
from .residual import residual_add
from .residual import scale
from .utils import ArrayLike
from .utils import coords_of
from .utils import finite_or_none

__all__ = (
    "BlockMethod",
    "HLLayer",
    "ResidualBlockConfig",
    "SyntheticHierarchyDataset",
    "LResNetModel",
    "ModelGradients",
    "TrainingCurve",
    "DiagnosticRow",
    "softmax",
    "forward",
    "loss_and_grad",
    "train",
    "mean_pairwise_distance",
    "centroid_spread",
    "oversmoothing_diagnostic",
)

logger: logging.Logger = logging.getLogger("lresnet")

BlockMethod = typing_extensions.Literal["lresnet", "pt", "ts", "sa", "none"]
BLOCK_METHODS: typing.Tuple[str, ...] = ("lresnet", "pt", "ts", "sa", "none")
TRAINABLE_METHODS: typing.Tuple[str, ...] = ("lresnet", "sa", "none")
GAMMA_FLOOR = 1e-3
"Trained scaling factors are kept at least this large."


def _finite_weight(_, __, value: np.ndarray) -> None:
    if value.ndim != 2:
        raise errors.DimensionError("Layer weights must be a 2D matrix.")
    if not np.all(np.isfinite(value)):
        raise ValueError("Layer weights must be finite.")


@attrs.define(slots=True, eq=False)
class HLLayer:
    """
    A hyperbolic layer: a linear map on the space components followed by a
    lift back onto the hyperboloid.
    """

    weight: np.ndarray = attrs.field(
        converter=lambda w: np.array(w, dtype=np.float64), validator=_finite_weight
    )
    "The `(n_out, n_in)` matrix applied to the space components."

    @classmethod
    def initialize(cls, rng: np.random.Generator, n_in: int, n_out: int) -> "HLLayer":
        """Gaussian weights with standard deviation `1/√n_in`."""
        return cls(rng.normal(0.0, 1.0 / math.sqrt(n_in), size=(n_out, n_in)))

    @property
    def n_in(self) -> int:
        return self.weight.shape[1]

    @property
    def n_out(self) -> int:
        return self.weight.shape[0]

    def __call__(self, x: np.ndarray, curvature: CurvatureLike = -1.0) -> np.ndarray:
        if x.shape[-1] - 1 != self.n_in:
            raise errors.DimensionError(
                f"Layer expects {self.n_in} space components, got {x.shape[-1] - 1}."
            )
        return hyperbolic_layer(self.weight, x, curvature)


def _default_weights(self: "ResidualBlockConfig") -> typing.Optional[ResidualWeights]:
    return ResidualWeights() if self.method in ("lresnet", "ts") else None


@attrs.define(frozen=True, slots=True)
class ResidualBlockConfig:
    """How every block of a network combines its input with its layer output."""

    method: BlockMethod = attrs.field(
        default="lresnet", validator=attrs.validators.in_(BLOCK_METHODS)
    )
    "The residual method, or `\"none\"` for a plain stack of layers."
    weights: typing.Optional[ResidualWeights] = attrs.field(
        default=attrs.Factory(_default_weights, takes_self=True)
    )
    "The initial residual weights. Only used by `lresnet` and `ts`."
    scale: typing.Optional[ScaleFactor] = attrs.field(default=None)
    "If set, each block output is scaled by this factor. Only for `lresnet`."

    def __attrs_post_init__(self) -> None:
        if self.method in ("lresnet", "ts"):
            if self.weights is None:
                raise ValueError(f"The {self.method} method needs residual weights.")
            if self.method == "ts" and self.weights.w_y == 0:
                raise ValueError("Tangent space residuals need a non-zero w_y.")
        elif self.weights is not None:
            raise ValueError(f"The {self.method} method takes no residual weights.")

        if self.scale is not None and self.method != "lresnet":
            raise ValueError("Scaling is only applied after lresnet blocks.")

    @property
    def trainable(self) -> bool:
        """Whether gradients exist for networks built with this block."""
        return self.method in TRAINABLE_METHODS


@attrs.define(frozen=True, slots=True, eq=False)
class SyntheticHierarchyDataset:
    """
    Points scattered around the leaves of a balanced tree. The class of a
    point is the top-level subtree its leaf belongs to.
    """

    points: LorentzBatch = attrs.field()
    "The points, on the hyperboloid."
    labels: np.ndarray = attrs.field(converter=lambda a: np.asarray(a, dtype=np.int64))
    "One class id per point."
    num_classes: int = attrs.field()
    "The number of top-level subtrees."
    depth: int = attrs.field()
    "Levels below the top level."
    branching: int = attrs.field()
    "Children per node below the top level."
    noise: float = attrs.field()
    "The noise scale; it halves with every level."
    seed: int = attrs.field()
    "The seed the dataset was generated from."

    def __attrs_post_init__(self) -> None:
        if self.labels.shape != (self.points.rows,):
            raise errors.DimensionError("Expected exactly one label per point.")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise ValueError(f"Labels must lie in [0, {self.num_classes}).")

    @classmethod
    def generate(
        cls,
        num_points: int = 600,
        num_classes: int = 3,
        dim: int = 8,
        depth: int = 2,
        branching: int = 3,
        noise: float = 0.5,
        spread: float = 2.0,
        seed: int = 0,
        curvature: CurvatureLike = -1.0,
    ) -> "SyntheticHierarchyDataset":
        """
        Builds the dataset.

        The `k`th top-level node sits at `spread·e_k`. Every deeper node is
        its parent plus Gaussian noise of scale `noise / 2^(level - 1)`, and
        every point is a random leaf of its class plus noise one level finer.
        Classes are balanced.
        """
        if num_points < 1:
            raise ValueError("A dataset needs at least one point.")
        if not 1 <= num_classes <= dim:
            raise ValueError("Need between 1 and dim classes, since logits are space components.")
        if depth < 0 or branching < 1:
            raise ValueError("Tree depth must be non-negative and branching positive.")

        rng = np.random.default_rng(seed)
        leaves: typing.List[np.ndarray] = []
        for k in range(num_classes):
            level = np.zeros((1, dim))
            level[0, k] = spread
            for depth_index in range(1, depth + 1):
                sigma = noise / 2 ** (depth_index - 1)
                parents = np.repeat(level, branching, axis=0)
                level = parents + rng.normal(0.0, sigma, size=parents.shape)
            leaves.append(level)

        labels = np.arange(num_points) % num_classes
        chosen = rng.integers(0, leaves[0].shape[0], size=num_points)
        centers = np.stack([leaves[c][i] for c, i in zip(labels, chosen)])
        space = centers + rng.normal(0.0, noise / 2**depth, size=centers.shape)

        curv = as_curvature(curvature)
        return cls(
            points=LorentzBatch(lift_from_space(space, curv), curv),
            labels=labels,
            num_classes=num_classes,
            depth=depth,
            branching=branching,
            noise=noise,
            seed=seed,
        )

    @property
    def dim(self) -> int:
        return self.points.dim

    def __len__(self) -> int:
        return self.points.rows


@attrs.define(slots=True, eq=False)
class LResNetModel:
    """A stack of equally wide hyperbolic layers joined by residual blocks."""

    layers: typing.List[HLLayer] = attrs.field()
    "The hyperbolic layers, applied in order."
    block: ResidualBlockConfig = attrs.field()
    "The residual configuration shared by every block."
    num_classes: int = attrs.field()
    "How many leading space components are read as logits."
    curvature: Curvature = attrs.field(default=Curvature(), converter=as_curvature)
    "The curvature of every representation."
    w_y: np.ndarray = attrs.field(default=None)
    "The trainable `w_y` of each block."
    gamma: np.ndarray = attrs.field(default=None)
    "The scaling factor `γ` of each block. Only used if the block config has a scale."

    def __attrs_post_init__(self) -> None:
        dims = {layer.n_in for layer in self.layers} | {layer.n_out for layer in self.layers}
        if len(dims) > 1:
            raise errors.DimensionError("Residual blocks need square layers of one width.")
        if self.layers and self.num_classes > self.layers[0].n_out:
            raise ValueError("There are more classes than space components.")

        if self.w_y is None:
            initial = self.block.weights.w_y if self.block.weights else 0.0
            self.w_y = np.full(len(self.layers), initial, dtype=np.float64)
        else:
            self.w_y = np.array(self.w_y, dtype=np.float64)
            if self.w_y.shape != (len(self.layers),):
                raise errors.DimensionError("Expected one w_y per layer.")

        if self.gamma is None:
            initial = self.block.scale.gamma if self.block.scale else 1.0
            self.gamma = np.full(len(self.layers), initial, dtype=np.float64)
        else:
            self.gamma = np.array(self.gamma, dtype=np.float64)
            if self.gamma.shape != (len(self.layers),):
                raise errors.DimensionError("Expected one gamma per layer.")

    @classmethod
    def initialize(
        cls,
        rng: np.random.Generator,
        dim: int,
        depth: int,
        num_classes: int,
        block: typing.Optional[ResidualBlockConfig] = None,
        curvature: CurvatureLike = -1.0,
    ) -> "LResNetModel":
        """
        A fresh network: layer weights Gaussian with standard deviation
        `1/√dim`, every `w_y` equal to the block's initial weight.
        """
        layers = [HLLayer.initialize(rng, dim, dim) for _ in range(depth)]
        return cls(layers, block or ResidualBlockConfig(), num_classes, curvature)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def weights_for(self, index: int) -> ResidualWeights:
        """The residual weights of block `index`."""
        return ResidualWeights(self.block.weights.w_x, float(self.w_y[index]))

    def scale_for(self, index: int) -> typing.Optional[ScaleFactor]:
        """The scaling after block `index`, if the blocks scale at all."""
        if self.block.scale is None:
            return None
        return ScaleFactor(float(self.gamma[index]), trainable=self.block.scale.trainable)


@attrs.define(slots=True, eq=False)
class ModelGradients:
    """Gradients of the loss with respect to every trainable parameter."""

    weights: typing.List[np.ndarray] = attrs.field()
    "One array per layer, shaped like its weight."
    w_y: np.ndarray = attrs.field()
    "One entry per block."
    gamma: typing.Optional[np.ndarray] = attrs.field(default=None)
    "One entry per block, or zeros if the blocks do not scale."

    def __attrs_post_init__(self) -> None:
        if self.gamma is None:
            self.gamma = np.zeros_like(self.w_y)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax, shifted by the row maximum."""
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=-1, keepdims=True)


def _input_array(net: LResNetModel, x: typing.Any) -> np.ndarray:
    x = coords_of(x)
    if net.layers and x.shape[-1] - 1 != net.layers[0].n_in:
        raise errors.DimensionError(
            f"The network expects {net.layers[0].n_in} space components, got {x.shape[-1] - 1}."
        )
    if x.shape[-1] - 1 < net.num_classes:
        raise errors.DimensionError("The input has fewer space components than classes.")
    return x


def _block(
    net: LResNetModel, index: int, h: np.ndarray, z: np.ndarray, swap_arguments: bool
) -> np.ndarray:
    method = net.block.method
    if method == "none":
        return z

    first, second = (z, h) if swap_arguments else (h, z)
    if method == "lresnet":
        out = lresnet_add(first, second, net.weights_for(index), net.curvature)
        factor = net.scale_for(index)
        if factor is not None:
            out = scale(out, factor, net.curvature)
        return out
    weights = net.weights_for(index) if method == "ts" else None
    return residual_add(method, first, second, net.curvature, weights=weights)


def forward(
    net: LResNetModel, x: ArrayLike, *, swap_arguments: bool = False
) -> typing.Tuple[np.ndarray, typing.List[np.ndarray]]:
    """
    Runs the network.

    Args:
        net (`LResNetModel`): The network.
        x: Input point(s), `(..., n + 1)`.
        swap_arguments (`bool`): Pass the layer output as the first argument
        of every residual block instead of the second.

    Returns:
        The logits (the first `C` space components of the last
        representation, before softmax) and the list of representations
        `h^(0), ..., h^(L)`.
    """
    h = _input_array(net, x)
    trace = [h]
    for index, layer in enumerate(net.layers):
        z = layer(h, net.curvature)
        h = _block(net, index, h, z, swap_arguments)
        trace.append(h)

    return h[..., 1 : 1 + net.num_classes], trace


def _cross_entropy(logits: np.ndarray, labels: np.ndarray) -> typing.Tuple[float, np.ndarray]:
    probs = softmax(logits)
    rows = np.arange(labels.shape[0])
    with np.errstate(divide="ignore"):
        loss = -float(np.mean(np.log(probs[rows, labels])))

    grad = probs
    grad[rows, labels] -= 1
    return loss, grad / labels.shape[0]


def loss_and_grad(
    net: LResNetModel, points: ArrayLike, labels: ArrayLike
) -> typing.Tuple[float, ModelGradients]:
    """
    The mean cross-entropy of the softmax of the logits, and its gradient
    with respect to every layer weight, every `w_y` and every `γ`, by manual
    reverse-mode accumulation.

    Raises:
        `GradientUnavailable`: For `pt` and `ts` blocks.
    """
    if not net.block.trainable:
        raise errors.GradientUnavailable(
            f"Gradients are not available for {net.block.method} residual blocks."
        )

    x = _input_array(net, points)
    labels = np.asarray(labels, dtype=np.int64)
    k = net.curvature

    # forward, keeping what the backward pass needs
    saved = []
    h = x
    for index, layer in enumerate(net.layers):
        z = layer(h, k)
        if net.block.method == "lresnet":
            pre = lresnet_add(h, z, net.weights_for(index), k)
            factor = net.scale_for(index)
            out = scale(pre, factor, k) if factor is not None else pre
        else:
            pre = _block(net, index, h, z, False)
            out = pre
        saved.append((h, z, pre))
        h = out

    loss, g_logits = _cross_entropy(h[:, 1 : 1 + net.num_classes], labels)
    g_h = np.zeros_like(h)
    g_h[:, 1 : 1 + net.num_classes] = g_logits

    grad_weights: typing.List[np.ndarray] = [np.zeros(0)] * net.depth
    grad_wy = np.zeros(net.depth)
    grad_gamma = np.zeros(net.depth)
    for index in reversed(range(net.depth)):
        h_prev, z, pre = saved[index]
        method = net.block.method

        if method == "lresnet":
            factor = net.scale_for(index)
            if factor is not None:
                grad_gamma[index] = float(np.sum(scale_gamma_vjp(pre, factor, g_h, k)))
                g_h = scale_vjp(pre, factor, g_h, k)
            g_skip, g_z, g_wy = lresnet_vjp(h_prev, z, net.weights_for(index), g_h, k)
            grad_wy[index] = float(np.sum(g_wy))
        elif method == "sa":
            g_skip, g_z = space_add_vjp(h_prev, z, g_h, k)
        else:
            g_skip, g_z = 0.0, g_h

        g_layer, grad_weights[index] = hyperbolic_layer_vjp(
            net.layers[index].weight, h_prev, g_z, k
        )
        g_h = g_skip + g_layer

    return loss, ModelGradients(grad_weights, grad_wy, grad_gamma)


def _accuracy(net: LResNetModel, points: np.ndarray, labels: np.ndarray) -> float:
    logits, _ = forward(net, points)
    return float(np.mean(np.argmax(logits, axis=-1) == labels))


def _first_bad_layer(trace: typing.List[np.ndarray]) -> typing.Optional[int]:
    return next(
        (index for index, h in enumerate(trace) if not np.all(np.isfinite(h))), None
    )


@attrs.define(slots=True)
class TrainingCurve:
    """Loss and accuracy on the whole dataset, recorded before every epoch and after the last."""

    method: str = attrs.field()
    "The residual method of the trained network."
    losses: typing.List[float] = attrs.field(factory=list)
    accuracies: typing.List[float] = attrs.field(factory=list)

    @property
    def final_accuracy(self) -> float:
        return self.accuracies[-1]

    @property
    def monotone(self) -> bool:
        """Whether the loss never went up. Recorded, not required."""
        return all(b <= a for a, b in zip(self.losses, self.losses[1:]))

    def to_rows(self) -> typing.List[typing.Dict[str, typing.Any]]:
        """`epoch, loss, accuracy` rows; epoch 0 is the untrained network."""
        return [
            {"epoch": epoch, "loss": finite_or_none(loss), "accuracy": acc}
            for epoch, (loss, acc) in enumerate(zip(self.losses, self.accuracies))
        ]


def train(
    net: LResNetModel,
    dataset: SyntheticHierarchyDataset,
    epochs: int = 200,
    lr: float = 0.05,
    seed: int = 0,
    batch_size: typing.Optional[int] = None,
) -> TrainingCurve:
    """
    Trains every layer weight and every `w_y` of `net` in place by plain
    gradient descent, and every `γ` if the block scale is trainable.

    Args:
        net (`LResNetModel`): The network to train.
        dataset (`SyntheticHierarchyDataset`): The data, must not be empty.
        epochs (`int`): Passes over the data.
        lr (`float`): The step size. 0 leaves the network unchanged.
        seed (`int`): Seeds the mini-batch shuffling.
        batch_size (`int`, optional): Full-batch descent if not set.

    Raises:
        `GradientUnavailable`: For `pt` and `ts` blocks.
        `TrainingDivergence`: As soon as the loss is not finite.
    """
    if len(dataset) == 0:
        raise ValueError("Cannot train on an empty dataset.")
    if not net.block.trainable:
        raise errors.GradientUnavailable(
            f"Gradients are not available for {net.block.method} residual blocks."
        )
    if epochs < 0 or lr < 0:
        raise ValueError("epochs and lr must be non-negative.")

    rng = np.random.default_rng(seed)
    points = dataset.points.data.astype(np.float64)
    labels = dataset.labels
    size = batch_size or len(dataset)
    curve = TrainingCurve(net.block.method)

    for epoch in range(epochs + 1):
        loss, _ = loss_and_grad(net, points, labels)
        if not math.isfinite(loss):
            _, trace = forward(net, points)
            layer = _first_bad_layer(trace)
            where = "." if layer is None else f"; layer {layer} first produced non-finite values."
            raise errors.TrainingDivergence(
                f"Loss became {loss} in epoch {epoch}{where}",
                epoch=epoch,
                layer=layer,
            )

        curve.losses.append(loss)
        curve.accuracies.append(_accuracy(net, points, labels))
        logger.debug(
            "epoch %d: loss %.6f, accuracy %.4f", epoch, loss, curve.accuracies[-1]
        )
        if epoch == epochs:
            break

        order = rng.permutation(len(dataset)) if batch_size else np.arange(len(dataset))
        for start in range(0, len(dataset), size):
            batch = order[start : start + size]
            _, grads = loss_and_grad(net, points[batch], labels[batch])
            for layer, g_w in zip(net.layers, grads.weights):
                layer.weight -= lr * g_w
            if net.block.method == "lresnet":
                net.w_y -= lr * grads.w_y
            if net.block.scale is not None and net.block.scale.trainable:
                net.gamma = np.maximum(net.gamma - lr * grads.gamma, GAMMA_FLOOR)

    return curve


def mean_pairwise_distance(
    points: ArrayLike, curvature: CurvatureLike = -1.0, limit: int = 256
) -> float:
    """
    The mean squared Lorentzian distance over all pairs of the first
    `limit` points. Small values mean the representations collapsed.
    """
    k = as_curvature(curvature).k
    x = coords_of(points)[:limit].astype(np.float64)
    if x.shape[0] < 2:
        return 0.0

    flipped = x.copy()
    flipped[:, 0] *= -1
    inner = flipped @ x.T
    sq = np.maximum(2.0 / k - 2 * inner, 0)
    upper = np.triu_indices(x.shape[0], k=1)
    return float(np.mean(sq[upper]))


def centroid_spread(points: ArrayLike, curvature: CurvatureLike = -1.0) -> float:
    """
    The mean squared Lorentzian distance from each point to the
    equal-weight centroid of all of them. Zero once every point collapsed
    onto one.
    """
    k = as_curvature(curvature).k
    x = coords_of(points).astype(np.float64)
    if x.shape[0] < 2:
        return 0.0

    center = lorentz_centroid(x, curvature=k)
    inner = x[:, 1:] @ center[1:] - x[:, 0] * center[0]
    return float(np.mean(np.maximum(2.0 / k - 2 * inner, 0)))


@attrs.define(frozen=True, slots=True)
class DiagnosticRow:
    """One network of the over-smoothing diagnostic."""

    depth: int = attrs.field()
    method: str = attrs.field()
    accuracy: float = attrs.field()
    "Final training accuracy, NaN if training diverged."
    mean_distance: float = attrs.field()
    "The mean pairwise squared distance of the final representations."
    trained: bool = attrs.field()
    "Whether the network was trained. Forward-only methods are evaluated untrained."
    diverged: bool = attrs.field(default=False)
    centroid_spread: float = attrs.field(default=math.nan)
    "The mean squared distance of the final representations to their centroid."

    def to_record(self) -> typing.Dict[str, typing.Any]:
        return {
            "depth": self.depth,
            "method": self.method,
            "accuracy": finite_or_none(self.accuracy),
            "mean_distance": finite_or_none(self.mean_distance),
            "trained": self.trained,
            "diverged": self.diverged,
            "centroid_spread": finite_or_none(self.centroid_spread),
        }


def _diagnose(
    depth: int,
    method: str,
    dataset: SyntheticHierarchyDataset,
    seed: int,
    epochs: int,
    lr: float,
) -> DiagnosticRow:
    rng = np.random.default_rng(seed)
    block = ResidualBlockConfig(method)
    net = LResNetModel.initialize(
        rng, dataset.dim, depth, dataset.num_classes, block, dataset.points.curvature
    )
    points = dataset.points.data.astype(np.float64)

    trained = block.trainable
    if trained:
        try:
            train(net, dataset, epochs=epochs, lr=lr, seed=seed)
        except errors.TrainingDivergence as e:
            logger.info("%s at depth %d diverged: %s", method, depth, e)
            return DiagnosticRow(depth, method, math.nan, math.nan, trained, diverged=True)

    try:
        with np.errstate(all="ignore"):
            logits, trace = forward(net, points)
    except errors.LResNetException as e:
        logger.info("%s at depth %d failed: %s", method, depth, e)
        return DiagnosticRow(depth, method, math.nan, math.nan, trained, diverged=True)
    final = trace[-1]
    if not np.all(np.isfinite(final)):
        return DiagnosticRow(depth, method, math.nan, math.nan, trained, diverged=True)

    accuracy = float(np.mean(np.argmax(logits, axis=-1) == dataset.labels))
    distance = mean_pairwise_distance(final, net.curvature)
    spread = centroid_spread(final, net.curvature)
    return DiagnosticRow(depth, method, accuracy, distance, trained, centroid_spread=spread)


def oversmoothing_diagnostic(
    depths: typing.Sequence[int],
    method: BlockMethod,
    dataset: SyntheticHierarchyDataset,
    seed: int = 0,
    epochs: int = 50,
    lr: float = 0.05,
) -> typing.List[DiagnosticRow]:
    """
    For each depth, builds a network with `method` blocks and one without
    residual connections from the same seed, trains both where gradients
    exist, and reports accuracy and how far apart the final
    representations are.

    Args:
        depths (`Sequence[int]`): Network depths, sorted ascending.
        method: The residual method to compare against `"none"`.
        dataset (`SyntheticHierarchyDataset`): The data.
        seed (`int`): Seeds initialisation and shuffling for every network.
        epochs (`int`): Training epochs per network.
        lr (`float`): The step size.

    Returns:
        Two rows per depth (the method, then `"none"`), or one if `method`
        is `"none"`.
    """
    depths = list(depths)
    if depths != sorted(depths) or any(d < 0 for d in depths):
        raise ValueError("Depths must be non-negative and sorted ascending.")

    methods = [method] if method == "none" else [method, "none"]
    rows: typing.List[DiagnosticRow] = []
    for depth in depths:
        for m in methods:
            row = _diagnose(depth, m, dataset, seed, epochs, lr)
            logger.info(
                "depth %d, %s: accuracy %s, mean distance %s",
                depth,
                m,
                row.accuracy,
                row.mean_distance,
            )
            rows.append(row)
    return rows
