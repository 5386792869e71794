import math

import numpy as np
import pytest

import lresnet
from lresnet import errors
from lresnet import toynet


@pytest.fixture
def dataset():
    return toynet.SyntheticHierarchyDataset.generate(
        num_points=60, num_classes=3, dim=4, depth=2, branching=2, seed=1
    )


def _net(rng, block, depth=2, dim=4, classes=3):
    return toynet.LResNetModel.initialize(rng, dim, depth, classes, block)


def _numeric_grad(net, points, labels, array, index, step=1e-6):
    flat = array.reshape(-1)
    original = flat[index]
    try:
        flat[index] = original + step
        plus, _ = toynet.loss_and_grad(net, points, labels)
        flat[index] = original - step
        minus, _ = toynet.loss_and_grad(net, points, labels)
    finally:
        flat[index] = original
    return (plus - minus) / (2 * step)


class TestConfig:
    def test_defaults(self):
        block = toynet.ResidualBlockConfig()
        assert block.method == "lresnet"
        assert block.weights == lresnet.ResidualWeights()
        assert block.trainable

    def test_no_weights_for_space_addition(self):
        assert toynet.ResidualBlockConfig("sa").weights is None
        with pytest.raises(ValueError):
            toynet.ResidualBlockConfig("sa", lresnet.ResidualWeights())

    def test_scale_only_after_lresnet(self):
        toynet.ResidualBlockConfig("lresnet", scale=lresnet.ScaleFactor(2.0))
        with pytest.raises(ValueError):
            toynet.ResidualBlockConfig("none", scale=lresnet.ScaleFactor(2.0))

    def test_ts_needs_non_zero_w_y(self):
        with pytest.raises(ValueError):
            toynet.ResidualBlockConfig("ts", lresnet.ResidualWeights(1.0, 0.0))

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            toynet.ResidualBlockConfig("mobius")

    @pytest.mark.parametrize("method, trainable", [("pt", False), ("ts", False), ("none", True)])
    def test_trainable(self, method, trainable):
        assert toynet.ResidualBlockConfig(method).trainable is trainable


class TestDataset:
    def test_shape_and_labels(self, dataset):
        assert len(dataset) == 60
        assert dataset.dim == 4
        np.testing.assert_array_equal(np.bincount(dataset.labels), [20, 20, 20])
        lresnet.check_membership(dataset.points.data)

    def test_deterministic(self, dataset):
        again = toynet.SyntheticHierarchyDataset.generate(
            num_points=60, num_classes=3, dim=4, depth=2, branching=2, seed=1
        )
        np.testing.assert_array_equal(again.points.data, dataset.points.data)
        np.testing.assert_array_equal(again.labels, dataset.labels)

    def test_more_classes_than_dimensions(self):
        with pytest.raises(ValueError):
            toynet.SyntheticHierarchyDataset.generate(num_points=10, num_classes=5, dim=4)

    def test_needs_points(self):
        with pytest.raises(ValueError):
            toynet.SyntheticHierarchyDataset.generate(num_points=0)


class TestModel:
    def test_layer_widths_must_match(self, rng):
        layers = [toynet.HLLayer.initialize(rng, 4, 4), toynet.HLLayer.initialize(rng, 4, 3)]
        with pytest.raises(errors.DimensionError):
            toynet.LResNetModel(layers, toynet.ResidualBlockConfig(), 2)

    def test_too_many_classes(self, rng):
        with pytest.raises(ValueError):
            _net(rng, toynet.ResidualBlockConfig(), classes=5)

    def test_w_y_shape(self, rng):
        layers = [toynet.HLLayer.initialize(rng, 4, 4)]
        with pytest.raises(errors.DimensionError):
            toynet.LResNetModel(layers, toynet.ResidualBlockConfig(), 2, w_y=[1.0, 1.0])

    def test_w_y_starts_at_block_weight(self, rng):
        block = toynet.ResidualBlockConfig("lresnet", lresnet.ResidualWeights(1.0, 0.3))
        np.testing.assert_array_equal(_net(rng, block, depth=3).w_y, [0.3, 0.3, 0.3])

    def test_layer_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            toynet.HLLayer([[np.nan]])
        with pytest.raises(errors.DimensionError):
            toynet.HLLayer([1.0, 2.0])

    def test_layer_checks_input_width(self, rng):
        layer = toynet.HLLayer.initialize(rng, 4, 4)
        with pytest.raises(errors.DimensionError):
            layer(lresnet.origin(-1.0, 3))


class TestForward:
    def test_no_layers_reads_first_space_components(self, dataset):
        net = toynet.LResNetModel([], toynet.ResidualBlockConfig(), 3)
        logits, trace = toynet.forward(net, dataset.points)
        np.testing.assert_array_equal(logits, dataset.points.data[:, 1:4])
        assert len(trace) == 1

    def test_identity_layer_keeps_point(self, dataset):
        net = toynet.LResNetModel([toynet.HLLayer(np.eye(4))], toynet.ResidualBlockConfig(), 3)
        _, trace = toynet.forward(net, dataset.points)
        np.testing.assert_allclose(trace[1], dataset.points.data, atol=1e-12)

    @pytest.mark.parametrize("method", toynet.BLOCK_METHODS)
    def test_representations_stay_on_manifold(self, rng, dataset, method):
        net = _net(rng, toynet.ResidualBlockConfig(method), depth=3)
        logits, trace = toynet.forward(net, dataset.points)
        assert logits.shape == (60, 3)
        assert len(trace) == 4
        for h in trace:
            lresnet.check_membership(h)

    @pytest.mark.parametrize("method", ["lresnet", "sa"])
    def test_swapping_arguments_is_bit_identical(self, rng, dataset, method):
        net = _net(rng, toynet.ResidualBlockConfig(method), depth=3)
        plain, plain_trace = toynet.forward(net, dataset.points)
        swapped, swapped_trace = toynet.forward(net, dataset.points, swap_arguments=True)
        np.testing.assert_array_equal(plain, swapped)
        for a, b in zip(plain_trace, swapped_trace):
            np.testing.assert_array_equal(a, b)

    def test_swapping_arguments_matters_for_pt(self, rng, dataset):
        net = _net(rng, toynet.ResidualBlockConfig("pt"))
        plain, _ = toynet.forward(net, dataset.points)
        swapped, _ = toynet.forward(net, dataset.points, swap_arguments=True)
        assert not np.allclose(plain, swapped)

    def test_wrong_input_width(self, rng):
        net = _net(rng, toynet.ResidualBlockConfig())
        with pytest.raises(errors.DimensionError):
            toynet.forward(net, lresnet.origin(-1.0, 5))

    def test_softmax(self):
        probs = toynet.softmax(np.array([[1000.0, 1000.0], [0.0, math.log(3.0)]]))
        np.testing.assert_allclose(probs, [[0.5, 0.5], [0.25, 0.75]])


class TestGradients:
    @pytest.mark.parametrize(
        "block",
        [
            toynet.ResidualBlockConfig("lresnet", lresnet.ResidualWeights(1.0, 0.8)),
            toynet.ResidualBlockConfig("lresnet", lresnet.ResidualWeights(0.7, -1.2)),
            toynet.ResidualBlockConfig("lresnet", scale=lresnet.ScaleFactor(1.3)),
            toynet.ResidualBlockConfig("lresnet", scale=lresnet.ScaleFactor(0.6, trainable=True)),
            toynet.ResidualBlockConfig("sa"),
            toynet.ResidualBlockConfig("none"),
        ],
    )
    def test_against_finite_differences(self, rng, dataset, block):
        net = _net(rng, block)
        points = dataset.points.data[:20]
        labels = dataset.labels[:20]
        _, grads = toynet.loss_and_grad(net, points, labels)

        for layer, g in zip(net.layers, grads.weights):
            assert g.shape == layer.weight.shape
            for index in (0, 5, 15):
                numeric = _numeric_grad(net, points, labels, layer.weight, index)
                assert g.reshape(-1)[index] == pytest.approx(numeric, rel=1e-5, abs=1e-8)

        if block.method == "lresnet":
            for index in range(net.depth):
                numeric = _numeric_grad(net, points, labels, net.w_y, index)
                assert grads.w_y[index] == pytest.approx(numeric, rel=1e-5, abs=1e-8)
        else:
            np.testing.assert_array_equal(grads.w_y, 0.0)

        if block.scale is not None:
            for index in range(net.depth):
                numeric = _numeric_grad(net, points, labels, net.gamma, index)
                assert grads.gamma[index] == pytest.approx(numeric, rel=1e-5, abs=1e-8)
        else:
            np.testing.assert_array_equal(grads.gamma, 0.0)

    @pytest.mark.parametrize("method", ["pt", "ts"])
    def test_unavailable(self, rng, dataset, method):
        net = _net(rng, toynet.ResidualBlockConfig(method))
        with pytest.raises(errors.GradientUnavailable):
            toynet.loss_and_grad(net, dataset.points, dataset.labels)
        with pytest.raises(errors.GradientUnavailable):
            toynet.train(net, dataset, epochs=1)


class TestTraining:
    def test_zero_learning_rate_is_constant(self, rng, dataset):
        net = _net(rng, toynet.ResidualBlockConfig())
        before = [layer.weight.copy() for layer in net.layers]
        curve = toynet.train(net, dataset, epochs=3, lr=0.0)
        assert len(set(curve.losses)) == 1
        for layer, weight in zip(net.layers, before):
            np.testing.assert_array_equal(layer.weight, weight)

    @pytest.mark.parametrize("method", ["lresnet", "sa", "none"])
    def test_loss_goes_down(self, dataset, method):
        net = _net(np.random.default_rng(0), toynet.ResidualBlockConfig(method))
        curve = toynet.train(net, dataset, epochs=30, lr=0.05)
        assert len(curve.losses) == 31
        assert all(math.isfinite(loss) for loss in curve.losses)
        assert curve.losses[-1] < curve.losses[0]

    def test_fixed_scale_stays(self, dataset):
        block = toynet.ResidualBlockConfig("lresnet", scale=lresnet.ScaleFactor(1.2))
        net = _net(np.random.default_rng(0), block)
        toynet.train(net, dataset, epochs=5)
        np.testing.assert_array_equal(net.gamma, [1.2, 1.2])

    def test_trainable_scale_moves(self, dataset):
        block = toynet.ResidualBlockConfig(
            "lresnet", scale=lresnet.ScaleFactor(1.2, trainable=True)
        )
        net = _net(np.random.default_rng(0), block)
        curve = toynet.train(net, dataset, epochs=30, lr=0.05)
        assert not np.array_equal(net.gamma, [1.2, 1.2])
        assert np.all(net.gamma >= toynet.GAMMA_FLOOR)
        assert curve.losses[-1] < curve.losses[0]
        assert net.scale_for(0).trainable

    def test_deterministic(self, dataset):
        curves = []
        for _ in range(2):
            net = _net(np.random.default_rng(5), toynet.ResidualBlockConfig())
            curves.append(toynet.train(net, dataset, epochs=5, seed=3, batch_size=16))
        assert curves[0].losses == curves[1].losses
        assert curves[0].accuracies == curves[1].accuracies

    def test_rows(self, rng, dataset):
        curve = toynet.train(_net(rng, toynet.ResidualBlockConfig()), dataset, epochs=2)
        rows = curve.to_rows()
        assert [row["epoch"] for row in rows] == [0, 1, 2]
        assert set(rows[0]) == {"epoch", "loss", "accuracy"}
        assert curve.final_accuracy == rows[-1]["accuracy"]

    def test_monotone(self):
        assert toynet.TrainingCurve("lresnet", [3.0, 2.0, 2.0], [0.1, 0.2, 0.3]).monotone
        assert not toynet.TrainingCurve("lresnet", [3.0, 3.5], [0.1, 0.2]).monotone

    def test_divergence_names_layer(self, rng, dataset):
        net = _net(rng, toynet.ResidualBlockConfig("none"))
        net.layers[0].weight[0, 0] = np.nan
        with pytest.raises(errors.TrainingDivergence) as info:
            toynet.train(net, dataset, epochs=1)
        assert info.value.epoch == 0
        assert info.value.layer == 1

    def test_invalid_arguments(self, rng, dataset):
        net = _net(rng, toynet.ResidualBlockConfig())
        with pytest.raises(ValueError):
            toynet.train(net, dataset, epochs=-1)

    @pytest.mark.slow
    def test_default_run(self):
        data = toynet.SyntheticHierarchyDataset.generate()
        net = toynet.LResNetModel.initialize(
            np.random.default_rng(0), data.dim, 4, data.num_classes, toynet.ResidualBlockConfig()
        )
        curve = toynet.train(net, data)
        assert curve.losses[-1] < curve.losses[0]
        assert curve.final_accuracy >= 0.85


class TestOversmoothing:
    def test_rows(self, dataset):
        rows = toynet.oversmoothing_diagnostic([1, 2], "lresnet", dataset, epochs=2)
        assert [(r.depth, r.method) for r in rows] == [
            (1, "lresnet"),
            (1, "none"),
            (2, "lresnet"),
            (2, "none"),
        ]
        assert all(r.trained for r in rows)
        assert all(r.mean_distance > 0 for r in rows)

    def test_forward_only_methods(self, dataset):
        rows = toynet.oversmoothing_diagnostic([2], "pt", dataset, epochs=2)
        assert [r.trained for r in rows] == [False, True]

    def test_deterministic(self, dataset):
        first = toynet.oversmoothing_diagnostic([1, 3], "sa", dataset, seed=4, epochs=2)
        second = toynet.oversmoothing_diagnostic([1, 3], "sa", dataset, seed=4, epochs=2)
        assert [r.to_record() for r in first] == [r.to_record() for r in second]

    def test_depths_must_be_sorted(self, dataset):
        with pytest.raises(ValueError):
            toynet.oversmoothing_diagnostic([4, 2], "lresnet", dataset)

    def test_mean_pairwise_distance(self, x, y):
        assert toynet.mean_pairwise_distance(np.stack([x, y])) == pytest.approx(16.0)
        assert toynet.mean_pairwise_distance(x[None, :]) == 0.0

    def test_centroid_spread(self, x, y):
        assert toynet.centroid_spread(np.stack([x, y])) == pytest.approx(2 * np.sqrt(5) - 2)
        assert toynet.centroid_spread(np.stack([x, x, x])) == pytest.approx(0.0, abs=1e-9)
        assert toynet.centroid_spread(x[None, :]) == 0.0

    def test_rows_report_centroid_spread(self, dataset):
        rows = toynet.oversmoothing_diagnostic([2], "lresnet", dataset, epochs=2)
        assert all(r.centroid_spread > 0 for r in rows)
        assert rows[0].to_record()["centroid_spread"] == rows[0].centroid_spread

    def test_diverged_rows_have_no_spread(self):
        row = toynet.DiagnosticRow(4, "none", math.nan, math.nan, True, diverged=True)
        assert row.to_record()["centroid_spread"] is None

    @pytest.mark.slow
    def test_deep_networks(self, dataset):
        with_residual, without = toynet.oversmoothing_diagnostic([32], "lresnet", dataset, epochs=20)
        assert not with_residual.diverged
        if without.diverged:
            return
        assert with_residual.accuracy >= without.accuracy
        assert with_residual.mean_distance > without.mean_distance
