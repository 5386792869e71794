import math

import numpy as np
import pytest
from conftest import curvatures
from conftest import space_vectors
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st

import lresnet
from lresnet import errors


class TestWeights:
    def test_defaults(self):
        w = lresnet.ResidualWeights()
        assert (w.w_x, w.w_y) == (1.0, 1.0)

    def test_ratio_uses_magnitude(self):
        w = lresnet.ResidualWeights(2.0, -3.0)
        assert w.magnitude_y == 3.0
        assert w.ratio == 1.5

    @pytest.mark.parametrize("w_x", [0.0, -1.0, math.inf, math.nan])
    def test_invalid_w_x(self, w_x):
        with pytest.raises(ValueError):
            lresnet.ResidualWeights(w_x, 1.0)

    def test_invalid_w_y(self):
        with pytest.raises(ValueError):
            lresnet.ResidualWeights(1.0, math.inf)

    @pytest.mark.parametrize("gamma", [0.0, -2.0, math.nan])
    def test_invalid_scale(self, gamma):
        with pytest.raises(ValueError):
            lresnet.ScaleFactor(gamma)


class TestLResNetAdd:
    def test_paper_pair(self, x, y):
        np.testing.assert_allclose(
            lresnet.lresnet_add(x, y), np.array([6.0, 4.0, 0.0]) / math.sqrt(20)
        )
        np.testing.assert_allclose(lresnet.lresnet_add(x, y), [1.341641, 0.894427, 0.0], atol=1e-6)

    def test_same_point(self, x):
        np.testing.assert_allclose(lresnet.lresnet_add(x, x, (1.0, 0.7)), x)

    def test_commutative_with_equal_weights(self, x, y):
        np.testing.assert_allclose(lresnet.lresnet_add(x, y), lresnet.lresnet_add(y, x))

    def test_only_ratio_matters(self, x, y):
        np.testing.assert_allclose(
            lresnet.lresnet_add(x, y, (2.0, 3.0)), lresnet.lresnet_add(x, y, (4.0, 6.0))
        )

    def test_sign_of_w_y_is_ignored(self, x, y):
        np.testing.assert_allclose(
            lresnet.lresnet_add(x, y, (1.0, -0.5)), lresnet.lresnet_add(x, y, (1.0, 0.5))
        )

    def test_zero_w_y_returns_skip_input(self, x, y):
        np.testing.assert_allclose(lresnet.lresnet_add(x, y, (1.0, 0.0)), x)

    @settings(max_examples=50, deadline=None)
    @given(
        a=space_vectors(),
        b=space_vectors(),
        w_x=st.floats(0.1, 10.0),
        w_y=st.floats(-10.0, 10.0),
        k=curvatures,
    )
    def test_stays_on_manifold(self, a, b, w_x, w_y, k):
        out = lresnet.lresnet_add(
            lresnet.lift_from_space(a, k), lresnet.lift_from_space(b, k), (w_x, w_y), k
        )
        lresnet.check_membership(out, k)
        assert out[0] > 0

    def test_curvature_from_points(self):
        a = lresnet.LorentzPoint.from_space([1.0, 0.5], -2.0)
        b = lresnet.LorentzPoint.from_space([-0.3, 2.0], -2.0)
        out = lresnet.lresnet_add(a, b)
        assert lresnet.membership_error(out, -2.0) < 1e-12

    def test_batched(self, batch):
        out = lresnet.lresnet_add(batch.data, batch.data[::-1])
        assert out.shape == batch.data.shape
        lresnet.check_membership(out)

    def test_mismatched_dimensions(self, x):
        with pytest.raises(errors.DimensionError):
            lresnet.lresnet_add(x, lresnet.origin(-1.0, 3))


class TestPTAdd:
    def test_forward(self, x, y):
        np.testing.assert_allclose(lresnet.pt_add(x, y), [9.0, 8.0, -4.0], atol=1e-9)

    def test_reversed_arguments(self, x, y):
        np.testing.assert_allclose(lresnet.pt_add(y, x), [9.0, 8.0, 4.0], atol=1e-9)

    def test_backward_direction(self, x, y):
        np.testing.assert_allclose(
            lresnet.pt_add(x, y, direction="backward"), lresnet.pt_add(y, x)
        )

    def test_invalid_direction(self, x, y):
        with pytest.raises(ValueError):
            lresnet.pt_add(x, y, direction="sideways")

    def test_origin_is_neutral(self, x):
        np.testing.assert_allclose(lresnet.pt_add(x, lresnet.origin(-1.0, 2)), x, atol=1e-12)

    def test_not_commutative(self, x, y):
        assert not np.allclose(lresnet.pt_add(x, y), lresnet.pt_add(y, x))

    def test_on_manifold(self, batch):
        out = lresnet.pt_add(batch.data, batch.data[::-1])
        lresnet.check_membership(out)


class TestTSAdd:
    def test_origins(self):
        o = lresnet.origin(-1.0, 3)
        np.testing.assert_allclose(lresnet.ts_add(o, o), o)

    def test_weights_summing_to_one(self, x):
        np.testing.assert_allclose(lresnet.ts_add(x, x, 0.25, 0.75), x, atol=1e-12)

    @pytest.mark.parametrize("w_x, w_y", [(0.0, 1.0), (1.0, -1.0)])
    def test_non_positive_weights(self, x, y, w_x, w_y):
        with pytest.raises(ValueError):
            lresnet.ts_add(x, y, w_x, w_y)

    def test_commutative_with_equal_weights(self, x, y):
        np.testing.assert_allclose(lresnet.ts_add(x, y), lresnet.ts_add(y, x))

    def test_on_manifold(self, batch):
        lresnet.check_membership(lresnet.ts_add(batch.data, batch.data[::-1], 0.5, 0.5))


class TestSpaceAdd:
    def test_paper_pair(self, x, y):
        np.testing.assert_allclose(lresnet.space_add(x, y), [math.sqrt(17), 4.0, 0.0])

    def test_commutative(self, x, y):
        np.testing.assert_array_equal(lresnet.space_add(x, y), lresnet.space_add(y, x))

    @settings(max_examples=50, deadline=None)
    @given(a=space_vectors(), b=space_vectors(), k=curvatures)
    def test_on_manifold(self, a, b, k):
        out = lresnet.space_add(lresnet.lift_from_space(a, k), lresnet.lift_from_space(b, k), k)
        np.testing.assert_allclose(out[1:], a + b)
        lresnet.check_membership(out, k)


class TestScale:
    def test_doubles_space_part(self, x, y):
        m = lresnet.lresnet_add(x, y)
        np.testing.assert_allclose(lresnet.scale(m, 2.0), [math.sqrt(4.2), 1.788854, 0.0], atol=1e-6)

    def test_unit_factor(self, x):
        np.testing.assert_allclose(lresnet.scale(x, 1.0), x)

    def test_accepts_factor_object(self, x):
        np.testing.assert_allclose(lresnet.scale(x, lresnet.ScaleFactor(0.5)), lresnet.scale(x, 0.5))

    def test_keeps_curvature(self):
        m = lresnet.lift_from_space([1.0, -1.0], -0.5)
        assert lresnet.membership_error(lresnet.scale(m, 3.0, -0.5), -0.5) < 1e-12

    def test_rejects_non_positive(self, x):
        with pytest.raises(ValueError):
            lresnet.scale(x, -1.0)


class TestCentroid:
    def test_two_points_match_lresnet(self, x, y):
        np.testing.assert_allclose(
            lresnet.lorentz_centroid(np.stack([x, y]), [1.0, 2.0]),
            lresnet.lresnet_add(x, y, (1.0, 2.0)),
        )

    def test_single_weight_returns_point(self, x, y):
        np.testing.assert_allclose(lresnet.lorentz_centroid(np.stack([x, y]), [1.0, 0.0]), x)

    def test_minimises_squared_distance(self, rng):
        points = lresnet.sample_points(rng, 5, 3).data
        weights = rng.uniform(0.1, 2.0, size=5)
        center = lresnet.lorentz_centroid(points, weights)

        def cost(c):
            return float(np.sum(weights * lresnet.squared_lorentz_distance(c, points)))

        candidates = lresnet.sample_points(rng, 200, 3).data
        best = cost(center)
        assert all(best <= cost(c) + 1e-12 for c in candidates)

    @pytest.mark.parametrize("weights", [[1.0, -1.0], [0.0, 0.0]])
    def test_invalid_weights(self, x, y, weights):
        with pytest.raises(ValueError):
            lresnet.lorentz_centroid(np.stack([x, y]), weights)

    def test_weight_count(self, x, y):
        with pytest.raises(errors.DimensionError):
            lresnet.lorentz_centroid(np.stack([x, y]), [1.0, 1.0, 1.0])


class TestDispatch:
    def test_matches_direct_calls(self, x, y):
        np.testing.assert_array_equal(lresnet.residual_add("lresnet", x, y), lresnet.lresnet_add(x, y))
        np.testing.assert_array_equal(lresnet.residual_add("pt", x, y), lresnet.pt_add(x, y))
        np.testing.assert_array_equal(lresnet.residual_add("ts", x, y), lresnet.ts_add(x, y))
        np.testing.assert_array_equal(lresnet.residual_add("sa", x, y), lresnet.space_add(x, y))

    def test_ts_uses_weight_magnitude(self, x, y):
        np.testing.assert_array_equal(
            lresnet.residual_add("ts", x, y, weights=(1.0, -0.5)), lresnet.ts_add(x, y, 1.0, 0.5)
        )

    def test_unknown_method(self, x, y):
        with pytest.raises(ValueError, match="Unknown residual method"):
            lresnet.residual_add("mobius", x, y)

    @pytest.mark.parametrize("method", lresnet.METHODS)
    def test_threads_do_not_change_results(self, batch, method):
        other = batch.data[::-1].copy()
        serial = lresnet.residual_add(method, batch.data, other)
        parallel = lresnet.residual_add(method, batch.data, other, threads=4)
        np.testing.assert_allclose(parallel, serial, rtol=1e-14, atol=0)
