import math

import numpy as np
import pytest
from conftest import curvatures
from conftest import space_vectors
from hypothesis import given
from hypothesis import settings

import lresnet
from lresnet import errors


class TestInnerProduct:
    def test_origin_self_product_is_inverse_curvature(self):
        o = lresnet.origin(-1.0, 2)
        assert lresnet.lorentz_inner(o, o) == pytest.approx(-1.0)

    def test_mixed_pair(self, x, y):
        assert lresnet.lorentz_inner(x, y) == pytest.approx(-9.0)

    def test_point_on_hyperboloid(self, x):
        assert lresnet.lorentz_inner(x, x) == pytest.approx(-1.0)

    def test_length_mismatch(self):
        with pytest.raises(errors.DimensionError):
            lresnet.lorentz_inner([1.0, 0.0], [1.0, 0.0, 0.0])

    def test_too_short(self):
        with pytest.raises(errors.DimensionError):
            lresnet.lorentz_inner([1.0], [1.0])

    def test_batched(self, batch):
        products = lresnet.lorentz_inner(batch.data, batch.data)
        assert products.shape == (batch.rows,)
        np.testing.assert_allclose(products, -1.0, atol=1e-9)


class TestNorm:
    def test_origin(self):
        assert lresnet.lorentz_norm(lresnet.origin(-1.0, 3)) == pytest.approx(1.0)

    def test_time_like(self):
        assert lresnet.lorentz_norm([6.0, 4.0, 0.0]) == pytest.approx(math.sqrt(20))

    def test_zero_vector(self):
        assert lresnet.lorentz_norm(np.zeros(3)) == 0.0

    def test_nan_propagates(self):
        assert np.isnan(lresnet.lorentz_norm([np.nan, 1.0, 0.0]))


class TestOrigin:
    @pytest.mark.parametrize(
        "k, n, expected",
        [
            (-1.0, 2, [1.0, 0.0, 0.0]),
            (-0.5, 2, [math.sqrt(2), 0.0, 0.0]),
            (-2.0, 3, [math.sqrt(0.5), 0.0, 0.0, 0.0]),
        ],
    )
    def test_values(self, k, n, expected):
        np.testing.assert_allclose(lresnet.origin(k, n), expected)

    def test_dtype(self):
        assert lresnet.origin(-1.0, 4, np.float32).dtype == np.float32

    def test_needs_space_dimension(self):
        with pytest.raises(errors.DimensionError):
            lresnet.origin(-1.0, 0)

    @pytest.mark.parametrize("k", [0.0, 1.0, math.inf, math.nan])
    def test_invalid_curvature(self, k):
        with pytest.raises(errors.ManifoldError):
            lresnet.origin(k, 2)


class TestLift:
    def test_paper_point(self, x):
        np.testing.assert_allclose(lresnet.lift_from_space([2.0, -2.0]), x)

    def test_zero_is_origin(self):
        np.testing.assert_allclose(lresnet.lift_from_space([0.0, 0.0]), [1.0, 0.0, 0.0])

    def test_other(self):
        np.testing.assert_allclose(lresnet.lift_from_space([4.0, 0.0]), [math.sqrt(17), 4, 0])

    @settings(max_examples=50, deadline=None)
    @given(space=space_vectors(), k=curvatures)
    def test_on_manifold(self, space, k):
        point = lresnet.lift_from_space(space, k)
        assert lresnet.membership_error(point, k) < 1e-12 * max(1.0, point[0] ** 2)


class TestExpLog:
    def test_zero_tangent(self):
        o = lresnet.origin(-1.0, 2)
        np.testing.assert_array_equal(lresnet.exp_map(o, np.zeros(3)), o)

    def test_exp_reaches_paper_point(self, x):
        c = math.acosh(3) / math.sqrt(8) * 2
        v = [0.0, c, -c]
        np.testing.assert_allclose(lresnet.exp_map(lresnet.origin(-1.0, 2), v), x, atol=1e-12)

    def test_log_of_paper_point(self, x):
        v = lresnet.log_map(lresnet.origin(-1.0, 2), x)
        np.testing.assert_allclose(v, [0.0, 1.246451, -1.246451], atol=1e-6)

    def test_tiny_tangent_uses_series(self):
        o = lresnet.origin(-1.0, 2)
        v = np.array([0.0, 1e-9, 0.0])
        np.testing.assert_allclose(lresnet.exp_map(o, v), o + v, atol=1e-15, rtol=0)

    def test_log_of_base_is_zero(self, x):
        np.testing.assert_allclose(lresnet.log_map(x, x), 0.0, atol=1e-12)

    def test_time_like_tangent_rejected(self):
        with pytest.raises(errors.InvalidTangentError):
            lresnet.exp_map(lresnet.origin(-1.0, 2), [1.0, 0.0, 0.0])

    @settings(max_examples=50, deadline=None)
    @given(a=space_vectors(bound=3.0), b=space_vectors(bound=3.0), k=curvatures)
    def test_round_trip(self, a, b, k):
        base = lresnet.lift_from_space(a, k)
        target = lresnet.lift_from_space(b, k)
        back = lresnet.exp_map(base, lresnet.log_map(base, target, k), k)
        np.testing.assert_allclose(back, target, rtol=1e-8, atol=1e-8)

    def test_clamped_log_never_nan(self):
        x = lresnet.lift_from_space(np.array([1e4, 0.0], dtype=np.float32))
        v, clamped = lresnet.log_map_with_diagnostics(x, x)
        assert clamped.item()
        assert np.all(np.isfinite(v))

    def test_unclamped_log_shows_nan(self):
        x = lresnet.lift_from_space(np.array([1e4, 0.0], dtype=np.float32))
        v, _ = lresnet.log_map_with_diagnostics(x, x, clamp=False)
        assert np.any(np.isnan(v))

    def test_log_map_logs_clamping(self, caplog):
        x = lresnet.lift_from_space(np.array([1e4, 0.0], dtype=np.float32))
        with caplog.at_level("DEBUG", logger="lresnet"):
            lresnet.log_map(x, x)
        assert "clamped" in caplog.text


class TestParallelTransport:
    def test_same_point_is_identity(self, x):
        z = lresnet.project_to_tangent(x, [0.0, 1.0, 3.0])
        np.testing.assert_allclose(lresnet.parallel_transport(x, x, z), z)

    def test_paper_pair_decomposition(self, x, y):
        # log_o(y) = c_u·[0, y_s]; transporting it to x adds c_v·(o + x)
        o = lresnet.origin(-1.0, 2)
        u = lresnet.log_map(o, y)
        c_u = math.acosh(3) / math.sqrt(8)
        c_v = c_u * float(np.dot(x[1:], y[1:])) / (1 + x[0])
        expected = u + c_v * (o + x)
        np.testing.assert_allclose(lresnet.parallel_transport(o, x, u), expected, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(
        a=space_vectors(bound=2.0),
        b=space_vectors(bound=2.0),
        w=space_vectors(dim=5, bound=2.0),
        k=curvatures,
    )
    def test_isometry(self, a, b, w, k):
        x = lresnet.lift_from_space(a, k)
        y = lresnet.lift_from_space(b, k)
        z = lresnet.project_to_tangent(x, w, k)
        moved = lresnet.parallel_transport(x, y, z, k)

        scale = max(1.0, float(np.dot(z, z)))
        assert lresnet.lorentz_inner(moved, moved) == pytest.approx(
            lresnet.lorentz_inner(z, z), abs=1e-9 * scale
        )
        assert abs(lresnet.lorentz_inner(y, moved)) < 1e-8 * scale * y[0]

    def test_degenerate_pair(self):
        # only reachable with a point off the upper sheet
        x = lresnet.origin(-1.0, 2)
        y = -x
        with pytest.raises(errors.DegeneratePairError):
            lresnet.parallel_transport(x, y, np.zeros(3))


class TestModels:
    def test_klein(self, x):
        np.testing.assert_allclose(lresnet.to_klein(x), [2 / 3, -2 / 3])
        np.testing.assert_allclose(lresnet.to_klein([9.0, 8.0, -4.0]), [8 / 9, -4 / 9])
        np.testing.assert_array_equal(lresnet.to_klein(lresnet.origin(-1.0, 2)), [0.0, 0.0])

    def test_poincare(self, x):
        np.testing.assert_allclose(lresnet.to_poincare(x), [0.5, -0.5])
        np.testing.assert_array_equal(lresnet.to_poincare(lresnet.origin(-1.0, 2)), [0.0, 0.0])

    def test_poincare_inside_ball(self, rng):
        points = lresnet.sample_points(rng, 10_000, 6, sigma=3.0)
        norms = np.linalg.norm(lresnet.to_poincare(points.data, -1.0), axis=-1)
        assert np.all(norms < 1)

    @settings(max_examples=50, deadline=None)
    @given(space=space_vectors(), k=curvatures)
    def test_poincare_round_trip(self, space, k):
        point = lresnet.lift_from_space(space, k)
        back = lresnet.from_poincare(lresnet.to_poincare(point, k), k)
        np.testing.assert_allclose(back, point, rtol=1e-9, atol=1e-9)

    def test_from_poincare_outside_ball(self):
        with pytest.raises(errors.DomainError):
            lresnet.from_poincare([1.0, 0.0])


class TestDistances:
    def test_poincare_to_self(self):
        assert lresnet.poincare_distance([0.3, 0.1], [0.3, 0.1]) == 0.0

    def test_poincare_value(self):
        assert lresnet.poincare_distance([0.0, 0.0], [0.5, 0.0]) == pytest.approx(math.log(3))

    def test_poincare_symmetric(self, rng):
        a = rng.uniform(-0.5, 0.5, size=(100, 3))
        b = rng.uniform(-0.5, 0.5, size=(100, 3))
        np.testing.assert_allclose(
            lresnet.poincare_distance(a, b), lresnet.poincare_distance(b, a)
        )

    def test_poincare_domain(self):
        with pytest.raises(errors.DomainError):
            lresnet.poincare_distance([1.0, 0.0], [0.0, 0.0])

    def test_poincare_boundary_float32_overflows(self):
        near = np.array([1 - 1e-8, 0.0])
        assert not np.isfinite(lresnet.poincare_distance(near, [0.0, 0.0], dtype=np.float32))

    def test_squared_distance(self, x, y):
        assert lresnet.squared_lorentz_distance(x, x) == 0.0
        assert lresnet.squared_lorentz_distance(x, y) == pytest.approx(16.0)

    def test_squared_distance_identity(self, batch):
        a = batch.data[:32]
        b = batch.data[32:]
        diff = a - b
        np.testing.assert_allclose(
            lresnet.squared_lorentz_distance(a, b), lresnet.lorentz_inner(diff, diff), atol=1e-9
        )

    def test_lorentz_distance_matches_poincare(self, rng):
        a = rng.uniform(-0.4, 0.4, size=(50, 3))
        b = rng.uniform(-0.4, 0.4, size=(50, 3))
        np.testing.assert_allclose(
            lresnet.lorentz_distance(lresnet.from_poincare(a), lresnet.from_poincare(b), -1.0),
            lresnet.poincare_distance(a, b),
            rtol=1e-7,
        )


class TestMembership:
    def test_check_accepts(self, batch):
        lresnet.check_membership(batch.data)

    def test_origin_is_exactly_on(self):
        assert lresnet.membership_error(lresnet.origin(-1.0, 3), -1.0) == 0.0

    @pytest.mark.parametrize("k", [-0.5, -2.0])
    def test_origin_other_curvatures(self, k):
        assert lresnet.membership_error(lresnet.origin(k, 4), k) < 1e-15

    def test_worked_points_pass(self, x, y):
        lresnet.check_membership(x)
        lresnet.check_membership(np.stack([x, y]))
        assert lresnet.membership_error(x, -1.0) == 0.0

    def test_residual_output_passes(self, x):
        out = lresnet.lresnet_add(x, [1.0, 0.0, 0.0], (1.0, 1.0))
        lresnet.check_membership(out)

    def test_allowance_is_absolute(self):
        # x_t = 100 with K<x,x>_L - 1 = 5e-6
        point = np.array([100.0, math.sqrt(100.0**2 - 1 - 5e-6), 0.0])
        assert lresnet.membership_error(point, -1.0) == pytest.approx(5e-6, rel=1e-3)
        with pytest.raises(errors.ManifoldError, match="time = 100"):
            lresnet.check_membership(point)

    def test_time_scaled_allowance(self):
        point = np.array([100.0, math.sqrt(100.0**2 - 1 - 5e-6), 0.0])
        assert not lresnet.Tolerances().time_scaled
        lresnet.check_membership(point, tolerances=lresnet.Tolerances(time_scaled=True))

    def test_sampled_single_precision_batch(self, rng):
        batch = lresnet.sample_points(rng, 100, 128, sigma=5.0, dtype=np.float32)
        assert batch.tolerances.time_scaled
        assert batch.dtype == np.float32

    def test_check_rejects_off_manifold(self, x):
        bad = x.copy()
        bad[0] += 0.5
        with pytest.raises(errors.ManifoldError, match="Row 0"):
            lresnet.check_membership(bad)

    def test_check_rejects_lower_sheet(self, x):
        with pytest.raises(errors.ManifoldError):
            lresnet.check_membership(-x)

    def test_renormalize(self, x):
        np.testing.assert_allclose(lresnet.renormalize(2.5 * x, -1.0), x)


class TestTypes:
    def test_point_from_space(self, x):
        point = lresnet.LorentzPoint.from_space([2.0, -2.0])
        np.testing.assert_allclose(point.coords, x)
        assert point.time == pytest.approx(3.0)
        assert point.dim == 2

    def test_point_is_read_only(self, x):
        point = lresnet.LorentzPoint(x)
        with pytest.raises(ValueError):
            point.coords[0] = 1.0

    def test_point_validates(self):
        with pytest.raises(errors.ManifoldError):
            lresnet.LorentzPoint([1.0, 1.0, 0.0])

    def test_point_rejects_short_vector(self):
        with pytest.raises(errors.DimensionError):
            lresnet.LorentzPoint([1.0])

    def test_curvature_travels_with_points(self):
        k = lresnet.Curvature(-2.0)
        a = lresnet.LorentzPoint.from_space([1.0, 0.5], k)
        b = lresnet.LorentzPoint.from_space([-0.3, 0.2], k)
        tangent = a.log(b)
        assert tangent.curvature == k
        np.testing.assert_allclose(tangent.exp().coords, b.coords, atol=1e-12)

    def test_tangent_validates(self, x):
        with pytest.raises(errors.InvalidTangentError):
            lresnet.TangentVector(lresnet.LorentzPoint(x), [1.0, 0.0, 0.0])

    def test_tangent_transport(self, x, y):
        a = lresnet.LorentzPoint(x)
        b = lresnet.LorentzPoint(y)
        moved = a.log(b).transport(b)
        assert moved.base is b

    def test_batch(self, batch):
        assert len(batch) == 64
        assert batch.dim == 8
        assert isinstance(batch[3], lresnet.LorentzPoint)
        assert batch.astype(np.float32).dtype == np.float32

    def test_batch_must_be_2d(self, x):
        with pytest.raises(errors.DimensionError):
            lresnet.LorentzBatch(x)

    def test_sampling_is_seeded(self):
        a = lresnet.sample_points(np.random.default_rng(5), 10, 3)
        b = lresnet.sample_points(np.random.default_rng(5), 10, 3)
        np.testing.assert_array_equal(a.data, b.data)

    def test_tolerances_per_dtype(self):
        assert lresnet.Tolerances.for_dtype(np.float32).membership > lresnet.Tolerances().membership
        with pytest.raises(ValueError):
            lresnet.Tolerances(membership=0)
