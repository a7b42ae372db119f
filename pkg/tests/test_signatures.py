import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from maskshapes.errors import DegenerateContourError
from maskshapes.signatures import (
    SIGNATURE_KINDS,
    ShapeSignature,
    all_signatures,
    area_function,
    centroid_distance_function,
    chord_length_function,
    curvature_function,
    resample_equal_arclength,
    summarize_signature,
    tangent_angle_function,
    triangle_area_signature,
)

UNIT_SQUARE = np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [0.0, 10.0]])


class TestResample:
    def test_square_quartile_points_appear_at_n8(self):
        # the quartile points of the closed path are every other sample
        pts = resample_equal_arclength(UNIT_SQUARE, 8)
        assert np.allclose(pts[0::2], UNIT_SQUARE)

    def test_equally_spaced_input_is_fixed_point(self):
        t = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
        circle = np.stack([np.cos(t), np.sin(t)], axis=1) * 40.0
        assert np.allclose(resample_equal_arclength(circle, 64), circle, atol=1e-9)

    def test_perimeter_preserved(self, square_contour):
        pts = resample_equal_arclength(square_contour, 128)
        assert oracles.path_length(pts) == pytest.approx(396.0, abs=1e-9)

    def test_sample_count_and_start(self, disc_contour):
        pts = resample_equal_arclength(disc_contour, 128)
        assert pts.shape == (128, 2)
        assert np.allclose(pts[0], disc_contour.points[0])

    def test_consecutive_spacing_uniform_on_smooth_circle(self):
        t = np.linspace(0.0, 2.0 * np.pi, 360, endpoint=False)
        circle = np.stack([80 + 64 * np.cos(t), 80 - 64 * np.sin(t)], axis=1)
        gaps = np.hypot(*(np.roll(resample_equal_arclength(circle, 128), -1, axis=0)
                          - resample_equal_arclength(circle, 128)).T)
        assert gaps.max() / gaps.min() <= 1.02

    def test_spacing_on_rasterized_disc(self, disc_contour):
        # the pixel staircase shortens chords where the path zigzags, so the
        # Euclidean gaps spread wider than on a smooth curve; the mean still
        # matches perimeter / n exactly
        pts = resample_equal_arclength(disc_contour, 128)
        gaps = np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)
        assert gaps.max() / gaps.min() <= 1.10
        perimeter = oracles.path_length(np.asarray(disc_contour.points, float))
        assert gaps.sum() <= perimeter + 1e-9

    def test_too_few_samples_rejected(self):
        with pytest.raises(ValueError):
            resample_equal_arclength(UNIT_SQUARE, 4)
        with pytest.raises(ValueError):
            resample_equal_arclength(UNIT_SQUARE, 7)

    def test_zero_perimeter_rejected(self):
        degenerate = np.zeros((5, 2))
        with pytest.raises(DegenerateContourError):
            resample_equal_arclength(degenerate, 8)


class TestCentroidDistance:
    def test_disc_near_constant_radius(self, disc_contour):
        sig = centroid_distance_function(disc_contour, 128)
        vals = np.asarray(sig.values)
        assert sig.kind == "centroid_distance"
        assert ((vals >= 64 - 1.5) & (vals <= 64 + 1.5)).all()
        assert vals.mean() == pytest.approx(63.546768391, abs=1e-6)
        assert vals.std() == pytest.approx(0.232684341, abs=1e-6)

    def test_square_corner_and_edge_distances(self, square_contour):
        vals = np.asarray(centroid_distance_function(square_contour, 128).values)
        assert vals.max() == pytest.approx(50.0 * np.sqrt(2.0), abs=1.5)
        assert vals.min() == pytest.approx(50.0, abs=1.5)

    def test_translation_invariance(self, square_contour):
        base = np.asarray(centroid_distance_function(square_contour, 128).values)
        shifted = np.asarray(square_contour.points, float) + [17.0, 23.0]
        moved = np.asarray(centroid_distance_function(shifted, 128).values)
        assert np.abs(base - moved).max() < 1e-9

    def test_rotation_robustness(self, disc_contour):
        from conftest import disc_array, trace_largest

        rotated = trace_largest(np.rot90(disc_array()))
        m0 = np.asarray(centroid_distance_function(disc_contour, 128).values).mean()
        m1 = np.asarray(centroid_distance_function(rotated, 128).values).mean()
        assert abs(m1 - m0) / m0 < 0.01


class TestTangentAngle:
    def test_disc_winds_once_nearly_monotonically(self, disc_contour):
        vals = np.asarray(tangent_angle_function(disc_contour, 128).values)
        steps = np.diff(vals)
        assert steps.min() > -0.05
        assert (steps >= 0).mean() >= 0.90
        assert oracles.total_winding(vals) == pytest.approx(2.0 * np.pi, abs=0.1)

    def test_square_staircase_of_quarter_turns(self, square_contour):
        vals = np.asarray(tangent_angle_function(square_contour, 128).values)
        # four flat plateaus a quarter turn apart, holding most of the samples
        steps = np.diff(vals)
        flat_idx = np.nonzero((np.abs(steps[:-1]) < 0.05) & (np.abs(steps[1:]) < 0.05))[0] + 1
        assert len(flat_idx) >= 0.6 * len(vals)
        plateau = vals[flat_idx]
        resultant = np.exp(4j * plateau).mean()
        assert np.abs(resultant) > 0.9  # concentrated at a common value mod pi/2
        anchor = np.angle(resultant) / 4.0
        levels = np.round((plateau - anchor) / (np.pi / 2.0)).astype(int) % 4
        counts = np.bincount(levels, minlength=4)
        assert (counts >= 0.15 * len(plateau)).all()
        assert oracles.total_winding(vals) == pytest.approx(2.0 * np.pi, abs=0.1)

    def test_reversed_contour_negates_winding(self, disc_contour):
        fwd = np.asarray(tangent_angle_function(disc_contour, 128).values)
        rev = np.asarray(
            tangent_angle_function(np.asarray(disc_contour.points)[::-1].copy(), 128).values
        )
        assert oracles.total_winding(rev) == pytest.approx(-oracles.total_winding(fwd), abs=0.1)


class TestCurvature:
    def test_disc_curvature_is_inverse_radius(self, disc_contour):
        vals = np.asarray(curvature_function(disc_contour, 128).values)
        assert vals.mean() == pytest.approx(1.0 / 64.0, rel=0.10)

    def test_long_thin_rectangle_flat_sides(self):
        from conftest import trace_largest

        arr = np.zeros((40, 200), dtype=bool)
        arr[15:25, 10:190] = True
        vals = np.asarray(curvature_function(trace_largest(arr), 128).values)
        assert np.median(np.abs(vals)) < 1e-9

    def test_scaling_halves_curvature(self, disc_contour):
        pts = np.asarray(disc_contour.points, float)
        k1 = np.asarray(curvature_function(pts, 128).values)
        k2 = np.asarray(curvature_function(pts * 2.0, 128).values)
        assert k2.mean() / k1.mean() == pytest.approx(0.5, rel=0.02)


class TestAreaFunction:
    def test_analytic_circle_sector_triangles(self):
        t = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
        circle = np.stack([80 + 64 * np.cos(t), 80 - 64 * np.sin(t)], axis=1)
        vals = np.asarray(area_function(circle, 128).values)
        analytic = 0.5 * 64.0**2 * np.sin(2.0 * np.pi / 128.0)
        assert (np.abs(vals - analytic) / analytic < 0.05).all()
        assert (vals >= 0).all()

    def test_rasterized_disc_mean_matches_sector(self, disc_contour):
        vals = np.asarray(area_function(disc_contour, 128).values)
        r_eff = np.asarray(centroid_distance_function(disc_contour, 128).values).mean()
        analytic = 0.5 * r_eff**2 * np.sin(2.0 * np.pi / 128.0)
        assert vals.mean() == pytest.approx(analytic, rel=0.05)

    def test_collinear_triple_gives_zero_sample(self):
        # L-polygon sized so the centroid sits exactly on the line y = 2, the
        # inner edge: samples (8,2) -> (6,2) form a collinear triple with it.
        poly = np.array([[0.0, 0.0], [8.0, 0.0], [8.0, 2.0], [2.0, 2.0], [2.0, 6.0], [0.0, 6.0]])
        vals = np.asarray(area_function(poly, 15).values)
        assert vals.min() == pytest.approx(0.0, abs=1e-9)

    def test_fan_sum_matches_shoelace_on_convex(self, disc_contour):
        vals = np.asarray(area_function(disc_contour, 128).values)
        shoelace = oracles.fan_area(np.asarray(disc_contour.points, float))
        assert vals.sum() == pytest.approx(shoelace, rel=0.03)


class TestChordLength:
    def test_disc_diameters(self, disc_contour):
        vals = np.asarray(chord_length_function(disc_contour, 128).values)
        assert ((vals >= 128 - 3) & (vals <= 128 + 3)).all()

    def test_square_diagonal(self, square_contour):
        vals = np.asarray(chord_length_function(square_contour, 128).values)
        assert vals.max() == pytest.approx(100.0 * np.sqrt(2.0), abs=3.0)

    def test_odd_sample_count_rejected(self, square_contour):
        with pytest.raises(ValueError):
            chord_length_function(square_contour, 127)

    def test_translation_invariance(self, disc_contour):
        base = np.asarray(chord_length_function(disc_contour, 64).values)
        moved = np.asarray(
            chord_length_function(np.asarray(disc_contour.points, float) + [3.5, -8.25], 64).values
        )
        assert np.abs(base - moved).max() < 1e-9


class TestTriangleArea:
    def test_convex_contour_single_sign(self, disc_contour):
        vals = np.asarray(triangle_area_signature(disc_contour, 128).values)
        assert (vals > 0).all()

    def test_l_shape_has_negative_samples(self, l_shape_contour):
        vals = np.asarray(triangle_area_signature(l_shape_contour, 128).values)
        assert (vals < 0).sum() == 25

    def test_mirror_negates(self, disc_contour):
        pts = np.asarray(disc_contour.points, float)
        mirrored = pts.copy()
        mirrored[:, 0] = 159.0 - mirrored[:, 0]
        fwd = np.asarray(triangle_area_signature(pts, 64).values)
        rev = np.asarray(triangle_area_signature(mirrored, 64).values)
        assert np.abs(fwd + rev).max() < 1e-9

    def test_offset_validation(self, disc_contour):
        with pytest.raises(ValueError):
            triangle_area_signature(disc_contour, 64, ts=0)
        with pytest.raises(ValueError):
            triangle_area_signature(disc_contour, 64, ts=32)
        assert triangle_area_signature(disc_contour, 64, ts=31).n_samples == 64

    def test_default_offset_is_eighth(self, disc_contour):
        explicit = np.asarray(triangle_area_signature(disc_contour, 64, ts=8).values)
        default = np.asarray(triangle_area_signature(disc_contour, 64).values)
        assert np.array_equal(explicit, default)


class TestSummarize:
    def test_constant_signature(self):
        sig = ShapeSignature(kind="centroid_distance", values=[5.0, 5.0, 5.0, 5.0], n_samples=4)
        assert summarize_signature(sig) == {"mean": 5.0, "std": 0.0, "min": 5.0, "max": 5.0}

    def test_two_point_population_std(self):
        sig = ShapeSignature(kind="centroid_distance", values=[0.0, 10.0], n_samples=2)
        stats = summarize_signature(sig)
        assert stats["mean"] == 5.0 and stats["std"] == 5.0
        assert stats["min"] == 0.0 and stats["max"] == 10.0

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=128
        )
    )
    def test_matches_two_pass_oracle(self, values):
        stats = summarize_signature(
            ShapeSignature(kind="curvature", values=values, n_samples=len(values))
        )
        mean, std, lo, hi = oracles.two_pass_stats(values)
        assert stats["mean"] == pytest.approx(mean, abs=1e-9 * max(1.0, abs(mean)))
        assert stats["std"] == pytest.approx(std, abs=1e-6 * max(1.0, abs(std)))
        assert stats["min"] == lo and stats["max"] == hi


class TestAllSignatures:
    def test_roster_and_sample_counts(self, disc_contour):
        sigs = all_signatures(disc_contour, 128)
        assert tuple(sigs) == SIGNATURE_KINDS
        for kind, sig in sigs.items():
            assert sig.kind == kind
            assert sig.n_samples == 128
            assert len(sig.values) == 128
        assert (np.asarray(sigs["centroid_distance"].values) >= 0).all()
        assert (np.asarray(sigs["area_function"].values) >= 0).all()

    @settings(max_examples=20, deadline=None)
    @given(st.integers(-40, 40), st.integers(-40, 40), st.integers(0, 2**32 - 1))
    def test_translation_invariance_of_every_kind(self, dx, dy, seed):
        from conftest import random_blob_array, trace_largest

        contour = trace_largest(random_blob_array(np.random.default_rng(seed)))
        pts = np.asarray(contour.points, float)
        base = all_signatures(pts, 64)
        moved = all_signatures(pts + [dx, dy], 64)
        for kind in SIGNATURE_KINDS:
            delta = np.abs(np.asarray(base[kind].values) - np.asarray(moved[kind].values))
            assert delta.max() < 1e-9, kind

    def test_scale_covariance(self, disc_contour):
        pts = np.asarray(disc_contour.points, float)
        base = all_signatures(pts, 64)
        scaled = all_signatures(pts * 2.0, 64)
        for kind in ("centroid_distance", "chord_length"):
            ratio = np.asarray(scaled[kind].values) / np.asarray(base[kind].values)
            assert np.abs(ratio - 2.0).max() < 0.02 * 2.0
        kappa_ratio = np.asarray(scaled["curvature"].values).mean() / np.asarray(
            base["curvature"].values
        ).mean()
        assert kappa_ratio == pytest.approx(0.5, rel=0.02)
