import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphqmc.core import (Cap, PointSet, PointSetFormatError,
                         avg_distance_power, cap_area_constant, cap_measure,
                         cap_measure_from_cos, inverse_cap_measure,
                         read_pointset, rising_factorial, surface_area,
                         write_pointset)

from oracles import mc_mean_distance_power, simpson_cap_measure


class TestSurfaceArea:
    def test_circle(self):
        assert surface_area(1) == pytest.approx(2 * math.pi, rel=1e-15)

    def test_sphere(self):
        assert surface_area(2) == pytest.approx(4 * math.pi, rel=1e-15)

    def test_three_sphere(self):
        assert surface_area(3) == pytest.approx(2 * math.pi ** 2, rel=1e-14)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            surface_area(0)


class TestCapAreaConstant:
    def test_s2_value(self):
        assert cap_area_constant(2) == pytest.approx(0.25, rel=1e-15)

    def test_s3_value(self):
        assert cap_area_constant(3) == pytest.approx(2 / (3 * math.pi), rel=1e-14)

    def test_two_forms_agree(self):
        for d in range(2, 21):
            a = cap_area_constant(d, form="gamma")
            b = cap_area_constant(d, form="area")
            assert a == pytest.approx(b, rel=1e-14)

    def test_rejects_small_d(self):
        with pytest.raises(ValueError):
            cap_area_constant(1)


class TestRisingFactorial:
    def test_empty_product(self):
        assert rising_factorial(3.7, 0) == 1.0

    def test_factorial(self):
        assert rising_factorial(1.0, 5) == 120.0

    def test_negative_half(self):
        assert rising_factorial(-0.5, 2) == pytest.approx(-0.25, abs=0)

    def test_hits_zero_exactly(self):
        assert rising_factorial(-3.0, 5) == 0.0

    @given(st.floats(min_value=0.05, max_value=10.0), st.integers(0, 20))
    @settings(max_examples=60, deadline=None)
    def test_matches_gamma_ratio(self, a, n):
        via_gamma = math.exp(math.lgamma(n + a) - math.lgamma(a))
        assert rising_factorial(a, n) == pytest.approx(via_gamma, rel=1e-12)


class TestCapMeasure:
    def test_whole_sphere(self):
        for d in (2, 3, 5):
            assert cap_measure(d, math.pi) == pytest.approx(1.0, abs=1e-14)

    def test_hemisphere(self):
        assert cap_measure(2, math.pi / 2) == pytest.approx(0.5, abs=1e-14)

    def test_s2_closed_form(self):
        for theta in np.linspace(0, math.pi, 23):
            expect = (1 - math.cos(theta)) / 2
            assert cap_measure(2, theta) == pytest.approx(expect, abs=1e-12)

    def test_sixty_degrees(self):
        assert cap_measure(2, math.pi / 3) == pytest.approx(0.25, abs=1e-14)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            cap_measure(2, -0.1)
        with pytest.raises(ValueError):
            cap_measure(2, math.pi + 0.1)

    def test_against_simpson(self):
        for d in (2, 3, 4):
            for theta in (0.3, 1.1, 2.5):
                assert cap_measure(d, theta) == pytest.approx(
                    simpson_cap_measure(d, theta), abs=1e-10)

    @given(st.integers(2, 5),
           st.floats(0.0, math.pi), st.floats(0.0, math.pi))
    @settings(max_examples=60, deadline=None)
    def test_monotone(self, d, t1, t2):
        lo, hi = sorted((t1, t2))
        assert cap_measure(d, lo) <= cap_measure(d, hi) + 1e-15

    def test_inverse_round_trip(self):
        for m in (0.0, 0.1, 0.5, 0.93, 1.0):
            theta = inverse_cap_measure(2, m)
            assert cap_measure(2, theta) == pytest.approx(m, abs=1e-12)

    def test_from_cos_matches(self):
        thetas = np.linspace(0, math.pi, 9)
        got = cap_measure_from_cos(3, np.cos(thetas))
        want = [cap_measure(3, t) for t in thetas]
        np.testing.assert_allclose(got, want, atol=1e-13)


class TestAvgDistancePower:
    def test_s2_distance(self):
        assert avg_distance_power(2, 1.5) == pytest.approx(4 / 3, rel=1e-14)

    def test_s3_value(self):
        assert avg_distance_power(3, 2.0) == pytest.approx(
            64 / (15 * math.pi), rel=1e-14)

    def test_rejects_low_smoothness(self):
        with pytest.raises(ValueError):
            avg_distance_power(2, 1.0)

    def test_monte_carlo_mean_distance(self):
        # s = (d+1)/2 makes the integrand the plain distance
        for d in (2, 3):
            est, se = mc_mean_distance_power(d, (d + 1) / 2, 400_000, seed=7 + d)
            assert abs(avg_distance_power(d, (d + 1) / 2) - est) <= 3 * se

    def test_monte_carlo_general_power(self):
        est, se = mc_mean_distance_power(2, 1.8, 400_000, seed=3)
        assert abs(avg_distance_power(2, 1.8) - est) <= 3 * se


class TestCap:
    def test_contains_and_measure(self):
        cap = Cap(np.array([0.0, 0.0, 1.0]), math.pi / 3)
        pts = np.array([[0, 0, 1.0], [0, 1.0, 0], [0, 0, -1.0],
                        [0, math.sin(math.pi / 3), math.cos(math.pi / 3)]])
        np.testing.assert_array_equal(cap.contains(pts),
                                      [True, False, False, True])
        assert cap.measure() == pytest.approx(0.25, abs=1e-14)

    def test_validates_inputs(self):
        with pytest.raises(ValueError):
            Cap(np.array([0.0, 0.0, 0.5]), 1.0)
        with pytest.raises(ValueError):
            Cap(np.array([0.0, 0.0, 1.0]), -0.2)


class TestPointSet:
    def test_renormalizes_close_points(self):
        ps = PointSet(np.array([[1.0 + 1e-9, 0, 0], [0, 1, 0]]))
        np.testing.assert_allclose(np.linalg.norm(ps.points, axis=1), 1.0,
                                   atol=1e-12)

    def test_rejects_far_points(self):
        with pytest.raises(ValueError, match="norm"):
            PointSet(np.array([[0.5, 0, 0], [0, 1, 0]]))

    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            PointSet(np.ones(3))
        with pytest.raises(ValueError):
            PointSet(np.ones((0, 3)))
        with pytest.raises(ValueError):
            PointSet(np.array([[1.0, 0.0]]))  # d = 1 unsupported

    def test_immutable(self):
        ps = PointSet(np.eye(3))
        with pytest.raises(ValueError):
            ps.points[0, 0] = 2.0

    def test_dim_and_len(self):
        ps = PointSet(np.eye(4))
        assert ps.dim == 3
        assert ps.n == 4
        assert len(ps) == 4


class TestPointSetIO:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        pts = rng.standard_normal((37, 4))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        ps = PointSet(pts, label="trip")
        path = tmp_path / "pts.txt"
        write_pointset(ps, path)
        back = read_pointset(path)
        assert np.array_equal(back.points, ps.points)
        assert back.label == "trip"

    def test_octahedron_file(self, tmp_path):
        path = tmp_path / "oct.txt"
        path.write_text("1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1\n")
        ps = read_pointset(path)
        assert ps.n == 6
        assert ps.dim == 2

    def test_near_unit_point_renormalized(self, tmp_path):
        path = tmp_path / "near.txt"
        path.write_text(f"{1 + 1e-9} 0 0\n0 1 0\n0 0 1\n")
        ps = read_pointset(path)
        np.testing.assert_allclose(np.linalg.norm(ps.points, axis=1), 1.0,
                                   atol=1e-12)

    def test_bad_norm_names_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 0 0\n0.5 0 0\n0 0 1\n")
        with pytest.raises(PointSetFormatError) as err:
            read_pointset(path)
        assert err.value.line == 2

    def test_non_numeric_names_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 0 0\n0 zero 1\n")
        with pytest.raises(PointSetFormatError) as err:
            read_pointset(path)
        assert err.value.line == 2

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 0 0\n0 1\n")
        with pytest.raises(PointSetFormatError) as err:
            read_pointset(path)
        assert err.value.line == 2

    def test_header_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("# dim=3 n=5\n1 0 0\n0 1 0\n")
        with pytest.raises(PointSetFormatError):
            read_pointset(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("\n\n")
        with pytest.raises(PointSetFormatError):
            read_pointset(path)
