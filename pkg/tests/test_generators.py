import math

import numpy as np
import pytest
from scipy.stats import chi2

from sphqmc.core import cap_measure
from sphqmc.generators import (Partition, equal_area_partition, polytope,
                               randomized_equal_area, random_uniform,
                               region_centers, spiral)
from sphqmc.harmonics import design_strength


class TestRandomUniform:
    def test_deterministic(self):
        a = random_uniform(2, 50, 42)
        b = random_uniform(2, 50, 42)
        assert np.array_equal(a.points, b.points)

    def test_seed_changes_points(self):
        a = random_uniform(2, 50, 42)
        b = random_uniform(2, 50, 43)
        assert not np.array_equal(a.points, b.points)

    def test_unit_norms(self):
        X = random_uniform(4, 200, 0)
        np.testing.assert_allclose(np.linalg.norm(X.points, axis=1), 1.0,
                                   atol=1e-12)

    def test_mean_near_zero(self):
        X = random_uniform(2, 100_000, 7)
        assert np.linalg.norm(X.points.mean(axis=0)) <= 0.02

    def test_hemisphere_fraction(self):
        n = 100_000
        X = random_uniform(2, n, 11)
        frac = np.mean(X.points[:, 2] > 0)
        assert abs(frac - 0.5) <= 3 / (2 * math.sqrt(n))

    def test_cap_frequency_chi_square(self):
        # 20 caps, each count approximately binomial(n, cap measure)
        n = 100_000
        X = random_uniform(2, n, 13)
        rng = np.random.default_rng(5)
        stat = 0.0
        for _ in range(20):
            center = rng.standard_normal(3)
            center /= np.linalg.norm(center)
            theta = rng.uniform(0.2, math.pi - 0.2)
            p = cap_measure(2, theta)
            count = int(np.sum(X.points @ center >= math.cos(theta)))
            stat += (count - n * p) ** 2 / (n * p * (1 - p))
        assert stat < chi2.ppf(0.999, df=20)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            random_uniform(1, 5, 0)
        with pytest.raises(ValueError):
            random_uniform(2, 0, 0)


class TestSpiral:
    def test_two_points(self):
        X = spiral(2)
        np.testing.assert_allclose(X.points[:, 2], [0.5, -0.5], atol=1e-15)
        assert math.acos(X.points[0, 2]) == pytest.approx(math.pi / 3,
                                                          rel=1e-15)

    def test_heights_antisymmetric(self):
        for n in (5, 16, 101):
            z = spiral(n).points[:, 2]
            np.testing.assert_allclose(z, -z[::-1], atol=1e-14)

    def test_first_point_off_pole(self):
        X = spiral(100)
        assert X.points[0, 2] == pytest.approx(1 - 1 / 100, abs=1e-15)

    def test_pairwise_distinct(self):
        X = spiral(100_000)
        uniq = np.unique(X.points, axis=0)
        assert uniq.shape[0] == 100_000

    def test_min_separation_regression(self):
        # frozen from the first build: scaled min separation stays put
        X = spiral(1024)
        z = X.points @ X.points.T
        np.fill_diagonal(z, -1.0)
        min_sep = math.sqrt(2 - 2 * z.max()) * math.sqrt(1024)
        assert min_sep == pytest.approx(3.161804990738, abs=1e-9)

    def test_rejects_single_point(self):
        with pytest.raises(ValueError):
            spiral(1)


class TestEqualAreaPartition:
    @pytest.mark.parametrize("n", [2, 3, 5, 9, 33, 100, 400])
    def test_exact_areas(self, n):
        part = equal_area_partition(n)
        np.testing.assert_allclose(part.areas, 1.0 / n, atol=1e-12)
        assert len(part.regions) == n

    def test_two_regions_are_hemispheres(self):
        part = equal_area_partition(2)
        centers = part.centers()
        np.testing.assert_allclose(np.abs(centers.points[:, 2]), 1.0,
                                   atol=1e-12)
        assert centers.points[0, 2] > 0 > centers.points[1, 2]

    @pytest.mark.parametrize("n", [10, 100, 400, 1600])
    def test_diameter_scaling(self, n):
        part = equal_area_partition(n)
        assert part.max_diameter() <= 7.0 / math.sqrt(n)
        assert part.diameter_constant() <= 7.0

    def test_locate_centers(self):
        part = equal_area_partition(77)
        for style in ("centroid", "median"):
            centers = part.centers(style)
            np.testing.assert_array_equal(part.locate(centers.points),
                                          np.arange(77))

    def test_locate_pole_boundary(self):
        part = equal_area_partition(10)
        assert part.locate(np.array([[0.0, 0.0, 1.0]]))[0] == 0
        assert part.locate(np.array([[0.0, 0.0, -1.0]]))[0] == 9

    def test_full_cover_by_random_points(self, rng):
        part = equal_area_partition(40)
        pts = rng.standard_normal((40_000, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        idx = part.locate(pts)
        assert idx.min() >= 0 and idx.max() < 40
        # occupancy roughly uniform: every region hit
        assert len(np.unique(idx)) == 40

    def test_rejects_single_region(self):
        with pytest.raises(ValueError):
            equal_area_partition(1)

    def test_region_measure_matches_locate_frequency(self, rng):
        part = equal_area_partition(12)
        pts = rng.standard_normal((60_000, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        counts = np.bincount(part.locate(pts), minlength=12)
        np.testing.assert_allclose(counts / 60_000, 1 / 12, atol=0.01)


class TestRandomizedEqualArea:
    def test_deterministic(self):
        a = randomized_equal_area(30, 5)
        b = randomized_equal_area(30, 5)
        assert np.array_equal(a.points, b.points)

    @pytest.mark.parametrize("n,seed", [(2, 0), (17, 3), (64, 9), (150, 1)])
    def test_each_sample_in_its_region(self, n, seed):
        part = equal_area_partition(n)
        X = part.sample(seed)
        np.testing.assert_array_equal(part.locate(X.points), np.arange(n))

    def test_two_regions_one_per_hemisphere(self):
        X = randomized_equal_area(2, 8)
        assert X.points[0, 2] > 0 > X.points[1, 2]

    def test_single_region_sampler_respects_bounds(self, rng):
        part = equal_area_partition(23)
        region = part.regions[7]
        for _ in range(50):
            p = region.sample(rng)
            theta = math.acos(np.clip(p[2], -1, 1))
            assert region.theta_lo - 1e-12 <= theta <= region.theta_hi + 1e-12
            rel = (math.atan2(p[1], p[0]) - region.phi_lo) % (2 * math.pi)
            assert rel <= region.phi_width + 1e-12


class TestPolytopes:
    def test_octahedron_axes(self):
        X = polytope("octahedron")
        assert X.n == 6
        np.testing.assert_allclose(np.abs(X.points).sum(axis=1), 1.0,
                                   atol=1e-15)

    def test_counts(self):
        assert polytope("tetrahedron").n == 4
        assert polytope("cube").n == 8
        assert polytope("icosahedron").n == 12

    def test_design_strengths(self):
        assert design_strength(polytope("tetrahedron"), 5, 1e-10) == 2
        assert design_strength(polytope("octahedron"), 5, 1e-10) == 3
        assert design_strength(polytope("icosahedron"), 7, 1e-10) == 5

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            polytope("dodecahedron21")


class TestRegionCenters:
    def test_centroid_default_matches_partition(self):
        part = equal_area_partition(25)
        np.testing.assert_array_equal(region_centers(part).points,
                                      part.centers("centroid").points)

    def test_median_style_unit_norm(self):
        part = equal_area_partition(64)
        X = part.centers("median")
        np.testing.assert_allclose(np.linalg.norm(X.points, axis=1), 1.0,
                                   atol=1e-12)

    def test_unknown_style_rejected(self):
        part = equal_area_partition(6)
        with pytest.raises(ValueError):
            part.centers("fancy")
