import math

import numpy as np
import pytest

from sphqmc.core import PointSet, avg_distance_power
from sphqmc.generators import polytope, random_uniform, spiral
from sphqmc.harmonics import harmonic_defect_profile
from sphqmc.kernels import CuiFreeden, GeneralizedDistance, Truncated
from sphqmc.optimize import (CoincidentPointsError, Coulomb, DistanceSum,
                             KernelEnergy, LogEnergy, OptOptions, OptResult,
                             energy_and_gradient, optimize, wce_objective)
from sphqmc.quality import SobolevSpace, worst_case_error

from oracles import random_rotation

ALL_OBJECTIVES = [
    KernelEnergy(CuiFreeden()),
    KernelEnergy(GeneralizedDistance(2, 2.5)),
    KernelEnergy(Truncated(CuiFreeden(), 8)),
    DistanceSum(2, 1.5),
    Coulomb(2),
    LogEnergy(2),
]


def numeric_gradient(obj, X, h=1e-6):
    pts = X.points
    out = np.zeros_like(pts)
    for j in range(pts.shape[0]):
        for k in range(pts.shape[1]):
            plus = pts.copy()
            plus[j, k] += h
            plus[j] /= np.linalg.norm(plus[j])
            minus = pts.copy()
            minus[j, k] -= h
            minus[j] /= np.linalg.norm(minus[j])
            vp, _ = energy_and_gradient(obj, PointSet(plus))
            vm, _ = energy_and_gradient(obj, PointSet(minus))
            out[j, k] = (vp - vm) / (2 * h)
    return out


class TestEnergyAndGradient:
    @pytest.mark.parametrize("obj", ALL_OBJECTIVES, ids=lambda o: o.tag())
    def test_gradient_matches_finite_differences(self, obj):
        for seed in (3, 4):
            X = random_uniform(2, 8, seed)
            _, grad = energy_and_gradient(obj, X)
            fd = numeric_gradient(obj, X)
            rel = np.linalg.norm(fd - grad) / np.linalg.norm(grad)
            assert rel <= 1e-5

    @pytest.mark.parametrize("obj", ALL_OBJECTIVES, ids=lambda o: o.tag())
    def test_gradient_is_tangential(self, obj):
        X = random_uniform(2, 12, 7)
        _, grad = energy_and_gradient(obj, X)
        assert np.abs(np.sum(grad * X.points, axis=1)).max() <= 1e-12

    def test_antipodal_distance_gradient_vanishes(self):
        pair = PointSet(np.array([[0, 0, 1.0], [0, 0, -1.0]]))
        _, grad = energy_and_gradient(DistanceSum(2, 1.5), pair)
        assert np.abs(grad).max() <= 1e-12

    def test_singular_objective_rejects_coincident(self):
        X = PointSet(np.array([[0, 0, 1.0], [0, 0, 1.0], [1.0, 0, 0]]))
        with pytest.raises(CoincidentPointsError) as err:
            energy_and_gradient(Coulomb(2), X)
        assert set(err.value.pair) == {0, 1}

    def test_distance_sum_matches_distance_wce(self):
        # energy and the closed-form squared error describe the same number
        X = random_uniform(2, 30, 5)
        s = 1.5
        value, _ = energy_and_gradient(DistanceSum(2, s), X)
        v = avg_distance_power(2, s)
        rep = worst_case_error(SobolevSpace.gen_distance(2, s), X)
        assert v - value / X.n ** 2 == pytest.approx(rep.wce ** 2, abs=1e-12)

    def test_distance_sum_smoothness_window(self):
        with pytest.raises(ValueError):
            DistanceSum(2, 2.3)
        with pytest.raises(ValueError):
            DistanceSum(2, 1.0)


class TestOptimize:
    def test_two_points_maximize_distance(self):
        res = optimize(DistanceSum(2, 1.5), 2, 7,
                       OptOptions(restarts=2, max_iter=200, grad_tol=1e-12))
        assert res.objective_value == pytest.approx(4.0, abs=1e-10)
        inner = float(res.points.points[0] @ res.points.points[1])
        assert inner == pytest.approx(-1.0, abs=1e-9)

    def test_four_point_coulomb_is_tetrahedron(self):
        res = optimize(Coulomb(2), 4, 3,
                       OptOptions(restarts=3, max_iter=800, grad_tol=1e-10))
        # ordered pairs double the over-pairs sum
        assert res.objective_value / 2 == pytest.approx(6 * math.sqrt(3 / 8),
                                                        rel=1e-9)

    def test_twelve_point_log_energy_is_icosahedron(self):
        res = optimize(LogEnergy(2), 12, 1,
                       OptOptions(restarts=4, max_iter=800, grad_tol=1e-9))
        want, _ = energy_and_gradient(LogEnergy(2), polytope("icosahedron"))
        assert res.objective_value == pytest.approx(want, rel=1e-10)

    def test_result_value_matches_reevaluation(self):
        res = optimize(DistanceSum(2, 1.5), 10, 2,
                       OptOptions(restarts=2, max_iter=150))
        value, _ = energy_and_gradient(DistanceSum(2, 1.5), res.points)
        assert res.objective_value == pytest.approx(value, rel=1e-12)

    def test_deterministic(self):
        opts = OptOptions(restarts=2, max_iter=60)
        a = optimize(Coulomb(2), 7, 11, opts)
        b = optimize(Coulomb(2), 7, 11, opts)
        assert np.array_equal(a.points.points, b.points.points)
        assert a.objective_value == b.objective_value

    def test_six_point_distance_beats_spiral(self):
        res = optimize(DistanceSum(2, 1.5), 6, spiral(6),
                       OptOptions(restarts=4, max_iter=500, grad_tol=1e-9))
        space = SobolevSpace.gen_distance(2, 1.5)
        assert worst_case_error(space, res.points).wce < \
            worst_case_error(space, spiral(6)).wce

    def test_rotation_equivariance(self, rng):
        opts = OptOptions(restarts=1, max_iter=300, grad_tol=1e-9)
        start = random_uniform(2, 8, 4)
        plain = optimize(Coulomb(2), 8, start, opts)
        Q = random_rotation(rng, 3)
        rotated = optimize(Coulomb(2), 8, PointSet(start.points @ Q.T), opts)
        assert plain.objective_value == pytest.approx(
            rotated.objective_value, abs=1e-8)

    def test_monotone_improvement_from_start(self):
        start = random_uniform(2, 15, 6)
        v0, _ = energy_and_gradient(Coulomb(2), start)
        res = optimize(Coulomb(2), 15, start,
                       OptOptions(restarts=1, max_iter=40))
        assert res.objective_value <= v0

    def test_penalty_reduces_low_degree_defects(self):
        opts_plain = OptOptions(restarts=1, max_iter=250, grad_tol=1e-10)
        opts_pen = OptOptions(restarts=1, max_iter=250, grad_tol=1e-10,
                              penalty=(2, 50.0))
        plain = optimize(DistanceSum(2, 1.5), 9, 3, opts_plain)
        pen = optimize(DistanceSum(2, 1.5), 9, 3, opts_pen)
        d_plain = harmonic_defect_profile(plain.points, 2).sum()
        d_pen = harmonic_defect_profile(pen.points, 2).sum()
        assert d_pen < d_plain

    def test_rejects_tiny_n(self):
        with pytest.raises(ValueError):
            optimize(Coulomb(2), 1, 0)

    def test_init_shape_checked(self):
        with pytest.raises(ValueError):
            optimize(Coulomb(2), 5, spiral(6))


class TestWceObjective:
    def test_two_points_cui_freeden(self):
        result, report = wce_objective(SobolevSpace.cui_freeden(), 2, 5,
                                       OptOptions(restarts=2, max_iter=300,
                                                  grad_tol=1e-11))
        assert report.wce ** 2 == pytest.approx(1 - math.log(2), abs=1e-10)

    def test_improves_on_random_start(self):
        space = SobolevSpace.gen_distance(2, 1.5)
        start = random_uniform(2, 12, 8)
        before = worst_case_error(space, start).wce
        result, report = wce_objective(space, 12, start,
                                       OptOptions(restarts=1, max_iter=200))
        assert report.wce <= before
        assert isinstance(result, OptResult)
