"""First-order optimization of pair energies over sphere configurations.

Objectives are double sums of a zonal pair term over all ordered pairs:
kernel energies (minimized; their minimizers are optimal-order integration
nodes), generalized distance sums (maximized; design-producing only for
s between d/2 and d/2 + 1), and the classical Coulomb and logarithmic
energies (minimized; singular on the diagonal, so coincident points are
rejected).

The method is projected gradient descent with an Armijo backtracking line
search and renormalization retraction: the Euclidean gradient is projected
onto each point's tangent space, a step is taken, and the rows are pulled
back to the sphere.  The line search guarantees a monotone objective
sequence.  Multi-start wrapping handles the many local optima; results are
near, not provably equal to, global optima, and nothing here claims
otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels as K
from .core import PointSet
from .generators import random_uniform
from .harmonics import LegendreEvaluator, harmonic_space_dims
from .quality import SobolevSpace, WceReport, worst_case_error


class CoincidentPointsError(ValueError):
    """A singular pair energy was evaluated at coincident points."""

    def __init__(self, i: int, j: int):
        self.pair = (i, j)
        super().__init__(f"points {i} and {j} coincide; the pair energy is "
                         "singular there")


@dataclass(frozen=True)
class KernelEnergy:
    """Minimize the full kernel double sum (diagonal is the constant N K(1))."""

    spec: K.KernelSpec

    @property
    def d(self) -> int:
        return self.spec.d

    direction = "min"
    singular = False

    def tag(self) -> str:
        return f"kernel-energy({self.spec.tag()})"


@dataclass(frozen=True)
class DistanceSum:
    """Maximize the sum of |x_i - x_j|^(2s - d) over ordered pairs.

    Only s strictly between d/2 and d/2 + 1 is accepted: past that range
    the unconstrained maximizers degenerate onto two antipodal clusters.
    """

    d: int
    s: float

    def __post_init__(self):
        if not self.d / 2 < self.s < self.d / 2 + 1:
            raise ValueError(
                f"distance-sum maximization needs d/2 < s < d/2 + 1, "
                f"got s = {self.s} at d = {self.d}")

    direction = "max"
    singular = False

    def tag(self) -> str:
        return f"distance-sum(s={self.s:g})"


@dataclass(frozen=True)
class Coulomb:
    """Minimize the sum of inverse distances over distinct pairs."""

    d: int = 2
    direction = "min"
    singular = True

    def tag(self) -> str:
        return "coulomb"


@dataclass(frozen=True)
class LogEnergy:
    """Minimize the sum of log(1/distance) over distinct pairs."""

    d: int = 2
    direction = "min"
    singular = True

    def tag(self) -> str:
        return "log-energy"


Objective = Union[KernelEnergy, DistanceSum, Coulomb, LogEnergy]


@dataclass(frozen=True)
class OptOptions:
    """Fixed optimizer knobs (fixed values keep runs reproducible)."""

    max_iter: int = 500
    grad_tol: float = 1e-6
    restarts: int = 8
    shrink: float = 0.5
    armijo: float = 1e-4
    seed: int = 0
    # optional design penalty: (max degree L, weight mu) adds mu times the
    # summed degree defects through L; an approximate side condition, not a
    # hard constraint.
    penalty: tuple[int, float] | None = None


@dataclass(frozen=True)
class OptResult:
    points: PointSet
    objective_value: float
    iterations: int
    grad_norm: float
    restarts_used: int


def _pair_functions(obj: Objective):
    """(h, h') for the pair term as functions of the inner product."""
    if isinstance(obj, KernelEnergy):
        return (lambda z: K.kernel_eval(obj.spec, z),
                lambda z: K.kernel_deriv(obj.spec, z))
    if isinstance(obj, DistanceSum):
        p = obj.s - obj.d / 2
        return (lambda z: K.dist_power(2.0 - 2.0 * z, p),
                lambda z: -2.0 * p * K.dist_power(2.0 - 2.0 * z, p - 1.0))
    if isinstance(obj, Coulomb):
        return (lambda z: K.dist_power(2.0 - 2.0 * z, -0.5),
                lambda z: K.dist_power(2.0 - 2.0 * z, -1.5))
    if isinstance(obj, LogEnergy):
        return (lambda z: -0.5 * np.log(2.0 - 2.0 * z),
                lambda z: 1.0 / (2.0 - 2.0 * z))
    raise TypeError(f"not an objective: {obj!r}")


def _gram(pts: np.ndarray) -> np.ndarray:
    z = np.clip(pts @ pts.T, -1.0, 1.0)
    np.fill_diagonal(z, 1.0)
    return z


def _energy_value(obj: Objective, pts: np.ndarray,
                  raise_on_coincident: bool = False) -> float:
    """Raw double-sum energy; +inf for singular objectives at coincidence."""
    n = pts.shape[0]
    z = _gram(pts)
    h, _ = _pair_functions(obj)
    if obj.singular:
        off = z[~np.eye(n, dtype=bool)]
        hit = off >= 1.0 - 1e-15
        if np.any(hit):
            if raise_on_coincident:
                zz = z.copy()
                np.fill_diagonal(zz, -2.0)
                i, j = np.unravel_index(int(np.argmax(zz)), zz.shape)
                raise CoincidentPointsError(int(i), int(j))
            return math.inf
        with np.errstate(divide="ignore"):
            return float(np.sum(h(off)))
    np.fill_diagonal(z, 1.0)
    return float(np.sum(h(z)))


def _penalty_value_grad(pts: np.ndarray, ell_max: int, mu: float):
    n, m = pts.shape
    d = m - 1
    z = _gram(pts)
    zs = harmonic_space_dims(d, ell_max)
    ev = LegendreEvaluator(d, ell_max)
    dev = LegendreEvaluator(d + 2, max(ell_max - 1, 0))
    value = 0.0
    wmat = np.zeros_like(z)
    profile = ev.profile(z)
    dprofile = dev.profile(z)
    for ell in range(1, ell_max + 1):
        value += zs[ell] * float(np.sum(profile[ell])) / (n * n)
        lam = ell * (ell + d - 1)
        wmat += zs[ell] * (lam / d) * dprofile[ell - 1] / (n * n)
    np.fill_diagonal(wmat, 0.0)
    grad = 2.0 * wmat @ pts
    return mu * value, mu * grad


def energy_and_gradient(obj: Objective, X: PointSet,
                        penalty: tuple[int, float] | None = None):
    """Objective value and the tangential gradient at each point.

    The value is the double sum of the pair term over ordered pairs, with
    the diagonal excluded for singular objectives (coincident points raise
    :class:`CoincidentPointsError` there) and included for bounded ones.
    The gradient is the Euclidean pair-term gradient projected onto each
    point's tangent space, so g_j . x_j = 0 up to round-off.
    """
    pts = X.points
    n = pts.shape[0]
    z = _gram(pts)
    h, hp = _pair_functions(obj)
    if obj.singular:
        off = z[~np.eye(n, dtype=bool)]
        if np.any(off >= 1.0 - 1e-15):
            zz = z.copy()
            np.fill_diagonal(zz, -2.0)
            i, j = np.unravel_index(int(np.argmax(zz)), zz.shape)
            raise CoincidentPointsError(int(i), int(j))
        with np.errstate(divide="ignore"):
            value = float(np.sum(h(off)))
    else:
        value = float(np.sum(h(z)))
    with np.errstate(divide="ignore"):
        w = hp(z)
    np.fill_diagonal(w, 0.0)
    grad = 2.0 * w @ pts
    if penalty is not None:
        ell_max, mu = penalty
        pval, pgrad = _penalty_value_grad(pts, ell_max, mu)
        sign = 1.0 if obj.direction == "min" else -1.0
        value = value + sign * pval
        grad = grad + sign * pgrad
    radial = np.sum(grad * pts, axis=1, keepdims=True)
    grad = grad - radial * pts
    return value, grad


def _gradient_only(obj: Objective, pts: np.ndarray,
                   penalty: tuple[int, float] | None = None) -> np.ndarray:
    """Tangential gradient without the value pass (the line search owns values)."""
    z = _gram(pts)
    _, hp = _pair_functions(obj)
    with np.errstate(divide="ignore"):
        w = hp(z)
    np.fill_diagonal(w, 0.0)
    grad = 2.0 * w @ pts
    if penalty is not None:
        _, pgrad = _penalty_value_grad(pts, *penalty)
        grad = grad + (pgrad if obj.direction == "min" else -pgrad)
    radial = np.sum(grad * pts, axis=1, keepdims=True)
    return grad - radial * pts


def _retract(pts: np.ndarray, step: float, direction: np.ndarray) -> np.ndarray:
    moved = pts + step * direction
    return moved / np.linalg.norm(moved, axis=1, keepdims=True)


def _run_single(obj: Objective, start: PointSet, opts: OptOptions):
    """One projected-gradient run; returns (points, value, iters, gnorm) or
    None if the objective went non-finite."""
    sign = 1.0 if obj.direction == "min" else -1.0
    pts = start.points.copy()
    n = pts.shape[0]

    def fval(p):
        v = _energy_value(obj, p)
        if opts.penalty is not None:
            pv, _ = _penalty_value_grad(p, *opts.penalty)
            v = v + sign * pv  # penalty always opposes the search direction
        return sign * v

    current = fval(pts)
    if math.isnan(current):
        return None
    step = 1.0 / n
    iters = 0
    gnorm = math.inf
    for iters in range(1, opts.max_iter + 1):
        grad = _gradient_only(obj, pts, penalty=opts.penalty)
        grad = sign * grad
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= opts.grad_tol:
            break
        accepted = False
        trial_step = step
        while trial_step > 1e-18:
            cand = _retract(pts, trial_step, -grad)
            cand_val = fval(cand)
            if math.isnan(cand_val):
                return None
            if cand_val <= current - opts.armijo * trial_step * gnorm ** 2:
                # probe the half step too: symmetric objectives overshoot
                # the full Armijo step near a critical point, and the half
                # step then lands far closer (still monotone either way)
                half = _retract(pts, 0.5 * trial_step, -grad)
                half_val = fval(half)
                if not math.isnan(half_val) and half_val < cand_val:
                    trial_step *= 0.5
                    cand, cand_val = half, half_val
                pts, current = cand, cand_val
                accepted = True
                break
            trial_step *= opts.shrink
        if not accepted:
            break
        step = min(2.0 * trial_step, 1.0)  # mild growth for the next sweep
    return PointSet(pts, label=start.label), sign * current, iters, gnorm


def optimize(obj: Objective, n: int, init: PointSet | int,
             opts: OptOptions = OptOptions()) -> OptResult:
    """Best-of-restarts projected gradient search.

    ``init`` is either a starting configuration (used for the first
    restart; remaining restarts draw random starts from ``opts.seed``) or
    an integer master seed from which every restart start is derived
    deterministically.  Restarts whose objective turns non-finite are
    dropped; ties in the final value resolve to the lowest restart index.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    d = obj.d
    starts: list[PointSet] = []
    if isinstance(init, PointSet):
        if init.n != n or init.dim != d:
            raise ValueError("init does not match the requested (n, d)")
        starts.append(init)
        master = np.random.default_rng(opts.seed)
    else:
        master = np.random.default_rng(init)
    while len(starts) < max(1, opts.restarts):
        sub = int(master.integers(0, 2 ** 62))
        starts.append(random_uniform(d, n, sub))

    best = None
    used = 0
    better = (lambda a, b: a < b) if obj.direction == "min" else (lambda a, b: a > b)
    for run_idx, start in enumerate(starts):
        out = _run_single(obj, start, opts)
        if out is None:
            continue
        used += 1
        pts, value, iters, gnorm = out
        if best is None or better(value, best[1]):
            best = (pts, value, iters, gnorm)
    if best is None:
        raise RuntimeError("every restart diverged to a non-finite objective")
    pts, value, iters, gnorm = best
    return OptResult(points=pts.with_label(f"opt({obj.tag()},n={n})"),
                     objective_value=value, iterations=iters,
                     grad_norm=gnorm, restarts_used=used)


def wce_objective(space: SobolevSpace, n: int, init: PointSet | int,
                  opts: OptOptions = OptOptions()) -> tuple[OptResult, WceReport]:
    """Minimize the space's kernel energy; report the resulting worst-case error.

    Minimizing the kernel double sum is the same as minimizing the
    worst-case error, since the squared error is the pair-averaged centered
    kernel.
    """
    result = optimize(KernelEnergy(space.kernel), n, init, opts)
    report = worst_case_error(space, result.points)
    return result, report
