"""Equal-weight integration quality: worst-case error and cap discrepancies.

The squared worst-case integration error of the equal-weight rule over a
point set, measured in a Sobolev space with a chosen reproducing kernel, is
the pair average of the centered kernel:

    wce^2 = (1/N^2) sum_j sum_i [K(x_j . x_i) - a_0].

Two independent routes compute it.  The closed-form route evaluates the
kernel pairwise (Cui-Freeden and generalized-distance kernels have closed
forms).  The harmonic route sums coefficient-weighted degree defects,
which involves only the addition theorem and no kernel closed form; it
provides a rigorous two-sided bracket and serves as the cross-check.

The distance kernel at s = (d+1)/2 ties the worst-case error to geometry:
sqrt(cap area constant) times that error is exactly the spherical-cap L2
discrepancy (the invariance principle), which this module also estimates
directly from its defining cap-counting integral as a brute-force oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels as K
from .core import (Cap, ConsistencyError, PointSet, cap_area_constant,
                   cap_measure, cap_measure_from_cos)
from .harmonics import harmonic_defect_profile

# Radicand round-off tolerance: energies are order 1 and pairwise summed, so
# anything below this is a logic error rather than noise.
RADICAND_CLAMP = -1e-10

# Mean of the Franke test integrand over S^2 (normalized measure).
FRANKE_MEAN = 0.5328652500843890


@dataclass(frozen=True)
class SobolevSpace:
    """A Sobolev space over S^d: dimension, smoothness, and kernel choice.

    The kernel fixes the norm (all choices with the right coefficient decay
    are equivalent, but numeric error values differ by constants), so every
    report carries the kernel tag.
    """

    dim: int
    s: float
    kernel: K.KernelSpec

    def __post_init__(self):
        if self.s <= self.dim / 2:
            raise ValueError(
                f"s must exceed d/2 = {self.dim / 2}, got {self.s}")
        kd = getattr(self.kernel, "d", None)
        ks = getattr(self.kernel, "s", None)
        if kd != self.dim or abs(ks - self.s) > 1e-12:
            raise ValueError(
                f"kernel implies (d, s) = ({kd}, {ks}), space says "
                f"({self.dim}, {self.s})")

    @classmethod
    def cui_freeden(cls) -> "SobolevSpace":
        return cls(2, 1.5, K.CuiFreeden())

    @classmethod
    def gen_distance(cls, d: int, s: float) -> "SobolevSpace":
        return cls(d, s, K.GeneralizedDistance(d, s))

    @classmethod
    def canonical(cls, d: int, s: float) -> "SobolevSpace":
        return cls(d, s, K.Canonical(d, s))


@dataclass(frozen=True)
class WceReport:
    """Worst-case error of one rule: value, energy, and provenance."""

    n: int
    d: int
    s: float
    kernel: str
    wce: float
    energy: float
    a0: float
    method: str

    def to_dict(self) -> dict:
        return {"n": self.n, "d": self.d, "s": self.s, "kernel": self.kernel,
                "wce": self.wce, "energy": self.energy, "a0": self.a0,
                "method": self.method}


@dataclass(frozen=True)
class HarmonicWceReport:
    """Defect-sum route: partial sum, rigorous tail bound, diagonal fix.

    ``partial_sum <= wce^2 <= partial_sum + tail_bound`` always holds (each
    defect is nonnegative and at most the harmonic count).  ``diag_tail``
    is the share of the tail contributed by the pair diagonal, known
    exactly because P_l(1) = 1; for well-spread sets it is nearly the
    entire tail.
    """

    partial_sum: float
    tail_bound: float
    diag_tail: float
    ell_max: int

    @property
    def corrected(self) -> float:
        """Partial sum plus the exact diagonal share of the tail."""
        return self.partial_sum + self.diag_tail


def _pair_mean(points: np.ndarray, fn: Callable[[np.ndarray], np.ndarray],
               block_budget: int = 4_000_000) -> float:
    """Mean of fn(x_j . x_i) over all ordered pairs, diagonal included.

    Inner products are clipped to [-1, 1], and values within 4e-12 of 1 are
    snapped to exactly 1.  Point rows may legally carry norms off by 1e-12,
    so diagonal and duplicated-point products can sit that far below 1, and
    kernels with a square-root kink at coincidence would amplify the drift
    into ~1e-6 of kernel value; the snap treats everything closer than a
    ~3e-6 angle as coincident instead.  Blocked row sweep, deterministic
    order.
    """
    n = points.shape[0]
    step = max(1, min(n, block_budget // n))
    total = 0.0
    for lo in range(0, n, step):
        hi = min(lo + step, n)
        z = np.clip(points[lo:hi] @ points.T, -1.0, 1.0)
        z[z >= 1.0 - 4e-12] = 1.0
        total += float(np.sum(fn(z)))
    return total / (n * n)


def worst_case_error(space: SobolevSpace, X: PointSet,
                     ell_max: int | None = None) -> WceReport:
    """Worst-case error of the equal-weight rule over X in the given space.

    Closed-form kernels (Cui-Freeden, generalized distance) go through the
    pairwise route; series kernels (canonical, truncated) go through the
    defect sum, whose tail diagonal is corrected exactly.  ``ell_max``
    overrides the series route's degree cap.

    The squared error is clamped at zero if round-off leaves it within
    ``RADICAND_CLAMP`` of zero and raises :class:`ConsistencyError` below
    that.
    """
    if X.dim != space.dim:
        raise ValueError(f"point set lives on S^{X.dim}, space on S^{space.dim}")
    spec = space.kernel
    a0 = K.kernel_coeffs(spec).a0
    if isinstance(spec, (K.CuiFreeden, K.GeneralizedDistance)):
        sq = _pair_mean(X.points, lambda z: K.kernel_eval(spec, z) - a0)
        method = "closed-form"
    else:
        if ell_max is None:
            ell_max = spec.t if isinstance(spec, K.Truncated) else 2000
        rep = wce_harmonic(space, X, ell_max)
        sq = rep.corrected
        method = "harmonic-sum"
    if sq < 0.0:
        if sq < RADICAND_CLAMP:
            raise ConsistencyError(
                f"squared worst-case error {sq:.3e} is below the round-off "
                f"clamp {RADICAND_CLAMP:.0e}")
        sq = 0.0
    return WceReport(n=X.n, d=space.dim, s=space.s, kernel=spec.tag(),
                     wce=math.sqrt(sq), energy=sq + a0, a0=a0, method=method)


def wce_harmonic(space: SobolevSpace, X: PointSet,
                 ell_max: int) -> HarmonicWceReport:
    """Defect-sum route for the squared worst-case error.

    Returns the partial sum over degrees up to ``ell_max``, the rigorous
    remainder bound sum_(l>ell_max) a_l Z(d, l) (each defect is at most the
    harmonic count), and the exact diagonal share of that remainder, which
    is the bound divided by N.
    """
    if ell_max < 1:
        raise ValueError("ell_max must be >= 1")
    spec = space.kernel
    coeffs = K.kernel_coeffs(spec)
    defects = harmonic_defect_profile(X, ell_max)
    a = coeffs.a_array(ell_max)
    partial = float(np.dot(a, defects))
    tail = max(0.0, K.centered_at_one(spec) - float(np.sum(coeffs.az_array(ell_max))))
    return HarmonicWceReport(partial_sum=partial, tail_bound=tail,
                             diag_tail=tail / X.n, ell_max=ell_max)


# ---------------------------------------------------------------------------
# Cap discrepancies
# ---------------------------------------------------------------------------

def cap_l2_discrepancy(X: PointSet) -> float:
    """Spherical-cap L2 discrepancy via the invariance principle.

    Equals sqrt(cap area constant) times the worst-case error of the
    distance kernel at s = (d + 1)/2; no cap counting is performed.
    """
    d = X.dim
    space = SobolevSpace.gen_distance(d, (d + 1) / 2)
    report = worst_case_error(space, X)
    return math.sqrt(cap_area_constant(d)) * report.wce


@dataclass(frozen=True)
class CapL2Direct:
    """Monte Carlo / quadrature estimate of the squared cap L2 discrepancy."""

    sq_estimate: float
    sq_stderr: float
    n_centers: int
    n_theta: int
    seed: int

    @property
    def discrepancy(self) -> float:
        return math.sqrt(max(self.sq_estimate, 0.0))


def cap_l2_discrepancy_direct(X: PointSet, n_centers: int = 100_000,
                              n_theta: int = 64, seed: int = 0,
                              block_budget: int = 8_000_000) -> CapL2Direct:
    """Brute-force cap L2 discrepancy from its defining integral.

    Monte Carlo over cap centers (uniform on the sphere) crossed with
    Gauss-Legendre quadrature in the cap radius of the squared deviation
    between the empirical cap count and the cap measure, weighted by
    sin(theta).  The standard error comes from the center-sample variance,
    so the estimate validates the invariance-principle value to within
    Monte Carlo resolution.
    """
    if n_centers < 1 or n_theta < 1:
        raise ValueError("n_centers and n_theta must be >= 1")
    d = X.dim
    n = X.n
    rng = np.random.default_rng(seed)
    nodes, weights = np.polynomial.legendre.leggauss(n_theta)
    theta = 0.5 * math.pi * (nodes + 1.0)
    w = 0.5 * math.pi * weights * np.sin(theta)
    cos_theta = np.cos(theta)
    sigma = np.array([cap_measure(d, t) for t in theta])

    per_center = np.empty(n_centers)
    step = max(1, block_budget // (n * n_theta))
    done = 0
    while done < n_centers:
        b = min(step, n_centers - done)
        centers = rng.normal(size=(b, d + 1))
        centers /= np.linalg.norm(centers, axis=1, keepdims=True)
        dots = centers @ X.points.T                    # (b, n)
        counts = np.sum(dots[:, :, None] >= cos_theta[None, None, :], axis=1)
        dev = counts / n - sigma[None, :]
        per_center[done:done + b] = (dev * dev) @ w
        done += b
    est = float(np.mean(per_center))
    se = float(np.std(per_center, ddof=1) / math.sqrt(n_centers)) \
        if n_centers > 1 else float("inf")
    return CapL2Direct(sq_estimate=est, sq_stderr=se, n_centers=n_centers,
                       n_theta=n_theta, seed=seed)


def cap_linf_discrepancy_estimate(X: PointSet, n_extra_centers: int = 0,
                                  seed: int = 0) -> float:
    """Certified lower bound on the spherical-cap sup discrepancy.

    Candidate caps are centered at the points themselves plus optional
    random centers; at each center the count-versus-measure deviation is
    evaluated at every point height, approached from the closed and the
    open side.  The true supremum is at least the returned value; exact
    computation would be an arrangement enumeration and is out of scope.
    """
    d = X.dim
    n = X.n
    centers = [X.points]
    if n_extra_centers > 0:
        rng = np.random.default_rng(seed)
        extra = rng.normal(size=(n_extra_centers, d + 1))
        extra /= np.linalg.norm(extra, axis=1, keepdims=True)
        centers.append(extra)
    best = 0.0
    counts_closed = np.arange(1, n + 1)
    for cset in centers:
        step = max(1, 4_000_000 // n)
        for lo in range(0, cset.shape[0], step):
            dots = np.clip(cset[lo:lo + step] @ X.points.T, -1.0, 1.0)
            dots.sort(axis=1)
            dots = dots[:, ::-1]                       # descending heights
            sig = cap_measure_from_cos(d, dots)
            closed = np.abs(counts_closed[None, :] / n - sig)
            open_side = np.abs((counts_closed[None, :] - 1) / n - sig)
            best = max(best, float(closed.max()), float(open_side.max()))
    return best


@dataclass(frozen=True)
class PropertyRReport:
    """Point-centered cap occupancy and separation, scaled to the N^(1/d) law.

    ``max_cap_count`` is the largest number of points inside a cap of
    geodesic radius c1 N^(-1/d) centered *at a point of the set*; the true
    supremum over arbitrary centers is reached by at most doubling the
    radius, so this is a surrogate, not the exact sup.
    """

    max_cap_count: int
    min_separation: float
    cap_radius: float
    c1: float


def property_r_check(X: PointSet, c1: float) -> PropertyRReport:
    """Occupancy of point-centered caps of radius c1 N^(-1/d), plus separation.

    ``min_separation`` is the minimal pairwise Euclidean distance scaled by
    N^(1/d) (bounded below along a sequence iff it is well separated).
    """
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    d = X.dim
    n = X.n
    radius = min(c1 * n ** (-1.0 / d), math.pi)
    cos_r = math.cos(radius)
    max_count = 0
    max_off = -1.0
    step = max(1, 4_000_000 // n)
    for lo in range(0, n, step):
        hi = min(lo + step, n)
        z = np.clip(X.points[lo:hi] @ X.points.T, -1.0, 1.0)
        counts = np.sum(z >= cos_r - 1e-15, axis=1)
        max_count = max(max_count, int(counts.max()))
        z[np.arange(hi - lo), np.arange(lo, hi)] = -1.0
        if n > 1:
            max_off = max(max_off, float(z.max()))
    min_sep = math.sqrt(max(0.0, 2.0 - 2.0 * max_off)) if n > 1 else math.inf
    return PropertyRReport(max_cap_count=max_count,
                           min_separation=min_sep * n ** (1.0 / d),
                           cap_radius=radius, c1=c1)


# ---------------------------------------------------------------------------
# Integration of arbitrary functions
# ---------------------------------------------------------------------------

def qmc_integrate(f: Callable, X: PointSet) -> float:
    """Equal-weight rule: the plain average of f over the points.

    ``f`` may be vectorized over an (n, d+1) array or accept single points.
    """
    try:
        vals = np.asarray(f(X.points), dtype=float)
        if vals.shape != (X.n,):
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([float(f(p)) for p in X.points])
    return float(np.mean(vals))


def franke(p) -> np.ndarray | float:
    """The standard four-bump smooth test integrand on S^2.

    Three Gaussian bumps plus one dip in the Cartesian coordinates; note
    the second term is linear (not squared) in its y and z arguments.  Its
    mean over the sphere is :data:`FRANKE_MEAN`.
    """
    pts = np.asarray(p, dtype=float)
    scalar = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != 3:
        raise ValueError("the Franke integrand is defined on S^2 in R^3")
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    out = (0.75 * np.exp(-(9 * x - 2) ** 2 / 4 - (9 * y - 2) ** 2 / 4
                         - (9 * z - 2) ** 2 / 4)
           + 0.75 * np.exp(-(9 * x + 1) ** 2 / 49 - (9 * y + 1) / 10
                           - (9 * z + 1) / 10)
           + 0.5 * np.exp(-(9 * x - 7) ** 2 / 4 - (9 * y - 3) ** 2 / 4
                          - (9 * z - 5) ** 2 / 4)
           - 0.2 * np.exp(-(9 * x - 4) ** 2 - (9 * y - 7) ** 2
                          - (9 * z - 5) ** 2))
    return float(out[0]) if scalar else out
