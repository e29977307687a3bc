"""Experiment pipelines: decay fits, expectation baselines, saturation tables.

Everything here reduces to one template: build point sets over a grid of
sizes, score them with a worst-case-error kernel (or a test integrand),
and fit the power law value ~ alpha * N^(-beta) in log-log space.  The
pipelines exist to make three comparisons reproducible with one call each:

* i.i.d. random points: the expected squared error is exactly the centered
  kernel at 1 divided by N, so the root error decays like N^(-1/2) at every
  smoothness; random points saturate immediately.
* stratified (one sample per equal-area region): the expected squared error
  obeys two-sided N^(-2s/d) bounds for s below d/2 + 1 and provably flattens
  at exponent (d/2 + 1)/d above.
* structured families (spiral, equal-area centers, distance-optimized):
  fitted exponents track s/d until each family's own saturation smoothness,
  which the saturation table estimates from where beta(s) stops growing.

Every stochastic pipeline takes one master seed; per-trial seeds derive
deterministically from it, and reports embed the seed for exact replay.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import kernels as K
from .core import PointSet
from .generators import (equal_area_partition, randomized_equal_area,
                         random_uniform, spiral)
from .optimize import DistanceSum, OptOptions, optimize
from .quality import (FRANKE_MEAN, SobolevSpace, franke, qmc_integrate,
                      worst_case_error)

# Fitted-exponent grid used for saturation estimates.
DEFAULT_S_GRID = (1.25, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5)

# Conjectured saturation smoothness for the classical S^2 families, for the
# comparison column of the saturation table.
CONJECTURED_S_STAR = {
    "fekete": 1.5,
    "equal-area": 2.0,
    "coulomb": 2.0,
    "log-energy": 3.0,
    "spiral": 3.0,
    "distance": 4.0,
    "spherical-design": math.inf,
}


def perfect_squares(k_min: int = 4, k_max: int = 64,
                    factor: float = 1.5) -> tuple[int, ...]:
    """Geometric-ish ladder of perfect squares k^2, k from k_min to k_max."""
    ks = [k_min]
    while ks[-1] < k_max:
        ks.append(min(k_max, max(ks[-1] + 1, round(ks[-1] * factor))))
    return tuple(k * k for k in ks)


@dataclass(frozen=True)
class FitReport:
    """Least-squares power law value ~ alpha * N^(-beta) on log-log axes."""

    alpha: float
    beta: float
    n_min: int
    n_max: int
    residual: float
    series: str = ""

    def predict(self, n) -> np.ndarray:
        return self.alpha * np.asarray(n, dtype=float) ** (-self.beta)


def decay_fit(points: Sequence[tuple[float, float]], series: str = "") -> FitReport:
    """Ordinary least squares on (log N, log value); beta is minus the slope.

    Needs at least three pairs with strictly positive values.
    """
    pts = [(float(n), float(v)) for n, v in points]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points for a decay fit, got {len(pts)}")
    ns = np.array([p[0] for p in pts])
    vals = np.array([p[1] for p in pts])
    if np.any(vals <= 0):
        raise ValueError("decay fit needs strictly positive values")
    if np.any(ns <= 0):
        raise ValueError("decay fit needs strictly positive sizes")
    x = np.log(ns)
    y = np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return FitReport(alpha=float(np.exp(intercept)), beta=float(-slope),
                     n_min=int(ns.min()), n_max=int(ns.max()),
                     residual=float(np.sqrt(np.mean(resid ** 2))),
                     series=series)


# ---------------------------------------------------------------------------
# Expectation baselines
# ---------------------------------------------------------------------------

def _trial_seeds(seed: int, trials: int) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 2 ** 62, size=trials)


@dataclass(frozen=True)
class ExpectationReport:
    """Monte Carlo mean of the squared error against its exact expectation."""

    kernel: str
    s: float
    n: int
    predicted: float
    estimated: float
    std_error: float
    trials: int
    seed: int

    @property
    def z_score(self) -> float:
        return (self.estimated - self.predicted) / self.std_error


def random_baseline(space: SobolevSpace, n: int, trials: int,
                    seed: int) -> ExpectationReport:
    """Squared worst-case error of i.i.d. uniform points versus its mean.

    The exact expectation is the centered kernel at 1 divided by N; the
    report carries the Monte Carlo z-score against it.
    """
    if trials < 2:
        raise ValueError("trials must be >= 2")
    predicted = K.centered_at_one(space.kernel) / n
    sq = np.empty(trials)
    for i, sub in enumerate(_trial_seeds(seed, trials)):
        X = random_uniform(space.dim, n, int(sub))
        sq[i] = worst_case_error(space, X).wce ** 2
    est = float(np.mean(sq))
    se = float(np.std(sq, ddof=1) / math.sqrt(trials))
    return ExpectationReport(kernel=space.kernel.tag(), s=space.s, n=n,
                             predicted=predicted, estimated=est, std_error=se,
                             trials=trials, seed=seed)


@dataclass(frozen=True)
class StratifiedReport:
    """Squared error of one-sample-per-region configurations, with the
    computable diameter-based upper bound on the expectation (s < d/2 + 1)."""

    s: float
    n: int
    estimated: float
    std_error: float
    trials: int
    seed: int
    diam_bound: float | None

    @property
    def rms(self) -> float:
        return math.sqrt(max(self.estimated, 0.0))


def stratified_baseline(s: float, n: int, trials: int, seed: int) -> StratifiedReport:
    """Monte Carlo E[squared wce] for randomized equal-area points on S^2.

    Uses the generalized distance kernel at smoothness s.  For s below 2
    the exact expectation is the same-region mean distance power, which is
    bounded by the summed region diameters to the 2s - 2; that bound is
    reported alongside.
    """
    if trials < 2:
        raise ValueError("trials must be >= 2")
    part = equal_area_partition(n)
    space = SobolevSpace.gen_distance(2, s)
    sq = np.empty(trials)
    for i, sub in enumerate(_trial_seeds(seed, trials)):
        X = part.sample(int(sub))
        sq[i] = worst_case_error(space, X).wce ** 2
    est = float(np.mean(sq))
    se = float(np.std(sq, ddof=1) / math.sqrt(trials))
    bound = None
    if s < 2.0:
        diams = part.diameters
        bound = float(np.sum(diams ** (2.0 * s - 2.0)) / n ** 2)
    return StratifiedReport(s=s, n=n, estimated=est, std_error=se,
                            trials=trials, seed=seed, diam_bound=bound)


def stratified_decay(s: float, n_grid: Sequence[int], trials: int,
                     seed: int) -> tuple[FitReport, list[StratifiedReport]]:
    """Fit the decay of root mean squared error over an N grid."""
    reports = [stratified_baseline(s, n, trials, seed + 17 * i)
               for i, n in enumerate(n_grid)]
    fit = decay_fit([(r.n, r.rms) for r in reports],
                    series=f"randomized-equal-area(s={s:g})")
    return fit, reports


def random_decay(space_of_n: Callable[[int], SobolevSpace] | SobolevSpace,
                 n_grid: Sequence[int], trials: int,
                 seed: int) -> tuple[FitReport, list[ExpectationReport]]:
    """Fit the decay of the random-point root mean squared error."""
    reports = []
    for i, n in enumerate(n_grid):
        space = space_of_n(n) if callable(space_of_n) else space_of_n
        reports.append(random_baseline(space, n, trials, seed + 17 * i))
    fit = decay_fit([(r.n, math.sqrt(r.estimated)) for r in reports],
                    series="random")
    return fit, reports


# ---------------------------------------------------------------------------
# Family pipelines
# ---------------------------------------------------------------------------

FamilyMap = Mapping[str, Callable[[int], PointSet]]


def standard_families(seed: int = 0, opt_max_iter: int = 40) -> dict:
    """The built-in S^2 families keyed by name.

    ``distance`` warm-starts from the spiral configuration and improves it
    by maximizing the plain distance sum (one restart; good enough for the
    decay studies, no global-optimality claim).
    """
    def distance_family(n: int) -> PointSet:
        opts = OptOptions(max_iter=opt_max_iter, restarts=1, grad_tol=1e-8)
        return optimize(DistanceSum(2, 1.5), n, spiral(n), opts).points

    return {
        "random": lambda n: random_uniform(2, n, seed + 7 * n),
        "spiral": spiral,
        "equal-area": lambda n: equal_area_partition(n).centers("median"),
        "randomized-equal-area": lambda n: randomized_equal_area(n, seed + 11 * n),
        "distance": distance_family,
    }


def wce_table(families: FamilyMap, s_values: Sequence[float],
              n_grid: Sequence[int], d: int = 2) -> list[dict]:
    """Worst-case errors for every family, smoothness, and size.

    Rows follow the wce schema (family, kernel, s, n, wce).  The kernel is
    the generalized distance kernel at each smoothness, whose closed form
    keeps the N^2 pair sums cheap.
    """
    rows = []
    for family, build in families.items():
        sets = {n: build(n) for n in n_grid}
        for s in s_values:
            space = SobolevSpace.gen_distance(d, s)
            for n in n_grid:
                rep = worst_case_error(space, sets[n])
                rows.append({"family": family, "kernel": rep.kernel,
                             "s": s, "n": n, "wce": rep.wce})
    return rows


def fit_table(wce_rows: Iterable[dict]) -> list[dict]:
    """Per-(family, s) power-law fits of the wce rows."""
    grouped: dict[tuple, list] = {}
    for row in wce_rows:
        grouped.setdefault((row["family"], row["s"]), []).append(
            (row["n"], row["wce"]))
    out = []
    for (family, s), pairs in grouped.items():
        fit = decay_fit(pairs, series=f"{family}(s={s:g})")
        out.append({"family": family, "s": s, "alpha": fit.alpha,
                    "beta": fit.beta, "residual": fit.residual})
    return out


def estimate_saturation(s_values: Sequence[float], betas: Sequence[float],
                        tol: float = 0.05) -> float:
    """Saturation smoothness from where the fitted exponent stops growing.

    Exponents cap at s/d once s passes a family's saturation point, so the
    estimate is twice the final exponent when the top of the grid has
    plateaued (growth below ``tol`` per grid step) and infinity when the
    exponent is still climbing at the end of the grid.
    """
    if len(s_values) != len(betas) or len(s_values) < 2:
        raise ValueError("need matching s and beta sequences, length >= 2")
    order = np.argsort(np.asarray(s_values, dtype=float))
    b = np.asarray(betas, dtype=float)[order]
    if b[-1] - b[-2] < tol:
        return float(2.0 * b[-1])
    return math.inf


@dataclass(frozen=True)
class SaturationTable:
    wce_rows: list
    fit_rows: list
    star_rows: list


def saturation_table(families: FamilyMap, s_grid: Sequence[float] = DEFAULT_S_GRID,
                     n_grid: Sequence[int] | None = None, d: int = 2) -> SaturationTable:
    """Full pipeline: wce table, per-smoothness fits, saturation estimates.

    The star rows carry the conjectured value for families whose name is in
    :data:`CONJECTURED_S_STAR` (conjectures, compared qualitatively only).
    """
    if n_grid is None:
        n_grid = perfect_squares()
    rows = wce_table(families, s_grid, n_grid, d=d)
    fits = fit_table(rows)
    star_rows = []
    for family in families:
        pairs = sorted((r["s"], r["beta"]) for r in fits if r["family"] == family)
        # a single smoothness gives a decay study but no saturation estimate
        star = (estimate_saturation([p[0] for p in pairs],
                                    [p[1] for p in pairs])
                if len(pairs) >= 2 else None)
        star_rows.append({"family": family, "s_star": star,
                          "conjectured": CONJECTURED_S_STAR.get(family)})
    return SaturationTable(wce_rows=rows, fit_rows=fits, star_rows=star_rows)


def franke_study(families: FamilyMap, n_grid: Sequence[int]) -> list[dict]:
    """Equal-weight integration error of the Franke integrand per family."""
    rows = []
    for family, build in families.items():
        for n in n_grid:
            err = abs(qmc_integrate(franke, build(n)) - FRANKE_MEAN)
            rows.append({"family": family, "n": n, "error": err})
    return rows
