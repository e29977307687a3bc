"""Normalized Gegenbauer polynomials, harmonic counts, and design checks.

The polynomial family P_l here is the Gegenbauer family with parameter
(d-1)/2, orthogonal on [-1, 1] against the weight (1 - t^2)^(d/2 - 1) and
normalized so that P_l(1) = 1.  For d = 2 it reduces to the classical
Legendre polynomials.  Degree-l spherical harmonics on S^d are tied to it
by the addition theorem: summing products of an orthonormal harmonic basis
over the degree collapses to Z(d, l) * P_l(x . y).

The central diagnostic is the degree-l defect of a point set: the mean of
Z(d, l) * P_l over all ordered pairs.  By the addition theorem it equals a
sum of squared harmonic averages, so it is nonnegative, and it vanishes
exactly when the set integrates every degree-l harmonic exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln as _gammaln

from .core import ConsistencyError, PointSet

# Tiny negative defect values (round-off) are clamped to zero; anything
# below this is a logic error, not noise.
DEFECT_CLAMP = -1e-10

_clamp_count = 0


def negative_clamp_count() -> int:
    """How many defect evaluations were clamped from tiny negative round-off."""
    return _clamp_count


def eigenvalue(d: int, ell: int) -> int:
    """Laplace-Beltrami eigenvalue l (l + d - 1) of degree-l harmonics on S^d."""
    return ell * (ell + d - 1)


def harmonic_space_dim(d: int, n: int) -> int:
    """Number of linearly independent degree-n spherical harmonics on S^d.

    Exact integer evaluation of (2n + d - 1) (n + d - 2)! / ((d - 1)! n!).
    Python integers do not overflow, so arbitrarily large degrees are fine.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return 1
    return (2 * n + d - 1) * math.factorial(n + d - 2) \
        // (math.factorial(d - 1) * math.factorial(n))


def harmonic_space_dims(d: int, ell_max: int) -> np.ndarray:
    """Float array of harmonic counts for degrees 0..ell_max.

    Log-gamma evaluation (exact for d = 2, ~1e-15 relative otherwise);
    avoids the huge exact integers of :func:`harmonic_space_dim` inside
    degree sweeps.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    ls = np.arange(ell_max + 1, dtype=float)
    if d == 2:
        return 2.0 * ls + 1.0
    out = (2 * ls + d - 1) * np.exp(_gammaln(ls + d - 1) - _gammaln(d)
                                    - _gammaln(ls + 1))
    out[0] = 1.0
    return np.round(out)


def _recurrence_coeffs(d: int, ell_max: int):
    """Coefficients (A_l, B_l) with P_l = A_l x P_(l-1) - B_l P_(l-2)."""
    ls = np.arange(2, ell_max + 1, dtype=float)
    a = (2 * ls + d - 3) / (ls + d - 2)
    b = (ls - 1) / (ls + d - 2)
    return a, b


def legendre(d: int, ell: int, x):
    """Value of the degree-l normalized Gegenbauer polynomial on [-1, 1].

    Vectorized over ``x``.  Inputs within 1e-12 outside [-1, 1] are clamped;
    anything farther out is rejected.  Computed by the forward three-term
    recurrence, which is stable on [-1, 1] for this family.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if ell < 0:
        raise ValueError(f"ell must be >= 0, got {ell}")
    scalar = np.isscalar(x)
    xv = np.asarray(x, dtype=float)
    if np.any(np.abs(xv) > 1.0 + 1e-12):
        raise ValueError("argument lies outside [-1 - 1e-12, 1 + 1e-12]")
    xv = np.clip(xv, -1.0, 1.0)
    if ell == 0:
        out = np.ones_like(xv)
    elif ell == 1:
        out = xv.copy()
    else:
        a, b = _recurrence_coeffs(d, ell)
        p_prev = np.ones_like(xv)
        p_cur = xv.copy()
        for k in range(ell - 1):
            p_prev, p_cur = p_cur, a[k] * xv * p_cur - b[k] * p_prev
        out = p_cur
    return float(out) if scalar else out


def legendre_derivative(d: int, ell: int, x):
    """d/dx of the normalized polynomial, via the dimension-raising identity.

    P_l'(x) on S^d equals (l (l + d - 1) / d) times the degree-(l-1)
    polynomial of the S^(d+2) family, so no division by (1 - x^2) is needed
    and the endpoints are exact.
    """
    if ell == 0:
        return 0.0 if np.isscalar(x) else np.zeros_like(np.asarray(x, dtype=float))
    factor = eigenvalue(d, ell) / d
    return factor * legendre(d + 2, ell - 1, x)


@dataclass(frozen=True)
class LegendreEvaluator:
    """Reusable recurrence workspace for degrees 0..max_degree on S^d.

    Precomputes the recurrence coefficients once; ``profile`` then walks the
    recurrence over an array argument, yielding all degrees in one sweep.
    The build verifies P_l(1) = 1 for every degree.
    """

    dim: int
    max_degree: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if self.max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        a, b = _recurrence_coeffs(self.dim, max(self.max_degree, 2))
        object.__setattr__(self, "_a", a)
        object.__setattr__(self, "_b", b)
        at_one = self.profile(np.array([1.0]))
        # round-off at x = 1 grows linearly in the degree (one rounded
        # combination per step), hence the degree-scaled tolerance
        tol = 1e-12 + 4e-15 * self.max_degree
        if not np.allclose(at_one, 1.0, rtol=0, atol=tol):
            raise ConsistencyError("recurrence does not give P_l(1) = 1")

    def profile(self, x: np.ndarray) -> np.ndarray:
        """All values P_0(x)..P_max(x), stacked along a new leading axis."""
        xv = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
        out = np.empty((self.max_degree + 1,) + xv.shape)
        out[0] = 1.0
        if self.max_degree >= 1:
            out[1] = xv
        a, b = self._a, self._b
        for ell in range(2, self.max_degree + 1):
            out[ell] = a[ell - 2] * xv * out[ell - 1] - b[ell - 2] * out[ell - 2]
        return out

    def iter_profile(self, x: np.ndarray):
        """Yield (ell, P_ell(x)) for ell = 0..max_degree without stacking.

        Keeps only two rows alive, so large degree sweeps over big pairwise
        matrices stay inside memory.
        """
        xv = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
        p_prev = np.ones_like(xv)
        yield 0, p_prev
        if self.max_degree == 0:
            return
        p_cur = xv
        yield 1, p_cur
        a, b = self._a, self._b
        for ell in range(2, self.max_degree + 1):
            p_prev, p_cur = p_cur, a[ell - 2] * xv * p_cur - b[ell - 2] * p_prev
            yield ell, p_cur


def _pair_block_rows(n: int, width: int, budget: int = 4_000_000) -> int:
    return max(1, min(n, budget // max(width, 1)))


def harmonic_defect_profile(X: PointSet, ell_max: int,
                            weights=None) -> np.ndarray:
    """Degree defects for ell = 1..ell_max in one recurrence sweep.

    Returns the array of pair-averaged Z(d, l) P_l values.  Exact values are
    nonnegative; tiny negative round-off (above ``DEFECT_CLAMP``) is clamped
    to zero and counted, anything more negative raises
    :class:`ConsistencyError`.

    ``weights`` optionally reweights each degree before summing over pairs
    (used internally for kernel partial sums); the clamp policy applies only
    to the unweighted defects.
    """
    global _clamp_count
    if ell_max < 1:
        raise ValueError("ell_max must be >= 1")
    d = X.dim
    pts = X.points
    n = X.n
    zs = harmonic_space_dims(d, ell_max)
    ev = LegendreEvaluator(d, ell_max)
    sums = np.zeros(ell_max + 1)
    step = _pair_block_rows(n, n)
    for lo in range(0, n, step):
        block = np.clip(pts[lo:lo + step] @ pts.T, -1.0, 1.0)
        for ell, vals in ev.iter_profile(block):
            sums[ell] += vals.sum()
    defects = zs * sums / (n * n)
    out = defects[1:]
    neg = out < 0
    if np.any(neg):
        worst = float(out.min())
        if worst < DEFECT_CLAMP:
            raise ConsistencyError(
                f"degree defect {worst:.3e} below the round-off clamp "
                f"{DEFECT_CLAMP:.0e}")
        _clamp_count += int(neg.sum())
        out = np.where(neg, 0.0, out)
    return out


def harmonic_defect(ell: int, X: PointSet) -> float:
    """The degree-l defect of a point set (zero iff degree-l exactness)."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    return float(harmonic_defect_profile(X, ell)[ell - 1])


def design_strength(X: PointSet, t_max: int, tol: float | None = None) -> int:
    """Largest t <= t_max with all degree defects through t below tolerance.

    With ``tol=None`` the threshold scales per degree as 1e-10 * Z(d, l),
    since defect magnitudes grow with the harmonic count; a float applies
    one flat threshold to every degree.  Returns 0 when already the degree-1
    defect is above threshold.
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    defects = harmonic_defect_profile(X, t_max)
    if tol is None:
        thresholds = np.array(
            [1e-10 * harmonic_space_dim(X.dim, ell) for ell in range(1, t_max + 1)])
    else:
        if tol <= 0:
            raise ValueError("tol must be positive")
        thresholds = np.full(t_max, tol)
    above = defects > thresholds
    if not np.any(above):
        return t_max
    return int(np.argmax(above))


def design_point_lower_bound(d: int, t: int) -> int:
    """Minimum number of points any strength-t design on S^d must have.

    Binomial count, split by the parity of t; grows like t^d.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if t % 2 == 0:
        k = t // 2
        return math.comb(d + k, d) + math.comb(d + k - 1, d)
    k = t // 2
    return 2 * math.comb(d + k, d)
