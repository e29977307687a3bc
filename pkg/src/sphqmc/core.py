"""Sphere geometry, special-function primitives, and point-set I/O.

Everything downstream works on the unit sphere S^d embedded in R^(d+1),
carrying the *normalized* surface measure (total mass 1).  This module owns
the handful of closed-form constants that the rest of the package leans on:
surface areas, the small-cap area constant, normalized cap measures and
their inverses, and the mean of pairwise distance powers.

All gamma-ratio quantities are computed through log-gamma differences so
they stay finite for large arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as _sp

# A constructed PointSet carries rows that are unit vectors to this tolerance.
UNIT_NORM_TOL = 1e-12
# Inputs whose norm is off by at most this much are silently renormalized;
# anything farther from the sphere is treated as bad data and rejected.
RENORM_GATE = 1e-8


class PointSetFormatError(ValueError):
    """Raised for malformed point-set files; carries the offending line."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class ConsistencyError(RuntimeError):
    """A computed value violates a mathematical invariant (likely a bug)."""


@dataclass(frozen=True)
class PointSet:
    """An ordered set of N unit vectors on S^d (ambient dimension d+1).

    Parameters
    ----------
    points : array_like, shape (n, d+1)
        Coordinate rows.  Rows within ``RENORM_GATE`` of unit norm are
        renormalized; rows farther out raise ``ValueError``.
    label : str, optional
        Free-text provenance (generator name, source file, seed, ...).
    """

    points: np.ndarray
    label: str | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
        n, m = pts.shape
        if n < 1:
            raise ValueError("a PointSet needs at least one point")
        if m < 3:
            raise ValueError(f"ambient dimension must be >= 3 (d >= 2), got {m}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite coordinates")
        norms = np.linalg.norm(pts, axis=1)
        off = np.abs(norms - 1.0)
        bad = off > RENORM_GATE
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ValueError(
                f"point {i} has norm {norms[i]:.12g}, farther than {RENORM_GATE:g} "
                "from the unit sphere"
            )
        # rows already unit to the invariant tolerance are kept bit-exact
        # (file round trips must not perturb coordinates)
        pts = pts.copy()
        drift = off > UNIT_NORM_TOL
        if np.any(drift):
            pts[drift] = pts[drift] / norms[drift, None]
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        """The sphere dimension d (points live in R^(d+1))."""
        return self.points.shape[1] - 1

    def __len__(self) -> int:
        return self.n

    def with_label(self, label: str) -> "PointSet":
        return PointSet(self.points, label=label)


@dataclass(frozen=True)
class Cap:
    """Spherical cap: all points within geodesic angle ``radius`` of ``center``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        nrm = np.linalg.norm(c)
        if abs(nrm - 1.0) > RENORM_GATE:
            raise ValueError(f"cap center has norm {nrm:.12g}")
        c = c / nrm
        c.flags.writeable = False
        object.__setattr__(self, "center", c)
        if not 0.0 <= self.radius <= math.pi:
            raise ValueError(f"cap radius must lie in [0, pi], got {self.radius}")

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of rows of ``points`` inside the closed cap."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.center >= math.cos(self.radius) - 1e-15

    def measure(self, d: int | None = None) -> float:
        """Normalized surface measure of the cap."""
        if d is None:
            d = self.center.shape[0] - 1
        return cap_measure(d, self.radius)


def surface_area(d: int) -> float:
    """Surface area of the unit sphere S^d: 2 pi^((d+1)/2) / Gamma((d+1)/2).

    ``d = 1`` gives the circle circumference 2 pi, ``d = 2`` gives 4 pi.
    """
    if d <= 0:
        raise ValueError(f"d must be a positive integer, got {d}")
    return math.exp(math.log(2.0) + 0.5 * (d + 1) * math.log(math.pi)
                    - math.lgamma(0.5 * (d + 1)))


def surface_area_ratio(d: int) -> float:
    """The ratio area(S^(d-1)) / area(S^d) = Gamma((d+1)/2) / (sqrt(pi) Gamma(d/2))."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return math.exp(math.lgamma(0.5 * (d + 1)) - math.lgamma(0.5 * d)) / math.sqrt(math.pi)


def cap_area_constant(d: int, *, form: str = "gamma") -> float:
    """The constant (1/d) * area(S^(d-1)) / area(S^d).

    Governs the small-cap law: the normalized measure of a cap of geodesic
    radius theta behaves like this constant times (2 sin(theta/2))^d.  It is
    also the conversion factor between the cap L2 discrepancy and the
    distance-kernel worst-case error.

    Two algebraically equal forms are provided as a cross-check: ``"gamma"``
    uses the log-gamma ratio, ``"area"`` divides the two surface areas.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if form == "gamma":
        return surface_area_ratio(d) / d
    if form == "area":
        return surface_area(d - 1) / (d * surface_area(d))
    raise ValueError(f"unknown form {form!r}")


def rising_factorial(a: float, n: int) -> float:
    """Pochhammer symbol (a)_n by its recurrence, exact at nonpositive a.

    (a)_0 = 1 and (a)_(n+1) = (a)_n * (n + a).  The recurrence, rather than a
    gamma-function quotient, keeps nonpositive arguments exact (the product
    simply hits zero or alternates sign).
    """
    if n < 0:
        raise ValueError("n must be a nonnegative integer")
    out = 1.0
    for k in range(n):
        out *= a + k
    return out


def cap_measure(d: int, theta: float) -> float:
    """Normalized measure of a spherical cap of geodesic radius theta on S^d.

    Evaluates (area ratio) * integral_0^theta sin^(d-1), which equals the
    regularized incomplete beta function I_x(d/2, d/2) at x = sin^2(theta/2).
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if not 0.0 <= theta <= math.pi + 1e-12:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    theta = min(theta, math.pi)
    x = math.sin(0.5 * theta) ** 2
    return float(_sp.betainc(0.5 * d, 0.5 * d, min(x, 1.0)))


def cap_measure_from_cos(d: int, cos_theta) -> np.ndarray | float:
    """Cap measure as a function of cos(theta); vectorized over the argument."""
    c = np.clip(np.asarray(cos_theta, dtype=float), -1.0, 1.0)
    out = _sp.betainc(0.5 * d, 0.5 * d, 0.5 * (1.0 - c))
    return float(out) if np.isscalar(cos_theta) else out


def inverse_cap_measure(d: int, measure: float) -> float:
    """Geodesic radius theta whose cap has the given normalized measure."""
    if not 0.0 <= measure <= 1.0:
        raise ValueError(f"measure must lie in [0, 1], got {measure}")
    x = float(_sp.betaincinv(0.5 * d, 0.5 * d, measure))
    return 2.0 * math.asin(min(1.0, math.sqrt(x)))


def avg_distance_power(d: int, s: float) -> float:
    """Mean of |x - y|^(2s-d) over independent uniform x, y on S^d.

    Closed form 2^(2s-1) Gamma((d+1)/2) Gamma(s) / (sqrt(pi) Gamma(d/2 + s)),
    valid for s > d/2 (the exponent 2s - d then exceeds 0; smaller s is
    rejected because the kernels built on this constant require s > d/2).
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if s <= d / 2:
        raise ValueError(f"s must exceed d/2 = {d / 2}, got {s}")
    return math.exp((2 * s - 1) * math.log(2.0) + math.lgamma(0.5 * (d + 1))
                    + math.lgamma(s) - 0.5 * math.log(math.pi)
                    - math.lgamma(0.5 * d + s))


# ---------------------------------------------------------------------------
# Point-set file format
#
# UTF-8 text, an optional first header line "# dim=<d+1> n=<N>", then one
# point per line as d+1 whitespace-separated decimal floats.  The writer
# emits 17 significant digits so read(write(X)) reproduces coordinates
# bit-exactly.
# ---------------------------------------------------------------------------

def write_pointset(ps: PointSet, path) -> None:
    """Write a point set in the plain-text format described above."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# dim={ps.dim + 1} n={ps.n}")
        if ps.label:
            fh.write(f" label={ps.label}")
        fh.write("\n")
        for row in ps.points:
            fh.write(" ".join(f"{v:.16e}" for v in row))
            fh.write("\n")


def read_pointset(path) -> PointSet:
    """Read a point set written by :func:`write_pointset` (header optional).

    Raises :class:`PointSetFormatError` naming the offending line for a bad
    token count, a non-numeric token, or a row of norm farther than
    ``RENORM_GATE`` from 1.
    """
    rows: list[list[float]] = []
    width: int | None = None
    declared: tuple[int, int] | None = None
    label = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if lineno == 1:
                    declared, label = _parse_header(line)
                continue
            tokens = line.split()
            try:
                values = [float(t) for t in tokens]
            except ValueError:
                raise PointSetFormatError(
                    f"non-numeric token in {tokens!r}", path=path, line=lineno
                ) from None
            if width is None:
                width = len(values)
                if width < 3:
                    raise PointSetFormatError(
                        f"points need at least 3 coordinates, got {width}",
                        path=path, line=lineno)
            elif len(values) != width:
                raise PointSetFormatError(
                    f"expected {width} coordinates, got {len(values)}",
                    path=path, line=lineno)
            nrm = math.sqrt(math.fsum(v * v for v in values))
            if abs(nrm - 1.0) > RENORM_GATE:
                raise PointSetFormatError(
                    f"point has norm {nrm:.12g}, farther than {RENORM_GATE:g} "
                    "from the unit sphere", path=path, line=lineno)
            rows.append(values)
    if not rows:
        raise PointSetFormatError("no points in file", path=path)
    if declared is not None:
        dim1, n = declared
        if dim1 != len(rows[0]) or n != len(rows):
            raise PointSetFormatError(
                f"header declares dim={dim1} n={n} but file carries "
                f"dim={len(rows[0])} n={len(rows)}", path=path)
    return PointSet(np.array(rows, dtype=float), label=label)


def _parse_header(line: str):
    fields = dict(
        tok.split("=", 1) for tok in line.lstrip("#").split() if "=" in tok
    )
    declared = None
    if "dim" in fields and "n" in fields:
        try:
            declared = (int(fields["dim"]), int(fields["n"]))
        except ValueError:
            declared = None
    return declared, fields.get("label")
