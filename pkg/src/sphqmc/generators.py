"""Point-set generators: random, spiral, equal-area families, polytopes.

The equal-area machinery is a zonal construction on S^2: one cap at each
pole with normalized measure exactly 1/n, and the remaining band cut into
collars of near-square aspect, each collar split into equal azimuth
sectors.  Collar boundaries are re-solved from exact inverse cap measures
of the cumulative region counts, so every region's measure is exactly 1/n
up to floating point.  Region diameters scale like n^(-1/2), which is what
the stratified-sampling error bounds require.

Generators are pure functions of their parameters and seed; `PointSet`
labels record the provenance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PointSet, cap_measure, inverse_cap_measure

_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def random_uniform(d: int, n: int, seed: int) -> PointSet:
    """n points drawn independently and uniformly on S^d.

    Normalized Gaussian vectors; deterministic for a given (seed, d, n).
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, d + 1))
    norms = np.linalg.norm(pts, axis=1)
    while np.any(norms < 1e-12):        # never in practice; keeps the math airtight
        bad = norms < 1e-12
        pts[bad] = rng.standard_normal((int(bad.sum()), d + 1))
        norms = np.linalg.norm(pts, axis=1)
    return PointSet(pts / norms[:, None], label=f"random(d={d},n={n},seed={seed})")


def spiral(n: int) -> PointSet:
    """Generalized spiral points on S^2.

    Heights descend linearly, z_j = 1 - (2j - 1)/n, and the azimuth winds
    as 1.8 sqrt(n) times the colatitude, reduced mod 2 pi.  The first point
    sits at colatitude arccos(1 - 1/n), not at the pole; the printed
    formula is implemented verbatim, with the winding constant fixed at 1.8.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    j = np.arange(1, n + 1, dtype=float)
    z = 1.0 - (2.0 * j - 1.0) / n
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.mod(1.8 * math.sqrt(n) * theta, 2.0 * math.pi)
    st = np.sin(theta)
    pts = np.column_stack([st * np.cos(phi), st * np.sin(phi), z])
    return PointSet(pts, label=f"spiral(n={n})")


# ---------------------------------------------------------------------------
# Equal-area partition of S^2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """A colatitude band crossed with an azimuth interval (caps: full band)."""

    theta_lo: float
    theta_hi: float
    phi_lo: float
    phi_width: float

    @property
    def is_cap(self) -> bool:
        return self.phi_width >= 2.0 * math.pi - 1e-15

    def measure(self) -> float:
        band = cap_measure(2, self.theta_hi) - cap_measure(2, self.theta_lo)
        return band * self.phi_width / (2.0 * math.pi)

    def center(self, style: str = "centroid") -> np.ndarray:
        """Representative direction of the region.

        ``"centroid"`` normalizes the surface-measure centroid; these points
        balance low-degree harmonics unusually well.  ``"median"`` takes the
        colatitude splitting the band's measure in half and the azimuth
        midpoint, the flavor of the classical equal-area point sets (and the
        one whose high-smoothness error saturation matches the literature).
        """
        t0, t1 = self.theta_lo, self.theta_hi
        p0, w = self.phi_lo, self.phi_width
        if style == "median":
            if self.is_cap:
                return np.array([0.0, 0.0, 1.0 if t0 == 0.0 else -1.0])
            m = 0.5 * (cap_measure(2, t0) + cap_measure(2, t1))
            tm = inverse_cap_measure(2, m)
            pm = p0 + 0.5 * w
            return np.array([math.sin(tm) * math.cos(pm),
                             math.sin(tm) * math.sin(pm), math.cos(tm)])
        if style != "centroid":
            raise ValueError(f"unknown center style {style!r}")
        cz = w * 0.5 * (math.sin(t1) ** 2 - math.sin(t0) ** 2)
        i_ss = 0.5 * (t1 - t0) - 0.25 * (math.sin(2 * t1) - math.sin(2 * t0))
        cx = i_ss * (math.sin(p0 + w) - math.sin(p0))
        cy = i_ss * (math.cos(p0) - math.cos(p0 + w))
        vec = np.array([cx, cy, cz])
        nrm = np.linalg.norm(vec)
        if nrm < 1e-15:
            # degenerate (symmetric band): fall back to the midpoint direction
            tm, pm = 0.5 * (t0 + t1), p0 + 0.5 * w
            vec = np.array([math.sin(tm) * math.cos(pm),
                            math.sin(tm) * math.sin(pm), math.cos(tm)])
            nrm = 1.0
        return vec / nrm

    def diameter(self) -> float:
        """Euclidean diameter, exact over the region closure.

        Maximizes over corner colatitudes, the equator crossing, the
        per-edge critical colatitude, and (for azimuth span >= pi) the
        antipodal configuration when the band meets its mirror image.
        """
        t0, t1 = self.theta_lo, self.theta_hi
        dphi = min(self.phi_width, math.pi)
        c = math.cos(dphi)
        cands = {t0, t1}
        if t0 < 0.5 * math.pi < t1:
            cands.add(0.5 * math.pi)
        for edge in (t0, t1):
            # maximize -(cos(edge) cos t + c sin(edge) sin t) over t
            tstar = math.atan2(-c * math.sin(edge), -math.cos(edge)) % math.pi
            if t0 < tstar < t1:
                cands.add(tstar)
        best = 0.0
        for ta in cands:
            for tb in cands:
                inner = (math.cos(ta) * math.cos(tb)
                         + math.sin(ta) * math.sin(tb) * c)
                best = max(best, 2.0 - 2.0 * inner)
        if dphi >= math.pi - 1e-15:
            lo = max(t0, math.pi - t1)
            hi = min(t1, math.pi - t0)
            if lo <= hi + 1e-15:
                best = 4.0
        return math.sqrt(best)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """One point uniform with respect to surface measure on the region."""
        u = rng.uniform(cap_measure(2, self.theta_lo),
                        cap_measure(2, self.theta_hi))
        theta = inverse_cap_measure(2, u)
        phi = (self.phi_lo + rng.uniform(0.0, self.phi_width)) % (2.0 * math.pi)
        st = math.sin(theta)
        return np.array([st * math.cos(phi), st * math.sin(phi),
                         math.cos(theta)])


@dataclass(frozen=True)
class Partition:
    """Equal-area decomposition of S^2 into n regions (caps plus sectors)."""

    n: int
    regions: tuple
    boundaries: np.ndarray           # colatitude band edges, 0 .. pi
    collar_sectors: tuple            # sector count per band (caps: 1)
    collar_offsets: tuple            # azimuth offset per band

    @property
    def areas(self) -> np.ndarray:
        return np.array([r.measure() for r in self.regions])

    @property
    def diameters(self) -> np.ndarray:
        return np.array([r.diameter() for r in self.regions])

    def max_diameter(self) -> float:
        return float(self.diameters.max())

    def diameter_constant(self) -> float:
        """The constant c with every region diameter at most c n^(-1/2)."""
        return self.max_diameter() * math.sqrt(self.n)

    def locate(self, points: np.ndarray) -> np.ndarray:
        """Region index of each point; band/sector boundaries go to the
        lower-index region."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        theta = np.arccos(np.clip(pts[:, 2], -1.0, 1.0))
        phi = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2.0 * math.pi)
        band = np.searchsorted(self.boundaries[1:-1], theta, side="left")
        out = np.empty(len(pts), dtype=int)
        first_index = np.concatenate([[0], np.cumsum(self.collar_sectors)])
        for i in range(len(pts)):
            b = int(band[i])
            m = self.collar_sectors[b]
            if m == 1:
                out[i] = first_index[b]
                continue
            width = 2.0 * math.pi / m
            rel = (phi[i] - self.collar_offsets[b]) % (2.0 * math.pi)
            k = int(rel / width)
            if k >= m:
                k = m - 1
            out[i] = first_index[b] + k
        return out

    def centers(self, style: str = "centroid") -> PointSet:
        pts = np.array([r.center(style) for r in self.regions])
        return PointSet(pts, label=f"equal-area-centers(n={self.n},{style})")

    def sample(self, seed: int) -> PointSet:
        """One uniform point per region; deterministic for a given seed.

        Vectorized inversion: colatitudes come from the closed-form inverse
        cap measure on S^2 (the measure of a cap of radius t is sin^2(t/2)),
        azimuths are uniform within each sector.
        """
        rng = np.random.default_rng(seed)
        t_lo = np.array([r.theta_lo for r in self.regions])
        t_hi = np.array([r.theta_hi for r in self.regions])
        p_lo = np.array([r.phi_lo for r in self.regions])
        width = np.array([r.phi_width for r in self.regions])
        m_lo = np.sin(0.5 * t_lo) ** 2
        m_hi = np.sin(0.5 * t_hi) ** 2
        u = rng.uniform(m_lo, m_hi)
        theta = 2.0 * np.arcsin(np.sqrt(u))
        phi = np.mod(p_lo + width * rng.uniform(0.0, 1.0, size=self.n),
                     2.0 * math.pi)
        st = np.sin(theta)
        pts = np.column_stack([st * np.cos(phi), st * np.sin(phi),
                               np.cos(theta)])
        return PointSet(pts, label=f"randomized-equal-area(n={self.n},seed={seed})")


def equal_area_partition(n: int) -> Partition:
    """Zonal equal-area partition of S^2 into n regions.

    Polar caps of measure 1/n; the rest is cut into round((band height) /
    (ideal side)) collars, sector counts are rounded with a running
    compensation so they sum exactly to n - 2 (any residue lands on the
    last collar), and the collar boundaries are then re-solved from the
    exact inverse cap measure of the cumulative counts.  Consecutive
    collars are staggered by half a sector to avoid aligned meridian walls.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    theta_c = inverse_cap_measure(2, 1.0 / n)
    if n == 2:
        regions = (Region(0.0, 0.5 * math.pi, 0.0, 2.0 * math.pi),
                   Region(0.5 * math.pi, math.pi, 0.0, 2.0 * math.pi))
        return Partition(n=2, regions=regions,
                         boundaries=np.array([0.0, 0.5 * math.pi, math.pi]),
                         collar_sectors=(1, 1), collar_offsets=(0.0, 0.0))

    ideal_side = math.sqrt(4.0 * math.pi / n)
    band_height = math.pi - 2.0 * theta_c
    n_collars = max(1, round(band_height / ideal_side))

    # ideal (fractional) region counts per equal-height fictitious collar
    edges = theta_c + band_height * np.arange(n_collars + 1) / n_collars
    meas = np.array([cap_measure(2, t) for t in edges])
    ideal = n * np.diff(meas)
    counts = []
    carry = 0.0
    for y in ideal:
        m = max(1, round(y + carry))
        carry += y - m
        counts.append(m)
    counts[-1] += (n - 2) - sum(counts)
    if counts[-1] < 1:
        raise RuntimeError("sector rounding collapsed the last collar")

    # exact boundaries from cumulative counts
    cum = np.concatenate([[1], 1 + np.cumsum(counts)])
    bounds = np.array([0.0] + [inverse_cap_measure(2, c / n) for c in cum]
                      + [math.pi])

    regions: list[Region] = [Region(0.0, bounds[1], 0.0, 2.0 * math.pi)]
    sectors = [1]
    offsets = [0.0]
    offset = 0.0
    prev_width = 0.0
    for i, m in enumerate(counts):
        width = 2.0 * math.pi / m
        offset = (offset + 0.5 * (prev_width + width)) % (2.0 * math.pi)
        prev_width = width
        t_lo, t_hi = bounds[i + 1], bounds[i + 2]
        for k in range(m):
            regions.append(Region(t_lo, t_hi,
                                  (offset + k * width) % (2.0 * math.pi), width))
        sectors.append(m)
        offsets.append(offset)
    regions.append(Region(bounds[-2], math.pi, 0.0, 2.0 * math.pi))
    sectors.append(1)
    offsets.append(0.0)
    return Partition(n=n, regions=tuple(regions), boundaries=bounds,
                     collar_sectors=tuple(sectors), collar_offsets=tuple(offsets))


def region_centers(partition: Partition, style: str = "centroid") -> PointSet:
    """Representative directions of every region (centroid by default)."""
    return partition.centers(style)


def equal_area_centers(n: int, style: str = "median") -> PointSet:
    """Centers of the n-region equal-area partition.

    Defaults to the median style, whose behavior across smoothness matches
    the classical equal-area point sets.
    """
    return equal_area_partition(n).centers(style)


def randomized_equal_area(n: int, seed: int) -> PointSet:
    """One uniform sample per region of the n-region equal-area partition."""
    return equal_area_partition(n).sample(seed)


# ---------------------------------------------------------------------------
# Fixed polytope configurations (exact coordinates, handy design fixtures)
# ---------------------------------------------------------------------------

def polytope(kind: str) -> PointSet:
    """Vertices of a named regular polytope, normalized to S^2."""
    kind = kind.lower()
    if kind == "tetrahedron":
        pts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]],
                       dtype=float) / math.sqrt(3.0)
    elif kind == "octahedron":
        pts = np.vstack([np.eye(3), -np.eye(3)])
    elif kind == "cube":
        corners = [(i, j, k) for i in (-1, 1) for j in (-1, 1) for k in (-1, 1)]
        pts = np.array(corners, dtype=float) / math.sqrt(3.0)
    elif kind == "icosahedron":
        g = _GOLDEN
        base = []
        for a in (-1.0, 1.0):
            for b in (-g, g):
                base += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
        pts = np.array(base) / math.sqrt(1.0 + g * g)
    else:
        raise ValueError(f"unknown polytope kind {kind!r}")
    return PointSet(pts, label=kind)
