"""Independent oracles the tests check library results against.

Everything here is deliberately brute force (Monte Carlo, quadrature,
explicit polynomial tables, an explicit harmonic basis) and shares no code
path with the implementations under test.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import lpmv, roots_jacobi

# Explicit classical Legendre polynomials (d = 2 family), degrees 0..6.
EXPLICIT_LEGENDRE = [
    lambda x: np.ones_like(np.asarray(x, dtype=float)),
    lambda x: x,
    lambda x: (3 * x ** 2 - 1) / 2,
    lambda x: (5 * x ** 3 - 3 * x) / 2,
    lambda x: (35 * x ** 4 - 30 * x ** 2 + 3) / 8,
    lambda x: (63 * x ** 5 - 70 * x ** 3 + 15 * x) / 8,
    lambda x: (231 * x ** 6 - 315 * x ** 4 + 105 * x ** 2 - 5) / 16,
]


def mc_mean_distance_power(d: int, s: float, n_pairs: int, seed: int):
    """Monte Carlo mean of |x - y|^(2s - d) over uniform pairs, with stderr."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n_pairs, d + 1))
    y = rng.standard_normal((n_pairs, d + 1))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    vals = np.linalg.norm(x - y, axis=1) ** (2 * s - d)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_pairs))


def simpson_cap_measure(d: int, theta: float, n: int = 4001) -> float:
    """Cap measure by composite Simpson on the sin^(d-1) integrand."""
    if theta == 0.0:
        return 0.0
    t = np.linspace(0.0, theta, n if n % 2 == 1 else n + 1)
    f = np.sin(t) ** (d - 1)
    h = t[1] - t[0]
    integral = h / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum())
    full = math.sqrt(math.pi) * math.exp(math.lgamma(d / 2)
                                         - math.lgamma((d + 1) / 2))
    return integral / full


def real_harmonics_s2(ell: int, points: np.ndarray) -> np.ndarray:
    """Real degree-ell spherical harmonics on S^2, orthonormal for the
    normalized measure; shape (2 ell + 1, n)."""
    pts = np.atleast_2d(points)
    ct = np.clip(pts[:, 2], -1.0, 1.0)
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    rows = []
    for m in range(0, ell + 1):
        norm = math.sqrt((2 * ell + 1)
                         * math.exp(math.lgamma(ell - m + 1)
                                    - math.lgamma(ell + m + 1)))
        base = norm * lpmv(m, ell, ct)
        if m == 0:
            rows.append(base)
        else:
            rows.append(math.sqrt(2.0) * base * np.cos(m * phi))
            rows.append(math.sqrt(2.0) * base * np.sin(m * phi))
    return np.vstack(rows)


def gauss_jacobi_orthogonality(d: int, fa, fb, nodes: int = 64) -> float:
    """Integral of fa * fb against (1 - t^2)^(d/2 - 1) on [-1, 1]."""
    x, w = roots_jacobi(nodes, d / 2 - 1, d / 2 - 1)
    return float(np.sum(w * fa(x) * fb(x)))


def sphere_mean_s2(f, n_theta: int = 200, n_phi: int = 400) -> float:
    """Mean of f over S^2 by Gauss-Legendre in z and the periodic rule in phi."""
    ct, w = np.polynomial.legendre.leggauss(n_theta)
    st = np.sqrt(1.0 - ct ** 2)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    x = st[:, None] * np.cos(phi)[None, :]
    y = st[:, None] * np.sin(phi)[None, :]
    z = np.broadcast_to(ct[:, None], x.shape)
    pts = np.stack([x, y, z], axis=-1).reshape(-1, 3)
    vals = np.asarray(f(pts)).reshape(n_theta, n_phi)
    return float(np.sum(w[:, None] * vals) / (2 * n_phi))


def hemisphere_cross_mean_distance(n_nodes: int = 64) -> float:
    """Mean distance between independent uniform points on opposite
    hemispheres of S^2, by product Gauss-Legendre quadrature."""
    t, wt = np.polynomial.legendre.leggauss(n_nodes)
    theta1 = math.pi / 4 * (t + 1)            # [0, pi/2]
    w1 = math.pi / 4 * wt * np.sin(theta1)
    theta2 = math.pi / 4 * (t + 1) + math.pi / 2   # [pi/2, pi]
    w2 = math.pi / 4 * wt * np.sin(theta2)
    dphi = math.pi * (t + 1)                  # [0, 2 pi]
    wphi = math.pi * wt / (2 * math.pi)
    c1, s1 = np.cos(theta1), np.sin(theta1)
    c2, s2 = np.cos(theta2), np.sin(theta2)
    inner = (c1[:, None, None] * c2[None, :, None]
             + s1[:, None, None] * s2[None, :, None]
             * np.cos(dphi)[None, None, :])
    dist = np.sqrt(np.clip(2.0 - 2.0 * inner, 0.0, None))
    # w1, w2, wphi are already probability-normalized over their ranges
    return float(np.einsum("i,j,k,ijk->", w1, w2, wphi, dist))


def random_rotation(rng: np.random.Generator, m: int) -> np.ndarray:
    """Haar-ish random rotation from the QR of a Gaussian matrix."""
    a = rng.standard_normal((m, m))
    q, r = np.linalg.qr(a)
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
