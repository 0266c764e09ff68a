"""Unit-disk geometry: Stolz angles, non-tangential approach paths and
angle arithmetic modulo pi.

Points are plain Python/numpy complex numbers throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchJump, EmptyPath, SlopeTooLarge, ZeroOnPath

TWO_PI = 2.0 * math.pi
K_MAX = 45  # 1 - 2**-k is indistinguishable from 1 beyond this


def normalize_angle(theta: float) -> float:
    """Reduce an angle into [0, 2*pi)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


@dataclass(frozen=True)
class StolzAngle:
    """The region {z in the disk : |z - e^{i theta0}| < alpha (1 - |z|)}.

    Non-empty only for alpha > 1.
    """

    theta0: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"Stolz opening must be positive, got {self.alpha}")
        if not math.isfinite(self.theta0):
            raise ValueError("theta0 must be finite")
        object.__setattr__(self, "theta0", normalize_angle(self.theta0))

    @property
    def vertex(self) -> complex:
        return complex(math.cos(self.theta0), math.sin(self.theta0))

    def contains(self, z):
        return stolz_contains(self, z)


def stolz_contains(s: StolzAngle, z):
    """Membership test; accepts a scalar or an array of points."""
    z = np.asarray(z, dtype=complex)
    mod = np.abs(z)
    inside = (mod < 1.0) & (np.abs(z - s.vertex) < s.alpha * (1.0 - mod))
    if inside.ndim == 0:
        return bool(inside)
    return inside


@dataclass(frozen=True)
class ApproachPath:
    """Finite geometric approach z_k = (1 - d_k) e^{i(theta0 + slope d_k)}, d_k = 2^-k."""

    stolz: StolzAngle
    slope: float
    ks: tuple
    deltas: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.points)

    def describe(self) -> dict:
        return {
            "theta0": self.stolz.theta0,
            "stolz_alpha": self.stolz.alpha,
            "slope": self.slope,
            "k_min": self.ks[0],
            "k_max": self.ks[-1],
        }


def make_approach_path(s: StolzAngle, slope: float, k_min: int, k_max: int) -> ApproachPath:
    if slope * slope >= s.alpha * s.alpha - 1.0:
        raise SlopeTooLarge(
            f"slope^2 = {slope * slope:.6g} must be below alpha^2 - 1 = {s.alpha ** 2 - 1:.6g}"
        )
    if not (1 <= k_min < k_max <= K_MAX):
        raise EmptyPath(f"need 1 <= k_min < k_max <= {K_MAX}, got {k_min}..{k_max}")
    ks = tuple(range(k_min, k_max + 1))
    deltas = np.ldexp(1.0, -np.array(ks))
    points = (1.0 - deltas) * np.exp(1j * (s.theta0 + slope * deltas))
    bad = ~stolz_contains(s, points)
    if bad.any():
        # only reachable through rounding when slope sits right at the admissible edge
        raise SlopeTooLarge(f"path leaves the Stolz angle at k = {np.array(ks)[bad][0]}")
    return ApproachPath(stolz=s, slope=float(slope), ks=ks, deltas=deltas, points=points)


def mod_pi(x: float) -> float:
    """Representative of x modulo pi in [0, pi)."""
    r = math.fmod(x, math.pi)
    if r < 0:
        r += math.pi
    if r >= math.pi:
        r = 0.0
    return r


def mod_pi_distance(a: float, b: float) -> float:
    d = mod_pi(abs(a - b))
    return min(d, math.pi - d)


def unwrap_args(values) -> np.ndarray:
    """Continuous branch of arg along a sequence of nonzero complex values.

    Starts from the principal argument and shifts each subsequent principal
    argument by the multiple of 2 pi nearest the previous value. Steps of
    more than pi/2 (after the shift) mean the sequence is too coarse.
    """
    v = np.asarray(values, dtype=complex).ravel()
    if v.size == 0:
        return np.zeros(0)
    if np.any(v == 0) or not np.all(np.isfinite(v)):
        raise ZeroOnPath("cannot take the argument of zero along the path")
    p = np.angle(v)
    out = np.empty_like(p)
    out[0] = p[0]
    for k in range(1, len(p)):
        w = p[k] + TWO_PI * round((out[k - 1] - p[k]) / TWO_PI)
        if abs(w - out[k - 1]) > math.pi / 2 + 1e-12:
            raise BranchJump(f"argument jump {w - out[k - 1]:.3g} at index {k}")
        out[k] = w
    return out


def stolz_edge_distance(s: StolzAngle, psi):
    """Distance t from the vertex to the far edge of S along direction psi.

    Points are z = e^{i theta0} (1 - t e^{i psi}); the edge exists for
    cos(psi) > 1/alpha and requires alpha > 1.
    """
    a = s.alpha
    psi = np.asarray(psi, dtype=float)
    return 2 * a * (a * np.cos(psi) - 1) / (a * a - 1)


def stolz_half_opening(s: StolzAngle) -> float:
    if s.alpha <= 1:
        raise ValueError("Stolz region is empty for alpha <= 1")
    return math.acos(1 / s.alpha)


def stolz_region_points(s: StolzAngle, eps: float, n_dir: int = 24, n_dist: int = 24) -> np.ndarray:
    """Interior sample points of S intersected with |z| <= 1 - eps."""
    half = stolz_half_opening(s)
    psi = half * (2 * (np.arange(n_dir) + 0.5) / n_dir - 1)
    frac = (np.arange(n_dist) + 0.5) / n_dist
    t = np.outer(stolz_edge_distance(s, psi), frac)
    z = s.vertex * (1 - t * np.exp(1j * psi)[:, None])
    z = z.ravel()
    keep = stolz_contains(s, z) & (np.abs(z) <= 1 - eps)
    return z[keep]
