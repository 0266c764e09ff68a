"""Zero counting by the argument principle, plus a brute-force grid scan
for functions that are merely smooth (such as f' = h' + conj(g')).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadEps, BadParam, NonSimpleContour, OutsideDisk, ZeroOnContour
from .geometry import StolzAngle, stolz_edge_distance
from .maps import HarmonicMap, polar_grid

FN_FLOOR = 1e-12
MAX_ROUNDS = 60
MAX_POINTS = 2_000_000


def _cross(a, b):
    return a.real * b.imag - a.imag * b.real


def _segments_cross(p1, p2, q1, q2):
    d1 = _cross(q2 - q1, p1 - q1)
    d2 = _cross(q2 - q1, p2 - q1)
    d3 = _cross(p2 - p1, q1 - p1)
    d4 = _cross(p2 - p1, q2 - p1)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


def polyline_self_intersects(pts: np.ndarray, closed: bool = True) -> bool:
    """True if two non-adjacent segments of the polyline properly cross."""
    pts = np.asarray(pts, dtype=complex)
    a, b = pts[:-1], pts[1:]
    n = a.size
    hit = _segments_cross(a[:, None], b[:, None], a[None, :], b[None, :])
    i, j = np.triu_indices(n, k=2)
    mask = hit[i, j]
    if closed:
        mask &= ~((i == 0) & (j == n - 1))
    return bool(mask.any())


def signed_area(pts: np.ndarray) -> float:
    pts = np.asarray(pts, dtype=complex)
    return 0.5 * float(np.sum(_cross(pts[:-1], pts[1:])))


@dataclass(frozen=True, eq=False)
class Contour:
    """Closed simple polygon inside the disk, counterclockwise, first == last."""

    vertices: np.ndarray
    refinement: float | None = None

    def contains(self, z) -> np.ndarray:
        """Even-odd rule point-in-polygon test."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        a, b = self.vertices[:-1], self.vertices[1:]
        x, y = z.real[:, None], z.imag[:, None]
        ay, by = a.imag[None, :], b.imag[None, :]
        straddle = (ay > y) != (by > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = a.real[None, :] + (y - ay) * (b.real - a.real)[None, :] / (by - ay)
        inside = np.sum(straddle & (x < xc), axis=1) % 2 == 1
        return inside


def make_contour(vertices, refinement: float | None = None, check_simple: bool = True) -> Contour:
    v = np.asarray(vertices, dtype=complex).ravel()
    if v.size < 4:
        raise BadParam("a contour needs at least three distinct vertices")
    if v[0] != v[-1]:
        v = np.append(v, v[0])
    if np.any(np.abs(v) >= 1):
        raise BadParam("contour vertices must lie inside the open disk")
    if check_simple and polyline_self_intersects(v):
        raise NonSimpleContour("contour crosses itself")
    if signed_area(v) < 0:
        v = v[::-1].copy()
    return Contour(v, refinement)


def circle_contour(radius: float, n: int = 64, center: complex = 0j) -> Contour:
    t = 2 * np.pi * np.arange(n) / n
    return make_contour(center + radius * np.exp(1j * t), check_simple=False)


@dataclass
class ZeroCountReport:
    count: int | None
    winding_residual: float
    eps_history: list = field(default_factory=list)
    stabilized: bool = True
    status: str = "ok"
    evaluations: int = 0

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "winding_residual": self.winding_residual,
            "eps_history": [[e, c] for e, c in self.eps_history],
            "stabilized": self.stabilized,
            "status": self.status,
        }


def _initial_points(c: Contour) -> np.ndarray:
    v = c.vertices
    if not c.refinement:
        return v.copy()
    pieces = [v[:1]]
    for a, b in zip(v[:-1], v[1:]):
        n = max(1, math.ceil(abs(b - a) / c.refinement))
        pieces.append(a + (b - a) * (np.arange(1, n + 1) / n))
    return np.concatenate(pieces)


def argument_principle_count(fn, contour: Contour) -> ZeroCountReport:
    """Winding number of fn along the contour, refined until every step
    changes arg by less than pi/2 and moves by less than half the
    distance to the origin."""
    pts = _initial_points(contour)
    vals = np.asarray(fn(pts), dtype=complex)
    if np.any(np.abs(vals) < FN_FLOOR):
        raise ZeroOnContour("function vanishes at a contour vertex")
    for _ in range(MAX_ROUNDS):
        step = vals[1:] / vals[:-1]
        mag = np.minimum(np.abs(vals[1:]), np.abs(vals[:-1]))
        bad = (np.abs(np.angle(step)) >= np.pi / 2) | (np.abs(vals[1:] - vals[:-1]) >= 0.5 * mag)
        if not bad.any():
            break
        idx = np.nonzero(bad)[0]
        new_pts = np.empty(idx.size, dtype=complex)
        new_vals = np.empty(idx.size, dtype=complex)
        for frac_try in (0.5, 0.4, 0.6, 0.3):
            pending = np.isnan(new_vals.real) if frac_try != 0.5 else np.ones(idx.size, bool)
            if not pending.any():
                break
            cand = pts[idx[pending]] + frac_try * (pts[idx[pending] + 1] - pts[idx[pending]])
            cv = np.asarray(fn(cand), dtype=complex)
            ok = np.abs(cv) >= FN_FLOOR
            sub = np.nonzero(pending)[0]
            new_pts[sub[ok]] = cand[ok]
            new_vals[sub[ok]] = cv[ok]
            new_vals[sub[~ok]] = np.nan
        if np.any(np.isnan(new_vals.real)):
            raise ZeroOnContour("function vanishes on the contour after 3 refinement rounds")
        pts = np.insert(pts, idx + 1, new_pts)
        vals = np.insert(vals, idx + 1, new_vals)
        if pts.size > MAX_POINTS:
            raise ZeroOnContour("argument refinement exploded; a zero sits on or next to the contour")
    else:
        raise ZeroOnContour("argument refinement did not settle")
    winding = float(np.sum(np.angle(vals[1:] / vals[:-1]))) / (2 * np.pi)
    count = int(round(winding))
    return ZeroCountReport(count, abs(winding - count), evaluations=int(pts.size))


def _fill_curve(param_fn, a: float, b: float, spacing: float, start: int = 16) -> np.ndarray:
    n = start
    while True:
        z = param_fn(np.linspace(a, b, n + 1))
        if np.max(np.abs(np.diff(z))) <= spacing:
            return z
        n *= 2


def truncated_stolz_contour(s: StolzAngle, eps: float, n_side: int = 64) -> Contour:
    """Boundary of S_alpha(e^{i theta0}) intersected with |z| <= 1 - eps."""
    if not 0 < eps <= 0.5:
        raise BadEps(f"eps must lie in (0, 0.5], got {eps}")
    if n_side < 16:
        raise BadParam("n_side must be >= 16")
    if s.alpha <= 1:
        raise BadParam("Stolz region is empty for alpha <= 1")
    rho = 1 - eps
    spacing = rho / n_side
    v = s.vertex
    a = s.alpha
    if eps >= 2 / (a + 1):
        # the cap lies entirely inside S
        pts = _fill_curve(lambda t: rho * v * np.exp(1j * t), 0.0, 2 * np.pi, spacing)
        return make_contour(pts[:-1], refinement=spacing, check_simple=False)
    psi_e = math.acos((1 + eps * (a * a - 1) / 2) / a)

    def edge(psi):
        return v * (1 - stolz_edge_distance(s, psi) * np.exp(1j * psi))

    side = _fill_curve(edge, -psi_e, psi_e, spacing)
    tau_e = float(np.angle(side[-1] / v))
    cap = _fill_curve(lambda t: rho * v * np.exp(1j * t), tau_e, -tau_e, spacing)
    pts = np.concatenate([side, cap[1:-1]])
    return make_contour(pts, refinement=spacing)


def _is_degenerate(fn) -> bool:
    probe = polar_grid(0.9, 4, 16)
    return bool(np.all(np.asarray(fn(probe)) == 0))


def count_dilatation_zeros(m: HarmonicMap, s: StolzAngle, eps_ladder, n_side: int = 64) -> ZeroCountReport:
    """Net zeros of omega = g'/h' in truncated Stolz regions, one per eps.

    Zeros of g' and h' are counted separately so that no contour ever sees a pole.
    """
    ladder = [float(e) for e in eps_ladder]
    if not ladder or any(not 0 < e < 0.5 for e in ladder) or any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise BadEps("eps ladder must be strictly decreasing inside (0, 0.5)")
    if _is_degenerate(m.g_prime):
        return ZeroCountReport(None, 0.0, [], False, status="Degenerate")
    history = []
    worst = 0.0
    evals = 0
    for eps in ladder:
        c = truncated_stolz_contour(s, eps, n_side)
        ng = argument_principle_count(m.g_prime, c)
        nh = argument_principle_count(m.h_prime, c)
        worst = max(worst, ng.winding_residual, nh.winding_residual)
        evals += ng.evaluations + nh.evaluations
        history.append((eps, ng.count - nh.count))
    stable = len(history) >= 2 and history[-1][1] == history[-2][1]
    return ZeroCountReport(history[-1][1], worst, history, stable,
                           status="Stabilized" if stable else "NotStabilized", evaluations=evals)


def _region_mask(region, z: np.ndarray) -> np.ndarray:
    if isinstance(region, Contour):
        return region.contains(z)
    if np.isscalar(region):
        return np.abs(z) <= float(region)
    x0, x1, y0, y1 = region
    return (z.real >= x0) & (z.real <= x1) & (z.imag >= y0) & (z.imag <= y1)


def _bbox(region):
    if isinstance(region, Contour):
        v = region.vertices
        return v.real.min(), v.real.max(), v.imag.min(), v.imag.max()
    if np.isscalar(region):
        r = float(region)
        return -r, r, -r, r
    return tuple(region)


def _safe_eval(fn, z: complex) -> complex:
    try:
        w = complex(np.asarray(fn(np.array([z])), dtype=complex)[0])
    except OutsideDisk:
        return complex(np.inf, np.inf)
    return w if np.isfinite(w) else complex(np.inf, np.inf)


def _polish(fn, z: complex, max_iter: int = 60) -> complex:
    w = _safe_eval(fn, z)
    for _ in range(max_iter):
        if abs(w) < 1e-14:
            break
        h = 1e-7 * max(1.0, abs(z))
        dx = (_safe_eval(fn, z + h) - _safe_eval(fn, z - h)) / (2 * h)
        dy = (_safe_eval(fn, z + 1j * h) - _safe_eval(fn, z - 1j * h)) / (2 * h)
        jac = np.array([[dx.real, dy.real], [dx.imag, dy.imag]])
        try:
            step = np.linalg.solve(jac, [-w.real, -w.imag])
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        lam, improved = 1.0, False
        for _ in range(30):
            cand = z + lam * complex(step[0], step[1])
            wc = _safe_eval(fn, cand)
            if abs(wc) < abs(w):
                z, w, improved = cand, wc, True
                break
            lam /= 2
        if not improved:
            break
    return z


def grid_zero_scan(fn, region, cell: float, threshold: float = 0.05, accept: float = 1e-10) -> list:
    """Locate zeros of a smooth complex function by sampling and 2-D Newton polishing.

    `region` is a Contour, a disk radius, or an (xmin, xmax, ymin, ymax) box.
    """
    if cell <= 0:
        raise BadParam("cell must be positive")
    x0, x1, y0, y1 = _bbox(region)
    xs = np.arange(x0, x1 + cell / 2, cell)
    ys = np.arange(y0, y1 + cell / 2, cell)
    zz = xs[None, :] + 1j * ys[:, None]
    mask = _region_mask(region, zz.ravel()).reshape(zz.shape)
    vals = np.full(zz.shape, np.inf)
    if mask.any():
        vals[mask] = np.abs(np.asarray(fn(zz[mask]), dtype=complex))
    padded = np.pad(vals, 1, constant_values=np.inf)
    is_min = np.ones(vals.shape, bool)
    ny, nx = vals.shape
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            is_min &= vals <= padded[1 + dy:1 + dy + ny, 1 + dx:1 + dx + nx]
    cand = zz[is_min & (vals < threshold)]
    found = []
    for z in cand:
        r = _polish(fn, complex(z))
        if abs(_safe_eval(fn, r)) >= accept or not _region_mask(region, np.array([r]))[0]:
            continue
        if all(abs(r - q) > cell / 2 for q in found):
            found.append(r)
    return sorted(found, key=lambda q: (q.real, q.imag))
