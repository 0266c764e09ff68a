"""Harmonic maps f = h + conj(g) of the unit disk.

Two concrete forms: `CoefficientMap` (truncated power series for h and g)
and `ClosedFormMap` (callables for h, g and their derivatives). Both
evaluate vectorized over numpy arrays of points.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import BadParam, OutsideDisk, UnknownGallery

OMEGA_UNDEFINED_REL = 1e-13


def _check_disk(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(~np.isfinite(z)) or np.any(np.abs(z) >= 1.0):
        raise OutsideDisk("evaluation point not inside the open unit disk")
    return z


# error-free transformations for compensated Horner
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def comp_horner(coeffs: np.ndarray, z) -> np.ndarray:
    """Compensated Horner evaluation of sum coeffs[n] z^n for complex data."""
    z = np.asarray(z, dtype=complex)
    zr, zi = z.real, z.imag
    c = np.asarray(coeffs, dtype=complex)
    sr = np.full(z.shape, c[-1].real)
    si = np.full(z.shape, c[-1].imag)
    cr = np.zeros(z.shape)
    ci = np.zeros(z.shape)
    for k in range(c.size - 2, -1, -1):
        p1, e1 = _two_prod(sr, zr)
        p2, e2 = _two_prod(si, zi)
        p3, e3 = _two_prod(sr, zi)
        p4, e4 = _two_prod(si, zr)
        pr, e5 = _two_sum(p1, -p2)
        pi, e6 = _two_sum(p3, p4)
        sr, e7 = _two_sum(pr, c[k].real)
        si, e8 = _two_sum(pi, c[k].imag)
        cr, ci = (cr * zr - ci * zi + (e1 - e2 + e5 + e7),
                  cr * zi + ci * zr + (e3 + e4 + e6 + e8))
    return (sr + cr) + 1j * (si + ci)


class HarmonicMap:
    """Interface shared by both forms. Subclasses supply h, g, h_prime, g_prime."""

    label: str

    def h(self, z):
        raise NotImplementedError

    def g(self, z):
        raise NotImplementedError

    def h_prime(self, z):
        raise NotImplementedError

    def g_prime(self, z):
        raise NotImplementedError

    def f(self, z):
        z = _check_disk(z)
        return self.h(z) + np.conj(self.g(z))

    __call__ = f

    def f_prime(self, z):
        """h' + conj(g'), i.e. h' + conj(h' omega)."""
        z = _check_disk(z)
        return self.h_prime(z) + np.conj(self.g_prime(z))

    def omega(self, z):
        """g'/h', NaN where h' is numerically zero."""
        z = _check_disk(z)
        hp, gp = self.h_prime(z), self.g_prime(z)
        undefined = np.abs(hp) < OMEGA_UNDEFINED_REL * (1 + np.abs(gp))
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(undefined, np.nan + 0j, gp / np.where(undefined, 1, hp))
        return w

    def jacobian(self, z):
        z = _check_disk(z)
        return np.abs(self.h_prime(z)) ** 2 - np.abs(self.g_prime(z)) ** 2

    def f_theta(self, z):
        z = _check_disk(z)
        return 1j * z * self.h_prime(z) + np.conj(1j * z * self.g_prime(z))


@dataclass(eq=False)
class CoefficientMap(HarmonicMap):
    """h = sum a_n z^n (n >= 0), g = sum b_n z^n (n >= 0).

    b[0] only shifts f by a constant; it is kept for round trips.
    """

    a: np.ndarray
    b: np.ndarray
    label: str = "poly"

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=complex))
        b = np.atleast_1d(np.asarray(self.b, dtype=complex))
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise BadParam("coefficients must be finite")
        n = max(a.size, b.size, 2)
        self.a = np.pad(a, (0, n - a.size))
        self.b = np.pad(b, (0, n - b.size))
        nn = np.arange(1, n)
        self._da = nn * self.a[1:]
        self._db = nn * self.b[1:]

    @property
    def degree(self) -> int:
        return self.a.size - 1

    def h(self, z):
        return comp_horner(self.a, z)

    def g(self, z):
        return comp_horner(self.b, z)

    def h_prime(self, z):
        return comp_horner(self._da, z)

    def g_prime(self, z):
        return comp_horner(self._db, z)

    def tail_bound(self, z):
        """Truncation estimate: last-decile coefficient size times the geometric tail."""
        r = np.abs(np.asarray(z, dtype=complex))
        n = self.degree
        start = max(1, n - max(1, (n + 1) // 10) + 1)
        amax = np.max(np.abs(self.a[start:])) + np.max(np.abs(self.b[start:]))
        with np.errstate(divide="ignore"):
            return amax * r ** (n + 1) / (1 - r)

    def eval_with_bound(self, z):
        return self.f(z), self.tail_bound(z)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "a": [[float(c.real), float(c.imag)] for c in self.a],
            "b": [[float(c.real), float(c.imag)] for c in self.b[1:]],
        }

    @classmethod
    def from_json(cls, doc: dict, label: str = "json") -> "CoefficientMap":
        a = [complex(re_, im_) for re_, im_ in doc["a"]]
        b = [0j] + [complex(re_, im_) for re_, im_ in doc["b"]]
        m = cls(np.array(a), np.array(b), label=label)
        if m.degree != int(doc["degree"]):
            raise BadParam("degree field does not match coefficient lists")
        return m


@dataclass(eq=False)
class ClosedFormMap(HarmonicMap):
    h_fn: Callable
    g_fn: Callable
    dh_fn: Callable
    dg_fn: Callable
    label: str = "closed-form"
    check: bool = True

    def __post_init__(self):
        if self.check:
            self._check_derivatives()

    def _check_derivatives(self, step: float = 1e-5, tol: float = 1e-6):
        probes = 0.5 * np.exp(1j * (2 * np.pi * np.arange(8) / 8 + 0.1))
        for fn, dfn, name in ((self.h_fn, self.dh_fn, "h"), (self.g_fn, self.dg_fn, "g")):
            numeric = (fn(probes + step) - fn(probes - step)) / (2 * step)
            exact = dfn(probes)
            if np.any(np.abs(numeric - exact) > tol * (1 + np.abs(exact))):
                raise BadParam(f"{name}' callable is inconsistent with {name} on probe points")

    def h(self, z):
        return np.asarray(self.h_fn(z), dtype=complex) * np.ones(np.shape(z))

    def g(self, z):
        return np.asarray(self.g_fn(z), dtype=complex) * np.ones(np.shape(z))

    def h_prime(self, z):
        return np.asarray(self.dh_fn(z), dtype=complex) * np.ones(np.shape(z))

    def g_prime(self, z):
        return np.asarray(self.dg_fn(z), dtype=complex) * np.ones(np.shape(z))


@dataclass(frozen=True)
class MapJet:
    f: complex
    h_prime: complex
    g_prime: complex
    omega: complex | None
    jacobian: float


def jet(m: HarmonicMap, z: complex) -> MapJet:
    z = complex(_check_disk(z))
    hp = complex(m.h_prime(z))
    gp = complex(m.g_prime(z))
    w = None if abs(hp) < OMEGA_UNDEFINED_REL * (1 + abs(gp)) else gp / hp
    return MapJet(
        f=complex(m.f(z)),
        h_prime=hp,
        g_prime=gp,
        omega=w,
        jacobian=abs(hp) ** 2 - abs(gp) ** 2,
    )


def f_theta(m: HarmonicMap, z):
    """d f(r e^{it}) / dt = i z h'(z) + conj(i z g'(z))."""
    out = m.f_theta(z)
    return complex(out) if np.ndim(z) == 0 else out


def polar_grid(r_max: float, n_radii: int, n_rays: int) -> np.ndarray:
    """Origin plus n_radii circles of n_rays points, outermost at r_max."""
    r = r_max * np.arange(1, n_radii + 1) / n_radii
    t = 2 * np.pi * np.arange(n_rays) / n_rays
    return np.concatenate([[0j], np.outer(r, np.exp(1j * t)).ravel()])


def sense_preserving_on_grid(m: HarmonicMap, r_max: float, n_radii: int = 32, n_rays: int = 128):
    """Return (J > 0 everywhere, minimal J, point where it occurs)."""
    if not 0 < r_max < 1:
        raise BadParam("r_max must lie in (0, 1)")
    pts = polar_grid(r_max, n_radii, n_rays)
    jac = m.jacobian(pts)
    i = int(np.argmin(jac))
    return bool(np.all(jac > 0)), float(jac[i]), complex(pts[i])


def gradient_energy_bound_check(m: HarmonicMap, boundary_samples: int = 1024, n_radii: int = 32,
                                n_rays: int = 128, r_boundary: float = 1 - 1e-4, phi=None,
                                tol: float = 1e-9) -> dict:
    """Compare min |h'|^2 + |g'|^2 on a grid with dist(0, boundary)^2 / 16.

    The distance is estimated from near-boundary samples, or from exact
    boundary values when a boundary function `phi` is supplied.
    """
    t = 2 * np.pi * np.arange(boundary_samples) / boundary_samples
    if phi is not None:
        edge = np.asarray(phi(t), dtype=complex)
    else:
        edge = m.f(r_boundary * np.exp(1j * t))
    i = int(np.argmin(np.abs(edge)))
    dist = float(abs(edge[i]))
    pts = polar_grid(0.99, n_radii, n_rays)
    energy = np.abs(m.h_prime(pts)) ** 2 + np.abs(m.g_prime(pts)) ** 2
    j = int(np.argmin(energy))
    margin = float(energy[j] - dist ** 2 / 16)
    return {
        "dist_estimate": dist,
        "dist_angle": float(t[i]),
        "min_energy": float(energy[j]),
        "min_energy_at": [float(pts[j].real), float(pts[j].imag)],
        "bound": dist ** 2 / 16,
        "margin": margin,
        "status": "VIOLATION" if margin < -tol else "OK",
    }


# gallery

def shear(k: float) -> CoefficientMap:
    if not 0 < k <= 1:
        raise BadParam(f"shear needs 0 < k <= 1, got {k}")
    return CoefficientMap(np.array([0, 1]), np.array([0, 0, k / 2]), label=f"shear:k={k:g}")


def _square_log(z):
    return np.log((1j + z) / (1j - z))


def square() -> ClosedFormMap:
    """f = Re F1 + i Im F2, F1 = (i/2) L, F2 = L/2, L = log((i+z)/(i-z))."""

    def h(z):
        return (0.5j + 0.5) * _square_log(z) / 2

    def g(z):
        return (0.5j - 0.5) * _square_log(z) / 2

    def dh(z):
        return (1 - 1j) / (2 * (1 + z * z))

    def dg(z):
        return (1 + 1j) / (2 * (1 + z * z))

    return ClosedFormMap(h, g, dh, dg, label="square")


def stepsquare() -> ClosedFormMap:
    """Poisson extension of the step data taking the values i^k on the
    quarter arcs centred at k pi/2; maps onto the square with vertices
    1, i, -1, -i and has dilatation z^2."""
    from .boundary import StepFunction
    from .poisson import step_extension

    q = np.pi / 4
    phi = StepFunction(np.array([q, 3 * q, 5 * q, 7 * q]), np.array([1j, -1, -1j, 1]))
    m = step_extension(phi)
    m.label = "stepsquare"
    return m


def gallery(name: str, **params) -> HarmonicMap:
    if name == "shear":
        if "k" not in params:
            raise BadParam("shear needs k")
        return shear(float(params["k"]))
    if name == "square":
        return square()
    if name == "stepsquare":
        return stepsquare()
    if name == "poly":
        return CoefficientMap(np.asarray(params.get("a", [0]), dtype=complex),
                              np.asarray(params.get("b", [0]), dtype=complex), label="poly")
    raise UnknownGallery(name)


def _parse_list(text: str) -> list:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise BadParam(f"coefficient list must be bracketed: {text}")
    body = text[1:-1].strip()
    if not body:
        return []
    try:
        return [complex(x.strip().replace(" ", "")) for x in body.split(",")]
    except ValueError as exc:
        raise BadParam(f"bad coefficient in {text}") from exc


def parse_map_spec(spec: str) -> HarmonicMap:
    """Parse the CLI map mini-language.

    shear:k=0.5 | square | stepsquare | poly:a=[...];b=[...] |
    boundary:<file.csv>:deg=256 | json:<map.json>
    Coefficient lists in `poly` are indexed by power starting at 0.
    """
    spec = spec.strip()
    if spec in ("square", "stepsquare"):
        return gallery(spec)
    if spec.startswith("shear:"):
        m = re.fullmatch(r"shear:k=([^;]+)", spec)
        if not m:
            raise BadParam(f"bad shear spec {spec!r}")
        return gallery("shear", k=float(m.group(1)))
    if spec.startswith("poly:"):
        fields = {}
        for part in spec[5:].split(";"):
            key, _, val = part.partition("=")
            if key.strip() not in ("a", "b"):
                raise BadParam(f"unknown poly field {key!r}")
            fields[key.strip()] = _parse_list(val)
        return gallery("poly", **fields)
    if spec.startswith("boundary:"):
        from .boundary import load_boundary_csv
        from .poisson import DEFAULT_DEGREE, decompose

        rest = spec[len("boundary:"):]
        deg = DEFAULT_DEGREE
        if ":deg=" in rest:
            rest, _, d = rest.rpartition(":deg=")
            deg = int(d)
        m = decompose(load_boundary_csv(rest), deg)
        m.label = spec
        return m
    if spec.startswith("json:"):
        path = Path(spec[5:])
        return CoefficientMap.from_json(json.loads(path.read_text()), label=spec)
    name = spec.split(":", 1)[0]
    raise UnknownGallery(name)
