"""Boundary functions on the unit circle.

Four representations share one interface: a closed-form callable, a
finite Fourier series, uniform samples (trigonometric interpolation) and
piecewise-constant step data. Every function here accepts a scalar angle
or a numpy array of angles.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import BadParam, DegreeTooHigh, NonUniformGrid
from .geometry import TWO_PI

MIN_QUADRATURE_NODES = 2048
DERIVATIVE_TOL = 1e-8
_LADDER = np.arange(4, 21)  # difference steps h = 2^-k


class BoundaryFunction:
    """Common base; see the concrete subclasses below."""

    def __call__(self, theta):
        return eval_phi(self, theta)


@dataclass(frozen=True)
class ClosedForm(BoundaryFunction):
    # must accept numpy arrays
    fn: Callable
    label: str = "closed-form"


@dataclass(frozen=True, eq=False)
class FourierCoeffs(BoundaryFunction):
    """Coefficients c_n for -N <= n <= N stored at index n + N."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size < 3 or c.size % 2 == 0:
            raise BadParam("FourierCoeffs needs 2N+1 entries with N >= 1")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_max(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def c(self, n: int) -> complex:
        if abs(n) > self.n_max:
            return 0j
        return complex(self.coeffs[n + self.n_max])

    @classmethod
    def from_dict(cls, terms: dict, n_max: int | None = None) -> "FourierCoeffs":
        n = max(1, max(abs(k) for k in terms)) if n_max is None else n_max
        c = np.zeros(2 * n + 1, dtype=complex)
        for k, v in terms.items():
            c[k + n] = v
        return cls(c)


@dataclass(frozen=True, eq=False)
class UniformSamples(BoundaryFunction):
    """Values at theta_j = 2 pi j / M, M a power of two, M >= 8."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).ravel()
        m = v.size
        if m < 8 or m & (m - 1):
            raise BadParam(f"sample count must be a power of two >= 8, got {m}")
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.size

    def interpolant(self) -> FourierCoeffs:
        """Trigonometric interpolant, with the Nyquist term split evenly."""
        m = self.m
        half = m // 2
        raw = np.fft.fft(self.values) / m
        c = np.zeros(2 * half + 1, dtype=complex)
        for n in range(-half + 1, half):
            c[n + half] = raw[n % m]
        c[0] = c[-1] = raw[half] / 2
        return FourierCoeffs(c)


@dataclass(frozen=True, eq=False)
class StepFunction(BoundaryFunction):
    """Constant values on arcs [jumps[k], jumps[k+1]); the last arc wraps past 2 pi."""

    jumps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        j = np.asarray(self.jumps, dtype=float).ravel()
        v = np.asarray(self.values, dtype=complex).ravel()
        if j.size < 1 or j.size != v.size:
            raise BadParam("need one value per arc and at least one jump")
        if np.any(j < 0) or np.any(j >= TWO_PI) or np.any(np.diff(j) <= 0):
            raise BadParam("jump angles must be strictly increasing in [0, 2pi)")
        object.__setattr__(self, "jumps", j)
        object.__setattr__(self, "values", v)

    @property
    def jump_sizes(self) -> np.ndarray:
        """Value after minus value before, at each jump angle."""
        return self.values - np.roll(self.values, 1)

    def arc_bounds(self):
        return self.jumps, np.append(self.jumps[1:], self.jumps[0] + TWO_PI)


@dataclass(frozen=True)
class BoundaryDerivative:
    """dPhi/dtheta at a point.

    kind is one of "finite", "plus_infinity", "undefined", "nonconvergent";
    components holds the same classification for the real and imaginary parts.
    """

    kind: str
    value: complex | None = None
    components: tuple = ()

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def to_json(self):
        if self.value is None:
            return self.kind
        return [self.value.real, self.value.imag]


def _series(c: FourierCoeffs, theta, derivative: bool = False):
    theta = np.asarray(theta, dtype=float)
    n = c.orders
    weights = c.coeffs * (1j * n if derivative else 1.0)
    out = np.exp(1j * np.multiply.outer(theta, n)) @ weights
    return out


def eval_phi(phi: BoundaryFunction, theta):
    scalar = np.ndim(theta) == 0
    theta = np.asarray(theta, dtype=float)
    if isinstance(phi, ClosedForm):
        out = np.asarray(phi.fn(theta), dtype=complex) * np.ones_like(theta)
    elif isinstance(phi, FourierCoeffs):
        out = _series(phi, theta)
    elif isinstance(phi, UniformSamples):
        out = _series(phi.interpolant(), theta)
    elif isinstance(phi, StepFunction):
        out = _eval_step(phi, theta)
    else:
        raise TypeError(f"not a boundary function: {phi!r}")
    return complex(out) if scalar else out


def _eval_step(phi: StepFunction, theta, atol: float = 1e-12):
    shape = np.shape(theta)
    t = np.mod(np.ravel(theta), TWO_PI)
    idx = np.searchsorted(phi.jumps, t, side="right") - 1  # -1 wraps to the last arc
    out = phi.values[idx].astype(complex)
    # midpoint convention exactly at a jump
    d = np.abs(np.mod(np.subtract.outer(t, phi.jumps) + math.pi, TWO_PI) - math.pi)
    rows, cols = np.nonzero(d < atol)
    if rows.size:
        before = np.roll(phi.values, 1)
        out[rows] = 0.5 * (phi.values[cols] + before[cols])
    return out.reshape(shape)


def _classify_component(u: Callable, theta0: float, tol: float):
    """Return (kind, value) for one real component."""
    h = np.ldexp(1.0, -_LADDER)
    u0 = u(np.array([theta0]))[0]
    up = u(theta0 + h)
    um = u(theta0 - h)
    fwd = (up - u0) / h
    bwd = (u0 - um) / h
    central = (up - um) / (2 * h)
    rich = (4 * central[1:] - central[:-1]) / 3

    for q in (fwd, bwd):
        tail = q[-8:]
        if np.all(np.diff(tail) > 0) and tail[-1] > 0:
            growth = np.mean(np.log2(tail[1:] / tail[:-1])) if np.all(tail > 0) else 0.0
            if tail[-1] > 1 / tol or growth >= 0.25:
                return "plus_infinity", None

    diffs = np.abs(np.diff(rich))
    best = int(np.argmin(diffs)) + 1
    value = float(rich[best])
    scale = 1.0 + abs(value)
    settled = diffs[best - 1] <= 1e-6 * scale
    one_sided_ok = abs(fwd[-1] - value) <= 1e-3 * scale and abs(bwd[-1] - value) <= 1e-3 * scale
    if settled and one_sided_ok:
        return "finite", value
    return "nonconvergent", None


def phi_derivative(phi: BoundaryFunction, theta0: float, tol: float = DERIVATIVE_TOL) -> BoundaryDerivative:
    """Derivative of the boundary data in theta, componentwise for re/im."""
    if isinstance(phi, StepFunction):
        d = np.abs(np.mod(theta0 - phi.jumps + math.pi, TWO_PI) - math.pi)
        if np.any(d < 1e-12):
            return BoundaryDerivative("undefined", None, ("undefined", "undefined"))
        return BoundaryDerivative("finite", 0j, ("finite", "finite"))
    if isinstance(phi, FourierCoeffs):
        return BoundaryDerivative("finite", complex(_series(phi, theta0, derivative=True)), ("finite", "finite"))
    if isinstance(phi, UniformSamples):
        v = _series(phi.interpolant(), theta0, derivative=True)
        return BoundaryDerivative("finite", complex(v), ("finite", "finite"))

    def re(t):
        return np.real(eval_phi(phi, t))

    def im(t):
        return np.imag(eval_phi(phi, t))

    (kr, vr), (ki, vi) = _classify_component(re, theta0, tol), _classify_component(im, theta0, tol)
    kinds = (kr, ki)
    if "plus_infinity" in kinds:
        return BoundaryDerivative("plus_infinity", None, kinds)
    if "nonconvergent" in kinds:
        return BoundaryDerivative("nonconvergent", None, kinds)
    return BoundaryDerivative("finite", complex(vr, vi), kinds)


def fourier_coefficients(phi: BoundaryFunction, n_max: int) -> FourierCoeffs:
    if n_max < 1:
        raise BadParam("n_max must be >= 1")
    if isinstance(phi, FourierCoeffs):
        c = np.zeros(2 * n_max + 1, dtype=complex)
        for n in range(-min(n_max, phi.n_max), min(n_max, phi.n_max) + 1):
            c[n + n_max] = phi.c(n)
        return FourierCoeffs(c)
    if isinstance(phi, StepFunction):
        return _step_coefficients(phi, n_max)
    if isinstance(phi, UniformSamples):
        if 2 * n_max + 1 > phi.m:
            raise DegreeTooHigh(f"{phi.m} samples cannot resolve degree {n_max}")
        samples, m = phi.values, phi.m
    else:
        m = max(MIN_QUADRATURE_NODES, 4 * n_max)
        samples = eval_phi(phi, TWO_PI * np.arange(m) / m)
    raw = np.fft.fft(samples) / m
    n = np.arange(-n_max, n_max + 1)
    return FourierCoeffs(raw[n % m])


def _step_coefficients(phi: StepFunction, n_max: int) -> FourierCoeffs:
    lo, hi = phi.arc_bounds()
    n = np.arange(-n_max, n_max + 1)
    c = np.empty(n.size, dtype=complex)
    nz = n != 0
    nn = n[nz][:, None]
    c[nz] = ((np.exp(-1j * nn * lo) - np.exp(-1j * nn * hi)) / (1j * nn)) @ phi.values / TWO_PI
    c[~nz] = (hi - lo) @ phi.values / TWO_PI
    return FourierCoeffs(c)


def load_boundary_csv(path, spacing_tol: float = 1e-9) -> UniformSamples:
    """Read `theta,re,im` rows on the uniform grid theta_j = 2 pi j / M."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["theta", "re", "im"]:
            raise BadParam(f"expected header theta,re,im, got {','.join(header)}")
        rows = [[float(x) for x in row] for row in reader if row]
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != 3:
        raise BadParam("each row needs exactly three columns")
    m = data.shape[0]
    expected = TWO_PI * np.arange(m) / m
    if np.max(np.abs(data[:, 0] - expected)) > spacing_tol:
        raise NonUniformGrid(f"angles deviate from the uniform grid 2*pi*j/{m}")
    return UniformSamples(data[:, 1] + 1j * data[:, 2])


def save_boundary_csv(phi: BoundaryFunction, path, m: int = 1024) -> Path:
    theta = TWO_PI * np.arange(m) / m
    values = eval_phi(phi, theta)
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "re", "im"])
        for t, v in zip(theta, values):
            w.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])
    return path
