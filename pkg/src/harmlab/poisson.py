"""Harmonic extension of boundary data into the disk.

`poisson_eval` applies the trapezoid rule to the Poisson integral;
`decompose` reads the analytic/co-analytic split off the Fourier
coefficients (a_n = c_n, b_n = conj(c_-n)). Step data also admits an
exact closed form through `step_extension`.
"""
from __future__ import annotations

import numpy as np

from .boundary import BoundaryFunction, StepFunction, eval_phi, fourier_coefficients
from .errors import BadParam, OutsideDisk
from .geometry import TWO_PI
from .maps import ClosedFormMap, CoefficientMap, HarmonicMap

DEFAULT_NODES = 2048
DEFAULT_DEGREE = 256


def poisson_kernel(r, t):
    return (1 - r * r) / (1 - 2 * r * np.cos(t) + r * r)


def poisson_eval(phi: BoundaryFunction, z, nodes: int = DEFAULT_NODES):
    if nodes < 64 or nodes & (nodes - 1):
        raise BadParam("nodes must be a power of two >= 64")
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(z) >= 1):
        raise OutsideDisk("Poisson integral evaluated outside the open disk")
    t = TWO_PI * np.arange(nodes) / nodes
    values = eval_phi(phi, t)
    zeta = np.exp(1j * t)
    kernel = (1 - np.abs(z[:, None]) ** 2) / np.abs(zeta[None, :] - z[:, None]) ** 2
    out = kernel @ values / nodes
    return complex(out[0]) if scalar else out


def decompose(phi: BoundaryFunction, degree: int = DEFAULT_DEGREE) -> CoefficientMap:
    if degree < 1:
        raise BadParam("degree must be >= 1")
    c = fourier_coefficients(phi, degree)
    a = np.array([c.c(n) for n in range(degree + 1)])
    b = np.array([0j] + [np.conj(c.c(-n)) for n in range(1, degree + 1)])
    return CoefficientMap(a, b, label=getattr(phi, "label", "decomposed"))


def step_extension(phi: StepFunction) -> ClosedFormMap:
    """Exact harmonic extension of step data.

    With J_j the jump at angle t_j and zeta_j = e^{i t_j}:
    h' = (1/2 pi i) sum J_j / (zeta_j - z), g' likewise with conj(J_j).
    """
    zeta = np.exp(1j * phi.jumps)
    jumps = phi.jump_sizes
    lo, hi = phi.arc_bounds()
    c0 = complex((hi - lo) @ phi.values / TWO_PI)
    k = 1 / (2j * np.pi)

    def _log_terms(z):
        z = np.asarray(z, dtype=complex)
        return -np.log(1 - np.multiply.outer(z, np.conj(zeta)))

    def _pole_terms(z):
        z = np.asarray(z, dtype=complex)
        return 1 / (zeta - z[..., None])

    def h(z):
        return c0 + k * (_log_terms(z) @ jumps)

    def g(z):
        return k * (_log_terms(z) @ np.conj(jumps))

    def dh(z):
        return k * (_pole_terms(z) @ jumps)

    def dg(z):
        return k * (_pole_terms(z) @ np.conj(jumps))

    return ClosedFormMap(h, g, dh, dg, label="step")


def boundary_residual(m: HarmonicMap, phi: BoundaryFunction, r_test: float, samples: int = 256,
                      jump_margin: float = 0.0) -> float:
    """max |f(r e^{it}) - Phi(e^{it})| over uniform angles.

    For step data, angles within `jump_margin` of a jump can be excluded.
    """
    if not 0 < r_test < 1:
        raise BadParam("r_test must lie in (0, 1)")
    t = TWO_PI * np.arange(samples) / samples
    if jump_margin > 0 and isinstance(phi, StepFunction):
        d = np.abs(np.mod(np.subtract.outer(t, phi.jumps) + np.pi, TWO_PI) - np.pi)
        t = t[np.all(d >= jump_margin, axis=1)]
    err = np.abs(m.f(r_test * np.exp(1j * t)) - eval_phi(phi, t))
    return float(np.max(err))
