"""Constant-argument paths z(r) = r e^{i theta(r)}.

theta solves theta'(r) = -tan(phi(r) + theta(r)) / r, where phi = arg(f'/f).
Two closed-form branches exist: one from the small-angle model with
phi(r) = theta0 + a/r (branch "const"), and the exact solution
sin(phi + theta) r = c for constant phi (branch "general").
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ArcsinDomain, BadParam, TanBlowup

ARG_FPRIME_CONSTANT = "const"
GENERAL = "general"
TAN_MARGIN = 0.1


@dataclass(frozen=True)
class PathParams:
    a: float = 0.0
    c: float = 0.0
    theta0: float = 0.0
    phi: float | Callable = 0.0
    branch: str = ARG_FPRIME_CONSTANT

    def __post_init__(self):
        if self.branch not in (ARG_FPRIME_CONSTANT, GENERAL):
            raise BadParam(f"unknown branch {self.branch!r}")

    def phi_at(self, r):
        return self.phi(r) if callable(self.phi) else self.phi + 0 * np.asarray(r, dtype=float)

    def driver(self) -> Callable:
        """phi(r) fed to the ODE for this branch."""
        if self.branch == ARG_FPRIME_CONSTANT:
            return lambda r: self.theta0 + self.a / r
        return self.phi_at


def theta_closed_form(p: PathParams, r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise BadParam("r must be positive")
    if p.branch == ARG_FPRIME_CONSTANT:
        out = -p.a * (np.log(r) + 1) / r + p.c / r - p.theta0
    else:
        ratio = p.c / r
        if np.any(np.abs(ratio) > 1):
            raise ArcsinDomain(f"|c/r| > 1 for c = {p.c}")
        out = -p.phi_at(r) + np.arcsin(ratio)
    return float(out) if out.ndim == 0 else out


def theta_ode(phi_of_r: Callable, theta_init: float, r_start: float, r_end: float, steps: int):
    """Fixed-step RK4 from r_start to r_end; returns (r, theta) arrays of length steps + 1."""
    if not (0 < r_start < 1 and 0 < r_end < 1):
        raise BadParam("r_start and r_end must lie in (0, 1)")
    if steps < 1:
        raise BadParam("steps must be >= 1")
    limit = math.pi / 2 - TAN_MARGIN

    def rhs(r, th):
        psi = phi_of_r(r) + th
        if abs(psi) >= limit:
            raise TanBlowup(f"|phi + theta| = {abs(psi):.4f} reached the tangent margin at r = {r:.6g}")
        return -math.tan(psi) / r

    h = (r_end - r_start) / steps
    rs = r_start + h * np.arange(steps + 1)
    rs[-1] = r_end
    th = np.empty(steps + 1)
    th[0] = theta_init
    y = float(theta_init)
    for i in range(steps):
        r = rs[i]
        k1 = rhs(r, y)
        k2 = rhs(r + h / 2, y + h * k1 / 2)
        k3 = rhs(r + h / 2, y + h * k2 / 2)
        k4 = rhs(r + h, y + h * k3)
        y = y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        th[i + 1] = y
    rhs(rs[-1], y)
    return rs, th


def compare_branches(p: PathParams, r_range, steps: int = 1000) -> dict:
    """Integrate the exact ODE from the closed form's starting value and
    measure how far the closed form drifts.

    smallangle_bound = (tan m - m) |r1 - r0| / min(r0, r1) with m = max|phi + theta|;
    tan m - m has leading term m^3/3, the series remainder dropped by the
    small-angle model.
    """
    r0, r1 = map(float, r_range)
    closed_path = theta_closed_form(p, np.linspace(r0, r1, steps + 1))
    phi = p.driver()
    rs, th = theta_ode(phi, float(closed_path[0]), r0, r1, steps)
    closed = theta_closed_form(p, rs)
    _, th_half = theta_ode(phi, float(closed[0]), r0, r1, 2 * steps)
    integrator_error = float(np.max(np.abs(th - th_half[::2]))) * 16 / 15
    deviation = float(np.max(np.abs(th - closed)))
    psi = np.concatenate([np.asarray(phi(rs)) + th, np.asarray(phi(rs)) + closed])
    m = float(np.max(np.abs(psi)))
    bound = (math.tan(m) - m) * abs(r1 - r0) / min(r0, r1)
    flags = []
    if deviation > 10 * max(integrator_error, 1e-14):
        flags.append("ModelErrorDominant")
    return {
        "branch": p.branch,
        "r_range": [r0, r1],
        "steps": steps,
        "max_abs_deviation": deviation,
        "max_abs_psi": m,
        "smallangle_leading": m ** 3 / 3,
        "smallangle_bound": bound,
        "integrator_error": integrator_error,
        "flags": flags,
    }
