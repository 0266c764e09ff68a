"""Non-tangential limit estimation and the boundary-identity verifiers built on it.

Verifiers measure; they never assert. Each returns an `IdentityReport`
whose residuals compare the measured left-hand side against the
right-hand formula evaluated from measured inputs.

Identity names read quantity.boundary.dilatation: `flat` means the
boundary derivative vanishes at the vertex and `sloped` means it is
finite and nonzero; `tilted` means lim arg omega != 0 and `aligned`
means it is 0. `arg_fp` is the direction of f' near the vertex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryFunction, phi_derivative
from .errors import BadParam, BranchJump, ZeroOnPath
from .geometry import (
    ApproachPath,
    StolzAngle,
    make_approach_path,
    mod_pi_distance,
    stolz_region_points,
    unwrap_args,
)
from .maps import HarmonicMap

CONVERGED = "Converged"
DIVERGED = "Diverged"
ZERO_ON_PATH = "ZeroOnPath"
INCONCLUSIVE = "Inconclusive"

ANGLE_QUANTITIES = ("arg_hp", "arg_gp", "arg_omega", "arg_fp")
QUANTITIES = ANGLE_QUANTITIES + ("log_hp", "log_gp", "abs_omega", "f_theta")

_ALIASES = {
    "arg_h'": "arg_hp", "arg_h′": "arg_hp", "log_h'": "log_hp", "log_h′": "log_hp",
    "arg_g'": "arg_gp", "arg_g′": "arg_gp", "log_g'": "log_gp", "log_g′": "log_gp",
    "arg_ω": "arg_omega", "abs_ω": "abs_omega", "arg_f'": "arg_fp", "arg_f′": "arg_fp",
    "f_θ": "f_theta",
}

IDENTITIES = (
    "log_hp.flat.tilted", "log_gp.flat.tilted", "log_hp.flat.aligned", "log_gp.flat.aligned",
    "arg_hp.sloped.tilted", "arg_gp.sloped.tilted", "arg_hp_gp.sloped.aligned",
    "log_hp.sloped.tilted", "log_gp.sloped.tilted", "log_hp.sloped.aligned", "log_gp.sloped.aligned",
    "arg_fp",
)

DEFAULT_K = (4, 30)


@dataclass
class LimitEstimate:
    quantity: str
    value: object
    tail_residual: float
    status: str
    path: ApproachPath = field(repr=False)
    trace: np.ndarray = field(repr=False, default=None)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


def _base_values(m: HarmonicMap, quantity: str, z: np.ndarray) -> np.ndarray:
    if quantity in ("arg_hp", "log_hp"):
        return m.h_prime(z)
    if quantity in ("arg_gp", "log_gp"):
        return m.g_prime(z)
    if quantity in ("arg_omega", "abs_omega"):
        return m.omega(z)
    if quantity == "arg_fp":
        return m.f_prime(z)
    return m.f_theta(z)


def _growing(mags: np.ndarray) -> bool:
    w = mags[-6:]
    return w.size == 6 and bool(np.all(np.diff(w) > 0)) and w[-1] >= 2 * w[0]


def estimate_limit(m: HarmonicMap, quantity: str, path: ApproachPath, tol: float = 1e-6) -> LimitEstimate:
    quantity = _ALIASES.get(quantity, quantity)
    if quantity not in QUANTITIES:
        raise BadParam(f"unknown quantity {quantity!r}")
    if len(path) == 0:
        raise BadParam("empty path")
    if tol <= 0:
        raise BadParam("tol must be positive")

    base = np.asarray(_base_values(m, quantity, path.points), dtype=complex)
    needs_nonzero = quantity != "abs_omega" and quantity != "f_theta"
    if not np.all(np.isfinite(base)) or (needs_nonzero and np.any(base == 0)):
        return LimitEstimate(quantity, None, math.inf, ZERO_ON_PATH, path, base)

    if quantity in ANGLE_QUANTITIES or quantity.startswith("log"):
        try:
            args = unwrap_args(base)
        except ZeroOnPath:
            return LimitEstimate(quantity, None, math.inf, ZERO_ON_PATH, path, base)
        except BranchJump:
            return LimitEstimate(quantity, None, math.inf, INCONCLUSIVE, path, base)
        trace = args if quantity in ANGLE_QUANTITIES else np.log(np.abs(base)) + 1j * args
    elif quantity == "abs_omega":
        trace = np.abs(base)
    else:
        trace = base

    tail = trace[-3:]
    if quantity in ANGLE_QUANTITIES:
        resid = max(mod_pi_distance(a, b) for i, a in enumerate(tail) for b in tail[i + 1:])
    else:
        resid = float(max(abs(a - b) for i, a in enumerate(tail) for b in tail[i + 1:]))
    value = trace[-1]
    value = float(value) if np.isrealobj(trace) else complex(value)

    if resid < tol:
        status = CONVERGED
    elif quantity not in ANGLE_QUANTITIES and _growing(np.abs(trace)):
        status = DIVERGED
    else:
        status = INCONCLUSIVE
    return LimitEstimate(quantity, value, float(resid), status, path, trace)


def _num(x):
    """JSON-ready number: complex -> [re, im], NaN/inf/None -> None."""
    if x is None:
        return None
    if isinstance(x, complex):
        if not (math.isfinite(x.real) and math.isfinite(x.imag)):
            return None
        return [x.real, x.imag]
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class IdentityReport:
    identity: str
    theta0: float
    per_slope: list
    hypothesis_ok: bool
    alpha: float | None = None
    beta: float | None = None
    lam: float | None = None
    gamma: complex | None = None
    notes: list = field(default_factory=list)
    path: dict = field(default_factory=dict)
    tol: float = 1e-6

    @property
    def converged(self) -> bool:
        return bool(self.per_slope) and all(p["status"] == CONVERGED for p in self.per_slope)

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "theta0": self.theta0,
            "alpha": _num(self.alpha),
            "beta": _num(self.beta),
            "lambda": _num(self.lam),
            "gamma": _num(self.gamma),
            "per_slope": self.per_slope,
            "hypothesis_ok": self.hypothesis_ok,
            "converged": self.converged,
            "notes": self.notes,
            "path": self.path,
            "tol": self.tol,
        }


def _resolve_stolz(theta0: float, stolz) -> StolzAngle:
    if isinstance(stolz, StolzAngle):
        s = StolzAngle(theta0, stolz.alpha)
        if abs(s.theta0 - stolz.theta0) > 1e-12:
            raise BadParam("theta0 disagrees with the Stolz angle vertex")
        return s
    return StolzAngle(theta0, float(stolz))


def _lhs_quantities(identity: str) -> tuple:
    head = identity.split(".")[0]
    return ("arg_hp", "arg_gp") if head == "arg_hp_gp" else (head,)


def _cases(identity: str) -> tuple:
    """(boundary case, dilatation case); None where the identity has none."""
    parts = identity.split(".")
    return (parts[1], parts[2]) if len(parts) == 3 else (None, None)


def _rhs(identity: str, theta0: float, alpha: float, lam: float, gamma: complex):
    """Right-hand formula exactly as stated; log claims return complex values."""
    q = math.pi / 4
    with np.errstate(divide="ignore"):
        log_lam = math.log(lam) if lam > 0 else -math.inf
        log_g = math.log(abs(gamma)) if gamma is not None and abs(gamma) > 0 else -math.inf
    table = {
        "log_hp.flat.tilted": complex(log_lam / 2, -(theta0 + alpha / 2)),
        "log_gp.flat.tilted": complex(1.5 * log_lam, alpha / 2 - theta0),
        "log_hp.flat.aligned": complex(log_lam / 2, -theta0),
        "log_gp.flat.aligned": complex(1.5 * log_lam, -theta0),
        "arg_hp.sloped.tilted": q - alpha / 2 - theta0,
        "arg_gp.sloped.tilted": q + alpha / 2 - theta0,
        "arg_hp_gp.sloped.aligned": q - theta0,
        # pi/4 sits in the real part, exactly as the formula is usually written
        "log_hp.sloped.tilted": complex(0.5 * (log_g - log_lam) + q, -theta0 - alpha / 2),
        "log_gp.sloped.tilted": complex(0.5 * (log_g + log_lam) + q, alpha / 2 - theta0),
        "log_hp.sloped.aligned": complex(0.5 * (log_g - log_lam) + q, -theta0),
        "log_gp.sloped.aligned": complex(0.5 * (log_g + log_lam) + q, -theta0),
        "arg_fp": -alpha / 2,
    }
    v = table[identity]
    if isinstance(v, complex) and not math.isfinite(v.real):
        return None
    return v


def _residual(lhs, rhs):
    """mod-pi distance for angles; |d re| + mod-pi distance of im for logs."""
    if isinstance(lhs, complex):
        return abs(lhs.real - rhs.real) + mod_pi_distance(lhs.imag, rhs.imag)
    return mod_pi_distance(lhs, rhs)


def _wrapped_abs(a: float) -> float:
    """|a| after reduction into (-pi, pi]."""
    return abs(math.remainder(a, 2 * math.pi))


def verify_boundary_identity(m: HarmonicMap, identity: str, theta0: float, stolz, slopes,
                             tol: float = 1e-6, k_range=DEFAULT_K,
                             phi: BoundaryFunction | None = None) -> IdentityReport:
    if identity not in IDENTITIES:
        raise BadParam(f"unknown identity {identity!r}")
    if not slopes:
        raise BadParam("need at least one slope")
    s = _resolve_stolz(theta0, stolz)
    hyp_tol = max(10 * tol, 1e-6)
    boundary_case, omega_case = _cases(identity)
    notes = []
    hypothesis_ok = True

    dphi = phi_derivative(phi, theta0) if phi is not None else None

    per_slope = []
    first_inputs = None
    for slope in slopes:
        path = make_approach_path(s, slope, *k_range)
        est_arg = estimate_limit(m, "arg_omega", path, tol)
        est_abs = estimate_limit(m, "abs_omega", path, tol)
        est_gam = estimate_limit(m, "f_theta", path, tol)
        lhs_est = [estimate_limit(m, q, path, tol) for q in _lhs_quantities(identity)]
        entry = {"slope": float(slope), "lhs": None, "rhs": None, "residual": None}
        inputs_ok = est_arg.converged and est_abs.converged
        if boundary_case == "sloped" or (boundary_case == "flat" and dphi is None):
            inputs_ok = inputs_ok and est_gam.converged
        alpha = est_arg.value if est_arg.converged else None
        lam = est_abs.value if est_abs.converged else None
        gamma = est_gam.value if est_gam.converged else None
        entry["alpha_measured"] = _num(alpha)
        entry["lambda_measured"] = _num(lam)
        entry["gamma_measured"] = _num(gamma)
        if first_inputs is None and inputs_ok:
            first_inputs = (alpha, lam, gamma)

        lhs_status = [e.status for e in lhs_est]
        if ZERO_ON_PATH in lhs_status:
            entry["status"] = ZERO_ON_PATH
        elif not inputs_ok:
            entry["status"] = INCONCLUSIVE
        elif DIVERGED in lhs_status:
            entry["status"] = DIVERGED
        elif all(st == CONVERGED for st in lhs_status):
            entry["status"] = CONVERGED
        else:
            entry["status"] = INCONCLUSIVE
        entry["lhs"] = [_num(e.value) for e in lhs_est] if len(lhs_est) > 1 else _num(lhs_est[0].value)
        entry["tail_residual"] = max(e.tail_residual for e in lhs_est)

        if inputs_ok:
            rhs = _rhs(identity, theta0, alpha, lam, gamma)
            entry["rhs"] = _num(rhs)
            if entry["status"] == CONVERGED and rhs is not None:
                entry["residual"] = max(_residual(e.value, rhs) for e in lhs_est)
                if not isinstance(rhs, complex):
                    entry["residual_mod_pi"] = entry["residual"]
            if identity == "arg_fp":
                hp = estimate_limit(m, "arg_hp", path, tol)
                if hp.converged:
                    aware = hp.value + np.angle(1 + lam * np.exp(-1j * (2 * hp.value + alpha)))
                    entry["lambda_aware"] = float(aware)
                    if entry["status"] == CONVERGED:
                        entry["residual_lambda_aware"] = mod_pi_distance(lhs_est[0].value, aware)
        per_slope.append(entry)

        # hypotheses, checked on every path
        if not est_arg.converged:
            hypothesis_ok = False
            notes.append(f"slope {slope:g}: arg omega has no measurable limit ({est_arg.status})")
            continue
        a = _wrapped_abs(alpha)
        if omega_case == "tilted" and a <= hyp_tol:
            hypothesis_ok = False
            notes.append(f"slope {slope:g}: case needs lim arg omega != 0, measured {alpha:.3g}")
        if omega_case == "aligned" and a > hyp_tol:
            hypothesis_ok = False
            notes.append(f"slope {slope:g}: case needs lim arg omega = 0, measured {alpha:.3g}")
        if boundary_case == "flat":
            if dphi is not None:
                zero = dphi.is_finite and abs(dphi.value) <= hyp_tol
            else:
                zero = est_gam.converged and abs(est_gam.value) <= hyp_tol
            if not zero:
                hypothesis_ok = False
                notes.append(f"slope {slope:g}: boundary derivative is not zero")
        if boundary_case == "sloped":
            if dphi is not None:
                ok = dphi.is_finite and abs(dphi.value) > hyp_tol
            else:
                ok = est_gam.converged and abs(est_gam.value) > hyp_tol
            if not ok:
                hypothesis_ok = False
                notes.append(f"slope {slope:g}: boundary derivative gamma must be finite and nonzero")

    alpha, lam, gamma = first_inputs if first_inputs else (None, None, None)
    direction = identity == "arg_fp"
    report = IdentityReport(
        identity=identity,
        theta0=float(theta0),
        per_slope=per_slope,
        hypothesis_ok=hypothesis_ok,
        alpha=None if direction else alpha,
        beta=alpha if direction else None,
        lam=lam,
        gamma=None if direction else gamma,
        notes=sorted(set(notes), key=notes.index),
        path={"stolz_alpha": s.alpha, "k_min": k_range[0], "k_max": k_range[1],
              "schedule": "delta_k = 2^-k"},
        tol=tol,
    )
    return report


LADDER = (10.0, 100.0, 1000.0)


def verify_ftheta_limit(m: HarmonicMap, phi: BoundaryFunction, theta0: float, stolz, slopes,
                        tol: float = 1e-6, k_range=DEFAULT_K) -> IdentityReport:
    """Compare the limit of f_theta with dPhi/dtheta at the vertex.

    For an infinite boundary derivative the check is that |f_theta| climbs
    past each rung of LADDER as the path tightens.
    """
    s = _resolve_stolz(theta0, stolz)
    d = phi_derivative(phi, theta0)
    per_slope = []
    notes = []
    hypothesis_ok = d.kind in ("finite", "plus_infinity")
    if not hypothesis_ok:
        notes.append(f"boundary derivative is {d.kind}")
    for slope in slopes:
        path = make_approach_path(s, slope, *k_range)
        est = estimate_limit(m, "f_theta", path, tol)
        entry = {"slope": float(slope), "lhs": _num(est.value), "rhs": d.to_json(),
                 "residual": None, "status": est.status, "tail_residual": est.tail_residual}
        if d.kind == "finite" and est.converged:
            entry["residual"] = abs(est.value - d.value)
        elif d.kind == "plus_infinity":
            mags = np.abs(est.trace)
            rung, reached = 0, []
            for k, v in zip(path.ks, mags):
                if rung < len(LADDER) and v > LADDER[rung]:
                    reached.append(k)
                    rung += 1
            entry["ladder_k"] = reached
            entry["ladder_met"] = rung == len(LADDER) and bool(mags[-1] > LADDER[-1])
            entry["lhs_magnitude"] = float(mags[-1])
        per_slope.append(entry)
    return IdentityReport(
        identity="f_theta",
        theta0=float(theta0),
        per_slope=per_slope,
        hypothesis_ok=hypothesis_ok,
        gamma=d.value if d.kind == "finite" else None,
        notes=notes + [f"boundary_derivative: {d.kind}"],
        path={"stolz_alpha": s.alpha, "k_min": k_range[0], "k_max": k_range[1],
              "schedule": "delta_k = 2^-k"},
        tol=tol,
    )


def verify_hprime_bounds(m: HarmonicMap, stolz: StolzAngle, eps: float, grid=(24, 24),
                         tol: float = 1e-6, k_range=DEFAULT_K) -> dict:
    """m/2 <= |h'| <= M/(1 - lambda) over the truncated Stolz region."""
    if not 0 < eps < 0.5:
        raise BadParam("eps must lie in (0, 0.5)")
    pts = stolz_region_points(stolz, eps, *grid)
    mags = np.abs(m.h_prime(pts))
    lo, hi = float(mags.min()), float(mags.max())
    radial = make_approach_path(stolz, 0.0, *k_range)
    lam_est = estimate_limit(m, "abs_omega", radial, tol)
    log_est = estimate_limit(m, "log_hp", radial, tol)
    flags = []
    lam = lam_est.value if lam_est.converged else None
    upper = None
    if lam is None:
        flags.append("LambdaInconclusive")
    elif lam >= 1 - 1e-12:
        flags.append("LambdaOutOfRange")
    else:
        upper = hi / (1 - lam)
    viol = int(np.sum(mags < lo / 2)) + (int(np.sum(mags > upper)) if upper is not None else 0)
    return {
        "theta0": stolz.theta0,
        "stolz_alpha": stolz.alpha,
        "eps": eps,
        "n_points": int(pts.size),
        "m": lo,
        "M": hi,
        "lambda": lam,
        "lower_bound": lo / 2,
        "upper_bound": upper,
        "violations": viol,
        "hprime_vertex": float(math.exp(log_est.value.real)) if log_est.converged else None,
        "flags": flags,
    }
