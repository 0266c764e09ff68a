"""Numerical toolkit for planar harmonic maps f = h + conj(g) of the unit disk."""
from .boundary import (
    ClosedForm,
    FourierCoeffs,
    StepFunction,
    UniformSamples,
    eval_phi,
    fourier_coefficients,
    load_boundary_csv,
    phi_derivative,
    save_boundary_csv,
)
from .errors import HarmlabError
from .geometry import StolzAngle, make_approach_path, mod_pi, stolz_contains, unwrap_args
from .limits import estimate_limit, verify_hprime_bounds, verify_boundary_identity, verify_ftheta_limit
from .maps import ClosedFormMap, CoefficientMap, HarmonicMap, gallery, parse_map_spec
from .paths import PathParams, compare_branches, theta_closed_form, theta_ode
from .poisson import decompose, poisson_eval, step_extension
from .render import RenderSpec, image_grid, render_svg
from .zeros import (
    argument_principle_count,
    circle_contour,
    count_dilatation_zeros,
    grid_zero_scan,
    make_contour,
    truncated_stolz_contour,
)

__version__ = "0.1.0"
