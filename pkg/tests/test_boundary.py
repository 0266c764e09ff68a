import math

import numpy as np
import pytest

from harmlab.boundary import (
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
from harmlab.errors import BadParam, DegreeTooHigh, NonUniformGrid

HALVES = StepFunction([0.0, math.pi], [1, -1])


def test_eval_examples():
    assert eval_phi(ClosedForm(lambda t: np.exp(1j * t)), math.pi / 2) == pytest.approx(1j)
    assert eval_phi(HALVES, math.pi / 4) == 1
    assert eval_phi(HALVES, 4.0) == -1
    assert eval_phi(FourierCoeffs.from_dict({1: 1}), 0.0) == pytest.approx(1)


def test_step_midpoint_at_jump():
    assert eval_phi(HALVES, math.pi) == 0
    assert eval_phi(HALVES, 0.0) == 0
    assert eval_phi(HALVES, 2 * math.pi) == 0


def test_step_eval_keeps_shape():
    t = np.linspace(0.1, 6, 12).reshape(3, 4)
    assert eval_phi(HALVES, t).shape == (3, 4)


def test_uniform_samples_interpolate_trig_polynomial():
    m = 16
    t = 2 * np.pi * np.arange(m) / m
    phi = UniformSamples(np.exp(2j * t) + 0.5 * np.cos(3 * t))
    x = np.linspace(0, 2 * np.pi, 37)
    np.testing.assert_allclose(eval_phi(phi, x), np.exp(2j * x) + 0.5 * np.cos(3 * x), atol=1e-13)


@pytest.mark.parametrize("m", [4, 12, 100])
def test_uniform_samples_size(m):
    with pytest.raises(BadParam):
        UniformSamples(np.ones(m))


def test_step_jumps_must_increase():
    with pytest.raises(BadParam):
        StepFunction([1.0, 0.5], [1, 2])
    with pytest.raises(BadParam):
        StepFunction([0.0, 2 * math.pi], [1, 2])


def test_derivative_examples():
    d = phi_derivative(ClosedForm(lambda t: np.exp(1j * t)), 0.0)
    assert d.kind == "finite"
    assert abs(d.value - 1j) < 1e-8
    assert phi_derivative(HALVES, 1.0).value == 0
    assert phi_derivative(HALVES, math.pi).kind == "undefined"


def test_derivative_plus_infinity():
    d = phi_derivative(ClosedForm(lambda t: np.abs(t - math.pi) ** 0.5), math.pi)
    assert d.kind == "plus_infinity"


def test_derivative_of_kink_does_not_settle():
    d = phi_derivative(ClosedForm(lambda t: np.abs(t - 1.0)), 1.0)
    assert d.kind == "nonconvergent"


def test_fourier_derivative_termwise():
    phi = FourierCoeffs.from_dict({-2: 0.3, 1: 1j, 3: 0.25})
    t0 = 0.4
    expect = 0.3 * -2j * np.exp(-2j * t0) + 1j * 1j * np.exp(1j * t0) + 0.25 * 3j * np.exp(3j * t0)
    assert abs(phi_derivative(phi, t0).value - expect) < 1e-10


def test_coefficient_examples():
    c = fourier_coefficients(ClosedForm(lambda t: np.exp(1j * t)), 4)
    assert abs(c.c(1) - 1) < 1e-12
    assert max(abs(c.c(n)) for n in range(-4, 5) if n != 1) < 1e-12
    c = fourier_coefficients(ClosedForm(lambda t: np.exp(-1j * t)), 4)
    assert abs(c.c(-1) - 1) < 1e-12


def test_step_coefficients_exact():
    c = fourier_coefficients(HALVES, 8)
    assert abs(c.c(0)) < 1e-15
    assert abs(c.c(1) - 2 / (1j * math.pi)) < 1e-15
    assert abs(c.c(2)) < 1e-15


def test_step_coefficients_match_quadrature():
    phi = StepFunction([0.3, 2.0, 4.5], [1, 2j, -1])
    exact = fourier_coefficients(phi, 6)
    n = 1 << 20
    t = 2 * np.pi * (np.arange(n) + 0.5) / n
    v = eval_phi(phi, t)
    for k in range(-6, 7):
        assert abs(np.mean(v * np.exp(-1j * k * t)) - exact.c(k)) < 1e-5


def test_degree_too_high_for_samples():
    phi = UniformSamples(np.ones(16))
    fourier_coefficients(phi, 7)
    with pytest.raises(DegreeTooHigh):
        fourier_coefficients(phi, 8)


def test_csv_round_trip(tmp_path):
    phi = ClosedForm(lambda t: np.exp(1j * t) + 0.25 * np.exp(-2j * t))
    path = save_boundary_csv(phi, tmp_path / "phi.csv", m=64)
    back = load_boundary_csv(path)
    assert back.m == 64
    x = np.linspace(0, 6, 11)
    np.testing.assert_allclose(eval_phi(back, x), phi(x), atol=1e-13)


def test_csv_rejects_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,re,im\n0,1,0\n")
    with pytest.raises(BadParam):
        load_boundary_csv(p)


def test_csv_rejects_uneven_grid(tmp_path):
    m = 8
    lines = ["theta,re,im"] + [f"{2 * math.pi * j / m + (0.01 if j == 3 else 0)!r},1,0" for j in range(m)]
    p = tmp_path / "uneven.csv"
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(NonUniformGrid):
        load_boundary_csv(p)
