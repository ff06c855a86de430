"""Quantum-oscillator thermodynamics over a mode density."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

import freevib as fv


def law_histogram(mu, bins=2048):
    """Exact bin masses of the analytic law packed into a histogram."""
    x1 = fv.support_endpoint(mu)
    edges = np.linspace(0.0, x1, bins + 1)
    masses = fv.reference_bin_masses(edges, lambda x: fv.analytic_density(x, mu),
                                     singular_points=[x1])
    h = fv.SpectralHistogram(0.0, x1, bins, axis="omega_sq")
    h.counts = masses
    h.n_events = 1.0
    return h


# ----------------------------------------------------------------------
# single mode

def test_mode_energy_values():
    # omega = 2, beta = 1: u = coth(1)
    assert abs(fv.mode_energy(2.0, 1.0) - 1.0 / math.tanh(1.0)) < 1e-14
    assert fv.mode_energy(0.0, 2.0) == 0.5  # classical soft mode
    assert abs(fv.mode_energy(3.0, 1e9) - 1.5) < 1e-12  # ground state
    arr = fv.mode_energy(np.array([0.0, 2.0, 1e5]), 1.0)
    assert arr.shape == (3,)
    assert abs(arr[2] - 5e4) < 1e-9  # huge y falls back to omega/2


def test_mode_specific_heat_values():
    # omega = 2, beta = 1: c_v = 1/sinh(1)^2
    assert abs(fv.mode_specific_heat(2.0, 1.0) - math.sinh(1.0) ** -2) < 1e-14
    assert fv.mode_specific_heat(0.0, 3.0) == 1.0
    assert fv.mode_specific_heat(1e4, 1.0) == 0.0
    assert abs(fv.mode_specific_heat(1.0, 1e-8) - 1.0) < 1e-12


def test_mode_specific_heat_decreases_with_beta():
    betas = np.geomspace(0.01, 50, 40)
    vals = [fv.mode_specific_heat(1.7, float(b)) for b in betas]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert all(0.0 <= v <= 1.0 for v in vals)


def test_mode_energy_respects_finite_difference():
    # c_v = -beta^2 du/dbeta, checked mode by mode
    for w, beta in ((0.5, 0.7), (2.0, 3.0), (4.0, 0.2)):
        h = 1e-5 * beta
        fd = -(beta**2) * (fv.mode_energy(w, beta + h)
                           - fv.mode_energy(w, beta - h)) / (2 * h)
        assert abs(fd - fv.mode_specific_heat(w, beta)) < 1e-8


def test_bad_inputs_rejected():
    with pytest.raises(fv.InvalidParams):
        fv.mode_energy(1.0, 0.0)
    with pytest.raises(fv.InvalidParams):
        fv.mode_energy(-1.0, 1.0)
    with pytest.raises(fv.InvalidParams):
        fv.specific_heat(1.0, "not a source")
    h = fv.SpectralHistogram(0.0, 1.0, 4, axis="omega")
    h.accumulate(np.array([0.5]))
    with pytest.raises(fv.InvalidParams):
        fv.energy_density(1.0, h)  # wrong axis: omega, not omega^2


# ----------------------------------------------------------------------
# spectral averages

def test_analytic_and_histogram_sources_agree():
    law = fv.AnalyticLaw(mu=1.0, omega0_sq=1.0).validate()
    h = law_histogram(1.0)
    for beta in (0.05, 0.5, 2.0):
        ua, uh = fv.energy_density(beta, law), fv.energy_density(beta, h)
        ca, ch = fv.specific_heat(beta, law), fv.specific_heat(beta, h)
        assert abs(ua - uh) < 2e-5 * abs(ua)
        assert abs(ca - ch) < 2e-4 * abs(ca)


def test_classical_limit():
    law = fv.AnalyticLaw(mu=0.5, omega0_sq=2.0).validate()
    beta = 1e-5
    assert abs(fv.energy_density(beta, law) * beta - 1.0) < 1e-8
    assert abs(fv.specific_heat(beta, law) - 1.0) < 1e-8


def test_ground_state_limit():
    # beta -> inf: u -> integral of (omega/2) against the mode density
    law = fv.AnalyticLaw(mu=1.0, omega0_sq=1.0).validate()
    x1 = fv.support_endpoint(1.0)
    gs = quad(lambda w: w * fv.analytic_density(w * w, 1.0) * w,
              0, math.sqrt(x1), points=[0, math.sqrt(x1)], limit=300)[0]
    assert abs(fv.energy_density(1e6, law) - gs) < 1e-7 * gs
    assert fv.specific_heat(1e6, law) < 1e-10


def test_spectral_specific_heat_finite_difference():
    law = fv.AnalyticLaw(mu=0.3, omega0_sq=1.5).validate()
    for beta in (0.2, 1.0, 5.0):
        h = 1e-4 * beta
        fd = -(beta**2) * (fv.energy_density(beta + h, law)
                           - fv.energy_density(beta - h, law)) / (2 * h)
        assert abs(fd - fv.specific_heat(beta, law)) < 1e-6


def test_thermo_curve_shapes_and_monotonicity():
    law = fv.AnalyticLaw(mu=2.0, omega0_sq=1.0).validate()
    betas = np.geomspace(1e-3, 50, 12)
    curve = fv.thermo_curve(betas, law)
    assert curve.beta.shape == curve.energy.shape == curve.heat.shape == (12,)
    assert np.all(np.diff(curve.energy) < 0)  # cooling lowers energy
    assert np.all(np.diff(curve.heat) < 0)
    assert curve.heat[0] == pytest.approx(1.0, abs=1e-5)
    with pytest.raises(fv.InvalidParams):
        fv.thermo_curve(np.array([]), law)
