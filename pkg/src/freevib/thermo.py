"""Quantum thermodynamics of a mode spectrum (hbar = k_B = 1).

Each eigenfrequency omega carries an oscillator mean energy
(omega/2) coth(beta omega / 2) and specific heat
(beta omega / 2)^2 / sinh^2(beta omega / 2); spectral averages come either
from the analytic large-n law or from an accumulated squared-frequency
histogram.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import InvalidParams, QuadratureFailure
from .freeprob import AnalyticLaw, physical_density, support_endpoint
from .stats import SpectralHistogram

# beyond this, coth = 1 and 1/sinh^2 = 0 to double precision
_Y_BIG = 350.0


def mode_energy(omega, beta: float):
    """Mean thermal energy (omega/2) coth(beta omega / 2) of one mode.

    The omega -> 0 limit is the classical equipartition value 1/beta.
    """
    if beta <= 0:
        raise InvalidParams(f"beta must be > 0, got {beta}")
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise InvalidParams("omega must be >= 0")
    y = 0.5 * beta * omega
    out = np.empty_like(omega)
    small = y == 0.0
    big = y > _Y_BIG
    mid = ~small & ~big
    out[small] = 1.0 / beta
    out[big] = 0.5 * omega[big]
    out[mid] = 0.5 * omega[mid] / np.tanh(y[mid])
    return out if out.ndim else float(out)


def mode_specific_heat(omega, beta: float):
    """Per-mode specific heat (beta omega/2)^2 / sinh^2(beta omega/2), in [0, 1]."""
    if beta <= 0:
        raise InvalidParams(f"beta must be > 0, got {beta}")
    omega = np.asarray(omega, dtype=float)
    y = 0.5 * beta * omega
    out = np.zeros_like(omega)
    small = y == 0.0
    mid = ~small & (y <= _Y_BIG)
    out[small] = 1.0
    out[mid] = (y[mid] / np.sinh(y[mid])) ** 2
    return out if out.ndim else float(out)


def _integrate(fn, hi, what):
    res = quad(fn, 0.0, hi, limit=300, epsabs=1e-12, epsrel=1e-10,
               full_output=1)
    val, err = res[0], res[1]
    if len(res) > 3:   # quad appends a message on trouble
        raise QuadratureFailure(f"{what} integral did not converge: {res[3]}")
    if err > 1e-8 * max(abs(val), 1.0):
        raise QuadratureFailure(
            f"{what} integral error {err:.2e} too large for value {val:.6e}")
    return val


def energy_density(beta: float, source):
    """Mean energy per mode at inverse temperature beta.

    source is either an AnalyticLaw (integration against the large-n
    density, over omega where the integrand is smooth) or a
    SpectralHistogram of squared frequencies (bin-mass sum).
    """
    if isinstance(source, AnalyticLaw):
        source.validate()
        omega_max = math.sqrt(source.omega0_sq * support_endpoint(source.mu))

        def integrand(w):
            # density of omega is 2 w rho_H(w^2)
            return 2.0 * w * physical_density(w * w, source) * mode_energy(w, beta)

        return float(_integrate(integrand, omega_max, "energy"))
    if isinstance(source, SpectralHistogram):
        if "omega_sq" not in source.axis:
            raise InvalidParams(
                f"thermo needs a squared-frequency histogram, got axis "
                f"{source.axis!r}")
        omega = np.sqrt(np.maximum(source.centers(), 0.0))
        return float(np.sum(source.masses() * mode_energy(omega, beta)))
    raise InvalidParams(f"unsupported source {type(source).__name__}")


def specific_heat(beta: float, source):
    """Mean specific heat per mode at inverse temperature beta; -> 1 as beta -> 0."""
    if isinstance(source, AnalyticLaw):
        source.validate()
        omega_max = math.sqrt(source.omega0_sq * support_endpoint(source.mu))

        def integrand(w):
            return (2.0 * w * physical_density(w * w, source)
                    * mode_specific_heat(w, beta))

        return float(_integrate(integrand, omega_max, "specific heat"))
    if isinstance(source, SpectralHistogram):
        if "omega_sq" not in source.axis:
            raise InvalidParams(
                f"thermo needs a squared-frequency histogram, got axis "
                f"{source.axis!r}")
        omega = np.sqrt(np.maximum(source.centers(), 0.0))
        return float(np.sum(source.masses() * mode_specific_heat(omega, beta)))
    raise InvalidParams(f"unsupported source {type(source).__name__}")


@dataclass
class ThermoCurve:
    beta: np.ndarray
    energy: np.ndarray
    heat: np.ndarray


def thermo_curve(betas, source) -> ThermoCurve:
    betas = np.asarray(betas, dtype=float)
    if betas.size == 0 or np.any(betas <= 0):
        raise InvalidParams("betas must be positive and non-empty")
    u = np.array([energy_density(b, source) for b in betas])
    cv = np.array([specific_heat(b, source) for b in betas])
    return ThermoCurve(beta=betas, energy=u, heat=cv)
