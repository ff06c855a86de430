"""In-repo Airy evaluation against two independent oracles.

Oracle 1: scipy.special.airy (totally different implementation).
Oracle 2: direct integration of y'' = x y from the origin values.
"""

import numpy as np
import pytest
import scipy.special as ssp
from scipy.integrate import solve_ivp

from freevib import OutOfWindow, airy_ai, airy_density

AI0 = 0.3550280538878172
AIP0 = -0.2588194037928068


def test_against_scipy_on_window():
    x = np.linspace(-12.0, 8.0, 4001)
    ai_ref, aip_ref, _, _ = ssp.airy(x)
    ours = np.array([airy_ai(float(t))[0] for t in x])
    assert np.max(np.abs(ours - ai_ref)) < 1e-10
    ours_d = np.array([airy_ai(float(t))[1] for t in x])
    assert np.max(np.abs(ours_d - aip_ref)) < 1e-10


def test_against_ode_integration():
    def rhs(t, y):
        return [y[1], t * y[0]]

    for t_end in (-10.0, 5.0):
        sol = solve_ivp(rhs, (0.0, t_end), [AI0, AIP0], rtol=1e-10,
                        atol=1e-13, dense_output=True)
        for t in np.linspace(0.0, t_end, 41):
            ai, aip = airy_ai(float(t))
            y = sol.sol(t)
            assert abs(ai - y[0]) < 1e-8
            assert abs(aip - y[1]) < 1e-8


def test_origin_values():
    ai, aip = airy_ai(0.0)
    assert abs(ai - AI0) < 1e-15
    assert abs(aip - AIP0) < 1e-15
    # density at the edge: Ai'(0)^2 - 0 * Ai(0)^2
    assert abs(airy_density(0.0) - AIP0**2) < 1e-15
    assert abs(airy_density(0.0) - 0.06698748377966399) < 1e-15


def test_density_formula_and_positivity():
    x = np.linspace(-11.5, 7.5, 301)
    rho = airy_density(x)
    assert rho.shape == x.shape
    ai, aip, _, _ = ssp.airy(x)
    assert np.max(np.abs(rho - (aip**2 - x * ai**2))) < 1e-10
    assert np.all(rho > 0)
    # far into the gap side the density is exponentially small
    assert airy_density(7.5) < 1e-9


def test_window_enforced():
    with pytest.raises(OutOfWindow):
        airy_ai(8.5)
    with pytest.raises(OutOfWindow):
        airy_ai(-12.5)
    with pytest.raises(OutOfWindow):
        airy_density(np.array([0.0, 9.0]))
