"""Large-n analytic machinery for the random pencil spectrum.

The squared-frequency density of H = M^-1 K is governed by a cubic equation
in the rescaled variables x = omega^2 / omega0^2 and mu = m0 / sigma_M^2,
with omega0^2 = (sigma_K / sigma_M)^2. This module carries the reference
resolvents and densities of the two factors, their S-transforms, the cubic,
its support endpoint x1(mu), and the closed-form density, plus a root-tracking
evaluator for the resolvent off the real axis.

Conventions: resolvents G(z) are analytic off the support, G ~ 1/z at large
|z|, and on the real support the principal branch returns the boundary value
from above the axis, so Im G = -pi * density there.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchAmbiguity, InvalidParams

# Below this the support endpoint overflows toward infinity and the cubic
# degenerates to a quadratic; rejected rather than approximated.
MU_MIN = 1e-8

_SQRT3 = math.sqrt(3.0)
_CBRT2 = 2.0 ** (1.0 / 3.0)


@dataclass
class AnalyticLaw:
    """Dimensionless parameters of the limiting spectral law.

    mu = m0 / sigma_M^2, omega0_sq = (sigma_K / sigma_M)^2. Everything about
    the large-n density follows from these two numbers.
    """

    mu: float
    omega0_sq: float

    def validate(self):
        if not (self.mu >= MU_MIN):
            raise InvalidParams(f"mu must be >= {MU_MIN:g}, got {self.mu}")
        if not (self.omega0_sq > 0):
            raise InvalidParams(f"omega0_sq must be > 0, got {self.omega0_sq}")
        return self


def scale_map(m0: float, sigma_M: float, sigma_K: float) -> AnalyticLaw:
    """Reduce ensemble scales to (mu, omega0_sq)."""
    if m0 <= 0 or sigma_M <= 0 or sigma_K <= 0:
        raise InvalidParams("m0, sigma_M, sigma_K must all be > 0")
    return AnalyticLaw(mu=m0 / sigma_M**2, omega0_sq=(sigma_K / sigma_M) ** 2).validate()


# ----------------------------------------------------------------------
# reference laws of the two factors

def mp_resolvent(z, sigma: float):
    """Resolvent of C^dag C: (1 - sqrt(1 - 4 sigma^2 / z)) / (2 sigma^2)."""
    if sigma <= 0:
        raise InvalidParams(f"sigma must be > 0, got {sigma}")
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise InvalidParams("resolvent pole at z = 0")
    out = (1.0 - np.sqrt(1.0 - 4.0 * sigma**2 / z)) / (2.0 * sigma**2)
    return out if out.ndim else complex(out)


def mp_density(x, sigma: float):
    """Density sqrt((4 sigma^2 - x)/x) / (2 pi sigma^2) on (0, 4 sigma^2).

    Returns 0 outside the open support (including at both endpoints).
    """
    if sigma <= 0:
        raise InvalidParams(f"sigma must be > 0, got {sigma}")
    x = np.asarray(x, dtype=float)
    hi = 4.0 * sigma**2
    inside = (x > 0.0) & (x < hi)
    out = np.zeros_like(x)
    xv = x[inside]
    out[inside] = np.sqrt((hi - xv) / xv) / (2.0 * np.pi * sigma**2)
    return out if out.ndim else float(out)


def inverse_mass_first_moment(m0: float, sigma_M: float) -> float:
    """First moment of M^-1: (sqrt(1 + 4 sigma_M^2/m0) - 1) / (2 sigma_M^2)."""
    return (math.sqrt(1.0 + 4.0 * sigma_M**2 / m0) - 1.0) / (2.0 * sigma_M**2)


def inv_mass_resolvent(z, m0: float, sigma_M: float):
    """Resolvent of M^-1 for M = C^dag C + m0.

    G(z) = 1/z - 1/(2 s^2 z^2) + sqrt((1 - (m0 + 4 s^2) z)/(1 - m0 z))
           / (2 s^2 z^2),      s = sigma_M.
    """
    if m0 <= 0 or sigma_M <= 0:
        raise InvalidParams("m0 and sigma_M must be > 0")
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise InvalidParams("resolvent pole at z = 0")
    s2 = sigma_M**2
    ratio = (1.0 - (m0 + 4.0 * s2) * z) / (1.0 - m0 * z)
    out = 1.0 / z - 1.0 / (2.0 * s2 * z**2) + np.sqrt(ratio) / (2.0 * s2 * z**2)
    return out if out.ndim else complex(out)


def inv_mass_density(x, m0: float, sigma_M: float):
    """Density of M^-1 on ((m0 + 4 sigma_M^2)^-1, m0^-1), 0 outside."""
    if m0 <= 0 or sigma_M <= 0:
        raise InvalidParams("m0 and sigma_M must be > 0")
    x = np.asarray(x, dtype=float)
    s2 = sigma_M**2
    lo = 1.0 / (m0 + 4.0 * s2)
    hi = 1.0 / m0
    inside = (x > lo) & (x < hi)
    out = np.zeros_like(x)
    xv = x[inside]
    pref = math.sqrt(1.0 + 4.0 * s2 / m0) / (2.0 * np.pi * s2)
    out[inside] = pref / xv**2 * np.sqrt((xv - lo) / (hi - xv))
    return out if out.ndim else float(out)


# ----------------------------------------------------------------------
# S-transforms and the cubic

def s_transforms(u, m0: float, sigma_M: float, sigma_K: float):
    """S-transforms (S_K, S_Minv) of the two factors at u.

    S_K(u) = 1 / (sigma_K^2 (u+1));
    S_Minv(u) = (sigma_M^2/2) [mu - u + sqrt((u + mu)^2 + 4 mu)],
    with mu = m0 / sigma_M^2 and the positive square root.
    """
    if m0 <= 0 or sigma_M <= 0 or sigma_K <= 0:
        raise InvalidParams("m0, sigma_M, sigma_K must all be > 0")
    u = np.asarray(u, dtype=float)
    mu = m0 / sigma_M**2
    s_k = 1.0 / (sigma_K**2 * (u + 1.0))
    s_minv = 0.5 * sigma_M**2 * (mu - u + np.sqrt((u + mu) ** 2 + 4.0 * mu))
    if u.ndim:
        return s_k, s_minv
    return float(s_k), float(s_minv)


def chi_H(u, m0: float, sigma_M: float, sigma_K: float):
    """Moment-series inverse for the product law (multiplicative convolution).

    chi_H(u) = S_K(u) S_Minv(u) u/(u+1)
             = (sigma_M^2 / (2 sigma_K^2)) * u/(u+1)^2
               * [mu - u + sqrt((u + mu)^2 + 4 mu)].
    """
    s_k, s_minv = s_transforms(u, m0, sigma_M, sigma_K)
    u = np.asarray(u, dtype=float)
    out = s_k * s_minv * u / (u + 1.0)
    return out if out.ndim else float(out)


@dataclass
class CubicCoeffs:
    """Coefficients (c3, c2, c1, c0) of the rescaled resolvent cubic at (zeta, mu):

    (zeta + zeta^2) G^3 - [(2+mu) zeta + mu zeta^2] G^2
        + (1 + mu + 2 mu zeta) G - mu = 0
    """

    c3: complex
    c2: complex
    c1: complex
    c0: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c3, self.c2, self.c1, self.c0])

    def eval(self, g):
        return ((self.c3 * g + self.c2) * g + self.c1) * g + self.c0


def cubic_coeffs(zeta, mu: float) -> CubicCoeffs:
    if mu <= 0:
        raise InvalidParams(f"mu must be > 0, got {mu}")
    zeta = complex(zeta)
    return CubicCoeffs(
        c3=zeta + zeta**2,
        c2=-((2.0 + mu) * zeta + mu * zeta**2),
        c1=1.0 + mu + 2.0 * mu * zeta,
        c0=-mu,
    )


def _p3_coeffs(mu: float) -> np.ndarray:
    """Cubic factor of the discriminant: disc(zeta -> cubic) = x * p3(x)."""
    return np.array([
        (mu + 4.0) * mu**3,
        2.0 * mu**2 * (mu**2 + 2.0 * mu - 6.0),
        (mu**3 - 4.0 * mu**2 - 20.0 * mu + 12.0) * mu,
        -4.0 * (mu + 1.0) ** 3,
    ])


def p3(x, mu: float):
    """The endpoint cubic; its unique real root is the support edge x1."""
    c = _p3_coeffs(mu)
    x = np.asarray(x, dtype=float)
    out = ((c[0] * x + c[1]) * x + c[2]) * x + c[3]
    return out if out.ndim else float(out)


def discriminant(x, mu: float):
    """Discriminant Delta(x) = x * p3(x) of the cubic along real zeta = x.

    Negative exactly where the cubic has a complex-conjugate pair, i.e. on
    the open support (0, x1).
    """
    x = np.asarray(x, dtype=float)
    out = x * p3(x, mu)
    return out if out.ndim else float(out)


def support_endpoint(mu: float) -> float:
    """Upper support edge x1(mu), the unique real root of p3.

    Closed form via real cube roots; post-verified against p3 itself and the
    discriminant sign on interior probe points.
    """
    if not (mu >= MU_MIN):
        raise InvalidParams(f"mu must be >= {MU_MIN:g}, got {mu}")
    xi1 = 2.0 * mu**7 * (mu**5 + 24.0 * mu**4 + 264.0 * mu**3
                         + 1574.0 * mu**2 + 4806.0 * mu + 5832.0)
    delta1 = 432.0 * mu**14 * (mu + 4.0) ** 2 * (mu**2 + 10.0 * mu + 27.0) ** 3
    rt = math.sqrt(delta1)
    core = np.cbrt(xi1 + rt) + np.cbrt(xi1 - rt)
    x1 = (-2.0 * mu**2 * (mu**2 + 2.0 * mu - 6.0) + core / _CBRT2) \
        / (3.0 * mu**3 * (mu + 4.0))
    # sanity: root of p3, and complex pair strictly inside
    scale = float(np.max(np.abs(_p3_coeffs(mu))) * max(x1, 1.0) ** 3)
    if not abs(p3(x1, mu)) <= 1e-8 * scale:
        raise InvalidParams(f"endpoint residual too large at mu={mu}")
    probes = x1 * np.array([0.25, 0.5, 0.75])
    if not np.all(discriminant(probes, mu) < 0):
        raise InvalidParams(f"discriminant not negative inside support at mu={mu}")
    return float(x1)


# ----------------------------------------------------------------------
# densities

def analytic_density(x, mu: float):
    """Closed-form density of the rescaled law on (0, x1), 0 outside.

    rho(x) = [cbrt((xi + delta)/2) - chi / cbrt((xi + delta)/2)]
             / (2 sqrt(3) pi x (x+1))
    with xi, delta, chi polynomial in (x, mu) and delta the positive square
    root of -27 * discriminant. Within 1e-12 * x1 of the edge the value is
    defined as 0 to sidestep catastrophic cancellation.
    """
    x1 = support_endpoint(mu)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    inside = (x > 0.0) & (x < x1 * (1.0 - 1e-12))
    if np.any(inside):
        xv = x[inside]
        xi = -xv**2 * (2.0 * mu**3 * xv**4
                       + 6.0 * mu**2 * (mu - 1.0) * xv**3
                       + 3.0 * mu * (2.0 * mu**2 - 7.0 * mu + 2.0) * xv**2
                       + 2.0 * (mu**3 - 12.0 * mu**2 + 3.0 * mu - 1.0) * xv
                       - 9.0 * (mu**2 + 2.0))
        delta = xv * (xv + 1.0) * np.sqrt(np.maximum(-27.0 * discriminant(xv, mu), 0.0))
        chi = (mu**2 * xv**4 + 2.0 * mu * (mu - 1.0) * xv**3
               + (mu**2 - 5.0 * mu + 1.0) * xv**2 - 3.0 * (mu + 1.0) * xv)
        a = np.cbrt(0.5 * (xi + delta))
        out[inside] = (a - chi / a) / (2.0 * _SQRT3 * np.pi * xv * (xv + 1.0))
    return float(out[0]) if scalar else out


def physical_density(omega_sq, law: AnalyticLaw):
    """Density in physical units: rho(omega^2) = rho(omega^2/omega0^2; mu) / omega0^2."""
    law.validate()
    omega_sq = np.asarray(omega_sq, dtype=float)
    return analytic_density(omega_sq / law.omega0_sq, law.mu) / law.omega0_sq


def density_via_roots(x, mu: float):
    """Density from the cubic's complex root directly (cross-check path).

    Solves the cubic at real zeta = x via the companion matrix and takes
    (1/pi) * the positive imaginary part. Independent of the closed form
    except for sharing the coefficients.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    for i, xv in enumerate(x):
        if xv <= 0:
            continue
        roots = np.roots(cubic_coeffs(xv, mu).as_array())
        im = roots.imag.max()
        out[i] = im / np.pi if im > 0 else 0.0
    return float(out[0]) if scalar else out


def sqrt_x_density_limit(mu: float) -> float:
    """The constant c in rho(x) ~ c / sqrt(x) as x -> 0, numerically.

    sqrt(x) * rho(x) = c + O(x); linear extrapolation from two small-x
    evaluations removes the O(x) term.
    """
    x1 = support_endpoint(mu)
    xa, xb = 1e-8 * x1, 2e-8 * x1
    ga = math.sqrt(xa) * analytic_density(xa, mu)
    gb = math.sqrt(xb) * analytic_density(xb, mu)
    return float(2.0 * ga - gb)


def edge_scale(mu: float) -> float:
    """Pilot edge-rescaling parameter r(mu) from the edge slope.

    Near the upper edge rho ~ C sqrt(x1 - x). Matching that to the Airy
    density's own asymptotics sqrt(eta)/pi under the rescaling
    eta = (x - x1) / (r n^-2/3) fixes r = (pi C)^(-2/3), n-independent.
    The slope C is extracted from the closed form with Richardson
    extrapolation toward the edge.
    """
    x1 = support_endpoint(mu)
    eps = 1e-5
    f1 = analytic_density(x1 * (1.0 - eps), mu) / math.sqrt(x1 * eps)
    f2 = analytic_density(x1 * (1.0 - 2.0 * eps), mu) / math.sqrt(x1 * 2.0 * eps)
    c_edge = 2.0 * f1 - f2
    if c_edge <= 0:
        raise InvalidParams(f"edge slope extraction failed at mu={mu}")
    return float((np.pi * c_edge) ** (-2.0 / 3.0))


# ----------------------------------------------------------------------
# resolvent off the support

def free_moments(mu: float):
    """First two moments (m1, m2) of the rescaled law, from the cubic.

    Substituting Gamma = 1/z + m1/z^2 + m2/z^3 + ... into the cubic and
    collecting orders gives mu m1^2 + mu m1 - 1 = 0 (the physical branch
    takes the positive root) and m2 = m1 ((1-mu) m1 + 3) / (mu (1 + 2 m1)).
    """
    if mu <= 0:
        raise InvalidParams(f"mu must be > 0, got {mu}")
    m1 = 0.5 * (math.sqrt(1.0 + 4.0 / mu) - 1.0)
    m2 = m1 * ((1.0 - mu) * m1 + 3.0) / (mu * (1.0 + 2.0 * m1))
    return m1, m2


def _dgamma_dzeta(gamma: complex, zeta: complex, mu: float) -> complex:
    """Implicit derivative of the cubic root: dG/dz = -F_z / F_G."""
    f_g = (3.0 * (zeta + zeta**2) * gamma**2
           - 2.0 * ((2.0 + mu) * zeta + mu * zeta**2) * gamma
           + (1.0 + mu + 2.0 * mu * zeta))
    f_z = ((1.0 + 2.0 * zeta) * gamma**3
           - ((2.0 + mu) + 2.0 * mu * zeta) * gamma**2
           + 2.0 * mu * gamma)
    if abs(f_g) < 1e-14 * max(abs(f_z), 1.0):
        return 0.0
    return -f_z / f_g


_TRACK_BUDGET = 500


def resolvent_H(zeta, mu: float):
    """The physical root Gamma(zeta) of the cubic, continuous to 1/zeta at infinity.

    At large |zeta| the two subleading roots of the cubic both behave like
    1/zeta and separate only at the next order, with gap
    sqrt(1 + 4/mu)/zeta^2, so the branch is pinned there by the three-term
    moment expansion 1/z + m1/z^2 + m2/z^3: beyond a radius where the
    expansion error sits far below that gap, the nearest root to the
    expansion is the physical one. Below that radius the root is tracked
    inward along the ray through zeta with an adaptive predictor from the
    implicit derivative; a step counts as trusted only when the matched root
    is much closer to the prediction than any other root AND a trapezoidal
    re-integration of the step agrees. Root collisions (the support edge
    seen from a near-real ray) are crossed by the half-plane rule: the
    resolvent of a real measure maps the upper half-plane into the lower
    one, which picks one member of the colliding pair. Raises
    BranchAmbiguity on the support segment [0, x1] of the real axis, or when
    no rule separates the roots (e.g. real evaluation points within roughly
    1e-6 of the edge); boundary values on the support are the closed-form
    density's job.
    """
    if not (mu >= MU_MIN):
        raise InvalidParams(f"mu must be >= {MU_MIN:g}, got {mu}")
    zeta = complex(zeta)
    x1 = support_endpoint(mu)
    if zeta.imag == 0.0 and -1e-300 <= zeta.real <= x1:
        raise BranchAmbiguity(
            f"zeta = {zeta} lies on the support [0, {x1:.6g}]; "
            "perturb off the real axis")
    im_sign = float(np.sign(zeta.imag))
    m1, m2 = free_moments(mu)

    def herglotz_bad(g):
        return im_sign != 0.0 and g.imag * im_sign > 1e-9 * (1.0 + abs(g))

    # moment bound m3 <= x1^3 keeps the seed error under 5% of the pair gap
    # at this radius
    r_seed = max(30.0, math.sqrt(20.0 * x1**3 / math.sqrt(1.0 + 4.0 / mu)))

    z0 = zeta if abs(zeta) >= r_seed else zeta * (r_seed / abs(zeta))
    pred = 1.0 / z0 + m1 / z0**2 + m2 / z0**3
    roots = np.roots(cubic_coeffs(z0, mu).as_array())
    dist = np.abs(roots - pred)
    order = np.argsort(dist)
    gamma = complex(roots[order[0]])
    if dist[order[1]] < 4.0 * dist[order[0]] or herglotz_bad(gamma):
        raise BranchAmbiguity(
            f"branch identification failed at zeta = {z0} (mu = {mu})")

    z_cur = z0
    frac = 0.7    # per-step radial shrink toward the target
    budget = _TRACK_BUDGET
    while abs(z_cur) > abs(zeta) * (1.0 + 1e-15):
        budget -= 1
        if budget <= 0:
            raise BranchAmbiguity(
                f"root tracking exhausted near zeta = {z_cur} (mu = {mu}); "
                "evaluation too close to the support or its edge")
        r_next = max(abs(zeta), frac * abs(z_cur))
        z_next = zeta * (r_next / abs(zeta))
        dz = z_next - z_cur
        slope = _dgamma_dzeta(gamma, z_cur, mu)
        pred = gamma + slope * dz
        roots = np.roots(cubic_coeffs(z_next, mu).as_array())
        dist = np.abs(roots - pred)
        order = np.argsort(dist)
        cand = complex(roots[order[0]])
        d1, d2 = dist[order[0]], dist[order[1]]
        # trapezoidal consistency: re-predict with the averaged slope
        err_est = abs(gamma + 0.5 * (slope + _dgamma_dzeta(cand, z_next, mu)) * dz
                      - cand)
        tol = 1e-12 * (1.0 + abs(cand))
        clean = (d1 <= 0.25 * d2 + tol) and (err_est <= 0.25 * d2 + tol) \
            and not herglotz_bad(cand)
        if clean:
            gamma = cand
            z_cur = z_next
            frac = max(0.5, frac * 0.92)
            continue
        if 1.0 - frac > 1e-6:
            frac = math.sqrt(frac)   # shorten the step and retry
            continue
        # step exhausted: allowed only at a root collision, where the
        # half-plane rule picks the branch
        r1, r2 = complex(roots[order[0]]), complex(roots[order[1]])
        if im_sign != 0.0 and abs(r1.imag - r2.imag) > 1e-9 * (1.0 + abs(r1) + abs(r2)):
            ok1 = r1.imag * im_sign < 0
            ok2 = r2.imag * im_sign < 0
            if ok1 != ok2:
                gamma = r1 if ok1 else r2
                z_cur = z_next
                frac = 0.9
                continue
        raise BranchAmbiguity(
            f"root tracking ambiguous at zeta = {z_next} (mu = {mu}); "
            "evaluation too close to the support or its edge")

    c = cubic_coeffs(zeta, mu)
    scale = (abs(c.c3) * abs(gamma) ** 3 + abs(c.c2) * abs(gamma) ** 2
             + abs(c.c1) * abs(gamma) + abs(c.c0))
    if abs(c.eval(gamma)) > 1e-10 * max(scale, 1e-300):
        raise BranchAmbiguity(f"tracked root fails the cubic at zeta = {zeta}")
    return gamma


def physical_resolvent(z, law: AnalyticLaw):
    """Resolvent in physical units: G(z) = Gamma(z/omega0^2; mu) / omega0^2."""
    law.validate()
    return resolvent_H(complex(z) / law.omega0_sq, law.mu) / law.omega0_sq
