"""Vibrational spectra of random mass/stiffness pencils.

Solve (K - omega^2 M) A = 0 for positive-definite random M and K, compare
the sampled spectra against their large-n limits (bulk density, support
endpoint, square-root edge with its universal profile), and derive
statistics: participation ratios, unfolded spacings, thermodynamics.
"""

__version__ = "0.1.0"

from .errors import (BinMismatch, BranchAmbiguity, EigenFailure, FreevibError,
                     InsufficientData, InvalidParams, NotPositiveDefinite,
                     OutOfWindow, PoorFit, QuadratureFailure)
from .pencil import (ModeSpectrum, PencilSystem, QuasiHermitianReport,
                     build_liouvillian, check_quasi_hermitian,
                     cholesky_factor, reduce_to_hermitian, solve_modes)
from .ensembles import (EnsembleSpec, PendulumParams, build_pendulum,
                        build_wishart_pencil, derive_stream,
                        sample_disordered_pendulum, sample_ginibre,
                        uniform_pendulum)
from .freeprob import (AnalyticLaw, CubicCoeffs, analytic_density,
                       cubic_coeffs, density_via_roots, discriminant,
                       edge_scale, free_moments, inv_mass_density,
                       inv_mass_resolvent, inverse_mass_first_moment,
                       mp_density, mp_resolvent, physical_density,
                       physical_resolvent, resolvent_H, scale_map,
                       sqrt_x_density_limit, support_endpoint)
from .airy import airy_ai, airy_density
from .stats import (EdgeFit, PRAccumulator, SpectralHistogram,
                    edge_rescale_fit, edge_window, l1_distance,
                    participation_ratio, poisson_spacing_density,
                    pr_expectation, reference_bin_masses, region_cuts,
                    spacing_histogram, unfold_spacings,
                    wigner_spacing_density)
from .thermo import (ThermoCurve, energy_density, mode_energy,
                     mode_specific_heat, specific_heat, thermo_curve)

__all__ = [
    "__version__",
    # errors
    "FreevibError", "InvalidParams", "NotPositiveDefinite", "EigenFailure",
    "BinMismatch", "InsufficientData", "OutOfWindow", "PoorFit",
    "BranchAmbiguity", "QuadratureFailure",
    # pencils
    "PencilSystem", "ModeSpectrum", "QuasiHermitianReport", "cholesky_factor",
    "reduce_to_hermitian", "solve_modes", "check_quasi_hermitian",
    "build_liouvillian",
    # ensembles
    "EnsembleSpec", "PendulumParams", "derive_stream", "sample_ginibre",
    "build_wishart_pencil", "build_pendulum", "uniform_pendulum",
    "sample_disordered_pendulum",
    # large-n laws
    "AnalyticLaw", "CubicCoeffs", "scale_map", "mp_resolvent", "mp_density",
    "inverse_mass_first_moment", "inv_mass_resolvent", "inv_mass_density",
    "cubic_coeffs", "discriminant", "support_endpoint", "analytic_density",
    "physical_density", "density_via_roots", "sqrt_x_density_limit",
    "edge_scale", "free_moments", "resolvent_H", "physical_resolvent",
    # edge profile
    "airy_ai", "airy_density",
    # statistics
    "SpectralHistogram", "reference_bin_masses", "l1_distance",
    "participation_ratio", "pr_expectation", "PRAccumulator", "region_cuts",
    "unfold_spacings", "spacing_histogram", "wigner_spacing_density",
    "poisson_spacing_density", "edge_window", "EdgeFit", "edge_rescale_fit",
    # thermodynamics
    "mode_energy", "mode_specific_heat", "energy_density", "specific_heat",
    "ThermoCurve", "thermo_curve",
]
