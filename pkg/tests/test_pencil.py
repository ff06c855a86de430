"""Generalized eigenproblem core: reduction, modes, structure checks.

Oracles: the QZ algorithm (scipy.linalg.eig on the pair), a matrix-square-root
reduction (scipy.linalg.sqrtm), and explicit determinant evaluation. All are
algorithmically independent of the Cholesky route under test.
"""

import numpy as np
import pytest
import scipy.linalg as sla

from freevib import (NotPositiveDefinite, PencilSystem, build_liouvillian,
                     check_quasi_hermitian, cholesky_factor,
                     reduce_to_hermitian, solve_modes)


def random_pencil(n, field, rng, m0=0.3):
    if field == "complex":
        c1 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        c2 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    else:
        c1 = rng.standard_normal((n, n))
        c2 = rng.standard_normal((n, n))
    K = c1.conj().T @ c1 / n
    M = c2.conj().T @ c2 / n + m0 * np.eye(n)
    return PencilSystem(M=M, K=K, field=field)


# ----------------------------------------------------------------------
# oracles first

@pytest.mark.parametrize("field", ["real", "complex"])
def test_modes_match_qz_oracle(field):
    rng = np.random.default_rng(42)
    p = random_pencil(24, field, rng)
    modes = solve_modes(p)
    qz = np.sort(sla.eig(p.K, p.M, right=False).real)
    assert np.max(np.abs(np.sort(modes.omega_sq) - qz)) < 1e-9


def test_modes_are_determinant_roots():
    rng = np.random.default_rng(7)
    p = random_pencil(4, "real", rng)
    modes = solve_modes(p)
    # det(K - x M) has degree 4 and leading coefficient det(-M); normalize
    # by that scale so the root residual is meaningful
    scale = abs(np.linalg.det(p.M))
    for x in modes.omega_sq:
        assert abs(np.linalg.det(p.K - x * p.M)) < 1e-10 * scale * (1 + x) ** 4


def test_reduction_matches_sqrtm_route():
    rng = np.random.default_rng(3)
    p = random_pencil(16, "complex", rng)
    h = reduce_to_hermitian(p)
    isq = np.linalg.inv(sla.sqrtm(p.M))
    h_ref = isq @ p.K @ isq
    assert np.max(np.abs(np.sort(np.linalg.eigvalsh(h))
                         - np.sort(np.linalg.eigvalsh(h_ref)))) < 1e-9


def test_two_by_two_hand_case():
    # det(K - x M) for M = [[2,1],[1,2]], K = diag(3,1) expands to
    # 3x^2 - 8x + 3, so x = (4 +- sqrt(7)) / 3
    p = PencilSystem(M=np.array([[2.0, 1.0], [1.0, 2.0]]),
                     K=np.diag([3.0, 1.0]), field="real")
    got = np.sort(solve_modes(p).omega_sq)
    want = np.array([(4 - np.sqrt(7)) / 3, (4 + np.sqrt(7)) / 3])
    assert np.allclose(got, want, rtol=0, atol=1e-13)


def test_single_mode_liouvillian_pure_rotation():
    # one mode with omega^2 = 4: first-order generator has eigenvalues +-2i
    p = PencilSystem(M=np.array([[1.0]]), K=np.array([[4.0]]), field="real")
    ev = np.sort_complex(np.linalg.eigvals(build_liouvillian(p)))
    assert np.allclose(ev, [-2j, 2j], atol=1e-12)


# ----------------------------------------------------------------------
# structure and contracts

@pytest.mark.parametrize("field", ["real", "complex"])
def test_mode_residuals_and_normalization(field):
    rng = np.random.default_rng(11)
    p = random_pencil(32, field, rng)
    modes = solve_modes(p)
    norm_k = np.linalg.norm(p.K, 2)
    for k in range(p.n):
        a = modes.vectors[:, k]
        res = np.linalg.norm(p.K @ a - modes.omega_sq[k] * (p.M @ a))
        assert res < 1e-10 * norm_k
        assert abs(np.linalg.norm(a) - 1.0) < 1e-12
    assert np.all(np.diff(modes.omega_sq) >= 0)


def test_cholesky_factor_reconstructs():
    rng = np.random.default_rng(5)
    p = random_pencil(12, "complex", rng)
    L = cholesky_factor(p.M)
    assert np.allclose(L, np.tril(L))
    assert np.max(np.abs(L @ L.conj().T - p.M)) < 1e-12 * np.linalg.norm(p.M)


def test_indefinite_mass_rejected():
    M = np.diag([1.0, -0.5])
    K = np.eye(2)
    with pytest.raises(NotPositiveDefinite):
        solve_modes(PencilSystem(M=M, K=K, field="real"))


def test_quasi_hermitian_report():
    rng = np.random.default_rng(13)
    p = random_pencil(20, "complex", rng)
    modes = solve_modes(p)
    rep = check_quasi_hermitian(p, modes)
    assert rep.ok()
    # H = M^-1 K and M H = K = H^dagger M; check the raw identity too
    H = np.linalg.solve(p.M, p.K)
    assert (np.linalg.norm(H.conj().T @ p.M - p.M @ H, 2)
            < 1e-10 * np.linalg.norm(p.K, 2))


def test_positive_semidefinite_clamping():
    # rank-1 stiffness: three modes are exact zeros, roundoff makes the raw
    # reduced eigenvalues tiny of either sign; the spectrum must come back
    # clamped to >= 0
    rng = np.random.default_rng(17)
    v = rng.standard_normal(4)
    K = np.outer(v, v)
    c = rng.standard_normal((4, 4))
    M = c.T @ c / 4 + 0.5 * np.eye(4)
    modes = solve_modes(PencilSystem(M=M, K=K, field="real"))
    assert np.all(modes.omega_sq >= 0)
    assert np.count_nonzero(modes.omega_sq < 1e-12) == 3


def test_liouvillian_spectrum_matches_modes():
    rng = np.random.default_rng(19)
    p = random_pencil(8, "real", rng)
    modes = solve_modes(p)
    ev = np.linalg.eigvals(build_liouvillian(p))
    want = np.sort(np.concatenate([np.sqrt(modes.omega_sq),
                                   -np.sqrt(modes.omega_sq)]))
    assert np.max(np.abs(np.sort(ev.imag) - want)) < 1e-8
    assert np.max(np.abs(ev.real)) < 1e-8
