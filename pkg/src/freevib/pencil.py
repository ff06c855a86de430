"""Generalized eigenproblem (-omega^2 M + K) A = 0 for positive hermitian pencils.

The mass matrix M must be strictly positive definite and the stiffness matrix
K positive semi-definite. The operator H = M^-1 K is then quasi-hermitian:
it satisfies the intertwining relation H^dag M = M H (= K), so its spectrum is
real and nonnegative even though H itself is not hermitian. All solvers here
work on the hermitian reduction h = L^-1 K L^-dag with M = L L^dag, which has
the same eigenvalues.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import EigenFailure, InvalidParams, NotPositiveDefinite

# Default relative tolerance for structure checks (residual reports).
DEFAULT_TOL = 1e-10


@dataclass
class PencilSystem:
    """A pair (M, K) of hermitian matrices defining one mechanical instance.

    M is the mass matrix (must be positive definite), K the stiffness matrix
    (positive semi-definite). ``field`` records whether the entries are real
    or complex; real systems are stored in float arrays so the real-path
    LAPACK drivers are used.
    """

    M: np.ndarray
    K: np.ndarray
    field: str = "complex"

    @property
    def n(self) -> int:
        return self.M.shape[0]

    def validate(self, tol: float = DEFAULT_TOL):
        """Check shapes, hermiticity and positivity. Raises InvalidParams or
        NotPositiveDefinite; returns self so calls can be chained."""
        M, K = self.M, self.K
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise InvalidParams(f"M must be square, got shape {M.shape}")
        if K.shape != M.shape:
            raise InvalidParams(f"K shape {K.shape} does not match M {M.shape}")
        if self.field not in ("real", "complex"):
            raise InvalidParams(f"field must be 'real' or 'complex', got {self.field!r}")
        nM = sla.norm(M)
        nK = sla.norm(K)
        if sla.norm(M - M.conj().T) > tol * max(nM, 1e-300):
            raise InvalidParams("M is not hermitian to working precision")
        if sla.norm(K - K.conj().T) > tol * max(nK, 1e-300):
            raise InvalidParams("K is not hermitian to working precision")
        cholesky_factor(M)  # raises NotPositiveDefinite if M is not PD
        # K may have tiny negative eigenvalues from roundoff, nothing worse.
        wmin = sla.eigh(K, eigvals_only=True, subset_by_index=(0, 0))[0]
        if wmin < -self.n * np.finfo(float).eps * max(nK, 1e-300):
            raise InvalidParams(f"K is not positive semi-definite (min eig {wmin:g})")
        return self


@dataclass
class ModeSpectrum:
    """Sorted squared eigenfrequencies with amplitude eigenvectors.

    ``omega_sq`` is ascending and nonnegative (clamped, see solve_modes).
    ``vectors[:, a]`` is the amplitude eigenvector for omega_sq[a], unit norm
    in the standard inner product. ``raw_min`` keeps the smallest eigenvalue
    before clamping, for diagnostics.
    """

    omega_sq: np.ndarray
    vectors: np.ndarray
    raw_min: float = 0.0

    @property
    def n(self) -> int:
        return self.omega_sq.shape[0]


@dataclass
class QuasiHermitianReport:
    """Residuals of the structural identities, all relative.

    r1: intertwining residual ||H^dag M - M H|| / ||K||
    r2: largest negative excursion of the raw spectrum (0 if none)
    r3: largest mode residual ||K A - w^2 M A|| / (||K|| + w^2 ||M||)
    """

    r1: float
    r2: float
    r3: float

    def ok(self, tol: float = DEFAULT_TOL) -> bool:
        return self.r1 <= tol and self.r2 <= tol and self.r3 <= tol


def cholesky_factor(M: np.ndarray) -> np.ndarray:
    """Lower-triangular L with M = L L^dag.

    Raises NotPositiveDefinite if a pivot is nonpositive, which signals an
    invalid mass matrix.
    """
    try:
        return sla.cholesky(M, lower=True)
    except sla.LinAlgError as exc:
        raise NotPositiveDefinite(f"Cholesky failed: {exc}") from exc


def reduce_to_hermitian(p: PencilSystem) -> np.ndarray:
    """Hermitian h = L^-1 K L^-dag, same spectrum as M^-1 K.

    Cholesky replaces a symmetric square root of M: both are similarity
    reductions, so the spectra agree; eigenvector back-transforms differ by a
    factor that renormalization absorbs. The result is explicitly
    re-hermitized to kill roundoff asymmetry.
    """
    L = cholesky_factor(p.M)
    Y = sla.solve_triangular(L, p.K, lower=True)            # L^-1 K
    h = sla.solve_triangular(L, Y.conj().T, lower=True).conj().T  # (L^-1 Y^dag)^dag
    return 0.5 * (h + h.conj().T)


def solve_modes(p: PencilSystem) -> ModeSpectrum:
    """All squared eigenfrequencies and amplitude eigenvectors of the pencil.

    Eigenvalues in [-n*ulp*||h||, 0) are clamped to zero so omega = sqrt is
    well-defined; anything more negative means the inputs violate positivity
    and raises EigenFailure. Eigenvectors v of h are back-transformed as
    A = L^-dag v and renormalized to unit standard norm. Degenerate
    eigenvalues keep the solver-returned basis.
    """
    L = cholesky_factor(p.M)
    Y = sla.solve_triangular(L, p.K, lower=True)
    h = sla.solve_triangular(L, Y.conj().T, lower=True).conj().T
    h = 0.5 * (h + h.conj().T)
    try:
        w, v = sla.eigh(h, driver="evd")
    except sla.LinAlgError as exc:
        raise EigenFailure(f"hermitian eigensolver failed: {exc}") from exc
    raw_min = float(w[0])
    floor = -p.n * np.finfo(float).eps * sla.norm(h)
    if raw_min < floor:
        raise EigenFailure(
            f"eigenvalue {raw_min:g} below clamping band {floor:g}; K not PSD?")
    np.clip(w, 0.0, None, out=w)
    A = sla.solve_triangular(L.conj().T, v, lower=False)
    A /= np.linalg.norm(A, axis=0, keepdims=True)
    return ModeSpectrum(omega_sq=w, vectors=A, raw_min=raw_min)


def check_quasi_hermitian(p: PencilSystem, spectrum: ModeSpectrum) -> QuasiHermitianReport:
    """Residual report for the quasi-hermitian structure of H = M^-1 K.

    H is applied through triangular solves against the Cholesky factor of M,
    never as an explicit inverse. For exact arithmetic H^dag M = M H = K,
    so r1 measures pure roundoff.
    """
    L = cholesky_factor(p.M)
    H = sla.cho_solve((L, True), p.K)
    D = H.conj().T @ p.M - p.M @ H
    nK = sla.norm(p.K)
    r1 = float(sla.norm(D) / nK) if nK > 0 else float(sla.norm(D))
    r2 = max(0.0, -spectrum.raw_min)
    # per-mode residuals, vectorized over all columns at once
    R = p.K @ spectrum.vectors - p.M @ spectrum.vectors * spectrum.omega_sq
    scale = nK + spectrum.omega_sq * sla.norm(p.M)
    r3 = float(np.max(np.linalg.norm(R, axis=0) / scale))
    return QuasiHermitianReport(r1=r1, r2=r2, r3=r3)


def build_liouvillian(p: PencilSystem) -> np.ndarray:
    """The 2n x 2n phase-space generator [[0, M^-1], [-K, 0]].

    The M^-1 block is computed by triangular solves against the identity.
    trace = 0 exactly (zero diagonal blocks, volume preservation); the
    eigenvalues are +/- i*omega_alpha, and the square is -diag(H, H^dag).
    """
    n = p.n
    L = cholesky_factor(p.M)
    Minv = sla.cho_solve((L, True), np.eye(n, dtype=p.M.dtype))
    dtype = complex if p.field == "complex" else float
    out = np.zeros((2 * n, 2 * n), dtype=dtype)
    out[:n, n:] = Minv
    out[n:, :n] = -p.K
    return out
