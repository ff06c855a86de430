"""Pencil constructors: random Wishart ensembles and multi-segmented pendula.

Random sampling is organized around reproducible per-sample streams so that
Monte Carlo runs merge identically for any worker count.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import blas

from .errors import InvalidParams
from .pencil import PencilSystem

# An RngStream is a numpy Generator in a documented, fixed state derivation
# (see derive_stream); code should treat it as opaque.
RngStream = np.random.Generator


def derive_stream(seed: int, index: int) -> RngStream:
    """Deterministic, schedule-independent stream for sample ``index``.

    Derivation (part of the public contract, so runs are reproducible across
    machines and worker counts): PCG64 seeded by
    SeedSequence(entropy=seed, spawn_key=(index,)). Streams for distinct
    indices are statistically independent by SeedSequence's spawn design, and
    the derivation is a pure function of (seed, index).
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class EnsembleSpec:
    """Parameters of the random pencil ensemble.

    K = C1^dag C1 with scale sigma_K, M = C2^dag C2 + m0 with scale sigma_M.
    m0 > 0 keeps M strictly positive definite with probability one.
    """

    n: int
    sigma_M: float = 1.0
    sigma_K: float = 1.0
    m0: float = 1.0
    field: str = "complex"
    seed: int = 0

    def validate(self):
        errs = []
        if self.n < 1:
            errs.append(f"n must be >= 1, got {self.n}")
        if self.sigma_M <= 0:
            errs.append(f"sigma_M must be > 0, got {self.sigma_M}")
        if self.sigma_K <= 0:
            errs.append(f"sigma_K must be > 0, got {self.sigma_K}")
        if self.m0 <= 0:
            errs.append(f"m0 must be > 0, got {self.m0}")
        if self.field not in ("real", "complex"):
            errs.append(f"field must be 'real' or 'complex', got {self.field!r}")
        if errs:
            raise InvalidParams("; ".join(errs))
        return self


def sample_ginibre(n: int, sigma: float, field: str, stream: RngStream) -> np.ndarray:
    """n x n matrix with i.i.d. Gaussian entries, E|C_ij|^2 = sigma^2 / n.

    Complex field: Re and Im parts each have variance sigma^2/(2n), so the
    eigenvalues fill a disk of radius sigma as n grows and
    (1/n) E Tr C^dag C = sigma^2. Real field: entry variance sigma^2/n.
    sigma = 0 returns the zero matrix. Draw order (complex: full real part
    block, then full imaginary part block) is part of the stream contract.
    """
    if sigma < 0:
        raise InvalidParams(f"sigma must be >= 0, got {sigma}")
    if sigma == 0.0:
        return np.zeros((n, n), dtype=complex if field == "complex" else float)
    if field == "complex":
        scale = sigma / math.sqrt(2.0 * n)
        re = stream.standard_normal((n, n))
        im = stream.standard_normal((n, n))
        return scale * (re + 1j * im)
    if field == "real":
        return stream.standard_normal((n, n)) * (sigma / math.sqrt(n))
    raise InvalidParams(f"field must be 'real' or 'complex', got {field!r}")


def _gram(C: np.ndarray) -> np.ndarray:
    """C^dag C, exactly hermitian. Rank-k BLAS kernels fill one triangle
    with half the flops of a general product; mirror the other half."""
    if C.size == 0:
        return C
    if np.iscomplexobj(C):
        G = blas.zherk(1.0, C, trans=2, lower=1)
        return G + np.tril(G, -1).conj().T
    G = blas.dsyrk(1.0, C, trans=1, lower=1)
    return G + np.tril(G, -1).T


def build_wishart_pencil(spec: EnsembleSpec, stream: RngStream) -> PencilSystem:
    """Draw one (M, K) pencil: K = C1^dag C1, M = C2^dag C2 + m0.

    C1 is drawn first, then C2 (stream contract). Gram products are exactly
    hermitian by construction; min eig(M) >= m0 up to roundoff.
    """
    spec.validate()
    C1 = sample_ginibre(spec.n, spec.sigma_K, spec.field, stream)
    C2 = sample_ginibre(spec.n, spec.sigma_M, spec.field, stream)
    K = _gram(C1)
    M = _gram(C2)
    M[np.diag_indices(spec.n)] += spec.m0
    return PencilSystem(M=M, K=K, field=spec.field)


@dataclass
class PendulumParams:
    """Geometry of a multi-segmented pendulum.

    lengths[k] and masses[k] (k = 0..n-1) describe segment k+1; charges has
    n+1 entries, charges[0] being the wall charge. g is the gravitational
    acceleration. Reduced units throughout (no SI constants).
    """

    lengths: np.ndarray
    masses: np.ndarray
    charges: np.ndarray
    g: float = 1.0

    def __post_init__(self):
        self.lengths = np.asarray(self.lengths, dtype=float)
        self.masses = np.asarray(self.masses, dtype=float)
        self.charges = np.asarray(self.charges, dtype=float)

    @property
    def n(self) -> int:
        return self.lengths.shape[0]

    def validate(self):
        errs = []
        if self.n < 1:
            errs.append("need at least one segment")
        if self.masses.shape != (self.n,):
            errs.append(f"masses shape {self.masses.shape} != ({self.n},)")
        if self.charges.shape != (self.n + 1,):
            errs.append(f"charges must have n+1 entries, got {self.charges.shape}")
        if np.any(self.lengths <= 0):
            errs.append("all lengths must be > 0")
        if self.masses.shape == (self.n,) and np.any(self.masses <= 0):
            errs.append("all masses must be > 0")
        if np.any(self.charges < 0):
            errs.append("charges must be >= 0")
        if self.g < 0:
            errs.append(f"g must be >= 0, got {self.g}")
        if errs:
            raise InvalidParams("; ".join(errs))
        return self

    # -- flat key=value serialization (documented in README) --------------

    def to_config(self) -> str:
        def row(v):
            return ",".join(repr(float(x)) for x in v)
        return (f"g={self.g!r}\n"
                f"lengths={row(self.lengths)}\n"
                f"masses={row(self.masses)}\n"
                f"charges={row(self.charges)}\n")

    @classmethod
    def from_config(cls, text: str) -> "PendulumParams":
        fields = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InvalidParams(f"bad config line: {line!r}")
            key, _, val = line.partition("=")
            fields[key.strip()] = val.strip()
        try:
            g = float(fields["g"])
            lengths = np.array([float(x) for x in fields["lengths"].split(",")])
            masses = np.array([float(x) for x in fields["masses"].split(",")])
            charges = np.array([float(x) for x in fields["charges"].split(",")])
        except KeyError as exc:
            raise InvalidParams(f"missing key {exc} in pendulum config") from exc
        except ValueError as exc:
            raise InvalidParams(f"bad number in pendulum config: {exc}") from exc
        return cls(lengths=lengths, masses=masses, charges=charges, g=g).validate()


def build_pendulum(params: PendulumParams) -> PencilSystem:
    """Mass and stiffness matrices of the pendulum (real symmetric).

    M_ij = l_i l_j sum_{k >= max(i,j)} m_k
    K_ij = U_ij + delta_ij l_i g sum_{k >= i} m_k
    U: Coulomb block with zero row sums, built from the pair kernel
    Q_kl = Q_{k-1} Q_l (sum of segment lengths from k to l)^-3.

    The double sum for the Coulomb entries is accumulated with 2-D prefix
    sums (O(n^2) time and memory, a few n x n temporaries), which the
    n = 16384 configurations need.
    """
    params.validate()
    n = params.n
    l = params.lengths
    m = params.masses
    q = params.charges
    suff_m = np.cumsum(m[::-1])[::-1]            # sum_{k >= t} m_k
    idx = np.arange(n)
    M = np.outer(l, l) * suff_m[np.maximum(idx[:, None], idx[None, :])]

    # pair kernel over 0-based segment indices: row k0 carries the charge
    # above segment k0+1 (q[k0], wall = q[0]), column j0 the charge below it
    # (q[j0+1]); their distance spans segments k0..j0 inclusive.
    cum = np.cumsum(l)
    cum_excl = cum - l                           # sum of lengths before segment
    P = np.zeros((n, n))
    iu = np.triu_indices(n)
    dist = cum[iu[1]] - cum_excl[iu[0]]
    P[iu] = q[iu[0]] * q[iu[1] + 1] * dist ** -3

    # S[a, b] = sum_{k <= a, j >= b} P[k, j]: cumulative down the rows, then
    # reversed-cumulative across the columns.
    S = np.cumsum(P, axis=0)
    S = np.cumsum(S[:, ::-1], axis=1)[:, ::-1]
    W = np.triu(S) + np.triu(S, 1).T             # S[min(i,j), max(i,j)]
    Ut = np.outer(l, l) * W
    U = -Ut
    np.fill_diagonal(U, Ut.sum(axis=1) - np.diag(Ut))

    K = U + np.diag(l * params.g * suff_m)
    return PencilSystem(M=M, K=0.5 * (K + K.T), field="real")


def uniform_pendulum(n: int, calQ: float, g: float) -> PendulumParams:
    """Uniform pendulum: l_k = m_k = 1/n, all charges calQ / (n sqrt(log n)).

    The charge scaling balances the log(n) growth of the Coulomb diagonal
    against gravity; it needs n >= 2 whenever calQ > 0.
    """
    if n < 1:
        raise InvalidParams(f"n must be >= 1, got {n}")
    if calQ > 0 and n < 2:
        raise InvalidParams("charged pendulum needs n >= 2 (log n scaling)")
    if calQ < 0 or g < 0:
        raise InvalidParams("calQ and g must be >= 0")
    qval = calQ / (n * math.sqrt(math.log(n))) if calQ > 0 else 0.0
    return PendulumParams(
        lengths=np.full(n, 1.0 / n),
        masses=np.full(n, 1.0 / n),
        charges=np.full(n + 1, qval),
        g=g,
    )


def sample_disordered_pendulum(n: int, calQ: float, g: float,
                               stream: RngStream) -> PendulumParams:
    """Disordered pendulum with the canonical disorder laws.

    l_k ~ U(0.8/n, 1.2/n), m_k ~ U(0.5/n, 1.5/n), and every charge
    (wall included) takes the values {0.5, 1.5} * calQ / (n sqrt(log n))
    with equal probability. Draw order: lengths, masses, charges.
    """
    if n < 2:
        raise InvalidParams(f"disordered pendulum needs n >= 2, got {n}")
    if calQ < 0 or g < 0:
        raise InvalidParams("calQ and g must be >= 0")
    lengths = stream.uniform(0.8 / n, 1.2 / n, n)
    masses = stream.uniform(0.5 / n, 1.5 / n, n)
    base = calQ / (n * math.sqrt(math.log(n)))
    charges = base * (0.5 + stream.integers(0, 2, n + 1))
    return PendulumParams(lengths=lengths, masses=masses, charges=charges, g=g)
