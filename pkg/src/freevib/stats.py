"""Spectral statistics: histograms, participation ratios, unfolded spacings,
and the Airy rescaling fit at the upper spectral edge.

Accumulators are mergeable so per-sample work can be farmed out and folded
back in a fixed order; merging checks that the binning matches exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .airy import airy_ai, airy_density
from .errors import BinMismatch, InsufficientData, InvalidParams, PoorFit

__all__ = [
    "SpectralHistogram", "reference_bin_masses", "l1_distance",
    "participation_ratio", "pr_expectation", "PRAccumulator", "region_cuts",
    "unfold_spacings", "spacing_histogram", "wigner_spacing_density",
    "poisson_spacing_density", "EdgeFit", "edge_rescale_fit", "edge_window",
    "airy_ai", "airy_density",
]


@dataclass
class SpectralHistogram:
    """Fixed-range histogram with event bookkeeping.

    axis is a label for what the values are (e.g. "omega_sq",
    "omega_sq_over_nsq", "spacing"); merge refuses mismatched labels or
    binning. Out-of-range values are dropped but counted, so density()
    integrates to the in-range fraction of all offered events.
    """

    lo: float
    hi: float
    bins: int
    axis: str = "omega_sq"
    counts: np.ndarray = None
    n_events: float = 0.0
    n_below: int = 0
    n_above: int = 0

    def __post_init__(self):
        if not (self.hi > self.lo) or self.bins < 1:
            raise InvalidParams("need hi > lo and bins >= 1")
        if self.counts is None:
            self.counts = np.zeros(self.bins, dtype=float)

    def accumulate(self, values):
        values = np.asarray(values, dtype=float).ravel()
        c, _ = np.histogram(values, bins=self.bins, range=(self.lo, self.hi))
        self.counts += c
        self.n_events += values.size
        self.n_below += int(np.count_nonzero(values < self.lo))
        self.n_above += int(np.count_nonzero(values > self.hi))

    @classmethod
    def from_density(cls, lo: float, hi: float, axis: str,
                     density) -> "SpectralHistogram":
        """Rebuild a histogram from tabulated bin densities (e.g. a CSV)."""
        density = np.asarray(density, dtype=float)
        h = cls(lo, hi, density.size, axis=axis)
        h.counts = density * h.bin_width()
        h.n_events = 1.0
        return h

    def _compatible(self, other: "SpectralHistogram"):
        return (self.lo == other.lo and self.hi == other.hi
                and self.bins == other.bins and self.axis == other.axis)

    def merge(self, other: "SpectralHistogram") -> "SpectralHistogram":
        if not self._compatible(other):
            raise BinMismatch(
                f"cannot merge ({self.axis},{self.lo},{self.hi},{self.bins}) "
                f"with ({other.axis},{other.lo},{other.hi},{other.bins})")
        self.counts += other.counts
        self.n_events += other.n_events
        self.n_below += other.n_below
        self.n_above += other.n_above
        return self

    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.bins + 1)

    def centers(self) -> np.ndarray:
        e = self.edges()
        return 0.5 * (e[:-1] + e[1:])

    def bin_width(self) -> float:
        return (self.hi - self.lo) / self.bins

    def masses(self) -> np.ndarray:
        """Per-bin probability mass (relative to all offered events)."""
        if self.n_events == 0:
            raise InsufficientData("empty histogram")
        return self.counts / self.n_events

    def density(self) -> np.ndarray:
        return self.masses() / self.bin_width()


def reference_bin_masses(edges, density_fn, singular_points=()) -> np.ndarray:
    """Exact per-bin masses of a reference density, one quadrature per bin.

    Midpoint-rule masses are biased near integrable singularities (the
    1/sqrt(x) divergence at the lower spectral edge and the sqrt at the
    upper one), enough to matter at percent-level L1 budgets; integrating
    each bin avoids that. singular_points inside a bin are passed to quad
    as known difficult points.
    """
    edges = np.asarray(edges, dtype=float)
    out = np.empty(edges.size - 1)
    for i in range(edges.size - 1):
        a, b = edges[i], edges[i + 1]
        pts = [p for p in singular_points if a < p < b] or None
        val, _ = quad(density_fn, a, b, points=pts, limit=200)
        out[i] = val
    return out


def l1_distance(hist: SpectralHistogram, ref_masses, bulk=None) -> float:
    """Sum of |empirical - reference| bin masses, optionally over a sub-range.

    bulk = (a, b) restricts the sum to bins whose centers lie in [a, b].
    """
    ref_masses = np.asarray(ref_masses, dtype=float)
    if ref_masses.shape != (hist.bins,):
        raise BinMismatch(
            f"reference has {ref_masses.shape}, histogram has {hist.bins} bins")
    diff = np.abs(hist.masses() - ref_masses)
    if bulk is not None:
        a, b = bulk
        keep = (hist.centers() >= a) & (hist.centers() <= b)
        diff = diff[keep]
    return float(diff.sum())


# ----------------------------------------------------------------------
# participation ratios

def participation_ratio(vectors) -> np.ndarray:
    """p = (sum |a|^2)^2 / (n sum |a|^4) per column of a mode matrix.

    1 for a fully delocalized mode (all |a_l| equal), ~1/n for a mode living
    on one coordinate. Accepts a single vector or a matrix of columns.
    """
    a = np.asarray(vectors)
    single = a.ndim == 1
    if single:
        a = a[:, None]
    sq = np.abs(a) ** 2
    num = sq.sum(axis=0) ** 2
    den = a.shape[0] * (sq**2).sum(axis=0)
    out = num / den
    return float(out[0]) if single else out


def pr_expectation(field: str, n: int) -> float:
    """Mean PR of an isotropically random unit vector: (n+1)/(2n) complex,
    (n+2)/(3n) real."""
    if field == "complex":
        return (n + 1) / (2 * n)
    if field == "real":
        return (n + 2) / (3 * n)
    raise InvalidParams(f"field must be 'real' or 'complex', got {field!r}")


@dataclass
class PRAccumulator:
    """Mean participation ratio binned along a frequency axis."""

    lo: float
    hi: float
    bins: int
    axis: str = "omega"
    sum_p: np.ndarray = None
    count: np.ndarray = None

    def __post_init__(self):
        if not (self.hi > self.lo) or self.bins < 1:
            raise InvalidParams("need hi > lo and bins >= 1")
        if self.sum_p is None:
            self.sum_p = np.zeros(self.bins)
        if self.count is None:
            self.count = np.zeros(self.bins, dtype=np.int64)

    def add(self, positions, p_values):
        positions = np.asarray(positions, dtype=float).ravel()
        p_values = np.asarray(p_values, dtype=float).ravel()
        if positions.shape != p_values.shape:
            raise InvalidParams("positions and p_values must align")
        self.sum_p += np.histogram(positions, bins=self.bins,
                                   range=(self.lo, self.hi),
                                   weights=p_values)[0]
        self.count += np.histogram(positions, bins=self.bins,
                                   range=(self.lo, self.hi))[0]

    def merge(self, other: "PRAccumulator") -> "PRAccumulator":
        if (self.lo, self.hi, self.bins, self.axis) != \
                (other.lo, other.hi, other.bins, other.axis):
            raise BinMismatch("PR accumulators binned differently")
        self.sum_p += other.sum_p
        self.count += other.count
        return self

    def centers(self) -> np.ndarray:
        e = np.linspace(self.lo, self.hi, self.bins + 1)
        return 0.5 * (e[:-1] + e[1:])

    def curve(self):
        """(centers, mean_p, count); mean_p is NaN where a bin is empty."""
        with np.errstate(invalid="ignore"):
            mean = np.where(self.count > 0, self.sum_p / self.count, np.nan)
        return self.centers(), mean, self.count.copy()


def region_cuts(centers, mean_p, smooth_window: int = 5):
    """(r1, r2): full-width-at-half-maximum bounds of the PR curve's main peak.

    The curve is smoothed with a short moving average, the peak located, and
    the half-height crossings found by linear interpolation; a missing
    crossing falls back to the axis boundary. Everything below r1 is the
    low-frequency region, (r1, r2] the peak, above r2 the tail.
    """
    centers = np.asarray(centers, dtype=float)
    p = np.asarray(mean_p, dtype=float)
    ok = np.isfinite(p)
    if ok.sum() < max(smooth_window, 3):
        raise InsufficientData("too few populated bins for region cuts")
    c, p = centers[ok], p[ok]
    w = max(1, int(smooth_window))
    kernel = np.ones(w) / w
    # same-length smoothing with edge renormalization
    sm = np.convolve(p, kernel, mode="same") / np.convolve(
        np.ones_like(p), kernel, mode="same")
    ipk = int(np.argmax(sm))
    half = 0.5 * sm[ipk]

    def cross(idxs, after):
        prev = ipk
        for i in idxs:
            if sm[i] < half:
                # interpolate between i and prev
                lo_i, hi_i = (i, prev) if after == "left" else (prev, i)
                f = (half - sm[lo_i]) / (sm[hi_i] - sm[lo_i])
                return c[lo_i] + f * (c[hi_i] - c[lo_i])
            prev = i
        return c[0] if after == "left" else c[-1]

    r1 = cross(range(ipk - 1, -1, -1), "left")
    r2 = cross(range(ipk + 1, len(sm)), "right")
    return float(r1), float(r2)


# ----------------------------------------------------------------------
# unfolded spacings

def unfold_spacings(per_sample, cuts=None):
    """Unfolded nearest-neighbor spacings pooled over samples.

    per_sample is a sequence of 1-d arrays of mode positions (one array per
    sample, any common axis). Unfolding uses the pooled averaged counting
    function N(w) = #\\{pooled values <= w\\} / n_samples, so a spacing is
    s_k = N(w_{k+1}) - N(w_k), which has unit mean by construction up to
    boundary terms. Returns (s, region) where region tags each spacing by
    the position of its gap midpoint against cuts = (r1, r2): 0 below r1,
    1 in (r1, r2], 2 above. With cuts=None all tags are 1.
    """
    arrays = [np.sort(np.asarray(a, dtype=float).ravel()) for a in per_sample]
    if not arrays:
        raise InsufficientData("no samples")
    pooled = np.sort(np.concatenate(arrays))
    n_samples = len(arrays)
    s_out = []
    mid_out = []
    for a in arrays:
        if a.size < 2:
            continue
        pos = np.searchsorted(pooled, a, side="right") / n_samples
        s_out.append(np.diff(pos))
        mid_out.append(0.5 * (a[1:] + a[:-1]))
    if not s_out:
        raise InsufficientData("samples have fewer than 2 modes each")
    s = np.concatenate(s_out)
    mids = np.concatenate(mid_out)
    if cuts is None:
        region = np.ones(s.size, dtype=np.int8)
    else:
        r1, r2 = cuts
        region = np.where(mids <= r1, 0, np.where(mids <= r2, 1, 2)).astype(np.int8)
    return s, region


def spacing_histogram(s, region, which: int, bins: int = 60,
                      s_max: float = 6.0, min_count: int = 100) -> SpectralHistogram:
    """Histogram of spacings belonging to one region, unit total weight."""
    s = np.asarray(s, dtype=float)
    sel = s[np.asarray(region) == which]
    if sel.size < min_count:
        raise InsufficientData(
            f"region {which} has {sel.size} spacings (< {min_count})")
    h = SpectralHistogram(0.0, s_max, bins, axis="spacing")
    h.accumulate(sel)
    return h


def wigner_spacing_density(s):
    """Orthogonal-class surmise (pi/2) s exp(-pi s^2 / 4), unit mean."""
    s = np.asarray(s, dtype=float)
    out = 0.5 * np.pi * s * np.exp(-0.25 * np.pi * s**2)
    return out if out.ndim else float(out)


def poisson_spacing_density(s):
    """Uncorrelated-level law exp(-s), unit mean."""
    s = np.asarray(s, dtype=float)
    out = np.exp(-s)
    return out if out.ndim else float(out)


# ----------------------------------------------------------------------
# edge rescaling

def edge_window(x1: float, r: float, n: int, half_width: float = 8.0):
    """(lo, hi) in x units covering eta in [-half_width, half_width]."""
    w = half_width * r * n ** (-2.0 / 3.0)
    return x1 - w, x1 + w


@dataclass
class EdgeFit:
    """Result of matching edge counts to the squared-Airy profile."""

    r: float
    gof: float
    r_pilot: float
    n_bins: int
    eta: np.ndarray = field(repr=False, default=None)
    rho_edge: np.ndarray = field(repr=False, default=None)
    rho_airy: np.ndarray = field(repr=False, default=None)


def edge_rescale_fit(hist: SpectralHistogram, n: int, n_samples: int,
                     x1: float, r_pilot: float, eta_range=(-6.0, 3.0),
                     gof_threshold: float = 0.25) -> EdgeFit:
    """Fit the edge rescaling parameter r against Ai'(eta)^2 - eta Ai(eta)^2.

    Counts near the upper edge, rescaled by eta = (x - x1) / (r n^-2/3) and
    amplitude r n^(1/3), should collapse onto the parameter-free squared-Airy
    profile; r is fit by least squares over bins landing in eta_range, seeded
    and bracketed by the analytic pilot value. gof is the RMS residual
    relative to the RMS profile; above gof_threshold the fit raises PoorFit.

    The histogram typically holds only eigenvalues near the edge, so the
    per-eigenvalue density is reconstructed from raw counts as
    counts / (n_samples * n * bin width), not from the in-histogram event
    total.
    """
    if n < 2 or n_samples < 1 or r_pilot <= 0:
        raise InvalidParams("need n >= 2, n_samples >= 1, positive pilot r")
    centers = hist.centers()
    dens = hist.counts / (n_samples * n * hist.bin_width())
    scale = n ** (2.0 / 3.0)

    def chi2(r):
        eta = (centers - x1) * scale / r
        keep = (eta >= eta_range[0]) & (eta <= eta_range[1])
        if keep.sum() < 10:
            return np.inf
        model = airy_density(eta[keep])
        emp = r * n ** (1.0 / 3.0) * dens[keep]
        return float(np.sum((emp - model) ** 2))

    res = minimize_scalar(chi2, bounds=(r_pilot / 3.0, 3.0 * r_pilot),
                          method="bounded", options={"xatol": 1e-6 * r_pilot})
    r_hat = float(res.x)
    eta = (centers - x1) * scale / r_hat
    keep = (eta >= eta_range[0]) & (eta <= eta_range[1])
    n_bins = int(keep.sum())
    if n_bins < 10:
        raise PoorFit(f"only {n_bins} bins land in eta window {eta_range}")
    model = airy_density(eta[keep])
    emp = r_hat * n ** (1.0 / 3.0) * dens[keep]
    gof = float(np.sqrt(np.mean((emp - model) ** 2))
                / np.sqrt(np.mean(model**2)))
    fit = EdgeFit(r=r_hat, gof=gof, r_pilot=r_pilot, n_bins=n_bins,
                  eta=eta[keep], rho_edge=emp, rho_airy=model)
    if gof > gof_threshold:
        raise PoorFit(
            f"edge fit gof = {gof:.3f} exceeds {gof_threshold} "
            f"(r = {r_hat:.3f}, pilot {r_pilot:.3f}, {n_bins} bins)")
    return fit
