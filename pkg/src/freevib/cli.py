"""Command-line front end: deterministic sample farming and file output.

Subcommands: sample | pendulum | analytic | edge | thermo | selftest.
Exit codes: 0 ok, 1 invalid configuration, 2 numerical failure.
Progress goes to stderr; stdout carries only the paths of written files.
Every run is reproducible from (config, seed): worker count changes the
schedule, never the bytes.
"""

import argparse
import json
import math
import os
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .ensembles import (EnsembleSpec, build_pendulum, build_wishart_pencil,
                        derive_stream, sample_disordered_pendulum,
                        uniform_pendulum)
from .errors import (FreevibError, InsufficientData, InvalidParams)
from .freeprob import (AnalyticLaw, analytic_density, edge_scale,
                       physical_density, resolvent_H, scale_map,
                       support_endpoint)
from .pencil import reduce_to_hermitian, solve_modes
from .stats import (PRAccumulator, SpectralHistogram, edge_rescale_fit,
                    edge_window, l1_distance, participation_ratio,
                    reference_bin_masses, region_cuts, spacing_histogram,
                    unfold_spacings)
from .thermo import thermo_curve

SCHEMA_VERSION = 1

_DEFAULTS = {
    "sample": dict(n=128, samples=200, field="complex", m0=1.0, sigma_m=1.0,
                   sigma_k=1.0, seed=0, bins=256, out="freevib-out"),
    "pendulum": dict(n=256, samples=100, flavor="disordered", charge=0.0,
                     gravity=1.0, seed=0, bins=256, out="freevib-out"),
    "analytic": dict(mu_grid="0.1,0.5,1,2,10", x_points=512,
                     resolvent_im=0.01, out="freevib-out"),
    "edge": dict(n=512, samples=2000, mu=0.1, seed=0, bins=48,
                 eta_min=-6.0, eta_max=3.0, half_width=8.0,
                 gof_threshold=0.25, out="freevib-out"),
    "thermo": dict(mu=0.0, m0=1.0, sigma_m=1.0, sigma_k=1.0, beta_min=1e-3,
                   beta_max=100.0, beta_points=61, from_density="",
                   out="freevib-out"),
    "selftest": dict(out="freevib-out", compare_workers=8),
}

_TYPES = dict(n=int, samples=int, field=str, m0=float, sigma_m=float,
              sigma_k=float, seed=int, bins=int, out=str, workers=int,
              flavor=str, charge=float, gravity=float, mu_grid=str,
              x_points=int, resolvent_im=float, mu=float, eta_min=float,
              eta_max=float, half_width=float, gof_threshold=float,
              beta_min=float, beta_max=float, beta_points=int,
              from_density=str, compare_workers=int)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the exit-code contract reserves 2 for
    # numerical failures, so route parse problems through InvalidParams
    def error(self, message):
        raise InvalidParams(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="freevib",
                description="Vibrational spectra of random mass/stiffness "
                            "pencils: sampling, analytics, statistics.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(cmd, help_text):
        sp = sub.add_parser(cmd, help=help_text)
        sp.add_argument("--config", default=None,
                        help="flat key=value file; CLI flags override it")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--workers", type=int, default=None,
                        help="worker threads (default: FREEVIB_WORKERS or 1)")
        for key, dflt in _DEFAULTS[cmd].items():
            if key == "out":
                continue
            sp.add_argument(f"--{key.replace('_', '-')}", type=_TYPES[key],
                            default=None, dest=key,
                            help=f"default: {dflt}")
        return sp

    add("sample", "farm random-pencil samples; density/PR/spacing CSVs")
    add("pendulum", "hanging-chain ensemble (uniform or disordered)")
    add("analytic", "large-n density, endpoints, resolvent on a mu grid")
    add("edge", "histogram near the upper edge and fit the Airy profile")
    add("thermo", "energy and specific heat vs inverse temperature")
    add("selftest", "rerun a fixed config with 1 and N workers, byte-compare")
    return p


def _load_config_file(path: str) -> dict:
    """Flat key=value lines; '#' starts a comment; unknown keys rejected."""
    values, problems = {}, []
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InvalidParams(f"cannot read config file {path}: {e}")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected key=value, got {raw!r}")
            continue
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _TYPES:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        try:
            values[key] = _TYPES[key](val)
        except ValueError:
            problems.append(
                f"line {lineno}: cannot parse {key}={val!r} as "
                f"{_TYPES[key].__name__}")
    if problems:
        raise InvalidParams("config file: " + "; ".join(problems))
    return values


def _effective_config(args) -> dict:
    cfg = dict(_DEFAULTS[args.command])
    cfg.setdefault("workers", 0)
    if args.config:
        for k, v in _load_config_file(args.config).items():
            if k in cfg:
                cfg[k] = v
    for k in cfg:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if not cfg.get("workers"):
        cfg["workers"] = int(os.environ.get("FREEVIB_WORKERS", "1") or 1)
    return cfg


def _check(cfg: dict, command: str):
    errs = []

    def need(cond, msg):
        if not cond:
            errs.append(msg)

    need(cfg["workers"] >= 1, "workers must be >= 1")
    if command in ("sample", "pendulum", "edge"):
        need(cfg["n"] >= 2, "n must be >= 2")
        need(cfg["samples"] >= 1, "samples must be >= 1")
        need(cfg["seed"] >= 0, "seed must be >= 0")
        need(cfg["bins"] >= 8, "bins must be >= 8")
    if command == "sample":
        need(cfg["field"] in ("real", "complex"),
             "field must be 'real' or 'complex'")
        need(cfg["m0"] > 0, "m0 must be > 0")
        need(cfg["sigma_m"] > 0, "sigma_m must be > 0")
        need(cfg["sigma_k"] > 0, "sigma_k must be > 0")
    elif command == "pendulum":
        need(cfg["flavor"] in ("uniform", "disordered"),
             "flavor must be 'uniform' or 'disordered'")
        need(cfg["charge"] >= 0, "charge must be >= 0")
        need(cfg["gravity"] >= 0, "gravity must be >= 0")
        need(cfg["charge"] > 0 or cfg["gravity"] > 0,
             "need charge > 0 or gravity > 0")
    elif command == "analytic":
        try:
            mus = _parse_mu_grid(cfg["mu_grid"])
            need(all(m >= 1e-8 for m in mus), "every mu must be >= 1e-8")
        except ValueError:
            errs.append(f"cannot parse mu_grid {cfg['mu_grid']!r}")
        need(cfg["x_points"] >= 16, "x_points must be >= 16")
        need(cfg["resolvent_im"] > 0, "resolvent_im must be > 0")
    elif command == "edge":
        need(cfg["mu"] >= 1e-8, "mu must be >= 1e-8")
        need(cfg["eta_min"] < cfg["eta_max"], "need eta_min < eta_max")
        need(cfg["half_width"] > 0, "half_width must be > 0")
        need(cfg["gof_threshold"] > 0, "gof_threshold must be > 0")
        need(cfg["bins"] >= 12, "bins must be >= 12")
    elif command == "thermo":
        need(cfg["beta_min"] > 0, "beta_min must be > 0")
        need(cfg["beta_max"] > cfg["beta_min"], "need beta_max > beta_min")
        need(cfg["beta_points"] >= 2, "beta_points must be >= 2")
        if not cfg["from_density"] and cfg["mu"] == 0.0:
            need(cfg["m0"] > 0 and cfg["sigma_m"] > 0 and cfg["sigma_k"] > 0,
                 "m0, sigma_m, sigma_k must be > 0 (or give --mu)")
    elif command == "selftest":
        need(cfg["compare_workers"] >= 2, "compare_workers must be >= 2")
    if errs:
        raise InvalidParams("; ".join(errs))


def _parse_mu_grid(text: str):
    return [float(t) for t in text.split(",") if t.strip()]


# ----------------------------------------------------------------------
# plumbing

def _farm(samples: int, job, workers: int, label: str):
    """Run job(0..samples-1), results in index order regardless of workers."""
    done = 0
    lock = threading.Lock()
    step = max(1, samples // 20)

    def wrapped(i):
        nonlocal done
        res = job(i)
        with lock:
            done += 1
            if done % step == 0 or done == samples:
                print(f"{label}: {done}/{samples}", file=sys.stderr, flush=True)
        return res

    if workers <= 1 or samples == 1:
        return [wrapped(i) for i in range(samples)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(wrapped, range(samples)))


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header: str, columns) -> Path:
    with open(path, "w") as f:
        f.write(header + "\n")
        for row in zip(*columns):
            f.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _write_summary(outdir: Path, command: str, cfg: dict, stats: dict,
                   outputs, t0: float) -> Path:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": {k: v for k, v in sorted(cfg.items())
                   if k not in ("out", "workers")},
        "workers": cfg["workers"],
        "wall_time_s": round(time.time() - t0, 3),
        "stats": stats,
        "outputs": [p.name for p in outputs],
    }
    path = outdir / "summary.json"
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return path


def _emit(paths):
    for p in paths:
        print(str(Path(p).resolve()))


def _spacing_columns(s, region):
    """Per-region unit-weight spacing histograms flattened to CSV columns."""
    regions, centers, dens = [], [], []
    for which in (0, 1, 2):
        try:
            h = spacing_histogram(s, region, which)
        except InsufficientData:
            continue
        regions.extend([which] * h.bins)
        centers.extend(h.centers())
        dens.extend(h.density())
    return regions, centers, dens


# ----------------------------------------------------------------------
# subcommands

def cmd_sample(cfg: dict) -> int:
    t0 = time.time()
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    law = scale_map(cfg["m0"], cfg["sigma_m"], cfg["sigma_k"])
    x1_phys = support_endpoint(law.mu) * law.omega0_sq
    spec = EnsembleSpec(n=cfg["n"], sigma_M=cfg["sigma_m"],
                        sigma_K=cfg["sigma_k"], m0=cfg["m0"],
                        field=cfg["field"], seed=cfg["seed"])
    spec.validate()

    def job(i):
        stream = derive_stream(cfg["seed"], i)
        modes = solve_modes(build_wishart_pencil(spec, stream))
        return modes.omega_sq, participation_ratio(modes.vectors)

    results = _farm(cfg["samples"], job, cfg["workers"], "sample")

    hi = 1.1 * x1_phys
    hist = SpectralHistogram(0.0, hi, cfg["bins"], axis="omega_sq")
    pr_acc = PRAccumulator(0.0, hi, min(cfg["bins"], 64), axis="omega_sq")
    spill = 0
    total = 0
    for w, p in results:
        hist.accumulate(w)
        pr_acc.add(w, p)
        spill += int(np.count_nonzero(w > x1_phys))
        total += w.size

    centers, mean_p, count = pr_acc.curve()
    try:
        cuts = region_cuts(centers, mean_p)
    except InsufficientData:
        cuts = None
    s, region = unfold_spacings([w for w, _ in results], cuts=cuts)

    ref = reference_bin_masses(hist.edges(),
                               lambda x: physical_density(x, law),
                               singular_points=[x1_phys])
    l1_bulk = l1_distance(hist, ref, bulk=(0.05 * x1_phys, 0.95 * x1_phys))
    mean_pr = float(np.mean(np.concatenate([p for _, p in results])))

    outs = [
        _write_csv(outdir / "density.csv",
                   "omega_sq [omega^2],rho [1/omega^2]",
                   (hist.centers(), hist.density())),
        _write_csv(outdir / "pr.csv",
                   "omega_sq [omega^2],mean_pr [dimensionless],count [modes]",
                   (centers, mean_p, count)),
        _write_csv(outdir / "spacing.csv",
                   "region [0=low 1=mid 2=high],s [mean-spacing units],"
                   "rho [per unit s]",
                   _spacing_columns(s, region)),
    ]
    stats = {
        "mu": law.mu,
        "omega0_sq": law.omega0_sq,
        "x1_physical": x1_phys,
        "l1_bulk_to_analytic": l1_bulk,
        "mean_pr": mean_pr,
        "frac_beyond_x1": spill / total,
        "modes_total": total,
        "region_cuts": list(cuts) if cuts else None,
    }
    outs.append(_write_summary(outdir, "sample", cfg, stats, outs, t0))
    _emit(outs)
    return 0


def cmd_pendulum(cfg: dict) -> int:
    t0 = time.time()
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    n = cfg["n"]
    uniform = cfg["flavor"] == "uniform"
    samples = 1 if uniform else cfg["samples"]

    def job(i):
        if uniform:
            params = uniform_pendulum(n, cfg["charge"], cfg["gravity"])
        else:
            stream = derive_stream(cfg["seed"], i)
            params = sample_disordered_pendulum(n, cfg["charge"],
                                                cfg["gravity"], stream)
        modes = solve_modes(build_pendulum(params))
        return modes.omega_sq, participation_ratio(modes.vectors)

    results = _farm(samples, job, cfg["workers"], "pendulum")

    # scale-free axes: x = omega^2/n^2 for the density, v = omega/n for
    # participation and spacings
    xs = [w / n**2 for w, _ in results]
    vs = [np.sqrt(w) / n for w, _ in results]
    x_hi = 1.02 * max(float(x.max()) for x in xs)
    v_hi = 1.02 * max(float(v.max()) for v in vs)

    hist = SpectralHistogram(0.0, x_hi, cfg["bins"], axis="omega_sq_over_nsq")
    vhist = SpectralHistogram(0.0, v_hi, cfg["bins"], axis="omega_over_n")
    pr_acc = PRAccumulator(0.0, v_hi, min(cfg["bins"], 128), axis="omega_over_n")
    for x, v, (_, p) in zip(xs, vs, results):
        hist.accumulate(x)
        vhist.accumulate(v)
        pr_acc.add(v, p)

    centers, mean_p, count = pr_acc.curve()
    try:
        cuts = region_cuts(centers, mean_p)
    except InsufficientData:
        cuts = None
    s, region = unfold_spacings(vs, cuts=cuts)

    # single-scale reference: a square-case Wishart density with sigma^2
    # fitted by the first moment
    sighat2 = float(np.mean(np.concatenate(xs)))
    from .freeprob import mp_density
    ref = reference_bin_masses(hist.edges(),
                               lambda x: mp_density(x, math.sqrt(sighat2)),
                               singular_points=[4.0 * sighat2])
    l1_mp = l1_distance(hist, ref, bulk=(0.2 * sighat2, 3.8 * sighat2))

    # low-frequency flatness of the mode density in omega
    vdens = vhist.density()
    occupied = np.nonzero(vhist.counts > 0)[0]
    low3 = vdens[occupied[:3]] if occupied.size >= 3 else np.array([])
    flat_low3 = float(low3.max() / low3.min() - 1.0) if low3.size == 3 else None

    # structural echo from one instance
    if uniform:
        probe = uniform_pendulum(n, cfg["charge"], cfg["gravity"])
    else:
        probe = sample_disordered_pendulum(n, cfg["charge"], cfg["gravity"],
                                           derive_stream(cfg["seed"], 0))
    k_row = float(np.abs(build_pendulum(probe).K.sum(axis=1)).max())

    outs = [
        _write_csv(outdir / "density.csv",
                   "omega_sq_over_nsq [dimensionless],rho [per omega_sq_over_nsq]",
                   (hist.centers(), hist.density())),
        _write_csv(outdir / "omega_density.csv",
                   "omega_over_n [dimensionless],rho [per omega_over_n]",
                   (vhist.centers(), vhist.density())),
        _write_csv(outdir / "pr.csv",
                   "omega_over_n [dimensionless],mean_pr [dimensionless],"
                   "count [modes]",
                   (centers, mean_p, count)),
        _write_csv(outdir / "spacing.csv",
                   "region [0=low 1=mid 2=high],s [mean-spacing units],"
                   "rho [per unit s]",
                   _spacing_columns(s, region)),
    ]
    stats = {
        "flavor": cfg["flavor"],
        "fitted_sigma_sq": sighat2,
        "l1_bulk_to_fitted_mp": l1_mp,
        "mean_pr": float(np.mean(np.concatenate([p for _, p in results]))),
        "low3_flatness": flat_low3,
        "max_abs_k_row_sum": k_row,
        "region_cuts": list(cuts) if cuts else None,
        "modes_total": int(sum(x.size for x in xs)),
    }
    outs.append(_write_summary(outdir, "pendulum", cfg, stats, outs, t0))
    _emit(outs)
    return 0


def cmd_analytic(cfg: dict) -> int:
    t0 = time.time()
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    mus = _parse_mu_grid(cfg["mu_grid"])

    ep_mu, ep_x1, ep_r = [], [], []
    d_mu, d_x, d_rho = [], [], []
    r_mu, r_x, r_im, r_re_g, r_im_g = [], [], [], [], []
    for mu in mus:
        x1 = support_endpoint(mu)
        ep_mu.append(mu)
        ep_x1.append(x1)
        ep_r.append(edge_scale(mu))
        grid = np.linspace(0.0, x1, cfg["x_points"] + 2)[1:-1]
        rho = analytic_density(grid, mu)
        d_mu.extend([mu] * grid.size)
        d_x.extend(grid)
        d_rho.extend(rho)
        off = cfg["resolvent_im"] * x1
        for x in grid[:: max(1, grid.size // 64)]:
            g = resolvent_H(complex(x, off), mu)
            r_mu.append(mu)
            r_x.append(x)
            r_im.append(off)
            r_re_g.append(g.real)
            r_im_g.append(g.imag)

    outs = [
        _write_csv(outdir / "endpoint.csv",
                   "mu [dimensionless],x1 [dimensionless],edge_r [dimensionless]",
                   (ep_mu, ep_x1, ep_r)),
        _write_csv(outdir / "adensity.csv",
                   "mu [dimensionless],x [dimensionless],rho [1/x]",
                   (d_mu, d_x, d_rho)),
        _write_csv(outdir / "resolvent.csv",
                   "mu [dimensionless],x [dimensionless],im_offset [x units],"
                   "re_g [1/x],im_g [1/x]",
                   (r_mu, r_x, r_im, r_re_g, r_im_g)),
    ]
    stats = {
        "mu_grid": mus,
        "x1": ep_x1,
        "x1_monotone_decreasing": bool(np.all(np.diff(ep_x1) < 0))
        if len(ep_x1) > 1 else True,
    }
    outs.append(_write_summary(outdir, "analytic", cfg, stats, outs, t0))
    _emit(outs)
    return 0


def cmd_edge(cfg: dict) -> int:
    t0 = time.time()
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    n, mu = cfg["n"], cfg["mu"]
    x1 = support_endpoint(mu)
    r_pilot = edge_scale(mu)
    lo, hi = edge_window(x1, r_pilot, n, cfg["half_width"])
    spec = EnsembleSpec(n=n, sigma_M=1.0, sigma_K=1.0, m0=mu,
                        field="complex", seed=cfg["seed"])
    spec.validate()

    def job(i):
        stream = derive_stream(cfg["seed"], i)
        h = reduce_to_hermitian(build_wishart_pencil(spec, stream))
        w = np.linalg.eigvalsh(h)
        return w[(w >= lo) & (w <= hi)]

    results = _farm(cfg["samples"], job, cfg["workers"], "edge")
    hist = SpectralHistogram(lo, hi, cfg["bins"], axis="omega_sq")
    for w in results:
        hist.accumulate(w)

    fit = edge_rescale_fit(hist, n, cfg["samples"], x1, r_pilot,
                           (cfg["eta_min"], cfg["eta_max"]),
                           cfg["gof_threshold"])

    outs = [
        _write_csv(outdir / "edge.csv",
                   "eta [dimensionless],rho_edge [per eta],rho_airy [per eta]",
                   (fit.eta, fit.rho_edge, fit.rho_airy)),
    ]
    stats = {
        "x1": x1,
        "r_pilot": r_pilot,
        "r": fit.r,
        "gof": fit.gof,
        "fit_bins": fit.n_bins,
        "events_in_window": float(hist.counts.sum()),
        "events_per_sample": float(hist.counts.sum()) / cfg["samples"],
    }
    outs.append(_write_summary(outdir, "edge", cfg, stats, outs, t0))
    _emit(outs)
    return 0


def cmd_thermo(cfg: dict) -> int:
    t0 = time.time()
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    if cfg["from_density"]:
        path = Path(cfg["from_density"])
        if not path.is_file():
            raise InvalidParams(f"no such density file: {path}")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        centers, dens = data[:, 0], data[:, 1]
        if centers.size < 2:
            raise InvalidParams(f"{path} holds fewer than 2 bins")
        step = centers[1] - centers[0]
        source = SpectralHistogram.from_density(
            centers[0] - 0.5 * step, centers[-1] + 0.5 * step,
            "omega_sq", dens)
        source_desc = str(path)
    elif cfg["mu"] > 0.0:
        source = AnalyticLaw(mu=cfg["mu"], omega0_sq=1.0).validate()
        source_desc = f"analytic mu={cfg['mu']}"
    else:
        source = scale_map(cfg["m0"], cfg["sigma_m"], cfg["sigma_k"])
        source_desc = (f"analytic mu={source.mu} "
                       f"omega0_sq={source.omega0_sq}")
    betas = np.geomspace(cfg["beta_min"], cfg["beta_max"], cfg["beta_points"])
    curve = thermo_curve(betas, source)
    outs = [
        _write_csv(outdir / "thermo.csv",
                   "beta [1/energy],energy [energy],heat [dimensionless]",
                   (curve.beta, curve.energy, curve.heat)),
    ]
    stats = {
        "source": source_desc,
        "heat_at_beta_min": float(curve.heat[0]),
        "energy_at_beta_min": float(curve.energy[0]),
    }
    outs.append(_write_summary(outdir, "thermo", cfg, stats, outs, t0))
    _emit(outs)
    return 0


_SELFTEST_SAMPLE = dict(n=32, samples=64, field="complex", m0=0.5,
                        sigma_m=1.0, sigma_k=1.0, seed=7, bins=48)
_SELFTEST_PENDULUM = dict(n=24, samples=40, flavor="disordered", charge=1.0,
                          gravity=1.0, seed=11, bins=32)


def cmd_selftest(cfg: dict) -> int:
    """Deterministic-farming check: same bytes with 1 and N workers."""
    t0 = time.time()
    base = Path(cfg["out"]) / "selftest"
    runs = {}
    for w in (1, cfg["compare_workers"]):
        sub = base / f"w{w}"
        scfg = dict(_SELFTEST_SAMPLE, out=str(sub / "sample"), workers=w)
        pcfg = dict(_SELFTEST_PENDULUM, out=str(sub / "pendulum"), workers=w)
        cmd_sample(scfg)
        cmd_pendulum(pcfg)
        runs[w] = sub

    a, b = (runs[w] for w in (1, cfg["compare_workers"]))
    mismatches = []
    for fa in sorted(a.rglob("*.csv")):
        fb = b / fa.relative_to(a)
        if not fb.is_file():
            mismatches.append(f"missing {fb}")
        elif fa.read_bytes() != fb.read_bytes():
            mismatches.append(f"bytes differ: {fa.relative_to(a)}")
    for fa in sorted(a.rglob("summary.json")):
        fb = b / fa.relative_to(a)
        da, db = json.loads(fa.read_text()), json.loads(fb.read_text())
        for doc in (da, db):
            doc.pop("wall_time_s", None)
            doc.pop("workers", None)
        if da != db:
            mismatches.append(f"summaries differ: {fa.relative_to(a)}")

    base.mkdir(parents=True, exist_ok=True)
    report = base / "report.json"
    report.write_text(json.dumps({
        "schema_version": SCHEMA_VERSION,
        "command": "selftest",
        "workers_compared": [1, cfg["compare_workers"]],
        "mismatches": mismatches,
        "ok": not mismatches,
        "wall_time_s": round(time.time() - t0, 3),
    }, sort_keys=True, indent=2) + "\n")
    _emit([report])
    if mismatches:
        print(json.dumps({"error": "DeterminismViolation",
                          "message": "; ".join(mismatches)}),
              file=sys.stderr)
        return 2
    print("selftest: outputs identical across worker counts",
          file=sys.stderr)
    return 0


_COMMANDS = {
    "sample": cmd_sample,
    "pendulum": cmd_pendulum,
    "analytic": cmd_analytic,
    "edge": cmd_edge,
    "thermo": cmd_thermo,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _effective_config(args)
        _check(cfg, args.command)
        return _COMMANDS[args.command](cfg)
    except InvalidParams as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}),
              file=sys.stderr)
        return 1
    except FreevibError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
