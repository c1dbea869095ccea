"""Batch command-line interface.

Subcommands:
  simulate      integrate the nonlinear (or linear-only) system, write norms,
                energy series, decay fits and optional field dumps
  linear-decay  evaluate the semigroup directly at the sample times (no
                stepping), write norms and decay fits
  verify        run a frozen verification suite (multipliers, identities,
                bounds, duhamel, energy) and write its CSV report
  report        re-fit decay exponents from an existing output directory

Exit codes: 0 ok, 1 runtime failure, 2 config error, 3 verification failure.
All emitted files are deterministic: given the same config and seed they are
byte-identical across runs and --threads values.
"""

import argparse
import configparser
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .analysis import (
    NORM_NAMES,
    compute_norms,
    fit_decay,
    theoretical_exponents,
    validity_window,
)
from .errors import (
    ConfigError,
    EmptySweep,
    MHD2DError,
    NonPositiveValue,
    WindowTooSmall,
)
from .fieldio import export_trajectory, fmt
from .initial import gaussian_state, random_band_state
from .nonlinear import energy_balance, run
from .propagator import apply_semigroup
from .spectral import Grid2D, set_fft_threads
from .verification import (
    check_bounds,
    check_duhamel,
    check_energy,
    check_identities,
    check_multipliers,
)

_REQUIRED = object()

FAMILIES = ("gaussian", "random-band")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration (defaults applied)."""

    grid: Grid2D
    dt: float
    T: float
    linear_only: bool
    N: int
    family: str
    amplitude: float
    seed: int
    psi_components: tuple | None
    phi_components: tuple | None
    k_min: float
    k_max: float | None
    count: int
    times: tuple | None
    fit_t_min: float
    fit_t_max: float
    fields: bool


def _cast_bool(raw):
    low = raw.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _cast_components(raw):
    """Parse 'amp,sx,sy; amp,sx,sy; ...' into a tuple of 3-tuples."""
    comps = []
    for part in raw.split(";"):
        part = part.strip()
        if not part:
            continue
        nums = [float(x) for x in part.split(",")]
        if len(nums) != 3:
            raise ValueError(f"component needs 3 numbers (amp, sx, sy): {part!r}")
        comps.append(tuple(nums))
    if not comps:
        raise ValueError("empty component list")
    return tuple(comps)


def _cast_times(raw):
    return tuple(float(x) for x in raw.split(",") if x.strip())


def _get(cp, section, key, cast, default=_REQUIRED):
    if not cp.has_option(section, key):
        if default is _REQUIRED:
            raise ConfigError(f"missing required key [{section}] {key}")
        return default
    raw = cp.get(section, key)
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for [{section}] {key}: {exc}") from exc


def parse_config(path):
    """Read an INI-style config file into a resolved RunConfig.

    Unknown sections (e.g. a manifest's [versions]) are ignored, so a
    manifest written by write_manifest parses back losslessly.
    """
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    try:
        grid = Grid2D(
            _get(cp, "grid", "nx", int),
            _get(cp, "grid", "ny", int),
            _get(cp, "grid", "Lx", float),
            _get(cp, "grid", "Ly", float),
        )
    except ValueError as exc:
        raise ConfigError(f"bad [grid]: {exc}") from exc

    dt = _get(cp, "run", "dt", float)
    T = _get(cp, "run", "T", float)
    linear_only = _get(cp, "run", "linear_only", _cast_bool, False)
    N = _get(cp, "run", "N", int, 8)
    family = _get(cp, "initial", "family", str, "gaussian").strip()
    amplitude = _get(cp, "initial", "amplitude", float, 1e-2)
    seed = _get(cp, "initial", "seed", int, 0)
    psi = _get(cp, "initial", "psi_components", _cast_components, None)
    phi = _get(cp, "initial", "phi_components", _cast_components, None)
    k_min = _get(cp, "initial", "k_min", float, 1.0)
    k_max = _get(cp, "initial", "k_max", float, None)
    count = _get(cp, "sampling", "count", int, 40)
    times = _get(cp, "sampling", "times", _cast_times, None)
    default_window = validity_window(grid)
    explicit_fit = cp.has_option("fit", "t_min") or cp.has_option("fit", "t_max")
    fit_t_min = _get(cp, "fit", "t_min", float, default_window[0])
    fit_t_max = _get(cp, "fit", "t_max", float, default_window[1])
    fields = _get(cp, "output", "fields", _cast_bool, True)

    if dt <= 0:
        raise ConfigError("[run] dt must be positive")
    if dt > 0.1:
        raise ConfigError("[run] dt exceeds the 0.1 stability cap")
    if T < 0:
        raise ConfigError("[run] T must be nonnegative")
    if T > 0:
        n_steps = round(T / dt)
        if n_steps == 0 or abs(n_steps * dt - T) > 1e-9 * max(1.0, T):
            raise ConfigError("[run] T must be an integer number of dt steps")
    if N < 2:
        raise ConfigError("[run] N must be at least 2")
    if family not in FAMILIES:
        raise ConfigError(f"[initial] family must be one of {FAMILIES}, got {family!r}")
    if amplitude <= 0:
        raise ConfigError("[initial] amplitude must be positive")
    if k_max is not None and k_max <= k_min:
        raise ConfigError("[initial] k_max must exceed k_min")
    if count < 2:
        raise ConfigError("[sampling] count must be at least 2")
    if times is not None:
        if any(t < 0 or t > T for t in times):
            raise ConfigError("[sampling] times must lie in [0, T]")
        times = tuple(sorted(set(times) | {0.0}))
    # An inverted window is only a config error when the user wrote it; the
    # default window degenerates on small boxes (spectral gap leaves no
    # algebraic-decay range), and then the fit stage warns and skips instead.
    if explicit_fit and not fit_t_min < fit_t_max:
        raise ConfigError("[fit] t_min must be smaller than t_max")

    return RunConfig(
        grid=grid,
        dt=dt,
        T=T,
        linear_only=linear_only,
        N=N,
        family=family,
        amplitude=amplitude,
        seed=seed,
        psi_components=psi,
        phi_components=phi,
        k_min=k_min,
        k_max=k_max,
        count=count,
        times=times,
        fit_t_min=fit_t_min,
        fit_t_max=fit_t_max,
        fields=fields,
    )


def build_initial(cfg):
    if cfg.family == "gaussian":
        return gaussian_state(
            cfg.grid,
            cfg.amplitude,
            psi_components=cfg.psi_components,
            phi_components=cfg.phi_components,
        )
    return random_band_state(
        cfg.grid, seed=cfg.seed, amplitude=cfg.amplitude, k_min=cfg.k_min, k_max=cfg.k_max
    )


def build_schedule(cfg):
    """Sample times: explicit list, or 40 log-spaced in the fit window + t=0."""
    if cfg.times is not None:
        return np.asarray(cfg.times, dtype=float)
    if cfg.T == 0:
        return np.array([0.0])
    lo, hi = cfg.fit_t_min, min(cfg.T, cfg.fit_t_max)
    if not 0 < lo < hi:
        print(
            "warning: sample window degenerate; sampling the whole run instead",
            file=sys.stderr,
        )
        lo, hi = cfg.T / cfg.count, cfg.T
    return np.concatenate([[0.0], np.geomspace(lo, hi, cfg.count)])


def _components_str(comps):
    return "; ".join(",".join(fmt(x) for x in c) for c in comps)


def write_manifest(path, cfg):
    """Echo the resolved config plus library versions (parseable as config).

    Deliberately excludes output paths, thread counts and timestamps so the
    manifest is byte-identical for identical (config, seed) pairs.
    """
    import scipy

    psi = cfg.psi_components
    phi = cfg.phi_components
    lines = [
        "[grid]",
        f"nx = {cfg.grid.nx}",
        f"ny = {cfg.grid.ny}",
        f"Lx = {fmt(cfg.grid.Lx)}",
        f"Ly = {fmt(cfg.grid.Ly)}",
        "",
        "[run]",
        f"dt = {fmt(cfg.dt)}",
        f"T = {fmt(cfg.T)}",
        f"linear_only = {'true' if cfg.linear_only else 'false'}",
        f"N = {cfg.N}",
        "",
        "[initial]",
        f"family = {cfg.family}",
        f"amplitude = {fmt(cfg.amplitude)}",
        f"seed = {cfg.seed}",
    ]
    if psi is not None:
        lines.append(f"psi_components = {_components_str(psi)}")
    if phi is not None:
        lines.append(f"phi_components = {_components_str(phi)}")
    if cfg.family == "random-band":
        lines.append(f"k_min = {fmt(cfg.k_min)}")
        if cfg.k_max is not None:
            lines.append(f"k_max = {fmt(cfg.k_max)}")
    lines += ["", "[sampling]"]
    if cfg.times is not None:
        lines.append(f"times = {','.join(fmt(t) for t in cfg.times)}")
    else:
        lines.append(f"count = {cfg.count}")
    # A degenerate window only arises from the grid-derived default; echoing
    # it would trip the explicit-window check on re-parse, so let the parser
    # re-derive it from [grid] instead.
    if cfg.fit_t_min < cfg.fit_t_max:
        lines += [
            "",
            "[fit]",
            f"t_min = {fmt(cfg.fit_t_min)}",
            f"t_max = {fmt(cfg.fit_t_max)}",
        ]
    lines += [
        "",
        "[output]",
        f"fields = {'true' if cfg.fields else 'false'}",
        "",
        "[versions]",
        f"mhd2d = {__version__}",
        f"numpy = {np.__version__}",
        f"scipy = {scipy.__version__}",
        "",
    ]
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines))


def write_norms_csv(path, reports):
    with open(path, "w", newline="") as fh:
        fh.write("time," + ",".join(NORM_NAMES) + "\n")
        for rep in reports:
            row = [fmt(rep.time)] + [fmt(rep.values[name]) for name in NORM_NAMES]
            fh.write(",".join(row) + "\n")


def read_norms_csv(path):
    if not os.path.isfile(path):
        raise ConfigError(f"norms file not found: {path}")
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if header[0] != "time":
        raise ConfigError(f"{path}: first column must be 'time'")
    times = np.array([float(r[0]) for r in rows])
    series = {
        name: np.array([float(r[j]) for r in rows])
        for j, name in enumerate(header)
        if j > 0
    }
    return times, series


def decay_rows(times, series, window):
    """Fit every table norm over the window; skip (with a note) bad series."""
    rows = []
    skipped = []
    for name, theory in theoretical_exponents().items():
        try:
            fit = fit_decay(times, series[name], window)
        except (WindowTooSmall, NonPositiveValue) as exc:
            skipped.append((name, str(exc)))
            continue
        rows.append(
            (name, fit.exponent, theory, fit.exponent - theory, fit.r2, fit.t1, fit.t2)
        )
    return rows, skipped


def write_decay_csv(path, rows):
    with open(path, "w", newline="") as fh:
        fh.write("norm,exponent,theory,delta,R2,t1,t2\n")
        for name, expo, theo, delta, r2, t1, t2 in rows:
            fh.write(
                f"{name},{fmt(expo)},{fmt(theo)},{fmt(delta)},{fmt(r2)},{fmt(t1)},{fmt(t2)}\n"
            )


def _write_decay_outputs(out_dir, times, series, window):
    rows, skipped = decay_rows(times, series, window)
    for name, why in skipped:
        print(f"warning: decay fit skipped for {name}: {why}", file=sys.stderr)
    write_decay_csv(os.path.join(out_dir, "decay.csv"), rows)
    return len(rows)


def cmd_simulate(cfg, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    state0 = build_initial(cfg)
    schedule = build_schedule(cfg)
    traj = run(state0, cfg.T, cfg.dt, sampler=schedule, linear_only=cfg.linear_only)
    reports = [
        compute_norms(s, float(t), N=cfg.N) for t, s in zip(traj.times, traj.states)
    ]
    write_manifest(os.path.join(out_dir, "manifest.txt"), cfg)
    write_norms_csv(os.path.join(out_dir, "norms.csv"), reports)

    with open(os.path.join(out_dir, "energy.csv"), "w", newline="") as fh:
        fh.write("time,energy,dissipation\n")
        for t, e, d in zip(traj.step_times, traj.energy_total, traj.dissipation):
            fh.write(f"{fmt(t)},{fmt(e)},{fmt(d)}\n")
    if traj.step_times.size >= 3:
        mid, resid = energy_balance(traj)
        with open(os.path.join(out_dir, "energy_residual.csv"), "w", newline="") as fh:
            fh.write("time,residual\n")
            for t, r in zip(mid, resid):
                fh.write(f"{fmt(t)},{fmt(r)}\n")

    # Running L^2-in-time integral of ||dx b|| in H^{N-1} (squared under the
    # root), accumulated by trapezoid over the snapshot times.
    hn = np.array([rep.values["HNm1_dx_bvec"] for rep in reports])
    s2_val = float(np.sqrt(np.trapezoid(hn**2, np.asarray(traj.times))))
    with open(os.path.join(out_dir, "s2.csv"), "w", newline="") as fh:
        fh.write("quantity,value\n")
        fh.write(f"L2t_HNm1_dx_bvec,{fmt(s2_val)}\n")

    series = {name: np.array([r.values[name] for r in reports]) for name in NORM_NAMES}
    n_fits = _write_decay_outputs(
        out_dir, np.asarray(traj.times), series, (cfg.fit_t_min, cfg.fit_t_max)
    )
    if cfg.fields:
        export_trajectory(traj, os.path.join(out_dir, "traj"))
    print(
        f"simulate: {len(traj.times)} snapshots, {traj.step_times.size - 1} steps, "
        f"{n_fits} decay fits -> {out_dir}"
    )
    return 0


def cmd_linear_decay(cfg, out_dir):
    """Semigroup-only evolution evaluated directly at the sample times."""
    os.makedirs(out_dir, exist_ok=True)
    state0 = build_initial(cfg)
    schedule = build_schedule(cfg)
    reports = [
        compute_norms(apply_semigroup(state0, float(t)), float(t), N=cfg.N)
        for t in schedule
    ]
    write_manifest(os.path.join(out_dir, "manifest.txt"), cfg)
    write_norms_csv(os.path.join(out_dir, "norms.csv"), reports)
    series = {name: np.array([r.values[name] for r in reports]) for name in NORM_NAMES}
    n_fits = _write_decay_outputs(
        out_dir, schedule, series, (cfg.fit_t_min, cfg.fit_t_max)
    )
    print(f"linear-decay: {len(reports)} snapshots, {n_fits} decay fits -> {out_dir}")
    return 0


def _verdict(passed):
    return "PASS" if passed else "FAIL"


def cmd_verify(which, out_dir, seed, n_per_region):
    os.makedirs(out_dir, exist_ok=True)
    if which == "multipliers":
        rep = check_multipliers() if seed is None else check_multipliers(seed=seed)
        path = os.path.join(out_dir, "verify_multipliers.csv")
        with open(path, "w", newline="") as fh:
            fh.write("kx,ky,t,rel_err,trace_err,det_err\n")
            for i in range(rep["n_samples"]):
                fh.write(
                    f"{fmt(rep['kx'][i])},{fmt(rep['ky'][i])},{fmt(rep['t'][i])},"
                    f"{fmt(rep['rel_errs'][i])},{fmt(rep['trace_errs'][i])},"
                    f"{fmt(rep['det_errs'][i])}\n"
                )
        print(
            f"multipliers: n={rep['n_samples']} max_rel_err={rep['max_rel_err']:.3e} "
            f"(tol {rep['tol_rel']:.0e}) max_trace_err={rep['max_trace_err']:.3e} "
            f"max_det_err={rep['max_det_err']:.3e} (tol {rep['tol_invariant']:.0e}) "
            f"-> {_verdict(rep['passed'])}"
        )
        if not rep["passed"]:
            i = rep["first_failure"]
            print(
                f"first failing sample {i}: kx={rep['kx'][i]!r} ky={rep['ky'][i]!r} "
                f"t={rep['t'][i]!r} rel={rep['rel_errs'][i]:.3e}",
                file=sys.stderr,
            )
    elif which == "identities":
        rep = check_identities() if seed is None else check_identities(seed=seed)
        path = os.path.join(out_dir, "verify_identities.csv")
        with open(path, "w", newline="") as fh:
            fh.write("kx,ky,t,residual_m2,residual_m1,residual_m2_half,residual_m1_half\n")
            for i in range(rep["n_samples"]):
                fh.write(
                    f"{fmt(rep['kx'][i])},{fmt(rep['ky'][i])},{fmt(rep['t'][i])},"
                    f"{fmt(rep['residuals_m2'][i])},{fmt(rep['residuals_m1'][i])},"
                    f"{fmt(rep['residuals_m2_half'][i])},{fmt(rep['residuals_m1_half'][i])}\n"
                )
        print(
            f"identities: n={rep['n_samples']} h={rep['h']:g} "
            f"max_residuals=({rep['max_residual_m2']:.3e}, {rep['max_residual_m1']:.3e}) "
            f"(tol {rep['tol']:.0e}) richardson=({rep['richardson_m2']:.2f}, "
            f"{rep['richardson_m1']:.2f}) -> {_verdict(rep['passed'])}"
        )
    elif which == "bounds":
        kwargs = {"n_per_region": n_per_region}
        if seed is not None:
            kwargs["seed"] = seed
        rep = check_bounds(**kwargs)
        path = os.path.join(out_dir, "verify_bounds.csv")
        with open(path, "w", newline="") as fh:
            fh.write("region,i,supRatio,argmax_xi,argmax_eta,argmax_t,n_samples\n")
            for r in rep["rows"]:
                fh.write(
                    f"{r['region']},{r['i']},{fmt(r['sup_ratio'])},"
                    f"{fmt(r['argmax_kx'])},{fmt(r['argmax_ky'])},{fmt(r['argmax_t'])},"
                    f"{r['n_freqs'] * r['n_times']}\n"
                )
        worst = max(rep["rows"], key=lambda r: r["sup_ratio"] / r["frozen"])
        print(
            f"bounds: {len(rep['rows'])} (region, i) pairs, worst sup/frozen = "
            f"{worst['sup_ratio'] / worst['frozen']:.4f} at ({worst['region']}, "
            f"{worst['i']}) -> {_verdict(rep['passed'])}"
        )
        for r in rep["rows"]:
            if r["dominant_term"] is not None:
                print(
                    f"bounds: ({r['region']}, {r['i']}) argmax dominated by "
                    f"{r['dominant_term']} term"
                )
        if not rep["passed"]:
            bad = next(
                r for r in rep["rows"] if not (r["stable"] and r["within_frozen"])
            )
            print(
                f"first failing pair: ({bad['region']}, {bad['i']}) "
                f"sup={bad['sup_ratio']!r} t10={bad['sup_ratio_t10']!r} "
                f"frozen={bad['frozen']!r}",
                file=sys.stderr,
            )
    elif which == "duhamel":
        rep = check_duhamel() if seed is None else check_duhamel(seed=seed)
        path = os.path.join(out_dir, "verify_duhamel.csv")
        with open(path, "w", newline="") as fh:
            fh.write("grid,amplitude,dt,t,n_samples,rel_l2_error,tol,passed\n")
            fh.write(
                f"{rep['grid']},{fmt(rep['amplitude'])},{fmt(rep['dt'])},"
                f"{fmt(rep['t'])},{rep['n_samples']},{fmt(rep['rel_l2_error'])},"
                f"{fmt(rep['tol'])},{rep['passed']}\n"
            )
        print(
            f"duhamel: max relative error {rep['rel_l2_error']:.3e} "
            f"(tol {rep['tol']:.0e}) -> {_verdict(rep['passed'])}"
        )
    elif which == "energy":
        rep = check_energy() if seed is None else check_energy(seed=seed)
        path = os.path.join(out_dir, "verify_energy.csv")
        with open(path, "w", newline="") as fh:
            fh.write("dt,max_residual,max_residual_half_dt,richardson,tol,passed\n")
            fh.write(
                f"{fmt(rep['dt'])},{fmt(rep['max_residual'])},"
                f"{fmt(rep['max_residual_half_dt'])},{fmt(rep['richardson'])},"
                f"{fmt(rep['tol'])},{rep['passed']}\n"
            )
        print(
            f"energy: max_residual={rep['max_residual']:.3e} (tol {rep['tol']:.0e}) "
            f"richardson={rep['richardson']:.2f} -> {_verdict(rep['passed'])}"
        )
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown verify suite: {which}")
    return 0 if rep["passed"] else 3


def cmd_report(out_dir):
    """Re-fit decay exponents from an existing output directory."""
    manifest = os.path.join(out_dir, "manifest.txt")
    if not os.path.isfile(manifest):
        raise ConfigError(f"manifest not found: {manifest}")
    cfg = parse_config(manifest)
    times, series = read_norms_csv(os.path.join(out_dir, "norms.csv"))
    n_fits = _write_decay_outputs(
        out_dir, times, series, (cfg.fit_t_min, cfg.fit_t_max)
    )
    print(f"report: {n_fits} decay fits -> {os.path.join(out_dir, 'decay.csv')}")
    return 0


def _add_common(sp, config_required=True):
    if config_required:
        sp.add_argument("--config", required=True, help="path to the INI config file")
    sp.add_argument("--out", default="out", help="output directory (default: out)")
    sp.add_argument("--seed", type=int, default=None, help="override the config seed")
    sp.add_argument(
        "--threads", type=int, default=1, help="FFT worker threads (default: 1)"
    )


def build_parser():
    p = argparse.ArgumentParser(
        prog="mhd2d",
        description="Pseudospectral 2D MHD near a uniform magnetic field.",
    )
    p.add_argument("--version", action="version", version=f"mhd2d {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="integrate and write reports")
    _add_common(sp)
    sp.add_argument(
        "--linear-only",
        action="store_true",
        help="step the bare semigroup (no nonlinear forcing)",
    )

    sp = sub.add_parser("linear-decay", help="semigroup-only decay study")
    _add_common(sp)

    sp = sub.add_parser("verify", help="run a frozen verification suite")
    sp.add_argument(
        "which",
        choices=("multipliers", "identities", "bounds", "duhamel", "energy"),
    )
    _add_common(sp, config_required=False)
    sp.add_argument(
        "--n-per-region",
        type=int,
        default=10_000,
        help="frequency samples per region for the bounds suite",
    )

    sp = sub.add_parser("report", help="re-fit decay exponents from existing CSVs")
    sp.add_argument("--out", default="out", help="directory holding manifest + norms")
    sp.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        set_fft_threads(getattr(args, "threads", 1))
        if args.command == "simulate":
            cfg = parse_config(args.config)
            if args.seed is not None:
                cfg = replace(cfg, seed=args.seed)
            if args.linear_only:
                cfg = replace(cfg, linear_only=True)
            return cmd_simulate(cfg, args.out)
        if args.command == "linear-decay":
            cfg = parse_config(args.config)
            if args.seed is not None:
                cfg = replace(cfg, seed=args.seed)
            return cmd_linear_decay(cfg, args.out)
        if args.command == "verify":
            return cmd_verify(args.which, args.out, args.seed, args.n_per_region)
        if args.command == "report":
            return cmd_report(args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except EmptySweep as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return 3
    except (MHD2DError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
