"""Command line front end.

Every command that writes artifacts drops a manifest.json beside them with
the resolved options and the seed, and re-running from that manifest (run
and sweep accept it directly via --config) reproduces the outputs.  Exit
codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .admm import AdmmParams, solve, validate_convergence_condition
from .core import (
    FrameGeometry,
    ObservationMatrix,
    Video,
    load_states,
    load_video,
    save_states,
    save_video,
)
from .pipeline import (
    ExperimentConfig,
    SweepRow,
    lds_approximation_curve,
    phantom_video,
    run_ktcslds,
    sweep,
    synthesize_lds_video,
    write_curve_csv,
    write_history_csv,
    write_pgm_frames,
    write_spectrum_csv,
    write_sweep_csv,
    write_timings_csv,
)
from .sampling import (
    SamplingDensity,
    acquire,
    generate_pattern,
    load_measurements,
    load_pattern,
    save_measurements,
    save_pattern,
)
from .sysid import (
    SorParams,
    estimate_states_sor,
    estimate_states_svd,
    estimate_transition,
    extend_states,
    hankel_singular_values,
    select_order,
)
from .transforms import WaveletOp
from .admm import ReconstructionProblem, canonicalize_states, resolve_regularization

__all__ = ["parse_and_dispatch", "main", "validate_config"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through exceptions, so the
    dispatcher controls the exit code."""

    def error(self, message):  # noqa: A003 - argparse API
        raise _UsageError(message)


def validate_config(config: ExperimentConfig) -> list[str]:
    """Cross-field checks on a resolved configuration.

    Hard problems raise ValueError; the return value is a list of advisory
    warnings (printed, never fatal).
    """
    warnings: list[str] = []
    n = config.geometry.n
    m_inv, m_var = config.budget()
    if m_inv + m_var > n:
        raise ValueError(f"per-frame budget {m_inv}+{m_var} exceeds the grid size {n}")
    if config.rate < 2:
        warnings.append(f"compression rate {config.rate:g} is barely compressive")
    if m_var == 0:
        warnings.append("no variant samples: every frame sees the same mask")
    if m_inv < 8:
        warnings.append(f"only {m_inv} invariant samples; state estimates may be poor")
    if config.d is not None and config.d > 2 * m_inv * config.hankel_depth:
        raise ValueError(
            f"order d={config.d} exceeds the Hankel row count {2 * m_inv * config.hankel_depth}"
        )
    if config.d is not None and config.d > config.l - config.hankel_depth + 1:
        raise ValueError("order d exceeds the number of Hankel columns")
    if config.admm.gamma >= 2:
        warnings.append(
            f"gamma = {config.admm.gamma:g}: the sufficient convergence condition "
            "max(alpha*mu, beta*mu)/(1/mu - ||H_g||) + gamma < 2 cannot hold for "
            "any data; the dual step has no guarantee"
        )
    return warnings


# --- option plumbing -----------------------------------------------------------

_CONFIG_FLAG_MAP = {
    # flag dest -> config key
    "nx": "nx",
    "ny": "ny",
    "frames": "l",
    "density": "density",
    "rate": "rate",
    "split": "split",
    "order": "d",
    "energy_fraction": "energy_fraction",
    "noise_sigma": "noise_sigma",
    "estimator": "estimator",
    "depth": "hankel_depth",
    "wavelet": "wavelet",
    "source": "video_source",
    "period": "period",
    "seed": "seed",
}

_ADMM_FLAG_MAP = {
    "alpha": "alpha",
    "beta": "beta",
    "mu": "mu",
    "gamma": "gamma",
    "step": "delta",
    "max_iters": "max_iters",
    "tol_rel": "tol_rel",
    "tol_feas": "tol_feas",
}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("experiment")
    s = argparse.SUPPRESS
    g.add_argument("--nx", type=int, default=s)
    g.add_argument("--ny", type=int, default=s)
    g.add_argument("--frames", type=int, default=s, help="video length l")
    g.add_argument("--density", choices=[k.value for k in SamplingDensity], default=s)
    g.add_argument("--rate", type=float, default=s, help="compression factor n/m")
    g.add_argument("--split", type=float, default=s, help="invariant share of the budget")
    g.add_argument("--order", type=int, default=s, help="model order d (default: selected from the spectrum)")
    g.add_argument("--energy-fraction", type=float, default=s)
    g.add_argument("--noise-sigma", type=float, default=s)
    g.add_argument("--estimator", choices=["svd", "sor"], default=s)
    g.add_argument("--depth", type=int, default=s, help="Hankel block depth")
    g.add_argument("--wavelet", choices=["haar", "db4"], default=s)
    g.add_argument("--source", choices=["phantom", "lds"], default=s, help="video source")
    g.add_argument("--period", type=int, default=s, help="phantom period")
    g.add_argument("--seed", type=int, default=s)
    a = p.add_argument_group("solver")
    a.add_argument("--alpha", type=float, default=s)
    a.add_argument("--beta", type=float, default=s)
    a.add_argument("--mu", type=float, default=s)
    a.add_argument("--gamma", type=float, default=s)
    a.add_argument("--step", type=float, default=s, help="prox-linear step size delta")
    a.add_argument("--max-iters", type=int, default=s)
    a.add_argument("--tol-rel", type=float, default=s)
    a.add_argument("--tol-feas", type=float, default=s)


def _load_config_file(path: Path) -> dict:
    if not path.exists():
        raise _UsageError(f"config file not found: {path}")
    if path.suffix.lower() == ".toml":
        try:
            import tomllib  # type: ignore[import-not-found]
        except ModuleNotFoundError:
            import tomli as tomllib
        try:
            with path.open("rb") as fh:
                doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise _UsageError(f"config file {path} is not valid TOML: {exc}") from exc
    else:
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise _UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise _UsageError(f"config file {path} must hold a table/object")
    # a run manifest wraps the config; accept it directly
    if "config" in doc and isinstance(doc["config"], dict):
        doc = doc["config"]
    return doc


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """defaults < config file < explicit flags."""
    merged = ExperimentConfig().to_dict()
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        file_doc = _load_config_file(Path(cfg_path))
        for key, value in file_doc.items():
            if key in ("admm", "sor") and isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key].update(value)
            else:
                merged[key] = value
    for dest, key in _CONFIG_FLAG_MAP.items():
        if hasattr(args, dest):
            merged[key] = getattr(args, dest)
    for dest, key in _ADMM_FLAG_MAP.items():
        if hasattr(args, dest):
            merged["admm"][key] = getattr(args, dest)
    try:
        config = ExperimentConfig.from_dict(merged)
        for w in validate_config(config):
            print(f"warning: {w}", file=sys.stderr)
    except (TypeError, ValueError) as exc:
        raise _UsageError(str(exc)) from exc
    return config


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, command: str, payload: dict) -> None:
    doc = {"command": command, "version": __version__, **payload}
    (out / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _geometry(args: argparse.Namespace) -> FrameGeometry:
    try:
        return FrameGeometry(args.nx, args.ny)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


# --- commands -------------------------------------------------------------------


def _cmd_phantom(args: argparse.Namespace) -> int:
    geometry = _geometry(args)
    video = phantom_video(geometry, args.frames, period=args.period, seed=args.seed)
    out = _out_dir(args)
    save_video(video, out / "video")
    _write_manifest(
        out,
        "phantom",
        {
            "seed": args.seed,
            "options": {
                "nx": args.nx,
                "ny": args.ny,
                "frames": args.frames,
                "period": args.period,
                "seed": args.seed,
            },
        },
    )
    print(f"wrote {out / 'video'}.json/.raw ({args.frames} frames)")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    geometry = _geometry(args)
    video, model = synthesize_lds_video(
        geometry,
        d=args.order,
        l=args.frames,
        rho=args.rho,
        sparsity=args.sparsity,
        seed=args.seed,
        process_noise=args.process_noise,
        obs_noise=args.obs_noise,
    )
    out = _out_dir(args)
    save_video(video, out / "video")
    save_video(Video(geometry, model.C.data), out / "c_true")
    (out / "model.json").write_text(
        json.dumps(
            {
                "d": model.d,
                "A": model.A.tolist(),
                "x0": model.x0.tolist(),
                "spectral_radius": model.spectral_radius,
                "process_noise": args.process_noise,
                "obs_noise": args.obs_noise,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    _write_manifest(
        out,
        "synth",
        {
            "seed": args.seed,
            "options": {
                "nx": args.nx,
                "ny": args.ny,
                "order": args.order,
                "frames": args.frames,
                "rho": args.rho,
                "sparsity": args.sparsity,
                "process_noise": args.process_noise,
                "obs_noise": args.obs_noise,
                "seed": args.seed,
            },
        },
    )
    print(f"wrote {out / 'video'}.json/.raw and model.json (d={model.d})")
    return 0


def _cmd_sample(args: argparse.Namespace) -> int:
    geometry = _geometry(args)
    n = geometry.n
    if args.m_bar is not None:
        if getattr(args, "rate", None) is not None:
            raise _UsageError("give either --m-bar/--m-tilde or --rate/--split, not both")
        m_inv, m_var = args.m_bar, args.m_tilde
    else:
        rate = args.rate if args.rate is not None else 10.0
        split = args.split if args.split is not None else 0.5
        if rate < 1:
            raise _UsageError("rate must be >= 1")
        if not (0 < split < 1):
            raise _UsageError("split must lie strictly inside (0, 1)")
        m = max(1, round(n / rate))
        m_inv = min(max(1, round(split * m)), m)
        m_var = m - m_inv
    try:
        pattern = generate_pattern(geometry, args.frames, m_inv, m_var, args.density, seed=args.seed)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    out = _out_dir(args)
    save_pattern(pattern, out / "pattern.json")
    _write_manifest(
        out,
        "sample",
        {
            "seed": args.seed,
            "options": {
                "nx": args.nx,
                "ny": args.ny,
                "frames": args.frames,
                "m_bar": m_inv,
                "m_tilde": m_var,
                "density": args.density,
                "seed": args.seed,
            },
        },
    )
    print(f"wrote {out / 'pattern.json'} (m = {m_inv}+{m_var} per frame)")
    return 0


def _cmd_acquire(args: argparse.Namespace) -> int:
    video = load_video(args.video)
    pattern = load_pattern(args.pattern)
    meas = acquire(video, pattern, noise_sigma=args.noise_sigma, seed=args.seed)
    out = _out_dir(args)
    save_measurements(meas, out / "measurements")
    _write_manifest(
        out,
        "acquire",
        {
            "seed": args.seed,
            "options": {
                "video": str(args.video),
                "pattern": str(args.pattern),
                "noise_sigma": args.noise_sigma,
                "seed": args.seed,
            },
        },
    )
    print(f"wrote {out / 'measurements'}.json/.raw")
    return 0


def _cmd_states(args: argparse.Namespace) -> int:
    pattern = load_pattern(args.pattern)
    meas = load_measurements(args.measurements, pattern)
    spectrum = hankel_singular_values(meas.invariant_data, args.depth)
    d = args.order if args.order is not None else select_order(spectrum, args.energy_fraction)
    d = min(d, int(spectrum.size))
    if args.estimator == "svd":
        states, _ = estimate_states_svd(meas.invariant_data, d, args.depth)
        if states.l < pattern.l:
            states = extend_states(states, estimate_transition(states), pattern.l)
    else:
        states = estimate_states_sor(meas.invariant_data, d).states
    out = _out_dir(args)
    save_states(states, out / "states")
    write_spectrum_csv(spectrum, out / "spectrum.csv")
    _write_manifest(
        out,
        "states",
        {
            "options": {
                "measurements": str(args.measurements),
                "pattern": str(args.pattern),
                "order": d,
                "energy_fraction": args.energy_fraction,
                "estimator": args.estimator,
                "depth": args.depth,
            }
        },
    )
    print(f"wrote {out / 'states'}.json/.raw (d={d}) and spectrum.csv")
    return 0


def _build_admm_params(args: argparse.Namespace) -> AdmmParams:
    kwargs = {}
    for dest, key in _ADMM_FLAG_MAP.items():
        if hasattr(args, dest):
            kwargs[key] = getattr(args, dest)
    try:
        return AdmmParams(**kwargs)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


def _cmd_reconstruct(args: argparse.Namespace) -> int:
    pattern = load_pattern(args.pattern)
    meas = load_measurements(args.measurements, pattern)
    states = load_states(args.states)
    params = _build_admm_params(args)
    wavelet = WaveletOp(pattern.geometry, getattr(args, "wavelet", "haar"))

    problem = ReconstructionProblem(meas, canonicalize_states(states)[0], wavelet)
    alpha, beta = resolve_regularization(params, problem)
    check = validate_convergence_condition(problem, alpha, beta, params.mu, params.gamma)
    if not check.satisfied:
        print(f"warning: {check.message}", file=sys.stderr)

    c_hat, history = solve(meas, states, params, wavelet)
    recon = Video(pattern.geometry, c_hat.data @ states.data)

    out = _out_dir(args)
    save_video(Video(pattern.geometry, c_hat.data), out / "c_hat")
    save_video(recon, out / "reconstruction")
    write_history_csv(history, out / "history.csv")
    summary = {
        "status": history.status,
        "converged": history.converged,
        "iterations": history.iterations,
        "best_objective": history.best_objective,
        "alpha": alpha,
        "beta": beta,
        "validator": asdict(check),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if args.pgm:
        write_pgm_frames(recon, out / "pgm")
    _write_manifest(
        out,
        "reconstruct",
        {
            "options": {
                "measurements": str(args.measurements),
                "pattern": str(args.pattern),
                "states": str(args.states),
                "wavelet": getattr(args, "wavelet", "haar"),
                "alpha": alpha,
                "beta": beta,
                "mu": params.mu,
                "gamma": params.gamma,
                "delta": params.delta,
                "max_iters": params.max_iters,
                "tol_rel": params.tol_rel,
                "tol_feas": params.tol_feas,
                "pgm": bool(args.pgm),
            }
        },
    )
    print(f"reconstruction done: {history.status} after {history.iterations} iterations")
    return 0


def _write_run_summary_csv(report, path: Path) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["density", "rate", "seed", "snr_db", "baseline_snr_db", "d", "iterations", "status"])
        cfg = report.config
        w.writerow(
            [
                cfg["density"],
                format(float(cfg["rate"]), ".12g"),
                cfg["seed"],
                format(report.snr_db, ".12g"),
                format(report.baseline_snr_db, ".12g"),
                report.d,
                report.admm_iterations,
                report.admm_status,
            ]
        )


def _cmd_run(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    video = None
    if args.video:
        video = load_video(args.video)
        if (video.geometry.nx, video.geometry.ny, video.l) != (config.nx, config.ny, config.l):
            config = ExperimentConfig.from_dict(
                {
                    **config.to_dict(),
                    "nx": video.geometry.nx,
                    "ny": video.geometry.ny,
                    "l": video.l,
                }
            )
    recon, report, artifacts = run_ktcslds(config, video=video, return_artifacts=True)
    if not report.validator["satisfied"]:
        print(f"warning: {report.validator['message']}", file=sys.stderr)

    out = _out_dir(args)
    save_video(artifacts.truth, out / "truth")
    save_pattern(artifacts.pattern, out / "pattern.json")
    save_measurements(artifacts.measurements, out / "measurements")
    write_spectrum_csv(artifacts.spectrum, out / "spectrum.csv")
    save_states(artifacts.states, out / "states")
    save_video(Video(config.geometry, artifacts.c_hat.data), out / "c_hat")
    save_video(recon, out / "reconstruction")
    write_history_csv(artifacts.history, out / "history.csv")
    # wall-clock goes to its own file so report.json is bit-reproducible
    report_doc = report.to_json_dict()
    timings = report_doc.pop("timings")
    (out / "report.json").write_text(json.dumps(report_doc, indent=2, sort_keys=True) + "\n")
    (out / "timings.json").write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n")
    _write_run_summary_csv(report, out / "summary.csv")
    if args.pgm:
        write_pgm_frames(recon, out / "pgm")
    manifest_extra = {"seed": config.seed, "config": config.to_dict()}
    if args.video:
        manifest_extra["video"] = str(args.video)
    _write_manifest(out, "run", manifest_extra)
    print(
        f"run complete: snr {report.snr_db:.2f} dB "
        f"(baseline {report.baseline_snr_db:.2f} dB, d={report.d}, "
        f"{report.admm_iterations} iterations, {report.admm_status})"
    )
    return 0


def _parse_list(text: str, cast) -> list:
    try:
        return [cast(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise _UsageError(f"bad list value {text!r}") from exc


def _cmd_sweep(args: argparse.Namespace) -> int:
    base = _resolve_config(args)
    rates = _parse_list(args.rates, float) if args.rates else [base.rate]
    densities = _parse_list(args.densities, str) if args.densities else [base.density]
    seeds = _parse_list(args.seeds, int) if args.seeds else [base.seed]
    if not rates or not densities or not seeds:
        raise _UsageError("rates, densities, and seeds must be nonempty")
    for den in densities:
        try:
            SamplingDensity(den)
        except ValueError as exc:
            raise _UsageError(str(exc)) from exc

    configs = []
    base_doc = base.to_dict()
    for den in densities:
        for rate in rates:
            for seed in seeds:
                doc = json.loads(json.dumps(base_doc))
                doc.update({"density": den, "rate": rate, "seed": seed})
                configs.append(ExperimentConfig.from_dict(doc))

    rows = sweep(configs, workers=args.workers)
    out = _out_dir(args)
    write_sweep_csv(rows, out / "sweep.csv")
    write_timings_csv(rows, out / "timings.csv")
    _write_manifest(
        out,
        "sweep",
        {
            "seed": base.seed,
            "config": base_doc,
            "grid": {"densities": densities, "rates": rates, "seeds": seeds},
            "workers": args.workers,
        },
    )
    failed = sum(1 for r in rows if r.status != "ok")
    print(f"sweep complete: {len(rows)} runs, {failed} failed; wrote {out / 'sweep.csv'}")
    return 0


def _cmd_curve(args: argparse.Namespace) -> int:
    video = load_video(args.video)
    curve = lds_approximation_curve(video, d_max=args.d_max)
    out = _out_dir(args)
    write_curve_csv(curve, out / "curve.csv")
    _write_manifest(
        out,
        "curve",
        {"options": {"video": str(args.video), "d_max": args.d_max}},
    )
    print(f"wrote {out / 'curve.csv'} ({len(curve)} orders)")
    return 0


# --- parser ---------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="ktcslds",
        description="Compressive k-t video sensing with a linear dynamical system model.",
    )
    parser.add_argument("--version", action="version", version=f"ktcslds {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("phantom", help="generate the pulsing-ring phantom video")
    p.add_argument("--nx", type=int, default=128)
    p.add_argument("--ny", type=int, default=128)
    p.add_argument("--frames", type=int, default=128)
    p.add_argument("--period", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_phantom)

    p = sub.add_parser("synth", help="generate a random video from a planted LDS")
    p.add_argument("--nx", type=int, default=64)
    p.add_argument("--ny", type=int, default=64)
    p.add_argument("--order", "-d", type=int, default=4, dest="order")
    p.add_argument("--frames", type=int, default=64)
    p.add_argument("--rho", type=float, default=0.95, help="spectral radius of A")
    p.add_argument("--sparsity", type=int, default=None, help="joint wavelet row support size")
    p.add_argument("--process-noise", type=float, default=1.0)
    p.add_argument("--obs-noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("sample", help="draw a k-t sampling pattern")
    p.add_argument("--nx", type=int, default=128)
    p.add_argument("--ny", type=int, default=128)
    p.add_argument("--frames", type=int, default=128)
    p.add_argument("--m-bar", type=int, default=None, help="invariant samples per frame")
    p.add_argument("--m-tilde", type=int, default=0, help="variant samples per frame")
    p.add_argument("--rate", type=float, default=None, help="compression factor (alternative to --m-bar)")
    p.add_argument("--split", type=float, default=None, help="invariant share when using --rate")
    p.add_argument("--density", choices=[k.value for k in SamplingDensity], default="distance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("acquire", help="sample a video's spectrum on a pattern")
    p.add_argument("--video", required=True, help="video stem (without .json/.raw)")
    p.add_argument("--pattern", required=True)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_acquire)

    p = sub.add_parser("states", help="estimate the state sequence from invariant samples")
    p.add_argument("--measurements", required=True, help="measurements stem")
    p.add_argument("--pattern", required=True)
    p.add_argument("--order", "-d", type=int, default=None, dest="order")
    p.add_argument("--energy-fraction", type=float, default=0.9999)
    p.add_argument("--estimator", choices=["svd", "sor"], default="svd")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_states)

    p = sub.add_parser("reconstruct", help="recover the observation matrix by ADMM")
    p.add_argument("--measurements", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--states", required=True, help="states stem")
    p.add_argument("--wavelet", choices=["haar", "db4"], default="haar")
    s = argparse.SUPPRESS
    p.add_argument("--alpha", type=float, default=s)
    p.add_argument("--beta", type=float, default=s)
    p.add_argument("--mu", type=float, default=s)
    p.add_argument("--gamma", type=float, default=s)
    p.add_argument("--step", type=float, default=s)
    p.add_argument("--max-iters", type=int, default=s)
    p.add_argument("--tol-rel", type=float, default=s)
    p.add_argument("--tol-feas", type=float, default=s)
    p.add_argument("--pgm", action="store_true", help="dump reconstruction frames as PGM")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("run", help="full experiment: generate, sample, acquire, reconstruct, score")
    p.add_argument("--config", help="TOML or JSON config (a run manifest also works)")
    _add_config_flags(p)
    p.add_argument("--video", help="use this video stem as ground truth instead of generating one")
    p.add_argument("--pgm", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="grid of runs over rates/densities/seeds")
    p.add_argument("--config", help="base config file")
    _add_config_flags(p)
    p.add_argument("--rates", help="comma list, e.g. 10,20,30,40,50")
    p.add_argument("--densities", help="comma list of density names")
    p.add_argument("--seeds", help="comma list of seeds")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("curve", help="best rank-d approximation SNR curve of a video")
    p.add_argument("--video", required=True, help="video stem")
    p.add_argument("--d-max", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_curve)

    return parser


def parse_and_dispatch(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_help()
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(parse_and_dispatch())
