"""End-to-end experiments: test videos, the full reconstruction run, sweeps.

A run wires the stages together: draw a pattern, acquire, estimate states
from the invariant samples, recover the observation matrix by ADMM from all
samples, and score the product C X against ground truth.  Sub-seeds for the
video, the pattern, and the acquisition noise are derived from the single
experiment seed so the stages never share a stream.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .admm import (
    AdmmHistory,
    AdmmParams,
    ConvergenceCheck,
    ReconstructionProblem,
    canonicalize_states,
    resolve_regularization,
    solve,
    validate_convergence_condition,
)
from .core import (
    FrameGeometry,
    LdsModel,
    ObservationMatrix,
    StateSequence,
    Video,
    reconstruction_snr,
    snr_db,
)
from .sampling import (
    KTMeasurements,
    SamplingDensity,
    SamplingPattern,
    acquire,
    generate_pattern,
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
from .transforms import WaveletOp, _idft2_cols

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "RunArtifacts",
    "synthesize_lds_video",
    "phantom_video",
    "center_crop_frames",
    "lds_approximation_curve",
    "zero_fill_baseline",
    "run_ktcslds",
    "SweepRow",
    "sweep",
    "write_sweep_csv",
    "write_timings_csv",
    "write_history_csv",
    "write_spectrum_csv",
    "write_curve_csv",
    "write_pgm_frames",
]

THREADS_ENV = "KTCSLDS_THREADS"


@dataclass
class ExperimentConfig:
    """Everything a run needs.  rate is the compression factor n / m."""

    nx: int = 64
    ny: int = 64
    l: int = 64
    density: str = "distance"
    rate: float = 10.0
    split: float = 0.5
    d: int | None = None
    # stricter than select_order's own default: the order search must not
    # stop short on sources whose trailing modes carry little energy
    energy_fraction: float = 0.9999
    noise_sigma: float = 0.0
    estimator: str = "svd"
    hankel_depth: int = 1
    wavelet: str = "haar"
    video_source: str = "phantom"
    period: int = 16
    lds_d: int = 4
    lds_rho: float = 0.95
    lds_sparsity: int | None = None
    seed: int = 0
    admm: AdmmParams = field(default_factory=AdmmParams)
    sor: SorParams = field(default_factory=SorParams)

    def __post_init__(self) -> None:
        SamplingDensity(self.density)
        if self.rate < 1:
            raise ValueError("compression rate must be >= 1")
        if not (0 < self.split < 1):
            raise ValueError("split must lie strictly inside (0, 1)")
        if self.estimator not in ("svd", "sor"):
            raise ValueError("estimator must be 'svd' or 'sor'")
        if self.video_source not in ("phantom", "lds"):
            raise ValueError("video_source must be 'phantom' or 'lds'")
        if self.hankel_depth < 1:
            raise ValueError("hankel_depth must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.d is not None and self.d < 1:
            raise ValueError("d must be >= 1 when given")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")

    @property
    def geometry(self) -> FrameGeometry:
        return FrameGeometry(self.nx, self.ny)

    def budget(self) -> tuple[int, int]:
        """Per-frame sample counts (m_invariant, m_variant) from rate and split."""
        n = self.nx * self.ny
        m = max(1, round(n / self.rate))
        m_inv = min(max(1, round(self.split * m)), m)
        return m_inv, m - m_inv

    def to_dict(self) -> dict:
        out = asdict(self)
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "admm" in doc and isinstance(doc["admm"], dict):
            extra = set(doc["admm"]) - set(AdmmParams.__dataclass_fields__)
            if extra:
                raise ValueError(f"unknown admm keys: {sorted(extra)}")
            doc["admm"] = AdmmParams(**doc["admm"])
        if "sor" in doc and isinstance(doc["sor"], dict):
            extra = set(doc["sor"]) - set(SorParams.__dataclass_fields__)
            if extra:
                raise ValueError(f"unknown sor keys: {sorted(extra)}")
            doc["sor"] = SorParams(**doc["sor"])
        return cls(**doc)


def synthesize_lds_video(
    geometry: FrameGeometry,
    d: int,
    l: int,
    rho: float = 0.95,
    sparsity: int | None = None,
    seed: int = 0,
    process_noise: float = 1.0,
    obs_noise: float = 0.0,
    wavelet: WaveletOp | None = None,
) -> tuple[Video, LdsModel]:
    """Random video from a planted linear dynamical system.

    The observation matrix has orthonormal columns whose wavelet images
    share one random row support of the given size, so the ground truth is
    jointly row-sparse; A is scaled to the requested spectral radius.
    With obs_noise = 0 the video has rank at most d.
    """
    n = geometry.n
    if d < 1 or l < d:
        raise ValueError("need 1 <= d <= l")
    if rho < 0:
        raise ValueError("spectral radius must be nonnegative")
    if sparsity is None:
        sparsity = max(d, n // 16)
    if not (d <= sparsity <= n):
        raise ValueError(f"sparsity must lie in [{d}, {n}]")
    if seed < 0:
        raise ValueError("seed must be nonnegative")

    rng = np.random.default_rng(seed)
    wav = wavelet if wavelet is not None else WaveletOp(geometry)

    W = np.zeros((n, d))
    support = rng.choice(n, size=sparsity, replace=False)
    W[support, :] = rng.standard_normal((sparsity, d))
    C_raw = wav.adjoint_matrix(W)
    Q, R = np.linalg.qr(C_raw)
    if np.min(np.abs(np.diag(R))) <= 1e-10 * max(np.max(np.abs(np.diag(R))), 1e-300):
        raise ValueError("degenerate support draw; raise sparsity or change seed")
    C = Q

    A = rng.standard_normal((d, d))
    ev = float(np.max(np.abs(np.linalg.eigvals(A))))
    A = A * (rho / ev) if ev > 0 else np.zeros((d, d))

    x0 = rng.standard_normal(d)
    X = np.empty((d, l))
    x = x0
    for t in range(l):
        x = A @ x + process_noise * rng.standard_normal(d)
        X[:, t] = x

    Y = C @ X
    if obs_noise > 0:
        Y = Y + obs_noise * rng.standard_normal((n, l))

    model = LdsModel(
        C=ObservationMatrix(geometry, C),
        A=A,
        Q=(process_noise**2) * np.eye(d),
        R=obs_noise**2,
        x0=x0,
    )
    return Video(geometry, Y), model


def phantom_video(
    geometry: FrameGeometry,
    l: int,
    period: int = 16,
    seed: int = 0,
    kind: str = "beating_ring",
) -> Video:
    """Deterministic pulsing-ring phantom, exactly periodic in t with the
    given period.

    Frames are a fixed background plus a handful of fixed spatial patterns
    with sinusoidal temporal weights, so the video has low rank by
    construction and values stay inside [0, 1].  The seed jitters the
    geometry (centers, radius, phases) without changing the structure.
    """
    if kind != "beating_ring":
        raise ValueError(f"unknown phantom kind {kind!r}")
    if l < 1 or period < 1:
        raise ValueError("need l >= 1 and period >= 1")
    if seed < 0:
        raise ValueError("seed must be nonnegative")

    rng = np.random.default_rng(seed)
    cx, cy = 0.06 * rng.standard_normal(2)
    axis = 1.0 + 0.12 * rng.uniform(-1, 1)
    phase0, phase1 = 2 * math.pi * rng.uniform(0, 1, size=2)
    bx, by = 0.35 * rng.uniform(-1, 1, size=2)
    radii = np.array([0.28, 0.45, 0.62]) * (1.0 + 0.04 * rng.uniform(-1, 1))
    lobes = rng.integers(7, 11)
    ang0 = 2 * math.pi * rng.uniform(0, 1)
    # walls one or two pixels thick with transitions under a pixel: sharp
    # edges put spectral energy in the slowly decaying mid/high shells, which
    # is what separates the sampling densities
    half = max(0.012, 1.2 / min(geometry.nx, geometry.ny))
    edge = max(0.006, 0.6 / min(geometry.nx, geometry.ny))

    u = np.linspace(-1.0, 1.0, geometry.nx, endpoint=False)[:, None]
    v = np.linspace(-1.0, 1.0, geometry.ny, endpoint=False)[None, :]
    r = np.sqrt((u - cx) ** 2 + (axis * (v - cy)) ** 2)
    theta = np.arctan2(v - cy, u - cx)
    # scalloped walls spread the ring spectra azimuthally instead of leaving
    # them concentrated on a few radial ripples
    scallop = 1.0 + 0.08 * np.cos(lobes * theta + ang0)
    rings = np.zeros_like(r)
    wobble = np.zeros_like(r)
    for r0 in radii:
        ri, ro = (r0 - half) * scallop, (r0 + half) * scallop
        rings += 1.0 / (1.0 + np.exp(-(r - ri) / edge)) / (1.0 + np.exp(-(ro - r) / edge))
        # wall translation pattern: ridges at the two edges
        wobble += np.exp(-((r - ro) ** 2) / (2 * edge**2)) - np.exp(-((r - ri) ** 2) / (2 * edge**2))
    blob = np.exp(-(((u - bx) ** 2 + (v - by) ** 2) / 0.015) ** 2)
    # band-passed speckle over the annular tissue region: texture the
    # baseline cannot extrapolate from low-frequency samples alone; two
    # separate bands so the spectrum keeps a fat mid and high tail
    region = (1.0 / (1.0 + np.exp(-(r - radii[0] + half) / 0.02))
              / (1.0 + np.exp(-(radii[-1] + half - r) / 0.02)))
    kx = np.fft.fftfreq(geometry.nx)[:, None]
    ky = np.fft.fftfreq(geometry.ny)[None, :]
    k2 = kx**2 + ky**2

    def bandpass_speckle(lo: float, hi: float) -> np.ndarray:
        band = (k2 >= lo**2) & (k2 <= hi**2)
        white = rng.standard_normal((geometry.nx, geometry.ny))
        spk = np.fft.ifft2(np.fft.fft2(white) * band).real * region
        return spk / max(np.max(np.abs(spk)), 1e-300)

    tex_mid_static = bandpass_speckle(0.125, 0.19)
    tex_hi_static = bandpass_speckle(0.28, 0.44)
    tex_mid = bandpass_speckle(0.125, 0.19)
    tex_hi = bandpass_speckle(0.28, 0.44)
    base = (0.21 + 0.1 * np.exp(-(r**2) / 0.5) + 0.13 * rings
            + 0.09 * tex_mid_static + 0.08 * tex_hi_static)

    frames = np.empty((geometry.nx, geometry.ny, l))
    for t in range(l):
        phase = 2 * math.pi * ((t % period) / period)
        s1 = math.sin(phase + phase0)
        c1 = math.cos(phase + phase0)
        s2 = math.sin(2 * phase + phase1)
        c2 = math.cos(2 * phase + phase1)
        frame = (base + s1 * (0.12 * wobble + 0.1 * tex_mid) + 0.11 * c1 * rings
                 + 0.05 * s2 * blob + 0.14 * c2 * tex_hi)
        frames[:, :, t] = frame
    np.clip(frames, 0.0, 1.0, out=frames)
    return Video.from_frames(frames, geometry)


def center_crop_frames(frames: np.ndarray) -> Video:
    """Crop an (nx, ny, l) stack to the largest centered power-of-two box.

    Entry point for externally supplied data whose sides are not powers of
    two; nothing is ever padded.
    """
    f = np.asarray(frames, dtype=np.float64)
    if f.ndim != 3:
        raise ValueError("expected an (nx, ny, l) stack")
    nx, ny, _ = f.shape

    def pow2_floor(k: int) -> int:
        if k < 2:
            raise ValueError("frames smaller than 2 pixels per side cannot be cropped")
        p = 1
        while p * 2 <= k:
            p *= 2
        return p

    cx, cy = pow2_floor(nx), pow2_floor(ny)
    ox, oy = (nx - cx) // 2, (ny - cy) // 2
    cropped = f[ox : ox + cx, oy : oy + cy, :]
    return Video.from_frames(cropped, FrameGeometry(cx, cy))


def lds_approximation_curve(video: Video, d_max: int | None = None) -> list[tuple[int, float]]:
    """Best-possible reconstruction SNR of a rank-d model, for d = 1..d_max.

    This is the truncated-SVD bound: any estimator of the form C X with d
    states can do no better.  Exact-rank tails give an infinite SNR.
    """
    s = np.linalg.svd(video.data, compute_uv=False)
    full = min(video.data.shape)
    if d_max is None:
        d_max = full
    if not (1 <= d_max <= full):
        raise ValueError(f"d_max must lie in [1, {full}]")
    energies = s * s
    total = float(energies.sum())
    if total == 0:
        raise ValueError("video is identically zero")
    tails = total - np.cumsum(energies)
    # roundoff floor: tails below this are an exact fit for our purposes
    floor = total * (np.finfo(np.float64).eps * max(video.data.shape)) ** 2
    out = []
    for d in range(1, d_max + 1):
        tail = float(tails[d - 1])
        if tail <= floor:
            out.append((d, math.inf))
        else:
            out.append((d, 10.0 * math.log10(total / tail)))
    return out


def zero_fill_baseline(measurements: KTMeasurements) -> Video:
    """Scatter every frame's samples onto the grid, inverse DFT, keep the
    real part.  The standard non-dynamic reference reconstruction."""
    pattern = measurements.pattern
    n = pattern.geometry.n
    buf = np.zeros((n, pattern.l), dtype=np.complex128)
    for t in range(pattern.l):
        buf[pattern.frame_mask(t), t] = measurements.frame_measurements(t)
    return Video(pattern.geometry, _idft2_cols(buf, pattern.geometry).real)


@dataclass
class ExperimentReport:
    """Scored summary of one run; everything needed to reproduce it."""

    snr_db: float
    baseline_snr_db: float
    per_frame_snr: list[float]
    d: int
    estimator: str
    m_invariant: int
    m_variant: int
    alpha: float
    beta: float
    admm_iterations: int
    admm_status: str
    admm_converged: bool
    best_objective: float
    validator: dict
    seeds: dict
    timings: dict
    config: dict

    def to_json_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunArtifacts:
    """Intermediate products of a run, for callers that persist them."""

    truth: Video
    pattern: SamplingPattern
    measurements: KTMeasurements
    spectrum: np.ndarray
    states: StateSequence
    c_hat: ObservationMatrix
    history: AdmmHistory
    baseline: Video
    reconstruction: Video


def _derive_seeds(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    video_seed, pattern_seed, acquire_seed = (
        int(x) for x in rng.integers(0, 2**63, size=3)
    )
    return {"video": video_seed, "pattern": pattern_seed, "acquire": acquire_seed}


def run_ktcslds(
    config: ExperimentConfig,
    video: Video | None = None,
    return_artifacts: bool = False,
):
    """Full acquisition + reconstruction experiment.

    When no video is given one is generated per config.video_source.
    Returns (reconstruction, report), or (reconstruction, report, artifacts)
    with return_artifacts=True.
    """
    geometry = config.geometry
    seeds = _derive_seeds(config.seed)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    if video is None:
        if config.video_source == "phantom":
            video = phantom_video(geometry, config.l, period=config.period, seed=seeds["video"])
        else:
            video, _ = synthesize_lds_video(
                geometry,
                d=config.lds_d,
                l=config.l,
                rho=config.lds_rho,
                sparsity=config.lds_sparsity,
                seed=seeds["video"],
            )
    elif video.geometry != geometry or video.l != config.l:
        raise ValueError("provided video does not match the config geometry/length")
    timings["video_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    m_inv, m_var = config.budget()
    pattern = generate_pattern(
        geometry, config.l, m_inv, m_var, config.density, seed=seeds["pattern"]
    )
    measurements = acquire(video, pattern, config.noise_sigma, seed=seeds["acquire"])
    timings["acquire_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    spectrum = hankel_singular_values(measurements.invariant_data, config.hankel_depth)
    d = config.d if config.d is not None else select_order(spectrum, config.energy_fraction)
    d = min(d, int(spectrum.size))
    if config.estimator == "svd":
        states, _ = estimate_states_svd(measurements.invariant_data, d, config.hankel_depth)
        if states.l < config.l:
            A = estimate_transition(states)
            states = extend_states(states, A, config.l)
    else:
        states = estimate_states_sor(measurements.invariant_data, d, config.sor).states
    timings["states_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    wavelet = WaveletOp(geometry, config.wavelet)
    # validate against the realization the solver actually iterates on
    problem = ReconstructionProblem(measurements, canonicalize_states(states)[0], wavelet)
    alpha, beta = resolve_regularization(config.admm, problem)
    check = validate_convergence_condition(
        problem, alpha, beta, config.admm.mu, config.admm.gamma
    )
    timings["validate_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    c_hat, history = solve(measurements, states, config.admm, wavelet)
    timings["admm_s"] = time.perf_counter() - t0

    reconstruction = Video(geometry, c_hat.data @ states.data)
    baseline = zero_fill_baseline(measurements)
    per_frame = []
    for t in range(config.l):
        ref = video.data[:, t]
        per_frame.append(
            snr_db(ref, reconstruction.data[:, t]) if np.any(ref) else math.nan
        )

    report = ExperimentReport(
        snr_db=reconstruction_snr(video, reconstruction),
        baseline_snr_db=reconstruction_snr(video, baseline),
        per_frame_snr=per_frame,
        d=d,
        estimator=config.estimator,
        m_invariant=m_inv,
        m_variant=m_var,
        alpha=alpha,
        beta=beta,
        admm_iterations=history.iterations,
        admm_status=history.status,
        admm_converged=history.converged,
        best_objective=history.best_objective,
        validator={
            "satisfied": check.satisfied,
            "margin": check.margin,
            "hg_norm": check.hg_norm,
            "value": check.value,
            "message": check.message,
        },
        seeds=seeds,
        timings=timings,
        config=config.to_dict(),
    )

    if return_artifacts:
        artifacts = RunArtifacts(
            truth=video,
            pattern=pattern,
            measurements=measurements,
            spectrum=spectrum,
            states=states,
            c_hat=c_hat,
            history=history,
            baseline=baseline,
            reconstruction=reconstruction,
        )
        return reconstruction, report, artifacts
    return reconstruction, report


# --- sweeps --------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    density: str
    rate: float
    seed: int
    snr_db: float
    baseline_snr_db: float
    d: int
    iterations: int
    status: str
    runtime_s: float


def _max_workers(requested: int | None) -> int:
    cap = os.environ.get(THREADS_ENV)
    limit = int(cap) if cap else (os.cpu_count() or 1)
    if limit < 1:
        limit = 1
    return max(1, min(requested or limit, limit))


def _sweep_one(config: ExperimentConfig) -> SweepRow:
    start = time.perf_counter()
    try:
        _, report = run_ktcslds(config)
        return SweepRow(
            density=config.density,
            rate=config.rate,
            seed=config.seed,
            snr_db=report.snr_db,
            baseline_snr_db=report.baseline_snr_db,
            d=report.d,
            iterations=report.admm_iterations,
            status="ok",
            runtime_s=time.perf_counter() - start,
        )
    except Exception as exc:  # per-config failures must not kill the sweep
        return SweepRow(
            density=config.density,
            rate=config.rate,
            seed=config.seed,
            snr_db=math.nan,
            baseline_snr_db=math.nan,
            d=0,
            iterations=0,
            status=f"error: {exc}",
            runtime_s=time.perf_counter() - start,
        )


def sweep(configs: list[ExperimentConfig], workers: int | None = None) -> list[SweepRow]:
    """Run several configurations, in input order, optionally in parallel.

    Worker count is capped by the KTCSLDS_THREADS environment variable.
    Failures are recorded in the row status and do not stop the sweep.
    """
    if not configs:
        return []
    nworkers = _max_workers(workers)
    if nworkers == 1 or len(configs) == 1:
        return [_sweep_one(c) for c in configs]
    with ThreadPoolExecutor(max_workers=nworkers) as pool:
        return list(pool.map(_sweep_one, configs))


def _fmt(x: float) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def write_sweep_csv(rows: list[SweepRow], path: str | Path) -> None:
    """Deterministic sweep summary (no wall-clock columns)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["density", "rate", "seed", "snr_db", "baseline_snr_db", "d", "iterations", "status"])
        for r in rows:
            w.writerow(
                [r.density, _fmt(r.rate), r.seed, _fmt(r.snr_db), _fmt(r.baseline_snr_db), r.d, r.iterations, r.status]
            )


def write_timings_csv(rows: list[SweepRow], path: str | Path) -> None:
    """Wall-clock per run, kept out of the deterministic summary."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["density", "rate", "seed", "runtime_s"])
        for r in rows:
            w.writerow([r.density, _fmt(r.rate), r.seed, _fmt(r.runtime_s)])


def write_history_csv(history: AdmmHistory, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "objective", "fidelity", "u_residual", "v_residual", "rel_change"])
        for i in range(history.iterations):
            w.writerow(
                [
                    i + 1,
                    _fmt(history.objective[i]),
                    _fmt(history.fidelity[i]),
                    _fmt(history.u_residual[i]),
                    _fmt(history.v_residual[i]),
                    _fmt(history.rel_change[i]),
                ]
            )


def write_spectrum_csv(spectrum: np.ndarray, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "singular_value"])
        for i, s in enumerate(np.asarray(spectrum, dtype=np.float64)):
            w.writerow([i + 1, _fmt(float(s))])


def write_curve_csv(curve: list[tuple[int, float]], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["d", "snr_db"])
        for d, v in curve:
            w.writerow([d, _fmt(v)])


def write_pgm_frames(video: Video, directory: str | Path, prefix: str = "frame") -> list[Path]:
    """Dump every frame as an 8-bit binary PGM, min-max normalized over the
    whole video so frames share one gray scale.  No comment lines, so the
    bytes depend only on the pixels."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lo = float(video.data.min())
    hi = float(video.data.max())
    span = hi - lo
    digits = max(3, len(str(video.l - 1)))
    paths = []
    for t in range(video.l):
        frame = video.frame(t)
        if span > 0:
            img = np.round((frame - lo) / span * 255.0)
        else:
            img = np.zeros_like(frame)
        img = img.astype(np.uint8)
        header = f"P5\n{frame.shape[1]} {frame.shape[0]}\n255\n".encode("ascii")
        p = directory / f"{prefix}_{t:0{digits}d}.pgm"
        p.write_bytes(header + img.tobytes())
        paths.append(p)
    return paths
