"""Variable-density k-t sampling: pattern generation and simulated acquisition.

A pattern splits each frame's budget into a time-invariant mask (shared by
every frame, always containing DC) and per-frame variant masks drawn fresh
for each t.  Acquisition evaluates the unitary 2-D DFT of each frame at the
masked bins and optionally adds complex white Gaussian noise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .core import FrameGeometry, Video
from .transforms import _dft2_cols

__all__ = [
    "SamplingDensity",
    "centered_frequencies",
    "density_pmf",
    "SamplingPattern",
    "generate_pattern",
    "KTMeasurements",
    "acquire",
    "save_pattern",
    "load_pattern",
    "save_measurements",
    "load_measurements",
]


class SamplingDensity(str, Enum):
    """Probability shape over the centered frequency grid."""

    DISTANCE = "distance"
    HYPERBOLIC = "hyperbolic"
    UNIFORM = "uniform"


def centered_frequencies(geometry: FrameGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Signed frequency coordinates of every FFT bin.

    Returns (w1, w2) of shapes (nx,) and (ny,) with values covering
    {-N/2+1, ..., N/2}; bin k maps to k for k <= N/2 and k - N beyond.
    """

    def signed(N: int) -> np.ndarray:
        k = np.arange(N)
        return np.where(k <= N // 2, k, k - N)

    return signed(geometry.nx), signed(geometry.ny)


def density_pmf(kind: SamplingDensity | str, geometry: FrameGeometry) -> np.ndarray:
    """Normalized sampling pmf over flat (vec convention) spectrum indices.

    distance decays like 1/(w1^2 + w2^2 + 1), hyperbolic like the same to
    the power 3/2, uniform is flat.
    """
    kind = SamplingDensity(kind)
    w1, w2 = centered_frequencies(geometry)
    r2 = w1[:, None].astype(np.float64) ** 2 + w2[None, :].astype(np.float64) ** 2
    if kind is SamplingDensity.DISTANCE:
        table = 1.0 / (r2 + 1.0)
    elif kind is SamplingDensity.HYPERBOLIC:
        table = (r2 + 1.0) ** -1.5
    else:
        table = np.ones_like(r2)
    flat = table.reshape(-1, order="F")
    return flat / flat.sum()


@dataclass(frozen=True)
class SamplingPattern:
    """Frozen k-t sampling design.

    invariant_mask: sorted flat indices shared by all frames (contains DC = 0).
    variant_masks: (l, m_tilde) sorted flat indices, row t for frame t,
        disjoint from the invariant mask.
    """

    geometry: FrameGeometry
    l: int
    invariant_mask: np.ndarray
    variant_masks: np.ndarray
    density: SamplingDensity
    seed: int

    def __post_init__(self) -> None:
        inv = np.asarray(self.invariant_mask, dtype=np.intp)
        var = np.asarray(self.variant_masks, dtype=np.intp)
        if self.l < 1:
            raise ValueError("pattern needs at least one frame")
        if inv.ndim != 1 or inv.size < 1:
            raise ValueError("invariant mask must be a nonempty 1-D index array")
        if var.ndim != 2 or var.shape[0] != self.l:
            raise ValueError(f"variant masks must be ({self.l}, m_tilde)")
        n = self.geometry.n
        all_idx = np.concatenate([inv, var.ravel()]) if var.size else inv
        if np.any(all_idx < 0) or np.any(all_idx >= n):
            raise ValueError(f"mask indices must lie in [0, {n})")
        if 0 not in inv:
            raise ValueError("invariant mask must contain the DC bin (index 0)")
        if np.unique(inv).size != inv.size:
            raise ValueError("invariant mask has repeated indices")
        inv_set = set(inv.tolist())
        for t in range(self.l):
            row = var[t]
            if np.unique(row).size != row.size:
                raise ValueError(f"variant mask for frame {t} has repeated indices")
            if inv_set.intersection(row.tolist()):
                raise ValueError(f"variant mask for frame {t} overlaps the invariant mask")
        object.__setattr__(self, "invariant_mask", np.sort(inv))
        object.__setattr__(self, "variant_masks", np.sort(var, axis=1))
        object.__setattr__(self, "density", SamplingDensity(self.density))

    @property
    def m_invariant(self) -> int:
        return self.invariant_mask.size

    @property
    def m_variant(self) -> int:
        return self.variant_masks.shape[1]

    @property
    def m(self) -> int:
        """Samples per frame."""
        return self.m_invariant + self.m_variant

    def frame_mask(self, t: int) -> np.ndarray:
        """All indices sampled at frame t, invariant block first."""
        return np.concatenate([self.invariant_mask, self.variant_masks[t]])


def generate_pattern(
    geometry: FrameGeometry,
    l: int,
    m_invariant: int,
    m_variant: int,
    density: SamplingDensity | str = SamplingDensity.DISTANCE,
    seed: int = 0,
) -> SamplingPattern:
    """Draw a k-t pattern from the given density without replacement.

    The invariant mask always includes DC.  Deterministic in all arguments.
    """
    density = SamplingDensity(density)
    n = geometry.n
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    if l < 1:
        raise ValueError("need at least one frame")
    if m_invariant < 1:
        raise ValueError("invariant budget must be >= 1 (DC is always kept)")
    if m_variant < 0:
        raise ValueError("variant budget must be >= 0")
    if m_invariant + m_variant > n:
        raise ValueError(
            f"per-frame budget {m_invariant}+{m_variant} exceeds grid size {n}"
        )
    rng = np.random.default_rng(seed)
    pmf = density_pmf(density, geometry)

    if m_invariant == n:
        inv = np.arange(n, dtype=np.intp)
    else:
        p = pmf.copy()
        p[0] = 0.0
        p /= p.sum()
        rest = rng.choice(n, size=m_invariant - 1, replace=False, p=p, shuffle=False)
        inv = np.sort(np.concatenate([[0], rest]).astype(np.intp))

    var = np.empty((l, m_variant), dtype=np.intp)
    if m_variant > 0:
        p = pmf.copy()
        p[inv] = 0.0
        p /= p.sum()
        for t in range(l):
            row = rng.choice(n, size=m_variant, replace=False, p=p, shuffle=False)
            var[t] = np.sort(row)

    return SamplingPattern(geometry, l, inv, var, density, seed)


@dataclass(frozen=True)
class KTMeasurements:
    """Sampled spectra: invariant block (m_invariant, l) and variant block
    (m_variant, l), both complex, column t belonging to frame t."""

    pattern: SamplingPattern
    invariant_data: np.ndarray
    variant_data: np.ndarray

    def __post_init__(self) -> None:
        zi = np.asarray(self.invariant_data, dtype=np.complex128)
        zv = np.asarray(self.variant_data, dtype=np.complex128)
        p = self.pattern
        if zi.shape != (p.m_invariant, p.l):
            raise ValueError(f"invariant data must be ({p.m_invariant}, {p.l}), got {zi.shape}")
        if zv.shape != (p.m_variant, p.l):
            raise ValueError(f"variant data must be ({p.m_variant}, {p.l}), got {zv.shape}")
        if not (np.all(np.isfinite(zi)) and np.all(np.isfinite(zv))):
            raise ValueError("measurements must be finite")
        object.__setattr__(self, "invariant_data", zi)
        object.__setattr__(self, "variant_data", zv)

    @property
    def l(self) -> int:
        return self.pattern.l

    def frame_measurements(self, t: int) -> np.ndarray:
        """Samples of frame t, aligned with pattern.frame_mask(t)."""
        return np.concatenate([self.invariant_data[:, t], self.variant_data[:, t]])

    def total_norm(self) -> float:
        """Frobenius norm over every sample (both blocks)."""
        return float(
            np.sqrt(
                np.sum(np.abs(self.invariant_data) ** 2)
                + np.sum(np.abs(self.variant_data) ** 2)
            )
        )


def acquire(
    video: Video,
    pattern: SamplingPattern,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> KTMeasurements:
    """Sample the video's spectrum on the pattern, adding complex Gaussian
    noise of per-component standard deviation noise_sigma.

    Noise streams are derived per frame from (seed, t), so the result does
    not depend on evaluation order.
    """
    if video.geometry != pattern.geometry or video.l != pattern.l:
        raise ValueError("video and pattern must share geometry and frame count")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be nonnegative")
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")

    spectra = _dft2_cols(video.data, video.geometry)
    m_inv, m_var = pattern.m_invariant, pattern.m_variant
    zbar = spectra[pattern.invariant_mask, :].copy()
    ztilde = np.empty((m_var, pattern.l), dtype=np.complex128)
    for t in range(pattern.l):
        ztilde[:, t] = spectra[pattern.variant_masks[t], t]

    if noise_sigma > 0:
        m = m_inv + m_var
        for t in range(pattern.l):
            rng = np.random.default_rng([seed, t])
            noise = rng.normal(0.0, noise_sigma, size=(2, m))
            xi = noise[0] + 1j * noise[1]
            zbar[:, t] += xi[:m_inv]
            ztilde[:, t] += xi[m_inv:]

    return KTMeasurements(pattern, zbar, ztilde)


# --- file formats -------------------------------------------------------------


def save_pattern(pattern: SamplingPattern, path: str | Path) -> None:
    """Write a pattern as a single JSON document."""
    doc = {
        "nx": pattern.geometry.nx,
        "ny": pattern.geometry.ny,
        "l": pattern.l,
        "density": pattern.density.value,
        "seed": pattern.seed,
        "invariant_mask": pattern.invariant_mask.tolist(),
        "variant_masks": pattern.variant_masks.tolist(),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True) + "\n")


def load_pattern(path: str | Path) -> SamplingPattern:
    doc = json.loads(Path(path).read_text())
    geometry = FrameGeometry(int(doc["nx"]), int(doc["ny"]))
    return SamplingPattern(
        geometry,
        int(doc["l"]),
        np.asarray(doc["invariant_mask"], dtype=np.intp),
        np.asarray(doc["variant_masks"], dtype=np.intp).reshape(int(doc["l"]), -1),
        SamplingDensity(doc["density"]),
        int(doc["seed"]),
    )


_MEAS_DTYPE = "c16le"
_MEAS_LAYOUT = "invariant-then-variant-frames"


def save_measurements(meas: KTMeasurements, stem: str | Path) -> None:
    """Write <stem>.json and <stem>.raw (interleaved little-endian complex doubles).

    The payload is the invariant block column-major, then the variant block
    column-major."""
    stem = Path(stem)
    header = {
        "l": meas.l,
        "m_invariant": meas.pattern.m_invariant,
        "m_variant": meas.pattern.m_variant,
        "dtype": _MEAS_DTYPE,
        "layout": _MEAS_LAYOUT,
    }
    stem.parent.mkdir(parents=True, exist_ok=True)
    (stem.parent / (stem.name + ".json")).write_text(
        json.dumps(header, indent=2, sort_keys=True) + "\n"
    )
    payload = np.concatenate(
        [
            meas.invariant_data.ravel(order="F"),
            meas.variant_data.ravel(order="F"),
        ]
    ).astype("<c16")
    payload.tofile(stem.parent / (stem.name + ".raw"))


def load_measurements(stem: str | Path, pattern: SamplingPattern) -> KTMeasurements:
    """Read measurements written by save_measurements; shapes come from the
    pattern and are cross-checked against the header."""
    stem = Path(stem)
    header = json.loads((stem.parent / (stem.name + ".json")).read_text())
    if header.get("dtype") != _MEAS_DTYPE or header.get("layout") != _MEAS_LAYOUT:
        raise ValueError("unsupported measurement payload format")
    l, mi, mv = int(header["l"]), int(header["m_invariant"]), int(header["m_variant"])
    if (l, mi, mv) != (pattern.l, pattern.m_invariant, pattern.m_variant):
        raise ValueError("measurement header does not match the pattern")
    raw = np.fromfile(stem.parent / (stem.name + ".raw"), dtype="<c16")
    if raw.size != (mi + mv) * l:
        raise ValueError(f"payload has {raw.size} samples, header promises {(mi + mv) * l}")
    zbar = raw[: mi * l].reshape((mi, l), order="F")
    ztilde = raw[mi * l :].reshape((mv, l), order="F")
    return KTMeasurements(pattern, zbar, ztilde)
