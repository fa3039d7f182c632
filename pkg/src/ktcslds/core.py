"""Core containers and metrics shared by the acquisition and reconstruction code.

Frames are nx-by-ny images vectorized column-major, so a video is an
n-by-l matrix whose t-th column is frame t.  All downstream operators
(Fourier, wavelet, sampling masks) index into that vectorization, which
is why the convention is fixed here once and never renegotiated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "FrameGeometry",
    "Video",
    "StateSequence",
    "ObservationMatrix",
    "LdsModel",
    "vec_frame",
    "mat_frame",
    "snr_db",
    "reconstruction_snr",
    "save_video",
    "load_video",
    "save_states",
    "load_states",
]


def _is_pow2(k: int) -> bool:
    return k >= 2 and (k & (k - 1)) == 0


@dataclass(frozen=True)
class FrameGeometry:
    """Spatial frame size.  Both sides must be powers of two (>= 2).

    The power-of-two constraint keeps the multilevel wavelet transform
    exactly orthonormal at every depth.
    """

    nx: int
    ny: int

    def __post_init__(self) -> None:
        if not (_is_pow2(self.nx) and _is_pow2(self.ny)):
            raise ValueError(
                f"frame sides must be powers of two >= 2, got {self.nx}x{self.ny}"
            )

    @property
    def n(self) -> int:
        """Pixels per frame."""
        return self.nx * self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)


def vec_frame(frame: np.ndarray, geometry: FrameGeometry) -> np.ndarray:
    """Vectorize one frame column-major into an n-vector."""
    a = np.asarray(frame)
    if a.shape != geometry.shape:
        raise ValueError(f"frame shape {a.shape} does not match {geometry.shape}")
    return a.reshape(-1, order="F")


def mat_frame(v: np.ndarray, geometry: FrameGeometry) -> np.ndarray:
    """Reshape an n-vector back into an nx-by-ny frame (inverse of vec_frame)."""
    a = np.asarray(v)
    if a.shape != (geometry.n,):
        raise ValueError(f"expected a vector of length {geometry.n}, got shape {a.shape}")
    return a.reshape(geometry.shape, order="F")


@dataclass(frozen=True)
class Video:
    """A dynamic image sequence stored as an n-by-l matrix of vectorized frames."""

    geometry: FrameGeometry
    data: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != self.geometry.n:
            raise ValueError(
                f"video data must be ({self.geometry.n}, l), got {np.shape(self.data)}"
            )
        if d.shape[1] < 1:
            raise ValueError("video needs at least one frame")
        if not np.all(np.isfinite(d)):
            raise ValueError("video data must be finite")
        object.__setattr__(self, "data", d)

    @property
    def l(self) -> int:
        """Number of frames."""
        return self.data.shape[1]

    def frame(self, t: int) -> np.ndarray:
        """Frame t as an nx-by-ny array."""
        return mat_frame(self.data[:, t], self.geometry)

    @classmethod
    def from_frames(cls, frames: np.ndarray, geometry: FrameGeometry) -> "Video":
        """Build a video from an (nx, ny, l) stack of frames."""
        f = np.asarray(frames, dtype=np.float64)
        if f.ndim != 3 or f.shape[:2] != geometry.shape:
            raise ValueError(f"expected ({geometry.nx}, {geometry.ny}, l) stack, got {f.shape}")
        return cls(geometry, f.reshape((geometry.n, f.shape[2]), order="F"))


@dataclass(frozen=True)
class StateSequence:
    """Hidden states as a d-by-l matrix, one column per frame."""

    data: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != 2:
            raise ValueError("states must be a (d, l) matrix")
        if d.shape[0] < 1 or d.shape[1] < 1:
            raise ValueError("states must be nonempty")
        if d.shape[0] > d.shape[1]:
            raise ValueError(f"state dimension {d.shape[0]} exceeds sequence length {d.shape[1]}")
        if not np.all(np.isfinite(d)):
            raise ValueError("states must be finite")
        object.__setattr__(self, "data", d)

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def l(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ObservationMatrix:
    """Maps a d-dimensional state to a vectorized frame: columns are spatial modes."""

    geometry: FrameGeometry
    data: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != self.geometry.n:
            raise ValueError(
                f"observation matrix must be ({self.geometry.n}, d), got {np.shape(self.data)}"
            )
        if d.shape[1] < 1:
            raise ValueError("observation matrix needs at least one column")
        if not np.all(np.isfinite(d)):
            raise ValueError("observation matrix must be finite")
        object.__setattr__(self, "data", d)

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def mode(self, j: int) -> np.ndarray:
        """Column j reshaped to a frame."""
        return mat_frame(self.data[:, j], self.geometry)


@dataclass(frozen=True)
class LdsModel:
    """Linear dynamical system y_t = C x_t + w_t, x_{t+1} = A x_t + v_t.

    Q is the process-noise covariance (d-by-d), R the observation-noise
    variance (scalar, isotropic across pixels).
    """

    C: ObservationMatrix
    A: np.ndarray
    Q: np.ndarray
    R: float
    x0: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        d = self.C.d
        A = np.asarray(self.A, dtype=np.float64)
        Q = np.asarray(self.Q, dtype=np.float64)
        if A.shape != (d, d):
            raise ValueError(f"A must be ({d}, {d}), got {A.shape}")
        if Q.shape != (d, d):
            raise ValueError(f"Q must be ({d}, {d}), got {Q.shape}")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ValueError("Q must be symmetric")
        if np.any(np.linalg.eigvalsh((Q + Q.T) / 2) < -1e-10):
            raise ValueError("Q must be positive semidefinite")
        if self.R < 0:
            raise ValueError("R must be nonnegative")
        x0 = np.zeros(d) if self.x0 is None else np.asarray(self.x0, dtype=np.float64)
        if x0.shape != (d,):
            raise ValueError(f"x0 must have shape ({d},), got {x0.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "x0", x0)

    @property
    def d(self) -> int:
        return self.C.d

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.A))))


def snr_db(reference: np.ndarray, estimate: np.ndarray) -> float:
    """10 log10(||ref||_F^2 / ||est - ref||_F^2).

    Returns math.inf when the estimate is exact; raises on a zero reference
    (the ratio is undefined there).
    """
    ref = np.asarray(reference, dtype=np.float64)
    est = np.asarray(estimate, dtype=np.float64)
    if ref.shape != est.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {est.shape}")
    num = float(np.sum(ref * ref))
    if num == 0.0:
        raise ValueError("reference signal is identically zero; SNR undefined")
    err = est - ref
    den = float(np.sum(err * err))
    if den == 0.0:
        return math.inf
    return 10.0 * math.log10(num / den)


def reconstruction_snr(reference: Video, estimate: Video) -> float:
    """SNR of a reconstructed video against the ground truth, in dB."""
    if reference.geometry != estimate.geometry or reference.l != estimate.l:
        raise ValueError("reference and estimate must share geometry and length")
    return snr_db(reference.data, estimate.data)


# --- file format -----------------------------------------------------------
#
# A video on disk is a pair <stem>.json / <stem>.raw.  The header pins the
# shape and the payload layout; the payload is little-endian float64 with
# frames stored consecutively (exactly data.ravel(order="F")).

_VIDEO_DTYPE = "f64le"
_VIDEO_LAYOUT = "column-major-frames"


def _stem_paths(stem: str | Path) -> tuple[Path, Path]:
    stem = Path(stem)
    return stem.parent / (stem.name + ".json"), stem.parent / (stem.name + ".raw")


def save_video(video: Video, stem: str | Path) -> None:
    """Write <stem>.json and <stem>.raw."""
    header_path, raw_path = _stem_paths(stem)
    header = {
        "nx": video.geometry.nx,
        "ny": video.geometry.ny,
        "l": video.l,
        "dtype": _VIDEO_DTYPE,
        "layout": _VIDEO_LAYOUT,
    }
    header_path.parent.mkdir(parents=True, exist_ok=True)
    header_path.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")
    payload = np.ascontiguousarray(video.data.ravel(order="F"), dtype="<f8")
    payload.tofile(raw_path)


def load_video(stem: str | Path) -> Video:
    """Read a video written by save_video."""
    header_path, raw_path = _stem_paths(stem)
    header = json.loads(header_path.read_text())
    for key in ("nx", "ny", "l", "dtype", "layout"):
        if key not in header:
            raise ValueError(f"video header missing field {key!r}")
    if header["dtype"] != _VIDEO_DTYPE or header["layout"] != _VIDEO_LAYOUT:
        raise ValueError("unsupported video payload format")
    geometry = FrameGeometry(int(header["nx"]), int(header["ny"]))
    l = int(header["l"])
    raw = np.fromfile(raw_path, dtype="<f8")
    if raw.size != geometry.n * l:
        raise ValueError(
            f"payload has {raw.size} samples, header promises {geometry.n * l}"
        )
    return Video(geometry, raw.reshape((geometry.n, l), order="F"))


def save_states(states: StateSequence, stem: str | Path) -> None:
    """Write <stem>.json and <stem>.raw, same layout conventions as videos."""
    header_path, raw_path = _stem_paths(stem)
    header = {
        "d": states.d,
        "l": states.l,
        "dtype": _VIDEO_DTYPE,
        "layout": "column-major",
    }
    header_path.parent.mkdir(parents=True, exist_ok=True)
    header_path.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")
    np.ascontiguousarray(states.data.ravel(order="F"), dtype="<f8").tofile(raw_path)


def load_states(stem: str | Path) -> StateSequence:
    header_path, raw_path = _stem_paths(stem)
    header = json.loads(header_path.read_text())
    if header.get("dtype") != _VIDEO_DTYPE or header.get("layout") != "column-major":
        raise ValueError("unsupported states payload format")
    d, l = int(header["d"]), int(header["l"])
    raw = np.fromfile(raw_path, dtype="<f8")
    if raw.size != d * l:
        raise ValueError(f"payload has {raw.size} samples, header promises {d * l}")
    return StateSequence(raw.reshape((d, l), order="F"))
