"""Unitary frame transforms: 2-D DFT, orthonormal wavelets, masked Fourier sampling.

Everything operates on vectorized frames (see core.vec_frame).  Both the
DFT and the wavelet transform are exactly unitary, so each adjoint is also
the inverse; the masked Fourier operator is a row selection of the DFT and
therefore a contraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import FrameGeometry

__all__ = [
    "dft2",
    "idft2",
    "FourierOp",
    "WaveletOp",
    "MaskedFourierOp",
    "WAVELET_FAMILIES",
]


def dft2(v: np.ndarray, geometry: FrameGeometry) -> np.ndarray:
    """Unitary 2-D DFT of a vectorized frame.  Returns a complex n-vector."""
    a = np.asarray(v)
    if a.shape != (geometry.n,):
        raise ValueError(f"expected length-{geometry.n} vector, got shape {a.shape}")
    frame = a.reshape(geometry.shape, order="F")
    return np.fft.fft2(frame, norm="ortho").reshape(-1, order="F")


def idft2(w: np.ndarray, geometry: FrameGeometry) -> np.ndarray:
    """Inverse (= adjoint) of dft2.  Returns a complex n-vector."""
    a = np.asarray(w)
    if a.shape != (geometry.n,):
        raise ValueError(f"expected length-{geometry.n} vector, got shape {a.shape}")
    frame = a.reshape(geometry.shape, order="F")
    return np.fft.ifft2(frame, norm="ortho").reshape(-1, order="F")


def _dft2_cols(M: np.ndarray, geometry: FrameGeometry) -> np.ndarray:
    """dft2 applied to every column of an (n, k) matrix at once."""
    k = M.shape[1]
    cube = M.reshape((geometry.nx, geometry.ny, k), order="F")
    out = np.fft.fft2(cube, axes=(0, 1), norm="ortho")
    return out.reshape((geometry.n, k), order="F")


def _idft2_cols(M: np.ndarray, geometry: FrameGeometry) -> np.ndarray:
    k = M.shape[1]
    cube = M.reshape((geometry.nx, geometry.ny, k), order="F")
    out = np.fft.ifft2(cube, axes=(0, 1), norm="ortho")
    return out.reshape((geometry.n, k), order="F")


@dataclass(frozen=True)
class FourierOp:
    """dft2/idft2 with the geometry bound once."""

    geometry: FrameGeometry

    def apply(self, v: np.ndarray) -> np.ndarray:
        return dft2(v, self.geometry)

    def adjoint(self, w: np.ndarray) -> np.ndarray:
        return idft2(w, self.geometry)


# --- orthonormal wavelets ----------------------------------------------------

_SQRT3 = math.sqrt(3.0)

# Lowpass analysis filters.  The highpass is the alternating-flip mirror,
# which together with periodic extension makes every level exactly unitary.
WAVELET_FAMILIES: dict[str, np.ndarray] = {
    "haar": np.array([1.0, 1.0]) / math.sqrt(2.0),
    "db4": np.array([1.0 + _SQRT3, 3.0 + _SQRT3, 3.0 - _SQRT3, 1.0 - _SQRT3])
    / (4.0 * math.sqrt(2.0)),
}


def _highpass(h: np.ndarray) -> np.ndarray:
    g = h[::-1].copy()
    g[1::2] *= -1.0
    return g


def _down(x: np.ndarray, filt: np.ndarray, axis: int) -> np.ndarray:
    """Periodic filter-and-downsample along one axis: y[i] = sum_k f[k] x[(2i+k) mod N]."""
    sl = [slice(None)] * x.ndim
    sl[axis] = slice(0, None, 2)
    sl = tuple(sl)
    out = filt[0] * x[sl]
    for k in range(1, len(filt)):
        out = out + filt[k] * np.roll(x, -k, axis=axis)[sl]
    return out


def _up(y: np.ndarray, filt: np.ndarray, axis: int, n_out: int) -> np.ndarray:
    """Transpose of _down: upsample-and-filter back to length n_out."""
    shape = list(y.shape)
    shape[axis] = n_out
    sl = [slice(None)] * y.ndim
    sl[axis] = slice(0, None, 2)
    sl = tuple(sl)
    out = np.zeros(shape, dtype=y.dtype)
    tmp = np.zeros(shape, dtype=y.dtype)
    for k, c in enumerate(filt):
        tmp[...] = 0.0
        tmp[sl] = c * y
        out += np.roll(tmp, k, axis=axis)
    return out


class WaveletOp:
    """Multilevel orthonormal 2-D wavelet transform with periodic boundaries.

    Coefficients use the standard nested-quadrant layout: at each level the
    low/low band sits in the top-left block and is split again at the next
    level.  forward and adjoint are exact inverses of each other.
    """

    def __init__(self, geometry: FrameGeometry, family: str = "haar", levels: int | None = None):
        if family not in WAVELET_FAMILIES:
            raise ValueError(f"unknown wavelet family {family!r}; choose from {sorted(WAVELET_FAMILIES)}")
        self.geometry = geometry
        self.family = family
        self._h = WAVELET_FAMILIES[family]
        self._g = _highpass(self._h)
        # Periodic orthonormality needs the band length >= filter length at
        # every analyzed level.
        filt_len = len(self._h)
        max_levels = 0
        side = min(geometry.nx, geometry.ny)
        while side >= filt_len and side % 2 == 0:
            max_levels += 1
            side //= 2
        if max_levels < 1:
            raise ValueError(f"frame {geometry.shape} too small for family {family!r}")
        if levels is None:
            levels = max_levels
        if not (1 <= levels <= max_levels):
            raise ValueError(f"levels must be in [1, {max_levels}] for {geometry.shape}/{family}")
        self.levels = levels

    # Internally frames are handled as (nx, ny, k) stacks so matrices of
    # vectorized columns transform in one pass.

    def _forward_stack(self, cube: np.ndarray) -> np.ndarray:
        out = cube.copy()
        cx, cy = self.geometry.nx, self.geometry.ny
        for _ in range(self.levels):
            blk = out[:cx, :cy]
            lo = _down(blk, self._h, 0)
            hi = _down(blk, self._g, 0)
            ll = _down(lo, self._h, 1)
            lh = _down(lo, self._g, 1)
            hl = _down(hi, self._h, 1)
            hh = _down(hi, self._g, 1)
            hx, hy = cx // 2, cy // 2
            out[:hx, :hy] = ll
            out[:hx, hy:cy] = lh
            out[hx:cx, :hy] = hl
            out[hx:cx, hy:cy] = hh
            cx, cy = hx, hy
        return out

    def _adjoint_stack(self, cube: np.ndarray) -> np.ndarray:
        out = cube.copy()
        sizes = [(self.geometry.nx >> k, self.geometry.ny >> k) for k in range(self.levels)]
        for cx, cy in reversed(sizes):
            hx, hy = cx // 2, cy // 2
            ll = out[:hx, :hy]
            lh = out[:hx, hy:cy]
            hl = out[hx:cx, :hy]
            hh = out[hx:cx, hy:cy]
            lo = _up(ll, self._h, 1, cy) + _up(lh, self._g, 1, cy)
            hi = _up(hl, self._h, 1, cy) + _up(hh, self._g, 1, cy)
            out[:cx, :cy] = _up(lo, self._h, 0, cx) + _up(hi, self._g, 0, cx)
        return out

    def forward_matrix(self, M: np.ndarray) -> np.ndarray:
        """Transform every column of an (n, k) matrix."""
        M = np.asarray(M, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != self.geometry.n:
            raise ValueError(f"expected ({self.geometry.n}, k) matrix, got {M.shape}")
        cube = M.reshape((self.geometry.nx, self.geometry.ny, M.shape[1]), order="F")
        return self._forward_stack(cube).reshape(M.shape, order="F")

    def adjoint_matrix(self, W: np.ndarray) -> np.ndarray:
        """Inverse transform of every column; exact inverse of forward_matrix."""
        W = np.asarray(W, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] != self.geometry.n:
            raise ValueError(f"expected ({self.geometry.n}, k) matrix, got {W.shape}")
        cube = W.reshape((self.geometry.nx, self.geometry.ny, W.shape[1]), order="F")
        return self._adjoint_stack(cube).reshape(W.shape, order="F")

    def forward(self, v: np.ndarray) -> np.ndarray:
        """Wavelet coefficients of one vectorized frame."""
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.geometry.n,):
            raise ValueError(f"expected length-{self.geometry.n} vector, got shape {v.shape}")
        return self.forward_matrix(v[:, None])[:, 0]

    def adjoint(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (self.geometry.n,):
            raise ValueError(f"expected length-{self.geometry.n} vector, got shape {w.shape}")
        return self.adjoint_matrix(w[:, None])[:, 0]


# --- masked Fourier sampling --------------------------------------------------


class MaskedFourierOp:
    """Row selection of the unitary DFT: v -> dft2(v)[mask].

    The mask is a set of flat spectrum indices (vec convention).  The
    adjoint scatters measurements back onto the grid and inverse-transforms,
    so adjoint(measure(v)) is the zero-filled reconstruction of v.
    """

    def __init__(self, geometry: FrameGeometry, mask: np.ndarray):
        mask = np.asarray(mask)
        if mask.ndim != 1 or mask.size == 0:
            raise ValueError("mask must be a nonempty 1-D index array")
        if not np.issubdtype(mask.dtype, np.integer):
            raise ValueError("mask must hold integer indices")
        if np.any(mask < 0) or np.any(mask >= geometry.n):
            raise ValueError(f"mask indices must lie in [0, {geometry.n})")
        if np.unique(mask).size != mask.size:
            raise ValueError("mask indices must be unique")
        self.geometry = geometry
        self.mask = mask.astype(np.intp)

    @property
    def m(self) -> int:
        return self.mask.size

    def measure(self, v: np.ndarray) -> np.ndarray:
        """Sampled spectrum of a vectorized frame: complex m-vector."""
        return dft2(v, self.geometry)[self.mask]

    def adjoint(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z)
        if z.shape != (self.m,):
            raise ValueError(f"expected length-{self.m} vector, got shape {z.shape}")
        buf = np.zeros(self.geometry.n, dtype=np.complex128)
        buf[self.mask] = z
        return idft2(buf, self.geometry)
