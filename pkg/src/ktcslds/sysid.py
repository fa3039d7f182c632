"""State-sequence estimation from the time-invariant measurements.

The invariant samples z_t = Phi F y_t share one sensing matrix across t, so
the d-dimensional state trajectory is observable from them alone: a block
Hankel matrix built on the real-stacked samples has rank d (noiseless), and
its top right singular vectors recover the states up to an invertible
similarity.  Two estimators are provided, a direct SVD and an SVD-free
over-relaxed alternating factorization for large records.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import StateSequence

__all__ = [
    "real_stack",
    "block_hankel",
    "HankelMatrix",
    "build_hankel",
    "hankel_singular_values",
    "estimate_states_svd",
    "SorParams",
    "SorResult",
    "estimate_states_sor",
    "observability_matrix",
    "is_observable",
    "select_order",
    "estimate_transition",
    "extend_states",
]


def real_stack(zbar: np.ndarray) -> np.ndarray:
    """Stack [Re; Im] of an (m, l) complex matrix into a (2m, l) real matrix."""
    z = np.asarray(zbar, dtype=np.complex128)
    if z.ndim != 2:
        raise ValueError("expected an (m, l) matrix")
    return np.vstack([z.real, z.imag])


def block_hankel(M: np.ndarray, depth: int) -> np.ndarray:
    """Block Hankel matrix of a real (p, l) column sequence.

    Row block i (0-based) holds columns i .. i+l-depth of M, so the result
    is (depth*p, l-depth+1) and block anti-diagonals are constant.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError("expected a (p, l) matrix")
    p, l = M.shape
    if not (1 <= depth <= l):
        raise ValueError(f"depth must be in [1, {l}], got {depth}")
    width = l - depth + 1
    blocks = [M[:, i : i + width] for i in range(depth)]
    return np.vstack(blocks)


@dataclass(frozen=True)
class HankelMatrix:
    """Block Hankel matrix over real-stacked complex samples."""

    depth: int
    block_rows: int
    data: np.ndarray

    @property
    def width(self) -> int:
        return self.data.shape[1]


def build_hankel(zbar: np.ndarray, depth: int = 1) -> HankelMatrix:
    """Hankel matrix of the invariant samples: real-stack, then block-shift.

    depth=1 is just [Re(zbar); Im(zbar)].
    """
    M = real_stack(zbar)
    return HankelMatrix(depth=depth, block_rows=M.shape[0], data=block_hankel(M, depth))


def hankel_singular_values(zbar: np.ndarray, depth: int = 1) -> np.ndarray:
    """Nonincreasing singular value spectrum of build_hankel(zbar, depth)."""
    H = build_hankel(zbar, depth)
    return np.linalg.svd(H.data, compute_uv=False)


def estimate_states_svd(
    zbar: np.ndarray, d: int, depth: int = 1
) -> tuple[StateSequence, np.ndarray]:
    """States from the top-d right singular subspace of the Hankel matrix.

    Returns (states, spectrum) where states.data = diag(s[:d]) @ Vt[:d] has
    exactly orthogonal rows, and spectrum is the full singular value list.
    With depth > 1 the sequence is shortened to l - depth + 1 windows.
    """
    H = build_hankel(zbar, depth)
    bound = min(H.data.shape)
    if not (1 <= d <= bound):
        raise ValueError(f"order d={d} outside [1, {bound}] for this record")
    U, s, Vt = np.linalg.svd(H.data, full_matrices=False)
    X = s[:d, None] * Vt[:d]
    return StateSequence(X), s


@dataclass
class SorParams:
    """Controls for the over-relaxed alternating factorization.

    omega is the over-relaxation weight, raised while progress holds
    (residual ratio below gamma1) and reset to 1 when a trial step fails.
    """

    omega_max: float = 2.0
    delta: float = 0.1
    gamma1: float = 0.7
    max_iters: int = 500
    tol: float = 1e-9
    init_seed: int = 0

    def __post_init__(self) -> None:
        if self.omega_max <= 1:
            raise ValueError("omega_max must exceed 1")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if not (0 < self.gamma1 < 1):
            raise ValueError("gamma1 must lie in (0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")


@dataclass(frozen=True)
class SorResult:
    factor: np.ndarray
    states: StateSequence
    residuals: list[float] = field(repr=False)
    iterations: int = 0
    converged: bool = False

    @property
    def final_residual(self) -> float:
        return self.residuals[-1]


def estimate_states_sor(
    zbar: np.ndarray, d: int, params: SorParams | None = None
) -> SorResult:
    """SVD-free rank-d factorization M ~ C X of the real-stacked samples.

    Alternates least-squares solves for the factor and the states against an
    over-relaxed target omega*M + (1-omega)*C X.  The residual over accepted
    iterations never increases: a trial whose residual ratio reaches 1 is
    redone with omega = 1, which is a plain alternating step and cannot make
    things worse.
    """
    if params is None:
        params = SorParams()
    M = real_stack(zbar)
    p, l = M.shape
    if not (1 <= d <= min(p, l)):
        raise ValueError(f"order d={d} outside [1, {min(p, l)}]")

    rng = np.random.default_rng(params.init_seed)
    X = rng.standard_normal((d, l))
    C = np.zeros((p, d))
    omega = 1.0
    delta = params.delta

    res_prev = float(np.linalg.norm(M - C @ X))
    residuals = [res_prev]
    scale = max(float(np.linalg.norm(M)), np.finfo(float).tiny)
    converged = False
    iterations = 0

    for _ in range(params.max_iters):
        while True:
            Mw = omega * M + (1.0 - omega) * (C @ X)
            Cp = Mw @ X.T @ np.linalg.pinv(X @ X.T)
            Xp = np.linalg.pinv(Cp.T @ Cp) @ (Cp.T @ Mw)
            res_new = float(np.linalg.norm(M - Cp @ Xp))
            if res_prev > 0:
                gamma = res_new / res_prev
            else:
                gamma = 0.0
            if gamma >= 1.0 and omega > 1.0:
                omega = 1.0  #                  failed trial: retry unrelaxed
                continue
            break

        C, X = Cp, Xp
        iterations += 1
        residuals.append(res_new)
        if gamma >= params.gamma1:
            delta = max(delta, 0.25 * (omega - 1.0))
            omega = min(omega + delta, params.omega_max)
        if abs(res_prev - res_new) <= params.tol * scale or res_new <= params.tol * scale:
            converged = True
            res_prev = res_new
            break
        res_prev = res_new

    return SorResult(
        factor=C,
        states=StateSequence(X),
        residuals=residuals,
        iterations=iterations,
        converged=converged,
    )


def observability_matrix(C: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Stack [C; CA; ...; CA^(d-1)] for a (p, d) map and (d, d) transition."""
    C = np.asarray(C, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    if C.ndim != 2 or A.shape != (C.shape[1], C.shape[1]):
        raise ValueError("need C of shape (p, d) and A of shape (d, d)")
    d = C.shape[1]
    blocks = [C]
    for _ in range(d - 1):
        blocks.append(blocks[-1] @ A)
    return np.vstack(blocks)


def is_observable(C: np.ndarray, A: np.ndarray) -> bool:
    """True when the observability matrix has full column rank."""
    O = observability_matrix(C, A)
    return int(np.linalg.matrix_rank(O)) == C.shape[1]


def select_order(spectrum: np.ndarray, energy_fraction: float = 0.99) -> int:
    """Smallest d whose leading singular values carry the requested share of
    squared energy.  The spectrum must be nonnegative and nonincreasing."""
    s = np.asarray(spectrum, dtype=np.float64)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("spectrum must be a nonempty 1-D array")
    if not (0 < energy_fraction <= 1):
        raise ValueError("energy_fraction must lie in (0, 1]")
    if np.any(s < 0):
        raise ValueError("singular values must be nonnegative")
    if np.any(np.diff(s) > 1e-12 * max(s[0], 1.0)):
        raise ValueError("spectrum must be nonincreasing")
    energies = s * s
    total = energies.sum()
    if total == 0:
        raise ValueError("spectrum is identically zero; order undefined")
    cum = np.cumsum(energies) / total
    return int(min(np.searchsorted(cum, energy_fraction - 1e-15) + 1, s.size))


def estimate_transition(states: StateSequence | np.ndarray) -> np.ndarray:
    """Least-squares one-step transition: A = argmin ||X_+ - A X_-||_F."""
    X = states.data if isinstance(states, StateSequence) else np.asarray(states, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 2:
        raise ValueError("need at least two state columns")
    return X[:, 1:] @ np.linalg.pinv(X[:, :-1])


def extend_states(states: StateSequence, A: np.ndarray, target_l: int) -> StateSequence:
    """Pad a shortened state sequence up to target_l by iterating x -> A x."""
    X = states.data
    if target_l < X.shape[1]:
        raise ValueError("target length is shorter than the sequence")
    if target_l == X.shape[1]:
        return states
    cols = [X]
    x = X[:, -1]
    for _ in range(target_l - X.shape[1]):
        x = A @ x
        cols.append(x[:, None])
    return StateSequence(np.hstack(cols))
