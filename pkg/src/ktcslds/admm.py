"""ADMM recovery of the observation matrix under joint structured sparsity.

Given estimated states x_t and masked spectrum samples z_t, the solver
minimizes

    alpha * sum_i ||row_i(Psi C)||_2  +  beta * sum_j ||col_j(Psi C)||_1
        + sum_t 0.5 * ||z_t - Phi_t F (C x_t)||_2^2

over real C by splitting the wavelet image Psi(C) into a row-sparse copy U
and an entrywise-sparse copy V.  U and V have exact shrinkage updates; the
C block takes one prox-linear gradient step per sweep, with the per-column
gradients decoupled by dropping the cross terms x_{t,i} x_{t,j} (the SVD
state estimator returns orthogonal rows, which is what makes that harmless).
C stays real throughout: the Fourier-domain gradient is projected back via
its real part.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import FrameGeometry, ObservationMatrix, StateSequence
from .sampling import KTMeasurements
from .transforms import WaveletOp, _dft2_cols, _idft2_cols

__all__ = [
    "shrink_l1",
    "shrink_l2",
    "AdmmParams",
    "AdmmHistory",
    "ReconstructionProblem",
    "objective",
    "augmented_lagrangian",
    "update_u",
    "update_v",
    "gradient_q",
    "update_c",
    "update_multipliers",
    "canonicalize_states",
    "back_projection_init",
    "default_step",
    "resolve_regularization",
    "fidelity_norm",
    "ConvergenceCheck",
    "validate_convergence_condition",
    "solve",
]

log = logging.getLogger(__name__)

_TINY = np.finfo(np.float64).tiny


def shrink_l1(x: np.ndarray, tau: float) -> np.ndarray:
    """Entrywise soft threshold: prox of tau*||.||_1."""
    if tau < 0:
        raise ValueError("threshold must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)


def shrink_l2(x: np.ndarray, tau: float) -> np.ndarray:
    """Block soft threshold: prox of tau*||.||_2, mapping 0 to 0."""
    if tau < 0:
        raise ValueError("threshold must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    nrm = float(np.linalg.norm(x))
    if nrm <= tau or nrm == 0.0:
        return np.zeros_like(x)
    return (1.0 - tau / nrm) * x


def _shrink_l2_rows(M: np.ndarray, tau: float) -> np.ndarray:
    """shrink_l2 applied to every row of a matrix."""
    norms = np.linalg.norm(M, axis=1)
    scale = np.maximum(1.0 - tau / np.maximum(norms, _TINY), 0.0)
    scale[norms == 0.0] = 0.0
    return M * scale[:, None]


@dataclass
class AdmmParams:
    """Solver controls.  alpha/beta/delta left as None are resolved from the
    data when solve() starts (see resolve())."""

    alpha: float | None = None
    beta: float | None = None
    mu: float = 1.0
    gamma: float = 1.0
    delta: float | None = None
    max_iters: int = 600
    tol_rel: float = 1e-4
    tol_feas: float = 1e-4

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "delta"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive when given")
        if self.mu <= 0 or self.gamma <= 0:
            raise ValueError("mu and gamma must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol_rel < 0 or self.tol_feas < 0:
            raise ValueError("tolerances must be nonnegative")


class ReconstructionProblem:
    """Measurements, states, and the transform pair bundled for the solver.

    Precomputes per-frame masks/samples and the column energies
    sum_t x_{t,j}^2 that appear in the decoupled gradient and step bound.
    """

    def __init__(
        self,
        measurements: KTMeasurements,
        states: StateSequence,
        wavelet: WaveletOp | None = None,
    ):
        pattern = measurements.pattern
        if states.l != pattern.l:
            raise ValueError(
                f"states cover {states.l} frames but the pattern has {pattern.l}"
            )
        self.geometry: FrameGeometry = pattern.geometry
        self.wavelet = wavelet if wavelet is not None else WaveletOp(self.geometry)
        if self.wavelet.geometry != self.geometry:
            raise ValueError("wavelet geometry does not match the pattern")
        self.measurements = measurements
        self.states = states
        self.X = states.data
        self.l = pattern.l
        self.d = states.d
        self.masks = [pattern.frame_mask(t) for t in range(pattern.l)]
        self.zs = [measurements.frame_measurements(t) for t in range(pattern.l)]
        self.col_energy = np.sum(self.X * self.X, axis=1)
        self.data_norm = measurements.total_norm()

    # -- fidelity pieces -------------------------------------------------

    def spectra(self, C: np.ndarray) -> np.ndarray:
        """Unitary DFT of each column of C."""
        return _dft2_cols(C, self.geometry)

    def fidelity(self, C: np.ndarray, spectra: np.ndarray | None = None) -> float:
        """sum_t 0.5 ||z_t - Phi_t F C x_t||_2^2."""
        S = self.spectra(C) if spectra is None else spectra
        val = 0.0
        for t in range(self.l):
            r = self.zs[t] - S[self.masks[t], :] @ self.X[:, t]
            val += 0.5 * float(np.vdot(r, r).real)
        return val

    def fidelity_gradient_decoupled(
        self, C: np.ndarray, spectra: np.ndarray | None = None
    ) -> np.ndarray:
        """Column-decoupled data gradient.

        Column j gets sum_t x_{t,j}^2 Re[(Phi_t F)* Phi_t F c_j]
        - sum_t x_{t,j} Re[(Phi_t F)* z_t]; cross-column terms are dropped.
        """
        S = self.spectra(C) if spectra is None else spectra
        acc = np.zeros((self.geometry.n, self.d), dtype=np.complex128)
        for t in range(self.l):
            sel = self.masks[t]
            x = self.X[:, t]
            acc[sel, :] += S[sel, :] * (x * x)[None, :] - np.outer(self.zs[t], x)
        return _idft2_cols(acc, self.geometry).real

    def hessian_apply(self, W: np.ndarray) -> np.ndarray:
        """Full Hessian of the data term as an operator on (n, d) matrices:
        W -> sum_t Re[(Phi_t F)* Phi_t F (W x_t)] x_t^T, cross terms included."""
        S = _dft2_cols(np.asarray(W, dtype=np.float64), self.geometry)
        acc = np.zeros((self.geometry.n, self.d), dtype=np.complex128)
        for t in range(self.l):
            sel = self.masks[t]
            x = self.X[:, t]
            acc[sel, :] += np.outer(S[sel, :] @ x, x)
        return _idft2_cols(acc, self.geometry).real


def objective(
    problem: ReconstructionProblem,
    C: np.ndarray,
    alpha: float,
    beta: float,
    psi_c: np.ndarray | None = None,
    fid: float | None = None,
) -> float:
    """Full objective value at C."""
    W = problem.wavelet.forward_matrix(C) if psi_c is None else psi_c
    f = problem.fidelity(C) if fid is None else fid
    row_term = float(np.sum(np.linalg.norm(W, axis=1)))
    col_term = float(np.sum(np.abs(W)))
    return f + alpha * row_term + beta * col_term


def augmented_lagrangian(
    problem: ReconstructionProblem,
    U: np.ndarray,
    V: np.ndarray,
    C: np.ndarray,
    K: np.ndarray,
    Lam: np.ndarray,
    alpha: float,
    beta: float,
    mu: float,
    psi_c: np.ndarray | None = None,
    fid: float | None = None,
) -> float:
    """Augmented Lagrangian in the scaled-multiplier form (diagnostic)."""
    W = problem.wavelet.forward_matrix(C) if psi_c is None else psi_c
    f = problem.fidelity(C) if fid is None else fid
    val = f
    val += alpha * float(np.sum(np.linalg.norm(U, axis=1)))
    val += beta * float(np.sum(np.abs(V)))
    val += 0.5 * alpha * mu * (
        float(np.sum((U - W - K) ** 2)) - float(np.sum(K * K))
    )
    val += 0.5 * beta * mu * (
        float(np.sum((V - W - Lam) ** 2)) - float(np.sum(Lam * Lam))
    )
    return val


def update_u(psi_c: np.ndarray, K: np.ndarray, mu: float) -> np.ndarray:
    """Row-sparse block: shrink each row of Psi(C) + K by 1/mu."""
    return _shrink_l2_rows(psi_c + K, 1.0 / mu)


def update_v(psi_c: np.ndarray, Lam: np.ndarray, mu: float) -> np.ndarray:
    """Entrywise-sparse block: soft threshold Psi(C) + Lambda by 1/mu."""
    return shrink_l1(psi_c + Lam, 1.0 / mu)


def gradient_q(
    problem: ReconstructionProblem,
    C: np.ndarray,
    U: np.ndarray,
    V: np.ndarray,
    K: np.ndarray,
    Lam: np.ndarray,
    alpha: float,
    beta: float,
    mu: float,
    psi_c: np.ndarray | None = None,
    spectra: np.ndarray | None = None,
) -> np.ndarray:
    """Decoupled gradient of the C subproblem at C.

    Column j: 2 alpha mu Psi*(Psi c_j - (u_j - k_j))
            + 2 beta mu Psi*(Psi c_j - (v_j - lam_j))
            + the decoupled data term.
    """
    W = problem.wavelet.forward_matrix(C) if psi_c is None else psi_c
    reg = 2.0 * alpha * mu * (W - U + K) + 2.0 * beta * mu * (W - V + Lam)
    q = problem.wavelet.adjoint_matrix(reg)
    q += problem.fidelity_gradient_decoupled(C, spectra=spectra)
    return q


def update_c(C: np.ndarray, q: np.ndarray, delta: float) -> np.ndarray:
    """One prox-linear step: C - delta * q."""
    if delta <= 0:
        raise ValueError("step size must be positive")
    return C - delta * q


def update_multipliers(
    K: np.ndarray,
    Lam: np.ndarray,
    U: np.ndarray,
    V: np.ndarray,
    psi_c: np.ndarray,
    gamma: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Dual step: K - gamma (U - Psi C), Lambda - gamma (V - Psi C)."""
    return K - gamma * (U - psi_c), Lam - gamma * (V - psi_c)


def canonicalize_states(states: StateSequence) -> tuple[StateSequence, np.ndarray]:
    """Rescale a state sequence to the realization with orthonormal rows.

    Returns (canonical, T) with canonical.data = T @ states.data and T
    invertible, so a matrix C found against the canonical states maps back
    as C @ T without changing the product with the caller's states.  The
    decoupled C-step drops cross-state terms, which is exact only when the
    state rows are uncorrelated; normalizing the rows further equalizes the
    per-column curvature sum_t x_{t,j}^2, so the one shared step size serves
    every mode instead of only the dominant one.  Solving in this
    realization makes the reconstruction insensitive to how the caller's
    states were realized.
    """
    Wl, s, Vt = np.linalg.svd(states.data, full_matrices=False)
    # rows with (numerically) zero energy keep scale 1: the back map stays
    # finite and Wl diag(s_safe) canonical still reproduces states exactly
    tol = (s[0] if s.size else 0.0) * max(states.data.shape) * np.finfo(np.float64).eps
    s_safe = np.where(s > tol, s, 1.0)
    T = (Wl / s_safe[None, :]).T
    return StateSequence(T @ states.data), T


def back_projection_init(problem: ReconstructionProblem) -> np.ndarray:
    """Least-squares initializer ignoring regularizers and cross terms:
    c_j = sum_t x_{t,j} Re[(Phi_t F)* z_t] / sum_t x_{t,j}^2."""
    acc = np.zeros((problem.geometry.n, problem.d), dtype=np.complex128)
    for t in range(problem.l):
        acc[problem.masks[t], :] += np.outer(problem.zs[t], problem.X[:, t])
    B = _idft2_cols(acc, problem.geometry).real
    denom = problem.col_energy.copy()
    out = np.zeros_like(B)
    nz = denom > 0
    out[:, nz] = B[:, nz] / denom[nz][None, :]
    return out


def default_step(problem: ReconstructionProblem, alpha: float, beta: float, mu: float) -> float:
    """0.9 / L with L = 2 mu (alpha + beta) + max_j sum_t x_{t,j}^2, a bound
    on the decoupled gradient's Lipschitz constant (Psi, projections, and the
    real-part map are all nonexpansive)."""
    L = 2.0 * mu * (alpha + beta) + float(np.max(problem.col_energy, initial=0.0))
    if L <= 0:
        return 1.0
    return 0.9 / L


def fidelity_norm(
    problem: ReconstructionProblem, tol: float = 1e-10, max_iters: int = 2000
) -> float:
    """Spectral norm of the data term's Hessian via power iteration.

    The operator is symmetric positive semidefinite on real (n, d) matrices,
    so the Rayleigh quotient converges to the top eigenvalue.
    """
    rng = np.random.default_rng(0)
    W = rng.standard_normal((problem.geometry.n, problem.d))
    W /= np.linalg.norm(W)
    lam = 0.0
    for _ in range(max_iters):
        GW = problem.hessian_apply(W)
        lam_new = float(np.sum(W * GW))
        nrm = float(np.linalg.norm(GW))
        if nrm == 0.0:
            return 0.0
        W = GW / nrm
        if abs(lam_new - lam) <= tol * max(abs(lam_new), 1.0):
            return lam_new
        lam = lam_new
    return lam


@dataclass(frozen=True)
class ConvergenceCheck:
    """Outcome of the sufficient-condition test for the fixed dual step."""

    satisfied: bool
    margin: float
    hg_norm: float
    value: float
    message: str


def validate_convergence_condition(
    problem: ReconstructionProblem,
    alpha: float,
    beta: float,
    mu: float,
    gamma: float,
    hg_norm: float | None = None,
) -> ConvergenceCheck:
    """Check max(alpha mu, beta mu) / (1/mu - ||H_g||) + gamma < 2.

    The bound needs 1/mu > ||H_g||; otherwise the margin is -inf.  This is
    advisory: a failed check does not stop the solver, it only signals that
    the fixed-step dual update has no sufficient guarantee here.
    """
    hg = fidelity_norm(problem) if hg_norm is None else float(hg_norm)
    inv_mu = 1.0 / mu
    if inv_mu <= hg:
        return ConvergenceCheck(
            satisfied=False,
            margin=-math.inf,
            hg_norm=hg,
            value=math.inf,
            message=(
                f"1/mu = {inv_mu:.3g} does not dominate the data curvature "
                f"||H_g|| = {hg:.3g}; the sufficient condition cannot hold"
            ),
        )
    value = max(alpha * mu, beta * mu) / (inv_mu - hg) + gamma
    margin = 2.0 - value
    ok = value < 2.0
    msg = (
        f"sufficient convergence condition {'holds' if ok else 'fails'}: "
        f"max(alpha*mu, beta*mu)/(1/mu - ||H_g||) + gamma = {value:.4g} "
        f"(needs < 2, margin {margin:.4g})"
    )
    return ConvergenceCheck(ok, margin, hg, value, msg)


@dataclass
class AdmmHistory:
    """Per-iteration trace plus final status."""

    objective: list[float] = field(default_factory=list)
    fidelity: list[float] = field(default_factory=list)
    u_residual: list[float] = field(default_factory=list)
    v_residual: list[float] = field(default_factory=list)
    rel_change: list[float] = field(default_factory=list)
    aug_lagrangian: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    status: str = "running"
    best_objective: float = math.inf
    best_iteration: int = 0
    al_violations: int = 0
    step_bound_ok: bool = True


def resolve_regularization(
    params: AdmmParams, problem: ReconstructionProblem
) -> tuple[float, float]:
    """Data-scaled defaults: alpha = beta = 1e-3 ||Z||_F / sqrt(n d).

    Weak enough that the data term decides every coefficient the masks
    actually constrain; the prior settles the rest.
    """
    base = 1e-3 * problem.data_norm / math.sqrt(problem.geometry.n * problem.d)
    if base <= 0:
        base = 1e-3
    alpha = params.alpha if params.alpha is not None else base
    beta = params.beta if params.beta is not None else base
    return alpha, beta


def solve(
    measurements: KTMeasurements,
    states: StateSequence,
    params: AdmmParams | None = None,
    wavelet: WaveletOp | None = None,
) -> tuple[ObservationMatrix, AdmmHistory]:
    """Run the full ADMM loop and return (C estimate, history).

    Deterministic in its inputs.  States are rescaled internally to the
    orthonormal-row realization (see canonicalize_states) and the answer is
    expressed back in the caller's realization, so C @ states.data is the
    reconstruction either way.  Stops when the relative C change and both
    feasibility residuals drop below their tolerances, or at max_iters; if
    the objective blows past 10x its initial value the loop aborts and the
    best-objective iterate is returned with status "diverged".
    """
    if params is None:
        params = AdmmParams()
    states_c, basis = canonicalize_states(states)
    problem = ReconstructionProblem(measurements, states_c, wavelet)
    alpha, beta = resolve_regularization(params, problem)
    mu, gamma = params.mu, params.gamma
    delta = params.delta if params.delta is not None else default_step(problem, alpha, beta, mu)
    step_bound = default_step(problem, alpha, beta, mu) / 0.9  # = 1/L
    step_bound_ok = delta <= step_bound + 1e-15
    if not step_bound_ok:
        log.warning(
            "step size delta=%.3g exceeds the descent bound 1/L=%.3g; "
            "the surrogate is no longer guaranteed to decrease", delta, step_bound
        )

    C = back_projection_init(problem)
    psi_c = problem.wavelet.forward_matrix(C)
    spectra = problem.spectra(C)
    U = psi_c.copy()
    V = psi_c.copy()
    K = np.zeros_like(psi_c)
    Lam = np.zeros_like(psi_c)

    history = AdmmHistory()
    fid0 = problem.fidelity(C, spectra=spectra)
    obj0 = objective(problem, C, alpha, beta, psi_c=psi_c, fid=fid0)
    best_obj = obj0
    best_C = C.copy()
    best_iter = 0
    al_prev = math.inf
    al_tol = 1e-8 * max(abs(obj0), 1.0)

    for k in range(1, params.max_iters + 1):
        U = update_u(psi_c, K, mu)
        V = update_v(psi_c, Lam, mu)
        q = gradient_q(
            problem, C, U, V, K, Lam, alpha, beta, mu, psi_c=psi_c, spectra=spectra
        )
        C_new = update_c(C, q, delta)
        psi_c_new = problem.wavelet.forward_matrix(C_new)
        K, Lam = update_multipliers(K, Lam, U, V, psi_c_new, gamma)

        rel = float(np.linalg.norm(C_new - C) / max(np.linalg.norm(C), _TINY))
        denom = max(float(np.linalg.norm(psi_c_new)), _TINY)
        u_res = float(np.linalg.norm(U - psi_c_new)) / denom
        v_res = float(np.linalg.norm(V - psi_c_new)) / denom

        C, psi_c = C_new, psi_c_new
        spectra = problem.spectra(C)
        fid = problem.fidelity(C, spectra=spectra)
        obj = objective(problem, C, alpha, beta, psi_c=psi_c, fid=fid)
        al = augmented_lagrangian(
            problem, U, V, C, K, Lam, alpha, beta, mu, psi_c=psi_c, fid=fid
        )

        history.objective.append(obj)
        history.fidelity.append(fid)
        history.u_residual.append(u_res)
        history.v_residual.append(v_res)
        history.rel_change.append(rel)
        history.aug_lagrangian.append(al)
        history.iterations = k

        if al > al_prev + al_tol:
            history.al_violations += 1
            log.debug("augmented Lagrangian rose at iteration %d (%.6g -> %.6g)", k, al_prev, al)
        al_prev = al

        if obj < best_obj:
            best_obj, best_iter = obj, k
            best_C = C.copy()

        if not math.isfinite(obj) or obj > 10.0 * max(obj0, _TINY):
            history.status = "diverged"
            log.warning(
                "objective exceeded 10x its initial value at iteration %d; "
                "returning the best iterate (iteration %d)", k, best_iter
            )
            break

        if rel < params.tol_rel and u_res < params.tol_feas and v_res < params.tol_feas:
            history.converged = True
            history.status = "converged"
            break

    if history.status == "running":
        history.status = "converged" if history.converged else "max_iters"
    history.best_objective = best_obj
    history.best_iteration = best_iter
    history.step_bound_ok = step_bound_ok

    out = best_C if history.status == "diverged" else C
    return ObservationMatrix(problem.geometry, out @ basis), history
