"""Shared fixtures and oracle helpers."""

from __future__ import annotations

import numpy as np
import pytest

from ktcslds.core import FrameGeometry, StateSequence, Video
from ktcslds.sampling import acquire, generate_pattern
from ktcslds.transforms import WaveletOp


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def dot_test(apply, adjoint, n_in, n_out, rng, n_draws=100, complex_in=False, complex_out=None):
    """Max relative error of <A x, y> vs <x, A* y> over random draws.

    Inner products are the complex ones (conjugate-linear in the first
    argument).  Probe dtypes follow the operator: real operators get real
    draws on both sides, complex ones get complex draws.
    """
    if complex_out is None:
        complex_out = complex_in
    worst = 0.0
    for _ in range(n_draws):
        if complex_in:
            x = rng.standard_normal(n_in) + 1j * rng.standard_normal(n_in)
        else:
            x = rng.standard_normal(n_in)
        if complex_out:
            y = rng.standard_normal(n_out) + 1j * rng.standard_normal(n_out)
        else:
            y = rng.standard_normal(n_out)
        lhs = np.vdot(apply(x), y)
        rhs = np.vdot(x, adjoint(y))
        err = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
        worst = max(worst, err)
    return worst


def orthogonal_states(d, l, sigmas):
    """State rows that are exactly mutually orthogonal: quadrature sinusoid
    pairs at distinct integer frequencies, row k scaled to norm sigmas[k].

    This mirrors the structure of the SVD state estimator's output
    (orthogonal rows), which the decoupled C-update relies on.
    """
    assert l >= 2 * (d // 2 + 1) + 2, "need enough samples for distinct frequencies"
    tt = np.arange(l)
    rows = []
    f = 1
    while len(rows) < d:
        rows.append(np.cos(2 * np.pi * f * tt / l))
        if len(rows) < d:
            rows.append(np.sin(2 * np.pi * f * tt / l))
        f += 1
    X = np.asarray(rows, dtype=np.float64)
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    X *= np.asarray(sigmas, dtype=np.float64)[:, None]
    # exact orthogonality is the whole point; fail loudly if it slipped
    G = X @ X.T
    assert np.max(np.abs(G - np.diag(np.diag(G)))) < 1e-10
    return X


def make_planted(geometry, d, l, seed=0, support_size=None, sigmas=None, wavelet=None, entry_std=None):
    """Planted joint-sparse instance with full sampling and no noise.

    Returns (measurements, states, C0).  C0 has a shared wavelet row
    support; the state rows are exactly orthogonal with norms sigmas
    (default 1.0 .. 0.5 descending).  By default the coefficient matrix is
    normalized to unit Frobenius norm; entry_std instead draws support
    entries at that standard deviation, which puts the coefficients well
    above the solver's shrink threshold when entry_std >> 1/mu.
    """
    n = geometry.n
    if support_size is None:
        support_size = max(2 * d, n // 16)
    if sigmas is None:
        sigmas = np.linspace(1.0, 0.5, d)
    rng = np.random.default_rng(seed)
    wav = wavelet if wavelet is not None else WaveletOp(geometry)

    W = np.zeros((n, d))
    support = rng.choice(n, size=support_size, replace=False)
    W[support, :] = rng.standard_normal((support_size, d))
    if entry_std is None:
        W /= np.linalg.norm(W)
    else:
        W *= entry_std
    C0 = wav.adjoint_matrix(W)

    X = orthogonal_states(d, l, sigmas)
    video = Video(geometry, C0 @ X)
    pattern = generate_pattern(geometry, l, n, 0, "uniform", seed=0)
    meas = acquire(video, pattern, 0.0, seed=0)
    return meas, StateSequence(X), C0


def principal_angle(A, B):
    """Largest principal angle (radians) between the row spaces of A and B."""
    Qa = np.linalg.qr(A.T)[0]
    Qb = np.linalg.qr(B.T)[0]
    s = np.linalg.svd(Qa.T @ Qb, compute_uv=False)
    s = np.clip(s, -1.0, 1.0)
    return float(np.arccos(s.min()))
