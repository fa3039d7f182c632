"""Reading the state sequence off the time-invariant samples.

The bins sampled in every frame give a short multichannel time series
z_t = Phi F y_t = (Phi F C) x_t. Its block Hankel matrix shares its row
space with the state sequence, so an SVD recovers the states up to an
invertible change of basis. This script plants a system, estimates states
from a handful of invariant bins, and measures the subspace angle between
truth and estimate, which is the only gauge that makes sense when the
basis is free.
"""

import numpy as np

from ktcslds import (
    FrameGeometry,
    acquire,
    build_hankel,
    estimate_states_sor,
    estimate_states_svd,
    generate_pattern,
    select_order,
    synthesize_lds_video,
)


def principal_angle(A: np.ndarray, B: np.ndarray) -> float:
    """Largest principal angle (radians) between the row spaces of A and B."""
    Qa = np.linalg.qr(A.T)[0]
    Qb = np.linalg.qr(B.T)[0]
    sv = np.linalg.svd(Qa.T @ Qb, compute_uv=False)
    return float(np.arccos(np.clip(sv[-1], -1.0, 1.0)))


geometry = FrameGeometry(32, 32)
d, l, m_inv = 4, 64, 128

video, model = synthesize_lds_video(geometry, d=d, l=l, rho=0.95, seed=21)
pattern = generate_pattern(geometry, l, m_inv, 0, "distance", seed=5)
meas = acquire(video, pattern, noise_sigma=0.0)

# The Hankel spectrum shows the model order as a cliff.
spectrum = np.linalg.svd(build_hankel(meas.invariant_data).data,
                         compute_uv=False)
print("Hankel singular values:")
print("  " + "  ".join(f"{x:9.3e}" for x in spectrum[:8]))
d_hat = select_order(spectrum, energy_fraction=0.9999)
print(f"selected order: {d_hat} (planted {d})\n")

states_svd, _ = estimate_states_svd(meas.invariant_data, d_hat)
angle = principal_angle(states_svd.data, video.data)
print(f"SVD estimator:  subspace angle vs truth = {angle:.2e} rad")

result = estimate_states_sor(meas.invariant_data, d_hat)
angle = principal_angle(result.states.data, video.data)
print(f"SOR estimator:  subspace angle vs truth = {angle:.2e} rad "
      f"({result.iterations} sweeps)")

print("\nBoth land on the same subspace; the SVD route is direct while the")
print("over-relaxed factorization gets there by alternating least squares.")
print("Row-space agreement is what matters: any invertible T applied to")
print("the states is absorbed by the observation matrix downstream.")
