"""One full acquisition and reconstruction, taken apart.

Runs the whole chain on the phantom at 8x undersampling and prints what
each stage produced: the sampling budget, the Hankel order selection, the
solver's convergence record, and the final scores against the zero-fill
baseline (inverse transform of the samples you have, zeros elsewhere,
which is what "no model" buys you). Frames of truth, baseline, and
reconstruction are dropped as PGM files for visual inspection.
"""

from pathlib import Path

from ktcslds import ExperimentConfig, run_ktcslds
from ktcslds.pipeline import write_pgm_frames

config = ExperimentConfig(
    nx=64, ny=64, l=64,
    density="distance", rate=8.0, split=0.5,
    seed=11,
)

recon, report, art = run_ktcslds(config, return_artifacts=True)

m_inv, m_var = config.budget()
print(f"budget: {m_inv} invariant + {m_var} variant bins per frame "
      f"of {config.geometry.n} ({config.rate:g}x)")
print(f"selected order d = {report.d} via {report.estimator}")
print(f"regularization: alpha = beta = {report.alpha:.4g}")

h = art.history
print(f"\nsolver: {h.iterations} iterations, status {h.status}")
print("objective trace (every 50th):")
for k in range(0, h.iterations, 50):
    print(f"  iter {k + 1:4d}: objective {h.objective[k]:.6e}")

print(f"\nSNR vs truth: reconstruction {report.snr_db:.2f} dB, "
      f"zero-fill baseline {report.baseline_snr_db:.2f} dB")
worst = min(report.per_frame_snr)
best = max(report.per_frame_snr)
print(f"per-frame range: {worst:.2f} .. {best:.2f} dB")

out = Path("demo_out")
for name, vid in (("truth", art.truth), ("baseline", art.baseline),
                  ("recon", recon)):
    paths = write_pgm_frames(vid, out / name, prefix=name)
    print(f"wrote {len(paths)} frames under {out / name}")

print("\nThe baseline has every sampled bin exactly right and nothing")
print("else; the model spends the invariant bins on dynamics and lets the")
print("prior fill the spectrum the masks never visited.")
