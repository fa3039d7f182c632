"""Where the three sampling densities put their samples.

Each frame gets a small budget of spectrum bins: an invariant set shared by
every frame (it feeds state estimation) and a variant set redrawn per frame
(it feeds the reconstruction). The density controls where those bins land
radially. This script draws one pattern per density and tabulates, per
radial shell, what fraction of bins any frame ever touches, which is the
quantity that decides what each density can and cannot reconstruct.
"""

import numpy as np

from ktcslds import FrameGeometry, generate_pattern

geometry = FrameGeometry(64, 64)
l = 64
rate = 10.0

# Radial shell edges in bin units on the centered grid.
edges = [0, 1, 3, 6, 10, 16, 24, 34, 46]

kx = np.fft.fftfreq(geometry.nx) * geometry.nx
ky = np.fft.fftfreq(geometry.ny) * geometry.ny
radius = np.sqrt(kx[:, None] ** 2 + ky[None, :] ** 2).flatten(order="F")

header = "".join(f"  [{lo:2d},{hi:2d})" for lo, hi in zip(edges[:-1], edges[1:]))
print(f"union coverage per radial shell, {geometry.nx}x{geometry.ny}, "
      f"l={l}, {rate:g}x undersampling\n")
print(f"{'density':12s}{header}   >= {edges[-1]}")

for density in ("distance", "hyperbolic", "uniform"):
    # budget: m total bins per frame, half invariant
    m = max(1, round(geometry.n / rate))
    m_inv = max(1, round(0.5 * m))
    pattern = generate_pattern(geometry, l, m_inv, m - m_inv, density, seed=3)

    touched = np.zeros(geometry.n, dtype=bool)
    touched[pattern.invariant_mask] = True
    for t in range(l):
        touched[pattern.variant_masks[t]] = True

    row = f"{density:12s}"
    for lo, hi in zip(edges[:-1], edges[1:]):
        shell = (radius >= lo) & (radius < hi)
        row += f"  {touched[shell].mean():7.2f}"
    shell = radius >= edges[-1]
    row += f"  {touched[shell].mean():7.2f}"
    print(row)

print("\nAll three always keep the DC bin in the invariant set. The")
print("distance profile trades a thinner center for a fatter tail, the")
print("hyperbolic profile saturates the center and rarely leaves it, and")
print("uniform covers everything equally thinly. Which trade wins depends")
print("on where the scene keeps its spectral energy.")
