"""
Ball depth, the pigeonhole lower bound, and Jung's radius
=========================================================

For a finite point cloud, max_overlap finds the deepest point of the union of
closed balls of radius r around the cloud -- exactly, via boundary sweeps.
The depth obeys a pigeonhole lower bound driven only by the cloud's diameter,
and Jung's theorem gives the radius at which the depth saturates at the full
cloud size.
"""

import math

import numpy as np

from packlab import PointCloud, covering_lower_bound, jung_radius, max_overlap

rng = np.random.default_rng(3)
cloud = PointCloud(rng.uniform(0.0, 1.0, size=(200, 2)))
print(f"cloud: {cloud.count} points in the unit square, diameter {cloud.diam:.4f}")

# 1. depth across radii, with the pigeonhole bound alongside
print("\n   r      depth m   ceil(bound)   witness")
for r in (0.05, 0.1, 0.2, 0.4, 0.8):
    m, witness = max_overlap(cloud, r)
    bound = covering_lower_bound(cloud.count, r, cloud.diam, cloud.n)
    print(f"  {r:4.2f}   {m:6d}   {math.ceil(bound):8d}       "
          f"({witness[0]:.3f}, {witness[1]:.3f})")
print("the bound N*(sqrt(2)r/(2r+diam))^n is loose but never violated.")

# 2. the witness really is covered m times
r = 0.2
m, witness = max_overlap(cloud, r)
covered = int((np.linalg.norm(cloud.points - witness, axis=1) <= r + 1e-9).sum())
print(f"\nwitness check at r = {r}: {covered} balls contain the witness, m = {m}")

# 3. Jung's theorem: radius diam*sqrt(n/(2n+2)) makes the depth the whole cloud
r_jung = jung_radius(cloud.n, cloud.diam)
m_full, _ = max_overlap(cloud, r_jung)
m_below, _ = max_overlap(cloud, 0.55 * r_jung)
print(f"\nJung radius for n=2, diam={cloud.diam:.4f}: {r_jung:.4f}")
print(f"depth at the Jung radius: {m_full} of {cloud.count} (always all of them)")
print(f"depth at 0.55x that radius: {m_below} (saturation is genuinely lost)")

# 4. the equilateral triangle shows the planar constant is sharp
side = 1.0
tri = PointCloud(np.array([[0.0, 0.0], [side, 0.0], [side / 2, side * math.sqrt(3) / 2]]))
r_tight = jung_radius(2, tri.diam)  # = side / sqrt(3), the circumradius
print(f"\nequilateral triangle, side 1: Jung radius {r_tight:.6f} = 1/sqrt(3)")
print(f"depth at radius {r_tight:.4f}: {max_overlap(tri, r_tight)[0]} (meets at the circumcenter)")
print(f"depth at radius {0.99 * r_tight:.4f}: {max_overlap(tri, 0.99 * r_tight)[0]} (no common point any more)")
