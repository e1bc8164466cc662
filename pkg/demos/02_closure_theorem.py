"""Closure of reconstructed curves, read off from the Bloch spectrum.

The constant potential q = 1 (a circle) has real double points at 0, +-sqrt 3
and +-sqrt 8. Reconstructing at Lambda0 gives a periodic frame only at a double
point. The curve closes only where, in addition, dp/dlam vanishes. The gap
predicted by the spectrum matches the gap of the reconstructed curve.
"""

import math

import numpy as np

from filament import bloch
from filament.hasimoto import PotentialSignal, ReconstructionConfig, closure_test_frame

q = PotentialSignal.constant(1.0, 512)

print("double points in [-3, 3]:")
for p in bloch.find_real_double_points(q, (-3, 3)):
    print(f"  lam = {p.lam:+.10f}  sign {p.sign:+d}  dp/dlam = {p.dp_dlambda:+.3e}")

print()
print(f"{'Lambda0':>10}  {'spectral verdict':<24} {'spectral gap':>13} {'curve gap':>13}")
for lam0 in (0.0, math.sqrt(3), math.sqrt(8), 0.5):
    rep = bloch.closure_check(q, lam0)
    geo = closure_test_frame(q, ReconstructionConfig(lambda0=lam0))
    g = float(np.linalg.norm(geo.gap)) if geo.frame_periodic else float("nan")
    spectral = rep.gap if rep.is_double_point else float("nan")
    print(f"{lam0:10.6f}  {rep.verdict.value:<24} {spectral:13.6e} {g:13.6e}")

print(f"\npi sqrt 3 = {math.pi * math.sqrt(3):.6e}")
