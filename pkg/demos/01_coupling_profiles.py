"""Pump-cavity coupling profiles for the three light geometries.

The angle phi between pump and cavity axes fixes the per-site overlap
amplitude Jpc_n = cos(pi n) cos(pi n cos phi).  phi = 0 couples every site
identically (one mode), phi = pi/2 alternates the sign (two modes), and
the three-mode angle arccos(1/5) produces a period-5 pattern whose values
are built from the golden ratio.  More generally arccos(1/(2M-1)) seeds M
distinct coupling magnitudes.
"""

import math

import numpy as np

from dicke_ising import coupling_profile, mode_count_angle

for label, phi in [("uniform (phi = 0)", 0.0),
                   ("staggered (phi = pi/2)", math.pi / 2),
                   ("golden three-mode (phi = arccos(1/5))", mode_count_angle(3))]:
    prof = coupling_profile(phi, 10)
    print(f"\n{label}")
    print("  sites 1..10:", np.array2string(prof.amplitudes, precision=6))

print("\nmode counts from arccos(1/(2M-1)):")
for m in (1, 2, 3, 4):
    phi = mode_count_angle(m)
    period = 2 * (2 * m - 1)
    amps = coupling_profile(phi, period).amplitudes
    mags = sorted({round(float(abs(a)), 9) for a in amps})
    print(f"  M = {m}: phi = {phi:.6f} rad, magnitudes per period = {mags}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(3, 1, figsize=(7, 6), sharex=True)
    for ax, (label, phi) in zip(axes, [("phi = 0", 0.0), ("phi = pi/2", math.pi / 2),
                                       ("golden", mode_count_angle(3))]):
        amps = coupling_profile(phi, 30).amplitudes
        ax.stem(range(1, 31), amps)
        ax.set_ylabel("Jpc_n")
        ax.set_title(label)
    axes[-1].set_xlabel("site n")
    fig.tight_layout()
    fig.savefig("profiles.png", dpi=120)
    print("\nwrote profiles.png")
except ImportError:
    pass
