"""A pump-strength scan through the phase diagram.

Runs one V_p line of the phase diagram for the golden three-mode geometry
with ferromagnetic Ising coupling, warm-starting each point from its left
neighbor.  Shows the normal phase, the superradiant transition, and the
bond-nematic multimode region; the same machinery (config file + worker
pool + CSV/heatmap output) is exposed by the `dicke-ising sweep` command.
"""

import tempfile

from dicke_ising import config_from_mapping, emit_outputs, run_sweep

out_dir = tempfile.mkdtemp(prefix="dicke_scan_")
cfg = config_from_mapping({
    "n_sites": "50", "j_ising": "-1", "phi": "golden",
    "delta_c_min": "-10", "delta_c_max": "-10", "delta_c_count": "1",
    "v_pump_min": "0.5", "v_pump_max": "12", "v_pump_count": "14",
    "max_bond": "32", "max_sweeps": "16", "energy_tol": "1e-9",
    "local_eig_tol": "1e-10", "damping": "0.6", "collapse_tol": "1e-5",
    "accelerate": "true", "max_iterations": "220",
    "eps_zero_m0z": "1e-2", "eps_zero_m0x": "1e-2", "eps_zero_mpiz": "1e-2",
    "eps_zero_mpix": "1e-2", "eps_zero_qb_mean": "1e-2", "eps_zero_p_mean": "1e-2",
    "workers": "2", "out_dir": out_dir,
})

results = run_sweep(cfg)
files = emit_outputs(results, cfg)

print(f"{'V_p':>6s} {'|alpha|':>9s} {'m0z':>8s} {'qb':>8s} {'p':>8s} "
      f"{'S_half':>8s} phase")
for row, _ in results:
    print(f"{row.v_pump:6.2f} {row.alpha_abs:9.4f} {row.m0z:8.4f} "
          f"{row.qb_mean:8.5f} {row.p_mean:8.5f} {row.s_half:8.4f} "
          f"{row.phase_label}")
print("\nwrote:")
for f in files:
    print(" ", f)
