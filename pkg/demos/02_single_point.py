"""One self-consistent solve, start to finish.

Picks a pump strength above the superradiant transition for the golden
three-mode geometry, alternates cavity-field updates with DMRG ground
states until the amplitude is stationary, and prints every order
parameter plus the phase label.
"""

from dicke_ising import (DmrgConfig, ModelParams, ScfConfig, default_seeds,
                         measure_order_parameters, mode_count_angle, scf_solve)

params = ModelParams(n_sites=50, omega0=0.1, j_ising=-1.0, v_pump=8.0,
                     delta_c=-10.0, kappa=10.0, phi=mode_count_angle(3))
cfg = ScfConfig(solver_backend="dmrg", damping=0.6, accelerate=True,
                seeds=tuple(default_seeds(params)[:2]),
                dmrg=DmrgConfig(max_bond=32, max_sweeps=16,
                                local_eig_tol=1e-10, energy_tol=1e-9))
rec = scf_solve(params, cfg)

print(f"converged      : {rec.converged} in {rec.iterations} iterations")
print(f"alpha          : {rec.alpha:.6f}  (|alpha| = {abs(rec.alpha):.6f})")
print(f"total energy   : {rec.total_energy:.8f}   (spin part {rec.spin_energy:.8f})")
print(f"residual       : {rec.fixed_point_residual:.2e}")
print("branches tried :")
for b in rec.diagnostics["all_seeds"]:
    print(f"   seed {b['seed']:>28s} -> converged={b['converged']} "
          f"E={b['total_energy']:.8f}")

ops = measure_order_parameters(rec.ground_state, rec.alpha,
                               eps_zero={"m0z": 1e-2, "m0x": 1e-2, "mpiz": 1e-2,
                                         "mpix": 1e-2, "qb_mean": 1e-2,
                                         "p_mean": 1e-2, "alpha_abs": 1e-3},
                               phi=params.phi, j_sign=params.j_ising)
print("\norder parameters")
for name in ("alpha_abs", "m0x", "m0z", "mpix", "mpiz", "qb_mean", "p_mean", "s_half"):
    print(f"  {name:<10s} = {getattr(ops, name):+.6f}")
print(f"  phase      = {ops.phase}")
