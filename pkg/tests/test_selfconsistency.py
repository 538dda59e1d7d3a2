import math

import numpy as np
import pytest

from dicke_ising.dmrg import DmrgConfig
from dicke_ising.model import ModelParams, coupling_profile
from dicke_ising.selfconsistency import (ScfConfig, cavity_field_update, default_seeds,
                                         scf_solve)
from dicke_ising.spin import SX
from dicke_ising.verify import scalar_alpha_modulus


def ed_cfg(**kwargs):
    base = dict(solver_backend="ed", alpha_tol=1e-9, max_iterations=600,
                damping=1.0, accelerate=True)
    base.update(kwargs)
    return ScfConfig(**base)


def test_cavity_update_zero_source():
    prof = coupling_profile(0.0, 4)
    assert cavity_field_update(prof, np.zeros(4), 1.0, -10.0, 10.0, 4) == 0j


def test_cavity_update_example():
    prof = coupling_profile(0.0, 4)
    alpha = cavity_field_update(prof, np.full(4, 0.5), 1.0, -1.0, 10.0, 4)
    assert abs(alpha - (-1 - 10j) / 101) < 1e-15


def test_cavity_update_phase_lock(rng):
    for _ in range(10):
        n = 6
        prof = coupling_profile(float(rng.uniform(0, math.pi / 2)), n)
        sx = rng.uniform(-0.5, 0.5, n)
        dc, kap = float(rng.uniform(-15, -1)), float(rng.uniform(0.5, 20))
        alpha = cavity_field_update(prof, sx, 1.3, dc, kap, n)
        assert abs(alpha.imag * dc + kap * alpha.real) < 1e-12


def test_cavity_update_rejects_complex_sx():
    prof = coupling_profile(0.0, 2)
    with pytest.raises(ValueError):
        cavity_field_update(prof, np.array([0.1 + 0.1j, 0.0]), 1.0, -10.0, 10.0, 2)


def test_default_seeds():
    p = ModelParams(n_sites=4, v_pump=2.0, delta_c=-10.0, kappa=10.0)
    seeds = default_seeds(p)
    assert seeds[0] == 0j
    assert abs(abs(seeds[1]) - 0.1414213562) < 1e-9
    assert abs(seeds[1] + seeds[2]) < 1e-15
    # phase aligned with the closed form
    assert abs(seeds[1].imag * p.delta_c + p.kappa * seeds[1].real) < 1e-12
    # pump off: exactly one zero seed
    assert default_seeds(ModelParams(n_sites=4, v_pump=0.0)) == [0j]


def test_decoupled_limit():
    p = ModelParams(n_sites=6, v_pump=0.0, j_ising=-1.0)
    rec = scf_solve(p, ed_cfg())
    assert rec.alpha == 0j
    assert rec.iterations == 1
    assert rec.converged
    # bare chain: all spins down, spin energy -5/4 - 6*0.05 (plus pinning shift)
    assert abs(rec.spin_energy - (-1.55)) < 1e-5


def test_threshold_bracketing_and_amplitude():
    # J = 0 line: analytic onset at sqrt(2); above it |alpha| matches the
    # single-spin fixed point solved independently
    below = scf_solve(ModelParams(n_sites=6, omega0=0.1, j_ising=0.0, v_pump=1.35,
                                  delta_c=-10.0, kappa=10.0), ed_cfg())
    assert abs(below.alpha) < 1e-6
    p = ModelParams(n_sites=6, omega0=0.1, j_ising=0.0, v_pump=1.8,
                    delta_c=-10.0, kappa=10.0)
    above = scf_solve(p, ed_cfg())
    assert above.converged
    ref = scalar_alpha_modulus(1.8, 0.1, -10.0, 10.0) * math.sqrt(6)
    assert abs(abs(above.alpha) - ref) < 1e-6


def test_z2_pair_and_selection():
    p = ModelParams(n_sites=8, omega0=0.1, j_ising=-1.0, v_pump=6.0,
                    delta_c=-10.0, kappa=10.0)
    seeds = default_seeds(p)
    rec = scf_solve(p, ed_cfg(seeds=tuple(seeds)))
    assert rec.converged
    branches = rec.diagnostics["all_seeds"]
    assert len(branches) == 3
    nonzero = [b for b in branches if b["converged"] and abs(complex(b["alpha"])) > 0.1]
    assert len(nonzero) == 2
    a_plus, a_minus = complex(nonzero[0]["alpha"]), complex(nonzero[1]["alpha"])
    assert abs(a_plus + a_minus) < 1e-7
    assert abs(nonzero[0]["total_energy"] - nonzero[1]["total_energy"]) < 1e-8
    # winner has the lowest energy and respects the Re <= 0 tie-break
    assert rec.total_energy <= min(b["total_energy"] for b in branches) + 1e-10
    assert rec.alpha.real <= 0


def test_fixed_point_residual_invariant():
    p = ModelParams(n_sites=8, omega0=0.1, j_ising=-1.0, v_pump=6.0,
                    delta_c=-10.0, kappa=10.0)
    cfg = ed_cfg(alpha_tol=1e-8)
    rec = scf_solve(p, cfg)
    assert rec.converged
    assert rec.fixed_point_residual < cfg.alpha_tol
    # recompute F from the stored ground state
    prof = coupling_profile(p.phi, p.n_sites)
    sx = np.array([rec.ground_state.expect_one_site(SX, k).real
                   for k in range(1, 9)])
    f_alpha = cavity_field_update(prof, sx, p.v_pump, p.delta_c, p.kappa, p.n_sites)
    assert abs(f_alpha - rec.alpha) < cfg.alpha_tol
    # phase locking holds an order of magnitude past the tolerance
    assert abs(rec.alpha.imag * p.delta_c + p.kappa * rec.alpha.real) < 10 * cfg.alpha_tol
    # residual history is the damped step sequence
    assert rec.residual_history[-1] < cfg.alpha_tol


def test_no_seed_converged_flag():
    p = ModelParams(n_sites=6, omega0=0.1, j_ising=0.0, v_pump=1.8,
                    delta_c=-10.0, kappa=10.0)
    rec = scf_solve(p, ed_cfg(max_iterations=2, seeds=(0.3 + 0j,), accelerate=False,
                              alpha_tol=1e-12))
    assert not rec.converged
    assert rec.fixed_point_residual > 0


def test_acceleration_reaches_same_fixed_point():
    p = ModelParams(n_sites=6, omega0=0.1, j_ising=0.0, v_pump=2.2,
                    delta_c=-10.0, kappa=10.0)
    plain = scf_solve(p, ed_cfg(accelerate=False, max_iterations=2000))
    accel = scf_solve(p, ed_cfg(accelerate=True))
    assert plain.converged and accel.converged
    assert abs(plain.alpha - accel.alpha) < 5e-8
    assert accel.iterations <= plain.iterations


def test_dmrg_backend_agrees_with_ed_backend():
    p = ModelParams(n_sites=8, omega0=0.1, j_ising=-1.0, v_pump=5.0,
                    delta_c=-10.0, kappa=10.0)
    rec_ed = scf_solve(p, ed_cfg())
    rec_dm = scf_solve(p, ScfConfig(solver_backend="dmrg", alpha_tol=1e-9,
                                    max_iterations=600, damping=1.0, accelerate=True,
                                    dmrg=DmrgConfig(max_bond=32)))
    assert abs(rec_ed.alpha - rec_dm.alpha) < 1e-6
    assert abs(rec_ed.total_energy - rec_dm.total_energy) < 1e-7


def test_warm_start_used():
    p = ModelParams(n_sites=8, omega0=0.1, j_ising=-1.0, v_pump=6.0,
                    delta_c=-10.0, kappa=10.0)
    cfg = ed_cfg()
    first = scf_solve(p, cfg)
    p2 = ModelParams(n_sites=8, omega0=0.1, j_ising=-1.0, v_pump=6.2,
                     delta_c=-10.0, kappa=10.0)
    warm = scf_solve(p2, cfg, warm_start=(first.alpha, first.ground_state))
    cold = scf_solve(p2, cfg)
    assert warm.diagnostics["warm_started"]
    assert warm.converged and cold.converged
    assert abs(abs(warm.alpha) - abs(cold.alpha)) < 1e-7
