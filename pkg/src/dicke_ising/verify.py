"""Built-in verification suites: DMRG-vs-ED oracle checks and the analytic
superradiant threshold on the decoupled (J = 0) line.

These are the same checks the acceptance tests run; the ``verify`` CLI
subcommand executes desk-sized versions and reports pass/fail lines.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dmrg import (DmrgConfig, dmrg_ground_state, product_state_for_fields,
                   robust_ground_state)
from .ed import EdState, ed_ground_state
from .model import ModelParams, coupling_profile, effective_spin_hamiltonian
from .mpo import mpo_from_hamiltonian
from .selfconsistency import ScfConfig, scf_solve
from .spin import SX, SZ


@dataclass
class OracleCase:
    params: dict
    energy_rel_err: float
    sxz_max_err: float
    degenerate: bool
    passed: bool


def oracle_equivalence(n_cases=20, n_sites=10, seed=20260809, energy_rtol=1e-9,
                       obs_atol=1e-7, chi=64):
    """Randomized DMRG-vs-ED comparison on frozen photon amplitudes.

    Each case draws a pump geometry, detuning, pump strength and a fixed
    complex alpha, builds the effective Hamiltonian and solves it with both
    backends.  Energies must agree to ``energy_rtol`` relative; for
    nondegenerate ground states every <S^x_n> and <S^z_n> must agree to
    ``obs_atol`` (degenerate cases are energy-only).
    """
    rng = np.random.default_rng(seed)
    cases = []
    for k in range(n_cases):
        j_sign = 1.0 if rng.integers(2) else -1.0
        phi = float(rng.uniform(0.0, math.pi / 2))
        v_pump = float(rng.uniform(0.3, 3.0))
        delta_c = float(rng.uniform(-15.0, -3.0))
        alpha = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        params = ModelParams(n_sites=n_sites, omega0=0.1, j_ising=j_sign,
                             v_pump=v_pump, delta_c=delta_c, kappa=10.0, phi=phi)
        hspec = effective_spin_hamiltonian(params, alpha,
                                           coupling_profile(phi, n_sites))
        ed_res = ed_ground_state(hspec)
        psi, e_dmrg, _ = robust_ground_state(
            mpo_from_hamiltonian(hspec), hspec,
            DmrgConfig(max_bond=chi, svd_cutoff=1e-13, energy_tol=1e-12,
                       local_eig_tol=1e-13, max_sweeps=40))
        rel = abs(e_dmrg - ed_res.energy) / max(abs(ed_res.energy), 1e-12)
        sxz_err = 0.0
        if not ed_res.degenerate:
            est = EdState(ed_res.vector)
            for op in (SX, SZ):
                a = psi.expect_one_site_all(op).real
                b = np.array([est.expect_one_site(op, s).real
                              for s in range(1, n_sites + 1)])
                sxz_err = max(sxz_err, float(np.max(np.abs(a - b))))
        passed = rel < energy_rtol and (ed_res.degenerate or sxz_err < obs_atol)
        cases.append(OracleCase(
            params={"j": j_sign, "phi": phi, "v_pump": v_pump,
                    "delta_c": delta_c, "alpha": repr(alpha)},
            energy_rel_err=rel, sxz_max_err=sxz_err,
            degenerate=ed_res.degenerate, passed=passed))
    return cases


def analytic_threshold(omega0, delta_c, kappa):
    """Closed-form superradiant onset on the J = 0, phi = 0 line."""
    return math.sqrt(omega0 * (delta_c ** 2 + kappa ** 2) / (-delta_c))


def scalar_alpha_modulus(v_pump, omega0, delta_c, kappa, tol=1e-12):
    """|alpha| per sqrt(N) spins from the single-spin fixed point.

    Solves h = A h / sqrt(omega0^2 + h^2) with A = -V^2 Delta_c /
    (Delta_c^2 + kappa^2) by bisection on the transverse field, then maps
    back to the photon amplitude scale |alpha| / sqrt(N).  Independent of
    the chain machinery; used as the oracle for the threshold bisection.
    """
    denom = delta_c ** 2 + kappa ** 2
    a = -v_pump ** 2 * delta_c / denom
    if a <= omega0:
        return 0.0
    lo, hi = 0.0, a  # g(h) = A h / sqrt(w^2 + h^2) - h, g(hi) <= 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if a * mid / math.sqrt(omega0 ** 2 + mid ** 2) - mid > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    h = 0.5 * (lo + hi)
    # h = (V/sqrt(N)) 2 Re(alpha) and the phase is locked to (dc - ik)
    re_alpha_per_sqrt_n = h / (2.0 * v_pump)
    return abs(re_alpha_per_sqrt_n) * math.sqrt(denom) / abs(delta_c)


def locate_threshold(solve, lo, hi, onset=1e-4, v_tol=5e-3, max_steps=40):
    """Bisection for the smallest V_p with |alpha| > onset.

    ``solve`` maps a pump strength to a converged |alpha|.  The bracket
    must straddle the onset; returns the midpoint of the final interval.
    """
    if not solve(lo) <= onset:
        raise ValueError("locate_threshold: lower bracket already superradiant")
    if not solve(hi) > onset:
        raise ValueError("locate_threshold: upper bracket not superradiant")
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        if solve(mid) > onset:
            hi = mid
        else:
            lo = mid
        if hi - lo < v_tol:
            break
    return 0.5 * (lo + hi)


def threshold_check(n_sites=50, backend="dmrg", omega0=0.1, delta_c=-10.0,
                    kappa=10.0, onset=1e-4, v_tol=4e-3, chi=16,
                    max_iterations=2000):
    """Full-machinery threshold bisection on the J = 0 line plus the oracle.

    Returns (v_located, v_analytic, v_scalar): the machinery bisection, the
    closed form, and an independent bisection running on the single-spin
    fixed point alone.
    """
    target = analytic_threshold(omega0, delta_c, kappa)
    scf_cfg = ScfConfig(alpha_tol=1e-7, max_iterations=max_iterations, damping=1.0,
                        solver_backend=backend, collapse_tol=1e-6, accelerate=True,
                        dmrg=DmrgConfig(max_bond=chi, max_sweeps=12,
                                        local_eig_tol=1e-11, energy_tol=1e-10))

    def solve(v_pump):
        params = ModelParams(n_sites=n_sites, omega0=omega0, j_ising=0.0,
                             v_pump=v_pump, delta_c=delta_c, kappa=kappa, phi=0.0)
        rec = scf_solve(params, scf_cfg)
        return abs(rec.alpha) if rec.converged else 0.0

    lo, hi = 0.75 * target, 1.4 * target
    v_located = locate_threshold(solve, lo, hi, onset=onset, v_tol=v_tol)
    v_scalar = locate_threshold(
        lambda v: scalar_alpha_modulus(v, omega0, delta_c, kappa) * math.sqrt(n_sites),
        lo, hi, onset=onset, v_tol=min(v_tol, 1e-4))
    return v_located, target, v_scalar


def fixed_point_spot_check(cfg, rows_with_diags, sample=3):
    """Re-solve a few converged sweep rows at their recorded alpha and check
    that the cavity update reproduces the amplitude within 10x the tolerance."""
    from .selfconsistency import cavity_field_update  # local to avoid cycle

    checked = []
    converged = [(r, d) for r, d in rows_with_diags if r.converged]
    step = max(1, len(converged) // max(sample, 1))
    for row, diag in converged[::step][:sample]:
        params = ModelParams(n_sites=cfg.n_sites, omega0=cfg.omega0,
                             j_ising=row.j_ising, v_pump=row.v_pump,
                             delta_c=row.delta_c, kappa=cfg.kappa, phi=row.phi)
        alpha = complex(row.alpha_re, row.alpha_im)
        profile = coupling_profile(row.phi, cfg.n_sites)
        hspec = effective_spin_hamiltonian(params, alpha, profile).with_pinning(
            cfg.scf.pinning_eps)
        if cfg.scf.solver_backend == "ed":
            state = EdState(ed_ground_state(hspec).vector)
        else:
            state, _, _ = dmrg_ground_state(mpo_from_hamiltonian(hspec),
                                            product_state_for_fields(hspec),
                                            cfg.dmrg)
        sx = state.expect_one_site_all(SX).real
        f_alpha = cavity_field_update(profile, sx, params.v_pump, params.delta_c,
                                      params.kappa, params.n_sites)
        resid = abs(f_alpha - alpha)
        checked.append((row, resid, resid < 10 * cfg.scf.alpha_tol))
    return checked
