"""Light-matter fixed point: cavity amplitude and spin ground state solved jointly.

The cavity is adiabatically eliminated, so a candidate amplitude ``alpha``
defines an effective spin Hamiltonian whose ground state feeds back through

    F(alpha) = V_p / ((Delta_c + i kappa) sqrt(N)) * sum_n Jpc_n <S^x_n>

The loop iterates alpha <- (1 - beta) alpha + beta F(alpha) from several
seeds and keeps the converged solution with the lowest total energy; the
zero amplitude is always one of the seeds because the normal phase is
always a fixed point.  Dissipation enters only through kappa in the closed
form; there is no Lindblad dynamics here.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dmrg import DmrgConfig, dmrg_ground_state, robust_ground_state
from .ed import EdState, ed_ground_state
from .model import coupling_profile, effective_spin_hamiltonian, total_energy
from .mpo import mpo_from_hamiltonian
from .spin import SX

ENERGY_TIE = 1e-10


@dataclass(frozen=True)
class ScfConfig:
    alpha_tol: float = 1e-7            # on |F(alpha) - alpha|
    max_iterations: int = 200
    damping: float = 0.5               # beta in (0, 1]; 1 reproduces plain iteration
    seeds: tuple = None                # None -> default_seeds(params)
    solver_backend: str = "dmrg"       # "dmrg" or "ed"
    pinning_eps: float = 1e-6          # S^z field on site 1, measured as-is
    collapse_tol: float = 0.0          # abandon a nonzero branch once |alpha| sinks
    accelerate: bool = False           # Aitken extrapolation every 3rd iterate
    dmrg: DmrgConfig = field(default_factory=DmrgConfig)

    def __post_init__(self):
        if not self.alpha_tol > 0:
            raise ValueError("ScfConfig: alpha_tol must be > 0")
        if not 0 < self.damping <= 1:
            raise ValueError("ScfConfig: damping must lie in (0, 1]")
        if self.max_iterations < 1:
            raise ValueError("ScfConfig: max_iterations must be >= 1")
        if self.solver_backend not in ("dmrg", "ed"):
            raise ValueError("ScfConfig: solver_backend must be 'dmrg' or 'ed'")
        if self.collapse_tol < 0:
            raise ValueError("ScfConfig: collapse_tol must be >= 0")
        if self.seeds is not None and len(self.seeds) == 0:
            raise ValueError("ScfConfig: at least one seed is required")


@dataclass
class SolutionRecord:
    """One converged (or best-effort) self-consistent solution."""

    alpha: complex
    total_energy: float
    spin_energy: float
    iterations: int
    converged: bool
    seed_used: complex
    ground_state: object               # MatrixProductState or EdState
    residual_history: list
    fixed_point_residual: float        # |F(alpha) - alpha| at the last solve
    sx: np.ndarray = None              # per-site <S^x_n> of ground_state
    diagnostics: dict = field(default_factory=dict)


def cavity_field_update(profile, sx, v_pump, delta_c, kappa, n_sites):
    """Steady-state photon amplitude for measured transverse magnetizations.

    Exact closed form; the denominator never vanishes because kappa > 0.
    The output phase is locked to arg(Delta_c - i kappa) times the sign of
    the source term, so Im(alpha) * Delta_c = -kappa * Re(alpha) always.
    """
    sx = np.asarray(sx)
    if sx.shape[0] != n_sites or len(profile) != n_sites:
        raise ValueError("cavity_field_update: length mismatch")
    if not kappa > 0:
        raise ValueError("cavity_field_update: kappa must be > 0")
    if np.iscomplexobj(sx):
        if np.max(np.abs(sx.imag)) > 1e-10:
            raise ValueError("cavity_field_update: <S^x> must be real")
        sx = sx.real
    source = float(np.dot(profile.amplitudes, sx))
    return (v_pump * source / math.sqrt(n_sites)) * (delta_c - 1j * kappa) / (
        delta_c * delta_c + kappa * kappa)


def default_seeds(params):
    """Zero plus a phase-locked +-pair at the fully-polarized magnitude estimate.

    r = V_p sqrt(N) / (2 |Delta_c + i kappa|) is |F| when every spin
    contributes the maximal |<S^x>| = 1/2 with unit profile weight; the
    phase factor aligns the seeds with the closed-form fixed point.
    """
    mod = abs(complex(params.delta_c, params.kappa))
    r = params.v_pump * math.sqrt(params.n_sites) / (2.0 * mod)
    phase = complex(params.delta_c, -params.kappa) / mod
    seeds = [0j, r * phase, -r * phase]
    out = []
    for s in seeds:
        if not any(abs(s - t) < 1e-15 for t in out):
            out.append(s)
    return out


class _GroundSolver:
    """Solves the effective Hamiltonian, warm-starting between iterations."""

    def __init__(self, params, cfg, warm_state=None):
        self.params = params
        self.cfg = cfg
        self.state = warm_state
        self.last_diag = None

    def solve(self, hspec):
        pinned = hspec.with_pinning(self.cfg.pinning_eps)
        if self.cfg.solver_backend == "ed":
            res = ed_ground_state(pinned)
            self.state = EdState(res.vector)
            self.last_diag = {"gap": res.gap, "degenerate": res.degenerate}
            energy = res.energy
        else:
            mpo = mpo_from_hamiltonian(pinned)
            if self.state is None:
                # cold start: try both classical wells
                psi, energy, diag = robust_ground_state(mpo, pinned, self.cfg.dmrg)
            else:
                psi, energy, diag = dmrg_ground_state(mpo, self.state, self.cfg.dmrg)
            self.state = psi
            self.last_diag = {"dmrg_converged": diag.converged, "sweeps": diag.sweeps,
                              "max_bond": diag.max_bond_reached,
                              "discarded_weight": diag.discarded_weight,
                              "eig_failures": diag.eig_failures}
        sx = self.state.expect_one_site_all(SX) if hasattr(self.state, "expect_one_site_all") \
            else np.array([self.state.expect_one_site(SX, k)
                           for k in range(1, self.params.n_sites + 1)])
        sx = np.asarray(sx)
        if np.max(np.abs(sx.imag)) > 1e-10:
            raise RuntimeError("ground state returned complex <S^x>")
        return energy, sx.real


def _aitken(history):
    """Aitken delta-squared extrapolation of the last three iterates.

    The map contracts along a single phase-locked direction, so the complex
    sequence converges geometrically and the extrapolation is safe; wild
    jumps are rejected so a nonlinear transient can never derail the loop.
    Convergence is still certified by the raw residual |F(alpha) - alpha|,
    never by the extrapolated step itself.
    """
    if len(history) < 3:
        return None
    a0, a1, a2 = history[-3:]
    d1 = a1 - a0
    d2 = a2 - 2.0 * a1 + a0
    if abs(d2) < 1e-14 * (1.0 + abs(a2)):
        return None
    cand = a0 - d1 * d1 / d2
    if abs(cand) > 4.0 * max(abs(a0), abs(a1), abs(a2)) + 1e-3:
        return None
    return cand


def _iterate_seed(params, cfg, profile, seed, warm_state=None):
    solver = _GroundSolver(params, cfg, warm_state=warm_state)
    alpha = complex(seed)
    residuals = []
    energy = math.nan
    sx = None
    raw_residual = math.inf
    converged = False
    collapsed = False
    iterations = 0
    history = []
    for _ in range(cfg.max_iterations):
        hspec = effective_spin_hamiltonian(params, alpha, profile)
        energy, sx = solver.solve(hspec)
        iterations += 1
        f_alpha = cavity_field_update(profile, sx, params.v_pump, params.delta_c,
                                      params.kappa, params.n_sites)
        raw_residual = abs(f_alpha - alpha)
        residuals.append(cfg.damping * raw_residual)   # |alpha_{k+1} - alpha_k|
        if raw_residual < cfg.alpha_tol:
            converged = True
            break
        alpha = (1.0 - cfg.damping) * alpha + cfg.damping * f_alpha
        if cfg.accelerate:
            history.append(alpha)
            jump = _aitken(history)
            if jump is not None:
                alpha = jump
                history.clear()
        if cfg.collapse_tol > 0 and seed != 0 and abs(alpha) < cfg.collapse_tol:
            collapsed = True   # decayed onto the normal branch; the zero seed owns it
            break
    return SolutionRecord(
        alpha=alpha,
        total_energy=total_energy(energy, alpha, params.delta_c),
        spin_energy=energy,
        iterations=iterations,
        converged=converged,
        seed_used=complex(seed),
        ground_state=solver.state,
        residual_history=residuals,
        fixed_point_residual=raw_residual,
        sx=sx,
        diagnostics={"solver": dict(solver.last_diag or {}),
                     "pinning_eps": cfg.pinning_eps,
                     "backend": cfg.solver_backend,
                     "collapsed": collapsed},
    )


def _better(a, b):
    """Energy selection with deterministic tie-breaking."""
    if a.total_energy < b.total_energy - ENERGY_TIE:
        return True
    if a.total_energy > b.total_energy + ENERGY_TIE:
        return False
    da, db = abs(a.alpha), abs(b.alpha)
    if abs(da - db) > 1e-12:
        return da < db
    return a.alpha.real <= 0 < b.alpha.real


def scf_solve(params, cfg=None, warm_start=None):
    """Solve the light-matter fixed point for one parameter set.

    ``warm_start`` may carry (alpha, state) from a neighboring parameter
    point; the amplitude joins the seed list and the state initializes the
    first ground solve of every branch.  Among all seeds that converged the
    record with the lowest total energy wins (ties break toward smaller
    |alpha|, then toward Re alpha <= 0).  If nothing converged the record
    with the smallest residual is returned with ``converged=False``.
    """
    cfg = cfg or ScfConfig()
    profile = coupling_profile(params.phi, params.n_sites)
    seeds = list(cfg.seeds) if cfg.seeds is not None else default_seeds(params)
    warm_alpha, warm_state = (None, None)
    if warm_start is not None:
        warm_alpha, warm_state = warm_start
        if not any(abs(complex(warm_alpha) - complex(s)) < 1e-12 for s in seeds):
            seeds = [complex(warm_alpha)] + seeds

    records = []
    for seed in seeds:
        init_state = warm_state.copy() if (
            warm_state is not None and hasattr(warm_state, "copy")) else warm_state
        records.append(_iterate_seed(params, cfg, profile, seed, warm_state=init_state))

    converged = [r for r in records if r.converged]
    pool = converged if converged else records
    best = pool[0]
    for cand in pool[1:]:
        if converged:
            if _better(cand, best):
                best = cand
        elif cand.fixed_point_residual < best.fixed_point_residual:
            best = cand

    best.diagnostics["all_seeds"] = [
        {"seed": repr(r.seed_used), "alpha": repr(r.alpha),
         "total_energy": r.total_energy, "converged": r.converged,
         "iterations": r.iterations, "fixed_point_residual": r.fixed_point_residual}
        for r in records
    ]
    best.diagnostics["warm_started"] = warm_alpha is not None
    return best
