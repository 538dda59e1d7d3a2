"""Self-consistent cavity-field + DMRG simulator for pump-structured
Dicke-Ising spin chains.

A chain of Ising-coupled spin-1/2 sites is driven through a single lossy
cavity mode; the mode is adiabatically eliminated and its steady-state
amplitude solved jointly with the spin ground state.  The package covers
the pump-geometry coupling profiles, a two-site DMRG engine with an exact-
diagonalization oracle, the full order-parameter set (magnetizations, bond
nematic tensor, magnon pairing, entanglement entropies), phase
classification, and parallel phase-diagram sweeps.
"""

from .config import ConfigError, SweepConfig, config_from_mapping, parse_config
from .dmrg import DmrgConfig, dmrg_ground_state, product_state_for_fields
from .ed import EdState, ed_expect, ed_ground_state, ed_subset_entropy, ed_subset_rdm
from .linalg import EigenSolveError, eigh_small, extremal_eigenpair, svd_truncated
from .model import (GOLDEN_ANGLE, CouplingProfile, HamiltonianSpec, ModelParams,
                    coupling_profile, effective_spin_hamiltonian, mode_count_angle,
                    total_energy)
from .mpo import MatrixProductOperator, mpo_from_hamiltonian
from .mps import MatrixProductState
from .observables import (OrderParameterSet, PairField, bond_nematic, classify_phase,
                          golden_mode_groups, local_rows, magnetization, magnon_pair,
                          mean_bond_nematic, mean_magnon_pair, measure_order_parameters,
                          nematic_tensor)
from .selfconsistency import (ScfConfig, SolutionRecord, cavity_field_update,
                              default_seeds, scf_solve)
from .sweep import SweepRow, emit_outputs, read_rows_csv, run_sweep, solve_grid_point
from .verify import analytic_threshold, oracle_equivalence, threshold_check

__version__ = "0.1.0"
