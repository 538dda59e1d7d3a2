import numpy as np
import pytest

from conftest import SX, SZ, dense_op
from dicke_ising.dmrg import DmrgConfig, dmrg_ground_state, product_state_for_fields
from dicke_ising.ed import EdState, ed_dense_matrix, ed_ground_state
from dicke_ising.model import HamiltonianSpec
from dicke_ising.mpo import mpo_from_hamiltonian, mpo_to_dense
from dicke_ising.mps import MatrixProductState


def spec(n, wz=0.1, j=-1.0, hx=0.0):
    return HamiltonianSpec(onsite_z=np.full(n, wz), nn_zz=j, onsite_x=np.full(n, hx))


def test_mpo_dense_reconstruction(rng):
    for n in (2, 3, 5, 8):
        h = HamiltonianSpec(onsite_z=rng.uniform(-1, 1, n),
                            nn_zz=float(rng.uniform(-2, 2)),
                            onsite_x=rng.uniform(-1, 1, n))
        assert np.max(np.abs(mpo_to_dense(mpo_from_hamiltonian(h))
                             - ed_dense_matrix(h))) < 1e-14


def test_mpo_two_site_ground():
    w = np.linalg.eigvalsh(mpo_to_dense(mpo_from_hamiltonian(spec(2))))
    assert abs(w[0] + 0.35) < 1e-14


def test_mpo_zero_coefficients():
    h = HamiltonianSpec(onsite_z=np.zeros(3), nn_zz=0.0, onsite_x=np.zeros(3))
    assert np.max(np.abs(mpo_to_dense(mpo_from_hamiltonian(h)))) == 0.0


def test_mpo_onsite_x_only():
    h = HamiltonianSpec(onsite_z=np.zeros(3), nn_zz=0.0, onsite_x=np.ones(3))
    expected = sum(dense_op(3, {k: SX}) for k in (1, 2, 3))
    assert np.max(np.abs(mpo_to_dense(mpo_from_hamiltonian(h)) - expected)) < 1e-14


def test_mpo_bond_dimension_three():
    mpo = mpo_from_hamiltonian(spec(6))
    assert mpo.tensors[0].shape == (1, 3, 2, 2)
    assert mpo.tensors[3].shape == (3, 3, 2, 2)
    assert mpo.tensors[-1].shape == (3, 1, 2, 2)


def test_greedy_init_matches_classical_order():
    fm = product_state_for_fields(spec(6, j=-1.0))
    np.testing.assert_allclose(fm.expect_one_site_all(SZ).real, np.full(6, -0.5),
                               atol=1e-12)
    neel = product_state_for_fields(spec(6, j=1.0).with_pinning(1e-6))
    np.testing.assert_allclose(neel.expect_one_site_all(SZ).real,
                               [-0.5, 0.5, -0.5, 0.5, -0.5, 0.5], atol=1e-12)


def test_dmrg_classical_chain():
    psi, e, diag = dmrg_ground_state(mpo_from_hamiltonian(spec(10)),
                                     product_state_for_fields(spec(10)),
                                     DmrgConfig(max_bond=16))
    assert abs(e + 2.75) < 1e-12
    assert diag.converged


def test_dmrg_two_sites():
    psi, e, _ = dmrg_ground_state(mpo_from_hamiltonian(spec(2)),
                                  product_state_for_fields(spec(2)),
                                  DmrgConfig(max_bond=4))
    assert abs(e + 0.35) < 1e-10


def test_dmrg_matches_ed_generic():
    h = spec(10, wz=0.1, j=-1.0, hx=0.3)
    psi, e, diag = dmrg_ground_state(mpo_from_hamiltonian(h),
                                     product_state_for_fields(h),
                                     DmrgConfig(max_bond=32))
    ref = ed_ground_state(h)
    assert abs(e - ref.energy) / abs(ref.energy) < 1e-9
    est = EdState(ref.vector)
    for op in (SX, SZ):
        a = psi.expect_one_site_all(op).real
        b = np.array([est.expect_one_site(op, k).real for k in range(1, 11)])
        assert np.max(np.abs(a - b)) < 1e-7


def test_dmrg_neel_with_pinning():
    h = spec(8, j=1.0).with_pinning(1e-6)
    psi, e, _ = dmrg_ground_state(mpo_from_hamiltonian(h),
                                  product_state_for_fields(h),
                                  DmrgConfig(max_bond=16))
    sz = psi.expect_one_site_all(SZ).real
    np.testing.assert_allclose(sz, [(-1) ** n * 0.5 for n in range(1, 9)], atol=1e-8)


def test_dmrg_variational_bound(rng):
    h = HamiltonianSpec(onsite_z=rng.uniform(0, 0.3, 8), nn_zz=1.0,
                        onsite_x=rng.uniform(-0.8, 0.8, 8))
    init = product_state_for_fields(h)
    dense = ed_dense_matrix(h)
    v0 = init.to_state_vector()
    product_energy = float(v0 @ dense @ v0)
    _, e, _ = dmrg_ground_state(mpo_from_hamiltonian(h), init, DmrgConfig(max_bond=24))
    assert e <= product_energy + 1e-12
    assert e >= np.linalg.eigvalsh(dense)[0] - 1e-9


def test_dmrg_energy_monotone_and_canonical(rng):
    h = HamiltonianSpec(onsite_z=np.full(12, 0.1), nn_zz=-1.0,
                        onsite_x=0.5 * rng.standard_normal(12))
    psi, e, diag = dmrg_ground_state(mpo_from_hamiltonian(h),
                                     product_state_for_fields(h),
                                     DmrgConfig(max_bond=24))
    assert psi.check_canonical()
    assert abs(psi.norm() - 1.0) < 1e-10
    energies = np.array(diag.energies)
    assert np.all(np.diff(energies) < 1e-9)   # monotone up to eigensolver slack


def test_dmrg_respects_bond_cap():
    h = spec(10, hx=0.9, j=1.0)
    cfg = DmrgConfig(max_bond=3)
    psi, _, diag = dmrg_ground_state(mpo_from_hamiltonian(h),
                                     product_state_for_fields(h), cfg)
    assert max(psi.bond_dims) <= 3
    assert diag.max_bond_reached <= 3


def test_dmrg_nonconvergence_reported_not_raised():
    h = spec(10, hx=0.4, j=1.0)
    cfg = DmrgConfig(max_bond=16, max_sweeps=1)
    _, _, diag = dmrg_ground_state(mpo_from_hamiltonian(h),
                                   product_state_for_fields(h), cfg)
    assert diag.sweeps == 1
    assert not diag.converged


def test_dmrg_noise_deterministic():
    h = spec(8, wz=0.1, j=1.0, hx=0.4)
    cfg = DmrgConfig(max_bond=16, noise=1e-8, seed=7)
    ref = ed_ground_state(h).energy
    runs = [dmrg_ground_state(mpo_from_hamiltonian(h), product_state_for_fields(h),
                              cfg)[1] for _ in range(2)]
    assert runs[0] == runs[1]                  # seeded noise is reproducible
    assert abs(runs[0] - ref) / abs(ref) < 1e-8


def test_dmrg_mismatched_lengths():
    with pytest.raises(ValueError):
        dmrg_ground_state(mpo_from_hamiltonian(spec(4)),
                          MatrixProductState.all_down(5), DmrgConfig())
