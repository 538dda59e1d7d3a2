import numpy as np
import pytest

from conftest import SMINUS, SX, SZ, dense_hamiltonian, random_state
from dicke_ising.ed import (EdState, ed_dense_matrix, ed_expect, ed_ground_state,
                            ed_matvec_factory, ed_subset_entropy, ed_subset_rdm)
from dicke_ising.model import HamiltonianSpec


def spec(n, wz=0.1, j=-1.0, hx=0.0):
    return HamiltonianSpec(onsite_z=np.full(n, wz), nn_zz=j,
                           onsite_x=np.full(n, hx))


def test_ground_state_ferromagnetic_pair():
    res = ed_ground_state(spec(2))
    assert abs(res.energy + 0.35) < 1e-12
    probs = np.abs(res.vector) ** 2
    assert probs[3] > 1 - 1e-12          # index 3 = both bits set = |down, down>
    assert not res.degenerate


def test_ground_state_pure_transverse():
    res = ed_ground_state(HamiltonianSpec(onsite_z=np.zeros(2), nn_zz=0.0,
                                          onsite_x=np.ones(2)))
    assert abs(res.energy + 1.0) < 1e-12
    expected = np.array([1.0, -1.0, -1.0, 1.0]) / 2.0
    overlap = abs(np.dot(expected, res.vector))
    assert abs(overlap - 1.0) < 1e-10


def test_ground_diagonal_is_classical_minimum(rng):
    for _ in range(5):
        n = 8
        wz = rng.uniform(-0.5, 0.5, n)
        j = float(rng.uniform(-1.5, 1.5))
        h = HamiltonianSpec(onsite_z=wz, nn_zz=j, onsite_x=np.zeros(n))
        matvec, dim = ed_matvec_factory(h)
        diag = np.array([matvec(e)[i] for i, e in enumerate(np.eye(dim))])
        res = ed_ground_state(h, detect_degeneracy=False)
        assert abs(res.energy - diag.min()) < 1e-10


def test_degeneracy_flag_for_unpinned_neel():
    # J > 0, even N, no field: the two Neel states are exactly degenerate
    res = ed_ground_state(spec(4, wz=0.1, j=1.0))
    assert res.degenerate
    assert res.gap < 1e-10


def test_dense_matrix_matches_kron_oracle(rng):
    for n in (2, 4, 6):
        wz = rng.uniform(-1, 1, n)
        hx = rng.uniform(-1, 1, n)
        j = float(rng.uniform(-2, 2))
        h = HamiltonianSpec(onsite_z=wz, nn_zz=j, onsite_x=hx)
        assert np.max(np.abs(ed_dense_matrix(h)
                             - dense_hamiltonian(wz, j, hx))) < 1e-14


def test_expect_examples():
    down2 = np.zeros(4)
    down2[3] = 1.0
    assert abs(ed_expect(down2, [(1, SZ)]) + 0.5) < 1e-14
    bell = np.array([1.0, 0, 0, 1.0]) / np.sqrt(2)
    assert abs(ed_expect(bell, [(1, SMINUS), (2, SMINUS)]) - 0.5) < 1e-14
    singlet = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2)
    assert abs(ed_expect(singlet, [(1, SMINUS), (2, SMINUS)])) < 1e-14


def test_expect_rejects_duplicate_sites():
    with pytest.raises(ValueError):
        ed_expect(np.ones(4) / 2.0, [(1, SX), (1, SZ)])


def test_subset_entropy_examples():
    up = np.zeros(4)
    up[0] = 1.0
    assert ed_subset_entropy(up, [1]) < 1e-12
    bell = np.array([1.0, 0, 0, 1.0]) / np.sqrt(2)
    assert abs(ed_subset_entropy(bell, [1]) - np.log(2)) < 1e-12
    rho = ed_subset_rdm(bell, [1])
    np.testing.assert_allclose(rho, 0.5 * np.eye(2), atol=1e-14)


def test_subset_rdm_noncontiguous_product():
    up = np.zeros(8)
    up[0] = 1.0
    rho = ed_subset_rdm(up, [1, 3])
    vals = np.linalg.eigvalsh(rho)
    assert abs(vals[-1] - 1.0) < 1e-12 and np.all(vals[:-1] < 1e-12)


def test_edstate_adapter_consistency(rng):
    vec = random_state(rng, 5)
    st = EdState(vec)
    row = st.expect_pair_row(SX, SZ, 2)
    assert row[1] == 0.0
    for m in (1, 3, 5):
        ref = ed_expect(vec, [(2, SX), (m, SZ)])
        assert abs(row[m - 1] - ref) < 1e-13
    assert abs(st.bipartite_entropy(2) - ed_subset_entropy(vec, [1, 2])) < 1e-12
    with pytest.raises(ValueError):
        st.subset_rdm(range(1, 6), limit=3)


def test_matvec_guard():
    with pytest.raises(ValueError):
        ed_matvec_factory(spec(15))
