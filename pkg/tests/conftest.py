"""Shared test helpers: independent dense oracles built from np.kron only.

Everything here intentionally avoids the library's own contraction code so
tests compare two independent routes to the same number.  Site convention
matches the package: site n lives on bit n-1 of the state index (site 1 is
the fastest index), spin up = bit 0.
"""

import numpy as np
import pytest

SX = np.array([[0.0, 0.5], [0.5, 0.0]])
SY = np.array([[0.0, -0.5j], [0.5j, 0.0]])
SZ = np.array([[0.5, 0.0], [0.0, -0.5]])
SMINUS = np.array([[0.0, 0.0], [1.0, 0.0]])
ID2 = np.eye(2)


def dense_op(n_sites, site_ops):
    """Dense operator from {site: 2x2 matrix}, site 1 = fastest index."""
    ops = {s: np.asarray(o) for s, o in site_ops.items()}
    mat = np.ones((1, 1))
    for n in range(1, n_sites + 1):
        mat = np.kron(ops.get(n, ID2), mat)
    return mat


def dense_hamiltonian(onsite_z, nn_zz, onsite_x):
    """Literal kron-sum assembly of the spin Hamiltonian (test oracle)."""
    n = len(onsite_z)
    h = np.zeros((2 ** n, 2 ** n))
    for k in range(n):
        h = h + onsite_z[k] * dense_op(n, {k + 1: SZ})
        h = h + onsite_x[k] * dense_op(n, {k + 1: SX})
    for k in range(n - 1):
        h = h + nn_zz * dense_op(n, {k + 1: SZ, k + 2: SZ})
    return h


def brute_pair_correlator(vec, op_a, op_b, n, m):
    big = dense_op(int(np.log2(vec.size)), {n: op_a, m: op_b})
    return complex(np.vdot(vec, big @ vec))


def brute_mean_bond_nematic(vec):
    """Literal double sum of the largest nematic-tensor eigenvalue over pairs."""
    n = int(np.log2(vec.size))
    axes = (SX, SY, SZ)
    acc = 0.0
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a == b:
                continue
            q = np.zeros((3, 3))
            for i in range(3):
                for j in range(3):
                    if i == j:
                        continue
                    val = 0.5 * (brute_pair_correlator(vec, axes[i], axes[j], a, b)
                                 + brute_pair_correlator(vec, axes[j], axes[i], a, b))
                    assert abs(val.imag) < 1e-10
                    q[i, j] = val.real
            acc += float(np.linalg.eigvalsh(q)[-1])
    return acc / n ** 2


def brute_mean_magnon_pair(vec):
    n = int(np.log2(vec.size))
    acc = 0.0
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a == b:
                continue
            acc += abs(brute_pair_correlator(vec, SMINUS, SMINUS, a, b))
    return acc / n ** 2


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_state(rng, n_sites, complex_valued=False):
    v = rng.standard_normal(1 << n_sites)
    if complex_valued:
        v = v + 1j * rng.standard_normal(1 << n_sites)
    return v / np.linalg.norm(v)
