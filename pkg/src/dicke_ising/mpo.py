"""Matrix-product-operator encoding of the effective spin Hamiltonian.

Bond dimension 3 suffices for an open chain with on-site fields and one
nearest-neighbor coupling.  The three virtual states are: 0 = all terms to
the left completed, 1 = an S^z waiting for its bond partner, 2 = nothing
placed yet.  The constant offset of the HamiltonianSpec is intentionally
not encoded; it is tracked separately by ``total_energy``.
"""

from dataclasses import dataclass

import numpy as np

from .spin import ID2, SX, SZ


@dataclass
class MatrixProductOperator:
    """Rank-4 site tensors indexed (left, right, phys out, phys in)."""

    tensors: list

    @property
    def n_sites(self):
        return len(self.tensors)


def mpo_from_hamiltonian(h):
    """Exact bond-dimension-3 MPO for a HamiltonianSpec (offset excluded)."""
    n = h.n_sites
    if n < 2:
        raise ValueError("mpo_from_hamiltonian: need at least 2 sites")
    tensors = []
    for k in range(n):
        onsite = h.onsite_z[k] * SZ + h.onsite_x[k] * SX
        w = np.zeros((3, 3, 2, 2))
        w[0, 0] = ID2
        w[1, 0] = SZ
        w[2, 0] = onsite
        w[2, 1] = h.nn_zz * SZ
        w[2, 2] = ID2
        if k == 0:
            w = w[2:3, :, :, :]
        if k == n - 1:
            w = w[:, 0:1, :, :]
        tensors.append(w)
    return MatrixProductOperator(tensors=tensors)


def mpo_to_dense(mpo, max_sites=12):
    """Contract an MPO to the dense matrix in the ED bit convention (tests)."""
    n = mpo.n_sites
    if n > max_sites:
        raise ValueError("mpo_to_dense: chain too long to densify")
    acc = mpo.tensors[0][0]            # (w, out, in)
    acc = acc.transpose(0, 1, 2)
    for w in mpo.tensors[1:]:
        # new site becomes the slow index so that site 1 stays fastest
        acc = np.einsum('wab,wxcd->xcadb', acc, w)
        x, c, a, d, b = acc.shape
        acc = acc.reshape(x, c * a, d * b)
    return acc[0]
