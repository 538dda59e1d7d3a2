"""Matrix-product-state representation with measurement and entropy helpers.

Tensors are rank-3 arrays indexed (left bond, physical, right bond) with
boundary bonds of dimension one.  The class tracks an orthogonality center:
tensors left of it are left-isometric, tensors right of it right-isometric.
Measurement methods may re-gauge (move the center) in place; the quantum
state they represent is never changed, so a converged state can be measured
freely.  Public site labels are 1-based to match the coupling-profile
convention; bond ``cut`` separates sites {1..cut} from the rest.

States are kept real (the Hamiltonian is real-symmetric); the measurement
layer promotes to complex arithmetic whenever an operator requires it.
"""

import struct

import numpy as np

from .linalg import svd_truncated

_MAGIC = b"DIMPS001"


class MatrixProductState:
    def __init__(self, tensors, center=0, max_bond=None):
        self.tensors = list(tensors)
        self.center = int(center)
        self.max_bond = max_bond
        n = len(self.tensors)
        if n < 1:
            raise ValueError("MatrixProductState: need at least one tensor")
        if not 0 <= self.center < n:
            raise ValueError("MatrixProductState: center out of range")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise ValueError("MatrixProductState: boundary bonds must have dimension 1")
        for k in range(n - 1):
            if self.tensors[k].shape[2] != self.tensors[k + 1].shape[0]:
                raise ValueError("MatrixProductState: mismatched bond dimensions")

    # ------------------------------------------------------------------ basic
    @property
    def n_sites(self):
        return len(self.tensors)

    @property
    def bond_dims(self):
        """Internal bond dimensions (length N-1)."""
        return [t.shape[2] for t in self.tensors[:-1]]

    def copy(self):
        return MatrixProductState([t.copy() for t in self.tensors], self.center,
                                  self.max_bond)

    def norm(self):
        c = self.tensors[self.center]
        return float(np.sqrt(np.abs(np.vdot(c, c))))

    @classmethod
    def product_state(cls, local_vectors, max_bond=None):
        """Bond-dimension-1 state from a list of local 2-vectors (normalized here)."""
        tensors = []
        for v in local_vectors:
            v = np.asarray(v, dtype=float if not np.iscomplexobj(v) else complex)
            v = v / np.linalg.norm(v)
            tensors.append(v.reshape(1, 2, 1))
        return cls(tensors, center=0, max_bond=max_bond)

    @classmethod
    def all_down(cls, n_sites, max_bond=None):
        return cls.product_state([np.array([0.0, 1.0])] * n_sites, max_bond=max_bond)

    # -------------------------------------------------------------- canonical
    def _move_center_right(self):
        j = self.center
        a = self.tensors[j]
        dl, d, dr = a.shape
        q, r = np.linalg.qr(a.reshape(dl * d, dr))
        self.tensors[j] = q.reshape(dl, d, q.shape[1])
        self.tensors[j + 1] = np.tensordot(r, self.tensors[j + 1], axes=([1], [0]))
        self.center = j + 1

    def _move_center_left(self):
        j = self.center
        a = self.tensors[j]
        dl, d, dr = a.shape
        q, r = np.linalg.qr(a.reshape(dl, d * dr).conj().T)
        k = q.shape[1]
        self.tensors[j] = q.conj().T.reshape(k, d, dr)
        self.tensors[j - 1] = np.tensordot(self.tensors[j - 1], r.conj().T,
                                           axes=([2], [0]))
        self.center = j - 1

    def move_center_to(self, site_index):
        """Move the orthogonality center to a 0-based site index."""
        while self.center < site_index:
            self._move_center_right()
        while self.center > site_index:
            self._move_center_left()

    def check_canonical(self, atol=1e-10):
        """Verify the isometry conditions and unit norm (test/debug helper)."""
        for k, t in enumerate(self.tensors):
            dl, d, dr = t.shape
            if k < self.center:
                m = t.reshape(dl * d, dr)
                err = np.max(np.abs(m.conj().T @ m - np.eye(dr)))
            elif k > self.center:
                m = t.reshape(dl, d * dr)
                err = np.max(np.abs(m @ m.conj().T - np.eye(dl)))
            else:
                err = abs(self.norm() - 1.0)
            if err > atol:
                return False
        return True

    # ------------------------------------------------------------ conversions
    @classmethod
    def from_state_vector(cls, vec, max_bond=None, cutoff=0.0):
        """Exact (or truncated) MPS from a dense state vector.

        The vector follows the exact-diagonalization bit convention: site n
        lives on bit n-1, so site 1 is the fastest index.
        """
        vec = np.asarray(vec)
        n = int(round(np.log2(vec.size)))
        if (1 << n) != vec.size:
            raise ValueError("from_state_vector: length must be a power of 2")
        t = vec.reshape((2,) * n)            # axes: site n .. site 1
        t = np.transpose(t, tuple(range(n - 1, -1, -1)))  # site 1 .. site n
        tensors = []
        left = 1
        rest = t.reshape(left * 2, -1)
        for _ in range(n - 1):
            res = svd_truncated(rest, cutoff=cutoff, max_rank=max_bond)
            r = res.s.size
            tensors.append(res.u.reshape(left, 2, r))
            rest = (res.s[:, None] * res.vt).reshape(r * 2, -1)
            left = r
        tensors.append(rest.reshape(left, 2, 1))
        mps = cls(tensors, center=n - 1, max_bond=max_bond)
        c = mps.tensors[-1]
        mps.tensors[-1] = c / np.linalg.norm(c)
        return mps

    def to_state_vector(self, max_sites=20):
        """Dense state vector (ED bit convention); guarded against large N."""
        if self.n_sites > max_sites:
            raise ValueError("to_state_vector: chain too long to densify")
        t = self.tensors[0]
        for a in self.tensors[1:]:
            t = np.tensordot(t, a, axes=([t.ndim - 1], [0]))
        t = t.reshape((2,) * self.n_sites)   # axes: site 1 .. site n
        t = np.transpose(t, tuple(range(self.n_sites - 1, -1, -1)))
        return t.reshape(-1)

    # ------------------------------------------------------------ measurement
    def _site_index(self, n):
        if not 1 <= n <= self.n_sites:
            raise ValueError(f"site {n} out of range 1..{self.n_sites}")
        return n - 1

    def expect_one_site(self, op, n):
        """<psi| op_n |psi> for a 2x2 local operator on (1-based) site n."""
        j = self._site_index(n)
        self.move_center_to(j)
        a = self.tensors[j]
        return complex(np.einsum('asb,st,atb->', a.conj(), np.asarray(op), a))

    def expect_one_site_all(self, op):
        """<op_n> for every site in a single left-to-right pass."""
        op = np.asarray(op)
        self.move_center_to(0)
        out = np.empty(self.n_sites, dtype=complex)
        for j in range(self.n_sites):
            a = self.tensors[j]
            out[j] = np.einsum('asb,st,atb->', a.conj(), op, a)
            if j < self.n_sites - 1:
                self._move_center_right()
        return out

    def expect_pair_row(self, op_a, op_b, n):
        """<op_a_n op_b_m> for all m in one cached-environment pass.

        Returns a length-N array (index m-1); the m = n slot is set to zero.
        Costs O(N chi^3) total: the row to the right of n is accumulated by a
        single transfer-matrix walk and the m < n side by the transposed walk.
        """
        op_a = np.asarray(op_a)
        op_b = np.asarray(op_b)
        j = self._site_index(n)
        self.move_center_to(j)
        cplx = any(np.iscomplexobj(x) for x in (op_a, op_b, self.tensors[j]))
        row = np.zeros(self.n_sites, dtype=complex if cplx else float)

        c = self.tensors[j]
        ca = np.tensordot(op_a, c, axes=([1], [1])).transpose(1, 0, 2)
        # rightward: bond environment between bra and ket right bonds
        env = np.tensordot(c.conj(), ca, axes=([0, 1], [0, 1]))
        for m in range(j + 1, self.n_sites):
            a = self.tensors[m]
            ab = np.tensordot(op_b, a, axes=([1], [1])).transpose(1, 0, 2)
            row[m] = np.tensordot(a.conj(), np.tensordot(env, ab, axes=([1], [0])),
                                  axes=([0, 1, 2], [0, 1, 2]))
            if m < self.n_sites - 1:
                env = np.tensordot(a.conj(), np.tensordot(env, a, axes=([1], [0])),
                                   axes=([0, 1], [0, 1]))
        # leftward (transposed contraction)
        env = np.tensordot(c.conj(), ca, axes=([1, 2], [1, 2]))
        for m in range(j - 1, -1, -1):
            a = self.tensors[m]
            ab = np.tensordot(op_b, a, axes=([1], [1])).transpose(1, 0, 2)
            row[m] = np.tensordot(np.tensordot(a.conj(), env, axes=([2], [0])), ab,
                                  axes=([0, 1, 2], [0, 1, 2]))
            if m > 0:
                t = np.tensordot(env, a, axes=([1], [2]))      # (r_bra, l_ket, s)
                env = np.tensordot(a.conj(), t, axes=([1, 2], [2, 0]))
        return row

    def bipartite_entropy(self, cut):
        """Von Neumann entropy (nats) across bond ``cut`` (left block {1..cut})."""
        if not 1 <= cut <= self.n_sites - 1:
            raise ValueError(f"cut {cut} out of range 1..{self.n_sites - 1}")
        j = cut - 1
        self.move_center_to(j)
        a = self.tensors[j]
        dl, d, dr = a.shape
        s = np.linalg.svd(a.reshape(dl * d, dr), compute_uv=False)
        p = s * s
        p = p[p > 1e-14]
        p = p / p.sum()
        return float(max(0.0, -np.sum(p * np.log(p))))

    def subset_rdm(self, sites, limit=10):
        """Reduced density matrix of an arbitrary (ascending, 1-based) site subset.

        Contraction runs only between the first and last subset site, with
        the orthogonality center parked on the first one so both outer
        environments close to identities.  ``limit`` guards the exponential
        cost in the subset size.
        """
        sites = [int(s) for s in sites]
        if sites != sorted(sites) or len(set(sites)) != len(sites):
            raise ValueError("subset_rdm: sites must be strictly ascending")
        if not sites:
            raise ValueError("subset_rdm: empty subset")
        if len(sites) > limit:
            raise ValueError(f"subset_rdm: {len(sites)} sites exceeds limit {limit}")
        idx = [self._site_index(s) for s in sites]
        self.move_center_to(idx[0])
        keep = set(idx)
        dl = self.tensors[idx[0]].shape[0]
        cplx = np.iscomplexobj(self.tensors[idx[0]])
        env = np.eye(dl, dtype=complex if cplx else float).reshape(dl, dl, 1, 1)
        # env axes: (ket bond, bra bond, ket open, bra open)
        for j in range(idx[0], idx[-1] + 1):
            a = self.tensors[j]
            if j in keep:
                t = np.tensordot(env, a, axes=([0], [0]))          # (b, pk, pb, s, r)
                t = np.tensordot(t, a.conj(), axes=([0], [0]))     # (pk, pb, s, r, sb, rb)
                env = t.transpose(3, 5, 0, 2, 1, 4)                # (r, rb, pk, s, pb, sb)
                dk, db = env.shape[2] * 2, env.shape[4] * 2
                env = env.reshape(env.shape[0], env.shape[1], dk, db)
            else:
                t = np.tensordot(env, a, axes=([0], [0]))          # (b, pk, pb, s, r)
                env = np.tensordot(t, a.conj(), axes=([0, 3], [0, 1]))  # (pk,pb,r,rb)
                env = env.transpose(2, 3, 0, 1)
        rho = np.einsum('aakl->kl', env)
        rho = 0.5 * (rho + rho.conj().T)
        return rho

    def subset_entropy(self, sites, limit=10):
        """Von Neumann entropy (nats) of a site subset."""
        rho = self.subset_rdm(sites, limit=limit)
        evals = np.linalg.eigvalsh(rho)
        evals = evals[evals > 1e-14]
        return float(max(0.0, -np.sum(evals * np.log(evals))))

    # -------------------------------------------------------------- check I/O
    def save(self, path):
        """Binary checkpoint.

        Layout (all little-endian): 8-byte magic ``DIMPS001``; int64 fields
        N, center, max_bond (-1 if unset), complex flag; per site int64
        (left, right) bond dims; tensor payloads in site order as float64
        (complex tensors as re/im interleaved complex128).
        """
        cplx = any(np.iscomplexobj(t) for t in self.tensors)
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            mb = -1 if self.max_bond is None else int(self.max_bond)
            fh.write(struct.pack("<4q", self.n_sites, self.center, mb, int(cplx)))
            for t in self.tensors:
                fh.write(struct.pack("<2q", t.shape[0], t.shape[2]))
            for t in self.tensors:
                arr = t.astype("<c16" if cplx else "<f8")
                fh.write(arr.tobytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            if fh.read(8) != _MAGIC:
                raise ValueError(f"{path}: not an MPS checkpoint")
            n, center, mb, cplx = struct.unpack("<4q", fh.read(32))
            dims = [struct.unpack("<2q", fh.read(16)) for _ in range(n)]
            dtype = np.dtype("<c16" if cplx else "<f8")
            tensors = []
            for dl, dr in dims:
                count = dl * 2 * dr
                buf = fh.read(count * dtype.itemsize)
                tensors.append(np.frombuffer(buf, dtype=dtype).reshape(dl, 2, dr).copy())
        return cls(tensors, center=center, max_bond=None if mb < 0 else mb)
