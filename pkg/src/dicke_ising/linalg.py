"""Dense linear-algebra kernels used by the tensor-network and observable code.

Only three primitives are needed: a truncated SVD with a relative
discarded-weight cutoff, a small symmetric/hermitian eigensolver, and a
restarted Lanczos solver for the algebraically smallest eigenpair of a
matrix-free symmetric operator.
"""

from dataclasses import dataclass

import numpy as np


class EigenSolveError(RuntimeError):
    """Lanczos did not reach the requested residual within the matvec budget.

    Carries the best estimate found so far so callers can decide whether to
    restart with a fresh initial vector or accept the partial result.
    """

    def __init__(self, message, eigenvalue=None, eigenvector=None, residual=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.eigenvector = eigenvector
        self.residual = residual


@dataclass(frozen=True)
class SvdResult:
    """Truncated SVD factors with the squared weight of dropped singular values."""

    u: np.ndarray
    s: np.ndarray
    vt: np.ndarray
    discarded_weight: float


def svd_truncated(m, cutoff=1e-10, max_rank=None):
    """Truncated SVD of a dense matrix.

    Keeps the smallest rank r such that the discarded weight (sum of squared
    dropped singular values) is at most ``cutoff`` times the total squared
    weight, additionally capped at ``max_rank``.  When singular values are
    exactly degenerate at the cut the whole multiplet is kept if it fits
    within ``max_rank``; at least one singular value is always kept so the
    factors never collapse to rank zero.

    Parameters
    ----------
    m : (p, q) ndarray, real or complex
    cutoff : relative discarded-weight tolerance, >= 0
    max_rank : hard cap on the kept rank (None = no cap)

    Returns
    -------
    SvdResult
    """
    m = np.asarray(m)
    if not np.all(np.isfinite(m.real)) or (np.iscomplexobj(m) and not np.all(np.isfinite(m.imag))):
        raise ValueError("svd_truncated: input contains non-finite entries")
    if cutoff < 0:
        raise ValueError("svd_truncated: cutoff must be >= 0")
    if max_rank is not None and max_rank < 1:
        raise ValueError("svd_truncated: max_rank must be >= 1")

    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        # Rare gesdd failure: deterministic fallback through the normal
        # equations (accuracy ~sqrt(eps) on the smallest values, which only
        # matter below any practical cutoff).
        u, s, vt = _svd_via_eigh(m)

    weights = s * s
    total = float(weights.sum())
    if total == 0.0:
        r = 1
    else:
        # smallest r with trailing weight <= cutoff * total
        trailing = np.concatenate([np.cumsum(weights[::-1])[::-1][1:], [0.0]])
        keep = trailing <= cutoff * total
        r = int(np.argmax(keep)) + 1 if keep.any() else len(s)
        # keep exactly degenerate multiplets together
        while r < len(s) and s[r] == s[r - 1]:
            r += 1
    if max_rank is not None:
        r = min(r, max_rank)
    r = max(r, 1)

    discarded = float(weights[r:].sum())
    return SvdResult(u=u[:, :r], s=s[:r].copy(), vt=vt[:r, :], discarded_weight=discarded)


def _svd_via_eigh(m):
    """SVD through eigh of the Gram matrix; deterministic gesdd fallback."""
    p, q = m.shape
    if p >= q:
        w, v = np.linalg.eigh(m.conj().T @ m)
        w = np.clip(w[::-1], 0.0, None)
        v = v[:, ::-1]
        s = np.sqrt(w)
        safe = np.where(s > 0, s, 1.0)
        u = (m @ v) / safe
        return u, s, v.conj().T
    u, s, vt = _svd_via_eigh(m.conj().T)
    return vt.conj().T, s, u.conj().T


def eigh_small(m, atol=1e-12, max_dim=16):
    """Eigendecomposition of a small symmetric/hermitian matrix.

    Checks symmetry to ``atol`` before delegating to LAPACK; eigenvalues are
    returned ascending.  Intended for tiny problems (3x3 nematic tensors,
    local 2x2 operators), hence the dimension guard.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("eigh_small: square matrix required")
    if m.shape[0] > max_dim:
        raise ValueError(f"eigh_small: dimension {m.shape[0]} exceeds limit {max_dim}")
    if np.max(np.abs(m - m.conj().T)) > atol:
        raise ValueError("eigh_small: matrix not symmetric/hermitian within tolerance")
    vals, vecs = np.linalg.eigh(m)
    return vals, vecs


def extremal_eigenpair(matvec, dim, init, tol=1e-12, max_iter=4000, krylov_dim=30):
    """Algebraically smallest eigenpair of a symmetric linear operator.

    Restarted Lanczos with full reorthogonalization.  Each cycle builds a
    Krylov space from the current best Ritz vector, so the method is
    deterministic given ``init``.  Convergence is declared when
    ``|A v - lambda v| <= tol * max(1, |A|_est)`` with the norm estimated
    from the largest Ritz value seen.

    Raises
    ------
    EigenSolveError
        After ``max_iter`` matvecs without reaching the residual target; the
        exception carries the best pair found.
    """
    init = np.asarray(init, dtype=float).ravel()
    if init.shape[0] != dim:
        raise ValueError("extremal_eigenpair: init has wrong length")
    nrm = np.linalg.norm(init)
    if nrm == 0.0 or not np.isfinite(nrm):
        raise ValueError("extremal_eigenpair: init must be nonzero and finite")

    if dim == 1:
        e0 = np.ones(1)
        lam = float(matvec(e0)[0])
        return lam, e0

    v = init / nrm
    norm_est = 1.0
    matvecs = 0
    theta, x, resid = None, None, np.inf
    fill_index = 0  # deterministic enrichment when Krylov spaces exhaust

    while matvecs < max_iter:
        basis = [v]
        alphas, betas = [], []
        w = None
        kmax = min(krylov_dim, dim)
        for _ in range(kmax):
            w = matvec(basis[-1])
            matvecs += 1
            a = float(np.dot(basis[-1], w))
            alphas.append(a)
            w = w - a * basis[-1]
            if len(basis) > 1:
                w = w - betas[-1] * basis[-2]
            # full reorthogonalization, twice for stability
            for _ in range(2):
                for q in basis:
                    w -= np.dot(q, w) * q
            b = np.linalg.norm(w)
            if b <= 1e-14 * max(norm_est, 1.0) or len(basis) == dim:
                break
            betas.append(b)
            basis.append(w / b)
            if matvecs >= max_iter:
                break

        k = len(alphas)
        tmat = np.diag(alphas)
        if k > 1:
            off = np.array(betas[: k - 1])
            tmat += np.diag(off, 1) + np.diag(off, -1)
        evals, evecs = np.linalg.eigh(tmat)
        norm_est = max(norm_est, float(np.abs(evals).max()))
        y = evecs[:, 0]
        x = np.zeros(dim)
        for c, q in zip(y, basis[:k]):
            x += c * q
        x /= np.linalg.norm(x)
        theta = float(evals[0])
        r = matvec(x) - theta * x
        matvecs += 1
        resid = float(np.linalg.norm(r))
        if resid <= tol * max(1.0, norm_est):
            if len(basis) < dim and k < dim:
                # Krylov space may have closed on an invariant subspace that
                # excludes the true minimum; probe one fresh direction.
                probe, fill_index = _fresh_direction(basis, x, dim, fill_index)
                if probe is None:
                    return theta, x
                lam_p = float(np.dot(probe, matvec(probe)))
                matvecs += 1
                if lam_p >= theta - tol * max(1.0, norm_est):
                    return theta, x
                v = probe
                continue
            return theta, x
        v = x if resid > 0 else basis[0]

    raise EigenSolveError(
        f"extremal_eigenpair: residual {resid:.3e} after {matvecs} matvecs",
        eigenvalue=theta,
        eigenvector=x,
        residual=resid,
    )


def _fresh_direction(basis, x, dim, start):
    """First coordinate direction with a significant component outside span(basis + x)."""
    for idx in range(start, dim):
        probe = np.zeros(dim)
        probe[idx] = 1.0
        probe -= np.dot(x, probe) * x
        for q in basis:
            probe -= np.dot(q, probe) * q
        nrm = np.linalg.norm(probe)
        if nrm > 1e-8:
            return probe / nrm, idx + 1
    return None, dim
