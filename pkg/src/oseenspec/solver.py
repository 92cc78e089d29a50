"""Dense linear-algebra layer: eigenvalues, singular values, Hermitian parts.

Everything here is a thin, checked wrapper over LAPACK through scipy: the
contract is the accuracy bound (backward errors at the eps level, far under
the 1e-8 norm-relative budget the callers assume), not the algorithm.
Matrices stay dense; no inversions are performed anywhere, in particular
the smallest singular value of a shifted operator is computed from the
shifted matrix itself so that tiny values keep full relative accuracy.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .grids import OperatorMatrix


class SolverError(RuntimeError):
    """Dense eigenvalue or singular-value iteration failed to converge."""


@dataclass
class EigenResult:
    values: np.ndarray
    backward_error: float


def _as_matrix(m):
    if isinstance(m, OperatorMatrix):
        return m.data, m.kind
    return np.asarray(m), "matrix"


def eigenvalues(m):
    """All eigenvalues of a dense operator, sorted by (Re, Im).

    The reported backward_error is the largest eigenpair residual
    ||M v - mu v|| over unit right eigenvectors, which bounds the size of
    the perturbation E needed for (M+E) to have the returned spectrum
    exactly.
    """
    a, kind = _as_matrix(m)
    n = a.shape[0]
    if n > 4000:
        raise ValueError("dense eigensolve capped at n = 4000, got %d" % n)
    try:
        vals, vecs = sla.eig(a)
    except sla.LinAlgError as exc:
        raise SolverError("eigenvalue iteration failed for %s (n=%d): %s"
                          % (kind, n, exc)) from exc
    order = np.lexsort((vals.imag, vals.real))
    vals = vals[order]
    vecs = vecs[:, order]
    resid = a @ vecs - vecs * vals[None, :]
    err = float(np.linalg.norm(resid, axis=0).max())
    return EigenResult(values=vals, backward_error=err)


def smallest_singular_value(m, shift=0.0):
    """s_min(M - i shift I) = 1/||(M - i shift)^{-1}||, 0 if exactly singular."""
    a, kind = _as_matrix(m)
    n = a.shape[0]
    if n > 4000:
        raise ValueError("dense svd capped at n = 4000, got %d" % n)
    if shift != 0.0:
        a = a - 1j * shift * np.eye(n)
    try:
        s = sla.svdvals(a)
    except sla.LinAlgError as exc:
        raise SolverError("svd failed for %s (n=%d): %s" % (kind, n, exc)) from exc
    return float(s[-1])


def hermitian_part_min_eig(m):
    """Smallest eigenvalue of (M + M^H)/2; a lower bound for min Re spec(M)."""
    a, _ = _as_matrix(m)
    herm = (a + a.conj().T) / 2
    return float(sla.eigvalsh(herm, subset_by_index=(0, 0))[0])
