"""Dense symmetric eigenanalysis and traces of quadratic forms restricted to p-planes.

Everything here works on small dense matrices (n up to a few dozen). The
eigensolver is a cyclic Jacobi iteration so that results are deterministic and
exactly symmetric; ``numpy.linalg`` is only used by the Grassmannian sampling
oracle, which is meant to be independent of :func:`eigh`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import copysign, sqrt

import numpy as np

from .errors import DimensionError, InvalidMatrix, InvalidP, RankError

TOL_FRAME = 1e-12
JACOBI_REL_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
PIVOT_TOL = 1e-10


def sym_matrix(entries) -> np.ndarray:
    """Return a symmetrized, read-only float copy of a square matrix.

    Raises:
        InvalidMatrix: if the input is not square or has non-finite entries.
    """
    Q = np.array(entries, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] < 1:
        raise InvalidMatrix(f"expected a square matrix, got shape {Q.shape}")
    if not np.all(np.isfinite(Q)):
        raise InvalidMatrix("matrix has non-finite entries")
    Q = 0.5 * (Q + Q.T)
    Q.flags.writeable = False
    return Q


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with the matching orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def frame(self, p: int) -> "Frame":
        """Frame spanned by the eigenvectors of the ``p`` smallest eigenvalues."""
        return Frame(self.eigenvectors[:, :p])


@dataclass(frozen=True)
class Frame:
    """Orthonormal basis (as the columns of ``basis``) of a p-plane in R^n."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        if B.ndim != 2:
            raise DimensionError("frame basis must be an n x p array")
        n, p = B.shape
        if not 1 <= p < n:
            raise DimensionError(f"frame needs 1 <= p < n, got n={n}, p={p}")
        err = np.max(np.abs(B.T @ B - np.eye(p)))
        if err > TOL_FRAME:
            raise RankError(f"frame vectors are not orthonormal (error {err:.2e})")
        B.flags.writeable = False
        object.__setattr__(self, "basis", B)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def p(self) -> int:
        return self.basis.shape[1]

    @property
    def vectors(self) -> list[np.ndarray]:
        return [self.basis[:, i] for i in range(self.p)]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T


def eigh(Q) -> Spectrum:
    """Full spectral decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Iterates until the off-diagonal Frobenius norm drops below
    ``1e-13 * ||Q||_F`` (at most 100 sweeps). Eigenvalues are returned in
    ascending order (stable sort) and each eigenvector is signed so that its
    largest-magnitude component is positive.
    """
    S = sym_matrix(Q)
    n = S.shape[0]
    # pure-float loops: much faster than numpy slicing for the small n used here
    A = S.tolist()
    V = np.eye(n).tolist()
    threshold = JACOBI_REL_TOL * float(np.linalg.norm(S))
    for _ in range(JACOBI_MAX_SWEEPS):
        off = sqrt(2.0 * sum(A[i][j] * A[i][j] for i in range(n) for j in range(i + 1, n)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p][q]
                if apq == 0.0:
                    continue
                theta = (A[q][q] - A[p][p]) / (2.0 * apq)
                t = copysign(1.0, theta) / (abs(theta) + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp, akq = A[k][p], A[k][q]
                    A[k][p] = c * akp - s * akq
                    A[k][q] = s * akp + c * akq
                Ap, Aq = A[p], A[q]
                for k in range(n):
                    apk, aqk = Ap[k], Aq[k]
                    Ap[k] = c * apk - s * aqk
                    Aq[k] = s * apk + c * aqk
                A[p][q] = A[q][p] = 0.0
                for k in range(n):
                    vp, vq = V[k][p], V[k][q]
                    V[k][p] = c * vp - s * vq
                    V[k][q] = s * vp + c * vq
    A = np.array(A)
    V = np.array(V)
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = V[:, order]
    for j in range(n):
        k = np.argmax(np.abs(V[:, j]))
        if V[k, j] < 0:
            V[:, j] = -V[:, j]
    return Spectrum(w, V)


def _as_basis(frame) -> np.ndarray:
    return frame.basis if isinstance(frame, Frame) else Frame(frame).basis


def trace_on_plane(Q, frame) -> float:
    """Trace of the quadratic form of ``Q`` restricted to the plane of ``frame``."""
    Q = np.asarray(Q, dtype=float)
    B = _as_basis(frame)
    if Q.shape != (B.shape[0], B.shape[0]):
        raise DimensionError(f"matrix {Q.shape} does not act on R^{B.shape[0]}")
    return float(np.einsum("ip,ij,jp->", B, Q, B))


def min_trace_p(Q, p: int) -> float:
    """Minimum over all p-planes of the restricted trace, i.e. the sum of the p smallest eigenvalues."""
    Q = sym_matrix(Q)
    n = Q.shape[0]
    if not isinstance(p, (int, np.integer)) or not 1 <= p <= n:
        raise InvalidP(f"p must be an integer in [1, {n}], got {p!r}")
    return float(np.sum(eigh(Q).eigenvalues[:p]))


def partial_sums(values, p: int) -> float:
    """Sum of the ``p`` smallest entries of ``values``."""
    return float(np.sum(np.sort(np.asarray(values, dtype=float))[:p]))


def orthonormalize(vectors) -> Frame:
    """Modified Gram-Schmidt (with one re-orthogonalization pass) of a list of vectors.

    ``vectors`` is a sequence of p vectors in R^n, one per row.

    Raises:
        RankError: if some vector has relative residual below 1e-10 after
            removing the span of its predecessors.
    """
    rows = np.atleast_2d(np.array(vectors, dtype=float))
    p, n = rows.shape
    out = []
    for v in rows:
        scale = np.linalg.norm(v)
        if not np.isfinite(scale) or scale == 0.0:
            raise RankError("zero or non-finite vector")
        w = v.copy()
        for _ in range(2):
            for u in out:
                w -= (u @ w) * u
        r = np.linalg.norm(w)
        if r <= PIVOT_TOL * scale:
            raise RankError(f"vectors are numerically rank deficient (pivot {r / scale:.1e})")
        out.append(w / r)
    return Frame(np.column_stack(out))


def random_frame(n: int, p: int, seed) -> Frame:
    """Uniformly distributed p-plane: orthonormalized standard normal draws.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if not 1 <= p < n:
        raise DimensionError(f"need 1 <= p < n, got n={n}, p={p}")
    rng = np.random.default_rng(seed)
    while True:
        try:
            return orthonormalize(rng.standard_normal((p, n)))
        except RankError:
            continue


def complement_basis(v) -> np.ndarray:
    """Orthonormal basis (n x (n-1) columns) of the orthogonal complement of ``v``.

    Built from a Householder reflection, so it is deterministic and exact to rounding.
    """
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    n = len(v)
    k = int(np.argmax(np.abs(v)))
    e = np.zeros(n)
    e[k] = 1.0
    u = v + np.copysign(1.0, v[k]) * e
    H = np.eye(n) - 2.0 * np.outer(u, u) / (u @ u)
    # H maps e_k to +-v, so the remaining columns span v's complement
    return np.delete(H, k, axis=1)


# -- Grassmannian sampling oracle ---------------------------------------------------------


def sample_frames(n: int, p: int, count: int, rng) -> np.ndarray:
    """``count`` uniform random frames stacked as an array of shape (count, n, p)."""
    G = rng.standard_normal((count, n, p))
    F, _ = np.linalg.qr(G)
    return F


def batch_traces(Q, frames: np.ndarray) -> np.ndarray:
    return np.einsum("kip,ij,kjp->k", frames, np.asarray(Q, dtype=float), frames)


def grassmannian_min(Q, p: int, count: int, seed, polish: int = 0, chunk: int = 20000):
    """Brute-force estimate of the minimum restricted trace over G_p(R^n).

    Draws ``count`` uniform random p-planes. With ``polish > 0`` the best plane
    is then improved by that many rounds of local random search with a
    shrinking step (perturb, re-orthonormalize, keep improvements). Never uses
    an eigensolver, so it can serve as an oracle for :func:`min_trace_p`.

    Returns:
        (minimum trace found, frame attaining it as an n x p array)
    """
    Q = np.asarray(Q, dtype=float)
    n = Q.shape[0]
    rng = np.random.default_rng(seed)
    best_val, best = np.inf, None
    left = count
    while left > 0:
        m = min(chunk, left)
        F = sample_frames(n, p, m, rng)
        t = batch_traces(Q, F)
        i = int(np.argmin(t))
        if t[i] < best_val:
            best_val, best = float(t[i]), F[i]
        left -= m
    step = 0.3
    for _ in range(polish):
        cand, _ = np.linalg.qr(best[None] + step * rng.standard_normal((200, n, p)))
        t = batch_traces(Q, cand)
        i = int(np.argmin(t))
        if t[i] < best_val:
            best_val, best = float(t[i]), cand[i]
        else:
            step *= 0.7
        if step < 1e-7:
            break
    return best_val, best
