"""Dense linear algebra at desk scale.

Orthonormal frames, orthogonal projection, singular values by one-sided
Jacobi rotations, and Haar-distributed random subspaces.  Everything here
is written for dimensions up to :data:`MAX_DIM`; nothing is sparse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadDimensions, DimensionMismatch, RankDeficient, SingularMatrix

#: orthonormality tolerance for frames (pairwise inner products vs Kronecker delta)
ORTHO_TOL = 1e-10
#: rank tolerance, relative to the largest singular value
RANK_TOL = 1e-10
#: determinant magnitude below which a matrix is treated as singular
DET_TOL = 1e-12
#: hard cap for the Jacobi SVD; larger problems are out of scope
MAX_DIM = 64


def as_generator(seed) -> np.random.Generator:
    """Return ``seed`` unchanged if it is already a Generator, else seed one."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise BadDimensions(f"dimension {a.shape[0]} exceeds the supported cap {MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise DimensionMismatch("matrix entries must be finite")
    return a


def jacobi_singular_values(a) -> np.ndarray:
    """Singular values of a square matrix, descending, via one-sided Jacobi.

    Columns are rotated pairwise until mutually orthogonal; the singular
    values are then the column norms.  Accurate for small dense matrices,
    which is the only regime this package targets.
    """
    m = _check_matrix(a).copy()
    n = m.shape[1]
    if n == 1:
        return np.array([abs(m[0, 0])])
    for _ in range(60):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                pij = m[:, i] @ m[:, j]
                pii = m[:, i] @ m[:, i]
                pjj = m[:, j] @ m[:, j]
                scale = np.sqrt(pii * pjj)
                if scale <= 0.0 or abs(pij) <= 1e-15 * scale:
                    continue
                off = max(off, abs(pij) / scale)
                theta = 0.5 * np.arctan2(2.0 * pij, pii - pjj)
                c, s = np.cos(theta), np.sin(theta)
                ci = c * m[:, i] + s * m[:, j]
                cj = -s * m[:, i] + c * m[:, j]
                m[:, i], m[:, j] = ci, cj
        if off < 1e-14:
            break
    sv = np.sqrt(np.sum(m * m, axis=0))
    return np.sort(sv)[::-1]


def singular_values(a) -> np.ndarray:
    """Alias for :func:`jacobi_singular_values` (descending order)."""
    return jacobi_singular_values(a)


def min_singular_value(a) -> float:
    """Smallest singular value of an invertible matrix.

    This is the radius of the largest Euclidean ball contained in the image
    of the unit ball under ``a``; for a diagonal matrix it is the smallest
    absolute diagonal entry.

    Raises :class:`SingularMatrix` when ``|det a|`` is below :data:`DET_TOL`.
    """
    a = _check_matrix(a)
    if abs(np.linalg.det(a)) <= DET_TOL:
        raise SingularMatrix("matrix is numerically singular")
    return float(jacobi_singular_values(a)[-1])


@dataclass(frozen=True)
class Subspace:
    """An s-dimensional subspace of R^n stored as an orthonormal frame.

    ``frame`` has shape (s, n); its rows are pairwise orthonormal to
    :data:`ORTHO_TOL`.
    """

    frame: np.ndarray

    def __post_init__(self):
        frame = np.array(self.frame, dtype=float)
        if frame.ndim != 2:
            raise DimensionMismatch("frame must be a 2-D array of row vectors")
        s, n = frame.shape
        if not 1 <= s <= n:
            raise BadDimensions(f"need 1 <= dim <= ambient dim, got {s} and {n}")
        gram = frame @ frame.T
        if np.max(np.abs(gram - np.eye(s))) > ORTHO_TOL:
            raise RankDeficient("frame rows are not orthonormal to tolerance")
        frame.setflags(write=False)
        object.__setattr__(self, "frame", frame)

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[1]

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    def project(self, x) -> np.ndarray:
        """Orthogonal projection of ``x`` onto the subspace."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.ambient_dim:
            raise DimensionMismatch(
                f"vector has dimension {x.shape[-1]}, subspace ambient {self.ambient_dim}"
            )
        return (x @ self.frame.T) @ self.frame

    def coordinates(self, x) -> np.ndarray:
        """Coefficients of the projection of ``x`` in the frame basis."""
        x = np.asarray(x, dtype=float)
        return x @ self.frame.T

    def embed(self, y) -> np.ndarray:
        """Map frame coordinates ``y`` (length s) back into R^n."""
        y = np.asarray(y, dtype=float)
        return y @ self.frame

    def complement(self) -> "Subspace":
        """Orthogonal complement, as a Subspace of dimension n - s."""
        s, n = self.frame.shape
        if s == n:
            raise BadDimensions("full space has no complement frame")
        # columns of the null space of the frame
        _, _, vt = np.linalg.svd(self.frame, full_matrices=True)
        return Subspace(vt[s:])

    def intersect(self, other: "Subspace") -> "Subspace | None":
        """Intersection with another subspace, or None when it is {0}.

        Uses principal angles: directions whose cosine is 1 to tolerance.
        """
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("subspaces live in different ambient dimensions")
        u, sv, _ = np.linalg.svd(self.frame @ other.frame.T)
        keep = sv > 1.0 - 1e-10
        if not np.any(keep):
            return None
        basis = u[:, keep].T @ self.frame
        return orthonormalize(basis)


def orthonormalize(vectors) -> Subspace:
    """Orthonormal frame spanning the given vectors (Gram-Schmidt, two passes).

    Raises :class:`RankDeficient` when the numerical rank, measured against
    the largest singular value at :data:`RANK_TOL`, is below the count.
    """
    v = np.array([np.asarray(row, dtype=float) for row in vectors])
    if v.ndim != 2 or v.shape[0] == 0:
        raise DimensionMismatch("need a nonempty list of equal-length vectors")
    s, n = v.shape
    if s > n:
        raise RankDeficient(f"{s} vectors cannot be independent in dimension {n}")
    if not np.all(np.isfinite(v)):
        raise DimensionMismatch("vector entries must be finite")
    sv = np.linalg.svd(v, compute_uv=False)
    if sv[-1] <= RANK_TOL * sv[0]:
        raise RankDeficient("vectors are numerically linearly dependent")
    frame = v.copy()
    for i in range(s):
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for j in range(i):
                frame[i] -= (frame[i] @ frame[j]) * frame[j]
        norm = np.linalg.norm(frame[i])
        if norm <= RANK_TOL * sv[0]:
            raise RankDeficient("vectors are numerically linearly dependent")
        frame[i] /= norm
    return Subspace(frame)


def project(x, subspace: Subspace) -> np.ndarray:
    """Orthogonal projection of ``x`` onto ``subspace``."""
    return subspace.project(x)


def random_subspace(n: int, s: int, seed=0) -> Subspace:
    """Haar-distributed s-dimensional subspace of R^n.

    Orthonormalizes s standard Gaussian vectors, which makes the law exactly
    invariant under orthogonal transformations.  Deterministic per seed.
    """
    if not (isinstance(n, (int, np.integer)) and isinstance(s, (int, np.integer))):
        raise BadDimensions("dimensions must be integers")
    if not 1 <= s <= n:
        raise BadDimensions(f"need 1 <= s <= n, got s={s}, n={n}")
    rng = as_generator(seed)
    while True:
        g = rng.standard_normal((s, n))
        try:
            return orthonormalize(g)
        except RankDeficient:  # pragma: no cover - probability zero, retry anyway
            continue


def full_space(n: int) -> Subspace:
    """The whole of R^n as a Subspace (identity frame)."""
    return Subspace(np.eye(n))
