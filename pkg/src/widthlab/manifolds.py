"""Spectral data of compact two-point homogeneous spaces.

Laplace eigenvalues, eigenspace dimensions, and cumulative counts for the
five families: spheres and the projective spaces over the reals, complexes,
quaternions, and octonions.  Eigenvalues follow the Jacobi parametrization
theta_k = k(k + alpha + beta + 1); real projective spaces carry only even
degrees, handled by internal reindexing.  Dimensions use the exact
Jacobi-weight closed form rather than just their k^(d-1) order, because
multiplier truncations need exact cumulative counts.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

from .bodies import MultiplierSpec
from .errors import BadDimensions

_FAMILIES = ("sphere", "real_projective", "complex_projective",
             "quaternionic_projective", "cayley_plane")


@lru_cache(maxsize=None)
def _jacobi_eigenspace_dim(alpha: float, beta: float, k: int) -> int:
    if k == 0:
        return 1
    v = (math.log(2 * k + alpha + beta + 1)
         + math.lgamma(beta + 1) + math.lgamma(k + alpha + beta + 1)
         + math.lgamma(k + alpha + 1) - math.lgamma(alpha + 1)
         - math.lgamma(alpha + beta + 2) - math.lgamma(k + 1)
         - math.lgamma(k + beta + 1))
    return int(round(math.exp(v)))


@dataclass(frozen=True)
class TwoPointSpace:
    """A compact two-point homogeneous space reduced to its spectral data."""

    family: str
    d: int
    alpha: float
    beta: float
    even_only: bool = False

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise BadDimensions(f"unknown family {self.family!r}")
        if abs(self.alpha - (self.d - 2) / 2.0) > 1e-12:
            raise BadDimensions("alpha must equal (d-2)/2 for these families")

    @property
    def name(self) -> str:
        return f"{self.family}-d{self.d}"

    def _degree(self, k: int) -> int:
        return 2 * k if self.even_only else k

    def eigenvalue(self, k: int) -> float:
        """k-th distinct Laplace eigenvalue (k >= 0); 0 at k=0."""
        if k < 0:
            raise BadDimensions("k must be >= 0")
        deg = self._degree(k)
        return float(deg * (deg + self.alpha + self.beta + 1.0))

    def eigenspace_dim(self, k: int) -> int:
        """Dimension of the k-th eigenspace (exact closed form)."""
        if k < 0:
            raise BadDimensions("k must be >= 0")
        return _jacobi_eigenspace_dim(self.alpha, self.beta, self._degree(k))

    def tau(self, N: int) -> int:
        """Cumulative dimension of the eigenspaces through level N."""
        if N < 0:
            raise BadDimensions("N must be >= 0")
        return sum(self.eigenspace_dim(k) for k in range(N + 1))

    def weyl_ratio(self, N: int) -> float:
        """tau_N / theta_N^(d/2); stabilizes as N grows (eigenvalue counting)."""
        if N < 1:
            raise BadDimensions("N must be >= 1")
        return self.tau(N) / self.eigenvalue(N) ** (self.d / 2.0)


def sphere(d: int) -> TwoPointSpace:
    if d < 2:
        raise BadDimensions("spheres need d >= 2")
    a = (d - 2) / 2.0
    return TwoPointSpace("sphere", d, a, a)


def real_projective(d: int) -> TwoPointSpace:
    if d < 2:
        raise BadDimensions("real projective spaces need d >= 2")
    a = (d - 2) / 2.0
    return TwoPointSpace("real_projective", d, a, a, even_only=True)


def complex_projective(d: int) -> TwoPointSpace:
    if d < 4 or d % 2:
        raise BadDimensions("complex projective spaces need even d >= 4")
    return TwoPointSpace("complex_projective", d, (d - 2) / 2.0, 0.0)


def quaternionic_projective(d: int) -> TwoPointSpace:
    if d < 8 or d % 4:
        raise BadDimensions("quaternionic projective spaces need d in {8, 12, ...}")
    return TwoPointSpace("quaternionic_projective", d, (d - 2) / 2.0, 1.0)


def cayley_plane() -> TwoPointSpace:
    return TwoPointSpace("cayley_plane", 16, 7.0, 3.0)


def all_families() -> list[TwoPointSpace]:
    """One representative per family, smallest admissible dimension first."""
    return [sphere(2), real_projective(3), complex_projective(4),
            quaternionic_projective(8), cayley_plane()]


def sobolev_multiplier(space: TwoPointSpace, gamma: float) -> MultiplierSpec:
    """Multiplier with rate t^(-gamma/2): smoothness gamma on the space.

    Entries start at the first nonzero eigenvalue (constants are excluded)
    and the rate is a power, hence regularly varying.
    """
    if gamma <= 0:
        raise BadDimensions("gamma must be positive")
    return MultiplierSpec(lambda_fn=lambda t: float(t) ** (-gamma / 2.0),
                          regularly_varying=True)


def spectral_table(space: TwoPointSpace, N: int) -> list[tuple]:
    """Rows (k, theta_k, dim_k, tau_k) for k = 0..N."""
    rows = []
    running = 0
    for k in range(N + 1):
        running += space.eigenspace_dim(k)
        rows.append((k, space.eigenvalue(k), space.eigenspace_dim(k), running))
    return rows


def write_spectral_csv(space: TwoPointSpace, N: int, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "theta", "dim", "tau"])
        for row in spectral_table(space, N):
            writer.writerow([row[0], repr(row[1]), row[2], row[3]])
