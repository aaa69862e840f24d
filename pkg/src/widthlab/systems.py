"""Orthonormal systems on probability spaces, with quadrature-backed L_p norms.

A system is stored as a matrix of function values over the nodes of a
quadrature rule whose weights form a probability measure.  The rules shipped
here integrate products of any two system functions exactly, so the Gram
matrix is the identity to machine precision and the p=2 norm of a coefficient
vector coincides with its Euclidean norm.

The p=infinity norm is evaluated as a max over nodes.  That is a lower bound
on the true sup; node counts are chosen dense enough (and, on the sphere, the
poles are appended with weight zero) to keep the gap small for the shipped
systems.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammaln, lpmv

from .errors import BadDimensions, CannotSatisfy, DimensionMismatch

#: tolerance on the Gram matrix deviating from the identity
GRAM_TOL = 1e-8


def abs_power(a: np.ndarray, p: float) -> np.ndarray:
    """|a|^p with cheap paths for small integer and half-integer exponents.

    Monte-Carlo loops evaluate this on large arrays; np.power with a float
    exponent dominates their run time otherwise.
    """
    a = np.abs(a)
    twice = 2.0 * p
    if twice == int(twice) and 0 < twice <= 17:
        half = int(twice)
        out = np.sqrt(a) if half % 2 else None
        base = a
        acc = None
        k = half // 2
        while k:  # repeated squaring for the integer part
            if k & 1:
                acc = base if acc is None else acc * base
            base = base * base
            k >>= 1
        if out is None:
            return acc if acc is not None else np.ones_like(a)
        return out if acc is None else acc * out
    return a ** p


def _next_prime(m: int) -> int:
    def is_prime(q: int) -> bool:
        if q < 2:
            return False
        for f in range(2, int(q**0.5) + 1):
            if q % f == 0:
                return False
        return True

    while not is_prime(m):
        m += 1
    return m


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and nonnegative weights summing to one (a probability measure)."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if weights.ndim != 1 or len(weights) != len(nodes):
            raise DimensionMismatch("need one weight per node")
        if np.any(weights < 0):
            raise BadDimensions("quadrature weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise BadDimensions(f"weights must sum to 1, got {weights.sum()!r}")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class OrthonormalSystem:
    """A finite orthonormal system with precomputed node values.

    ``values[k, i]`` is the k-th function at the i-th quadrature node;
    ``sup_norms[k]`` is a certified upper bound for its sup norm (never
    smaller than the max over nodes).
    """

    name: str
    quadrature: QuadratureRule
    values: np.ndarray
    sup_norms: np.ndarray
    evaluator: Callable | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        sup = np.array(self.sup_norms, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(self.quadrature):
            raise DimensionMismatch("values must be (n_functions, n_nodes)")
        if sup.shape != (values.shape[0],):
            raise DimensionMismatch("need one sup-norm bound per function")
        grid_max = np.max(np.abs(values), axis=1)
        if np.any(sup < grid_max - 1e-12):
            raise BadDimensions("sup-norm bounds fall below observed node maxima")
        values.setflags(write=False)
        sup.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sup_norms", sup)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def key(self) -> tuple:
        return (self.name, self.n)

    def gram(self) -> np.ndarray:
        w = self.quadrature.weights
        return (self.values * w) @ self.values.T

    def lp_norm_many(self, coeffs: np.ndarray, p: float) -> np.ndarray:
        """Quadrature L_p norms of the functions with coefficient rows ``coeffs``."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != self.n:
            raise DimensionMismatch(
                f"coefficient length {coeffs.shape[-1]} != system size {self.n}"
            )
        if p < 1:
            raise BadDimensions(f"p must be >= 1, got {p}")
        f = coeffs @ self.values
        if np.isinf(p):
            return np.max(np.abs(f), axis=-1)
        w = self.quadrature.weights
        if p == 2.0:  # exact by quadrature construction, keep the fast path stable
            return np.sqrt((f * f) @ w)
        return (abs_power(f, p) @ w) ** (1.0 / p)

    def lp_norm(self, coeffs, p: float) -> float:
        return float(self.lp_norm_many(np.asarray(coeffs, dtype=float)[None, :], p)[0])

    def prefix(self, n: int) -> "OrthonormalSystem":
        """Subsystem made of the first ``n`` functions (still orthonormal)."""
        if not 1 <= n <= self.n:
            raise BadDimensions(f"prefix size must be in 1..{self.n}")
        if n == self.n:
            return self
        return OrthonormalSystem(
            name=f"{self.name}[:{n}]",
            quadrature=self.quadrature,
            values=self.values[:n],
            sup_norms=self.sup_norms[:n],
            evaluator=self.evaluator,
        )

    def to_json(self) -> str:
        payload = {
            "name": self.name,
            "n": self.n,
            "nodes": np.asarray(self.quadrature.nodes).tolist(),
            "weights": self.quadrature.weights.tolist(),
            "sup_norms": self.sup_norms.tolist(),
        }
        return json.dumps(payload, sort_keys=True)


def lp_norm(system: OrthonormalSystem, coeffs, p: float) -> float:
    """L_p norm (p in [1, inf]) of the function with the given coefficients."""
    return system.lp_norm(coeffs, p)


def trig_system(max_degree: int) -> OrthonormalSystem:
    """Trigonometric system {1, sqrt2 cos k t, sqrt2 sin k t} on the circle.

    Normalized uniform measure on [0, 2*pi); the node count is a prime large
    enough that products of system functions integrate exactly and the
    node-max of every function is within 1% of its true sup.
    """
    if max_degree < 0:
        raise BadDimensions("max_degree must be >= 0")
    k = int(max_degree)
    # prime node count: every frequency then sweeps all m phases, so the
    # node-max of each function is within 1 - cos(pi/m) < 1% of its sup
    m = _next_prime(max(23 * k + 1, 4 * k + 1, 29))
    theta = 2.0 * np.pi * np.arange(m) / m
    weights = np.full(m, 1.0 / m)

    rows = [np.ones(m)]
    sup = [1.0]
    for deg in range(1, k + 1):
        rows.append(np.sqrt(2.0) * np.cos(deg * theta))
        rows.append(np.sqrt(2.0) * np.sin(deg * theta))
        sup.extend([np.sqrt(2.0), np.sqrt(2.0)])

    def evaluate(idx: int, t: float) -> float:
        if idx == 0:
            return 1.0
        deg, which = divmod(idx - 1, 2)
        f = np.cos if which == 0 else np.sin
        return float(np.sqrt(2.0) * f((deg + 1) * t))

    return OrthonormalSystem(
        name=f"trig-{2 * k + 1}",
        quadrature=QuadratureRule(theta, weights),
        values=np.array(rows),
        sup_norms=np.array(sup),
        evaluator=evaluate,
    )


def _real_harmonic_rows(max_degree: int, t: np.ndarray, phi: np.ndarray):
    """Rows of real spherical harmonics at points (cos polar = t, azimuth = phi).

    Orthonormal with respect to the *normalized* surface measure, so the
    constant is 1 and the degree-1 zonal is sqrt(3) * cos(polar angle).
    """
    rows = []
    labels = []
    for k in range(max_degree + 1):
        for order in range(-k, k + 1):
            m = abs(order)
            norm = np.exp(0.5 * (np.log(2 * k + 1) + gammaln(k - m + 1) - gammaln(k + m + 1)))
            base = norm * lpmv(m, k, t)
            if order == 0:
                rows.append(base)
            elif order > 0:
                rows.append(np.sqrt(2.0) * base * np.cos(m * phi))
            else:
                rows.append(np.sqrt(2.0) * base * np.sin(m * phi))
            labels.append((k, order))
    return np.array(rows), labels


def sphere_harmonics_system(max_degree: int) -> OrthonormalSystem:
    """Real spherical harmonics on the 2-sphere through ``max_degree``.

    Gauss-Legendre nodes in the polar cosine crossed with a uniform azimuthal
    grid; exact for products of any two shipped harmonics.  The two poles are
    appended with weight zero so the node-max picks up the zonal peaks.
    """
    if not 0 <= max_degree <= 12:
        raise BadDimensions("max_degree must be in 0..12")
    k = int(max_degree)
    n_polar = 2 * k + 2
    n_azim = 4 * k + 3
    t_gl, w_gl = np.polynomial.legendre.leggauss(n_polar)
    phi_grid = 2.0 * np.pi * np.arange(n_azim) / n_azim

    t = np.repeat(t_gl, n_azim)
    phi = np.tile(phi_grid, n_polar)
    w = np.repeat(w_gl / 2.0, n_azim) / n_azim
    # zero-weight poles: the zonal harmonics attain their sup there
    t = np.concatenate([t, [1.0, -1.0]])
    phi = np.concatenate([phi, [0.0, 0.0]])
    w = np.concatenate([w, [0.0, 0.0]])
    w = w / w.sum()

    rows, labels = _real_harmonic_rows(k, t, phi)
    # certified bound: sum over an eigenspace of squares is 2k+1 pointwise
    sup = np.array([np.sqrt(2 * deg + 1) for deg, _ in labels])

    def evaluate(idx: int, point) -> float:
        tt, pp = float(point[0]), float(point[1])
        row, _ = _real_harmonic_rows(k, np.array([tt]), np.array([pp]))
        return float(row[idx, 0])

    return OrthonormalSystem(
        name=f"sphere-{(k + 1) ** 2}",
        quadrature=QuadratureRule(np.column_stack([t, phi]), w),
        values=rows,
        sup_norms=sup,
        evaluator=evaluate,
    )


def trig_prefix_system(n: int) -> OrthonormalSystem:
    """Trigonometric system truncated to its first ``n`` functions.

    Any prefix of an orthonormal sequence is orthonormal, which provides
    coefficient spaces of every dimension, not only the odd 2k+1 sizes.
    """
    if n < 1:
        raise BadDimensions("n must be >= 1")
    return trig_system(math.ceil((n - 1) / 2)).prefix(n)


@dataclass(frozen=True)
class BoundedSubsystem:
    """A proportional sub-family of a system with a uniform sup-norm bound."""

    parent: OrthonormalSystem
    indices: tuple
    bound: float
    fraction: float

    @property
    def size(self) -> int:
        return len(self.indices)


def bounded_subsystem(system: OrthonormalSystem, fraction: float) -> BoundedSubsystem:
    """Select ceil(fraction * n) functions of smallest sup norm.

    Any subset of an orthonormal family is orthonormal, so greedy selection
    by sup norm is the simplest rule producing a uniformly bounded
    proportional subsystem.  For the shipped systems the resulting bound
    depends only on the fraction, not on n (checked empirically in tests).
    """
    if not 0.0 < fraction < 1.0:
        raise BadDimensions("fraction must lie strictly between 0 and 1")
    m = max(1, math.ceil(fraction * system.n))
    order = np.argsort(system.sup_norms, kind="stable")
    chosen = order[:m]
    bound = float(system.sup_norms[chosen].max())
    if not np.isfinite(bound):
        raise CannotSatisfy(
            f"no subset of size {m} of {system.name} has finite sup norms"
        )
    return BoundedSubsystem(
        parent=system,
        indices=tuple(int(i) for i in chosen),
        bound=bound,
        fraction=fraction,
    )
