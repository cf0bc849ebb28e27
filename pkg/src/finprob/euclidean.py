"""Finite-dimensional subspaces, orthogonal projectors, and chain limits.

The projector order mirrors the idempotent order of the kernel side:
P1 <= P2 iff both products equal P1 iff the image subspaces are nested.
Increasing chains converge pointwise to the projector of the closed span of
the union, decreasing chains to the projector of the intersection; under the
sup norm that pointwise convergence fails, which the truncation family
demonstrates at finite size.

Everything here runs in float64; exactness plays no role in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import (
    DimMismatchError,
    NotAChainError,
    NotLipschitzError,
    NotOrthonormalError,
)

DEFAULT_TOL = 1e-8

VectorNorm = Union[str, Callable[[np.ndarray], float]]


def _vec_norm(x: np.ndarray, kind: VectorNorm) -> float:
    if callable(kind):
        return float(kind(x))
    if kind == "euclidean":
        return float(np.linalg.norm(x))
    if kind == "sup":
        return float(np.max(np.abs(x))) if x.size else 0.0
    if kind == "sum":
        return float(np.sum(np.abs(x)))
    raise DimMismatchError(f"unknown vector norm {kind!r}")


def _operator_norm(m: np.ndarray, kind: VectorNorm) -> float:
    """Induced operator norm for the three named vector norms."""
    if kind == "euclidean":
        return float(np.linalg.norm(m, 2))
    if kind == "sup":
        return float(np.max(np.sum(np.abs(m), axis=1))) if m.size else 0.0
    if kind == "sum":
        return float(np.max(np.sum(np.abs(m), axis=0))) if m.size else 0.0
    raise DimMismatchError("operator norms are only defined for named vector norms")


class Subspace:
    """Subspace of R^d carried by an explicit orthonormal basis (possibly empty)."""

    __slots__ = ("basis", "ambient_dim")

    def __init__(self, basis: np.ndarray, ambient_dim: Optional[int] = None, tol: float = DEFAULT_TOL):
        basis = np.asarray(basis, dtype=np.float64)
        if basis.ndim == 1:
            basis = basis.reshape(-1, 1)
        if ambient_dim is None:
            ambient_dim = basis.shape[0]
        if basis.shape[0] != ambient_dim:
            raise DimMismatchError(
                f"basis vectors of length {basis.shape[0]} in ambient dim {ambient_dim}"
            )
        gram = basis.T @ basis
        if not np.allclose(gram, np.eye(basis.shape[1]), atol=tol):
            raise NotOrthonormalError("basis columns are not orthonormal")
        basis = basis.copy()
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "ambient_dim", int(ambient_dim))

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0)), ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(np.eye(ambient_dim), ambient_dim)

    @classmethod
    def from_spanning(
        cls, vectors: Sequence, ambient_dim: Optional[int] = None, tol: float = DEFAULT_TOL
    ) -> "Subspace":
        """Orthonormal basis of the span, by pivoted modified Gram-Schmidt
        with a re-orthogonalization pass; rank decisions use `tol` on
        residual norms."""
        cols = [np.asarray(v, dtype=np.float64) for v in vectors]
        if ambient_dim is None:
            if not cols:
                raise DimMismatchError("need vectors or an explicit ambient dimension")
            ambient_dim = cols[0].shape[0]
        basis: list[np.ndarray] = []
        remaining = [c.copy() for c in cols]
        while remaining:
            norms = [np.linalg.norm(c) for c in remaining]
            pick = int(np.argmax(norms))
            v = remaining.pop(pick)
            for u in basis:
                v -= (u @ v) * u
            for u in basis:  # second pass tightens near-parallel inputs
                v -= (u @ v) * u
            norm = np.linalg.norm(v)
            if norm > tol:
                basis.append(v / norm)
        mat = np.stack(basis, axis=1) if basis else np.zeros((ambient_dim, 0))
        return cls(mat, ambient_dim)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.linalg.norm(x - self.basis @ (self.basis.T @ x)) <= tol)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


class Projector:
    """Symmetric idempotent matrix: the orthogonal projector onto its image."""

    __slots__ = ("matrix",)

    def __init__(self, matrix: np.ndarray, tol: float = DEFAULT_TOL):
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimMismatchError("projector matrix must be square")
        if not np.allclose(m, m.T, atol=tol):
            raise NotOrthonormalError("projector is not symmetric")
        if not np.allclose(m @ m, m, atol=tol):
            raise NotOrthonormalError("projector is not idempotent")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("Projector is immutable")

    @property
    def ambient_dim(self) -> int:
        return int(self.matrix.shape[0])

    def __call__(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=np.float64)


def orthogonal_projector(s: Subspace) -> Projector:
    """P = sum of u u^T over the basis columns; the unique orthogonal
    projector with image s."""
    return Projector(s.basis @ s.basis.T if s.dim else np.zeros((s.ambient_dim, s.ambient_dim)))


def projector_image(p: Projector, tol: float = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the image, recovered from the spectrum."""
    vals, vecs = np.linalg.eigh(p.matrix)
    keep = vals > 0.5
    return Subspace(vecs[:, keep], p.ambient_dim, tol=tol)


def projector_leq(p1: Projector, p2: Projector, tol: float = DEFAULT_TOL) -> bool:
    """Projector order: both products equal p1. Cross-checked against the
    subspace-inclusion test (p2 fixes every image vector of p1)."""
    if p1.ambient_dim != p2.ambient_dim:
        raise DimMismatchError("projectors of different ambient dimension")
    a, b = p1.matrix, p2.matrix
    by_products = np.allclose(a @ b, a, atol=tol) and np.allclose(b @ a, a, atol=tol)
    image = projector_image(p1).basis
    by_inclusion = bool(np.allclose(b @ image, image, atol=max(tol, 1e-7)))
    if by_products != by_inclusion:
        raise NotOrthonormalError("product test and inclusion test disagree")
    return by_products


def closest_point_defect(s: Subspace, x) -> float:
    """|  ||x - Px|| - min_{v in s} ||x - v||  |, the minimum taken by an
    independent least-squares solve; zero says the projection is the closest
    point of the subspace."""
    x = np.asarray(x, dtype=np.float64)
    p = orthogonal_projector(s)
    via_projector = float(np.linalg.norm(x - p(x)))
    if s.dim == 0:
        analytic = float(np.linalg.norm(x))
    else:
        coeffs, *_ = np.linalg.lstsq(s.basis, x, rcond=None)
        analytic = float(np.linalg.norm(x - s.basis @ coeffs))
    return abs(via_projector - analytic)


def _require_subspace_chain(chain: Sequence[Subspace], increasing: bool) -> None:
    if not chain:
        raise NotAChainError("empty subspace chain")
    d = chain[0].ambient_dim
    for s in chain:
        if s.ambient_dim != d:
            raise DimMismatchError("chain mixes ambient dimensions")
    for a, b in zip(chain, chain[1:]):
        small, big = (a, b) if increasing else (b, a)
        ok = all(big.contains(small.basis[:, j]) for j in range(small.dim))
        if not ok:
            word = "increasing" if increasing else "decreasing"
            raise NotAChainError(f"subspaces are not {word} by inclusion")


def chain_sup(chain: Sequence[Subspace]) -> Subspace:
    """Span of the union of an increasing chain."""
    _require_subspace_chain(chain, increasing=True)
    vectors = [s.basis[:, j] for s in chain for j in range(s.dim)]
    return Subspace.from_spanning(vectors, chain[0].ambient_dim)


def chain_inf(chain: Sequence[Subspace]) -> Subspace:
    """Intersection of a decreasing chain: the joint fixed space of the
    projectors, via the null space of the stacked complements."""
    _require_subspace_chain(chain, increasing=False)
    d = chain[0].ambient_dim
    complements = [np.eye(d) - orthogonal_projector(s).matrix for s in chain]
    stacked = np.vstack(complements)
    _, svals, vt = np.linalg.svd(stacked)
    svals = np.concatenate([svals, np.zeros(d - len(svals))])
    keep = svals <= DEFAULT_TOL
    return Subspace(vt.T[:, keep], d)


@dataclass(frozen=True)
class PointwiseConvergenceReport:
    """Residual norms ||e_step(x) - e_limit(x)|| per probe and step."""

    residuals: tuple  # residuals[probe][step]
    probe_count: int
    converged: bool
    norm_kind: str


def _levi_demo(chain, probes, limit_space: Subspace, tol: float) -> PointwiseConvergenceReport:
    limit = orthogonal_projector(limit_space)
    projectors = [orthogonal_projector(s) for s in chain]
    table = []
    for x in probes:
        x = np.asarray(x, dtype=np.float64)
        table.append(tuple(float(np.linalg.norm(p(x) - limit(x))) for p in projectors))
    converged = all(row[-1] <= tol for row in table) if table else True
    return PointwiseConvergenceReport(tuple(table), len(table), converged, "euclidean")


def levi_up_demo(chain: Sequence[Subspace], probes: Sequence, tol: float = DEFAULT_TOL) -> PointwiseConvergenceReport:
    """Pointwise convergence of the projectors of an increasing chain to the
    projector of the span of the union."""
    _require_subspace_chain(chain, increasing=True)
    return _levi_demo(chain, probes, chain_sup(chain), tol)


def levi_down_demo(chain: Sequence[Subspace], probes: Sequence, tol: float = DEFAULT_TOL) -> PointwiseConvergenceReport:
    """Pointwise convergence of the projectors of a decreasing chain to the
    projector of the intersection."""
    _require_subspace_chain(chain, increasing=False)
    return _levi_demo(chain, probes, chain_inf(chain), tol)


def truncation_maps(n: int) -> list[np.ndarray]:
    """Coordinate-killing maps of the sup-norm counterexample: step i zeroes
    coordinate i. Composites zero a growing prefix; each step is 1-Lipschitz
    for the sup norm (and for the euclidean norm)."""
    out = []
    for i in range(n):
        m = np.eye(n)
        m[i, i] = 0.0
        out.append(m)
    return out


@dataclass(frozen=True)
class TruncationReport:
    """Norm plateau of the truncation chain against its vanishing intersection.

    sup_norms[i] = ||e_i(probe)||_inf for i = 0..n, where e_i zeroes the
    first i coordinates and the final entry projects onto the intersection
    {0}. The sup norms stay at 1 for the all-ones probe while the euclidean
    norms decay: the pointwise chain-limit property holds for the inner
    product norm and fails for the sup norm.
    """

    sup_norms: tuple
    euclidean_norms: tuple
    seminorm_all_ones: float

    @property
    def sup_plateau(self) -> bool:
        return all(v == self.sup_norms[0] for v in self.sup_norms[:-1])

    @property
    def euclidean_decays(self) -> bool:
        pairs = zip(self.euclidean_norms, self.euclidean_norms[1:])
        return all(b <= a for a, b in pairs) and self.euclidean_norms[-1] == 0.0


def banach_counterexample(n: int, probe=None) -> TruncationReport:
    """Finite truncation of the decreasing coordinate-subspace chain.

    e_i zeroes the first i coordinates (i = 0..n-1); the intersection of the
    images is {0}, reported as step n. For the all-ones probe every sup norm
    before the terminal step equals exactly 1.
    """
    if n < 2:
        raise DimMismatchError("need dimension at least 2")
    x = np.ones(n) if probe is None else np.asarray(probe, dtype=np.float64)
    if x.shape != (n,):
        raise DimMismatchError(f"probe must have length {n}")
    sup_norms = []
    euc_norms = []
    for i in range(n + 1):
        cut = x.copy()
        cut[:i] = 0.0
        sup_norms.append(_vec_norm(cut, "sup"))
        euc_norms.append(_vec_norm(cut, "euclidean"))
    maps = truncation_maps(n)[: n - 1]
    semi = colimit_seminorm(maps, x, norm="sup")
    return TruncationReport(tuple(sup_norms), tuple(euc_norms), semi)


def colimit_seminorm(
    maps: Sequence[np.ndarray],
    a,
    start: int = 0,
    norm: VectorNorm = "euclidean",
    tol: float = DEFAULT_TOL,
) -> float:
    """Final value of ||pi_m o ... o pi_start (a)|| along a 1-Lipschitz chain.

    The per-step norms are nonincreasing, so at finite scale the limit is
    the last value; independence from the starting index (restarting one
    step later with the pushed-forward vector) is verified. Surjectivity of
    the chain maps onto their targets is the caller's obligation.
    """
    if start < 0 or start >= len(maps) + 1:
        raise NotAChainError(f"start index {start} outside the chain")
    maps = [np.asarray(m, dtype=np.float64) for m in maps[start:]]
    for m in maps:
        if _operator_norm(m, norm) > 1.0 + tol:
            raise NotLipschitzError("chain map exceeds operator norm 1")
    x = np.asarray(a, dtype=np.float64)
    value = _vec_norm(x, norm)
    for m in maps:
        x = m @ x
        nxt = _vec_norm(x, norm)
        if nxt > value + tol:
            raise NotLipschitzError("norms increased along the chain")
        value = nxt
    if maps:
        y = maps[0] @ np.asarray(a, dtype=np.float64)
        later = colimit_seminorm(maps[1:], y, 0, norm, tol)
        if abs(later - value) > tol:
            raise NotAChainError("seminorm depends on the starting index")
    return value
