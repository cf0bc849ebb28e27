"""Computable distances metrizing kernel convergence, and convergence checks.

The setwise notion of convergence for kernel sequences is realized at finite
scale by the weighted entrywise L^1 distance: it dominates the per-set
integral for every codomain subset and is dominated by a multiple of the
worst one, so its null sequences are exactly the convergent ones. The
two-sided variant adds the same distance between the Bayesian inverses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import FinprobError, NotMeasurePreservingError, SpaceMismatchError
from .kernels import Kernel, as_equal_kernels, bayes_inverse, compose, is_measure_preserving
from .numerics import check_norm_index, is_infinite
from .spaces import RandomVar, indicator, ln_norm


def one_sided_distance(k: Kernel, h: Kernel):
    """sum_x p(x) sum_y |k(y|x) - h(y|x)|: a pseudometric on kernels, zero
    exactly on a.s.-equal pairs."""
    if not (k.domain.same_as(h.domain) and k.codomain.same_as(h.codomain)):
        raise SpaceMismatchError("kernels have different domain or codomain")
    p = k.domain.weights
    total = k.mode.zero()
    for x in k.domain.support:
        row = k.rows[x]
        other = h.rows[x]
        total = total + p[x] * sum(abs(row[y] - other[y]) for y in range(k.codomain.size))
    return total


def two_sided_distance(k: Kernel, h: Kernel):
    """One-sided distance of the kernels plus one-sided distance of their
    Bayesian inverses; both kernels must be measure-preserving onto the same
    codomain measure so that the inverses are parallel."""
    if not (k.domain.same_as(h.domain) and k.codomain.same_as(h.codomain)):
        raise SpaceMismatchError("kernels have different domain or codomain")
    if not (is_measure_preserving(k) and is_measure_preserving(h)):
        raise NotMeasurePreservingError("two-sided distance needs measure-preserving kernels")
    return one_sided_distance(k, h) + one_sided_distance(bayes_inverse(k), bayes_inverse(h))


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-step distances with a horizon-bounded verdict.

    converged is true exactly when some index exists from which every later
    distance stays at or below the tolerance; stabilization_index is the
    first such index.
    """

    step_distances: tuple
    converged: bool
    stabilization_index: Optional[int]
    tolerance: float
    horizon: int

    def __post_init__(self):
        if self.converged:
            idx = self.stabilization_index
            ok = idx is not None and all(
                d <= self.tolerance for d in self.step_distances[idx:]
            )
            if not ok:
                raise ValueError("report marked converged but the tail exceeds tolerance")


def report_from_distances(
    distances: Sequence, tolerance, horizon: Optional[int] = None
) -> ConvergenceReport:
    """Verdict from raw distances: stabilization is the first index whose
    whole tail stays within tolerance; no such index means not converged."""
    distances = tuple(distances)
    if horizon is None:
        horizon = len(distances)
    if not distances:
        return ConvergenceReport((), False, None, tolerance, horizon)
    idx = len(distances)
    for i in range(len(distances) - 1, -1, -1):
        if distances[i] <= tolerance:
            idx = i
        else:
            break
    if idx == len(distances):
        return ConvergenceReport(distances, False, None, tolerance, horizon)
    return ConvergenceReport(distances, True, idx, tolerance, horizon)


def check_convergence(
    seq: Sequence[Kernel],
    limit: Kernel,
    metric: str = "one-sided",
    tol=None,
    horizon: Optional[int] = None,
) -> ConvergenceReport:
    """Distances from each sequence element to the limit, with a verdict.

    metric is "one-sided" or "two-sided"; the tolerance defaults to the
    numeric mode's (0 in rational mode).
    """
    if metric not in ("one-sided", "two-sided"):
        raise FinprobError(f"unknown metric {metric!r}")
    dist = one_sided_distance if metric == "one-sided" else two_sided_distance
    if horizon is not None:
        seq = seq[:horizon]
    distances = [dist(k, limit) for k in seq]
    if tol is None:
        tol = limit.mode.tolerance if not limit.mode.exact else 0
    return report_from_distances(distances, tol, horizon or len(distances))


def _subsets(size: int, cap: int = 10):
    """Nonempty proper subsets when small enough, singletons otherwise."""
    if size <= cap:
        for mask in range(1, (1 << size) - 1):
            yield [y for y in range(size) if mask >> y & 1]
        yield list(range(size))
    else:
        for y in range(size):
            yield [y]


def operator_pointwise_distances(
    seq: Sequence[Kernel], limit: Kernel, n=1
) -> list:
    """Per-step worst-case L^n distance of the pullbacks over indicator RVs."""
    check_norm_index(n)
    space = limit.codomain
    if not limit.mode.exact:
        return _operator_distances_float(seq, limit, n)
    inds = [indicator(space, s) for s in _subsets(space.size)]
    out = []
    for k in seq:
        worst = limit.mode.zero()
        for g in inds:
            lhs = RandomVar(
                [sum((k.rows[x][y] - limit.rows[x][y]) * g.values[y] for y in range(space.size))
                 for x in range(k.domain.size)],
                k.domain,
            )
            d = ln_norm(lhs, n)
            if d > worst:
                worst = d
        out.append(worst)
    return out


def _operator_distances_float(seq: Sequence[Kernel], limit: Kernel, n) -> list:
    """Vectorized float path: pull all indicators at once per step."""
    m = limit.codomain.size
    masks = np.array(
        [[mask >> y & 1 for mask in range(1, 1 << m)] for y in range(m)], dtype=np.float64
    ) if m <= 10 else np.eye(m)
    p = limit.domain.weights
    out = []
    for k in seq:
        pulled = np.abs((k.rows - limit.rows) @ masks)
        if is_infinite(n):
            live = pulled[list(limit.domain.support), :]
            worst = float(live.max()) if live.size else 0.0
        else:
            worst = float((p @ pulled**n).max() ** (1.0 / n))
        out.append(worst)
    return out


def homeomorphism_check(seq: Sequence[Kernel], limit: Kernel, n=1, tol=None) -> bool:
    """Agreement of the two convergence notions: the kernel metric goes to
    zero iff the pullback operators converge pointwise on indicator RVs.

    Returns True when both verdicts agree (both converge or both fail).
    """
    metric_report = check_convergence(seq, limit, "one-sided", tol=tol)
    distances = operator_pointwise_distances(seq, limit, n)
    if tol is None:
        tol = limit.mode.tolerance if not limit.mode.exact else 0
    operator_report = report_from_distances(distances, tol)
    return metric_report.converged == operator_report.converged


def composition_continuity_probe(
    seq_k: Sequence[Kernel],
    seq_h: Sequence[Kernel],
    limit_k: Optional[Kernel] = None,
    limit_h: Optional[Kernel] = None,
):
    """Final-step distance between compose(lim k, lim h) and the composed
    sequence: small for convergent inputs, since composition is jointly
    continuous. Limits default to the last elements."""
    if len(seq_k) != len(seq_h) or not seq_k:
        raise SpaceMismatchError("sequences must be nonempty and equally long")
    if limit_k is None:
        limit_k = seq_k[-1]
    if limit_h is None:
        limit_h = seq_h[-1]
    target = compose(limit_k, limit_h)
    return one_sided_distance(compose(seq_k[-1], seq_h[-1]), target)


def limit_is_idempotent(seq: Sequence[Kernel], limit: Kernel) -> bool:
    """For a sequence of a.s. idempotent kernels converging to `limit`, the
    limit is a.s. idempotent as well; this checks that concrete instance."""
    return as_equal_kernels(compose(limit, limit), limit)
