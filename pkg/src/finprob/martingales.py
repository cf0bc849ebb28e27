"""Filtrations, martingales, and verified convergence at finite scale.

A filtration is a monotone sequence of partitions; its limit object is the
iterated join (increasing case) or the iterated meet of the null-set
completions (decreasing case). Conditioning a fixed RV along the filtration
yields a (forward or backward) martingale, and on a finite lattice the
filtration stabilizes, so convergence verdicts can demand exact almost-sure
equality beyond the stabilization index instead of mere smallness. Metric
tolerances only absorb float drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    InvalidFiltrationError,
    NotAMartingaleError,
    NotMonotoneError,
    SpaceMismatchError,
    TooLargeError,
)
from .idempotents import (
    IdempotentKernel,
    cond_exp_kernel,
    idem_leq,
    inf_idempotents,
    leq_comparator,
    sup_idempotents,
)
from .kernels import as_equal_kernels
from .metrics import ConvergenceReport, one_sided_distance
from .numerics import NumericMode, check_norm_index, rational_mode
from .operators import VNorm, bochner_norm, cond_expectation, vector_cond_expectation
from .partitions import (
    Partition,
    all_partitions,
    as_measurable_wrt,
    complete_partition,
    join_partitions,
    meet_partitions,
)
from .spaces import ProbSpace, RandomVar, VecRandomVar, as_equal_rv, as_equal_vec_rv, ln_norm, uniform_space

INCREASING = "increasing"
DECREASING = "decreasing"


class Filtration:
    """Monotone sequence of partitions of one space.

    Monotonicity is almost-sure: after null-set completion, each step must
    refine (increasing) or coarsen (decreasing) its predecessor. Structural
    refinement implies the completed one, so ordinary filtrations pass
    unchanged, while a.s.-equal stand-ins are accepted too.
    """

    __slots__ = ("partitions", "direction", "space")

    def __init__(self, partitions: Sequence[Partition], direction: str, space: ProbSpace):
        if direction not in (INCREASING, DECREASING):
            raise InvalidFiltrationError(f"unknown direction {direction!r}")
        partitions = tuple(partitions)
        if not partitions:
            raise InvalidFiltrationError("a filtration needs at least one partition")
        for p in partitions:
            if p.parent_size != space.size:
                raise InvalidFiltrationError(
                    f"partition of size {p.parent_size} on a {space.size}-outcome space"
                )
        completed = [complete_partition(p, space) for p in partitions]
        for a, b in zip(completed, completed[1:]):
            fine, coarse = (b, a) if direction == INCREASING else (a, b)
            if not fine.refines(coarse):
                raise InvalidFiltrationError(
                    f"partitions do not form an {direction} filtration (a.s.)"
                )
        object.__setattr__(self, "partitions", partitions)
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "space", space)

    def __setattr__(self, name, value):
        raise AttributeError("Filtration is immutable")

    def __len__(self) -> int:
        return len(self.partitions)


def filtration_limit(f: Filtration) -> Partition:
    """Limit partition: iterated join, or iterated meet of the completions.

    Completion comes before meeting; meets of raw partitions would lose the
    counterexample where two a.s.-equal partitions have trivial intersection.
    """
    if f.direction == INCREASING:
        out = f.partitions[0]
        for p in f.partitions[1:]:
            out = join_partitions(out, p)
        return out
    out = complete_partition(f.partitions[0], f.space)
    for p in f.partitions[1:]:
        out = meet_partitions(out, complete_partition(p, f.space))
    return out


class Martingale:
    """RVs adapted to a filtration, earlier ones conditioning later ones."""

    __slots__ = ("filtration", "rvs")

    def __init__(self, filtration: Filtration, rvs: Sequence[RandomVar]):
        rvs = tuple(rvs)
        if len(rvs) != len(filtration.partitions):
            raise NotAMartingaleError("one RV per filtration step is required")
        for rv in rvs:
            if not rv.space.same_as(filtration.space):
                raise SpaceMismatchError("martingale RVs must live on the filtration's space")
        object.__setattr__(self, "filtration", filtration)
        object.__setattr__(self, "rvs", rvs)

    def __setattr__(self, name, value):
        raise AttributeError("Martingale is immutable")


def martingale_from_terminal(f: RandomVar, filtration: Filtration) -> Martingale:
    """Condition a fixed RV along every level of the filtration.

    The tower property makes the result a martingale (backward for
    decreasing filtrations).
    """
    if not f.space.same_as(filtration.space):
        raise SpaceMismatchError("terminal RV must live on the filtration's space")
    rvs = [cond_expectation(f, p) for p in filtration.partitions]
    return Martingale(filtration, rvs)


def is_martingale(m: Martingale, all_pairs: Optional[bool] = None) -> bool:
    """Check adaptedness and the tower identities.

    Adjacent pairs suffice by transitivity; in rational mode (or on request)
    every pair is checked.
    """
    filtration = m.filtration
    if all_pairs is None:
        all_pairs = filtration.space.mode.exact
    for rv, p in zip(m.rvs, filtration.partitions):
        if not as_measurable_wrt(rv, p):
            return False
    size = len(m.rvs)
    pairs = (
        [(i, j) for i in range(size) for j in range(i + 1, size)]
        if all_pairs
        else [(i, i + 1) for i in range(size - 1)]
    )
    for i, j in pairs:
        if filtration.direction == INCREASING:
            expected = cond_expectation(m.rvs[j], filtration.partitions[i])
            if not as_equal_rv(expected, m.rvs[i]):
                return False
        else:
            expected = cond_expectation(m.rvs[i], filtration.partitions[j])
            if not as_equal_rv(expected, m.rvs[j]):
                return False
    return True


def _limit_rv(m: Martingale) -> RandomVar:
    base = m.rvs[-1] if m.filtration.direction == INCREASING else m.rvs[0]
    return cond_expectation(base, filtration_limit(m.filtration))


def levy_report(m: Martingale, n=1) -> ConvergenceReport:
    """Per-step L^n distances of the martingale to its limit RV.

    The limit is the conditional expectation of the generating RV on the
    limit partition. Convergence demands a.s. equality from the
    stabilization index on (exact beyond float drift), which on a finite
    lattice always happens at the final step at the latest.
    """
    check_norm_index(n)
    if not is_martingale(m, all_pairs=False):
        # adjacent tower identities suffice by transitivity
        raise NotAMartingaleError("tower identities fail; not a martingale")
    f_inf = _limit_rv(m)
    distances = tuple(ln_norm(rv - f_inf, n) for rv in m.rvs)
    equal = [as_equal_rv(rv, f_inf) for rv in m.rvs]
    return _stabilization_report(distances, equal, m.filtration.space.mode)


def _stabilization_report(distances, equal_flags, mode: NumericMode) -> ConvergenceReport:
    """Report whose stabilization is decided by a.s. equality, not distance."""
    idx = len(equal_flags)
    for i in range(len(equal_flags) - 1, -1, -1):
        if equal_flags[i]:
            idx = i
        else:
            break
    tol = 0 if mode.exact else mode.tolerance
    if idx == len(equal_flags):
        return ConvergenceReport(tuple(distances), False, None, tol, len(distances))
    return ConvergenceReport(tuple(distances), True, idx, tol, len(distances))


@dataclass(frozen=True)
class NoncauchyDiagnostics:
    """L^1 norms of the levels and of the increments of the escaping-mass
    martingale; constant 1 norms with constant 1 increments witness the lack
    of uniform integrability."""

    l1_norms: tuple
    increment_l1_norms: tuple


def dyadic_space(levels: int, mode: NumericMode = rational_mode()) -> ProbSpace:
    """The unit interval discretized into 2**levels equal-mass atoms."""
    return uniform_space(1 << levels, mode)


def dyadic_partition(levels: int, level: int) -> Partition:
    """Partition of 2**levels atoms into 2**level consecutive runs."""
    n = 1 << levels
    run = 1 << (levels - level)
    return Partition([range(i, i + run) for i in range(0, n, run)], n)


def dyadic_filtration(
    levels: int,
    mode: NumericMode = rational_mode(),
    direction: str = INCREASING,
) -> Filtration:
    space = dyadic_space(levels, mode)
    parts = [dyadic_partition(levels, lv) for lv in range(levels + 1)]
    if direction == DECREASING:
        parts.reverse()
    return Filtration(parts, direction, space)


def nonintegrable_example(levels: int, mode: NumericMode = rational_mode()):
    """Martingale whose mass escapes to a shrinking dyadic corner.

    Level k takes the value 2**k on the first 2**(levels-k) atoms and 0
    elsewhere. Every level has L^1 norm exactly 1 and every increment has
    L^1 norm exactly 1, so the sequence is not Cauchy in L^1 and no terminal
    RV generates it; it is nevertheless a genuine martingale.
    """
    if levels < 2:
        raise TooLargeError("need at least 2 levels")
    filtration = dyadic_filtration(levels, mode)
    space = filtration.space
    n = space.size
    one = mode.one()
    rvs = []
    for k in range(levels + 1):
        head = 1 << (levels - k)
        value = (Fraction(1 << k) if mode.exact else float(1 << k))
        rvs.append(RandomVar([value if i < head else 0 * one for i in range(n)], space))
    m = Martingale(filtration, rvs)
    l1 = tuple(ln_norm(rv, 1) for rv in rvs)
    increments = tuple(ln_norm(rvs[k + 1] - rvs[k], 1) for k in range(levels))
    return m, NoncauchyDiagnostics(l1, increments)


def preserves_optima_check(f: Filtration, n=2, max_size: int = 8) -> bool:
    """The limit partition's conditioning operator is the least upper bound
    (increasing case) or greatest lower bound (decreasing case) of the
    per-level operators in the idempotent order.

    Bound and optimality are checked against every partition-induced
    idempotent of the space, exhaustively. The order of the pullback
    operators is settled by matrix composites and therefore does not depend
    on the norm index n; n is validated and recorded only.
    """
    check_norm_index(n)
    space = f.space
    if space.size > max_size:
        raise TooLargeError(f"exhaustive optimality check over {space.size} outcomes refused")
    prepare, below = leq_comparator(space)
    levels = [prepare(cond_exp_kernel(space, p, validate=False)) for p in f.partitions]
    e_limit = prepare(cond_exp_kernel(space, filtration_limit(f), validate=False))
    increasing = f.direction == INCREASING

    for e in levels:
        ok = below(e, e_limit) if increasing else below(e_limit, e)
        if not ok:
            return False
    for q in all_partitions(space.size):
        cand = prepare(cond_exp_kernel(space, q, validate=False))
        if increasing:
            if all(below(e, cand) for e in levels) and not below(e_limit, cand):
                return False
        else:
            if all(below(cand, e) for e in levels) and not below(cand, e_limit):
                return False
    return True


def levi_property_check(chain: Sequence[IdempotentKernel]) -> ConvergenceReport:
    """Distance of each chain element to the chain's supremum or infimum.

    The one-sided and two-sided metrics agree on idempotents (they are
    self-dual), so the one-sided distance is reported. Stabilization is
    decided by a.s. equality with the optimum.
    """
    if not chain:
        raise NotMonotoneError("empty chain")
    increasing = None
    for a, b in zip(chain, chain[1:]):
        up, down = idem_leq(a, b), idem_leq(b, a)
        if up and down:
            continue  # a.s.-equal step decides nothing
        if up or down:
            increasing = up
            break
        raise NotMonotoneError("adjacent chain elements are incomparable")
    if increasing is None:
        increasing = True  # constant chain
    target = sup_idempotents(chain) if increasing else inf_idempotents(chain)
    distances = tuple(one_sided_distance(e.kernel, target.kernel) for e in chain)
    equal = [as_equal_kernels(e.kernel, target.kernel) for e in chain]
    return _stabilization_report(distances, equal, chain[0].space.mode)


def bochner_levy_report(
    g: VecRandomVar, f: Filtration, n=1, vnorm: VNorm = "euclidean"
) -> ConvergenceReport:
    """Vector-valued analogue of the Levy report.

    Conditions the vector RV along the filtration componentwise and measures
    distances with the Bochner L^n norm over the chosen value-space norm;
    each coordinate's scalar report agrees with the scalar machinery.
    """
    check_norm_index(n)
    if not g.space.same_as(f.space):
        raise SpaceMismatchError("vector RV must live on the filtration's space")
    steps = [vector_cond_expectation(g, p) for p in f.partitions]
    g_inf = vector_cond_expectation(g, filtration_limit(f))
    distances = tuple(bochner_norm(step - g_inf, n, vnorm) for step in steps)
    equal = [as_equal_vec_rv(step, g_inf) for step in steps]
    return _stabilization_report(distances, equal, f.space.mode)
