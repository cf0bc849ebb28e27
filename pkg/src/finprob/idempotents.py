"""Idempotent kernels, invariant partitions, splittings, and their order.

A measure-preserving endo-kernel e with e o e = e (almost surely) is exactly
a block-conditional kernel: it conditions on the partition of almost-surely
invariant sets. That partition splits e through the quotient space, every
such idempotent is self-dual under Bayesian inversion, and the assignments
partition -> conditional-expectation kernel and kernel -> invariant partition
form a Galois connection that restricts to an order bijection on completed
partitions. All of that is finite here, so it is checked, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Sequence

from .errors import (
    FinprobError,
    NotAChainError,
    NotComparableError,
    NotIdempotentError,
    SpaceMismatchError,
    TooLargeError,
)
from .kernels import (
    Kernel,
    as_equal_kernels,
    bayes_inverse,
    coarsening_kernel,
    compose,
    identity_kernel,
    is_measure_preserving,
)
from .partitions import (
    Partition,
    all_partitions,
    complete_partition,
    join_partitions,
    meet_partitions,
)
from .spaces import ProbSpace


class IdempotentKernel:
    """Endo-kernel validated to be measure-preserving and a.s. idempotent.

    Self-duality (equality with its own Bayesian inverse) holds for every
    such kernel; the constructor asserts it rather than trusting it.
    """

    __slots__ = ("kernel", "space")

    def __init__(self, kernel: Kernel, validate: bool = True):
        if not kernel.is_endo():
            raise SpaceMismatchError("an idempotent kernel must have domain = codomain")
        if validate:
            if not is_measure_preserving(kernel):
                raise NotIdempotentError("kernel is not measure-preserving")
            if not as_equal_kernels(compose(kernel, kernel), kernel):
                raise NotIdempotentError("kernel composed with itself differs from itself")
            if not as_equal_kernels(bayes_inverse(kernel), kernel):
                raise FinprobError(
                    "idempotent kernel is not self-dual; numeric data is inconsistent"
                )
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "space", kernel.domain)

    def __setattr__(self, name, value):
        raise AttributeError("IdempotentKernel is immutable")

    def __repr__(self):
        return f"IdempotentKernel(size={self.space.size}, mode={self.space.mode.kind})"


@dataclass(frozen=True)
class Splitting:
    """Quotient-space factorization of an idempotent: e = pi_dag after pi."""

    quotient: ProbSpace
    pi: Kernel
    pi_dag: Kernel
    invariant_partition: Partition


def is_idempotent(k: Kernel) -> bool:
    """True when k o k is a.s. equal to k."""
    if not k.is_endo():
        raise SpaceMismatchError("idempotence needs domain = codomain")
    return as_equal_kernels(compose(k, k), k)


def cond_exp_kernel(space: ProbSpace, p: Partition, validate: bool = True) -> IdempotentKernel:
    """Conditioning kernel of a partition: each supported row is p(.|block(x)).

    Rows at null outcomes are canonicalized to the space weights. The result
    is measure-preserving and idempotent by construction; exhaustive
    enumeration loops may skip the constructor's re-validation.
    """
    if p.parent_size != space.size:
        raise SpaceMismatchError(
            f"partition of size {p.parent_size} on a {space.size}-outcome space"
        )
    zero = space.mode.zero()
    n = space.size
    rows: list[list] = [None] * n  # type: ignore[list-item]
    for block in p.blocks:
        mass = sum(space.weights[x] for x in block)
        if mass > 0:
            row = [zero] * n
            for y in block:
                row[y] = space.weights[y] / mass
            for x in block:
                rows[x] = row if space.weights[x] > 0 else list(space.weights)
        else:
            for x in block:
                rows[x] = list(space.weights)
    return IdempotentKernel(Kernel(rows, space, space), validate=validate)


def invariant_partition(e: IdempotentKernel) -> Partition:
    """Partition of almost-surely invariant sets.

    Supported outcomes are grouped into connected components of the positive
    transition relation e(y|x) > 0; every null outcome is a singleton. For a
    finite idempotent this is exactly the atomic decomposition of the
    invariant sigma-algebra (the subset-enumeration oracle agrees).
    """
    k = e.kernel
    space = e.space
    mode = space.mode
    threshold = mode.zero() if mode.exact else mode.tolerance
    n = space.size
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    support = space.support
    for x in support:
        for y in support:
            if k.rows[x][y] > threshold:
                ra, rb = find(x), find(y)
                if ra != rb:
                    parent[rb] = ra
    groups: dict[int, list[int]] = {}
    null = set(range(n)) - set(support)
    for x in support:
        groups.setdefault(find(x), []).append(x)
    blocks = list(groups.values()) + [[y] for y in null]
    return Partition(blocks, n)


def invariant_partition_bruteforce(e: IdempotentKernel, max_size: int = 16) -> Partition:
    """Independent oracle: enumerate all outcome subsets, test invariance
    directly (e(B|x) = 1_B(x) at every supported x), and return the atoms of
    the resulting sigma-algebra."""
    space = e.space
    n = space.size
    if n > max_size:
        raise TooLargeError(f"subset enumeration over {n} outcomes refused")
    mode = space.mode
    rows = e.kernel.rows
    one, zero = mode.one(), mode.zero()
    invariant_masks = []
    for mask in range(1 << n):
        members = [y for y in range(n) if mask >> y & 1]
        ok = True
        for x in space.support:
            mass = sum(rows[x][y] for y in members)
            target = one if mask >> x & 1 else zero
            if not mode.close(mass, target):
                ok = False
                break
        if ok:
            invariant_masks.append(mask)
    atoms: dict[int, list[int]] = {}
    full = (1 << n) - 1
    for x in range(n):
        atom = full
        for mask in invariant_masks:
            if mask >> x & 1:
                atom &= mask
        atoms.setdefault(atom, []).append(x)
    return Partition(atoms.values(), n)


def split(e: IdempotentKernel) -> Splitting:
    """Splitting through the invariant partition's quotient space.

    Postconditions (checked): pi after pi_dag is a.s. the quotient identity,
    and pi_dag after pi is a.s. e itself.
    """
    part = invariant_partition(e)
    quotient, pi, pi_dag = coarsening_kernel(e.space, part)
    if not as_equal_kernels(compose(pi_dag, pi), identity_kernel(quotient)):
        raise FinprobError("splitting failed: pi o pi_dag is not the identity")
    if not as_equal_kernels(compose(pi, pi_dag), e.kernel):
        raise FinprobError("splitting failed: pi_dag o pi does not reproduce e")
    return Splitting(quotient, pi, pi_dag, part)


# -- the idempotent partial order ------------------------------------------

def _int_form(kernel: Kernel) -> tuple[list[list[int]], int]:
    """Supported rows as integer numerators over one common denominator."""
    n = kernel.domain.size
    denom = 1
    for x in kernel.domain.support:
        for v in kernel.rows[x]:
            denom = lcm(denom, v.denominator)
    nums = [
        [int(v.numerator * (denom // v.denominator)) for v in kernel.rows[x]]
        for x in range(n)
    ]
    return nums, denom


def _leq_pair_exact(
    a: list[list[int]],
    la: int,
    b: list[list[int]],
    lb: int,
    support: Sequence[int],
    n: int,
) -> tuple[bool, bool]:
    """(a <= b, b <= a) for exact idempotents in integer-numerator form.

    Both composites a.b and b.a are compared row-by-row against a (scaled by
    lb) and b (scaled by la), bailing out as soon as neither candidate
    survives; this is what makes exhaustive audits affordable.
    """
    cols = range(n)
    cand_ab = cand_ba = True
    for rows_first, rows_second in ((a, b), (b, a)):
        for x in support:
            rf = rows_first[x]
            prow = [
                sum(rf[y] * rows_second[y][j] for y in cols if rf[y]) for j in cols
            ]
            if cand_ab and any(prow[j] != a[x][j] * lb for j in cols):
                cand_ab = False
            if cand_ba and any(prow[j] != b[x][j] * la for j in cols):
                cand_ba = False
            if not (cand_ab or cand_ba):
                return False, False
    return cand_ab, cand_ba


def _leq_pair_generic(e1: Kernel, e2: Kernel) -> tuple[bool, bool]:
    p1 = compose(e1, e2)
    p2 = compose(e2, e1)
    leq12 = as_equal_kernels(p1, e1) and as_equal_kernels(p2, e1)
    leq21 = as_equal_kernels(p1, e2) and as_equal_kernels(p2, e2)
    return leq12, leq21


def idem_leq(e1: IdempotentKernel, e2: IdempotentKernel) -> bool:
    """Idempotent order: true when both composites of e1 and e2 a.s. equal e1."""
    if not e1.space.same_as(e2.space):
        raise SpaceMismatchError("idempotents on different spaces")
    if e1.space.mode.exact:
        a, la = _int_form(e1.kernel)
        b, lb = _int_form(e2.kernel)
        leq12, _ = _leq_pair_exact(a, la, b, lb, e1.space.support, e1.space.size)
        return leq12
    leq12, _ = _leq_pair_generic(e1.kernel, e2.kernel)
    return leq12


def leq_comparator(space: ProbSpace):
    """(prepare, leq) pair for many-comparison loops: prepare converts an
    IdempotentKernel once, leq compares two prepared forms by composites."""
    if space.mode.exact:
        support, n = space.support, space.size

        def prepare(e: IdempotentKernel):
            return _int_form(e.kernel)

        def leq(fa, fb) -> bool:
            (a, la), (b, lb) = fa, fb
            return _leq_pair_exact(a, la, b, lb, support, n)[0]

    else:

        def prepare(e: IdempotentKernel):
            return e.kernel

        def leq(fa, fb) -> bool:
            return _leq_pair_generic(fa, fb)[0]

    return prepare, leq


def order_witnesses(
    e1: IdempotentKernel, e2: IdempotentKernel
) -> tuple[Kernel, Kernel]:
    """Unique connecting maps between the quotients of comparable idempotents.

    For e1 <= e2 with splittings (A1, pi1, pi1_dag) and (A2, pi2, pi2_dag),
    returns f: A1 -> A2 and g: A2 -> A1 with iota2 o f = iota1, g o pi2 = pi1,
    g o f = id, and f equal to the Bayesian inverse of g. All four identities
    are verified before returning.
    """
    if not idem_leq(e1, e2):
        raise NotComparableError("witnesses require e1 <= e2 in the idempotent order")
    s1 = split(e1)
    s2 = split(e2)
    f = compose(s1.pi_dag, s2.pi)
    g = compose(s2.pi_dag, s1.pi)
    checks = (
        as_equal_kernels(compose(f, s2.pi_dag), s1.pi_dag),
        as_equal_kernels(compose(s2.pi, g), s1.pi),
        as_equal_kernels(compose(f, g), identity_kernel(s1.quotient)),
        as_equal_kernels(bayes_inverse(g), f),
    )
    if not all(checks):
        raise FinprobError(f"witness identities failed: {checks}")
    return f, g


def _require_chain(chain: Sequence[IdempotentKernel], increasing: bool) -> None:
    if not chain:
        raise NotAChainError("empty chain")
    space = chain[0].space
    for e in chain[1:]:
        if not e.space.same_as(space):
            raise SpaceMismatchError("chain elements on different spaces")
    for a, b in zip(chain, chain[1:]):
        lo, hi = (a, b) if increasing else (b, a)
        if not idem_leq(lo, hi):
            word = "increasing" if increasing else "decreasing"
            raise NotAChainError(f"chain is not {word} in the idempotent order")


def sup_idempotents(chain: Sequence[IdempotentKernel]) -> IdempotentKernel:
    """Supremum of an increasing chain: conditioning on the join (common
    refinement) of the invariant partitions.

    The bound property is re-verified on return; least-ness among
    partition-induced idempotents is exhaustive work and lives in the
    filtration optimality check.
    """
    _require_chain(chain, increasing=True)
    space = chain[0].space
    part = invariant_partition(chain[0])
    for e in chain[1:]:
        part = join_partitions(part, invariant_partition(e))
    out = cond_exp_kernel(space, part)
    if not all(idem_leq(e, out) for e in chain):
        raise FinprobError("join kernel is not an upper bound of the chain")
    return out


def inf_idempotents(chain: Sequence[IdempotentKernel]) -> IdempotentKernel:
    """Infimum of a decreasing chain: conditioning on the meet of the
    completed invariant partitions.

    Invariant partitions are already null-complete, and completion happens
    before meeting; meeting the raw partitions instead would be wrong
    whenever null outcomes glue supported blocks together.
    """
    _require_chain(chain, increasing=False)
    space = chain[0].space
    part = complete_partition(invariant_partition(chain[0]), space)
    for e in chain[1:]:
        part = meet_partitions(part, complete_partition(invariant_partition(e), space))
    out = cond_exp_kernel(space, part)
    if not all(idem_leq(out, e) for e in chain):
        raise FinprobError("meet kernel is not a lower bound of the chain")
    return out


# -- exhaustive Galois audit -------------------------------------------------

@dataclass(frozen=True)
class GaloisReport:
    """Outcome of the exhaustive partitions-vs-idempotents audit on one space."""

    size: int
    n_partitions: int
    adjunction_failures: tuple
    roundtrip_failures: tuple
    completion_failures: tuple
    monotonicity_failures: tuple

    @property
    def all_ok(self) -> bool:
        return not (
            self.adjunction_failures
            or self.roundtrip_failures
            or self.completion_failures
            or self.monotonicity_failures
        )


def galois_roundtrips(space: ProbSpace, max_size: int = 8) -> GaloisReport:
    """Exhaustive check of the order correspondence on one space.

    For every partition B and every partition-induced idempotent e:
    the adjunction (B contained in the invariant algebra of e iff the
    conditioning kernel of B is <= e), the idempotent roundtrip
    (conditioning on the invariant partition of e reproduces e), the
    partition roundtrip (the invariant partition of the conditioning kernel
    of B is the completion of B), and monotonicity of both assignments.
    """
    n = space.size
    if n > max_size:
        raise TooLargeError(f"exhaustive audit over {n} outcomes refused")
    parts = list(all_partitions(n))
    idems = [cond_exp_kernel(space, p, validate=False) for p in parts]
    invariants = [invariant_partition(e) for e in idems]
    completions = [complete_partition(p, space) for p in parts]

    completion_failures = tuple(
        (i,) for i in range(len(parts)) if invariants[i] != completions[i]
    )
    roundtrip_failures = tuple(
        (i,)
        for i in range(len(parts))
        if not as_equal_kernels(
            cond_exp_kernel(space, invariants[i], validate=False).kernel, idems[i].kernel
        )
    )

    # Order of the idempotents, by composites (the honest route).
    m = len(parts)
    leq = [[False] * m for _ in range(m)]
    if space.mode.exact:
        forms = [_int_form(e.kernel) for e in idems]
        for i in range(m):
            ai, li = forms[i]
            leq[i][i] = True
            for j in range(i + 1, m):
                aj, lj = forms[j]
                leq_ij, leq_ji = _leq_pair_exact(ai, li, aj, lj, space.support, n)
                leq[i][j] = leq_ij
                leq[j][i] = leq_ji
    else:
        for i in range(m):
            leq[i][i] = True
            for j in range(i + 1, m):
                leq_ij, leq_ji = _leq_pair_generic(idems[i].kernel, idems[j].kernel)
                leq[i][j] = leq_ij
                leq[j][i] = leq_ji

    adjunction_failures = []
    for b in range(m):
        for e in range(m):
            contained = invariants[e].refines(parts[b])
            if contained != leq[b][e]:
                adjunction_failures.append((b, e, contained, leq[b][e]))

    monotonicity_failures = []
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            if parts[j].refines(parts[i]) and not leq[i][j]:
                monotonicity_failures.append(("partition-to-kernel", i, j))
            if leq[i][j] and not invariants[j].refines(invariants[i]):
                monotonicity_failures.append(("kernel-to-partition", i, j))

    return GaloisReport(
        size=n,
        n_partitions=m,
        adjunction_failures=tuple(adjunction_failures),
        roundtrip_failures=roundtrip_failures,
        completion_failures=tuple(completion_failures),
        monotonicity_failures=tuple(monotonicity_failures),
    )
