"""Pullback action of kernels on random variables, and conditional expectation.

A kernel k acts contravariantly on codomain RVs by integration against its
rows: (k*g)(x) = sum_y rows[x][y] g(y). At finite scale the kernel matrix is
the operator, so no separate operator algebra exists here. Conditioning on a
partition is the pullback of the partition's idempotent kernel, spelled out
directly as block averaging.
"""

from __future__ import annotations

from typing import Callable, Union

import numpy as np

from .errors import DimMismatchError, SizeMismatchError, SpaceMismatchError
from .kernels import Kernel, bayes_inverse
from .numerics import check_norm_index, exact_sqrt, is_infinite, mat_mul, nth_root
from .partitions import Partition
from .spaces import RandomVar, VecRandomVar, expectation, ln_norm

VNorm = Union[str, Callable[[np.ndarray], float]]


def pullback_matrix(k: Kernel) -> np.ndarray:
    """Matrix of k* acting on codomain value vectors: identical to k.rows."""
    return k.rows


def apply_pullback(k: Kernel, g: RandomVar) -> RandomVar:
    """k*g: integrate g against each row of k."""
    if not g.space.same_as(k.codomain):
        raise SpaceMismatchError("RV must live on the kernel's codomain")
    return RandomVar(mat_mul(k.rows, g.values), k.domain)


def cond_expectation(f: RandomVar, p: Partition) -> RandomVar:
    """Conditional expectation of f given the partition.

    Each block of positive mass gets its weighted average; blocks of zero
    mass get the global mean E[f], a fixed canonical representative (any
    value there is a.s. equal). The result is constant per block.
    """
    space = f.space
    if p.parent_size != space.size:
        raise SizeMismatchError(
            f"partition of size {p.parent_size} against a {space.size}-outcome RV"
        )
    exact = space.mode.exact
    fully_supported = len(space.support) == space.size
    if fully_supported and p.n_blocks == space.size:
        return RandomVar(f.values, space)  # discrete partition: identity
    mean = None
    if exact:
        # equal weights inside a block cancel, keeping exact denominators
        # small; on a fully supported uniform space that holds everywhere
        all_uniform = (
            space._uniform_weight is not None and len(space.support) == space.size
        )
        out = np.empty(space.size, dtype=object)
        for block in p.blocks:
            idx = list(block)
            if all_uniform:
                avg = f.values[idx].sum() / len(idx)
            else:
                weights = space.weights[idx]
                w0 = weights[0]
                if w0 > 0 and bool(np.equal(weights[1:], w0).all()):
                    avg = f.values[idx].sum() / len(idx)
                else:
                    mass = weights.sum()
                    if mass > 0:
                        avg = (weights * f.values[idx]).sum() / mass
                    else:
                        if mean is None:
                            mean = expectation(f)
                        avg = mean
            out[idx] = avg
        return RandomVar(out, space)
    if fully_supported:
        # no null outcomes, so completion never rewrites these blocks and
        # any deterministic summation order is safe to vectorize
        out = np.empty(space.size, dtype=np.float64)
        for block in p.blocks:
            idx = list(block)
            if len(idx) >= 8:
                weights = space.weights[idx]
                avg = float(weights @ f.values[idx]) / float(weights.sum())
            else:
                mass = sum(space.weights[x] for x in idx)
                avg = sum(space.weights[x] * f.values[x] for x in idx) / mass
            out[idx] = avg
        return RandomVar(out, space)
    # null-bearing float path: sequential sums on purpose, so that removing
    # zero-weight members (null-set completion) cannot move a single bit
    out = [0.0] * space.size
    for block in p.blocks:
        mass = sum(space.weights[x] for x in block)
        if mass > 0:
            avg = sum(space.weights[x] * f.values[x] for x in block) / mass
        else:
            if mean is None:
                mean = expectation(f)
            avg = mean
        for x in block:
            out[x] = avg
    return RandomVar(out, space)


def vector_cond_expectation(g: VecRandomVar, p: Partition) -> VecRandomVar:
    """Componentwise conditional expectation of a vector-valued RV."""
    cols = [cond_expectation(g.component(j), p).values for j in range(g.dim)]
    return VecRandomVar(np.stack(cols, axis=-1).tolist(), g.space, g.dim)


def inner_product(f: RandomVar, g: RandomVar):
    """L^2 pairing: sum_x p(x) f(x) g(x)."""
    if not f.space.same_as(g.space):
        raise SpaceMismatchError("inner product needs a common space")
    s = f.space
    live = list(s.support)
    products = f.values[live] * g.values[live]
    w = s._uniform_weight
    if w is not None:
        return w * products.sum()
    return (s.weights[live] * products).sum()


def adjointness_defect(k: Kernel, f: RandomVar, g: RandomVar):
    """|<f, k*g>_p - <(k+)*f, g>_q|; zero (within tolerance) for every
    measure-preserving kernel, since Bayesian inversion is the L^2 adjoint."""
    if not f.space.same_as(k.domain):
        raise SpaceMismatchError("f must live on the kernel's domain")
    if not g.space.same_as(k.codomain):
        raise SpaceMismatchError("g must live on the kernel's codomain")
    kinv = bayes_inverse(k)
    left = inner_product(f, apply_pullback(k, g))
    right = inner_product(apply_pullback(kinv, f), g)
    return abs(left - right)


def lipschitz_check(k: Kernel, g: RandomVar, n=1) -> bool:
    """True when ||k*g||_n <= ||g||_n (within tolerance): the pullback is
    1-Lipschitz for every L^n norm."""
    check_norm_index(n)
    pulled = apply_pullback(k, g)
    lhs, rhs = ln_norm(pulled, n), ln_norm(g, n)
    mode = k.mode
    if mode.exact:
        return lhs <= rhs
    return float(lhs) <= float(rhs) + mode.tolerance


def vector_pullback(k: Kernel, g: VecRandomVar) -> VecRandomVar:
    """Componentwise pullback of a vector-valued RV; commutes with every
    coordinate projection by construction."""
    if not g.space.same_as(k.codomain):
        raise SpaceMismatchError("vector RV must live on the kernel's codomain")
    return VecRandomVar(mat_mul(k.rows, g.values), k.domain, g.dim)


def value_norm(vec, vnorm: VNorm, mode):
    """Norm on the value space: "euclidean" (default), "max", "sum", or a callable.

    In rational mode the euclidean branch returns an exact Fraction whenever
    the root is rational (always for the zero vector).
    """
    if callable(vnorm):
        return vnorm(vec)
    if vnorm == "euclidean":
        total = sum(v * v for v in vec)
        return exact_sqrt(total, mode)
    if vnorm == "max":
        return max((abs(v) for v in vec), default=mode.zero())
    if vnorm == "sum":
        return sum(abs(v) for v in vec)
    raise DimMismatchError(f"unknown value-space norm {vnorm!r}")


def bochner_norm(g: VecRandomVar, n=1, vnorm: VNorm = "euclidean"):
    """Weighted L^n norm of the outcome-wise value-space norms.

    For n = inf, the supremum of the value norms over the support.
    """
    check_norm_index(n)
    space = g.space
    mode = space.mode
    if is_infinite(n):
        sup = mode.zero()
        for i in space.support:
            mag = value_norm(g.values[i], vnorm, mode)
            if mag > sup:
                sup = mag
        return sup
    n = int(n)
    total = sum(
        space.weights[i] * value_norm(g.values[i], vnorm, mode) ** n
        for i in space.support
    )
    if n == 1:
        return total
    return nth_root(total, n, mode)
