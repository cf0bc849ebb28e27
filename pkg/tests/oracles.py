"""Independent brute-force oracles.

These deliberately avoid the library's own composite machinery: subset
enumeration, raw summation loops and least-squares solves act as the second
route against which the implementation is judged.
"""

from itertools import chain, combinations
from math import lcm

import numpy as np


def subsets(universe):
    items = list(universe)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


def kernel_mass(k, x, outcomes):
    """k(B|x) as a raw sum over the subset."""
    return sum(k.rows[x][y] for y in outcomes)


def bayes_defect_exhaustive(k, kinv):
    """Worst defect of the inverse's defining equation over all subset pairs:
    sum_{x in A} k(B|x) p(x)  vs  sum_{y in B} kinv(A|y) q(y)."""
    p = k.domain.weights
    q = k.codomain.weights
    worst = 0
    for a in subsets(range(k.domain.size)):
        for b in subsets(range(k.codomain.size)):
            lhs = sum(kernel_mass(k, x, b) * p[x] for x in a)
            rhs = sum(kernel_mass(kinv, y, a) * q[y] for y in b)
            d = abs(lhs - rhs)
            if d > worst:
                worst = d
    return worst


def _int_scale(mat):
    """Integer numerators over one common denominator."""
    denom = 1
    for row in mat:
        for v in row:
            denom = lcm(denom, v.denominator)
    arr = np.empty((len(mat), len(mat[0])), dtype=object)
    for i, row in enumerate(mat):
        for j, v in enumerate(row):
            arr[i, j] = v.numerator * (denom // v.denominator)
    return arr, denom


def _subset_sums_cols(t):
    n, m = t.shape
    out = np.empty((n, 1 << m), dtype=object)
    out[:, 0] = 0
    for mask in range(1, 1 << m):
        low = mask & -mask
        out[:, mask] = out[:, mask ^ low] + t[:, low.bit_length() - 1]
    return out


def _subset_sums_rows(s):
    n, width = s.shape
    out = np.empty((1 << n, width), dtype=object)
    out[0, :] = 0
    for mask in range(1, 1 << n):
        low = mask & -mask
        out[mask, :] = out[mask ^ low, :] + s[low.bit_length() - 1, :]
    return out


def bayes_all_pairs_exact(k, kinv) -> bool:
    """Defining equation of the inverse over ALL subset pairs at once, by
    integer subset-lattice DP; exact, and fast enough for sizes up to 10."""
    p, q = k.domain.weights, k.codomain.weights
    nd, nc = k.domain.size, k.codomain.size
    t = [[p[x] * k.rows[x][y] for y in range(nc)] for x in range(nd)]
    tp = [[q[y] * kinv.rows[y][x] for x in range(nd)] for y in range(nc)]
    a, ma = _int_scale(t)
    b, mb = _int_scale(tp)
    left = _subset_sums_rows(_subset_sums_cols(a))   # [Amask, Bmask]
    right = _subset_sums_rows(_subset_sums_cols(b))  # [Bmask, Amask]
    return bool((left * mb == right.T * ma).all())


def bayes_defect_sampled(k, kinv, rng, pairs=100):
    """Defect of the defining equation on randomly drawn subset pairs."""
    p = k.domain.weights
    q = k.codomain.weights
    worst = 0.0
    for _ in range(pairs):
        a = [x for x in range(k.domain.size) if rng.integers(0, 2)]
        b = [y for y in range(k.codomain.size) if rng.integers(0, 2)]
        lhs = sum(kernel_mass(k, x, b) * p[x] for x in a)
        rhs = sum(kernel_mass(kinv, y, a) * q[y] for y in b)
        worst = max(worst, abs(lhs - rhs))
    return worst


def setwise_distance(k, h, outcomes):
    """Per-set integral distance for one codomain subset."""
    p = k.domain.weights
    return sum(
        p[x] * abs(kernel_mass(k, x, outcomes) - kernel_mass(h, x, outcomes))
        for x in range(k.domain.size)
    )


def verify_cond_exp_defining(f, g, partition):
    """g is a version of the conditional expectation of f: g constant on the
    supported part of each block and integrating like f over each block."""
    space = f.space
    mode = space.mode
    for block in partition.blocks:
        live = [x for x in block if not space.is_null(x)]
        for x in live[1:]:
            if not mode.close(g.values[x], g.values[live[0]]):
                return False
        lhs = sum(space.weights[x] * g.values[x] for x in block)
        rhs = sum(space.weights[x] * f.values[x] for x in block)
        if not mode.close(lhs, rhs):
            return False
    return True


def invariant_sets_direct(e):
    """All subset masks that are a.s. invariant under the kernel."""
    space = e.space
    n = space.size
    mode = space.mode
    masks = []
    for mask in range(1 << n):
        members = [y for y in range(n) if mask >> y & 1]
        ok = all(
            mode.close(
                kernel_mass(e.kernel, x, members),
                mode.one() if mask >> x & 1 else mode.zero(),
            )
            for x in space.support
        )
        if ok:
            masks.append(mask)
    return masks


def closest_point_sampled(basis, x, rng, samples=400, radius=4.0):
    """Smallest sampled distance from x to the subspace spanned by the basis."""
    x = np.asarray(x, dtype=np.float64)
    if basis.shape[1] == 0:
        return float(np.linalg.norm(x))
    best = float(np.linalg.norm(x))
    center = basis.T @ x
    for _ in range(samples):
        coeffs = center + rng.normal(scale=radius, size=basis.shape[1])
        cand = float(np.linalg.norm(x - basis @ coeffs))
        best = min(best, cand)
    return best
