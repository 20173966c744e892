"""Exact moment calculus for independent Haar unitaries of several sizes.

The Weingarten function Wg(N, alpha) is defined as the identity column of
the inverse Gram matrix G(alpha, beta) = N^cycles(alpha beta^-1) on S_n.
Mixed entry moments then follow the pairing expansion

    E[u_{i1 j1} ... u_{in jn} conj(u_{i'1 j'1}) ... conj(u_{i'n j'n})]
        = sum over alpha, beta in S_n with i = i' o alpha, j = j' o beta
          of Wg(N, alpha beta^-1).

``finite_n_opvalued_moment`` evaluates block-expected words of the shape

    U_{r(1)} D1 U*_{r'(1)} C1 ... U_{r(n)} Dn U*_{r'(n)} Cn,

where U_m are independent Haar unitaries of size N_m, D_j maps block r'(j)
to block r(j), i.e. D_j is an N_{r(j)} x N_{r'(j)} matrix, and C_j is
N_{r'(j)} x N_{r(j+1)} (cyclically).  Expanding entries and integrating
blockwise gives, with gamma the long cycle and S_{n,r,r'} the permutations
with r = r' o alpha,

    E Tr(word) = sum over alpha, beta in S_{n,r,r'} of
        Tr_{beta^-1}[D] * Tr_{alpha gamma}[C]
        * prod_m Wg(N_m, (alpha^-1 beta) restricted to {i: r(i) = m}).

The D factors chain along the inverse of the column pairing and the C
factors along the row pairing shifted by gamma; this orientation is pinned
down by Monte Carlo cross-checks in the test suite (it matters from n = 3
on).  The result is reported as the coefficient of the block projection,
i.e. the compressed trace E Tr(word) / N_{r(1)}.

``asymptotic_nc_moment`` is the large-dimension limit of the same sum at
fixed block proportions w_m = N_m / M: only geodesic pairs survive, indexed
by label-compatible pairs sigma <= pi of non-crossing partitions, and

    coefficient = (1 / w_{r(1)}) * sum over admissible (sigma, pi) of
        geodesic_weight(sigma, pi) * tau_sigma[D] * tau_K(pi)[C]
        * mu[sigma, pi],

with tau the trace normalized by M and mu the lattice Moebius function
(computable as a cycle product of P_pi P_sigma^-1).  Note the trace
assignment: sigma carries the D factors and the complement of pi carries
the C factors, and the weight below differs from the ascent-count
expression ``nclattice.weight_omega`` by block bookkeeping factors once the
weights w_m are not all 1; the finite-size limit fixes this form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from .errors import ProfileError, ShapeError, SingularMatrixError, SizeError
from .nclattice import (
    IndexProfile,
    NonCrossingPartition,
    Perm,
    catalan,
    compose,
    cycles_of,
    identity_perm,
    inverse,
    kreweras,
    long_cycle,
    nc_pairs_rrp,
    partition_perm,
)

MAX_WG_N = 6


def cycle_type(images: tuple[int, ...]) -> tuple[int, ...]:
    """Cycle type of a permutation given as a 0-based image tuple, sorted desc."""
    n = len(images)
    seen = [False] * n
    lengths = []
    for s in range(n):
        if seen[s]:
            continue
        ln = 0
        j = s
        while not seen[j]:
            seen[j] = True
            j = images[j]
            ln += 1
        lengths.append(ln)
    return tuple(sorted(lengths, reverse=True))


def _perm_tuples(n: int):
    return list(permutations(range(n)))


@dataclass(frozen=True)
class WeingartenTable:
    """Wg(N, .) on S_n; values keyed by Perm, plus a cycle-type lookup."""

    n: int
    N: int
    values: dict
    by_type: dict
    class_spread: float

    def __call__(self, alpha: Perm) -> float:
        return self.values[alpha]


def weingarten_table(n: int, N: int, exact: bool = False) -> WeingartenTable:
    """Invert the Gram matrix G(a, b) = N^cycles(a b^-1) over S_n.

    exact=True solves over rationals (n <= 4); otherwise float64.
    """
    if n > MAX_WG_N:
        raise SizeError(f"Weingarten table capped at n <= {MAX_WG_N}, got {n}")
    if N < n:
        raise SingularMatrixError(f"Gram matrix is singular for N={N} < n={n}")
    perms = _perm_tuples(n)
    index = {p: i for i, p in enumerate(perms)}
    size = len(perms)

    def mul_inv(a, b):
        # a o b^-1 as a 0-based image tuple
        binv = [0] * n
        for i, img in enumerate(b):
            binv[img] = i
        return tuple(a[binv[i]] for i in range(n))

    ident = tuple(range(n))
    if exact:
        if n > 4:
            raise SizeError("exact rational inversion supported for n <= 4")
        gram = [[Fraction(N) ** len(set(_cycle_reps(mul_inv(a, b)))) for b in perms]
                for a in perms]
        col = _solve_fraction(gram, [Fraction(1) if p == ident else Fraction(0)
                                     for p in perms])
        values_list = [float(x) for x in col]
    else:
        cyc_count = {}
        gram = np.empty((size, size))
        for i, a in enumerate(perms):
            for j, b in enumerate(perms):
                t = mul_inv(a, b)
                c = cyc_count.get(t)
                if c is None:
                    c = len(cycle_type(t))
                    cyc_count[t] = c
                gram[i, j] = float(N) ** c
        rhs = np.zeros(size)
        rhs[index[ident]] = 1.0
        values_list = list(np.linalg.solve(gram, rhs))

    values = {}
    groups: dict[tuple[int, ...], list[float]] = {}
    for p, v in zip(perms, values_list):
        values[Perm(tuple(x + 1 for x in p))] = v
        groups.setdefault(cycle_type(p), []).append(v)
    by_type = {t: float(np.mean(vs)) for t, vs in groups.items()}
    spread = max((max(vs) - min(vs)) for vs in groups.values())
    return WeingartenTable(n, N, values, by_type, float(spread))


def _cycle_reps(images):
    n = len(images)
    seen = [False] * n
    reps = []
    for s in range(n):
        if seen[s]:
            continue
        reps.append(s)
        j = s
        while not seen[j]:
            seen[j] = True
            j = images[j]
    return reps


def _solve_fraction(mat, rhs):
    """Gaussian elimination over Fractions."""
    size = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(size):
        piv = next(r for r in range(col, size) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv_p = Fraction(1, 1) / a[col][col]
        a[col] = [x * inv_p for x in a[col]]
        for r in range(size):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[r][size] for r in range(size)]


def mobius_cycle_product(images: tuple[int, ...]) -> int:
    """Leading Weingarten coefficient: product over cycles of (-1)^(l-1) Cat(l-1)."""
    out = 1
    for ln in cycle_type(images):
        out *= (-1) ** (ln - 1) * catalan(ln - 1)
    return out


@dataclass(frozen=True)
class WgLeadingOrder:
    exponent: int
    coefficient: int
    table: dict


def wg_leading_order(alpha: Perm, Ns) -> WgLeadingOrder:
    """Scaled values N^(2n - cycles) Wg(N, alpha), which approach the
    Moebius cycle product with an O(N^-2) correction."""
    n = alpha.n
    images0 = tuple(x - 1 for x in alpha.images)
    cycles = len(cycle_type(images0))
    exponent = 2 * n - cycles
    coeff = mobius_cycle_product(images0)
    table = {}
    for N in Ns:
        wg = weingarten_table(n, int(N))
        table[int(N)] = float(N) ** exponent * wg.by_type[cycle_type(images0)]
    return WgLeadingOrder(exponent, coeff, table)


# ---------------------------------------------------------------------------
# mixed entry moments


def haar_mixed_moment(i, j, ip, jp, N: int) -> complex:
    """Exact E[prod u_{i_t j_t} prod conj(u_{i'_t j'_t})] for one Haar U(N).

    Unequal numbers of plain and conjugated factors integrate to zero by
    phase invariance; that case returns 0 rather than raising.
    """
    i, j, ip, jp = map(tuple, (i, j, ip, jp))
    if len(i) != len(j) or len(ip) != len(jp):
        raise ShapeError("row and column index lists must have equal lengths")
    if len(i) != len(ip):
        return 0.0 + 0.0j
    n = len(i)
    if n == 0:
        return 1.0 + 0.0j
    if n > MAX_WG_N:
        raise SizeError(f"moment order capped at n <= {MAX_WG_N}")
    wg = weingarten_table(n, N)
    total = 0.0
    alphas = [a for a in permutations(range(n)) if all(i[t] == ip[a[t]] for t in range(n))]
    betas = [b for b in permutations(range(n)) if all(j[t] == jp[b[t]] for t in range(n))]
    for a in alphas:
        for b in betas:
            binv = [0] * n
            for t, img in enumerate(b):
                binv[img] = t
            ab = tuple(a[binv[t]] for t in range(n))
            total += wg.by_type[cycle_type(ab)]
    return complex(total)


# ---------------------------------------------------------------------------
# operator-valued word moments


@dataclass(frozen=True)
class OpValuedMoment:
    """Coefficient of the identity on a diagonal block: the block-compressed
    trace of the expected word."""

    block: int
    coefficient: complex


def _admissible_perms(profile: IndexProfile):
    n = profile.n
    return [a for a in permutations(range(n))
            if all(profile.r[t] == profile.rp[a[t]] for t in range(n))]


def _trace_along(images0, mats) -> complex:
    """Product of traces of the matrix chains along the cycles of images0."""
    n = len(images0)
    seen = [False] * n
    out = 1.0 + 0.0j
    for s in range(n):
        if seen[s]:
            continue
        prod = mats[s]
        seen[s] = True
        t = images0[s]
        while t != s:
            prod = prod @ mats[t]
            seen[t] = True
            t = images0[t]
        out *= np.trace(prod)
    return out


def _check_blocks(d_blocks, c_blocks, profile: IndexProfile, sizes):
    n = profile.n
    if len(d_blocks) != n or len(c_blocks) != n:
        raise ProfileError("need n D factors and n C factors")
    if profile.k > len(sizes):
        raise ProfileError(f"profile labels up to {profile.k}, only {len(sizes)} sizes")
    for t in range(n):
        rt, rpt = profile.r[t], profile.rp[t]
        rnx = profile.r[(t + 1) % n]
        if d_blocks[t].shape != (sizes[rt - 1], sizes[rpt - 1]):
            raise ProfileError(
                f"D[{t}] has shape {d_blocks[t].shape}, profile wants "
                f"({sizes[rt - 1]}, {sizes[rpt - 1]})")
        if c_blocks[t].shape != (sizes[rpt - 1], sizes[rnx - 1]):
            raise ProfileError(
                f"C[{t}] has shape {c_blocks[t].shape}, profile wants "
                f"({sizes[rpt - 1]}, {sizes[rnx - 1]})")


def finite_n_opvalued_moment(d_blocks, c_blocks, profile: IndexProfile,
                             sizes) -> OpValuedMoment:
    """Exact finite-size expectation of the alternating unitary word.

    Returns the compressed trace E Tr(word) / N_{r(1)} as the coefficient on
    block r(1).  Enumerates the label-preserving pairings and weights each by
    the blockwise Weingarten factors; see the module docstring for the sum.
    """
    n = profile.n
    if n > 4:
        raise SizeError("finite-size word moments capped at n <= 4")
    d_blocks = [np.asarray(d, dtype=np.complex128) for d in d_blocks]
    c_blocks = [np.asarray(c, dtype=np.complex128) for c in c_blocks]
    _check_blocks(d_blocks, c_blocks, profile, sizes)

    positions = {m: [t for t in range(n) if profile.r[t] == m]
                 for m in range(1, profile.k + 1)}
    conj_positions = {m: [t for t in range(n) if profile.rp[t] == m]
                      for m in range(1, profile.k + 1)}
    block_of_r1 = profile.r[0]
    if any(len(positions[m]) != len(conj_positions[m]) for m in positions):
        return OpValuedMoment(block_of_r1, 0.0 + 0.0j)

    tables = {}
    for m, pos in positions.items():
        if pos:
            if sizes[m - 1] < len(pos):
                raise SingularMatrixError(
                    f"block {m} size {sizes[m - 1]} below word multiplicity {len(pos)}")
            tables[m] = weingarten_table(len(pos), sizes[m - 1])

    gamma = tuple((t + 1) % n for t in range(n))
    perms = _admissible_perms(profile)
    total = 0.0 + 0.0j
    for a in perms:
        # C factors chain along alpha o gamma
        ag = tuple(a[gamma[t]] for t in range(n))
        tr_c = _trace_along(ag, c_blocks)
        ainv = [0] * n
        for t, img in enumerate(a):
            ainv[img] = t
        for b in perms:
            # D factors chain along beta^-1
            binv = [0] * n
            for t, img in enumerate(b):
                binv[img] = t
            tr_d = _trace_along(tuple(binv), d_blocks)
            w = 1.0
            for m, pos in positions.items():
                if not pos:
                    continue
                local = {t: s for s, t in enumerate(pos)}
                restricted = tuple(local[ainv[b[t]]] for t in pos)
                w *= tables[m].by_type[cycle_type(restricted)]
            total += tr_d * tr_c * w
    return OpValuedMoment(block_of_r1, total / sizes[block_of_r1 - 1])


def trace_callbacks(d_blocks, c_blocks, profile: IndexProfile, sizes):
    """Normalized trace functionals tau(prod over a cycle) for the same data.

    Returns (tau_d, tau_c); each maps an ascending 1-based position tuple to
    the trace of the chained product divided by M = sum of sizes.
    """
    d_blocks = [np.asarray(d, dtype=np.complex128) for d in d_blocks]
    c_blocks = [np.asarray(c, dtype=np.complex128) for c in c_blocks]
    _check_blocks(d_blocks, c_blocks, profile, sizes)
    total = float(sum(sizes))

    def _make(mats):
        def tau(cycle):
            prod = mats[cycle[0] - 1]
            for t in cycle[1:]:
                prod = prod @ mats[t - 1]
            return complex(np.trace(prod)) / total
        return tau

    return _make(d_blocks), _make(c_blocks)


def geodesic_weight(sigma: NonCrossingPartition, pi: NonCrossingPartition,
                    profile: IndexProfile, weights) -> float:
    """Blockwise weight of a surviving geodesic pair.

    Equals prod_i w_{r(i)}^-2 times prod over cycles c of P_pi P_sigma^-1 of
    w_{r(min c)}; each such cycle stays inside one label class, which is
    asserted.  This is the exact limit of the blockwise Weingarten scaling
    N_m^(cycles - 2 multiplicity).
    """
    weights = tuple(float(w) for w in weights)
    rel = compose(partition_perm(pi), inverse(partition_perm(sigma)))
    out = 1.0
    for i in range(1, profile.n + 1):
        out /= weights[profile.r[i - 1] - 1] ** 2
    for cyc in cycles_of(rel):
        labels = {profile.r[i - 1] for i in cyc}
        if len(labels) != 1:
            raise ProfileError("pair is not label-compatible: mixed cycle labels")
        out *= weights[labels.pop() - 1]
    return out


def asymptotic_nc_moment(tau_d, tau_c, profile: IndexProfile, weights) -> OpValuedMoment:
    """Limit of the word moment at fixed block proportions.

    tau_d / tau_c evaluate the normalized traces of cyclic products (see
    ``trace_callbacks``); weights are the block proportions w_1..w_k.  The
    sum runs over the label-compatible pairs sigma <= pi, with sigma
    carrying the D traces, the complement of pi carrying the C traces, the
    interval Moebius value, and the geodesic weight.  Returns the
    coefficient on block r(1), matching ``finite_n_opvalued_moment``.
    """
    if profile.n > MAX_WG_N:
        raise SizeError(f"asymptotic moments capped at n <= {MAX_WG_N}")
    weights = tuple(float(w) for w in weights)
    if profile.k > len(weights):
        raise ProfileError(f"profile labels up to {profile.k}, only {len(weights)} weights")
    block = profile.r[0]
    pairs = nc_pairs_rrp(profile)
    if not pairs:
        return OpValuedMoment(block, 0.0 + 0.0j)
    total = 0.0 + 0.0j
    for sigma, pi in pairs:
        td = 1.0 + 0.0j
        for blk in sigma.blocks:
            td *= tau_d(blk)
        tc = 1.0 + 0.0j
        for blk in kreweras(pi).blocks:
            tc *= tau_c(blk)
        rel = compose(partition_perm(pi), inverse(partition_perm(sigma)))
        mob = mobius_cycle_product(tuple(x - 1 for x in rel.images))
        total += geodesic_weight(sigma, pi, profile, weights) * td * tc * mob
    return OpValuedMoment(block, total / weights[block - 1])
