"""Non-crossing partition lattice and symmetric-group combinatorics.

Ground sets are 1-based, {1, ..., n}.  A partition is non-crossing when no
four points a < b < c < d have a, c in one block and b, d in another.
Reverse refinement (every block of sigma contained in a block of pi) makes
NC(n) a lattice with bottom 0_n (singletons) and top 1_n (one block).

Permutation conventions used throughout the package:

* ``compose(p, q)`` is the function composition p(q(i)).
* A partition acts as the permutation whose cycles are its blocks traversed
  in increasing order; ``partition_perm`` / ``perm_to_nc`` convert back and
  forth.  A permutation alpha corresponds to a partition exactly when it is
  geodesic, i.e. cycles(alpha) + cycles(alpha^-1 gamma) = n + 1 for the long
  cycle gamma = (1 2 ... n).
* The complement ``kreweras(pi)`` is the partition of P_pi^-1 gamma.  It
  satisfies |pi| + |K(pi)| = n + 1, and K(K(pi)) is pi rotated by one.

Everything here is exact integer/rational combinatorics; sizes are capped
(n <= 10 for enumeration) because the lattice grows like the Catalan
numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

from .errors import DegenerateBlockError, OrderError, ProfileError, SizeError

MAX_ENUM_N = 10


# ---------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class Perm:
    """Permutation of {1..n}; images[i-1] = alpha(i)."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise SizeError(f"images {self.images} are not a bijection of [{n}]")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]


def identity_perm(n: int) -> Perm:
    return Perm(tuple(range(1, n + 1)))


def long_cycle(n: int) -> Perm:
    return Perm(tuple(range(2, n + 1)) + (1,))


def compose(p: Perm, q: Perm) -> Perm:
    """(p o q)(i) = p(q(i))."""
    if p.n != q.n:
        raise SizeError("composing permutations of different sizes")
    return Perm(tuple(p.images[q.images[i] - 1] for i in range(p.n)))


def inverse(p: Perm) -> Perm:
    inv = [0] * p.n
    for i, img in enumerate(p.images, start=1):
        inv[img - 1] = i
    return Perm(tuple(inv))


def cycles_of(p: Perm) -> tuple[tuple[int, ...], ...]:
    """Cycles in traversal order, each starting at its smallest element."""
    seen = [False] * p.n
    out: list[tuple[int, ...]] = []
    for start in range(1, p.n + 1):
        if seen[start - 1]:
            continue
        cyc = [start]
        seen[start - 1] = True
        j = p(start)
        while j != start:
            cyc.append(j)
            seen[j - 1] = True
            j = p(j)
        out.append(tuple(cyc))
    return tuple(out)


def perm_cycles(p: Perm) -> int:
    return len(cycles_of(p))


# ---------------------------------------------------------------------------
# non-crossing partitions


@dataclass(frozen=True)
class NonCrossingPartition:
    """Canonical form: blocks sorted by minimum, elements ascending."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __str__(self) -> str:
        inner = ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return "{" + inner + "}"


def ncp(n: int, blocks) -> NonCrossingPartition:
    """Build and validate a non-crossing partition of {1..n}."""
    canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
    flat = sorted(x for b in canon for x in b)
    if flat != list(range(1, n + 1)):
        raise SizeError(f"blocks {blocks} do not partition [{n}]")
    if _has_crossing(canon):
        raise SizeError(f"blocks {canon} cross")
    return NonCrossingPartition(n, canon)


def _has_crossing(blocks: tuple[tuple[int, ...], ...]) -> bool:
    # V and W cross iff the elements of W land in more than one gap of V.
    import bisect

    for a, b in combinations(blocks, 2):
        gaps = {bisect.bisect_left(a, w) for w in b}
        if len(gaps) > 1:
            return True
    return False


def zero_partition(n: int) -> NonCrossingPartition:
    return NonCrossingPartition(n, tuple((i,) for i in range(1, n + 1)))


def one_partition(n: int) -> NonCrossingPartition:
    return NonCrossingPartition(n, (tuple(range(1, n + 1)),))


def catalan(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


@lru_cache(maxsize=None)
def _nc_blocks(elems: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All non-crossing partitions of the sorted tuple elems, as block tuples.

    Recursion on the block containing the first element: the remaining
    elements split into the gaps between consecutive chosen elements, and
    each gap is partitioned independently.
    """
    if not elems:
        return ((),)
    first, rest = elems[0], elems[1:]
    out: list[tuple[tuple[int, ...], ...]] = []
    for size in range(len(rest) + 1):
        for extra in combinations(rest, size):
            block = (first,) + extra
            chosen = set(extra)
            # gaps[i] collects the leftovers between block[i] and block[i+1]
            gaps: list[list[int]] = [[] for _ in range(len(block))]
            for x in rest:
                if x in chosen:
                    continue
                idx = 0
                for bpos, b in enumerate(block):
                    if x > b:
                        idx = bpos
                gaps[idx].append(x)
            partial: list[tuple[tuple[int, ...], ...]] = [(block,)]
            for gap in gaps:
                if not gap:
                    continue
                new_partial = []
                for left in partial:
                    for sub in _nc_blocks(tuple(gap)):
                        new_partial.append(left + sub)
                partial = new_partial
            out.extend(partial)
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_nc(n: int) -> tuple[NonCrossingPartition, ...]:
    """All of NC(n) in canonical form, deterministic order, |NC(n)| = Catalan(n)."""
    if not (1 <= n <= MAX_ENUM_N):
        raise SizeError(f"n={n} outside supported range 1..{MAX_ENUM_N}")
    parts = []
    for blocks in _nc_blocks(tuple(range(1, n + 1))):
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        parts.append(NonCrossingPartition(n, canon))
    parts.sort(key=lambda p: p.blocks)
    return tuple(parts)


def nc_leq(sigma: NonCrossingPartition, pi: NonCrossingPartition) -> bool:
    """Reverse refinement: every block of sigma inside a block of pi."""
    if sigma.n != pi.n:
        raise SizeError("comparing partitions of different ground sets")
    owner = {}
    for bi, block in enumerate(pi.blocks):
        for x in block:
            owner[x] = bi
    return all(len({owner[x] for x in block}) == 1 for block in sigma.blocks)


def partition_perm(p: NonCrossingPartition) -> Perm:
    """Permutation with each block as an increasing cycle."""
    img = [0] * p.n
    for block in p.blocks:
        for a, b in zip(block, block[1:]):
            img[a - 1] = b
        img[block[-1] - 1] = block[0]
    return Perm(tuple(img))


def perm_to_nc(alpha: Perm) -> NonCrossingPartition | None:
    """Partition of alpha's cycles if alpha is geodesic, else None.

    Geodesic means cycles(alpha) + cycles(alpha^-1 gamma) = n + 1; such
    permutations traverse each cycle in increasing order and their cycle
    partitions are exactly NC(n).
    """
    n = alpha.n
    g = long_cycle(n)
    if perm_cycles(alpha) + perm_cycles(compose(inverse(alpha), g)) != n + 1:
        return None
    part = ncp(n, [tuple(sorted(c)) for c in cycles_of(alpha)])
    # geodesic permutations traverse blocks increasingly; check, cheaply
    if partition_perm(part) != alpha:  # pragma: no cover - excluded by theory
        return None
    return part


def kreweras(pi: NonCrossingPartition) -> NonCrossingPartition:
    """Complement partition, via K(pi) = partition of P_pi^-1 gamma."""
    g = long_cycle(pi.n)
    q = compose(inverse(partition_perm(pi)), g)
    return ncp(pi.n, [tuple(sorted(c)) for c in cycles_of(q)])


_MOBIUS_CACHE: dict[tuple, int] = {}


def mobius(sigma: NonCrossingPartition, pi: NonCrossingPartition) -> int:
    """Moebius function of the interval [sigma, pi] in NC(n).

    Defined by mu[sigma, sigma] = 1 and mu[sigma, pi] =
    -sum over sigma <= rho < pi of mu[sigma, rho].
    """
    if not nc_leq(sigma, pi):
        raise OrderError(f"{sigma} is not below {pi}")
    key = (sigma.n, sigma.blocks, pi.blocks)
    cached = _MOBIUS_CACHE.get(key)
    if cached is not None:
        return cached
    if sigma == pi:
        value = 1
    else:
        total = 0
        for rho in enumerate_nc(pi.n):
            if rho != pi and nc_leq(sigma, rho) and nc_leq(rho, pi):
                total += mobius(sigma, rho)
        value = -total
    _MOBIUS_CACHE[key] = value
    return value


def mobius_zero_product(pi: NonCrossingPartition) -> int:
    """mu[0_n, pi] via the block-size product (-1)^(|V|-1) Catalan(|V|-1)."""
    out = 1
    for block in pi.blocks:
        size = len(block)
        out *= (-1) ** (size - 1) * catalan(size - 1)
    return out


# ---------------------------------------------------------------------------
# moment / cumulant conversion (scalar)


def moments_to_cumulants(m, n: int) -> list[complex]:
    """Free cumulants k_1..k_n from moments m_1..m_n.

    k_j = sum over sigma in NC(j) of m_sigma mu[sigma, 1_j], where m_sigma is
    the product of block moments.  The coefficient mu[sigma, 1_j] equals the
    signed Catalan product over the blocks of the complement of sigma
    (complementation maps [sigma, 1_j] onto [0_j, K(sigma)]), which avoids
    the generic interval recursion in ``mobius``.
    """
    if n > MAX_ENUM_N:
        raise SizeError(f"order {n} exceeds lattice enumeration bound {MAX_ENUM_N}")
    if len(m) < n:
        raise SizeError(f"need {n} moments, got {len(m)}")
    out: list[complex] = []
    for j in range(1, n + 1):
        total = 0j
        for sigma in enumerate_nc(j):
            term = complex(mobius_zero_product(kreweras(sigma)))
            for block in sigma.blocks:
                term *= m[len(block) - 1]
            total += term
        out.append(total)
    return out


def cumulants_to_moments(kappa, n: int) -> list[complex]:
    """Moments m_1..m_n from free cumulants: m_j = sum over NC(j) of kappa_pi."""
    if n > MAX_ENUM_N:
        raise SizeError(f"order {n} exceeds lattice enumeration bound {MAX_ENUM_N}")
    if len(kappa) < n:
        raise SizeError(f"need {n} cumulants, got {len(kappa)}")
    out: list[complex] = []
    for j in range(1, n + 1):
        total = 0j
        for pi in enumerate_nc(j):
            term = 1 + 0j
            for block in pi.blocks:
                term *= kappa[len(block) - 1]
            total += term
        out.append(total)
    return out


# ---------------------------------------------------------------------------
# label-compatible pairs and weights


@dataclass(frozen=True)
class IndexProfile:
    """Block labels r(1..n), r'(1..n) of an alternating word; labels are 1-based."""

    n: int
    r: tuple[int, ...]
    rp: tuple[int, ...]

    def __post_init__(self):
        if len(self.r) != self.n or len(self.rp) != self.n:
            raise ProfileError("label lists must have length n")
        if min(self.r + self.rp, default=1) < 1:
            raise ProfileError("labels are 1-based block indices")

    @property
    def k(self) -> int:
        return max(self.r + self.rp)


def index_profile(r, rp) -> IndexProfile:
    return IndexProfile(len(tuple(r)), tuple(r), tuple(rp))


def _pair_admissible(sigma: NonCrossingPartition, pi: NonCrossingPartition,
                     profile: IndexProfile) -> bool:
    n = profile.n
    sperm = partition_perm(sigma)
    if any(profile.rp[i - 1] != profile.r[sperm(i) - 1] for i in range(1, n + 1)):
        return False
    kperm = partition_perm(kreweras(pi))
    for i in range(1, n + 1):
        j = i - 1 if i > 1 else n  # i-1 taken mod n with representative in [n]
        if profile.r[i - 1] != profile.rp[kperm(j) - 1]:
            return False
    return True


def nc_pairs_rrp(profile: IndexProfile) -> list[tuple[NonCrossingPartition, NonCrossingPartition]]:
    """All pairs sigma <= pi compatible with the labels.

    Compatibility, with partitions acting as permutations:
    r'(i) = r(sigma(i)) and r(i) = r'(K(pi)(i-1)), index arithmetic mod n.
    """
    if profile.n > 8:
        raise SizeError("label-pair enumeration capped at n <= 8")
    parts = enumerate_nc(profile.n)
    out = []
    for pi in parts:
        kperm = partition_perm(kreweras(pi))
        ok = True
        for i in range(1, profile.n + 1):
            j = i - 1 if i > 1 else profile.n
            if profile.r[i - 1] != profile.rp[kperm(j) - 1]:
                ok = False
                break
        if not ok:
            continue
        for sigma in parts:
            if not nc_leq(sigma, pi):
                continue
            sperm = partition_perm(sigma)
            if all(profile.rp[i - 1] == profile.r[sperm(i) - 1]
                   for i in range(1, profile.n + 1)):
                out.append((sigma, pi))
    return out


def weight_omega(sigma: NonCrossingPartition, pi: NonCrossingPartition,
                 profile: IndexProfile, weights) -> float:
    """Ascent-indexed weight of an admissible pair.

    Product over i with i < sigma(i) of tau(p_r'(i))^-1 times product over
    j with j < K(pi)(j) of tau(p_r(j+1))^-1, j+1 taken mod n.  This is the
    displayed combinatorial form; the asymptotic moment machinery uses the
    geodesic weight (see weingarten.geodesic_weight), which carries an extra
    bookkeeping factor in genuinely rectangular settings.
    """
    weights = tuple(float(w) for w in weights)
    if profile.k > len(weights):
        raise ProfileError(f"profile uses {profile.k} labels, only {len(weights)} weights")
    if not _pair_admissible(sigma, pi, profile):
        raise ProfileError("pair is not label-compatible with the profile")
    n = profile.n
    out = 1.0
    sperm = partition_perm(sigma)
    for i in range(1, n + 1):
        if i < sperm(i):
            w = weights[profile.rp[i - 1] - 1]
            if w == 0.0:
                raise DegenerateBlockError("zero block weight")
            out /= w
    kperm = partition_perm(kreweras(pi))
    for j in range(1, n + 1):
        if j < kperm(j):
            label = profile.r[j % n]  # r(j+1), wrapping n+1 -> 1
            w = weights[label - 1]
            if w == 0.0:
                raise DegenerateBlockError("zero block weight")
            out /= w
    return out
