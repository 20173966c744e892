"""Unitary moment calculus against closed forms, Monte Carlo, and the
classical alternating-moment formula for free families.

The Monte Carlo oracle evaluates the very word the analytic machinery
claims to integrate, with independently sampled unitaries per block, and is
the arbiter for the chaining conventions (the n = 3 case is sensitive to
the cycle directions).
"""

import numpy as np
import pytest

from freedeq import montecarlo as mc
from freedeq import nclattice as nc
from freedeq import weingarten as wg
from freedeq.errors import ProfileError, ShapeError, SingularMatrixError, SizeError


# ---------------------------------------------------------------------------
# oracles


def wg3_closed_form(t, N):
    """Order-3 closed forms by cycle type."""
    N = float(N)
    table = {
        (1, 1, 1): (N ** 2 - 2) / (N * (N ** 2 - 1) * (N ** 2 - 4)),
        (2, 1): -1.0 / ((N ** 2 - 1) * (N ** 2 - 4)),
        (3,): 2.0 / (N * (N ** 2 - 1) * (N ** 2 - 4)),
    }
    return table[t]


def word_trace(us, d_blocks, c_blocks, profile):
    mats = []
    for t in range(profile.n):
        mats.append(us[profile.r[t] - 1])
        mats.append(d_blocks[t])
        mats.append(us[profile.rp[t] - 1].conj().T)
        mats.append(c_blocks[t])
    out = mats[0]
    for m in mats[1:]:
        out = out @ m
    return np.trace(out)


def mc_word_moment(d_blocks, c_blocks, profile, sizes, trials, seed):
    k = max(profile.r + profile.rp)
    vals = np.empty(trials, dtype=complex)
    for t in range(trials):
        rng = mc.trial_rng(seed, t)
        us = [mc.sample_haar(sizes[m], rng) for m in range(k)]
        vals[t] = word_trace(us, d_blocks, c_blocks, profile)
    vals /= sizes[profile.r[0] - 1]
    se = vals.std(ddof=1) / np.sqrt(trials)
    return vals.mean(), se


def free_alternating_oracle(tau_d, tau_c, n):
    """tau of d1 c1 ... dn cn for two free families, via cumulants of the d
    family against complements carrying the c family."""
    def kappa_block(block):
        j = len(block)
        total = 0j
        top = nc.one_partition(j)
        for sg in nc.enumerate_nc(j):
            term = complex(nc.mobius(sg, top))
            for b in sg.blocks:
                term *= tau_d(tuple(block[i - 1] for i in b))
            total += term
        return total

    total = 0j
    for pi in nc.enumerate_nc(n):
        term = 1 + 0j
        for b in pi.blocks:
            term *= kappa_block(b)
        for b in nc.kreweras(pi).blocks:
            term *= tau_c(b)
        total += term
    return total


# ---------------------------------------------------------------------------
# tables


def test_order1():
    t = wg.weingarten_table(1, 7)
    assert t.by_type[(1,)] == pytest.approx(1 / 7, abs=1e-15)


@pytest.mark.parametrize("N", [2, 4, 8])
def test_order2_closed_forms(N):
    t = wg.weingarten_table(2, N)
    assert abs(t.by_type[(1, 1)] - 1 / (N ** 2 - 1)) < 1e-12
    assert abs(t.by_type[(2,)] + 1 / (N * (N ** 2 - 1))) < 1e-12


def test_order2_n2_values():
    t = wg.weingarten_table(2, 2)
    assert t.by_type[(1, 1)] == pytest.approx(1 / 3, abs=1e-12)
    assert t.by_type[(2,)] == pytest.approx(-1 / 6, abs=1e-12)


@pytest.mark.parametrize("N", [3, 5, 9])
def test_order3_closed_forms(N):
    t = wg.weingarten_table(3, N)
    for ct in ((1, 1, 1), (2, 1), (3,)):
        assert abs(t.by_type[ct] - wg3_closed_form(ct, N)) < 1e-13


def test_gram_identity_column():
    from itertools import permutations as perms
    for n in range(1, 6):
        table = wg.weingarten_table(n, 8)
        for alpha in perms(range(n)):
            total = 0.0
            for beta in perms(range(n)):
                binv = [0] * n
                for i, img in enumerate(beta):
                    binv[img] = i
                ab = tuple(alpha[binv[i]] for i in range(n))
                total += 8.0 ** len(wg.cycle_type(ab)) * table.by_type[wg.cycle_type(beta)]
            expect = 1.0 if alpha == tuple(range(n)) else 0.0
            assert abs(total - expect) < 1e-10


def test_class_constancy():
    for n in range(2, 6):
        assert wg.weingarten_table(n, 8).class_spread < 1e-12


def test_exact_rational_agrees():
    for n in (2, 3, 4):
        a = wg.weingarten_table(n, 6)
        b = wg.weingarten_table(n, 6, exact=True)
        for ct in a.by_type:
            assert abs(a.by_type[ct] - b.by_type[ct]) < 1e-14


def test_table_bounds():
    with pytest.raises(SizeError):
        wg.weingarten_table(7, 10)
    with pytest.raises(SingularMatrixError):
        wg.weingarten_table(3, 2)


# ---------------------------------------------------------------------------
# mixed entry moments


def test_entry_moment_basics():
    assert wg.haar_mixed_moment([1], [1], [1], [1], 5) == pytest.approx(1 / 5)
    val = wg.haar_mixed_moment([1, 2], [1, 2], [1, 2], [1, 2], 5)
    assert val == pytest.approx(1 / 24)  # 1/(N^2-1)
    assert wg.haar_mixed_moment([1], [1], [1, 2], [1, 2], 5) == 0
    with pytest.raises(ShapeError):
        wg.haar_mixed_moment([1, 2], [1], [1], [1], 5)


def test_entry_moment_row_normalization():
    N = 6
    total = sum(wg.haar_mixed_moment([2], [j], [2], [j], N).real for j in range(1, N + 1))
    assert total == pytest.approx(1.0, abs=1e-14)


def test_entry_moments_against_sampling():
    N = 4
    count = 20000
    rng = mc.trial_rng(123, 0)
    us = mc.sample_haar_batch(N, count, rng)
    # |u_11|^2
    s1 = np.abs(us[:, 0, 0]) ** 2
    exact = wg.haar_mixed_moment([1], [1], [1], [1], N).real
    assert abs(s1.mean() - exact) <= 3 * s1.std(ddof=1) / np.sqrt(count)
    # u_11 u_22 conj(u_11) conj(u_22)
    s2 = (us[:, 0, 0] * us[:, 1, 1] * np.conj(us[:, 0, 0]) * np.conj(us[:, 1, 1])).real
    exact = wg.haar_mixed_moment([1, 2], [1, 2], [1, 2], [1, 2], N).real
    assert abs(s2.mean() - exact) <= 3 * s2.std(ddof=1) / np.sqrt(count)
    # u_11 u_12 conj(u_21) conj(u_22) has a single admissible pairing
    s3 = us[:, 0, 0] * us[:, 0, 1] * np.conj(us[:, 1, 0]) * np.conj(us[:, 1, 1])
    exact = wg.haar_mixed_moment([1, 1], [1, 2], [2, 2], [1, 2], N)
    se = s3.real.std(ddof=1) / np.sqrt(count)
    assert abs(s3.real.mean() - exact.real) <= 3 * se + 1e-12


# ---------------------------------------------------------------------------
# word moments, exact size


def test_word_n1_identities():
    N = 6
    profile = nc.index_profile([1], [1])
    ident = [np.eye(N, dtype=complex)]
    out = wg.finite_n_opvalued_moment(ident, ident, profile, [N])
    assert out.block == 1
    assert out.coefficient == pytest.approx(1.0)
    traceless = [np.diag(np.linspace(-1, 1, N) - np.linspace(-1, 1, N).mean()).astype(complex)]
    out = wg.finite_n_opvalued_moment(traceless, ident, profile, [N])
    assert abs(out.coefficient) < 1e-14


def test_word_n2_projector_c_identity():
    # with C = I the unitaries cancel pairwise and the word is exact
    N = 8
    profile = nc.index_profile([1, 1], [1, 1])
    d = np.diag([1.0] * (N // 2) + [-1.0] * (N // 2)).astype(complex)
    ident = np.eye(N, dtype=complex)
    out = wg.finite_n_opvalued_moment([d, d], [ident, ident], profile, [N])
    assert out.coefficient == pytest.approx(np.trace(d @ d) / N)


def test_word_against_sampling_n2():
    rng = np.random.default_rng(7)
    N = 6
    profile = nc.index_profile([1, 1], [1, 1])
    d_blocks = [np.diag(rng.normal(size=N)).astype(complex) for _ in range(2)]
    c_blocks = [rng.normal(size=(N, N)) + 0j for _ in range(2)]
    exact = wg.finite_n_opvalued_moment(d_blocks, c_blocks, profile, [N]).coefficient
    mean, se = mc_word_moment(d_blocks, c_blocks, profile, [N], 40000, 3)
    assert abs(exact - mean) <= 3 * se + 1e-12


def test_word_against_sampling_n3_noncommuting():
    # sensitive to the cycle chaining directions
    rng = np.random.default_rng(8)
    N = 5
    profile = nc.index_profile([1, 1, 1], [1, 1, 1])
    d_blocks = [rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N)) for _ in range(3)]
    c_blocks = [rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N)) for _ in range(3)]
    exact = wg.finite_n_opvalued_moment(d_blocks, c_blocks, profile, [N]).coefficient
    mean, se = mc_word_moment(d_blocks, c_blocks, profile, [N], 60000, 4)
    err = abs(exact - mean)
    assert err <= 3 * np.sqrt(2) * se


def test_word_rectangular_blocks():
    rng = np.random.default_rng(9)
    sizes = [4, 7]
    profile = nc.index_profile([1, 2], [2, 1])
    d_blocks = [rng.normal(size=(4, 7)) + 0j, rng.normal(size=(7, 4)) + 0j]
    c_blocks = [rng.normal(size=(7, 7)) + 0j, rng.normal(size=(4, 4)) + 0j]
    out = wg.finite_n_opvalued_moment(d_blocks, c_blocks, profile, sizes)
    hand = np.trace(d_blocks[0] @ d_blocks[1]) * np.trace(c_blocks[0]) \
        * np.trace(c_blocks[1]) / (4 ** 2 * 7)
    assert out.coefficient == pytest.approx(hand)
    mean, se = mc_word_moment(d_blocks, c_blocks, profile, sizes, 40000, 5)
    assert abs(out.coefficient - mean) <= 3 * se + 1e-12


def test_word_unbalanced_profile_is_zero():
    N = 5
    profile = nc.index_profile([1, 1], [2, 2])
    d = [np.ones((N, N), dtype=complex)] * 2
    c = [np.ones((N, N), dtype=complex)] * 2
    out = wg.finite_n_opvalued_moment(d, c, profile, [N, N])
    assert out.coefficient == 0


def test_word_shape_validation():
    profile = nc.index_profile([1, 2], [2, 1])
    with pytest.raises(ProfileError):
        wg.finite_n_opvalued_moment([np.eye(4), np.eye(4)],
                                    [np.eye(4), np.eye(4)], profile, [4, 7])


# ---------------------------------------------------------------------------
# limiting formula


def test_limit_n1_freeness():
    rng = np.random.default_rng(10)
    N = 9
    profile = nc.index_profile([1], [1])
    d = [np.diag(rng.normal(size=N)).astype(complex)]
    c = [np.diag(rng.normal(size=N)).astype(complex)]
    tau_d, tau_c = wg.trace_callbacks(d, c, profile, [N])
    out = wg.asymptotic_nc_moment(tau_d, tau_c, profile, [1.0])
    expect = np.trace(d[0]) * np.trace(c[0]) / N ** 2
    assert out.coefficient == pytest.approx(complex(expect))
    fin = wg.finite_n_opvalued_moment(d, c, profile, [N])
    assert fin.coefficient == pytest.approx(out.coefficient)  # exact at n = 1


def test_limit_centered_vanishes():
    N = 8
    profile = nc.index_profile([1], [1])
    vals = np.linspace(-1, 1, N)
    d = [np.diag(vals - vals.mean()).astype(complex)]
    c = [np.eye(N, dtype=complex)]
    tau_d, tau_c = wg.trace_callbacks(d, c, profile, [N])
    out = wg.asymptotic_nc_moment(tau_d, tau_c, profile, [1.0])
    assert abs(out.coefficient) < 1e-15


@pytest.mark.parametrize("n", [2, 3, 4])
def test_limit_matches_free_family_oracle(n):
    rng = np.random.default_rng(11 + n)
    N = 12
    profile = nc.index_profile([1] * n, [1] * n)
    d = [np.diag(rng.normal(size=N)).astype(complex) for _ in range(n)]
    c = [np.diag(rng.normal(size=N)).astype(complex) for _ in range(n)]
    tau_d, tau_c = wg.trace_callbacks(d, c, profile, [N])
    out = wg.asymptotic_nc_moment(tau_d, tau_c, profile, [1.0])
    oracle = free_alternating_oracle(tau_d, tau_c, n)
    assert abs(out.coefficient - oracle) < 1e-13 * max(1.0, abs(oracle))


def test_limit_two_block_ambient_compression():
    # a block-1 word in a two-block space must reduce to the compressed
    # single-block formula; all ambient weight factors have to cancel
    rng = np.random.default_rng(15)
    n = 3
    n1, n2 = 10, 14
    profile = nc.index_profile([1] * n, [1] * n)
    d = [np.diag(rng.normal(size=n1)).astype(complex) for _ in range(n)]
    c = [np.diag(rng.normal(size=n1)).astype(complex) for _ in range(n)]
    tau_d, tau_c = wg.trace_callbacks(d, c, profile, [n1, n2])
    out = wg.asymptotic_nc_moment(tau_d, tau_c, profile, [n1 / (n1 + n2), n2 / (n1 + n2)])

    def tau_d_c(cycle):
        prod = d[cycle[0] - 1]
        for t in cycle[1:]:
            prod = prod @ d[t - 1]
        return np.trace(prod) / n1

    def tau_c_c(cycle):
        prod = c[cycle[0] - 1]
        for t in cycle[1:]:
            prod = prod @ c[t - 1]
        return np.trace(prod) / n1

    oracle = free_alternating_oracle(tau_d_c, tau_c_c, n)
    assert abs(out.coefficient - oracle) < 1e-13 * max(1.0, abs(oracle))


def test_limit_empty_profile():
    profile = nc.index_profile([1], [2])
    out = wg.asymptotic_nc_moment(lambda c: 1.0, lambda c: 1.0, profile, [0.5, 0.5])
    assert out.coefficient == 0


def test_interval_mobius_equals_cycle_product():
    for n in range(2, 6):
        profile = nc.index_profile([1] * n, [1] * n)
        for sg, pi in nc.nc_pairs_rrp(profile):
            rel = nc.compose(nc.partition_perm(pi), nc.inverse(nc.partition_perm(sg)))
            assert wg.mobius_cycle_product(tuple(x - 1 for x in rel.images)) \
                == nc.mobius(sg, pi)


# ---------------------------------------------------------------------------
# convergence of finite size to the limit


def two_block_word(N1):
    N2 = 2 * N1
    sizes = [N1, N2]
    profile = nc.index_profile([1, 1], [1, 1])
    j = np.arange(N1)
    d = [np.diag(1.0 + (j + 0.5) / N1).astype(complex),
         np.diag(2.0 - (j + 0.5) / N1).astype(complex)]
    c = [np.diag(0.5 + ((j + 0.5) / N1) ** 2).astype(complex),
         np.diag(1.0 + 0.3 * np.sin(np.pi * (j + 0.5) / N1)).astype(complex)]
    return d, c, profile, sizes


def finite_vs_limit_error(N1):
    d, c, profile, sizes = two_block_word(N1)
    fin = wg.finite_n_opvalued_moment(d, c, profile, sizes)
    tau_d, tau_c = wg.trace_callbacks(d, c, profile, sizes)
    weights = [s / sum(sizes) for s in sizes]
    lim = wg.asymptotic_nc_moment(tau_d, tau_c, profile, weights)
    return abs(fin.coefficient - lim.coefficient)


def test_second_order_convergence():
    errs = {n1: finite_vs_limit_error(n1) for n1 in (8, 16, 32, 64)}
    for n1 in (8, 16, 32):
        ratio = errs[n1] / errs[2 * n1]
        assert 2.5 <= ratio <= 6.0


# ---------------------------------------------------------------------------
# leading order of the Weingarten function


def test_leading_order_n1():
    out = wg.wg_leading_order(nc.identity_perm(1), [2, 4, 8])
    assert out.exponent == 1 and out.coefficient == 1
    assert all(abs(v - 1.0) < 1e-14 for v in out.table.values())


def test_leading_order_transposition():
    out = wg.wg_leading_order(nc.Perm((2, 1)), [4, 8, 16, 32])
    assert out.exponent == 3 and out.coefficient == -1
    for N, v in out.table.items():
        assert v == pytest.approx(-1.0 / (1.0 - N ** -2), rel=1e-12)
    # O(N^-2) approach to the signed Catalan coefficient
    err4 = abs(out.table[4] + 1.0)
    err8 = abs(out.table[8] + 1.0)
    assert 3.0 < err4 / err8 < 5.0


def test_leading_order_identity_n2():
    out = wg.wg_leading_order(nc.identity_perm(2), [4, 8])
    assert out.exponent == 2 and out.coefficient == 1
    for N, v in out.table.items():
        assert v == pytest.approx(1.0 / (1.0 - N ** -2), rel=1e-12)
