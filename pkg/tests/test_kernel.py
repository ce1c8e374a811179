import itertools

import numpy as np
import pytest

from conftest import morph
from autoseq.core import PrefixView, expand
from autoseq.errors import HorizonTooSmall, NotUniform, ParameterInvalid
from autoseq.kernel import (
    DFAO,
    dfao_from_uniform,
    family_offsets,
    kernel_lower_bound,
    minimize,
    targeted_kernel_family,
    uniform_kernel_size,
    verify_witness,
)
from autoseq.seqlib import UNIFORM_BUILTINS, builtin_morphism, generate


def brute_kernel(seq, q, k_max, points):
    """Distinct kernel subsequences by hashing their first ``points`` terms."""
    seen = set()
    for k in range(k_max + 1):
        for r in range(q**k):
            seen.add(tuple(seq[r::q**k][:points]))
    return len(seen)


def all_witnesses_hold(p, est):
    return all(verify_witness(p, est, i, j) for i in range(est.size) for j in range(i))


# DFAO construction

def test_tm_dfao_is_binary_digit_sum(tm):
    d = dfao_from_uniform(tm)
    assert d.num_states == 2
    for n in range(4096):
        assert d(n) == str(bin(n).count("1") % 2)


@pytest.mark.parametrize("name", UNIFORM_BUILTINS)
def test_dfao_matches_expansion(name):
    m = builtin_morphism(name)
    d = dfao_from_uniform(m)
    N = 1 << 14
    assert d.evaluate(N) == expand(m, N).word(N)
    assert minimize(d).evaluate(N) == d.evaluate(N)


def test_period_doubling_two_states():
    d = minimize(dfao_from_uniform(builtin_morphism("period-doubling")))
    assert d.num_states == 2


def test_one_uniform_constant():
    # a->a is not prolongable as a fixed point, so it is built as a bare rule set
    d = dfao_from_uniform(morph({"a": "a"}, matrix_only=True))
    assert minimize(d).num_states == 1
    assert set(d.evaluate(100)) == {"a"}


def test_dfao_not_uniform(fib):
    with pytest.raises(NotUniform):
        dfao_from_uniform(fib)


def test_dfao_rejects_partial_table():
    with pytest.raises(ValueError):
        DFAO(2, ((0,),), 0, ("x",))


# minimisation

def test_minimize_tm_and_idempotent(tm):
    d = minimize(dfao_from_uniform(tm))
    assert d.num_states == 2
    assert minimize(d) == d


def test_minimize_merges_duplicates():
    # Thue-Morse with each state split into two copies
    trans = ((0, 2), (1, 3), (2, 1), (3, 0))
    d = DFAO(2, trans, 0, ("0", "0", "1", "1"))
    m = minimize(d)
    assert m.num_states == 2
    assert m.evaluate(2048) == d.evaluate(2048)


def test_minimize_constant_five_states():
    trans = ((1, 2), (3, 4), (4, 0), (2, 1), (0, 3))
    d = DFAO(2, trans, 0, ("c",) * 5)
    assert minimize(d).num_states == 1


def test_minimize_matches_partition_oracle():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(1, 9))
        trans = tuple(tuple(int(x) for x in rng.integers(0, n, size=3)) for _ in range(n))
        outs = tuple(str(int(x)) for x in rng.integers(0, 2, size=n))
        d = DFAO(3, trans, 0, outs)
        m = minimize(d)
        # two states are equivalent iff they agree on every word of length < n
        reach = {0}
        frontier = [0]
        while frontier:
            s = frontier.pop()
            for t in trans[s]:
                if t not in reach:
                    reach.add(t)
                    frontier.append(t)
        sigs = set()
        for s in reach:
            sig = []
            for L in range(n + 1):
                for w in itertools.product(range(3), repeat=L):
                    sig.append(outs[d.run(w, s)])
            sigs.add(tuple(sig))
        assert m.num_states == len(sigs)


# exact kernel size

def test_uniform_kernel_size_matches_brute_force():
    for name in UNIFORM_BUILTINS:
        m = builtin_morphism(name)
        q = m.uniform_length
        k_max = 6 if q == 2 else 4
        seq = expand(m, 1 << 16).word(1 << 16)
        assert uniform_kernel_size(m) == brute_kernel(seq, q, k_max, (1 << 16) // q**k_max), name


# witnessed lower bounds

def test_tm_kernel_exactly_two(tm):
    p = expand(tm, 1 << 14)
    est = kernel_lower_bound(p, 2, 6, 1 << 14)
    assert est.size == 2
    assert all_witnesses_hold(p, est)


def test_aab_family_eight_distinct(aab):
    p = expand(aab, 1 << 16)
    est = targeted_kernel_family(p, 2, "qk-k", 8, 1 << 16)
    assert est.size == 8 and not est.equal_pairs
    assert all_witnesses_hold(p, est)


@pytest.mark.xfail(strict=True, reason="depth-2k family of 1->121, 2->12221 separates only 3 members by k_max=8")
def test_kolam_depth_2k_family():
    m = builtin_morphism("kolam")
    p = expand(m, 1 << 20)
    est = targeted_kernel_family(p, 2, ("const", 0), 8, 1 << 20, depths=[2, 4, 6, 8])
    assert est.size >= 4


def test_kolam_depth_2k_family_lower_bound():
    m = builtin_morphism("kolam")
    p = expand(m, 1 << 20)
    est = targeted_kernel_family(p, 2, ("const", 0), 8, 1 << 20, depths=[0, 2, 4, 6, 8])
    assert est.size >= 3
    assert all_witnesses_hold(p, est)


def test_sums_qj_minus_1_family():
    p = generate("set:sums-qj-1:2", 1 << 16)
    # independent dynamic programming oracle for finite sums of 2^j - 1
    N = 1 << 16
    reach = np.zeros(N, dtype=bool)
    reach[0] = True
    j = 1
    while (1 << j) - 1 < N:
        w = (1 << j) - 1
        # 0/1 knapsack: each part at most once when q = 2
        shifted = np.zeros(N, dtype=bool)
        shifted[w:] = reach[:-w]
        reach = reach | shifted
        j += 1
    assert np.array_equal(p.codes(N) == p.symbols.index("1"), reach)
    est = targeted_kernel_family(p, 2, "qk-k", 6, N)
    assert est.size == 6
    assert all_witnesses_hold(p, est)


def test_periodic_kernel_bounded():
    p = PrefixView.from_symbols("0010" + "110" * 30000)
    for k_max in (2, 5, 8):
        est = kernel_lower_bound(p, 2, k_max, 1 << 16)
        assert est.size <= 4 + 3
        est = targeted_kernel_family(p, 2, ("const", 0), k_max, 1 << 16)
        assert est.size <= 4 + 3


def test_lower_bound_below_exact_kernel():
    for name in UNIFORM_BUILTINS:
        m = builtin_morphism(name)
        q = m.uniform_length
        p = expand(m, 1 << 16)
        est = kernel_lower_bound(p, q, 5 if q == 2 else 3, 1 << 16)
        assert est.size <= uniform_kernel_size(m), name


def test_monotone_in_horizon_and_depth(aab):
    p = expand(aab, 1 << 16)
    sizes = [kernel_lower_bound(p, 2, 6, h).size for h in (1 << 10, 1 << 12, 1 << 14, 1 << 16)]
    assert sizes == sorted(sizes)
    sizes = [kernel_lower_bound(p, 2, k, 1 << 16).size for k in range(0, 8)]
    assert sizes == sorted(sizes)


def test_horizon_too_small(tm):
    with pytest.raises(HorizonTooSmall):
        kernel_lower_bound(expand(tm, 100), 2, 8, 100)


def test_insufficient_depth_never_counted(aab):
    est = kernel_lower_bound(expand(aab, 1 << 10), 2, 8, 1 << 10)
    assert 8 in est.insufficient_depths
    assert all(k not in est.insufficient_depths for k, _ in est.representatives)


def test_family_offsets():
    assert family_offsets("qk-k", 2, 3) == 5
    assert family_offsets("qk-1", 3, 2) == 8
    assert family_offsets("const:3", 2, 1) is None
    assert family_offsets([0, 1, 2], 2, 5) is None
    with pytest.raises(ParameterInvalid):
        family_offsets("bogus", 2, 1)


def test_diagonal_attached(tm):
    est = targeted_kernel_family(expand(tm, 1 << 12), 2, "qk-1", 6, 1 << 12)
    # a(2^k - 1) for Thue-Morse is k mod 2
    assert est.diagonal[:8] == ["0", "1", "0", "1", "0", "1", "0", "1"]


def test_to_dict_truncates(aab):
    est = kernel_lower_bound(expand(aab, 1 << 14), 2, 6, 1 << 14)
    d = est.to_dict(max_representatives=3)
    assert len(d["representatives"]) == 3 and d["representatives_truncated"]
    assert d["size"] == est.size
