"""Property suites driven by hypothesis."""
import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from conftest import naive_fixed_point
from autoseq.algebra import char_poly, dominant_eigenvalue
from autoseq.core import IntMatrix, Morphism, PrefixView, expand, is_primitive, transition_matrix
from autoseq.dynamical import OBSTRUCTED, eigenvalue_obstruction
from autoseq.errors import BlockAlphabetUnstable, HeightNotOne, SingularMatrix
from autoseq.kernel import kernel_lower_bound, targeted_kernel_family, verify_witness
from autoseq.report import Report
from autoseq.seqlib import UNIFORM_BUILTINS, builtin_morphism
from autoseq.stats import block_morphism
from autoseq.strategy import CERTIFIED, NEGATIVE_ANY, NEGATIVE_Q, AnalysisConfig, analyze

LETTERS = "abcd"
SMALL = AnalysisConfig(horizon=1 << 15, kernel_horizon=1 << 14, k_max=6, n_max=24, bases=(2, 3))


@st.composite
def int_matrices(draw, max_dim=5, min_dim=1):
    d = draw(st.integers(min_dim, max_dim))
    rows = draw(st.lists(st.lists(st.integers(-20, 20), min_size=d, max_size=d), min_size=d, max_size=d))
    return IntMatrix(tuple(map(tuple, rows)))


@st.composite
def rule_sets(draw, d=None, min_len=1, max_len=4, uniform=None):
    if d is None:
        d = draw(st.integers(2, 4))
    letters = LETTERS[:d]
    word = st.lists(st.sampled_from(letters), min_size=min_len, max_size=max_len)
    if uniform is not None:
        word = st.lists(st.sampled_from(letters), min_size=uniform, max_size=uniform)
    rules = {a: "".join(draw(word)) for a in letters}
    return rules


@st.composite
def prolongable(draw, uniform=None):
    rules = draw(rule_sets(min_len=1, max_len=4, uniform=uniform))
    first = rules["a"]
    if uniform is None:
        rules["a"] = "a" + first[: max(1, len(first) - 1)] if len(first) < 2 or first[0] != "a" else first
    else:
        rules["a"] = "a" + first[1:]
    return rules


def morph(rules, **kw):
    return Morphism.from_dict(rules, start="a", **kw)


# exact algebra

@settings(max_examples=150, deadline=None)
@given(int_matrices())
def test_cayley_hamilton(M):
    assert char_poly(M).evaluate_matrix(M) == IntMatrix.zeros(M.dim)


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_char_poly_trace_and_det(M):
    f = char_poly(M)
    d = M.dim
    assert f.coeffs[-1] == 1 and f.degree == d
    assert f.coeffs[d - 1] == -sum(M[i, i] for i in range(d))
    assert f.coeffs[0] == (-1) ** d * M.det()


# morphisms

@settings(max_examples=150, deadline=None)
@given(st.integers(2, 4).flatmap(lambda d: st.tuples(rule_sets(d=d), rule_sets(d=d))))
def test_transition_matrix_functorial(pair):
    f = morph(pair[0], matrix_only=True)
    g = morph(pair[1], matrix_only=True)
    assert transition_matrix(f.compose(g)) == transition_matrix(f) @ transition_matrix(g)


@settings(max_examples=100, deadline=None)
@given(prolongable(), st.integers(1, 400), st.integers(0, 400))
def test_expand_prefix_stable(rules, n, extra):
    m = morph(rules)
    try:
        want = naive_fixed_point(rules, "a", n + extra)
    except KeyError:
        return
    assume(len(want) == n + extra)  # fixed point long enough
    short = expand(m, n).word(n)
    long = expand(m, n + extra).word(n + extra)
    assert long[:n] == short == want[:n]
    assert long == want


@settings(max_examples=60, deadline=None)
@given(st.permutations(range(4)), int_matrices(max_dim=4, min_dim=4))
def test_primitivity_permutation_invariant(perm, M):
    N = IntMatrix(tuple(tuple(abs(M[i, j]) % 3 for j in range(4)) for i in range(4)))
    P = IntMatrix(tuple(tuple(int(perm[i] == j) for j in range(4)) for i in range(4)))
    assert is_primitive(N) == is_primitive(P @ N @ P.transpose())


# kernel witnesses

@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(st.integers(0, 2), min_size=512, max_size=4096), st.integers(2, 4))
def test_kernel_witnesses_reverify(seq, q):
    p = PrefixView.from_symbols([str(x) for x in seq])
    H = len(seq)
    k = 0
    while H // q ** (k + 1) >= 8 and k < 5:
        k += 1
    est = kernel_lower_bound(p, q, k, H)
    for i in range(est.size):
        for j in range(i):
            assert verify_witness(p, est, i, j)
    fam = targeted_kernel_family(p, q, "qk-k", k, H)
    for i in range(fam.size):
        for j in range(i):
            assert verify_witness(p, fam, i, j)


@settings(max_examples=30, deadline=None)
@given(prolongable(), st.integers(2, 3))
def test_kernel_witnesses_on_fixed_points(rules, q):
    m = morph(rules)
    try:
        p = expand(m, 1 << 12)
        p.codes(1 << 12)
    except Exception:
        assume(False)
    est = kernel_lower_bound(p, q, 4, 1 << 12)
    assert all(verify_witness(p, est, i, j) for i in range(est.size) for j in range(i))


# block morphisms

@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(prolongable(), st.integers(1, 3))
def test_block_morphism_keeps_dominant_eigenvalue(rules, ell):
    m = morph(rules)
    M = transition_matrix(m)
    assume(is_primitive(M))
    try:
        bm = block_morphism(m, ell)
    except BlockAlphabetUnstable:
        assume(False)
    r1 = dominant_eigenvalue(M)
    r2 = dominant_eigenvalue(transition_matrix(bm))
    assert r1.minimal_polynomial == r2.minimal_polynomial
    assert abs(r1.approx() - r2.approx()) < 1e-9


# whole pipeline

def _report(m) -> str:
    v = analyze(m, SMALL)
    return Report.build("analyze", {"kind": "morphism", "spec": m.to_spec()}, SMALL.to_dict(), v).to_json(
        with_timings=False)


@settings(max_examples=8, deadline=None)
@given(prolongable())
def test_reports_byte_identical(rules):
    m = morph(rules)
    try:
        expand(m, 64).codes(64)
    except Exception:
        assume(False)
    assert _report(m) == _report(m)


def _no_certified_negative(v):
    return not any(e.grade == CERTIFIED and e.outcome in (NEGATIVE_ANY, NEGATIVE_Q) for e in v.evidence)


def test_builtin_uniform_soundness():
    for name in UNIFORM_BUILTINS:
        v = analyze(builtin_morphism(name), SMALL)
        assert _no_certified_negative(v), name


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 3).flatmap(lambda q: st.tuples(st.just(q), prolongable(uniform=q))))
def test_random_uniform_soundness(qr):
    q, rules = qr
    m = morph(rules)
    v = analyze(m, SMALL.with_(bases=(q,)))
    assert _no_certified_negative(v)
    try:
        rep = eigenvalue_obstruction(m, q_max=q ** 3)
    except (SingularMatrix, HeightNotOne):
        return
    for k in (1, 2, 3):
        assert rep.per_q[q ** k].status != OBSTRUCTED
