import pytest

from conftest import morph
from autoseq.core import PrefixView
from autoseq.errors import PrefixTooShort, UnknownTheoremTag
from autoseq.seqlib import UNIFORM_BUILTINS, builtin_morphism, generate, poly_char_sequence
from autoseq.strategy import (
    ADVISORY,
    CANDIDATE_AUTOMATIC,
    CERTIFIED,
    INCONCLUSIVE,
    NEGATIVE_ANY,
    NEGATIVE_Q,
    NOT_AUTOMATIC_ANY,
    NOT_Q_AUTOMATIC,
    POSITIVE_Q,
    ULTIMATELY_PERIODIC,
    AnalysisConfig,
    Evidence,
    TheoremTag,
    analyze,
    analyze_sequence,
    periodicity_screen,
)

FAST = AnalysisConfig(horizon=1 << 18, kernel_horizon=1 << 16)


def test_fibonacci_certified_negative(fib):
    v = analyze(fib, FAST)
    assert v.conclusion == NOT_AUTOMATIC_ANY and v.certified
    tags = {e.tag for e in v.evidence if e.grade == CERTIFIED}
    assert TheoremTag.IRRATIONAL_EIGENVALUE in tags
    dyn = v.items("obstruction")
    assert dyn and dyn[0].payload["det"] == -1 and dyn[0].grade == CERTIFIED


def test_aab_advisory_stack(aab):
    v = analyze(aab, FAST)
    assert v.conclusion == NOT_AUTOMATIC_ANY and not v.certified
    assert any("advisory stack on base 2" in r for r in v.remarks)
    dep = v.items("multiplicative-dependence")[0]
    assert dep.payload["reduced_base"] == 2
    fams = v.items("kernel")[0].payload["families"]
    fam = [f for f in fams if f["family"] == "qk-k"]
    assert fam and fam[0]["size"] >= 8
    assert v.items("complexity")[0].payload["growth"] == "Quadratic-or-more"
    assert v.items("runs")[0].outcome == NEGATIVE_ANY


def test_thue_morse_candidate(tm):
    v = analyze(tm, FAST)
    assert v.conclusion == CANDIDATE_AUTOMATIC and v.certified and v.bases == [2]
    assert v.label == "CandidateAutomatic(2)"
    uni = v.items("uniform-construction")[0]
    assert uni.payload["kernel_size"] == 2


@pytest.mark.parametrize("name", UNIFORM_BUILTINS)
def test_uniform_soundness(name):
    m = builtin_morphism(name)
    v = analyze(m, FAST)
    assert v.conclusion == CANDIDATE_AUTOMATIC and v.certified
    assert v.bases == [m.uniform_length]
    for e in v.evidence:
        assert not (e.grade == CERTIFIED and e.outcome in (NEGATIVE_ANY, NEGATIVE_Q)), e.criterion


def test_never_self_contradictory():
    for name in ("thue-morse", "fibonacci", "aab", "m211", "grigorchuk"):
        v = analyze(builtin_morphism(name), FAST)
        pos = {q for e in v.evidence if e.grade == CERTIFIED and e.outcome == POSITIVE_Q for q in e.bases}
        neg = {q for e in v.evidence if e.grade == CERTIFIED and e.outcome == NEGATIVE_Q for q in e.bases}
        assert not (pos & neg)
        if v.conclusion == NOT_Q_AUTOMATIC and v.certified:
            assert not (set(v.bases) & pos)


def test_m36_periodic(m36):
    assert analyze(m36, FAST).conclusion == ULTIMATELY_PERIODIC


def test_grigorchuk_certified(grig):
    v = analyze(grig, FAST)
    assert v.conclusion == NOT_AUTOMATIC_ANY and v.certified


def test_every_evidence_tag_known(aab):
    v = analyze(aab, FAST)
    for e in v.evidence:
        assert TheoremTag.parse(e.to_dict()["tag"]) == e.tag


def test_unknown_tag_fails_closed():
    e = Evidence("x", "made-up", ADVISORY, NEGATIVE_Q)
    with pytest.raises(UnknownTheoremTag):
        e.to_dict()


def test_determinism(aab):
    a = analyze(aab, FAST).to_dict()
    b = analyze(aab, FAST).to_dict()
    assert a == b


# sequences

def test_squares_advisory_negative():
    v = analyze_sequence(poly_char_sequence([1, 0, 0], 1 << 20), FAST.with_(bases=(2, 3)))
    assert v.conclusion == NOT_AUTOMATIC_ANY and not v.certified
    gap = [e for e in v.items("gaps") if e.payload["symbol"] == "1"][0]
    assert gap.payload["kind"] == "FailsBoth"


def test_liouville_kernel_growth():
    cfg = FAST.with_(bases=(2, 3), k_max=6)
    v = analyze_sequence(generate("liouville", 1 << 18), cfg)
    assert not v.certified
    assert v.conclusion in (NOT_AUTOMATIC_ANY, NOT_Q_AUTOMATIC)
    greedy = [e for e in v.items("kernel") if e.bases in ([2], [3])]
    for e in greedy:
        by_depth = e.payload["lower_bound"]["size_by_depth"]
        sizes = [by_depth[k] for k in sorted(by_depth, key=int)]
        assert sizes[-1] > sizes[len(sizes) // 2]


def test_eventually_periodic_sequence():
    p = PrefixView.from_symbols("0001" + "10" * 20000)
    v = analyze_sequence(p, FAST)
    assert v.conclusion == ULTIMATELY_PERIODIC
    assert not v.certified


def test_sequence_never_certified():
    for spec in ("primes", "mobius-sq"):
        v = analyze_sequence(generate(spec, 1 << 16), FAST.with_(bases=(2,)))
        assert not v.certified


def test_prefix_too_short():
    with pytest.raises(PrefixTooShort):
        analyze_sequence(PrefixView.from_symbols("01" * 100), FAST)


def test_periodicity_screen():
    assert periodicity_screen(PrefixView.from_symbols("0001" + "10" * 5000), 10004) == (4, 2)
    assert periodicity_screen(generate("primes", 1 << 14), 1 << 14) is None


def test_config_threads_not_echoed(monkeypatch):
    monkeypatch.setenv("AUTOSEQ_THREADS", "1")
    assert AnalysisConfig().threads == 1
    assert "threads" not in AnalysisConfig().to_dict()


def test_threads_do_not_change_result(aab):
    a = analyze(aab, FAST.with_(threads=1)).to_dict()
    b = analyze(aab, FAST.with_(threads=4)).to_dict()
    assert a == b


def test_inconclusive_label():
    from autoseq.strategy import Verdict
    assert Verdict(INCONCLUSIVE, False).label == "Inconclusive"
    assert Verdict(NOT_Q_AUTOMATIC, False, [3, 5]).label == "NotQAutomatic(3, 5)"
