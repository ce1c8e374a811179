"""Decision pipeline combining every criterion into one verdict with an evidence chain.

Grading is deliberately conservative: only exact algebra and DFAO
constructions are ``certified``; anything read off a finite prefix is
``advisory``.
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from time import perf_counter

import numpy as np

from .algebra import (
    NEVER_INTEGER_POWER_UP_TO,
    char_poly,
    dominant_eigenvalue,
    factor,
    factorint,
    mult_dependent,
)
from .core import (
    Morphism,
    PrefixView,
    expand,
    is_primitive,
    transition_matrix,
)
from .dynamical import eigenvalue_obstruction, host_profile
from .errors import (
    AutoseqError,
    InternalLimit,
    PrefixTooShort,
    UnknownTheoremTag,
)
from .gaps import (
    FAILS_BOTH,
    MIN_OCCURRENCES,
    RATIO_TO_ONE,
    cobham_gap_test,
    minsky_papert_test,
    run_first_occurrence,
)
from .kernel import (
    MIN_POINTS,
    dfao_from_uniform,
    kernel_lower_bound,
    minimize,
    targeted_kernel_family,
    uniform_kernel_size,
)
from .stats import EXPONENTIAL, QUADRATIC, block_complexity, frequencies

__all__ = [
    "TheoremTag",
    "Evidence",
    "Verdict",
    "AnalysisConfig",
    "analyze",
    "analyze_sequence",
    "periodicity_screen",
    "NOT_AUTOMATIC_ANY",
    "NOT_Q_AUTOMATIC",
    "CANDIDATE_AUTOMATIC",
    "ULTIMATELY_PERIODIC",
    "INCONCLUSIVE",
]

NOT_AUTOMATIC_ANY = "NotAutomaticAny"
NOT_Q_AUTOMATIC = "NotQAutomatic"
CANDIDATE_AUTOMATIC = "CandidateAutomatic"
ULTIMATELY_PERIODIC = "UltimatelyPeriodic"
INCONCLUSIVE = "Inconclusive"

CERTIFIED = "certified"
ADVISORY = "advisory"

# outcome of a single evidence item
NEGATIVE_ANY = "negative-any"  # not q-automatic for every q
NEGATIVE_Q = "negative-q"  # not q-automatic for the listed bases
POSITIVE_Q = "positive-q"  # automatic in the listed bases
PERIODIC = "periodic"
NEUTRAL = "neutral"

MIN_SEQUENCE_PREFIX = 1 << 14


class TheoremTag(str, enum.Enum):
    """The fixed set of results an evidence item may cite."""

    ULTIMATE_PERIODICITY = "ultimate-periodicity"
    UNIFORM_MORPHISM = "uniform-morphism"
    FINITE_KERNEL = "finite-kernel"
    IRRATIONAL_FREQUENCY = "irrational-frequency"
    IRRATIONAL_EIGENVALUE = "irrational-dominant-eigenvalue"
    SYNCHRONIZED_LINEAR = "synchronized-linear"
    LINEAR_COMPLEXITY = "linear-complexity"
    GAP_DICHOTOMY = "gap-dichotomy"
    MINSKY_PAPERT = "minsky-papert"
    MULTIPLICATIVE_DEPENDENCE = "multiplicative-dependence"
    ROOTS_OF_UNITY = "roots-of-unity-eigenvalues"
    RETURN_WORD_EIGENVALUES = "return-word-eigenvalues"
    TRIVIAL_COBOUNDARY = "trivial-coboundary"

    @classmethod
    def parse(cls, value) -> "TheoremTag":
        try:
            return cls(value)
        except ValueError:
            raise UnknownTheoremTag(f"unknown theorem tag {value!r}") from None


@dataclass
class Evidence:
    criterion: str
    tag: TheoremTag
    grade: str
    outcome: str
    payload: dict = field(default_factory=dict)
    bases: list[int] = field(default_factory=list)
    needs_aperiodicity: bool = False
    summary: str = ""

    def to_dict(self) -> dict:
        tag = TheoremTag.parse(self.tag.value if isinstance(self.tag, TheoremTag) else self.tag)
        if self.grade not in (CERTIFIED, ADVISORY):
            raise ValueError(f"bad grade {self.grade!r}")
        return {
            "criterion": self.criterion,
            "tag": tag.value,
            "grade": self.grade,
            "outcome": self.outcome,
            "bases": list(self.bases),
            "needs_aperiodicity": self.needs_aperiodicity,
            "summary": self.summary,
            "payload": self.payload,
        }


@dataclass
class Verdict:
    conclusion: str
    certified: bool
    bases: list[int] = field(default_factory=list)
    evidence: list[Evidence] = field(default_factory=list)
    remarks: list[str] = field(default_factory=list)
    diagnostics: list[dict] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def label(self) -> str:
        if self.conclusion in (NOT_Q_AUTOMATIC, CANDIDATE_AUTOMATIC):
            return f"{self.conclusion}({', '.join(map(str, self.bases))})"
        return self.conclusion

    @property
    def internal_limit_hit(self) -> bool:
        return any(d.get("kind") == "internal-limit" for d in self.diagnostics)

    def items(self, criterion: str | None = None, tag: TheoremTag | None = None) -> list[Evidence]:
        return [e for e in self.evidence
                if (criterion is None or e.criterion == criterion) and (tag is None or e.tag == tag)]

    def to_dict(self) -> dict:
        return {
            "conclusion": self.conclusion,
            "label": self.label,
            "certified": self.certified,
            "grade": CERTIFIED if self.certified else ADVISORY,
            "bases": list(self.bases),
            "evidence": [e.to_dict() for e in self.evidence],
            "remarks": list(self.remarks),
            "diagnostics": list(self.diagnostics),
        }


def _env_threads() -> int:
    raw = os.environ.get("AUTOSEQ_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(4, os.cpu_count() or 1)
    return n


@dataclass(frozen=True)
class AnalysisConfig:
    horizon: int = 1 << 20
    kernel_horizon: int = 1 << 16
    k_max: int = 8
    n_max: int = 64
    bases: tuple[int, ...] = tuple(range(2, 17))
    q_max: int = 64
    j_max: int = 8
    k_bound_factor: int = 16
    period_max: int = 1024
    frequency_horizon: int = 1 << 16
    exhaustive: bool = False
    threads: int = field(default_factory=_env_threads)

    def with_(self, **kw) -> "AnalysisConfig":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        # threads only affects scheduling, never results, so it is not echoed
        return {
            "horizon": self.horizon,
            "kernel_horizon": self.kernel_horizon,
            "k_max": self.k_max,
            "n_max": self.n_max,
            "bases": list(self.bases),
            "q_max": self.q_max,
            "j_max": self.j_max,
            "k_bound_factor": self.k_bound_factor,
            "period_max": self.period_max,
            "frequency_horizon": self.frequency_horizon,
            "exhaustive": self.exhaustive,
        }


# ---------------------------------------------------------------------------
# stage helpers

def periodicity_screen(p: PrefixView, horizon: int, period_max: int = 1024) -> tuple[int, int] | None:
    """Smallest ``(preperiod, period)`` explaining the whole prefix, or None.

    A hit needs the preperiod within the first half and at least eight full
    periods after it.
    """
    a = p.codes(horizon)
    n = len(a)
    if n < 16:
        return None
    tail = a[n - min(n // 2, 1 << 16):]
    for P in range(1, min(period_max, n // 16) + 1):
        if np.any(tail[P:] != tail[:-P]):
            continue
        diff = np.flatnonzero(a[P:] != a[:-P])
        pre = int(diff[-1]) + 1 if len(diff) else 0
        if pre <= n // 2 and n - pre >= 8 * P:
            return pre, P
    return None


def _usable_depth(q: int, horizon: int, k_max: int) -> int:
    k = k_max
    while k > 0 and horizon // q**k < MIN_POINTS:
        k -= 1
    return k


def _kernel_growing(sizes: dict[int, int]) -> bool:
    ks = sorted(sizes)
    if len(ks) < 3:
        return False
    last = sizes[ks[-1]]
    return last > sizes[ks[-2]] or last > sizes[ks[-3]]


def _minimal_base(d: int) -> int:
    """Smallest ``b`` with ``b^s = d``."""
    f = factorint(d)
    g = 0
    for e in f.values():
        g = math.gcd(g, e)
    b = 1
    for pr, e in f.items():
        b *= pr ** (e // g)
    return b


def _prime_power(n: int) -> bool:
    return n >= 2 and len(factorint(n)) == 1


class _Run:
    """Mutable state shared by the pipeline stages."""

    def __init__(self, config: AnalysisConfig):
        self.config = config
        self.evidence: list[Evidence] = []
        self.diagnostics: list[dict] = []
        self.timings: dict[str, float] = {}
        self.aperiodic_certified = False

    def add(self, *args, **kw) -> Evidence:
        e = Evidence(*args, **kw)
        self.evidence.append(e)
        return e

    def stage(self, name, fn, *args, **kw):
        t = perf_counter()
        try:
            return fn(*args, **kw)
        except InternalLimit as exc:
            self.diagnostics.append({"stage": name, "kind": "internal-limit",
                                     "error": type(exc).__name__, "message": str(exc)})
        except AutoseqError as exc:
            self.diagnostics.append({"stage": name, "kind": "input",
                                     "error": type(exc).__name__, "message": str(exc)})
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + round(perf_counter() - t, 6)
        return None


# ---------------------------------------------------------------------------
# prefix-based criteria (step 4 of the pipeline)

def _kernel_stage(run: _Run, p: PrefixView, bases, families=("qk-k", "qk-1")):
    cfg = run.config
    H = min(cfg.kernel_horizon, cfg.horizon)

    def one(q):
        k = _usable_depth(q, H, cfg.k_max)
        if k < 2:
            return q, None, []
        est = kernel_lower_bound(p, q, k, H)
        fams = [targeted_kernel_family(p, q, f, k, H) for f in families]
        return q, est, fams

    p.codes(H)  # materialise once before threads read it
    with ThreadPoolExecutor(max_workers=max(1, cfg.threads)) as ex:
        results = list(ex.map(lambda q: run.stage(f"kernel[{q}]", one, q), bases))
    growing = []
    for res in results:
        if res is None:
            continue
        q, est, fams = res
        if est is None:
            continue
        grow = _kernel_growing(est.size_by_depth)
        fam_all = [f for f in fams if f.undistinguished == 0 and len(f.members) >= 6]
        neg = grow or bool(fam_all)
        if neg:
            growing.append(q)
        payload = {"lower_bound": est.to_dict(max_representatives=32),
                   "families": [f.to_dict(max_representatives=32) for f in fams]}
        summ = f"base {q}: {est.size} pairwise distinct kernel elements witnessed up to depth {est.k_max}"
        if fam_all:
            summ += "; " + ", ".join(f"family {f.family} gives {len(f.members)} distinct members"
                                     for f in fam_all)
        run.add("kernel", TheoremTag.FINITE_KERNEL, ADVISORY, NEGATIVE_Q if neg else NEUTRAL,
                payload, [q], summary=summ)
    return growing


def _complexity_stage(run: _Run, p: PrefixView):
    cfg = run.config
    prof = block_complexity(p, cfg.n_max, cfg.horizon)
    neg = prof.growth in (QUADRATIC, EXPONENTIAL)
    run.add("complexity", TheoremTag.LINEAR_COMPLEXITY, ADVISORY, NEGATIVE_ANY if neg else NEUTRAL,
            prof.to_dict(), needs_aperiodicity=False,
            summary=f"block complexity growth {prof.growth}" +
                    (f" (log-log slope {prof.slope})" if prof.slope is not None else ""))
    return prof


def _gap_stage(run: _Run, p: PrefixView):
    cfg = run.config
    a = p.codes(cfg.horizon)
    counts = np.bincount(a, minlength=len(p.symbols))
    for code, sym in enumerate(p.symbols):
        if counts[code] < MIN_OCCURRENCES:
            continue
        g = run.stage(f"gaps[{sym}]", cobham_gap_test, p, sym, cfg.horizon)
        if g is not None:
            neg = g.kind == FAILS_BOTH
            run.add("gaps", TheoremTag.GAP_DICHOTOMY, ADVISORY, NEGATIVE_ANY if neg else NEUTRAL,
                    {"symbol": sym, **g.to_dict()},
                    summary=f"symbol {sym}: {g.kind} (count/log n {g.log_ratio_top}, "
                            f"min tail gap {g.profile.min_tail_gap})")
        r = run.stage(f"ratio[{sym}]", minsky_papert_test, p, sym, cfg.horizon)
        if r is not None:
            neg = r.kind == RATIO_TO_ONE
            run.add("ratio", TheoremTag.MINSKY_PAPERT, ADVISORY, NEGATIVE_ANY if neg else NEUTRAL,
                    {"symbol": sym, **r.to_dict()},
                    summary=f"symbol {sym}: {r.kind} (max tail ratio {r.limsup_estimate})")


def _run_stage(run: _Run, p: PrefixView):
    cfg = run.config
    prof = run_first_occurrence(p, cfg.n_max, cfg.horizon)
    per_symbol = []
    for sym in p.symbols:
        rp = run_first_occurrence(p, cfg.n_max, cfg.horizon, symbol=sym)
        per_symbol.append(rp)
    neg = [rp for rp in [prof] + per_symbol if rp.superlinear]
    payload = {"all": prof.to_dict(), "by_symbol": [rp.to_dict() for rp in per_symbol]}
    summ = "first run occurrence f(n) superlinear" if neg else "first run occurrence f(n) within linear range"
    if neg:
        summ += " for " + ", ".join("any symbol" if rp.symbol is None else f"symbol {rp.symbol}" for rp in neg)
    run.add("runs", TheoremTag.SYNCHRONIZED_LINEAR, ADVISORY, NEGATIVE_ANY if neg else NEUTRAL,
            payload, summary=summ)


def _periodic_stage(run: _Run, p: PrefixView, grade_note: str):
    cfg = run.config
    hit = periodicity_screen(p, cfg.horizon, cfg.period_max)
    if hit is None:
        return None
    pre, P = hit
    run.add("periodicity", TheoremTag.ULTIMATE_PERIODICITY, ADVISORY, PERIODIC,
            {"preperiod": pre, "period": P, "horizon": cfg.horizon, "note": grade_note},
            summary=f"prefix is ultimately periodic: preperiod {pre}, period {P}")
    return hit


# ---------------------------------------------------------------------------
# aggregation

def _christol(conclusion: str, bases: list[int], n_symbols: int, config: AnalysisConfig) -> list[str]:
    if conclusion == NOT_AUTOMATIC_ANY:
        qs = [q for q in config.bases if _prime_power(q) and q >= n_symbols]
    elif conclusion == NOT_Q_AUTOMATIC:
        qs = [q for q in bases if _prime_power(q) and q >= n_symbols]
    else:
        return []
    if not qs:
        return []
    return [
        "Christol: identifying the output alphabet with elements of the finite field F_q "
        f"for a prime power q in {qs}, the generating series sum a_n X^n would be "
        "transcendental over F_q(X) for each q where non-automaticity holds "
        "(remark only, no field arithmetic performed)"
    ]


def _aggregate(run: _Run, n_symbols: int, allow_certified_negative: bool,
               reduced_base: int | None = None) -> Verdict:
    ev = run.evidence
    cfg = run.config

    def ok_cert(e):
        return e.grade == CERTIFIED and (not e.needs_aperiodicity or run.aperiodic_certified)

    periodic = [e for e in ev if e.outcome == PERIODIC]
    pos = [e for e in ev if e.outcome == POSITIVE_Q]
    pos_cert = [e for e in pos if e.grade == CERTIFIED]
    neg_any = [e for e in ev if e.outcome == NEGATIVE_ANY]
    neg_q = [e for e in ev if e.outcome == NEGATIVE_Q]
    remarks = []
    if periodic and not pos_cert:
        conclusion, certified, bases = ULTIMATELY_PERIODIC, False, []
    elif pos_cert:
        bases = sorted({q for e in pos_cert for q in e.bases})
        conclusion, certified = CANDIDATE_AUTOMATIC, True
        if periodic:
            conclusion, certified, bases = ULTIMATELY_PERIODIC, True, bases
        conflict = [e for e in neg_any + neg_q if ok_cert(e)
                    and (e.outcome == NEGATIVE_ANY or set(e.bases) & set(bases))]
        if conflict:
            run.diagnostics.append({"stage": "aggregate", "kind": "conflict",
                                    "error": "ConflictingEvidence",
                                    "message": "certified evidence on both sides; reporting Inconclusive"})
            conclusion, certified, bases = INCONCLUSIVE, False, []
    elif neg_any or (reduced_base is not None and any(reduced_base in e.bases for e in neg_q)):
        conclusion, bases = NOT_AUTOMATIC_ANY, []
        support = neg_any + [e for e in neg_q if reduced_base in e.bases]
        certified = allow_certified_negative and any(ok_cert(e) for e in support)
        if not certified:
            why = "advisory stack"
            if reduced_base is not None:
                why += f" on base {reduced_base} + multiplicative-dependence reduction"
            if any(e.grade == CERTIFIED for e in support):
                why += "; certified items are conditional on aperiodicity, which is not certified"
            remarks.append(f"NotAutomaticAny graded advisory: {why}")
    elif neg_q:
        bases = sorted({q for e in neg_q for q in e.bases})
        certified = allow_certified_negative and all(
            any(ok_cert(e) and q in e.bases for e in neg_q) for q in bases)
        conclusion = NOT_Q_AUTOMATIC
    elif reduced_base is not None:
        conclusion, certified, bases = CANDIDATE_AUTOMATIC, False, [reduced_base]
        remarks.append(f"no negative evidence in base {reduced_base}; automaticity is not certified")
    else:
        conclusion, certified, bases = INCONCLUSIVE, False, []
    remarks += _christol(conclusion, bases, n_symbols, cfg)
    return Verdict(conclusion, certified, bases, list(ev), remarks, run.diagnostics, run.timings)


# ---------------------------------------------------------------------------
# morphism pipeline

def _rho_stage(run: _Run, m: Morphism, u: Morphism):
    """Dominant eigenvalue classification; returns (rho, primitive, reduced base or None)."""
    cfg = run.config
    M = transition_matrix(u)
    primitive = is_primitive(M)
    chi = char_poly(M)
    rho = dominant_eigenvalue(M)
    factors = run.stage("factor", factor, chi) or []
    payload = {
        "matrix": M.to_list(),
        "det": M.det(),
        "char_poly": str(chi),
        "factors": [{"factor": str(f), "multiplicity": e} for f, e in factors],
        "rho": rho.to_dict(),
        "primitive": primitive,
    }
    k_bound = max(1, rho.degree) * cfg.k_bound_factor
    md = mult_dependent(rho, 2, k_bound)
    payload["power_search"] = {"k_bound": k_bound, "kind": md.kind, "proven": md.proven,
                               "integer_power": list(md.integer_power) if md.integer_power else None,
                               "note": md.note}
    uncoded_or_injective = len(set(m.code(a) for a in u.alphabet.symbols)) == len(u.alphabet)
    reduced = None
    if primitive and not rho.is_rational and not u.is_uniform() and uncoded_or_injective:
        run.add("dominant-eigenvalue", TheoremTag.IRRATIONAL_EIGENVALUE, CERTIFIED, NEGATIVE_ANY, payload,
                summary=f"primitive non-uniform morphism with irrational dominant eigenvalue "
                        f"(root of {rho.minimal_polynomial})")
    else:
        run.add("dominant-eigenvalue", TheoremTag.IRRATIONAL_EIGENVALUE, CERTIFIED, NEUTRAL, payload,
                summary=f"dominant eigenvalue {rho} ({rho.kind})")
    if md.kind == NEVER_INTEGER_POWER_UP_TO:
        grade = CERTIFIED if md.proven else ADVISORY
        run.add("multiplicative-dependence", TheoremTag.MULTIPLICATIVE_DEPENDENCE, grade, NEGATIVE_ANY,
                payload["power_search"], needs_aperiodicity=True,
                summary=("no power of rho is an integer" if md.proven
                         else f"no power rho^k with k <= {k_bound} is an integer") + f": {md.note}")
    elif md.integer_power is not None:
        k, d = md.integer_power
        if d >= 2:
            reduced = _minimal_base(d)
            run.add("multiplicative-dependence", TheoremTag.MULTIPLICATIVE_DEPENDENCE, CERTIFIED, NEUTRAL,
                    {**payload["power_search"], "d": d, "reduced_base": reduced},
                    summary=f"rho^{k} = {d}: automatic at all only if {reduced}-automatic "
                            "(or ultimately periodic)")
    return rho, primitive, reduced, M


def _frequency_stage(run: _Run, p: PrefixView, m: Morphism, primitive: bool):
    cfg = run.config
    if not primitive:
        return None
    rep = frequencies(p, m, 1, min(cfg.frequency_horizon, cfg.horizon))
    if rep.irrational_keys:
        run.aperiodic_certified = True
        run.add("frequencies", TheoremTag.IRRATIONAL_FREQUENCY, CERTIFIED, NEGATIVE_ANY, rep.to_dict(),
                summary=f"letters {rep.irrational_keys} have irrational frequency in Q(rho)")
    else:
        run.add("frequencies", TheoremTag.IRRATIONAL_FREQUENCY, CERTIFIED, NEUTRAL, rep.to_dict(),
                summary="all letter frequencies are rational" if rep.exact else "no exact frequencies")
    return rep


def _dynamics_stage(run: _Run, u: Morphism, M, primitive: bool, bases):
    cfg = run.config
    if not primitive:
        return
    if M.det() == 0:
        hp = run.stage("host", host_profile, u)
        if hp is None:
            return
        not_growing = [q for q in bases if q in hp.grows and not hp.grows[q]]
        growing = [q for q in bases if hp.grows.get(q)]
        run.add("host", TheoremTag.RETURN_WORD_EIGENVALUES, ADVISORY,
                NEGATIVE_Q if not_growing else NEUTRAL, hp.to_dict(), not_growing, needs_aperiodicity=True,
                summary=f"return-word length divisibility grows for q in {growing}, "
                        f"not for {not_growing}")
        return
    rep = run.stage("obstruction", eigenvalue_obstruction, u, cfg.q_max, cfg.j_max)
    if rep is None:
        return
    obstructed = [q for q in bases if q in rep.per_q and rep.obstructed(q)]
    grade = CERTIFIED if rep.height == 1 else ADVISORY
    run.add("obstruction", TheoremTag.TRIVIAL_COBOUNDARY, grade, NEGATIVE_Q if obstructed else NEUTRAL,
            rep.to_dict(), obstructed, needs_aperiodicity=True,
            summary=f"det {rep.det}: {len(rep.obstructed_qs())} of {len(rep.per_q)} bases obstructed"
                    + (f"; tested bases obstructed: {obstructed}" if obstructed else ""))


def analyze(m: Morphism, config: AnalysisConfig | None = None) -> Verdict:
    cfg = config or AnalysisConfig()
    run = _Run(cfg)
    t0 = perf_counter()
    u = m.uncoded().restrict_to_reachable()
    m = m.restrict_to_reachable()
    p = expand(m, cfg.horizon)

    # (1) periodicity screen, and the uniform construction
    hit = run.stage("periodicity", _periodic_stage, run, p, "prefix screen only")
    q_uniform = m.uniform_length if m.is_uniform() else None
    if q_uniform is not None and q_uniform >= 2:
        def build():
            d = minimize(dfao_from_uniform(m))
            n = min(1 << 14, cfg.horizon)
            agree = [d.outputs[s] for s in d.states_upto(n)] == p.word(n)
            return d, uniform_kernel_size(d), agree, n
        res = run.stage("dfao", build)
        if res is not None:
            d, ks, agree, n = res
            run.add("uniform-construction", TheoremTag.UNIFORM_MORPHISM, CERTIFIED if agree else ADVISORY,
                    POSITIVE_Q, {"dfao": d.to_dict(), "states": len(d.transitions), "kernel_size": ks,
                                 "checked_prefix": n, "agrees": agree}, [q_uniform],
                    summary=f"{q_uniform}-uniform morphism: minimal DFAO with {len(d.transitions)} states, "
                            f"{q_uniform}-kernel size {ks}")
    if hit is not None and not cfg.exhaustive:
        return _finish(run, m, t0, True)

    # (2) rho classification and (3) reduction
    res = run.stage("rho", _rho_stage, run, m, u)
    rho, primitive, reduced, M = res if res is not None else (None, False, None, None)
    run.stage("frequencies", _frequency_stage, run, p, m, primitive)

    certified_done = any(e.grade == CERTIFIED and e.outcome in (NEGATIVE_ANY, POSITIVE_Q)
                         and (not e.needs_aperiodicity or run.aperiodic_certified) for e in run.evidence)
    if q_uniform is not None and q_uniform >= 2:
        bases = [q_uniform]
    elif reduced is not None:
        bases = [reduced]
    else:
        bases = list(cfg.bases)
    if M is not None:
        run.stage("dynamics", _dynamics_stage, run, u, M, primitive, bases)

    # (4) prefix criteria on the remaining bases
    if not certified_done or cfg.exhaustive:
        run.stage("kernel", _kernel_stage, run, p, bases)
        run.stage("complexity", _complexity_stage, run, p)
        run.stage("gaps", _gap_stage, run, p)
        run.stage("runs", _run_stage, run, p)
    return _finish(run, m, t0, True, reduced)


def _finish(run: _Run, m_or_p, t0: float, allow_certified: bool, reduced: int | None = None) -> Verdict:
    if isinstance(m_or_p, Morphism):
        n_symbols = len(m_or_p.output_symbols)
    else:
        n_symbols = len(m_or_p.symbols)
    v = _aggregate(run, n_symbols, allow_certified, reduced)
    v.timings["total"] = round(perf_counter() - t0, 6)
    return v


# ---------------------------------------------------------------------------
# sequence pipeline

def analyze_sequence(p: PrefixView, config: AnalysisConfig | None = None) -> Verdict:
    """Prefix-only criteria; the verdict is never certified."""
    cfg = config or AnalysisConfig()
    avail = p.available()
    if avail is not None:
        n = avail
    else:
        n = cfg.horizon
        p.codes(n)
    if n < MIN_SEQUENCE_PREFIX:
        raise PrefixTooShort(f"prefix has {n} terms; at least {MIN_SEQUENCE_PREFIX} are needed")
    cfg = cfg.with_(horizon=min(cfg.horizon, n), kernel_horizon=min(cfg.kernel_horizon, n))
    run = _Run(cfg)
    t0 = perf_counter()
    hit = run.stage("periodicity", _periodic_stage, run, p, "prefix screen only")
    if hit is not None and not cfg.exhaustive:
        return _finish(run, p, t0, False)
    run.stage("frequencies", lambda: run.add(
        "frequencies", TheoremTag.IRRATIONAL_FREQUENCY, ADVISORY, NEUTRAL,
        frequencies(p, None, 1, min(cfg.frequency_horizon, cfg.horizon)).to_dict(),
        summary="empirical letter frequencies (irrationality cannot be read off a prefix)"))
    run.stage("kernel", _kernel_stage, run, p, list(cfg.bases))
    run.stage("complexity", _complexity_stage, run, p)
    run.stage("gaps", _gap_stage, run, p)
    run.stage("runs", _run_stage, run, p)
    return _finish(run, p, t0, False)
