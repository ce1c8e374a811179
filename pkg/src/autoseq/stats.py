"""Factor complexity, appearance, block morphisms and frequencies."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (
    IrrationalCertificate,
    NumberField,
    RationalVector,
    dominant_eigenvalue,
    perron_vector,
)
from .core import Morphism, PrefixView, expand, is_primitive, transition_matrix
from .errors import BlockAlphabetUnstable, HorizonTooSmall, NotPrimitive, ParameterInvalid

__all__ = [
    "ComplexityProfile",
    "FrequencyReport",
    "block_complexity",
    "classify_growth",
    "block_morphism",
    "block_words",
    "frequencies",
]

BOUNDED = "Bounded"
LINEAR = "Linear"
QUADRATIC = "Quadratic-or-more"
EXPONENTIAL = "ExponentialSuspected"
INDETERMINATE = "Indeterminate"


@dataclass
class ComplexityProfile:
    n_max: int
    horizon: int
    complexity: list[int]  # complexity[n-1] = p(n)
    appearance: list[int]  # appearance[n-1] = A(n)
    growth: str
    slope: float | None
    fit_range: tuple[int, int] | None
    min_ratio_top_quarter: float | None
    saturated_from: int | None
    lower_bound: bool = True

    def p(self, n: int) -> int:
        return self.complexity[n - 1]

    def A(self, n: int) -> int:
        return self.appearance[n - 1]

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "horizon": self.horizon,
            "complexity": list(self.complexity),
            "appearance": list(self.appearance),
            "appearance_ratio": [round(a / n, 6) for n, a in enumerate(self.appearance, 1)],
            "growth": self.growth,
            "slope": self.slope,
            "fit_range": list(self.fit_range) if self.fit_range else None,
            "min_ratio_top_quarter": self.min_ratio_top_quarter,
            "unreliable_from": self.saturated_from,
            "lower_bound": self.lower_bound,
            "grade": "advisory",
        }


def _renumber(keys: np.ndarray, bound: int) -> tuple[np.ndarray, int]:
    if bound <= max(4 * len(keys), 1 << 20):
        present = np.zeros(bound, dtype=bool)
        present[keys] = True
        remap = np.cumsum(present) - 1
        return remap[keys], int(remap[-1] + 1) if bound else 0
    uniq, inv = np.unique(keys, return_inverse=True)
    return inv.astype(np.int64), len(uniq)


def block_complexity(p: PrefixView, n_max: int = 64, horizon: int = 1 << 20) -> ComplexityProfile:
    """Exact count of distinct length-``n`` blocks among the first ``horizon`` symbols.

    Blocks are identified by iterated refinement: the id of the block at ``i``
    of length ``n`` is determined by the id of its length ``n-1`` prefix and
    the symbol at ``i + n - 1``.
    """
    if n_max < 1:
        raise ParameterInvalid("n_max must be >= 1")
    if horizon < 4 * n_max:
        raise HorizonTooSmall(f"horizon {horizon} < 4 * n_max = {4 * n_max}")
    a = p.codes(horizon).astype(np.int64)
    s = int(a.max()) + 1 if len(a) else 1
    ids, count = _renumber(a, s)
    comp, app = [], []
    for n in range(1, n_max + 1):
        if n > 1:
            keys = ids[: horizon - n + 1] * s + a[n - 1:horizon]
            ids, count = _renumber(keys, count * s)
        first = np.full(count, horizon, dtype=np.int64)
        np.minimum.at(first, ids, np.arange(len(ids), dtype=np.int64))
        comp.append(count)
        app.append(int(first.max()) + n)
    growth, slope, rng, ratio, sat = classify_growth(comp, horizon, app)
    return ComplexityProfile(n_max, horizon, comp, app, growth, slope, rng, ratio, sat)


def classify_growth(comp: list[int], horizon: int, appearance: list[int] | None = None):
    """Heuristic growth class of a complexity table (advisory).

    Only block lengths the prefix can speak for enter the fit: ``n`` is
    usable while ``A(n) <= horizon / 4`` and ``p(n) <= (horizon - n + 1) / 8``.
    Past that point blocks that exist may simply not have appeared yet.
    """
    n_max = len(comp)
    ns = np.arange(1, n_max + 1)
    pv = np.array(comp, dtype=float)
    usable = []
    for n in range(1, n_max + 1):
        ok = comp[n - 1] <= (horizon - n + 1) / 8
        if appearance is not None:
            ok = ok and appearance[n - 1] <= horizon / 4
        if not ok:
            break
        usable.append(n)
    sat = None if len(usable) == n_max else len(usable) + 1
    top = usable[-1] if usable else 0
    if top >= 2 and comp[top - 1] == comp[(top - 1) // 2]:
        return BOUNDED, 0.0, ((top + 1) // 2, top), 1.0, sat
    q_lo = max(2, top - max(top // 4, 1) + 1)
    ratios = [comp[n - 1] / comp[n - 2] for n in range(q_lo, top + 1)] if top >= 2 else []
    min_ratio = round(min(ratios), 6) if ratios else None
    if top < 4:
        # the prefix runs out almost at once: growth is at least this fast
        return (EXPONENTIAL if sat is not None else INDETERMINATE), None, None, min_ratio, sat
    lo = max(1, top // 2)
    sel = (ns >= lo) & (ns <= top)
    slope = float(np.polyfit(np.log(ns[sel]), np.log(pv[sel]), 1)[0])
    slope = round(slope, 6)
    if slope > 2.6 and min_ratio is not None and min_ratio >= 1.1:
        # a polynomial of any fixed degree has ratios tending to 1; these do not
        cls = EXPONENTIAL
    elif slope < 1.2:
        cls = LINEAR
    elif slope >= 1.6:
        cls = QUADRATIC
    else:
        cls = INDETERMINATE
    return cls, slope, (lo, top), min_ratio, sat


# ---------------------------------------------------------------------------
# block morphisms

def _block_name(block, single: bool) -> str:
    return "".join(block) if single else "|".join(block)


def block_morphism(m: Morphism, ell: int) -> Morphism:
    """Morphism on length-``ell`` factors generating the sequence of overlapping blocks.

    The coding sends a block to the (coded) first letter, so the coded fixed
    point of the result equals the coded fixed point of ``m``.
    """
    if ell < 1:
        raise ParameterInvalid("ell must be >= 1")
    if not is_primitive(transition_matrix(m)):
        raise NotPrimitive(f"{m} is not primitive")
    if ell == 1:
        return m
    if m.is_erasing():
        raise BlockAlphabetUnstable("block construction needs a non-erasing morphism")
    d = len(m.alphabet)
    H = 64 * ell * d * d
    un = m.uncoded()
    word = expand(un, H + ell).word(H + ell)
    blocks: dict[tuple, int] = {}
    for i in range(H):
        b = tuple(word[i:i + ell])
        if b not in blocks:
            blocks[b] = i
    late = [b for b, i in blocks.items() if i >= H - H // 4]
    if late:
        raise BlockAlphabetUnstable(
            f"{len(late)} new {ell}-blocks appear in the last quarter of {H} symbols"
        )
    order = sorted(blocks, key=blocks.get)
    single = all(len(a) == 1 for a in m.alphabet.symbols)
    names = {b: _block_name(b, single) for b in order}
    rules = {}
    for b in order:
        img = un.apply(b)
        k = len(un.image(b[0]))
        out = []
        for j in range(k):
            nb = tuple(img[j:j + ell])
            if nb not in blocks:
                raise BlockAlphabetUnstable(f"image block {nb} was not seen in the scanned prefix")
            out.append(names[nb])
        rules[names[b]] = out
    coding = {names[b]: m.code(b[0]) for b in order}
    start = names[tuple(word[:ell])]
    bm = Morphism.from_dict(rules, start=start, coding=coding)
    object.__setattr__(bm, "_blocks", tuple(order))
    return bm


def block_words(bm: Morphism) -> tuple[tuple[str, ...], ...]:
    """Underlying letter blocks of a morphism built by :func:`block_morphism`."""
    blocks = getattr(bm, "_blocks", None)
    if blocks is None:
        return tuple((a,) for a in bm.alphabet.symbols)
    return blocks


# ---------------------------------------------------------------------------
# frequencies

@dataclass
class FrequencyReport:
    ell: int
    horizon: int
    keys: list[str]
    counts: list[int]
    empirical: list[float]
    exact: list[str] | None = None
    certificate: dict | None = None
    irrational_keys: list[str] = field(default_factory=list)
    windows: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def frequency(self, key: str) -> float:
        return self.empirical[self.keys.index(key)]

    def exact_fraction(self, key: str) -> Fraction | None:
        if self.exact is None or key not in self.keys:
            return None
        v = self.exact[self.keys.index(key)]
        return None if v is None else Fraction(v)

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "horizon": self.horizon,
            "keys": list(self.keys),
            "counts": list(self.counts),
            "empirical": list(self.empirical),
            "exact": self.exact,
            "certificate": self.certificate,
            "irrational_keys": list(self.irrational_keys),
            "windows": self.windows,
            "notes": list(self.notes),
        }


def _key_name(block, single: bool) -> str:
    return "".join(block) if single else " ".join(block)


def _empirical(p: PrefixView, ell: int, horizon: int):
    a = p.codes(horizon).astype(np.int64)
    s = len(p.symbols)
    if s ** ell >= 1 << 62:
        raise ParameterInvalid("block length too large for the alphabet size")
    n = horizon - ell + 1
    ids = np.zeros(n, dtype=np.int64)
    for j in range(ell):
        ids = ids * s + a[j:j + n]
    uniq, inv, counts = np.unique(ids, return_inverse=True, return_counts=True)
    blocks = []
    for u in uniq.tolist():
        digits = []
        for _ in range(ell):
            u, r = divmod(u, s)
            digits.append(p.symbols[r])
        blocks.append(tuple(reversed(digits)))
    return blocks, counts, inv, n


def _windows(inv: np.ndarray, nkeys: int, keys: list[str], n: int) -> dict:
    out = {}
    i = 4
    edges = []
    while (1 << (i + 1)) <= n:
        edges.append((1 << i, 1 << (i + 1)))
        i += 1
    if not edges:
        return out
    dens = np.zeros((len(edges), nkeys))
    for w, (lo, hi) in enumerate(edges):
        dens[w] = np.bincount(inv[lo:hi], minlength=nkeys) / (hi - lo)
    tail = dens[len(edges) // 2:]
    for k, key in enumerate(keys):
        out[key] = {
            "window_starts": [lo for lo, _ in edges],
            "densities": [round(float(x), 9) for x in dens[:, k]],
            "limsup_estimate": round(float(tail[:, k].max()), 9),
            "liminf_estimate": round(float(tail[:, k].min()), 9),
        }
    return out


def frequencies(p: PrefixView, m: Morphism | None = None, ell: int = 1,
                horizon: int | None = None) -> FrequencyReport:
    """Empirical block frequencies, plus exact values or an irrationality certificate from ``m``."""
    if horizon is None:
        horizon = len(p) if p.finite or len(p) else 1 << 16
        horizon = max(horizon, ell)
    blocks, counts, inv, n = _empirical(p, ell, horizon)
    single = all(len(x) == 1 for x in p.symbols)
    keys = [_key_name(b, single) for b in blocks]
    emp = [float(c) / n for c in counts]
    rep = FrequencyReport(ell, horizon, keys, [int(c) for c in counts], emp)
    rep.windows = _windows(inv, len(keys), keys, n)
    if m is None:
        return rep
    M = transition_matrix(m)
    if not is_primitive(M):
        rep.notes.append("morphism is not primitive: exact frequencies not attempted")
        return rep
    bm = block_morphism(m, ell)
    letter_blocks = block_words(bm)
    coded = [_key_name(tuple(m.code(x) for x in b), single) for b in letter_blocks]
    BM = transition_matrix(bm)
    rho = dominant_eigenvalue(BM)
    vec = perron_vector(BM, rho)
    all_keys = sorted(set(coded) | set(keys), key=lambda k: (k not in keys, keys.index(k) if k in keys else 0, k))
    if isinstance(vec, RationalVector):
        agg: dict[str, Fraction] = {}
        for key, v in zip(coded, vec):
            agg[key] = agg.get(key, Fraction(0)) + v
        _merge_keys(rep, all_keys)
        rep.exact = [str(agg.get(k, Fraction(0))) for k in rep.keys]
        rep.notes.append("exact frequencies from the Perron eigenvector (integer dominant eigenvalue)")
        return rep
    K = NumberField(vec.minimal_polynomial)
    aggf: dict[str, tuple] = {}
    for key, v in zip(coded, vec.field_vector):
        aggf[key] = K.add(aggf[key], v) if key in aggf else v
    _merge_keys(rep, all_keys)
    irr = [k for k in rep.keys if k in aggf and not K.is_rational(aggf[k])]
    if irr:
        cert = IrrationalCertificate(vec.minimal_polynomial, tuple(aggf.get(k, K.zero) for k in rep.keys),
                                     tuple(rep.keys.index(k) for k in irr),
                                     tuple(K.approx(aggf.get(k, K.zero), rho.approx()) for k in rep.keys))
        rep.certificate = cert.to_dict()
        rep.certificate["keys"] = list(rep.keys)
        rep.irrational_keys = irr
        rep.notes.append("frequencies lie in Q(rho); irrational entries are certified")
    else:
        rep.exact = [str(aggf[k][0]) if k in aggf else "0" for k in rep.keys]
        rep.notes.append("irrational eigenvalue but every coded frequency is rational")
    return rep


def _merge_keys(rep: FrequencyReport, all_keys: list[str]):
    # blocks of the exact model that the prefix did not show get empirical 0
    for k in all_keys:
        if k not in rep.keys:
            rep.keys.append(k)
            rep.counts.append(0)
            rep.empirical.append(0.0)
