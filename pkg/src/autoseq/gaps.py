"""Occurrence positions: gap dichotomy, ratio test and first run occurrences.

All verdicts here are finite-horizon estimates of asymptotic statements and
are graded advisory by the strategy layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PrefixView
from .errors import FrequencyNotSmall, TooFewOccurrences

__all__ = [
    "OccurrenceProfile",
    "GapVerdict",
    "RatioVerdict",
    "RunProfile",
    "occurrence_profile",
    "cobham_gap_test",
    "minsky_papert_test",
    "run_first_occurrence",
]

MIN_OCCURRENCES = 16
FREQUENCY_PROXY = 0.01
DENSITY_DECAY = 0.75

FAILS_BOTH = "FailsBoth"
SATISFIES_ONE = "SatisfiesOne"
SATISFIES_BOTH = "SatisfiesBoth"
RATIO_TO_ONE = "RatioTendsToOne"
RATIO_AWAY = "RatioBoundedAway"


@dataclass
class OccurrenceProfile:
    symbol: str
    horizon: int
    positions: np.ndarray
    count_samples: dict[int, int]
    min_tail_gap: int | None
    min_last_quarter_gap: int | None
    max_tail_ratio: float | None

    @property
    def occurrences(self) -> int:
        return len(self.positions)

    def to_dict(self, max_positions: int = 64) -> dict:
        return {
            "symbol": self.symbol,
            "horizon": self.horizon,
            "occurrences": self.occurrences,
            "first_positions": self.positions[:max_positions].tolist(),
            "count_samples": {str(k): v for k, v in self.count_samples.items()},
            "min_tail_gap": self.min_tail_gap,
            "min_last_quarter_gap": self.min_last_quarter_gap,
            "max_tail_ratio": self.max_tail_ratio,
        }


def occurrence_profile(p: PrefixView, d: str, horizon: int = 1 << 20) -> OccurrenceProfile:
    a = p.codes(horizon)
    code = p.symbol_code(d)
    pos = np.flatnonzero(a == code)
    samples = {}
    i = 1
    while (1 << i) <= horizon:
        samples[1 << i] = int(np.searchsorted(pos, 1 << i))
        i += 1
    min_tail = min_lq = max_ratio = None
    if len(pos) >= 4:
        tail = pos[len(pos) // 2:]
        gaps = np.diff(tail)
        min_tail = int(gaps.min())
        lq = pos[(3 * len(pos)) // 4:]
        if len(lq) >= 2:
            min_lq = int(np.diff(lq).min())
        t = tail[tail > 0]
        if len(t) >= 2:
            max_ratio = float((t[1:] / t[:-1]).max())
    return OccurrenceProfile(d, horizon, pos, samples, min_tail, min_lq, max_ratio)


@dataclass
class GapVerdict:
    kind: str
    which: list[str]
    log_ratio_top: float
    log_ratio_mid: float
    profile: OccurrenceProfile

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "which": list(self.which),
            "log_ratio_top": self.log_ratio_top,
            "log_ratio_mid": self.log_ratio_mid,
            "profile": self.profile.to_dict(),
            "grade": "advisory",
        }


def cobham_gap_test(p: PrefixView, d: str, horizon: int = 1 << 20) -> GapVerdict:
    """Check both alternatives of the gap dichotomy on a prefix.

    ``log-count``: ``count(n) / ln n`` at the top dyadic sample is at most
    twice its value at the middle sample.  ``gap``: the smallest gap in the
    last half of occurrences recurs in the last quarter.
    """
    prof = occurrence_profile(p, d, horizon)
    if prof.occurrences < MIN_OCCURRENCES:
        raise TooFewOccurrences(
            f"{d!r} occurs {prof.occurrences} times in {horizon} symbols (need {MIN_OCCURRENCES})"
        )
    keys = sorted(prof.count_samples)
    top = keys[-1]
    mid = keys[(len(keys) - 1) // 2]
    r_top = prof.count_samples[top] / math.log(top)
    r_mid = prof.count_samples[mid] / math.log(mid)
    which = []
    if r_top <= 2 * max(r_mid, 1e-12):
        which.append("log-count")
    if prof.min_last_quarter_gap is not None and prof.min_last_quarter_gap == prof.min_tail_gap:
        which.append("gap")
    kind = {0: FAILS_BOTH, 1: SATISFIES_ONE, 2: SATISFIES_BOTH}[len(which)]
    return GapVerdict(kind, which, round(r_top, 6), round(r_mid, 6), prof)


@dataclass
class RatioVerdict:
    kind: str
    limsup_estimate: float
    epsilon: float
    frequency: float
    density_decay: float | None
    profile: OccurrenceProfile

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "limsup_estimate": self.limsup_estimate,
            "epsilon": self.epsilon,
            "frequency": self.frequency,
            "density_decay": self.density_decay,
            "profile": self.profile.to_dict(),
            "grade": "advisory",
        }


def _density_decay(prof: OccurrenceProfile) -> float | None:
    """Density in the last dyadic window over density at the middle scale."""
    keys = sorted(prof.count_samples)
    if len(keys) < 4:
        return None
    top = keys[-1]
    mid = keys[(len(keys) - 1) // 2]
    c = prof.count_samples
    last = (c[top] - c[top // 2]) / (top - top // 2)
    middle = (c[mid] - c[mid // 2]) / (mid - mid // 2)
    if middle == 0:
        return None
    return last / middle


def minsky_papert_test(p: PrefixView, d: str, horizon: int = 1 << 20,
                       epsilon: float = 0.01) -> RatioVerdict:
    """Estimate ``limsup α_{j+1}/α_j`` over the last half of occurrences.

    Applies when ``d`` looks like it has zero frequency: overall frequency
    below 1%, or the density in the last dyadic window has dropped below
    three quarters of the density at the middle scale.
    """
    prof = occurrence_profile(p, d, horizon)
    if prof.occurrences < MIN_OCCURRENCES:
        raise TooFewOccurrences(
            f"{d!r} occurs {prof.occurrences} times in {horizon} symbols (need {MIN_OCCURRENCES})"
        )
    freq = prof.occurrences / horizon
    decay = _density_decay(prof)
    if not (freq < FREQUENCY_PROXY or (decay is not None and decay < DENSITY_DECAY)):
        raise FrequencyNotSmall(
            f"frequency of {d!r} is {freq:.4f} and its density is not decaying; ratio test inapplicable"
        )
    lim = prof.max_tail_ratio if prof.max_tail_ratio is not None else math.inf
    kind = RATIO_TO_ONE if lim < 1 + epsilon else RATIO_AWAY
    return RatioVerdict(kind, round(lim, 9), epsilon, round(freq, 9),
                        None if decay is None else round(decay, 6), prof)


@dataclass
class RunProfile:
    horizon: int
    n_max: int
    symbol: str | None
    first: list[int | None]  # first[n-1] = f(n)
    max_ratio: float | None
    superlinear: bool

    def f(self, n: int) -> int | None:
        return self.first[n - 1]

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "n_max": self.n_max,
            "symbol": self.symbol,
            "first": list(self.first),
            "max_ratio": self.max_ratio,
            "superlinear": self.superlinear,
            "grade": "advisory",
        }


def _first_runs(a: np.ndarray, n_max: int, code: int | None) -> list[int | None]:
    if len(a) == 0:
        return [None] * n_max
    change = np.flatnonzero(a[1:] != a[:-1]) + 1
    starts = np.concatenate(([0], change))
    lengths = np.diff(np.concatenate((starts, [len(a)])))
    if code is not None:
        keep = a[starts] == code
        starts, lengths = starts[keep], lengths[keep]
    if len(starts) == 0:
        return [None] * n_max
    best = np.maximum.accumulate(lengths)
    out: list[int | None] = []
    for n in range(1, n_max + 1):
        i = int(np.searchsorted(best, n))
        out.append(int(starts[i]) if i < len(starts) else None)
    return out


def run_first_occurrence(p: PrefixView, n_max: int = 64, horizon: int = 1 << 20,
                         symbol: str | None = None) -> RunProfile:
    """``f(n)``: first start of a run of at least ``n`` equal symbols.

    With ``symbol`` set only runs of that symbol count.
    """
    a = p.codes(horizon)
    code = None if symbol is None else p.symbol_code(symbol)
    first = _first_runs(a, n_max, code)
    defined = [(n, v) for n, v in enumerate(first, 1) if v is not None]
    ratios = [v / n for n, v in defined]
    max_ratio = round(max(ratios), 6) if ratios else None
    superlinear = False
    if len(defined) >= 4:
        last_n, last_v = defined[-1]
        mid_n, mid_v = defined[(len(defined) - 1) // 2]
        last_r, mid_r = last_v / last_n, mid_v / mid_n
        superlinear = last_r > 64 and last_r > 2 * mid_r
    return RunProfile(horizon, n_max, symbol, first, max_ratio, superlinear)
