"""Dynamical eigenvalue obstructions: Host-style length divisibility and residue orbits.

If a primitive aperiodic fixed point of height 1 is q-automatic, every
``q^j``-th root of unity is a dynamical eigenvalue.  For ``t = a/q^j`` with
``gcd(a, q) = 1`` that needs ``t·(1,…,1)·Mⁿ`` to become integral, i.e. the
length vector ``lₙ = (|φⁿ(b)|)_b`` must eventually vanish modulo ``q^j``.
Both failure modes are decided exactly here: a prime of ``q`` not dividing
``det M``, or a residue orbit of ``lₙ mod q^j`` that cycles without reaching 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import (
    EigenvalueConstraint,
    coboundary_constraints,
    length_residue_orbit,
    prime_factors,
    valuation,
)
from .core import (
    IntMatrix,
    Morphism,
    ReturnWordStats,
    expand,
    height,
    is_primitive,
    return_words,
    transition_matrix,
)
from .errors import (
    HeightNotOne,
    HypothesisViolated,
    InsufficientOccurrences,
    SingularMatrix,
)

__all__ = [
    "HostProfile",
    "QStatus",
    "ObstructionReport",
    "host_profile",
    "eigenvalue_obstruction",
    "length_table",
]

OBSTRUCTED = "Obstructed"
NOT_OBSTRUCTED = "NotObstructed"
LITERAL_CHECK_DEPTH = 4
LITERAL_CHECK_LIMIT = 1 << 20


def length_table(M: IntMatrix, L: int) -> list[tuple[int, ...]]:
    """``[|φ^ℓ(a_j)|]_j`` for ``ℓ = 0..L`` from column sums of ``M^ℓ``."""
    rows = [tuple(1 for _ in range(M.dim))]
    for _ in range(L):
        rows.append(M.row_vector_times(rows[-1]))
    return rows


def _literal_lengths(m: Morphism, depth: int) -> list[tuple[int, ...]] | None:
    u = m.uncoded()
    out = [tuple(1 for _ in u.alphabet.symbols)]
    words = [(a,) for a in u.alphabet.symbols]
    for _ in range(depth):
        words = [u.apply(w) for w in words]
        if sum(len(w) for w in words) > LITERAL_CHECK_LIMIT:
            return None
        out.append(tuple(len(w) for w in words))
    return out


@dataclass
class HostProfile:
    letters: tuple[str, ...]
    L: int
    lengths: list[tuple[int, ...]]
    literal_check: bool | None
    return_words: list[str]
    return_lengths: list[list[int]]  # return_lengths[l][w] = |φ^l(w)|
    valuations: dict[int, list[int]]
    grows: dict[int, bool]
    aperiodic_assumed: bool = True

    def to_dict(self) -> dict:
        return {
            "letters": list(self.letters),
            "L": self.L,
            "lengths": [[str(x) for x in row] for row in self.lengths],
            "literal_check": self.literal_check,
            "return_words": list(self.return_words),
            "return_lengths": [[str(x) for x in row] for row in self.return_lengths],
            "valuations": {str(q): v for q, v in sorted(self.valuations.items())},
            "grows": {str(q): g for q, g in sorted(self.grows.items())},
            "aperiodic_assumed": self.aperiodic_assumed,
        }


def host_profile(m: Morphism, L: int | None = None, return_sample: ReturnWordStats | None = None,
                 q_candidates=range(2, 17), horizon: int = 1 << 14, samples: int = 16) -> HostProfile:
    """Divisibility of ``|φ^ℓ(w)|`` by powers of ``q`` for short return words ``w``.

    Growth of the minimal ``q``-adic valuation with ``ℓ`` is necessary for
    all ``q^n``-th roots of unity to be eigenvalues.
    """
    u = m.uncoded()
    img = u.image(u.start)
    if not img or img[0] != u.start:
        raise HypothesisViolated(f"the image of {u.start!r} does not start with {u.start!r}")
    M = transition_matrix(u)
    if not is_primitive(M):
        raise HypothesisViolated(f"{m} is not primitive")
    d = M.dim
    if L is None:
        L = max(d + 2, 12)
    if L < d + 2:
        raise HypothesisViolated(f"depth L={L} must be at least alphabet size + 2 = {d + 2}")
    lengths = length_table(M, L)
    lit = _literal_lengths(u, min(LITERAL_CHECK_DEPTH, L))
    literal_ok = None if lit is None else lit == lengths[: len(lit)]
    if literal_ok is False:
        raise AssertionError("matrix lengths disagree with literal expansion")
    if return_sample is None:
        return_sample = return_words(expand(u, horizon), u.start, horizon)
    words = list(return_sample.words[:samples])
    idx = u.alphabet.index
    counts = []
    for w in words:
        c = [0] * d
        for a in w:
            c[idx[a]] += 1
        counts.append(c)
    rl = [[sum(c[j] * row[j] for j in range(d)) for c in counts] for row in lengths]
    vals: dict[int, list[int]] = {}
    grows: dict[int, bool] = {}
    for q in q_candidates:
        v = [min(valuation(x, q) for x in row) for row in rl]
        vals[q] = v
        grows[q] = v[L] > v[L // 2]
    single = all(len(a) == 1 for a in u.alphabet.symbols)
    names = ["".join(w) if single else " ".join(w) for w in words]
    return HostProfile(u.alphabet.symbols, L, lengths, literal_ok, names, rl, vals, grows)


@dataclass
class QStatus:
    q: int
    status: str
    reason: str | None = None
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"q": self.q, "status": self.status, "reason": self.reason, "evidence": self.evidence}


@dataclass
class ObstructionReport:
    det: int
    constraint: EigenvalueConstraint
    per_q: dict[int, QStatus]
    primitive: bool
    height: int | None
    height_stabilized: bool | None
    notes: list[str] = field(default_factory=list)

    def obstructed(self, q: int) -> bool:
        return self.per_q[q].status == OBSTRUCTED

    def obstructed_qs(self) -> list[int]:
        return [q for q, s in self.per_q.items() if s.status == OBSTRUCTED]

    def all_obstructed(self) -> bool:
        return all(s.status == OBSTRUCTED for s in self.per_q.values())

    def to_dict(self) -> dict:
        return {
            "det": self.det,
            "constraint": self.constraint.to_dict(),
            "per_q": [s.to_dict() for _, s in sorted(self.per_q.items())],
            "applicability": {
                "invertible": True,
                "primitive": self.primitive,
                "height": self.height,
                "height_stabilized": self.height_stabilized,
            },
            "notes": list(self.notes),
        }


def eigenvalue_obstruction(m: Morphism, q_max: int = 64, j_max: int = 8,
                           height_horizon: int = 1 << 14) -> ObstructionReport:
    u = m.uncoded()
    M = transition_matrix(u)
    det = M.det()
    if det == 0:
        raise SingularMatrix("transition matrix is singular; use the return-word length route")
    notes = []
    primitive = is_primitive(M)
    if not primitive:
        notes.append("matrix is not primitive: eigenvalue theory hypotheses are not met")
    h_val = h_stab = None
    try:
        h = height(u, height_horizon)
        h_val, h_stab = h.value, h.stabilized
    except InsufficientOccurrences:
        notes.append("height unknown: the start letter recurs too rarely in the prefix")
    if h_val is not None and h_val != 1:
        raise HeightNotOne(f"height is {h_val}; only the height-1 case is implemented")
    constraint = coboundary_constraints(M)
    allowed = set(constraint.allowed_primes)
    per_q: dict[int, QStatus] = {}
    orbit_cache: dict[int, object] = {}
    for q in range(2, q_max + 1):
        missing = [p for p in prime_factors(q) if p not in allowed]
        if missing:
            per_q[q] = QStatus(q, OBSTRUCTED, "denominator-prime",
                               {"missing_primes": missing, "allowed_primes": sorted(allowed)})
            continue
        status = None
        for j in range(1, j_max + 1):
            mod = q**j
            orb = orbit_cache.get(mod) or length_residue_orbit(M, mod)
            orbit_cache[mod] = orb
            if orb.eventually_zero is False:
                head = [list(map(str, v)) for v in orb.head]
                vals = {str(p): [[valuation(x, p) for x in v] for v in orb.head] for p in prime_factors(q)}
                status = QStatus(q, OBSTRUCTED, "residue-cycle", {
                    "j": j,
                    "modulus": mod,
                    "cycle_start": orb.cycle_start,
                    "cycle_length": orb.cycle_length,
                    "cycle": [list(v) for v in orb.cycle[:8]],
                    "length_vectors": head,
                    "valuations": vals,
                    "forces_j": j - 1,
                })
                break
            if orb.eventually_zero is None:
                status = QStatus(q, NOT_OBSTRUCTED, "orbit-undecided", {"j": j})
                break
        if status is None:
            status = QStatus(q, NOT_OBSTRUCTED, None, {"checked_j": j_max})
        per_q[q] = status
    return ObstructionReport(det, constraint, per_q, primitive, h_val, h_stab, notes)
