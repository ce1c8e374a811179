"""q-kernels: exact automata for uniform morphisms, witnessed lower bounds otherwise.

Digits are read most significant first, over canonical expansions (no
leading zeros; ``0`` is the empty word).  For a prolongable uniform
morphism the start letter loops on digit 0, so leading zeros are harmless
anyway.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Morphism, PrefixView
from .errors import HorizonTooSmall, NotUniform, ParameterInvalid

__all__ = [
    "DFAO",
    "KernelEstimate",
    "dfao_from_uniform",
    "minimize",
    "uniform_kernel_size",
    "kernel_lower_bound",
    "targeted_kernel_family",
    "family_offsets",
    "verify_witness",
]

MAX_POINTS = 1 << 16
MIN_POINTS = 8


@dataclass(frozen=True)
class DFAO:
    base: int
    transitions: tuple[tuple[int, ...], ...]  # state x digit -> state
    initial: int
    outputs: tuple[str, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        for row in self.transitions:
            if len(row) != self.base or any(not 0 <= s < len(self.transitions) for s in row):
                raise ValueError("transition table must be total")
        if len(self.outputs) != len(self.transitions):
            raise ValueError("every state needs an output")

    @property
    def num_states(self) -> int:
        return len(self.transitions)

    def digits(self, n: int) -> list[int]:
        out = []
        while n:
            n, d = divmod(n, self.base)
            out.append(d)
        return out[::-1]

    def run(self, digits: Sequence[int], state: int | None = None) -> int:
        s = self.initial if state is None else state
        for d in digits:
            s = self.transitions[s][d]
        return s

    def __call__(self, n: int) -> str:
        return self.outputs[self.run(self.digits(n))]

    def states_upto(self, N: int) -> np.ndarray:
        """State reached on each ``n < N``, using ``state(n) = δ(state(n // q), n % q)``."""
        T = np.array(self.transitions, dtype=np.int64)
        st = np.empty(max(N, 1), dtype=np.int64)
        st[0] = self.initial
        lo = 1
        while lo < N:
            hi = min(N, lo * self.base)
            idx = np.arange(lo, hi)
            st[lo:hi] = T[st[idx // self.base], idx % self.base]
            lo = hi
        return st[:N]

    def evaluate(self, N: int) -> list[str]:
        out = np.array(self.outputs, dtype=object)
        return list(out[self.states_upto(N)])

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "states": self.num_states,
            "initial": self.initial,
            "transitions": [list(r) for r in self.transitions],
            "outputs": list(self.outputs),
            "labels": list(self.labels),
            "reading": "most significant digit first, canonical",
        }


def dfao_from_uniform(m: Morphism) -> DFAO:
    q = m.uniform_length
    if q is None:
        raise NotUniform(f"{m} is not uniform")
    letters = m.alphabet.symbols
    idx = m.alphabet.index
    trans = tuple(tuple(idx[b] for b in m.image(a)) for a in letters)
    outputs = tuple(m.code(a) for a in letters)
    if q == 1:
        # 1-uniform: the sequence is constant; any base reads it, base 2 is used
        trans = tuple((t[0], t[0]) for t in trans)
        return DFAO(2, trans, idx[m.start], outputs, tuple(letters))
    return DFAO(q, trans, idx[m.start], outputs, tuple(letters))


def _reachable(d: DFAO) -> list[int]:
    seen = {d.initial}
    order = [d.initial]
    queue = deque([d.initial])
    while queue:
        s = queue.popleft()
        for t in d.transitions[s]:
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    return order


def minimize(d: DFAO) -> DFAO:
    """Moore partition refinement on the reachable part; states renumbered breadth-first."""
    states = _reachable(d)
    block = {s: d.outputs[s] for s in states}
    # relabel initial partition with ints
    labels: dict = {}
    part = {s: labels.setdefault(block[s], len(labels)) for s in states}
    while True:
        sig = {s: (part[s],) + tuple(part[t] for t in d.transitions[s]) for s in states}
        labels = {}
        new = {s: labels.setdefault(sig[s], len(labels)) for s in states}
        if len(set(new.values())) == len(set(part.values())):
            part = new
            break
        part = new
    # breadth-first renumbering from the initial block
    order: dict[int, int] = {}
    rep: dict[int, int] = {}
    for s in states:
        rep.setdefault(part[s], s)
    queue = deque([part[d.initial]])
    order[part[d.initial]] = 0
    while queue:
        b = queue.popleft()
        for t in d.transitions[rep[b]]:
            if part[t] not in order:
                order[part[t]] = len(order)
                queue.append(part[t])
    n = len(order)
    trans = [None] * n
    outs = [None] * n
    for b, i in order.items():
        s = rep[b]
        trans[i] = tuple(order[part[t]] for t in d.transitions[s])
        outs[i] = d.outputs[s]
    return DFAO(d.base, tuple(trans), 0, tuple(outs))


def uniform_kernel_size(m: Morphism | DFAO) -> int:
    """Exact size of the q-kernel of an automatic sequence given by a DFAO.

    The subsequence ``n ↦ a(q^k n + r)`` is ``n ↦ τ(δ(s_n, w))`` where ``s_n``
    is the state after reading ``n`` and ``w`` is ``r`` written with exactly
    ``k`` digits.  Every reachable state is some ``s_n``, so kernel elements
    correspond to the distinct maps ``s ↦ τ(δ(s, w))`` on reachable states.
    """
    d = m if isinstance(m, DFAO) else dfao_from_uniform(m)
    states = _reachable(d)
    ident = tuple(states)
    seen = {ident}
    queue = deque([ident])
    outs = {tuple(d.outputs[s] for s in ident)}
    while queue:
        h = queue.popleft()
        for digit in range(d.base):
            # w -> w digit : the new word reads w first, then the digit
            g = tuple(d.transitions[s][digit] for s in h)
            if g not in seen:
                seen.add(g)
                queue.append(g)
                outs.add(tuple(d.outputs[s] for s in g))
    return len(outs)


# ---------------------------------------------------------------------------
# witnessed lower bounds

@dataclass
class KernelEstimate:
    """Kernel subsequences proven pairwise distinct, with the index proving each pair.

    ``witnesses[i][j]`` (``j < i``) is an ``n`` with
    ``a(q^k_i n + r_i) != a(q^k_j n + r_j)``, both indices below ``horizon``.
    """

    base: int
    representatives: list[tuple[int, int]]
    witnesses: list[list[int]]
    horizon: int
    k_max: int
    points: dict[int, int]
    insufficient_depths: list[int] = field(default_factory=list)
    size_by_depth: dict[int, int] = field(default_factory=dict)
    undistinguished: int = 0
    family: str | None = None
    members: list[tuple[int, int]] = field(default_factory=list)
    equal_pairs: list[tuple[int, int]] = field(default_factory=list)
    diagonal: list[str] | None = None

    @property
    def size(self) -> int:
        return len(self.representatives)

    def to_dict(self, max_representatives: int | None = None) -> dict:
        reps = []
        for i, (k, r) in enumerate(self.representatives[:max_representatives]):
            reps.append({"k": k, "r": r, "witnesses": list(self.witnesses[i])})
        out = {
            "base": self.base,
            "size": self.size,
            "certified": "distinctness only; equality is never claimed",
            "horizon": self.horizon,
            "k_max": self.k_max,
            "points": {str(k): v for k, v in sorted(self.points.items())},
            "insufficient_depths": list(self.insufficient_depths),
            "size_by_depth": {str(k): v for k, v in sorted(self.size_by_depth.items())},
            "undistinguished": self.undistinguished,
            "representatives": reps,
            "representatives_truncated": len(reps) < self.size,
        }
        if self.family is not None:
            out["family"] = self.family
            out["members"] = [list(x) for x in self.members]
            out["equal_pairs"] = [list(x) for x in self.equal_pairs]
            out["diagonal"] = self.diagonal
        return out


def _depth_points(horizon: int, q: int, k: int) -> int:
    # every r < q^k has at least horizon // q^k indices q^k n + r below horizon
    return min(horizon // q**k, MAX_POINTS)


def _check_args(q: int, k_max: int, horizon: int):
    if q < 2:
        raise ParameterInvalid("base must be >= 2")
    if k_max < 0:
        raise ParameterInvalid("k_max must be >= 0")
    if horizon // q**k_max < 2:
        raise HorizonTooSmall(
            f"horizon {horizon} leaves fewer than 2 comparison points at depth {k_max} "
            f"(need at least {2 * q**k_max})"
        )


def kernel_lower_bound(p: PrefixView, q: int, k_max: int = 8, horizon: int = 1 << 16) -> KernelEstimate:
    """Greedy breadth-first collection of witnessed-distinct kernel subsequences."""
    _check_args(q, k_max, horizon)
    a = p.codes(horizon)
    reps: list[tuple[int, int]] = []
    seqs: list[np.ndarray] = []
    wit: list[list[int]] = []
    points: dict[int, int] = {}
    insufficient: list[int] = []
    sizes: dict[int, int] = {}
    undist = 0
    for k in range(k_max + 1):
        qk = q**k
        L = _depth_points(horizon, q, k)
        points[k] = L
        if L < MIN_POINTS:
            insufficient.append(k)
            sizes[k] = len(reps)
            continue
        stack = np.empty((len(reps) + qk, L), dtype=a.dtype)
        for i, s in enumerate(seqs):
            stack[i] = s[:L]
        n_rows = len(reps)
        for r in range(qk):
            cand = a[r::qk][:L]
            if n_rows:
                diff = stack[:n_rows] != cand
                hit = diff.any(axis=1)
                if not hit.all():
                    undist += 1
                    continue
                w = diff.argmax(axis=1).tolist()
            else:
                w = []
            reps.append((k, r))
            seqs.append(a[r::qk][:MAX_POINTS].copy())
            wit.append(w)
            stack[n_rows] = cand
            n_rows += 1
        sizes[k] = len(reps)
    return KernelEstimate(q, reps, wit, horizon, k_max, points, insufficient, sizes, undist)


def family_offsets(family, q: int, k: int) -> int | None:
    """Offset ``r_k`` of a one-parameter family, or None when undefined at depth ``k``."""
    if isinstance(family, str):
        if family == "qk-k":
            r = q**k - k
        elif family == "qk-1":
            r = q**k - 1
        elif family.startswith("const"):
            r = int(family.split(":", 1)[1]) if ":" in family else 0
        else:
            raise ParameterInvalid(f"unknown kernel family {family!r}")
    elif isinstance(family, tuple) and family and family[0] == "const":
        r = int(family[1])
    else:
        seq = list(family)
        if k >= len(seq):
            return None
        r = int(seq[k])
    if not 0 <= r < q**k:
        return None
    return r


def _family_name(family) -> str:
    if isinstance(family, str):
        return family
    if isinstance(family, tuple) and family and family[0] == "const":
        return f"const:{family[1]}"
    return "custom:" + ",".join(str(x) for x in family)


def targeted_kernel_family(p: PrefixView, q: int, family="qk-k", k_max: int = 8,
                           horizon: int = 1 << 16, k_min: int = 1,
                           depths: Sequence[int] | None = None) -> KernelEstimate:
    """Compare one kernel subsequence per depth, ``(a(q^k n + r_k))_n``, pairwise.

    ``family`` is ``"const:r"``, ``"qk-k"`` (``r_k = q^k - k``), ``"qk-1"`` or an
    explicit list indexed by ``k``.  The diagonal ``a(q^k - 1)`` is attached.
    """
    _check_args(q, k_max, horizon)
    a = p.codes(horizon)
    if depths is None:
        depths = range(k_min, k_max + 1)
    members = []
    for k in depths:
        if k > k_max:
            continue
        r = family_offsets(family, q, k)
        if r is not None:
            members.append((k, r))
    points = {k: _depth_points(horizon, q, k) for k, _ in members}
    insufficient = sorted({k for k, _ in members if points[k] < MIN_POINTS})
    usable = [(k, r) for k, r in members if points[k] >= MIN_POINTS]
    seqs = [a[r::q**k][: points[k]] for k, r in usable]
    reps: list[tuple[int, int]] = []
    rep_idx: list[int] = []
    wit: list[list[int]] = []
    equal_pairs = []
    for i in range(len(usable)):
        for j in range(i):
            L = min(len(seqs[i]), len(seqs[j]))
            if not np.any(seqs[i][:L] != seqs[j][:L]):
                equal_pairs.append((j, i))
    for i, (k, r) in enumerate(usable):
        w = []
        ok = True
        for j in rep_idx:
            L = min(len(seqs[i]), len(seqs[j]))
            diff = seqs[i][:L] != seqs[j][:L]
            if not diff.any():
                ok = False
                break
            w.append(int(diff.argmax()))
        if ok:
            reps.append((k, r))
            rep_idx.append(i)
            wit.append(w)
    diag = []
    k = 0
    while q**k - 1 < horizon and k <= max(k_max, 0) + 8:
        diag.append(p.symbols[a[q**k - 1]])
        k += 1
    sizes = {}
    for k, _ in usable:
        sizes[k] = sum(1 for kk, _ in reps if kk <= k)
    return KernelEstimate(q, reps, wit, horizon, k_max, points, insufficient, sizes,
                          len(usable) - len(reps), _family_name(family), usable,
                          equal_pairs, diag)


def verify_witness(p: PrefixView, est: KernelEstimate, i: int, j: int) -> bool:
    """Re-read the two kernel subsequences at the stored witness."""
    (k1, r1), (k2, r2) = est.representatives[i], est.representatives[j]
    if j > i:
        i, j = j, i
        (k1, r1), (k2, r2) = (k2, r2), (k1, r1)
    n = est.witnesses[i][j]
    q = est.base
    x, y = q**k1 * n + r1, q**k2 * n + r2
    if x >= est.horizon or y >= est.horizon:
        return False
    return p[x] != p[y]
