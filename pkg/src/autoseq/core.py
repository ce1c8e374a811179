"""Alphabets, morphisms, fixed points, transition matrices, return words.

Symbols are arbitrary non-empty strings, so ``{"1", "2"}`` and
``{"a", "b"}`` alphabets are handled the same way.  Sequences are held in a
:class:`PrefixView`, a finite prefix that grows on demand and is stored as a
numpy array of symbol codes.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    InsufficientOccurrences,
    NotProlongable,
    PrefixTooShort,
    SpecParseError,
)

__all__ = [
    "Alphabet",
    "Morphism",
    "IntMatrix",
    "PrefixView",
    "ReturnWordStats",
    "Height",
    "expand",
    "transition_matrix",
    "is_primitive",
    "return_words",
    "height",
    "parse_morphism",
    "load_morphism",
]


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        symbols = tuple(self.symbols)
        if not symbols:
            raise ValueError("alphabet must be non-empty")
        for s in symbols:
            if not isinstance(s, str) or not s:
                raise ValueError(f"alphabet symbols must be non-empty strings, got {s!r}")
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"alphabet symbols must be distinct: {symbols}")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "index", {s: i for i, s in enumerate(symbols)})

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, s) -> bool:
        return s in self.index

    def __getitem__(self, i: int) -> str:
        return self.symbols[i]


def _join(word: Sequence[str]) -> str:
    if all(len(s) == 1 for s in word):
        return "".join(word)
    return " ".join(word)


@dataclass(frozen=True)
class Morphism:
    """A morphism on ``alphabet`` with an optional letter-to-letter coding.

    ``rules[i]`` is the image of ``alphabet[i]``.  Unless ``matrix_only`` is
    set, the image of ``start`` must begin with ``start`` and have length at
    least 2, so that the iterative fixed point exists.
    """

    alphabet: Alphabet
    rules: tuple[tuple[str, ...], ...]
    start: str
    coding: tuple[str, ...] | None = None
    matrix_only: bool = False

    def __post_init__(self):
        rules = tuple(tuple(img) for img in self.rules)
        object.__setattr__(self, "rules", rules)
        if len(rules) != len(self.alphabet):
            raise ValueError("one rule per alphabet letter is required")
        for a, img in zip(self.alphabet, rules):
            for s in img:
                if s not in self.alphabet:
                    raise ValueError(f"image of {a!r} uses unknown letter {s!r}")
        if self.start not in self.alphabet:
            raise ValueError(f"start letter {self.start!r} not in alphabet")
        if self.coding is not None:
            coding = tuple(self.coding)
            if len(coding) != len(self.alphabet) or not all(isinstance(c, str) and c for c in coding):
                raise ValueError("coding must map every letter to a non-empty string")
            object.__setattr__(self, "coding", coding)
        if not self.matrix_only:
            img = self.image(self.start)
            if len(img) < 2 or img[0] != self.start:
                raise NotProlongable(
                    f"image of start letter {self.start!r} must begin with it and have length >= 2"
                )

    @classmethod
    def from_dict(
        cls,
        rules: Mapping[str, str | Sequence[str]],
        start: str | None = None,
        coding: Mapping[str, str] | None = None,
        matrix_only: bool = False,
    ) -> "Morphism":
        """Build from ``{"a": "aab", "b": "b"}``-style rules.

        A string image is split into characters when every letter of the
        alphabet is a single character, and on whitespace otherwise.
        """
        letters = list(rules)
        single = all(len(a) == 1 for a in letters)
        images = []
        for a in letters:
            img = rules[a]
            if isinstance(img, str):
                img = list(img) if single else img.split()
            images.append(tuple(img))
        alphabet = Alphabet(tuple(letters))
        cod = None if coding is None else tuple(coding[a] for a in letters)
        return cls(alphabet, tuple(images), start if start is not None else letters[0], cod, matrix_only)

    # -- basic queries -----------------------------------------------------
    def image(self, letter: str) -> tuple[str, ...]:
        return self.rules[self.alphabet.index[letter]]

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(img) for img in self.rules)

    def is_uniform(self) -> bool:
        return len(set(self.lengths)) == 1

    @property
    def uniform_length(self) -> int | None:
        return self.lengths[0] if self.is_uniform() else None

    def is_erasing(self) -> bool:
        return any(n == 0 for n in self.lengths)

    def code(self, letter: str) -> str:
        if self.coding is None:
            return letter
        return self.coding[self.alphabet.index[letter]]

    @property
    def output_symbols(self) -> tuple[str, ...]:
        """Distinct coded symbols, in alphabet order of first appearance."""
        seen: dict[str, None] = {}
        for a in self.alphabet:
            seen.setdefault(self.code(a), None)
        return tuple(seen)

    def apply(self, word: Iterable[str]) -> tuple[str, ...]:
        out: list[str] = []
        for a in word:
            out.extend(self.image(a))
        return tuple(out)

    def iterate(self, word: Iterable[str], k: int) -> tuple[str, ...]:
        w = tuple(word)
        for _ in range(k):
            w = self.apply(w)
        return w

    def compose(self, other: "Morphism") -> "Morphism":
        """The morphism ``self ∘ other`` (apply ``other`` first)."""
        if other.alphabet != self.alphabet:
            raise ValueError("composition needs a common alphabet")
        rules = tuple(self.apply(img) for img in other.rules)
        return Morphism(self.alphabet, rules, self.start, self.coding, matrix_only=True)

    def power(self, k: int) -> "Morphism":
        if k < 1:
            raise ValueError("power must be >= 1")
        rules = tuple(self.iterate((a,), k) for a in self.alphabet)
        return Morphism(self.alphabet, rules, self.start, self.coding, self.matrix_only)

    def uncoded(self) -> "Morphism":
        if self.coding is None:
            return self
        return Morphism(self.alphabet, self.rules, self.start, None, self.matrix_only)

    def reachable_letters(self) -> tuple[str, ...]:
        """Letters occurring in some ``φ^k(start)``, in alphabet order."""
        seen = {self.start}
        stack = [self.start]
        while stack:
            for b in self.image(stack.pop()):
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        return tuple(a for a in self.alphabet if a in seen)

    def restrict_to_reachable(self) -> "Morphism":
        keep = self.reachable_letters()
        if len(keep) == len(self.alphabet):
            return self
        alphabet = Alphabet(keep)
        rules = tuple(self.image(a) for a in keep)
        coding = None if self.coding is None else tuple(self.code(a) for a in keep)
        return Morphism(alphabet, rules, self.start, coding, self.matrix_only)

    def to_spec(self) -> str:
        lines = [f"alphabet: {' '.join(self.alphabet)}", f"start: {self.start}"]
        for a, img in zip(self.alphabet, self.rules):
            lines.append(f"rule: {a} -> {' '.join(img)}".rstrip())
        if self.coding is not None:
            for a in self.alphabet:
                lines.append(f"coding: {a} -> {self.code(a)}")
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        rules = ", ".join(f"{a}->{_join(img) or 'ε'}" for a, img in zip(self.alphabet, self.rules))
        return f"Morphism({rules}; start {self.start})"

    # -- vectorised application on letter codes -----------------------------
    def _tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        idx = self.alphabet.index
        flat = np.array([idx[s] for img in self.rules for s in img], dtype=np.int64)
        lens = np.array(self.lengths, dtype=np.int64)
        offsets = np.concatenate(([0], np.cumsum(lens)[:-1])).astype(np.int64)
        return flat, offsets, lens


def _apply_codes(tables, x: np.ndarray) -> np.ndarray:
    flat, offsets, lens = tables
    ln = lens[x]
    total = int(ln.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    ends = np.cumsum(ln)
    within = np.arange(total, dtype=np.int64) - np.repeat(ends - ln, ln)
    return flat[np.repeat(offsets[x], ln) + within]


@dataclass(frozen=True)
class IntMatrix:
    """Square matrix of unbounded integers."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("IntMatrix must be square")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, d: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @classmethod
    def zeros(cls, d: int) -> "IntMatrix":
        return cls(tuple((0,) * d for _ in range(d)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        cols = list(zip(*other.rows))
        return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(c * a for a in r) for r in self.rows))

    def __pow__(self, k: int) -> "IntMatrix":
        if k < 0:
            raise ValueError("negative powers are not supported")
        result, base = IntMatrix.identity(self.dim), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def column_sums(self) -> tuple[int, ...]:
        return tuple(sum(c) for c in zip(*self.rows))

    def row_vector_times(self, v: Sequence[int]) -> tuple[int, ...]:
        """``v · M`` for a row vector ``v``."""
        return tuple(sum(vi * self.rows[i][j] for i, vi in enumerate(v)) for j in range(self.dim))

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for r in self.rows for v in r)

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        n = self.dim
        if n == 0:
            return 1
        a = [list(r) for r in self.rows]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_list()})"


def transition_matrix(m: Morphism) -> IntMatrix:
    """Entry ``(i, j)`` counts occurrences of letter ``i`` in the image of letter ``j``."""
    d = len(m.alphabet)
    idx = m.alphabet.index
    cols = []
    for img in m.rules:
        col = [0] * d
        for s in img:
            col[idx[s]] += 1
        cols.append(col)
    return IntMatrix(tuple(zip(*cols)) if d else ())


def is_primitive(M: IntMatrix) -> bool:
    """Some power of ``M`` is entrywise positive.

    Uses Wielandt's bound: a primitive ``d × d`` matrix has ``M^((d-1)^2+1) > 0``.
    """
    d = M.dim
    if d == 0:
        return False
    B = np.array(M.to_list(), dtype=np.int64) > 0
    P = B.copy()
    for _ in range((d - 1) ** 2):
        P = (P.astype(np.int64) @ B.astype(np.int64)) > 0
    return bool(P.all())


# ---------------------------------------------------------------------------
# Prefix views

class _Source:
    finite = False

    def extend(self, current: np.ndarray, n: int) -> np.ndarray:
        raise NotImplementedError


class _FixedPointSource(_Source):
    def __init__(self, m: Morphism):
        self.m = m
        self.tables = m._tables()
        self.letters = np.array([m.alphabet.index[m.start]], dtype=np.int64)
        if m.coding is None:
            self.code_of = np.arange(len(m.alphabet), dtype=np.int64)
        else:
            out = m.output_symbols
            pos = {s: i for i, s in enumerate(out)}
            self.code_of = np.array([pos[c] for c in m.coding], dtype=np.int64)

    def extend(self, current: np.ndarray, n: int) -> np.ndarray:
        letters = self.letters
        lens = self.tables[2]
        while len(letters) < n:
            reach = np.cumsum(lens[letters])
            k = int(np.searchsorted(reach, n)) + 1
            new = _apply_codes(self.tables, letters[:k])
            if len(new) <= len(letters):
                raise NotProlongable(
                    "the iterative fixed point is finite "
                    f"(stalled at length {len(letters)})"
                )
            letters = new
        self.letters = letters
        return self.code_of[letters]


class _ArraySource(_Source):
    finite = True

    def __init__(self, codes: np.ndarray):
        self.codes = codes

    def extend(self, current: np.ndarray, n: int) -> np.ndarray:
        if n > len(self.codes):
            raise PrefixTooShort(f"only {len(self.codes)} symbols available, {n} requested")
        return self.codes


class _FunctionSource(_Source):
    def __init__(self, fn: Callable[[int], np.ndarray]):
        self.fn = fn

    def extend(self, current: np.ndarray, n: int) -> np.ndarray:
        target = max(n, 2 * len(current), 1024)
        return np.asarray(self.fn(target), dtype=np.int64)


class PrefixView:
    """A finite, extendable prefix of a sequence over string symbols.

    Extension never rewrites symbols already produced.  Internally the prefix
    is a numpy array of indices into :attr:`symbols`.
    """

    def __init__(self, symbols: Sequence[str], source: _Source, name: str = "",
                 shift: int = 0):
        self.symbols = tuple(symbols)
        self._source = source
        self._codes = np.zeros(0, dtype=np.int64)
        self.name = name
        self.shift = shift  # index of the first stored term in the original numbering

    @classmethod
    def from_symbols(cls, seq: Iterable, symbols: Sequence[str] | None = None,
                     name: str = "") -> "PrefixView":
        """A fixed finite prefix; requesting more than its length raises."""
        items = [str(s) for s in seq]
        if symbols is None:
            symbols = list(dict.fromkeys(items))
        pos = {s: i for i, s in enumerate(symbols)}
        codes = np.array([pos[s] for s in items], dtype=np.int64)
        view = cls(symbols, _ArraySource(codes), name=name)
        view._codes = codes
        return view

    @classmethod
    def from_codes(cls, codes: np.ndarray, symbols: Sequence[str], name: str = "",
                   shift: int = 0) -> "PrefixView":
        codes = np.asarray(codes, dtype=np.int64)
        view = cls(symbols, _ArraySource(codes), name=name, shift=shift)
        view._codes = codes
        return view

    @classmethod
    def from_function(cls, fn: Callable[[int], np.ndarray], symbols: Sequence[str],
                      name: str = "", shift: int = 0) -> "PrefixView":
        """``fn(n)`` must return the first ``n`` codes (any ``n``), deterministically."""
        return cls(symbols, _FunctionSource(fn), name=name, shift=shift)

    @property
    def finite(self) -> bool:
        return self._source.finite

    def __len__(self) -> int:
        return len(self._codes)

    def ensure(self, n: int) -> "PrefixView":
        if n > len(self._codes):
            new = self._source.extend(self._codes, n)
            m = len(self._codes)
            if m and not np.array_equal(new[:m], self._codes):
                raise RuntimeError("sequence source is not prefix-stable")
            if len(new) < n:
                raise PrefixTooShort(f"source produced {len(new)} symbols, {n} requested")
            self._codes = new
        return self

    def available(self) -> int | None:
        """Total length for finite sources, ``None`` for unbounded ones."""
        return len(self._source.codes) if self._source.finite else None

    def codes(self, n: int | None = None) -> np.ndarray:
        if n is None:
            return self._codes
        self.ensure(n)
        return self._codes[:n]

    def word(self, n: int) -> list[str]:
        return [self.symbols[c] for c in self.codes(n)]

    def text(self, n: int) -> str:
        return _join(self.word(n))

    def __getitem__(self, i):
        if isinstance(i, slice):
            stop = i.stop if i.stop is not None else len(self)
            self.ensure(stop)
            return [self.symbols[c] for c in self._codes[i]]
        self.ensure(i + 1)
        return self.symbols[self._codes[i]]

    def symbol_code(self, s: str) -> int:
        try:
            return self.symbols.index(s)
        except ValueError:
            raise KeyError(f"symbol {s!r} is not in this sequence's alphabet") from None

    def __repr__(self) -> str:
        return f"PrefixView({self.name or 'sequence'}, {len(self)} symbols materialised)"


def expand(m: Morphism, n: int) -> PrefixView:
    """First ``n`` symbols of the coded iterative fixed point of ``m``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if m.matrix_only:
        img = m.image(m.start)
        if len(img) < 2 or img[0] != m.start:
            raise NotProlongable(f"{m} is not prolongable at {m.start!r}")
    view = PrefixView(m.output_symbols, _FixedPointSource(m), name=str(m))
    view.ensure(n)
    view._codes = view._codes[:n]
    return view


# ---------------------------------------------------------------------------
# Return words and height

@dataclass(frozen=True)
class ReturnWordStats:
    target: str
    lengths: tuple[int, ...]
    gcd: int
    horizon: int
    occurrences: int
    # Distinct return words, shortest first, ties broken by first position.
    words: tuple[tuple[str, ...], ...] = ()

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "lengths": list(self.lengths),
            "gcd": self.gcd,
            "horizon": self.horizon,
            "occurrences": self.occurrences,
            "words": [list(w) for w in self.words[:16]],
        }


_MAX_STORED_WORDS = 256


def return_words(p: PrefixView, target: str, horizon: int) -> ReturnWordStats:
    """Gaps between consecutive occurrences of ``target`` in ``p[0:horizon]``."""
    codes = p.codes(horizon)
    try:
        t = p.symbol_code(target)
    except KeyError:
        pos = np.zeros(0, dtype=np.int64)
    else:
        pos = np.flatnonzero(codes == t)
    if len(pos) < 2:
        raise InsufficientOccurrences(
            f"{target!r} occurs {len(pos)} time(s) in the first {horizon} symbols"
        )
    gaps = np.diff(pos)
    lengths = tuple(int(g) for g in np.unique(gaps))
    g = reduce(math.gcd, lengths)
    words: dict[tuple[str, ...], int] = {}
    for i in range(len(pos) - 1):
        key = tuple(p.symbols[c] for c in codes[pos[i]:pos[i + 1]])
        if key not in words:
            words[key] = int(pos[i])
            if len(words) >= _MAX_STORED_WORDS:
                break
    ordered = tuple(sorted(words, key=lambda w: (len(w), words[w])))
    return ReturnWordStats(target, lengths, g, horizon, len(pos), ordered)


@dataclass(frozen=True)
class Height:
    value: int
    stabilized: bool
    horizon: int

    def to_dict(self) -> dict:
        return {"value": self.value, "stabilized": self.stabilized, "horizon": self.horizon}


def height(m: Morphism, horizon: int = 1 << 14) -> Height:
    """gcd of return-word lengths to the first letter of the fixed point.

    A finite prefix only gives an upper bound on the true gcd, so the value is
    recomputed at twice the horizon; ``stabilized`` records whether it moved.
    """
    u = m.uncoded()
    view = expand(u, 2 * horizon)
    first = return_words(view, u.start, horizon)
    stats = return_words(view, u.start, 2 * horizon)
    return Height(stats.gcd, stats.gcd == first.gcd, 2 * horizon)


# ---------------------------------------------------------------------------
# Morphism spec files

_LINE = re.compile(r"^\s*(alphabet|start|rule|coding)\s*:\s*(.*?)\s*$")


def parse_morphism(text: str) -> Morphism:
    """Parse the line-oriented morphism format.

    ::

        # comment
        alphabet: a b
        start: a
        rule: a -> a a b
        rule: b -> b
        coding: a -> 1      (optional)
    """
    alphabet: list[str] | None = None
    start = None
    rules: dict[str, list[str]] = {}
    coding: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mt = _LINE.match(line)
        if not mt:
            raise SpecParseError(f"line {lineno}: cannot parse {raw!r}")
        key, val = mt.groups()
        if key == "alphabet":
            alphabet = val.split()
        elif key == "start":
            start = val
        else:
            if "->" not in val:
                raise SpecParseError(f"line {lineno}: expected 'x -> ...'")
            lhs, rhs = (s.strip() for s in val.split("->", 1))
            if not lhs or len(lhs.split()) != 1:
                raise SpecParseError(f"line {lineno}: bad left-hand side {lhs!r}")
            target = rules if key == "rule" else coding
            if lhs in target:
                raise SpecParseError(f"line {lineno}: duplicate {key} for {lhs!r}")
            if key == "rule":
                rules[lhs] = rhs.split()
            else:
                if len(rhs.split()) != 1:
                    raise SpecParseError(f"line {lineno}: coding must map to one symbol")
                coding[lhs] = rhs
    if alphabet is None:
        alphabet = list(rules)
    if not alphabet:
        raise SpecParseError("no alphabet or rules given")
    missing = [a for a in alphabet if a not in rules]
    if missing:
        raise SpecParseError(f"no rule for letters {missing}")
    extra = [a for a in list(rules) + list(coding) if a not in alphabet]
    if extra:
        raise SpecParseError(f"rules or codings for unknown letters {extra}")
    single = all(len(a) == 1 for a in alphabet)
    images = {}
    for a in alphabet:
        img = rules[a]
        # Allow "rule: a -> aab" for single-character alphabets.
        if single and len(img) == 1 and img[0] not in alphabet and set(img[0]) <= set(alphabet):
            img = list(img[0])
        images[a] = img
    if coding and set(coding) != set(alphabet):
        raise SpecParseError("coding must be given for every letter or for none")
    try:
        return Morphism.from_dict(images, start=start or alphabet[0],
                                  coding=coding or None)
    except NotProlongable:
        raise
    except ValueError as exc:
        raise SpecParseError(str(exc)) from exc


def load_morphism(path: str | Path) -> Morphism:
    return parse_morphism(Path(path).read_text(encoding="utf-8"))
