"""Built-in inputs: classical morphisms and arithmetic sequences.

Arithmetic functions are defined for ``n >= 1``; their prefix views start at
``n = 1`` and record ``shift = 1``.  Characteristic sequences of sets of
non-negative integers are indexed from 0 with no shift.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .core import Morphism, PrefixView, parse_morphism
from .errors import NotIntegerValued, ParameterInvalid, UnknownGenerator

__all__ = [
    "GeneratorSpec",
    "MAX_LENGTH",
    "BUILTIN_MORPHISMS",
    "UNIFORM_BUILTINS",
    "builtin_morphism",
    "parse_generator",
    "generate",
    "poly_char_sequence",
    "generator_names",
]

MAX_LENGTH = 1 << 24


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    params: tuple = ()
    text: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "params": [str(p) for p in self.params], "text": self.text}


# ---------------------------------------------------------------------------
# sieves (arrays indexed by n, entry 0 unused)

def _small_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def _sieve(N: int, visit: Callable[[int, np.ndarray], None]) -> np.ndarray:
    """Call ``visit(p, exponents)`` for each prime ``p <= sqrt(N)``; return the cofactors.

    After all small primes are divided out, each ``n <= N`` has a cofactor that
    is 1 or a single prime.  Exponent arrays are not kept, so memory stays O(N).
    """
    rem = np.arange(N + 1, dtype=np.int64)
    e = np.zeros(N + 1, dtype=np.int8)
    for p in _small_primes(int(N**0.5)).tolist():
        e[:] = 0
        pk = p
        while pk <= N:
            e[pk::pk] += 1
            rem[pk::pk] //= p
            pk *= p
        visit(p, e)
    return rem


def _omega_big(N: int) -> np.ndarray:
    om = np.zeros(N + 1, dtype=np.int64)

    def visit(p, e):
        om[p::p] += e[p::p]

    rem = _sieve(N, visit)
    om += rem > 1
    return om


def _omega_distinct(N: int) -> np.ndarray:
    om = np.zeros(N + 1, dtype=np.int64)

    def visit(p, e):
        om[p::p] += 1

    rem = _sieve(N, visit)
    om += rem > 1
    return om


def _mobius(N: int) -> np.ndarray:
    mu = np.ones(N + 1, dtype=np.int64)

    def visit(p, e):
        mu[p::p] *= -1
        mu[p * p::p * p] = 0

    rem = _sieve(N, visit)
    mu[rem > 1] *= -1
    mu[0] = 0
    return mu


def _mfree(N: int, m: int) -> np.ndarray:
    ok = np.ones(N + 1, dtype=np.int64)
    for p in _small_primes(int(N ** (1 / m)) + 1).tolist():
        pm = p**m
        if pm <= N:
            ok[pm::pm] = 0
    ok[0] = 0
    return ok


def _totient_mod(N: int, v: int) -> np.ndarray:
    phi = np.arange(N + 1, dtype=np.int64)

    def visit(p, e):
        phi[p::p] = phi[p::p] // p * (p - 1)

    rem = _sieve(N, visit)
    big = rem > 1
    phi[big] = phi[big] // rem[big] * (rem[big] - 1)
    return phi % v


def _sigma_mod(N: int, m: int, v: int) -> np.ndarray:
    sig = np.ones(N + 1, dtype=np.int64)

    def visit(p, e):
        top = int(e.max())
        # factor for exact exponent k: sum_{i<=k} p^{mi} mod v
        facs = [1]
        pm = pow(p, m, v)
        acc, term = 1, 1
        for _ in range(top):
            term = term * pm % v
            acc = (acc + term) % v
            facs.append(acc)
        table = np.array(facs, dtype=np.int64)
        sig[p::p] = sig[p::p] * table[e[p::p]] % v

    rem = _sieve(N, visit)
    big = rem > 1
    r = rem[big] % v
    t = np.ones_like(r)
    for _ in range(m):
        t = t * r % v
    sig[big] = sig[big] * ((1 + t) % v) % v
    return sig % v


def _prime_char(N: int) -> np.ndarray:
    out = np.zeros(N, dtype=np.int64)
    out[_small_primes(N - 1)] = 1
    return out


def _prime_power_char(N: int) -> np.ndarray:
    out = np.zeros(N, dtype=np.int64)
    for p in _small_primes(N - 1).tolist():
        pk = p
        while pk < N:
            out[pk] = 1
            pk *= p
    return out


# ---------------------------------------------------------------------------
# characteristic sets

def _set_char(members: Callable[[int], list[int]], N: int) -> np.ndarray:
    out = np.zeros(N, dtype=np.int64)
    idx = [x for x in members(N) if 0 <= x < N]
    out[idx] = 1
    return out


def _pow2(N):
    out, x = [], 1
    while x < N:
        out.append(x)
        x *= 2
    return out


def _pow2pm(N):
    out = set()
    x = 1
    while x - 1 < N:
        out.update((x, x - 1))
        x *= 2
    return sorted(out)


def _2n2n1(N):
    out, n = [], 0
    while 2**n * (2**n - 1) < N:
        out.append(2**n * (2**n - 1))
        n += 1
    return out


def _sums_qj_minus_1(q: int):
    """Finite sums of ``q^j - 1`` (``j >= 1``), each term used at most ``q - 1`` times."""
    def members(N):
        reach = np.zeros(N, dtype=bool)
        reach[0] = True
        j = 1
        while q**j - 1 < N:
            t = q**j - 1
            for _ in range(q - 1):
                shifted = np.zeros(N, dtype=bool)
                shifted[t:] = reach[:-t] if t else reach
                reach |= shifted
            j += 1
        return np.flatnonzero(reach).tolist()
    return members


def _parse_poly(coeffs: str) -> list[Fraction]:
    try:
        c = [Fraction(x.strip()) for x in coeffs.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterInvalid(f"bad polynomial coefficients {coeffs!r}") from exc
    while len(c) > 1 and c[0] == 0:
        c.pop(0)
    if not c:
        raise ParameterInvalid("empty polynomial")
    return c  # highest degree first


def _poly_eval(c: list[Fraction], x: int) -> Fraction:
    acc = Fraction(0)
    for a in c:
        acc = acc * x + a
    return acc


def _poly_members(c: list[Fraction], N: int) -> list[int]:
    deg = len(c) - 1
    for i in range(deg + 1):
        if _poly_eval(c, i).denominator != 1:
            raise NotIntegerValued(f"polynomial is not integer-valued at {i}")
    if deg >= 1 and c[0] < 0:
        raise ParameterInvalid("polynomial must be eventually increasing (positive leading coefficient)")
    if deg == 0:
        v = c[0]
        if v < 0:
            raise NotIntegerValued("constant polynomial is negative")
        return [int(v)]
    # beyond this bound p is increasing
    bound = 1 + int(max(abs(a) for a in c[1:]) / abs(c[0])) * deg + deg
    hi = max(bound, 1)
    while _poly_eval(c, hi) < N:
        hi *= 2
    den = 1
    for a in c:
        den = den * a.denominator // math.gcd(den, a.denominator)
    ints = [int(a * den) for a in c]
    big = sum(abs(a) for a in ints) * (hi + 1) ** deg >= 1 << 62
    xs = np.arange(hi + 1, dtype=object if big else np.int64)
    acc = np.zeros(hi + 1, dtype=xs.dtype)
    for a in ints:
        acc = acc * xs + a
    vals = acc // den
    vals = vals[(vals >= 0) & (vals < N)]
    return sorted({int(v) for v in vals})


def poly_char_sequence(coeffs, n: int) -> PrefixView:
    """Indicator of ``{p(i) : i >= 0}`` on ``[0, n)``; coefficients highest degree first."""
    c = _parse_poly(coeffs) if isinstance(coeffs, str) else [Fraction(x) for x in coeffs]
    text = ",".join(str(x) for x in c)
    members = _poly_members(c, n)
    codes = np.zeros(n, dtype=np.int64)
    codes[[x for x in members if x < n]] = 1
    return PrefixView.from_codes(codes, ("0", "1"), name=f"poly:{text}")


# ---------------------------------------------------------------------------
# registry

def _int_param(s: str, what: str, lo: int = 2, hi: int = 1 << 31) -> int:
    try:
        v = int(s)
    except ValueError:
        raise ParameterInvalid(f"{what} must be an integer, got {s!r}") from None
    if not lo <= v <= hi:
        raise ParameterInvalid(f"{what} must be in [{lo}, {hi}], got {v}")
    return v


def parse_generator(text: str) -> GeneratorSpec:
    parts = text.strip().split(":")
    name, args = parts[0], parts[1:]
    if name == "poly":
        if len(args) != 1:
            raise ParameterInvalid("poly needs coefficients, e.g. poly:1,0,0")
        return GeneratorSpec(name, tuple(_parse_poly(args[0])), text)
    if name == "set":
        if not args:
            raise ParameterInvalid("set needs a name, e.g. set:2n2n-1")
        which = args[0]
        if which == "sums-qj-1":
            q = _int_param(args[1], "q") if len(args) > 1 else 2
            return GeneratorSpec("set", (which, q), text)
        if which not in ("2n2n-1", "pow2", "pow2pm") or len(args) > 1:
            raise UnknownGenerator(f"unknown set {which!r}")
        return GeneratorSpec("set", (which,), text)
    arity = {
        "liouville": (0, 0), "mobius": (0, 1), "mobius-sq": (0, 0), "totient": (1, 1),
        "sigma": (2, 2), "omega": (1, 1), "qfree": (1, 1), "primes": (0, 0),
        "prime-powers": (0, 0),
    }
    if name not in arity:
        raise UnknownGenerator(f"unknown generator {name!r}; known: {', '.join(generator_names())}")
    lo, hi = arity[name]
    if not lo <= len(args) <= hi:
        raise ParameterInvalid(f"{name} takes {lo}..{hi} parameters, got {len(args)}")
    if name == "sigma":
        return GeneratorSpec(name, (_int_param(args[0], "m", 0, 64), _int_param(args[1], "v")), text)
    if name == "qfree":
        return GeneratorSpec(name, (_int_param(args[0], "m", 2, 64),), text)
    return GeneratorSpec(name, tuple(_int_param(a, "v") for a in args), text)


def generator_names() -> list[str]:
    return ["liouville", "mobius[:v]", "mobius-sq", "totient:v", "sigma:m:v", "omega:v",
            "qfree:m", "primes", "prime-powers", "poly:c_d,...,c_0", "set:2n2n-1", "set:pow2",
            "set:pow2pm", "set:sums-qj-1[:q]"]


def _values(spec: GeneratorSpec, N: int) -> tuple[np.ndarray, tuple[str, ...], int]:
    """First ``N`` values as (codes, symbols, shift)."""
    name, prm = spec.name, spec.params
    if name in ("liouville", "mobius", "mobius-sq", "totient", "sigma", "omega", "qfree"):
        if name == "liouville":
            vals = np.where(_omega_big(N) % 2 == 0, 1, -1)
        elif name == "mobius":
            vals = _mobius(N)
            if prm:
                vals = vals % prm[0]
        elif name == "mobius-sq":
            vals = _mobius(N) ** 2
        elif name == "totient":
            vals = _totient_mod(N, prm[0])
        elif name == "sigma":
            vals = _sigma_mod(N, prm[0], prm[1])
        elif name == "omega":
            vals = _omega_distinct(N) % prm[0]
        else:
            vals = _mfree(N, prm[0])
        vals = vals[1:N + 1]
        if name == "liouville":
            symbols = ("1", "-1")
        elif name == "mobius" and not prm:
            symbols = ("1", "-1", "0")
        elif name == "mobius-sq" or name == "qfree":
            symbols = ("1", "0")
        else:
            symbols = tuple(str(i) for i in range(prm[-1]))
        pos = {int(s): i for i, s in enumerate(symbols)}
        lut = np.zeros(max(pos) - min(pos) + 1, dtype=np.int64)
        off = min(pos)
        for v, i in pos.items():
            lut[v - off] = i
        return lut[vals - off], symbols, 1
    if name == "primes":
        return _prime_char(N), ("0", "1"), 0
    if name == "prime-powers":
        return _prime_power_char(N), ("0", "1"), 0
    if name == "poly":
        codes = np.zeros(N, dtype=np.int64)
        codes[_poly_members(list(prm), N)] = 1
        return codes, ("0", "1"), 0
    if name == "set":
        which = prm[0]
        fn = {"2n2n-1": _2n2n1, "pow2": _pow2, "pow2pm": _pow2pm}.get(which)
        if fn is None:
            fn = _sums_qj_minus_1(prm[1])
        return _set_char(fn, N), ("0", "1"), 0
    raise UnknownGenerator(name)


def generate(spec: GeneratorSpec | str, n: int) -> PrefixView:
    """Prefix view of a built-in arithmetic sequence, materialised to length ``n``."""
    if isinstance(spec, str):
        spec = parse_generator(spec)
    if n > MAX_LENGTH:
        raise ParameterInvalid(f"length {n} exceeds the sieve limit {MAX_LENGTH}")
    if n < 0:
        raise ParameterInvalid("length must be >= 0")
    codes, symbols, shift = _values(spec, max(n, 1))
    label = spec.text or spec.name

    def fn(N):
        return _values(spec, min(N, MAX_LENGTH))[0]

    view = PrefixView.from_function(fn, symbols, name=label, shift=shift)
    view._codes = codes[:n]
    return view


# ---------------------------------------------------------------------------
# classical morphisms

BUILTIN_MORPHISMS: dict[str, str] = {
    "thue-morse": "alphabet: 0 1\nstart: 0\nrule: 0 -> 0 1\nrule: 1 -> 1 0\n",
    "fibonacci": "alphabet: 0 1\nstart: 0\nrule: 0 -> 0 1\nrule: 1 -> 0\n",
    "period-doubling": "alphabet: 0 1\nstart: 0\nrule: 0 -> 0 1\nrule: 1 -> 0 0\n",
    "rudin-shapiro": (
        "alphabet: a b c d\nstart: a\n"
        "rule: a -> a b\nrule: b -> a c\nrule: c -> d b\nrule: d -> d c\n"
        "coding: a -> 0\ncoding: b -> 0\ncoding: c -> 1\ncoding: d -> 1\n"
    ),
    "paperfolding": (
        "alphabet: a b c d\nstart: a\n"
        "rule: a -> a b\nrule: b -> c b\nrule: c -> a d\nrule: d -> c d\n"
        "coding: a -> 1\ncoding: b -> 1\ncoding: c -> 0\ncoding: d -> 0\n"
    ),
    "cantor": "alphabet: 1 0\nstart: 1\nrule: 1 -> 1 0 1\nrule: 0 -> 0 0 0\n",
    "aab": "alphabet: a b\nstart: a\nrule: a -> a a b\nrule: b -> b\n",
    "kolam": "alphabet: 1 2\nstart: 1\nrule: 1 -> 1 2 1\nrule: 2 -> 1 2 2 2 1\n",
    "m211": "alphabet: 2 1\nstart: 2\nrule: 2 -> 2 1 1\nrule: 1 -> 2\n",
    "m36": "alphabet: a b\nstart: a\nrule: a -> a a a b\nrule: b -> a a a b a a a b\n",
    "grigorchuk": (
        "alphabet: a b c d\nstart: a\n"
        "rule: a -> a c a\nrule: b -> d\nrule: c -> a b a\nrule: d -> c\n"
    ),
}

UNIFORM_BUILTINS = ("thue-morse", "period-doubling", "rudin-shapiro", "paperfolding", "cantor")


def builtin_morphism(name: str) -> Morphism:
    try:
        return parse_morphism(BUILTIN_MORPHISMS[name])
    except KeyError:
        raise UnknownGenerator(f"unknown built-in morphism {name!r}") from None
