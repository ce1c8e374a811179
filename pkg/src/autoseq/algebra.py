"""Exact polynomial and matrix algebra over the integers and rationals.

Everything on the certified path is exact: Python integers, ``Fraction``,
and polynomial arithmetic modulo a minimal polynomial for number fields.
Floating point appears only in ``approx`` helpers used for reporting.

Factorisation over Q is square-free decomposition, rational-root stripping,
a modular degree filter, and Kronecker's search for what remains.  That is
enough for alphabets of desk size; polynomials whose unresolved part has
degree above :data:`KRONECKER_DEGREE_LIMIT` raise ``DegreeLimitExceeded``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import IntMatrix, is_primitive
from .errors import DegreeLimitExceeded, NilpotentMatrix, NotPrimitive, SingularMatrix

__all__ = [
    "IntPolynomial",
    "AlgebraicNumber",
    "NumberField",
    "RationalVector",
    "IrrationalCertificate",
    "MultDependence",
    "EigenLattice",
    "EigenvalueConstraint",
    "ResidueOrbit",
    "char_poly",
    "factor",
    "rational_roots",
    "sturm_sequence",
    "count_roots",
    "real_roots",
    "dominant_eigenvalue",
    "perron_vector",
    "mult_dependent",
    "coboundary_constraints",
    "length_residue_orbit",
    "prime_factors",
    "factorint",
    "valuation",
]

KRONECKER_DEGREE_LIMIT = 16
DEFAULT_K_BOUND = 64


# ---------------------------------------------------------------------------
# integer helpers

def factorint(n: int) -> dict[int, int]:
    """Prime factorisation of ``|n|`` by trial division."""
    n = abs(n)
    out: dict[int, int] = {}
    if n < 2:
        return out
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    while p * p <= n:
        for c in (p, p + 2):
            while n % c == 0:
                out[c] = out.get(c, 0) + 1
                n //= c
        p += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_factors(n: int) -> tuple[int, ...]:
    return tuple(sorted(factorint(n)))


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorint(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def valuation(n: int, q: int) -> int:
    """Largest ``v`` with ``q**v | n``; ``n == 0`` gives a large sentinel."""
    if n == 0:
        return 1 << 30
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


# ---------------------------------------------------------------------------
# dense polynomials over Q, constant term first

Poly = tuple  # of Fraction


def _trim(c) -> Poly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _psub(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n))


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(x) for x in a]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lb = Fraction(b[-1])
    for k in range(len(a) - len(b), -1, -1):
        c = r[k + len(b) - 1] / lb
        q[k] = c
        if c:
            for j, y in enumerate(b):
                r[k + j] -= c * y
    return _trim(q), _trim(r[: len(b) - 1])


def _pmonic(a: Poly) -> Poly:
    if not a:
        return a
    lc = Fraction(a[-1])
    return tuple(Fraction(x) / lc for x in a)


def _pgcd(a: Poly, b: Poly) -> Poly:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return _pmonic(a)


def _pderiv(a: Poly) -> Poly:
    return _trim(i * a[i] for i in range(1, len(a)))


def _peval(a: Poly, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _deg(a: Poly) -> int:
    return len(a) - 1


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with integer coefficients, constant term first."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_fractions(cls, coeffs: Iterable) -> "IntPolynomial":
        """Clear denominators and content; the leading coefficient is made positive."""
        c = [Fraction(x) for x in coeffs]
        lcm = 1
        for x in c:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        return cls(tuple(int(x * lcm) for x in c)).primitive_part()

    @classmethod
    def x(cls) -> "IntPolynomial":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * self.coeffs[i] for i in range(1, len(self.coeffs))))

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-x for x in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if not self.coeffs or not other.coeffs:
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return IntPolynomial(tuple(out))

    def __pow__(self, k: int) -> "IntPolynomial":
        out = IntPolynomial((1,))
        for _ in range(k):
            out = out * self
        return out

    def content(self) -> int:
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def primitive_part(self) -> "IntPolynomial":
        if not self.coeffs:
            return self
        g = self.content()
        if self.leading < 0:
            g = -g
        return IntPolynomial(tuple(c // g for c in self.coeffs))

    def divides(self, other: "IntPolynomial") -> bool:
        q, r = _pdivmod(other.fractions(), self.fractions())
        return not r

    def exact_quotient(self, divisor: "IntPolynomial") -> "IntPolynomial":
        q, r = _pdivmod(self.fractions(), divisor.fractions())
        if r or any(x.denominator != 1 for x in q):
            raise ArithmeticError(f"{divisor} does not divide {self} over Z")
        return IntPolynomial(tuple(int(x) for x in q))

    def fractions(self) -> Poly:
        return tuple(Fraction(c) for c in self.coeffs)

    def evaluate_matrix(self, M: IntMatrix) -> IntMatrix:
        acc = IntMatrix.zeros(M.dim)
        eye = IntMatrix.identity(M.dim)
        for c in reversed(self.coeffs):
            acc = acc @ M + eye.scale(c)
        return acc

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            body = str(a) if (a != 1 or i == 0) else ""
            term = f"{body}*{mono}" if body and mono else (body or mono)
            parts.append((sign, term))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, term in parts[1:]:
            s += f" {sign} {term}"
        return s


def char_poly(M: IntMatrix) -> IntPolynomial:
    """``det(xI - M)`` by Berkowitz's division-free algorithm."""
    A = M.to_list()
    n = len(A)
    # Coefficients highest degree first while building.
    poly = [1]
    for k in range(n - 1, -1, -1):
        a = A[k][k]
        R = A[k][k + 1:]
        C = [A[i][k] for i in range(k + 1, n)]
        sub = [row[k + 1:] for row in A[k + 1:]]
        size = n - k
        col = [1, -a]
        vec = C
        for _ in range(size - 1):
            col.append(-sum(r * v for r, v in zip(R, vec)))
            vec = [sum(s * v for s, v in zip(row, vec)) for row in sub]
        new = []
        for i in range(size + 1):
            new.append(sum(col[i - j] * poly[j] for j in range(len(poly)) if 0 <= i - j < len(col)))
        poly = new
    return IntPolynomial(tuple(reversed(poly)))


# ---------------------------------------------------------------------------
# Sturm sequences and real roots

def sturm_sequence(f: IntPolynomial) -> list[Poly]:
    p0 = f.fractions()
    p1 = _pderiv(p0)
    seq = [p0]
    while p1:
        seq.append(p1)
        p0, p1 = p1, tuple(-x for x in _pdivmod(p0, p1)[1])
    return seq


def _variations(signs: Iterable[int]) -> int:
    s = [x for x in signs if x != 0]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _variations_at(seq: list[Poly], x) -> int:
    if x == math.inf:
        return _variations(_sign(p[-1]) for p in seq)
    if x == -math.inf:
        return _variations(_sign(p[-1]) * (-1) ** _deg(p) for p in seq)
    return _variations(_sign(_peval(p, x)) for p in seq)


def count_roots(f: IntPolynomial | list[Poly], a, b) -> int:
    """Number of distinct real roots in ``(a, b]`` (``a`` must not be a root)."""
    seq = f if isinstance(f, list) else sturm_sequence(f)
    return _variations_at(seq, a) - _variations_at(seq, b)


def root_bound(f: IntPolynomial) -> Fraction:
    """Cauchy bound: every root has absolute value below it."""
    lc = abs(f.leading)
    return 1 + Fraction(max(abs(c) for c in f.coeffs[:-1]), lc) if f.degree > 0 else Fraction(1)


def rational_roots(f: IntPolynomial) -> list[Fraction]:
    """All rational roots, by the rational root theorem."""
    c = list(f.coeffs)
    roots = []
    while c and c[0] == 0:
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
        c.pop(0)
    if len(c) < 2:
        return roots
    g = IntPolynomial(tuple(c))
    for p in divisors(c[0]):
        for q in divisors(c[-1]):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if cand not in roots and g(cand) == 0:
                    roots.append(cand)
    return sorted(roots)


# ---------------------------------------------------------------------------
# factorisation over Q

def _squarefree_decomposition(f: IntPolynomial) -> list[tuple[IntPolynomial, int]]:
    """Yun's algorithm; factors are primitive integer polynomials."""
    a = _pmonic(f.fractions())
    if _deg(a) < 1:
        return []
    out = []
    da = _pderiv(a)
    b = _pgcd(a, da)
    c = _pdivmod(a, b)[0]
    d = _psub(_pdivmod(da, b)[0], _pderiv(c))
    i = 1
    while _deg(c) > 0:
        g = _pgcd(c, d)
        if _deg(g) > 0:
            out.append((IntPolynomial.from_fractions(g), i))
        c = _pdivmod(c, g)[0]
        d = _psub(_pdivmod(d, g)[0], _pderiv(c))
        i += 1
    return out


def _mod_poly(f: Sequence[int], p: int) -> list[int]:
    c = [x % p for x in f]
    while c and c[-1] == 0:
        c.pop()
    return c


def _mod_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    r = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - len(b), -1, -1):
        c = r[k + len(b) - 1] * inv % p
        q[k] = c
        if c:
            for j, y in enumerate(b):
                r[k + j] = (r[k + j] - c * y) % p
    r = r[: len(b) - 1]
    while r and r[-1] == 0:
        r.pop()
    return q, r


def _mod_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def _mod_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    while b:
        a, b = b, _mod_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _mod_powmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = _mod_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _mod_divmod(_mod_mul(result, base, p), mod, p)[1]
        base = _mod_divmod(_mod_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _degree_pattern(f: IntPolynomial, p: int) -> list[int] | None:
    """Degrees of the irreducible factors of ``f mod p`` (distinct-degree factorisation).

    Returns None when ``p`` is unsuitable (divides the leading coefficient or
    ``f mod p`` is not square-free).
    """
    fp = _mod_poly(f.coeffs, p)
    if len(fp) != len(f.coeffs):
        return None
    dfp = _mod_poly([i * f.coeffs[i] for i in range(1, len(f.coeffs))], p)
    if len(_mod_gcd(fp, dfp, p)) > 1:
        return None
    inv = pow(fp[-1], -1, p)
    rem = [x * inv % p for x in fp]
    degrees: list[int] = []
    h = [0, 1]
    i = 0
    while len(rem) - 1 >= 2 * (i + 1):
        i += 1
        h = _mod_powmod(h, p, rem, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        while diff and diff[-1] == 0:
            diff.pop()
        g = _mod_gcd(rem, diff, p)
        if len(g) > 1:
            degrees += [i] * ((len(g) - 1) // i)
            rem = _mod_divmod(rem, g, p)[0]
            h = _mod_divmod(h, rem, p)[1]
    if len(rem) > 1:
        degrees.append(len(rem) - 1)
    return degrees


def _possible_factor_degrees(f: IntPolynomial) -> set[int]:
    n = f.degree
    possible = set(range(n + 1))
    primes = [p for p in range(3, 200) if all(p % d for d in range(2, int(p**0.5) + 1))]
    used = 0
    for p in primes:
        pattern = _degree_pattern(f, p)
        if pattern is None:
            continue
        sums = {0}
        for d in pattern:
            sums |= {s + d for s in sums}
        possible &= sums
        used += 1
        if possible <= {0, n} or used >= 8:
            break
    return possible


def _lagrange(xs: Sequence[int], ys: Sequence[int]) -> Poly:
    out: Poly = ()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        term: Poly = (Fraction(yi),)
        for j, xj in enumerate(xs):
            if j != i:
                term = _pmul(term, (Fraction(-xj, xi - xj), Fraction(1, xi - xj)))
        out = _padd(out, term)
    return out


def _kronecker_split(f: IntPolynomial) -> tuple[IntPolynomial, IntPolynomial] | None:
    """Find a non-trivial factorisation of a square-free primitive ``f`` or None."""
    n = f.degree
    degrees = sorted(e for e in _possible_factor_degrees(f) if 1 <= e <= n // 2)
    if not degrees:
        return None
    if n > KRONECKER_DEGREE_LIMIT:
        raise DegreeLimitExceeded(
            f"factoring degree-{n} polynomial exceeds the Kronecker search limit "
            f"({KRONECKER_DEGREE_LIMIT})"
        )
    points = [x for x in range(-24, 25) if f(x) != 0]
    points.sort(key=lambda x: (len(divisors(f(x))), abs(x)))
    for e in degrees:
        xs = points[: e + 1]
        choices = []
        for k, x in enumerate(xs):
            ds = divisors(f(x))
            choices.append(ds if k == 0 else ds + [-d for d in ds])
        for ys in itertools.product(*choices):
            g = _lagrange(xs, ys)
            if _deg(g) != e or any(c.denominator != 1 for c in g):
                continue
            gi = IntPolynomial(tuple(int(c) for c in g)).primitive_part()
            if f.leading % gi.leading:
                continue
            if gi.divides(f):
                return gi, f.exact_quotient(gi).primitive_part()
    return None


def _factor_squarefree(f: IntPolynomial) -> list[IntPolynomial]:
    out = []
    for r in rational_roots(f):
        lin = IntPolynomial((-r.numerator, r.denominator))
        out.append(lin)
        f = f.exact_quotient(lin).primitive_part() if f.degree > 1 else IntPolynomial((1,))
    if f.degree < 1:
        return out
    stack = [f]
    while stack:
        g = stack.pop()
        if g.degree <= 3:
            out.append(g)
            continue
        split = _kronecker_split(g)
        if split is None:
            out.append(g)
        else:
            stack.extend(split)
    return out


def factor(f: IntPolynomial) -> list[tuple[IntPolynomial, int]]:
    """Irreducible factors over Q with multiplicities (primitive, positive leading coefficient).

    The constant content is dropped.  Factors are sorted by (degree, coefficients).
    """
    if f.degree < 1:
        return []
    acc: dict[IntPolynomial, int] = {}
    for part, mult in _squarefree_decomposition(f):
        for g in _factor_squarefree(part):
            g = g.primitive_part()
            acc[g] = acc.get(g, 0) + mult
    return sorted(acc.items(), key=lambda gm: (gm[0].degree, gm[0].coeffs))


# ---------------------------------------------------------------------------
# algebraic numbers

INTEGER = "Integer"
NON_INTEGER_RATIONAL = "NonIntegerRational"
IRRATIONAL = "Irrational"


@dataclass(frozen=True)
class AlgebraicNumber:
    """A real algebraic number: minimal polynomial plus an isolating interval.

    The root lies in the half-open interval ``(lo, hi]`` and it is the only
    root of the minimal polynomial there.
    """

    minimal_polynomial: IntPolynomial
    interval: tuple[Fraction, Fraction]
    kind: str
    value: Fraction | None = None

    @classmethod
    def rational(cls, v) -> "AlgebraicNumber":
        v = Fraction(v)
        kind = INTEGER if v.denominator == 1 else NON_INTEGER_RATIONAL
        mp = IntPolynomial((-v.numerator, v.denominator))
        return cls(mp, (v - Fraction(1, 2), v + Fraction(1, 2)), kind, v)

    @property
    def degree(self) -> int:
        return self.minimal_polynomial.degree

    @property
    def is_rational(self) -> bool:
        return self.kind != IRRATIONAL

    @property
    def is_integer(self) -> bool:
        return self.kind == INTEGER

    def refine(self, width: Fraction) -> "AlgebraicNumber":
        if self.is_rational:
            return self
        lo, hi = self.interval
        seq = sturm_sequence(self.minimal_polynomial)
        while hi - lo >= width:
            mid = (lo + hi) / 2
            if count_roots(seq, mid, hi) == 1:
                lo = mid
            else:
                hi = mid
        return AlgebraicNumber(self.minimal_polynomial, (lo, hi), self.kind, None)

    def approx(self) -> float:
        if self.value is not None:
            return float(self.value)
        lo, hi = self.refine(Fraction(1, 10**18)).interval
        return float((lo + hi) / 2)

    __float__ = approx

    def to_dict(self) -> dict:
        lo, hi = self.interval
        return {
            "minimal_polynomial": list(self.minimal_polynomial.coeffs),
            "minimal_polynomial_text": str(self.minimal_polynomial),
            "interval": [str(lo), str(hi)],
            "classification": self.kind,
            "value": None if self.value is None else str(self.value),
            "approx": self.approx(),
        }

    def __str__(self) -> str:
        if self.value is not None:
            return str(self.value)
        return f"root of {self.minimal_polynomial} near {self.approx():.6g}"


def real_roots(g: IntPolynomial) -> list[AlgebraicNumber]:
    """Real roots of an irreducible ``g``, sorted increasingly."""
    if g.degree < 1:
        return []
    if g.degree == 1:
        return [AlgebraicNumber.rational(Fraction(-g.coeffs[0], g.coeffs[1]))]
    seq = sturm_sequence(g)
    B = root_bound(g)
    out: list[tuple[Fraction, Fraction]] = []

    def isolate(lo, hi, n):
        if n == 0:
            return
        if n == 1:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        left = count_roots(seq, lo, mid)
        isolate(lo, mid, left)
        isolate(mid, hi, n - left)

    isolate(-B, B, count_roots(seq, -B, B))
    return [AlgebraicNumber(g, iv, IRRATIONAL) for iv in sorted(out)]


def _less(a: AlgebraicNumber, b: AlgebraicNumber) -> bool:
    """Strict order of two distinct real algebraic numbers."""
    if a.value is not None and b.value is not None:
        return a.value < b.value
    width = Fraction(1)
    while True:
        a, b = a.refine(width), b.refine(width)
        if a.value is not None:
            lo, hi = b.interval
            if a.value <= lo:
                return True
            if a.value >= hi:
                return False
        elif b.value is not None:
            lo, hi = a.interval
            if hi <= b.value:
                return True
            if lo >= b.value:
                return False
        else:
            if a.interval[1] <= b.interval[0]:
                return True
            if b.interval[1] <= a.interval[0]:
                return False
        width /= 16


def _abs_at_least_one(a: AlgebraicNumber) -> bool:
    if a.value is not None:
        return abs(a.value) >= 1
    width = Fraction(1)
    while True:
        lo, hi = a.refine(width).interval
        if lo >= 1 or hi <= -1:
            return True
        if lo >= -1 and hi <= 1:
            return False
        width /= 4


def dominant_eigenvalue(M: IntMatrix) -> AlgebraicNumber:
    """Spectral radius of a nonnegative integer matrix, certified.

    For a nonnegative matrix the spectral radius is its largest real
    eigenvalue, so it suffices to compare the largest real root of each
    irreducible factor of the characteristic polynomial.
    """
    f = char_poly(M)
    best: AlgebraicNumber | None = None
    for g, _ in factor(f):
        roots = real_roots(g)
        if not roots:
            continue
        top = roots[-1]
        if best is None or _less(best, top):
            best = top
    if best is None or (best.value is not None and best.value <= 0):
        raise NilpotentMatrix("spectral radius is 0")
    if not best.is_rational:
        best = best.refine(Fraction(1, 2))
    return best


# ---------------------------------------------------------------------------
# number fields Q[x]/(m(x))

class NumberField:
    """Arithmetic in ``Q(θ)`` with ``θ`` a root of an irreducible polynomial.

    Elements are tuples of ``Fraction`` coordinates in the basis ``1, θ, θ², …``.
    """

    def __init__(self, minimal_polynomial: IntPolynomial):
        self.minimal_polynomial = minimal_polynomial
        self.modulus = _pmonic(minimal_polynomial.fractions())
        self.degree = minimal_polynomial.degree

    def element(self, coeffs: Iterable) -> tuple:
        c = _trim(Fraction(x) for x in coeffs)
        if len(c) > self.degree:
            c = _pdivmod(c, self.modulus)[1]
        return tuple(c) + (Fraction(0),) * (self.degree - len(c))

    def rational(self, v) -> tuple:
        return self.element((v,))

    @property
    def zero(self) -> tuple:
        return self.element(())

    @property
    def one(self) -> tuple:
        return self.element((1,))

    @property
    def gen(self) -> tuple:
        return self.element((0, 1))

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        return self.element(_pmul(_trim(a), _trim(b)))

    def inv(self, a):
        # extended Euclid on (a, modulus)
        r0, r1 = self.modulus, _trim(a)
        if not r1:
            raise ZeroDivisionError("inverse of zero in number field")
        s0, s1 = (), (Fraction(1),)
        while _deg(r1) > 0:
            q, r = _pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1))
        c = r1[0]
        return self.element(tuple(x / c for x in s1))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return not any(a)

    def is_rational(self, a) -> bool:
        return not any(a[1:])

    def power(self, a, k: int):
        result, base = self.one, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def approx(self, a, theta: float) -> float:
        return float(sum(float(c) * theta**i for i, c in enumerate(a)))


class _Rationals:
    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def div(a, b):
        return a / b

    @staticmethod
    def is_zero(a):
        return a == 0


def _nullspace(rows: list[list], F) -> list[list]:
    """Basis of the right null space of a matrix over the field ``F``."""
    A = [list(r) for r in rows]
    m = len(A)
    n = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if not F.is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        A[r] = [F.div(x, p) for x in A[r]]
        for i in range(m):
            if i != r and not F.is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [F.zero] * n
        v[fc] = F.one
        for i, pc in enumerate(pivots):
            v[pc] = F.sub(F.zero, A[i][fc])
        basis.append(v)
    return basis


@dataclass(frozen=True)
class RationalVector:
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(Fraction(x) for x in self.entries))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def to_dict(self) -> dict:
        return {"entries": [str(x) for x in self.entries], "approx": [float(x) for x in self.entries]}


@dataclass(frozen=True)
class IrrationalCertificate:
    """Evidence that the normalised Perron eigenvector has an irrational entry.

    ``field_vector`` holds each normalised entry in the basis ``1, ρ, ρ², …``
    of ``Q(ρ)``; an entry is irrational iff a non-constant coordinate is
    non-zero.
    """

    minimal_polynomial: IntPolynomial
    field_vector: tuple[tuple[Fraction, ...], ...]
    irrational_indices: tuple[int, ...]
    approx: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "minimal_polynomial": list(self.minimal_polynomial.coeffs),
            "minimal_polynomial_text": str(self.minimal_polynomial),
            "irrational_indices": list(self.irrational_indices),
            "field_vector": [[str(c) for c in e] for e in self.field_vector],
            "approx": list(self.approx),
        }


def _eigenvector_rational(M: IntMatrix, value: Fraction) -> list[Fraction]:
    rows = [[Fraction(M[i, j]) - (value if i == j else 0) for j in range(M.dim)] for i in range(M.dim)]
    ns = _nullspace(rows, _Rationals)
    if len(ns) != 1:
        raise ArithmeticError(f"eigenspace of {value} has dimension {len(ns)}")
    return ns[0]


def _eigenvector_field(M: IntMatrix, K: NumberField) -> list[tuple]:
    theta = K.gen
    rows = [
        [K.sub(K.rational(M[i, j]), theta) if i == j else K.rational(M[i, j]) for j in range(M.dim)]
        for i in range(M.dim)
    ]
    ns = _nullspace(rows, K)
    if len(ns) != 1:
        raise ArithmeticError(f"eigenspace has dimension {len(ns)} over the number field")
    return ns[0]


def perron_vector(M: IntMatrix, rho: AlgebraicNumber | None = None) -> RationalVector | IrrationalCertificate:
    """Normalised (sum 1) Perron eigenvector, or a certificate that it is irrational."""
    if not is_primitive(M):
        raise NotPrimitive("Perron vector requested for a non-primitive matrix")
    if rho is None:
        rho = dominant_eigenvalue(M)
    if rho.is_rational:
        v = _eigenvector_rational(M, rho.value)
        s = sum(v)
        return RationalVector(tuple(x / s for x in v))
    K = NumberField(rho.minimal_polynomial)
    v = _eigenvector_field(M, K)
    s = v[0]
    for x in v[1:]:
        s = K.add(s, x)
    normed = [K.div(x, s) for x in v]
    irr = tuple(i for i, x in enumerate(normed) if not K.is_rational(x))
    if not irr:
        raise ArithmeticError("Perron vector of an irrational eigenvalue came out rational")
    theta = rho.approx()
    approx = tuple(K.approx(x, theta) for x in normed)
    return IrrationalCertificate(rho.minimal_polynomial, tuple(normed), irr, approx)


# ---------------------------------------------------------------------------
# multiplicative dependence

DEPENDENT = "Dependent"
INDEPENDENT_UP_TO = "IndependentUpTo"
NEVER_INTEGER_POWER_UP_TO = "NeverIntegerPowerUpTo"


@dataclass(frozen=True)
class MultDependence:
    kind: str
    k_bound: int
    s: int | None = None
    t: int | None = None
    proven: bool = False
    integer_power: tuple[int, int] | None = None  # (k, alpha**k) when some power is an integer
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "k_bound": self.k_bound,
            "s": self.s,
            "t": self.t,
            "proven": self.proven,
            "integer_power": list(self.integer_power) if self.integer_power else None,
            "note": self.note,
        }


def _integer_dependence(c: int, q: int) -> tuple[int, int] | None:
    """Smallest ``(s, t)`` with ``c**s == q**t``, or None."""
    if c < 2:
        return None
    fc, fq = factorint(c), factorint(q)
    if set(fc) != set(fq):
        return None
    ratios = {Fraction(fc[p], fq[p]) for p in fc}
    if len(ratios) != 1:
        return None
    r = ratios.pop()
    return r.denominator, r.numerator


def mult_dependent(alpha: AlgebraicNumber, q: int, k_bound: int = DEFAULT_K_BOUND) -> MultDependence:
    """Search for ``alpha**s == q**t`` exactly.

    ``proven`` marks outcomes that hold for every exponent, not just up to
    ``k_bound`` (prime factorisation for integers; for irrational ``alpha``,
    a real conjugate of different absolute value rules out rational powers).
    """
    if q < 2 or k_bound < 1:
        raise ValueError("need q >= 2 and k_bound >= 1")
    if alpha.kind == INTEGER:
        c = int(alpha.value)
        dep = _integer_dependence(c, q)
        if dep:
            return MultDependence(DEPENDENT, k_bound, dep[0], dep[1], True, (1, c))
        return MultDependence(INDEPENDENT_UP_TO, k_bound, proven=True, integer_power=(1, c),
                              note="prime factorisations are not proportional")
    if alpha.kind == NON_INTEGER_RATIONAL:
        return MultDependence(NEVER_INTEGER_POWER_UP_TO, k_bound, proven=True,
                              note="a non-integer rational has no integer power")
    K = NumberField(alpha.minimal_polynomial)
    x = K.gen
    pw = K.one
    for k in range(1, k_bound + 1):
        pw = K.mul(pw, x)
        if K.is_rational(pw):
            c = pw[0]
            if c.denominator != 1:
                return MultDependence(NEVER_INTEGER_POWER_UP_TO, k_bound, proven=True,
                                      note=f"alpha^{k} = {c} is rational but not an integer")
            dep = _integer_dependence(int(c), q)
            if dep:
                return MultDependence(DEPENDENT, k_bound, k * dep[0], dep[1], True, (k, int(c)))
            return MultDependence(INDEPENDENT_UP_TO, k_bound, proven=True, integer_power=(k, int(c)),
                                  note=f"alpha^{k} = {c} is independent of {q}")
    proven, note = _has_smaller_conjugate(alpha)
    return MultDependence(NEVER_INTEGER_POWER_UP_TO, k_bound, proven=proven, note=note)


def _has_smaller_conjugate(alpha: AlgebraicNumber) -> tuple[bool, str]:
    # alpha^k rational forces every conjugate beta to satisfy |beta| = |alpha|.
    a = alpha.refine(Fraction(1, 64))
    lo, hi = a.interval
    seq = sturm_sequence(a.minimal_polynomial)
    B = root_bound(a.minimal_polynomial)
    if lo > 0:
        inside = count_roots(seq, -lo, lo)
        outside = count_roots(seq, -B, -hi) + count_roots(seq, hi, B)
        if inside or outside:
            return True, "a real conjugate has a different absolute value, so no power is rational"
    return False, "no rational power found up to the bound"


# ---------------------------------------------------------------------------
# coboundary constraints on dynamical eigenvalues

@dataclass(frozen=True)
class EigenLattice:
    eigenvalue: AlgebraicNumber
    # eigenvector entries in Q(ψ), basis 1, ψ, ψ², …
    eigenvector: tuple[tuple[Fraction, ...], ...]
    normalization: str
    coordinate_sum: tuple[Fraction, ...]

    def to_dict(self) -> dict:
        return {
            "eigenvalue": self.eigenvalue.to_dict(),
            "eigenvector": [[str(c) for c in e] for e in self.eigenvector],
            "normalization": self.normalization,
            "coordinate_sum": [str(c) for c in self.coordinate_sum],
        }


@dataclass(frozen=True)
class EigenvalueConstraint:
    """Restrictions on ``t`` for candidate dynamical eigenvalues ``exp(2πit)``.

    Any admissible ``t`` decomposes as ``t1 + t2`` with ``t1·Mⁿ → 0`` and
    ``t2·Mⁿ`` integral for large ``n``; when ``M`` is invertible the
    denominator of the rational part of ``t`` can only involve primes
    dividing ``det M``.
    """

    det: int
    allowed_primes: tuple[int, ...]
    lattices: tuple[EigenLattice, ...]
    t1_forced_zero: bool | None
    normalization: str = "last coordinate 1"
    residues: dict = field(default_factory=dict)

    def admits(self, t: Fraction) -> bool:
        """Whether a rational ``t`` survives the denominator restriction."""
        return set(prime_factors(Fraction(t).denominator)) <= set(self.allowed_primes)

    def admits_order(self, q: int) -> bool:
        return set(prime_factors(q)) <= set(self.allowed_primes)

    def to_dict(self) -> dict:
        return {
            "det": self.det,
            "allowed_primes": list(self.allowed_primes),
            "lattices": [l.to_dict() for l in self.lattices],
            "t1_forced_zero": self.t1_forced_zero,
            "normalization": self.normalization,
            "residues": self.residues,
        }


def _normalise_last(vec: list, K) -> tuple[list, str]:
    for i in range(len(vec) - 1, -1, -1):
        if not K.is_zero(vec[i]):
            c = vec[i]
            label = "last coordinate 1" if i == len(vec) - 1 else f"coordinate {i} equal to 1"
            return [K.div(x, c) for x in vec], label
    raise ArithmeticError("zero eigenvector")


def coboundary_constraints(M: IntMatrix) -> EigenvalueConstraint:
    det = M.det()
    if det == 0:
        raise SingularMatrix("transition matrix is singular")
    f = char_poly(M)
    lattices = []
    real_count = 0
    small_real = False
    for g, mult in factor(f):
        for root in real_roots(g):
            real_count += mult
            if not _abs_at_least_one(root):
                small_real = True
                continue
            # one lattice per basis vector when the eigenspace is not a line
            if root.is_rational:
                K = NumberField(IntPolynomial((0, 1)))  # Q itself, unused generator
                rows = [[Fraction(M[i, j]) - (root.value if i == j else 0) for j in range(M.dim)]
                        for i in range(M.dim)]
                basis = [[K.rational(x) for x in v] for v in _nullspace(rows, _Rationals)]
            else:
                K = NumberField(g)
                theta = K.gen
                rows = [[K.sub(K.rational(M[i, j]), theta) if i == j else K.rational(M[i, j])
                         for j in range(M.dim)] for i in range(M.dim)]
                basis = _nullspace(rows, K)
            for vec in basis:
                vec, label = _normalise_last(vec, K)
                s = vec[0]
                for x in vec[1:]:
                    s = K.add(s, x)
                lattices.append(EigenLattice(root, tuple(vec), label, s))
    if small_real:
        forced = False
    elif real_count == M.dim:
        forced = True
    else:
        forced = None
    return EigenvalueConstraint(det, prime_factors(det), tuple(lattices), forced)


@dataclass(frozen=True)
class ResidueOrbit:
    """Orbit of the length vector ``(|φⁿ(a)|)_a`` modulo ``modulus``.

    ``eventually_zero`` is exact: the orbit either reaches the zero vector or
    enters a cycle avoiding it.
    """

    modulus: int
    eventually_zero: bool | None
    zero_at: int | None
    cycle_start: int | None
    cycle_length: int | None
    cycle: tuple[tuple[int, ...], ...]
    head: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "eventually_zero": self.eventually_zero,
            "zero_at": self.zero_at,
            "cycle_start": self.cycle_start,
            "cycle_length": self.cycle_length,
            "cycle": [list(v) for v in self.cycle[:8]],
            "head": [list(v) for v in self.head],
        }


def length_residue_orbit(M: IntMatrix, modulus: int, max_steps: int = 200_000,
                         head: int = 6) -> ResidueOrbit:
    """Follow ``lₙ = 1·Mⁿ mod modulus`` from ``n = 1`` until it hits zero or cycles."""
    exact = [tuple(M.column_sums())]
    for _ in range(head - 1):
        exact.append(M.row_vector_times(exact[-1]))
    v = tuple(x % modulus for x in M.column_sums())
    seen: dict[tuple[int, ...], int] = {}
    orbit: list[tuple[int, ...]] = []
    n = 1
    while n <= max_steps:
        if not any(v):
            return ResidueOrbit(modulus, True, n, None, None, (), tuple(exact))
        if v in seen:
            start = seen[v]
            cyc = tuple(orbit[start - 1:])
            return ResidueOrbit(modulus, False, None, start, n - start, cyc, tuple(exact))
        seen[v] = n
        orbit.append(v)
        v = tuple(x % modulus for x in M.row_vector_times(v))
        n += 1
    return ResidueOrbit(modulus, None, None, None, None, (), tuple(exact))
