import math

import numpy as np
import pytest
import sympy

from autoseq.errors import NotIntegerValued, ParameterInvalid, UnknownGenerator
from autoseq.seqlib import (
    BUILTIN_MORPHISMS,
    builtin_morphism,
    generate,
    parse_generator,
    poly_char_sequence,
)

V = 65537  # prime modulus large enough that reductions never bite below N


def values(spec, n):
    p = generate(spec, n)
    return [int(s) for s in p.word(n)]


def ones(p, n):
    return [i for i, s in enumerate(p.word(n)) if s == "1"]


def coprime_pairs(rng, count, hi):
    out = []
    while len(out) < count:
        a, b = (int(x) for x in rng.integers(1, hi, size=2))
        if math.gcd(a, b) == 1 and a * b < 4000:
            out.append((a, b))
    return out


def test_liouville_first_values():
    assert values("liouville", 6) == [1, -1, -1, 1, -1, 1]


def test_liouville_matches_sympy():
    got = values("liouville", 2000)
    for n in range(1, 2001):
        assert got[n - 1] == (-1) ** sum(sympy.factorint(n).values())


def test_mobius_square_first_values():
    assert values("mobius-sq", 8) == [1, 1, 1, 0, 1, 1, 1, 0]


def test_mobius_matches_sympy_and_square_is_abs():
    mu = values("mobius", 3000)
    mu2 = values("mobius-sq", 3000)
    for n in range(1, 3001):
        assert mu[n - 1] == sympy.mobius(n)
        assert mu2[n - 1] == abs(mu[n - 1])


def test_shift_recorded():
    assert generate("liouville", 10).shift == 1
    assert generate("primes", 10).shift == 0


def test_2n2n1_members():
    assert ones(generate("set:2n2n-1", 256), 256) == [0, 2, 12, 56, 240]


def test_primes_match_sympy():
    assert ones(generate("primes", 5000), 5000) == list(sympy.primerange(0, 5000))


def test_prime_powers():
    got = ones(generate("prime-powers", 300), 300)
    want = [n for n in range(2, 300) if len(sympy.factorint(n)) == 1]
    assert got == want


def test_totient_and_sigma_match_sympy():
    phi = values(f"totient:{V}", 4000)
    sig = values(f"sigma:1:{V}", 4000)
    for n in range(1, 4001):
        assert phi[n - 1] == sympy.totient(n) % V
        assert sig[n - 1] == sympy.divisor_sigma(n, 1) % V


def test_multiplicativity_spot_checks():
    rng = np.random.default_rng(11)
    N = 4000
    phi = values(f"totient:{V}", N)
    sig = values(f"sigma:2:{V}", N)
    lam = values("liouville", N)
    for a, b in coprime_pairs(rng, 200, 200):
        assert phi[a * b - 1] == phi[a - 1] * phi[b - 1] % V
        assert sig[a * b - 1] == sig[a - 1] * sig[b - 1] % V
    for _ in range(200):
        a, b = (int(x) for x in rng.integers(1, 63, size=2))
        assert lam[a * b - 1] == lam[a - 1] * lam[b - 1]


def test_omega_and_qfree():
    om = values("omega:5", 500)
    cube = values("qfree:3", 500)
    for n in range(1, 501):
        f = sympy.factorint(n)
        assert om[n - 1] == len(f) % 5
        assert cube[n - 1] == int(all(e < 3 for e in f.values()))


# polynomial characteristic sequences

def test_poly_squares():
    assert ones(poly_char_sequence([1, 0, 0], 20), 20) == [0, 1, 4, 9, 16]


def test_poly_linear():
    assert ones(poly_char_sequence([2, 1], 10), 10) == [1, 3, 5, 7, 9]


def test_poly_triangular():
    assert ones(poly_char_sequence("1/2,1/2,0", 30), 30) == [0, 1, 3, 6, 10, 15, 21, 28]


def test_poly_not_integer_valued():
    with pytest.raises(NotIntegerValued):
        poly_char_sequence("1/2,0", 30)


# registry

def test_unknown_generator():
    with pytest.raises(UnknownGenerator):
        parse_generator("nope")
    with pytest.raises(UnknownGenerator):
        parse_generator("set:whatever")


def test_bad_parameters():
    with pytest.raises(ParameterInvalid):
        parse_generator("totient:1")
    with pytest.raises(ParameterInvalid):
        parse_generator("totient")
    with pytest.raises(ParameterInvalid):
        generate("primes", (1 << 24) + 1)


def test_generate_deterministic_and_extendable():
    a = generate("liouville", 1000)
    b = generate("liouville", 5000)
    assert a.word(1000) == b.word(1000)
    assert len(a.codes(3000)) == 3000
    assert a.word(3000) == b.word(3000)


def test_builtin_morphisms_parse():
    for name in BUILTIN_MORPHISMS:
        assert builtin_morphism(name).start
    with pytest.raises(UnknownGenerator):
        builtin_morphism("nope")
