from fractions import Fraction

import numpy as np
import pytest
import sympy

from conftest import morph
from autoseq.algebra import (
    DEPENDENT,
    INDEPENDENT_UP_TO,
    INTEGER,
    IRRATIONAL,
    NEVER_INTEGER_POWER_UP_TO,
    AlgebraicNumber,
    IntPolynomial,
    IrrationalCertificate,
    RationalVector,
    char_poly,
    coboundary_constraints,
    count_roots,
    dominant_eigenvalue,
    factor,
    factorint,
    length_residue_orbit,
    mult_dependent,
    perron_vector,
    rational_roots,
    real_roots,
    valuation,
)
from autoseq.core import IntMatrix, transition_matrix
from autoseq.errors import NotPrimitive, SingularMatrix

X = sympy.Symbol("x")


def sympy_charpoly(rows) -> list[int]:
    p = sympy.Matrix(rows).charpoly(X)
    return [int(c) for c in reversed(p.all_coeffs())]


def sympy_poly(f: IntPolynomial):
    return sympy.Poly(list(reversed(f.coeffs)), X)


# characteristic polynomial

def test_char_poly_grigorchuk(grig):
    f = char_poly(transition_matrix(grig))
    assert f.coeffs == (2, -1, -2, -2, 1)
    assert rational_roots(f) == []


def test_char_poly_fibonacci(fib):
    assert char_poly(transition_matrix(fib)).coeffs == (-1, -1, 1)


@pytest.mark.parametrize("seed", range(12))
def test_char_poly_matches_sympy(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 7))
    rows = rng.integers(-5, 6, size=(d, d)).tolist()
    assert list(char_poly(IntMatrix(tuple(map(tuple, rows)))).coeffs) == sympy_charpoly(rows)


def test_cayley_hamilton_example():
    M = IntMatrix(((3, 6, 0), (1, 2, 4), (7, 0, 1)))
    assert char_poly(M).evaluate_matrix(M) == IntMatrix.zeros(3)


# factoring

@pytest.mark.parametrize("coeffs", [
    (2, -1, -2, -2, 1),
    (-1, -1, 1),
    (0, -2, 1, 1),          # x(x-1)(x+2)
    (1, 0, 0, 0, 0, 0, 1),  # x^6 + 1
    (-1, 0, 0, 0, 0, 0, 0, 0, 1),
    (4, 0, -5, 0, 1),
    (1, 2, 1) ,
])
def test_factor_matches_sympy(coeffs):
    f = IntPolynomial(coeffs)
    ours = sorted((tuple(g.coeffs), m) for g, m in factor(f))
    _, theirs = sympy.factor_list(sympy_poly(f))
    want = []
    for g, m in theirs:
        c = [int(x) for x in reversed(g.all_coeffs())]
        if c[-1] < 0:
            c = [-x for x in c]
        want.append((tuple(c), m))
    assert ours == sorted(want)


def test_factor_product_reconstructs():
    f = IntPolynomial((2, -1, -2, -2, 1)) * IntPolynomial((-3, 0, 1)) ** 2
    prod = IntPolynomial((1,))
    for g, m in factor(f):
        prod = prod * g ** m
    assert prod.primitive_part() == f.primitive_part()


def test_rational_roots():
    f = IntPolynomial((-6, 11, -6, 1))  # (x-1)(x-2)(x-3)
    assert rational_roots(f) == [1, 2, 3]
    assert rational_roots(IntPolynomial((-1, 0, 2))) == []
    assert rational_roots(IntPolynomial((-1, 2))) == [Fraction(1, 2)]


def test_sturm_count_matches_numpy():
    f = IntPolynomial((2, -1, -2, -2, 1))
    roots = [r.real for r in np.roots(list(reversed(f.coeffs))) if abs(r.imag) < 1e-9]
    assert count_roots(f, -10, 10) == len(roots)
    assert len(real_roots(f)) == 2


# dominant eigenvalue

def test_dominant_eigenvalue_fibonacci(fib):
    rho = dominant_eigenvalue(transition_matrix(fib))
    assert rho.kind == IRRATIONAL
    assert rho.minimal_polynomial.coeffs == (-1, -1, 1)
    assert rho.approx() == pytest.approx((1 + 5 ** 0.5) / 2, rel=1e-12)


def test_dominant_eigenvalue_integer(tm, aab):
    rho = dominant_eigenvalue(transition_matrix(tm))
    assert rho.kind == INTEGER and rho.value == 2
    assert dominant_eigenvalue(transition_matrix(aab)).value == 2


@pytest.mark.parametrize("name_rows", [
    [[1, 1], [1, 0]],
    [[0, 1, 1], [1, 0, 1], [1, 1, 1]],
    [[2, 1, 0], [0, 1, 1], [1, 0, 1]],
])
def test_dominant_eigenvalue_matches_numpy(name_rows):
    M = IntMatrix(tuple(map(tuple, name_rows)))
    rho = dominant_eigenvalue(M)
    want = max(abs(np.linalg.eigvals(np.array(name_rows, dtype=float))))
    assert rho.approx() == pytest.approx(want, rel=1e-10)


# Perron vector

def test_perron_vector_fibonacci_irrational(fib):
    cert = perron_vector(transition_matrix(fib))
    assert isinstance(cert, IrrationalCertificate)
    phi = (1 + 5 ** 0.5) / 2
    assert cert.approx[0] == pytest.approx(phi / (1 + phi), rel=1e-12)
    assert sum(cert.approx) == pytest.approx(1.0)


def test_perron_vector_m211(m211):
    v = perron_vector(transition_matrix(m211))
    assert isinstance(v, RationalVector)
    assert list(v) == [Fraction(1, 2), Fraction(1, 2)]


def test_perron_vector_requires_primitive(aab):
    with pytest.raises(NotPrimitive):
        perron_vector(transition_matrix(aab))


def test_perron_vector_matches_numpy(grig):
    M = transition_matrix(grig)
    cert = perron_vector(M)
    w, V = np.linalg.eig(np.array(M.to_list(), dtype=float))
    v = np.abs(V[:, np.argmax(w.real)].real)
    v /= v.sum()
    assert np.allclose(cert.approx, v)


# multiplicative dependence

def test_mult_dependence_integers():
    r = mult_dependent(AlgebraicNumber.rational(4), 2)
    assert r.kind == DEPENDENT and (r.s, r.t) == (1, 2) and r.proven
    r = mult_dependent(AlgebraicNumber.rational(8), 4)
    assert (r.s, r.t) == (2, 3)
    assert mult_dependent(AlgebraicNumber.rational(6), 2).kind == INDEPENDENT_UP_TO


def test_mult_dependence_golden_ratio(fib):
    rho = dominant_eigenvalue(transition_matrix(fib))
    r = mult_dependent(rho, 2)
    assert r.kind == NEVER_INTEGER_POWER_UP_TO and r.proven


def test_mult_dependence_sqrt2():
    rho = real_roots(IntPolynomial((-2, 0, 1)))[-1]
    r = mult_dependent(rho, 2)
    assert r.kind == DEPENDENT and (r.s, r.t) == (2, 1)


def test_mult_dependence_non_integer_rational():
    r = mult_dependent(AlgebraicNumber.rational(Fraction(3, 2)), 2)
    assert r.kind == NEVER_INTEGER_POWER_UP_TO and r.proven


# coboundary / residue orbits

def test_coboundary_fibonacci(fib):
    c = coboundary_constraints(transition_matrix(fib))
    assert c.det == -1 and c.allowed_primes == ()
    assert all(not c.admits_order(q) for q in range(2, 65))
    assert c.admits(Fraction(0))


def test_coboundary_m211(m211):
    c = coboundary_constraints(transition_matrix(m211))
    assert c.det == -2 and c.allowed_primes == (2,)
    assert c.admits(Fraction(3, 8)) and not c.admits(Fraction(1, 3))


def test_coboundary_singular(tm):
    with pytest.raises(SingularMatrix):
        coboundary_constraints(transition_matrix(tm))


def test_residue_orbit_m211(m211):
    orb = length_residue_orbit(transition_matrix(m211), 2)
    assert orb.eventually_zero is False
    assert orb.cycle == ((1, 1),)


def test_residue_orbit_uniform_hits_zero(tm):
    orb = length_residue_orbit(transition_matrix(tm), 4)
    assert orb.eventually_zero is True and orb.zero_at == 2


def test_length_vectors_match_naive(m211):
    M = transition_matrix(m211)
    v = M.column_sums()
    rules = {"1": "2", "2": "211"}
    for n in range(1, 10):
        for a, L in zip(m211.alphabet.symbols, v):
            w = a
            for _ in range(n):
                w = "".join(rules[c] for c in w)
            assert len(w) == L
        v = M.row_vector_times(v)


# integer helpers

def test_factorint_and_valuation():
    for n in (1, 2, 360, 2 ** 31 - 1, 600851475143):
        assert factorint(n) == {int(p): e for p, e in sympy.factorint(n).items()}
    assert valuation(40, 2) == 3
    assert valuation(7, 5) == 0


def test_coboundary_repeated_eigenvalue():
    # eigenspace of 2 is the whole plane
    c = coboundary_constraints(IntMatrix(((2, 0), (0, 2))))
    assert c.allowed_primes == (2,)
    assert len(c.lattices) == 2
