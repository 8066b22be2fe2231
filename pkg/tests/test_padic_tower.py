import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from rzlab.errors import InvalidEisenstein, LiftStall, NotAUnit, ReducibleUnramifiedPoly
from rzlab.padic_tower import (
    FElt,
    EElt,
    OEElement,
    ext_from_json,
    inverse_different_bruteforce,
    inverse_different_exponent,
    is_norm,
    make_ext,
    make_field,
    sqrt_one_plus,
)

from conftest import ext_for, hilbert_q2


# ---------------------------------------------------------------- O_F arithmetic


@given(st.integers(0, 2**24 - 1), st.integers(0, 2**24 - 1))
def test_qp_ring_ops_match_integers(a, b):
    F = make_field(1, 1, precision=20)
    x, y = F.element(a), F.element(b)
    mod = 1 << 20
    assert (x * y).congruent(F.element((a * b) % mod))
    assert (x + y).congruent(F.element((a + b) % mod))
    assert (x - y).congruent(F.element((a - b) % mod))


@given(st.integers(0, 2**20 - 1).map(lambda n: 2 * n + 1))
def test_unit_inverse(a):
    F = make_field(1, 1, precision=20)
    assert (F.element(a).inverse() * F.element(a)).congruent(F.one())


def test_non_unit_inverse_raises():
    F = make_field(2, 2)
    with pytest.raises(NotAUnit):
        F.pi0.inverse()


def _sympy_product(F, a, b):
    x, p = sympy.symbols("x p")
    g = sum(c * x**j for j, c in enumerate(F.unram_poly))
    eis = sum(sum(cc * x**j for j, cc in enumerate(c)) * p**i for i, c in enumerate(F.eisenstein))

    def poly(c):
        return sum(c[i * F.f + j] * p**i * x**j for i in range(F.e) for j in range(F.f))

    prod = sympy.expand(poly(a) * poly(b))
    _, r = sympy.reduced(prod, [eis, g], p, x, domain="ZZ")
    P = sympy.Poly(r, p, x)
    out = [0] * (F.e * F.f)
    for (i, j), c in P.terms():
        out[i * F.f + j] = int(c) % (1 << F.K)
    return out


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_tower_multiplication_matches_polynomial_reduction(data):
    F = make_field(2, 2, precision=12)
    n = F.e * F.f
    a = data.draw(st.lists(st.integers(0, 2**F.K - 1), min_size=n, max_size=n))
    b = data.draw(st.lists(st.integers(0, 2**F.K - 1), min_size=n, max_size=n))
    xa = F.element([a[i * F.f:(i + 1) * F.f] for i in range(F.e)])
    xb = F.element([b[i * F.f:(i + 1) * F.f] for i in range(F.e)])
    want = _sympy_product(F, a, b)
    got = F.element([want[i * F.f:(i + 1) * F.f] for i in range(F.e)])
    assert (xa * xb).congruent(got)


def test_pi0_valuation_and_digits():
    F = make_field(2, 2)
    assert F.pi0.valuation() == 1
    assert F.two().valuation() == F.e
    assert F.pi0_pow(5).valuation() == 5


def test_input_validation():
    with pytest.raises(ReducibleUnramifiedPoly):
        make_field(2, 1, unram_poly=(1, 0, 1))
    with pytest.raises(InvalidEisenstein):
        make_field(1, 2, eisenstein=((4,), (0,), (1,)))
    with pytest.raises(InvalidEisenstein):
        make_field(1, 2, eisenstein=((2,), (1,), (1,)))


def test_json_round_trip(grid_ext):
    again = ext_from_json(grid_ext.to_json())
    assert again == grid_ext


# ---------------------------------------------------------------- O_E arithmetic


def test_pi_relation(grid_ext):
    ext = grid_ext
    Pi = ext.Pi
    # Pi is a root of X^2 - t X + pi0 (t = 0 for RP)
    t = ext.t if ext.kind == "RU" else ext.F.zero()
    lhs = Pi * Pi - OEElement.of(ext, t) * Pi + OEElement.of(ext, ext.F.pi0)
    assert lhs.is_zero()
    assert Pi.norm().congruent(ext.F.pi0)
    assert EElt.pi_pow(ext, 1).valuation() == 1


def test_norm_and_trace_multiplicative_additive(grid_ext):
    ext = grid_ext
    a = OEElement.of(ext, 3, 1)
    b = OEElement.of(ext, 1, 2)
    assert (a * b).norm().congruent(a.norm() * b.norm())
    assert (a + b).trace().congruent(a.trace() + b.trace())
    n = a * a.conj()
    assert (n - n.conj()).is_zero()


def test_digits_round_trip(grid_ext):
    ext = grid_ext
    x = OEElement.of(ext, 5, 3)
    ds = x.digits(8)
    assert OEElement.from_digits(ext, ds).digits(8) == ds


# ---------------------------------------------------------------- different, norms


def test_different_formula_matches_trace_scan(grid_ext):
    assert inverse_different_exponent(grid_ext) == inverse_different_bruteforce(grid_ext)


@pytest.mark.parametrize("kind,vt,poly", [("RP", None, "x**2 + 2"), ("RU", 1, "x**2 - 2*x + 2")])
def test_different_matches_discriminant_over_q2(kind, vt, poly):
    x = sympy.symbols("x")
    disc = int(sympy.discriminant(sympy.sympify(poly), x))
    v = sympy.multiplicity(2, disc)
    ext = ext_for(kind, 1, 1, vt)
    assert inverse_different_exponent(ext) == v


@pytest.mark.parametrize("kind,vt,d", [("RP", None, -2), ("RU", 1, -1)])
def test_is_norm_matches_hilbert_symbol(kind, vt, d):
    ext = ext_for(kind, 1, 1, vt)
    F = ext.F
    for a in range(1, 64):
        x = FElt.of(F, a)
        assert is_norm(x, ext) == (hilbert_q2(a, d) == 1), a
        assert is_norm(-x, ext) == (hilbert_q2(-a, d) == 1), -a


def test_is_norm_unramified_parity():
    F = make_field(1, 1)
    ext = make_ext(F, "UNRAM")
    assert is_norm(FElt.of(F, 4), ext)
    assert not is_norm(FElt.of(F, 2), ext)


def test_sqrt_one_plus():
    F = make_field(1, 2)
    r = F.one() + F.pi0_pow(5) * F.element(3)
    s = sqrt_one_plus(r)
    assert (s * s).congruent(r)
    with pytest.raises(LiftStall):
        sqrt_one_plus(F.one() + F.pi0_pow(2))
