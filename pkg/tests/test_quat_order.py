import pytest
import sympy

from rzlab.errors import NotRUCase
from rzlab.padic_tower import FElt
from rzlab.quat_order import (
    QuatElement,
    basis_discriminant,
    gamma,
    integral_basis,
    is_closed_under_mul,
    non_norm_checks,
    quat_check,
    quat_descriptor,
    theta,
    verify_gamma_relation,
)

from conftest import ext_for, hilbert_q2


def _matrix_model(alpha, beta):
    """2x2 matrices over Q(sqrt(alpha)) realising s^2 = alpha, r^2 = beta, sr = -rs."""
    sq = sympy.sqrt(alpha)
    one = sympy.eye(2)
    s = sympy.Matrix([[sq, 0], [0, -sq]])
    r = sympy.Matrix([[0, beta], [1, 0]])
    return [one, s, r, s * r]


def _to_matrix(model, coords):
    return sum((sympy.Rational(c) * m for c, m in zip(coords, model)), sympy.zeros(2))


@pytest.mark.parametrize(
    "kind,vt,alpha,beta,basis",
    [
        # (1 + delta)/2 with delta^2 = 5, Pi = r with r^2 = -2
        ("RP", None, 5, -2, [(1, 0, 0, 0), ("1/2", "1/2", 0, 0), (0, 0, 1, 0), (0, 0, "1/2", "1/2")]),
        # t = pi0 = 2: theta^2 = -1, theta~^2 = 3, Pi = 1 + theta, Pi~ = 1 + theta~
        ("RU", 1, -1, 3, [(1, 0, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0), ("1/2", "1/2", "1/2", "1/2")]),
    ],
)
def test_q2_discriminant_against_matrix_model(kind, vt, alpha, beta, basis):
    assert hilbert_q2(alpha, beta) == -1  # a division algebra
    model = _matrix_model(alpha, beta)
    mats = [_to_matrix(model, b) for b in basis]
    G = sympy.Matrix(4, 4, lambda i, j: sympy.simplify((mats[i] * mats[j]).trace()))
    det = sympy.nsimplify(G.det())
    v = sympy.multiplicity(2, sympy.numer(det)) - sympy.multiplicity(2, sympy.denom(det))
    assert v == 2
    sub = [mats[0], 2 * mats[1], mats[2], mats[3]]
    Gs = sympy.Matrix(4, 4, lambda i, j: sympy.simplify((sub[i] * sub[j]).trace()))
    assert sympy.nsimplify(Gs.det()) == 4 * det
    ext = ext_for(kind, 1, 1, vt)
    D = quat_descriptor(ext)
    assert FElt.of(ext.F, alpha).congruent(D.alpha) and FElt.of(ext.F, beta).congruent(D.beta)
    ours = integral_basis(D)
    for mine, want in zip(ours, basis):
        for c, w in zip(mine.x, want):
            w = sympy.Rational(w)
            assert c.congruent(FElt.of(ext.F, int(w.p)) / FElt.of(ext.F, int(w.q)))
    disc = basis_discriminant(ours)
    assert (disc.det_valuation, disc.reduced) == (v, 1)
    assert basis_discriminant([ours[0], ours[1] * 2, ours[2], ours[3]]).det_valuation == v + 2


def test_maximal_order(grid_ext):
    D = quat_descriptor(grid_ext)
    B = integral_basis(D)
    assert is_closed_under_mul(B)
    d = basis_discriminant(B)
    assert (d.det_valuation, d.reduced) == (2, 1)


def test_suborder_has_larger_discriminant(grid_ext):
    D = quat_descriptor(grid_ext)
    B = integral_basis(D)
    sub = [B[0], B[1] * 2, B[2], B[3]]
    d = basis_discriminant(sub)
    # scaling one vector by 2 multiplies det by 2^2 = pi0^(2e)
    assert d.det_valuation == 2 + 2 * grid_ext.F.e


def test_gamma_relation(grid_ext):
    D = quat_descriptor(grid_ext)
    assert verify_gamma_relation(D, digits=16)
    g = gamma(D)
    assert g.trd().congruent(FElt.of(D.F, 1))
    assert g.nrd().congruent(-FElt.from_of(D.u))
    assert not verify_gamma_relation(D, u=D.u + D.F.one() * 2)


def test_non_norms(grid_ext):
    checks = non_norm_checks(quat_descriptor(grid_ext))
    assert checks and not any(checks.values())


def test_reduced_norm_multiplicative_and_involutions(grid_ext):
    D = quat_descriptor(grid_ext)
    a = QuatElement(D, [1, 2, 3, 1])
    b = QuatElement(D, [3, 1, 0, 2])
    assert (a * b).nrd().congruent(a.nrd() * b.nrd())
    assert (a * a.conj()).congruent(QuatElement.scalar(D, a.nrd()))
    assert a.star().star().congruent(a)
    assert (a * b).conj().congruent(b.conj() * a.conj())


def test_theta_only_in_ru():
    with pytest.raises(NotRUCase):
        theta(quat_descriptor(ext_for("RP", 1, 1)))


def test_quat_check_report(grid_ext):
    rep = quat_check(grid_ext)
    assert rep["ok"] and rep["gamma_relation_digits"] >= 16
