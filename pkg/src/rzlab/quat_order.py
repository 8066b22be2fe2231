"""The quaternion division algebra B over F and explicit O_F-bases of its maximal order.

Elements are stored in the basis (1, s, r, sr) with s^2 = alpha, r^2 = beta and
sr = -rs.  RP uses (s, r) = (delta, Pi) with delta^2 = 1 + 4u; RU uses
(s, r) = (theta, theta~) with theta^2 = 1 - 4 pi0 / t^2 and
theta~^2 = 1 + (t^2 / pi0) u.  Here u is a unit whose residue makes
x^2 + x + u irreducible over k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InputError, NotRUCase, SingularGramError
from .padic_tower import ExtDescriptor, FElt, OFElement, is_norm, make_ext


def non_artin_schreier_residue(F) -> int:
    """Smallest residue class c with x^2 + x + c irreducible over k."""
    k = F.residue_field
    for c in range(1, F.q):
        if not k.has_root([c, 1, 1]):
            return c
    raise AssertionError("x^2 + x + c always has a root")


@dataclass(frozen=True, eq=False)
class QuatDescriptor:
    ext: ExtDescriptor
    u: OFElement
    alpha: FElt
    beta: FElt

    @property
    def F(self):
        return self.ext.F

    @property
    def case(self) -> str:
        return self.ext.kind


def quat_descriptor(ext: ExtDescriptor, u=None) -> QuatDescriptor:
    F = ext.F
    u = F.digit(non_artin_schreier_residue(F)) if u is None else F.element(u)
    four = FElt.of(F, 4)
    uf = FElt.from_of(u)
    if ext.kind == "RP":
        alpha = FElt.of(F, 1) + four * uf
        beta = -FElt.from_of(F.pi0)
    elif ext.kind == "RU":
        t = FElt.from_of(ext.t)
        pi0 = FElt.from_of(F.pi0)
        alpha = FElt.of(F, 1) - four * pi0 / (t * t)
        beta = FElt.of(F, 1) + (t * t / pi0) * uf
    else:
        raise InputError("quaternion bases are defined for RP and RU")
    return QuatDescriptor(ext, u, alpha, beta)


class QuatElement:
    __slots__ = ("D", "x")

    def __init__(self, D: QuatDescriptor, coords: Sequence):
        F = D.F
        self.D = D
        self.x = tuple(c if isinstance(c, FElt) else FElt.of(F, c) for c in coords)

    def __repr__(self):
        return f"QuatElement({list(self.x)})"

    @classmethod
    def scalar(cls, D: QuatDescriptor, c) -> "QuatElement":
        return cls(D, [c, 0, 0, 0])

    def __add__(self, o):
        o = _q(self.D, o)
        return QuatElement(self.D, [a + b for a, b in zip(self.x, o.x)])

    __radd__ = __add__

    def __neg__(self):
        return QuatElement(self.D, [-a for a in self.x])

    def __sub__(self, o):
        return self + (-_q(self.D, o))

    def __rsub__(self, o):
        return _q(self.D, o) - self

    def __mul__(self, o):
        D = self.D
        if isinstance(o, (int, FElt, OFElement)):
            c = FElt.of(D.F, o) if not isinstance(o, FElt) else o
            return QuatElement(D, [c * a for a in self.x])
        al, be = D.alpha, D.beta
        x0, x1, x2, x3 = self.x
        y0, y1, y2, y3 = o.x
        z0 = x0 * y0 + al * x1 * y1 + be * x2 * y2 - al * be * x3 * y3
        z1 = x0 * y1 + x1 * y0 - be * x2 * y3 + be * x3 * y2
        z2 = x0 * y2 + x2 * y0 + al * x1 * y3 - al * x3 * y1
        z3 = x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1
        return QuatElement(D, [z0, z1, z2, z3])

    def __rmul__(self, c):
        return self * c

    def conj(self) -> "QuatElement":
        """Standard involution b -> b'."""
        x0, x1, x2, x3 = self.x
        return QuatElement(self.D, [x0, -x1, -x2, -x3])

    def trd(self) -> FElt:
        return self.x[0] + self.x[0]

    def nrd(self) -> FElt:
        al, be = self.D.alpha, self.D.beta
        x0, x1, x2, x3 = self.x
        return x0 * x0 - al * x1 * x1 - be * x2 * x2 + al * be * x3 * x3

    def inverse(self) -> "QuatElement":
        return self.conj() * self.nrd().inverse()

    def star(self) -> "QuatElement":
        """Pi b' Pi^{-1} (RP) or theta b' theta^{-1} (RU)."""
        g = uniformizer(self.D) if self.D.case == "RP" else theta(self.D)
        return g * self.conj() * g.inverse()

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.x)

    def congruent(self, o) -> bool:
        return (self - o).is_zero()

    def min_valuation(self) -> int | None:
        vals = [c.n for c in self.x if not c.is_zero()]
        return min(vals) if vals else None


def _q(D: QuatDescriptor, o) -> QuatElement:
    return o if isinstance(o, QuatElement) else QuatElement.scalar(D, o)


def quat_mul(a: QuatElement, b: QuatElement) -> QuatElement:
    return a * b


def std_involution(a: QuatElement) -> QuatElement:
    return a.conj()


def reduced_trace(a: QuatElement) -> FElt:
    return a.trd()


def reduced_norm(a: QuatElement) -> FElt:
    return a.nrd()


# ---------------------------------------------------------------------------
# named elements


def s_elem(D):
    return QuatElement(D, [0, 1, 0, 0])


def r_elem(D):
    return QuatElement(D, [0, 0, 1, 0])


def theta(D):
    if D.case != "RU":
        raise NotRUCase("theta is the RU generator")
    return s_elem(D)


def theta_tilde(D):
    if D.case != "RU":
        raise NotRUCase("theta~ is the RU generator")
    return r_elem(D)


def uniformizer(D) -> QuatElement:
    """Pi inside B: r itself (RP) or t(1 + theta)/2 (RU)."""
    if D.case == "RP":
        return r_elem(D)
    t = FElt.from_of(D.ext.t)
    half_t = t / FElt.of(D.F, 2)
    return QuatElement(D, [half_t, half_t, 0, 0])


def pi_tilde(D) -> QuatElement:
    if D.case != "RU":
        raise NotRUCase("Pi~ exists in the RU presentation")
    F = D.F
    c = FElt.from_of(F.pi0) / FElt.from_of(D.ext.t)
    return QuatElement(D, [c, 0, c, 0])


def gamma(D) -> QuatElement:
    """(1 + delta)/2 (RP) or Pi Pi~ / pi0 (RU)."""
    F = D.F
    if D.case == "RP":
        half = FElt.of(F, 1) / FElt.of(F, 2)
        return QuatElement(D, [half, half, 0, 0])
    return uniformizer(D) * pi_tilde(D) * FElt.from_of(F.pi0).inverse()


def integral_basis(D: QuatDescriptor) -> list[QuatElement]:
    if D.case == "RP":
        g, P = gamma(D), uniformizer(D)
        return [QuatElement.scalar(D, 1), g, P, g * P]
    P, Pt = uniformizer(D), pi_tilde(D)
    return [QuatElement.scalar(D, 1), P, Pt, P * Pt * FElt.from_of(D.F.pi0).inverse()]


# ---------------------------------------------------------------------------
# linear algebra over F


def _pivot(rows: list[list[FElt]], col: int, start: int) -> int | None:
    best, bv = None, None
    for i in range(start, len(rows)):
        c = rows[i][col]
        if not c.is_zero() and (bv is None or c.n < bv):
            best, bv = i, c.n
    return best


def det_f(M: list[list[FElt]]) -> FElt:
    """Determinant by elimination with minimal-valuation pivots."""
    rows = [list(r) for r in M]
    n = len(rows)
    F = rows[0][0].F
    det = FElt.of(F, 1)
    for col in range(n):
        p = _pivot(rows, col, col)
        if p is None:
            raise SingularGramError("matrix is singular to working precision")
        if p != col:
            rows[col], rows[p] = rows[p], rows[col]
            det = -det
        piv = rows[col][col]
        det = det * piv
        inv = piv.inverse()
        for i in range(col + 1, n):
            if rows[i][col].is_zero():
                continue
            f = rows[i][col] * inv
            rows[i] = [a - f * b for a, b in zip(rows[i], rows[col])]
    return det


def solve_f(M: list[list[FElt]], rhs: list[FElt]) -> list[FElt]:
    """x with M x = rhs."""
    n = len(M)
    rows = [list(M[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        p = _pivot(rows, col, col)
        if p is None:
            raise SingularGramError("system is singular to working precision")
        rows[col], rows[p] = rows[p], rows[col]
        inv = rows[col][col].inverse()
        rows[col] = [a * inv for a in rows[col]]
        for i in range(n):
            if i != col and not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[col])]
    return [rows[i][n] for i in range(n)]


def coords_in_basis(x: QuatElement, basis: Sequence[QuatElement]) -> list[FElt]:
    M = [[b.x[i] for b in basis] for i in range(4)]
    return solve_f(M, list(x.x))


def trace_gram(basis: Sequence[QuatElement]) -> list[list[FElt]]:
    return [[(a * b).trd() for b in basis] for a in basis]


@dataclass(frozen=True)
class Discriminant:
    det_valuation: int  # v_F(det Trd(u_i u_j))
    reduced: int  # exponent of the reduced discriminant: half of the above


def basis_discriminant(basis: Sequence[QuatElement]) -> Discriminant:
    """v_F of det(Trd(u_i u_j)) and the reduced discriminant exponent.

    For an order of B the determinant is the square of the reduced
    discriminant up to a unit, so the maximal order gives (2, 1).
    """
    d = det_f(trace_gram(basis))
    v = d.n
    return Discriminant(v, v // 2 if v % 2 == 0 else v / 2)


def is_closed_under_mul(basis: Sequence[QuatElement]) -> bool:
    for a in basis:
        for b in basis:
            for c in coords_in_basis(a * b, basis):
                if not c.is_zero() and c.n < 0:
                    return False
    return True


def verify_gamma_relation(D: QuatDescriptor, u=None, digits: int | None = None) -> bool:
    """gamma^2 - gamma - u == 0 to `digits` digits (default: all available)."""
    g = gamma(D)
    F = D.F
    uu = FElt.from_of(D.u if u is None else F.element(u))
    rel = g * g - g - QuatElement.scalar(D, uu)
    need = min(16, (2 * F.precision) // 3) if digits is None else digits
    return all(c.n >= need for c in rel.x)


def gamma_relation_digits(D: QuatDescriptor) -> int:
    """Number of pi0-digits to which gamma^2 - gamma - u vanishes."""
    g = gamma(D)
    rel = g * g - g - QuatElement.scalar(D, FElt.from_of(D.u))
    return min(c.n for c in rel.x)


def non_norm_checks(D: QuatDescriptor) -> dict:
    """Norm verdicts for the elements whose non-normness makes B a division algebra."""
    ext, F = D.ext, D.F
    pi0 = FElt.from_of(F.pi0)
    if D.case == "RU":
        unit = D.beta  # theta~^2
        return {
            "theta_tilde_sq_is_norm": is_norm(unit, ext),
            "pi0_theta_tilde_sq_is_norm": is_norm(pi0 * unit, ext),
        }
    unram = make_ext(F, "UNRAM")
    return {
        "delta_sq_is_norm": is_norm(D.alpha, ext),
        "pi0_delta_sq_is_norm": is_norm(pi0 * D.alpha, ext),
        "minus_pi0_is_norm_from_unramified": is_norm(-pi0, unram),
    }


def quat_check(ext: ExtDescriptor) -> dict:
    D = quat_descriptor(ext)
    basis = integral_basis(D)
    disc = basis_discriminant(basis)
    rep = {
        "case": D.case,
        "u_residue": D.u.residue(),
        "det_valuation": disc.det_valuation,
        "discriminant": disc.reduced,
        "closed_under_multiplication": is_closed_under_mul(basis),
        "gamma_relation": verify_gamma_relation(D),
        "gamma_relation_digits": gamma_relation_digits(D),
        "non_norms": non_norm_checks(D),
    }
    rep["ok"] = (
        disc.reduced == 1
        and rep["closed_under_multiplication"]
        and rep["gamma_relation"]
        and not any(rep["non_norms"].values())
    )
    return rep
