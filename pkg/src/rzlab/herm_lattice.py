"""O_E-lattices in the split hermitian plane (C, h).

C = E^2 with h(x, y) = x1*conj(y2) + x2*conj(y1), linear on the left.
A lattice is stored in Hermite normal form: columns (Pi^a, 0) and (c, Pi^b),
with c reduced modulo Pi^a and kept as its Pi-adic digit expansion.  The
triple (a, b, digits) is an exact canonical key, so equality and hashing
never touch p-adic precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Sequence

from .errors import LiftStall, PrecisionExhausted, SingularGramError, UnsupportedModularity
from .padic_tower import (
    ZERO,
    EElt,
    ExtDescriptor,
    FElt,
    OEElement,
    OFElement,
    inverse_different_exponent,
    norm_solution,
    sqrt_one_plus,
    trace_ideal_exponent,
)

Vector = tuple[EElt, EElt]
Digits = tuple[tuple[int, int], ...]

SUPPORTED_MODULARITY = {"RP": (0, -1), "RU": (0, 1)}


def _e(ext: ExtDescriptor, x) -> EElt:
    return EElt.of(ext, x)


class HermSpace:
    """The split plane: h(e1, e1) = h(e2, e2) = 0, h(e1, e2) = 1."""

    def __init__(self, ext: ExtDescriptor):
        self.ext = ext

    def h(self, x: Vector, y: Vector) -> EElt:
        return x[0] * y[1].conj() + x[1] * y[0].conj()

    def form_matrix(self) -> list[list[EElt]]:
        z, o = _e(self.ext, 0), _e(self.ext, 1)
        return [[z, o], [o, z]]


def h(ext: ExtDescriptor, x: Vector, y: Vector) -> EElt:
    return x[0] * y[1].conj() + x[1] * y[0].conj()


def scale(alpha: EElt, v: Vector) -> Vector:
    return (alpha * v[0], alpha * v[1])


def vadd(v: Vector, w: Vector) -> Vector:
    return (v[0] + w[0], v[1] + w[1])


def gram_of(ext: ExtDescriptor, basis: Sequence[Vector]) -> list[list[EElt]]:
    return [[h(ext, x, y) for y in basis] for x in basis]


def _digits_of(z: EElt, a: int) -> Digits:
    """Sparse Pi-adic digits of z at positions < a."""
    if z.u is None:
        if z.n < a:
            raise PrecisionExhausted("corner entry not resolved modulo Pi^a")
        return ()
    if z.n >= a:
        return ()
    ds = z.u.digits(a - z.n)
    return tuple((z.n + j, d) for j, d in enumerate(ds) if d)


def _elem_of_digits(ext: ExtDescriptor, digits: Digits) -> EElt:
    if not digits:
        return EElt.zero(ext)
    lo = digits[0][0]
    acc = OEElement.of(ext, 0)
    power = OEElement.one(ext)
    pos = lo
    for p, d in digits:
        power = power.mul_pi_pow(p - pos)
        pos = p
        acc = acc + power * OEElement.digit(ext, d)
    return EElt.from_oe(acc, lo)


@dataclass(frozen=True)
class NormIdeal:
    """Nm(L) = pi0^ell O_F."""

    ell: int


@dataclass(frozen=True)
class Lattice:
    """O_E-lattice with basis (Pi^a, 0), (c, Pi^b) in the standard coordinates."""

    ext: ExtDescriptor
    a: int
    b: int
    c: Digits = ()

    # -- canonical form ---------------------------------------------------------
    @property
    def key(self) -> tuple[int, int, Digits]:
        return (self.a, self.b, self.c)

    def key_str(self) -> str:
        body = ",".join(f"{p}:{d}" for p, d in self.c)
        return f"{self.a}|{self.b}|{body}"

    @classmethod
    def from_key_str(cls, ext: ExtDescriptor, s: str) -> "Lattice":
        a, b, body = s.split("|")
        digits = tuple(tuple(int(x) for x in item.split(":")) for item in body.split(",") if item)
        return cls(ext, int(a), int(b), digits)

    @classmethod
    def standard(cls, ext: ExtDescriptor) -> "Lattice":
        return cls(ext, 0, 0, ())

    @classmethod
    def from_basis(cls, ext: ExtDescriptor, cols: Sequence[Vector]) -> "Lattice":
        """Hermite normal form of the O_E-span of two vectors."""
        (x1, y1), (x2, y2) = [(_e(ext, x), _e(ext, y)) for x, y in cols]
        v1, v2 = y1.valuation(), y2.valuation()
        if v1 is ZERO and v2 is ZERO:
            raise SingularGramError("basis vectors are dependent")
        if v2 is not ZERO and (v1 is ZERO or v2 < v1):
            (x1, y1), (x2, y2) = (x2, y2), (x1, y1)
        b = y1.n
        cp = x1 * EElt(ext, 0, y1.u.inverse())
        factor = EElt(ext, y2.n - b, y2.u) if y2.u is not None else EElt(ext, y2.n - b, None)
        rest = x2 - factor * cp
        if rest.u is None:
            raise SingularGramError("basis vectors are dependent to working precision")
        a = rest.n
        return cls(ext, a, b, _digits_of(cp, a))

    # -- explicit data ------------------------------------------------------------
    def corner(self) -> EElt:
        return _elem_of_digits(self.ext, self.c)

    def basis(self) -> list[Vector]:
        ext = self.ext
        return [
            (EElt.pi_pow(ext, self.a), EElt.zero(ext)),
            (self.corner(), EElt.pi_pow(ext, self.b)),
        ]

    def gram(self) -> list[list[EElt]]:
        return gram_of(self.ext, self.basis())

    def contains(self, v: Vector) -> bool:
        x, y = _e(self.ext, v[0]), _e(self.ext, v[1])
        if not y.is_zero() and y.n < self.b:
            return False
        beta = EElt(self.ext, y.n - self.b, y.u)
        rest = x - beta * self.corner()
        return rest.is_zero() or rest.n >= self.a

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(v) for v in other.basis())

    # -- operations -----------------------------------------------------------------
    def scaled(self, i: int) -> "Lattice":
        """Pi^i * L."""
        return Lattice(self.ext, self.a + i, self.b + i, tuple((p + i, d) for p, d in self.c))

    def dual(self) -> "Lattice":
        """L^# = {x : h(x, L) in O_E}.

        With B = [[Pi^a, c], [0, Pi^b]] the dual basis is H * conj(B)^{-T},
        whose normal form has exponents (-b, -a) and corner
        -conj(c) * eps^{-b} * Pi^{-(a+b)}, eps = conj(Pi)/Pi.
        """
        ext = self.ext
        a, b = self.a, self.b
        if not self.c:
            return Lattice(ext, -b, -a, ())
        cc = self.corner().conj() * EElt(ext, -a - b, ext.unit_pow("eps", -b))
        return Lattice(ext, -b, -a, _digits_of(-cc, -b))

    def sublattices(self) -> list["Lattice"]:
        """The q+1 lattices M with Pi*L < M < L, one per line of L/Pi L."""
        ext = self.ext
        out = [Lattice(ext, self.a, self.b + 1, tuple((p + 1, d) for p, d in self.c if p + 1 < self.a))]
        for mu in range(ext.F.q):
            digits = self.c + ((self.a, mu),) if mu else self.c
            out.append(Lattice(ext, self.a + 1, self.b, digits))
        return out

    def superlattices(self) -> list["Lattice"]:
        """The q+1 lattices M with L < M < Pi^{-1} L."""
        return [m.scaled(-1) for m in self.sublattices()]

    def residue_lines(self) -> list[Vector]:
        """Representatives of the q+1 lines of L/Pi L, as primitive vectors of L."""
        b1, b2 = self.basis()
        ext = self.ext
        reps = [b1]
        for lam in range(ext.F.q):
            reps.append(vadd(scale(_e(ext, OEElement.digit(ext, lam)), b1), b2) if lam else b2)
        return reps

    def modularity(self) -> int | None:
        """The i with L = Pi^i L^#, if any."""
        i = self.a + self.b
        return i if is_pi_modular(self, i) else None


# ---------------------------------------------------------------------------
# generic duals (used to cross-check the closed form)


def dual_of_basis(ext: ExtDescriptor, cols: Sequence[Vector]) -> list[Vector]:
    """Columns of H * conj(B)^{-T} for B with the given columns."""
    (b11, b21), (b12, b22) = [(_e(ext, x), _e(ext, y)) for x, y in cols]
    # B = [[b11, b12], [b21, b22]]
    cb = [[b11.conj(), b12.conj()], [b21.conj(), b22.conj()]]
    det = cb[0][0] * cb[1][1] - cb[0][1] * cb[1][0]
    di = det.inverse()
    inv = [[cb[1][1] * di, -cb[0][1] * di], [-cb[1][0] * di, cb[0][0] * di]]
    # transpose, then swap rows (H = antidiag(1, 1))
    t = [[inv[0][0], inv[1][0]], [inv[0][1], inv[1][1]]]
    m = [t[1], t[0]]
    return [(m[0][0], m[1][0]), (m[0][1], m[1][1])]


def gram(L: Lattice) -> list[list[EElt]]:
    return L.gram()


def dual_lattice(L: Lattice) -> Lattice:
    return L.dual()


def is_pi_modular(L: Lattice, i: int) -> bool:
    return L.key == L.dual().scaled(i).key


# ---------------------------------------------------------------------------
# norm ideal


def norm_exponent_from_gram(ext: ExtDescriptor, G) -> int:
    """min v_F over G11, G22, Tr(G12), Tr(Pi*G12), skipping zeros.

    For x = alpha*b1 + beta*b2 one has
    h(x, x) = Nm(alpha) G11 + Nm(beta) G22 + Tr(alpha conj(beta) G12),
    and Tr(G12 O_E) is spanned over O_F by Tr(G12) and Tr(Pi G12).
    """
    gens = [G[0][0].to_f(), G[1][1].to_f(), G[0][1].trace(), (EElt.pi_pow(ext, 1) * G[0][1]).trace()]
    vals = [g.n for g in gens if not g.is_zero()]
    if not vals:
        raise PrecisionExhausted("all norm generators vanish to precision")
    return min(vals)


def norm_ideal(L: Lattice) -> NormIdeal:
    ext = L.ext
    g12 = EElt(ext, L.a + L.b, ext.unit_pow("eps", L.b))
    gens = [g12.trace(), (EElt.pi_pow(ext, 1) * g12).trace()]
    if L.c:
        gens.append((L.corner() * EElt.pibar_pow(ext, L.b)).trace())
    vals = [g.n for g in gens if not g.is_zero()]
    if not vals:
        raise PrecisionExhausted("all norm generators vanish to precision")
    return NormIdeal(min(vals))


@lru_cache(maxsize=64)
def _residue_reps(ext: ExtDescriptor, depth: int) -> tuple[EElt, ...]:
    q = ext.F.q
    return tuple(EElt.of(ext, OEElement.from_digits(ext, ds)) for ds in product(range(q), repeat=depth))


def residue_reps(ext: ExtDescriptor, depth: int) -> list[EElt]:
    """All sum_{j<depth} d_j Pi^j."""
    return list(_residue_reps(ext, depth))


@lru_cache(maxsize=64)
def _rep_data(ext: ExtDescriptor, depth: int):
    return tuple((r, r.conj(), r.norm()) for r in _residue_reps(ext, depth))


def brute_norm_exponent(L: Lattice, depth: int = 2, method: str = "gram") -> int:
    """min v_F(h(x, x)) over x = alpha*b1 + beta*b2 with alpha, beta mod Pi^depth.

    depth = 2 already realises the minimum: changing x by pi0*z moves h(x, x)
    by pi0*Tr(h(x, z)) + pi0^2 h(z, z), which lies in pi0*Nm(L).

    method "vector" forms every x and evaluates h(x, x) directly.  The
    default "gram" visits only primitive x up to units (h(ux, ux) =
    Nm(u) h(x, x) and h(Pi y, Pi y) = pi0 h(y, y)) and evaluates
    h(x, x) = Nm(alpha) G11 + Nm(beta) G22 + Tr(alpha conj(beta) G12).
    """
    ext = L.ext
    vals = []
    if method == "vector":
        b1, b2 = L.basis()
        reps = _residue_reps(ext, depth)
        for r in reps:
            for w in reps:
                x = vadd(scale(r, b1), scale(w, b2))
                vals.append((x[0] * x[1].conj()).trace())
    elif method == "gram":
        G = L.gram()
        g11, g22, g12 = G[0][0].to_f(), G[1][1].to_f(), G[0][1]
        for r, rbar, nr in _rep_data(ext, depth):
            # b1 + r*b2
            vals.append(g11 + nr * g22 + (rbar * g12).trace())
            if r.is_zero() or r.n >= 1:
                # r*b1 + b2
                vals.append(nr * g11 + g22 + (r * g12).trace())
    else:
        raise ValueError(f"unknown method {method!r}")
    best = None
    for val in vals:
        if not val.is_zero() and (best is None or val.n < best):
            best = val.n
    if best is None:
        raise PrecisionExhausted("every sampled h(x, x) vanished")
    return best


# ---------------------------------------------------------------------------
# hyperbolicity


def hyperbolic_exponent(ext: ExtDescriptor, i: int) -> int:
    """Exponent of the minimal norm ideal of a Pi^i-modular lattice: Tr(Pi^i O_E)."""
    return trace_ideal_exponent(ext, i)


def is_hyperbolic(L: Lattice, i: int) -> bool:
    ext = L.ext
    if i not in SUPPORTED_MODULARITY.get(ext.kind, ()):
        raise UnsupportedModularity(f"{ext.kind} hyperbolicity is defined here for i in {SUPPORTED_MODULARITY.get(ext.kind)}")
    if not is_pi_modular(L, i):
        raise UnsupportedModularity(f"lattice is not Pi^{i}-modular")
    target = ext.F.e if ext.kind == "RP" else ext.vt
    return norm_ideal(L).ell == target


# ---------------------------------------------------------------------------
# isotropic vectors and the normal form


@dataclass
class IsotropicVector:
    coeffs: tuple[EElt, EElt]  # in terms of the input basis
    vector: Vector


def solve_norm_equation(ext: ExtDescriptor, target: FElt) -> EElt:
    """z in E with Nm(z) = target, via residue search and a Newton square root."""
    if target.is_zero():
        return EElt.zero(ext)
    b = norm_solution(target.u, ext)
    if b is None:
        raise LiftStall("target is not a norm: the plane is not split")
    r = target.u * b.norm().inverse()
    s = sqrt_one_plus(r)
    return EElt.from_oe(b * OEElement(ext, s, ext.F.zero()), target.n)


def _solve_trace(ext: ExtDescriptor, g: EElt, rhs: FElt) -> EElt | None:
    """beta with Tr(beta * g) = rhs, choosing beta in F or F*Pi; None if impossible."""
    pi = EElt.pi_pow(ext, 1)
    cands = [(g.trace(), _e(ext, 1)), ((pi * g).trace(), pi)]
    cands = [(t, m) for t, m in cands if not t.is_zero()]
    if not cands:
        return None
    t, m = min(cands, key=lambda tm: tm[0].n)
    if rhs.is_zero():
        return EElt.zero(ext)
    return EElt.of(ext, rhs / t) * m


def find_isotropic_vector(L_or_basis) -> IsotropicVector:
    """Primitive v in L with h(v, v) = 0.

    Tries x = b1 + beta*b2; for G22 != 0 this is a norm equation
    Nm(beta + G12/G22) = -det(G)/G22^2, solved by residue search plus Newton.
    """
    if isinstance(L_or_basis, Lattice):
        ext = L_or_basis.ext
        basis = L_or_basis.basis()
    else:
        ext, basis = L_or_basis
    b1, b2 = basis
    G = gram_of(ext, basis)
    one, zero = _e(ext, 1), EElt.zero(ext)
    g11, g22 = G[0][0].to_f(), G[1][1].to_f()
    if g11.is_zero():
        return IsotropicVector((one, zero), b1)
    if g22.is_zero():
        beta = _solve_trace(ext, G[1][0], -g11)
        if beta is None:
            return IsotropicVector((zero, one), b2)
    else:
        w = G[0][1] / EElt.of(ext, g22)
        det = g11 * g22 - G[0][1].norm()
        target = -det / (g22 * g22)
        z = solve_norm_equation(ext, target)
        beta = z - w
    alpha = one
    if not beta.is_zero() and beta.n < 0:
        k = -beta.n
        alpha = EElt.pi_pow(ext, k)
        beta = EElt(ext, 0, beta.u)
    v = vadd(scale(alpha, b1), scale(beta, b2))
    return IsotropicVector((alpha, beta), v)


@dataclass
class NormalForm:
    basis: list[Vector]
    gram: list[list[EElt]]
    x: FElt
    hyperbolic: bool


def normal_form_basis(L: Lattice, i: int) -> NormalForm:
    """Basis (y, v) of a Pi^i-modular L with Gram [[x, conj(Pi)^i], [Pi^i, 0]].

    x is reduced modulo Tr(Pi^i O_E); it vanishes exactly when L is hyperbolic.
    """
    ext = L.ext
    if not is_pi_modular(L, i):
        raise UnsupportedModularity(f"lattice is not Pi^{i}-modular")
    b1, b2 = L.basis()
    iso = find_isotropic_vector(L)
    v = iso.vector
    alpha, beta = iso.coeffs
    other = b2 if (not alpha.is_zero() and alpha.n == 0) else b1
    g = h(ext, other, v)
    if g.is_zero() or g.n != i:
        raise LiftStall("isotropic vector does not pair to Pi^i; precision too low")
    y = scale(EElt.pibar_pow(ext, i) / g, other)
    x = h(ext, y, y).to_f()
    m = trace_ideal_exponent(ext, i)
    F = ext.F
    if x.is_zero() or x.n >= m:
        rhs = -x
    else:
        # canonical representative of x mod pi0^m, taken as exact
        r = FElt(F, x.n, OFElement(F, F.canon(x.u.c, m - x.n), F.precision))
        rhs = r - x
    delta = _solve_trace(ext, EElt.pi_pow(ext, i), rhs)
    if delta is not None and not delta.is_zero():
        y = vadd(y, scale(delta, v))
    basis = [y, v]
    G = gram_of(ext, basis)
    xr = G[0][0].to_f()
    hyp = xr.is_zero()
    return NormalForm(basis, G, FElt(ext.F, xr.n, None) if hyp else xr, hyp)


# ---------------------------------------------------------------------------
# JSON


def _of_json(x) -> list:
    return x.to_list()


def lattice_to_json(L: Lattice) -> dict:
    """Integral basis of Pi^(-shift) L plus the shift."""
    ext = L.ext
    shift = min(L.a, L.b, L.c[0][0] if L.c else L.a)
    Ls = L.scaled(-shift)
    cols = []
    for x, y in Ls.basis():
        col = []
        for z in (x, y):
            w = z.to_oe()
            col.append([w.a.to_list(), w.b.to_list()])
        cols.append(col)
    return {"basis": cols, "shift": shift, "key": L.key_str()}


def lattice_from_json(ext: ExtDescriptor, obj: dict) -> Lattice:
    from .errors import InputError

    try:
        cols = []
        for col in obj["basis"]:
            if len(col) != 2:
                raise InputError("each basis vector needs two coordinates")
            vec = []
            for entry in col:
                a, b = entry
                vec.append(EElt.of(ext, OEElement.of(ext, a, b)))
            cols.append(tuple(vec))
        if len(cols) != 2:
            raise InputError("a lattice basis has exactly two vectors")
        shift = int(obj.get("shift", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed lattice description: {exc}") from exc
    return Lattice.from_basis(ext, cols).scaled(shift)
