"""First-order deformation equations at a hyperbolic intersection point (RU case).

The Hodge filtration is the O_F-span of the columns of V = [Y; I] inside
O_F^4 with basis (e1, e2, Pi e1, Pi e2), Y = [[y11, y12], [y21, y22]].  The
lifting conditions are

* O_E-stability: Pi V = V A for some 2x2 A;
* the signature condition on Lie = O_F^4 / span(V): Pi acts there by -Y,
  whose characteristic polynomial must be (T - Pi)(T - conj(Pi)), i.e. trace t
  and determinant pi0;
* total isotropy of span(V) under the perfect form Phi.

Everything lives in O_F[y11, y12, y21, y22] / (y)^3, a free O_F-module of
rank 15, so ideal questions reduce to module questions over a DVR.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from .errors import DerivationMismatch, NotRUCase
from .padic_tower import EElt, ExtDescriptor, FElt, OEElement

VARS = ("y11", "y12", "y21", "y22")
DRINFELD_TANGENT_DIM = 2


def _mono(idx: tuple[int, ...]) -> tuple[int, int, int, int]:
    e = [0, 0, 0, 0]
    for i in idx:
        e[i] += 1
    return tuple(e)


MONOMIALS = [_mono(c) for d in range(3) for c in combinations_with_replacement(range(4), d)]


class TPoly:
    """Polynomial over F in the y_ij, truncated above total degree 2."""

    __slots__ = ("F", "terms")

    def __init__(self, F, terms: dict | None = None):
        self.F = F
        self.terms = {m: c for m, c in (terms or {}).items() if sum(m) <= 2 and not c.is_zero()}

    @classmethod
    def const(cls, F, c) -> "TPoly":
        return cls(F, {(0, 0, 0, 0): c if isinstance(c, FElt) else FElt.of(F, c)})

    @classmethod
    def var(cls, F, i: int) -> "TPoly":
        return cls(F, {_mono((i,)): FElt.of(F, 1)})

    def _c(self, o) -> "TPoly":
        return o if isinstance(o, TPoly) else TPoly.const(self.F, o)

    def __add__(self, o):
        o = self._c(o)
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out[m] + c if m in out else c
        return TPoly(self.F, out)

    __radd__ = __add__

    def __neg__(self):
        return TPoly(self.F, {m: -c for m, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-self._c(o))

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        o = self._c(o)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                if sum(m) > 2:
                    continue
                out[m] = out[m] + c1 * c2 if m in out else c1 * c2
        return TPoly(self.F, out)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def vector(self) -> list[FElt]:
        z = FElt(self.F, self.F.precision, None)
        return [self.terms.get(m, z) for m in MONOMIALS]

    def linear_part_mod_pi0(self) -> list[int]:
        """Residues of the coefficients of y11, y12, y21, y22."""
        out = []
        for i in range(4):
            c = self.terms.get(_mono((i,)))
            if c is None or c.n > 0:
                out.append(0)
            elif c.n < 0:
                raise ValueError("non-integral coefficient")
            else:
                out.append(c.u.residue())
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in MONOMIALS:
            if m in self.terms:
                mon = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(VARS, m) if k)
                coef = _fmt_coeff(self.terms[m])
                if not mon:
                    parts.append(coef)
                elif coef in ("1", "-1"):
                    parts.append(mon if coef == "1" else "-" + mon)
                else:
                    parts.append(f"{coef}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")


def _fmt_coeff(c: FElt) -> str:
    F = c.F
    u = c.u
    if F.e == 1 and F.f == 1:
        val, mod = u.c[0], 1 << u.prec
        if val > mod // 2:
            val -= mod
        unit = str(val)
    elif all(x == 0 for x in u.c[1:]) and u.c[0] in (1, F.mask):
        unit = "1" if u.c[0] == 1 else "-1"
    else:
        unit = str(u.to_list())
    if c.n == 0:
        return unit
    power = "pi0" if c.n == 1 else f"pi0^{c.n}"
    if unit == "1":
        return power
    if unit == "-1":
        return "-" + power
    return f"{unit}*{power}"


# ---------------------------------------------------------------------------
# the perfect form


def _require_ru(ext: ExtDescriptor):
    if ext.kind != "RU":
        raise NotRUCase("the deformation computation is set up for RU extensions")


def build_phi_matrix(ext: ExtDescriptor) -> list[list[FElt]]:
    """The displayed 4x4 matrix with entries s = t/pi0, -1 + t s and t."""
    _require_ru(ext)
    F = ext.F
    s = FElt.from_of(ext.s)
    t = FElt.from_of(ext.t)
    z, o = FElt(F, F.precision, None), FElt.of(F, 1)
    return [
        [z, s, z, o],
        [z, z, -o, z],
        [z, -o + t * s, z, t],
        [o, z, z, z],
    ]


def pi_matrix(ext: ExtDescriptor) -> list[list[FElt]]:
    """Multiplication by Pi on (e1, e2, Pi e1, Pi e2), acting on columns."""
    F = ext.F
    z, o = FElt(F, F.precision, None), FElt.of(F, 1)
    p, t = FElt.from_of(F.pi0), FElt.from_of(ext.t)
    return [[z, z, -p, z], [z, z, z, -p], [o, z, t, z], [z, o, z, t]]


def phi_from_form(ext: ExtDescriptor) -> list[list[FElt]]:
    """Phi(x, y) = Tr_{E|F}(h(x, Pi^{-1} y) / (t theta)) on the basis (e1, e2, Pi e1, Pi e2).

    h(e1, e2) = Pi, h(e2, e1) = conj(Pi) and t theta = t - 2 Pi.
    """
    _require_ru(ext)
    pi = EElt.pi_pow(ext, 1)
    one = EElt.of(ext, 1)
    zero = EElt.zero(ext)
    c = (EElt.of(ext, OEElement.of(ext, ext.t)) - EElt.of(ext, 2) * pi).inverse()
    basis = [(one, zero), (zero, one), (pi, zero), (zero, pi)]
    H = [[zero, pi], [pi.conj(), zero]]
    pinv = pi.inverse()

    def hh(x, y):
        acc = zero
        for i in range(2):
            for j in range(2):
                acc = acc + x[i] * H[i][j] * y[j].conj()
        return acc

    return [[(c * hh(x, (pinv * y[0], pinv * y[1]))).trace() for y in basis] for x in basis]


def _matmul(A, B):
    n, m, k = len(A), len(B), len(B[0])
    F = A[0][0].F
    z = FElt(F, F.precision, None)
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            acc = z
            for r in range(m):
                acc = acc + A[i][r] * B[r][j]
            row.append(acc)
        out.append(row)
    return out


def _transpose(A):
    return [list(r) for r in zip(*A)]


def adjointness_defect(ext: ExtDescriptor, Phi) -> list[list[FElt]]:
    """P^T Phi - Phi Pbar, which vanishes iff Phi(Pi x, y) = Phi(x, conj(Pi) y)."""
    P = pi_matrix(ext)
    t = FElt.from_of(ext.t)
    F = ext.F
    z = FElt(F, F.precision, None)
    Pbar = [[(t if i == j else z) - P[i][j] for j in range(4)] for i in range(4)]
    L = _matmul(_transpose(P), Phi)
    R = _matmul(Phi, Pbar)
    return [[L[i][j] - R[i][j] for j in range(4)] for i in range(4)]


# ---------------------------------------------------------------------------
# relations


@dataclass
class DeformRelations:
    ext: ExtDescriptor
    families: dict[str, list[TPoly]] = field(default_factory=dict)

    @property
    def generators(self) -> list[TPoly]:
        return [g for fam in self.families.values() for g in fam if not g.is_zero()]

    @property
    def params(self) -> dict:
        return {"e": self.ext.F.e, "f": self.ext.F.f, "vt": self.ext.vt}


def _ys(F):
    return [TPoly.var(F, i) for i in range(4)]


def listed_relations(ext: ExtDescriptor) -> DeformRelations:
    """y11 + y22 - t, y11 y22 - y12 y21 - pi0 and (s y22 + 2) times t, y11, y12, y21."""
    _require_ru(ext)
    F = ext.F
    y11, y12, y21, y22 = _ys(F)
    t = FElt.from_of(ext.t)
    s = FElt.from_of(ext.s)
    p = FElt.from_of(F.pi0)
    a = y22 * s + 2
    return DeformRelations(ext, {
        "trace": [y11 + y22 - t],
        "det": [y11 * y22 - y12 * y21 - p],
        "annihilator": [a * t, a * y11, a * y12, a * y21],
    })


def derive_relations(ext: ExtDescriptor, stability=True, kottwitz=True, isotropy=True) -> DeformRelations:
    """Impose the three lifting conditions on V = [Y; I] symbolically."""
    _require_ru(ext)
    F = ext.F
    y11, y12, y21, y22 = _ys(F)
    zero, one = TPoly(F), TPoly.const(F, 1)
    V = [[y11, y12], [y21, y22], [one, zero], [zero, one]]
    P = pi_matrix(ext)
    Phi = phi_from_form(ext)
    t = FElt.from_of(ext.t)
    p = FElt.from_of(F.pi0)
    fam: dict[str, list[TPoly]] = {}
    if stability:
        PV = [[sum((V[r][j] * P[i][r] for r in range(4)), zero) for j in range(2)] for i in range(4)]
        A = [PV[2], PV[3]]
        fam["stability"] = [
            PV[i][j] - sum((V[i][r] * A[r][j] for r in range(2)), zero) for i in range(4) for j in range(2)
        ]
    if kottwitz:
        B = [[-y11, -y12], [-y21, -y22]]
        fam["trace"] = [B[0][0] + B[1][1] - t]
        fam["det"] = [B[0][0] * B[1][1] - B[0][1] * B[1][0] - p]
    if isotropy:
        fam["isotropy"] = [
            sum((V[r][i] * Phi[r][c] * V[c][j] for r in range(4) for c in range(4)), zero)
            for i in range(2) for j in range(2)
        ]
    return DeformRelations(ext, {k: [g for g in v if not g.is_zero()] for k, v in fam.items()})


# ---------------------------------------------------------------------------
# module membership over O_F


class _Echelon:
    """Echelon basis of the O_F-span of a set of vectors, min-valuation pivots."""

    def __init__(self, rows: list[list[FElt]]):
        rows = [list(r) for r in rows]
        self.pivots: list[tuple[int, list[FElt]]] = []
        n = len(MONOMIALS)
        for col in range(n):
            cand = [r for r in rows if not r[col].is_zero()]
            if not cand:
                continue
            piv = min(cand, key=lambda r: r[col].n)
            rows = [r for r in rows if r is not piv]
            inv = piv[col].inverse()
            new_rows = []
            for r in rows:
                if not r[col].is_zero():
                    f = r[col] * inv
                    r = [a - f * b for a, b in zip(r, piv)]
                new_rows.append(r)
            rows = new_rows
            self.pivots.append((col, piv))

    def contains(self, vec: list[FElt]) -> bool:
        vec = list(vec)
        for col, piv in self.pivots:
            if vec[col].is_zero():
                continue
            if vec[col].n < piv[col].n:
                return False
            f = vec[col] / piv[col]
            vec = [a - f * b for a, b in zip(vec, piv)]
        return all(c.is_zero() for c in vec)


def ideal_module(gens: list[TPoly]) -> _Echelon:
    F = gens[0].F
    mons = [TPoly(F, {m: FElt.of(F, 1)}) for m in MONOMIALS]
    return _Echelon([(g * m).vector() for g in gens for m in mons])


def ideal_contains(gens: list[TPoly], g: TPoly) -> bool:
    return ideal_module(gens).contains(g.vector())


@dataclass
class Comparison:
    derived_in_listed: bool
    listed_in_derived: bool
    missing_from_derived: list[str]
    missing_from_listed: list[str]
    syntactic_differences: list[str]

    @property
    def equal(self) -> bool:
        return self.derived_in_listed and self.listed_in_derived


def _same_up_to_sign(a: TPoly, b: TPoly) -> bool:
    return (a - b).is_zero() or (a + b).is_zero()


def compare_with_listed(derived: DeformRelations) -> Comparison:
    listed = listed_relations(derived.ext)
    D, L = derived.generators, listed.generators
    mD, mL = ideal_module(D), ideal_module(L)
    miss_d = [str(g) for g in L if not mD.contains(g.vector())]
    miss_l = [str(g) for g in D if not mL.contains(g.vector())]
    syn = []
    for name, fam in listed.families.items():
        for g in fam:
            if not any(_same_up_to_sign(g, h) for h in D):
                syn.append(f"{name}: listed generator {g} has no literal counterpart")
    return Comparison(not miss_l, not miss_d, miss_d, miss_l, syn)


def check_derivation(ext: ExtDescriptor) -> Comparison:
    cmp = compare_with_listed(derive_relations(ext))
    if not cmp.equal:
        raise DerivationMismatch(
            "derived ideal differs from the listed one: "
            + "; ".join(cmp.missing_from_derived + cmp.missing_from_listed)
        )
    return cmp


# ---------------------------------------------------------------------------
# tangent dimension


def residue_rank(rows: list[list[int]], k) -> int:
    """Rank over k of vectors with entries given as residue bit masks."""
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = k.inv(rows[rank][col])
        rows[rank] = [k.mul(inv, x) for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x ^ k.mul(f, y) for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def linear_forms_mod_pi0(rel: DeformRelations) -> list[list[int]]:
    return [g.linear_part_mod_pi0() for g in rel.generators]


def tangent_dimension(rel: DeformRelations) -> int:
    """4 minus the rank over k of the linear parts of the generators mod pi0."""
    forms = linear_forms_mod_pi0(rel)
    return 4 - residue_rank(forms, rel.ext.F.residue_field)


def tangent_report(ext: ExtDescriptor) -> dict:
    derived = derive_relations(ext)
    cmp = compare_with_listed(derived)
    no_iso = compare_with_listed(derive_relations(ext, isotropy=False))
    dim = tangent_dimension(derived)
    return {
        "params": derived.params,
        "ideal_equal": cmp.equal,
        "syntactic_differences": cmp.syntactic_differences,
        "without_isotropy_ideal_equal": no_iso.equal,
        "tangent_dim": dim,
        "tangent_dim_listed": tangent_dimension(listed_relations(ext)),
        "drinfeld_dim": DRINFELD_TANGENT_DIM,
        "verdict": "naive != Drinfeld" if dim != DRINFELD_TANGENT_DIM else "no difference detected",
    }
