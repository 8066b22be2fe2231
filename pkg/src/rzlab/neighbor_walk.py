"""Index-1 neighbors between Pi^i-modular lattices and their norm-class tallies."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import CaseInapplicable, UnsupportedModularity
from .herm_lattice import (
    SUPPORTED_MODULARITY,
    EElt,
    Lattice,
    is_hyperbolic,
    is_pi_modular,
    norm_ideal,
)
from .padic_tower import ExtDescriptor, FElt


@dataclass
class NeighborTally:
    counts: dict[tuple[int, bool], int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_json(self) -> list[dict]:
        return [
            {"ell": ell, "hyperbolic": hyp, "count": n}
            for (ell, hyp), n in sorted(self.counts.items())
        ]

    def __eq__(self, other):
        if isinstance(other, NeighborTally):
            other = other.counts
        return {k: v for k, v in self.counts.items() if v} == {k: v for k, v in dict(other).items() if v}


def residue_lines(L: Lattice):
    return L.residue_lines()


def sublattices_index1(L: Lattice) -> list[Lattice]:
    return L.sublattices()


def superlattices_index1(L: Lattice) -> list[Lattice]:
    return L.superlattices()


def superlattices_via_dual(L: Lattice) -> list[Lattice]:
    """Same set as superlattices_index1, computed as duals of sublattices of the dual."""
    return [M.dual() for M in L.dual().sublattices()]


def classify(L: Lattice, i: int) -> tuple[int, bool]:
    return norm_ideal(L).ell, is_hyperbolic(L, i)


def modular_neighbors(L: Lattice, from_i: int, to_i: int) -> tuple[NeighborTally, list[Lattice]]:
    """Index-1 neighbors of a Pi^from_i-modular L that are Pi^to_i-modular.

    Going up in i means sublattices, going down means superlattices.
    """
    ext = L.ext
    allowed = SUPPORTED_MODULARITY.get(ext.kind, ())
    if from_i not in allowed or to_i not in allowed or abs(from_i - to_i) != 1:
        raise UnsupportedModularity(f"no neighbor relation {from_i} -> {to_i} for {ext.kind}")
    if not is_pi_modular(L, from_i):
        raise UnsupportedModularity(f"input lattice is not Pi^{from_i}-modular")
    cands = L.sublattices() if to_i > from_i else L.superlattices()
    found = [M for M in cands if is_pi_modular(M, to_i)]
    tally = Counter(classify(M, to_i) for M in found)
    return NeighborTally(dict(tally)), found


# ---------------------------------------------------------------------------
# witnesses and the expected tables


def hyperbolic_ell(ext: ExtDescriptor) -> int:
    return ext.F.e if ext.kind == "RP" else ext.vt


def ell_range(ext: ExtDescriptor, i: int) -> range:
    """Norm exponents realised by Pi^i-modular lattices."""
    top = hyperbolic_ell(ext)
    lo = 1 if (ext.kind == "RU" and i == 1) else 0
    return range(lo, top + 1)


def witness_lattice(ext: ExtDescriptor, i: int, ell: int | None) -> Lattice:
    """The lattice with basis (a, 1), (Pi^i, 0) and Gram [[x, conj(Pi)^i], [Pi^i, 0]].

    x = pi0^ell, or x = 0 (ell None) for the hyperbolic class; a is chosen
    with Tr(a) = x.
    """
    F = ext.F
    if ell is None:
        a = EElt.zero(ext)
    else:
        x = FElt(F, ell, F.one())
        if ext.kind == "RP":
            a = EElt.of(ext, x / FElt.of(F, 2))
        else:
            a = EElt.of(ext, x / FElt.from_of(ext.t)) * EElt.pi_pow(ext, 1)
    cols = [(a, EElt.of(ext, 1)), (EElt.pi_pow(ext, i), EElt.zero(ext))]
    return Lattice.from_basis(ext, cols)


def witness_for_class(ext: ExtDescriptor, i: int, ell: int) -> Lattice:
    return witness_lattice(ext, i, None if ell == hyperbolic_ell(ext) else ell)


@dataclass(frozen=True)
class Case:
    ident: str
    from_i: int
    to_i: int
    hyperbolic: bool


CASES = {
    "RP": [Case("1", -1, 0, True), Case("2", -1, 0, False), Case("3", 0, -1, True), Case("4", 0, -1, False)],
    "RU": [Case("1", 0, 1, True), Case("2", 0, 1, False), Case("3", 1, 0, True), Case("4", 1, 0, False)],
}


def expected_tally(ext: ExtDescriptor, case: Case, ell: int) -> dict[tuple[int, bool], int]:
    q = ext.F.q
    top = hyperbolic_ell(ext)
    ident = case.ident
    if ext.kind == "RP":
        if ident == "1":
            return {(top, True): q + 1}
        if ident == "2":
            return {(ell + 1, ell + 1 == top): 1, (ell, False): q}
        if ident == "3":
            return {(top, True): 2, (top - 1, False): q - 1}
        out = {(ell, False): 1}
        if ell != 0:
            out[(ell - 1, False)] = q
        return out
    if ident == "1":
        return {(top, True): q + 1}
    if ident == "2":
        out = {(ell + 1, ell + 1 == top): 1}
        if ell != 0:
            out[(ell, False)] = q
        return out
    if ident == "3":
        return {(top, True): 2, (top - 1, False): q - 1}
    if top < 2:
        raise CaseInapplicable("only hyperbolic Pi-modular lattices exist when v(t) = 1")
    return {(ell - 1, False): q, (ell, False): 1}


def case_ells(ext: ExtDescriptor, case: Case) -> list[int]:
    top = hyperbolic_ell(ext)
    if case.hyperbolic:
        return [top]
    return [ell for ell in ell_range(ext, case.from_i) if ell != top]


def verify_neighbor_props(ext: ExtDescriptor) -> dict:
    """Run every neighbor-count case on witness lattices and compare with the tables."""
    if ext.kind not in CASES:
        raise UnsupportedModularity("neighbor counts are defined for ramified extensions")
    rows = []
    for case in CASES[ext.kind]:
        try:
            ells = case_ells(ext, case)
            if not ells:
                raise CaseInapplicable("no non-hyperbolic class in this range")
            for ell in ells:
                expected = expected_tally(ext, case, ell)
                L = witness_for_class(ext, case.from_i, ell)
                got_ell, got_hyp = classify(L, case.from_i)
                tally, _ = modular_neighbors(L, case.from_i, case.to_i)
                ok = (got_ell, got_hyp) == (ell, case.hyperbolic) and tally == expected
                rows.append({
                    "case": case.ident,
                    "from_i": case.from_i,
                    "to_i": case.to_i,
                    "ell": ell,
                    "expected": NeighborTally(expected).to_json(),
                    "observed": tally.to_json(),
                    "total": tally.total,
                    "status": "pass" if ok else "fail",
                })
        except CaseInapplicable as exc:
            rows.append({"case": case.ident, "from_i": case.from_i, "to_i": case.to_i, "status": "skipped", "reason": str(exc)})
    rows.sort(key=lambda r: (r["case"], r.get("ell", -1)))
    cases = {}
    for r in rows:
        st = cases.setdefault(r["case"], "pass")
        if r["status"] == "fail":
            cases[r["case"]] = "fail"
        elif r["status"] == "skipped" and st == "pass":
            cases[r["case"]] = "skipped"
    return {
        "kind": ext.kind,
        "q": ext.F.q,
        "e": ext.F.e,
        "vt": ext.vt,
        "rows": rows,
        "cases": cases,
        "all_pass": all(v != "fail" for v in cases.values()),
    }


def isotropic_line_count(L: Lattice) -> int:
    """Isotropic lines in L/Pi L for s(x, y) = h(x, y) mod Pi (RU, unimodular L)."""
    ext = L.ext
    if ext.kind != "RU":
        raise UnsupportedModularity("isotropic line count is defined for RU")
    if not is_pi_modular(L, 0):
        raise UnsupportedModularity("lattice is not unimodular")
    n = 0
    for v in L.residue_lines():
        val = (v[0] * v[1].conj()).trace()
        if val.is_zero() or val.n >= 1:
            n += 1
    return n


def expected_isotropic_line_count(L: Lattice) -> int:
    return L.ext.F.q + 1 if norm_ideal(L).ell >= 1 else 1
