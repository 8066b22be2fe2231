import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rzlab.cli import _random_lattice
from rzlab.errors import SingularGramError, UnsupportedModularity
from rzlab.herm_lattice import (
    EElt,
    Lattice,
    brute_norm_exponent,
    dual_of_basis,
    find_isotropic_vector,
    h,
    is_hyperbolic,
    is_pi_modular,
    lattice_from_json,
    lattice_to_json,
    norm_ideal,
    normal_form_basis,
    scale,
    vadd,
)
from rzlab.neighbor_walk import ell_range, hyperbolic_ell, witness_for_class
from rzlab.padic_tower import trace_ideal_exponent

from conftest import ext_for


def _lattices(ext, n, seed=1):
    rng = random.Random(seed)
    return [_random_lattice(ext, rng) for _ in range(n)]


def test_closed_form_dual_matches_generic_inverse(grid_ext):
    for L in _lattices(grid_ext, 40):
        generic = Lattice.from_basis(grid_ext, dual_of_basis(grid_ext, L.basis()))
        assert L.dual() == generic
        assert L.dual().dual() == L


def test_dual_pairing_is_integral(grid_ext):
    for L in _lattices(grid_ext, 15):
        for x in L.basis():
            for y in L.dual().basis():
                v = h(grid_ext, x, y)
                assert v.is_zero() or v.n >= 0


def test_sublattices_match_hnf_of_spans(grid_ext):
    ext = grid_ext
    pi = EElt.pi_pow(ext, 1)
    for L in _lattices(ext, 15):
        b1, b2 = L.basis()
        spans = [(b1, scale(pi, b2))]
        for v in L.residue_lines()[1:]:
            spans.append((v, scale(pi, b1)))
        oracle = {Lattice.from_basis(ext, s).key for s in spans}
        got = {M.key for M in L.sublattices()}
        assert got == oracle
        assert len(got) == ext.F.q + 1
        for M in L.sublattices():
            assert L.contains_lattice(M) and M.contains_lattice(L.scaled(1))


def test_superlattices_match_dual_route(grid_ext):
    for L in _lattices(grid_ext, 15):
        a = {M.key for M in L.superlattices()}
        b = {M.dual().key for M in L.dual().sublattices()}
        assert a == b


def test_norm_ideal_matches_vector_oracle(grid_ext):
    for L in _lattices(grid_ext, 6, seed=7):
        assert norm_ideal(L).ell == brute_norm_exponent(L, method="vector")


def test_norm_ideal_scales_under_pi():
    ext = ext_for("RU", 2, 1, 1)
    for L in _lattices(ext, 20):
        # h(Pi x, Pi x) = pi0 h(x, x)
        assert norm_ideal(L.scaled(1)).ell == norm_ideal(L).ell + 1


@settings(max_examples=30, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.lists(st.integers(0, 1), max_size=6))
def test_hnf_is_basis_invariant(a, b, ds):
    ext = ext_for("RP", 1, 1)
    lo = min(a, b) - 2
    digits = tuple((lo + k, d) for k, d in enumerate(ds) if d and lo + k < a)
    L = Lattice(ext, a, b, digits)
    b1, b2 = L.basis()
    unit = EElt.of(ext, 3)
    # an upper triangular change of basis with unit diagonal
    other = (vadd(scale(unit, b2), scale(EElt.pi_pow(ext, 2), b1)), scale(unit, b1))
    assert Lattice.from_basis(ext, other) == L


def test_from_basis_rejects_dependent_vectors():
    ext = ext_for("RP", 1, 1)
    v = (EElt.of(ext, 1), EElt.of(ext, 1))
    with pytest.raises(SingularGramError):
        Lattice.from_basis(ext, [v, scale(EElt.of(ext, 2), v)])


def test_modularity_of_witnesses(grid_ext):
    ext = grid_ext
    mods = (-1, 0) if ext.kind == "RP" else (0, 1)
    for i in mods:
        for ell in ell_range(ext, i):
            L = witness_for_class(ext, i, ell)
            assert L.modularity() == i
            assert is_pi_modular(L, i)
            assert norm_ideal(L).ell == ell
            assert is_hyperbolic(L, i) == (ell == hyperbolic_ell(ext))


def test_minimal_norm_is_trace_ideal(grid_ext):
    ext = grid_ext
    mods = (-1, 0) if ext.kind == "RP" else (0, 1)
    for i in mods:
        assert trace_ideal_exponent(ext, i) == hyperbolic_ell(ext)


def test_normal_form(grid_ext):
    ext = grid_ext
    mods = (-1, 0) if ext.kind == "RP" else (0, 1)
    for i in mods:
        for ell in ell_range(ext, i):
            L = witness_for_class(ext, i, ell)
            nf = normal_form_basis(L, i)
            assert Lattice.from_basis(ext, nf.basis) == L
            G = nf.gram
            assert G[1][1].is_zero()
            assert (G[1][0] - EElt.pi_pow(ext, i)).is_zero()
            assert nf.hyperbolic == (ell == hyperbolic_ell(ext))
            if not nf.hyperbolic:
                assert nf.x.n == ell


def test_isotropic_vector_on_hyperbolic_lattices(grid_ext):
    ext = grid_ext
    i = 0
    L = witness_for_class(ext, i, hyperbolic_ell(ext))
    iso = find_isotropic_vector(L)
    assert h(ext, iso.vector, iso.vector).is_zero()
    assert L.contains(iso.vector)


def test_unsupported_modularity():
    ext = ext_for("RP", 1, 1)
    with pytest.raises(UnsupportedModularity):
        is_hyperbolic(Lattice(ext, 1, 0, ()), 1)


def test_json_round_trip(grid_ext):
    for L in _lattices(grid_ext, 10):
        assert lattice_from_json(grid_ext, lattice_to_json(L)) == L
