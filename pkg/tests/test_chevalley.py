import itertools
import random
from fractions import Fraction

import pytest

from helpers import ce_betti, rand_valid_algebra
from nlie.catalog import heisenberg3, sl2, zero_algebra
from nlie.chevalley import (CECochain, ce_basis, ce_differential,
                            ce_differential_matrix, ce_dim, ce_eval,
                            ce_space_keys, ce_zero, make_ce_cochain)
from nlie.cochains import basis_cochains, eval_keys_z, from_bracket, \
    gla_bracket
from nlie.cohomology import differential_matrix
from nlie.errors import DimensionMismatch
from nlie.linalg import basis_vec, vec_zero

F = Fraction


def test_ce_dimensions():
    assert ce_dim(3, 0) == 3
    assert ce_dim(3, 1) == 9
    assert ce_dim(3, 2) == 9
    assert ce_dim(3, 3) == 3
    assert ce_space_keys(3, 2) == [(0, 1), (0, 2), (1, 2)]


def test_ce_eval_signs():
    psi = make_ce_cochain(3, 2, {(0, 1): basis_vec(3, 2)})
    assert ce_eval(psi, (0, 1)) == basis_vec(3, 2)
    assert ce_eval(psi, (1, 0)) == tuple(-c for c in basis_vec(3, 2))
    assert ce_eval(psi, (1, 1)) == vec_zero(3)
    with pytest.raises(DimensionMismatch):
        ce_eval(psi, (0,))


def test_ce_degree0_is_ad():
    alg = sl2()
    dh = ce_differential(alg, CECochain(3, 0, {(): basis_vec(3, 0)}))
    # ad_h: e -> 2e, f -> -2f
    assert dh.entries == {(1,): (F(0), F(2), F(0)),
                          (2,): (F(0), F(0), F(-2))}


def test_ce_squares_to_zero():
    rng = random.Random(7)
    for alg in (sl2(), heisenberg3(), rand_valid_algebra(rng, sl2())):
        v = CECochain(3, 0, {(): basis_vec(3, 1)})
        assert ce_differential(alg, ce_differential(alg, v)).entries == {}
        for psi in ce_basis(3, 1) + ce_basis(3, 2):
            dd = ce_differential(alg, ce_differential(alg, psi))
            assert dd.entries == {}


def test_ce_matrix_matches_pointwise():
    alg = sl2()
    mat = ce_differential_matrix(alg, 1)
    assert mat.rows == 9 and mat.cols == 9
    basis = ce_basis(3, 1)
    for j in (0, 4, 8):
        col = mat.column(j)
        direct = ce_differential(alg, basis[j])
        flat = []
        for key in ce_space_keys(3, 2):
            flat.extend(direct.entries.get(key, vec_zero(3)))
        assert col == tuple(flat)


def test_whitehead_vanishing_sl2():
    alg = sl2()
    assert ce_betti(alg, 0) == 0
    assert ce_betti(alg, 1) == 0
    assert ce_betti(alg, 2) == 0


def test_heisenberg_has_outer_derivations():
    # [x,y]=z: the grading derivation diag(1,1,2) is not inner
    assert ce_betti(heisenberg3(), 1) > 0


def test_generic_differential_matches_ce_at_low_degrees():
    rng = random.Random(13)
    algebras = [sl2(), heisenberg3(), zero_algebra(2, 2)]
    algebras += [rand_valid_algebra(rng, sl2()) for _ in range(5)]
    for alg in algebras:
        for k in (0, 1):
            assert differential_matrix(alg, k).entries == \
                ce_differential_matrix(alg, k).entries


def test_generic_differential_matches_ce_by_evaluation_k2():
    rng = random.Random(17)
    for alg in (sl2(), rand_valid_algebra(rng, sl2()),
                rand_valid_algebra(rng, heisenberg3())):
        phi = from_bracket(alg)
        m = alg.dim
        for psi in basis_cochains(m, 2, 1):
            generic = gla_bracket(phi, psi)
            ce = ce_differential(
                alg, CECochain(m, 2,
                               {key: val for (_, key), val
                                in psi.entries.items()}))
            for i in range(m):
                for j, k in itertools.combinations(range(m), 2):
                    assert eval_keys_z(generic, ((i,), (j,)), k) == \
                        ce_eval(ce, (i, j, k))


def test_ce_rejects_wrong_arity():
    from nlie.catalog import levi_civita_bracket
    with pytest.raises(DimensionMismatch):
        ce_differential(levi_civita_bracket(), ce_zero(4, 1))
