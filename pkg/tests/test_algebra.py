import random
from fractions import Fraction

import pytest

from helpers import rand_bracket, rand_matrix, rand_valid_algebra, rand_vector
from nlie.algebra import (adjoint_representation, ad_map, basis_wedge,
                          bracket_eval, bracket_on_basis,
                          check_fundamental_identity, check_o_operator,
                          check_representation, fundamental_bracket,
                          make_algebra, make_representation, make_wedge,
                          semidirect_product, sort_with_sign, wedge_add)
from nlie.catalog import (broken_ternary_bracket, heisenberg3,
                          levi_civita_bracket, sl2, zero_algebra)
from nlie.errors import DimensionMismatch, InvalidStructure
from nlie.linalg import Matrix, basis_vec, vec_zero


F = Fraction


def test_sort_with_sign():
    assert sort_with_sign((1, 0, 2)) == (-1, (0, 1, 2))
    assert sort_with_sign((2, 1, 0)) == (-1, (0, 1, 2))
    assert sort_with_sign((0, 1, 2)) == (1, (0, 1, 2))
    assert sort_with_sign((0, 1, 0)) is None


def test_bracket_sign_on_basis():
    alg = levi_civita_bracket()
    # [e2, e1, e3] = -[e1, e2, e3] = -e4
    assert bracket_on_basis(alg, (1, 0, 2)) == (F(0), F(0), F(0), F(-1))
    assert bracket_on_basis(alg, (0, 0, 1)) == vec_zero(4)


def test_bracket_eval_multilinear():
    alg = levi_civita_bracket()
    rng = random.Random(5)
    u, v, w = (rand_vector(rng, 4) for _ in range(3))
    lhs = bracket_eval(alg, [tuple(2 * c for c in u), v, w])
    rhs = tuple(2 * c for c in bracket_eval(alg, [u, v, w]))
    assert lhs == rhs
    assert bracket_eval(alg, [u, u, w]) == vec_zero(4)


def test_fundamental_identity_catalog():
    assert check_fundamental_identity(levi_civita_bracket()).holds
    assert check_fundamental_identity(sl2()).holds
    assert check_fundamental_identity(heisenberg3()).holds
    assert check_fundamental_identity(zero_algebra(5, 3)).holds


def test_fundamental_identity_falsified_with_witness():
    alg = broken_ternary_bracket()
    res = check_fundamental_identity(alg)
    assert not res.holds
    # lexicographically first failure: e1∧e2 acting on [e2,e3,e4]
    assert res.witness["acting"] == (0, 1)
    assert res.witness["inner"] == (1, 2, 3)
    assert res.witness["lhs"] == vec_zero(4)
    assert res.witness["rhs"] == tuple(F(c) for c in (0, 0, 0, -1))
    # and the hand-checked pair e2∧e3 on [e1,e2,e4] fails too:
    # LHS [e2,e3,[e1,e2,e4]] = [e2,e3,e4] = 0, RHS = e4.
    lhs = bracket_on_basis(alg, (1, 2, 3))
    rhs = vec_zero(4)
    for i, b in enumerate((0, 1, 3)):
        acted = bracket_on_basis(alg, (1, 2, b))
        for k, c in enumerate(acted):
            if c:
                rep = (0, 1, 3)[:i] + (k,) + (0, 1, 3)[i + 1:]
                rhs = tuple(x + c * y for x, y in
                            zip(rhs, bracket_on_basis(alg, rep)))
    assert lhs == vec_zero(4) and rhs == basis_vec(4, 3)


def test_fundamental_identity_transported():
    rng = random.Random(23)
    for _ in range(5):
        alg = rand_valid_algebra(rng, levi_civita_bracket())
        assert check_fundamental_identity(alg).holds


def test_make_algebra_validation():
    with pytest.raises(DimensionMismatch):
        make_algebra(3, 4, {(0, 1): (1, 0, 0, 0)})
    with pytest.raises(DimensionMismatch):
        make_algebra(3, 4, {(2, 1, 0): (1, 0, 0, 0)})
    with pytest.raises(DimensionMismatch):
        make_algebra(1, 4, {})


def test_fundamental_bracket_example():
    alg = levi_civita_bracket()
    x = basis_wedge(2, 4, (0, 1))
    y = basis_wedge(2, 4, (0, 2))
    out = fundamental_bracket(alg, x, y)
    # [e1∧e2, e1∧e3] = e1 ∧ [e1,e2,e3] = e1∧e4
    assert out.coords == {(0, 3): F(1)}


def test_fundamental_bracket_leibniz_property():
    # [X,[Y,Z]] = [[X,Y],Z] + [Y,[X,Z]] on wedge basis once the fundamental
    # identity holds.
    alg = levi_civita_bracket()
    import itertools
    keys = list(itertools.combinations(range(4), 2))
    for xk, yk, zk in itertools.product(keys, repeat=3):
        x, y, z = (basis_wedge(2, 4, k) for k in (xk, yk, zk))
        lhs = fundamental_bracket(alg, x, fundamental_bracket(alg, y, z))
        rhs = wedge_add(
            fundamental_bracket(alg, fundamental_bracket(alg, x, y), z),
            fundamental_bracket(alg, y, fundamental_bracket(alg, x, z)))
        assert lhs.coords == rhs.coords


def test_make_wedge_antisymmetrizes():
    w = make_wedge(2, 4, {(1, 0): 1})
    assert w.coords == {(0, 1): F(-1)}
    assert make_wedge(2, 4, {(1, 1): 5}).coords == {}


def test_adjoint_representation_valid():
    for alg in (levi_civita_bracket(), sl2(), heisenberg3()):
        rho = adjoint_representation(alg)
        assert check_representation(alg, rho).holds


def test_scaled_adjoint_fails():
    alg = levi_civita_bracket()
    rho = adjoint_representation(alg)
    doubled = make_representation(
        4, 4, 3, {k: tuple(2 * c for c in v) for k, v in rho.action.items()})
    res = check_representation(alg, doubled)
    assert not res.holds


def test_zero_representation_valid():
    alg = levi_civita_bracket()
    rho = make_representation(4, 2, 3, {})
    assert check_representation(alg, rho).holds
    prod = semidirect_product(alg, rho)
    assert check_fundamental_identity(prod).holds
    # direct sum: module slots bracket to zero
    assert bracket_on_basis(prod, (0, 1, 4)) == vec_zero(6)


def test_semidirect_adjoint():
    alg = levi_civita_bracket()
    rho = adjoint_representation(alg)
    prod = semidirect_product(alg, rho)
    assert prod.dim == 8 and prod.arity == 3
    assert check_fundamental_identity(prod).holds
    # algebra part embeds
    assert bracket_on_basis(prod, (0, 1, 2)) == tuple(
        F(c) for c in (0, 0, 0, 1, 0, 0, 0, 0))
    # one module slot acts through rho: [e1, e2, f3] = ad(e1,e2) e3 = e4 -> f4
    assert bracket_on_basis(prod, (0, 1, 6)) == tuple(
        F(c) for c in (0, 0, 0, 0, 0, 0, 0, 1))
    # two module slots collapse
    assert bracket_on_basis(prod, (0, 5, 6)) == vec_zero(8)


def test_semidirect_rejects_bad_representation():
    alg = levi_civita_bracket()
    rho = adjoint_representation(alg)
    doubled = make_representation(
        4, 4, 3, {k: tuple(2 * c for c in v) for k, v in rho.action.items()})
    with pytest.raises(InvalidStructure):
        semidirect_product(alg, doubled)


def test_o_operator_zero_and_identity():
    alg = levi_civita_bracket()
    rho = adjoint_representation(alg)
    assert check_o_operator(alg, rho, Matrix.zero(4, 4)).holds
    # T = Id sums three copies of the bracket on the right side, so it fails.
    res = check_o_operator(alg, rho, Matrix.identity(4))
    assert not res.holds
    assert res.witness is not None


def test_o_operator_everything_passes_on_zero_algebra():
    alg = zero_algebra(3, 3)
    rho = make_representation(3, 2, 3, {})
    rng = random.Random(29)
    for _ in range(5):
        assert check_o_operator(alg, rho, rand_matrix(rng, 3, 2)).holds


def test_ad_map_example():
    alg = levi_civita_bracket()
    ad = ad_map(alg, basis_wedge(2, 4, (0, 1)))
    # e3 -> e4, e4 -> -e3, e1 and e2 -> 0
    assert ad.apply(basis_vec(4, 2)) == basis_vec(4, 3)
    assert ad.apply(basis_vec(4, 3)) == tuple(F(c) for c in (0, 0, -1, 0))
    assert ad.apply(basis_vec(4, 0)) == vec_zero(4)


def test_random_brackets_mostly_fail_fi():
    rng = random.Random(31)
    verdicts = [check_fundamental_identity(rand_bracket(rng, 3, 4)).holds
                for _ in range(10)]
    assert not all(verdicts)
