import itertools
from fractions import Fraction as F

import pytest

from nlie.algebroid import (PolyVectorField, anchor_eval,
                            anchor_on_generators, bracket_derivation,
                            bracket_on_generators, check_algebroid_axioms,
                            check_poly_nijenhuis, check_symbol_leibniz,
                            constant_bundle_map, example_tangent_fc,
                            example_tangent_topform, generator_section,
                            make_bundle_map, make_poly_algebroid,
                            make_poly_multiderivation, make_section,
                            md_bracket_eval, md_eval,
                            nijenhuis_section_bracket, nijenhuis_symbol_check,
                            poly_family, section_add, section_bracket,
                            section_scale, section_sub, section_zero,
                            symbol_bracket)
from nlie.catalog import broken_ternary_bracket, levi_civita_bracket, sl2
from nlie.cochains import eval_keys_z, from_bracket, gla_bracket
from nlie.errors import DimensionMismatch, InvalidStructure
from nlie.poly import (poly_const, poly_var, poly_zero, vf_apply, vf_bracket,
                       vf_coordinate, vf_zero)


def x(num_vars, v):
    return poly_var(num_vars, v)


def point_algebroid(alg):
    table = {key: tuple(poly_const(0, c) for c in vec)
             for key, vec in alg.structure.items()}
    return make_poly_algebroid(0, alg.dim, alg.arity, table, {})


def sl2_fc():
    return example_tangent_fc(sl2(), poly_const(3, 1))


def test_section_helpers():
    s = make_section(2, 3, [x(2, 0), poly_zero(2), poly_const(2, 4)])
    assert not s.is_zero
    assert section_zero(2, 3).is_zero
    assert section_sub(s, s).is_zero
    doubled = section_add(s, s)
    assert doubled.comps[2] == poly_const(2, 8)
    assert section_scale(F(1, 2), doubled).comps == s.comps
    with pytest.raises(DimensionMismatch):
        make_section(2, 3, [poly_zero(2)])
    with pytest.raises(DimensionMismatch):
        make_section(2, 3, [poly_zero(3)] * 3)
    with pytest.raises(DimensionMismatch):
        generator_section(2, 3, 5)


def test_make_poly_algebroid_validation():
    with pytest.raises(DimensionMismatch):
        make_poly_algebroid(1, 2, 1, {}, {})
    with pytest.raises(DimensionMismatch):
        make_poly_algebroid(1, 3, 2, {(1, 0): [poly_zero(1)] * 3}, {})
    with pytest.raises(DimensionMismatch):
        make_poly_algebroid(1, 3, 2, {(0, 5): [poly_zero(1)] * 3}, {})
    with pytest.raises(DimensionMismatch):
        make_poly_algebroid(1, 3, 2, {(0, 1): [poly_zero(1)] * 2}, {})
    with pytest.raises(DimensionMismatch):
        make_poly_algebroid(1, 3, 2, {}, {(0,): vf_zero(2)})
    # zero rows and zero fields are dropped
    abd = make_poly_algebroid(1, 3, 2, {(0, 1): [poly_zero(1)] * 3},
                              {(0,): vf_zero(1)})
    assert abd.bracket_table == {} and abd.anchor_table == {}


def test_generator_lookup_signs():
    abd = sl2_fc()
    plus = bracket_on_generators(abd, (0, 1))
    minus = bracket_on_generators(abd, (1, 0))
    assert section_add(plus, minus).is_zero
    assert bracket_on_generators(abd, (1, 1)).is_zero
    top = example_tangent_topform(3, 2)
    a = anchor_on_generators(top, (0, 1))
    b = anchor_on_generators(top, (1, 0))
    assert (a + b).is_zero
    assert anchor_on_generators(top, (2, 2)).is_zero
    assert anchor_on_generators(top, (0, 2)).is_zero


def test_anchor_eval_multilinearity():
    top = example_tangent_topform(3, 2)
    f, g = x(3, 0), x(3, 1)
    s0 = section_scale(f, generator_section(3, 3, 0))
    s1 = section_scale(g, generator_section(3, 3, 1))
    field = anchor_eval(top, [s0, s1])
    assert field.components[0] == f * g
    assert field.components[1].is_zero and field.components[2].is_zero
    s2 = generator_section(3, 3, 2)
    assert anchor_eval(top, [s0, s2]).is_zero


def test_section_bracket_leibniz_last_slot():
    top = example_tangent_topform(3, 2)
    g = [generator_section(3, 3, j) for j in range(3)]
    out = section_bracket(top, [g[0], g[1], section_scale(x(3, 0), g[2])])
    # a(e0 ^ e1) = d/dx_0 applied to x_0 gives 1
    assert out.comps == g[2].comps
    out = section_bracket(top, [g[0], g[1], section_scale(x(3, 2), g[2])])
    assert out.is_zero
    with pytest.raises(DimensionMismatch):
        section_bracket(top, [g[0], g[1]])


def test_section_bracket_skew_extension():
    # moving the polynomial slot around changes nothing for an even
    # permutation and flips the sign for an odd one
    top = example_tangent_topform(3, 2)
    g = [generator_section(3, 3, j) for j in range(3)]
    f = x(3, 0) * x(3, 1)
    ref = section_bracket(top, [g[0], g[1], section_scale(f, g[2])])
    cyc = section_bracket(top, [section_scale(f, g[2]), g[0], g[1]])
    assert cyc.comps == ref.comps
    swapped = section_bracket(top, [g[1], g[0], section_scale(f, g[2])])
    assert section_add(swapped, ref).is_zero


def test_zero_anchor_is_function_linear():
    abd = example_tangent_fc(levi_civita_bracket(), x(4, 0))
    g = [generator_section(4, 4, j) for j in range(4)]
    f = x(4, 1) * x(4, 2)
    for slot in range(3):
        args = [g[0], g[1], g[2]]
        plain = section_bracket(abd, args)
        args[slot] = section_scale(f, args[slot])
        scaled = section_bracket(abd, args)
        assert section_sub(scaled, section_scale(f, plain)).is_zero


def test_axioms_structure_constant_models():
    eps = levi_civita_bracket()
    for f in (poly_const(4, 1), x(4, 0), x(4, 0) * x(4, 0)):
        res = check_algebroid_axioms(example_tangent_fc(eps, f),
                                     max_degree=2)
        assert res.holds
    zero = example_tangent_fc(eps, poly_zero(4))
    assert zero.bracket_table == {}
    assert check_algebroid_axioms(zero).holds


def test_axioms_topform_model():
    top = example_tangent_topform(3, 2)
    assert check_algebroid_axioms(top, max_degree=2).holds
    assert check_algebroid_axioms(top, max_degree=2,
                                  sections_degree=2).holds


def test_axioms_point_base_reduction():
    assert check_algebroid_axioms(point_algebroid(sl2())).holds
    assert check_algebroid_axioms(point_algebroid(levi_civita_bracket()),
                                  max_degree=0).holds


def test_axioms_broken_table_gives_fi_witness():
    res = check_algebroid_axioms(point_algebroid(broken_ternary_bracket()))
    assert not res.holds
    assert res.witness["axiom"] == "fundamental identity"


def test_axioms_bad_anchor_detected():
    # zero bracket but noncommuting anchor fields: [a(e0), a(e1)] = d/dx_0
    # while the right side of axiom (a) vanishes
    anchor = {(0,): vf_coordinate(2, 0),
              (1,): PolyVectorField(2, (x(2, 0), poly_zero(2)))}
    abd = make_poly_algebroid(2, 2, 2, {}, anchor)
    res = check_algebroid_axioms(abd, max_degree=0)
    assert not res.holds
    assert res.witness["axiom"] == "anchor compatibility"
    res = check_algebroid_axioms(abd, max_degree=2)
    assert not res.holds


def test_example_fc_validation():
    with pytest.raises(DimensionMismatch):
        example_tangent_fc(levi_civita_bracket(), poly_const(3, 1))
    with pytest.raises(InvalidStructure):
        example_tangent_fc(broken_ternary_bracket(), poly_const(4, 1))


def test_example_topform_shape():
    top = example_tangent_topform(4, 3)
    assert top.arity == 4 and top.rank == 4 and top.num_vars == 4
    assert top.bracket_table == {}
    field = anchor_on_generators(top, (0, 1, 2))
    assert field.components[0] == poly_const(4, 1)
    assert anchor_on_generators(top, (0, 1, 3)).is_zero
    with pytest.raises(DimensionMismatch):
        example_tangent_topform(2, 3)


def test_point_base_matches_cochain_engine():
    alg = sl2()
    abd = point_algebroid(alg)
    phi = bracket_derivation(abd)
    phi_c = from_bracket(alg)
    br = gla_bracket(phi_c, phi_c)
    wedges = list(itertools.combinations(range(3), 1))
    for keys in itertools.product(wedges, repeat=2):
        for j in range(3):
            lifted = md_bracket_eval(phi, phi, keys,
                                     generator_section(0, 3, j))
            vals = tuple(p.terms.get((), F(0)) for p in lifted.comps)
            assert vals == tuple(eval_keys_z(br, keys, j))
    assert all(v.is_zero for v in symbol_bracket(phi, phi).values())


def test_md_eval_degree_one_leibniz():
    top = example_tangent_topform(3, 2)
    phi = bracket_derivation(top)
    g = [generator_section(3, 3, j) for j in range(3)]
    for f in poly_family(3, 2):
        lhs = md_eval(phi, (), [g[0], g[1], section_scale(f, g[2])])
        plain = md_eval(phi, (), [g[0], g[1], g[2]])
        sigma = anchor_on_generators(top, (0, 1))
        rhs = section_add(section_scale(f, plain),
                          section_scale(vf_apply(sigma, f), g[2]))
        assert section_sub(lhs, rhs).is_zero
    with pytest.raises(DimensionMismatch):
        md_eval(phi, (), [g[0], g[1]])


def test_md_eval_degree_zero():
    v = PolyVectorField(3, (x(3, 0), poly_zero(3), poly_zero(3)))
    table = {(j,): tuple(poly_const(3, 2 if i == j else 0)
                         for i in range(3)) for j in range(3)}
    d = make_poly_multiderivation(3, 3, 3, 0, table, {(): v})
    f = x(3, 0) * x(3, 1)
    gen = generator_section(3, 3, 1)
    out = md_eval(d, (), (section_scale(f, gen),))
    expect = section_add(section_scale(f * 2, gen),
                         section_scale(vf_apply(v, f), gen))
    assert section_sub(out, expect).is_zero


def test_make_poly_multiderivation_validation():
    with pytest.raises(DimensionMismatch):
        make_poly_multiderivation(1, 2, 2, 2, {}, {})
    with pytest.raises(DimensionMismatch):
        make_poly_multiderivation(1, 2, 2, 0, {(0, 1): [poly_zero(1)] * 2},
                                  {})
    with pytest.raises(DimensionMismatch):
        make_poly_multiderivation(1, 2, 2, 0, {},
                                  {((0,),): vf_zero(1)})
    with pytest.raises(DimensionMismatch):
        make_poly_multiderivation(1, 2, 2, 1, {},
                                  {((1, 0),): vf_zero(1)})


def test_symbol_bracket_degree_zero_commutator():
    v1 = PolyVectorField(2, (x(2, 0), poly_zero(2)))
    v2 = PolyVectorField(2, (poly_zero(2), x(2, 0) * x(2, 1)))
    d1 = make_poly_multiderivation(2, 2, 2, 0, {}, {(): v1})
    d2 = make_poly_multiderivation(2, 2, 2, 0, {}, {(): v2})
    sb = symbol_bracket(d1, d2)
    assert (sb[()] - vf_bracket(v1, v2)).is_zero
    flipped = symbol_bracket(d2, d1)
    assert (flipped[()] + sb[()]).is_zero


def test_symbol_bracket_bundle_mismatch():
    d1 = make_poly_multiderivation(2, 2, 2, 0, {}, {})
    d2 = make_poly_multiderivation(2, 3, 2, 0, {}, {})
    with pytest.raises(DimensionMismatch):
        symbol_bracket(d1, d2)


def test_symbol_leibniz_models():
    fc = sl2_fc()
    phi = bracket_derivation(fc)
    assert check_symbol_leibniz(fc, phi, phi).holds
    top = example_tangent_topform(3, 2)
    phit = bracket_derivation(top)
    assert check_symbol_leibniz(top, phit, phit).holds


def test_symbol_leibniz_mixed_degrees():
    top = example_tangent_topform(3, 2)
    phit = bracket_derivation(top)
    v = PolyVectorField(3, (x(3, 0), poly_zero(3), poly_zero(3)))
    table = {(j,): tuple(poly_const(3, 2 if i == j else 0)
                         for i in range(3)) for j in range(3)}
    d0 = make_poly_multiderivation(3, 3, 3, 0, table, {(): v})
    assert check_symbol_leibniz(top, phit, d0).holds
    assert check_symbol_leibniz(top, d0, phit).holds
    assert check_symbol_leibniz(top, d0, d0).holds


def test_nijenhuis_section_bracket_basics():
    top = example_tangent_topform(3, 2)
    g = [generator_section(3, 3, j) for j in range(3)]
    zero_map = constant_bundle_map(3, 3, [[0] * 3] * 3)
    assert nijenhuis_section_bracket(top, zero_map, 0, g).comps == \
        section_bracket(top, g).comps
    for k in (1, 2):
        assert nijenhuis_section_bracket(top, zero_map, k, g).is_zero
    with pytest.raises(DimensionMismatch):
        nijenhuis_section_bracket(top, zero_map, 3, g)


def test_poly_nijenhuis_constant_diagonals():
    fc = sl2_fc()
    good = constant_bundle_map(3, 3, [[1, 0, 0], [0, 2, 0], [0, 0, 1]])
    assert check_poly_nijenhuis(fc, good).holds
    bad = constant_bundle_map(3, 3, [[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    res = check_poly_nijenhuis(fc, bad)
    assert not res.holds
    assert res.witness["tuple"] == (1, 2)
    with pytest.raises(DimensionMismatch):
        check_poly_nijenhuis(fc, constant_bundle_map(2, 2, [[1, 0], [0, 1]]))


def test_polynomial_nijenhuis_on_topform():
    # x_0 * Id: both sides of the closure condition equal x_0^2 e_2
    top = example_tangent_topform(3, 2)
    N = make_bundle_map(3, 3, [[x(3, 0) if i == j else poly_zero(3)
                                for j in range(3)] for i in range(3)])
    g = [generator_section(3, 3, j) for j in range(3)]
    lhs = section_bracket(top, [N.apply(s) for s in g])
    expect = section_scale(x(3, 0) * x(3, 0), g[2])
    assert section_sub(lhs, expect).is_zero
    assert check_poly_nijenhuis(top, N).holds
    assert nijenhuis_symbol_check(top, N).holds


def test_nijenhuis_symbol_identity():
    top = example_tangent_topform(3, 2)
    diagonal = constant_bundle_map(3, 3, [[2, 0, 0], [0, 3, 0], [0, 0, 5]])
    assert nijenhuis_symbol_check(top, diagonal).holds
    zero_map = constant_bundle_map(3, 3, [[0] * 3] * 3)
    assert nijenhuis_symbol_check(top, zero_map).holds
    # zero anchor: every symbol vanishes and the identity is trivial
    fc = example_tangent_fc(levi_civita_bracket(), x(4, 0))
    lam = constant_bundle_map(4, 4, [[3 if i == j else 0 for j in range(4)]
                                     for i in range(4)])
    assert nijenhuis_symbol_check(fc, lam).holds


def test_nijenhuis_symbol_check_rejects_bad_map():
    fc = sl2_fc()
    bad = constant_bundle_map(3, 3, [[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    with pytest.raises(InvalidStructure):
        nijenhuis_symbol_check(fc, bad)


def test_bundle_map_constructors():
    N = make_bundle_map(2, 2, [[x(2, 0), poly_zero(2)],
                               [poly_zero(2), poly_const(2, 1)]])
    s = make_section(2, 2, [poly_const(2, 1), x(2, 1)])
    out = N.apply(s)
    assert out.comps[0] == x(2, 0)
    assert out.comps[1] == x(2, 1)
    with pytest.raises(DimensionMismatch):
        make_bundle_map(2, 2, [[poly_zero(2)]])
    with pytest.raises(DimensionMismatch):
        make_bundle_map(2, 2, [[poly_zero(3)] * 2] * 2)
    with pytest.raises(DimensionMismatch):
        N.apply(make_section(2, 3, [poly_zero(2)] * 3))


def test_poly_family_sizes():
    assert len(poly_family(3, 0)) == 1
    assert len(poly_family(3, 1)) == 4
    assert len(poly_family(3, 2)) == 10
    assert len(poly_family(3, 3)) == 11
    degrees = [max((sum(e) for e in f.terms), default=0)
               for f in poly_family(3, 3)]
    assert max(degrees) == 3
