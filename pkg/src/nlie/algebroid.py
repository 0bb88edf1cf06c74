"""Filippov brackets on a free polynomial module with an anchor.

The base "manifold" is R^m with polynomial functions only, so every identity
is decided exactly.  Sections of the rank-r bundle are r-vectors of
polynomials; the bracket is stored on sorted generator tuples and extended
to arbitrary sections by the anchored Leibniz rule

    [x_1, .., x_{n-1}, f y] = f [x_1, .., x_{n-1}, y] + a(x_1 ^ .. ^ x_{n-1})(f) y

applied in the last slot and carried to the other slots by skew symmetry,
which yields the closed form

    [f_1 y_1, .., f_n y_n] = (prod f) [y..] +
        sum_i (-1)^(n-i) (prod_{j != i} f_j) a(y_1 ^ .. ^_i .. ^ y_n)(f_i) y_i.

Multiderivations of degree 0 and 1 carry a symbol (a vector-field-valued
map on wedges) satisfying D(X, f z) = f D(X, z) + sigma_D(X)(f) z; the
graded bracket of two of them has the symbol

    sigma_[D1,D2] = (-1)^(pq) sigma_D1 (.) D2 - sigma_D2 (.) D1
                    + {sigma_D1, sigma_D2},

with (.) the shuffle-signed insertion of the other operator into a wedge
slot and {,} the shuffle-signed commutator.  Degrees above 1 are not
modeled here: their evaluation would need coefficient rules in block
arguments that the structure does not determine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import (CheckResult, Key, NLieAlgebra, bracket_on_basis,
                      check_fundamental_identity, sort_with_sign)
from .cochains import shuffles
from .errors import DimensionMismatch, InvalidStructure
from .poly import (MultiPoly, PolyVectorField, poly_const, poly_var,
                   poly_zero, vf_apply, vf_bracket, vf_zero)


@dataclass(frozen=True)
class PolySection:
    num_vars: int
    rank: int
    comps: tuple[MultiPoly, ...]

    @property
    def is_zero(self) -> bool:
        return all(p.is_zero for p in self.comps)


def make_section(num_vars: int, rank: int,
                 comps: Sequence[MultiPoly]) -> PolySection:
    if len(comps) != rank:
        raise DimensionMismatch(f"expected {rank} components")
    for p in comps:
        if p.num_vars != num_vars:
            raise DimensionMismatch("component over wrong variable count")
    return PolySection(num_vars, rank, tuple(comps))


def section_zero(num_vars: int, rank: int) -> PolySection:
    return PolySection(num_vars, rank,
                       tuple(poly_zero(num_vars) for _ in range(rank)))


def generator_section(num_vars: int, rank: int, j: int) -> PolySection:
    if not 0 <= j < rank:
        raise DimensionMismatch("generator index out of range")
    comps = [poly_zero(num_vars) for _ in range(rank)]
    comps[j] = poly_const(num_vars, 1)
    return PolySection(num_vars, rank, tuple(comps))


def section_add(a: PolySection, b: PolySection) -> PolySection:
    return PolySection(a.num_vars, a.rank,
                       tuple(x + y for x, y in zip(a.comps, b.comps)))


def section_scale(f: MultiPoly | Fraction | int, s: PolySection) -> PolySection:
    return PolySection(s.num_vars, s.rank, tuple(p * f for p in s.comps))


def section_sub(a: PolySection, b: PolySection) -> PolySection:
    return section_add(a, section_scale(-1, b))


@dataclass(frozen=True)
class PolyFilippovAlgebroid:
    """Bracket table on sorted generator n-tuples, anchor table on sorted
    (n-1)-tuples; absent keys mean zero."""

    num_vars: int
    rank: int
    arity: int
    bracket_table: Mapping[Key, tuple[MultiPoly, ...]]
    anchor_table: Mapping[Key, PolyVectorField]


def make_poly_algebroid(num_vars: int, rank: int, arity: int,
                        bracket_table: Mapping[Key,
                                               Sequence[MultiPoly]],
                        anchor_table: Mapping[Key, PolyVectorField],
                        ) -> PolyFilippovAlgebroid:
    if arity < 2:
        raise DimensionMismatch("arity must be at least 2")
    if rank < 1 or num_vars < 0:
        raise DimensionMismatch("rank must be positive, num_vars nonnegative")
    brackets = {}
    for key, comps in bracket_table.items():
        if len(key) != arity or list(key) != sorted(set(key)):
            raise DimensionMismatch(f"bracket key {key!r} must be a sorted "
                                    "tuple of distinct indices")
        if any(not 0 <= i < rank for i in key):
            raise DimensionMismatch(f"bracket key {key!r} out of range")
        sec = make_section(num_vars, rank, tuple(comps))
        if not sec.is_zero:
            brackets[tuple(key)] = sec.comps
    anchors = {}
    for key, field in anchor_table.items():
        if len(key) != arity - 1 or list(key) != sorted(set(key)):
            raise DimensionMismatch(f"anchor key {key!r} must be a sorted "
                                    "tuple of distinct indices")
        if any(not 0 <= i < rank for i in key):
            raise DimensionMismatch(f"anchor key {key!r} out of range")
        if field.num_vars != num_vars:
            raise DimensionMismatch("anchor field over wrong variable count")
        if not field.is_zero:
            anchors[tuple(key)] = field
    return PolyFilippovAlgebroid(num_vars, rank, arity, brackets, anchors)


def bracket_on_generators(abd: PolyFilippovAlgebroid,
                          idx: Sequence[int]) -> PolySection:
    ss = sort_with_sign(tuple(idx))
    if ss is None:
        return section_zero(abd.num_vars, abd.rank)
    sign, key = ss
    comps = abd.bracket_table.get(key)
    if comps is None:
        return section_zero(abd.num_vars, abd.rank)
    return PolySection(abd.num_vars, abd.rank,
                       tuple(p * Fraction(sign) for p in comps))


def anchor_on_generators(abd: PolyFilippovAlgebroid,
                         idx: Sequence[int]) -> PolyVectorField:
    ss = sort_with_sign(tuple(idx))
    if ss is None:
        return vf_zero(abd.num_vars)
    sign, key = ss
    field = abd.anchor_table.get(key)
    if field is None:
        return vf_zero(abd.num_vars)
    return field.scale(Fraction(sign))


def _supports(sections: Sequence[PolySection]):
    return [[(j, p) for j, p in enumerate(s.comps) if not p.is_zero]
            for s in sections]


def anchor_eval(abd: PolyFilippovAlgebroid,
                sections: Sequence[PolySection]) -> PolyVectorField:
    """C-infinity-multilinear extension of the anchor to a wedge of
    polynomial sections."""
    if len(sections) != abd.arity - 1:
        raise DimensionMismatch("anchor takes arity-1 sections")
    out = vf_zero(abd.num_vars)
    for combo in itertools.product(*_supports(sections)):
        coeff = poly_const(abd.num_vars, 1)
        for _, p in combo:
            coeff = coeff * p
        field = anchor_on_generators(abd, tuple(j for j, _ in combo))
        if not field.is_zero:
            out = out + field.scale(coeff)
    return out


def section_bracket(abd: PolyFilippovAlgebroid,
                    sections: Sequence[PolySection]) -> PolySection:
    """Closed-form bracket of n polynomial sections."""
    n = abd.arity
    if len(sections) != n:
        raise DimensionMismatch(f"bracket takes {n} sections")
    for s in sections:
        if s.rank != abd.rank or s.num_vars != abd.num_vars:
            raise DimensionMismatch("section over the wrong bundle")
    out = section_zero(abd.num_vars, abd.rank)
    for combo in itertools.product(*_supports(sections)):
        idx = tuple(j for j, _ in combo)
        polys = [p for _, p in combo]
        prod_all = poly_const(abd.num_vars, 1)
        for p in polys:
            prod_all = prod_all * p
        table = bracket_on_generators(abd, idx)
        if not table.is_zero:
            out = section_add(out, section_scale(prod_all, table))
        for s in range(n):
            others = idx[:s] + idx[s + 1:]
            field = anchor_on_generators(abd, others)
            if field.is_zero:
                continue
            action = vf_apply(field, polys[s])
            if action.is_zero:
                continue
            rest = poly_const(abd.num_vars, 1)
            for t, p in enumerate(polys):
                if t != s:
                    rest = rest * p
            sign = -1 if (n - 1 - s) % 2 else 1
            out = section_add(
                out, section_scale(action * rest * Fraction(sign),
                                   generator_section(abd.num_vars, abd.rank,
                                                     idx[s])))
    return out


def poly_family(num_vars: int, max_degree: int) -> list[MultiPoly]:
    """Fixed reproducible test functions: 1, the variables, pairwise
    products, and one cubic."""
    fam = [poly_const(num_vars, 1)]
    if max_degree >= 1:
        fam += [poly_var(num_vars, v) for v in range(num_vars)]
    if max_degree >= 2:
        fam += [poly_var(num_vars, v) * poly_var(num_vars, w)
                for v in range(num_vars) for w in range(v, num_vars)]
    if max_degree >= 3 and num_vars >= 1:
        x0 = poly_var(num_vars, 0)
        fam.append(x0 * x0 * x0)
    return fam


def _fi_defect(abd: PolyFilippovAlgebroid,
               xs: Sequence[PolySection],
               ys: Sequence[PolySection]) -> PolySection:
    inner = section_bracket(abd, ys)
    lhs = section_bracket(abd, list(xs) + [inner])
    rhs = section_zero(abd.num_vars, abd.rank)
    for i in range(abd.arity):
        sub = section_bracket(abd, list(xs) + [ys[i]])
        rhs = section_add(rhs, section_bracket(
            abd, list(ys[:i]) + [sub] + list(ys[i + 1:])))
    return section_sub(lhs, rhs)


def check_algebroid_axioms(abd: PolyFilippovAlgebroid, max_degree: int = 2,
                           sections_degree: int = 0) -> CheckResult:
    """Fundamental identity on sections, anchor compatibility (a), and the
    anchored Leibniz rule (b).

    The identity is checked on all generator tuples and then re-checked
    with one slot at a time carrying a polynomial from the deterministic
    family.  Axiom (a) runs on generator wedges by default; a positive
    sections_degree widens it to single polynomial-weighted factors.
    """
    n, r, m = abd.arity, abd.rank, abd.num_vars
    gens = [generator_section(m, r, j) for j in range(r)]

    for xk in itertools.combinations(range(r), n - 1):
        for yk in itertools.combinations(range(r), n):
            defect = _fi_defect(abd, [gens[j] for j in xk],
                                [gens[j] for j in yk])
            if not defect.is_zero:
                return CheckResult(False, {"axiom": "fundamental identity",
                                           "x": xk, "y": yk, "f": None})

    fam = [f for f in poly_family(m, max_degree) if f.terms]
    for slot in range(2 * n - 1):
        for f in fam:
            for c in range(min(2, r)):
                xs = [gens[(c + t) % r] for t in range(n - 1)]
                ys = [gens[(c + n - 1 + t) % r] for t in range(n)]
                if slot < n - 1:
                    xs[slot] = section_scale(f, xs[slot])
                else:
                    ys[slot - (n - 1)] = section_scale(f, ys[slot - (n - 1)])
                if not _fi_defect(abd, xs, ys).is_zero:
                    return CheckResult(False,
                                       {"axiom": "fundamental identity",
                                        "slot": slot, "f": str(f),
                                        "shift": c})

    def axiom_a(xsec, ysec, tag):
        lhs = vf_bracket(anchor_eval(abd, xsec), anchor_eval(abd, ysec))
        rhs = vf_zero(m)
        for i in range(n - 1):
            w = section_bracket(abd, list(xsec) + [ysec[i]])
            rhs = rhs + anchor_eval(abd,
                                    list(ysec[:i]) + [w] + list(ysec[i + 1:]))
        if (lhs - rhs).is_zero:
            return None
        return CheckResult(False, {"axiom": "anchor compatibility",
                                   **tag})

    for xk in itertools.combinations(range(r), n - 1):
        for yk in itertools.combinations(range(r), n - 1):
            bad = axiom_a([gens[j] for j in xk], [gens[j] for j in yk],
                          {"x": xk, "y": yk, "f": None})
            if bad is not None:
                return bad
    if sections_degree > 0:
        wide = [f for f in poly_family(m, sections_degree) if f.terms]
        for slot in range(2 * (n - 1)):
            for f in wide:
                for c in range(min(2, r)):
                    xs = [gens[(c + t) % r] for t in range(n - 1)]
                    ys = [gens[(c + n - 1 + t) % r] for t in range(n - 1)]
                    if slot < n - 1:
                        xs[slot] = section_scale(f, xs[slot])
                    else:
                        ys[slot - (n - 1)] = section_scale(
                            f, ys[slot - (n - 1)])
                    bad = axiom_a(xs, ys, {"slot": slot, "f": str(f),
                                           "shift": c})
                    if bad is not None:
                        return bad

    for xk in itertools.combinations(range(r), n - 1):
        field = anchor_on_generators(abd, xk)
        for j in range(r):
            for f in fam:
                lhs = section_bracket(abd, [gens[i] for i in xk]
                                      + [section_scale(f, gens[j])])
                rhs = section_add(
                    section_scale(f, section_bracket(
                        abd, [gens[i] for i in xk] + [gens[j]])),
                    section_scale(vf_apply(field, f), gens[j]))
                if not section_sub(lhs, rhs).is_zero:
                    return CheckResult(False, {"axiom": "leibniz rule",
                                               "x": xk, "z": j, "f": str(f)})
    return CheckResult(True, None)


def example_tangent_fc(algebra: NLieAlgebra, f: MultiPoly,
                       ) -> PolyFilippovAlgebroid:
    """Structure-constant bracket on the tangent bundle of R^m rescaled by
    one polynomial, with zero anchor."""
    m = algebra.dim
    if f.num_vars != m:
        raise DimensionMismatch("rescaling function must live on R^dim")
    res = check_fundamental_identity(algebra)
    if not res.holds:
        raise InvalidStructure("input bracket fails the fundamental "
                               "identity", witness=res.witness)
    table = {}
    for key in itertools.combinations(range(m), algebra.arity):
        vec = bracket_on_basis(algebra, key)
        comps = tuple(f * c for c in vec)
        if any(not p.is_zero for p in comps):
            table[key] = comps
    return make_poly_algebroid(m, m, algebra.arity, table, {})


def example_tangent_topform(m_base: int, n: int) -> PolyFilippovAlgebroid:
    """Zero bracket of arity n+1 on the tangent bundle of R^m_base; the
    anchor is the top-form tensor dx_1 ^ .. ^ dx_n (x) d/dx_1, so it kills
    every generator wedge except the first n coordinates."""
    if not 1 <= n <= m_base:
        raise DimensionMismatch("form degree must satisfy 1 <= n <= m_base")
    comps = [poly_zero(m_base) for _ in range(m_base)]
    comps[0] = poly_const(m_base, 1)
    anchor = {tuple(range(n)): PolyVectorField(m_base, tuple(comps))}
    return make_poly_algebroid(m_base, m_base, n + 1, {}, anchor)


@dataclass(frozen=True)
class PolyLinearBundleMap:
    """r x r matrix of polynomials acting on sections."""

    num_vars: int
    rank: int
    entries: tuple[tuple[MultiPoly, ...], ...]

    def apply(self, s: PolySection) -> PolySection:
        if s.rank != self.rank or s.num_vars != self.num_vars:
            raise DimensionMismatch("section over the wrong bundle")
        comps = []
        for i in range(self.rank):
            acc = poly_zero(self.num_vars)
            for j in range(self.rank):
                if not s.comps[j].is_zero and not self.entries[i][j].is_zero:
                    acc = acc + self.entries[i][j] * s.comps[j]
            comps.append(acc)
        return PolySection(self.num_vars, self.rank, tuple(comps))


def make_bundle_map(num_vars: int, rank: int,
                    entries: Sequence[Sequence[MultiPoly]],
                    ) -> PolyLinearBundleMap:
    if len(entries) != rank or any(len(row) != rank for row in entries):
        raise DimensionMismatch("bundle map must be a square rank x rank "
                                "array")
    for row in entries:
        for p in row:
            if p.num_vars != num_vars:
                raise DimensionMismatch("entry over wrong variable count")
    return PolyLinearBundleMap(num_vars, rank,
                               tuple(tuple(row) for row in entries))


def constant_bundle_map(num_vars: int, rank: int,
                        scalars: Sequence[Sequence[Fraction | int]],
                        ) -> PolyLinearBundleMap:
    return make_bundle_map(
        num_vars, rank,
        [[poly_const(num_vars, c) for c in row] for row in scalars])


@dataclass(frozen=True)
class PolyMultiderivation:
    """Degree 0 or 1 multiderivation with its symbol.

    Degree 0: table keys are 1-tuples (j,), symbol key is ().
    Degree 1: table keys are sorted n-tuples, symbol keys are 1-tuples
    holding a sorted (n-1)-wedge.
    """

    num_vars: int
    rank: int
    arity: int
    degree: int
    table: Mapping[Key, tuple[MultiPoly, ...]]
    symbol: Mapping[tuple[Key, ...], PolyVectorField]


def make_poly_multiderivation(num_vars: int, rank: int, arity: int,
                              degree: int,
                              table: Mapping[Key, Sequence[MultiPoly]],
                              symbol: Mapping[tuple[Key, ...],
                                              PolyVectorField],
                              ) -> PolyMultiderivation:
    if degree not in (0, 1):
        raise DimensionMismatch("only degrees 0 and 1 are modeled")
    keylen = 1 if degree == 0 else arity
    tab = {}
    for key, comps in table.items():
        if len(key) != keylen or list(key) != sorted(set(key)) or \
                any(not 0 <= i < rank for i in key):
            raise DimensionMismatch(f"bad table key {key!r}")
        sec = make_section(num_vars, rank, tuple(comps))
        if not sec.is_zero:
            tab[tuple(key)] = sec.comps
    sym = {}
    for skey, field in symbol.items():
        if degree == 0:
            if skey != ():
                raise DimensionMismatch("degree-0 symbol key must be ()")
        else:
            if len(skey) != 1 or len(skey[0]) != arity - 1 or \
                    list(skey[0]) != sorted(set(skey[0])):
                raise DimensionMismatch(f"bad symbol key {skey!r}")
        if field.num_vars != num_vars:
            raise DimensionMismatch("symbol field over wrong variable count")
        if not field.is_zero:
            sym[skey] = field
    return PolyMultiderivation(num_vars, rank, arity, degree, tab, sym)


def bracket_derivation(abd: PolyFilippovAlgebroid) -> PolyMultiderivation:
    """The bracket itself as a degree-1 multiderivation whose symbol is
    the anchor."""
    return PolyMultiderivation(
        abd.num_vars, abd.rank, abd.arity, 1, dict(abd.bracket_table),
        {(key,): field for key, field in abd.anchor_table.items()})


def _symbol_at(d: PolyMultiderivation,
               skey: tuple[Key, ...]) -> PolyVectorField:
    field = d.symbol.get(skey)
    return field if field is not None else vf_zero(d.num_vars)


def md_eval(d: PolyMultiderivation, blocks: tuple[Key, ...],
            final: Sequence[PolySection]) -> PolySection:
    """Evaluate on generator wedge blocks and a final tuple of polynomial
    sections, expanding by the Leibniz rule in each final slot."""
    m, r = d.num_vars, d.rank
    if len(blocks) != max(0, d.degree - 1):
        raise DimensionMismatch("wrong number of block arguments")
    if d.degree == 0:
        if len(final) != 1:
            raise DimensionMismatch("degree 0 takes a single section")
        s = final[0]
        out = section_zero(m, r)
        sigma = _symbol_at(d, ())
        for j, g in enumerate(s.comps):
            if g.is_zero:
                continue
            comps = d.table.get((j,))
            if comps is not None:
                out = section_add(out, section_scale(
                    g, PolySection(m, r, comps)))
            action = vf_apply(sigma, g)
            if not action.is_zero:
                out = section_add(out, section_scale(
                    action, generator_section(m, r, j)))
        return out
    n = d.arity
    if len(final) != n:
        raise DimensionMismatch(f"degree 1 takes {n} final sections")
    out = section_zero(m, r)
    for combo in itertools.product(*_supports(final)):
        idx = tuple(j for j, _ in combo)
        polys = [p for _, p in combo]
        ss = sort_with_sign(idx)
        if ss is not None:
            sign, key = ss
            comps = d.table.get(key)
            if comps is not None:
                prod_all = poly_const(m, 1)
                for p in polys:
                    prod_all = prod_all * p
                out = section_add(out, section_scale(
                    prod_all * Fraction(sign), PolySection(m, r, comps)))
        for s in range(n):
            others = idx[:s] + idx[s + 1:]
            ws = sort_with_sign(others)
            if ws is None:
                continue
            wsign, wkey = ws
            sigma = _symbol_at(d, blocks + (wkey,))
            action = vf_apply(sigma, polys[s])
            if action.is_zero:
                continue
            rest = poly_const(m, 1)
            for t, p in enumerate(polys):
                if t != s:
                    rest = rest * p
            sign = wsign * (-1 if (n - 1 - s) % 2 else 1)
            out = section_add(out, section_scale(
                action * rest * Fraction(sign),
                generator_section(m, r, idx[s])))
    return out


def _gen_wedge(d: PolyMultiderivation, key: Key) -> list[PolySection]:
    return [generator_section(d.num_vars, d.rank, j) for j in key]


def _md_apply(d: PolyMultiderivation, keys: tuple[Key, ...],
              z: PolySection) -> PolySection:
    """D(X_1, .., X_degree, z) on generator wedges and one section."""
    if d.degree == 0:
        return md_eval(d, (), (z,))
    return md_eval(d, keys[:-1], _gen_wedge(d, keys[-1]) + [z])


def _check_pair(d1: PolyMultiderivation, d2: PolyMultiderivation) -> None:
    if (d1.num_vars, d1.rank, d1.arity) != (d2.num_vars, d2.rank, d2.arity):
        raise DimensionMismatch("operands live on different bundles")


def md_circle_eval(d1: PolyMultiderivation, d2: PolyMultiderivation,
                   keys: tuple[Key, ...], z: PolySection) -> PolySection:
    """Circle product evaluated on generator wedge keys and a final
    section; mirrors the point-base formula with polynomial coefficients."""
    _check_pair(d1, d2)
    p, q = d1.degree, d2.degree
    n, m, r = d1.arity, d1.num_vars, d1.rank
    if len(keys) != p + q:
        raise DimensionMismatch(f"expected {p + q} wedge arguments")
    if p + q == 0:
        return md_eval(d1, (), (md_eval(d2, (), (z,)),))
    out = section_zero(m, r)
    for k in range(p):
        base_sign = -1 if (k * q) % 2 else 1
        for perm, sh_sign in shuffles(k, q):
            head = tuple(keys[i] for i in perm[:k])
            mid = tuple(keys[i] for i in perm[k:])
            ins = keys[k + q]
            for s in range(n - 1):
                w = _md_apply(d2, mid, generator_section(m, r, ins[s]))
                if w.is_zero:
                    continue
                final = (_gen_wedge(d1, ins[:s]) + [w]
                         + _gen_wedge(d1, ins[s + 1:]) + [z])
                val = md_eval(d1, head, final)
                if not val.is_zero:
                    out = section_add(out, section_scale(
                        Fraction(base_sign * sh_sign), val))
    base_sign = -1 if (p * q) % 2 else 1
    for perm, sh_sign in shuffles(p, q):
        head = tuple(keys[i] for i in perm[:p])
        mid = tuple(keys[i] for i in perm[p:])
        w = _md_apply(d2, mid, z)
        if w.is_zero:
            continue
        if p == 0:
            val = md_eval(d1, (), (w,))
        else:
            val = md_eval(d1, head[:-1], _gen_wedge(d1, head[-1]) + [w])
        if not val.is_zero:
            out = section_add(out, section_scale(
                Fraction(base_sign * sh_sign), val))
    return out


def md_bracket_eval(d1: PolyMultiderivation, d2: PolyMultiderivation,
                    keys: tuple[Key, ...], z: PolySection) -> PolySection:
    p, q = d1.degree, d2.degree
    sign = -1 if (p * q) % 2 else 1
    return section_sub(
        section_scale(Fraction(sign), md_circle_eval(d1, d2, keys, z)),
        md_circle_eval(d2, d1, keys, z))


def _odot(sig_owner: PolyMultiderivation, other: PolyMultiderivation,
          keys: tuple[Key, ...]) -> PolyVectorField:
    """(sigma_D1 (.) D2)(keys): insert D2's value into one wedge factor of
    sigma_D1's arguments."""
    p, q = sig_owner.degree, other.degree
    n, m, r = sig_owner.arity, sig_owner.num_vars, sig_owner.rank
    out = vf_zero(m)
    for k in range(p):
        base_sign = -1 if (k * q) % 2 else 1
        for perm, sh_sign in shuffles(k, q):
            head = tuple(keys[i] for i in perm[:k])
            mid = tuple(keys[i] for i in perm[k:])
            ins = keys[k + q]
            for s in range(n - 1):
                w = _md_apply(other, mid, generator_section(m, r, ins[s]))
                if w.is_zero:
                    continue
                for j, g in enumerate(w.comps):
                    if g.is_zero:
                        continue
                    ws = sort_with_sign(ins[:s] + (j,) + ins[s + 1:])
                    if ws is None:
                        continue
                    wsign, wkey = ws
                    sigma = _symbol_at(sig_owner, head + (wkey,))
                    if sigma.is_zero:
                        continue
                    coeff = g * Fraction(base_sign * sh_sign * wsign)
                    out = out + sigma.scale(coeff)
    return out


def symbol_bracket(d1: PolyMultiderivation, d2: PolyMultiderivation,
                   ) -> dict[tuple[Key, ...], PolyVectorField]:
    """Symbol of the graded bracket, tabulated on all tuples of sorted
    generator wedges."""
    _check_pair(d1, d2)
    p, q = d1.degree, d2.degree
    n, m, r = d1.arity, d1.num_vars, d1.rank
    sign = -1 if (p * q) % 2 else 1
    out = {}
    wedges = list(itertools.combinations(range(r), n - 1))
    for keys in itertools.product(wedges, repeat=p + q):
        total = _odot(d1, d2, keys).scale(Fraction(sign)) \
            - _odot(d2, d1, keys)
        for perm, sh_sign in shuffles(p, q):
            head = tuple(keys[i] for i in perm[:p])
            tail = tuple(keys[i] for i in perm[p:])
            comm = vf_bracket(_symbol_at(d1, head), _symbol_at(d2, tail))
            total = total + comm.scale(Fraction(sh_sign))
        out[keys] = total
    return out


def check_symbol_leibniz(abd: PolyFilippovAlgebroid,
                         d1: PolyMultiderivation, d2: PolyMultiderivation,
                         max_degree: int = 2) -> CheckResult:
    """Verify that the bracket of two multiderivations obeys the Leibniz
    rule with the symbol produced by the symbol-bracket formula."""
    _check_pair(d1, d2)
    if (abd.num_vars, abd.rank, abd.arity) != (d1.num_vars, d1.rank,
                                               d1.arity):
        raise DimensionMismatch("operands do not match the algebroid")
    n, m, r = d1.arity, d1.num_vars, d1.rank
    fam = poly_family(m, max_degree)
    symbols = symbol_bracket(d1, d2)
    wedges = list(itertools.combinations(range(r), n - 1))
    for keys in itertools.product(wedges, repeat=d1.degree + d2.degree):
        sigma = symbols[keys]
        for j in range(r):
            gen = generator_section(m, r, j)
            plain = md_bracket_eval(d1, d2, keys, gen)
            for f in fam:
                lhs = md_bracket_eval(d1, d2, keys, section_scale(f, gen))
                rhs = section_add(section_scale(f, plain),
                                  section_scale(vf_apply(sigma, f), gen))
                if not section_sub(lhs, rhs).is_zero:
                    return CheckResult(False, {"wedges": keys, "z": j,
                                               "f": str(f)})
    return CheckResult(True, None)


def nijenhuis_section_bracket(abd: PolyFilippovAlgebroid,
                              nmap: PolyLinearBundleMap, k: int,
                              sections: Sequence[PolySection],
                              ) -> PolySection:
    """k-th deformed bracket on sections: operator in k slots minus the
    operator applied to the previous deformed bracket; k = 0 is the
    bracket itself."""
    n = abd.arity
    if not 0 <= k <= n - 1:
        raise DimensionMismatch("deformed brackets exist for 0 <= k <= n-1")
    if k == 0:
        return section_bracket(abd, sections)
    total = section_zero(abd.num_vars, abd.rank)
    for slots in itertools.combinations(range(n), k):
        args = [nmap.apply(s) if t in slots else s
                for t, s in enumerate(sections)]
        total = section_add(total, section_bracket(abd, args))
    prev = nijenhuis_section_bracket(abd, nmap, k - 1, sections)
    return section_sub(total, nmap.apply(prev))


def check_poly_nijenhuis(abd: PolyFilippovAlgebroid,
                         nmap: PolyLinearBundleMap) -> CheckResult:
    """Closure condition on all sorted generator tuples."""
    if (nmap.num_vars, nmap.rank) != (abd.num_vars, abd.rank):
        raise DimensionMismatch("bundle map over the wrong bundle")
    n, r = abd.arity, abd.rank
    for key in itertools.combinations(range(r), n):
        gens = [generator_section(abd.num_vars, r, j) for j in key]
        lhs = section_bracket(abd, [nmap.apply(g) for g in gens])
        rhs = nmap.apply(nijenhuis_section_bracket(abd, nmap, n - 1, gens))
        if not section_sub(lhs, rhs).is_zero:
            return CheckResult(False, {"tuple": key})
    return CheckResult(True, None)


def nijenhuis_symbol_check(abd: PolyFilippovAlgebroid,
                           nmap: PolyLinearBundleMap,
                           max_degree: int = 2) -> CheckResult:
    """The symbol of the k-th deformed bracket must be the anchor with the
    operator inserted into k wedge slots, for every k.

    The actual symbol action is read off as the Leibniz defect of the
    deformed bracket on a polynomial-weighted generator.
    """
    res = check_poly_nijenhuis(abd, nmap)
    if not res.holds:
        raise InvalidStructure("bundle map fails the Nijenhuis condition",
                               witness=res.witness)
    n, r, m = abd.arity, abd.rank, abd.num_vars
    fam = poly_family(m, max_degree)
    for k in range(1, n):
        for xk in itertools.combinations(range(r), n - 1):
            gens = [generator_section(m, r, j) for j in xk]
            for j in range(r):
                gen = generator_section(m, r, j)
                plain = nijenhuis_section_bracket(abd, nmap, k,
                                                  gens + [gen])
                for f in fam:
                    deformed = nijenhuis_section_bracket(
                        abd, nmap, k, gens + [section_scale(f, gen)])
                    defect = section_sub(deformed,
                                         section_scale(f, plain))
                    claimed = poly_zero(m)
                    for slots in itertools.combinations(range(n - 1), k):
                        args = [nmap.apply(g) if t in slots else g
                                for t, g in enumerate(gens)]
                        claimed = claimed + vf_apply(
                            anchor_eval(abd, args), f)
                    expected = section_scale(claimed, gen)
                    if not section_sub(defect, expected).is_zero:
                        return CheckResult(False,
                                           {"k": k, "x": xk, "z": j,
                                            "f": str(f)})
    return CheckResult(True, None)
