"""Multiderivation cochains of a skew n-ary bracket and their graded bracket.

A cochain of degree p eats p wedge blocks of grade n-1 plus one extra vector;
the final block and the extra vector only ever enter through their wedge, so
entries are stored on keys

    ((B_1, .., B_{p-1}), W)

with each B_i a strictly increasing (n-1)-tuple and W a strictly increasing
n-tuple.  Degree 0 is a plain linear map, keyed by ((), (j,)).  Degree -1
(a single (n-1)-wedge) lives as ``algebra.WedgeElement`` and only shows up
in ``differential``.

The circle product composes D1 (degree p) with D2 (degree q) in two ways:

* insertion: for 0 <= k <= p-1 and a (k,q)-shuffle s of the first k+q
  arguments, D2 swallows the arguments s selects for it plus one factor of
  block number k+q+1, and its output is wedged back into that factor slot;
  the term carries sign(s) * (-1)^(k*q);
* composition: for k = p, D2 swallows its selected arguments plus the final
  vector, with sign(s) * (-1)^(p*q).

Summing over k and shuffles gives D1 ∘ D2, and

    [D1, D2] = (-1)^(p*q) D1 ∘ D2  -  D2 ∘ D1

is the graded bracket.  A skew n-bracket seen as a degree-1 cochain squares
to zero under ∘ exactly when its fundamental identity holds, which makes
``maurer_cartan_defect`` the bracket-validity certificate and
``differential`` (bracketing with the structure cochain) the deformation
differential.

The convention note that matters when reading the sums: the insertion block
index k+q+1 is counted with q = deg(D2) for either operand order; both
orders run through the same routine with the roles swapped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence, Union

from .algebra import (Key, NLieAlgebra, WedgeElement, bracket_on_basis,
                      make_algebra, merge_index, sort_with_sign)
from .errors import DimensionMismatch, InvalidStructure
from .linalg import Matrix, Vector, vec_add, vec_is_zero, vec_scale, vec_zero

CochainKey = tuple[tuple[Key, ...], Key]


@dataclass(frozen=True)
class Cochain:
    """Sparse multiderivation cochain; absent keys are zero."""

    arity: int
    dim: int
    degree: int
    entries: dict[CochainKey, Vector]


def cochain_dim(dim: int, arity: int, degree: int) -> int:
    """Dimension of the degree-p cochain space, p >= 1:
    C(m, n-1)^(p-1) * C(m, n) * m."""
    if degree < 1:
        raise DimensionMismatch("cochain spaces are graded from degree 1")
    return comb(dim, arity - 1) ** (degree - 1) * comb(dim, arity) * dim


def space_keys(dim: int, arity: int, degree: int) -> list[CochainKey]:
    """All storage keys of the given degree, lexicographically ordered."""
    if degree < 0:
        raise DimensionMismatch("no storage keys below degree 0")
    if degree == 0:
        return [((), (j,)) for j in range(dim)]
    blocks = list(itertools.combinations(range(dim), arity - 1))
    wedges = list(itertools.combinations(range(dim), arity))
    return [(bs, w)
            for bs in itertools.product(blocks, repeat=degree - 1)
            for w in wedges]


def basis_cochains(dim: int, arity: int, degree: int) -> list[Cochain]:
    """Indicator cochains spanning the degree-p space, key-major then
    component; degrees 0 and -1 live as matrices / wedges instead."""
    if degree < 1:
        raise DimensionMismatch("elementary cochains start at degree 1")
    out = []
    for key in space_keys(dim, arity, degree):
        for i in range(dim):
            vec = tuple(Fraction(1) if j == i else Fraction(0)
                        for j in range(dim))
            out.append(Cochain(arity, dim, degree, {key: vec}))
    return out


def make_cochain(arity: int, dim: int, degree: int,
                 entries: dict[CochainKey, Sequence[Fraction | int]]) -> Cochain:
    if degree < 0:
        raise DimensionMismatch("degree must be >= 0")
    table: dict[CochainKey, Vector] = {}
    for (blocks, last), value in entries.items():
        blocks = tuple(tuple(b) for b in blocks)
        last = tuple(last)
        if degree == 0:
            if blocks != () or len(last) != 1:
                raise DimensionMismatch("degree-0 keys are ((), (j,))")
        else:
            if len(blocks) != degree - 1 or len(last) != arity:
                raise DimensionMismatch("key has wrong shape for its degree")
            for b in blocks:
                if len(b) != arity - 1 or list(b) != sorted(set(b)):
                    raise DimensionMismatch(f"bad tensor block {b!r}")
            if list(last) != sorted(set(last)):
                raise DimensionMismatch(f"bad final wedge {last!r}")
        for idx in (*[i for b in blocks for i in b], *last):
            if not 0 <= idx < dim:
                raise DimensionMismatch("key index out of range")
        vec = tuple(Fraction(c) for c in value)
        if len(vec) != dim:
            raise DimensionMismatch("entry vector has wrong length")
        if not vec_is_zero(vec):
            table[(blocks, last)] = vec
    return Cochain(arity, dim, degree, table)


def cochain_zero(arity: int, dim: int, degree: int) -> Cochain:
    return Cochain(arity, dim, degree, {})


def cochain_is_zero(d: Cochain) -> bool:
    return not d.entries


def cochain_add(a: Cochain, b: Cochain) -> Cochain:
    _compatible(a, b, same_degree=True)
    entries = dict(a.entries)
    for k, v in b.entries.items():
        acc = vec_add(entries.get(k, vec_zero(a.dim)), v)
        if vec_is_zero(acc):
            entries.pop(k, None)
        else:
            entries[k] = acc
    return Cochain(a.arity, a.dim, a.degree, entries)


def cochain_scale(c: Fraction | int, d: Cochain) -> Cochain:
    c = Fraction(c)
    if c == 0:
        return cochain_zero(d.arity, d.dim, d.degree)
    return Cochain(d.arity, d.dim, d.degree,
                   {k: vec_scale(c, v) for k, v in d.entries.items()})


def cochain_sub(a: Cochain, b: Cochain) -> Cochain:
    return cochain_add(a, cochain_scale(-1, b))


def _compatible(a: Cochain, b: Cochain, same_degree: bool = False) -> None:
    if a.arity != b.arity or a.dim != b.dim:
        raise DimensionMismatch("cochains over different algebras")
    if same_degree and a.degree != b.degree:
        raise DimensionMismatch("cochains of different degree")


def eval_keys_z(d: Cochain, blocks: tuple[Key, ...], z: int) -> Vector:
    """Evaluate on sorted basis blocks and a basis vector index: the last
    block wedges with e_z (sign from sorting, zero on repeats)."""
    if d.degree == 0:
        return d.entries.get(((), (z,)), vec_zero(d.dim))
    mi = merge_index(blocks[-1], z)
    if mi is None:
        return vec_zero(d.dim)
    sign, wedge = mi
    val = d.entries.get((blocks[:-1], wedge))
    if val is None:
        return vec_zero(d.dim)
    return val if sign == 1 else vec_scale(-1, val)


def eval_keys_vec(d: Cochain, blocks: tuple[Key, ...], w: Vector) -> Vector:
    out = vec_zero(d.dim)
    for j, c in enumerate(w):
        if c == 0:
            continue
        out = vec_add(out, vec_scale(c, eval_keys_z(d, blocks, j)))
    return out


def evaluate(d: Cochain, blocks: Sequence[WedgeElement], z: Vector) -> Vector:
    """Full multilinear evaluation on wedge elements and a vector."""
    n, m = d.arity, d.dim
    if len(blocks) != d.degree:
        raise DimensionMismatch(f"degree-{d.degree} cochain takes "
                                f"{d.degree} wedge blocks")
    for b in blocks:
        if b.grade != n - 1 or b.dim != m:
            raise DimensionMismatch("blocks must be (n-1)-wedges")
    if len(z) != m:
        raise DimensionMismatch("final vector has wrong length")
    out = vec_zero(m)
    coord_items = [list(b.coords.items()) for b in blocks]
    for combo in itertools.product(*coord_items):
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        if coeff == 0:
            continue
        keys = tuple(k for k, _ in combo)
        out = vec_add(out, vec_scale(coeff, eval_keys_vec(d, keys, z)))
    return out


@lru_cache(maxsize=None)
def shuffles(k: int, q: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """(k,q)-shuffles of positions 0..k+q-1 with their signs.

    Each entry is (positions, sign) where positions lists the k slots routed
    to the outer operand followed by the q slots routed to the inner one;
    both runs are increasing.  Sign is the parity of that arrangement.
    """
    out = []
    universe = range(k + q)
    for head in itertools.combinations(universe, k):
        tail = tuple(i for i in universe if i not in head)
        inversions = sum(1 for h in head for t in tail if t < h)
        sign = -1 if inversions % 2 else 1
        out.append((head + tail, sign))
    return tuple(out)


def _circle_raw(d1: Cochain, d2: Cochain, args: tuple[Key, ...],
                z: int) -> Vector:
            # args: p+q sorted blocks; z: basis index
    p, q = d1.degree, d2.degree
    n, m = d1.arity, d1.dim
    total = [Fraction(0)] * m
    for k in range(p):
        base_sign = -1 if (k * q) % 2 else 1
        ins = args[k + q]
        tail = args[k + q + 1:]
        for pos, sgn in shuffles(k, q):
            head = tuple(args[i] for i in pos[:k])
            mid = tuple(args[i] for i in pos[k:])
            coeff0 = base_sign * sgn
            for s in range(n - 1):
                w = eval_keys_z(d2, mid, ins[s])
                if vec_is_zero(w):
                    continue
                for j, wj in enumerate(w):
                    if wj == 0:
                        continue
                    ss = sort_with_sign(ins[:s] + (j,) + ins[s + 1:])
                    if ss is None:
                        continue
                    sub_sign, sub = ss
                    v = eval_keys_z(d1, head + (sub,) + tail, z)
                    if vec_is_zero(v):
                        continue
                    c = coeff0 * sub_sign * wj
                    for i, vi in enumerate(v):
                        if vi:
                            total[i] += c * vi
    base_sign = -1 if (p * q) % 2 else 1
    for pos, sgn in shuffles(p, q):
        head = tuple(args[i] for i in pos[:p])
        mid = tuple(args[i] for i in pos[p:])
        w = eval_keys_z(d2, mid, z)
        if vec_is_zero(w):
            continue
        v = eval_keys_vec(d1, head, w)
        c = base_sign * sgn
        for i, vi in enumerate(v):
            if vi:
                total[i] += c * vi
    return tuple(total)


def circle(d1: Cochain, d2: Cochain) -> Cochain:
    """The circle product D1 ∘ D2 of degree p+q (insertion plus composition
    terms over signed shuffles; see the module docstring for the signs)."""
    _compatible(d1, d2)
    p, q = d1.degree, d2.degree
    n, m = d1.arity, d1.dim
    entries: dict[CochainKey, Vector] = {}
    for key in space_keys(m, n, p + q):
        blocks, last = key
        if p + q == 0:
            val = eval_keys_vec(d1, (), eval_keys_z(d2, (), last[0]))
        else:
            args = blocks + (last[:n - 1],)
            val = _circle_raw(d1, d2, args, last[n - 1])
        if not vec_is_zero(val):
            entries[key] = val
    return Cochain(n, m, p + q, entries)


def gla_bracket(d1: Cochain, d2: Cochain) -> Cochain:
    """Graded bracket [D1, D2] = (-1)^(pq) D1∘D2 - D2∘D1."""
    sign = -1 if (d1.degree * d2.degree) % 2 else 1
    return cochain_sub(cochain_scale(sign, circle(d1, d2)), circle(d2, d1))


def maurer_cartan_defect(d: Cochain) -> Cochain:
    """[D, D]; zero for a degree-1 cochain exactly when the n-ary bracket it
    encodes satisfies the fundamental identity."""
    return gla_bracket(d, d)


def from_bracket(alg: NLieAlgebra) -> Cochain:
    """The structure constants as the canonical degree-1 cochain."""
    return Cochain(alg.arity, alg.dim, 1,
                   {((), key): val for key, val in alg.structure.items()})


def to_algebra(d: Cochain) -> NLieAlgebra:
    if d.degree != 1:
        raise DimensionMismatch("only degree-1 cochains encode a bracket")
    return make_algebra(d.arity, d.dim,
                        {last: val for (_, last), val in d.entries.items()})


def from_matrix(mat: Matrix, arity: int) -> Cochain:
    """A linear map as a degree-0 cochain."""
    if mat.rows != mat.cols:
        raise DimensionMismatch("degree-0 cochains are square maps")
    entries: dict[CochainKey, Vector] = {}
    for j in range(mat.cols):
        col = mat.column(j)
        if not vec_is_zero(col):
            entries[((), (j,))] = col
    return Cochain(arity, mat.rows, 0, entries)


def to_matrix(d: Cochain) -> Matrix:
    if d.degree != 0:
        raise DimensionMismatch("only degree-0 cochains are linear maps")
    m = d.dim
    cols = [d.entries.get(((), (j,)), vec_zero(m)) for j in range(m)]
    return Matrix(m, m, tuple(tuple(cols[j][i] for j in range(m))
                              for i in range(m)))


def differential(phi: Cochain,
                 psi: Union[Cochain, WedgeElement]) -> Cochain:
    """Deformation differential: bracketing with the structure cochain.

    ``phi`` must be a degree-1 cochain with vanishing Maurer-Cartan defect
    (checked; this is the fundamental identity).  For psi of degree p >= 0
    this is gla_bracket(phi, psi); a degree -1 element (an (n-1)-wedge X)
    maps to the degree-0 cochain z -> phi(X ∧ z).
    """
    if phi.degree != 1:
        raise DimensionMismatch("structure cochain must have degree 1")
    defect = maurer_cartan_defect(phi)
    if not cochain_is_zero(defect):
        key, val = next(iter(sorted(defect.entries.items())))
        raise InvalidStructure(
            "structure cochain fails the Maurer-Cartan equation",
            witness={"key": key, "value": val})
    if isinstance(psi, WedgeElement):
        n, m = phi.arity, phi.dim
        if psi.grade != n - 1 or psi.dim != m:
            raise DimensionMismatch("degree -1 argument must be an (n-1)-wedge")
        entries: dict[CochainKey, Vector] = {}
        for z in range(m):
            col = vec_zero(m)
            for key, c in psi.coords.items():
                col = vec_add(col, vec_scale(c, eval_keys_z(phi, (key,), z)))
            if not vec_is_zero(col):
                entries[((), (z,))] = col
        return Cochain(n, m, 0, entries)
    return gla_bracket(phi, psi)


def coboundary_explicit(alg: NLieAlgebra, psi: Cochain) -> Cochain:
    """The differential written out as four explicit sums (no shuffles).

    For psi of degree p, evaluated on blocks X_1..X_{p+1} and z:

        sum_i (-1)^i     psi(.., X̂_i, .., [X_i-action on z])
      + sum_{i<j} (-1)^i psi(.., X̂_i, .., [X_i, X_j]-block at j, .., z)
      + sum_i (-1)^(i+1) [X_i-action on psi(.., X̂_i, .., z)]
      + (-1)^p sum_s [X_{p+1}^1, .., psi(X_1..X_p, X_{p+1}^s), .., z]

    with i, j counted from 1.  Independent route from ``differential`` (no
    circle products); the two must agree on every cochain.
    """
    n, m = alg.arity, alg.dim
    if psi.arity != n or psi.dim != m:
        raise DimensionMismatch("cochain does not match the algebra")
    p = psi.degree
    entries: dict[CochainKey, Vector] = {}
    for key in space_keys(m, n, p + 1):
        blocks, last = key
        args = blocks + (last[:n - 1],)
        z = last[n - 1]
        total = [Fraction(0)] * m

        def accumulate(c: Fraction | int, v: Vector) -> None:
            if c == 0 or vec_is_zero(v):
                return
            for i, vi in enumerate(v):
                if vi:
                    total[i] += c * vi

        for i0 in range(p + 1):
            rem = args[:i0] + args[i0 + 1:]
            sign = -1 if (i0 + 1) % 2 else 1
            # first sum: z replaced by the X_i action on it
            w = bracket_on_basis(alg, args[i0] + (z,))
            accumulate(sign, eval_keys_vec(psi, rem, w))
            # third sum: X_i acts on the value
            inner = eval_keys_z(psi, rem, z)
            for j, c in enumerate(inner):
                if c == 0:
                    continue
                accumulate(-sign * c, bracket_on_basis(alg, args[i0] + (j,)))
        for i0 in range(p + 1):
            sign = -1 if (i0 + 1) % 2 else 1
            for j0 in range(i0 + 1, p + 1):
                # second sum: wedge-bracket of X_i into the X_j slot
                for skey, c in _fund_on_keys(alg, args[i0], args[j0]).items():
                    reduced = (args[:i0] + args[i0 + 1:j0] + (skey,)
                               + args[j0 + 1:])
                    accumulate(sign * c, eval_keys_z(psi, reduced, z))
        lastblock = args[p]
        sign0 = -1 if p % 2 else 1
        for s in range(n - 1):
            w = eval_keys_z(psi, args[:p], lastblock[s])
            for j, wj in enumerate(w):
                if wj == 0:
                    continue
                outer = bracket_on_basis(
                    alg, lastblock[:s] + (j,) + lastblock[s + 1:] + (z,))
                accumulate(sign0 * wj, outer)
        vec = tuple(total)
        if not vec_is_zero(vec):
            entries[key] = vec
    return Cochain(n, m, p + 1, entries)


def _fund_on_keys(alg: NLieAlgebra, xk: Key, yk: Key) -> dict[Key, Fraction]:
    """Wedge-level bracket of two basis (n-1)-wedges, as sparse coords."""
    n = alg.arity
    coords: dict[Key, Fraction] = {}
    for i in range(n - 1):
        acted = bracket_on_basis(alg, xk + (yk[i],))
        for k, c in enumerate(acted):
            if c == 0:
                continue
            ss = sort_with_sign(yk[:i] + (k,) + yk[i + 1:])
            if ss is None:
                continue
            sign, skey = ss
            acc = coords.get(skey, Fraction(0)) + sign * c
            if acc == 0:
                coords.pop(skey, None)
            else:
                coords[skey] = acc
    return coords


def is_filippov_derivation(alg: NLieAlgebra, mat: Matrix) -> bool:
    """Does the linear map satisfy D[x_1..x_n] = sum_i [x_1,..,D x_i,..,x_n]
    on all sorted basis tuples?"""
    n, m = alg.arity, alg.dim
    if mat.rows != m or mat.cols != m:
        raise DimensionMismatch("derivation candidate must be m x m")
    cols = [mat.column(j) for j in range(m)]
    for key in itertools.combinations(range(m), n):
        lhs = mat.apply(bracket_on_basis(alg, key))
        rhs = vec_zero(m)
        for i in range(n):
            for j, c in enumerate(cols[key[i]]):
                if c == 0:
                    continue
                rhs = vec_add(rhs, vec_scale(
                    c, bracket_on_basis(alg, key[:i] + (j,) + key[i + 1:])))
        if lhs != rhs:
            return False
    return True
