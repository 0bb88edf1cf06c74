"""Finite-dimensional Filippov (n-Lie) algebras over the rationals.

An algebra is a skew n-ary bracket given by structure constants on strictly
increasing basis tuples; evaluation on arbitrary tuples sorts the arguments
and tracks the permutation sign, with repeated indices collapsing to zero.
The fundamental identity

    [x_1..x_{n-1}, [y_1..y_n]] = sum_i [y_1,..,[x_1..x_{n-1}, y_i],..,y_n]

is the n-ary replacement for Jacobi; `check_fundamental_identity` decides it
exhaustively on basis tuples, which suffices by multilinearity.

Representations, semidirect products and O-operators follow the usual n-ary
conventions: the module insertion signs are (-1)^(n-i), with the module slot
counted from the right.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import DimensionMismatch, InvalidStructure
from .linalg import (Matrix, Vector, basis_vec, vec_add, vec_is_zero,
                     vec_scale, vec_sub, vec_zero)

Key = tuple[int, ...]


def sort_with_sign(idx: Sequence[int]) -> Optional[tuple[int, Key]]:
    """Sort a tuple of basis indices, returning (sign, sorted) or None if an
    index repeats.  Sign is the parity of the sorting permutation."""
    seen = set(idx)
    if len(seen) != len(idx):
        return None
    sign = 1
    lst = list(idx)
    # insertion sort; inversions flip the sign
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(lst)


def merge_index(block: Key, z: int) -> Optional[tuple[int, Key]]:
    """Sign and sorted key of the wedge block ∧ e_z (z appended last)."""
    if z in block:
        return None
    greater = sum(1 for b in block if b > z)
    sign = -1 if greater % 2 else 1
    pos = len(block) - greater
    return sign, block[:pos] + (z,) + block[pos:]


@dataclass(frozen=True)
class NLieAlgebra:
    """Structure constants of a skew n-ary bracket.

    ``structure`` maps strictly increasing n-tuples (0-based) to coefficient
    vectors; absent keys mean a zero bracket.  Treat instances as immutable.
    """

    arity: int
    dim: int
    structure: dict[Key, Vector]


def make_algebra(arity: int, dim: int,
                 brackets: Mapping[Key, Sequence[Fraction | int]]) -> NLieAlgebra:
    if arity < 2:
        raise DimensionMismatch("arity must be at least 2")
    if dim < 1:
        raise DimensionMismatch("dimension must be positive")
    table: dict[Key, Vector] = {}
    for key, value in brackets.items():
        key = tuple(key)
        if len(key) != arity:
            raise DimensionMismatch(f"bracket key {key!r} has wrong arity")
        if any(not 0 <= i < dim for i in key):
            raise DimensionMismatch(f"bracket key {key!r} out of range")
        if list(key) != sorted(set(key)):
            raise DimensionMismatch(
                f"bracket key {key!r} must be strictly increasing")
        vec = tuple(Fraction(c) for c in value)
        if len(vec) != dim:
            raise DimensionMismatch(f"value for {key!r} has wrong length")
        if not vec_is_zero(vec):
            table[key] = vec
    return NLieAlgebra(arity, dim, table)


def bracket_on_basis(alg: NLieAlgebra, idx: Sequence[int]) -> Vector:
    """Bracket of basis vectors in any order; sorts and signs the tuple."""
    ss = sort_with_sign(idx)
    if ss is None:
        return vec_zero(alg.dim)
    sign, key = ss
    val = alg.structure.get(key)
    if val is None:
        return vec_zero(alg.dim)
    return val if sign == 1 else vec_scale(-1, val)


def bracket_eval(alg: NLieAlgebra, args: Sequence[Vector]) -> Vector:
    """Multilinear evaluation of the bracket on arbitrary vectors."""
    n, m = alg.arity, alg.dim
    if len(args) != n:
        raise DimensionMismatch(f"bracket takes {n} arguments")
    for v in args:
        if len(v) != m:
            raise DimensionMismatch("argument of wrong dimension")
    out = vec_zero(m)
    for choice in itertools.product(range(m), repeat=n):
        coeff = Fraction(1)
        for v, i in zip(args, choice):
            coeff *= v[i]
            if coeff == 0:
                break
        if coeff == 0:
            continue
        out = vec_add(out, vec_scale(coeff, bracket_on_basis(alg, choice)))
    return out


def _bracket_prefix_vec(alg: NLieAlgebra, prefix: Key, v: Vector) -> Vector:
    """[e_{p_1},..,e_{p_{n-1}}, v] without the full multilinear loop."""
    out = vec_zero(alg.dim)
    for k, c in enumerate(v):
        if c == 0:
            continue
        out = vec_add(out, vec_scale(c, bracket_on_basis(alg, prefix + (k,))))
    return out


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    witness: Optional[dict] = None


def check_fundamental_identity(alg: NLieAlgebra) -> CheckResult:
    """Exhaustive fundamental-identity check on sorted basis tuples.

    Returns the lexicographically first failing pair of tuples as a witness:
    the (n-1)-tuple acting, the inner n-tuple, both sides and their defect.
    """
    n, m = alg.arity, alg.dim
    for a in itertools.combinations(range(m), n - 1):
        for b in itertools.combinations(range(m), n):
            inner = bracket_on_basis(alg, b)
            lhs = _bracket_prefix_vec(alg, a, inner)
            rhs = vec_zero(m)
            for i in range(n):
                acted = bracket_on_basis(alg, a + (b[i],))
                for k, c in enumerate(acted):
                    if c == 0:
                        continue
                    replaced = b[:i] + (k,) + b[i + 1:]
                    rhs = vec_add(rhs,
                                  vec_scale(c, bracket_on_basis(alg, replaced)))
            if lhs != rhs:
                return CheckResult(False, {
                    "acting": a, "inner": b,
                    "lhs": lhs, "rhs": rhs, "defect": vec_sub(lhs, rhs)})
    return CheckResult(True)


@dataclass(frozen=True)
class WedgeElement:
    """Element of the g-th exterior power, sparse over sorted basis tuples."""

    grade: int
    dim: int
    coords: dict[Key, Fraction]


def make_wedge(grade: int, dim: int,
               coords: Mapping[Key, Fraction | int]) -> WedgeElement:
    out: dict[Key, Fraction] = {}
    for key, c in coords.items():
        ss = sort_with_sign(tuple(key))
        if ss is None:
            continue
        sign, skey = ss
        if len(skey) != grade:
            raise DimensionMismatch(f"wedge key {key!r} has wrong grade")
        if any(not 0 <= i < dim for i in skey):
            raise DimensionMismatch(f"wedge key {key!r} out of range")
        acc = out.get(skey, Fraction(0)) + sign * Fraction(c)
        if acc == 0:
            out.pop(skey, None)
        else:
            out[skey] = acc
    return WedgeElement(grade, dim, out)


def basis_wedge(grade: int, dim: int, key: Key) -> WedgeElement:
    return make_wedge(grade, dim, {tuple(key): Fraction(1)})


def wedge_add(a: WedgeElement, b: WedgeElement) -> WedgeElement:
    if (a.grade, a.dim) != (b.grade, b.dim):
        raise DimensionMismatch("wedge grade/dim mismatch")
    coords = dict(a.coords)
    for k, c in b.coords.items():
        acc = coords.get(k, Fraction(0)) + c
        if acc == 0:
            coords.pop(k, None)
        else:
            coords[k] = acc
    return WedgeElement(a.grade, a.dim, coords)


def wedge_scale(c: Fraction | int, a: WedgeElement) -> WedgeElement:
    c = Fraction(c)
    if c == 0:
        return WedgeElement(a.grade, a.dim, {})
    return WedgeElement(a.grade, a.dim,
                        {k: c * v for k, v in a.coords.items()})


def fundamental_bracket(alg: NLieAlgebra, x: WedgeElement,
                        y: WedgeElement) -> WedgeElement:
    """Bracket on (n-1)-wedges induced by the action of x:

        [x, y] = sum_i y_1 ∧ .. ∧ [x_1..x_{n-1}, y_i] ∧ .. ∧ y_{n-1}.

    This makes the (n-1)-th exterior power a Leibniz algebra whenever the
    fundamental identity holds.
    """
    n, m = alg.arity, alg.dim
    if x.grade != n - 1 or y.grade != n - 1 or x.dim != m or y.dim != m:
        raise DimensionMismatch("fundamental bracket needs (n-1)-wedges")
    coords: dict[Key, Fraction] = {}
    for xk, cx in x.coords.items():
        for yk, cy in y.coords.items():
            cxy = cx * cy
            for i in range(n - 1):
                acted = bracket_on_basis(alg, xk + (yk[i],))
                for k, c in enumerate(acted):
                    if c == 0:
                        continue
                    ss = sort_with_sign(yk[:i] + (k,) + yk[i + 1:])
                    if ss is None:
                        continue
                    sign, skey = ss
                    acc = coords.get(skey, Fraction(0)) + sign * cxy * c
                    if acc == 0:
                        coords.pop(skey, None)
                    else:
                        coords[skey] = acc
    return WedgeElement(n - 1, m, coords)


@dataclass(frozen=True)
class Representation:
    """Action rho of (n-1)-tuples of algebra basis vectors on a module.

    ``action`` maps (strictly increasing (n-1)-tuple, module index) to the
    image vector in module coordinates; absent keys act as zero.
    """

    algebra_dim: int
    module_dim: int
    arity: int
    action: dict[tuple[Key, int], Vector]


def make_representation(algebra_dim: int, module_dim: int, arity: int,
                        action: Mapping[tuple[Key, int], Sequence[Fraction | int]]
                        ) -> Representation:
    table: dict[tuple[Key, int], Vector] = {}
    for (key, j), value in action.items():
        key = tuple(key)
        if len(key) != arity - 1 or list(key) != sorted(set(key)):
            raise DimensionMismatch(f"action key {key!r} invalid")
        if any(not 0 <= i < algebra_dim for i in key) or not 0 <= j < module_dim:
            raise DimensionMismatch("action key out of range")
        vec = tuple(Fraction(c) for c in value)
        if len(vec) != module_dim:
            raise DimensionMismatch("action value has wrong length")
        if not vec_is_zero(vec):
            table[(key, j)] = vec
    return Representation(algebra_dim, module_dim, arity, table)


def rho_on_basis(rho: Representation, idx: Sequence[int], j: int) -> Vector:
    """rho(e_{i_1},..,e_{i_{n-1}}) applied to the j-th module basis vector."""
    ss = sort_with_sign(idx)
    if ss is None:
        return vec_zero(rho.module_dim)
    sign, key = ss
    val = rho.action.get((key, j))
    if val is None:
        return vec_zero(rho.module_dim)
    return val if sign == 1 else vec_scale(-1, val)


def _rho_basis_vec(rho: Representation, idx: Key, xi: Vector) -> Vector:
    out = vec_zero(rho.module_dim)
    for j, c in enumerate(xi):
        if c == 0:
            continue
        out = vec_add(out, vec_scale(c, rho_on_basis(rho, idx, j)))
    return out


def adjoint_representation(alg: NLieAlgebra) -> Representation:
    """The algebra acting on itself by its own bracket."""
    n, m = alg.arity, alg.dim
    action: dict[tuple[Key, int], Vector] = {}
    for key in itertools.combinations(range(m), n - 1):
        for j in range(m):
            val = bracket_on_basis(alg, key + (j,))
            if not vec_is_zero(val):
                action[(key, j)] = val
    return Representation(m, m, n, action)


def check_representation(alg: NLieAlgebra, rho: Representation) -> CheckResult:
    """Both representation conditions on all sorted basis tuples.

    (1)  rho(X)rho(Y) - rho(Y)rho(X) = sum_i rho(y_1,..,[X,y_i],..,y_{n-1})
    (2)  rho(x_1..x_{n-2}, [y_1..y_n]) =
             sum_i (-1)^(n-i) rho(y_1..ŷ_i..y_n) rho(x_1..x_{n-2}, y_i)

    applied to every module basis vector.  The insertion signs in (2) are
    the same (-1)^(n-i) weights that drive the semidirect product.
    """
    n, m, r = alg.arity, alg.dim, rho.module_dim
    if rho.algebra_dim != m or rho.arity != n:
        raise DimensionMismatch("representation does not match the algebra")
    for x in itertools.combinations(range(m), n - 1):
        for y in itertools.combinations(range(m), n - 1):
            for j in range(r):
                lhs = vec_sub(
                    _rho_basis_vec(rho, x, rho_on_basis(rho, y, j)),
                    _rho_basis_vec(rho, y, rho_on_basis(rho, x, j)))
                rhs = vec_zero(r)
                for i in range(n - 1):
                    acted = bracket_on_basis(alg, x + (y[i],))
                    for k, c in enumerate(acted):
                        if c == 0:
                            continue
                        rhs = vec_add(rhs, vec_scale(
                            c, rho_on_basis(rho, y[:i] + (k,) + y[i + 1:], j)))
                if lhs != rhs:
                    return CheckResult(False, {
                        "condition": 1, "x": x, "y": y, "xi": j,
                        "lhs": lhs, "rhs": rhs})
    for x in itertools.combinations(range(m), n - 2):
        for y in itertools.combinations(range(m), n):
            for j in range(r):
                inner = bracket_on_basis(alg, y)
                lhs = vec_zero(r)
                for k, c in enumerate(inner):
                    if c == 0:
                        continue
                    lhs = vec_add(lhs,
                                  vec_scale(c, rho_on_basis(rho, x + (k,), j)))
                rhs = vec_zero(r)
                for i in range(n):
                    sign = -1 if (n - 1 - i) % 2 else 1
                    moved = _rho_basis_vec(
                        rho, y[:i] + y[i + 1:],
                        rho_on_basis(rho, x + (y[i],), j))
                    rhs = vec_add(rhs, vec_scale(sign, moved))
                if lhs != rhs:
                    return CheckResult(False, {
                        "condition": 2, "x": x, "y": y, "xi": j,
                        "lhs": lhs, "rhs": rhs})
    return CheckResult(True)


def semidirect_product(alg: NLieAlgebra, rho: Representation) -> NLieAlgebra:
    """Bracket on algebra ⊕ module:

        [x_1+xi_1,..,x_n+xi_n] = [x_1..x_n]
            + sum_i (-1)^(n-i) rho(x_1,..,x̂_i,..,x_n) xi_i

    Module basis vectors sit at indices dim..dim+module_dim-1.  Tuples with
    two or more module entries bracket to zero.  The representation is
    validated first.
    """
    rep_check = check_representation(alg, rho)
    if not rep_check.holds:
        raise InvalidStructure("representation conditions fail",
                               witness=rep_check.witness)
    n, m, r = alg.arity, alg.dim, rho.module_dim
    total = m + r
    table: dict[Key, Vector] = {}
    for key, val in alg.structure.items():
        table[key] = val + vec_zero(r)
    for key in itertools.combinations(range(m), n - 1):
        for j in range(r):
            val = rho_on_basis(rho, key, j)
            if not vec_is_zero(val):
                table[key + (m + j,)] = vec_zero(m) + val
    return NLieAlgebra(n, total, table)


def check_o_operator(alg: NLieAlgebra, rho: Representation,
                     t: Matrix) -> CheckResult:
    """Checks the O-operator identity for T: module -> algebra:

        [T xi_1,..,T xi_n] =
            sum_i (-1)^(n-i) T( rho(T xi_1,..,T̂ xi_i,..,T xi_n) xi_i )

    on every n-tuple of module basis vectors (repetitions included; both
    sides are multilinear, so this decides the identity).
    """
    n, m, r = alg.arity, alg.dim, rho.module_dim
    if t.rows != m or t.cols != r:
        raise DimensionMismatch("operator must map the module to the algebra")
    t_cols = [t.column(j) for j in range(r)]
    for xi in itertools.product(range(r), repeat=n):
        lhs = bracket_eval(alg, [t_cols[j] for j in xi])
        rhs = vec_zero(m)
        for i in range(n):
            others = xi[:i] + xi[i + 1:]
            acted = _rho_multi(rho, [t_cols[j] for j in others],
                               basis_vec(r, xi[i]))
            sign = -1 if (n - 1 - i) % 2 else 1
            rhs = vec_add(rhs, vec_scale(sign, t.apply(acted)))
        if lhs != rhs:
            return CheckResult(False, {"xi": xi, "lhs": lhs, "rhs": rhs,
                                       "defect": vec_sub(lhs, rhs)})
    return CheckResult(True)


def _rho_multi(rho: Representation, args: Sequence[Vector],
               xi: Vector) -> Vector:
    """rho evaluated on arbitrary algebra vectors, multilinear expansion."""
    m = rho.algebra_dim
    out = vec_zero(rho.module_dim)
    for choice in itertools.product(range(m), repeat=len(args)):
        coeff = Fraction(1)
        for v, i in zip(args, choice):
            coeff *= v[i]
            if coeff == 0:
                break
        if coeff == 0:
            continue
        out = vec_add(out, vec_scale(coeff, _rho_basis_vec(rho, choice, xi)))
    return out


def ad_map(alg: NLieAlgebra, x: WedgeElement) -> Matrix:
    """Matrix of z -> [x_1,..,x_{n-1}, z] for a fixed (n-1)-wedge x."""
    n, m = alg.arity, alg.dim
    if x.grade != n - 1 or x.dim != m:
        raise DimensionMismatch("ad needs an (n-1)-wedge")
    cols = []
    for j in range(m):
        col = vec_zero(m)
        for key, c in x.coords.items():
            col = vec_add(col, vec_scale(c, bracket_on_basis(alg, key + (j,))))
        cols.append(col)
    return Matrix(m, m, tuple(tuple(cols[j][i] for j in range(m))
                              for i in range(m)))
