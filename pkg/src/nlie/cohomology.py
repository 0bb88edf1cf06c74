"""Cohomology of the deformation complex by exact rational linear algebra.

Grading note: C^k here is the k-th term of the complex, so C^0 is the space
of (n-1)-wedges, C^1 the linear maps, and C^k for k >= 2 the degree-(k-1)
multiderivation cochains.  ``differential_matrix(A, k)`` is the map
C^k -> C^(k+1) in the elementary bases (lexicographic keys, then vector
components), which makes every matrix byte-stable for golden tests.

Representatives are chosen deterministically: among the canonical nullspace
basis of d_out, keep the vectors whose columns become pivots after the
coboundary columns in a combined elimination.  Each kept vector is a cocycle
and no rational combination of kept vectors is a coboundary.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .algebra import (NLieAlgebra, WedgeElement,
                      check_fundamental_identity)
from .cochains import (Cochain, basis_cochains, eval_keys_z, from_bracket,
                       gla_bracket, space_keys, to_matrix)
from .errors import DimensionMismatch, InvalidStructure
from .linalg import Matrix, Vector, rank_nullspace, vec_is_zero, vec_zero

DEFAULT_DEGREE_CAP = 3


def complex_dim(alg: NLieAlgebra, k: int) -> int:
    if k < 0:
        raise DimensionMismatch("the complex starts at degree 0")
    return len(space_keys(alg.dim, alg.arity, k - 1)) * alg.dim if k >= 1 \
        else len(list(itertools.combinations(range(alg.dim),
                                             alg.arity - 1)))


def cochain_to_vec(d: Cochain) -> Vector:
    out: list[Fraction] = []
    for key in space_keys(d.dim, d.arity, d.degree):
        out.extend(d.entries.get(key, vec_zero(d.dim)))
    return tuple(out)


def vec_to_cochain(vec: Vector, arity: int, dim: int, degree: int) -> Cochain:
    keys = space_keys(dim, arity, degree)
    if len(vec) != len(keys) * dim:
        raise DimensionMismatch("vector length does not match the space")
    entries = {}
    for t, key in enumerate(keys):
        chunk = tuple(vec[t * dim:(t + 1) * dim])
        if not vec_is_zero(chunk):
            entries[key] = chunk
    return Cochain(arity, dim, degree, entries)


def _require_fi(alg: NLieAlgebra) -> Cochain:
    res = check_fundamental_identity(alg)
    if not res.holds:
        raise InvalidStructure("bracket fails the fundamental identity",
                               witness=res.witness)
    return from_bracket(alg)


def _mat_from_cols(cols: list[Vector], nrows: int) -> Matrix:
    return Matrix(nrows, len(cols),
                  tuple(tuple(col[r] for col in cols) for r in range(nrows)))


def differential_matrix(alg: NLieAlgebra, k: int) -> Matrix:
    """Matrix of the differential C^k -> C^(k+1); requires the fundamental
    identity (checked once, not per column)."""
    if k < 0:
        raise DimensionMismatch("the complex starts at degree 0")
    phi = _require_fi(alg)
    n, m = alg.arity, alg.dim
    nrows = len(space_keys(m, n, k)) * m
    cols: list[Vector] = []
    if k == 0:
        for key in itertools.combinations(range(m), n - 1):
            entries = {}
            for z in range(m):
                col = eval_keys_z(phi, (key,), z)
                if not vec_is_zero(col):
                    entries[((), (z,))] = col
            cols.append(cochain_to_vec(Cochain(n, m, 0, entries)))
    else:
        if k == 1:
            domain = [Cochain(n, m, 0, {key: _unit(m, i)})
                      for key in space_keys(m, n, 0) for i in range(m)]
        else:
            domain = basis_cochains(m, n, k - 1)
        for psi in domain:
            cols.append(cochain_to_vec(gla_bracket(phi, psi)))
    return _mat_from_cols(cols, nrows)


def _unit(m: int, i: int) -> Vector:
    return tuple(Fraction(1 if j == i else 0) for j in range(m))


@dataclass(frozen=True)
class CohomologyReport:
    degree: int
    dim_cochains: int
    rank_d_out: int
    rank_d_in: int
    betti: int
    representatives: tuple[Union[Cochain, WedgeElement], ...]


def cohomology(alg: NLieAlgebra, k: int,
               max_degree_cap: int = DEFAULT_DEGREE_CAP) -> CohomologyReport:
    """Betti number and representatives of the k-th cohomology.

    Degrees above the cap are refused (the cochain spaces grow as
    C(m,n-1)^(k-2) * C(m,n) * m); raise the cap explicitly when needed.
    """
    if k < 0:
        raise DimensionMismatch("the complex starts at degree 0")
    if k > max_degree_cap:
        raise DimensionMismatch(
            f"degree {k} above cap {max_degree_cap}; raise the cap to force")
    d_out = differential_matrix(alg, k)
    dim_k = d_out.cols
    out = rank_nullspace(d_out)
    cocycles = out.nullspace
    if k == 0:
        rank_in = 0
        cob_cols: list[Vector] = []
    else:
        d_in = differential_matrix(alg, k - 1)
        inn = rank_nullspace(d_in)
        rank_in = inn.rank
        cob_cols = [d_in.column(j) for j in inn.pivots]
    betti = dim_k - out.rank - rank_in
    reps: list[Vector] = []
    if betti > 0:
        combined = _mat_from_cols(cob_cols + list(cocycles), dim_k)
        piv = rank_nullspace(combined).pivots
        base = len(cob_cols)
        reps = [cocycles[j - base] for j in piv if j >= base]
    assert len(reps) == betti
    if k == 0:
        n, m = alg.arity, alg.dim
        keys = list(itertools.combinations(range(m), n - 1))
        packed = tuple(
            WedgeElement(n - 1, m,
                         {key: c for key, c in zip(keys, r) if c != 0})
            for r in reps)
    else:
        packed = tuple(vec_to_cochain(r, alg.arity, alg.dim, k - 1)
                       for r in reps)
    return CohomologyReport(k, dim_k, out.rank, rank_in, betti, packed)


def outer_derivations(alg: NLieAlgebra) -> list[Matrix]:
    """Basis of derivations modulo inner ones, as matrices."""
    report = cohomology(alg, 1)
    return [to_matrix(r) for r in report.representatives]
