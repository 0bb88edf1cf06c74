"""One-parameter deformations of a skew n-bracket and their calculus.

A deformation path is phi_t = phi_0 + t phi_1 + .. + t^k phi_k with each
phi_i a degree-1 cochain.  Validity means [phi_t, phi_t] = 0 coefficient by
coefficient: through power k in truncated mode ("modulo t^(k+1)"), through
power 2k in full mode.  Since degree-1 brackets are symmetric in their two
slots, the power-r coefficient is 2 delta(phi_r) + sum of the lower cross
terms, which gives the familiar cocycle condition at the first power.

Equivalences are families Phi_t = Id + t M_1 + .. + t^k M_k acting by
conjugation; the inverse is the truncated geometric series.  Conjugating by
Id + t^m Psi shifts phi_m by the coboundary of Psi, which is both the
equivalence-class statement for infinitesimals and the induction step the
rigidity probe replays.

Nijenhuis operators deform the bracket through the iterated brackets
[.]^k_N; the closure condition makes Phi_t = Id + tN intertwine the
deformed and original brackets as an exact polynomial identity in t.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import (CheckResult, NLieAlgebra, Representation, bracket_eval,
                      bracket_on_basis, check_fundamental_identity,
                      check_o_operator, semidirect_product, sort_with_sign)
from .cochains import (Cochain, cochain_add, cochain_is_zero, cochain_scale,
                       cochain_zero, from_bracket, gla_bracket)
from .cohomology import (cochain_to_vec, cohomology, differential_matrix,
                         vec_to_cochain)
from .errors import DimensionMismatch, InvalidStructure
from .linalg import (Matrix, Vector, rank_nullspace, solve_linear, vec_add,
                     vec_is_zero, vec_scale, vec_zero)


@dataclass(frozen=True)
class DeformationPath:
    base: NLieAlgebra
    order: int
    terms: tuple[Cochain, ...]


@dataclass(frozen=True)
class EquivalenceMap:
    """Phi_t = Id + sum t^b maps[b-1]; absent trailing maps are zero."""

    order: int
    maps: tuple[Matrix, ...]


def make_deformation_path(base: NLieAlgebra,
                          terms: Sequence[Cochain]) -> DeformationPath:
    for term in terms:
        if term.arity != base.arity or term.dim != base.dim:
            raise DimensionMismatch("path term does not match the base")
        if term.degree != 1:
            raise DimensionMismatch("path terms must have degree 1")
    return DeformationPath(base, len(terms), tuple(terms))


def constant_path(base: NLieAlgebra, order: int) -> DeformationPath:
    zero = cochain_zero(base.arity, base.dim, 1)
    return DeformationPath(base, order, (zero,) * order)


def make_equivalence_map(dim: int, order: int,
                         maps: Sequence[Matrix]) -> EquivalenceMap:
    if len(maps) > order:
        raise DimensionMismatch("more maps than the declared order")
    for mat in maps:
        if mat.rows != dim or mat.cols != dim:
            raise DimensionMismatch("equivalence maps must be square of size "
                                    f"{dim}")
    return EquivalenceMap(order, tuple(maps))


def _phi_list(path: DeformationPath) -> list[Cochain]:
    return [from_bracket(path.base), *path.terms]


def _require_base_fi(path: DeformationPath) -> None:
    res = check_fundamental_identity(path.base)
    if not res.holds:
        raise InvalidStructure("base bracket fails the fundamental identity",
                               witness=res.witness)


@dataclass(frozen=True)
class DeformationCheck:
    holds: bool
    mode: str
    first_failing_power: Optional[int]


def check_deformation(path: DeformationPath,
                      mode: str = "truncated") -> DeformationCheck:
    """Power-by-power Maurer-Cartan test.  Truncated mode checks powers
    1..k, full mode 1..2k (power 0 is the base, checked up front)."""
    if mode not in ("truncated", "full"):
        raise ValueError(f"unknown mode {mode!r}")
    _require_base_fi(path)
    phis = _phi_list(path)
    k = path.order
    top = k if mode == "truncated" else 2 * k
    for r in range(1, top + 1):
        acc = cochain_zero(path.base.arity, path.base.dim, 2)
        for i in range(max(0, r - k), min(r, k) + 1):
            acc = cochain_add(acc, gla_bracket(phis[i], phis[r - i]))
        if not cochain_is_zero(acc):
            return DeformationCheck(False, mode, r)
    return DeformationCheck(True, mode, None)


@dataclass(frozen=True)
class InfinitesimalClass:
    leading_order: Optional[int]
    is_cocycle: bool
    betti: int
    class_coords: tuple[Fraction, ...]
    is_trivial_class: bool


def infinitesimal_class(path: DeformationPath) -> InfinitesimalClass:
    """Locate the first nonzero term and express its cohomology class in
    the representative basis of the second cohomology."""
    res = check_deformation(path, "truncated")
    if not res.holds:
        raise InvalidStructure(
            "path fails the deformation equations",
            witness={"first_failing_power": res.first_failing_power})
    lead = next((i + 1 for i, t in enumerate(path.terms)
                 if not cochain_is_zero(t)), None)
    report = cohomology(path.base, 2)
    if lead is None:
        return InfinitesimalClass(None, True, report.betti,
                                  (Fraction(0),) * report.betti, True)
    phi_m = path.terms[lead - 1]
    d_out = differential_matrix(path.base, 2)
    target = cochain_to_vec(phi_m)
    is_cocycle = vec_is_zero(d_out.apply(target))
    d_in = differential_matrix(path.base, 1)
    piv = rank_nullspace(d_in).pivots
    cols = [d_in.column(j) for j in piv]
    cols += [cochain_to_vec(r) for r in report.representatives]
    basis = Matrix(len(target), len(cols),
                   tuple(tuple(col[r] for col in cols)
                         for r in range(len(target))))
    sol = solve_linear(basis, target)
    if sol is None:
        raise InvalidStructure("cocycle not spanned by coboundaries and "
                               "representatives; rank bookkeeping is wrong")
    coords = tuple(sol[len(piv):])
    return InfinitesimalClass(lead, is_cocycle, report.betti, coords,
                              vec_is_zero(coords))


def _eval1(d: Cochain, args: Sequence[Vector]) -> Vector:
    """Multilinear evaluation of a degree-1 cochain on n vectors."""
    m = d.dim
    out = vec_zero(m)
    supports = [[(j, c) for j, c in enumerate(a) if c != 0] for a in args]
    for combo in itertools.product(*supports):
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        ss = sort_with_sign(tuple(j for j, _ in combo))
        if ss is None:
            continue
        sign, key = ss
        val = d.entries.get(((), key))
        if val is not None:
            out = vec_add(out, vec_scale(coeff * sign, val))
    return out


def _series_matrices(emap: EquivalenceMap, dim: int,
                     top: int) -> tuple[list[Matrix], list[Matrix]]:
    """Powers of Phi_t and of its truncated inverse up to t^top."""
    fwd = [Matrix.identity(dim)]
    for b in range(1, top + 1):
        if b <= len(emap.maps):
            fwd.append(emap.maps[b - 1])
        else:
            fwd.append(Matrix.zero(dim, dim))
    inv = [Matrix.identity(dim)]
    for b in range(1, top + 1):
        acc = Matrix.zero(dim, dim)
        for j in range(1, b + 1):
            acc = acc.add(fwd[j].mul(inv[b - j]))
        inv.append(acc.scale(Fraction(-1)))
    return fwd, inv


def conjugate_path(path: DeformationPath,
                   emap: EquivalenceMap) -> DeformationPath:
    """The path Phi_t^{-1} phi_t(Phi_t .., Phi_t ..) modulo t^(order+1)."""
    n, m = path.base.arity, path.base.dim
    k = path.order
    fwd, inv = _series_matrices(emap, m, k)
    phis = _phi_list(path)
    new_terms = []
    for r in range(1, k + 1):
        entries = {}
        for key in itertools.combinations(range(m), n):
            total = vec_zero(m)
            for a in range(r + 1):
                for i in range(min(k, r - a) + 1):
                    rem = r - a - i
                    for bs in itertools.product(range(rem + 1), repeat=n):
                        if sum(bs) != rem:
                            continue
                        args = [fwd[bs[t]].column(key[t]) for t in range(n)]
                        val = _eval1(phis[i], args)
                        if not vec_is_zero(val):
                            total = vec_add(total, inv[a].apply(val))
            if not vec_is_zero(total):
                entries[((), key)] = total
        new_terms.append(Cochain(n, m, 1, entries))
    return DeformationPath(path.base, k, tuple(new_terms))


@dataclass(frozen=True)
class EquivalenceCheck:
    holds: bool
    first_failing_power: Optional[int]


def check_equivalence(path1: DeformationPath, path2: DeformationPath,
                      emap: EquivalenceMap) -> EquivalenceCheck:
    """Does conjugating path1 by Phi_t reproduce path2 modulo t^(k+1)?"""
    if path1.order != path2.order or path1.order != emap.order:
        raise DimensionMismatch("path and map orders must agree")
    if path1.base.arity != path2.base.arity or \
            path1.base.dim != path2.base.dim:
        raise DimensionMismatch("paths live over different spaces")
    if path1.base.structure != path2.base.structure:
        return EquivalenceCheck(False, 0)
    conj = conjugate_path(path1, emap)
    for r in range(1, path1.order + 1):
        if conj.terms[r - 1].entries != path2.terms[r - 1].entries:
            return EquivalenceCheck(False, r)
    return EquivalenceCheck(True, None)


def check_homomorphism_family(path: DeformationPath,
                              emap: EquivalenceMap) -> CheckResult:
    """Exact (untruncated) intertwining: Phi_t phi_t(x..) equals the base
    bracket of the Phi_t-images, as a polynomial identity in t on basis
    tuples."""
    n, m = path.base.arity, path.base.dim
    k = path.order
    top = k + len(emap.maps) * n
    fwd, _ = _series_matrices(emap, m, top)
    phis = _phi_list(path)
    phi0 = phis[0]
    for key in itertools.combinations(range(m), n):
        for r in range(top + 1):
            lhs = vec_zero(m)
            for a in range(min(r, len(fwd) - 1) + 1):
                i = r - a
                if i <= k:
                    val = phis[i].entries.get(((), key))
                    if val is not None:
                        lhs = vec_add(lhs, fwd[a].apply(val))
            rhs = vec_zero(m)
            for bs in itertools.product(range(min(r, top) + 1), repeat=n):
                if sum(bs) != r:
                    continue
                args = [fwd[bs[t]].column(key[t]) for t in range(n)]
                rhs = vec_add(rhs, _eval1(phi0, args))
            if lhs != rhs:
                return CheckResult(False, {"tuple": key, "power": r,
                                           "lhs": lhs, "rhs": rhs})
    return CheckResult(True, None)


def nijenhuis_bracket(alg: NLieAlgebra, nmap: Matrix, k: int) -> Cochain:
    """The k-th deformed bracket: insert the operator into k slots, then
    subtract the operator applied to the (k-1)-st deformed bracket."""
    n, m = alg.arity, alg.dim
    if nmap.rows != m or nmap.cols != m:
        raise DimensionMismatch("operator must be a square matrix of size m")
    if not 1 <= k <= n - 1:
        raise DimensionMismatch("deformed brackets exist for 1 <= k <= n-1")
    ncols = [nmap.column(j) for j in range(m)]
    prev: dict = {((), key): bracket_on_basis(alg, key)
                  for key in itertools.combinations(range(m), n)}
    prev = {kk: v for kk, v in prev.items() if not vec_is_zero(v)}
    for step in range(1, k + 1):
        entries = {}
        for key in itertools.combinations(range(m), n):
            total = vec_zero(m)
            for slots in itertools.combinations(range(n), step):
                args = [ncols[key[t]] if t in slots
                        else _basis(m, key[t]) for t in range(n)]
                total = vec_add(total, bracket_eval(alg, args))
            pv = prev.get(((), key))
            if pv is not None:
                total = vec_add(total, vec_scale(-1, nmap.apply(pv)))
            if not vec_is_zero(total):
                entries[((), key)] = total
        prev = entries
    return Cochain(n, m, 1, prev)


def _basis(m: int, i: int) -> Vector:
    return tuple(Fraction(1 if j == i else 0) for j in range(m))


def check_nijenhuis(alg: NLieAlgebra, nmap: Matrix) -> CheckResult:
    """Closure test: the bracket of operator images must equal the operator
    applied to the top deformed bracket, on every sorted basis tuple."""
    res = check_fundamental_identity(alg)
    if not res.holds:
        raise InvalidStructure("bracket fails the fundamental identity",
                               witness=res.witness)
    n, m = alg.arity, alg.dim
    if nmap.rows != m or nmap.cols != m:
        raise DimensionMismatch("operator must be a square matrix of size m")
    ncols = [nmap.column(j) for j in range(m)]
    top = nijenhuis_bracket(alg, nmap, n - 1)
    for key in itertools.combinations(range(m), n):
        lhs = bracket_eval(alg, [ncols[j] for j in key])
        tv = top.entries.get(((), key), vec_zero(m))
        rhs = nmap.apply(tv)
        if lhs != rhs:
            return CheckResult(False, {"tuple": key, "lhs": lhs, "rhs": rhs})
    return CheckResult(True, None)


def deformation_from_nijenhuis(alg: NLieAlgebra,
                               nmap: Matrix) -> DeformationPath:
    res = check_nijenhuis(alg, nmap)
    if not res.holds:
        raise InvalidStructure("operator fails the Nijenhuis condition",
                               witness=res.witness)
    n = alg.arity
    terms = [nijenhuis_bracket(alg, nmap, i) for i in range(1, n)]
    return DeformationPath(alg, n - 1, tuple(terms))


@dataclass(frozen=True)
class OOperatorLift:
    n_tilde: Matrix
    o_operator_holds: bool
    lifted_nijenhuis_holds: bool

    @property
    def agree(self) -> bool:
        return self.o_operator_holds == self.lifted_nijenhuis_holds


def o_operator_lift(alg: NLieAlgebra, rho: Representation,
                    tmap: Matrix) -> OOperatorLift:
    """Compare the intertwining condition for T with the Nijenhuis
    condition for its strictly upper-triangular lift on the semidirect
    product."""
    m, r = alg.dim, rho.module_dim
    if tmap.rows != m or tmap.cols != r:
        raise DimensionMismatch("lift expects an m x r map")
    sd = semidirect_product(alg, rho)
    size = m + r
    rows = [[Fraction(0)] * size for _ in range(size)]
    for i in range(m):
        for j in range(r):
            rows[i][m + j] = tmap.entries[i][j]
    n_tilde = Matrix.from_rows(rows)
    o_res = check_o_operator(alg, rho, tmap)
    nij_res = check_nijenhuis(sd, n_tilde)
    return OOperatorLift(n_tilde, o_res.holds, nij_res.holds)


def obstruction(path: DeformationPath) -> Cochain:
    """Theta = -1/2 sum_{i+j=k+1, i,j>=1} [phi_i, phi_j]; always a cocycle
    for a valid path (verified here, not assumed)."""
    res = check_deformation(path, "truncated")
    if not res.holds:
        raise InvalidStructure(
            "path fails the deformation equations",
            witness={"first_failing_power": res.first_failing_power})
    k = path.order
    n, m = path.base.arity, path.base.dim
    acc = cochain_zero(n, m, 2)
    for i in range(1, k + 1):
        j = k + 1 - i
        if 1 <= j <= k:
            acc = cochain_add(acc, gla_bracket(path.terms[i - 1],
                                               path.terms[j - 1]))
    theta = cochain_scale(Fraction(-1, 2), acc)
    phi0 = from_bracket(path.base)
    if not cochain_is_zero(gla_bracket(phi0, theta)):
        raise InvalidStructure("obstruction failed the cocycle identity; "
                               "the path data is inconsistent")
    return theta


@dataclass(frozen=True)
class ExtensionResult:
    success: bool
    term: Optional[Cochain]
    certificate: Optional[str]


def extend(path: DeformationPath) -> ExtensionResult:
    """Solve the coboundary equation for the next term; a solution extends
    the path one order, absence certifies a nonzero obstruction class."""
    theta = obstruction(path)
    mat = differential_matrix(path.base, 2)
    sol = solve_linear(mat, cochain_to_vec(theta))
    if sol is None:
        return ExtensionResult(False, None,
                               "obstruction class is nonzero: Theta is not "
                               "a coboundary")
    term = vec_to_cochain(sol, path.base.arity, path.base.dim, 1)
    return ExtensionResult(True, term, None)


@dataclass(frozen=True)
class RigidityTrial:
    kind: str
    trivialized: bool
    stuck_order: Optional[int]


@dataclass(frozen=True)
class RigidityReport:
    betti_h2: int
    max_order: int
    trials: tuple[RigidityTrial, ...]
    all_trivialized: bool
    note: str


_PROBE_NOTE = ("sampling probe: success on all sampled paths does not "
               "prove rigidity; a vanishing second cohomology does")


def rigidity_probe(alg: NLieAlgebra, max_order: int, trials: int,
                   seed: int = 0) -> RigidityReport:
    """Try to trivialize sampled valid deformations by the inductive
    coboundary-killing argument.

    Each step finds the first nonzero term phi_m, solves delta(Psi) =
    -phi_m, and conjugates by Id + t^m Psi, which clears power m exactly.
    A step with no solution records the order where the sample is stuck
    (its class in the second cohomology is nonzero).
    """
    _require_base_fi(DeformationPath(alg, 0, ()))
    rng = random.Random(seed)
    n, m = alg.arity, alg.dim
    betti = cohomology(alg, 2).betti
    d21 = differential_matrix(alg, 2)
    d10 = differential_matrix(alg, 1)
    cocycles = rank_nullspace(d21).nullspace
    results = []
    for t in range(max(0, trials)):
        if t % 2 == 0 and cocycles:
            combo = vec_zero(d21.cols)
            for v in cocycles:
                combo = vec_add(combo, vec_scale(
                    Fraction(rng.randint(-2, 2)), v))
            lead = vec_to_cochain(combo, n, m, 1)
            zero = cochain_zero(n, m, 1)
            path = DeformationPath(
                alg, max(1, max_order),
                (lead,) + (zero,) * (max(1, max_order) - 1))
            kind = "cocycle"
        else:
            maps = [Matrix.from_rows([[rng.randint(-1, 1) for _ in range(m)]
                                      for _ in range(m)])
                    for _ in range(max(1, max_order))]
            emap = EquivalenceMap(max(1, max_order), tuple(maps))
            path = conjugate_path(constant_path(alg, max(1, max_order)),
                                  emap)
            kind = "conjugated"
        results.append(_trivialize(alg, path, d10, kind))
    return RigidityReport(betti, max_order, tuple(results),
                          all(r.trivialized for r in results), _PROBE_NOTE)


def _trivialize(alg: NLieAlgebra, path: DeformationPath, d10: Matrix,
                kind: str) -> RigidityTrial:
    cur = path
    while True:
        lead = next((i + 1 for i, t in enumerate(cur.terms)
                     if not cochain_is_zero(t)), None)
        if lead is None:
            return RigidityTrial(kind, True, None)
        target = vec_scale(-1, cochain_to_vec(cur.terms[lead - 1]))
        sol = solve_linear(d10, target)
        if sol is None:
            return RigidityTrial(kind, False, lead)
        psi = vec_to_mat(sol, alg.dim)
        maps = [Matrix.zero(alg.dim, alg.dim)] * (lead - 1) + [psi]
        emap = EquivalenceMap(cur.order, tuple(maps))
        cur = conjugate_path(cur, emap)


def vec_to_mat(vec: Vector, m: int) -> Matrix:
    """Inverse of the column-major degree-0 vectorization."""
    if len(vec) != m * m:
        raise DimensionMismatch("vector length must be m^2")
    return Matrix(m, m, tuple(tuple(vec[j * m + i] for j in range(m))
                              for i in range(m)))
