"""Exact sparse multivariate polynomials and polynomial vector fields.

Polynomials stand in for the smooth functions on the base space, vector
fields for its derivations.  Coefficients are arbitrary-precision rationals
(``fractions.Fraction``), so identities are decided by exact equality.

Terms are stored sparsely as a map from exponent vectors (one entry per
variable) to nonzero coefficients.  Exponent vectors compare
lexicographically, which fixes the canonical term order used when
serializing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DimensionMismatch

Exponents = tuple[int, ...]


@dataclass(frozen=True)
class MultiPoly:
    """Sparse polynomial with rational coefficients.

    ``terms`` never stores zero coefficients; build instances through the
    module constructors or arithmetic so this stays true.
    """

    num_vars: int
    terms: dict[Exponents, Fraction]

    def __post_init__(self):
        for exps, c in self.terms.items():
            if len(exps) != self.num_vars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps!r}")
            if c == 0:
                raise ValueError("zero coefficient stored in canonical form")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: MultiPoly) -> MultiPoly:
        _same_vars(self, other)
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            acc = terms.get(exps, _F0) + c
            if acc == 0:
                terms.pop(exps, None)
            else:
                terms[exps] = acc
        return MultiPoly(self.num_vars, terms)

    def __neg__(self) -> MultiPoly:
        return MultiPoly(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: MultiPoly) -> MultiPoly:
        return self + (-other)

    def __mul__(self, other: MultiPoly | Fraction | int) -> MultiPoly:
        if isinstance(other, (Fraction, int)):
            return self.scale(other)
        _same_vars(self, other)
        terms: dict[Exponents, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                exps = tuple(x + y for x, y in zip(ea, eb))
                acc = terms.get(exps, _F0) + ca * cb
                if acc == 0:
                    terms.pop(exps, None)
                else:
                    terms[exps] = acc
        return MultiPoly(self.num_vars, terms)

    def __rmul__(self, other: Fraction | int) -> MultiPoly:
        return self.scale(other)

    def scale(self, c: Fraction | int) -> MultiPoly:
        c = Fraction(c)
        if c == 0:
            return poly_zero(self.num_vars)
        return MultiPoly(self.num_vars, {e: c * t for e, t in self.terms.items()})

    def partial(self, var: int) -> MultiPoly:
        """Partial derivative with respect to variable ``var`` (0-based)."""
        if not 0 <= var < self.num_vars:
            raise DimensionMismatch(f"no variable {var} in {self.num_vars} vars")
        terms: dict[Exponents, Fraction] = {}
        for exps, c in self.terms.items():
            k = exps[var]
            if k == 0:
                continue
            lowered = exps[:var] + (k - 1,) + exps[var + 1:]
            acc = terms.get(lowered, _F0) + c * k
            if acc == 0:
                terms.pop(lowered, None)
            else:
                terms[lowered] = acc
        return MultiPoly(self.num_vars, terms)

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        """Terms in the canonical (lexicographic exponent) order."""
        return sorted(self.terms.items())

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            factors = [str(c)] if c != 1 or not any(exps) else []
            for v, e in enumerate(exps):
                if e == 1:
                    factors.append(f"x{v}")
                elif e > 1:
                    factors.append(f"x{v}^{e}")
            parts.append("*".join(factors) if factors else str(c))
        return " + ".join(parts)


_F0 = Fraction(0)


def _same_vars(a: MultiPoly, b: MultiPoly) -> None:
    if a.num_vars != b.num_vars:
        raise DimensionMismatch(
            f"polynomials over {a.num_vars} and {b.num_vars} variables")


def poly_zero(num_vars: int) -> MultiPoly:
    return MultiPoly(num_vars, {})


def poly_const(num_vars: int, value: Fraction | int) -> MultiPoly:
    value = Fraction(value)
    if value == 0:
        return poly_zero(num_vars)
    return MultiPoly(num_vars, {(0,) * num_vars: value})


def poly_var(num_vars: int, var: int) -> MultiPoly:
    if not 0 <= var < num_vars:
        raise DimensionMismatch(f"no variable {var} in {num_vars} vars")
    exps = tuple(1 if i == var else 0 for i in range(num_vars))
    return MultiPoly(num_vars, {exps: Fraction(1)})


def poly_from_terms(num_vars: int,
                    terms: Mapping[Exponents, Fraction | int]) -> MultiPoly:
    """Canonicalize an arbitrary exponent->coefficient mapping."""
    out: dict[Exponents, Fraction] = {}
    for exps, c in terms.items():
        c = Fraction(c)
        exps = tuple(exps)
        acc = out.get(exps, _F0) + c
        if acc == 0:
            out.pop(exps, None)
        else:
            out[exps] = acc
    return MultiPoly(num_vars, out)


@dataclass(frozen=True)
class PolyVectorField:
    """Vector field with polynomial components, acting as a derivation."""

    num_vars: int
    components: tuple[MultiPoly, ...]

    def __post_init__(self):
        if len(self.components) != self.num_vars:
            raise DimensionMismatch("one component per variable required")
        for p in self.components:
            if p.num_vars != self.num_vars:
                raise DimensionMismatch("component over wrong variable count")

    @property
    def is_zero(self) -> bool:
        return all(p.is_zero for p in self.components)

    def __add__(self, other: PolyVectorField) -> PolyVectorField:
        if self.num_vars != other.num_vars:
            raise DimensionMismatch("vector fields over different bases")
        return PolyVectorField(
            self.num_vars,
            tuple(a + b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> PolyVectorField:
        return PolyVectorField(self.num_vars,
                               tuple(-p for p in self.components))

    def __sub__(self, other: PolyVectorField) -> PolyVectorField:
        return self + (-other)

    def scale(self, f: MultiPoly | Fraction | int) -> PolyVectorField:
        return PolyVectorField(self.num_vars,
                               tuple(p * f for p in self.components))

    def __str__(self) -> str:
        parts = [f"({p})*d/dx{v}" for v, p in enumerate(self.components)
                 if not p.is_zero]
        return " + ".join(parts) if parts else "0"


def vf_zero(num_vars: int) -> PolyVectorField:
    return PolyVectorField(num_vars, tuple(poly_zero(num_vars)
                                           for _ in range(num_vars)))


def vf_coordinate(num_vars: int, var: int) -> PolyVectorField:
    """The coordinate field d/dx_var."""
    comps = [poly_zero(num_vars) for _ in range(num_vars)]
    comps[var] = poly_const(num_vars, 1)
    return PolyVectorField(num_vars, tuple(comps))


def vf_apply(v: PolyVectorField, f: MultiPoly) -> MultiPoly:
    """Apply the derivation: sum_i v_i * df/dx_i."""
    if v.num_vars != f.num_vars:
        raise DimensionMismatch("field and function over different bases")
    out = poly_zero(f.num_vars)
    for i, comp in enumerate(v.components):
        if comp.is_zero:
            continue
        out = out + comp * f.partial(i)
    return out


def vf_bracket(v: PolyVectorField, w: PolyVectorField) -> PolyVectorField:
    """Commutator [v, w]; its components are v(w_i) - w(v_i)."""
    if v.num_vars != w.num_vars:
        raise DimensionMismatch("vector fields over different bases")
    return PolyVectorField(
        v.num_vars,
        tuple(vf_apply(v, wi) - vf_apply(w, vi)
              for vi, wi in zip(v.components, w.components)))


def vf_sum(fields: Iterable[PolyVectorField], num_vars: int) -> PolyVectorField:
    out = vf_zero(num_vars)
    for f in fields:
        out = out + f
    return out
