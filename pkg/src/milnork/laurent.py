"""Laurent polynomials in sigma with algebra coefficients, and formal symbols
over them.

These model the units of A[[sigma]][1/sigma] that occur in the rewrite
chains: every atom is a Laurent polynomial whose lowest-degree coefficient is
a unit of A (sigma itself included), with a formal integer exponent.
Inverses are never expanded into series; value equality of entries is
decided by cross-multiplying the positive- and negative-exponent parts,
which is an exact Laurent-polynomial identity.

A truncation order may be applied to products, which models the quotient
A[sigma]/sigma^N after the projection step.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import AlgebraMismatch, NonUnitEntry
from .expr import parse_polynomial, polynomial_str
from .poly import Polynomial


class LaurentPolynomial:
    """Map sigma-degree -> algebra element; degrees may be negative."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra, coeffs):
        self.algebra = algebra
        self.coeffs = {d: c for d, c in coeffs.items() if c}

    @classmethod
    def constant(cls, algebra, value):
        return cls(algebra, {0: algebra.element(value)})

    @classmethod
    def sigma(cls, algebra, degree=1):
        return cls(algebra, {degree: algebra.one})

    def __bool__(self):
        return bool(self.coeffs)

    def ord(self):
        return min(self.coeffs) if self.coeffs else None

    def maxdeg(self):
        return max(self.coeffs) if self.coeffs else None

    def lowest_coefficient(self):
        o = self.ord()
        return None if o is None else self.coeffs[o]

    def shift(self, k):
        return LaurentPolynomial(self.algebra, {d + k: c for d, c in self.coeffs.items()})

    def truncate(self, order):
        if order is None:
            return self
        return LaurentPolynomial(self.algebra,
                                 {d: c for d, c in self.coeffs.items() if d < order})

    def __add__(self, other):
        res = dict(self.coeffs)
        for d, c in other.coeffs.items():
            s = res.get(d)
            s = c if s is None else s + c
            if s:
                res[d] = s
            elif d in res:
                del res[d]
        return LaurentPolynomial(self.algebra, res)

    def __neg__(self):
        return LaurentPolynomial(self.algebra, {d: -c for d, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def mul(self, other, order=None):
        res = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                d = d1 + d2
                if order is not None and d >= order:
                    continue
                prod = c1 * c2
                if not prod:
                    continue
                s = res.get(d)
                s = prod if s is None else s + prod
                if s:
                    res[d] = s
                elif d in res:
                    del res[d]
        return LaurentPolynomial(self.algebra, res)

    def power(self, k, order=None):
        if k < 0:
            raise ValueError("negative power of a Laurent polynomial")
        acc = LaurentPolynomial.constant(self.algebra, 1)
        base = self
        while k:
            if k & 1:
                acc = acc.mul(base, order)
            k >>= 1
            if k:
                base = base.mul(base, order)
        return acc

    def __eq__(self, other):
        return isinstance(other, LaurentPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return tuple(sorted((d, c.key()) for d, c in self.coeffs.items()))

    def to_string(self, sigma_name="sigma"):
        """Expression-grammar string; requires nonnegative degrees."""
        if any(d < 0 for d in self.coeffs):
            raise ValueError("negative sigma-degree has no expression form")
        A = self.algebra
        names = A.names + (sigma_name,)
        terms = {}
        for d, c in self.coeffs.items():
            for mono, q in c.coords.items():
                terms[mono + (d,)] = q
        return polynomial_str(Polynomial(len(names), terms), names)

    @classmethod
    def from_string(cls, algebra, text, sigma_name="sigma"):
        names = algebra.names + (sigma_name,)
        p = parse_polynomial(text, names)
        coeffs = {}
        for mono, q in p.terms.items():
            d = mono[-1]
            base = mono[:-1]
            layer = coeffs.setdefault(d, {})
            layer[base] = layer.get(base, Fraction(0)) + q
        out = {}
        for d, layer in coeffs.items():
            out[d] = algebra.element_from_poly(Polynomial(algebra.nvars, layer))
        return cls(algebra, out)

    def __str__(self):
        return self.to_string()


def _check_atom(poly):
    low = poly.lowest_coefficient()
    if low is None or not low.augmentation():
        raise NonUnitEntry(
            "atom is not a unit of A[[sigma]][1/sigma]: lowest coefficient must be a unit of A")


class LaurentEntry:
    """Formal product of atoms (LaurentPolynomial, integer exponent)."""

    __slots__ = ("algebra", "atoms")

    def __init__(self, algebra, atoms):
        self.algebra = algebra
        norm = []
        for poly, exp in atoms:
            exp = int(exp)
            if exp == 0:
                continue
            if poly.algebra is not algebra:
                raise AlgebraMismatch("atom coefficients live in a different algebra")
            _check_atom(poly)
            norm.append((poly, exp))
        self.atoms = tuple(norm)

    def split(self, order=None):
        """(numerator, denominator) products of the atom powers."""
        num = LaurentPolynomial.constant(self.algebra, 1)
        den = LaurentPolynomial.constant(self.algebra, 1)
        for poly, exp in self.atoms:
            if exp > 0:
                num = num.mul(poly.power(exp, order), order)
            else:
                den = den.mul(poly.power(-exp, order), order)
        return num, den

    def truncate(self, order):
        return LaurentEntry(self.algebra,
                            [(poly.truncate(order), exp) for poly, exp in self.atoms])

    def sigma_order(self):
        return sum(exp * poly.ord() for poly, exp in self.atoms)

    def key(self):
        return tuple((poly.key(), exp) for poly, exp in self.atoms)

    def __str__(self):
        if not self.atoms:
            return "1"
        parts = []
        for poly, exp in self.atoms:
            body = f"({poly})"
            parts.append(body if exp == 1 else f"{body}^{exp}")
        return "*".join(parts)


def entries_value_equal(e1, e2, order=None):
    """Cross-multiplication test n1*d2 == n2*d1, exact (or mod sigma^order)."""
    n1, d1 = e1.split(order)
    n2, d2 = e2.split(order)
    return n1.mul(d2, order).coeffs == n2.mul(d1, order).coeffs


def entry_value_is(e, poly, order=None):
    """Does the entry collapse to the given Laurent polynomial value?"""
    n, d = e.split(order)
    return n.coeffs == d.mul(poly, order).coeffs


def entries_sum_is_one(e1, e2, order=None):
    """Steinberg side condition: value(e1) + value(e2) = 1."""
    n1, d1 = e1.split(order)
    n2, d2 = e2.split(order)
    lhs = n1.mul(d2, order) + n2.mul(d1, order)
    rhs = d1.mul(d2, order)
    return lhs.coeffs == rhs.coeffs


def entries_sum_is_zero(e1, e2, order=None):
    n1, d1 = e1.split(order)
    n2, d2 = e2.split(order)
    lhs = n1.mul(d2, order) + n2.mul(d1, order)
    return not lhs.coeffs


def entry_is_one(e, order=None):
    n, d = e.split(order)
    return n.coeffs == d.coeffs


@dataclass(frozen=True)
class LaurentSymbol:
    entries: tuple

    @property
    def degree(self):
        return len(self.entries)

    @property
    def algebra(self):
        return self.entries[0].algebra

    def key(self):
        return tuple(e.key() for e in self.entries)

    def replace(self, slot, entry):
        new = list(self.entries)
        new[slot] = entry
        return LaurentSymbol(tuple(new))

    def truncate(self, order):
        return LaurentSymbol(tuple(e.truncate(order) for e in self.entries))

    def __str__(self):
        return "{" + ", ".join(str(e) for e in self.entries) + "}"


class LaurentState:
    """Canonical Q-combination of Laurent symbols: sorted, merged, no zeros."""

    __slots__ = ("algebra", "degree", "terms")

    def __init__(self, algebra, degree, terms):
        self.algebra = algebra
        self.degree = degree
        merged = {}
        keyed = {}
        for coeff, sym in terms:
            coeff = Fraction(coeff)
            if not coeff:
                continue
            if sym.degree != degree:
                raise AlgebraMismatch("mixed symbol degrees in a state")
            k = sym.key()
            merged[k] = merged.get(k, Fraction(0)) + coeff
            keyed.setdefault(k, sym)
        self.terms = tuple((merged[k], keyed[k]) for k in sorted(merged) if merged[k])

    def replace_term(self, idx, replacements):
        terms = list(self.terms)
        del terms[idx]
        return LaurentState(self.algebra, self.degree, terms + list(replacements))

    def with_term(self, coeff, sym):
        return LaurentState(self.algebra, self.degree, list(self.terms) + [(coeff, sym)])

    def find(self, sym_key):
        for i, (_, sym) in enumerate(self.terms):
            if sym.key() == sym_key:
                return i
        return None

    def truncate(self, order):
        return LaurentState(self.algebra, self.degree,
                            [(c, s.truncate(order)) for c, s in self.terms])

    def key(self):
        return tuple((str(c), s.key()) for c, s in self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, LaurentState) and self.key() == other.key()

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{s}" for c, s in self.terms)
