"""Sparse multivariate polynomials over Q under a degrevlex order.

Monomials are exponent tuples; the variable order is fixed by whoever owns
the polynomial (an Algebra or a parser call).  All coefficients are exact
Fractions, never floats.
"""

from fractions import Fraction


def degrevlex_key(mono):
    # total degree first; ties broken so that the monomial with the larger
    # exponent on a later variable is smaller
    return (sum(mono), tuple(-e for e in reversed(mono)))


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def mono_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


class Polynomial:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None, normalize=True):
        self.nvars = nvars
        if not normalize:
            self.terms = terms if terms is not None else {}
            return
        self.terms = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[m] = self.terms.get(m, Fraction(0)) + c
            self.terms = {m: c for m, c in self.terms.items() if c}

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {}, normalize=False)

    @classmethod
    def constant(cls, nvars, c):
        c = Fraction(c)
        if not c:
            return cls.zero(nvars)
        return cls(nvars, {(0,) * nvars: c}, normalize=False)

    @classmethod
    def variable(cls, nvars, i):
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, {mono: Fraction(1)}, normalize=False)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return tuple(sorted((m, (c.numerator, c.denominator)) for m, c in self.terms.items()))

    def __add__(self, other):
        res = dict(self.terms)
        for m, c in other.terms.items():
            s = res.get(m, Fraction(0)) + c
            if s:
                res[m] = s
            elif m in res:
                del res[m]
        return Polynomial(self.nvars, res, normalize=False)

    def __neg__(self):
        return Polynomial(self.nvars, {m: -c for m, c in self.terms.items()}, normalize=False)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if not q:
                return Polynomial.zero(self.nvars)
            return Polynomial(self.nvars, {m: c * q for m, c in self.terms.items()}, normalize=False)
        res = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                s = res.get(m, Fraction(0)) + c1 * c2
                if s:
                    res[m] = s
                elif m in res:
                    del res[m]
        return Polynomial(self.nvars, res, normalize=False)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def leading(self):
        m = max(self.terms, key=degrevlex_key)
        return m, self.terms[m]

    def total_degree(self):
        return max((sum(m) for m in self.terms), default=-1)

    def diff(self, i):
        res = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                dm = tuple(x - 1 if j == i else x for j, x in enumerate(m))
                res[dm] = res.get(dm, Fraction(0)) + c * e
        return Polynomial(self.nvars, {m: c for m, c in res.items() if c}, normalize=False)

    def eliminate(self, i):
        """Set variable i to zero and drop its slot from every monomial."""
        res = {}
        for m, c in self.terms.items():
            if m[i]:
                continue
            res[m[:i] + m[i + 1:]] = c
        return Polynomial(self.nvars - 1, res, normalize=False)

    def embed(self, nvars, index_map):
        """Reindex variable i to index_map[i] inside a ring with nvars variables."""
        res = {}
        for m, c in self.terms.items():
            new = [0] * nvars
            for i, e in enumerate(m):
                if e:
                    new[index_map[i]] = e
            res[tuple(new)] = c
        return Polynomial(nvars, res, normalize=False)

    def sorted_terms(self, reverse=True):
        return sorted(self.terms.items(), key=lambda t: degrevlex_key(t[0]), reverse=reverse)

    def __repr__(self):
        return f"Polynomial({self.terms!r})"
