"""Presented Artinian local Q-algebras and exact arithmetic in them.

An Algebra is a quotient Q[x_1,...,x_m]/I with a reduced degrevlex Groebner
basis, a finite staircase monomial basis, and nilpotent augmentation ideal.
Elements are coordinate vectors over the monomial basis.  Everything is
immutable after construction; per-instance memo caches never change
observable results.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import (
    AlgebraMismatch,
    InvalidSpec,
    NameCollision,
    NotArtinian,
    NotAUnit,
    NotLocal,
    NotOneUnit,
)
from .expr import monomial_str, parse_polynomial, polynomial_str
from .poly import (
    Polynomial,
    degrevlex_key,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
)


@dataclass(frozen=True)
class AlgebraSpec:
    """Presentation data: ordered variables, relation expressions, optional sigma."""

    variables: tuple
    relations: tuple
    distinguished: str | None = None
    nilpotency_hint: int | None = None

    def __post_init__(self):
        names = tuple(self.variables)
        object.__setattr__(self, "variables", names)
        object.__setattr__(self, "relations", tuple(self.relations))
        if len(set(names)) != len(names):
            raise InvalidSpec("variable names must be unique")
        for n in names:
            if not n:
                raise InvalidSpec("variable names must be nonempty")
        if self.distinguished is not None:
            if self.distinguished not in names:
                raise InvalidSpec(f"distinguished variable {self.distinguished!r} not declared")
            if names[-1] != self.distinguished:
                raise InvalidSpec("the distinguished variable must be last in the order")

    def key(self):
        return (self.variables, self.relations, self.distinguished)


def _spoly(f, g):
    mf, cf = f.leading()
    mg, cg = g.leading()
    lcm = mono_lcm(mf, mg)
    a = Polynomial(f.nvars, {mono_div(lcm, mf): Fraction(1) / cf}, normalize=False)
    b = Polynomial(g.nvars, {mono_div(lcm, mg): Fraction(1) / cg}, normalize=False)
    return a * f - b * g


def _reduce_poly(p, basis):
    """Remainder of p under multivariate division by `basis` (degrevlex)."""
    work = dict(p.terms)
    rem = {}
    leads = [(g.leading(), g) for g in basis]
    while work:
        mono = max(work, key=degrevlex_key)
        coeff = work.pop(mono)
        for (lm, lc), g in leads:
            if mono_divides(lm, mono):
                q = mono_div(mono, lm)
                factor = coeff / lc
                for gm, gc in g.terms.items():
                    t = mono_mul(gm, q)
                    if t == mono:
                        continue
                    s = work.get(t, Fraction(0)) - factor * gc
                    if s:
                        work[t] = s
                    elif t in work:
                        del work[t]
                break
        else:
            rem[mono] = coeff
    return Polynomial(p.nvars, rem, normalize=False)


def _interreduce(polys):
    """Minimal reduced generating set, monic, sorted by leading monomial."""
    polys = [p for p in polys if p]
    changed = True
    while changed:
        changed = False
        polys.sort(key=lambda p: degrevlex_key(p.leading()[0]))
        out = []
        for i, p in enumerate(polys):
            others = out + polys[i + 1:]
            r = _reduce_poly(p, others) if others else p
            if r:
                _, c = r.leading()
                out.append(r * (Fraction(1) / c))
            if r.terms != p.terms:
                changed = True
        polys = out
    return polys


def buchberger(polys):
    """Reduced degrevlex Groebner basis with deterministic S-pair ordering."""
    basis = _interreduce(list(polys))
    pairs = sorted(
        ((sum(mono_lcm(basis[i].leading()[0], basis[j].leading()[0])), i, j)
         for i in range(len(basis)) for j in range(i)),
    )
    while pairs:
        _, i, j = pairs.pop(0)
        mi, _ = basis[i].leading()
        mj, _ = basis[j].leading()
        if mono_lcm(mi, mj) == mono_mul(mi, mj):
            continue  # coprime leading terms: S-polynomial reduces to zero
        r = _reduce_poly(_spoly(basis[i], basis[j]), basis)
        if r:
            _, c = r.leading()
            basis.append(r * (Fraction(1) / c))
            k = len(basis) - 1
            mk = basis[k].leading()[0]
            for idx in range(k):
                pairs.append((sum(mono_lcm(basis[idx].leading()[0], mk)), k, idx))
            pairs.sort()
    return _interreduce(basis)


class Algebra:
    """A presented Artinian local Q-algebra with computed monomial basis."""

    def __init__(self, spec, groebner, basis):
        self.spec = spec
        self.names = spec.variables
        self.nvars = len(self.names)
        self.groebner = tuple(groebner)
        self.basis = tuple(basis)  # ascending degrevlex; basis[0] == 1
        self.index = {m: i for i, m in enumerate(self.basis)}
        self.dimension = len(self.basis)
        self.base = None           # set by truncated_extension
        self.ext_name = None
        self.ext_order = None
        self._mono_nf = {}
        self._pair_cache = {}
        self._omega_cache = {}
        self._misc_cache = {}

    # -- construction helpers -------------------------------------------------

    def parse(self, text):
        return parse_polynomial(text, self.names)

    def reduce_mono(self, mono):
        """Normal-form coordinates of a raw monomial (memoized)."""
        cached = self._mono_nf.get(mono)
        if cached is not None:
            return cached
        if mono in self.index:
            coords = {mono: Fraction(1)}
        else:
            red = _reduce_poly(Polynomial(self.nvars, {mono: Fraction(1)}, normalize=False),
                               self.groebner)
            coords = dict(red.terms)
        self._mono_nf[mono] = coords
        return coords

    def element_from_poly(self, p):
        coords = {}
        for mono, c in p.terms.items():
            for bm, bc in self.reduce_mono(mono).items():
                s = coords.get(bm, Fraction(0)) + c * bc
                if s:
                    coords[bm] = s
                elif bm in coords:
                    del coords[bm]
        return AlgebraElement(self, coords)

    def element(self, value):
        """Coerce an expression string, rational, or element into this algebra."""
        if isinstance(value, AlgebraElement):
            if value.algebra is not self:
                raise AlgebraMismatch("element belongs to a different algebra")
            return value
        if isinstance(value, (int, Fraction)):
            q = Fraction(value)
            return AlgebraElement(self, {(0,) * self.nvars: q} if q else {})
        return self.element_from_poly(self.parse(value))

    @property
    def one(self):
        return self.element(1)

    @property
    def zero(self):
        return AlgebraElement(self, {})

    def variable(self, name):
        if name not in self.names:
            raise InvalidSpec(f"no variable {name!r} in this algebra")
        return self.element_from_poly(Polynomial.variable(self.nvars, self.names.index(name)))

    def pair_product(self, i, j):
        """Coordinates of basis[i] * basis[j] (memoized, symmetric)."""
        if i > j:
            i, j = j, i
        cached = self._pair_cache.get((i, j))
        if cached is None:
            cached = self.reduce_mono(mono_mul(self.basis[i], self.basis[j]))
            self._pair_cache[(i, j)] = cached
        return cached

    def monomial_strings(self):
        return [monomial_str(m, self.names) or "1" for m in self.basis]

    def __repr__(self):
        rel = ", ".join(self.spec.relations) or "0"
        return f"Algebra(Q[{', '.join(self.names)}]/({rel}), dim={self.dimension})"


class AlgebraElement:
    __slots__ = ("algebra", "coords")

    def __init__(self, algebra, coords):
        self.algebra = algebra
        self.coords = coords

    def key(self):
        return tuple(sorted((m, (c.numerator, c.denominator)) for m, c in self.coords.items()))

    def __eq__(self, other):
        return (isinstance(other, AlgebraElement)
                and self.algebra is other.algebra
                and self.coords == other.coords)

    def __hash__(self):
        return hash((id(self.algebra), self.key()))

    def __bool__(self):
        return bool(self.coords)

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            other = self.algebra.element(other)
        elif other.algebra is not self.algebra:
            raise AlgebraMismatch("elements from different algebras")
        return other

    def __add__(self, other):
        other = self._check(other)
        res = dict(self.coords)
        for m, c in other.coords.items():
            s = res.get(m, Fraction(0)) + c
            if s:
                res[m] = s
            elif m in res:
                del res[m]
        return AlgebraElement(self.algebra, res)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, {m: -c for m, c in self.coords.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if not q:
                return AlgebraElement(self.algebra, {})
            return AlgebraElement(self.algebra, {m: c * q for m, c in self.coords.items()})
        other = self._check(other)
        A = self.algebra
        res = {}
        for m1, c1 in self.coords.items():
            i = A.index[m1]
            for m2, c2 in other.coords.items():
                factor = c1 * c2
                for bm, bc in A.pair_product(i, A.index[m2]).items():
                    s = res.get(bm, Fraction(0)) + factor * bc
                    if s:
                        res[bm] = s
                    elif bm in res:
                        del res[bm]
        return AlgebraElement(self.algebra, res)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return invert_unit(self.algebra, self) ** (-k)
        result = self.algebra.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def augmentation(self):
        return self.coords.get((0,) * self.algebra.nvars, Fraction(0))

    def to_poly(self):
        return Polynomial(self.algebra.nvars, dict(self.coords), normalize=False)

    def __str__(self):
        return polynomial_str(self.to_poly(), self.algebra.names)

    def __repr__(self):
        return f"<{self} in {self.algebra!r}>"


# -- module operations --------------------------------------------------------


def build_algebra(spec):
    """Construct the Algebra for `spec`; staircase basis under degrevlex.

    Raises NotArtinian when the staircase is infinite and NotLocal when some
    non-constant standard monomial fails to be nilpotent.
    """
    nvars = len(spec.variables)
    rels = [parse_polynomial(r, spec.variables) for r in spec.relations]
    gb = buchberger(rels)
    leads = [g.leading()[0] for g in gb]

    bounds = []
    for i in range(nvars):
        pure = [m[i] for m in leads if sum(m) == m[i]]
        if not pure:
            raise NotArtinian(
                f"no pure power of {spec.variables[i]!r} among leading terms; staircase is infinite")
        bounds.append(min(pure))

    basis = []
    for exps in product(*(range(b) for b in bounds)):
        if not any(mono_divides(lm, exps) for lm in leads):
            basis.append(exps)
    basis.sort(key=degrevlex_key)

    alg = Algebra(spec, gb, basis)

    cap = alg.dimension if spec.nilpotency_hint is None else min(alg.dimension, spec.nilpotency_hint)
    for mono in basis[1:]:
        e = alg.element_from_poly(Polynomial(nvars, {mono: Fraction(1)}, normalize=False))
        if e ** max(cap, 1):
            raise NotLocal(
                f"standard monomial {monomial_str(mono, spec.variables)} is not nilpotent")
    return alg


def normal_form(algebra, poly):
    """Unique reduced representative of an expression string or Polynomial."""
    if isinstance(poly, str):
        poly = algebra.parse(poly)
    return algebra.element_from_poly(poly)


def is_unit(algebra, e):
    e = algebra.element(e)
    return bool(e.augmentation())


def invert_unit(algebra, u):
    """Exact inverse via a geometric series on the nilpotent part."""
    u = algebra.element(u)
    a = u.augmentation()
    if not a:
        raise NotAUnit(f"{u} has augmentation 0")
    x = u * (Fraction(1) / a) - 1
    acc = algebra.one
    term = algebra.one
    sign = -1
    while True:
        term = term * x
        if not term:
            break
        acc = acc + term * sign
        sign = -sign
    return acc * (Fraction(1) / a)


def log_one_unit(algebra, u):
    """log(u) = sum (-1)^(k+1) (u-1)^k / k for a 1-unit u; finite by nilpotency."""
    u = algebra.element(u)
    if u.augmentation() != 1:
        raise NotOneUnit(f"{u} has augmentation {u.augmentation()}, expected 1")
    x = u - 1
    acc = algebra.zero
    term = algebra.one
    k = 0
    while True:
        term = term * x
        k += 1
        if not term:
            break
        acc = acc + term * (Fraction((-1) ** (k + 1), k))
    return acc


def exp_nilpotent(algebra, x):
    """Truncated exponential of a nilpotent element."""
    if x.augmentation():
        raise NotOneUnit("exponential argument must be nilpotent")
    acc = algebra.one
    term = algebra.one
    k = 0
    while True:
        k += 1
        term = term * x * Fraction(1, k)
        if not term:
            break
        acc = acc + term
    return acc


def truncated_extension(algebra, name, order):
    """Build A[name]/name^order with A included coordinate-wise.

    The extension keeps a reference to its base, and its basis is the product
    of the base basis with powers of the new variable.
    """
    if name in algebra.names:
        raise NameCollision(f"variable {name!r} already present")
    if order < 1:
        raise InvalidSpec("truncation order must be >= 1")
    cache = algebra._misc_cache.setdefault("extensions", {})
    cached = cache.get((name, order))
    if cached is not None:
        return cached
    spec = AlgebraSpec(
        variables=algebra.names + (name,),
        relations=algebra.spec.relations + (f"{name}^{order}",),
        distinguished=name,
    )
    ext = build_algebra(spec)
    if ext.dimension != algebra.dimension * order:
        raise NotArtinian("extension basis is not the expected product basis")
    ext.base = algebra
    ext.ext_name = name
    ext.ext_order = order
    cache[(name, order)] = ext
    return ext


def transport(e, target, rename=None, drop=()):
    """Re-express `e` in `target` by matching variable names.

    `rename` maps source names to target names; names in `drop` send any
    monomial containing them to zero (quotient by those variables).
    """
    rename = rename or {}
    src = e.algebra
    index_map = {}
    for i, n in enumerate(src.names):
        n = rename.get(n, n)
        if n in drop:
            index_map[i] = "drop"
        elif n in target.names:
            index_map[i] = target.names.index(n)
        else:
            index_map[i] = None  # only an error if the element uses it
    poly = {}
    for mono, c in e.coords.items():
        new = [0] * target.nvars
        dead = False
        for i, exp in enumerate(mono):
            if not exp:
                continue
            j = index_map[i]
            if j == "drop":
                dead = True
                break
            if j is None:
                raise AlgebraMismatch(
                    f"target has no variable {rename.get(src.names[i], src.names[i])!r}")
            new[j] = exp
        if not dead:
            key = tuple(new)
            poly[key] = poly.get(key, Fraction(0)) + c
    return target.element_from_poly(Polynomial(target.nvars, poly))


def sigma_layers(e):
    """Split an element of a truncated extension into base coefficients per power.

    Returns [c_0, ..., c_{order-1}] with e = sum c_j * sigma^j.
    """
    B = e.algebra
    if B.base is None:
        raise AlgebraMismatch("element does not live in a truncated extension")
    A = B.base
    layers = [dict() for _ in range(B.ext_order)]
    for mono, c in e.coords.items():
        layers[mono[-1]][mono[:-1]] = c
    return [AlgebraElement(A, layer) for layer in layers]


def include(e, ext):
    """Coordinate inclusion of a base element into a truncated extension."""
    if ext.base is not e.algebra:
        raise AlgebraMismatch("not an extension of this element's algebra")
    return transport(e, ext)


def project_extension(e, smaller):
    """Projection A[s]/s^(n+1) -> A[s]/s^n on elements (kills the top layer)."""
    return transport(e, smaller)


def quotient_mod_variable(algebra, name):
    """The quotient algebra A/(name); relations get name set to zero."""
    if name not in algebra.names:
        raise InvalidSpec(f"no variable {name!r}")
    i = algebra.names.index(name)
    new_names = algebra.names[:i] + algebra.names[i + 1:]
    rels = []
    for r in algebra.spec.relations:
        p = parse_polynomial(r, algebra.names).eliminate(i)
        if p:
            rels.append(polynomial_str(p, new_names))
    return build_algebra(AlgebraSpec(variables=new_names, relations=tuple(rels)))
