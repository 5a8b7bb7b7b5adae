"""Milnor symbols over the test algebras and their dlog realization.

Symbols are formal: no quotient group is ever constructed.  The computable
content is (a) the dlog realization into Omega^p, which kills the defining
relations exactly, (b) generator families for the relative kernel of
K(A[s]/s^(n+1)) -> K(A[s]/s^n), (c) the evaluation sending a generator
{1 + c s^n, u_1, ..., u_(p-1)} to c * dlog u_1 ^ ... ^ dlog u_(p-1), and
(d) rank checks showing those images span the differential side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    AlgebraElement,
    AlgebraSpec,
    build_algebra,
    invert_unit,
    quotient_mod_variable,
    sigma_layers,
    transport,
    truncated_extension,
)
from .errors import (
    AlgebraMismatch,
    MilnorkError,
    NonUnitEntry,
    NotGeneratorShape,
    QuotientNotLocal,
    SigmaNotDesignated,
)
from .kahler import omega_module, wedge, dlog
from .linalg import RowSpace, express


class SymbolEntry:
    """A formal product of algebra units: atoms (element, exponent)."""

    __slots__ = ("algebra", "atoms", "_collapsed")

    def __init__(self, algebra, atoms):
        self.algebra = algebra
        norm = []
        for elem, exp in atoms:
            elem = algebra.element(elem)
            exp = int(exp)
            if exp and not elem.augmentation():
                raise NonUnitEntry(f"atom {elem} is not a unit")
            if exp:
                norm.append((elem, exp))
        self.atoms = tuple(norm)
        self._collapsed = None

    def collapse(self):
        if self._collapsed is None:
            acc = self.algebra.one
            for elem, exp in self.atoms:
                acc = acc * (elem ** exp if exp > 0 else invert_unit(self.algebra, elem) ** (-exp))
            if not acc.augmentation():
                raise NonUnitEntry(f"entry {self} collapses to a non-unit")
            self._collapsed = acc
        return self._collapsed

    def key(self):
        return self.collapse().key()

    def __str__(self):
        if not self.atoms:
            return "1"
        return "*".join(f"({e})" + (f"^{k}" if k != 1 else "") for e, k in self.atoms)


@dataclass(frozen=True)
class MilnorSymbol:
    entries: tuple

    def __post_init__(self):
        algs = {id(e.algebra) for e in self.entries}
        if len(algs) > 1:
            raise AlgebraMismatch("symbol entries over different algebras")

    @property
    def degree(self):
        return len(self.entries)

    @property
    def algebra(self):
        return self.entries[0].algebra

    def key(self):
        return tuple(e.key() for e in self.entries)

    def __str__(self):
        return "{" + ", ".join(str(e.collapse()) for e in self.entries) + "}"


class SymbolCombination:
    """Q-linear combination of symbols; terms merged on value-equal entries."""

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
                raise AlgebraMismatch("mixed symbol degrees in one combination")
            k = sym.key()
            merged[k] = merged.get(k, Fraction(0)) + coeff
            keyed.setdefault(k, sym)
        self.terms = tuple(
            (merged[k], keyed[k]) for k in sorted(merged) if merged[k]
        )

    def __add__(self, other):
        if other.algebra is not self.algebra or other.degree != self.degree:
            raise AlgebraMismatch("combinations do not match")
        return SymbolCombination(self.algebra, self.degree, self.terms + other.terms)

    def scale(self, q):
        return SymbolCombination(self.algebra, self.degree,
                                 [(c * Fraction(q), s) for c, s in self.terms])

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{s}" for c, s in self.terms)


def make_symbol(entries, coeff=1, algebra=None):
    """Single-term combination from entry data.

    Each entry may be a SymbolEntry, an algebra element / expression string
    (a single atom with exponent 1), or a list of (element, exponent) atoms.
    """
    built = []
    for entry in entries:
        if isinstance(entry, SymbolEntry):
            built.append(entry)
            continue
        if isinstance(entry, AlgebraElement):
            built.append(SymbolEntry(entry.algebra, [(entry, 1)]))
            continue
        if isinstance(entry, (list, tuple)):
            if algebra is None:
                algebra = entry[0][0].algebra
            built.append(SymbolEntry(algebra, entry))
            continue
        if algebra is None:
            raise AlgebraMismatch("need an algebra to parse string entries")
        built.append(SymbolEntry(algebra, [(algebra.element(entry), 1)]))
    for e in built:
        e.collapse()
    sym = MilnorSymbol(tuple(built))
    return SymbolCombination(sym.algebra, sym.degree, [(coeff, sym)])


def dlog_realize(comb):
    """Slot-wise dlog followed by wedge; Q-linear over the terms.

    Steinberg instances {a, 1-a}, {a, -a} and repeats {a, a} land on wedges
    of proportional 1-forms and vanish exactly.
    """
    A = comb.algebra
    target = omega_module(A, comb.degree)
    total = target.form()
    cache = {}
    for coeff, sym in comb.terms:
        parts = []
        for entry in sym.entries:
            acc = omega_module(A, 1).form()
            for elem, exp in entry.atoms:
                k = elem.key()
                form = cache.get(k)
                if form is None:
                    form = dlog(elem)
                    cache[k] = form
                acc = acc + form.scale(exp)
            parts.append(acc)
        if not parts:
            continue
        result = parts[0]
        for part in parts[1:]:
            result = wedge(result, part)
        total = total + result.scale(coeff)
    return total


# -- deterministic sample grids ------------------------------------------------


def _mono_poly(algebra, mono):
    from .poly import Polynomial

    return Polynomial(algebra.nvars, {mono: Fraction(1)}, normalize=False)


def _mono_element(algebra, mono):
    return algebra.element_from_poly(_mono_poly(algebra, mono))


def coefficient_samples(algebra):
    """The monomial basis as elements (the c and e grid)."""
    return [_mono_element(algebra, mono) for mono in algebra.basis]


def unit_samples(algebra):
    """Units 1 + b for non-constant basis monomials b, plus constants 2, 3."""
    out = [algebra.one + _mono_element(algebra, mono) for mono in algebra.basis[1:]]
    out.append(algebra.element(2))
    out.append(algebra.element(3))
    return out


def relative_generators(algebra, n, p, coeffs=None, units=None, sigma_name="sigma"):
    """Generator families for the relative kernel at level n, degree p >= 2.

    Over B = A[s]/s^(n+1): symbols {1 + c s^n, u_1, ..., u_(p-1)} for c in the
    coefficient grid, and {1 + e s^n, 1 - s, u_2, ..., u_(p-1)} for unit e.
    Deterministic ordering; empty grids give an empty list.
    """
    if p < 2:
        raise ValueError("generator families need degree p >= 2")
    B = truncated_extension(algebra, sigma_name, n + 1)
    sigma = B.variable(sigma_name)
    sn = sigma ** n
    coeffs = coefficient_samples(algebra) if coeffs is None else [algebra.element(c) for c in coeffs]
    units = unit_samples(algebra) if units is None else [algebra.element(u) for u in units]
    lifted = [transport(u, B) for u in units]
    gens = []
    tails = _tuples(lifted, p - 1)
    for c in coeffs:
        first = B.one + transport(c, B) * sn
        for tail in tails:
            gens.append(make_symbol([first] + list(tail), 1))
    one_minus = B.one - sigma
    unit_coeffs = [c for c in coeffs if c.augmentation()]
    for e in unit_coeffs:
        first = B.one + transport(e, B) * sn
        for tail in _tuples(lifted, p - 2):
            gens.append(make_symbol([first, one_minus] + list(tail), 1))
    return gens


def _tuples(pool, k):
    if k == 0:
        return [()]
    out = [()]
    for _ in range(k):
        out = [prev + (u,) for prev in out for u in pool]
    return out


def _first_slot_coefficient(entry, n):
    """Extract c from a first slot collapsing to 1 + c s^n; None if malformed."""
    B = entry.algebra
    layers = sigma_layers(entry.collapse())
    if len(layers) <= n:
        return None
    base_one = B.base.one
    if layers[0] != base_one:
        return None
    for j in range(1, len(layers)):
        if j != n and layers[j]:
            return None
    return layers[n]


def relative_realize(comb, n):
    """Evaluate the relative-class map on generator-shaped combinations.

    {1 + c s^n, u_1, ..., u_(p-1)} with s-free units u_i goes to
    c * dlog u_1 ^ ... ^ dlog u_(p-1) over the base algebra; terms containing
    a 1 - s slot are sent to zero.  The s^n/s^(n+1) factor is a degree tag:
    the target is Omega^(p-1) of the base.
    """
    B = comb.algebra
    if B.base is None:
        raise NotGeneratorShape("combination does not live in a truncated extension")
    A = B.base
    if B.ext_order != n + 1:
        raise NotGeneratorShape(f"expected truncation order {n + 1}, got {B.ext_order}")
    sigma = B.variable(B.ext_name)
    one_minus_sigma = (B.one - sigma).key()
    target = omega_module(A, comb.degree - 1)
    total = target.form()
    for coeff, sym in comb.terms:
        c = _first_slot_coefficient(sym.entries[0], n)
        if c is None:
            raise NotGeneratorShape(f"first slot of {sym} is not 1 + c*s^{n}")
        rest = []
        vanishing = False
        for entry in sym.entries[1:]:
            value = entry.collapse()
            if value.key() == one_minus_sigma:
                vanishing = True
                break
            layers = sigma_layers(value)
            if any(layers[j] for j in range(1, len(layers))):
                raise NotGeneratorShape(f"slot {entry} is neither s-free nor 1 - s")
            rest.append(layers[0])
        if vanishing:
            continue
        acc = None
        for u in rest:
            f = dlog(u)
            acc = f if acc is None else wedge(acc, f)
        if acc is None:
            acc = omega_module(A, 0).form({0: Fraction(1)})
        total = total + acc.act(c).scale(coeff)
    return total


def tangent_extension(algebra, name="eps"):
    """A[eps]/eps^2, the ring of dual numbers over the algebra."""
    return truncated_extension(algebra, name, 2)


def tangent_realize(comb):
    """Realize tangent-kernel symbols {1 + c eps, u_1, ...} as forms over the base."""
    B = comb.algebra
    if B.base is None or B.ext_order != 2:
        raise NotGeneratorShape("combination does not live in a dual-number extension")
    A = B.base
    target = omega_module(A, comb.degree - 1)
    total = target.form()
    for coeff, sym in comb.terms:
        c = _first_slot_coefficient(sym.entries[0], 1)
        if c is None:
            raise NotGeneratorShape(f"first slot of {sym} is not 1 + c*eps")
        acc = None
        for entry in sym.entries[1:]:
            layers = sigma_layers(entry.collapse())
            if layers[1]:
                raise NotGeneratorShape(f"slot {entry} is not eps-free")
            f = dlog(layers[0])
            acc = f if acc is None else wedge(acc, f)
        if acc is None:
            acc = omega_module(A, 0).form({0: Fraction(1)})
        total = total + acc.act(c).scale(coeff)
    return total


@dataclass(frozen=True)
class SpanVerdict:
    rank: int
    dim: int
    spans: bool
    certificate: tuple  # indices of targets forming a basis of the span

    def record(self):
        return [
            ("span.rank", self.rank),
            ("span.dim", self.dim),
            ("span.spans", "true" if self.spans else "false"),
            ("span.certificate", ",".join(str(i) for i in self.certificate) or "-"),
        ]


def span_check(targets, module):
    """Exact rank of the span of `targets` inside `module`."""
    space = RowSpace()
    witnesses = []
    for idx, form in enumerate(targets):
        if form.module is not module:
            raise AlgebraMismatch("target form lives in a different module")
        if space.insert(dict(form.coords)) is not None:
            witnesses.append(idx)
    rank = space.rank
    return SpanVerdict(rank, module.dimension, rank == module.dimension, tuple(witnesses))


def vanishing_additivity_check(algebra, c1, c2, n, sigma_name="sigma"):
    """Exact identity splitting a sum coefficient into a product of 1-units.

    Verifies (1 - (n+1)(c1+c2) s^n) = (1 - (n+1) c1 s^n)(1 - (n+1) c2 s^n)
    in A[s]/s^(n+1); true for all n >= 1 because s^(2n) dies there.
    """
    B = truncated_extension(algebra, sigma_name, n + 1)
    sn = B.variable(sigma_name) ** n
    c1 = transport(algebra.element(c1), B)
    c2 = transport(algebra.element(c2), B)
    m = n + 1
    lhs = B.one - (c1 + c2) * m * sn
    rhs = (B.one - c1 * m * sn) * (B.one - c2 * m * sn)
    return lhs == rhs


# -- transport of the isomorphism to sigma inside the algebra ------------------


@dataclass(frozen=True)
class TransportReport:
    n: int
    base_dim: int
    target_dim: int
    surjective: bool
    multiplicative: bool
    kernel_dim: int
    tensor_target_dim: int
    compatible: bool
    degenerate: bool
    samples: int

    @property
    def ok(self):
        return self.surjective and self.multiplicative and self.compatible

    def record(self):
        return [
            ("tau.n", self.n),
            ("tau.base_dim", self.base_dim),
            ("tau.target_dim", self.target_dim),
            ("tau.surjective", "true" if self.surjective else "false"),
            ("tau.multiplicative", "true" if self.multiplicative else "false"),
            ("tau.kernel_dim", self.kernel_dim),
            ("tau.tensor_target_dim", self.tensor_target_dim),
            ("tau.compatible", "true" if self.compatible else "false"),
            ("tau.degenerate", "true" if self.degenerate else "false"),
            ("tau.samples", self.samples),
        ]


def transport_check(B, n, p=2, lam_name="lam"):
    """Model sigma as an element: compare the polynomial realization with the
    quotient-side realization through tau: A'[lam]/lam^n -> B/sigma^n.

    A' = B/sigma.  tau sends basis monomials b*lam^j to the class of
    b*sigma^j; the report checks surjectivity and multiplicativity on
    monomial bases.  Compatibility is tested in Omega^(p-1) of A' tensored
    with the cyclic module sigma^n/sigma^(n+1), computed as the quotient by
    the annihilator action.
    """
    sigma_name = B.spec.distinguished
    if sigma_name is None:
        raise SigmaNotDesignated("the algebra does not designate a sigma variable")
    try:
        Ap = quotient_mod_variable(B, sigma_name)
    except MilnorkError as exc:
        raise QuotientNotLocal(f"B/{sigma_name} is not Artinian local: {exc}") from exc

    Bn = build_quotient_power(B, sigma_name, n)
    Bn1 = build_quotient_power(B, sigma_name, n + 1)
    dom = truncated_extension(Ap, lam_name, n)

    def tau(e, target):
        return transport(e, target, rename={lam_name: sigma_name})

    # surjectivity on monomial bases
    images = []
    for mono in dom.basis:
        elem = dom.element_from_poly(_mono_poly(dom, mono))
        images.append(tau(elem, Bn))
    space = RowSpace()
    for img in images:
        space.insert({Bn.index[m]: c for m, c in img.coords.items()})
    surjective = space.rank == Bn.dimension

    # multiplicativity of the monomial-level map
    multiplicative = True
    for i, mi in enumerate(dom.basis):
        ei = dom.element_from_poly(_mono_poly(dom, mi))
        for j in range(i, dom.dimension):
            ej = dom.element_from_poly(_mono_poly(dom, dom.basis[j]))
            if tau(ei * ej, Bn) != images[i] * images[j]:
                multiplicative = False
                break
        if not multiplicative:
            break

    # annihilator of sigma^n / sigma^(n+1) as an A'-module
    sig_n = Bn1.variable(sigma_name) ** n
    degenerate = not bool(sig_n)
    mult_vectors = [transport(_mono_element(Ap, mono), Bn1) * sig_n for mono in Ap.basis]
    kernel_basis = _kernel_of_map(Ap, mult_vectors, Bn1)

    # the tensor target Omega^(p-1)_{A'} / (annihilator * Omega^(p-1)_{A'})
    M = omega_module(Ap, p - 1)
    killed = RowSpace()
    for k in kernel_basis:
        for bform in M.basis_forms():
            killed.insert(dict(bform.act(k).coords))
    tensor_dim = M.dimension - killed.rank

    def to_tensor(form):
        return killed.reduce(dict(form.coords))

    # compatibility on generators {1 + c lam^n, u_1, ..., u_(p-1)}
    compatible = True
    samples = 0
    if not degenerate:
        dom_full = truncated_extension(Ap, lam_name, n + 1)
        lam_full = dom_full.variable(lam_name)
        tails = _tuples(unit_samples(Ap), p - 1)
        for c in coefficient_samples(Ap):
            first = dom_full.one + transport(c, dom_full) * lam_full ** n
            for tail in tails:
                samples += 1
                sym = make_symbol([first] + [transport(u, dom_full) for u in tail], 1)
                direct = relative_realize(sym, n)
                # route the entries through tau and realize on the quotient side
                w = tau(first, Bn1) - Bn1.one
                cbar = _solve_layer(Ap, mult_vectors, w, Bn1)
                if cbar is None:
                    compatible = False
                    break
                acc = None
                for u in tail:
                    u_bar = transport(tau(transport(u, dom_full), Bn1), Ap, drop=(sigma_name,))
                    f = dlog(u_bar)
                    acc = f if acc is None else wedge(acc, f)
                if acc is None:
                    acc = omega_module(Ap, 0).form({0: Fraction(1)})
                routed = acc.act(cbar)
                if to_tensor(direct) != to_tensor(routed):
                    compatible = False
                    break
            if not compatible:
                break

    return TransportReport(
        n=n,
        base_dim=dom.dimension,
        target_dim=Bn.dimension,
        surjective=surjective,
        multiplicative=multiplicative,
        kernel_dim=len(kernel_basis),
        tensor_target_dim=tensor_dim,
        compatible=compatible,
        degenerate=degenerate,
        samples=samples,
    )


def build_quotient_power(B, sigma_name, n):
    """B/sigma^n as a fresh presented algebra."""
    cache = B._misc_cache.setdefault("sigma_powers", {})
    got = cache.get((sigma_name, n))
    if got is None:
        spec = AlgebraSpec(
            variables=B.names,
            relations=B.spec.relations + (f"{sigma_name}^{n}",),
            distinguished=B.spec.distinguished,
        )
        got = build_algebra(spec)
        cache[(sigma_name, n)] = got
    return got


def _kernel_of_map(Ap, images, codomain):
    """Kernel of the Q-linear map sending the i-th basis monomial of Ap to
    images[i]; returned as a list of Ap elements (one per dependency)."""
    aug_base = codomain.dimension
    space = RowSpace()
    kernel = []
    for idx, vec in enumerate(images):
        row = {codomain.index[m]: c for m, c in vec.coords.items()}
        row[aug_base + idx] = Fraction(1)
        residual = space.reduce(row)
        if all(col >= aug_base for col in residual):
            combo = Ap.zero
            for col, val in residual.items():
                combo = combo + _mono_element(Ap, Ap.basis[col - aug_base]) * val
            kernel.append(combo)
        else:
            space.insert(row)
    return kernel


def _solve_layer(Ap, mult_vectors, w, codomain):
    """Find cbar in A' with cbar * sigma^n = w in B/sigma^(n+1), or None."""
    vectors = [{codomain.index[m]: c for m, c in vec.coords.items()} for vec in mult_vectors]
    target = {codomain.index[m]: c for m, c in w.coords.items()}
    coeffs = express(vectors, target, codomain.dimension)
    if coeffs is None:
        return None
    combo = Ap.zero
    for i, q in enumerate(coeffs):
        if q:
            combo = combo + _mono_element(Ap, Ap.basis[i]) * q
    return combo
