"""Staircases of initial exponents and truncated division.

Everything is relative to one monomial order: degree first, then
lexicographic (see indices).  Because the enumeration of indices agrees with
the order, the initial exponent of a coefficient vector is simply its first
nonzero position, and the echelon form of a family of series doubles as a
division basis.

A staircase computed from generators is exact through its truncation degree:
a monomial of degree <= d is in the staircase if and only if some ideal
element has it as initial exponent.  No claim is made past d, which the
`provisional` flag records for nonzero ideals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .censored import AtLeast
from .errors import ConsistencyError, InputError
from .indices import degree, dominates, index_count, indices_up_to, mono_key
from .linalg import Subspace
from .poly import Poly, TruncatedSeries, format_poly


def initial_exponent(f):
    """Minimum exponent of the support in the shared order; None when f = 0."""
    if not f.terms:
        return None
    return min(f.terms, key=mono_key)


@dataclass(frozen=True)
class IdealPresentation:
    """Generators of an ideal of target-variable polynomials at a center.

    Generators are written in the global coordinates; recentering at the
    stored point happens on use, so one presentation can serve any center.
    """

    generators: tuple
    center: tuple
    arity: int

    @classmethod
    def make(cls, generators, center):
        center = tuple(center)
        arity = len(center)
        gens = []
        for g in generators:
            if g.arity != arity:
                raise InputError(
                    f"generator arity {g.arity} does not match center"
                    f" arity {arity}"
                )
            gens.append(g)
        return cls(tuple(gens), center, arity)

    def recentered_generators(self):
        """Nonzero generators rewritten in coordinates centered at the point."""
        out = []
        for g in self.generators:
            shifted = g.shift(self.center)
            if not shifted.is_zero():
                out.append(shifted)
        return out


@dataclass(frozen=True)
class Diagram:
    """A staircase with an attached reduced division basis.

    vertices: the minimal staircase exponents of degree <= trunc_degree.
    reduced_basis: one truncated series per staircase monomial of degree
    <= trunc_degree, echelon-reduced so that each has that monomial as its
    initial exponent with coefficient 1 and a tail entirely off the
    staircase.  provisional is True when vertices of degree > trunc_degree
    may exist (any nonzero ideal).
    """

    arity: int
    trunc_degree: int
    vertices: tuple
    provisional: bool
    reduced_basis: tuple = field(repr=False)
    _pivot_pos: dict = field(repr=False, compare=False)

    def contains(self, beta):
        """Staircase membership; exact for degree <= trunc_degree."""
        if len(beta) != self.arity:
            raise InputError(
                f"index arity {len(beta)} does not match diagram arity"
                f" {self.arity}"
            )
        return any(dominates(beta, v) for v in self.vertices)

    def to_dict(self, names=None):
        return {
            "arity": self.arity,
            "truncation_degree": self.trunc_degree,
            "vertices": [list(v) for v in self.vertices],
            "provisional": self.provisional,
            "reduced_basis": [format_poly(f, names) for f in self.reduced_basis],
        }


def _check_staircase_closure(pivot_set, arity, d):
    # the pivot set must be closed upward within degree <= d, and the
    # minimal elements must be pairwise incomparable
    for p in pivot_set:
        if degree(p) >= d:
            continue
        for i in range(arity):
            up = tuple(p[j] + (j == i) for j in range(arity))
            if up not in pivot_set:
                raise ConsistencyError(
                    f"staircase not upward closed: {p} present, {up} missing"
                )


def diagram_from_generators(presentation, d):
    """Staircase of the ideal the generators span, exact through degree d.

    Works by echelon-reducing every monomial multiple of every generator
    that can still have initial exponent of degree <= d.  The order is
    degree-compatible, so those multiples span exactly the degree-<= d
    truncations of ideal elements.
    """
    arity = presentation.arity
    gens = presentation.recentered_generators()
    if d < 0:
        raise InputError("truncation degree must be >= 0")
    if gens:
        max_deg = max(g.total_degree() for g in gens)
        if d < max_deg:
            raise InputError(
                f"truncation degree {d} is below a generator degree {max_deg}"
            )
    monomials = indices_up_to(arity, d)
    position = {b: i for i, b in enumerate(monomials)}

    vectors = []
    for g in gens:
        room = d - g.order()
        for gamma in indices_up_to(arity, room):
            prod = Poly.monomial(gamma) * g
            vec = [0] * len(monomials)
            for b, c in prod.terms.items():
                if degree(b) <= d:
                    vec[position[b]] = c
            vectors.append(vec)

    echelon = Subspace.from_vectors(vectors, len(monomials))
    pivot_exponents = [monomials[p] for p in echelon.pivots]
    pivot_set = set(pivot_exponents)
    _check_staircase_closure(pivot_set, arity, d)

    vertices = tuple(
        sorted(
            (
                p
                for p in pivot_exponents
                if not any(
                    q != p and dominates(p, q) for q in pivot_set
                )
            ),
            key=mono_key,
        )
    )
    for v in vertices:
        for w in vertices:
            if v != w and dominates(v, w):
                raise ConsistencyError(f"comparable vertices {v}, {w}")

    basis = tuple(
        TruncatedSeries(
            arity,
            {monomials[i]: c for i, c in enumerate(row) if c},
            d,
            _exact=True,
        )
        for row in echelon.basis
    )
    pivot_pos = {monomials[p]: i for i, p in enumerate(echelon.pivots)}
    return Diagram(
        arity=arity,
        trunc_degree=d,
        vertices=vertices,
        provisional=bool(gens),
        reduced_basis=basis,
        _pivot_pos=pivot_pos,
    )


def normal_form(f, diagram):
    """Division remainder of f against the diagram's reduced basis.

    The result has the same truncation degree as f, carries no staircase
    monomial, and differs from f by an element of the truncated ideal span.
    One linear pass suffices: the basis is reduced, so subtracting the
    pivot multiples never reintroduces a pivot monomial.
    """
    if isinstance(f, Poly):
        # a polynomial is known exactly, so it carries the diagram's full
        # truncation degree as long as it fits under it
        if f.total_degree() > diagram.trunc_degree:
            raise InputError(
                f"polynomial degree {f.total_degree()} exceeds diagram"
                f" truncation {diagram.trunc_degree}"
            )
        f = f.truncate(diagram.trunc_degree)
    if f.arity != diagram.arity:
        raise InputError(
            f"series arity {f.arity} does not match diagram arity"
            f" {diagram.arity}"
        )
    if f.trunc_degree > diagram.trunc_degree:
        raise InputError(
            f"series truncated at {f.trunc_degree} exceeds diagram degree"
            f" {diagram.trunc_degree}"
        )
    t = f.trunc_degree
    terms = dict(f.terms)
    for exponent, c in f.terms.items():
        pos = diagram._pivot_pos.get(exponent)
        if pos is None:
            continue
        basis_elem = diagram.reduced_basis[pos]
        for b, bc in basis_elem.terms.items():
            if degree(b) > t:
                continue
            s = terms.get(b, 0) - c * bc
            if s:
                terms[b] = s
            else:
                terms.pop(b, None)
    return TruncatedSeries(f.arity, terms, t, _exact=True)


def residual_order(f, diagram):
    """Vanishing order of f modulo the ideal: exact, or censored.

    Returns the order of the normal form when that is visibly below the
    truncation degree; otherwise AtLeast(truncation degree of f), meaning
    the residual order meets or exceeds the bound.
    """
    nf = normal_form(f, diagram)
    t = nf.trunc_degree
    order = nf.order()
    if order is not None and order < t:
        return order
    return AtLeast(t)


def hilbert_samuel_count(diagram, k):
    """Monomials of degree <= k outside the staircase.

    This is the dimension of the degree-<= k jet space modulo the ideal's
    jets (the Hilbert-Samuel function).
    """
    if k > diagram.trunc_degree:
        raise InputError(
            f"count at degree {k} exceeds diagram truncation"
            f" {diagram.trunc_degree}"
        )
    if not diagram.vertices:
        return index_count(diagram.arity, k)
    return sum(
        1
        for b in indices_up_to(diagram.arity, k)
        if not diagram.contains(b)
    )


def ideal_jet_space(presentation, k):
    """Degree-<= k jets (at the center) of the generated ideal, as a Subspace.

    Spanned by monomial multiples of the recentered generators, truncated at
    degree k; ambient coordinates follow the shared index enumeration.
    """
    arity = presentation.arity
    monomials = indices_up_to(arity, k)
    position = {b: i for i, b in enumerate(monomials)}
    vectors = []
    for g in presentation.recentered_generators():
        room = k - g.order()
        if room < 0:
            continue
        for gamma in indices_up_to(arity, room):
            prod = Poly.monomial(gamma) * g
            vec = [0] * len(monomials)
            for b, c in prod.terms.items():
                if degree(b) <= k:
                    vec[position[b]] = c
            vectors.append(vec)
    return Subspace.from_vectors(vectors, len(monomials))
