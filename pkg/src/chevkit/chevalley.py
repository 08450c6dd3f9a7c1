"""Thresholds at which projected jet kernels reach the relation jets.

For a map and a fibred tuple, the degree-<= k jets of the relation ideal sit
inside every projected jet kernel, and the projected kernels shrink as the
jet order grows, reaching the relation jets at some finite order.  This
module computes that threshold order per k, three ways:

* with user-supplied relation generators the target space is exact, the
  threshold is certified, and a staircase cross-check guards the answer;
* without generators the chain of projected kernels is watched until it
  holds still for a window of consecutive orders, an honest heuristic
  (STABILIZED) that can also come back INCONCLUSIVE with a censored bound;
* a staircase-restricted route answers the yes/no question "has order l
  reached the threshold for degree k" through an independent kernel
  computation, used to cross-validate the first two.

A parameterized family of tuples can be sampled at random rational
parameters to estimate the generic threshold along the family (HEURISTIC).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .censored import AtLeast, is_censored
from .errors import ConsistencyError, InputError, RelationsMismatchError
from .indices import degree, index_count
from .jets import FibredTuple, JetSystem, jet_matrix
from .staircase import (
    IdealPresentation,
    diagram_from_generators,
    hilbert_samuel_count,
    ideal_jet_space,
)

VERIFIED = "VERIFIED"
STABILIZED = "STABILIZED"
INCONCLUSIVE = "INCONCLUSIVE"
HEURISTIC = "HEURISTIC"


def validate_relations(phi, tup, generators):
    """Check that every generator really is a relation of the map.

    A generator must vanish at the image point (otherwise it would generate
    the unit ideal) and must compose with the map to the zero polynomial.
    """
    gens = []
    for g in generators:
        if g.arity != phi.target_arity:
            raise InputError(
                f"relation arity {g.arity} does not match target arity"
                f" {phi.target_arity}"
            )
        if g.eval(tup.image) != 0:
            raise InputError(
                "relation generator does not vanish at the image point;"
                " it would generate the unit ideal"
            )
        if not g.compose(list(phi.components)).is_zero():
            raise InputError(
                "claimed relation does not compose to zero with the map"
            )
        gens.append(g)
    return tuple(gens)


@dataclass(frozen=True)
class RelationJets:
    """Best knowledge of the degree-<= k relation jets at one tuple.

    subspace: the relation jets (exact in VERIFIED mode, the stabilized or
    last-computed projected kernel otherwise).
    l_value: least jet order whose projected kernel equals the subspace;
    censored (AtLeast) when the search range did not settle it.
    l_stab: first order of the certifying run, or None when censored.
    chain: the computed (order, projected kernel) pairs.
    target: the exact relation jets when generators were supplied.
    """

    k: int
    subspace: object
    status: str
    l_value: object
    l_stab: object
    chain: tuple
    target: object


@dataclass(frozen=True)
class ChevalleyEntry:
    """One table row: a (tuple, k) pair with its threshold and jet codimension."""

    map_name: str
    tuple_id: str
    k: int
    l_value: object
    h_value: int
    status: str
    l_stab: object


class ChevalleyEngine:
    """All threshold computations for one map at one fibred tuple.

    relations=None means no knowledge of the relation ideal (heuristic
    stabilization); an explicit list, possibly empty, asserts that the
    listed generators generate the whole relation ideal (empty = zero
    ideal), which makes results certified.
    """

    def __init__(self, phi, tup, relations=None, l_max=12, window=3):
        if l_max < 0:
            raise InputError("l_max must be >= 0")
        if window < 1:
            raise InputError("stabilization window must be >= 1")
        self.phi = phi
        self.tup = tup
        self.l_max = l_max
        self.window = window
        if relations is None:
            self.presentation = None
        else:
            gens = validate_relations(phi, tup, relations)
            self.presentation = IdealPresentation.make(gens, tup.image)
        self.jets = JetSystem(phi, tup)
        self._relation_jets = {}
        self._relation_spaces = {}
        self._diagrams = {}
        self._diagram_kernels = {}

    # exact relation jets (verified mode only)

    def relation_space(self, k):
        if self.presentation is None:
            raise InputError("no relation generators were supplied")
        if k not in self._relation_spaces:
            self._relation_spaces[k] = ideal_jet_space(self.presentation, k)
        return self._relation_spaces[k]

    def _generator_degree(self):
        degs = [g.total_degree() for g in self.presentation.generators
                if not g.is_zero()]
        return max(degs, default=0)

    def diagram(self, trunc):
        """Staircase of the supplied relation ideal, exact through trunc."""
        if self.presentation is None:
            raise InputError("no relation generators were supplied")
        trunc = max(trunc, self._generator_degree())
        if trunc not in self._diagrams:
            self._diagrams[trunc] = diagram_from_generators(
                self.presentation, trunc
            )
        return self._diagrams[trunc]

    def _hs_crosscheck(self, k, target):
        # two independent counts of the jet codimension must agree
        n = self.phi.target_arity
        from_jets = index_count(n, k) - target.dim
        from_staircase = hilbert_samuel_count(self.diagram(k), k)
        if from_jets != from_staircase:
            raise ConsistencyError(
                f"jet codimension {from_jets} disagrees with staircase count"
                f" {from_staircase} at k={k}"
            )

    # the threshold chain

    def relation_jets(self, k):
        if k < 0:
            raise InputError("k must be >= 0")
        if k > self.l_max:
            raise InputError(f"k={k} exceeds l_max={self.l_max}")
        if k not in self._relation_jets:
            if self.presentation is not None:
                self._relation_jets[k] = self._verified_run(k)
            else:
                self._relation_jets[k] = self._window_run(k)
        return self._relation_jets[k]

    def _verified_run(self, k):
        target = self.relation_space(k)
        self._hs_crosscheck(k, target)
        chain = []
        for l in range(k, self.l_max + 1):
            e = self.jets.projected_kernel(l, k)
            if not e.contains(target):
                raise ConsistencyError(
                    "validated relation jets escaped a projected kernel"
                    f" at l={l}, k={k}"
                )
            chain.append((l, e))
            if e == target:
                return RelationJets(
                    k=k, subspace=target, status=VERIFIED, l_value=l,
                    l_stab=l, chain=tuple(chain), target=target,
                )
        if self._tail_window_equal(chain):
            raise RelationsMismatchError(
                f"projected kernels stabilized at dimension"
                f" {chain[-1][1].dim} but the supplied relations span"
                f" dimension {target.dim} at k={k}; either the generators"
                " do not generate the full relation ideal or the window"
                " reported a false stabilization"
            )
        return RelationJets(
            k=k, subspace=target, status=VERIFIED,
            l_value=AtLeast(self.l_max + 1), l_stab=None,
            chain=tuple(chain), target=target,
        )

    def _window_run(self, k):
        chain = []
        for l in range(k, self.l_max + 1):
            e = self.jets.projected_kernel(l, k)
            chain.append((l, e))
            if self._tail_window_equal(chain):
                l_stab = l - self.window + 1
                return RelationJets(
                    k=k, subspace=e, status=STABILIZED, l_value=l_stab,
                    l_stab=l_stab, chain=tuple(chain), target=None,
                )
        # the provable bound: the threshold is at least the last order at
        # which the chain still moved (and at least k by definition)
        bound = k
        for (l_prev, e_prev), (l_cur, e_cur) in zip(chain, chain[1:]):
            if e_prev != e_cur:
                bound = l_cur
        return RelationJets(
            k=k, subspace=chain[-1][1], status=INCONCLUSIVE,
            l_value=AtLeast(bound), l_stab=None,
            chain=tuple(chain), target=None,
        )

    def _tail_window_equal(self, chain):
        w = self.window
        if len(chain) < w:
            return False
        last = chain[-1][1]
        return all(chain[-i][1] == last for i in range(2, w + 1))

    # derived quantities

    def hilbert_samuel(self, k):
        """Jet-space codimension of the relation jets at degree k."""
        rj = self.relation_jets(k)
        return index_count(self.phi.target_arity, k) - rj.subspace.dim

    def chevalley_threshold(self, k):
        """Least jet order whose projected kernel is the relation jets."""
        return self.relation_jets(k).l_value

    # staircase-restricted route

    def _diagram_kernel(self, l):
        if l not in self._diagram_kernels:
            diag = self.diagram(l)
            jm = self.jets.jet(l)
            kept = [
                c for c, beta in enumerate(jm.col_labels)
                if not diag.contains(beta)
            ]
            sub = jm.matrix.submatrix(col_idx=kept)
            _, kernel = sub.rank_kernel()
            kept_betas = [jm.col_labels[c] for c in kept]
            self._diagram_kernels[l] = (kernel, kept_betas)
        return self._diagram_kernels[l]

    def diagram_threshold(self, k, l):
        """Whether order l has reached the threshold for degree k, decided
        through the staircase-restricted jet matrix (independent route)."""
        if k > l:
            raise InputError(f"degree {k} exceeds jet order {l}")
        kernel, kept_betas = self._diagram_kernel(l)
        eta = [i for i, b in enumerate(kept_betas) if degree(b) <= k]
        return kernel.project(eta).is_zero()


def diagram_threshold_test(phi, tup, k, l, diagram, jm=None):
    """Standalone staircase-restricted threshold test.

    Drops the jet-matrix columns whose exponent lies in the staircase, takes
    the kernel of the rest, and reports whether its projection onto the
    degree-<= k coordinates is zero.  The staircase must be exact through
    degree l, hence the truncation requirement.
    """
    if diagram.arity != phi.target_arity:
        raise InputError(
            f"staircase arity {diagram.arity} does not match target arity"
            f" {phi.target_arity}"
        )
    if k > l:
        raise InputError(f"degree {k} exceeds jet order {l}")
    if diagram.trunc_degree < l:
        raise InputError(
            f"staircase is only exact through degree {diagram.trunc_degree},"
            f" need {l}"
        )
    if jm is None:
        jm = jet_matrix(phi, tup, l)
    kept = [
        c for c, beta in enumerate(jm.col_labels)
        if not diagram.contains(beta)
    ]
    sub = jm.matrix.submatrix(col_idx=kept)
    _, kernel = sub.rank_kernel()
    eta = [i for i, c in enumerate(kept) if degree(jm.col_labels[c]) <= k]
    return kernel.project(eta).is_zero()


@dataclass(frozen=True)
class Leaf:
    """A rational family of fibred tuples: points given by polynomials in
    the parameters, with the shared-image condition holding identically."""

    name: str
    params: tuple
    point_exprs: tuple

    @classmethod
    def make(cls, name, params, point_exprs):
        params = tuple(params)
        if not params:
            raise InputError("a leaf needs at least one parameter")
        pts = tuple(tuple(pt) for pt in point_exprs)
        if not pts:
            raise InputError("a leaf needs at least one point")
        for pt in pts:
            for e in pt:
                if e.arity != len(params):
                    raise InputError(
                        f"leaf expression arity {e.arity} does not match"
                        f" {len(params)} parameters"
                    )
        return cls(name, params, pts)

    def validate(self, phi):
        """The shared-image condition as a polynomial identity."""
        for pt in self.point_exprs:
            if len(pt) != phi.source_arity:
                raise InputError(
                    f"leaf point has {len(pt)} coordinates, map expects"
                    f" {phi.source_arity}"
                )
        images = [
            tuple(comp.compose(list(pt)) for comp in phi.components)
            for pt in self.point_exprs
        ]
        first = images[0]
        for img in images[1:]:
            if img != first:
                raise InputError(
                    f"leaf {self.name!r} points do not share an image"
                    " identically in the parameters"
                )

    def tuple_at(self, phi, t_values):
        t = tuple(Fraction(v) for v in t_values)
        if len(t) != len(self.params):
            raise InputError(
                f"got {len(t)} parameter values for {len(self.params)}"
                " parameters"
            )
        pts = [tuple(e.eval(t) for e in pt) for pt in self.point_exprs]
        return FibredTuple.make(phi, pts)


@dataclass(frozen=True)
class LeafSample:
    """Sampled generic-threshold estimate along a leaf (HEURISTIC).

    l_generic: minimum threshold over the samples (generic parameters have
    the smallest value once ranks are maximal).  rank_profile: per-order
    maximum of the jet codimension over the samples.  mismatch is True when
    the sample attaining the minimum threshold does not also attain the
    maximal rank profile; it is reported, never resolved silently.
    """

    leaf_name: str
    k: int
    l_generic: object
    rank_profile: dict
    samples: tuple
    mismatch: bool
    status: str
    trials: int
    seed: int


def sample_leaf_chevalley(phi, leaf, k, trials=5, seed=0, l_max=12,
                          window=3, relations=None):
    """Estimate the generic threshold for degree k along a leaf by sampling
    rational parameter points.  Results are heuristic: membership of a
    sample in the generic stratum is not certified."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    leaf.validate(phi)
    rng = random.Random(seed)
    samples = []
    seen = set()
    attempts = 0
    while len(samples) < trials and attempts < 50 * trials:
        attempts += 1
        t = tuple(
            Fraction(rng.randint(-9, 9), rng.randint(1, 3))
            for _ in leaf.params
        )
        if t in seen:
            continue
        seen.add(t)
        tup = leaf.tuple_at(phi, t)
        engine = ChevalleyEngine(
            phi, tup, relations=relations, l_max=l_max, window=window
        )
        rj = engine.relation_jets(k)
        profile = {
            l: engine.jets.quotient_dim(l, k) for l in range(k, l_max + 1)
        }
        samples.append((t, rj.l_value, profile))
    if not samples:
        raise InputError("could not draw any parameter samples")

    finite = [lv for _, lv, _ in samples if not is_censored(lv)]
    if finite:
        l_generic = min(finite)
    else:
        l_generic = AtLeast(min(lv.bound for _, lv, _ in samples))
    orders = range(k, l_max + 1)
    max_profile = {
        l: max(prof[l] for _, _, prof in samples) for l in orders
    }
    mismatch = False
    if finite:
        best = next(
            prof for _, lv, prof in samples
            if not is_censored(lv) and lv == l_generic
        )
        mismatch = any(best[l] != max_profile[l] for l in orders)
    return LeafSample(
        leaf_name=leaf.name,
        k=k,
        l_generic=l_generic,
        rank_profile=max_profile,
        samples=tuple(samples),
        mismatch=mismatch,
        status=HEURISTIC,
        trials=trials,
        seed=seed,
    )
