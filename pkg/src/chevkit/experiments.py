"""Experiment drivers: threshold tables, linear-bound fitting, order and
growth probes, and an end-to-end consistency verifier.

Everything here is exact rational arithmetic except taylor_growth_estimate,
which is the one numeric (float) probe in the package and says so in its
results.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .censored import is_censored
from .chevalley import (
    ChevalleyEngine,
    ChevalleyEntry,
    HEURISTIC,
    VERIFIED,
    sample_leaf_chevalley,
)
from .errors import ConsistencyError, InputError, RelationsMismatchError
from .indices import degree, index_count
from .jets import jet_blocks
from .poly import Poly
from .staircase import (
    diagram_from_generators,
    hilbert_samuel_count,
    normal_form,
    residual_order,
)
from .scenario import relations_for, scenario_tuples
from .wedge import membership_kernel, membership_operator


@dataclass(frozen=True)
class TableRun:
    """A scenario's full threshold table plus the engines that produced it."""

    scenario: object
    entries: tuple
    engines: dict
    leaf_samples: tuple


def run_table(scenario):
    """Compute a ChevalleyEntry row for every (tuple, k) of the scenario,
    then heuristic samples for every (leaf, k).  Row order is deterministic:
    points as written, then tuples as written, k ascending."""
    phi = scenario.phi
    k_min, k_max = scenario.k_range
    engines = {}
    entries = []
    for key, tup in scenario_tuples(scenario):
        rel = relations_for(scenario, key)
        try:
            engine = ChevalleyEngine(
                phi, tup, relations=rel,
                l_max=scenario.l_max, window=scenario.window,
            )
        except InputError as exc:
            raise InputError(f"tuple {key}: {exc}") from None
        engines[key] = engine
        for k in range(k_min, k_max + 1):
            try:
                rj = engine.relation_jets(k)
            except (RelationsMismatchError, ConsistencyError) as exc:
                raise type(exc)(
                    f"map {phi.name!r}, tuple {key}, k={k}: {exc}"
                ) from None
            entries.append(ChevalleyEntry(
                map_name=phi.name, tuple_id=key, k=k,
                l_value=rj.l_value, h_value=engine.hilbert_samuel(k),
                status=rj.status, l_stab=rj.l_stab,
            ))
    leaf_samples = []
    for leaf in scenario.leaves:
        rel = relations_for(scenario, "leaf:" + leaf.name)
        for k in range(k_min, k_max + 1):
            sample = sample_leaf_chevalley(
                phi, leaf, k, trials=5, seed=scenario.seed,
                l_max=scenario.l_max, window=scenario.window, relations=rel,
            )
            leaf_samples.append(sample)
            entries.append(ChevalleyEntry(
                map_name=phi.name, tuple_id="leaf:" + leaf.name, k=k,
                l_value=sample.l_generic,
                h_value=sample.rank_profile[scenario.l_max],
                status=HEURISTIC, l_stab=None,
            ))
    return TableRun(
        scenario=scenario, entries=tuple(entries), engines=engines,
        leaf_samples=tuple(leaf_samples),
    )


@dataclass(frozen=True)
class LinearBound:
    """A bound l <= alpha*k + beta covering every fitted row."""

    alpha: int
    beta: int
    witnesses: tuple  # the (k, l) rows met with equality


def _max_pair_slope(rows):
    # largest ceil((lj - li) / (kj - ki)) over row pairs, never below zero
    alpha = 0
    for i, (ki, li) in enumerate(rows):
        for kj, lj in rows[i + 1:]:
            num, den = lj - li, kj - ki
            if den == 0:
                continue
            if den < 0:
                num, den = -num, -den
            alpha = max(alpha, -(-num // den))
    return alpha


def _fit_pairs(certified, censored):
    if not certified:
        raise InputError("linear fit needs at least one uncensored row")
    alpha = _max_pair_slope(certified)
    beta = max(0, max(l - alpha * k for k, l in certified))
    for k, bound in censored:
        beta = max(beta, bound - alpha * k)
    witnesses = tuple(
        (k, l) for k, l in certified if l == alpha * k + beta
    )
    return LinearBound(alpha=alpha, beta=beta, witnesses=witnesses)


def fit_linear_bound(entries):
    """Fit a linear envelope l <= alpha*k + beta over a threshold table.

    Certified rows (VERIFIED or STABILIZED with an integer threshold) are
    data points; censored rows only push the intercept up so the bound
    still covers them; HEURISTIC rows are excluded.  The slope comes from
    pairwise differences within each tuple's own row sequence (thresholds
    of different tuples need not lie on one line), the intercept from
    coverage of every row.
    """
    groups = {}
    censored = []
    for e in entries:
        if e.status == HEURISTIC:
            continue
        if is_censored(e.l_value):
            censored.append((e.k, e.l_value.bound))
        else:
            groups.setdefault((e.map_name, e.tuple_id), []).append(
                (e.k, e.l_value)
            )
    certified = [pair for rows in groups.values() for pair in rows]
    if not certified:
        raise InputError("linear fit needs at least one uncensored row")
    alpha = max(
        (_max_pair_slope(rows) for rows in groups.values()), default=0
    )
    beta = max(0, max(l - alpha * k for k, l in certified))
    for k, bound in censored:
        beta = max(beta, bound - alpha * k)
    witnesses = tuple(
        (k, l) for k, l in certified if l == alpha * k + beta
    )
    return LinearBound(alpha=alpha, beta=beta, witnesses=witnesses)


@dataclass(frozen=True)
class OrderEntry:
    poly: Poly            # as supplied, in the target coordinates
    value: object         # int or AtLeast
    normal_form: object   # TruncatedSeries in coordinates centered at b


@dataclass(frozen=True)
class OrderProbe:
    center: tuple
    trunc_degree: int
    entries: tuple


def residual_order_probe(presentation, polys, trunc=8):
    """Vanishing orders of functions along the fibre: recenters each
    polynomial at the presentation's center and reduces it against the
    staircase, reporting an exact order or a censored lower bound."""
    deg_needed = max(
        (p.total_degree() for p in polys if not p.is_zero()), default=0
    )
    if deg_needed > trunc:
        raise InputError(
            f"probe polynomial has degree {deg_needed} but the truncation"
            f" degree is {trunc}"
        )
    diagram = diagram_from_generators(presentation, trunc)
    entries = []
    for p in polys:
        local = p.shift(presentation.center)
        entries.append(OrderEntry(
            poly=p,
            value=residual_order(local, diagram),
            normal_form=normal_form(local, diagram),
        ))
    return OrderProbe(
        center=presentation.center,
        trunc_degree=diagram.trunc_degree,
        entries=tuple(entries),
    )


@dataclass(frozen=True)
class ProductProbe:
    """Random products F*G with the orders of F, G, and F*G, plus a fitted
    envelope order(FG) <= alpha*(order(F)+order(G)) + beta over the
    uncensored triples."""

    triples: tuple
    excluded: int
    envelope: object  # LinearBound or None when every triple was censored
    trials: int
    seed: int
    trunc_degree: int


def _random_poly(rng, arity, max_degree):
    while True:
        terms = {}
        for _ in range(rng.randint(1, 4)):
            while True:
                exps = tuple(
                    rng.randint(0, max_degree) for _ in range(arity)
                )
                if degree(exps) <= max_degree:
                    break
            coeff = rng.choice([-3, -2, -1, 1, 2, 3])
            terms[exps] = terms.get(exps, 0) + coeff
        p = Poly.zero(arity)
        for exps, c in terms.items():
            if c:
                p = p + Poly.monomial(exps, c)
        if not p.is_zero():
            return p


def product_order_probe(presentation, trials=200, seed=0, trunc=8):
    """Sample random F, G in the coordinates centered at the presentation's
    center and compare order(FG) against order(F) + order(G).  Triples with
    any censored order are excluded and counted."""
    if trunc < 2:
        raise InputError("product probe needs truncation degree >= 2")
    diagram = diagram_from_generators(presentation, trunc)
    rng = random.Random(seed)
    arity = presentation.arity
    half = trunc // 2
    triples = []
    excluded = 0
    for _ in range(trials):
        f = _random_poly(rng, arity, half)
        g = _random_poly(rng, arity, half)
        vals = [
            residual_order(f, diagram),
            residual_order(g, diagram),
            residual_order(f * g, diagram),
        ]
        if any(is_censored(v) for v in vals):
            excluded += 1
            continue
        triples.append(tuple(vals))
    envelope = None
    if triples:
        pairs = [(nf + ng, nfg) for nf, ng, nfg in triples]
        envelope = _fit_pairs(pairs, [])
    return ProductProbe(
        triples=tuple(triples), excluded=excluded, envelope=envelope,
        trials=trials, seed=seed, trunc_degree=trunc,
    )


@dataclass(frozen=True)
class GrowthEntry:
    l: int
    slope: object    # float, or None when no usable regression
    bounded: object  # bool, or None when undecidable
    certified: bool  # True only on exact shortcuts, never from floats


@dataclass(frozen=True)
class GrowthReport:
    point: tuple
    image: tuple
    entries: tuple
    warnings: tuple
    heuristic: bool


def _float_terms(terms):
    return [(float(c), exps) for exps, c in terms.items()]


def _feval(compiled, point):
    total = 0.0
    for c, exps in compiled:
        v = c
        for x, e in zip(point, exps):
            if e:
                v *= x ** e
        total += v
    return total


def taylor_growth_estimate(f, phi, a, ls, tol=0.15, box=0.5, shrink=0.5,
                           scales=6, samples=40, seed=0):
    """Numeric probe of how fast the degree-l Taylor remainder-free
    truncation of f at the image point grows along the fibre near a.

    For each l, samples source points in shrinking boxes around a, regresses
    log max|truncation| against log max|image displacement|, and calls the
    ratio bounded when the slope reaches l - tol.  This is the only
    float-based routine in the package; nothing it returns is certified
    unless an exact shortcut applies (f composing to zero with the map, or
    a truncation with no terms at all).
    """
    if f.arity != phi.target_arity:
        raise InputError(
            f"function arity {f.arity} does not match target arity"
            f" {phi.target_arity}"
        )
    a = tuple(a)
    if len(a) != phi.source_arity:
        raise InputError(
            f"point has {len(a)} coordinates, map expects"
            f" {phi.source_arity}"
        )
    ls = list(ls)
    b = phi.eval_at(a)
    composed = f.compose(list(phi.components))
    if composed.is_zero():
        return GrowthReport(
            point=a, image=b,
            entries=tuple(
                GrowthEntry(l=l, slope=None, bounded=True, certified=True)
                for l in ls
            ),
            warnings=(), heuristic=False,
        )

    rng = random.Random(seed)
    af = [float(v) for v in a]
    bf = [float(v) for v in b]
    comp_terms = [_float_terms(c.terms) for c in phi.components]
    scale_data = []
    for s in range(scales):
        radius = box * (shrink ** s)
        dys = []
        r_max = 0.0
        for _ in range(samples):
            x = [ai + radius * rng.uniform(-1.0, 1.0) for ai in af]
            dy = [
                _feval(ct, x) - bj for ct, bj in zip(comp_terms, bf)
            ]
            dys.append(dy)
            r_max = max(r_max, max(abs(v) for v in dy))
        scale_data.append((r_max, dys))

    warnings = []
    entries = []
    for l in ls:
        series = f.taylor(b, l)
        if not series.terms:
            # exact: the truncation is identically zero, the ratio is zero
            entries.append(
                GrowthEntry(l=l, slope=None, bounded=True, certified=True)
            )
            continue
        tf = _float_terms(series.terms)
        pairs = []
        dropped = 0
        for r_max, dys in scale_data:
            t_max = max(abs(_feval(tf, dy)) for dy in dys)
            if r_max > 0.0 and t_max > 0.0:
                pairs.append((math.log(r_max), math.log(t_max)))
            else:
                dropped += 1
        if dropped:
            warnings.append(
                f"l={l}: dropped {dropped} degenerate scales (zero"
                " displacement or zero truncation values)"
            )
        if len(pairs) < 2:
            warnings.append(f"l={l}: not enough usable scales to regress")
            entries.append(
                GrowthEntry(l=l, slope=None, bounded=None, certified=False)
            )
            continue
        mx = sum(x for x, _ in pairs) / len(pairs)
        my = sum(y for _, y in pairs) / len(pairs)
        sxx = sum((x - mx) ** 2 for x, _ in pairs)
        sxy = sum((x - mx) * (y - my) for x, y in pairs)
        if sxx == 0.0:
            warnings.append(f"l={l}: degenerate regression abscissae")
            entries.append(
                GrowthEntry(l=l, slope=None, bounded=None, certified=False)
            )
            continue
        slope = sxy / sxx
        entries.append(GrowthEntry(
            l=l, slope=slope, bounded=(slope >= l - tol), certified=False,
        ))
    return GrowthReport(
        point=a, image=b, entries=tuple(entries),
        warnings=tuple(warnings), heuristic=True,
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ConsistencyReport:
    checks: tuple

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks)


def verify_consistency(scenario, membership_l_cap=6, dense_cell_cap=2000):
    """Cross-validate every route the package offers on one scenario.

    Checks: the supplied relations really vanish; the two jet-codimension
    counts agree; the staircase-restricted threshold test agrees with the
    chain; three independent membership routes compute the same projected
    kernels (including the dense alternating-minors route when it fits
    under dense_cell_cap); growth of validated relations is bounded by the
    exact shortcut; and the monotonicity laws hold across the table.
    """
    checks = []
    phi = scenario.phi
    k_min, k_max = scenario.k_range
    pairs = scenario_tuples(scenario)

    engines = {}
    rows = {}
    try:
        for key, tup in pairs:
            rel = relations_for(scenario, key)
            engines[key] = ChevalleyEngine(
                phi, tup, relations=rel,
                l_max=scenario.l_max, window=scenario.window,
            )
        for key, _ in pairs:
            for k in range(k_min, k_max + 1):
                rows[(key, k)] = engines[key].relation_jets(k)
    except (RelationsMismatchError, ConsistencyError, InputError) as exc:
        checks.append(CheckResult(
            "table-construction", False, f"{type(exc).__name__}: {exc}"
        ))
        return ConsistencyReport(tuple(checks))
    checks.append(CheckResult(
        "table-construction", True,
        f"{len(rows)} rows over {len(pairs)} tuples",
    ))

    verified_keys = [
        key for key, _ in pairs
        if engines[key].presentation is not None
    ]

    ok = True
    details = []
    for key in verified_keys:
        for g in engines[key].presentation.generators:
            if not g.compose(list(phi.components)).is_zero():
                ok = False
                details.append(f"{key}: generator fails to compose to zero")
    checks.append(CheckResult(
        "relations-vanish", ok,
        "; ".join(details) if details else
        f"{len(verified_keys)} tuples with validated generators",
    ))

    ok = True
    details = []
    count = 0
    for key in verified_keys:
        engine = engines[key]
        for k in range(k_min, k_max + 1):
            a = engine.hilbert_samuel(k)
            b = hilbert_samuel_count(engine.diagram(k), k)
            count += 1
            if a != b:
                ok = False
                details.append(f"{key} k={k}: jets {a} vs staircase {b}")
    checks.append(CheckResult(
        "codimension-count-agreement", ok,
        "; ".join(details) if details else f"{count} counts agree",
    ))

    ok = True
    details = []
    count = 0
    for key in verified_keys:
        engine = engines[key]
        for k in range(k_min, k_max + 1):
            rj = rows[(key, k)]
            for l in range(k, scenario.l_max + 1):
                expected = (not is_censored(rj.l_value)
                            and l >= rj.l_value)
                got = engine.diagram_threshold(k, l)
                count += 1
                if got != expected:
                    ok = False
                    details.append(
                        f"{key} k={k} l={l}: staircase route {got},"
                        f" chain route {expected}"
                    )
    checks.append(CheckResult(
        "threshold-route-agreement", ok,
        "; ".join(details) if details else f"{count} (k, l) cells agree",
    ))

    ok = True
    details = []
    count = dense_count = 0
    for key, _ in pairs:
        engine = engines[key]
        n = phi.target_arity
        for k in range(k_min, k_max + 1):
            for l in range(k, min(scenario.l_max, membership_l_cap) + 1):
                staged = engine.jets.projected_kernel(l, k)
                low_positions = list(range(index_count(n, k)))
                projected = engine.jets.kernel(l).project(low_positions)
                jm = engine.jets.jet(l)
                low, high = jet_blocks(jm, k)
                schur = membership_kernel(low, high)
                count += 1
                if projected != staged or schur.kernel != staged:
                    ok = False
                    details.append(f"{key} k={k} l={l}: kernels differ")
                    continue
                r = schur.absorbed_rank
                cells = (math.comb(high.ncols, r)
                         * math.comb(high.nrows, r + 1))
                if cells <= dense_cell_cap:
                    dense = membership_operator(low, high, r)
                    _, dense_kernel = dense.rank_kernel()
                    dense_count += 1
                    if dense_kernel != staged:
                        ok = False
                        details.append(
                            f"{key} k={k} l={l}: dense route differs"
                        )
    checks.append(CheckResult(
        "membership-route-agreement", ok,
        "; ".join(details) if details else
        f"{count} cells agree ({dense_count} also checked densely)",
    ))

    ok = True
    details = []
    count = 0
    for key, tup in pairs:
        engine = engines[key]
        if engine.presentation is None:
            continue
        for g in engine.presentation.generators:
            report = taylor_growth_estimate(
                g, phi, tup.points[0], [k_max], seed=scenario.seed,
            )
            count += 1
            if not (report.entries and all(
                    e.bounded and e.certified for e in report.entries)):
                ok = False
                details.append(f"{key}: generator growth not certified")
    checks.append(CheckResult(
        "relation-growth-bounded", ok,
        "; ".join(details) if details else
        f"{count} generators certified by exact vanishing",
    ))

    ok = True
    details = []
    for key, _ in pairs:
        engine = engines[key]
        for k in range(k_min, k_max + 1):
            rj = rows[(key, k)]
            chain = rj.chain
            for (l0, e0), (l1, e1) in zip(chain, chain[1:]):
                if not e0.contains(e1):
                    ok = False
                    details.append(
                        f"{key} k={k}: kernel grew from l={l0} to l={l1}"
                    )
            if rj.status == VERIFIED and not is_censored(rj.l_value):
                h = engine.hilbert_samuel(k)
                n = phi.target_arity
                for l, e in chain:
                    d = index_count(n, k) - e.dim
                    if d > h:
                        ok = False
                        details.append(
                            f"{key} k={k} l={l}: codimension {d} exceeds"
                            f" {h}"
                        )
                    if (d == h) != (l >= rj.l_value):
                        ok = False
                        details.append(
                            f"{key} k={k} l={l}: equality at the wrong"
                            " order"
                        )
        for k in range(k_min, k_max):
            lo, hi = rows[(key, k)].l_value, rows[(key, k + 1)].l_value
            if not is_censored(lo) and not is_censored(hi) and hi < lo:
                ok = False
                details.append(
                    f"{key}: threshold dropped from k={k} ({lo}) to"
                    f" k={k + 1} ({hi})"
                )
    checks.append(CheckResult(
        "monotonicity", ok,
        "; ".join(details) if details else "chains and thresholds monotone",
    ))

    return ConsistencyReport(tuple(checks))
