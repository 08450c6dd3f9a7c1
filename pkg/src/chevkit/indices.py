"""Multi-index bookkeeping shared by every module.

All jet coordinates, series terms and matrix blocks are enumerated through
the single order implemented here: lower total degree first, ties broken
lexicographically on the exponent tuple.  Because the enumeration is
degree-ascending, the coordinates of degree <= k always form a prefix, which
is what makes the block decompositions of jet matrices line up.
"""

from __future__ import annotations

from math import comb

from .errors import InputError


def degree(beta):
    return sum(beta)


def mono_key(beta):
    """Sort key for the order: compare (|b|, b1, ..., bn) lexicographically."""
    return (sum(beta),) + tuple(beta)


def mono_cmp(beta, gamma):
    """Three-way comparison in the shared monomial order (-1, 0 or 1)."""
    if len(beta) != len(gamma):
        raise InputError(
            f"cannot compare multi-indices of arities {len(beta)} and {len(gamma)}"
        )
    a, b = mono_key(beta), mono_key(gamma)
    return (a > b) - (a < b)


def indices_of_degree(arity, d):
    """Yield the multi-indices of total degree d, ascending lexicographically."""
    assert arity >= 1 and d >= 0

    def gen(prefix, nvars, rem):
        if nvars == 1:
            yield prefix + (rem,)
            return
        for i in range(rem + 1):
            yield from gen(prefix + (i,), nvars - 1, rem - i)

    yield from gen((), arity, d)


def indices_up_to(arity, d):
    """All multi-indices of degree <= d, in the shared order."""
    out = []
    for deg in range(d + 1):
        out.extend(indices_of_degree(arity, deg))
    return out


def index_count(arity, d):
    """Number of multi-indices of degree <= d, i.e. comb(arity + d, d)."""
    if d < 0:
        return 0
    return comb(arity + d, d)


def index_add(beta, gamma):
    return tuple(b + g for b, g in zip(beta, gamma))


def dominates(beta, gamma):
    """True when beta >= gamma componentwise (beta lies in gamma's cone)."""
    return all(b >= g for b, g in zip(beta, gamma))


def position_map(arity, d):
    """Map each multi-index of degree <= d to its position in the enumeration."""
    return {b: i for i, b in enumerate(indices_up_to(arity, d))}
