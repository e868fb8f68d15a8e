"""Bifurcation-set membership and the genericity predicate.

For the slope polynomial Q of a commode germ:

* local set B_L: Q' and Q'' share a root (a degenerate critical point),
* semi-local set B_G: two distinct critical points share their critical
  value.

Generic germs avoid both; on that Zariski-open complement the polar curve has
n-1 distinct branches with pairwise distinct leading coefficients, which is
what makes the fiber-counting theorems sharp.

Zero tests are tolerance-based (1e-8 relative to coefficient scale); results
within a decade of the threshold are flagged borderline rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .poly import ComplexPoly, derivative, resultant, roots, sylvester_scale
from .qhfunc import QHFunction, commode_reduce, q_of_f

GENERICITY_TOL = 1e-8
BORDERLINE_FACTOR = 10.0


@dataclass(frozen=True)
class BifurcationReport:
    in_BL: bool
    in_BG: bool
    bl_witness: complex | None  # common root of Q', Q''
    bg_witness: tuple[complex, complex] | None  # distinct critical points, equal values
    bl_margin: float  # normalized |res(Q', Q'')|
    bg_margin: float  # normalized min |Q(t1) - Q(t2)| over distinct critical pairs
    borderline: bool
    tol: float


def in_local_bifurcation(Q: ComplexPoly, tol: float = GENERICITY_TOL):
    """True iff Q' and Q'' share a root, i.e. res(Q', Q'') ~ 0.

    The witness is the best candidate for the shared root (closest pair of
    roots of Q' and Q'').
    """
    if Q.degree < 2:
        raise ValueError("local bifurcation test requires degree >= 2")
    d1 = derivative(Q)
    d2 = derivative(d1)
    res = resultant(d1, d2)
    margin = abs(res) / sylvester_scale(d1, d2)
    hit = margin <= tol
    witness = None
    if hit:
        r1 = roots(d1).with_multiplicity()
        r2 = roots(d2).with_multiplicity()
        pair = min(((a, b) for a in r1 for b in r2), key=lambda ab: abs(ab[0] - ab[1]))
        witness = (pair[0] + pair[1]) / 2.0
    return hit, witness, margin


def in_semilocal_bifurcation(Q: ComplexPoly, tol: float = GENERICITY_TOL):
    """True iff two distinct critical points of Q share their critical value."""
    if Q.degree < 2:
        raise ValueError("semi-local bifurcation test requires degree >= 2")
    kap = roots(derivative(Q))
    vals = [(k, Q(k)) for k in kap.values]
    scale = max([1.0] + [abs(v) for _, v in vals])
    sep = kap.cluster_tol * max([1.0] + [abs(k) for k, _ in vals])
    best: tuple[complex, complex] | None = None
    margin = float("inf")
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            (t1, v1), (t2, v2) = vals[i], vals[j]
            if abs(t1 - t2) <= sep:
                continue
            gap = abs(v1 - v2) / scale
            if gap < margin:
                margin = gap
                best = (t1, t2)
    hit = margin <= tol
    return hit, (best if hit else None), margin


def is_generic(f: QHFunction, tol: float = GENERICITY_TOL) -> tuple[bool, BifurcationReport]:
    """True iff the commode part avoids both B_L and B_G."""
    Q = q_of_f(commode_reduce(f))
    bl, bl_wit, bl_margin = in_local_bifurcation(Q, tol)
    bg, bg_wit, bg_margin = in_semilocal_bifurcation(Q, tol)
    borderline = any(
        tol < m <= tol * BORDERLINE_FACTOR for m in (bl_margin, bg_margin)
    )
    report = BifurcationReport(bl, bg, bl_wit, bg_wit, bl_margin, bg_margin, borderline, tol)
    return (not bl) and (not bg), report
