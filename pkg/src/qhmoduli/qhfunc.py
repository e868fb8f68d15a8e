"""Normal forms of reduced quasi-homogeneous germs in two complex variables.

A germ is stored by its root data: weights (p, q), the two edge flags
m, k in {0, 1}, and the multiset of nonzero pairwise-distinct slopes lambda.
The bivariate polynomial x**m * y**k * prod(y**p - lambda_j * x**q) is expanded
on demand; every invariant computed downstream is a function of lambda alone.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .poly import (
    CLUSTER_RADIUS,
    ComplexPoly,
    RootMultiset,
    derivative,
    from_roots,
    roots,
)

TYPE_I = "I"
TYPE_II = "II"
TYPE_III = "III"


class InvalidGermError(ValueError):
    """Input does not describe a reduced quasi-homogeneous normal form."""


@dataclass(frozen=True)
class Weights:
    p: int
    q: int

    def __post_init__(self):
        if not (isinstance(self.p, int) and isinstance(self.q, int)):
            raise InvalidGermError("weights must be integers")
        if not (1 <= self.p <= self.q):
            raise InvalidGermError(f"weights need 1 <= p <= q, got ({self.p}, {self.q})")
        if math.gcd(self.p, self.q) != 1:
            raise InvalidGermError(f"weights must be coprime, got ({self.p}, {self.q})")


@dataclass(frozen=True)
class QHFunction:
    """Reduced quasi-homogeneous germ x^m y^k prod(y^p - lambda_j x^q)."""

    weights: Weights
    m: int
    k: int
    lambdas: tuple[complex, ...]

    def __post_init__(self):
        if self.m not in (0, 1) or self.k not in (0, 1):
            raise InvalidGermError("m and k must be 0 or 1")
        lams = tuple(complex(z) for z in self.lambdas)
        object.__setattr__(self, "lambdas", lams)
        if len(lams) < 1:
            raise InvalidGermError("need at least one root lambda")
        scale = max(abs(z) for z in lams)
        if scale == 0:
            raise InvalidGermError("all lambda are zero")
        for i, a in enumerate(lams):
            if abs(a) <= CLUSTER_RADIUS * scale:
                raise InvalidGermError(f"lambda[{i}] = {a} is zero (germ not reduced)")
            for b in lams[i + 1 :]:
                if abs(a - b) <= CLUSTER_RADIUS * scale:
                    raise InvalidGermError("lambdas must be pairwise distinct (germ not reduced)")
        if self.weights.p == 1 and self.k != 0:
            raise InvalidGermError("k must be 0 when p = 1 (the y^k factor is absorbed)")

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @property
    def germ_type(self) -> str:
        p, q = self.weights.p, self.weights.q
        if p == q == 1:
            return TYPE_I
        if p == 1:
            return TYPE_II
        return TYPE_III

    @property
    def is_commode(self) -> bool:
        return self.m == 0 and self.k == 0

    @property
    def weighted_degree(self) -> int:
        """Weighted degree of the commode part: n * p * q."""
        return self.n * self.weights.p * self.weights.q


@dataclass(frozen=True)
class PolarBranch:
    """One branch y^p = kappa * x^q of the polar curve, kappa != 0.

    alpha is the principal p-th root of kappa, so the branch is parametrized
    by s -> (s^p, alpha * s^q).  Any other root choice changes nothing
    downstream since only alpha^p = kappa enters f(gamma(s)).
    """

    kappa: complex
    alpha: complex
    multiplicity: int


@dataclass(frozen=True)
class PolarCurve:
    kappas: RootMultiset
    has_y_branch: bool
    branches: tuple[PolarBranch, ...]

    @property
    def branch_count(self) -> int:
        """r: distinct branches with kappa != 0."""
        return len(self.branches)


def classify(f: QHFunction) -> tuple[str, bool]:
    """Germ type tag (I/II/III by the weight pattern) and commode flag."""
    return f.germ_type, f.is_commode


def commode_reduce(f: QHFunction) -> QHFunction:
    """Strip the x^m y^k factor; idempotent.

    Bi-Lipschitz (and HP-invariant) comparisons only see the commode part.
    """
    if f.is_commode:
        return f
    return QHFunction(f.weights, 0, 0, f.lambdas)


def q_of_f(f: QHFunction) -> ComplexPoly:
    """Monic Q(t) = prod(t - lambda_j), the t = y^p/x^q trace of the commode part."""
    return from_roots(f.lambdas)


def f_of_q(Q: ComplexPoly, w: Weights, atol: float = 1e-9) -> QHFunction:
    """Inverse of q_of_f: the commode germ whose slope polynomial is Q.

    Rejects non-monic Q, zero constant term (a lambda at 0 breaks the normal
    form) and multiple roots (non-reduced germ).
    """
    if Q.degree < 1:
        raise InvalidGermError("Q must have degree >= 1")
    if abs(Q.leading - 1.0) > atol:
        raise InvalidGermError("Q must be monic")
    scale = max(abs(c) for c in Q.coeffs)
    if abs(Q.coeffs[0]) <= atol * scale:
        raise InvalidGermError("Q has zero constant term (root at 0 is not allowed)")
    rm = roots(Q)
    if any(m > 1 for m in rm.multiplicities):
        raise InvalidGermError("Q has multiple roots (germ would be non-reduced)")
    return QHFunction(w, 0, 0, rm.values)


def polar_curve(f: QHFunction) -> PolarCurve:
    """Critical data of the polar curve d/dy f = 0 of the commode part.

    kappa = critical points of Q (with multiplicity); one extra branch y = 0
    exists iff p > 1.
    """
    g = commode_reduce(f)
    kap = roots(derivative(q_of_f(g)))
    scale = max([1.0] + [abs(v) for v in kap.values])
    branches = []
    for v, m in zip(kap.values, kap.multiplicities):
        if abs(v) > CLUSTER_RADIUS * scale:
            r, phi = abs(v), cmath.phase(v)
            alpha = r ** (1.0 / g.weights.p) * cmath.exp(1j * phi / g.weights.p)
            branches.append(PolarBranch(v, alpha, m))
    return PolarCurve(kap, g.weights.p > 1, tuple(branches))


def bivariate_coefficients(f: QHFunction) -> dict[tuple[int, int], complex]:
    """Monomial table {(i, j): a_ij} of x^m y^k prod(y^p - lambda_j x^q).

    Expansion via Q: prod(y^p - lambda_j x^q) = sum_l c_l y^(p l) x^(q (n-l))
    where c_l are the ascending coefficients of Q.
    """
    p, q = f.weights.p, f.weights.q
    Q = q_of_f(f)
    table: dict[tuple[int, int], complex] = {}
    for l, c in enumerate(Q.coeffs):
        if c != 0:
            table[(f.m + q * (f.n - l), f.k + p * l)] = c
    return table


def partial_y(table: dict[tuple[int, int], complex]) -> dict[tuple[int, int], complex]:
    """d/dy of a monomial table."""
    out: dict[tuple[int, int], complex] = {}
    for (i, j), c in table.items():
        if j > 0:
            out[(i, j - 1)] = out.get((i, j - 1), 0j) + j * c
    return out


def weighted_degree_check(
    table: dict[tuple[int, int], complex], w: Weights, atol: float = 0.0
) -> tuple[bool, int | None]:
    """True iff all nonzero monomials x^i y^j satisfy p*i + q*j = d for one d."""
    degrees = {w.p * i + w.q * j for (i, j), c in table.items() if abs(c) > atol}
    if len(degrees) == 1:
        return True, degrees.pop()
    return False, None


def is_miniregular(table: dict[tuple[int, int], complex], w: Weights, atol: float = 1e-12) -> bool:
    """Miniregularity in y of a quasi-homogeneous table: the pure-y monomial
    (of the commode part) is present, i.e. x = 0 is not in the tangent cone."""
    ok, d = weighted_degree_check(table, w, atol)
    if not ok:
        return False
    m = min(i for (i, j), c in table.items() if abs(c) > atol)
    # after stripping x^m, the top pure-y monomial has j = (d - m p)/q
    top_j, rem = divmod(d - m * w.p, w.q)
    if rem != 0:
        return False
    return abs(table.get((m, top_j), 0j)) > atol


def germ_to_dict(f: QHFunction) -> dict:
    return {
        "p": f.weights.p,
        "q": f.weights.q,
        "m": f.m,
        "k": f.k,
        "lambdas": [[z.real, z.imag] for z in f.lambdas],
    }


def germ_from_dict(d: dict) -> QHFunction:
    try:
        lams = tuple(complex(re, im) for re, im in d["lambdas"])
        return QHFunction(Weights(int(d["p"]), int(d["q"])), int(d.get("m", 0)), int(d.get("k", 0)), lams)
    except (KeyError, TypeError) as exc:
        raise InvalidGermError(f"malformed germ record: {exc}") from exc
