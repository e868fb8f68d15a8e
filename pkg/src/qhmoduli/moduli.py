"""Root-configuration spaces and their group actions.

Configurations live in the plane, the punctured plane, or the Riemann sphere;
the analytic moduli of germs are quotients of such configurations by Mobius,
affine, or scaling actions (type I / II / III respectively), with a residual
Z_n action after the centering and unit-product normalizations.

Normalization maps implemented here:

* center:        lambda -> lambda - mean(lambda)          (kills translations)
* unit_product:  lambda -> lambda / prod(lambda)**(1/n)   (kills scalings up to Z_n)
* kappa_of_lambda / lambda_of_kappa: the critical-point chart
  sigma_l(kappa) = (n-l)/n * sigma_l(lambda), inverted by the alternating-sign
  Vieta reconstruction.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .poly import (
    CANONICAL_GRID,
    CLUSTER_RADIUS,
    ComplexPoly,
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    canonical_sort_key,
    derivative,
    elementary_symmetric,
    from_roots,
    match_multisets,
    roots,
)
from .qhfunc import TYPE_I, TYPE_II, TYPE_III, QHFunction

PLANE = "plane"
PUNCTURED = "punctured"
SPHERE = "sphere"

#: point at infinity on the Riemann sphere
INF = complex(math.inf, 0.0)


def is_inf(z: complex) -> bool:
    return cmath.isinf(z)


def chordal(u: complex, v: complex) -> float:
    """Chordal (spherical) distance on P^1, bounded by 1."""
    ui, vi = is_inf(u), is_inf(v)
    if ui and vi:
        return 0.0
    if ui:
        return 1.0 / math.sqrt(1.0 + abs(v) ** 2)
    if vi:
        return 1.0 / math.sqrt(1.0 + abs(u) ** 2)
    return abs(u - v) / math.sqrt((1.0 + abs(u) ** 2) * (1.0 + abs(v) ** 2))


@dataclass(frozen=True)
class Configuration:
    """Unordered point configuration with a space tag.

    ``delta`` asks for membership in the configuration space M_Delta(n)
    (pairwise distinct points); normalization maps can output degenerate
    configurations (e.g. coincident critical points), which carry
    delta=False.
    """

    points: tuple[complex, ...]
    space: str = PLANE
    delta: bool = True

    def __post_init__(self):
        if self.space not in (PLANE, PUNCTURED, SPHERE):
            raise ValueError(f"unknown space tag {self.space!r}")
        pts = tuple(complex(z) for z in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("empty configuration")
        if self.space != SPHERE and any(is_inf(z) for z in pts):
            raise ValueError("infinite point outside the sphere space")
        finite = [z for z in pts if not is_inf(z)]
        scale = max([1.0] + [abs(z) for z in finite])
        if self.space == PUNCTURED:
            for z in pts:
                if abs(z) <= DEFAULT_ATOL * scale:
                    raise ValueError("punctured-plane configuration contains 0")
        if self.delta:
            for i in range(len(pts)):
                for j in range(i + 1, len(pts)):
                    if self.space == SPHERE:
                        coincide = chordal(pts[i], pts[j]) <= 1e-12
                    else:
                        coincide = abs(pts[i] - pts[j]) <= 1e-12 * scale
                    if coincide:
                        raise ValueError(f"points {i} and {j} coincide (not in M_Delta)")

    @property
    def n(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Transformation:
    """Witness of an equivalence: z -> a*z + b (affine/scaling), a Mobius map
    given by its matrix, or multiplication by a root of unity."""

    kind: str  # "affine" | "scaling" | "mobius" | "root_of_unity"
    a: complex = 1.0
    b: complex = 0.0
    matrix: tuple[tuple[complex, complex], tuple[complex, complex]] | None = None
    s: int = 0
    order: int = 1

    def __post_init__(self):
        if self.kind in ("affine", "scaling") and self.a == 0:
            raise ValueError("degenerate affine/scaling transformation")
        if self.kind == "mobius":
            (a, b), (c, d) = self.matrix
            if a * d - b * c == 0:
                raise ValueError("degenerate Mobius matrix")

    def apply(self, z: complex) -> complex:
        if self.kind == "scaling":
            return self.a * z
        if self.kind == "affine":
            return self.a * z + self.b
        if self.kind == "root_of_unity":
            return cmath.exp(2j * cmath.pi * self.s / self.order) * z
        return mobius_apply(self.matrix, z)


def mobius_apply(matrix, z: complex) -> complex:
    (a, b), (c, d) = matrix
    if is_inf(z):
        return a / c if c != 0 else INF
    den = c * z + d
    if den == 0:
        return INF
    return (a * z + b) / den


def mobius_compose(m1, m2):
    """Matrix of m1 after m2."""
    (a, b), (c, d) = m1
    (e, f), (g, h) = m2
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def mobius_inverse(matrix):
    (a, b), (c, d) = matrix
    return ((d, -b), (-c, a))


def mobius_to_zero_one_inf(z1: complex, z2: complex, z3: complex):
    """Matrix of the Mobius map sending (z1, z2, z3) -> (0, 1, inf)."""
    if is_inf(z1):
        return ((0j, z2 - z3), (1.0 + 0j, -z3))
    if is_inf(z2):
        return ((1.0 + 0j, -z1), (1.0 + 0j, -z3))
    if is_inf(z3):
        return ((1.0 + 0j, -z1), (0j, z2 - z1))
    return ((z2 - z3, -z1 * (z2 - z3)), (z2 - z1, -z3 * (z2 - z1)))


def _scale_tol(points, atol=DEFAULT_ATOL, rtol=DEFAULT_RTOL) -> float:
    scale = max([1.0] + [abs(z) for z in points if not is_inf(z)])
    return atol + rtol * scale


def center(c: Configuration) -> Configuration:
    """Subtract the barycenter; equivariant: center(a*x + b) = a*center(x)."""
    if c.space != PLANE:
        raise ValueError("center is defined on plane configurations")
    mean = sum(c.points) / c.n
    return Configuration(tuple(z - mean for z in c.points), PLANE, c.delta)


def is_centered(c: Configuration, tol: float = 1e-10) -> bool:
    scale = max([1.0] + [abs(z) for z in c.points])
    return abs(sum(c.points)) <= tol * c.n * scale


def unit_product(c: Configuration) -> Configuration:
    """Scale by the principal n-th root of 1/prod(points).

    The leftover ambiguity is exactly the Z_n action handled by
    zn_orbit_equal.  Centering is preserved (scaling fixes sum = 0).
    """
    scale = max(abs(z) for z in c.points)
    if any(abs(z) <= DEFAULT_ATOL * scale for z in c.points):
        raise ValueError("unit_product requires all points nonzero")
    prod = 1.0 + 0j
    for z in c.points:
        prod *= z
    r, phi = abs(prod), cmath.phase(prod)
    root = r ** (1.0 / c.n) * cmath.exp(1j * phi / c.n)
    return Configuration(tuple(z / root for z in c.points), c.space, c.delta)


def has_unit_product(c: Configuration, tol: float = 1e-10) -> bool:
    prod = 1.0 + 0j
    for z in c.points:
        prod *= z
    return abs(prod - 1.0) <= tol


def kappa_of_lambda(c: Configuration) -> Configuration:
    """Critical points of prod(t - lambda_j) for a centered unit-product lambda.

    Satisfies sigma_l(kappa) = (n-l)/n * sigma_l(lambda); in particular the
    output sums to zero.  The output may be degenerate (coincident critical
    points), hence delta=False.
    """
    if not is_centered(c, 1e-6):
        raise ValueError("kappa_of_lambda expects a centered configuration")
    if not has_unit_product(c, 1e-6):
        raise ValueError("kappa_of_lambda expects a unit-product configuration")
    rm = roots(derivative(from_roots(c.points)))
    return Configuration(tuple(rm.with_multiplicity()), PLANE, delta=False)


def lambda_of_kappa(kappa, n: int, sigma_n: complex = 1.0) -> ComplexPoly:
    """The unique monic degree-n polynomial with critical points kappa and
    root product sigma_n.

    Coefficient of t^(n-l) is (-1)^l * n/(n-l) * sigma_l(kappa) for
    l = 1..n-1; the constant term is (-1)^n * sigma_n (Vieta-consistent
    alternating signs).
    """
    pts = tuple(kappa.points) if isinstance(kappa, Configuration) else tuple(complex(z) for z in kappa)
    if len(pts) != n - 1:
        raise ValueError(f"need n-1 = {n - 1} critical points, got {len(pts)}")
    sig = elementary_symmetric(pts)
    coeffs = [0j] * (n + 1)
    coeffs[n] = 1.0 + 0j
    for l in range(1, n):
        coeffs[n - l] = (-1) ** l * (n / (n - l)) * sig[l]
    coeffs[0] = (-1) ** n * complex(sigma_n)
    return ComplexPoly(tuple(coeffs))


def zn_orbit_equal(u, v, n: int, tol: float | None = None) -> bool:
    """True iff v = exp(2 pi i s / n) * u as multisets for some s."""
    u = [complex(z) for z in u]
    v = [complex(z) for z in v]
    if len(u) != len(v):
        return False
    if tol is None:
        tol = _scale_tol(u + v)
    for s in range(n):
        w = cmath.exp(2j * cmath.pi * s / n)
        if match_multisets([w * z for z in u], v, tol) is not None:
            return True
    return False


def _match_sphere(xs, ys, tol: float) -> bool:
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        return False
    n = len(xs)
    match_y = [-1] * n
    adj = [[j for j in range(n) if chordal(xs[i], ys[j]) <= tol] for i in range(n)]

    def augment(i, seen):
        for j in adj[i]:
            if seen[j]:
                continue
            seen[j] = True
            if match_y[j] < 0 or augment(match_y[j], seen):
                match_y[j] = i
                return True
        return False

    return all(augment(i, [False] * n) for i in range(n))


def _equivalent_scaling(a: Configuration, b: Configuration, tol: float):
    """Search b = s * a over the finite candidate set s = ref / a_j."""
    refs = [z for z in b.points if abs(z) > tol]
    if not refs:
        # all-zero multisets (only possible for n = 1 centered configurations)
        if all(abs(z) <= tol for z in a.points):
            return True, 1.0 + 0j
        return False, None
    ref = max(refs, key=lambda z: (abs(z), -cmath.phase(z)))
    for aj in a.points:
        if abs(aj) <= tol:
            continue
        s = ref / aj
        if match_multisets([s * z for z in a.points], list(b.points), tol * max(1.0, abs(s))) is not None:
            return True, s
    return False, None


def _equivalent_mobius(a: Configuration, b: Configuration, tol: float = 1e-8):
    """Sharply 3-transitive search: map every ordered triple of a onto the
    (0, 1, inf) chart fixed by the first canonical triple of b."""
    pts_a, pts_b = list(a.points), list(b.points)
    if len(pts_a) != len(pts_b):
        return False, None
    if len(pts_a) <= 2:
        # any two same-size distinct configurations of <= 2 sphere points match
        fill = [0j, 1.0 + 0j, INF]
        ta = pts_a + [z for z in fill if all(chordal(z, w) > 1e-12 for w in pts_a)]
        tb = pts_b + [z for z in fill if all(chordal(z, w) > 1e-12 for w in pts_b)]
        Ma = mobius_to_zero_one_inf(*ta[:3])
        Mb = mobius_to_zero_one_inf(*tb[:3])
        return True, Transformation("mobius", matrix=mobius_compose(mobius_inverse(Mb), Ma))
    order = sorted(
        range(len(pts_b)),
        key=lambda i: (1 if is_inf(pts_b[i]) else 0,)
        + canonical_sort_key(0j if is_inf(pts_b[i]) else pts_b[i]),
    )
    i1, i2, i3 = order[0], order[1], order[2]
    Mb = mobius_to_zero_one_inf(pts_b[i1], pts_b[i2], pts_b[i3])
    target = [mobius_apply(Mb, z) for z in pts_b]
    idx = range(len(pts_a))
    for i in idx:
        for j in idx:
            for k in idx:
                if len({i, j, k}) < 3:
                    continue
                Ma = mobius_to_zero_one_inf(pts_a[i], pts_a[j], pts_a[k])
                if _match_sphere([mobius_apply(Ma, z) for z in pts_a], target, tol):
                    return True, Transformation(
                        "mobius", matrix=mobius_compose(mobius_inverse(Mb), Ma)
                    )
    return False, None


def equivalent(a: Configuration, b: Configuration, germ_type: str):
    """Decide configuration equivalence under the group of the germ type.

    type III: GL(1) scalings; type II: affine maps (centering reduces to the
    scaling search); type I: Mobius maps.  Returns (flag, witness|None).
    """
    if a.space != b.space:
        raise ValueError("configurations live in different spaces")
    if a.n != b.n:
        return False, None
    tol = _scale_tol(list(a.points) + list(b.points))
    if germ_type == TYPE_III:
        ok, s = _equivalent_scaling(a, b, tol)
        return (True, Transformation("scaling", a=s)) if ok else (False, None)
    if germ_type == TYPE_II:
        mean_a = sum(a.points) / a.n
        mean_b = sum(b.points) / b.n
        ca, cb = center(a), center(b)
        ok, s = _equivalent_scaling(ca, cb, tol)
        if not ok:
            return False, None
        # z -> s*(z - mean_a) + mean_b
        return True, Transformation("affine", a=s, b=mean_b - s * mean_a)
    if germ_type == TYPE_I:
        return _equivalent_mobius(a, b)
    raise ValueError(f"unknown germ type {germ_type!r}")


def germ_configuration(f: QHFunction) -> Configuration:
    """The moduli-space configuration of a germ.

    Type I: the n slopes on the sphere, plus the point at infinity when m = 1
    (the x = 0 line joins the projectivized tangent data).  Type II: slopes in
    the plane.  Type III: slopes in the punctured plane.
    """
    t = f.germ_type
    if t == TYPE_I:
        pts = f.lambdas + ((INF,) if f.m == 1 else ())
        return Configuration(pts, SPHERE)
    if t == TYPE_II:
        return Configuration(f.lambdas, PLANE)
    return Configuration(f.lambdas, PUNCTURED)


def germ_equivalent(f: QHFunction, g: QHFunction):
    """Analytic equivalence of two germs in normal form.

    Matching weights are required; the m/k flags contribute the discrete
    factors of the moduli (for type I, m enters as the infinity point of the
    sphere configuration instead).
    """
    if f.weights != g.weights or f.n != g.n:
        return False, None
    t = f.germ_type
    if t != TYPE_I and (f.m, f.k) != (g.m, g.k):
        return False, None
    return equivalent(germ_configuration(f), germ_configuration(g), t)


def _normalize_scaling(points, grid: float) -> tuple[complex, ...]:
    """Scale-canonical representative: divide by a max-modulus point; ties are
    broken by minimizing the resulting sorted tuple, which makes the choice
    invariant under scalings (modulus ratios are scale-free)."""
    mx = max(abs(z) for z in points)
    if mx == 0:
        return tuple(points)
    ties = [z for z in points if abs(z) >= mx * (1.0 - 1e-9)]
    best = None
    for w in ties:
        cand = tuple(sorted((z / w for z in points), key=canonical_sort_key))
        key = tuple(canonical_sort_key(z, grid) for z in cand)
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def canonical_form(c: Configuration, germ_type: str, grid: float = CANONICAL_GRID):
    """Deterministic representative + hash key for the type's group action.

    type III: normalize by scaling; type II: center, then normalize by
    scaling.  Equal classes produce bit-identical keys after grid rounding.
    """
    if germ_type == TYPE_III:
        rep = _normalize_scaling(c.points, grid)
    elif germ_type == TYPE_II:
        rep = _normalize_scaling(center(c).points, grid)
    else:
        raise ValueError("canonical_form is defined for types II and III")
    key = ";".join("%d,%d" % canonical_sort_key(z, grid) for z in rep)
    return rep, key
