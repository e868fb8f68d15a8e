"""Complex univariate polynomial kernel.

Dense polynomials over complex doubles: Horner evaluation, differentiation,
construction from roots (Vieta), global root finding by Aberth-Ehrlich
simultaneous iteration, elementary symmetric functions, and Sylvester
resultants.  Degrees stay small (<= 12 in practice), so everything is written
for robustness rather than asymptotic speed.

Tolerance conventions used throughout the package live here:

* complex equality: ``|a - b| <= atol + rtol * max(|a|, |b|)`` with
  ``atol = rtol = 1e-9`` by default,
* multiplicity clustering: radius ``1e-6`` after normalizing by
  ``max(1, max |root|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_ATOL = 1e-9
DEFAULT_RTOL = 1e-9
CLUSTER_RADIUS = 1e-6
CANONICAL_GRID = 1e-7


def close(a: complex, b: complex, atol: float = DEFAULT_ATOL, rtol: float = DEFAULT_RTOL) -> bool:
    """Scale-aware complex equality test."""
    return abs(a - b) <= atol + rtol * max(abs(a), abs(b))


def match_multisets(xs, ys, tol: float) -> list[int] | None:
    """Perfect matching of two complex multisets under |x_i - y_j| <= tol.

    Returns the assignment (index into ys for each x) or None if sizes differ
    or no perfect matching exists.  Exact bipartite matching by augmenting
    paths; greedy pairing can fail on near-coincident points.
    """
    xs = list(xs)
    ys = list(ys)
    if len(xs) != len(ys):
        return None
    n = len(xs)
    adj = [[j for j in range(n) if abs(xs[i] - ys[j]) <= tol] for i in range(n)]
    match_y = [-1] * n

    def augment(i, seen):
        for j in adj[i]:
            if seen[j]:
                continue
            seen[j] = True
            if match_y[j] < 0 or augment(match_y[j], seen):
                match_y[j] = i
                return True
        return False

    for i in range(n):
        if not augment(i, [False] * n):
            return None
    assign = [-1] * n
    for j, i in enumerate(match_y):
        assign[i] = j
    return assign


def canonical_sort_key(z: complex, grid: float = CANONICAL_GRID, scale: float = 1.0):
    """Deterministic total order on complex scalars: lexicographic (Re, Im)
    after snapping to a tolerance grid."""
    g = grid * max(scale, 1e-300)
    return (round(z.real / g), round(z.imag / g))


def sort_points(points, grid: float = CANONICAL_GRID) -> tuple[complex, ...]:
    """Sort complex points by the canonical order, scale taken from the data."""
    pts = [complex(z) for z in points]
    scale = max([1.0] + [abs(z) for z in pts])
    return tuple(sorted(pts, key=lambda z: canonical_sort_key(z, grid, scale)))


@dataclass(frozen=True)
class ComplexPoly:
    """Dense univariate polynomial; coeffs[l] is the coefficient of t**l."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        cs = [complex(c) for c in self.coeffs]
        if not cs:
            cs = [0j]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    def __call__(self, t: complex) -> complex:
        return eval_poly(self, t)

    def monic(self) -> "ComplexPoly":
        if self.is_zero:
            raise ValueError("cannot normalize the zero polynomial")
        lead = self.coeffs[-1]
        return ComplexPoly(tuple(c / lead for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, ComplexPoly):
            a, b = self.coeffs, other.coeffs
            out = [0j] * (len(a) + len(b) - 1)
            for i, ca in enumerate(a):
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
            return ComplexPoly(tuple(out))
        return ComplexPoly(tuple(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def __add__(self, other: "ComplexPoly") -> "ComplexPoly":
        a, b = list(self.coeffs), list(other.coeffs)
        if len(a) < len(b):
            a, b = b, a
        for i, c in enumerate(b):
            a[i] += c
        return ComplexPoly(tuple(a))

    def __sub__(self, other: "ComplexPoly") -> "ComplexPoly":
        return self + (-1) * other


@dataclass(frozen=True)
class RootMultiset:
    """Clustered roots of a polynomial: values with positive multiplicities.

    ``converged`` is False when the root finder hit its iteration cap; the
    values are then the best available approximations.
    """

    values: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    cluster_tol: float
    converged: bool = True

    @property
    def total(self) -> int:
        return sum(self.multiplicities)

    def with_multiplicity(self) -> list[complex]:
        out = []
        for v, m in zip(self.values, self.multiplicities):
            out.extend([v] * m)
        return out

    def nonzero(self, tol: float = DEFAULT_ATOL) -> "RootMultiset":
        """Drop clusters at the origin (|v| <= tol * scale)."""
        scale = max([1.0] + [abs(v) for v in self.values])
        keep = [(v, m) for v, m in zip(self.values, self.multiplicities) if abs(v) > tol * scale]
        return RootMultiset(
            tuple(v for v, _ in keep),
            tuple(m for _, m in keep),
            self.cluster_tol,
            self.converged,
        )


def eval_poly(p: ComplexPoly, t: complex) -> complex:
    """Horner evaluation."""
    acc = 0j
    for c in reversed(p.coeffs):
        acc = acc * t + c
    return acc


def derivative(p: ComplexPoly) -> ComplexPoly:
    if p.degree == 0:
        return ComplexPoly((0j,))
    return ComplexPoly(tuple(l * c for l, c in enumerate(p.coeffs) if l > 0))


def elementary_symmetric(points) -> tuple[complex, ...]:
    """(sigma_0, ..., sigma_n) of the given points, sigma_0 = 1.

    Incremental product recurrence: adding a point x updates
    e_j += x * e_{j-1} from high j down, which is the numerically stable
    expansion of prod (1 + x_i z).
    """
    pts = [complex(z) for z in points]
    e = [0j] * (len(pts) + 1)
    e[0] = 1.0 + 0j
    for i, x in enumerate(pts):
        for j in range(min(i + 1, len(pts)), 0, -1):
            e[j] += x * e[j - 1]
    return tuple(e)


def from_roots(roots_like, leading: complex = 1.0) -> ComplexPoly:
    """Expand leading * prod (t - r) by the Vieta recurrence."""
    if leading == 0:
        raise ValueError("leading coefficient must be nonzero")
    coeffs = [1.0 + 0j]  # ascending
    for r in roots_like:
        r = complex(r)
        nxt = [0j] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] -= r * c
            nxt[i + 1] += c
        coeffs = nxt
    return ComplexPoly(tuple(complex(leading) * c for c in coeffs))


def _horner_vec(desc: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.full_like(z, desc[0])
    for c in desc[1:]:
        acc = acc * z + c
    return acc


def _aberth(asc: np.ndarray, max_iter: int) -> tuple[np.ndarray, bool]:
    """All roots of the polynomial with ascending coefficients ``asc``.

    Simultaneous Aberth-Ehrlich iteration started on a perturbed circle of
    Fujiwara-bound radius.  Converged means every point reached the
    backward-error floor |p(z)| <= 8 * eps * sum |a_k||z|^k.
    """
    monic = np.asarray(asc, dtype=complex) / asc[-1]
    n = len(monic) - 1
    desc = monic[::-1].copy()
    desc_abs = np.abs(desc)
    dcoef = desc[:-1] * np.arange(n, 0, -1)

    radius = 2.0 * max(abs(monic[n - k]) ** (1.0 / k) for k in range(1, n + 1))
    if radius == 0.0:
        radius = 1.0
    # irrational angular offset plus a tiny shear so no initial symmetry survives
    angles = 2.0 * np.pi * np.arange(n) / n + 0.3763 + 1e-3 * np.arange(n)
    z = radius * np.exp(1j * angles)

    eps = np.finfo(float).eps
    for _ in range(max_iter):
        pv = _horner_vec(desc, z)
        err = eps * _horner_vec(desc_abs, np.abs(z).astype(complex)).real
        done = np.abs(pv) <= 8.0 * err
        if done.all():
            return z, True
        dv = _horner_vec(dcoef, z)
        dv = np.where(dv == 0, eps, dv)
        newton = pv / dv
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        sums = inv.sum(axis=1)
        denom = 1.0 - newton * sums
        denom = np.where(denom == 0, eps, denom)
        w = newton / denom
        z = np.where(done, z, z - w)
    pv = _horner_vec(desc, z)
    err = eps * _horner_vec(desc_abs, np.abs(z).astype(complex)).real
    return z, bool((np.abs(pv) <= 64.0 * err).all())


def _cluster(points: np.ndarray, radius: float) -> tuple[list[complex], list[int]]:
    """Single-linkage clustering at ``radius * max(1, max |z|)``."""
    m = len(points)
    if m == 0:
        return [], []
    scale = max(1.0, float(np.abs(points).max()))
    r = radius * scale
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(points[i] - points[j]) <= r:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    reps, mults = [], []
    for idx in groups.values():
        reps.append(complex(points[idx].mean()))
        mults.append(len(idx))
    order = sorted(range(len(reps)), key=lambda k: canonical_sort_key(reps[k], scale=scale))
    return [reps[k] for k in order], [mults[k] for k in order]


def roots(p: ComplexPoly, cluster_tol: float = CLUSTER_RADIUS, max_iter: int = 500) -> RootMultiset:
    """All complex roots of p with multiplicities by clustering.

    Exact zero roots (vanishing low-order coefficients) are factored out
    before iterating, so e.g. n*t**(n-1) resolves to the origin with
    multiplicity n-1 directly.
    """
    if p.degree < 1:
        raise ValueError("roots requires degree >= 1")
    asc = np.asarray(p.coeffs, dtype=complex)
    zero_mult = 0
    while zero_mult < p.degree and asc[zero_mult] == 0:
        zero_mult += 1
    work = asc[zero_mult:]
    found: list[complex] = [0j] * zero_mult
    converged = True
    if len(work) > 1:
        z, converged = _aberth(work, max_iter)
        found.extend(z.tolist())
    values, mults = _cluster(np.asarray(found, dtype=complex), cluster_tol)
    return RootMultiset(tuple(values), tuple(mults), cluster_tol, converged)


def resultant(p: ComplexPoly, q: ComplexPoly) -> complex:
    """Determinant of the Sylvester matrix of p and q.

    Vanishes (up to numerical tolerance) exactly when p and q share a root.
    Convention: resultant(t - a, t - b) = a - b.
    """
    if p.is_zero or q.is_zero:
        raise ValueError("resultant requires nonzero polynomials")
    m, n = p.degree, q.degree
    if m == 0 and n == 0:
        return 1.0 + 0j
    size = m + n
    S = np.zeros((size, size), dtype=complex)
    pd = list(reversed(p.coeffs))
    qd = list(reversed(q.coeffs))
    for i in range(n):
        S[i, i : i + m + 1] = pd
    for i in range(m):
        S[n + i, i : i + n + 1] = qd
    return complex(np.linalg.det(S))


def sylvester_scale(p: ComplexPoly, q: ComplexPoly) -> float:
    """Hadamard bound of the Sylvester determinant; |resultant| <= this."""
    m, n = p.degree, q.degree
    if m + n == 0:
        return 1.0
    prow = math.sqrt(sum(abs(c) ** 2 for c in p.coeffs))
    qrow = math.sqrt(sum(abs(c) ** 2 for c in q.coeffs))
    return max(prow, 1e-300) ** n * max(qrow, 1e-300) ** m
