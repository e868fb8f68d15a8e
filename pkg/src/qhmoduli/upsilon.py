"""Forward critical-value maps and their numerical inversion.

A kappa-configuration determines the monic polynomial Q with critical points
kappa and root product 1; pushing kappa forward to the critical values
rho_j = Q(kappa_j) is the square polynomial map whose fibers enumerate the
analytic classes sharing a Henry-Parusinski invariant:

* type II:  kappa constrained to sum to zero, coordinates kappa_1..kappa_{n-2}
  (the last value rho_{n-1} is determined), Bezout number n^(n-2);
* type III: kappa free in C^(n-1), Bezout number n^(n-1).

Fibers are computed by total-degree homotopy continuation: start system
kappa_j^n = r_j with random nonzero r_j, gamma-trick convex combination,
Euler predictor + Newton corrector with adaptive steps, and a direct-Newton
endgame on the target system.  Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .moduli import Configuration, canonical_form, lambda_of_kappa, zn_orbit_equal
from .poly import CLUSTER_RADIUS, ComplexPoly, canonical_sort_key, eval_poly, roots
from .qhfunc import TYPE_II, TYPE_III

MAX_PATHS = 50_000


@dataclass(frozen=True)
class SolverConfig:
    seed: int = 0
    step_init: float = 0.05
    step_min: float = 1e-7
    step_max: float = 0.1
    corrector_tol: float = 1e-12
    max_corrector_iters: int = 10
    cluster_radius: float = CLUSTER_RADIUS
    divergence_bound: float = 1e8
    endgame_t: float = 0.99
    residual_tol: float = 1e-8
    zero_target_tol: float = 1e-8

    def __post_init__(self):
        if self.step_min <= 0 or self.corrector_tol <= 0 or self.residual_tol <= 0:
            raise ValueError("solver tolerances and minimal step must be positive")


@dataclass(frozen=True)
class FiberTarget:
    germ_type: str  # II or III
    n: int
    targets: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(complex(z) for z in self.targets))
        if self.germ_type not in (TYPE_II, TYPE_III):
            raise ValueError("fiber targets exist for germ types II and III")
        if self.n < 2:
            raise ValueError("need n >= 2")
        want = self.n - 2 if self.germ_type == TYPE_II else self.n - 1
        if len(self.targets) != want:
            raise ValueError(
                f"type {self.germ_type}, n = {self.n} needs {want} target values, got {len(self.targets)}"
            )

    @property
    def dims(self) -> int:
        return len(self.targets)

    @property
    def bezout(self) -> int:
        return self.n**self.dims


@dataclass(frozen=True)
class FiberSolution:
    kappa: tuple[complex, ...]  # full kappa (n-1 entries; type II includes the dependent one)
    residual: float
    multiplicity: int
    diverged: bool = False


@dataclass(frozen=True)
class Fiber:
    target: FiberTarget
    solutions: tuple[FiberSolution, ...]
    bezout: int
    orbit_partition: tuple[tuple[int, ...], ...]
    degenerate: bool
    degenerate_reasons: tuple[str, ...]
    path_failures: int

    @property
    def incomplete(self) -> bool:
        return self.path_failures > 0

    @property
    def finite_solutions(self) -> list[FiberSolution]:
        return [s for s in self.solutions if not s.diverged]

    @property
    def diverged_count(self) -> int:
        return sum(1 for s in self.solutions if s.diverged)

    @property
    def class_count(self) -> int:
        return len(self.orbit_partition)


@dataclass(frozen=True)
class ClassRecord:
    kappa: tuple[complex, ...]
    Q: ComplexPoly
    lambdas: tuple[complex, ...]
    hp_residual: float
    reduced: bool
    orbit_size: int


def _sigma_np(points: np.ndarray) -> np.ndarray:
    """sigma_0..sigma_m of the given m points."""
    m = len(points)
    e = np.zeros(m + 1, dtype=complex)
    e[0] = 1.0
    for i in range(m):
        e[1 : i + 2] = e[1 : i + 2] + points[i] * e[0 : i + 1]
    return e


def _qcoeffs_desc(kfull: np.ndarray, n: int) -> np.ndarray:
    """Descending coefficients of the monic Q with critical points kfull and
    constant term (-1)^n (root product 1)."""
    sig = _sigma_np(kfull)
    c = np.empty(n + 1, dtype=complex)
    c[0] = 1.0
    for l in range(1, n):
        c[l] = (-1) ** l * (n / (n - l)) * sig[l]
    c[n] = (-1) ** n
    return c


def _horner_np(desc: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.full_like(z, desc[0])
    for c in desc[1:]:
        acc = acc * z + c
    return acc


def upsilon_II(kappa_free) -> tuple[tuple[complex, ...], complex]:
    """Critical values at the free kappa coordinates of a zero-sum tuple.

    The dependent coordinate kappa_{n-1} = -sum(kappa_free) is appended
    internally.  Returns (rho_1..rho_{n-2}, rho_{n-1}); the last value is
    determined by the others and is reported as auxiliary output.
    """
    free = np.asarray([complex(z) for z in kappa_free], dtype=complex)
    n = len(free) + 2
    kfull = np.append(free, -free.sum())
    vals = _horner_np(_qcoeffs_desc(kfull, n), kfull)
    return tuple(vals[: n - 2].tolist()), complex(vals[n - 2])


def upsilon_III(kappa) -> tuple[complex, ...]:
    """Critical values rho_j = Q(kappa_j) under the root-product-1 normalization."""
    kfull = np.asarray([complex(z) for z in kappa], dtype=complex)
    n = len(kfull) + 1
    vals = _horner_np(_qcoeffs_desc(kfull, n), kfull)
    return tuple(vals.tolist())


def _jacobian_full(kfull: np.ndarray, n: int) -> np.ndarray:
    """d rho_j / d kappa_m for rho_j = Q_kappa(kappa_j), all n-1 coordinates.

    The chain-rule term Q'(kappa_j) vanishes identically (kappa_j is a
    critical point of its own Q), leaving only the coefficient derivatives:
    J[j,m] = sum_l (-1)^l n/(n-l) sigma_{l-1}(kappa minus m) kappa_j^(n-l).
    """
    nm1 = n - 1
    coeff = np.empty((nm1, nm1), dtype=complex)  # coeff[l-1, m]
    for m in range(nm1):
        rest = np.delete(kfull, m)
        sig = _sigma_np(rest)
        for l in range(1, n):
            coeff[l - 1, m] = (-1) ** l * (n / (n - l)) * sig[l - 1]
    powers = np.empty((nm1, nm1), dtype=complex)  # powers[j, l-1] = kappa_j^(n-l)
    for l in range(1, n):
        powers[:, l - 1] = kfull ** (n - l)
    return powers @ coeff


def _make_system(target: FiberTarget):
    """F(u) and J(u) in the free unknowns u for the target system."""
    n = target.n
    rho = np.asarray(target.targets, dtype=complex)
    if target.germ_type == TYPE_III:

        def F(u):
            return _horner_np(_qcoeffs_desc(u, n), u) - rho

        def J(u):
            return _jacobian_full(u, n)

    else:

        def F(u):
            kfull = np.append(u, -u.sum())
            vals = _horner_np(_qcoeffs_desc(kfull, n), kfull)
            return vals[: n - 2] - rho

        def J(u):
            kfull = np.append(u, -u.sum())
            Jf = _jacobian_full(kfull, n)
            return Jf[: n - 2, : n - 2] - Jf[: n - 2, n - 2 : n - 1]

    return F, J


def full_kappa(target: FiberTarget, u) -> tuple[complex, ...]:
    """Free unknowns -> full kappa tuple (appends the zero-sum coordinate)."""
    u = [complex(z) for z in u]
    if target.germ_type == TYPE_II:
        return tuple(u) + (-sum(u),)
    return tuple(u)


def _res_scale(u: np.ndarray, n: int, tscale: float) -> float:
    m = float(np.abs(u).max()) if len(u) else 1.0
    return 1.0 + tscale + max(1.0, m) ** n


class _Tracker:
    """Tracks one total-degree start point to the target system."""

    def __init__(self, F, J, r, gamma, n, dims, cfg, tscale):
        self.F, self.J, self.r, self.gamma = F, J, r, gamma
        self.n, self.dims, self.cfg, self.tscale = n, dims, cfg, tscale

    def _H(self, u, t):
        G = u**self.n - self.r
        return (1.0 - t) * self.gamma * G + t * self.F(u)

    def _Hu(self, u, t):
        Gp = np.diag(self.n * u ** (self.n - 1))
        return (1.0 - t) * self.gamma * Gp + t * self.J(u)

    def _correct(self, u, t):
        cfg = self.cfg
        for _ in range(cfg.max_corrector_iters):
            H = self._H(u, t)
            if np.abs(H).max() <= cfg.corrector_tol * _res_scale(u, self.n, self.tscale):
                return u, True
            try:
                step = np.linalg.solve(self._Hu(u, t), -H)
            except np.linalg.LinAlgError:
                return u, False
            u = u + step
            if not np.isfinite(u).all() or np.abs(u).max() > cfg.divergence_bound:
                return u, False
        H = self._H(u, t)
        ok = np.abs(H).max() <= cfg.corrector_tol * _res_scale(u, self.n, self.tscale)
        return u, ok

    def _endgame(self, u):
        """Direct Newton on the target system from the t = endgame_t iterate."""
        cfg = self.cfg
        best, best_res = u, float(np.abs(self.F(u)).max())
        for _ in range(60):
            Fv = self.F(u)
            res = float(np.abs(Fv).max())
            if res < best_res:
                best, best_res = u, res
            if res <= cfg.corrector_tol * _res_scale(u, self.n, self.tscale):
                return u, "finite"
            try:
                step = np.linalg.solve(self.J(u), -Fv)
            except np.linalg.LinAlgError:
                break
            u = u + step
            if not np.isfinite(u).all():
                return best, "failed"
            if np.abs(u).max() > cfg.divergence_bound:
                return u, "diverged"
        if best_res <= cfg.residual_tol * _res_scale(best, self.n, self.tscale):
            return best, "finite"
        return best, "failed"

    def run(self, u0: np.ndarray):
        cfg = self.cfg
        u, t, dt = u0.astype(complex), 0.0, cfg.step_init
        streak = 0
        while t < cfg.endgame_t:
            dt = min(dt, cfg.endgame_t - t)
            try:
                Ht = self.F(u) - self.gamma * (u**self.n - self.r)
                du = np.linalg.solve(self._Hu(u, t), -Ht)
                pred = u + du * dt
            except np.linalg.LinAlgError:
                pred = u
            cand, ok = self._correct(pred, t + dt)
            if ok:
                u, t = cand, t + dt
                streak += 1
                if streak >= 5:
                    dt = min(dt * 2.0, cfg.step_max)
                    streak = 0
                if np.abs(u).max() > cfg.divergence_bound:
                    return u, "diverged"
            else:
                dt *= 0.5
                streak = 0
                if dt < cfg.step_min:
                    return u, "failed"
        return self._endgame(u)


def _cluster_vectors(points: list[np.ndarray], radius: float):
    """Single-linkage clustering of kappa vectors under the sup metric,
    radius scaled by max(1, largest coordinate)."""
    m = len(points)
    if m == 0:
        return [], []
    scale = max(1.0, max(float(np.abs(p).max()) for p in points))
    r = radius * scale
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if float(np.abs(points[i] - points[j]).max()) <= r:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    reps = [np.mean([points[i] for i in idx], axis=0) for idx in groups.values()]
    mults = [len(idx) for idx in groups.values()]
    return reps, mults


def _start_points(dims: int, n: int, r: np.ndarray):
    """All Bezout-many solutions of kappa_j^n = r_j, in deterministic order."""
    root_sets = []
    for j in range(dims):
        base = r[j] ** (1.0 / n)
        root_sets.append([base * np.exp(2j * np.pi * s / n) for s in range(n)])
    for combo in itertools.product(*root_sets):
        yield np.asarray(combo, dtype=complex)


def is_degenerate_target(target: FiberTarget, fiber: "Fiber | None" = None, tol: float = 1e-8):
    """A fiber is degenerate when a target entry vanishes or a solution is
    multiple.  Returns (flag, reasons)."""
    reasons = []
    scale = max([1.0] + [abs(z) for z in target.targets])
    for j, z in enumerate(target.targets):
        if abs(z) <= tol * scale:
            reasons.append(f"target[{j}] = 0")
    if fiber is not None:
        for i, sol in enumerate(fiber.solutions):
            if not sol.diverged and sol.multiplicity > 1:
                reasons.append(f"solution[{i}] has multiplicity {sol.multiplicity}")
    return bool(reasons), tuple(reasons)


def solve_fiber(target: FiberTarget, cfg: SolverConfig = SolverConfig()) -> Fiber:
    """All points of the fiber over the target, by total-degree continuation.

    Deterministic for a fixed cfg.seed; solutions are clustered into distinct
    points with multiplicities, sorted canonically, and partitioned into Z_n
    orbits.
    """
    if target.bezout > MAX_PATHS:
        raise ValueError(f"Bezout number {target.bezout} exceeds the supported {MAX_PATHS} paths")
    n, dims = target.n, target.dims
    tscale = max([1.0] + [abs(z) for z in target.targets])

    if dims == 0:
        # type II, n = 2: the zero-sum constraint pins kappa = (0,)
        sol = FiberSolution((0j,), 0.0, 1, False)
        deg, reasons = is_degenerate_target(target, None, cfg.zero_target_tol)
        return Fiber(target, (sol,), 1, ((0,),), deg, reasons, 0)

    rng = np.random.default_rng(cfg.seed)
    gamma = np.exp(2j * np.pi * rng.uniform())
    r = np.asarray(
        [rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.uniform()) for _ in range(dims)],
        dtype=complex,
    )
    F, J = _make_system(target)
    tracker = _Tracker(F, J, r, gamma, n, dims, cfg, tscale)

    finite: list[np.ndarray] = []
    diverged: list[np.ndarray] = []
    failures = 0
    for u0 in _start_points(dims, n, r):
        end, status = tracker.run(u0)
        if status == "finite":
            finite.append(end)
        elif status == "diverged":
            diverged.append(end)
        else:
            failures += 1

    reps, mults = _cluster_vectors(finite, cfg.cluster_radius)
    solutions = []
    for rep, mult in zip(reps, mults):
        # re-polish the cluster mean on the target system
        polished, status = tracker._endgame(rep)
        if status != "finite":
            polished = rep
        residual = float(np.abs(F(polished)).max())
        solutions.append(
            FiberSolution(full_kappa(target, polished), residual, mult, False)
        )
    scale = max(
        [1.0] + [abs(c) for s in solutions for c in s.kappa]
    )
    solutions.sort(key=lambda s: tuple(canonical_sort_key(c, scale=scale) for c in s.kappa))
    for d in diverged:
        solutions.append(
            FiberSolution(full_kappa(target, d), float("inf"), 1, True)
        )

    finite_idx = [i for i, s in enumerate(solutions) if not s.diverged]
    parent = {i: i for i in finite_idx}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in range(len(finite_idx)):
        for b in range(a + 1, len(finite_idx)):
            i, j = finite_idx[a], finite_idx[b]
            if find(i) != find(j) and zn_orbit_equal(solutions[i].kappa, solutions[j].kappa, n):
                parent[find(i)] = find(j)
    orbits: dict[int, list[int]] = {}
    for i in finite_idx:
        orbits.setdefault(find(i), []).append(i)
    partition = tuple(tuple(sorted(o)) for o in sorted(orbits.values(), key=lambda o: min(o)))

    fiber = Fiber(target, tuple(solutions), target.bezout, partition, False, (), failures)
    deg, reasons = is_degenerate_target(target, fiber, cfg.zero_target_tol)
    return replace(fiber, degenerate=deg, degenerate_reasons=reasons)


def classes_from_fiber(fiber: Fiber, sigma_n: complex = 1.0) -> list[ClassRecord]:
    """One analytic-class record per Z_n orbit, with the reconstructed slope
    polynomial and its roots.

    Reconstructions with multiple roots are flagged non-reduced (the class
    lies over a degenerate stratum) rather than rejected.
    """
    n = fiber.target.n
    records = []
    for orbit in fiber.orbit_partition:
        rep = fiber.solutions[orbit[0]].kappa
        Q = lambda_of_kappa(rep, n, sigma_n)
        rm = roots(Q)
        reduced = all(m == 1 for m in rm.multiplicities)
        want = rep[: fiber.target.dims]
        vals = [eval_poly(Q, k) for k in want]
        hp_residual = max(
            [0.0] + [abs(v - t) for v, t in zip(vals, fiber.target.targets)]
        )
        records.append(
            ClassRecord(rep, Q, tuple(rm.with_multiplicity()), hp_residual, reduced, len(orbit))
        )
    return records


@dataclass(frozen=True)
class CountReport:
    count: int
    bound: int
    equality: bool
    degenerate: bool
    incomplete: bool
    solutions: int  # total finite multiplicity mass
    diverged: int


def class_count_bound(germ_type: str, n: int) -> int:
    if germ_type == TYPE_II:
        return n ** (n - 3) if n >= 3 else 1
    return n ** (n - 2)


def count_classes(target: FiberTarget, cfg: SolverConfig = SolverConfig()) -> tuple[int, CountReport]:
    """Number of Z_n orbits of the fiber, checked against the type's bound."""
    fiber = solve_fiber(target, cfg)
    count = fiber.class_count
    bound = class_count_bound(target.germ_type, target.n)
    mass = sum(s.multiplicity for s in fiber.finite_solutions)
    report = CountReport(
        count, bound, count == bound, fiber.degenerate, fiber.incomplete, mass, fiber.diverged_count
    )
    return count, report


def _class_key(record: ClassRecord, germ_type: str) -> str:
    cfgn = Configuration(record.lambdas, "plane", delta=False)
    _, key = canonical_form(cfgn, germ_type)
    return key


def classes_for_target(
    target: FiberTarget, cfg: SolverConfig = SolverConfig(), permute: bool = False
) -> tuple[list[ClassRecord], list[Fiber]]:
    """Class records for a target; with permute=True the target tuple is taken
    as an unordered invariant (fibers of all distinct permutations are merged,
    deduplicated by configuration equivalence keys)."""
    if not permute:
        fiber = solve_fiber(target, cfg)
        return classes_from_fiber(fiber), [fiber]
    seen_targets = set()
    records: dict[str, ClassRecord] = {}
    fibers = []
    for perm in itertools.permutations(target.targets):
        if perm in seen_targets:
            continue
        seen_targets.add(perm)
        fiber = solve_fiber(FiberTarget(target.germ_type, target.n, perm), cfg)
        fibers.append(fiber)
        for rec in classes_from_fiber(fiber):
            key = _class_key(rec, target.germ_type)
            records.setdefault(key, rec)
    ordered = [records[k] for k in sorted(records)]
    return ordered, fibers


def fiber_to_dict(fiber: Fiber) -> dict:
    return {
        "type": fiber.target.germ_type,
        "n": fiber.target.n,
        "targets": [[z.real, z.imag] for z in fiber.target.targets],
        "bezout": fiber.bezout,
        "degenerate": fiber.degenerate,
        "degenerate_reasons": list(fiber.degenerate_reasons),
        "incomplete": fiber.incomplete,
        "path_failures": fiber.path_failures,
        "solutions": [
            {
                "kappa": [[c.real, c.imag] for c in s.kappa],
                "residual": None if math.isinf(s.residual) else s.residual,
                "multiplicity": s.multiplicity,
                "diverged": s.diverged,
            }
            for s in fiber.solutions
        ],
        "orbits": [list(o) for o in fiber.orbit_partition],
    }
