"""The Henry-Parusinski invariant of type II/III quasi-homogeneous germs.

Along each polar branch gamma of a germ f, f(gamma(s)) = c*s^h + ...; the
weights fix h (q*n on the y = 0 branch, p*q*n on the others), so the invariant
is carried by the leading coefficients alone:

    rho_0 = (-1)^n * lambda_1 ... lambda_n        (y = 0 branch, type III only)
    rho_l = prod_j (kappa_l - lambda_j)           (branches with kappa_l != 0)

i.e. rho_0 = Q(0) and rho_l = Q(kappa_l) for Q the slope polynomial.  Two
invariants agree when one is obtained from the other by the weighted scaling
(rho_0, rho_l) -> (rho_0 * xi^(qn), rho_l * xi^(pqn)) for some nonzero xi
(type III), or rho_l -> rho_l * xi^(qn) (type II, a full common scaling since
xi -> xi^(qn) is onto).

The rho data is the primary representation; the classical c-ratios
c_l = rho_l / rho_0 are derived for display only.  Comparisons assume germs
normalized to prod(lambda) = 1 (the package's canonical chart): a common
rescaling of lambda moves the weighted-scaling class when p > 1.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .poly import CANONICAL_GRID, DEFAULT_ATOL, DEFAULT_RTOL, canonical_sort_key, match_multisets
from .qhfunc import TYPE_I, TYPE_II, TYPE_III, QHFunction, commode_reduce, polar_curve, q_of_f


class UnsupportedGermType(ValueError):
    """HP invariants are not defined for reduced homogeneous (type I) germs."""


class IncomparableInvariants(ValueError):
    """Invariants with different (type, p, q, n) cannot be compared."""


@dataclass(frozen=True)
class HPInvariant:
    germ_type: str
    p: int
    q: int
    n: int
    rho0: complex | None  # present iff type III
    rhos: tuple[complex, ...]  # with multiplicity, nonzero kappa branches only

    @property
    def h_exponents(self) -> dict[str, int]:
        out = {"polar": self.p * self.q * self.n}
        if self.germ_type == TYPE_III:
            out["y_branch"] = self.q * self.n
        return out

    @property
    def c_ratios(self) -> tuple[complex, ...] | None:
        """Display wrapper c_l = rho_l / rho_0 (type III only)."""
        if self.germ_type != TYPE_III or self.rho0 in (None, 0):
            return None
        return tuple(r / self.rho0 for r in self.rhos)


def _tol(values) -> float:
    scale = max([1.0] + [abs(v) for v in values])
    return DEFAULT_ATOL + DEFAULT_RTOL * scale


def hp_invariant(f: QHFunction) -> HPInvariant:
    """Compute the invariant of a type II/III germ (commode part)."""
    if f.germ_type == TYPE_I:
        raise UnsupportedGermType("not defined for reduced homogeneous germs")
    g = commode_reduce(f)
    polar = polar_curve(g)
    rhos = []
    for br in polar.branches:
        prod = 1.0 + 0j
        for lam in g.lambdas:
            prod *= br.kappa - lam
        rhos.extend([prod] * br.multiplicity)
    rho0 = None
    if g.germ_type == TYPE_III:
        rho0 = 1.0 + 0j
        for lam in g.lambdas:
            rho0 *= -lam
    scale = max([1.0] + [abs(r) for r in rhos])
    rhos.sort(key=lambda z: canonical_sort_key(z, scale=scale))
    return HPInvariant(g.germ_type, g.weights.p, g.weights.q, g.n, rho0, tuple(rhos))


def _check_comparable(a: HPInvariant, b: HPInvariant):
    if (a.germ_type, a.p, a.q, a.n) != (b.germ_type, b.p, b.q, b.n):
        raise IncomparableInvariants(
            f"cannot compare ({a.germ_type}, p={a.p}, q={a.q}, n={a.n}) "
            f"with ({b.germ_type}, p={b.p}, q={b.q}, n={b.n})"
        )


def _split_zeros(values, tol):
    zeros = [v for v in values if abs(v) <= tol]
    nonzeros = [v for v in values if abs(v) > tol]
    return zeros, nonzeros


def _scaled_multiset_equal(u, v, tol) -> bool:
    """Exists s != 0 with v = s*u as multisets (zeros matched to zeros)."""
    zu, nu = _split_zeros(u, tol)
    zv, nv = _split_zeros(v, tol)
    if len(zu) != len(zv) or len(nu) != len(nv):
        return False
    if not nu:
        return True
    ref = max(nv, key=lambda z: (abs(z), -cmath.phase(z)))
    for a in nu:
        s = ref / a
        if match_multisets([s * z for z in nu], nv, tol * max(1.0, abs(s))) is not None:
            return True
    return False


def hp_equal(a: HPInvariant, b: HPInvariant) -> bool:
    """Equality modulo the weighted scaling action.

    Type II: b.rhos = s * a.rhos for some nonzero s.  Type III: normalizing
    rho_0 to 1 forces rho_l -> rho_l / rho_0^p with no residual ambiguity
    (any unit xi with xi^(qn) = 1 also has xi^(pqn) = 1), so the normalized
    multisets are compared directly.
    """
    _check_comparable(a, b)
    if len(a.rhos) != len(b.rhos):
        return False
    if a.germ_type == TYPE_II:
        return _scaled_multiset_equal(a.rhos, b.rhos, _tol(list(a.rhos) + list(b.rhos)))
    na = [r / a.rho0**a.p for r in a.rhos]
    nb = [r / b.rho0**b.p for r in b.rhos]
    return match_multisets(na, nb, _tol(na + nb)) is not None


def _normalize_by_max(values, tol):
    """Divide by a maximal element (modulus, then argument); modulus ties are
    resolved by minimizing the sorted result so the choice is scale-free."""
    mx = max(abs(z) for z in values)
    ties = [z for z in values if abs(z) >= mx * (1.0 - 1e-9)]
    best = None
    for w in ties:
        cand = sorted((z / w for z in values), key=canonical_sort_key)
        key = tuple(canonical_sort_key(z) for z in cand)
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def hp_canonical(a: HPInvariant, grid: float = CANONICAL_GRID):
    """Canonical tuple + hash key; keys are equal exactly when hp_equal.

    Degenerate invariants (some rho = 0) get a key prefixed by the
    zero-pattern instead of an error.
    """
    tol = _tol(list(a.rhos))
    zeros, nonzeros = _split_zeros(a.rhos, tol)
    prefix = f"z{len(zeros)}|" if zeros else ""
    if a.germ_type == TYPE_III:
        normalized = sorted((r / a.rho0**a.p for r in a.rhos), key=canonical_sort_key)
        rep = (1.0 + 0j, *normalized)
    else:
        if not nonzeros:
            rep = tuple(0j for _ in a.rhos)
        else:
            rep = tuple([0j] * len(zeros) + _normalize_by_max(nonzeros, tol))
    key = prefix + f"{a.germ_type}:{a.p}:{a.q}:{a.n}|" + ";".join(
        "%d,%d" % canonical_sort_key(z, grid) for z in rep
    )
    return rep, key


def scale_action(a: HPInvariant, xi: complex) -> HPInvariant:
    """Apply the weighted scaling with parameter xi to the invariant data."""
    if xi == 0:
        raise ValueError("scaling parameter must be nonzero")
    qn = xi ** (a.q * a.n)
    if a.germ_type == TYPE_II:
        return HPInvariant(a.germ_type, a.p, a.q, a.n, None, tuple(r * qn for r in a.rhos))
    pqn = xi ** (a.p * a.q * a.n)
    return HPInvariant(
        a.germ_type, a.p, a.q, a.n, a.rho0 * qn, tuple(r * pqn for r in a.rhos)
    )


def invariant_to_dict(a: HPInvariant) -> dict:
    return {
        "type": a.germ_type,
        "p": a.p,
        "q": a.q,
        "n": a.n,
        "rho0": None if a.rho0 is None else [a.rho0.real, a.rho0.imag],
        "rhos": [[r.real, r.imag] for r in a.rhos],
    }


def invariant_from_dict(d: dict) -> HPInvariant:
    rho0 = d.get("rho0")
    return HPInvariant(
        d["type"],
        int(d["p"]),
        int(d["q"]),
        int(d["n"]),
        None if rho0 is None else complex(rho0[0], rho0[1]),
        tuple(complex(re, im) for re, im in d["rhos"]),
    )
