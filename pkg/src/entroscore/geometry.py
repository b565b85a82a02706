"""Polyhedral convex domains and their first-order geometry.

A :class:`ConvexDomainSpec` describes a convex set K inside a finite measure
space: the probability simplex, the nonnegative orthant, the conical hull of
finitely many points, or an intersection of half-spaces (the empty
intersection doubles as the whole space).  On top of membership it answers
the direction-cone queries needed to probe subgradients:

* feasible directions at a point (``Cone(K - q)``), decided exactly from the
  active constraints;
* the lineality space ``O(q)`` of two-sided feasible directions;
* annihilators under the weighted pairing, and the algebraic quasi-interior
  test ``dim O(q) == dim(affine hull of K)``.

Lower-dimensional sets (the simplex) are treated relative to their affine
hull, so quasi-interior coincides with the relative interior there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog, nnls
from scipy.spatial import ConvexHull, QhullError

from .errors import ConstructionError, DomainError
from .measure import ConeVector, DualVector, MeasureSpace, pair

__all__ = [
    "ConvexDomainSpec",
    "SubgradientProbeResult",
    "RejectedCandidate",
    "direction_cone_membership",
    "lineality_space",
    "is_quasi_interior",
    "annihilator_basis",
    "subdifferential_probe",
]

SIMPLEX = "simplex"
ORTHANT = "nonnegative_orthant"
CONE_HULL = "cone_hull_of_points"
HALFSPACES = "halfspace_intersection"

_SV_TOL = 1e-10  # singular-value threshold for rank decisions
_MEMBER_TOL = 1e-9


def _null_space_basis(mat: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of ``mat``."""
    if mat.size == 0:
        return np.eye(dim)
    _, sv, vt = np.linalg.svd(mat, full_matrices=True)
    rank = int(np.sum(sv > _SV_TOL))
    return vt[rank:].T


@dataclass(frozen=True, eq=False)
class ConvexDomainSpec:
    """Finite-dimensional convex set with exact polyhedral constraint data.

    ``generators`` holds the rays of a conical hull; ``normals``/``offsets``
    hold half-space rows ``normal . x <= offset`` (plain coordinate dot
    product).  Only the fields relevant to ``kind`` are populated.
    """

    kind: str
    space: MeasureSpace
    generators: np.ndarray | None = None
    normals: np.ndarray | None = None
    offsets: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    # -- constructors -------------------------------------------------------

    @classmethod
    def simplex(cls, space: MeasureSpace) -> "ConvexDomainSpec":
        return cls(SIMPLEX, space)

    @classmethod
    def nonnegative_orthant(cls, space: MeasureSpace) -> "ConvexDomainSpec":
        return cls(ORTHANT, space)

    @classmethod
    def cone_hull(cls, space: MeasureSpace, points) -> "ConvexDomainSpec":
        g = np.atleast_2d(np.asarray(points, dtype=float))
        if g.shape[1] != space.size:
            raise ConstructionError("generator points do not match the space size")
        if g.shape[0] < 1:
            raise ConstructionError("a conical hull needs at least one generator")
        return cls(CONE_HULL, space, generators=g)

    @classmethod
    def halfspace_intersection(cls, space: MeasureSpace, normals, offsets) -> "ConvexDomainSpec":
        a = np.atleast_2d(np.asarray(normals, dtype=float))
        b = np.atleast_1d(np.asarray(offsets, dtype=float))
        if a.size == 0:
            a = np.zeros((0, space.size))
            b = np.zeros(0)
        if a.shape[1] != space.size or a.shape[0] != b.size:
            raise ConstructionError("half-space rows do not match the space size")
        return cls(HALFSPACES, space, normals=a, offsets=b)

    @classmethod
    def whole_space(cls, space: MeasureSpace) -> "ConvexDomainSpec":
        """Span of the densities: the empty half-space intersection."""
        return cls.halfspace_intersection(space, np.zeros((0, space.size)), np.zeros(0))

    # -- membership ---------------------------------------------------------

    def contains(self, q: ConeVector, tol: float = _MEMBER_TOL) -> bool:
        if q.space != self.space:
            return False
        v = q.values
        if self.kind == SIMPLEX:
            mass = math.fsum((v * self.space.weights).tolist())
            return bool(np.all(v >= -tol) and abs(mass - 1.0) <= max(tol, _MEMBER_TOL))
        if self.kind == ORTHANT:
            return bool(np.all(v >= -tol))
        if self.kind == HALFSPACES:
            if self.normals.shape[0] == 0:
                return True
            scale = 1.0 + float(np.max(np.abs(v)))
            return bool(np.all(self.normals @ v <= self.offsets + tol * scale))
        # conical hull: nonnegative least squares against the generators
        _, residual = nnls(self.generators.T, v)
        return residual <= tol * (1.0 + float(np.linalg.norm(v)))

    # -- sampling ------------------------------------------------------------

    def sample(self, rng: np.random.Generator, count: int = 1) -> list[ConeVector]:
        """Random points of the domain (interior-biased), for sampled checks."""
        n = self.space.size
        out: list[ConeVector] = []
        for _ in range(count):
            if self.kind == SIMPLEX:
                d = rng.dirichlet(np.ones(n))
                out.append(self.space.cone(d / self.space.weights))
            elif self.kind == ORTHANT:
                out.append(self.space.cone(rng.uniform(0.05, 2.0, size=n)))
            elif self.kind == CONE_HULL:
                coeff = rng.exponential(1.0, size=self.generators.shape[0])
                out.append(self.space.cone(coeff @ self.generators))
            elif self.kind == HALFSPACES and self.normals.shape[0] == 0:
                out.append(self.space.cone(rng.normal(0.0, 1.0, size=n)))
            else:
                raise DomainError(
                    "sampling a general half-space intersection is not supported"
                )
        return out

    # -- constraint views ----------------------------------------------------

    def _inequalities(self) -> tuple[np.ndarray, np.ndarray]:
        """Rows (a, b) with a . x <= b describing K (facets for cone hulls)."""
        if "ineq" not in self._cache:
            n = self.space.size
            if self.kind == SIMPLEX or self.kind == ORTHANT:
                a, b = -np.eye(n), np.zeros(n)
            elif self.kind == HALFSPACES:
                a, b = self.normals, self.offsets
            else:
                a = _cone_facets(self.generators)
                b = np.zeros(a.shape[0])
            self._cache["ineq"] = (a, b)
        return self._cache["ineq"]

    def _equalities(self) -> tuple[np.ndarray, np.ndarray]:
        """Rows (a, b) with a . x = b on all of K."""
        if "eq" not in self._cache:
            n = self.space.size
            if self.kind == SIMPLEX:
                a = self.space.weights.reshape(1, n)
                b = np.ones(1)
            elif self.kind == CONE_HULL:
                # the span complement of the generators pins the cone
                comp = _null_space_basis(self.generators, n)
                a, b = comp.T, np.zeros(comp.shape[1])
            elif self.kind == HALFSPACES:
                a, b = self._implicit_equalities()
            else:
                a, b = np.zeros((0, n)), np.zeros(0)
            self._cache["eq"] = (a, b)
        return self._cache["eq"]

    def _implicit_equalities(self) -> tuple[np.ndarray, np.ndarray]:
        """Half-space rows that hold with equality on the whole set (via LP)."""
        n = self.space.size
        rows, rhs = [], []
        for a, b in zip(self.normals, self.offsets):
            res = linprog(a, A_ub=self.normals, b_ub=self.offsets,
                          bounds=[(None, None)] * n, method="highs")
            if res.status == 2:
                raise ConstructionError("half-space intersection is empty")
            if res.status == 0 and res.fun >= b - 1e-9 * (1.0 + abs(b)):
                rows.append(a)
                rhs.append(b)
        if not rows:
            return np.zeros((0, n)), np.zeros(0)
        return np.array(rows), np.array(rhs)

    def affine_hull_dimension(self) -> int:
        """Dimension of the affine hull of K."""
        if "aff_dim" not in self._cache:
            n = self.space.size
            if self.kind == SIMPLEX:
                dim = n - 1
            elif self.kind == ORTHANT:
                dim = n
            elif self.kind == CONE_HULL:
                sv = np.linalg.svd(self.generators, compute_uv=False)
                dim = int(np.sum(sv > _SV_TOL))
            else:
                eq_rows, _ = self._equalities()
                if eq_rows.shape[0] == 0:
                    dim = n
                else:
                    sv = np.linalg.svd(eq_rows, compute_uv=False)
                    dim = n - int(np.sum(sv > _SV_TOL))
            self._cache["aff_dim"] = dim
        return self._cache["aff_dim"]


def _cone_facets(generators: np.ndarray) -> np.ndarray:
    """Facet normals F of a conical hull, as rows with F x <= 0 on the cone.

    Works in the linear span of the generators; a cone that fills its span
    has no facets there.  Facets are read off the convex hull of the origin
    and the normalized generators: exactly the hull facets through 0.
    """
    n = generators.shape[1]
    norms = np.linalg.norm(generators, axis=1)
    rays = generators[norms > _SV_TOL] / norms[norms > _SV_TOL, None]
    if rays.shape[0] == 0:
        return np.zeros((0, n))
    _, sv, vt = np.linalg.svd(rays, full_matrices=False)
    rank = int(np.sum(sv > _SV_TOL))
    span = vt[:rank].T                       # n x r, orthonormal
    coords = rays @ span                     # rays in span coordinates
    if rank == 1:
        if np.all(coords[:, 0] >= -_SV_TOL):
            return -span.T
        if np.all(coords[:, 0] <= _SV_TOL):
            return span.T
        return np.zeros((0, n))              # the cone is the whole line
    points = np.vstack([np.zeros(rank), coords])
    try:
        hull = ConvexHull(points)
    except QhullError as exc:                # pragma: no cover - rank guard above
        raise ConstructionError(f"cannot enumerate cone facets: {exc}") from exc
    facets = []
    for eq in hull.equations:                # rows (a, b): a . x + b <= 0 inside
        a, b = eq[:-1], eq[-1]
        if abs(b) <= 1e-9:
            facets.append(span @ a)
    if not facets:
        return np.zeros((0, n))
    return np.array(facets)


def _active_rows(domain: ConvexDomainSpec, q: ConeVector, tol: float) -> np.ndarray:
    a, b = domain._inequalities()
    if a.shape[0] == 0:
        return a
    scale = 1.0 + float(np.max(np.abs(q.values)))
    slack = b - a @ q.values
    return a[slack <= tol * scale]


def direction_cone_membership(
    domain: ConvexDomainSpec, q: ConeVector, d: ConeVector, tol: float = _MEMBER_TOL
) -> bool:
    """Whether ``q + lam * d`` stays in K for some ``lam > 0``.

    Decided exactly from the constraints: the direction must not leave any
    active inequality and must be parallel to every equality.
    """
    if not domain.contains(q, tol):
        raise DomainError("base point is not in the domain")
    scale = 1.0 + float(np.max(np.abs(d.values)))
    active = _active_rows(domain, q, tol)
    if active.shape[0] and np.any(active @ d.values > tol * scale):
        return False
    eq_rows, _ = domain._equalities()
    if eq_rows.shape[0] and np.any(np.abs(eq_rows @ d.values) > tol * scale):
        return False
    return True


def lineality_space(domain: ConvexDomainSpec, q: ConeVector, tol: float = _MEMBER_TOL) -> list[ConeVector]:
    """Orthonormal basis of ``O(q)``, the two-sided feasible directions at q.

    A direction is two-sided exactly when it is orthogonal to every active
    inequality row and every equality row, so the basis is the null space of
    the stacked active constraints.
    """
    if not domain.contains(q, tol):
        raise DomainError("base point is not in the domain")
    active = _active_rows(domain, q, tol)
    eq_rows, _ = domain._equalities()
    stacked = np.vstack([active, eq_rows]) if (active.size or eq_rows.size) else np.zeros((0, domain.space.size))
    basis = _null_space_basis(stacked, domain.space.size)
    return [domain.space.cone(basis[:, j]) for j in range(basis.shape[1])]


def is_quasi_interior(domain: ConvexDomainSpec, q: ConeVector, tol: float = _MEMBER_TOL) -> bool:
    """Algebraic quasi-interior test, relative to the affine hull of K.

    ``q`` qualifies when its two-sided direction space O(q) fills the affine
    hull's direction space, i.e. the annihilator of O(q) within that hull is
    trivial.  In finite dimensions this is the relative interior of K.
    """
    return len(lineality_space(domain, q, tol)) == domain.affine_hull_dimension()


def annihilator_basis(
    vectors: Sequence[ConeVector], space: MeasureSpace | None = None
) -> list[DualVector]:
    """Orthonormal basis of ``{f : pair(v, f) = 0 for every input v}``.

    Computed by rank factorization of the pairing matrix with singular-value
    threshold 1e-10.  The annihilator of the empty collection is the full
    dual space.
    """
    vectors = list(vectors)
    if space is None:
        if not vectors:
            raise ConstructionError("pass a space to take the annihilator of nothing")
        space = vectors[0].space
    if not vectors:
        basis = np.eye(space.size)
    else:
        stacked = np.array([v.values for v in vectors])
        basis = _null_space_basis(stacked * space.weights, space.size)
    return [space.dual(basis[:, j]) for j in range(basis.shape[1])]


# -- subgradient probing -----------------------------------------------------


@dataclass(frozen=True)
class RejectedCandidate:
    """A candidate subgradient together with a point where it fails."""

    candidate: DualVector
    witness: ConeVector
    gap: float

    def as_dict(self) -> dict:
        return {
            "candidate": self.candidate.values.tolist(),
            "witness": self.witness.values.tolist(),
            "gap": float(self.gap),
        }


@dataclass(frozen=True)
class SubgradientProbeResult:
    """Outcome of sampled subgradient verification at one base point."""

    verified: list[DualVector]
    rejected: list[RejectedCandidate]
    unique_claim: bool

    def as_dict(self) -> dict:
        return {
            "verified": [f.values.tolist() for f in self.verified],
            "rejected": [r.as_dict() for r in self.rejected],
            "unique_claim": self.unique_claim,
        }


def _structured_points(domain: ConvexDomainSpec, q: ConeVector) -> list[ConeVector]:
    """Perturbations of q along coordinate-type directions, kept inside K."""
    space = domain.space
    n = space.size
    dirs: list[np.ndarray] = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        dirs.extend([e, -e])
    w = space.weights
    for i in range(n):
        for j in range(i + 1, n):
            d = np.zeros(n)
            d[i], d[j] = 1.0 / w[i], -1.0 / w[j]
            dirs.extend([d, -d])
    points = []
    for d in dirs:
        for eps in (1e-3, 1e-2, 0.1, 0.5):
            p = space.cone(q.values + eps * d)
            if domain.contains(p):
                points.append(p)
    return points


def _feasible_probe_directions(
    domain: ConvexDomainSpec,
    q: ConeVector,
    points: Sequence[ConeVector],
    rng: np.random.Generator,
    num_random: int,
) -> list[ConeVector]:
    space = domain.space
    n = space.size
    cands: list[ConeVector] = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        cands.append(space.cone(e))
        cands.append(space.cone(-e))
    for p in points[: 4 * n]:
        d = p - q
        if float(np.max(np.abs(d.values))) > 1e-12:
            cands.append(d)
    for basis_vec in lineality_space(domain, q):
        cands.append(basis_vec)
        cands.append(-basis_vec)
    for p in domain.sample(rng, num_random):
        d = p - q
        if float(np.max(np.abs(d.values))) > 1e-12:
            cands.append(d)
    return [d for d in cands if direction_cone_membership(domain, q, d)]


def _violation_witness(entropy, domain, q, candidate, direction, ineq_tol):
    """Walk down the ray q + lam*d looking for a concrete inequality breach."""
    base = entropy.value(q)
    rate = pair(direction, candidate)
    scale = (1.0 + float(np.max(np.abs(q.values)))) / (1.0 + float(np.max(np.abs(direction.values))))
    best_p, best_gap = None, np.inf
    lam = scale
    for _ in range(40):
        p = q + lam * direction
        if domain.contains(p):
            try:
                gap = entropy.value(p) - base - lam * rate
            except DomainError:
                gap = np.inf
            if gap < best_gap:
                best_p, best_gap = p, gap
        lam *= 0.5
    return best_p, best_gap


def subdifferential_probe(
    entropy,
    domain: ConvexDomainSpec,
    q: ConeVector,
    candidates: Sequence[DualVector],
    *,
    seed: int = 0,
    num_points: int = 200,
    num_directions: int = 32,
    ineq_tol: float = 1e-9,
    deriv_tol: float = 1e-6,
    fd_step: float = 1e-5,
    direction_sampler: Callable[[np.random.Generator, int], Sequence[ConeVector]] | None = None,
) -> SubgradientProbeResult:
    """Sampled verification of candidate subgradients of ``entropy`` at ``q``.

    Each candidate f is screened two ways:

    * the supporting-hyperplane inequality ``value(p) >= value(q) +
      pair(p - q, f)`` over sampled points of K (plus coordinate-type
      perturbations of q, which catch boundary subdifferential facets);
    * the one-sided derivative bound ``pair(d, f) <= d+ value(q; d)`` along
      sampled feasible directions.  A derivative breach is converted into a
      concrete violating point by walking down the offending ray.

    ``unique_claim`` is set when q is quasi-interior (relative to the affine
    hull of K) and every verified candidate matches the two-sided directional
    derivative on the sampled lineality directions - the sampled version of
    the equality condition under which the subgradient is unique.  The claim
    certifies sampled directions only.
    """
    from .entropies import directional_derivative_fd

    if not domain.contains(q):
        raise DomainError("probe base point is not in the domain")
    rng = np.random.default_rng(seed)
    points = _structured_points(domain, q) + domain.sample(rng, num_points)
    directions = _feasible_probe_directions(domain, q, points, rng, num_directions)
    if direction_sampler is not None:
        extra = [d for d in direction_sampler(rng, num_directions)
                 if direction_cone_membership(domain, q, d)]
        directions.extend(extra)

    base_value = entropy.value(q)
    fd_cache: dict[int, float] = {}

    def right_derivative(idx: int) -> float:
        if idx not in fd_cache:
            try:
                fd_cache[idx] = directional_derivative_fd(entropy, q, directions[idx], h=fd_step)
            except DomainError:
                fd_cache[idx] = np.inf  # direction unusable: never flags a violation
        return fd_cache[idx]

    verified: list[DualVector] = []
    rejected: list[RejectedCandidate] = []
    for cand in candidates:
        worst_p, worst_gap = None, np.inf
        for p in points:
            try:
                gap = entropy.value(p) - base_value - pair(p - q, cand)
            except DomainError:
                continue
            if gap < worst_gap:
                worst_p, worst_gap = p, gap
        scale = 1.0 + abs(base_value)
        if worst_gap < -ineq_tol * scale:
            rejected.append(RejectedCandidate(cand, worst_p, float(worst_gap)))
            continue
        breach = None
        for di, d in enumerate(directions):
            fd = right_derivative(di)
            if pair(d, cand) > fd + deriv_tol:
                breach = d
                break
        if breach is not None:
            witness, gap = _violation_witness(entropy, domain, q, cand, breach, ineq_tol)
            if witness is None:
                witness, gap = q + breach, float("nan")
            rejected.append(RejectedCandidate(cand, witness, float(gap)))
        else:
            verified.append(cand)

    unique = False
    if verified and is_quasi_interior(domain, q):
        basis = lineality_space(domain, q)
        two_sided = []
        for v in basis:
            two_sided.extend([v, -v])
        if len(basis) > 1:
            for _ in range(8):
                coeff = rng.normal(size=len(basis))
                coeff /= np.linalg.norm(coeff)
                combo = domain.space.cone(
                    np.sum([c * v.values for c, v in zip(coeff, basis)], axis=0)
                )
                two_sided.extend([combo, -combo])
        unique = True
        for cand in verified:
            for d in two_sided:
                try:
                    fd = directional_derivative_fd(entropy, q, d, h=fd_step)
                except DomainError:
                    unique = False
                    break
                if not math.isfinite(fd) or abs(pair(d, cand) - fd) > deriv_tol:
                    unique = False
                    break
            if not unique:
                break
    return SubgradientProbeResult(verified, rejected, unique)
