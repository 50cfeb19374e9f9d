"""Dynamics criteria on resolution dual graphs.

Corner data holds the moduli of the eigenvalues of the induced maps on the
two branches through an intersection point, together with the vanishing
orders of the maximal ideal along the two components.  All sign tests on
rational moduli are done multiplicatively with integer exponents, so no
logarithms and no tolerance drift enter in exact mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from gmpy2 import mpq

from .dual_graph import DualGraphDocument
from .errors import GraphStructureError
from .scalars import FLOAT_TOLERANCE


def _is_exact_modulus(value) -> bool:
    return not isinstance(value, float)


@dataclass(frozen=True)
class CornerData:
    """One intersection point of two components with its eigenvalue moduli."""

    edge: tuple[int, int]
    mod_lambda: object  # |dF| along the first component at the corner
    mod_mu: object  # |dF| along the second component
    a_e: int = 1  # vanishing order of the maximal ideal on the first component
    a_e_prime: int = 1

    def __post_init__(self):
        if self.a_e < 1 or self.a_e_prime < 1:
            raise ValueError("vanishing orders must be positive integers")
        for value in (self.mod_lambda, self.mod_mu):
            if _is_exact_modulus(value):
                if mpq(value) <= 0:
                    raise ValueError("eigenvalue moduli must be positive")
            elif value <= 0.0:
                raise ValueError("eigenvalue moduli must be positive")


def corner_inequality(corner: CornerData, tol: float = FLOAT_TOLERANCE) -> bool:
    """log|lambda|/a_E + log|mu|/a_E' < 0, decided exactly on rational moduli.

    Clearing denominators, the test is |lambda|^(a_E') * |mu|^(a_E) < 1.
    """
    lam, mu = corner.mod_lambda, corner.mod_mu
    if _is_exact_modulus(lam) and _is_exact_modulus(mu):
        return mpq(lam) ** corner.a_e_prime * mpq(mu) ** corner.a_e < 1
    total = math.log(float(lam)) / corner.a_e + math.log(float(mu)) / corner.a_e_prime
    return total < -tol


@dataclass(frozen=True)
class CycleCertificate:
    """Machine form of the impossibility of a cycle of hyperbolic components.

    Under the hyperbolic matching lambda_j = 1/mu_{j-1}, the weighted sum of
    log-moduli around the cycle telescopes to zero, so the per-corner strict
    inequalities cannot all hold: their sum would be negative, not zero.
    """

    corners: tuple[CornerData, ...]
    exponent_scale: int
    telescoping_product: object  # == 1 exactly in exact mode
    sum_is_zero: bool
    infeasible: bool = True

    @property
    def corner_count(self) -> int:
        return len(self.corners)


def cycle_obstruction(corners, tol: float = FLOAT_TOLERANCE) -> CycleCertificate:
    """Certificate that corner inequalities are infeasible around a cycle.

    `corners[j]` joins components (E_j, E_{j+1}) cyclically; mod_lambda is the
    multiplier along E_j, mod_mu along E_{j+1}; a_e / a_e_prime are the
    corresponding vanishing orders.  Preconditions checked: consecutive
    corners agree on the shared component's order, and the hyperbolic
    matching lambda_j * mu_{j-1} = 1 holds.
    """
    corners = tuple(corners)
    n = len(corners)
    if n == 0:
        raise ValueError("a cycle needs at least one corner")
    exact = all(
        _is_exact_modulus(c.mod_lambda) and _is_exact_modulus(c.mod_mu) for c in corners
    )
    for j, c in enumerate(corners):
        prev = corners[(j - 1) % n]
        if c.a_e != prev.a_e_prime:
            raise ValueError(
                f"corner {j} order a_e={c.a_e} disagrees with the previous corner's "
                f"a_e_prime={prev.a_e_prime} on the shared component"
            )
        if exact:
            if mpq(c.mod_lambda) * mpq(prev.mod_mu) != 1:
                raise ValueError(
                    f"hyperbolic matching violated at corner {j}: "
                    "lambda_j * mu_(j-1) != 1"
                )
        else:
            if abs(float(c.mod_lambda) * float(prev.mod_mu) - 1.0) > tol:
                raise ValueError(f"hyperbolic matching violated at corner {j}")
    scale = math.lcm(*(c.a_e for c in corners))
    if exact:
        product = mpq(1)
        for c in corners:
            product *= mpq(c.mod_lambda) ** (scale // c.a_e)
            product *= mpq(c.mod_mu) ** (scale // c.a_e_prime)
        zero = product == 1
    else:
        total = 0.0
        for c in corners:
            total += math.log(float(c.mod_lambda)) / c.a_e
            total += math.log(float(c.mod_mu)) / c.a_e_prime
        product = math.exp(total * scale)
        zero = abs(total) <= tol
    return CycleCertificate(
        corners=corners,
        exponent_scale=scale,
        telescoping_product=product,
        sum_is_zero=zero,
    )


# ---------------------------------------------------------------------------
# hyperbolicity propagation


class VertexLabel(Enum):
    HYPERBOLIC = "hyperbolic"
    NON_HYPERBOLIC = "non-hyperbolic"
    FINITE_ORDER = "finite-order"


@dataclass(frozen=True)
class CornerOrientation:
    """One corner with its contracting side (the component farther from the center)."""

    edge: tuple[int, int]  # (closer vertex, farther vertex)
    contracting: int
    center_side: bool  # the closer side is the center itself (modulus one there)


@dataclass(frozen=True)
class HyperbolicityLabeling:
    center: int
    labels: tuple[tuple[int, VertexLabel], ...]
    corners: tuple[CornerOrientation, ...]
    distances: tuple[tuple[int, int], ...]

    def label_of(self, vid: int) -> VertexLabel:
        for v, lab in self.labels:
            if v == vid:
                return lab
        raise KeyError(vid)


def propagate_hyperbolicity(
    graph: DualGraphDocument, center: int, center_finite_order: bool = False
) -> HyperbolicityLabeling:
    """Label every non-central component hyperbolic, orienting each corner.

    Walks outward from the center by graph distance.  Fails when the graph is
    not a tree, when the center is missing, or when some non-central vertex
    has degree >= 3 (a hyperbolic map of the sphere has exactly two fixed
    points, so the complement of the center must decompose into chains).
    """
    ids = {v.id for v in graph.vertices}
    if center not in ids:
        raise GraphStructureError(f"center {center} is not a vertex")
    if not graph.is_connected():
        raise GraphStructureError("graph must be connected")
    if not graph.is_tree():
        raise GraphStructureError(
            "graph contains a cycle (or multi-edge): hyperbolicity cannot propagate"
        )
    adj = graph.adjacency()
    dist = {center: 0}
    order = [center]
    frontier = [center]
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
                    order.append(w)
        frontier = nxt
    labels = []
    for v in graph.vertices:
        if v.id == center:
            labels.append(
                (v.id, VertexLabel.FINITE_ORDER if center_finite_order else VertexLabel.NON_HYPERBOLIC)
            )
            continue
        if graph.degree(v.id) >= 3:
            raise GraphStructureError(
                f"non-central vertex {v.id} has degree >= 3; a hyperbolic map "
                "has only two fixed points, so branches may meet only at the center"
            )
        if v.genus != 0:
            raise GraphStructureError(
                f"non-central vertex {v.id} has genus {v.genus}; hyperbolic "
                "components are rational"
            )
        closer = [w for w in adj[v.id] if dist[w] < dist[v.id]]
        if len(closer) != 1:
            raise GraphStructureError(
                f"vertex {v.id} has {len(closer)} neighbors nearer the center; "
                "the descent direction must be unique"
            )
        labels.append((v.id, VertexLabel.HYPERBOLIC))
    corners = []
    for a, b in graph.edges:
        closer, farther = (a, b) if dist[a] < dist[b] else (b, a)
        corners.append(
            CornerOrientation(
                edge=(closer, farther),
                contracting=farther,
                center_side=(closer == center),
            )
        )
    return HyperbolicityLabeling(
        center=center,
        labels=tuple(labels),
        corners=tuple(corners),
        distances=tuple(sorted(dist.items())),
    )


# ---------------------------------------------------------------------------
# central component


@dataclass(frozen=True)
class CentralVerdict:
    accepted: bool
    note: str
    requires_chain: bool = False


def central_component_check(genus: int, is_finite_order: bool) -> CentralVerdict:
    """A non-rational central component must act with finite order.

    A genus-0 center of infinite (non-hyperbolic) order is accepted, but then
    the whole configuration must be a chain of rational curves: a rotation or
    translation of infinite order has at most two periodic points.
    """
    if genus >= 1 and not is_finite_order:
        return CentralVerdict(
            accepted=False,
            note="a central component of positive genus must act with finite order",
        )
    if genus == 0 and not is_finite_order:
        return CentralVerdict(
            accepted=True,
            note="infinite-order non-hyperbolic action on a rational center: "
            "the exceptional locus must itself be a chain of rational curves",
            requires_chain=True,
        )
    return CentralVerdict(accepted=True, note="finite-order central action")
