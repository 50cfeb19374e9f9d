"""End-to-end classification of a contracting automorphism from its
resolution data: the exceptional configuration is contracted to its minimal
negative model; a segment of rational curves yields a cyclic quotient
singularity with the congruence case analysis of the lifted germ; a
star-shaped configuration yields a weighted-homogeneous singularity whose
central curve carries an orbifold structure marked by the leg chains and a
negative-degree orbibundle.  The orbit-space surface follows from the variant
and the geometrization type of the base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from gmpy2 import mpq

from .dual_graph import (
    CyclicQuotientData,
    DualGraphDocument,
    GraphShape,
    chain_weights,
    hj_fold,
    minimal_negative_model,
    shape,
)
from .errors import ClassificationError, GraphStructureError, NotEquivariantError
from .graph_dynamics import (
    CornerData,
    CycleCertificate,
    central_component_check,
    cycle_obstruction,
    propagate_hyperbolicity,
)
from .jets import DiagonalGroup, Jet, check_commutes
from .normal_forms import (
    HJGermCase,
    HJGermKind,
    NormalFormResult,
    classify_hj_germ,
    poincare_dulac,
    refine_hj_germ_kind,
)
from .orbifold import (
    OrbibundleData,
    OrbifoldSurface,
    OrbifoldType,
    SmoothCoverData,
    classify_orbifold,
    orbidegree,
    smooth_cover_data,
)
from .scalars import EXACT, FLOAT_TOLERANCE, scalar_is_zero

# ---------------------------------------------------------------------------
# input document


@dataclass(frozen=True)
class GermData:
    """Optional lift of the automorphism near a cyclic quotient point."""

    group: DiagonalGroup
    k_twist: int = 1
    jet: Jet | None = None


@dataclass(frozen=True)
class BundleSpec:
    """Caller-supplied orbibundle numbers: the background degree is not
    derivable from the graph, so it is required input in the central case."""

    background_degree: int
    local_invariants: tuple[tuple[int, int], ...] | None = None


@dataclass(frozen=True)
class AdmissibleDataDocument:
    graph: DualGraphDocument
    germ: GermData | None = None
    bundle: BundleSpec | None = None

    def to_json_dict(self) -> dict:
        doc = {"graph": self.graph.to_json_dict()}
        if self.germ is not None:
            germ = {
                "group": self.germ.group.to_json_dict(),
                "k_twist": self.germ.k_twist,
            }
            if self.germ.jet is not None:
                germ["jet"] = self.germ.jet.to_json_dict()
            doc["germ"] = germ
        if self.bundle is not None:
            bundle = {"e": self.bundle.background_degree}
            if self.bundle.local_invariants is not None:
                bundle["local"] = [[m, b] for m, b in self.bundle.local_invariants]
            doc["bundle"] = bundle
        return doc

    @classmethod
    def from_json_dict(cls, obj: dict, mode: str = EXACT) -> "AdmissibleDataDocument":
        graph = DualGraphDocument.from_json_dict(obj["graph"])
        germ = None
        if "germ" in obj and obj["germ"]:
            g = obj["germ"]
            germ = GermData(
                group=DiagonalGroup.from_json_dict(g["group"]),
                k_twist=int(g.get("k_twist", 1)),
                jet=Jet.from_json_dict(g["jet"], mode) if "jet" in g else None,
            )
        bundle = None
        if "bundle" in obj and obj["bundle"]:
            b = obj["bundle"]
            bundle = BundleSpec(
                background_degree=int(b["e"]),
                local_invariants=tuple((int(m), int(x)) for m, x in b["local"])
                if "local" in b
                else None,
            )
        return cls(graph=graph, germ=germ, bundle=bundle)


# ---------------------------------------------------------------------------
# classification output


class ClassificationKind(Enum):
    CYCLIC_QUOTIENT = "cyclic-quotient"
    WEIGHTED_HOMOGENEOUS = "weighted-homogeneous"


@dataclass(frozen=True)
class ProvenanceStep:
    step: str
    theorem: str
    quote: str

    def to_json_dict(self) -> dict:
        return {"step": self.step, "theorem": self.theorem, "quote": self.quote}


@dataclass(frozen=True)
class CyclicQuotientResult:
    quotient: CyclicQuotientData  # canonical representative
    as_read: CyclicQuotientData  # chain read from the lower-id end
    germ_case: HJGermCase | None
    germ_kind: HJGermKind | None
    normal_form: NormalFormResult | None


@dataclass(frozen=True)
class WeightedHomogeneousResult:
    base: OrbifoldSurface
    geometry: OrbifoldType
    bundle: OrbibundleData
    degree: mpq
    twist_order: int
    leg_data: tuple[CyclicQuotientData, ...]
    cover: SmoothCoverData


@dataclass(frozen=True)
class Classification:
    kind: ClassificationKind
    cyclic: CyclicQuotientResult | None
    weighted: WeightedHomogeneousResult | None
    minimal_model: DualGraphDocument
    provenance: tuple[ProvenanceStep, ...]

    def to_json_dict(self) -> dict:
        doc: dict = {"kind": self.kind.value}
        if self.cyclic is not None:
            c = self.cyclic
            doc["cyclic_quotient"] = {
                "m": c.quotient.m,
                "q": c.quotient.q,
                "q_as_read": c.as_read.q,
                "germ_case": c.germ_case.case_label if c.germ_case else None,
                "germ_kind": c.germ_kind.value if c.germ_kind else None,
            }
        if self.weighted is not None:
            w = self.weighted
            doc["weighted_homogeneous"] = {
                "base": w.base.to_json_dict(),
                "geometry": w.geometry.value,
                "orbidegree": str(w.degree),
                "twist_order": w.twist_order,
                "legs": [[d.m, d.q] for d in w.leg_data],
                "smooth_cover": {
                    "degree": w.cover.degree,
                    "genus": w.cover.covered_genus,
                },
            }
        return doc


# ---------------------------------------------------------------------------
# the pipeline


class CycleObstructionError(ClassificationError):
    """Raised when the exceptional configuration is a cycle of rational
    curves; carries the telescoping certificate when corner data is given."""

    def __init__(self, message: str, certificate: CycleCertificate | None = None):
        super().__init__(message)
        self.certificate = certificate


def _step(step: str, theorem: str, quote: str) -> ProvenanceStep:
    return ProvenanceStep(step, theorem, quote)


def _cycle_corners_from_dynamics(model: DualGraphDocument) -> list[CornerData] | None:
    dyn = model.dynamics
    if dyn is None or not dyn.corners:
        return None
    order = [v.id for v in model.vertices]
    adj = model.adjacency()
    # walk the cycle
    start = order[0]
    walk = [start]
    prev = None
    current = start
    while True:
        nxt = [u for u in adj[current] if u != prev]
        if not nxt:
            return None
        prev, current = current, nxt[0]
        if current == start:
            break
        walk.append(current)
        if len(walk) > len(order):
            return None
    lookup = {}
    for c in dyn.corners:
        lookup[(c.edge[0], c.edge[1])] = (c.mod_lambda, c.mod_mu)
        lookup[(c.edge[1], c.edge[0])] = (c.mod_mu, c.mod_lambda)
    corners = []
    n = len(walk)
    for j in range(n):
        a, b = walk[j], walk[(j + 1) % n]
        if (a, b) not in lookup:
            return None
        lam, mu = lookup[(a, b)]
        va, vb = model.vertex(a), model.vertex(b)
        corners.append(
            CornerData(
                edge=(a, b),
                mod_lambda=lam,
                mod_mu=mu,
                a_e=va.vanishing_order or 1,
                a_e_prime=vb.vanishing_order or 1,
            )
        )
    return corners


def _legs_from_center(model: DualGraphDocument, center: int):
    """Chains hanging off the center, each as a list of vertex ids walking outward."""
    adj = model.adjacency()
    legs = []
    for first in sorted(adj[center]):
        leg = [first]
        prev = center
        current = first
        while True:
            nxt = [u for u in adj[current] if u != prev]
            if not nxt:
                break
            prev, current = current, nxt[0]
            leg.append(current)
        legs.append(leg)
    return legs


def classify_singularity(
    doc: AdmissibleDataDocument,
    order: int = 12,
    tol: float = FLOAT_TOLERANCE,
) -> Classification:
    """Run the full decision pipeline on one admissible-data document."""
    provenance: list[ProvenanceStep] = []
    graph = doc.graph
    if not graph.is_connected():
        raise GraphStructureError("exceptional configuration must be connected")

    model = minimal_negative_model(graph)
    provenance.append(
        _step(
            "minimal-model",
            "negative-definite-contraction",
            "all (-1) rational chain components contracted; the intersection "
            "form is negative definite, so the configuration contracts to a "
            "normal surface singularity",
        )
    )
    sh = shape(model)

    if sh.shape is GraphShape.CYCLE:
        corners = _cycle_corners_from_dynamics(model)
        certificate = cycle_obstruction(corners) if corners else None
        raise CycleObstructionError(
            "a cycle of rational curves cannot support hyperbolic dynamics on "
            "every component: the weighted log-moduli around the cycle "
            "telescope to zero, contradicting the strict corner inequalities",
            certificate=certificate,
        )
    if sh.shape is GraphShape.GENERAL_TREE:
        raise ClassificationError(
            "two branch vertices: at most one component can fail to be "
            "hyperbolic, so the dual graph must be a segment or a star"
        )
    if sh.shape is GraphShape.OTHER:
        raise ClassificationError(
            "unsupported dual graph shape (loops or non-tree structure)"
        )

    # locate the non-hyperbolic center, if any
    dyn = model.dynamics
    candidates: dict[int, str] = {}
    if dyn is not None and dyn.center is not None:
        if dyn.center not in {v.id for v in model.vertices}:
            raise ClassificationError(
                f"declared center {dyn.center} was contracted away or never existed"
            )
        candidates[dyn.center] = "declared"
    for v in model.vertices:
        if v.genus >= 1:
            candidates.setdefault(v.id, "positive genus forces a non-hyperbolic action")
    if sh.shape is GraphShape.STAR_SHAPED:
        candidates.setdefault(sh.center, "branch vertex of the star")
    if len(candidates) > 1:
        raise ClassificationError(
            f"multiple non-hyperbolic centers {sorted(candidates)}: "
            "the non-hyperbolic component is unique"
        )

    if not candidates:
        # pure chain of rational curves
        return _classify_chain(doc, model, provenance, order, tol)

    (center, reason), = candidates.items()
    return _classify_central(doc, model, center, reason, provenance, sh, order, tol)


def _classify_chain(doc, model, provenance, order, tol) -> Classification:
    vs = model.vertices
    if len(vs) == 1 and vs[0].genus == 0 and vs[0].self_intersection == -1:
        # a single (-1)-curve contracts to a smooth point
        weights = [1]
        as_read = CyclicQuotientData(1, 0)
    else:
        weights = chain_weights(model)
        as_read = hj_fold(weights)
    canonical = as_read.canonical()
    provenance.append(
        _step(
            "chain-fold",
            "cyclic-quotient-from-chain",
            f"segment of rational curves with weights {weights} contracts to "
            f"the cyclic quotient of type ({as_read.m}, {as_read.q}); reading "
            f"the chain backwards gives ({as_read.m}, {as_read.dual().q})",
        )
    )
    germ_case = None
    germ_kind = None
    normal_form = None
    m = canonical.m
    if doc.germ is not None:
        group = doc.germ.group
        k = doc.germ.k_twist
        if group.dim != 2:
            raise ClassificationError("cyclic-quotient germ data must be 2-dimensional")
        if group.order != m:
            raise ClassificationError(
                f"germ group order {group.order} does not match the chain type m={m}"
            )
        q_germ = _normalized_weight_ratio(group)
        if m > 1 and q_germ not in {as_read.q, as_read.dual().q}:
            raise ClassificationError(
                f"germ group weight ratio {q_germ} matches neither chain "
                f"orientation ({as_read.q} or {as_read.dual().q})"
            )
        germ_case = classify_hj_germ(m, q_germ if m > 1 else 0, k)
        if not germ_case.feasible:
            raise ClassificationError(
                f"no contracting germ can satisfy the commutation congruences "
                f"for (m, q, k) = ({m}, {q_germ}, {k})"
            )
        germ_kind = germ_case.kind
        if doc.germ.jet is not None:
            jet = doc.germ.jet
            if not check_commutes(jet, group, k).is_zero(tol):
                raise NotEquivariantError(
                    "supplied germ does not commute with the group to the stated twist"
                )
            _validate_linear_shape(jet, germ_case, tol)
            run_order = min(order, jet.order)
            normal_form = poincare_dulac(jet, group, k, run_order, tol)
            germ_kind = refine_hj_germ_kind(germ_case, normal_form.normal_form, tol)
        provenance.append(
            _step(
                "germ-case",
                "equivariant-germ-congruences",
                f"commutation with the diagonal group action of order {m} "
                f"forces case ({germ_case.case_label}): {germ_case.linear_constraint}",
            )
        )
    else:
        germ_case = classify_hj_germ(m, canonical.q if m > 1 else 0, 1)
        germ_kind = germ_case.kind
        provenance.append(
            _step(
                "germ-case",
                "equivariant-germ-congruences",
                "no germ supplied; congruence case computed from the chain "
                f"data with trivial twist: case ({germ_case.case_label})",
            )
        )
    cyclic = CyclicQuotientResult(
        quotient=canonical,
        as_read=as_read,
        germ_case=germ_case,
        germ_kind=germ_kind,
        normal_form=normal_form,
    )
    return Classification(
        kind=ClassificationKind.CYCLIC_QUOTIENT,
        cyclic=cyclic,
        weighted=None,
        minimal_model=model,
        provenance=tuple(provenance),
    )


def _normalized_weight_ratio(group: DiagonalGroup) -> int:
    """Weights (q1, q2) normalized to the standard form (1, q): q = q2/q1 mod p."""
    p = group.order
    if p == 1:
        return 0
    q1, q2 = group.weights
    if math.gcd(q1, p) != 1 or math.gcd(q2, p) != 1:
        raise ClassificationError(
            "group weights must each be invertible modulo the order for the "
            "quotient to be an isolated cyclic quotient point"
        )
    return (q2 * pow(q1, -1, p)) % p


def _validate_linear_shape(jet: Jet, case: HJGermCase, tol: float) -> None:
    mat = jet.linear_matrix()
    zero_tol = 0.0 if jet.mode == EXACT else tol
    diag_ok = scalar_is_zero(mat[0][1], zero_tol) and scalar_is_zero(mat[1][0], zero_tol)
    anti_ok = scalar_is_zero(mat[0][0], zero_tol) and scalar_is_zero(mat[1][1], zero_tol)
    if case.case_label == "b" and not diag_ok:
        raise ClassificationError(
            "case (b) requires a diagonal linear part (off-diagonal entries vanish)"
        )
    if case.case_label == "c" and not anti_ok:
        raise ClassificationError(
            "case (c) requires an anti-diagonal linear part (diagonal entries vanish)"
        )


def _classify_central(doc, model, center, reason, provenance, sh, order, tol) -> Classification:
    center_vertex = model.vertex(center)
    dyn = model.dynamics
    declared_finite = dyn.finite_order if dyn is not None else None
    if declared_finite is None:
        finite_order = True
        provenance.append(
            _step(
                "central-order",
                "finite-order-inference",
                "no finite-order flag declared; a non-hyperbolic action on the "
                "central component of a star must have finite order, so it is "
                "inferred to be finite",
            )
        )
    else:
        finite_order = declared_finite
    verdict = central_component_check(center_vertex.genus, finite_order)
    if not verdict.accepted:
        raise ClassificationError(verdict.note)
    if verdict.requires_chain:
        if sh.shape is not GraphShape.CHAIN:
            raise ClassificationError(
                "an infinite-order non-hyperbolic central action forces the "
                "whole configuration to be a chain, but the graph is a star"
            )
        provenance.append(
            _step(
                "central-reroute",
                "infinite-order-rational-center",
                "rational center with infinite-order non-hyperbolic action: "
                "the configuration is a chain, so the cyclic-quotient case applies",
            )
        )
        return _classify_chain(doc, model, provenance, order, tol)

    labeling = propagate_hyperbolicity(model, center, center_finite_order=finite_order)
    provenance.append(
        _step(
            "hyperbolicity",
            "outward-propagation",
            "every non-central component is rational with hyperbolic induced "
            "dynamics; corners are oriented with the contracting side away "
            "from the center",
        )
    )

    legs = _legs_from_center(model, center)
    leg_data = []
    for leg in legs:
        bs = []
        for vid in leg:
            v = model.vertex(vid)
            bs.append(-v.self_intersection)
        leg_data.append(hj_fold(bs))
    leg_data.sort(key=lambda d: (d.m, d.q))
    marks = tuple(d.m for d in leg_data)
    base = OrbifoldSurface(center_vertex.genus, marks)
    otype = classify_orbifold(base)
    provenance.append(
        _step(
            "orbifold-base",
            "leg-chains-to-marked-points",
            f"each leg chain contracts to a cyclic quotient point on the "
            f"central curve; the base orbifold has genus {base.genus} and "
            f"multiplicities {list(marks)}",
        )
    )
    if otype is OrbifoldType.BAD:
        if sh.shape is not GraphShape.CHAIN:
            raise ClassificationError(
                "internal inconsistency: a bad orbifold base requires at most "
                "two leg chains, which makes the graph a chain"
            )
        provenance.append(
            _step(
                "bad-orbifold-reroute",
                "weighted-projective-base",
                "the base orbifold is a teardrop or spindle, which admits no "
                "smooth cover; the configuration is a chain of rational "
                "curves and the cyclic-quotient case applies",
            )
        )
        return _classify_chain(doc, model, provenance, order, tol)

    cover = smooth_cover_data(base)
    if doc.bundle is None:
        raise ClassificationError(
            "central case requires the orbibundle background degree: it is "
            "not derivable from the dual graph"
        )
    local = doc.bundle.local_invariants
    if local is None:
        local = tuple((m, 0) for m in marks)
        provenance.append(
            _step(
                "bundle-local-default",
                "local-invariants-defaulted",
                "no per-point orbibundle invariants supplied; all defaulted to zero",
            )
        )
    bundle = OrbibundleData(base, doc.bundle.background_degree, local)
    degree = orbidegree(bundle)
    if not degree < 0:
        raise ClassificationError(
            f"orbibundle degree {degree} must be negative for the zero section "
            "to contract to a singularity"
        )
    twist_order = dyn.central_order if dyn is not None and dyn.central_order else 1
    provenance.append(
        _step(
            "orbibundle",
            "linearized-tubular-neighborhood",
            f"a tubular neighborhood of the central curve is the zero section "
            f"of an orbibundle of degree {degree} < 0; an iterate of order "
            f"{twist_order} of the automorphism acts linearly on its fibers, "
            "so the singularity carries an effective torus action and is "
            "weighted homogeneous",
        )
    )
    weighted = WeightedHomogeneousResult(
        base=base,
        geometry=otype,
        bundle=bundle,
        degree=degree,
        twist_order=twist_order,
        leg_data=tuple(leg_data),
        cover=cover,
    )
    return Classification(
        kind=ClassificationKind.WEIGHTED_HOMOGENEOUS,
        cyclic=None,
        weighted=weighted,
        minimal_model=model,
        provenance=tuple(provenance),
    )


# ---------------------------------------------------------------------------
# orbit surfaces


class OrbitSurfaceKind(Enum):
    HOPF = "hopf"
    KODAIRA = "kodaira"
    PROPERLY_ELLIPTIC = "properly-elliptic-quotient"


_KODAIRA_DIMENSION = {
    OrbitSurfaceKind.HOPF: "-inf",
    OrbitSurfaceKind.KODAIRA: "0",
    OrbitSurfaceKind.PROPERLY_ELLIPTIC: "1",
}


@dataclass(frozen=True)
class OrbitSurfaceVerdict:
    kind: OrbitSurfaceKind
    non_kahler: bool
    note: str

    @property
    def kodaira_dimension(self) -> str:
        return _KODAIRA_DIMENSION[self.kind]

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "kodaira_dimension": self.kodaira_dimension,
            "non_kahler": self.non_kahler,
            "note": self.note,
        }


def classify_orbit_surface(classification: Classification) -> OrbitSurfaceVerdict:
    """Quotient-surface type from the classification variant and base geometry.

    Cyclic quotients give Hopf surfaces.  Otherwise the orbit space is a
    finite quotient of a principal elliptic bundle over the base: a spherical
    base gives a Hopf surface, a euclidean base a Kodaira surface, and a
    hyperbolic base a properly elliptic surface of Kodaira dimension one.
    The orbit space is never Kahler.
    """
    if classification.kind is ClassificationKind.CYCLIC_QUOTIENT:
        return OrbitSurfaceVerdict(
            kind=OrbitSurfaceKind.HOPF,
            non_kahler=True,
            note="orbit space of a linearizable contraction of a cyclic "
            "quotient: finite quotient of a primary Hopf surface",
        )
    geometry = classification.weighted.geometry
    if geometry is OrbifoldType.SPHERICAL:
        return OrbitSurfaceVerdict(
            kind=OrbitSurfaceKind.HOPF,
            non_kahler=True,
            note="elliptic bundle over a rational base curve: Hopf surface",
        )
    if geometry is OrbifoldType.EUCLIDEAN:
        return OrbitSurfaceVerdict(
            kind=OrbitSurfaceKind.KODAIRA,
            non_kahler=True,
            note="elliptic bundle over an elliptic base; the torus case is "
            "excluded because the orbit space is not Kahler",
        )
    if geometry is OrbifoldType.HYPERBOLIC:
        return OrbitSurfaceVerdict(
            kind=OrbitSurfaceKind.PROPERLY_ELLIPTIC,
            non_kahler=True,
            note="elliptic bundle over a base of general type: Kodaira "
            "dimension one, preserved under the finite covers involved",
        )
    raise ClassificationError("bad orbifold base cannot reach the orbit-surface table")


@dataclass(frozen=True)
class CoveringRelation:
    """S(f^N) -> S(f) is an N-cyclic unramified covering; both surfaces lie in
    the same class of the decision table."""

    degree: int
    verdict: OrbitSurfaceVerdict | None
    note: str

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "verdict": self.verdict.to_json_dict() if self.verdict else None,
            "note": self.note,
        }


def cyclic_cover_degree(degree: int, verdict: OrbitSurfaceVerdict | None = None) -> CoveringRelation:
    if degree < 1:
        raise ValueError("covering degree must be >= 1")
    if degree == 1:
        note = "identity covering"
    else:
        note = (
            f"the orbit space of the {degree}-th iterate covers the orbit "
            f"space cyclically in degree {degree}; Hopf, Kodaira, and "
            "properly elliptic classes are stable under finite unramified covers"
        )
    return CoveringRelation(degree=degree, verdict=verdict, note=note)


# ---------------------------------------------------------------------------
# report assembly


def build_report(classification: Classification) -> dict:
    verdict = classify_orbit_surface(classification)
    residuals = {}
    if classification.cyclic is not None and classification.cyclic.normal_form is not None:
        nf = classification.cyclic.normal_form
        residuals = {
            "conjugacy": nf.residual_norm,
            "equivariance": nf.group_residual_norm,
            "normalization_path": nf.path,
        }
    return {
        "classification": classification.to_json_dict(),
        "orbit_surface": verdict.to_json_dict(),
        "provenance": [p.to_json_dict() for p in classification.provenance],
        "residuals": residuals,
    }
