import json
import random

import pytest
from gmpy2 import mpq

from cassis.classify import (
    AdmissibleDataDocument,
    BundleSpec,
    Classification,
    ClassificationKind,
    CycleObstructionError,
    GermData,
    OrbitSurfaceKind,
    build_report,
    classify_orbit_surface,
    classify_singularity,
    cyclic_cover_degree,
)
from cassis.dual_graph import (
    CornerAnnotation,
    CyclicQuotientData,
    DualGraphDocument,
    DynamicsAnnotations,
    Vertex,
    intersection_matrix,
    is_negative_definite,
)
from cassis.errors import ClassificationError, NotContractibleError
from cassis.jets import DiagonalGroup, Jet
from cassis.normal_forms import HJGermKind
from cassis.orbifold import OrbifoldType


def chain_graph(*selfints, dynamics=None, ids=None):
    ids = ids or list(range(len(selfints)))
    vertices = tuple(Vertex(i, 0, s) for i, s in zip(ids, selfints))
    edges = tuple((ids[i], ids[i + 1]) for i in range(len(selfints) - 1))
    return DualGraphDocument(vertices, edges, dynamics)


def star_graph(center_self, legs, center_genus=0, dynamics=None):
    vertices = [Vertex(0, center_genus, center_self)]
    edges = []
    nid = 1
    for leg in legs:
        prev = 0
        for s in leg:
            vertices.append(Vertex(nid, 0, s))
            edges.append((prev, nid))
            prev = nid
            nid += 1
    return DualGraphDocument(tuple(vertices), tuple(edges), dynamics)


# ---------------------------------------------------------------------------
# chain case


def test_chain_with_diagonal_germ():
    graph = chain_graph(-3, -2)
    group = DiagonalGroup(5, (1, 2))
    jet = Jet(2, 8, ({(1, 0): mpq(1, 2)}, {(0, 1): mpq(1, 3)}))
    doc = AdmissibleDataDocument(graph, germ=GermData(group, 1, jet))
    result = classify_singularity(doc)
    assert result.kind is ClassificationKind.CYCLIC_QUOTIENT
    assert result.cyclic.quotient == CyclicQuotientData(5, 2)
    assert result.cyclic.germ_case.case_label == "b"
    assert result.cyclic.germ_kind is HJGermKind.DIAGONAL_PAIR
    assert result.cyclic.normal_form.residual_norm == 0.0


def test_chain_resonant_triangular_germ():
    # (a z, a^2 w + z^2) over the (2, 1)-quotient? use m=3, q=2, u=2
    graph = chain_graph(-2, -2)  # folds to (3, 2)
    m, u = 3, 2
    a = mpq(1, 2)
    group = DiagonalGroup(m, (1, u))
    jet = Jet(2, 8, ({(1, 0): a}, {(0, 1): a**u, (u, 0): mpq(1)}))
    doc = AdmissibleDataDocument(graph, germ=GermData(group, 1, jet))
    result = classify_singularity(doc)
    assert result.cyclic.quotient == CyclicQuotientData(3, 2)
    assert result.cyclic.germ_case.case_label == "b"
    assert result.cyclic.germ_kind is HJGermKind.RESONANT_TRIANGULAR
    nf = result.cyclic.normal_form
    assert nf.residual_norm == 0.0
    assert nf.normal_form.coefficient(1, (u, 0)) == 1


def test_chain_anti_diagonal_germ():
    # m=8, q=3, k=3: anti-diagonal case over the chain for (8, 3)
    graph = chain_graph(-3, -3)  # 3 - 1/3 = 8/3
    group = DiagonalGroup(8, (1, 3))
    jet = Jet(2, 8, ({(0, 1): mpq(1, 3)}, {(1, 0): mpq(1, 2)}))
    doc = AdmissibleDataDocument(graph, germ=GermData(group, 3, jet))
    result = classify_singularity(doc)
    assert result.cyclic.quotient == CyclicQuotientData(8, 3)
    assert result.cyclic.germ_case.case_label == "c"
    assert result.cyclic.germ_kind is HJGermKind.ANTI_DIAGONAL
    assert result.cyclic.normal_form.normal_form.is_linear()


def test_chain_without_germ_emits_congruence_case():
    result = classify_singularity(AdmissibleDataDocument(chain_graph(-3, -2)))
    assert result.kind is ClassificationKind.CYCLIC_QUOTIENT
    assert result.cyclic.germ_case is not None
    assert result.cyclic.germ_case.case_label == "b"


def test_chain_canonical_under_reversal_and_relabeling():
    a = classify_singularity(AdmissibleDataDocument(chain_graph(-3, -2)))
    b = classify_singularity(AdmissibleDataDocument(chain_graph(-2, -3)))
    c = classify_singularity(AdmissibleDataDocument(chain_graph(-3, -2, ids=[7, 1])))
    assert a.cyclic.quotient == b.cyclic.quotient == c.cyclic.quotient


def test_chain_group_mismatch_rejected():
    graph = chain_graph(-3, -2)  # (5, 2)
    group = DiagonalGroup(7, (1, 2))
    doc = AdmissibleDataDocument(graph, germ=GermData(group, 1))
    with pytest.raises(ClassificationError, match="order"):
        classify_singularity(doc)
    group2 = DiagonalGroup(5, (1, 4))  # ratio 4 is neither 2 nor 3
    with pytest.raises(ClassificationError, match="orientation"):
        classify_singularity(AdmissibleDataDocument(graph, germ=GermData(group2, 1)))


def test_smooth_point_chain():
    result = classify_singularity(AdmissibleDataDocument(chain_graph(-1)))
    assert result.cyclic.quotient == CyclicQuotientData(1, 0)


# ---------------------------------------------------------------------------
# central case


def spherical_star_doc():
    graph = star_graph(-2, [[-2], [-2], [-2]], center_genus=0,
                       dynamics=DynamicsAnnotations(center=0, finite_order=True))
    return AdmissibleDataDocument(graph, bundle=BundleSpec(-1))


def euclidean_star_doc():
    graph = star_graph(-3, [[-2], [-2], [-2], [-2]], center_genus=0,
                       dynamics=DynamicsAnnotations(center=0, finite_order=True))
    return AdmissibleDataDocument(graph, bundle=BundleSpec(-1))


def hyperbolic_star_doc():
    graph = star_graph(-2, [[-2], [-2, -2], [-3, -2, -2]], center_genus=0,
                       dynamics=DynamicsAnnotations(center=0, finite_order=True, central_order=2))
    return AdmissibleDataDocument(graph, bundle=BundleSpec(-1))


def genus2_star_doc():
    graph = star_graph(-2, [[-2], [-2], [-2]], center_genus=2,
                       dynamics=DynamicsAnnotations(finite_order=True))
    return AdmissibleDataDocument(graph, bundle=BundleSpec(-2))


def test_star_with_genus_two_center():
    result = classify_singularity(genus2_star_doc())
    assert result.kind is ClassificationKind.WEIGHTED_HOMOGENEOUS
    w = result.weighted
    assert w.base.genus == 2
    assert w.base.marks == (2, 2, 2)
    assert w.geometry is OrbifoldType.HYPERBOLIC
    assert w.degree == -2 + mpq(0)
    assert [d.m for d in w.leg_data] == [2, 2, 2]


def test_star_geometries():
    assert classify_singularity(spherical_star_doc()).weighted.geometry is OrbifoldType.SPHERICAL
    assert classify_singularity(euclidean_star_doc()).weighted.geometry is OrbifoldType.EUCLIDEAN
    hyp = classify_singularity(hyperbolic_star_doc())
    assert hyp.weighted.geometry is OrbifoldType.HYPERBOLIC
    assert hyp.weighted.base.marks == (2, 3, 7)
    assert hyp.weighted.cover.covered_genus >= 2
    assert hyp.weighted.twist_order == 2


def test_star_requires_negative_definite():
    # affine D4 star fails the contraction test
    graph = star_graph(-2, [[-2], [-2], [-2], [-2]],
                       dynamics=DynamicsAnnotations(center=0, finite_order=True))
    with pytest.raises(NotContractibleError):
        classify_singularity(AdmissibleDataDocument(graph, bundle=BundleSpec(-1)))


def test_star_requires_bundle_degree():
    doc = spherical_star_doc()
    with pytest.raises(ClassificationError, match="background degree"):
        classify_singularity(AdmissibleDataDocument(doc.graph))


def test_star_rejects_nonnegative_orbidegree():
    graph = spherical_star_doc().graph
    bad = AdmissibleDataDocument(graph, bundle=BundleSpec(0))
    with pytest.raises(ClassificationError, match="negative"):
        classify_singularity(bad)
    # e = -1 with local invariants summing to 3/2 is positive as well
    bad2 = AdmissibleDataDocument(
        graph, bundle=BundleSpec(-1, ((2, 1), (2, 1), (2, 1)))
    )
    with pytest.raises(ClassificationError, match="negative"):
        classify_singularity(bad2)


def test_star_leg_permutation_invariance():
    g1 = star_graph(-2, [[-2], [-2, -2], [-3, -2, -2]],
                    dynamics=DynamicsAnnotations(center=0, finite_order=True))
    g2 = star_graph(-2, [[-3, -2, -2], [-2], [-2, -2]],
                    dynamics=DynamicsAnnotations(center=0, finite_order=True))
    r1 = classify_singularity(AdmissibleDataDocument(g1, bundle=BundleSpec(-1)))
    r2 = classify_singularity(AdmissibleDataDocument(g2, bundle=BundleSpec(-1)))
    assert r1.weighted.base == r2.weighted.base
    assert r1.weighted.leg_data == r2.weighted.leg_data


def test_positive_genus_vertex_is_center_automatically():
    graph = DualGraphDocument((Vertex(0, 1, -2),), (), DynamicsAnnotations(finite_order=True))
    result = classify_singularity(AdmissibleDataDocument(graph, bundle=BundleSpec(-3)))
    assert result.kind is ClassificationKind.WEIGHTED_HOMOGENEOUS
    assert result.weighted.base.genus == 1
    assert result.weighted.base.marks == ()
    assert result.weighted.geometry is OrbifoldType.EUCLIDEAN


def test_genus_one_center_with_infinite_order_rejected():
    graph = DualGraphDocument((Vertex(0, 1, -2),), (), DynamicsAnnotations(finite_order=False))
    with pytest.raises(ClassificationError, match="finite order"):
        classify_singularity(AdmissibleDataDocument(graph, bundle=BundleSpec(-3)))


def test_infinite_order_center_on_chain_reroutes():
    dynamics = DynamicsAnnotations(center=1, finite_order=False)
    graph = chain_graph(-3, -2, dynamics=dynamics)
    result = classify_singularity(AdmissibleDataDocument(graph))
    assert result.kind is ClassificationKind.CYCLIC_QUOTIENT
    steps = [p.step for p in result.provenance]
    assert "central-reroute" in steps


def test_bad_orbifold_reroutes_to_chain():
    # declared center at the end of a chain: one leg, teardrop base
    dynamics = DynamicsAnnotations(center=0, finite_order=True)
    graph = chain_graph(-2, -3, -2, dynamics=dynamics)
    result = classify_singularity(AdmissibleDataDocument(graph))
    assert result.kind is ClassificationKind.CYCLIC_QUOTIENT
    steps = [p.step for p in result.provenance]
    assert "bad-orbifold-reroute" in steps


def test_bad_orbifold_spindle_reroutes():
    # center inside a chain with legs of distinct multiplicities
    dynamics = DynamicsAnnotations(center=1, finite_order=True)
    graph = chain_graph(-2, -2, -3, dynamics=dynamics)
    result = classify_singularity(AdmissibleDataDocument(graph))
    assert result.kind is ClassificationKind.CYCLIC_QUOTIENT


def test_two_branch_points_rejected():
    vertices = tuple(Vertex(i, 0, -3) for i in range(8))
    edges = ((0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (4, 6), (4, 7))
    graph = DualGraphDocument(vertices, edges)
    with pytest.raises(ClassificationError, match="branch"):
        classify_singularity(AdmissibleDataDocument(graph))


def test_cycle_rejected_with_certificate():
    lambdas = [mpq(2), mpq(3), mpq(5, 7)]
    corners = []
    for j in range(3):
        a, b = j, (j + 1) % 3
        corners.append(
            CornerAnnotation((a, b), lambdas[j], 1 / lambdas[(j + 1) % 3])
        )
    dynamics = DynamicsAnnotations(corners=tuple(corners))
    graph = DualGraphDocument(
        tuple(Vertex(i, 0, -3) for i in range(3)),
        ((0, 1), (1, 2), (0, 2)),
        dynamics,
    )
    assert is_negative_definite(intersection_matrix(graph))
    with pytest.raises(CycleObstructionError) as exc:
        classify_singularity(AdmissibleDataDocument(graph))
    cert = exc.value.certificate
    assert cert is not None
    assert cert.telescoping_product == 1
    assert cert.sum_is_zero


def test_cycle_rejected_without_corner_data():
    graph = DualGraphDocument(
        tuple(Vertex(i, 0, -3) for i in range(3)),
        ((0, 1), (1, 2), (0, 2)),
    )
    with pytest.raises(CycleObstructionError) as exc:
        classify_singularity(AdmissibleDataDocument(graph))
    assert exc.value.certificate is None


# ---------------------------------------------------------------------------
# orbit surfaces: the decision table


def test_orbit_surface_decision_table():
    rows = [
        (AdmissibleDataDocument(chain_graph(-3, -2)), OrbitSurfaceKind.HOPF, "-inf"),
        (spherical_star_doc(), OrbitSurfaceKind.HOPF, "-inf"),
        (euclidean_star_doc(), OrbitSurfaceKind.KODAIRA, "0"),
        (hyperbolic_star_doc(), OrbitSurfaceKind.PROPERLY_ELLIPTIC, "1"),
    ]
    for doc, kind, kappa in rows:
        classification = classify_singularity(doc)
        verdict = classify_orbit_surface(classification)
        assert verdict.kind is kind
        assert verdict.kodaira_dimension == kappa
        assert verdict.non_kahler


def test_orbit_surface_genus_one_base_is_kodaira():
    graph = DualGraphDocument((Vertex(0, 1, -2),), (), DynamicsAnnotations(finite_order=True))
    classification = classify_singularity(AdmissibleDataDocument(graph, bundle=BundleSpec(-1)))
    verdict = classify_orbit_surface(classification)
    assert verdict.kind is OrbitSurfaceKind.KODAIRA


def test_cyclic_cover_degree():
    verdict = classify_orbit_surface(classify_singularity(spherical_star_doc()))
    rel1 = cyclic_cover_degree(1, verdict)
    assert rel1.degree == 1 and "identity" in rel1.note
    rel3 = cyclic_cover_degree(3, verdict)
    assert rel3.degree == 3
    assert rel3.verdict.kind is verdict.kind
    with pytest.raises(ValueError):
        cyclic_cover_degree(0)


# ---------------------------------------------------------------------------
# reports and serialization


def test_report_and_document_roundtrip():
    graph = chain_graph(-3, -2)
    group = DiagonalGroup(5, (1, 2))
    jet = Jet(2, 8, ({(1, 0): mpq(1, 2)}, {(0, 1): mpq(1, 3)}))
    doc = AdmissibleDataDocument(graph, germ=GermData(group, 1, jet))
    back = AdmissibleDataDocument.from_json_dict(json.loads(json.dumps(doc.to_json_dict())))
    assert back == doc
    report = build_report(classify_singularity(doc))
    assert report["classification"]["kind"] == "cyclic-quotient"
    assert report["orbit_surface"]["kind"] == "hopf"
    assert report["residuals"]["conjugacy"] == 0.0
    assert all({"step", "theorem", "quote"} <= set(p) for p in report["provenance"])
    json.dumps(report)  # must be serializable


def test_minimal_model_applied_before_folding():
    # chain [-3, -1, -3] contracts to [-2, -2], folding to (3, 2)
    result = classify_singularity(AdmissibleDataDocument(chain_graph(-3, -1, -3)))
    assert result.cyclic.quotient == CyclicQuotientData(3, 2)
