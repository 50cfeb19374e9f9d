import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from cassis.dual_graph import DualGraphDocument, Vertex
from cassis.errors import GraphStructureError
from cassis.graph_dynamics import (
    CornerData,
    CycleCertificate,
    VertexLabel,
    central_component_check,
    corner_inequality,
    cycle_obstruction,
    propagate_hyperbolicity,
)


def test_corner_inequality_basic():
    both_contracting = CornerData((0, 1), mpq(1, 2), mpq(1, 2), 1, 1)
    assert corner_inequality(both_contracting)
    exact_zero = CornerData((0, 1), mpq(2), mpq(1, 2), 1, 1)
    assert not corner_inequality(exact_zero)
    center_adjacent = CornerData((0, 1), mpq(1), mpq(1, 2), 1, 1)
    assert corner_inequality(center_adjacent)


def test_corner_inequality_weighted():
    # log(4)/1 + log(1/2)/3 > 0 but log(4)/3 + log(1/2)/1 < 0
    c1 = CornerData((0, 1), mpq(4), mpq(1, 2), 1, 3)
    c2 = CornerData((0, 1), mpq(4), mpq(1, 2), 3, 1)
    assert not corner_inequality(c1)
    assert corner_inequality(c2)


def test_corner_inequality_float_mode():
    assert corner_inequality(CornerData((0, 1), 0.5, 0.5, 2, 5))
    assert not corner_inequality(CornerData((0, 1), 2.0, 0.5, 1, 1))


def test_corner_data_validation():
    with pytest.raises(ValueError):
        CornerData((0, 1), mpq(0), mpq(1, 2))
    with pytest.raises(ValueError):
        CornerData((0, 1), mpq(1, 2), mpq(1, 2), a_e=0)


def make_matched_cycle(rng, n, orders=None):
    """Random exact moduli around an n-cycle satisfying lambda_j = 1/mu_{j-1}."""
    lambdas = [mpq(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(n)]
    if orders is None:
        orders = [rng.randint(1, 5) for _ in range(n)]
    corners = []
    for j in range(n):
        corners.append(
            CornerData(
                edge=(j, (j + 1) % n),
                mod_lambda=lambdas[j],
                mod_mu=1 / lambdas[(j + 1) % n],
                a_e=orders[j],
                a_e_prime=orders[(j + 1) % n],
            )
        )
    return corners


def test_cycle_obstruction_two_cycle():
    rng = random.Random(0)
    corners = make_matched_cycle(rng, 2, orders=[1, 1])
    cert = cycle_obstruction(corners)
    assert cert.telescoping_product == 1
    assert cert.sum_is_zero
    assert cert.infeasible


def test_cycle_obstruction_three_cycle_with_orders():
    rng = random.Random(1)
    corners = make_matched_cycle(rng, 3, orders=[1, 2, 3])
    cert = cycle_obstruction(corners)
    assert cert.telescoping_product == 1
    assert cert.sum_is_zero


@given(st.integers(2, 7), st.integers(0, 10_000))
@settings(max_examples=80, deadline=None)
def test_cycle_obstruction_random(n, seed):
    rng = random.Random(seed)
    corners = make_matched_cycle(rng, n)
    cert = cycle_obstruction(corners)
    assert cert.telescoping_product == 1
    assert cert.sum_is_zero


def test_cycle_obstruction_rejects_broken_matching():
    rng = random.Random(2)
    corners = make_matched_cycle(rng, 3)
    broken = list(corners)
    c = broken[1]
    broken[1] = CornerData(c.edge, c.mod_lambda * 2, c.mod_mu, c.a_e, c.a_e_prime)
    with pytest.raises(ValueError, match="matching"):
        cycle_obstruction(broken)


def test_cycle_obstruction_rejects_inconsistent_orders():
    rng = random.Random(3)
    corners = make_matched_cycle(rng, 3)
    c = corners[0]
    bad = [CornerData(c.edge, c.mod_lambda, c.mod_mu, c.a_e + 1, c.a_e_prime)] + corners[1:]
    with pytest.raises(ValueError, match="order"):
        cycle_obstruction(bad)


# ---------------------------------------------------------------------------
# propagation


def star_graph(legs, center_self=-2):
    vertices = [Vertex(0, 0, center_self)]
    edges = []
    nid = 1
    for leg in legs:
        prev = 0
        for s in leg:
            vertices.append(Vertex(nid, 0, s))
            edges.append((prev, nid))
            prev = nid
            nid += 1
    return DualGraphDocument(tuple(vertices), tuple(edges))


def test_propagate_on_three_leg_star():
    g = star_graph([[-2, -2], [-2, -2], [-2, -2]])
    labeling = propagate_hyperbolicity(g, 0)
    assert labeling.label_of(0) is VertexLabel.NON_HYPERBOLIC
    for v in g.vertices:
        if v.id != 0:
            assert labeling.label_of(v.id) is VertexLabel.HYPERBOLIC
    # all corners oriented outward
    for corner in labeling.corners:
        closer, farther = corner.edge
        assert corner.contracting == farther
        assert corner.center_side == (closer == 0)


def test_propagate_path_with_end_center():
    g = DualGraphDocument(
        tuple(Vertex(i, 0, -2) for i in range(4)),
        ((0, 1), (1, 2), (2, 3)),
    )
    labeling = propagate_hyperbolicity(g, 0)
    assert [lab for _, lab in labeling.labels].count(VertexLabel.NON_HYPERBOLIC) == 1
    assert dict(labeling.distances) == {0: 0, 1: 1, 2: 2, 3: 3}


def test_propagate_rejects_second_branch_point():
    # two degree-3 vertices: center 0 and off-center 2
    vertices = tuple(Vertex(i, 0, -2) for i in range(7))
    edges = ((0, 1), (0, 5), (0, 6), (1, 2), (2, 3), (2, 4))
    g = DualGraphDocument(vertices, edges)
    with pytest.raises(GraphStructureError, match="degree"):
        propagate_hyperbolicity(g, 0)


def test_propagate_rejects_cycles_and_bad_center():
    cyc = DualGraphDocument(
        tuple(Vertex(i, 0, -2) for i in range(3)), ((0, 1), (1, 2), (0, 2))
    )
    with pytest.raises(GraphStructureError, match="cycle"):
        propagate_hyperbolicity(cyc, 0)
    g = star_graph([[-2], [-2], [-2]])
    with pytest.raises(GraphStructureError, match="center"):
        propagate_hyperbolicity(g, 99)


def test_propagate_rejects_positive_genus_leg():
    g = DualGraphDocument(
        (Vertex(0, 0, -2), Vertex(1, 1, -2)),
        ((0, 1),),
    )
    with pytest.raises(GraphStructureError, match="genus"):
        propagate_hyperbolicity(g, 0)


def test_propagate_chain_from_either_end():
    g = DualGraphDocument(
        tuple(Vertex(i, 0, -2) for i in range(4)), ((0, 1), (1, 2), (2, 3))
    )
    for center in (0, 3):
        labeling = propagate_hyperbolicity(g, center)
        non_h = [v for v, lab in labeling.labels if lab is not VertexLabel.HYPERBOLIC]
        assert non_h == [center]


def test_central_component_check():
    assert not central_component_check(1, False).accepted
    assert not central_component_check(2, False).accepted
    chain_case = central_component_check(0, False)
    assert chain_case.accepted and chain_case.requires_chain
    assert central_component_check(2, True).accepted
    assert central_component_check(0, True).accepted
