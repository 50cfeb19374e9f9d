import math
import random

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from cassis.dual_graph import (
    CyclicQuotientData,
    DualGraphDocument,
    DynamicsAnnotations,
    GraphShape,
    Vertex,
    blow_down,
    chain_weights,
    hj_chain_graph,
    hj_expand,
    hj_fold,
    intersection_matrix,
    is_negative_definite,
    minimal_negative_model,
    shape,
)
from cassis.errors import GraphStructureError, NotContractibleError


def chain(*selfints, genus=0):
    vertices = tuple(Vertex(i, genus, s) for i, s in enumerate(selfints))
    edges = tuple((i, i + 1) for i in range(len(selfints) - 1))
    return DualGraphDocument(vertices, edges)


def star(center_self, legs, center_genus=0):
    """legs: list of lists of self-intersections, each leg attached to vertex 0."""
    vertices = [Vertex(0, center_genus, center_self)]
    edges = []
    next_id = 1
    for leg in legs:
        prev = 0
        for s in leg:
            vertices.append(Vertex(next_id, 0, s))
            edges.append((prev, next_id))
            prev = next_id
            next_id += 1
    return DualGraphDocument(tuple(vertices), tuple(edges))


# ---------------------------------------------------------------------------
# intersection matrix and negative definiteness


def test_intersection_matrix_cases():
    assert intersection_matrix(chain(-1)) == [[-1]]
    assert intersection_matrix(chain(-2, -2)) == [[-2, 1], [1, -2]]
    cyc = DualGraphDocument(
        tuple(Vertex(i, 0, -2) for i in range(3)),
        ((0, 1), (1, 2), (0, 2)),
    )
    assert intersection_matrix(cyc) == [[-2, 1, 1], [1, -2, 1], [1, 1, -2]]


def test_is_negative_definite_cases():
    assert is_negative_definite([[-1]])
    assert is_negative_definite([[-2, 1], [1, -2]])
    assert not is_negative_definite([[-1, 1], [1, -1]])
    assert not is_negative_definite([[1]])
    # affine D4-star: determinant 0
    d4 = star(-2, [[-2], [-2], [-2], [-2]])
    assert not is_negative_definite(intersection_matrix(d4))
    assert is_negative_definite(intersection_matrix(star(-3, [[-2], [-2], [-2], [-2]])))


@given(st.integers(1, 7), st.integers(0, 400))
@settings(max_examples=60, deadline=None)
def test_negative_definite_agrees_with_eigenvalues(n, seed):
    rng = random.Random(seed)
    mat = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            x = rng.randint(-4, 4)
            mat[i][j] = x
            mat[j][i] = x
    want = bool(np.all(np.linalg.eigvalsh(np.array(mat, dtype=float)) < -1e-9))
    got = is_negative_definite(mat)
    if want != got:
        # borderline float spectra are resolved exactly; re-check with the
        # exact verdict on the eigenvalue side via a margin
        eigs = np.linalg.eigvalsh(np.array(mat, dtype=float))
        assert abs(eigs.max()) < 1e-6
    else:
        assert want == got


# ---------------------------------------------------------------------------
# shape


def test_shape_cases():
    assert shape(chain(-2, -2, -2)).shape is GraphShape.CHAIN
    st3 = star(-2, [[-2], [-2], [-2]])
    res = shape(st3)
    assert res.shape is GraphShape.STAR_SHAPED
    assert res.center == 0
    # H-tree: two degree-3 vertices
    h = DualGraphDocument(
        tuple(Vertex(i, 0, -2) for i in range(6)),
        ((0, 1), (1, 2), (1, 3), (3, 4), (3, 5)),
    )
    assert shape(h).shape is GraphShape.GENERAL_TREE
    cyc = DualGraphDocument(
        tuple(Vertex(i, 0, -2) for i in range(3)), ((0, 1), (1, 2), (0, 2))
    )
    assert shape(cyc).shape is GraphShape.CYCLE
    two_cycle = DualGraphDocument(
        (Vertex(0, 0, -2), Vertex(1, 0, -2)), ((0, 1), (0, 1))
    )
    assert shape(two_cycle).shape is GraphShape.CYCLE
    assert shape(chain(-1)).shape is GraphShape.CHAIN


# ---------------------------------------------------------------------------
# blow-down


def test_blow_down_middle_of_chain():
    g = chain(-2, -1, -2)
    out = blow_down(g, 1)
    assert {v.id: v.self_intersection for v in out.vertices} == {0: -1, 2: -1}
    assert out.edges == ((0, 2),)
    assert out.is_snc()


def test_blow_down_leaf():
    g = chain(-2, -3, -1)
    out = blow_down(g, 2)
    assert {v.id: v.self_intersection for v in out.vertices} == {0: -2, 1: -2}
    assert out.edges == ((0, 1),)


def test_blow_down_adjacent_neighbors_gives_multi_edge():
    tri = DualGraphDocument(
        (Vertex(0, 0, -2), Vertex(1, 0, -1), Vertex(2, 0, -3)),
        ((0, 1), (1, 2), (0, 2)),
    )
    out = blow_down(tri, 1)
    assert sorted(out.edges) == [(0, 2), (0, 2)]
    assert not out.is_snc()


def test_blow_down_requires_minus_one_rational():
    with pytest.raises(GraphStructureError):
        blow_down(chain(-2, -2), 0)
    g = DualGraphDocument((Vertex(0, 1, -1), Vertex(1, 0, -2)), ((0, 1),))
    with pytest.raises(GraphStructureError):
        blow_down(g, 0)


def test_minimal_negative_model_already_minimal():
    g = chain(-2, -2)
    assert minimal_negative_model(g) == g


def test_minimal_negative_model_single_step():
    g = chain(-3, -1, -3)
    out = minimal_negative_model(g)
    assert [v.self_intersection for v in out.vertices] == [-2, -2]


def test_minimal_negative_model_rejects_non_contractible():
    with pytest.raises(NotContractibleError):
        minimal_negative_model(chain(-2, -1, -2))


def test_minimal_negative_model_keeps_star_center():
    g = star(-1, [[-5], [-5], [-5]])
    assert is_negative_definite(intersection_matrix(g))
    out = minimal_negative_model(g)
    # center has degree 3, never contracted even at self-intersection -1
    assert out == g


# ---------------------------------------------------------------------------
# Hirzebruch-Jung expansion


def test_hj_expand_cases():
    assert hj_expand(CyclicQuotientData(2, 1)) == [2]
    assert hj_expand(CyclicQuotientData(5, 2)) == [3, 2]
    assert hj_expand(CyclicQuotientData(3, 2)) == [2, 2]
    assert hj_expand(CyclicQuotientData(1, 0)) == []


def test_hj_fold_cases():
    assert hj_fold([2]) == CyclicQuotientData(2, 1)
    assert hj_fold([3, 2]) == CyclicQuotientData(5, 2)
    assert hj_fold([2, 2, 2]) == CyclicQuotientData(4, 3)
    assert hj_fold([]) == CyclicQuotientData(1, 0)
    with pytest.raises(ValueError):
        hj_fold([2, 1, 3])


def test_hj_roundtrip_and_definiteness_sample():
    for m in range(2, 60):
        for q in range(1, m):
            if math.gcd(m, q) != 1:
                continue
            data = CyclicQuotientData(m, q)
            bs = hj_expand(data)
            assert all(b >= 2 for b in bs)
            assert hj_fold(bs) == data
            graph = hj_chain_graph(bs)
            assert is_negative_definite(intersection_matrix(graph))


def test_hj_dual_reverses_chain():
    data = CyclicQuotientData(11, 4)
    assert hj_expand(data.dual()) == list(reversed(hj_expand(data)))
    assert data.dual().dual() == data
    assert data.canonical() == data.dual().canonical()


def test_chain_weights_requires_minimal():
    g = chain(-3, -1, -3)
    with pytest.raises(GraphStructureError):
        chain_weights(g)
    assert chain_weights(chain(-3, -2)) == [3, 2]


def test_json_roundtrip():
    g = DualGraphDocument(
        (Vertex(0, 1, -3, 2), Vertex(1, 0, -2)),
        ((0, 1),),
        DynamicsAnnotations(center=0, finite_order=True, central_order=3),
    )
    back = DualGraphDocument.from_json_dict(g.to_json_dict())
    assert back == g
