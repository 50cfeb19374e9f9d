"""Resolution dual graphs and Hirzebruch-Jung chain calculus.

Graphs are stored as immutable documents: vertices carry genus,
self-intersection, and an optional vanishing order; edges are unordered pairs
with multi-edges and loops representable (so a blow-down can report an exit
from the simple-normal-crossings class instead of failing silently).

The continued-fraction convention is the "minus" expansion with all partial
quotients >= 2, matching chains of rational curves of self-intersection <= -2:
m/q = b_1 - 1/(b_2 - 1/(...)).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from gmpy2 import mpq

from .errors import GraphStructureError, NotContractibleError, SNCViolationError


@dataclass(frozen=True)
class Vertex:
    id: int
    genus: int = 0
    self_intersection: int = -2
    vanishing_order: int | None = None

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be >= 0")
        if self.vanishing_order is not None and self.vanishing_order < 1:
            raise ValueError("vanishing order must be >= 1")


@dataclass(frozen=True)
class CornerAnnotation:
    """Eigenvalue moduli of the induced map on the two branches at one corner."""

    edge: tuple[int, int]
    mod_lambda: object  # modulus on the first component of `edge`
    mod_mu: object


@dataclass(frozen=True)
class DynamicsAnnotations:
    center: int | None = None
    finite_order: bool | None = None
    central_order: int | None = None
    corners: tuple[CornerAnnotation, ...] = ()


@dataclass(frozen=True)
class DualGraphDocument:
    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[int, int], ...]
    dynamics: DynamicsAnnotations | None = None

    def __post_init__(self):
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise ValueError("vertex ids must be unique")
        known = set(ids)
        normalized = []
        for a, b in self.edges:
            if a not in known or b not in known:
                raise ValueError(f"edge ({a}, {b}) references unknown vertex")
            normalized.append((a, b) if a <= b else (b, a))
        object.__setattr__(self, "edges", tuple(sorted(normalized)))
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices, key=lambda v: v.id)))

    # -- basic structure ---------------------------------------------------

    def vertex(self, vid: int) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def adjacency(self) -> dict[int, Counter]:
        adj: dict[int, Counter] = {v.id: Counter() for v in self.vertices}
        for a, b in self.edges:
            if a == b:
                adj[a][a] += 1
            else:
                adj[a][b] += 1
                adj[b][a] += 1
        return adj

    def degree(self, vid: int) -> int:
        adj = self.adjacency()[vid]
        return sum(2 * c if u == vid else c for u, c in adj.items())

    def has_loops(self) -> bool:
        return any(a == b for a, b in self.edges)

    def has_multi_edges(self) -> bool:
        seen = set()
        for e in self.edges:
            if e in seen:
                return True
            seen.add(e)
        return False

    def is_snc(self) -> bool:
        """Simple-normal-crossings validity: no loops, no multi-edges."""
        return not self.has_loops() and not self.has_multi_edges()

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        adj = self.adjacency()
        seen = {self.vertices[0].id}
        stack = [self.vertices[0].id]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def is_tree(self) -> bool:
        return self.is_connected() and len(self.edges) == len(self.vertices) - 1 and not self.has_loops()

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        doc = {
            "vertices": [
                {
                    "id": v.id,
                    "genus": v.genus,
                    "self": v.self_intersection,
                    **({"a": v.vanishing_order} if v.vanishing_order is not None else {}),
                }
                for v in self.vertices
            ],
            "edges": [[a, b] for a, b in self.edges],
        }
        if self.dynamics is not None:
            dyn = {}
            if self.dynamics.center is not None:
                dyn["center"] = self.dynamics.center
            if self.dynamics.finite_order is not None:
                dyn["finite_order"] = self.dynamics.finite_order
            if self.dynamics.central_order is not None:
                dyn["central_order"] = self.dynamics.central_order
            if self.dynamics.corners:
                dyn["corners"] = [
                    {
                        "edge": list(c.edge),
                        "mod_lambda": _modulus_to_json(c.mod_lambda),
                        "mod_mu": _modulus_to_json(c.mod_mu),
                    }
                    for c in self.dynamics.corners
                ]
            doc["dynamics"] = dyn
        return doc

    @classmethod
    def from_json_dict(cls, obj: dict) -> "DualGraphDocument":
        vertices = tuple(
            Vertex(
                id=int(v["id"]),
                genus=int(v.get("genus", 0)),
                self_intersection=int(v["self"]),
                vanishing_order=int(v["a"]) if "a" in v else None,
            )
            for v in obj["vertices"]
        )
        edges = tuple((int(a), int(b)) for a, b in obj.get("edges", []))
        dynamics = None
        if "dynamics" in obj and obj["dynamics"]:
            dyn = obj["dynamics"]
            corners = tuple(
                CornerAnnotation(
                    edge=(int(c["edge"][0]), int(c["edge"][1])),
                    mod_lambda=_modulus_from_json(c["mod_lambda"]),
                    mod_mu=_modulus_from_json(c["mod_mu"]),
                )
                for c in dyn.get("corners", [])
            )
            dynamics = DynamicsAnnotations(
                center=dyn.get("center"),
                finite_order=dyn.get("finite_order"),
                central_order=dyn.get("central_order"),
                corners=corners,
            )
        return cls(vertices=vertices, edges=edges, dynamics=dynamics)


def _modulus_to_json(value):
    if isinstance(value, float):
        return value
    return str(mpq(value))


def _modulus_from_json(value):
    if isinstance(value, float):
        return value
    return mpq(str(value))


# ---------------------------------------------------------------------------
# intersection form


def intersection_matrix(graph: DualGraphDocument) -> list[list[int]]:
    """Symmetric matrix with self-intersections on the diagonal and edge
    multiplicities off it.  Vertices are ordered by id."""
    if not graph.is_connected():
        raise GraphStructureError("intersection matrix requires a connected graph")
    if graph.has_loops():
        raise GraphStructureError("intersection matrix undefined for loops (nodal components)")
    ids = [v.id for v in graph.vertices]
    pos = {vid: i for i, vid in enumerate(ids)}
    n = len(ids)
    mat = [[0] * n for _ in range(n)]
    for i, v in enumerate(graph.vertices):
        mat[i][i] = v.self_intersection
    for a, b in graph.edges:
        mat[pos[a]][pos[b]] += 1
        mat[pos[b]][pos[a]] += 1
    return mat


def _is_tridiagonal(mat) -> bool:
    n = len(mat)
    return all(mat[i][j] == 0 for i in range(n) for j in range(n) if abs(i - j) > 1)


def is_negative_definite(mat) -> bool:
    """Exact Sylvester verdict: -M has all leading principal minors positive.

    Integer arithmetic throughout (Bareiss elimination; linear-time recurrence
    on tridiagonal input).
    """
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix must be square")
    for i in range(n):
        for j in range(i):
            if mat[i][j] != mat[j][i]:
                raise ValueError("matrix must be symmetric")
    neg = [[-x for x in row] for row in mat]
    if _is_tridiagonal(neg):
        prev2, prev1 = 1, 1
        for i in range(n):
            off = neg[i][i - 1] if i else 0
            minor = neg[i][i] * prev1 - off * off * prev2
            if minor <= 0:
                return False
            prev2, prev1 = prev1, minor
        return True
    # Bareiss fraction-free elimination; pivots reveal the leading minors
    a = [row[:] for row in neg]
    denom = 1
    for k in range(n):
        if a[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // denom
        denom = a[k][k]
    return True


# ---------------------------------------------------------------------------
# shape


class GraphShape(Enum):
    CHAIN = "chain"
    CYCLE = "cycle"
    STAR_SHAPED = "star-shaped"
    GENERAL_TREE = "general-tree"
    OTHER = "other"


@dataclass(frozen=True)
class ShapeResult:
    shape: GraphShape
    center: int | None = None  # branch vertex for STAR_SHAPED


def shape(graph: DualGraphDocument) -> ShapeResult:
    """Segment / circle / star / general tree / other, per the dual-graph idiom.

    A segment counts as star-shaped in the classification, but is reported as
    CHAIN here; STAR_SHAPED means a tree with exactly one vertex of degree >= 3.
    """
    if not graph.is_connected():
        raise GraphStructureError("shape requires a connected graph")
    if graph.has_loops():
        return ShapeResult(GraphShape.OTHER)
    n = len(graph.vertices)
    degrees = {v.id: graph.degree(v.id) for v in graph.vertices}
    if graph.is_tree():
        branch = [vid for vid, d in degrees.items() if d >= 3]
        if not branch:
            return ShapeResult(GraphShape.CHAIN)
        if len(branch) == 1:
            return ShapeResult(GraphShape.STAR_SHAPED, center=branch[0])
        return ShapeResult(GraphShape.GENERAL_TREE)
    if len(graph.edges) == n and n >= 2 and all(d == 2 for d in degrees.values()):
        return ShapeResult(GraphShape.CYCLE)
    return ShapeResult(GraphShape.OTHER)


def chain_order(graph: DualGraphDocument) -> list[int]:
    """Vertex ids of a chain graph in path order, starting at the lower-id end."""
    result = shape(graph)
    if result.shape is not GraphShape.CHAIN:
        raise GraphStructureError("not a chain")
    if len(graph.vertices) == 1:
        return [graph.vertices[0].id]
    adj = graph.adjacency()
    ends = sorted(v.id for v in graph.vertices if graph.degree(v.id) == 1)
    start = ends[0]
    order = [start]
    prev = None
    current = start
    while len(order) < len(graph.vertices):
        nxt = [u for u in adj[current] if u != prev]
        prev, current = current, nxt[0]
        order.append(current)
    return order


# ---------------------------------------------------------------------------
# blow-down calculus


def blow_down(graph: DualGraphDocument, vid: int) -> DualGraphDocument:
    """Contract a genus-0 vertex of self-intersection -1.

    Neighbors A, B gain (A.v)(B.v) new edges; each neighbor's self-intersection
    grows by (A.v)^2.  A neighbor met more than once acquires nodes, recorded
    as loops; the caller can detect the exit from the SNC class via is_snc().
    """
    v = graph.vertex(vid)
    if v.genus != 0 or v.self_intersection != -1:
        raise GraphStructureError(
            f"vertex {vid} is not a contractible (-1) rational curve"
        )
    adj = graph.adjacency()[vid]
    if vid in adj:
        raise GraphStructureError(f"vertex {vid} carries a loop; not in the SNC class")
    mult = {u: c for u, c in adj.items()}
    new_vertices = []
    for w in graph.vertices:
        if w.id == vid:
            continue
        if w.id in mult:
            m = mult[w.id]
            new_vertices.append(
                Vertex(w.id, w.genus, w.self_intersection + m * m, w.vanishing_order)
            )
        else:
            new_vertices.append(w)
    new_edges = [e for e in graph.edges if vid not in e]
    neighbors = sorted(mult)
    for i, a in enumerate(neighbors):
        # nodes on the image of a neighbor met m >= 2 times
        m = mult[a]
        new_edges.extend([(a, a)] * (m * (m - 1) // 2))
        for b in neighbors[i + 1 :]:
            new_edges.extend([(a, b)] * (mult[a] * mult[b]))
    return DualGraphDocument(tuple(new_vertices), tuple(new_edges), graph.dynamics)


def minimal_negative_model(graph: DualGraphDocument) -> DualGraphDocument:
    """Blow down (-1) rational chain vertices (degree <= 2) until none remain.

    The input must be contractible (negative definite); the contraction
    sequence must stay inside the SNC class.  Lowest vertex id goes first, so
    the result is deterministic.
    """
    if not graph.is_connected():
        raise GraphStructureError("minimal model requires a connected graph")
    if not is_negative_definite(intersection_matrix(graph)):
        raise NotContractibleError(
            "intersection form is not negative definite; the configuration "
            "does not contract to a normal singularity"
        )
    current = graph
    while True:
        candidates = sorted(
            v.id
            for v in current.vertices
            if v.genus == 0
            and v.self_intersection == -1
            and current.degree(v.id) <= 2
            and len(current.vertices) > 1
        )
        if not candidates:
            return current
        current = blow_down(current, candidates[0])
        if not current.is_snc():
            raise SNCViolationError(
                "blow-down produced a loop or multi-edge; the contraction "
                "sequence exits the simple-normal-crossings class"
            )


# ---------------------------------------------------------------------------
# Hirzebruch-Jung continued fractions


@dataclass(frozen=True)
class CyclicQuotientData:
    """Coprime pair (m, q), 1 <= q < m (or m = 1, q = 0: smooth point)."""

    m: int
    q: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.m == 1:
            if self.q != 0:
                raise ValueError("the smooth point is (1, 0)")
            return
        if not (1 <= self.q < self.m):
            raise ValueError("q must satisfy 1 <= q < m")
        if math.gcd(self.m, self.q) != 1:
            raise ValueError("m and q must be coprime")

    @property
    def is_smooth(self) -> bool:
        return self.m == 1

    def dual(self) -> "CyclicQuotientData":
        """Reversal of the resolution chain: (m, q) -> (m, q') with q q' = 1 mod m."""
        if self.m == 1:
            return self
        return CyclicQuotientData(self.m, pow(self.q, -1, self.m))

    def canonical(self) -> "CyclicQuotientData":
        """Orientation-independent representative: the smaller of q and q^{-1} mod m."""
        if self.m == 1:
            return self
        return CyclicQuotientData(self.m, min(self.q, pow(self.q, -1, self.m)))


def hj_expand(data: CyclicQuotientData) -> list[int]:
    """Minus continued fraction m/q = b_1 - 1/(b_2 - ...) with all b_i >= 2."""
    if data.is_smooth:
        return []
    m, q = data.m, data.q
    out = []
    while q > 0:
        b = -(-m // q)  # ceil(m/q)
        out.append(b)
        m, q = q, b * q - m
    return out


def hj_fold(bs) -> CyclicQuotientData:
    """Evaluate a minus continued fraction exactly to coprime (m, q)."""
    bs = list(bs)
    if not bs:
        return CyclicQuotientData(1, 0)
    if any(b < 2 for b in bs):
        raise ValueError("all partial quotients must be >= 2")
    value = mpq(bs[-1])
    for b in reversed(bs[:-1]):
        value = b - 1 / value
    m, q = int(value.numerator), int(value.denominator)
    return CyclicQuotientData(m, q)


def chain_weights(graph: DualGraphDocument) -> list[int]:
    """Positive weights b_i = -self_intersection along a chain, in path order."""
    order = chain_order(graph)
    weights = []
    for vid in order:
        v = graph.vertex(vid)
        if v.genus != 0:
            raise GraphStructureError("chain weights require rational components")
        if v.self_intersection >= -1:
            raise GraphStructureError(
                f"vertex {vid} has self-intersection {v.self_intersection} > -2; "
                "take the minimal negative model first"
            )
        weights.append(-v.self_intersection)
    return weights


def hj_chain_graph(bs, first_id: int = 0) -> DualGraphDocument:
    """Chain of rational curves with self-intersections -b_i."""
    vertices = tuple(Vertex(first_id + i, 0, -b) for i, b in enumerate(bs))
    edges = tuple((first_id + i, first_id + i + 1) for i in range(len(bs) - 1))
    return DualGraphDocument(vertices, edges)
