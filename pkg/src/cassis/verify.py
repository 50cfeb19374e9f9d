"""Self-contained verification suite: every check is a pure function that
generates its own (seeded) data, exercises one advertised guarantee of the
package, and reports pass/fail with a one-line detail.  The CLI `verify`
subcommand runs all of them and exits 0 iff everything passes.

Checks that compare two computational routes keep the oracle route inside
this module, implemented independently of the library path it validates.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

from gmpy2 import mpq

from .classify import (
    AdmissibleDataDocument,
    BundleSpec,
    ClassificationKind,
    OrbitSurfaceKind,
    classify_orbit_surface,
    classify_singularity,
)
from .dual_graph import (
    CyclicQuotientData,
    DualGraphDocument,
    DynamicsAnnotations,
    Vertex,
    hj_chain_graph,
    hj_expand,
    hj_fold,
    intersection_matrix,
    is_negative_definite,
)
from .errors import GraphStructureError
from .graph_dynamics import (
    CornerData,
    corner_inequality,
    cycle_obstruction,
    propagate_hyperbolicity,
)
from .jets import DiagonalGroup, Jet, check_commutes, compose, monomials_up_to
from .normal_forms import equivariance_lattice, koenigs, poincare_dulac, resonances
from .orbifold import (
    OrbifoldSurface,
    OrbifoldType,
    canonical_cover_degree,
    classify_orbifold,
    euler_characteristic,
    smooth_cover_data,
)
from .scalars import zeta


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


# ---------------------------------------------------------------------------
# shared generators


def _random_attracting_rational(rng) -> mpq:
    den = rng.randint(5, 12)
    num = rng.randint(1, den - 1)
    sign = -1 if rng.random() < 0.3 else 1
    return mpq(sign * num, den)


def _random_group(rng, max_order=12) -> DiagonalGroup:
    p = rng.randint(1, max_order)
    return DiagonalGroup(p, (rng.randint(0, p - 1), rng.randint(0, p - 1)))


def _random_equivariant_jet(rng, group, lambdas, order, density=0.5) -> Jet:
    coords = []
    for k in range(2):
        poly = {}
        for n in monomials_up_to(2, order, 2):
            if equivariance_lattice(group, n, k, 1) and rng.random() < density:
                poly[n] = mpq(rng.randint(-3, 3), rng.randint(1, 4))
        coords.append(poly)
    jet = Jet(2, order, tuple(coords))
    return jet + Jet.from_linear([[lambdas[0], 0], [0, lambdas[1]]], order)


def _brute_force_resonances(lambdas, order):
    hits = set()
    for n in monomials_up_to(2, order, min_degree=2):
        value = lambdas[0] ** n[0] * lambdas[1] ** n[1]
        for k, lam in enumerate(lambdas):
            if value == lam:
                hits.add((n, k))
    return hits


# ---------------------------------------------------------------------------
# 1. Poincare-Dulac exactness


def check_poincare_dulac_exactness(seed=101) -> tuple[bool, str]:
    rng = random.Random(seed)
    order = 8
    runs = 0
    for _ in range(50):
        group = _random_group(rng, 12)
        lambdas = (_random_attracting_rational(rng), _random_attracting_rational(rng))
        f = _random_equivariant_jet(rng, group, lambdas, order)
        result = poincare_dulac(f, group, 1, order)
        if result.residual_norm != 0.0:
            return False, f"nonzero conjugacy residual on run {runs}"
        allowed = _brute_force_resonances(lambdas, order)
        for k, poly in enumerate(result.normal_form.coords):
            for n in poly:
                if sum(n) >= 2 and (n, k) not in allowed:
                    return False, f"normal form carries non-resonant monomial {n} (run {runs})"
        if not check_commutes(result.normal_form, group, 1).is_zero(0.0):
            return False, f"normal form does not commute exactly (run {runs})"
        if not check_commutes(result.conjugacy, group, 1).is_zero(0.0):
            return False, f"conjugacy does not commute exactly (run {runs})"
        runs += 1
    return True, f"{runs} random equivariant germs normalized with exact residuals"


# ---------------------------------------------------------------------------
# 2. non-resonant linearization


def check_nonresonant_linearization(seed=202) -> tuple[bool, str]:
    rng = random.Random(seed)
    order = 8
    done = 0
    while done < 20:
        lambdas = (_random_attracting_rational(rng), _random_attracting_rational(rng))
        if _brute_force_resonances(lambdas, order):
            continue
        group = _random_group(rng, 9)
        f = _random_equivariant_jet(rng, group, lambdas, order)
        result = poincare_dulac(f, group, 1, order)
        linear = Jet.from_linear([[lambdas[0], 0], [0, lambdas[1]]], order)
        if result.normal_form != linear:
            return False, f"normal form not linear for resonance-free spectrum {lambdas}"
        done += 1
    return True, f"{done} resonance-free spectra linearized exactly"


# ---------------------------------------------------------------------------
# 3. Koenigs equivalence


def _koenigs_oracle(f: Jet, order: int) -> Jet:
    """Independent route: solve eta o f = alpha*eta degree by degree with
    d(eta)/dw(z,0) = 1."""
    alpha = f.coords[1][(0, 1)]
    eta = {(0, 1): mpq(1)}
    for degree in range(2, order + 1):
        eta_jet = Jet(2, order, ({(1, 0): mpq(1)}, dict(eta)))
        lhs = compose(eta_jet, f, degree).coords[1]
        for n in monomials_up_to(2, degree, degree):
            i, j = n
            known = lhs.get(n, mpq(0)) - (alpha**j) * eta.get(n, mpq(0))
            if j == 1:
                if known != 0:
                    raise AssertionError("oracle inconsistency at a w-linear term")
                continue
            value = known / (alpha - alpha**j)
            if value != 0:
                eta[n] = value
    return Jet(2, order, ({(1, 0): mpq(1)}, eta))


def check_koenigs_equivalence(seed=303) -> tuple[bool, str]:
    rng = random.Random(seed)
    order = 10
    # hand case first: alpha = 1/2, eps = w gives w^2 coefficient exactly 2
    a = mpq(1, 2)
    hand = Jet(2, order, ({(1, 0): mpq(1)}, {(0, 1): a, (0, 2): a}))
    eta_hand = koenigs(hand, order)
    if eta_hand.coefficient(1, (0, 2)) != 2:
        return False, "hand case w^2 coefficient is not exactly 2"
    for run in range(20):
        m = rng.randint(1, 9)
        q = rng.choice([x for x in range(m)] or [0])
        group = DiagonalGroup(m, (1, q))
        alpha = _random_attracting_rational(rng)
        # equivariant eps: monomials z^i w^j (j >= 1) with i + q*j = 0 mod m
        second = {(0, 1): alpha}
        for n in monomials_up_to(2, order - 1, 1):
            i, j = n
            if j < 1 or rng.random() > 0.4:
                continue
            if (i + q * j) % m:
                continue
            second[(i, j + 1)] = alpha * mpq(rng.randint(-2, 2), rng.randint(1, 3))
        f = Jet(2, order, ({(1, 0): mpq(1)}, second))
        eta = koenigs(f, order)
        oracle = _koenigs_oracle(f, order)
        if eta != oracle:
            return False, f"product route disagrees with the conjugacy oracle (run {run})"
        scaled = Jet(2, order, ({(1, 0): mpq(1)}, {n: alpha * c for n, c in eta.coords[1].items()}))
        if not (compose(eta, f, order) - scaled).is_zero(0.0):
            return False, f"eta o f != alpha*eta (run {run})"
        gamma = Jet.from_linear([[zeta(m), 0], [0, zeta(m, q)]], order)
        lhs = compose(eta, gamma, order)
        zq = zeta(m, q)
        rhs = Jet(2, order, (lhs.coords[0], {n: zq * c for n, c in eta.coords[1].items()}))
        if lhs.coords[1] != rhs.coords[1]:
            return False, f"eta o gamma != zeta^q * eta (run {run})"
    return True, "20 equivariant families: product route = conjugacy oracle, exact"


# ---------------------------------------------------------------------------
# 4. Hirzebruch-Jung round trip


def check_hj_roundtrip(limit=200) -> tuple[bool, str]:
    pairs = 0
    for m in range(2, limit + 1):
        for q in range(1, m):
            if math.gcd(m, q) != 1:
                continue
            data = CyclicQuotientData(m, q)
            bs = hj_expand(data)
            if any(b < 2 for b in bs):
                return False, f"partial quotient < 2 for ({m}, {q})"
            if hj_fold(bs) != data:
                return False, f"fold(expand({m}, {q})) round trip failed"
            if not is_negative_definite(intersection_matrix(hj_chain_graph(bs))):
                return False, f"chain for ({m}, {q}) is not negative definite"
            pairs += 1
    return True, f"{pairs} coprime pairs round-tripped with negative-definite chains"


# ---------------------------------------------------------------------------
# 5. cycle exclusion


def check_cycle_exclusion(seed=505, runs=1000) -> tuple[bool, str]:
    rng = random.Random(seed)
    for run in range(runs):
        n = rng.randint(2, 8)
        lambdas = [mpq(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(n)]
        orders = [rng.randint(1, 6) for _ in range(n)]
        corners = [
            CornerData(
                edge=(j, (j + 1) % n),
                mod_lambda=lambdas[j],
                mod_mu=1 / lambdas[(j + 1) % n],
                a_e=orders[j],
                a_e_prime=orders[(j + 1) % n],
            )
            for j in range(n)
        ]
        cert = cycle_obstruction(corners)
        if cert.telescoping_product != 1 or not cert.sum_is_zero:
            return False, f"telescoping product != 1 on run {run}"
    return True, f"{runs} matched cycles certified infeasible (product exactly 1)"


# ---------------------------------------------------------------------------
# 6. propagation soundness


def _random_star(rng, max_legs=5, max_len=4):
    vertices = [Vertex(0, 0, -rng.randint(2, 5))]
    edges = []
    orders = {0: rng.randint(1, 4)}
    nid = 1
    for _ in range(rng.randint(3, max_legs)):
        prev = 0
        for _ in range(rng.randint(1, max_len)):
            vertices.append(Vertex(nid, 0, -rng.randint(2, 5)))
            edges.append((prev, nid))
            orders[nid] = rng.randint(1, 4)
            prev = nid
            nid += 1
    return DualGraphDocument(tuple(vertices), tuple(edges)), orders


def _leg_moduli(rng, graph, labeling, orders):
    """Moduli assignment consistent with a contraction: along each leg the
    normalized log-moduli strictly decrease outward."""
    corners = []
    for corner in labeling.corners:
        closer, farther = corner.edge
        corners.append((dict(labeling.distances)[farther], closer, farther))
    corners.sort()
    rho = {}  # farther-side modulus at the corner entered from `closer`
    data = []
    for _, closer, farther in corners:
        a_close = orders[closer]
        a_far = orders[farther]
        if closer == labeling.center:
            lam = mpq(1)
            mu = mpq(rng.randint(1, 7), rng.randint(8, 15))
        else:
            lam = 1 / rho[closer]
            prev = rho[closer]
            # rho_far < rho_close^(a_far / a_close), satisfied by
            # prev^ceil(a_far/a_close) / 2
            mu = prev ** math.ceil(a_far / a_close) / 2
        rho[farther] = mu
        data.append(CornerData((closer, farther), lam, mu, a_close, a_far))
    return data


def check_propagation_soundness(seed=606, runs=200) -> tuple[bool, str]:
    rng = random.Random(seed)
    for run in range(runs):
        graph, orders = _random_star(rng)
        labeling = propagate_hyperbolicity(graph, 0)
        non_center = [v for v, lab in labeling.labels if v != 0]
        if len(non_center) != len(graph.vertices) - 1:
            return False, f"labeling size mismatch on run {run}"
        for corner in _leg_moduli(rng, graph, labeling, orders):
            if not corner_inequality(corner):
                return False, f"corner inequality failed at {corner.edge} on run {run}"
    # rejection side: a second branch point, and a cycle
    vertices = tuple(Vertex(i, 0, -2) for i in range(7))
    two_branch = DualGraphDocument(
        vertices, ((0, 1), (0, 5), (0, 6), (1, 2), (2, 3), (2, 4))
    )
    try:
        propagate_hyperbolicity(two_branch, 0)
        return False, "failed to reject a tree with two branch points"
    except GraphStructureError:
        pass
    cycle = DualGraphDocument(
        tuple(Vertex(i, 0, -2) for i in range(4)),
        ((0, 1), (1, 2), (2, 3), (0, 3)),
    )
    try:
        propagate_hyperbolicity(cycle, 0)
        return False, "failed to reject a cycle"
    except GraphStructureError:
        pass
    return True, f"{runs} random stars labeled; corner inequalities hold; rejections fire"


# ---------------------------------------------------------------------------
# 7. orbifold table


def check_orbifold_table(seed=707, runs=500) -> tuple[bool, str]:
    rng = random.Random(seed)
    if classify_orbifold(OrbifoldSurface(0, (3,))) is not OrbifoldType.BAD:
        return False, "teardrop not classified bad"
    if classify_orbifold(OrbifoldSurface(0, (2, 5))) is not OrbifoldType.BAD:
        return False, "spindle not classified bad"
    for run in range(runs):
        genus = rng.randint(0, 3)
        marks = tuple(rng.randint(2, 9) for _ in range(rng.randint(0, 5)))
        surface = OrbifoldSurface(genus, marks)
        otype = classify_orbifold(surface)
        chi = euler_characteristic(surface)
        if otype is OrbifoldType.BAD:
            if not (genus == 0 and (len(marks) == 1 or (len(marks) == 2 and marks[0] != marks[1]))):
                return False, f"spurious bad verdict on run {run}"
            continue
        want = (
            OrbifoldType.SPHERICAL
            if chi > 0
            else OrbifoldType.EUCLIDEAN
            if chi == 0
            else OrbifoldType.HYPERBOLIC
        )
        if otype is not want:
            return False, f"sign mismatch on run {run}: chi={chi}, type={otype}"
        cover = smooth_cover_data(surface, canonical_cover_degree(surface))
        if cover.covered_genus < 0:
            return False, f"negative covered genus on run {run}"
    special = smooth_cover_data(OrbifoldSurface(0, (2, 3, 7)), 84)
    if special.covered_genus != 2:
        return False, "(2,3,7) at degree 84 did not produce a genus-2 cover"
    return True, f"{runs} random orbifolds classified; covers integral; (2,3,7) -> genus 2 at 84"


# ---------------------------------------------------------------------------
# 8. end-to-end decision table


def decision_table_documents() -> list[tuple[str, AdmissibleDataDocument, OrbitSurfaceKind, str]]:
    def star(center_self, legs, genus=0, order=1):
        vertices = [Vertex(0, genus, center_self)]
        edges = []
        nid = 1
        for leg in legs:
            prev = 0
            for s in leg:
                vertices.append(Vertex(nid, 0, s))
                edges.append((prev, nid))
                prev = nid
                nid += 1
        dyn = DynamicsAnnotations(center=0, finite_order=True, central_order=order)
        return DualGraphDocument(tuple(vertices), tuple(edges), dyn)

    chain = DualGraphDocument(
        (Vertex(0, 0, -3), Vertex(1, 0, -2)), ((0, 1),)
    )
    rows = [
        (
            "chain (cyclic quotient)",
            AdmissibleDataDocument(chain),
            OrbitSurfaceKind.HOPF,
            "-inf",
        ),
        (
            "spherical star",
            AdmissibleDataDocument(star(-2, [[-2], [-2], [-2]]), bundle=BundleSpec(-1)),
            OrbitSurfaceKind.HOPF,
            "-inf",
        ),
        (
            "euclidean star",
            AdmissibleDataDocument(star(-3, [[-2], [-2], [-2], [-2]]), bundle=BundleSpec(-1)),
            OrbitSurfaceKind.KODAIRA,
            "0",
        ),
        (
            "hyperbolic star",
            AdmissibleDataDocument(
                star(-2, [[-2], [-2, -2], [-3, -2, -2]], order=2), bundle=BundleSpec(-1)
            ),
            OrbitSurfaceKind.PROPERLY_ELLIPTIC,
            "1",
        ),
    ]
    return rows


def check_decision_table() -> tuple[bool, str]:
    for name, doc, want_kind, want_kappa in decision_table_documents():
        classification = classify_singularity(doc)
        verdict = classify_orbit_surface(classification)
        if verdict.kind is not want_kind or verdict.kodaira_dimension != want_kappa:
            return False, (
                f"row '{name}' gave {verdict.kind.value} (kappa {verdict.kodaira_dimension}), "
                f"wanted {want_kind.value} (kappa {want_kappa})"
            )
        if not verdict.non_kahler:
            return False, f"row '{name}' lost the non-Kahler flag"
    return True, "all four reachable rows map to Hopf/Hopf/Kodaira/kappa=1"


# ---------------------------------------------------------------------------
# runner


CHECKS = [
    ("poincare-dulac-exactness", check_poincare_dulac_exactness, 30.0),
    ("nonresonant-linearization", check_nonresonant_linearization, None),
    ("koenigs-equivalence", check_koenigs_equivalence, None),
    ("hj-roundtrip", check_hj_roundtrip, 10.0),
    ("cycle-exclusion", check_cycle_exclusion, None),
    ("propagation-soundness", check_propagation_soundness, None),
    ("orbifold-table", check_orbifold_table, None),
    ("decision-table", check_decision_table, None),
]

TOTAL_BUDGET_SECONDS = 120.0


def run_all() -> list[CheckResult]:
    results = []
    for name, func, budget in CHECKS:
        start = time.perf_counter()
        try:
            passed, detail = func()
        except Exception as exc:  # a crash is a failure, not an abort
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        if passed and budget is not None and elapsed > budget:
            passed = False
            detail = f"exceeded the {budget:.0f}s budget ({elapsed:.1f}s): {detail}"
        results.append(CheckResult(name, passed, detail, elapsed))
    return results


def main(argv=None) -> int:
    start = time.perf_counter()
    results = run_all()
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:32s} {r.seconds:7.2f}s  {r.detail}")
    total = time.perf_counter() - start
    within_budget = total <= TOTAL_BUDGET_SECONDS
    status = "PASS" if within_budget else "FAIL"
    print(f"{status}  {'total-runtime':32s} {total:7.2f}s  budget {TOTAL_BUDGET_SECONDS:.0f}s")
    ok = within_budget and all(r.passed for r in results)
    return 0 if ok else 1
