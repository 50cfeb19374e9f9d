"""Resonance analysis, equivariant Poincare-Dulac normalization, Koenigs
linearization, and the congruence case analysis for germs over cyclic
quotient singularities.

Two normalization routes are implemented.  A diagonal linear part gets the
classical coefficient-wise treatment: resonant monomials are kept, the rest
are removed degree by degree by conjugating with near-identity maps whose
nonlinear parts solve the homological equation; all of those maps are
projected onto the group-equivariant lattice, so the accumulated conjugacy
commutes with the group exactly.  A non-diagonal linear part is accepted only
when the homological operator H -> H o A - A o H is invertible in every
degree (no resonance); the normal form is then the linear part itself, and
the conjugacy is made equivariant afterwards by averaging over the group,
which is legitimate precisely because the normal form is linear.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from gmpy2 import mpq

from .errors import (
    CassisError,
    DimensionMismatchError,
    NonAttractingError,
    NotEquivariantError,
    UnsupportedJordanError,
)
from .jets import (
    DiagonalGroup,
    Jet,
    _pmul,
    _sorted_items,
    check_commutes,
    compose,
    equivariant_average,
    invert,
    monomials_of_degree,
    monomials_up_to,
)
from .scalars import EXACT, FLOAT, FLOAT_TOLERANCE, is_exact, scalar_abs, scalar_is_zero

Exponents = tuple[int, ...]


# ---------------------------------------------------------------------------
# resonances


@dataclass(frozen=True)
class ResonanceReport:
    """Exhaustive resonance scan for an attracting spectrum up to a fixed degree."""

    eigenvalues: tuple
    order: int
    resonant: tuple[tuple[Exponents, int], ...]
    no_resonance_beyond: int
    all_clear: bool
    exhaustive: bool

    def resonant_set(self) -> set[tuple[Exponents, int]]:
        return set(self.resonant)


def _require_attracting(lambdas, tol: float) -> None:
    for lam in lambdas:
        r = scalar_abs(lam)
        if r >= 1.0 or r == 0.0:
            raise NonAttractingError(
                f"eigenvalue of modulus {r} is outside the attracting range (0, 1)"
            )


def _modulus_degree_bound(lambdas) -> int:
    """Largest total degree at which |lambda^n| >= min |lambda_i| can still hold."""
    if all(is_exact(lam) and not hasattr(lam, "coeffs") for lam in lambdas):
        moduli = [abs(mpq(lam)) for lam in lambdas]
        r_max, r_min = max(moduli), min(moduli)
        bound = 1
        power = r_max
        while power * r_max >= r_min:
            power *= r_max
            bound += 1
        return bound
    moduli = [scalar_abs(lam) for lam in lambdas]
    r_max, r_min = max(moduli), min(moduli)
    # tiny slack keeps the float bound conservative (never undercounts degrees)
    return max(1, math.floor(math.log(r_min) / math.log(r_max) + 1e-9))


def resonances(lambdas, order: int, tol: float = FLOAT_TOLERANCE) -> ResonanceReport:
    """All pairs (n, k) with lambda^n = lambda_k and 2 <= deg(n) <= order.

    The spectrum must be attracting; the report also carries the degree bound
    beyond which no resonance can exist (so the finite scan is provably
    complete once order reaches that bound).
    """
    lambdas = tuple(lambdas)
    if not lambdas:
        raise ValueError("empty spectrum")
    _require_attracting(lambdas, tol)
    dim = len(lambdas)
    exact = all(is_exact(lam) for lam in lambdas)
    found = []
    for n in monomials_up_to(dim, order, min_degree=2):
        value = _power(lambdas, n)
        for k, lam in enumerate(lambdas):
            if exact:
                hit = value == lam
            else:
                hit = abs(value - lam) <= tol
            if hit:
                found.append((n, k))
    bound = _modulus_degree_bound(lambdas)
    return ResonanceReport(
        eigenvalues=lambdas,
        order=order,
        resonant=tuple(found),
        no_resonance_beyond=bound,
        all_clear=not found,
        exhaustive=order >= bound,
    )


def _power(lambdas, n: Exponents):
    value = None
    for lam, e in zip(lambdas, n):
        if e:
            term = lam**e
            value = term if value is None else value * term
    assert value is not None
    return value


# ---------------------------------------------------------------------------
# equivariance lattice


def equivariance_lattice(group: DiagonalGroup, n: Exponents, k: int, twist: int = 1) -> bool:
    """True iff x^n may appear in coordinate k of a germ f with f o gamma = gamma^twist o f."""
    q = group.weights
    if len(n) != group.dim:
        raise DimensionMismatchError("exponent tuple does not match the group dimension")
    return (sum(qq * e for qq, e in zip(q, n)) - twist * q[k]) % group.order == 0


# ---------------------------------------------------------------------------
# homological equation, diagonal case


def homological_split(g_hom: Jet, linear: Jet, tol: float = FLOAT_TOLERANCE):
    """Split G = S + (H o A - A o H) with S supported on resonant monomials.

    A must be diagonal with attracting spectrum; G homogeneous of one degree.
    Returns (S, H).
    """
    mat = linear.linear_matrix()
    dim = g_hom.dim
    exact = g_hom.mode == EXACT
    zero_tol = 0.0 if exact else tol
    for i in range(dim):
        for j in range(dim):
            if i != j and not scalar_is_zero(mat[i][j], zero_tol):
                raise ValueError("homological_split requires a diagonal linear part")
    lambdas = tuple(mat[i][i] for i in range(dim))
    _require_attracting(lambdas, tol)
    degrees = {sum(n) for poly in g_hom.coords for n in poly}
    if len(degrees) > 1:
        raise ValueError("input must be homogeneous of a single degree")
    s_coords = []
    h_coords = []
    for k, poly in enumerate(g_hom.coords):
        s_poly = {}
        h_poly = {}
        for n, c in poly.items():
            denom = _power(lambdas, n) - lambdas[k]
            if (denom == 0) if exact else (scalar_abs(denom) <= tol):
                s_poly[n] = c
            else:
                if scalar_is_zero(denom, 0.0):
                    raise CassisError(
                        "vanishing homological denominator on a non-resonant monomial"
                    )
                h_poly[n] = c / denom
        s_coords.append(s_poly)
        h_coords.append(h_poly)
    s = Jet(dim, g_hom.order, tuple(s_coords), g_hom.mode)
    h = Jet(dim, g_hom.order, tuple(h_coords), g_hom.mode)
    return s, h


# ---------------------------------------------------------------------------
# homological equation, general linear part (resonance-free only)


def _solve_homological_general(g_hom: Jet, linear: Jet, degree: int, tol: float) -> Jet:
    """Solve H o A - A o H = G on the degree-`degree` coefficient space.

    Raises UnsupportedJordanError when the operator is singular, which is the
    resonant-Jordan situation that is out of scope.
    """
    dim = g_hom.dim
    mode = g_hom.mode
    monos = monomials_of_degree(dim, degree)
    basis = [(k, n) for k in range(dim) for n in monos]
    index = {b: i for i, b in enumerate(basis)}
    size = len(basis)
    amat = linear.linear_matrix()
    zero = mpq(0) if mode == EXACT else complex(0)
    one = mpq(1) if mode == EXACT else complex(1)
    columns = []
    for k, n in basis:
        e_jet = Jet(dim, degree, tuple({n: one} if i == k else {} for i in range(dim)), mode)
        ha = compose(e_jet, linear, degree)
        col = [zero] * size
        for kk, poly in enumerate(ha.coords):
            for nn, c in poly.items():
                if sum(nn) == degree:
                    col[index[(kk, nn)]] = col[index[(kk, nn)]] + c
        # subtract A o E: coordinate i gets amat[i][k] * x^n
        for i in range(dim):
            c = amat[i][k]
            if not scalar_is_zero(c, 0.0):
                col[index[(i, n)]] = col[index[(i, n)]] - c
        columns.append(col)
    rhs = [zero] * size
    for k, poly in enumerate(g_hom.coords):
        for n, c in poly.items():
            rhs[index[(k, n)]] = c
    solution = _solve_dense([[columns[j][i] for j in range(size)] for i in range(size)], rhs, mode, tol)
    h_coords = [dict() for _ in range(dim)]
    for (k, n), value in zip(basis, solution):
        if not scalar_is_zero(value, 0.0):
            h_coords[k][n] = value
    return Jet(dim, g_hom.order, tuple(h_coords), mode)


def _solve_dense(matrix, rhs, mode: str, tol: float):
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    pivot_tol = 0.0 if mode == EXACT else 1e-13
    for col in range(n):
        pivot = None
        if mode == EXACT:
            for row in range(col, n):
                if not scalar_is_zero(a[row][col], 0.0):
                    pivot = row
                    break
        else:
            best = pivot_tol
            for row in range(col, n):
                mag = scalar_abs(a[row][col])
                if mag > best:
                    best = mag
                    pivot = row
        if pivot is None:
            raise UnsupportedJordanError(
                "homological operator is singular: resonant non-diagonal linear part"
            )
        a[col], a[pivot] = a[pivot], a[col]
        scale = a[col][col]
        a[col] = [x / scale for x in a[col]]
        for row in range(n):
            if row != col and not scalar_is_zero(a[row][col], 0.0):
                factor = a[row][col]
                a[row] = [x - factor * y for x, y in zip(a[row], a[col])]
    return [a[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# Poincare-Dulac


@dataclass(frozen=True)
class NormalFormResult:
    """Outcome of an equivariant normalization run."""

    normal_form: Jet
    conjugacy: Jet
    residual_norm: float
    group: DiagonalGroup
    k_twist: int
    resonance_report: ResonanceReport | None
    group_residual_norm: float
    path: str

    @property
    def residual_is_zero(self) -> bool:
        return self.residual_norm == 0.0


def _is_diagonal(mat, mode: str, tol: float) -> bool:
    zero_tol = 0.0 if mode == EXACT else tol
    d = len(mat)
    return all(
        scalar_is_zero(mat[i][j], zero_tol) for i in range(d) for j in range(d) if i != j
    )


def _complex_eigenvalues(mat) -> list[complex]:
    from .scalars import as_complex

    d = len(mat)
    a = [[as_complex(x) for x in row] for row in mat]
    if d == 1:
        return [a[0][0]]
    if d == 2:
        tr = a[0][0] + a[1][1]
        det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
        disc = cmath.sqrt(tr * tr - 4 * det)
        return [(tr + disc) / 2, (tr - disc) / 2]
    if d == 3:
        # characteristic polynomial x^3 - c2 x^2 + c1 x - c0
        c2 = a[0][0] + a[1][1] + a[2][2]
        c1 = (
            a[0][0] * a[1][1]
            - a[0][1] * a[1][0]
            + a[0][0] * a[2][2]
            - a[0][2] * a[2][0]
            + a[1][1] * a[2][2]
            - a[1][2] * a[2][1]
        )
        c0 = (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        )
        return _cubic_roots(c2, c1, c0)
    raise ValueError("eigenvalues implemented for dimension <= 3 only")


def _cubic_roots(c2: complex, c1: complex, c0: complex) -> list[complex]:
    # roots of x^3 - c2 x^2 + c1 x - c0 via the depressed cubic
    p = c1 - c2 * c2 / 3
    q = 2 * c2**3 / 27 - c2 * c1 / 3 + c0
    disc = cmath.sqrt((q / 2) ** 2 + (p / 3) ** 3)
    u3 = -q / 2 + disc
    if abs(u3) < 1e-300:
        u3 = -q / 2 - disc
    u = u3 ** (1 / 3)
    if abs(u) < 1e-300:
        return [c2 / 3] * 3
    omega = cmath.exp(2j * cmath.pi / 3)
    roots = []
    for k in range(3):
        uk = u * omega**k
        roots.append(uk - p / (3 * uk) + c2 / 3)
    return roots


def poincare_dulac(
    f: Jet,
    group: DiagonalGroup | None = None,
    k_twist: int = 1,
    order: int | None = None,
    tol: float = FLOAT_TOLERANCE,
) -> NormalFormResult:
    """Equivariant Poincare-Dulac normalization of an attracting germ.

    The germ must commute with the group up to the stated twist:
    f o gamma = gamma^k_twist o f (checked; rejected otherwise).  The returned
    conjugacy Phi has identity linear part, commutes with the group, and
    satisfies Phi o f = f_tilde o Phi through the truncation order with
    exactly-zero residual in exact mode.
    """
    if group is None:
        group = DiagonalGroup(1, tuple(0 for _ in range(f.dim)))
    if group.dim != f.dim:
        raise DimensionMismatchError("group and jet dimensions differ")
    order = f.order if order is None else order
    if order > f.order:
        raise ValueError(f"jet truncated at {f.order} cannot be normalized to order {order}")
    p = group.order
    k_twist %= p
    if math.gcd(k_twist, p) != 1:
        raise ValueError("the twist must be invertible modulo the group order")
    residual = check_commutes(f, group, k_twist)
    if not residual.is_zero(tol):
        raise NotEquivariantError(
            "germ does not satisfy f o gamma = gamma^k o f for the stated twist"
        )
    f = f.truncated(order)
    mat = f.linear_matrix()
    linear = Jet.from_linear(mat, order, f.mode)
    if _is_diagonal(mat, f.mode, tol):
        lambdas = tuple(mat[i][i] for i in range(f.dim))
        _require_attracting(lambdas, tol)
        report = resonances(lambdas, order, tol)
        f_tilde, conj = _normalize_diagonal(f, linear, lambdas, group, k_twist, order, tol)
        path = "diagonal"
    else:
        eigs = _complex_eigenvalues(mat)
        for lam in eigs:
            if abs(lam) >= 1.0 or lam == 0:
                raise NonAttractingError(
                    f"eigenvalue of modulus {abs(lam)} is outside the attracting range (0, 1)"
                )
        report = None
        f_tilde, conj = _normalize_generic(f, linear, group, order, tol)
        path = "generic"
    res = compose(conj, f, order) - compose(f_tilde, conj, order)
    group_res = max(
        check_commutes(f_tilde, group, k_twist).max_abs_coefficient(),
        check_commutes(conj, group, 1).max_abs_coefficient(),
    )
    return NormalFormResult(
        normal_form=f_tilde,
        conjugacy=conj,
        residual_norm=res.max_abs_coefficient(),
        group=group,
        k_twist=k_twist,
        resonance_report=report,
        group_residual_norm=group_res,
        path=path,
    )


def _normalize_diagonal(f, linear, lambdas, group, k_twist, order, tol):
    ident = Jet.identity(f.dim, order, f.mode)
    fcur = f
    conj = ident
    for degree in range(2, order + 1):
        g_hom = fcur.homogeneous_part(degree)
        if g_hom.is_zero(0.0):
            continue
        _, h = homological_split(g_hom, linear, tol)
        # the resonant part stays in fcur by itself; only H drives the update.
        # The projection is a no-op for exactly equivariant input but pins the
        # support in floating mode.
        h = equivariant_average(h, group, 1, 1)
        if h.is_zero(0.0):
            continue
        phi = ident - h
        psi = invert(phi, order)
        fcur = compose(phi, compose(fcur, psi, order), order)
        conj = compose(phi, conj, order)
    return fcur, conj


def _normalize_generic(f, linear, group, order, tol):
    ident = Jet.identity(f.dim, order, f.mode)
    fcur = f
    conj = ident
    for degree in range(2, order + 1):
        g_hom = fcur.homogeneous_part(degree)
        if g_hom.is_zero(0.0):
            continue
        h = _solve_homological_general(g_hom, linear, degree, tol)
        phi = ident - h
        psi = invert(phi, order)
        fcur = compose(phi, compose(fcur, psi, order), order)
        conj = compose(phi, conj, order)
    if group.order > 1:
        # the normal form is linear, so averaging the conjugacy over the group
        # keeps it a conjugacy while making it commute with gamma
        conj = equivariant_average(conj, group, 1, 1)
    return fcur, conj


# ---------------------------------------------------------------------------
# Koenigs linearization along an invariant fibration


def _series_compose(series: dict, f: Jet, cap: int) -> dict:
    """Substitute the jet's coordinates into a scalar power series (dict form)."""
    g_sorted = [_sorted_items(poly) for poly in f.coords]
    unit_cache: dict[Exponents, list] = {}
    dim = f.dim
    for i in range(dim):
        unit_cache[tuple(1 if j == i else 0 for j in range(dim))] = g_sorted[i]

    def power_product(n: Exponents) -> list:
        cached = unit_cache.get(n)
        if cached is not None:
            return cached
        i = next(idx for idx, e in enumerate(n) if e)
        prev = tuple(e - 1 if idx == i else e for idx, e in enumerate(n))
        result = _sorted_items(_pmul(power_product(prev), g_sorted[i], cap))
        unit_cache[n] = result
        return result

    out: dict[Exponents, object] = {}
    for n, c in series.items():
        if sum(n) == 0:
            key = tuple(0 for _ in range(dim))
            out[key] = out.get(key, 0) + c
            continue
        if sum(n) > cap:
            continue
        for m, pc in power_product(n):
            add = c * pc
            out[m] = out[m] + add if m in out else add
    return out


def _series_mul(p: dict, q: dict, cap: int) -> dict:
    items_p = sorted(p.items(), key=lambda kv: sum(kv[0]))
    items_q = sorted(q.items(), key=lambda kv: sum(kv[0]))
    out: dict[Exponents, object] = {}
    for na, ca in items_p:
        da = sum(na)
        if da > cap:
            break
        for nb, cb in items_q:
            if da + sum(nb) > cap:
                break
            key = tuple(x + y for x, y in zip(na, nb))
            add = ca * cb
            out[key] = out[key] + add if key in out else add
    return out


def koenigs(f: Jet, order: int | None = None, tol: float = FLOAT_TOLERANCE) -> Jet:
    """Fiberwise linearization of a family (z, alpha*w*(1+eps(z,w))) with w | eps.

    Returns the jet (z, eta(z, w)) with eta o f = alpha * eta through the
    truncation order and d(eta)/dw(z, 0) = 1.  eta is the value of the
    infinite product w * prod_n (1 + eps o f^n); the product is resummed
    exactly through its multiplicative fixed-point equation, so the result is
    coefficient-exact in exact mode (any finite depth of the literal product
    would only approximate the geometric-series coefficients).
    """
    if f.dim != 2:
        raise DimensionMismatchError("koenigs expects a two-dimensional family")
    order = f.order if order is None else order
    if order > f.order:
        raise ValueError(f"jet truncated at {f.order} cannot serve order {order}")
    exact = f.mode == EXACT
    zero_tol = 0.0 if exact else tol
    first = f.coords[0]
    ident_first = {(1, 0)}
    for n, c in first.items():
        ok = n == (1, 0) and scalar_is_zero(c - 1, zero_tol)
        if not ok and not scalar_is_zero(c, zero_tol):
            raise ValueError("first coordinate must be exactly z")
    if (1, 0) not in first:
        raise ValueError("first coordinate must be exactly z")
    second = f.coords[1]
    alpha = second.get((0, 1))
    if alpha is None or scalar_is_zero(alpha, zero_tol):
        raise ValueError("second coordinate must have a nonzero linear w term")
    mod_alpha = scalar_abs(alpha)
    if mod_alpha >= 1.0:
        raise NonAttractingError(f"|alpha| = {mod_alpha} must be < 1")
    eps: dict[Exponents, object] = {}
    for n, c in second.items():
        i, j = n
        if j == 0:
            raise ValueError("w must divide the second coordinate")
        if n == (0, 1):
            continue
        if j == 1:
            raise ValueError("w must divide eps: no z^i*w terms besides alpha*w allowed")
        eps[(i, j - 1)] = c / alpha
    f = f.truncated(order)

    # P solves P = (1+eps) * (P o f), P(0) = 1; eta = w * P
    cap = order - 1
    p_series: dict[Exponents, object] = {(0, 0): mpq(1) if exact else complex(1)}
    alpha_pows = {0: mpq(1) if exact else complex(1)}

    def apow(j):
        if j not in alpha_pows:
            alpha_pows[j] = apow(j - 1) * alpha
        return alpha_pows[j]

    for degree in range(1, cap + 1):
        comp = _series_compose(p_series, f, degree)
        rhs = dict(comp)
        for key, value in _series_mul(eps, comp, degree).items():
            rhs[key] = rhs[key] + value if key in rhs else value
        for n in monomials_of_degree(2, degree):
            i, j = n
            known = rhs.get(n)
            if known is None or scalar_is_zero(known, 0.0):
                continue
            if j == 0:
                if not scalar_is_zero(known, zero_tol):
                    raise CassisError("w-free coefficient appeared in the Koenigs cofactor")
                continue
            p_series[n] = known / (1 - apow(j))

    eta = {(i, j + 1): c for (i, j), c in p_series.items() if i + j + 1 <= order}
    coords = ({(1, 0): mpq(1) if exact else complex(1)}, eta)
    return Jet(2, order, coords, f.mode)


# ---------------------------------------------------------------------------
# congruence case analysis for cyclic-quotient germs


class HJGermKind(Enum):
    DIAGONAL_PAIR = "diagonal-pair"
    RESONANT_TRIANGULAR = "resonant-triangular"
    ANTI_DIAGONAL = "anti-diagonal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class HJGermCase:
    """Structural constraints on a contracting germ over the quotient by
    gamma = (zeta z, zeta^q w) that commutes up to the twist gamma^k."""

    kind: HJGermKind
    case_label: str
    m: int
    q: int
    k: int
    linear_constraint: str
    resonant_residue: int | None = None

    @property
    def feasible(self) -> bool:
        return self.kind is not HJGermKind.INFEASIBLE


def classify_hj_germ(m: int, q: int, k: int = 1) -> HJGermCase:
    """Case analysis of d f(0) for germs with f o gamma = gamma^k o f.

    Writing gamma = (zeta z, zeta^q w) for a primitive m-th root of unity,
    the commutation at linear level forces one of: (a) k = q = 1 (mod m),
    any invertible contracting matrix; (b) k = 1, q != 1, diagonal matrix,
    with a resonant term z^u admissible exactly when u = q (mod m);
    (c) k = q != 1 with q^2 = 1 (mod m), anti-diagonal matrix.
    """
    if m < 1:
        raise ValueError("group order m must be >= 1")
    if math.gcd(q, m) != 1:
        raise ValueError("q must be coprime with m")
    if math.gcd(k, m) != 1:
        raise ValueError("the twist k must be coprime with m")
    qn = q % m
    kn = k % m
    one = 1 % m
    if kn == one and qn == one:
        return HJGermCase(
            kind=HJGermKind.DIAGONAL_PAIR,
            case_label="a",
            m=m,
            q=qn,
            k=kn,
            linear_constraint="any invertible contracting matrix (the group acts by homotheties)",
            resonant_residue=qn,
        )
    if kn == one:
        return HJGermCase(
            kind=HJGermKind.DIAGONAL_PAIR,
            case_label="b",
            m=m,
            q=qn,
            k=kn,
            linear_constraint="diagonal (off-diagonal entries forced to zero)",
            resonant_residue=qn,
        )
    if kn == qn and (qn * qn) % m == one:
        return HJGermCase(
            kind=HJGermKind.ANTI_DIAGONAL,
            case_label="c",
            m=m,
            q=qn,
            k=kn,
            linear_constraint="anti-diagonal (diagonal entries forced to zero); spectrum has opposite eigenvalues, hence no resonance",
        )
    return HJGermCase(
        kind=HJGermKind.INFEASIBLE,
        case_label="-",
        m=m,
        q=qn,
        k=kn,
        linear_constraint="no invertible linear part satisfies the commutation congruences",
    )


def refine_hj_germ_kind(case: HJGermCase, germ: Jet, tol: float = FLOAT_TOLERANCE) -> HJGermKind:
    """Refine a case-(b) verdict using an actual germ: triangular when a
    resonant z^u term is present."""
    if case.kind is not HJGermKind.DIAGONAL_PAIR or case.case_label != "b":
        return case.kind
    for n, c in germ.coords[1].items():
        if n[1] == 0 and n[0] >= 2 and not scalar_is_zero(c, tol):
            return HJGermKind.RESONANT_TRIANGULAR
    return HJGermKind.DIAGONAL_PAIR
