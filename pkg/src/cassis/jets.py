"""Truncated polynomial self-maps of (C^d, 0) and diagonal cyclic group actions.

A :class:`Jet` stores, for each coordinate, a sparse map from exponent tuples
to coefficients, with every kept monomial of total degree between 1 and the
truncation order.  Coefficients are exact (``mpq`` / ``Cyclo``) or ``complex``
depending on the jet's mode; the two never mix inside one jet.

All values are immutable after construction and every operation is pure, so
jets are safe to share between threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from gmpy2 import mpq

from . import scalars
from .errors import (
    DimensionMismatchError,
    OrderUnderflowError,
    SingularLinearPartError,
)
from .scalars import EXACT, FLOAT, FLOAT_TOLERANCE, scalar_is_zero, zeta

Exponents = tuple[int, ...]

_VAR_NAMES = ("z", "w", "v")


def monomials_of_degree(dim: int, degree: int) -> list[Exponents]:
    """All exponent tuples of the given total degree, in lexicographic order."""
    if dim == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials_of_degree(dim - 1, degree - first):
            out.append((first,) + rest)
    return out


def monomials_up_to(dim: int, order: int, min_degree: int = 1) -> list[Exponents]:
    """Exponent tuples with min_degree <= total degree <= order, graded-lex."""
    out = []
    for deg in range(min_degree, order + 1):
        out.extend(monomials_of_degree(dim, deg))
    return out


def _zero_scalar(mode: str):
    return complex(0) if mode == FLOAT else mpq(0)


def _one_scalar(mode: str):
    return complex(1) if mode == FLOAT else mpq(1)


@dataclass(frozen=True)
class DiagonalGroup:
    """Cyclic group generated by Diag(zeta^q_1, ..., zeta^q_d), zeta = exp(2*pi*i/order)."""

    order: int
    weights: tuple[int, ...]

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("group order must be >= 1")
        object.__setattr__(self, "weights", tuple(q % self.order for q in self.weights))

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def is_effective(self) -> bool:
        import math

        return math.gcd(self.order, *self.weights) == 1

    def zeta_power(self, j: int, mode: str = EXACT):
        return zeta(self.order, j % self.order, mode)

    def to_json_dict(self) -> dict:
        return {"order": self.order, "weights": list(self.weights)}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "DiagonalGroup":
        return cls(order=int(obj["order"]), weights=tuple(int(q) for q in obj["weights"]))


@dataclass(frozen=True)
class Jet:
    """Polynomial self-map germ of (C^dim, 0) truncated at total degree `order`."""

    dim: int
    order: int
    coords: tuple
    mode: str = EXACT

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if self.order < 1:
            raise ValueError("truncation order must be >= 1")
        clean = []
        for poly in self.coords:
            entry = {}
            for n, c in poly.items():
                if len(n) != self.dim:
                    raise ValueError(f"exponent tuple {n} has wrong length")
                deg = sum(n)
                if deg == 0:
                    if not scalar_is_zero(c, 0.0):
                        raise ValueError("jets must fix the origin (no constant term)")
                    continue
                if deg > self.order:
                    continue
                if self.mode == FLOAT:
                    if not isinstance(c, (int, float, complex)):
                        raise ValueError("float-mode jet given an exact coefficient")
                    c = complex(c)
                else:
                    if isinstance(c, (float, complex)):
                        raise ValueError("exact-mode jet given a floating coefficient")
                    if isinstance(c, int):
                        c = mpq(c)
                if not _is_exact_zero(c):
                    entry[tuple(n)] = c
            clean.append(entry)
        if len(clean) != self.dim:
            raise ValueError("need one coordinate polynomial per dimension")
        object.__setattr__(self, "coords", tuple(clean))

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, dim: int, order: int, mode: str = EXACT) -> "Jet":
        one = _one_scalar(mode)
        coords = tuple({_unit(dim, i): one} for i in range(dim))
        return cls(dim, order, coords, mode)

    @classmethod
    def from_linear(cls, matrix, order: int, mode: str = EXACT) -> "Jet":
        """Jet of the linear map with the given row-major matrix (rows = output coords)."""
        dim = len(matrix)
        coords = []
        for row in matrix:
            if len(row) != dim:
                raise ValueError("matrix must be square")
            coords.append({_unit(dim, j): row[j] for j in range(dim)})
        return cls(dim, order, tuple(coords), mode)

    @classmethod
    def zero(cls, dim: int, order: int, mode: str = EXACT) -> "Jet":
        return cls(dim, order, tuple({} for _ in range(dim)), mode)

    # -- accessors ------------------------------------------------------

    def coefficient(self, coord: int, n: Exponents):
        return self.coords[coord].get(tuple(n), _zero_scalar(self.mode))

    def linear_matrix(self) -> tuple:
        units = [_unit(self.dim, j) for j in range(self.dim)]
        return tuple(
            tuple(self.coords[k].get(u, _zero_scalar(self.mode)) for u in units)
            for k in range(self.dim)
        )

    def homogeneous_part(self, degree: int) -> "Jet":
        coords = tuple(
            {n: c for n, c in poly.items() if sum(n) == degree} for poly in self.coords
        )
        return Jet(self.dim, self.order, coords, self.mode)

    def truncated(self, order: int) -> "Jet":
        coords = tuple(
            {n: c for n, c in poly.items() if sum(n) <= order} for poly in self.coords
        )
        return Jet(self.dim, order, coords, self.mode)

    def support(self):
        """Sorted (coord, exponents) pairs carrying nonzero coefficients."""
        out = []
        for k, poly in enumerate(self.coords):
            for n in poly:
                out.append((k, n))
        out.sort(key=lambda kn: (kn[0], sum(kn[1]), kn[1]))
        return out

    def max_abs_coefficient(self) -> float:
        best = 0.0
        for poly in self.coords:
            for c in poly.values():
                best = max(best, scalars.scalar_abs(c))
        return best

    def is_zero(self, tol: float = FLOAT_TOLERANCE) -> bool:
        if self.mode == EXACT:
            return all(not poly for poly in self.coords)
        return self.max_abs_coefficient() <= tol

    def is_linear(self, tol: float = 0.0) -> bool:
        for poly in self.coords:
            for n, c in poly.items():
                if sum(n) > 1 and not scalar_is_zero(c, tol):
                    return False
        return True

    # -- arithmetic -------------------------------------------------------

    def _check_compatible(self, other: "Jet"):
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimension {self.dim} vs {other.dim}")
        if self.mode != other.mode:
            raise ValueError(f"cannot mix {self.mode} and {other.mode} jets")

    def __add__(self, other: "Jet") -> "Jet":
        self._check_compatible(other)
        order = min(self.order, other.order)
        coords = []
        for p, q in zip(self.coords, other.coords):
            out = dict(p)
            for n, c in q.items():
                out[n] = out.get(n, _zero_scalar(self.mode)) + c
            coords.append(out)
        return Jet(self.dim, order, tuple(coords), self.mode)

    def __sub__(self, other: "Jet") -> "Jet":
        return self + other.scale(-1)

    def scale(self, factor) -> "Jet":
        if self.mode == FLOAT and not isinstance(factor, (int, float, complex)):
            factor = complex(scalars.as_complex(factor))
        coords = tuple({n: c * factor for n, c in poly.items()} for poly in self.coords)
        return Jet(self.dim, self.order, coords, self.mode)

    def __str__(self):
        names = _VAR_NAMES if self.dim <= len(_VAR_NAMES) else tuple(
            f"x{i+1}" for i in range(self.dim)
        )
        parts = []
        for poly in self.coords:
            terms = []
            for n in sorted(poly, key=lambda n: (sum(n), tuple(-e for e in n))):
                c = poly[n]
                mono = "*".join(
                    names[i] if e == 1 else f"{names[i]}^{e}"
                    for i, e in enumerate(n)
                    if e
                )
                cs = str(c)
                if "+" in cs or ("-" in cs[1:]):
                    cs = f"({cs})"
                terms.append(mono if cs == "1" else f"{cs}*{mono}")
            parts.append(" + ".join(terms) if terms else "0")
        return "(" + ", ".join(parts) + ")"

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        root = _root_order(self)
        coords = []
        for poly in self.coords:
            terms = []
            for n in sorted(poly, key=lambda n: (sum(n), tuple(-e for e in n))):
                term = {"exponents": list(n)}
                term.update(scalars.scalar_to_json(poly[n]))
                terms.append(term)
            coords.append(terms)
        doc = {"dimension": self.dim, "order": self.order, "coordinates": coords}
        if root is not None:
            doc["root_order"] = root
        return doc

    @classmethod
    def from_json_dict(cls, obj: dict, mode: str = EXACT) -> "Jet":
        dim = int(obj["dimension"])
        order = int(obj["order"])
        root = obj.get("root_order")
        coords = []
        for terms in obj["coordinates"]:
            poly = {}
            for term in terms:
                n = tuple(int(e) for e in term["exponents"])
                c = scalars.scalar_from_json(term, mode, root)
                poly[n] = poly.get(n, _zero_scalar(mode)) + c
            coords.append(poly)
        return cls(dim, order, tuple(coords), mode)


def _root_order(jet: Jet) -> int | None:
    root = None
    for poly in jet.coords:
        for c in poly.values():
            if isinstance(c, scalars.Cyclo):
                root = c.order if root is None else _lcm(root, c.order)
    return root


def _lcm(a: int, b: int) -> int:
    import math

    return math.lcm(a, b)


def _unit(dim: int, i: int) -> Exponents:
    return tuple(1 if j == i else 0 for j in range(dim))


def _is_exact_zero(c) -> bool:
    if isinstance(c, (complex, float)):
        return c == 0
    return scalar_is_zero(c)


# ---------------------------------------------------------------------------
# polynomial kernels


def _pmul(p: list, q: list, cap: int) -> dict:
    """Multiply two degree-sorted item lists, truncating above total degree cap."""
    out: dict[Exponents, object] = {}
    for na, ca in p:
        da = sum(na)
        if da >= cap:
            break
        room = cap - da
        for nb, cb in q:
            if sum(nb) > room:
                break
            key = tuple(x + y for x, y in zip(na, nb))
            prod = ca * cb
            if key in out:
                out[key] = out[key] + prod
            else:
                out[key] = prod
    return out


def _sorted_items(poly: dict) -> list:
    return sorted(poly.items(), key=lambda item: sum(item[0]))


def compose(f: Jet, g: Jet, order: int) -> Jet:
    """Truncation of f(g(x)) to the given total degree.

    Both inputs must already be truncated at `order` or finer; g must fix the
    origin (guaranteed by the Jet invariant).
    """
    f._check_compatible(g)
    if order < 1:
        raise ValueError("composition order must be >= 1")
    if f.order < order or g.order < order:
        raise OrderUnderflowError(
            f"inputs truncated at {f.order} and {g.order}, need at least {order}"
        )
    dim = f.dim
    g_sorted = [_sorted_items(poly) for poly in g.coords]
    # power products g_1^n_1 * ... * g_d^n_d, built incrementally
    unit_cache: dict[Exponents, list] = {}
    for i in range(dim):
        unit_cache[_unit(dim, i)] = g_sorted[i]

    def power_product(n: Exponents) -> list:
        cached = unit_cache.get(n)
        if cached is not None:
            return cached
        i = next(idx for idx, e in enumerate(n) if e)
        prev = tuple(e - 1 if idx == i else e for idx, e in enumerate(n))
        result = _sorted_items(_pmul(power_product(prev), g_sorted[i], order))
        unit_cache[n] = result
        return result

    coords = []
    for poly in f.coords:
        acc: dict[Exponents, object] = {}
        for n, c in poly.items():
            if sum(n) > order:
                continue
            for m, pc in power_product(n):
                add = c * pc
                if m in acc:
                    acc[m] = acc[m] + add
                else:
                    acc[m] = add
        coords.append(acc)
    return Jet(dim, order, tuple(coords), f.mode)


def _linear_inverse_matrix(f: Jet):
    """Exact inverse of the linear part, as a row-major tuple matrix."""
    a = [list(row) for row in f.linear_matrix()]
    dim = f.dim
    one = _one_scalar(f.mode)
    inv = [[one if i == j else _zero_scalar(f.mode) for j in range(dim)] for i in range(dim)]
    for col in range(dim):
        pivot = None
        for row in range(col, dim):
            if not scalar_is_zero(a[row][col], 0.0 if f.mode == EXACT else 1e-14):
                pivot = row
                break
        if pivot is None:
            raise SingularLinearPartError("linear part is not invertible")
        a[col], a[pivot] = a[pivot], a[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        scale = a[col][col]
        a[col] = [x / scale for x in a[col]]
        inv[col] = [x / scale for x in inv[col]]
        for row in range(dim):
            if row != col:
                factor = a[row][col]
                if not _is_exact_zero(factor):
                    a[row] = [x - factor * y for x, y in zip(a[row], a[col])]
                    inv[row] = [x - factor * y for x, y in zip(inv[row], inv[col])]
    return tuple(tuple(row) for row in inv)


def invert(f: Jet, order: int) -> Jet:
    """Two-sided compositional inverse of f up to the given order."""
    if f.order < order:
        raise OrderUnderflowError(f"input truncated at {f.order}, need {order}")
    ainv = Jet.from_linear(_linear_inverse_matrix(f), order, f.mode)
    # nonlinear tail of f
    tail = Jet(
        f.dim,
        order,
        tuple({n: c for n, c in poly.items() if sum(n) > 1} for poly in f.coords),
        f.mode,
    )
    g = ainv
    if tail.is_zero(0.0):
        return g
    ident = Jet.identity(f.dim, order, f.mode)
    # fixed point g = A^{-1} (id - tail o g); degree k of g stabilizes after k-1 sweeps
    for _ in range(1, order):
        new = compose(ainv, ident - compose(tail, g, order), order)
        if new == g:
            break
        g = new
    return g


def apply_group(f: Jet, group: DiagonalGroup, element_power: int, side: str = "post") -> Jet:
    """gamma^j o f (side="post") or f o gamma^j (side="pre") for the group generator gamma."""
    if group.dim != f.dim:
        raise DimensionMismatchError("group and jet dimensions differ")
    j = element_power % group.order
    if j == 0:
        return f
    p = group.order
    powers = {}

    def root(t: int):
        t %= p
        if t not in powers:
            powers[t] = group.zeta_power(t, f.mode)
        return powers[t]

    coords = []
    for k, poly in enumerate(f.coords):
        out = {}
        for n, c in poly.items():
            if side == "pre":
                t = j * sum(q * e for q, e in zip(group.weights, n))
            elif side == "post":
                t = j * group.weights[k]
            else:
                raise ValueError("side must be 'pre' or 'post'")
            out[n] = c * root(t)
        coords.append(out)
    return Jet(f.dim, f.order, tuple(coords), f.mode)


def equivariant_average(
    h: Jet, group: DiagonalGroup, rho_in: int = 1, rho_out: int = 1
) -> Jet:
    """Average (1/p) sum_j gamma^{-j*rho_out} o h o gamma^{j*rho_in}.

    For a diagonal group this is a projection onto the monomials (n, k) with
    rho_in * (q . n) = rho_out * q_k  mod p, and is computed as such, which is
    exact in both modes.
    """
    if group.dim != h.dim:
        raise DimensionMismatchError("group and jet dimensions differ")
    p = group.order
    q = group.weights
    coords = []
    for k, poly in enumerate(h.coords):
        out = {}
        for n, c in poly.items():
            if (rho_in * sum(qq * e for qq, e in zip(q, n)) - rho_out * q[k]) % p == 0:
                out[n] = c
        coords.append(out)
    return Jet(h.dim, h.order, tuple(coords), h.mode)


def check_commutes(f: Jet, group: DiagonalGroup, k: int = 1) -> Jet:
    """Residual f o gamma - gamma^k o f; identically zero iff f has the stated twist."""
    return apply_group(f, group, 1, side="pre") - apply_group(f, group, k, side="post")
