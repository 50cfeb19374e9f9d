"""Scalar arithmetic for the two computation modes.

Exact mode works over the rationals extended by a root of unity: values are
either plain rationals (``gmpy2.mpq``) or ``Cyclo`` instances, i.e. elements
of Q[z]/(Phi_n(z)) for the n-th cyclotomic polynomial Phi_n, with z mapped to
exp(2*pi*i/n).  Floating mode uses plain ``complex``.

Cyclo results that happen to be rational are always demoted to ``mpq``, so
equality between "the same number" in different representations just works
and the fast rational path stays hot.
"""

from __future__ import annotations

import cmath
import math
import re

from gmpy2 import mpq

from .errors import CassisError

EXACT = "exact"
FLOAT = "float"

#: default tolerance for residual checks in floating mode
FLOAT_TOLERANCE = 1e-10

Rational = mpq


def rat(num, den=1) -> mpq:
    """Build an exact rational; accepts ints, strings like ``"3/4"``, mpq."""
    return mpq(num, den)


# ---------------------------------------------------------------------------
# cyclotomic polynomials


def _poly_divmod_int(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # exact division of integer polynomials with monic denominator
    num = list(num)
    d = len(den) - 1
    quot = [0] * (len(num) - d)
    for i in range(len(num) - 1, d - 1, -1):
        c = num[i]
        if c == 0:
            continue
        quot[i - d] = c
        for j, dj in enumerate(den):
            num[i - d + j] -= c * dj
    while num and num[-1] == 0:
        num.pop()
    return quot, num


_CYCLOTOMIC_CACHE: dict[int, tuple[int, ...]] = {}


def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficient tuple (low degree first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("cyclotomic order must be >= 1")
    if n in _CYCLOTOMIC_CACHE:
        return _CYCLOTOMIC_CACHE[n]
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod_int(poly, list(cyclotomic_polynomial(d)))
            if rem:
                raise AssertionError("cyclotomic division must be exact")
    result = tuple(poly)
    _CYCLOTOMIC_CACHE[n] = result
    return result


_REDUCTION_CACHE: dict[int, list[tuple[mpq, ...]]] = {}


def _reduction_rows(order: int) -> list[tuple[mpq, ...]]:
    """Basis expansion of z^t modulo Phi_order, for deg(Phi) <= t < max(order, 2*deg-1)."""
    if order in _REDUCTION_CACHE:
        return _REDUCTION_CACHE[order]
    phi = cyclotomic_polynomial(order)
    deg = len(phi) - 1
    top_power = max(order, 2 * deg - 1)
    rows: list[tuple[mpq, ...]] = []
    if deg >= 1:
        # z^deg = -(phi[0] + phi[1] z + ...); Phi is monic
        prev = tuple(mpq(-c) for c in phi[:deg])
        rows.append(prev)
        for _ in range(deg + 1, top_power):
            shifted = (mpq(0),) + prev[:-1]
            top = prev[-1]
            if top:
                shifted = tuple(s + top * r for s, r in zip(shifted, rows[0]))
            rows.append(shifted)
            prev = shifted
    _REDUCTION_CACHE[order] = rows
    return rows


class Cyclo:
    """Element of the cyclotomic field Q(zeta_order), zeta = exp(2*pi*i/order).

    Coefficients are rationals over the power basis 1, z, ..., z^(deg-1) with
    deg = deg(Phi_order).  Instances are immutable; arithmetic with ints and
    rationals promotes automatically.  Use :func:`make_cyclo` to construct,
    which demotes purely rational values to ``mpq``.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: tuple):
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *_):
        raise AttributeError("Cyclo is immutable")

    # -- helpers ------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def _lift(self, target_order: int) -> "Cyclo":
        if target_order == self.order:
            return self
        if target_order % self.order:
            raise ValueError("can only lift to a multiple of the current order")
        step = target_order // self.order
        deg = len(cyclotomic_polynomial(target_order)) - 1
        acc = [mpq(0)] * max(target_order, 2 * deg - 1, deg)
        for i, c in enumerate(self.coeffs):
            if c:
                acc[(i * step) % target_order] += c
        return Cyclo(target_order, _reduce(acc, target_order, deg))

    def __repr__(self):
        return f"Cyclo({self.order}, {self.coeffs!r})"

    def __str__(self):
        return scalar_to_string(self)

    # -- arithmetic ---------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Cyclo):
            a, b = _common(self, other)
            return a.coeffs == b.coeffs
        if isinstance(other, complex) or isinstance(other, float):
            return NotImplemented
        # rational-like: a reduced Cyclo with >0 non-constant support is never rational
        try:
            other = mpq(other)
        except (TypeError, ValueError):
            return NotImplemented
        return all(c == 0 for c in self.coeffs[1:]) and self.coeffs[0] == other

    def __hash__(self):
        if all(c == 0 for c in self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash((self.order, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __neg__(self):
        return Cyclo(self.order, tuple(-c for c in self.coeffs))

    def __add__(self, other):
        other = _as_cyclo_like(other)
        if other is NotImplemented:
            return NotImplemented
        if not isinstance(other, Cyclo):
            coeffs = (self.coeffs[0] + other,) + self.coeffs[1:]
            return _demote(Cyclo(self.order, coeffs))
        a, b = _common(self, other)
        return _demote(Cyclo(a.order, tuple(x + y for x, y in zip(a.coeffs, b.coeffs))))

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_cyclo_like(other)
        if o is NotImplemented:
            return NotImplemented
        return self.__add__(-o)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        other = _as_cyclo_like(other)
        if other is NotImplemented:
            return NotImplemented
        if not isinstance(other, Cyclo):
            if other == 0:
                return mpq(0)
            return Cyclo(self.order, tuple(c * other for c in self.coeffs))
        a, b = _common(self, other)
        deg = a.degree
        acc = [mpq(0)] * (2 * deg - 1)
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    acc[i + j] += x * y
        return _demote(Cyclo(a.order, _reduce(acc, a.order, deg)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_cyclo_like(other)
        if other is NotImplemented:
            return NotImplemented
        if not isinstance(other, Cyclo):
            if other == 0:
                raise ZeroDivisionError("division by zero scalar")
            return Cyclo(self.order, tuple(c / other for c in self.coeffs))
        return self * other._inverse()

    def __rtruediv__(self, other):
        return mpq(other) * self._inverse()

    def __pow__(self, n: int):
        if n < 0:
            return (self._inverse()) ** (-n)
        result = mpq(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _inverse(self) -> "Cyclo | mpq":
        if not any(self.coeffs):
            raise ZeroDivisionError("division by zero scalar")
        # extended Euclid in Q[x] against Phi_order
        phi = [mpq(c) for c in cyclotomic_polynomial(self.order)]
        a = list(self.coeffs)
        r0, r1 = phi, _trim(a)
        s0, s1 = [mpq(0)], [mpq(1)]
        while len(r1) > 1:
            q, r = _poly_divmod_q(r0, r1)
            r0, r1 = r1, _trim(r)
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        if not r1 or r1[0] == 0:
            raise ZeroDivisionError("zero divisor in cyclotomic field (not reduced?)")
        inv = [c / r1[0] for c in s1]
        deg = self.degree
        acc = inv + [mpq(0)] * (2 * deg - len(inv))
        return _demote(Cyclo(self.order, _reduce(acc, self.order, deg)))

    def __complex__(self):
        z = cmath.exp(2j * math.pi / self.order)
        return sum((float(c) * z**i for i, c in enumerate(self.coeffs)), complex(0))

    def __abs__(self):
        return abs(complex(self))


def _trim(p: list) -> list:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod_q(num: list, den: list) -> tuple[list, list]:
    num = list(num)
    d = len(den) - 1
    lead = den[-1]
    quot = [mpq(0)] * max(1, len(num) - d)
    for i in range(len(num) - 1, d - 1, -1):
        c = num[i]
        if c == 0:
            continue
        c = c / lead
        quot[i - d] = c
        for j, dj in enumerate(den):
            num[i - d + j] -= c * dj
    return quot, num[:d] if d else [mpq(0)]

def _poly_mul(a: list, b: list) -> list:
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = a + [mpq(0)] * (n - len(a))
    b = b + [mpq(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _reduce(acc: list, order: int, deg: int) -> tuple:
    if len(acc) > deg:
        rows = _reduction_rows(order)
        out = list(acc[:deg])
        for t in range(deg, len(acc)):
            c = acc[t]
            if not c:
                continue
            row = rows[t - deg]
            for k in range(deg):
                if row[k]:
                    out[k] += c * row[k]
        acc = out
    return tuple(acc[:deg])


def _demote(c: Cyclo):
    if any(c.coeffs[1:]):
        return c
    return c.coeffs[0]


def _common(a: Cyclo, b: Cyclo) -> tuple[Cyclo, Cyclo]:
    if a.order == b.order:
        return a, b
    target = math.lcm(a.order, b.order)
    return a._lift(target), b._lift(target)


def _as_cyclo_like(x):
    if isinstance(x, Cyclo):
        return x
    if isinstance(x, (complex, float)):
        return NotImplemented
    try:
        return mpq(x)
    except (TypeError, ValueError):
        return NotImplemented


def make_cyclo(order: int, coeffs: dict[int, mpq] | list):
    """Exact scalar sum_j coeffs[j] * zeta_order^j, demoted to mpq when rational."""
    deg = len(cyclotomic_polynomial(order)) - 1
    items = coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)
    acc = [mpq(0)] * max(order, 2 * deg - 1, deg)
    for j, c in items:
        if c:
            acc[j % order] += mpq(c)
    return _demote(Cyclo(order, _reduce(acc, order, deg)))


def zeta(order: int, power: int = 1, mode: str = EXACT):
    """The root of unity exp(2*pi*i*power/order) in the requested mode."""
    if order < 1:
        raise ValueError("root order must be >= 1")
    if mode == FLOAT:
        return cmath.exp(2j * math.pi * (power % order) / order)
    return make_cyclo(order, {power % order: mpq(1)})


# ---------------------------------------------------------------------------
# mode-generic helpers


def is_exact(value) -> bool:
    return not isinstance(value, (complex, float))


def scalar_is_zero(value, tol: float = FLOAT_TOLERANCE) -> bool:
    if isinstance(value, (complex, float)):
        return abs(value) <= tol
    if isinstance(value, Cyclo):
        return not any(value.coeffs)
    return value == 0


def scalar_abs(value) -> float:
    """Modulus as a float (exact values go through the complex embedding)."""
    if isinstance(value, Cyclo):
        return abs(value)
    if isinstance(value, complex):
        return abs(value)
    return abs(float(value))


def as_complex(value) -> complex:
    if isinstance(value, Cyclo):
        return complex(value)
    if isinstance(value, complex):
        return value
    return complex(float(value))


# ---------------------------------------------------------------------------
# serialization: "3/4", "-2", "1/2*ζ^3 + -1*ζ", {"re":..., "im":...}

_TERM_RE = re.compile(
    r"^\s*(?P<coeff>[+-]?\d+(?:/\d+)?)?\s*\*?\s*(?:(?:ζ|zeta)(?:\^(?P<pow>\d+))?)?\s*$"
)


def scalar_to_string(value) -> str:
    """Canonical string form of an exact scalar."""
    if isinstance(value, Cyclo):
        terms = []
        for j, c in enumerate(value.coeffs):
            if not c:
                continue
            if j == 0:
                terms.append(str(c))
            elif j == 1:
                terms.append(f"{c}*ζ")
            else:
                terms.append(f"{c}*ζ^{j}")
        return " + ".join(terms) if terms else "0"
    return str(mpq(value))


def scalar_from_string(text: str, root_order: int | None = None):
    """Parse the exact-scalar string format emitted by :func:`scalar_to_string`."""
    text = text.strip()
    if not text:
        raise ValueError("empty scalar string")
    parts = re.split(r"\s*\+\s*", text)
    coeffs: dict[int, mpq] = {}
    uses_zeta = False
    for part in parts:
        m = _TERM_RE.match(part)
        if not m:
            raise ValueError(f"cannot parse scalar term {part!r}")
        coeff = mpq(m.group("coeff")) if m.group("coeff") else mpq(1)
        has_zeta = "ζ" in part or "zeta" in part
        power = int(m.group("pow")) if m.group("pow") else (1 if has_zeta else 0)
        if has_zeta:
            uses_zeta = True
        coeffs[power] = coeffs.get(power, mpq(0)) + coeff
    if uses_zeta:
        if root_order is None:
            raise ValueError("scalar string uses ζ but no root order is in scope")
        return make_cyclo(root_order, coeffs)
    return coeffs.get(0, mpq(0))


def scalar_to_json(value):
    """JSON fragment for one coefficient, either exact-string or re/im floats."""
    if isinstance(value, (complex, float)):
        z = complex(value)
        return {"re": z.real, "im": z.imag}
    return {"coeff": scalar_to_string(value)}


def scalar_from_json(obj, mode: str, root_order: int | None = None):
    if mode == FLOAT:
        if "re" in obj:
            return complex(float(obj["re"]), float(obj.get("im", 0.0)))
        return complex(as_complex(scalar_from_string(obj["coeff"], root_order)))
    if "coeff" in obj:
        return scalar_from_string(obj["coeff"], root_order)
    if "re" in obj:
        # exact Gaussian rational: re + im*i with i = zeta_4
        re_part = _exact_field(obj["re"])
        im_part = _exact_field(obj.get("im", 0))
        if im_part == 0:
            return re_part
        return re_part + zeta(4) * im_part
    raise ValueError(f"cannot parse scalar fragment {obj!r}")


def _exact_field(value):
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError("exact mode requires integers or rational strings, got a float")
    return mpq(value)
