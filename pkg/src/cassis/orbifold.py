"""Orbifold Riemann surfaces and orbibundles: good/bad dichotomy,
geometrization type by the sign of the orbifold Euler characteristic,
smooth-cover bookkeeping, and the rational degree of an orbibundle.

Degree convention (Seifert-style, pinned here):
deg(L) = e + sum_i b_i / m_i with background degree e and local invariants
0 <= b_i < m_i read off the standard chart quotient of D x C by
(z, w) -> (zeta z, zeta^b w).  The zero section contracts to a singularity
exactly when the degree is negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from gmpy2 import mpq

from .errors import BadOrbifoldError


@dataclass(frozen=True)
class OrbifoldSurface:
    """Closed Riemann surface of genus g with marked points of multiplicity >= 2."""

    genus: int
    marks: tuple[int, ...] = ()

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be >= 0")
        marks = tuple(sorted(int(m) for m in self.marks))
        if any(m < 2 for m in marks):
            raise ValueError("marked-point multiplicities must be >= 2")
        object.__setattr__(self, "marks", marks)

    def multiplicity_lcm(self) -> int:
        return math.lcm(*self.marks) if self.marks else 1

    def to_json_dict(self) -> dict:
        return {"genus": self.genus, "marks": list(self.marks)}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "OrbifoldSurface":
        return cls(genus=int(obj["genus"]), marks=tuple(int(m) for m in obj.get("marks", [])))


def euler_characteristic(surface: OrbifoldSurface) -> mpq:
    """chi_orb = 2 - 2g - sum_i (1 - 1/m_i), exactly."""
    chi = mpq(2 - 2 * surface.genus)
    for m in surface.marks:
        chi -= 1 - mpq(1, m)
    return chi


class OrbifoldType(Enum):
    BAD = "bad"
    SPHERICAL = "spherical"
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"


def classify_orbifold(surface: OrbifoldSurface) -> OrbifoldType:
    """Weighted-projective (bad) shapes, else the sign of chi_orb.

    Bad orbifolds are exactly genus 0 with one marked point, or two marked
    points of distinct multiplicities: the teardrop and spindle shapes of a
    weighted projective line.  Every other orbifold is a global quotient and
    its geometry follows the sign of the Euler characteristic.
    """
    marks = surface.marks
    if surface.genus == 0:
        if len(marks) == 1:
            return OrbifoldType.BAD
        if len(marks) == 2 and marks[0] != marks[1]:
            return OrbifoldType.BAD
    chi = euler_characteristic(surface)
    if chi > 0:
        return OrbifoldType.SPHERICAL
    if chi == 0:
        return OrbifoldType.EUCLIDEAN
    return OrbifoldType.HYPERBOLIC


def is_good(surface: OrbifoldSurface) -> bool:
    return classify_orbifold(surface) is not OrbifoldType.BAD


@dataclass(frozen=True)
class SmoothCoverData:
    """A finite orbifold-unramified cover by a genuine Riemann surface."""

    degree: int
    covered_genus: int
    euler: mpq


def canonical_cover_degree(surface: OrbifoldSurface) -> int:
    """Smallest admissible degree: a multiple of every multiplicity making
    degree * chi_orb / 2 an integer."""
    if not is_good(surface):
        raise BadOrbifoldError("bad orbifolds admit no smooth cover")
    chi_half = euler_characteristic(surface) / 2
    denominator = int(chi_half.denominator)
    return math.lcm(surface.multiplicity_lcm(), denominator)


def smooth_cover_data(surface: OrbifoldSurface, degree: int | None = None) -> SmoothCoverData:
    """Genus of a degree-NN orbifold-unramified cover: chi(S~) = NN * chi_orb.

    The degree must be a multiple of every marked multiplicity and must make
    the covered Euler characteristic an even integer; the default is the
    canonical (smallest admissible) degree.
    """
    if not is_good(surface):
        raise BadOrbifoldError("bad orbifolds admit no smooth cover")
    if degree is None:
        degree = canonical_cover_degree(surface)
    if degree < 1:
        raise ValueError("cover degree must be >= 1")
    if degree % surface.multiplicity_lcm():
        raise ValueError(
            f"cover degree {degree} is not a multiple of lcm(marks) = "
            f"{surface.multiplicity_lcm()}"
        )
    chi = euler_characteristic(surface)
    covered = degree * chi
    genus2 = 1 - covered / 2
    if genus2.denominator != 1:
        raise ValueError(
            f"degree {degree} gives non-integral covered genus {genus2}"
        )
    genus_cover = int(genus2)
    if genus_cover < 0:
        raise ValueError(
            f"degree {degree} exceeds the Euler bound for a spherical orbifold "
            "(no connected cover of that degree exists)"
        )
    return SmoothCoverData(degree=degree, covered_genus=genus_cover, euler=covered)


# ---------------------------------------------------------------------------
# orbibundles


@dataclass(frozen=True)
class OrbibundleData:
    """Numerical data of a line orbibundle over an orbifold surface."""

    base: OrbifoldSurface
    background_degree: int
    local_invariants: tuple[tuple[int, int], ...] = ()  # pairs (m_i, b_i)

    def __post_init__(self):
        local = tuple((int(m), int(b)) for m, b in self.local_invariants)
        if sorted(m for m, _ in local) != list(self.base.marks):
            raise ValueError(
                "local invariants must carry exactly the multiplicities of the base marks"
            )
        for m, b in local:
            if not (0 <= b < m):
                raise ValueError(f"local invariant {b} must satisfy 0 <= b < {m}")
        object.__setattr__(self, "local_invariants", tuple(sorted(local)))

    def to_json_dict(self) -> dict:
        return {
            **self.base.to_json_dict(),
            "bundle": {
                "e": self.background_degree,
                "local": [[m, b] for m, b in self.local_invariants],
            },
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "OrbibundleData":
        base = OrbifoldSurface.from_json_dict(obj)
        bundle = obj["bundle"]
        return cls(
            base=base,
            background_degree=int(bundle["e"]),
            local_invariants=tuple((int(m), int(b)) for m, b in bundle.get("local", [])),
        )


def orbidegree(bundle: OrbibundleData) -> mpq:
    """deg(L) = e + sum_i b_i / m_i as an exact rational."""
    total = mpq(bundle.background_degree)
    for m, b in bundle.local_invariants:
        total += mpq(b, m)
    return total


def is_contractible(bundle: OrbibundleData) -> bool:
    """The zero section contracts to a normal singularity iff deg(L) < 0."""
    return orbidegree(bundle) < 0
