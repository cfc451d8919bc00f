"""Finitely generated subsemigroups of the non-negative integers and their
bounded semicharacters.

Every bounded semicharacter of such a semigroup is ``s -> z**(s/d)`` for a
single ``z`` in the closed unit disc, where ``d`` is the gcd of the nonzero
elements.  When ``0`` is not a member the value ``z = 0`` gives the zero
functional, which is not a semicharacter but is the point adjoined to the
compactification; it is carried as an explicit flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Iterable, Sequence

from .errors import DomainError, FitFailure, InvalidInput, Underdetermined

DEFAULT_TOL = 1e-12


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b)``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def bezout(values: Sequence[int]) -> tuple[int, list[int]]:
    """Coefficients ``m`` with ``sum(m[i] * values[i]) == gcd(values)``.

    Built by folding the pairwise extended Euclidean algorithm over the list,
    so the coefficients are the ones the classical argument produces.
    """
    if not values:
        raise InvalidInput("bezout of an empty list")
    g, coeffs = values[0], [1]
    for v in values[1:]:
        g, x, y = extended_gcd(g, v)
        coeffs = [c * x for c in coeffs] + [y]
    return g, coeffs


def cpow(z: complex, k: int) -> complex:
    """``z**k`` for a non-negative integer ``k`` by binary exponentiation."""
    if k < 0:
        raise ValueError("negative exponent")
    result = 1 + 0j
    base = complex(z)
    while k:
        if k & 1:
            result *= base
        base *= base
        k >>= 1
    return result


class DualKind(str, Enum):
    FULL_DISC = "FullDisc"
    PUNCTURED_DISC = "PuncturedDisc"


@dataclass(frozen=True)
class DualReport:
    kind: DualKind
    d: int
    conductor: int
    zero_adjoined: bool

    def describe(self) -> str:
        return f"{self.kind.value}, d={self.d}, conductor={self.conductor}"


@dataclass(frozen=True)
class NumericalSemigroup:
    """Subsemigroup of ``Z>=0`` generated by ``generators``.

    A zero in ``generators`` is folded into ``include_zero``.  The conductor
    is the least positive multiple ``c`` of ``d`` such that every multiple of
    ``d`` that is at least ``c`` is a member (so ``<d>`` has conductor ``d``).
    """

    generators: tuple[int, ...]
    include_zero: bool = False
    d: int = field(init=False)
    conductor: int = field(init=False)
    _reduced_members: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gens = []
        include_zero = bool(self.include_zero)
        for g in self.generators:
            if isinstance(g, bool) or int(g) != g:
                raise InvalidInput(f"generator {g!r} is not an integer")
            g = int(g)
            if g < 0:
                raise InvalidInput(f"generator {g} is negative")
            if g == 0:
                include_zero = True
            else:
                gens.append(g)
        if not gens:
            raise InvalidInput("semigroup needs a positive generator; gcd of S\\{0} is undefined")
        gens = tuple(sorted(set(gens)))
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "include_zero", include_zero)
        object.__setattr__(self, "d", gcd_of(gens))
        conductor, members = _sieve(gens, self.d, self.coarse_bound())
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "_reduced_members", members)

    def coarse_bound(self) -> int:
        """``(|m_1|+...+|m_n|) * s_1 * ... * s_n`` from the Bezout identity."""
        _, m = bezout(list(self.generators))
        return sum(abs(c) for c in m) * math.prod(self.generators)

    def __contains__(self, s) -> bool:
        return member(self, s)

    def members_upto(self, n: int) -> list[int]:
        return [s for s in range(n + 1) if member(self, s)]

    def to_json(self) -> dict:
        return {"type": "numerical", "generators": list(self.generators),
                "include_zero": self.include_zero}


def _sieve(gens: tuple[int, ...], d: int, bound: int) -> tuple[int, frozenset]:
    # Work in units of d; stop once min(gens)/d consecutive members appear,
    # since every later value is then a translate by the smallest generator.
    red = [g // d for g in gens]
    run_needed = red[0]
    limit = bound // d
    reach = [True]
    run = 0
    k = 0
    while run < run_needed:
        k += 1
        if k > limit:
            raise AssertionError("membership sieve passed the coarse bound")
        hit = any(k >= r and reach[k - r] for r in red)
        reach.append(hit)
        run = run + 1 if hit else 0
    reduced_conductor = k - run_needed + 1
    members = frozenset(i for i in range(1, reduced_conductor) if reach[i])
    return reduced_conductor * d, members


def gcd_of(S) -> int:
    """gcd of the generators (``S`` may be a semigroup or a list)."""
    gens = S.generators if isinstance(S, NumericalSemigroup) else list(S)
    gens = [int(g) for g in gens if g != 0]
    if not gens:
        raise InvalidInput("empty generator list")
    if any(g < 0 for g in gens):
        raise InvalidInput("generators must be positive")
    return reduce(math.gcd, gens)


def conductor(S: NumericalSemigroup) -> int:
    return S.conductor


def member(S: NumericalSemigroup, s) -> bool:
    if isinstance(s, bool) or int(s) != s:
        return False
    s = int(s)
    if s < 0:
        return False
    if s == 0:
        return S.include_zero
    if s % S.d:
        return False
    return s >= S.conductor or (s // S.d) in S._reduced_members


@dataclass(frozen=True)
class DiscSemicharacter:
    z: complex = 0j
    zero_flag: bool = False

    def __post_init__(self):
        z = complex(self.z)
        if self.zero_flag:
            z = 0j
        elif abs(z) > 1 + DEFAULT_TOL:
            raise DomainError(f"|z| = {abs(z)} exceeds 1")
        object.__setattr__(self, "z", z)

    def conjugate(self) -> "DiscSemicharacter":
        return DiscSemicharacter(self.z.conjugate(), self.zero_flag)


def eval_disc(sigma: DiscSemicharacter, S: NumericalSemigroup, s: int) -> complex:
    if not member(S, s):
        raise DomainError(f"{s} is not a member of {S.generators}")
    if sigma.zero_flag:
        return 0j
    if s == 0:
        return 1 + 0j
    return cpow(sigma.z, s // S.d)


def classify_dual(S: NumericalSemigroup) -> DualReport:
    """FullDisc when 0 is a member, PuncturedDisc otherwise.

    ``zero_adjoined`` is true exactly when the constant function is absent
    from the algebra, i.e. when the compactification acquires a zero.
    """
    kind = DualKind.FULL_DISC if S.include_zero else DualKind.PUNCTURED_DISC
    return DualReport(kind, S.d, S.conductor, zero_adjoined=not S.include_zero)


def fit_semicharacter(S: NumericalSemigroup, samples: Iterable[tuple[int, complex]],
                      tol: float = 1e-9) -> tuple[DiscSemicharacter, float]:
    """Recover the semicharacter matching ``samples``; return it with its residual.

    The disc coordinate is ``prod(sigma(s_i)**m_i)`` for a Bezout combination
    ``sum(m_i * s_i) == d`` of sample points with nonzero values; a pair of
    points ``d`` apart is preferred, which is the ratio ``sigma(s+d)/sigma(s)``.
    """
    pts: dict[int, complex] = {}
    for s, v in samples:
        if not member(S, s):
            raise DomainError(f"sample point {s} is not in the semigroup")
        v = complex(v)
        if abs(v) > 1 + tol:
            raise FitFailure(f"|sigma({s})| = {abs(v):.6g} exceeds 1", abs(v) - 1)
        if s in pts and abs(pts[s] - v) > tol:
            raise FitFailure(f"conflicting samples at {s}", abs(pts[s] - v))
        pts[int(s)] = v
    positive = {s: v for s, v in pts.items() if s > 0}
    if not positive:
        raise Underdetermined("no samples at nonzero points")

    if max(abs(v) for v in positive.values()) <= tol:
        if S.include_zero and abs(pts.get(0, 1)) > tol:
            sigma = DiscSemicharacter(0j)
        else:
            sigma = DiscSemicharacter(zero_flag=True)
    else:
        support = sorted(s for s, v in positive.items() if v != 0)
        if reduce(math.gcd, support) != S.d:
            raise Underdetermined(f"nonzero sample points {support} do not generate gcd {S.d}")
        z = _bezout_root(support, positive, S.d)
        if abs(z) > 1 + tol:
            raise FitFailure(f"recovered |z| = {abs(z):.6g} exceeds 1", abs(z) - 1)
        if abs(z) > 1:
            z /= abs(z)
        sigma = DiscSemicharacter(z)

    residual = max(abs(v - eval_disc(sigma, S, s)) for s, v in pts.items())
    if residual > tol:
        raise FitFailure("samples are not multiplicative", residual)
    return sigma, residual


def _bezout_root(support: list[int], values: dict[int, complex], d: int) -> complex:
    present = set(support)
    for s in support:
        if s + d in present:
            return values[s + d] / values[s]
    used = []
    g = 0
    for s in support:
        used.append(s)
        g = math.gcd(g, s)
        if g == d:
            break
    _, m = bezout(used)
    z = 1 + 0j
    for s, k in zip(used, m):
        z *= values[s] ** k
    return z
