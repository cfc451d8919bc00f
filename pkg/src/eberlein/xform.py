"""Laplace, Cayley and Gelfand transform numerics on the half-line.

Functions on ``(0, inf)`` are finite exp-polynomials
``t -> sum a_k t**n_k exp(-c_k t)``; their Gelfand transforms on the closed
upper half-plane ``H`` are the Laplace transforms
``f^(z) = int_0^inf f(t) exp(izt) dt``, evaluated in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, InvalidInput

RANK_TOL = 1e-8


@dataclass(frozen=True)
class ExpPolyFunction:
    terms: tuple[tuple[complex, int, float], ...]

    def __post_init__(self):
        clean = []
        for coef, power, decay in self.terms:
            if int(power) != power or power < 0:
                raise InvalidInput(f"power {power!r} must be a non-negative integer")
            if not decay > 0:
                raise InvalidInput(f"decay {decay!r} must be positive")
            clean.append((complex(coef), int(power), float(decay)))
        object.__setattr__(self, "terms", tuple(clean))

    @classmethod
    def basis(cls, n: int, decay: float = 1.0) -> "ExpPolyFunction":
        """``t**n exp(-decay t)``."""
        return cls(((1.0, n, decay),))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for a, n, c in self.terms:
            out += a * t**n * np.exp(-c * t)
        return np.where(t > 0, out, 0)

    def __add__(self, other: "ExpPolyFunction") -> "ExpPolyFunction":
        return ExpPolyFunction(self.terms + other.terms)

    def scale(self, alpha: complex) -> "ExpPolyFunction":
        return ExpPolyFunction(tuple((alpha * a, n, c) for a, n, c in self.terms))

    def conjugate(self) -> "ExpPolyFunction":
        return ExpPolyFunction(tuple((a.conjugate(), n, c) for a, n, c in self.terms))

    def l1_bound(self) -> float:
        """Triangle-inequality bound on the L1 norm."""
        return sum(abs(a) * math.factorial(n) / c ** (n + 1) for a, n, c in self.terms)

    def translate(self, a: float) -> "ExpPolyFunction":
        """``u -> f(u + a)``, expanded binomially."""
        out = []
        for coef, n, c in self.terms:
            shift = coef * math.exp(-c * a)
            for k in range(n + 1):
                out.append((shift * math.comb(n, k) * a ** (n - k), k, c))
        return ExpPolyFunction(tuple(out))


def _check_halfplane(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag < 0):
        raise DomainError("transform is only defined for Im z >= 0")
    return z


def _scalar(out):
    return complex(out) if np.ndim(out) == 0 else out


def laplace(f: ExpPolyFunction, z):
    """``sum a_k n_k! / (c_k - iz)**(n_k + 1)``; ``z`` may be an array."""
    z = _check_halfplane(z)
    out = np.zeros(z.shape, dtype=complex)
    for a, n, c in f.terms:
        out += a * math.factorial(n) / (c - 1j * z) ** (n + 1)
    return _scalar(out)


def laplace_basis(n: int, z):
    """Transform of ``t**n exp(-t)``: ``n! / (1 - iz)**(n+1)``."""
    if n < 0:
        raise InvalidInput("n must be non-negative")
    z = _check_halfplane(z)
    return _scalar(math.factorial(n) / (1 - 1j * z) ** (n + 1))


def cayley(z):
    """``(z - i)/(z + i)``: maps ``H`` onto the closed disc minus ``1``."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == -1j):
        raise DomainError("Cayley transform has a pole at -i")
    return _scalar((z - 1j) / (z + 1j))


def cayley_inv(w):
    w = np.asarray(w, dtype=complex)
    if np.any(w == 1):
        raise DomainError("inverse Cayley transform has a pole at 1")
    return _scalar(1j * (1 + w) / (1 - w))


def gn_pullback(n: int, z):
    """``g_n(cayley(z))`` with ``g_n(w) = w**n - w**(n+1)``."""
    if n < 0:
        raise InvalidInput("n must be non-negative")
    z = _check_halfplane(z)
    w = (z - 1j) / (z + 1j)
    return _scalar(w**n - w ** (n + 1))


@dataclass(frozen=True)
class SpanRanks:
    rank_a: int
    rank_b: int
    rank_joint: int

    def __iter__(self):
        return iter((self.rank_a, self.rank_b, self.rank_joint))

    def equal(self, n: int) -> bool:
        return self.rank_a == self.rank_b == self.rank_joint == n


def numerical_rank(m, rel_tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(np.asarray(m), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def span_equality_rank(n: int, sample_points, family_b: Sequence[Callable] | None = None,
                       rel_tol: float = RANK_TOL) -> SpanRanks:
    """Numerical ranks of ``[f^_k]``, ``[g_k o cayley]`` (``k = 0..n-1``) and
    their concatenation, sampled at ``sample_points``.

    Both families span ``(1 - w) * polynomials of degree < n`` in the
    Cayley variable ``w``, so equal spans show as ranks ``(n, n, n)``.
    ``family_b`` replaces the second family (used to probe the test).
    """
    if n < 1:
        raise InvalidInput("n must be positive")
    pts = np.unique(_check_halfplane(sample_points).ravel())
    if pts.size < 2 * n + 2:
        raise InvalidInput(f"need at least {2 * n + 2} distinct points, got {pts.size}")
    A = np.column_stack([laplace_basis(k, pts) for k in range(n)])
    if family_b is None:
        B = np.column_stack([gn_pullback(k, pts) for k in range(n)])
    else:
        if len(family_b) != n:
            raise InvalidInput("replacement family must have n functions")
        B = np.column_stack([np.asarray(g(pts), dtype=complex) for g in family_b])
    # column scaling does not change spans but keeps the SVD threshold fair
    A = A / np.linalg.norm(A, axis=0)
    B = B / np.linalg.norm(B, axis=0)
    return SpanRanks(numerical_rank(A, rel_tol), numerical_rank(B, rel_tol),
                     numerical_rank(np.hstack([A, B]), rel_tol))


# -- maximum modulus -------------------------------------------------------

def _refined_sup(func: Callable, grid: np.ndarray, top: int = 5) -> float:
    """Grid sup of ``|func|`` polished by bounded 1-D maximisation around the
    largest grid values (``grid`` is a sorted 1-D parameter array)."""
    vals = np.abs(func(grid))
    best = float(vals.max())
    for i in np.argsort(vals)[::-1][:top]:
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        if hi <= lo:
            continue
        res = minimize_scalar(lambda x: -abs(func(np.asarray(x))), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def silov_max_modulus(f: ExpPolyFunction, interior_grid, boundary_grid,
                      refine: bool = True) -> tuple[float, float]:
    """``(sup |f^| over interior_grid, sup |f^| over boundary_grid)``.

    ``boundary_grid`` is a set of real points; with ``refine`` the boundary
    sup is polished between neighbouring grid points.
    """
    interior = np.asarray(interior_grid, dtype=complex).ravel()
    boundary = np.sort(np.asarray(boundary_grid, dtype=float).ravel())
    if interior.size == 0 or boundary.size == 0:
        raise InvalidInput("grids must be nonempty")
    sup_in = float(np.abs(laplace(f, interior)).max())
    if refine:
        sup_bd = _refined_sup(lambda x: laplace(f, np.asarray(x) + 0j), boundary)
    else:
        sup_bd = float(np.abs(laplace(f, boundary + 0j)).max())
    return sup_in, sup_bd


def disc_polynomial(coeffs: Mapping[int, complex], w):
    w = np.asarray(w, dtype=complex)
    out = np.zeros(w.shape, dtype=complex)
    for s, a in coeffs.items():
        out += a * w**s
    return out


def disc_max_modulus(coeffs: Mapping[int, complex], disc_grid, circle_angles,
                     refine: bool = True) -> tuple[float, float]:
    """Disc analogue: ``sum a_s w**s`` over the open disc versus the circle
    (``circle_angles`` in radians)."""
    inner = np.asarray(disc_grid, dtype=complex).ravel()
    angles = np.sort(np.asarray(circle_angles, dtype=float).ravel())
    if inner.size == 0 or angles.size == 0:
        raise InvalidInput("grids must be nonempty")
    sup_in = float(np.abs(disc_polynomial(coeffs, inner)).max())
    on_circle = lambda t: disc_polynomial(coeffs, np.exp(1j * np.asarray(t)))
    if refine:
        sup_bd = _refined_sup(on_circle, angles)
    else:
        sup_bd = float(np.abs(on_circle(angles)).max())
    return sup_in, sup_bd


def halfplane_grid(nx: int = 50, ny: int = 50, xmax: float = 10.0,
                   ymin: float = 1e-2, ymax: float = 10.0) -> np.ndarray:
    xs = np.linspace(-xmax, xmax, nx)
    ys = np.geomspace(ymin, ymax, ny)
    return (xs[None, :] + 1j * ys[:, None]).ravel()


def disc_grid(nr: int = 50, nt: int = 50, rmax: float = 0.999) -> np.ndarray:
    rs = np.linspace(0.0, rmax, nr)
    ts = np.linspace(0.0, 2 * np.pi, nt, endpoint=False)
    return (rs[:, None] * np.exp(1j * ts[None, :])).ravel()


# -- shifted cones ---------------------------------------------------------

def shifted_cone_transform(a: float, f: ExpPolyFunction, z):
    """Transform of ``f`` restricted to ``(a, inf)``:
    ``int_a^inf f(t) exp(izt) dt = exp(iaz) * laplace(f(. + a), z)``."""
    if not a > 0:
        raise DomainError("shift a must be positive")
    z = _check_halfplane(z)
    return _scalar(np.exp(1j * a * z) * np.asarray(laplace(f.translate(a), z)))


def cone_cofactor(a: float, f: ExpPolyFunction) -> ExpPolyFunction:
    """The exp-polynomial whose transform is ``shifted_cone_transform / exp(iaz)``."""
    if not a > 0:
        raise DomainError("shift a must be positive")
    return f.translate(a)


def cauchy_riemann_residual(func: Callable, z: complex, h: float = 1e-3) -> float:
    """``|d/dy F - i d/dx F|`` by five-point central differences at ``z``.

    The three-point stencil leaves ``h**2 |F'''| / 3`` even for analytic
    ``F``; five points push that floor to ``O(h**4)``.
    """
    def diff(step):
        return (func(z - 2 * step) - 8 * func(z - step) + 8 * func(z + step)
                - func(z + 2 * step)) / (12 * h)
    return abs(diff(1j * h) - 1j * diff(h))


def sample_spectrum_csv_rows(points: Iterable[complex], values: Iterable[complex]):
    """Rows ``(re, im, value_re, value_im)`` for CSV emission."""
    for p, v in zip(points, values):
        p, v = complex(p), complex(v)
        yield (p.real, p.imag, v.real, v.imag)
