"""Open product cones in R^n and their semicharacters.

A cone is ``{sum c_j h_j : c_1..c_l real, c_{l+j} > a_j}`` for a basis
``h_1..h_n`` and thresholds ``a_j >= 0``.  Its bounded semicharacters are
``s -> exp(i(x . c' + z . c''))`` with ``x`` real and ``Im z_j >= 0``, where
``c'`` and ``c''`` are the line and half-line coordinates of ``s``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInput

SOLVE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProductCone:
    l: int
    thresholds: tuple[float, ...]
    basis: np.ndarray  # rows are h_1..h_n

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        if basis.ndim == 1:
            basis = basis.reshape(1, -1)
        n = basis.shape[0]
        if basis.shape != (n, n):
            raise InvalidInput(f"basis must be n vectors in R^n, got shape {basis.shape}")
        if not 0 <= self.l <= n:
            raise InvalidInput(f"l={self.l} outside [0, {n}]")
        thresholds = tuple(float(a) for a in self.thresholds)
        if len(thresholds) != n - self.l:
            raise InvalidInput(f"need {n - self.l} thresholds, got {len(thresholds)}")
        if any(not a >= 0 for a in thresholds):
            raise InvalidInput("thresholds must be non-negative for the cone to be a semigroup")
        det = np.linalg.det(basis)
        if abs(det) <= 1e-12 * max(1.0, np.abs(basis).max() ** n):
            raise InvalidInput("basis is singular")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "thresholds", thresholds)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    def coordinates(self, s) -> np.ndarray:
        """Coordinates ``c`` with ``s = sum c_j h_j``."""
        s = np.asarray(s, dtype=float).reshape(-1)
        if s.shape != (self.n,):
            raise InvalidInput(f"point must lie in R^{self.n}")
        c = np.linalg.solve(self.basis.T, s)
        resid = np.linalg.norm(self.basis.T @ c - s)
        if resid > SOLVE_TOL * max(1.0, np.linalg.norm(s)):
            raise InvalidInput(f"basis solve residual {resid:.3e}")
        return c

    def dual_description(self) -> str:
        return f"dual = R^{self.l} x H^{self.n - self.l}"

    def to_json(self) -> dict:
        return {"type": "cone", "l": self.l, "thresholds": list(self.thresholds),
                "basis": self.basis.tolist()}


@dataclass(frozen=True, eq=False)
class ConeSemicharacter:
    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        z = np.atleast_1d(np.asarray(self.z, dtype=complex))
        if np.any(z.imag < 0):
            raise DomainError("semicharacter parameters need Im z >= 0")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    def conjugate(self) -> "ConeSemicharacter":
        # conj(exp(i(x.c + z.c))) = exp(i(-x.c + (-conj z).c))
        return ConeSemicharacter(-self.x, -self.z.conj())


def cone_member(C: ProductCone, s) -> bool:
    c = C.coordinates(s)
    return bool(np.all(c[C.l:] > np.asarray(C.thresholds)))


def eval_cone(sigma: ConeSemicharacter, C: ProductCone, s) -> complex:
    if sigma.x.shape != (C.l,) or sigma.z.shape != (C.n - C.l,):
        raise InvalidInput("semicharacter shape does not match the cone")
    c = C.coordinates(s)
    if not np.all(c[C.l:] > np.asarray(C.thresholds)):
        raise DomainError(f"{np.ravel(s).tolist()} is not in the cone")
    phase = sigma.x @ c[:C.l] + sigma.z @ c[C.l:]
    return complex(np.exp(1j * phase))


def interior_semigroup(C: ProductCone) -> ProductCone:
    """The ``R>=1``-stable part of the cone.

    A product cone with non-negative thresholds is already stable under
    scaling by ``t >= 1``, so it is returned unchanged.
    """
    return C


def transport_character(sigma: ConeSemicharacter, source: ProductCone,
                        target: ProductCone) -> ConeSemicharacter:
    """Express ``sigma`` in the coordinates of ``target``'s basis.

    The character is the exponential of a linear functional on R^n; only its
    coordinate description depends on the basis.
    """
    if source.n != target.n or source.l != target.l:
        raise InvalidInput("cones differ in dimension or line count")
    theta = np.concatenate([sigma.x.astype(complex), sigma.z])
    functional = np.linalg.solve(source.basis, theta)
    theta_t = target.basis @ functional
    x = theta_t[:target.l]
    if np.any(np.abs(x.imag) > 1e-10 * max(1.0, np.abs(x).max(initial=0))):
        raise DomainError("transported line parameters are not real")
    z = theta_t[target.l:]
    z = np.where(np.abs(z.imag) < 1e-14, z.real + 0j, z)
    return ConeSemicharacter(x.real, z)
