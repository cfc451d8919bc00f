"""Finite-dimensional operator numerics for spectra of matrix-coefficient
algebras.

Covers the tensor-square (Walter) residual on diagonal windows, polar
decomposition of contractions, the split of a contraction into an average of
two unitaries, and closed-form spectrum membership for the groups
``U(d)``, ``T.O(d)`` and ``T.Sp(d)`` in their standard representations.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np

from .errors import InvalidInput, UnsupportedFamily

UNITARY_TOL = 1e-10
SUPPORT_TOL = 1e-12
MEMBERSHIP_TOL = 1e-8


def operator_norm(x) -> float:
    x = np.asarray(x)
    if x.size == 0:
        return 0.0
    return float(np.linalg.norm(x, 2))


def is_unitary(u, tol=UNITARY_TOL) -> bool:
    u = np.asarray(u)
    return bool(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() <= tol)


def as_contraction(x, tol=UNITARY_TOL) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise InvalidInput("expected a square matrix")
    if operator_norm(x) > 1 + tol:
        raise InvalidInput(f"operator norm {operator_norm(x):.6g} exceeds 1")
    return x


def psd_sqrt(a) -> np.ndarray:
    """Square root of a Hermitian PSD matrix; eigenvalues clamped at 0."""
    a = np.asarray(a)
    a = (a + a.conj().T) / 2
    w, V = np.linalg.eigh(a)
    return (V * np.sqrt(np.clip(w, 0, None))) @ V.conj().T


@dataclass(frozen=True, eq=False)
class Polar:
    v: np.ndarray
    p: np.ndarray
    # eigenbasis of p (columns), its eigenvalues, and an orthonormal basis
    # of range(v)^perp paired with ker p; used for unitary extension
    basis: np.ndarray = field(repr=False)
    singular: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    rank: int = 0

    def __iter__(self):
        return iter((self.v, self.p))


def polar_decompose(x, tol: float = SUPPORT_TOL) -> Polar:
    """``x = v p`` with ``p = (x* x)^(1/2)`` and ``v`` a partial isometry
    vanishing on ``ker p``.

    Both factors come from one SVD ``x = W S V*``: the columns of ``V`` are
    eigenvectors of ``x* x`` with eigenvalues ``S**2``, so ``p = V S V*`` is
    the eigendecomposition form of the square root without squaring the
    condition number.
    """
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise InvalidInput("expected a square matrix")
    W, s, Vh = np.linalg.svd(x)
    V = Vh.conj().T
    scale = max(s[0] if s.size else 0.0, 1.0)
    r = int(np.sum(s > tol * scale))
    p = (V * s) @ Vh
    p = (p + p.conj().T) / 2
    v = W[:, :r] @ Vh[:r]
    return Polar(v, p, V, s, W, r)


def _unitary_extension(pol: Polar) -> np.ndarray:
    """Unitary agreeing with ``v`` on the support of ``p``.

    On ``ker p`` use the identity when ``ker p`` is exactly ``range(v)^perp``;
    otherwise map the kernel basis onto the orthogonal complement of
    ``range(v)`` given by the SVD.
    """
    d = pol.v.shape[0]
    r = pol.rank
    if r == d:
        return pol.v
    K = pol.basis[:, r:]
    Rc = pol.left[:, r:]
    proj_k = K @ K.conj().T
    proj_r = Rc @ Rc.conj().T
    if np.abs(proj_k - proj_r).max() <= UNITARY_TOL:
        return pol.v + proj_k
    return pol.v + Rc @ K.conj().T


def convex_unitary_split(x) -> tuple[np.ndarray, np.ndarray]:
    """Unitaries ``u1, u2`` with ``x = (u1 + u2) / 2``.

    With ``x = u p`` (``u`` a unitary extension of the polar isometry),
    ``u1, u2 = u (p +- i sqrt(1 - p^2))``.
    """
    x = as_contraction(x)
    pol = polar_decompose(x)
    u = _unitary_extension(pol)
    V, s = pol.basis, np.clip(pol.singular, 0.0, 1.0)
    p = (V * s) @ V.conj().T
    q = (V * np.sqrt(1.0 - s * s)) @ V.conj().T
    return u @ (p + 1j * q), u @ (p - 1j * q)


def walter_residual_diagonal(elements: Sequence[Hashable], values,
                             op: Callable = operator.add, tol: float = 1e-12) -> float:
    """``max |x(a.b) - x(a) x(b)|`` over window pairs whose product is in the window.

    ``elements`` index a finite window of a semigroup of characters (with
    composition ``op``); ``values`` gives ``x`` on the window, as a mapping
    or aligned sequence.  Zero exactly when ``x`` is multiplicative there.
    """
    elements = list(elements)
    if isinstance(values, Mapping):
        try:
            vals = {e: complex(values[e]) for e in elements}
        except KeyError as exc:
            raise InvalidInput(f"no value for window element {exc.args[0]!r}") from None
    else:
        values = list(values)
        if len(values) != len(elements):
            raise InvalidInput("values do not align with the window")
        vals = {e: complex(v) for e, v in zip(elements, values)}
    if len(vals) != len(elements):
        raise InvalidInput("window has repeated elements")
    if any(abs(v) > 1 + tol for v in vals.values()):
        raise InvalidInput("values must be contractive")
    worst, pairs = 0.0, 0
    for a in elements:
        for b in elements:
            c = op(a, b)
            if c in vals:
                pairs += 1
                worst = max(worst, abs(vals[c] - vals[a] * vals[b]))
    if pairs == 0:
        raise InvalidInput("window contains no pair whose product is in the window")
    return worst


# -- classical groups ------------------------------------------------------

FAMILIES = ("U", "T.O", "T.Sp", "custom")


def symplectic_form(d: int) -> np.ndarray:
    """Standard ``J`` on ``C^(2d)``."""
    eye, zero = np.eye(d), np.zeros((d, d))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True, eq=False)
class GeneratedMatrixGroup:
    generators: tuple
    family: str = "U"
    form: np.ndarray | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedFamily(f"unknown family {self.family!r}")
        gens = tuple(np.asarray(g, dtype=complex) for g in self.generators)
        if not gens:
            raise InvalidInput("need at least one generator")
        d = gens[0].shape[0]
        for g in gens:
            if g.shape != (d, d):
                raise InvalidInput("generators must share one square shape")
            if not is_unitary(g):
                raise InvalidInput("generator is not unitary")
        form = self.form
        if self.family == "T.Sp":
            if d % 2:
                raise InvalidInput("T.Sp needs even dimension")
            form = symplectic_form(d // 2) if form is None else np.asarray(form, dtype=complex)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "form", form)
        if self.family in ("T.O", "T.Sp"):
            for g in gens:
                m = spectrum_membership(g, self)
                if not m.member or abs(abs(m.scalar) - 1) > 1e-8:
                    raise InvalidInput(f"generator is not in {self.family}")

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]


@dataclass(frozen=True)
class Membership:
    member: bool
    scalar: complex | None = None
    deviation: float = 0.0
    reason: str = ""

    def __bool__(self):
        return self.member


def spectrum_membership(x, G: GeneratedMatrixGroup, tol: float = MEMBERSHIP_TOL) -> Membership:
    """Is ``x`` a nonzero point of ``D^sigma`` for the group's standard representation?

    ``U``: nonzero contractions.  ``T.O``: nonzero contractions with
    ``x^T x = c I``.  ``T.Sp``: nonzero contractions with ``x^T J x = c J``.
    The certificate holds ``c`` (or the norm) and the deviation found.
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (G.dim, G.dim):
        raise InvalidInput(f"expected a {G.dim}x{G.dim} matrix")
    if G.family == "custom":
        raise UnsupportedFamily("membership is only closed-form for U, T.O and T.Sp")
    nrm = operator_norm(x)
    if nrm <= tol:
        return Membership(False, 0j, 0.0, "zero adjoined, not in the spectrum")
    if nrm > 1 + tol:
        return Membership(False, None, nrm - 1, f"operator norm {nrm:.6g} exceeds 1")
    if G.family == "U":
        return Membership(True, None, 0.0, "contraction")
    if G.family == "T.O":
        gram = x.T @ x
        target = np.eye(G.dim)
    else:
        gram = x.T @ G.form @ x
        target = G.form
    c = np.trace(target.conj().T @ gram) / np.trace(target.conj().T @ target)
    dev = np.abs(gram - c * target)
    worst = float(dev.max())
    if worst > tol:
        idx = tuple(int(i) for i in np.unravel_index(int(dev.argmax()), dev.shape))
        return Membership(False, complex(c), worst, f"scalar-form identity fails at entry {idx}")
    return Membership(True, complex(c), worst, "scalar-form identity holds")


def sample_closure(G: GeneratedMatrixGroup, max_word_len: int, count: int,
                   seed: int = 0, dedup_tol: float = 1e-8) -> list[np.ndarray]:
    """Distinct elements among ``count`` random words in the generators and
    their inverses, each of length ``1..max_word_len``."""
    if max_word_len < 1 or count < 1:
        raise InvalidInput("word length and count must be positive")
    rng = np.random.default_rng(seed)
    letters = list(G.generators) + [g.conj().T for g in G.generators]
    out: list[np.ndarray] = []
    stack = np.empty((0, G.dim, G.dim), dtype=complex)
    for _ in range(count):
        w = np.eye(G.dim, dtype=complex)
        for k in rng.integers(len(letters), size=rng.integers(1, max_word_len + 1)):
            w = w @ letters[k]
        if stack.shape[0] and np.abs(stack - w).max(axis=(1, 2)).min() <= dedup_tol:
            continue
        out.append(w)
        stack = np.concatenate([stack, w[None]])
    return out


# -- random samples used by tests and verification suites ------------------

def haar_unitary(d: int, rng) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_orthogonal(d: int, rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    return q * np.sign(np.diagonal(r))


def random_compact_symplectic(d: int, rng, scale: float = 1.0) -> np.ndarray:
    """Element of ``Sp(d) = U(2d) n Sp(2d, C)`` as ``exp`` of a Lie algebra element
    ``[[A, B], [-conj(B), conj(A)]]`` with ``A`` skew-Hermitian, ``B`` symmetric."""
    from scipy.linalg import expm

    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    A = (a - a.conj().T) / 2
    b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    B = (b + b.T) / 2
    X = np.block([[A, B], [-B.conj(), A.conj()]])
    return expm(scale * X)


def random_contraction(d: int, rng, max_norm: float = 1.0) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return z * (max_norm * rng.uniform(0.05, 1.0) / operator_norm(z))
