"""Semilattice-graded ("spine") compactifications.

A spine system is a finite join-semilattice ``J`` of nodes, an abelian group
``H_j`` per node and connecting homomorphisms ``eta[j -> i]: H_j -> H_i``
for every ``i <= j``.  Points of the compactification are pairs
``(node, element)`` plus an absorbing ``ZERO``; two points multiply by
mapping both down to the meet of their nodes and adding there, or give
``ZERO`` when the nodes have no common lower bound.

Groups are written additively throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import InvalidInput, InvalidSpec, InvalidSpine

HOM_TOL = 1e-12


# -- node groups -----------------------------------------------------------

@dataclass(frozen=True)
class RealGroup:
    dim: int
    kind = "real"

    def element(self, value) -> np.ndarray:
        v = np.asarray(value, dtype=float).reshape(-1)
        if v.shape != (self.dim,):
            raise InvalidInput(f"expected a vector in R^{self.dim}")
        return v

    def add(self, u, v):
        return u + v

    def norm(self, v) -> float:
        return float(np.linalg.norm(v))

    def random(self, rng, scale=3.0):
        return rng.normal(scale=scale, size=self.dim)

    def apply(self, matrix, v):
        return matrix @ v

    def close(self, u, v, tol=HOM_TOL) -> bool:
        return bool(np.allclose(u, v, rtol=tol, atol=tol))


@dataclass(frozen=True)
class IntegerGroup(RealGroup):
    kind = "integer"

    def element(self, value) -> np.ndarray:
        v = np.asarray(value)
        if not np.all(np.equal(np.mod(v, 1), 0)):
            raise InvalidInput("integer group element has non-integer entries")
        v = v.astype(np.int64).reshape(-1)
        if v.shape != (self.dim,):
            raise InvalidInput(f"expected a vector in Z^{self.dim}")
        return v

    def random(self, rng, scale=5):
        return rng.integers(-scale, scale + 1, size=self.dim)

    def apply(self, matrix, v):
        return np.rint(matrix @ v).astype(np.int64)

    def close(self, u, v, tol=0.0) -> bool:
        return bool(np.array_equal(u, v))


@dataclass(frozen=True)
class FiniteGroup:
    moduli: tuple[int, ...]
    kind = "finite"

    @property
    def dim(self) -> int:
        return len(self.moduli)

    def element(self, value) -> np.ndarray:
        v = np.asarray(value).astype(np.int64).reshape(-1)
        if v.shape != (self.dim,):
            raise InvalidInput(f"expected {self.dim} residues")
        return np.mod(v, self.moduli)

    def add(self, u, v):
        return np.mod(u + v, self.moduli)

    def norm(self, v) -> float:
        m = np.asarray(self.moduli)
        sym = np.where(v > m // 2, v - m, v)
        return float(np.linalg.norm(sym))

    def random(self, rng, scale=None):
        return np.array([rng.integers(0, m) for m in self.moduli], dtype=np.int64)

    def apply(self, matrix, v):
        raise NotImplementedError  # handled by Hom with target moduli

    def close(self, u, v, tol=0.0) -> bool:
        return bool(np.array_equal(u, v))

    def enumerate(self):
        for t in itertools.product(*(range(m) for m in self.moduli)):
            yield np.array(t, dtype=np.int64)


def make_group(spec: Mapping):
    kind = spec.get("kind")
    if kind == "real":
        return RealGroup(int(spec["dim"]))
    if kind == "integer":
        return IntegerGroup(int(spec["dim"]))
    if kind == "finite":
        moduli = tuple(int(m) for m in spec["moduli"])
        if not moduli or any(m < 1 for m in moduli):
            raise InvalidInput("finite group moduli must be positive")
        return FiniteGroup(moduli)
    raise InvalidInput(f"unknown group kind {kind!r}")


@dataclass(frozen=True, eq=False)
class Hom:
    """Homomorphism ``source -> target`` given by a matrix."""

    matrix: np.ndarray
    source: object
    target: object

    def __post_init__(self):
        shape = (self.target.dim, self.source.dim)
        m = np.array(self.matrix, dtype=float)
        if m.size == 0:
            m = np.zeros(shape)
        if m.shape != shape:
            raise InvalidSpine(f"homomorphism matrix has shape {m.shape}, expected {shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __call__(self, v):
        if isinstance(self.target, FiniteGroup):
            return np.mod(np.rint(self.matrix @ v).astype(np.int64), self.target.moduli)
        return self.target.apply(self.matrix, v)


# -- points ----------------------------------------------------------------

class _Zero:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ZERO"

    def __reduce__(self):
        return (_Zero, ())


ZERO = _Zero()


@dataclass(frozen=True, eq=False)
class SpinePoint:
    node: Hashable
    value: np.ndarray

    def __repr__(self):
        return f"SpinePoint({self.node!r}, {np.asarray(self.value).tolist()})"


# -- the system ------------------------------------------------------------

@dataclass(eq=False)
class SpineSystem:
    """Validated spine system.

    ``join`` maps unordered pairs of nodes to their join; ``homs`` maps
    ``(j, i)`` with ``i < j`` to ``eta[j -> i]``.  Identity maps on the
    diagonal are implicit.  ``notes`` carries caveats for reports, e.g. a
    truncated chain whose projective limit is not represented.
    """

    nodes: tuple
    join_table: dict
    groups: dict
    homs: dict
    notes: tuple[str, ...] = ()
    _meets: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.nodes = tuple(self.nodes)
        if len(set(self.nodes)) != len(self.nodes) or not self.nodes:
            raise InvalidSpine("nodes must be nonempty and distinct")
        self._check_semilattice()
        for j in self.nodes:
            if j not in self.groups:
                raise InvalidSpine(f"no group for node {j!r}")
        for i, j in itertools.product(self.nodes, repeat=2):
            if i != j and self.leq(i, j) and (j, i) not in self.homs:
                raise InvalidSpine(f"missing homomorphism {j!r}->{i!r}")
        for (j, i) in self.homs:
            if not self.leq(i, j) or i == j:
                raise InvalidSpine(f"homomorphism {j!r}->{i!r} but {i!r} is not below {j!r}")
        self._check_homs()
        for i, j in itertools.product(self.nodes, repeat=2):
            self._meets[(i, j)] = self._compute_meet(i, j)

    def join(self, i, j):
        try:
            return self.join_table[frozenset((i, j))]
        except KeyError:
            raise InvalidSpine(f"join of {i!r} and {j!r} not given") from None

    def leq(self, i, j) -> bool:
        return self.join(i, j) == j

    def eta(self, j, i):
        """Connecting map ``H_j -> H_i`` (identity when ``i == j``)."""
        if i == j:
            return lambda v: v
        try:
            return self.homs[(j, i)]
        except KeyError:
            raise InvalidSpine(f"{i!r} is not below {j!r}") from None

    def _check_semilattice(self):
        for i, j in itertools.product(self.nodes, repeat=2):
            k = self.join(i, j)
            if k not in self.nodes:
                raise InvalidSpine(f"join {i!r} v {j!r} = {k!r} is not a node")
        for i in self.nodes:
            if self.join(i, i) != i:
                raise InvalidSpine(f"join is not idempotent at {i!r}")
        for i, j, k in itertools.product(self.nodes, repeat=3):
            if self.join(self.join(i, j), k) != self.join(i, self.join(j, k)):
                raise InvalidSpine(f"join is not associative on {i!r}, {j!r}, {k!r}")

    def _check_homs(self, rng=None):
        rng = rng or np.random.default_rng(0)
        for (j, i), hom in self.homs.items():
            Hj = self.groups[j]
            for _ in range(3):
                u, v = Hj.random(rng), Hj.random(rng)
                lhs, rhs = hom(Hj.add(u, v)), self.groups[i].add(hom(u), hom(v))
                if not self.groups[i].close(lhs, rhs):
                    raise InvalidSpine(f"{j!r}->{i!r} is not a homomorphism")
        for i, j, k in itertools.product(self.nodes, repeat=3):
            if len({i, j, k}) == 3 and self.leq(i, j) and self.leq(j, k):
                Hk = self.groups[k]
                for _ in range(3):
                    v = Hk.random(rng)
                    lhs = self.eta(j, i)(self.eta(k, j)(v))
                    if not self.groups[i].close(lhs, self.eta(k, i)(v), tol=1e-10):
                        raise InvalidSpine(f"maps {k!r}->{j!r}->{i!r} and {k!r}->{i!r} disagree")

    def _compute_meet(self, i, j):
        lower = [k for k in self.nodes if self.leq(k, i) and self.leq(k, j)]
        if not lower:
            return None
        top = [g for g in lower if all(self.leq(k, g) for k in lower)]
        if not top:
            raise InvalidSpine(f"{i!r} and {j!r} have lower bounds but no greatest one")
        return top[0]

    def maximum(self):
        top = [j for j in self.nodes if all(self.leq(i, j) for i in self.nodes)]
        return top[0] if top else None

    def point(self, node, value) -> SpinePoint:
        if node not in self.groups:
            raise InvalidInput(f"unknown node {node!r}")
        return SpinePoint(node, self.groups[node].element(value))

    def random_point(self, rng, node=None) -> SpinePoint:
        if node is None:
            node = self.nodes[rng.integers(len(self.nodes))]
        return SpinePoint(node, self.groups[node].random(rng))


def meet(J: SpineSystem, i, j):
    """Greatest common lower bound of ``i`` and ``j``, or ``None`` if they have none."""
    try:
        return J._meets[(i, j)]
    except KeyError:
        raise InvalidInput(f"unknown nodes {i!r}, {j!r}") from None


def spine_product(S: SpineSystem, p, q):
    if p is ZERO or q is ZERO:
        return ZERO
    m = meet(S, p.node, q.node)
    if m is None:
        return ZERO
    a = S.eta(p.node, m)(p.value)
    b = S.eta(q.node, m)(q.value)
    return SpinePoint(m, S.groups[m].add(a, b))


def points_close(S: SpineSystem, p, q, tol=1e-10) -> bool:
    if p is ZERO or q is ZERO:
        return p is q
    return p.node == q.node and S.groups[p.node].close(p.value, q.value, tol)


@dataclass
class IdealReport:
    passed: bool
    top_node: object
    checked: int
    counterexample: tuple | None = None
    message: str = ""


def complement_is_ideal(S: SpineSystem, top_node=None, sample_count: int = 200,
                        rng=None) -> IdealReport:
    """Check that points outside the top node form an ideal.

    Every product involving a non-top point (or ``ZERO``) must land outside
    the top node.  Pairs of nodes are covered exhaustively; elements are
    drawn at random.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    top = S.maximum()
    if top is None:
        return IdealReport(False, None, 0, message="no open unit group candidate: J has no maximum")
    if top_node is not None and top_node != top:
        raise InvalidInput(f"{top_node!r} is not the maximum of J (that is {top!r})")
    others = [j for j in S.nodes if j != top]
    if not others:
        return IdealReport(True, top, 0, message="complement is {ZERO} only")
    checked = 0
    per_pair = max(1, sample_count // (len(others) * len(S.nodes)))
    for lo in others:
        for any_node in S.nodes:
            for _ in range(per_pair):
                p, q = S.random_point(rng, lo), S.random_point(rng, any_node)
                for r in (spine_product(S, p, q), spine_product(S, q, p)):
                    checked += 1
                    if r is not ZERO and r.node == top:
                        return IdealReport(False, top, checked, (p, q, r))
        for _ in range(per_pair):
            p = S.random_point(rng, lo)
            if spine_product(S, p, ZERO) is not ZERO:
                return IdealReport(False, top, checked, (p, ZERO))
            checked += 1
    return IdealReport(True, top, checked)


@dataclass(frozen=True)
class BasicNeighborhood:
    """``V_j`` is the open ball of ``radius`` about ``center`` in ``H_j``;
    each tail ``(i_k, R_k)`` encodes the cocompact set ``{t : |t| > R_k}``
    in ``H_{i_k}``."""

    node: Hashable
    center: Sequence[float]
    radius: float
    tails: tuple = ()


def in_basic_neighborhood(S: SpineSystem, point, nbhd: BasicNeighborhood) -> bool:
    j = nbhd.node
    for ik, _ in nbhd.tails:
        if ik == j or not S.leq(j, ik):
            raise InvalidSpec(f"tail node {ik!r} must lie strictly above {j!r}")
    if point is ZERO or not S.leq(j, point.node):
        return False
    Hj = S.groups[j]
    proj = S.eta(point.node, j)(point.value)
    if Hj.norm(Hj.add(proj, -Hj.element(nbhd.center))) >= nbhd.radius:
        return False
    for ik, R in nbhd.tails:
        if S.leq(ik, point.node):
            if S.groups[ik].norm(S.eta(point.node, ik)(point.value)) <= R:
                return False
    return True


# -- builders --------------------------------------------------------------

def build_system(nodes, join_rows, groups: Mapping, homs: Mapping, notes=()) -> SpineSystem:
    """Build from a square join table (rows/columns in ``nodes`` order,
    entries node names or indices) and ``"j->i"``-keyed matrices."""
    nodes = list(nodes)
    if len(join_rows) != len(nodes) or any(len(r) != len(nodes) for r in join_rows):
        raise InvalidSpine("join table must be square over the nodes")
    table = {}
    for a, row in zip(nodes, join_rows):
        for b, k in zip(nodes, row):
            k = nodes[k] if isinstance(k, int) and k not in nodes else k
            key = frozenset((a, b))
            if key in table and table[key] != k:
                raise InvalidSpine(f"join is not commutative on {a!r}, {b!r}")
            table[key] = k
    gs = {j: make_group(groups[j]) if isinstance(groups[j], Mapping) else groups[j]
          for j in nodes if j in groups}
    hs = {}
    for key, mat in homs.items():
        j, i = (key.split("->") if isinstance(key, str) else key)
        j, i = _node_name(j, nodes), _node_name(i, nodes)
        if j not in gs or i not in gs:
            raise InvalidSpine(f"homomorphism {key!r} refers to an unknown node")
        hs[(j, i)] = Hom(np.asarray(mat, dtype=float), gs[j], gs[i])
    return SpineSystem(tuple(nodes), table, gs, hs, tuple(notes))


def _node_name(name, nodes):
    name = name.strip() if isinstance(name, str) else name
    if name in nodes:
        return name
    for n in nodes:
        if str(n) == str(name):
            return n
    raise InvalidSpine(f"unknown node {name!r}")


def flat_product_system(dim: int = 1) -> SpineSystem:
    """``G = H x H`` with ``H = R^dim``: nodes ``o`` (all of G), ``l`` and
    ``r`` (the two coordinate projections); ``l`` and ``r`` have no common
    lower bound."""
    eye, zero = np.eye(dim), np.zeros((dim, dim))
    H, G = RealGroup(dim), RealGroup(2 * dim)
    table = {frozenset(p): "o" for p in [("o", "o"), ("o", "l"), ("o", "r"), ("l", "r")]}
    table[frozenset(("l",))] = "l"
    table[frozenset(("r",))] = "r"
    homs = {("o", "l"): Hom(np.hstack([eye, zero]), G, H),
            ("o", "r"): Hom(np.hstack([zero, eye]), G, H)}
    return SpineSystem(("o", "l", "r"), table, {"o": G, "l": H, "r": H}, homs)


def truncation_chain(length: int, integer: bool = False) -> SpineSystem:
    """Nodes ``1..length`` with ``H_n = R^n`` (or ``Z^n``), join = max and
    ``eta[n -> m]`` the projection onto the first ``m`` coordinates.

    This is a finite truncation of an infinite chain; its projective limit
    (the group of units of the untruncated system) is not represented.
    """
    if length < 1:
        raise InvalidInput("chain length must be positive")
    nodes = tuple(range(1, length + 1))
    kind = IntegerGroup if integer else RealGroup
    groups = {n: kind(n) for n in nodes}
    table = {frozenset((a, b)): max(a, b) for a in nodes for b in nodes}
    homs = {(n, m): Hom(np.eye(n)[:m], groups[n], groups[m])
            for n in nodes for m in nodes if m < n}
    note = f"truncated at length {length}; projective limit over the full chain not represented"
    return SpineSystem(nodes, table, groups, homs, (note,))


def subspace_lattice(n: int, min_dim: int, rotation=None) -> SpineSystem:
    """Subspaces ``R . span{e_k : k in A}`` (rotated by ``rotation``) of
    dimension at least ``min_dim``, with join = sum and orthogonal
    projections as connecting maps.

    Node ``A`` (a frozenset of coordinate indices) carries ``H_A = R^|A|``
    in the orthonormal basis given by the corresponding rotated columns.
    """
    R = np.eye(n) if rotation is None else np.asarray(rotation, dtype=float)
    nodes = [frozenset(A) for k in range(min_dim, n + 1)
             for A in itertools.combinations(range(n), k)]
    basis = {A: R[:, sorted(A)] for A in nodes}
    groups = {A: RealGroup(len(A)) for A in nodes}
    table = {frozenset((A, B)): A | B for A in nodes for B in nodes}
    homs = {(B, A): Hom(basis[A].T @ basis[B], groups[B], groups[A])
            for A in nodes for B in nodes if A < B}
    system = SpineSystem(tuple(nodes), table, groups, homs)
    system.ambient_basis = basis
    return system
