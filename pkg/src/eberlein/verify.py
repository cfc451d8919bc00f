"""Executable invariant checks grouped into suites, with JSON reports.

Every check draws randomness from a generator seeded by the suite seed and
the check name, so reports are byte-identical for identical configs.
"""

from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import axb, cone, opcompact, semigroup, spine, xform

DEFAULT_TOL = 1e-10
SUITES = ("semichar", "spine", "opcompact", "xform", "axb")


@dataclass
class Check:
    name: str
    passed: bool
    residual: float
    threshold: float
    provenance: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "residual": _num(self.residual),
                "threshold": _num(self.threshold), "provenance": self.provenance,
                "detail": self.detail}


@dataclass
class Report:
    suite: str
    seed: int
    tol: float
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {"v": 1, "suite": self.suite, "seed": self.seed, "tol": self.tol,
                "pass": self.passed, "checks": [c.to_json() for c in self.checks]}


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def _at_most(name, residual, threshold, provenance, **detail) -> Check:
    return Check(name, bool(residual <= threshold), float(residual), threshold, provenance, detail)


def _random_disc(rng, size):
    r = np.sqrt(rng.uniform(0, 1, size))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, size))


def brute_conductor(generators) -> int:
    """Conductor by dynamic programming up to the Schur bound, independent of
    the library sieve."""
    d = math.gcd(*generators)
    a = sorted({g // d for g in generators})
    limit = (a[0] - 1) * (a[-1] - 1) + a[-1] + 1
    reach = [False] * (limit + 1)
    reach[0] = True
    for k in range(1, limit + 1):
        reach[k] = any(k >= g and reach[k - g] for g in a)
    last_gap = max((k for k in range(1, limit + 1) if not reach[k]), default=0)
    return d * (last_gap + 1)


# -- suites ----------------------------------------------------------------

def suite_semichar(seed: int, tol: float, grid: int) -> list[Check]:
    out = []
    rng = _rng(seed, "semichar.multiplicativity")
    worst_mult = worst_contr = worst_inv = 0.0
    for gens in [(2, 3), (3, 5), (4, 6), (6, 10, 15)]:
        S = semigroup.NumericalSemigroup(gens)
        members = S.members_upto(S.conductor + 12)
        for z in _random_disc(rng, 20):
            sig = semigroup.DiscSemicharacter(z)
            vals = {s: semigroup.eval_disc(sig, S, s) for s in members}
            conj = semigroup.DiscSemicharacter(z.conjugate())
            for s, t in itertools.product(members, repeat=2):
                if s + t in vals:
                    worst_mult = max(worst_mult, abs(vals[s + t] - vals[s] * vals[t]))
            worst_contr = max(worst_contr, max(abs(v) for v in vals.values()) - 1)
            worst_inv = max(worst_inv, max(abs(vals[s].conjugate() - semigroup.eval_disc(conj, S, s))
                                            for s in members))
    out.append(_at_most("disc multiplicativity", worst_mult, 1e-12, "DERIVED"))
    out.append(_at_most("disc contractivity", max(worst_contr, 0.0), 1e-15, "TRIVIAL"))
    out.append(_at_most("disc involution", worst_inv, 1e-15, "DERIVED"))

    rng = _rng(seed, "semichar.fit")
    worst_fit = 0.0
    for gens in [(2, 3), (3, 5), (4, 6), (6, 10, 15)]:
        S = semigroup.NumericalSemigroup(gens)
        members = S.members_upto(S.conductor + 12)
        for z in _random_disc(rng, 20):
            samples = [(s, semigroup.eval_disc(semigroup.DiscSemicharacter(z), S, s)) for s in members]
            sig, res = semigroup.fit_semicharacter(S, samples, tol=tol)
            worst_fit = max(worst_fit, res, abs(sig.z - z))
    out.append(_at_most("fit round-trip", worst_fit, tol, "DERIVED"))

    rng = _rng(seed, "semichar.conductor")
    mismatches, over_bound = [], 0
    for _ in range(20):
        k = int(rng.integers(1, 4))
        gens = tuple(int(g) for g in rng.integers(2, 30, size=k))
        S = semigroup.NumericalSemigroup(gens)
        if S.conductor != brute_conductor(S.generators):
            mismatches.append(list(gens))
        over_bound += S.conductor > S.coarse_bound()
    out.append(Check("conductor vs brute-force sieve", not mismatches and not over_bound,
                     float(len(mismatches) + over_bound), 0.0, "DERIVED",
                     {"mismatches": mismatches}))
    c35 = semigroup.NumericalSemigroup((3, 5)).conductor
    out.append(Check("conductor <3,5> = 8", c35 == 8, float(abs(c35 - 8)), 0.0, "PAPER"))

    rng = _rng(seed, "semichar.cone")
    worst_mult = worst_contr = worst_basis = 0.0
    C = cone.ProductCone(1, (0.0,), np.eye(2))
    Q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    for _ in range(50):
        sig = cone.ConeSemicharacter(rng.normal(size=1), rng.normal(size=1) + 1j * rng.uniform(0, 2, 1))
        s = np.array([rng.normal(), rng.uniform(0.01, 3)])
        t = np.array([rng.normal(), rng.uniform(0.01, 3)])
        es, et, est = (cone.eval_cone(sig, C, v) for v in (s, t, s + t))
        worst_mult = max(worst_mult, abs(est - es * et) / max(abs(est), 1e-300) if est else abs(es * et))
        worst_contr = max(worst_contr, abs(es) - 1)
        # the same cone described in a rotated basis whose line direction agrees
        B = np.array([[1.0, 0.0], [Q[0, 0], abs(Q[1, 0]) + 0.5]])
        target = cone.ProductCone(1, (0.0,), B)
        if cone.cone_member(target, s):
            moved = cone.transport_character(sig, C, target)
            worst_basis = max(worst_basis, abs(cone.eval_cone(moved, target, s) - es))
    out.append(_at_most("cone multiplicativity (relative)", worst_mult, 1e-12, "DERIVED"))
    out.append(_at_most("cone contractivity", max(worst_contr, 0.0), 1e-15, "TRIVIAL"))
    out.append(_at_most("cone basis independence", worst_basis, 1e-10, "DERIVED"))
    return out


def suite_spine(seed: int, tol: float, grid: int) -> list[Check]:
    out = []
    rng = _rng(seed, "spine.flat")
    S = spine.flat_product_system(1)
    mixed = [spine.spine_product(S, S.random_point(rng, a), S.random_point(rng, b))
             for a, b in [("l", "r"), ("r", "l")] for _ in range(50)]
    nonzero = sum(r is not spine.ZERO for r in mixed)
    out.append(Check("flat H x H mixed products are ZERO", nonzero == 0, float(nonzero), 0.0, "PAPER"))

    rng = _rng(seed, "spine.chain")
    C = spine.truncation_chain(6, integer=True)
    bad = 0
    for _ in range(200):
        p, q = C.random_point(rng), C.random_point(rng)
        r = spine.spine_product(C, p, q)
        m = min(p.node, q.node)
        bad += not (r.node == m and np.array_equal(r.value, p.value[:m] + q.value[:m]))
    out.append(Check("truncation chain (s_j + t_j) up to n^m", bad == 0, float(bad), 0.0, "PAPER"))

    rng = _rng(seed, "spine.assoc")
    worst, absorbing, same_node = 0.0, 0, 0.0
    for system in (spine.flat_product_system(2), spine.truncation_chain(5), spine.subspace_lattice(3, 1)):
        for _ in range(1000 // 3 + 1):
            p, q, r = (system.random_point(rng) for _ in range(3))
            lhs = spine.spine_product(system, spine.spine_product(system, p, q), r)
            rhs = spine.spine_product(system, p, spine.spine_product(system, q, r))
            if (lhs is spine.ZERO) != (rhs is spine.ZERO) or (
                    lhs is not spine.ZERO and lhs.node != rhs.node):
                worst = math.inf
            elif lhs is not spine.ZERO:
                worst = max(worst, float(np.abs(lhs.value - rhs.value).max()))
            absorbing += spine.spine_product(system, p, spine.ZERO) is not spine.ZERO
            absorbing += spine.spine_product(system, spine.ZERO, p) is not spine.ZERO
            q2 = system.random_point(rng, p.node)
            same = spine.spine_product(system, p, q2)
            same_node = max(same_node, float(np.abs(same.value - (p.value + q2.value)).max()))
    out.append(_at_most("associativity", worst, tol, "DERIVED"))
    out.append(Check("ZERO is absorbing", absorbing == 0, float(absorbing), 0.0, "TRIVIAL"))
    out.append(_at_most("same-node product is the group law", same_node, 0.0, "TRIVIAL"))

    rng = _rng(seed, "spine.subspace")
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    L = spine.subspace_lattice(3, 0, rotation=Q)
    worst = 0.0
    for _ in range(100):
        p, q = L.random_point(rng), L.random_point(rng)
        r = spine.spine_product(L, p, q)
        target = p.node & q.node
        if r.node != target:
            worst = math.inf
            break
        Bp, Bq, Bt = (L.ambient_basis[A] for A in (p.node, q.node, target))
        proj = Bt @ Bt.T
        direct = proj @ (Bp @ p.value) + proj @ (Bq @ q.value)
        worst = max(worst, float(np.abs(Bt @ r.value - direct).max(initial=0.0)))
    out.append(_at_most("subspace lattice matches projection", worst, tol, "PAPER"))

    failures = []
    for name, system in [("flat", spine.flat_product_system(1)), ("chain", spine.truncation_chain(4)),
                         ("subspace", spine.subspace_lattice(3, 1))]:
        rep = spine.complement_is_ideal(system, rng=_rng(seed, "spine.ideal." + name))
        if not rep.passed:
            failures.append(name)
    out.append(Check("complement of top node is an ideal", not failures, float(len(failures)), 0.0,
                     "PAPER", {"failed": failures}))
    return out


def suite_opcompact(seed: int, tol: float, grid: int) -> list[Check]:
    out = []
    rng = _rng(seed, "opcompact.polar")
    worst_rec = worst_psd = worst_proj = worst_unit = worst_avg = 0.0
    not_member = 0
    Gu = {d: opcompact.GeneratedMatrixGroup((np.eye(d),), "U") for d in range(1, 5)}
    for d in range(1, 5):
        for _ in range(100):
            x = opcompact.random_contraction(d, rng)
            v, p = opcompact.polar_decompose(x)
            worst_rec = max(worst_rec, opcompact.operator_norm(x - v @ p))
            worst_psd = max(worst_psd, -float(np.linalg.eigvalsh(p).min()))
            vv = v.conj().T @ v
            worst_proj = max(worst_proj, opcompact.operator_norm(vv @ vv - vv))
            not_member += not (opcompact.spectrum_membership(v, Gu[d]).member
                               and opcompact.spectrum_membership(p, Gu[d]).member)
            u1, u2 = opcompact.convex_unitary_split(x)
            eye = np.eye(d)
            worst_unit = max(worst_unit, opcompact.operator_norm(u1.conj().T @ u1 - eye),
                             opcompact.operator_norm(u2.conj().T @ u2 - eye))
            worst_avg = max(worst_avg, opcompact.operator_norm(x - (u1 + u2) / 2))
    out.append(_at_most("polar reconstruction", worst_rec, tol, "DERIVED"))
    out.append(_at_most("polar positive part is PSD", max(worst_psd, 0.0), 1e-12, "DERIVED"))
    out.append(_at_most("v*v is a projection", worst_proj, tol, "DERIVED"))
    out.append(Check("polar parts stay in the contraction ball", not_member == 0, float(not_member),
                     0.0, "PAPER"))
    out.append(_at_most("unitary split factors are unitary", worst_unit, tol, "DERIVED"))
    out.append(_at_most("unitary split averages back", worst_avg, tol, "DERIVED"))

    rng = _rng(seed, "opcompact.walter")
    worst_exact, least_perturbed = 0.0, math.inf
    S = semigroup.NumericalSemigroup((2, 3))
    window = S.members_upto(12)
    for z in _random_disc(rng, 50):
        vals = [semigroup.eval_disc(semigroup.DiscSemicharacter(z), S, s) for s in window]
        worst_exact = max(worst_exact, opcompact.walter_residual_diagonal(window, vals))
    # perturbations are checked against the sampled characters that were
    # bounded away from zero, where a 0.1 kick must break multiplicativity
    for z in np.exp(2j * np.pi * rng.uniform(0, 1, 50)) * rng.uniform(0.8, 1.0, 50):
        vals = [semigroup.eval_disc(semigroup.DiscSemicharacter(z), S, s) for s in window]
        k = int(rng.integers(1, len(window)))
        vals[k] = vals[k] + 0.1 * np.exp(2j * np.pi * rng.uniform())
        vals = [v / max(1.0, abs(v)) for v in vals]
        least_perturbed = min(least_perturbed, opcompact.walter_residual_diagonal(window, vals))
    out.append(_at_most("Walter residual vanishes on semicharacters", worst_exact, 1e-12, "DERIVED"))
    out.append(Check("Walter residual detects perturbations", least_perturbed >= 0.05,
                     float(least_perturbed), 0.05, "DERIVED"))

    rng = _rng(seed, "opcompact.invariance")
    G = opcompact.GeneratedMatrixGroup((opcompact.haar_unitary(3, rng), opcompact.haar_unitary(3, rng)))
    words = opcompact.sample_closure(G, 6, 40, seed=seed)
    flips = 0
    for _ in range(100):
        x = opcompact.random_contraction(3, rng, max_norm=float(rng.choice([0.9, 1.3])))
        u, w = words[int(rng.integers(len(words)))], words[int(rng.integers(len(words)))]
        flips += (opcompact.spectrum_membership(x, G).member
                  != opcompact.spectrum_membership(u @ x @ w, G).member)
    out.append(Check("U-membership is two-sided invariant", flips == 0, float(flips), 0.0, "DERIVED"))

    rng = _rng(seed, "opcompact.classical")
    misses, false_hits = {}, {}
    for fam, gens in [("U", [opcompact.haar_unitary(2, rng) for _ in range(2)]),
                      ("T.O", [opcompact.random_orthogonal(3, rng) for _ in range(2)]),
                      ("T.Sp", [opcompact.random_compact_symplectic(2, rng) for _ in range(2)])]:
        G = opcompact.GeneratedMatrixGroup(tuple(gens), fam)
        words = opcompact.sample_closure(G, 5, 30, seed=seed)
        misses[fam] = 0
        for _ in range(100):
            w = words[int(rng.integers(len(words)))]
            alpha = rng.uniform(0.05, 1.0) * np.exp(2j * np.pi * rng.uniform())
            misses[fam] += not opcompact.spectrum_membership(alpha * w, G).member
        if fam != "U":
            false_hits[fam] = 0
            for _ in range(100):
                x = opcompact.random_contraction(G.dim, rng)
                m = opcompact.spectrum_membership(x, G)
                false_hits[fam] += m.member
    bad = sum(misses.values()) + sum(false_hits.values())
    out.append(Check("classical spectra membership", bad == 0, float(bad), 0.0, "PAPER",
                     {"misses": misses, "false_hits": false_hits}))
    return out


def suite_xform(seed: int, tol: float, grid: int) -> list[Check]:
    out = []
    rng = _rng(seed, "xform.modulus")
    z = rng.uniform(-5, 5, 50) + 1j * rng.uniform(0, 5, 50)
    worst_l = worst_g = 0.0
    for n in range(7):
        lhs = np.abs(xform.laplace_basis(n, z))
        rhs = math.factorial(n) / np.abs(z + 1j) ** (n + 1)
        worst_l = max(worst_l, float(np.max(np.abs(lhs - rhs) / rhs)))
        lhs = np.abs(xform.gn_pullback(n, z))
        rhs = 2 * np.abs(z - 1j) ** n / np.abs(z + 1j) ** (n + 1)
        worst_g = max(worst_g, float(np.max(np.abs(lhs - rhs) / rhs)))
    out.append(_at_most("laplace_basis modulus closed form", worst_l, tol, "PAPER"))
    out.append(_at_most("gn_pullback modulus closed form", worst_g, tol, "PAPER"))

    pts = xform.halfplane_grid(8, 8, xmax=4.0, ymin=0.1, ymax=4.0)
    ranks = {n: tuple(xform.span_equality_rank(n, pts)) for n in range(1, 7)}
    ok = all(r == (n, n, n) for n, r in ranks.items())
    out.append(Check("span equality ranks (n, n, n)", ok, 0.0 if ok else 1.0, 0.0, "PAPER",
                     {str(n): list(r) for n, r in ranks.items()}))

    rng = _rng(seed, "xform.analytic")
    worst_cr = worst_lin = 0.0
    decay_ok = True
    for _ in range(20):
        f = _random_exppoly(rng)
        g = _random_exppoly(rng)
        alpha = complex(rng.normal(), rng.normal())
        zz = complex(rng.uniform(-3, 3), rng.uniform(0.5, 3))
        scale = max(1.0, abs(xform.laplace(f, zz)))
        worst_cr = max(worst_cr, xform.cauchy_riemann_residual(lambda w: xform.laplace(f, w), zz) / scale)
        lin = xform.laplace(f + g.scale(alpha), zz) - xform.laplace(f, zz) - alpha * xform.laplace(g, zz)
        worst_lin = max(worst_lin, abs(lin) / scale)
        mods = [abs(xform.laplace(f, 1j * y)) for y in (1.0, 10.0, 100.0)]
        decay_ok &= mods[0] >= mods[1] >= mods[2]
    out.append(_at_most("Cauchy-Riemann residual", worst_cr, 1e-6, "DERIVED"))
    out.append(_at_most("laplace is linear", worst_lin, 1e-12, "TRIVIAL"))
    out.append(Check("decay along the imaginary axis", decay_ok, 0.0 if decay_ok else 1.0, 0.0, "DERIVED"))

    rng = _rng(seed, "xform.silov")
    interior = xform.halfplane_grid(50, 50)
    boundary = np.linspace(-10, 10, 500)
    worst = -math.inf
    for _ in range(20):
        f = _random_exppoly(rng)
        s_in, s_bd = xform.silov_max_modulus(f, interior, boundary)
        worst = max(worst, s_in / s_bd - 1)
    out.append(Check("maximum modulus on the real line", worst <= 1e-6, worst, 1e-6, "PAPER"))
    return out


def _random_exppoly(rng) -> xform.ExpPolyFunction:
    k = int(rng.integers(1, 4))
    return xform.ExpPolyFunction(tuple(
        (complex(rng.normal(), rng.normal()), int(rng.integers(0, 6)), float(rng.uniform(0.3, 3.0)))
        for _ in range(k)))


def suite_axb(seed: int, tol: float, grid: int) -> list[Check]:
    out = []
    rng = _rng(seed, "axb.algebra")
    worst_assoc = worst_star = worst_pol = worst_pstar = 0.0
    closure = True
    for _ in range(200):
        p, q, r = (_random_tilde(rng) for _ in range(3))
        lhs, rhs = (p * q) * r, p * (q * r)
        worst_assoc = max(worst_assoc, _rel(lhs, rhs))
        worst_star = max(worst_star, _rel(axb.tilde_star(p * q), axb.tilde_star(q) * axb.tilde_star(p)))
        worst_star = max(worst_star, _rel(axb.tilde_star(axb.tilde_star(p)), p))
        u, pos = axb.tilde_polar(p)
        worst_pol = max(worst_pol, _rel(u.tilde() * pos, p))
        worst_pstar = max(worst_pstar, _rel(axb.tilde_star(p) * p, axb.TildeAxb(1.0, 2j * p.z.imag / p.a)))
        closure &= (p * q).z.imag >= 0
    out.append(_at_most("G~ associativity", worst_assoc, 1e-14, "DERIVED"))
    out.append(_at_most("G~ involution", worst_star, 1e-14, "PAPER"))
    out.append(_at_most("p* p = (1, 2i Im z / a)", worst_pstar, 1e-14, "PAPER"))
    out.append(_at_most("polar factors multiply back", worst_pol, 1e-14, "PAPER"))
    out.append(Check("Im z closure", closure, 0.0 if closure else 1.0, 0.0, "TRIVIAL"))

    grids = (grid, 2 * grid, 4 * grid)
    P, Q = axb.TildeAxb(2.0, 1.0), axb.TildeAxb(0.5, -1.0)
    for name, measure in [
        ("representation T(p)T(q) = T(pq)", lambda G: axb.representation_residual(G, P, Q)),
        ("representation T(q)T(p) = T(qp)", lambda G: axb.representation_residual(G, Q, P)),
        ("weak isometry a=1.3", lambda G: axb.isometry_defect(G, axb.AxbElement(1.3, 0.4))),
    ]:
        out.append(_refinement_check(name, measure, grids))
    for p in (axb.TildeAxb(2.0, 0.5 + 0.3j), axb.TildeAxb(0.5, -1 + 1j)):
        out.append(_refinement_check(f"polar unitary part {p.a:g},{p.z}",
                                     lambda G, p=p: axb.polar_match(G, p).unitary_residual, grids))
        out.append(_refinement_check(f"polar positive part {p.a:g},{p.z}",
                                     lambda G, p=p: axb.polar_match(G, p).positive_residual, grids))
    wgrids = tuple(n for n in grids if n <= axb.MAX_TENSOR_GRID)
    for p in (axb.TildeAxb(1.0, 0j), axb.TildeAxb(1.0, 0.5j),
              axb.TildeAxb(2.0, 0.5 + 0.3j), axb.TildeAxb(0.5, -1 + 1j)):
        out.append(_refinement_check(f"Walter residual {p.a:g},{p.z}",
                                     lambda G, p=p: axb.walter_residual_axb(G, p), wgrids))
    return out


def _random_tilde(rng) -> axb.TildeAxb:
    return axb.TildeAxb(float(rng.uniform(0.25, 4)), complex(rng.normal(), rng.uniform(0, 2)))


def _rel(p: axb.TildeAxb, q: axb.TildeAxb) -> float:
    return max(abs(p.a - q.a) / max(1.0, abs(q.a)), abs(p.z - q.z) / max(1.0, abs(q.z)))


def _refinement_check(name: str, measure: Callable, grids) -> Check:
    rep = axb.refinement_study(measure, grids)
    return Check(name, rep.passed, rep.residuals[-1], 1.5, "DERIVED", rep.to_json())


_SUITE_FUNCS = {"semichar": suite_semichar, "spine": suite_spine, "opcompact": suite_opcompact,
                "xform": suite_xform, "axb": suite_axb}


def run_suite(name: str, seed: int = 0, tol: float = DEFAULT_TOL, grid: int = 16) -> Report:
    if name == "all":
        checks = []
        for suite in SUITES:
            checks.extend(_prefixed(suite, _SUITE_FUNCS[suite](seed, tol, grid)))
        return Report("all", seed, tol, checks)
    if name not in _SUITE_FUNCS:
        raise KeyError(name)
    return Report(name, seed, tol, _SUITE_FUNCS[name](seed, tol, grid))


def _prefixed(suite, checks):
    for c in checks:
        c.name = f"{suite}: {c.name}"
    return checks
