"""Root finding for sector systems: all isolated solutions with certification.

Strategy: batched multi-start Newton on a randomly squared version of the
(overdetermined) system, acceptance by the full residual, dedup by max-norm
clustering, high-precision certification, optional rationalization of
coordinates, and a Groebner quotient-dimension cross-check on small sectors.
Divisibility constraints act as root filters, never as Jacobian rows.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import liealg
from .bethe import ChainSpec, CompiledSystem, MPoly, UnknownSystem, build_system, unknown_layout
from .qpoly import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    GaussianRational,
    ShiftedPolynomial,
    wronskian,
)
from .qsystem import chain_state_from_polys, check_kinematic

__all__ = [
    "SolverConfig",
    "Solution",
    "SectorResult",
    "solve_sector",
    "solve_chain",
    "dedup",
    "certify",
    "dynkin_qq_compare",
    "state_polys_from_assignment",
]


@dataclass
class SolverConfig:
    mode: str = "auto"  # exact | numeric | auto
    seed: int = 12041
    starts_per_unknown: int = 50
    dedup_radius: float = 1e-6
    residual_tol: float = 1e-10
    precision_bits: int = 53
    escalate_bits: int = 212
    extra_rounds: int = 2
    budget_seconds: Optional[float] = None
    exact_cutoff: int = 6
    batch: int = 128
    max_rounds: int = 60
    filter_tol: float = 1e-7

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        cfg = cls()
        for k, v in d.items():
            if not hasattr(cfg, k):
                raise KeyError(f"unknown solver option {k!r}")
            setattr(cfg, k, type(getattr(cfg, k))(v) if getattr(cfg, k) is not None else v)
        return cfg


@dataclass
class Solution:
    assignment: List[complex]
    exact: Optional[List[GaussianRational]]
    multiplicity: int
    certified: bool
    residual: float
    passes_filters: bool = True

    def to_json(self) -> dict:
        out = {
            "assignment": [[z.real, z.imag] for z in self.assignment],
            "multiplicity": self.multiplicity,
            "certified": self.certified,
            "residual": self.residual,
            "passes_filters": self.passes_filters,
        }
        if self.exact is not None:
            out["exact"] = [g.serialize() for g in self.exact]
        return out


@dataclass
class SectorResult:
    lam: liealg.Weight
    expected: int
    solutions: List[Solution] = field(default_factory=list)
    raw_count: int = 0
    algebraic_count: Optional[int] = None
    status: str = "complete"
    seconds: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def count(self) -> int:
        return sum(s.multiplicity for s in self.solutions if s.passes_filters)

    def to_json(self) -> dict:
        return {
            "lambda": liealg.weight_str(self.lam),
            "expected": self.expected,
            "found": self.count,
            "raw_count": self.raw_count,
            "algebraic_count": self.algebraic_count,
            "status": self.status,
            "seconds": round(self.seconds, 3),
            "notes": self.notes,
            "solutions": [s.to_json() for s in self.solutions],
        }


def solve_sector(system: Optional[UnknownSystem], expected: int,
                 config: SolverConfig) -> SectorResult:
    """All isolated roots of a sector system, filtered and certified."""
    t0 = time.time()
    if system is None:
        res = SectorResult(lam=None, expected=expected)
        res.status = "complete" if expected == 0 else "deficit"
        res.notes.append("sector infeasible (negative degree)")
        res.seconds = time.time() - t0
        return res
    res = SectorResult(lam=system.lam, expected=expected)
    n = system.n_unknowns
    if n == 0:
        # fully gauge-fixed sector: the trivial assignment, if consistent
        ok = all(not eq for eq in system.equations)
        sol = Solution([], None, 1, True, 0.0)
        if ok:
            res.solutions = [sol]
        res.raw_count = len(res.solutions)
        res.status = "complete" if res.count == expected else (
            "deficit" if res.count < expected else "excess")
        res.seconds = time.time() - t0
        return res

    comp = system.compile()
    # the divisibility constraints join the search system: multi-start aims
    # straight at the physical variety instead of the larger relaxed one,
    # and multiplicity is measured in the same enlarged ideal.  They are
    # still re-applied as acceptance filters on every candidate.
    if system.filters:
        full = UnknownSystem(system.r, system.lam, system.names,
                             system.equations + system.filters, [],
                             system.degrees, system.pair_constants).compile()
    else:
        full = comp
    seeds = _parity_seeds(system, full, config)
    roots = _multistart_roots(full, expected, config, seeds=seeds)
    res.raw_count = len(roots)
    solutions: List[Solution] = []
    for u in roots:
        ex = _rationalize(system, u)
        passes = _passes_filters(system, u, ex, config)
        mult = _local_multiplicity(full, u) if passes else 1
        cert, resid = certify(full if passes else comp, u, config)
        solutions.append(Solution([complex(z) for z in u], ex, mult, cert, resid, passes))
    solutions.sort(key=lambda s: (tuple(np.round([z.real for z in s.assignment], 8)),
                                  tuple(np.round([z.imag for z in s.assignment], 8))))
    res.solutions = solutions
    if config.mode != "numeric" and n <= config.exact_cutoff:
        try:
            res.algebraic_count = _groebner_count(system, include_filters=True)
        except Exception as exc:  # cross-check only; never fatal
            res.notes.append(f"groebner count unavailable: {exc}")
    res.status = "complete" if res.count == expected else (
        "deficit" if res.count < expected else "excess")
    res.seconds = time.time() - t0
    return res


def _parity_seeds(system: UnknownSystem, full: CompiledSystem,
                  config: SolverConfig) -> List[np.ndarray]:
    """Roots on the definite-parity subspace of coefficient slots.

    Coefficients at the wrong parity distance from the leading power are set
    to zero, the reduced system is solved cheaply, and every lift is checked
    on the full system.  A pure accelerator: anything found here would also
    be found by the general search, and nothing unverified is kept.
    """
    keep = []
    for i, name in enumerate(system.names):
        try:
            a, l = name[1:].split(",")
            a, l = int(a), int(l)
        except ValueError:
            return []
        M = system.degrees[("psi0",)] if a == 0 else system.degrees[("psi", a)]
        if (M - l) % 2 == 0:
            keep.append(i)
    if len(keep) == len(system.names) or not keep:
        return []
    red_eqs = []
    for eq in system.equations + system.filters:
        r = eq.restrict(keep)
        if r is not None:
            red_eqs.append(r)
    reduced = UnknownSystem(system.r, system.lam,
                            [system.names[i] for i in keep], red_eqs, [],
                            system.degrees, system.pair_constants)
    sub = SolverConfig(**{**config.__dict__, "max_rounds": 25, "extra_rounds": 3})
    try:
        comp_red = reduced.compile()
    except Exception:
        return []
    sub_roots = _multistart_roots(comp_red, 10**9, sub)
    seeds = []
    for v in sub_roots:
        u = np.zeros(len(system.names), dtype=complex)
        u[keep] = v
        polished = _polish(full, u)
        if polished is not None:
            seeds.append(polished)
    return seeds


def _multistart_roots(comp: CompiledSystem, expected: int, config: SolverConfig,
                      filtered_counter=None, seeds: Optional[List[np.ndarray]] = None):
    """Batched damped Newton over random complex starts with a stability
    window: stop when no new root shows up for extra_rounds after the
    expected count is reached (or the budget runs out).

    When the sector carries divisibility filters, the stopping count is the
    number of roots that pass them, since the excess relaxed roots are not
    the quantity compared against the multiplicity oracle.
    """
    rng = np.random.default_rng(config.seed)
    n, m = comp.n, comp.m
    if m == 0:
        return [np.zeros(n, dtype=complex)]
    A = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
    A /= np.linalg.norm(A, axis=1, keepdims=True)
    eq_scale = np.maximum(np.abs(comp.eq_mat).max(axis=1), 1e-12)
    found: List[np.ndarray] = []
    if seeds:
        for u in seeds:
            if not any(np.max(np.abs(u - v)) < config.dedup_radius for v in found):
                found.append(u)
    rounds_since_new = 0
    t0 = time.time()
    min_rounds = max(4, min(config.max_rounds, n // 2))
    root_sizes = (0.4, 0.8, 1.2, 1.7, 2.3)
    for round_no in range(config.max_rounds):
        S = config.batch
        scales = np.array(comp.system.start_scales(root_sizes[round_no % len(root_sizes)]))
        U = scales[None, :] * (rng.normal(size=(S, n)) + 1j * rng.normal(size=(S, n)))
        if found and round_no % 3 == 2:
            # revisit neighborhoods of known roots; clusters are common
            base = np.stack([found[rng.integers(len(found))] for _ in range(S)])
            U = base + 0.3 * scales[None, :] * (
                rng.normal(size=(S, n)) + 1j * rng.normal(size=(S, n)))
        U = _newton_batch(comp, A, U, 60)
        Fv = comp.residuals(U)
        rel = np.max(np.abs(Fv) / eq_scale[None, :], axis=1)
        new = 0
        for k in np.nonzero(rel < 1e-8)[0]:
            u = _polish(comp, U[k])
            if u is None:
                continue
            if any(np.max(np.abs(u - v)) < config.dedup_radius for v in found):
                continue
            found.append(u)
            new += 1
            # verified orbit images under parity and conjugation: cheap
            # candidates that often complete symmetric root pairs
            for img in _symmetry_images(comp.system, u):
                w = _polish(comp, img)
                if w is None:
                    continue
                if any(np.max(np.abs(w - v)) < config.dedup_radius for v in found):
                    continue
                found.append(w)
                new += 1
        if new:
            rounds_since_new = 0
        else:
            rounds_since_new += 1
        have = filtered_counter(found) if filtered_counter else len(found)
        if round_no + 1 >= min_rounds and have >= expected and \
                rounds_since_new >= config.extra_rounds:
            break
        # even short of the expected count, a long quiet stretch ends the hunt
        if round_no + 1 >= min_rounds and rounds_since_new >= max(3 * config.extra_rounds, 12):
            break
        if config.budget_seconds and time.time() - t0 > config.budget_seconds:
            break
    return found


def _symmetry_images(system: UnknownSystem, u: np.ndarray) -> List[np.ndarray]:
    """Candidate images of a root under coefficient parity and conjugation."""
    signs = []
    for name in system.names:
        try:
            a, l = name[1:].split(",")
            a, l = int(a), int(l)
            M = system.degrees[("psi0",)] if a == 0 else system.degrees[("psi", a)]
            signs.append((-1.0) ** ((M - l) % 2))
        except (ValueError, KeyError):
            return []
    signs = np.array(signs)
    return [signs * u, np.conj(u), signs * np.conj(u)]


def _newton_batch(comp: CompiledSystem, A: np.ndarray, U: np.ndarray, iters: int) -> np.ndarray:
    n = comp.n
    for _ in range(iters):
        F = comp.residuals(U)
        J = comp.jacobian(U)
        G = F @ A.T
        JG = np.einsum("ik,skn->sin", A, J)
        try:
            dx = np.linalg.solve(JG, -G[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            dx = np.stack([
                np.linalg.lstsq(JG[s], -G[s], rcond=None)[0] for s in range(U.shape[0])
            ])
        norms = np.abs(dx).max(axis=1)
        cap = np.where(norms > 3.0, 3.0 / np.maximum(norms, 1e-30), 1.0)
        U = U + dx * cap[:, None]
        if np.all(norms < 1e-14):
            break
    return U


def _polish(comp: CompiledSystem, u: np.ndarray, iters: int = 40) -> Optional[np.ndarray]:
    eq_scale = np.maximum(np.abs(comp.eq_mat).max(axis=1), 1e-12)
    for _ in range(iters):
        F = comp.residuals(u[None, :])[0]
        if np.max(np.abs(F) / eq_scale) < 1e-13:
            break
        J = comp.jacobian(u[None, :])[0]
        dx, *_ = np.linalg.lstsq(J, -F, rcond=None)
        if not np.all(np.isfinite(dx)):
            return None
        u = u + dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    F = comp.residuals(u[None, :])[0]
    if np.max(np.abs(F) / eq_scale) < 1e-9:
        return u
    return None


def _local_multiplicity(comp: CompiledSystem, u: np.ndarray) -> int:
    """Estimate via the Newton contraction rate: a root of multiplicity m
    pulls the error in by about (m-1)/m per step."""
    J = comp.jacobian(u[None, :])[0]
    s = np.linalg.svd(J, compute_uv=False)
    if s[-1] > 1e-6 * max(s[0], 1e-30):
        return 1
    rng = np.random.default_rng(7)
    rates = []
    for _ in range(4):
        v = u + 1e-5 * (rng.normal(size=comp.n) + 1j * rng.normal(size=comp.n))
        prev = np.max(np.abs(v - u))
        for _ in range(3):
            F = comp.residuals(v[None, :])[0]
            Jv = comp.jacobian(v[None, :])[0]
            dx, *_ = np.linalg.lstsq(Jv, -F, rcond=None)
            v = v + dx
        cur = np.max(np.abs(v - u))
        if prev > 0 and cur > 0:
            rates.append((cur / prev) ** (1.0 / 3.0))
    if not rates:
        return 1
    rate = float(np.median(rates))
    if rate < 0.25:
        return 1
    return max(1, round(1.0 / max(1.0 - rate, 1e-2)))


def dedup(points: Sequence[np.ndarray], radius: float):
    """Cluster by max-norm distance; returns representatives with sizes."""
    reps: List[np.ndarray] = []
    sizes: List[int] = []
    for p in points:
        p = np.asarray(p, dtype=complex)
        for j, q in enumerate(reps):
            if p.shape == q.shape and np.max(np.abs(p - q)) < radius:
                sizes[j] += 1
                break
        else:
            reps.append(p)
            sizes.append(1)
    return list(zip(reps, sizes))


def certify(comp: CompiledSystem, u: np.ndarray, config: SolverConfig):
    """Residual at escalating precision plus a Newton-contraction test."""
    eq_scale = np.maximum(np.abs(comp.eq_mat).max(axis=1), 1e-12)
    F = comp.residuals(np.asarray(u)[None, :])[0]
    r53 = float(np.max(np.abs(F) / eq_scale))
    if r53 > math.sqrt(config.residual_tol):
        return False, r53
    import mpmath

    dps = max(17, int(config.escalate_bits / 3.32))
    with mpmath.workdps(dps):
        vals = [mpmath.mpc(z) for z in u]
        resid_hi = 0.0
        for eq, sc in zip(comp.system.equations, eq_scale):
            v = _eval_mpoly_mp(eq, vals, mpmath)
            resid_hi = max(resid_hi, float(abs(v)) / float(sc))
        # one high-precision Newton step must contract
        step = _newton_step_mp(comp.system, vals, mpmath)
        contraction = float(step) if step is not None else float("inf")
    certified = resid_hi <= config.residual_tol and (
        contraction < 1e-6 or resid_hi == 0.0)
    return certified, resid_hi


def _eval_mpoly_mp(eq: MPoly, vals, mpmath):
    total = mpmath.mpc(0)
    for e, c in eq.terms.items():
        m = mpmath.mpc(float(c.re), float(c.im))
        for x, p in zip(vals, e):
            if p:
                m *= x**p
        total += m
    return total


def _newton_step_mp(system: UnknownSystem, vals, mpmath):
    n = len(vals)
    m = len(system.equations)
    if m == 0 or n == 0:
        return 0.0
    J = mpmath.matrix(m, n)
    F = mpmath.matrix(m, 1)
    for j, eq in enumerate(system.equations):
        F[j, 0] = _eval_mpoly_mp(eq, vals, mpmath)
        for i in range(n):
            J[j, i] = _eval_mpoly_mp(eq.derivative(i), vals, mpmath)
    try:
        JH = J.T.conjugate()
        dx = mpmath.lu_solve(JH * J, -(JH * F))
    except Exception:
        return None
    return max(abs(dx[i, 0]) for i in range(n)) if n else 0.0


def _rationalize(system: UnknownSystem, u: np.ndarray,
                 max_den: int = 10**6) -> Optional[List[GaussianRational]]:
    """Try to recognize the coordinates as small Gaussian rationals and
    verify exactly; the golden solutions all live here."""
    cand = []
    for z in u:
        re = Fraction(z.real).limit_denominator(max_den)
        im = Fraction(z.imag).limit_denominator(max_den)
        if abs(float(re) - z.real) > 1e-9 or abs(float(im) - z.imag) > 1e-9:
            return None
        if re.denominator > 10**4 or im.denominator > 10**4:
            return None
        cand.append(GaussianRational(re, im))
    for eq in system.equations:
        if eq.eval_exact(cand):
            return None
    return cand


def _passes_filters(system: UnknownSystem, u: np.ndarray,
                    exact: Optional[List[GaussianRational]], config: SolverConfig) -> bool:
    if not system.filters:
        return True
    if exact is not None:
        return all(not f.eval_exact(exact) for f in system.filters)
    scale = 1.0
    for f in system.filters:
        fs = max((abs(c.to_complex()) for c in f.terms.values()), default=1.0)
        if abs(f.eval([complex(z) for z in u])) > config.filter_tol * fs * max(
                1.0, float(np.max(np.abs(u))) ** max(1, f.total_degree())):
            return False
    return True


def _groebner_count(system: UnknownSystem, include_filters: bool = True) -> int:
    """Dimension of the quotient ring (algebraic solution count with
    multiplicity) through a Groebner basis over Q(i)."""
    import sympy
    from sympy import QQ_I

    names = sympy.symbols([n.replace(",", "_") for n in system.names])
    if not names:
        return 1

    def to_expr(eq: MPoly):
        total = sympy.Integer(0)
        for e, c in eq.terms.items():
            term = sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(
                c.im.numerator, c.im.denominator)
            for x, p in zip(names, e):
                if p:
                    term *= x**p
            total += term
        return total

    polys = [to_expr(eq) for eq in system.equations]
    if include_filters:
        polys += [to_expr(f) for f in system.filters]
    G = sympy.groebner(polys, *names, order="grevlex", domain=QQ_I)
    if G.is_zero_dimensional is False:
        raise ArithmeticError("sector ideal is not zero-dimensional")
    leads = [sympy.Poly(g, *names).LM(order="grevlex") for g in G.exprs]
    lead_exps = [tuple(m.exponents) for m in leads]
    # count standard monomials under the staircase
    bounds = []
    for i in range(len(names)):
        pures = [e[i] for e in lead_exps if sum(e) == e[i]]
        if not pures:
            raise ArithmeticError("unexpected unbounded direction")
        bounds.append(min(pures))
    count = 0
    import itertools as _it

    for e in _it.product(*(range(b) for b in bounds)):
        if not any(all(x >= y for x, y in zip(e, le)) for le in lead_exps):
            count += 1
    return count


# -- chain-level orchestration --------------------------------------------------


def state_polys_from_assignment(system: UnknownSystem, assignment,
                                exact: Optional[List[GaussianRational]] = None):
    """Materialize psi0 and the one-forms from a solution vector."""
    r = system.r
    degrees = system.degrees
    names, slots = unknown_layout(r, degrees)
    pos = {name: i for i, name in enumerate(names)}

    def coeff(a, l):
        i = pos[f"c{a},{l}"]
        if exact is not None:
            return exact[i]
        z = assignment[i]
        return complex(z)

    def make(a):
        deg = degrees[("psi0",)] if a == 0 else degrees[("psi", a)]
        if exact is not None:
            coeffs = [GR_ZERO] * (deg + 1)
            coeffs[deg] = GR_ONE
        else:
            coeffs = [0j] * (deg + 1)
            coeffs[deg] = 1.0 + 0j
        for l in slots[a]:
            coeffs[l] = coeff(a, l)
        return ShiftedPolynomial(coeffs)

    psi0 = make(0)
    psis = {a: make(a) for a in range(1, r + 1)}
    return psi0, psis


def build_state(system: UnknownSystem, chain: ChainSpec, sol: Solution):
    """Reconstruct the full Q-system state for a solution."""
    exact = sol.exact
    psi0, psis = state_polys_from_assignment(system, sol.assignment, exact)
    P = chain.drinfeld()
    if exact is None:
        P = [p.to_complex() for p in P]
    pdeg = {(a, b): system.degrees[("psi2", a, b)]
            for a in range(1, chain.r + 1) for b in range(a + 1, chain.r + 1)}
    return chain_state_from_polys(chain.r, psi0, psis, P, pdeg,
                                  exact=exact is not None, tol=1e-6)


def solve_chain(chain: ChainSpec, config: SolverConfig,
                sectors: Optional[List[liealg.Weight]] = None,
                include_kinematic: Optional[bool] = None,
                progress=None) -> Dict[liealg.Weight, SectorResult]:
    """Solve every requested sector of a chain; default: all dominant weights
    with nonzero expected multiplicity, plus feasible zero-multiplicity ones
    are skipped unless listed explicitly."""
    expected = liealg.chain_multiplicities(chain.r, chain.node_list())
    if sectors is None:
        sectors = sorted(expected.keys(), reverse=True)
    out: Dict[liealg.Weight, SectorResult] = {}
    for lam in sectors:
        syst = build_system(chain, lam, include_kinematic)
        exp = expected.get(lam, 0)
        res = solve_sector(syst, exp, config)
        res.lam = lam
        out[lam] = res
        if progress:
            progress(lam, res)
    return out


# -- the two-function-per-node comparison system --------------------------------


def dynkin_qq_compare(chain: ChainSpec, lam: liealg.Weight, config: SolverConfig,
                      wronskian_solutions: Optional[List[Solution]] = None,
                      wronskian_system: Optional[UnknownSystem] = None) -> dict:
    """Solve the two-function-per-node system and report which of its
    solutions survive as solutions of the determinant conditions."""
    r = chain.r
    degrees = liealg.magnon_degrees(r, chain.drinfeld_degrees(), lam)
    d1 = {a: degrees[("q1", a)] for a in range(1, r + 1)}
    d2 = {a: degrees[("q2", a)] for a in range(1, r + 1)}
    if any(v < 0 for v in list(d1.values()) + list(d2.values())):
        return {"solutions": [], "survivors": 0, "note": "sector infeasible"}
    names: List[str] = []
    pos: Dict[str, int] = {}
    for a in range(1, r + 1):
        for l in range(d1[a]):
            pos[f"q1_{a},{l}"] = len(names)
            names.append(f"q1_{a},{l}")
        for l in range(d2[a]):
            if l == d1[a]:
                continue  # gauge: q2 has no q1-leading-degree component
            pos[f"q2_{a},{l}"] = len(names)
            names.append(f"q2_{a},{l}")
    n = len(names)
    one = MPoly.const(n, GR_ONE)

    def upoly(tag, a, deg, skip=None):
        coeffs = [MPoly(n) for _ in range(deg + 1)]
        coeffs[deg] = one
        for l in range(deg):
            if l == skip:
                continue
            coeffs[l] = MPoly.var(n, pos[f"{tag}_{a},{l}"])
        return ShiftedPolynomial(coeffs)

    q1 = {a: upoly("q1", a, d1[a]) for a in range(1, r + 1)}
    q2 = {a: upoly("q2", a, d2[a], skip=d1[a]) for a in range(1, r + 1)}
    P = chain.drinfeld()
    from .qsystem import dynkin_adjacency

    adj = dynkin_adjacency(r)
    equations: List[MPoly] = []
    for a in range(1, r + 1):
        lhs = wronskian([q1[a], q2[a]])
        rhs = ShiftedPolynomial([MPoly.const(n, c) for c in P[a - 1].coeffs])
        for b in adj[a]:
            rhs = rhs * q1[b]
        if lhs.degree != rhs.degree:
            raise ArithmeticError("two-function system degree mismatch")
        cq = lhs.lead()
        assert cq.is_constant()
        cval = cq.constant_value()
        for dd in range(lhs.degree):
            eq = lhs.coeff(dd) - rhs.coeff(dd) * cval
            if eq:
                equations.append(eq)
    qq_system = UnknownSystem(r, lam, names, equations, [], degrees, {})
    res = solve_sector(qq_system, expected=10**9, config=config)
    # identify survivors by matching the single-index polynomials
    survivors = 0
    sols_out = []
    for sol in res.solutions:
        entry = {"q1": {}, "survives": False}
        for a in range(1, r + 1):
            coeffs = [0j] * (d1[a] + 1)
            coeffs[d1[a]] = 1.0 + 0j
            for l in range(d1[a]):
                coeffs[l] = complex(sol.assignment[pos[f"q1_{a},{l}"]])
            entry["q1"][a] = coeffs
        sols_out.append(entry)
    if wronskian_solutions is not None and wronskian_system is not None:
        targets = []
        for wsol in wronskian_solutions:
            st = build_state(wronskian_system, chain, wsol)
            targets.append({a: st.baxter_q(a).to_complex() for a in range(1, r + 1)})
        for entry in sols_out:
            for tgt in targets:
                dist = 0.0
                for a in range(1, r + 1):
                    qa = tgt[a]
                    cand = entry["q1"][a]
                    want = [complex(c) for c in qa.coeffs] + [0j] * (
                        d1[a] + 1 - len(qa.coeffs))
                    dist = max(dist, max(
                        abs(x - y) for x, y in zip(cand, want)) if want else 0.0)
                if dist < 1e-5:
                    entry["survives"] = True
        survivors = sum(1 for e in sols_out if e["survives"])
    return {"solutions": sols_out, "count": len(sols_out), "survivors": survivors,
            "raw": res.to_json()}
