"""Construction of the polynomial system for the unknown coefficients.

Per sector (dominant weight lambda with the right fractionality), the
one-form and singlet polynomials are parameterised by their free
coefficients; the two-form components are eliminated through the linear
triangular solve of the pair equations; what remains are the pair
consistency equations, the rank-r Wronskian condition, and optionally the
divisibility (kinematic) constraints used as root filters.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import liealg
from .qpoly import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    GaussianRational,
    ShiftedPolynomial,
    fused_power,
    parse_gaussian,
    wronskian,
)
from .qsystem import solve_pair_equation

__all__ = [
    "MPoly",
    "ChainSpec",
    "UnknownSystem",
    "build_system",
    "basic_chain_detect",
    "sector_weights",
    "nested_bae_residual",
]


class MPoly:
    """Sparse multivariate polynomial over the Gaussian rationals."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Dict[Tuple[int, ...], GaussianRational]] = None):
        self.n = n
        self.terms = {}
        if terms:
            for e, c in terms.items():
                if c:
                    self.terms[e] = c

    @classmethod
    def const(cls, n: int, c) -> "MPoly":
        c = c if isinstance(c, GaussianRational) else GaussianRational(c)
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n: int, i: int) -> "MPoly":
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): GR_ONE})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.n == other.n and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.terms.items(), key=lambda t: t[0]))))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, GR_ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MPoly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (GaussianRational, int, Fraction)):
            return self.scale_gaussian(other)
        other = self._coerce(other)
        out: Dict[Tuple[int, ...], GaussianRational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e, GR_ZERO) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MPoly(self.n, out)

    __rmul__ = __mul__

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            return other
        return MPoly.const(self.n, other)

    def scale_gaussian(self, g) -> "MPoly":
        g = g if isinstance(g, GaussianRational) else GaussianRational(g)
        return MPoly(self.n, {e: c * g for e, c in self.terms.items()})

    def half_i_shift(self, k: int):
        """Shift constant for polynomials with MPoly coefficients."""
        return MPoly.const(self.n, GaussianRational(0, Fraction(k, 2)))

    def ring_one(self) -> "MPoly":
        return MPoly.const(self.n, GR_ONE)

    def inverse(self) -> "MPoly":
        if not self.is_constant():
            raise ArithmeticError("only constant coefficients are invertible here")
        return MPoly.const(self.n, GR_ONE / self.constant_value())

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> GaussianRational:
        return self.terms.get((0,) * self.n, GR_ZERO)

    def derivative(self, i: int) -> "MPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return MPoly(self.n, out)

    def eval(self, vals: Sequence[complex]) -> complex:
        total = 0j
        for e, c in self.terms.items():
            m = c.to_complex()
            for x, p in zip(vals, e):
                if p:
                    m *= x**p
            total += m
        return total

    def eval_exact(self, vals: Sequence[GaussianRational]) -> GaussianRational:
        total = GR_ZERO
        for e, c in self.terms.items():
            m = c
            for x, p in zip(vals, e):
                for _ in range(p):
                    m = m * x
            total = total + m
        return total

    def restrict(self, keep: Sequence[int]) -> Optional["MPoly"]:
        """Substitute zero for all variables outside keep and renumber.

        Returns None when the polynomial dies entirely.
        """
        keep = list(keep)
        posmap = {old: new for new, old in enumerate(keep)}
        out: Dict[Tuple[int, ...], GaussianRational] = {}
        for e, c in self.terms.items():
            if any(p and i not in posmap for i, p in enumerate(e)):
                continue
            ne = [0] * len(keep)
            for i, p in enumerate(e):
                if p:
                    ne[posmap[i]] = p
            key = tuple(ne)
            s = out.get(key, GR_ZERO) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        if not out:
            return None
        return MPoly(len(keep), out)

    def to_json(self) -> list:
        return [[list(e), c.serialize()] for e, c in sorted(self.terms.items())]

    def __repr__(self):
        if not self.terms:
            return "MPoly(0)"
        bits = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"x{i}^{p}" for i, p in enumerate(e) if p)
            bits.append(f"({c!r}){'*' + mono if mono else ''}")
        return " + ".join(bits)


# -- chains -------------------------------------------------------------------


@dataclass
class ChainSpec:
    """Rank plus the list of (node, inhomogeneity) sites."""

    r: int
    nodes: List[Tuple[int, GaussianRational]]

    def __post_init__(self):
        for a, _ in self.nodes:
            if not 1 <= a <= self.r:
                raise ValueError(f"node index {a} out of range for rank {self.r}")

    @classmethod
    def homogeneous(cls, r: int, a: int, L: int) -> "ChainSpec":
        return cls(r, [(a, GR_ZERO)] * L)

    @property
    def length(self) -> int:
        return len(self.nodes)

    def drinfeld(self) -> List[ShiftedPolynomial]:
        out = []
        for a in range(1, self.r + 1):
            p = ShiftedPolynomial([GR_ONE])
            for b, theta in self.nodes:
                if b == a:
                    p = p * ShiftedPolynomial([-theta, GR_ONE])
            out.append(p)
        return out

    def drinfeld_degrees(self) -> List[int]:
        return [sum(1 for b, _ in self.nodes if b == a) for a in range(1, self.r + 1)]

    def node_list(self) -> List[int]:
        return [a for a, _ in self.nodes]

    def perturbed(self, scale: Fraction = Fraction(1, 97)) -> "ChainSpec":
        """Tiny exact-rational inhomogeneity twist for genericity probes."""
        out = []
        for k, (a, theta) in enumerate(self.nodes):
            out.append((a, theta + GaussianRational(scale * (k + 1))))
        return ChainSpec(self.r, out)


def basic_chain_detect(chain: ChainSpec) -> bool:
    """True when the Drinfeld data is fully captured by the two combinations
    entering the Wronskian conditions: interior nodes empty and the two
    spinor-node polynomials coprime."""
    r = chain.r
    degs = chain.drinfeld_degrees()
    if any(degs[a - 1] for a in range(2, r - 1)):
        return False
    P = chain.drinfeld()
    p1, p2 = P[r - 2], P[r - 1]
    if p1.degree <= 0 or p2.degree <= 0:
        return True
    return p1.gcd(p2).degree == 0


def sector_weights(chain: ChainSpec) -> Dict[liealg.Weight, int]:
    """Dominant weights with their multiplicities for the chain."""
    return liealg.chain_multiplicities(chain.r, chain.node_list())


# -- the unknown system -------------------------------------------------------


@dataclass
class UnknownSystem:
    r: int
    lam: liealg.Weight
    names: List[str]
    equations: List[MPoly]
    filters: List[MPoly]
    degrees: Dict
    pair_constants: Dict[Tuple[int, int], GaussianRational]
    notes: List[str] = field(default_factory=list)

    @property
    def n_unknowns(self) -> int:
        return len(self.names)

    def start_scales(self, root_size: float = 1.0) -> List[float]:
        """Natural magnitude of each unknown: the coefficient c_{a,l} of a
        monic degree-M polynomial with roots of size rho scales like
        binomial(M, l) rho^{M-l}.  Used to shape random starts."""
        out = []
        for name in self.names:
            try:
                a, l = name[1:].split(",")
                a, l = int(a), int(l)
                M = self.degrees[("psi0",)] if a == 0 else self.degrees[("psi", a)]
                out.append(float(math.comb(M, l)) * root_size ** (M - l))
            except (ValueError, KeyError):
                out.append(1.0)
        return out

    def to_json(self) -> dict:
        return {
            "rank": self.r,
            "lambda": liealg.weight_str(self.lam),
            "unknowns": self.names,
            "equations": [eq.to_json() for eq in self.equations],
            "filters": [eq.to_json() for eq in self.filters],
            "notes": self.notes,
        }

    def compile(self) -> "CompiledSystem":
        return CompiledSystem(self)


class CompiledSystem:
    """Numpy evaluators for a system and its Jacobian over batched points."""

    def __init__(self, system: UnknownSystem):
        self.system = system
        n = system.n_unknowns
        self.n = n
        monos: Dict[Tuple[int, ...], int] = {}

        def index(e):
            if e not in monos:
                monos[e] = len(monos)
            return monos[e]

        eq_rows = []
        for eq in system.equations:
            eq_rows.append([(index(e), c.to_complex()) for e, c in eq.terms.items()])
        jac_rows = []
        for eq in system.equations:
            row = []
            for i in range(n):
                d = eq.derivative(i)
                row.append([(index(e), c.to_complex()) for e, c in d.terms.items()])
            jac_rows.append(row)
        self.m = len(eq_rows)
        # close the monomial set under taking one-step parents, so values can
        # be built incrementally from the constant monomial
        queue = list(monos.keys())
        while queue:
            e = queue.pop()
            if sum(e) == 0:
                continue
            i = next(j for j, p in enumerate(e) if p)
            e2 = list(e)
            e2[i] -= 1
            e2 = tuple(e2)
            if e2 not in monos:
                monos[e2] = len(monos)
                queue.append(e2)
        self.monos = list(monos.keys())
        # sparse matrices mapping monomial values to equation/jacobian values
        self.eq_mat = _sparse_matrix(eq_rows, len(self.monos))
        self.jac_mats = [
            _sparse_matrix([jac_rows[j][i] for j in range(self.m)], len(self.monos))
            for i in range(n)
        ]
        order = sorted(range(len(self.monos)), key=lambda k: sum(self.monos[k]))
        self.parents = []
        pos = {tuple(self.monos[k]): k for k in range(len(self.monos))}
        for k in order:
            e = self.monos[k]
            if sum(e) == 0:
                self.parents.append((k, -1, -1))
                continue
            i = next(j for j, p in enumerate(e) if p)
            e2 = list(e)
            e2[i] -= 1
            self.parents.append((k, pos[tuple(e2)], i))

    def monomial_values(self, U: np.ndarray) -> np.ndarray:
        S = U.shape[0]
        M = np.empty((S, len(self.monos)), dtype=complex)
        for k, parent, var in self.parents:
            if parent < 0:
                M[:, k] = 1.0
            else:
                M[:, k] = M[:, parent] * U[:, var]
        return M

    def residuals(self, U: np.ndarray) -> np.ndarray:
        M = self.monomial_values(np.atleast_2d(U))
        return M @ self.eq_mat.T

    def jacobian(self, U: np.ndarray) -> np.ndarray:
        U = np.atleast_2d(U)
        M = self.monomial_values(U)
        S = U.shape[0]
        J = np.empty((S, self.m, self.n), dtype=complex)
        for i, mat in enumerate(self.jac_mats):
            J[:, :, i] = M @ mat.T
        return J

    def residual_norm(self, u: np.ndarray) -> float:
        return float(np.max(np.abs(self.residuals(u[None, :])[0]))) if self.m else 0.0


def _sparse_matrix(rows, width):
    mat = np.zeros((len(rows), width), dtype=complex)
    for j, row in enumerate(rows):
        for k, c in row:
            mat[j, k] += c
    return mat


# -- building the sector system ------------------------------------------------


def unknown_layout(r: int, degrees: Dict) -> Tuple[List[str], Dict]:
    """Unknown names and the coefficient-slot table after gauge fixing."""
    M = {a: degrees[("psi", a)] for a in range(1, r + 1)}
    M0 = degrees[("psi0",)]
    names: List[str] = []
    slots: Dict = {}
    slots[0] = list(range(M0))
    names += [f"c0,{l}" for l in slots[0]]
    for a in range(1, r + 1):
        gauge = {M[b] for b in range(a + 1, r + 1)}
        sl = [l for l in range(M[a]) if l not in gauge]
        slots[a] = sl
        names += [f"c{a},{l}" for l in sl]
    return names, slots


def build_system(chain: ChainSpec, lam: liealg.Weight,
                 include_kinematic: Optional[bool] = None) -> Optional[UnknownSystem]:
    """Assemble the sector system; None when the sector is infeasible."""
    r = chain.r
    degrees = liealg.magnon_degrees(r, chain.drinfeld_degrees(), lam)
    needed = [("psi0",)] + [("psi", a) for a in range(1, r + 1)] + [
        ("psi2", a, b) for a in range(1, r + 1) for b in range(a + 1, r + 1)
    ]
    if any(degrees[c] < 0 for c in needed):
        return None
    if include_kinematic is None:
        include_kinematic = not basic_chain_detect(chain)

    names, slots = unknown_layout(r, degrees)
    n = len(names)
    pos = {name: i for i, name in enumerate(names)}
    one = MPoly.const(n, GR_ONE)

    def upoly(a: int) -> ShiftedPolynomial:
        deg = degrees[("psi0",)] if a == 0 else degrees[("psi", a)]
        coeffs = [MPoly(n) for _ in range(deg + 1)]
        coeffs[deg] = one
        for l in slots[a]:
            coeffs[l] = MPoly.var(n, pos[f"c{a},{l}"])
        return ShiftedPolynomial(coeffs)

    psi0 = upoly(0)
    psis = {a: upoly(a) for a in range(1, r + 1)}
    P = chain.drinfeld()

    def lift_poly(p: ShiftedPolynomial) -> ShiftedPolynomial:
        return ShiftedPolynomial([MPoly.const(n, c) for c in p.coeffs])

    P_sym = [lift_poly(p) for p in P]
    M0 = degrees[("psi0",)]
    equations: List[MPoly] = []
    notes: List[str] = []
    pair_constants: Dict[Tuple[int, int], GaussianRational] = {}

    # pair equations: triangular elimination of the two-form coefficients,
    # whatever the matching leaves over constrains the remaining unknowns
    for a in range(1, r + 1):
        for b in range(a + 1, r + 1):
            Mab = degrees[("psi2", a, b)]
            Ma, Mb = degrees[("psi", a)], degrees[("psi", b)]
            if Mab == M0:
                raise NotImplementedError(
                    "degenerate two-form normalization (matching degrees)")
            c_ab = GaussianRational(Fraction(Mab - M0, Ma - Mb))
            pair_constants[(a, b)] = c_ab
            if Mab < M0:
                notes.append(f"two-form ({a},{b}) degree below singlet degree; "
                             f"gauge slot skipped")
            _, _, leftover = solve_pair_equation(
                psi0, psis[a], psis[b], P_sym[r - 2], P_sym[r - 1], Mab, M0,
                one, c_ab=c_ab)
            for coeff in leftover.coeffs:
                if coeff:
                    equations.append(coeff)

    # rank-r Wronskian condition
    lhs = wronskian([psis[a] for a in range(1, r + 1)])
    rhs = fused_power(psi0, r - 2)
    for a in range(1, r):
        fp = fused_power(P_sym[a - 1], a)
        rhs = rhs * fp
    if lhs.degree != rhs.degree:
        raise ArithmeticError(
            f"rank condition degree mismatch: {lhs.degree} vs {rhs.degree}")
    lead = lhs.lead()
    if not lead.is_constant():
        raise ArithmeticError("rank condition has non-constant leading term")
    cW = lead.constant_value()
    for d in range(lhs.degree):
        eq = lhs.coeff(d) - rhs.coeff(d) * cW
        if eq:
            equations.append(eq)

    filters: List[MPoly] = []
    if include_kinematic:
        for k in range(2, r):
            div = fused_power(psi0, k - 2) if k >= 2 else None
            for b in range(r - k + 1, r):
                fp = fused_power(P_sym[b - 1], b + k - r)
                div = fp if div is None else div * fp
            if div.degree <= 0:
                continue
            for subset in itertools.combinations(range(1, r + 1), k):
                w = wronskian([psis[s] for s in subset])
                _, rem = w.divrem(div)
                for coeff in rem.coeffs:
                    if coeff:
                        filters.append(coeff)

    return UnknownSystem(r, lam, names, equations, filters, degrees,
                         pair_constants, notes)


# -- nested Bethe equation residuals -------------------------------------------


def nested_bae_residual(q_polys: Dict[int, ShiftedPolynomial], chain: ChainSpec,
                        tol: float = 1e-6) -> dict:
    """Evaluate the nested-equation ratio at the roots of each node polynomial.

    Regular roots must satisfy the two-term balance; roots involved in
    collisions, half-shift pairs, or Drinfeld-root hits are reported as
    exceptional rather than failed.
    """
    r = chain.r
    P = [p.to_complex() for p in chain.drinfeld()]
    adj = _dynkin_adjacency(r)
    report = {"regular": [], "exceptional": [], "failed": []}
    allroots = {a: _poly_roots(q_polys[a]) for a in q_polys}
    for a, q in q_polys.items():
        qc = q.to_complex()
        for u in allroots[a]:
            # exceptional: double roots, i-separated roots, Drinfeld hits
            others = [v for v in allroots[a] if abs(v - u) > 1e-12] if len(allroots[a]) > 1 else []
            exceptional = any(abs(v - u) < 1e-6 for v in others)
            exceptional |= any(abs(abs((v - u).imag) - 1.0) < 1e-6 and abs((v - u).real) < 1e-6
                               for v in allroots[a])
            exceptional |= abs(P[a - 1].eval(u + 0.5j)) < 1e-9 or abs(P[a - 1].eval(u - 0.5j)) < 1e-9
            t1 = qc.eval(u + 1j) * P[a - 1].eval(u - 0.5j)
            t2 = qc.eval(u - 1j) * P[a - 1].eval(u + 0.5j)
            for b in adj[a]:
                t1 *= q_polys[b].to_complex().eval(u - 0.5j)
                t2 *= q_polys[b].to_complex().eval(u + 0.5j)
            scale = max(abs(t1), abs(t2), 1e-30)
            resid = abs(t1 + t2) / scale
            if exceptional or scale < 1e-10:
                report["exceptional"].append({"node": a, "root": _c2l(u), "residual": resid})
            elif resid <= tol:
                report["regular"].append({"node": a, "root": _c2l(u), "residual": resid})
            else:
                report["failed"].append({"node": a, "root": _c2l(u), "residual": resid})
    return report


def _dynkin_adjacency(r: int):
    from .qsystem import dynkin_adjacency

    return dynkin_adjacency(r)


def _poly_roots(p: ShiftedPolynomial) -> List[complex]:
    pc = p.to_complex()
    if pc.degree <= 0:
        return []
    coeffs = [complex(c) for c in reversed(pc.coeffs)]
    return [complex(z) for z in np.roots(coeffs)]


def _c2l(z: complex):
    return [z.real, z.imag]
