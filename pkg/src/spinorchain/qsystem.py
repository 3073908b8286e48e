"""Extended Q-system reconstruction and the runtime identity catalogue.

A state is a triple (psi0, psi_a, psi_ab) living in one of three backends:

* exact rational functions over Q(i)  — solved chain states, exact path;
* rational functions with complex coefficients — solved chain states,
  numeric path;
* sampled values on a half-step lattice u0 + (i/2)Z — abstract states used
  to exercise the identity suite without any polynomial structure.

All higher Q-functions are derived from the triple: spinor components by
the quadratic-form exponential, tensor components by contraction with the
two-form table, remaining ones by Wronskians.  Identities are then checked
verbatim (lattice backend) or in polynomial form with the Drinfeld-factor
corrections produced by the dressing-exponent calculus (chain backends).
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .clifford import (
    ExteriorElement,
    bilinear,
    canonical_signed,
    charge_conjugate,
    chirality,
    dot,
    eps_complement,
    gamma_multi,
    gscale,
    perm_sign,
    weyl_representative,
)
from .qpoly import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    GaussianRational,
    RationalFunction,
    ShiftedPolynomial,
    fused_power,
    fused_sum,
    wronskian,
)

__all__ = [
    "LatticeFunction",
    "Tagged",
    "SigmaCalculus",
    "QSystemState",
    "IdentityResult",
    "random_lattice_state",
    "exact_lattice_state",
    "verify_identities",
    "weyl_covariance_check",
    "solve_pair_equation",
    "derive_psi_ab",
    "check_kinematic",
    "pair_consistent_psis",
]


# =============================================================================
# lattice backend
# =============================================================================


class LatticeFunction:
    """Function known on u0 + (i/2) n for n in a contiguous index window.

    Values may be complex (numeric suites) or GaussianRational (exact
    covariance checks).  Binary operations intersect windows.
    """

    __slots__ = ("start", "values")

    def __init__(self, start: int, values: Sequence):
        self.start = start
        self.values = list(values)

    @property
    def end(self) -> int:
        return self.start + len(self.values)

    def shift(self, k: int) -> "LatticeFunction":
        return LatticeFunction(self.start - k, self.values)

    def _zip(self, other: "LatticeFunction"):
        lo = max(self.start, other.start)
        hi = min(self.end, other.end)
        if hi <= lo:
            raise ValueError("empty lattice window overlap")
        a = self.values[lo - self.start : hi - self.start]
        b = other.values[lo - other.start : hi - other.start]
        return lo, a, b

    def __add__(self, other):
        lo, a, b = self._zip(self._coerce(other))
        return LatticeFunction(lo, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __sub__(self, other):
        lo, a, b = self._zip(self._coerce(other))
        return LatticeFunction(lo, [x - y for x, y in zip(a, b)])

    def __neg__(self):
        return LatticeFunction(self.start, [-x for x in self.values])

    def __mul__(self, other):
        lo, a, b = self._zip(self._coerce(other))
        return LatticeFunction(lo, [x * y for x, y in zip(a, b)])

    __rmul__ = __mul__

    def __truediv__(self, other):
        lo, a, b = self._zip(self._coerce(other))
        return LatticeFunction(lo, [x / y for x, y in zip(a, b)])

    def _coerce(self, other):
        if isinstance(other, LatticeFunction):
            return other
        return LatticeFunction(self.start, [other] * len(self.values))

    def ring_one(self) -> "LatticeFunction":
        # generous fixed window; every shift used downstream stays inside
        one = GR_ONE if self.values and isinstance(self.values[0], GaussianRational) else 1.0 + 0j
        return LatticeFunction(-400, [one] * 801)

    def scale_gaussian(self, g: GaussianRational) -> "LatticeFunction":
        if self.values and isinstance(self.values[0], GaussianRational):
            return LatticeFunction(self.start, [v * g for v in self.values])
        z = g.to_complex()
        if self.values and not isinstance(self.values[0], complex):
            try:
                import mpmath

                z = (mpmath.mpf(g.re.numerator) / g.re.denominator
                     + mpmath.mpc(0, 1) * mpmath.mpf(g.im.numerator) / g.im.denominator)
            except ImportError:
                pass
        return LatticeFunction(self.start, [v * z for v in self.values])

    def magnitude(self, lo: int = None, hi: int = None) -> float:
        vals = self.values if lo is None else self.window_values(lo, hi)
        if not vals:
            return 0.0
        return max(abs(_as_complex(v)) for v in vals)

    def window_values(self, lo: int, hi: int):
        a = max(lo, self.start)
        b = min(hi, self.end)
        if b <= a:
            return self.values
        return self.values[a - self.start : b - self.start]

    def is_exact_zero(self) -> bool:
        return all(not v if isinstance(v, GaussianRational) else v == 0 for v in self.values)

    def __repr__(self):
        return f"LatticeFn[{self.start}..{self.end})"


def _as_complex(v) -> complex:
    if isinstance(v, GaussianRational):
        return v.to_complex()
    return complex(v)


def poly_on_lattice(p: ShiftedPolynomial, u0, start: int, length: int, exact: bool) -> LatticeFunction:
    vals = []
    for n in range(start, start + length):
        if exact:
            z = u0 + GaussianRational(0, Fraction(n, 2))
            vals.append(p.eval(z))
        else:
            vals.append(p.eval(u0 + 0.5j * n))  # u0 may be complex or mpc
    return LatticeFunction(start, vals)


# =============================================================================
# dressing-exponent calculus
# =============================================================================


class _LPoly:
    """Laurent polynomial in the shift symbol with Fraction coefficients."""

    __slots__ = ("c",)

    def __init__(self, c: Dict[int, Fraction] | None = None):
        self.c = {k: Fraction(v) for k, v in (c or {}).items() if v}

    @classmethod
    def const(cls, v):
        return cls({0: Fraction(v)})

    def __add__(self, o):
        out = dict(self.c)
        for k, v in o.c.items():
            out[k] = out.get(k, Fraction(0)) + v
        return _LPoly(out)

    def __sub__(self, o):
        out = dict(self.c)
        for k, v in o.c.items():
            out[k] = out.get(k, Fraction(0)) - v
        return _LPoly(out)

    def __neg__(self):
        return _LPoly({k: -v for k, v in self.c.items()})

    def __mul__(self, o):
        out: Dict[int, Fraction] = {}
        for k1, v1 in self.c.items():
            for k2, v2 in o.c.items():
                out[k1 + k2] = out.get(k1 + k2, Fraction(0)) + v1 * v2
        return _LPoly(out)

    def is_zero(self):
        return not self.c

    def divrem(self, den: "_LPoly"):
        """Laurent division: strip the minimal powers, divide the ordinary
        polynomial parts, reattach the monomial shift to the quotient."""
        if den.is_zero():
            raise ZeroDivisionError
        if self.is_zero():
            return _LPoly(), _LPoly()
        alpha = min(self.c)
        beta = min(den.c)
        a = {k - alpha: v for k, v in self.c.items()}
        b = {k - beta: v for k, v in den.c.items()}
        db = max(b)
        lead = b[db]
        q: Dict[int, Fraction] = {}
        while a and max(a) >= db:
            top = max(a)
            f = a[top] / lead
            q[top - db] = f
            for k, v in b.items():
                a[k + top - db] = a.get(k + top - db, Fraction(0)) - f * v
                if not a[k + top - db]:
                    del a[k + top - db]
        shift = alpha - beta
        return (_LPoly({k + shift: v for k, v in q.items()}),
                _LPoly({k + alpha: v for k, v in a.items()}))


class _LFrac:
    __slots__ = ("num", "den")

    def __init__(self, num: _LPoly, den: _LPoly | None = None):
        self.num = num
        self.den = den if den is not None else _LPoly.const(1)

    def __add__(self, o):
        return _LFrac(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, o):
        return _LFrac(self.num * o.den - o.num * self.den, self.den * o.den)

    def __mul__(self, o):
        return _LFrac(self.num * o.num, self.den * o.den)

    def __truediv__(self, o):
        if o.num.is_zero():
            raise ZeroDivisionError
        return _LFrac(self.num * o.den, self.den * o.num)

    def is_zero(self):
        return self.num.is_zero()

    def as_laurent(self) -> _LPoly:
        q, r = self.num.divrem(self.den)
        if not r.is_zero():
            raise ArithmeticError("dressing exponent is not a Laurent polynomial")
        return q


def dynkin_adjacency(r: int) -> Dict[int, Tuple[int, ...]]:
    adj: Dict[int, Tuple[int, ...]] = {}
    for a in range(1, r + 1):
        ns: List[int] = []
        if a <= r - 2:
            if a > 1:
                ns.append(a - 1)
            if a < r - 2:
                ns.append(a + 1)
            if a == r - 2:
                ns.extend([r - 1, r])
        else:
            if r > 2:
                ns.append(r - 2)
        adj[a] = tuple(ns)
    return adj


class SigmaCalculus:
    """Reduces dressing-exponent differences to Drinfeld-polynomial factors.

    Tags are additive exponent vectors over the nodes, with Laurent
    coefficients in the shift symbol.  The defining relations of the
    dressing factors let any consistent tag difference be rewritten as a
    product of shifted Drinfeld polynomials; the rewriting coefficients are
    obtained by solving a linear system over the Laurent fraction field.
    """

    def __init__(self, r: int):
        self.r = r
        self.adj = dynkin_adjacency(r)
        self._cache: Dict[tuple, list] = {}

    def reduce(self, tagdiff: Dict[Tuple[int, int], int]) -> List[Tuple[int, int, int]]:
        """tagdiff maps (node, shift) -> exponent.  Returns factor triples
        (node, shift, exponent) such that sigma^tagdiff = prod P_a^[k]^e."""
        key = tuple(sorted(tagdiff.items()))
        if key in self._cache:
            return self._cache[key]
        r = self.r
        T = [_LPoly({k: Fraction(v) for (b, k), v in tagdiff.items() if b == a}) for a in range(1, r + 1)]
        # solve C(D) f = -T with C = (D + D^{-1}) I - adjacency; the factors
        # are then P_a^{f_a}
        D = _LPoly({1: Fraction(1)})
        Dm = _LPoly({-1: Fraction(1)})
        C = [[_LFrac(_LPoly()) for _ in range(r)] for _ in range(r)]
        for a in range(1, r + 1):
            C[a - 1][a - 1] = _LFrac(D + Dm)
            for b in self.adj[a]:
                C[a - 1][b - 1] = _LFrac(_LPoly.const(-1))
        rhs = [_LFrac(-t) for t in T]
        f = _solve_lfrac(C, rhs)
        out: List[Tuple[int, int, int]] = []
        for a in range(1, r + 1):
            lp = f[a - 1].as_laurent()
            for k, v in lp.c.items():
                if v.denominator != 1:
                    raise ArithmeticError("fractional dressing exponent")
                if v:
                    out.append((a, k, int(v)))
        self._cache[key] = out
        return out


def _solve_lfrac(M: List[List[_LFrac]], rhs: List[_LFrac]) -> List[_LFrac]:
    n = len(M)
    A = [row[:] + [rhs[i]] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((k for k in range(col, n) if not A[k][col].is_zero()), None)
        if piv is None:
            raise ArithmeticError("singular dressing system")
        A[col], A[piv] = A[piv], A[col]
        pivval = A[col][col]
        A[col] = [x / pivval for x in A[col]]
        for k in range(n):
            if k != col and not A[k][col].is_zero():
                fac = A[k][col]
                A[k] = [x - fac * y for x, y in zip(A[k], A[col])]
    return [A[i][n] for i in range(n)]


# =============================================================================
# tagged values
# =============================================================================

Tag = Tuple[Tuple[Tuple[int, int], int], ...]  # sorted ((node, shift), exp)

# active state used to reconcile mixed-parity tag sums through the dressing
# relations; verification entry points install it
_TAG_CONTEXT: List = []


def _tag_mul(t1: Tag, t2: Tag, s: int = 1) -> Tag:
    d = dict(t1)
    for k, v in t2:
        d[k] = d.get(k, 0) + s * v
    return tuple(sorted((k, v) for k, v in d.items() if v))


def _tag_shift(t: Tag, k: int) -> Tag:
    return tuple(sorted((((a, s + k)), v) for (a, s), v in t))


def sigma_tag(node: int, shift: int = 0) -> Tag:
    return (((node, shift), 1),)


class Tagged:
    """Ring element together with its dressing-exponent tag."""

    __slots__ = ("value", "tag")

    def __init__(self, value, tag: Tag = ()):
        self.value = value
        self.tag = tag

    def __add__(self, other):
        other = self._coerce(other)
        if self.tag != other.tag:
            # a structural zero is tag-neutral
            if self.is_exact_zero():
                return other
            if other.is_exact_zero():
                return self
            other = _retag(other, self.tag)
        return Tagged(self.value + other.value, self.tag)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if self.tag != other.tag:
            if self.is_exact_zero():
                return -other
            if other.is_exact_zero():
                return self
            other = _retag(other, self.tag)
        return Tagged(self.value - other.value, self.tag)

    def __neg__(self):
        return Tagged(-self.value, self.tag)

    def __mul__(self, other):
        other = self._coerce(other)
        return Tagged(self.value * other.value, _tag_mul(self.tag, other.tag))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        return Tagged(self.value / other.value, _tag_mul(self.tag, other.tag, -1))

    def _coerce(self, other) -> "Tagged":
        if isinstance(other, Tagged):
            return other
        return Tagged(other, ())

    def shift(self, k: int) -> "Tagged":
        return Tagged(self.value.shift(k), _tag_shift(self.tag, k))

    def ring_one(self) -> "Tagged":
        return Tagged(self.value.ring_one(), ())

    def scale_gaussian(self, g: GaussianRational) -> "Tagged":
        return Tagged(gscale(self.value, g), self.tag)

    def is_exact_zero(self) -> bool:
        v = self.value
        return v.num.is_zero() if isinstance(v, RationalFunction) else False

    def __repr__(self):
        return f"Tagged({self.value!r}, tag={self.tag})"


def _retag(x: "Tagged", target: Tag) -> "Tagged":
    """Rewrite x in the target tag through the Drinfeld-factor relations."""
    if not _TAG_CONTEXT:
        raise ArithmeticError(f"combining incompatible tags {x.tag} vs {target} "
                              f"outside a dressing context")
    state = _TAG_CONTEXT[-1]
    diff = _tag_mul(x.tag, target, -1)
    corr = state.drinfeld_factor(state.sigma.reduce(dict(diff)))
    corr = corr.value if isinstance(corr, Tagged) else corr
    return Tagged(x.value * corr, target)


# =============================================================================
# states
# =============================================================================


@dataclass
class IdentityResult:
    name: str
    status: str
    max_residual: float
    constant: Optional[str] = None
    witness: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "max_residual": self.max_residual,
            "constant": self.constant,
            "witness": self.witness,
        }


class QSystemState:
    """Reconstructed Q-system data over one of the coefficient backends."""

    def __init__(self, r: int, psi0, psi, psi2, backend: str,
                 drinfeld: Optional[List[ShiftedPolynomial]] = None,
                 sample_points: Optional[List[complex]] = None,
                 exact: bool = False):
        self.r = r
        self.psi0 = psi0
        self.psi = dict(psi)  # a -> ring elem
        self.psi2 = dict(psi2)  # (a, b), a < b -> ring elem
        self.backend = backend  # "lattice" | "chain"
        self.drinfeld = drinfeld
        self.exact = exact
        self.sample_points = sample_points or _default_samples()
        self.sigma = SigmaCalculus(r) if backend == "chain" else None
        # lattice comparisons are confined to a core window around the base
        # point where the evaluation is well conditioned
        self.core = 6
        self._cache: Dict = {}

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_chain(cls, r: int, psi0_poly: ShiftedPolynomial,
                   psi_polys: Dict[int, ShiftedPolynomial],
                   psi2_polys: Dict[Tuple[int, int], ShiftedPolynomial],
                   drinfeld: List[ShiftedPolynomial], exact: bool) -> "QSystemState":
        def lift(p: ShiftedPolynomial, tag: Tag) -> Tagged:
            return Tagged(RationalFunction(p if exact else p.to_complex()), tag)

        r_ = r
        psi0 = lift(psi0_poly, sigma_tag(r_))
        psi = {a: lift(psi_polys[a], sigma_tag(r_ - 1)) for a in psi_polys}
        psi2 = {ab: lift(psi2_polys[ab], sigma_tag(r_)) for ab in psi2_polys}
        dr = [p if exact else p.to_complex() for p in drinfeld]
        return cls(r, psi0, psi, psi2, "chain", drinfeld=dr, exact=exact)

    # -- ring helpers ----------------------------------------------------------

    def tag_context(self):
        """Install this state as the dressing context for tag reconciliation."""
        import contextlib

        @contextlib.contextmanager
        def _ctx():
            if self.backend == "chain":
                _TAG_CONTEXT.append(self)
                try:
                    yield
                finally:
                    _TAG_CONTEXT.pop()
            else:
                yield

        return _ctx()

    def one(self):
        return self.psi0.ring_one()

    def from_poly(self, p: ShiftedPolynomial):
        if self.backend != "chain":
            raise TypeError("from_poly is only defined on chain states")
        return Tagged(RationalFunction(p if self.exact else p.to_complex()), ())

    def drinfeld_factor(self, factors: List[Tuple[int, int, int]]):
        """prod P_a^[k]^e as an untagged ring element."""
        out = self.one()
        for a, k, e in factors:
            base = self.from_poly(self.drinfeld[a - 1]).shift(k)
            for _ in range(abs(e)):
                out = out * base if e > 0 else out / base
        return out

    # -- magnitudes and comparisons -------------------------------------------

    def magnitude(self, x) -> float:
        if isinstance(x, Tagged):
            x = x.value
        if isinstance(x, LatticeFunction):
            return x.magnitude(-self.core, self.core + 1)
        if isinstance(x, RationalFunction):
            vals = []
            for z in self.sample_points:
                try:
                    vals.append(abs(_eval_any(x, z)))
                except ZeroDivisionError:
                    continue
            return max(vals) if vals else 0.0
        return abs(_as_complex_value(x))

    def residual_zero(self, x, scale: float) -> float:
        if isinstance(x, Tagged):
            x = x.value
        if isinstance(x, LatticeFunction):
            if x.is_exact_zero():
                return 0.0
            return x.magnitude(-self.core, self.core + 1) / max(scale, 1e-300)
        if isinstance(x, RationalFunction):
            if x.exact:
                return 0.0 if x.num.is_zero() else 1.0
            return self.magnitude(x) / max(scale, 1e-300)
        v = abs(_as_complex_value(x))
        return v / max(scale, 1e-300)

    def compare(self, name: str, lhs, rhs, tol: float, proportional: bool = False,
                witness: str = None, scale_hint: float = None) -> IdentityResult:
        """Check lhs == rhs (or lhs = const * rhs), with tag corrections."""
        if isinstance(lhs, Tagged) or isinstance(rhs, Tagged):
            lt = lhs.tag if isinstance(lhs, Tagged) else ()
            rt = rhs.tag if isinstance(rhs, Tagged) else ()
            lv = lhs.value if isinstance(lhs, Tagged) else lhs
            rv = rhs.value if isinstance(rhs, Tagged) else rhs
            diff = _tag_mul(lt, rt, -1)
            if diff:
                # sigma^{tagL - tagR} multiplies the left side once the
                # dressing is stripped: lhs * P-factors == const * rhs
                factors = self.sigma.reduce(dict(diff))
                corr = self.drinfeld_factor(factors)
                corr = corr.value if isinstance(corr, Tagged) else corr
                lv = lv * corr
            lhs, rhs = lv, rv
        scale = max(self.magnitude(lhs), self.magnitude(rhs))
        if scale_hint is not None:
            scale = max(scale, scale_hint)
        if scale == 0.0:
            return IdentityResult(name, "pass", 0.0, witness=witness)
        if proportional:
            const, resid = self._proportional(lhs, rhs, scale)
            status = "pass" if resid <= tol else "fail"
            return IdentityResult(name, status, resid, constant=const, witness=witness)
        resid = self.residual_zero(lhs - rhs, scale)
        return IdentityResult(name, "pass" if resid <= tol else "fail", resid, witness=witness)

    def _proportional(self, lhs, rhs, scale):
        if isinstance(lhs, LatticeFunction):
            lo, a, b = lhs._zip(lhs._coerce(rhs))
            # confine to the well-conditioned core
            lo2 = max(lo, -self.core)
            hi2 = min(lo + len(a), self.core + 1)
            if hi2 > lo2:
                a = a[lo2 - lo : hi2 - lo]
                b = b[lo2 - lo : hi2 - lo]
            exact = bool(a) and isinstance(a[0], GaussianRational)
            best = max(range(len(b)), key=lambda k: abs(_as_complex(b[k])))
            if _as_complex(b[best]) == 0:
                resid = max(abs(_as_complex(x)) for x in a) / max(scale, 1e-300)
                return "0", resid
            c = a[best] / b[best]
            diff = [x - c * y for x, y in zip(a, b)]
            if exact:
                resid = 0.0 if all(not d for d in diff) else 1.0
                return repr(c), resid
            resid = max(abs(_as_complex(d)) for d in diff) / max(scale, 1e-300)
            return repr(_as_complex(c)), resid
        if isinstance(lhs, RationalFunction) and lhs.exact and rhs.exact:
            if rhs.is_zero() and lhs.is_zero():
                return "0", 0.0
            if rhs.is_zero() or lhs.is_zero():
                return None, 1.0
            X = lhs / rhs
            if X.num.degree == 0 and X.den.degree == 0:
                c = X.num.coeffs[0] / X.den.coeffs[0]
                return repr(c), 0.0
            return None, 1.0
        # numeric: fit the constant at the best sample, check the rest
        pairs = []
        for z in self._eval_points(lhs):
            try:
                lv = _eval_any(lhs, z)
                rv = _eval_any(rhs, z)
            except ZeroDivisionError:
                continue
            pairs.append((lv, rv))
        if not pairs:
            return None, 1.0
        best = max(pairs, key=lambda t: abs(t[1]))
        if abs(best[1]) == 0.0:
            resid = max(abs(l) for l, _ in pairs) / max(scale, 1e-300)
            return "0", resid
        c = best[0] / best[1]
        resid = max(abs(l - c * rv) for l, rv in pairs) / max(scale, 1e-300)
        return repr(c), resid

    def _eval_points(self, x):
        if isinstance(x, LatticeFunction):
            return []
        return self.sample_points

    # -- reconstruction --------------------------------------------------------

    def full_spinor(self) -> ExteriorElement:
        """All spinor components from the rank-0,1,2 data."""
        if "spinor" in self._cache:
            return self._cache["spinor"]
        r = self.r
        comps = {(): self.psi0}
        for a in range(1, r + 1):
            comps[(a,)] = self.psi[a]
        for (a, b), v in self.psi2.items():
            comps[(a, b)] = v
        one_form = ExteriorElement(r, {(a,): self.psi[a] for a in range(1, r + 1)})
        two_form = ExteriorElement(r, dict(self.psi2.items()))
        # even ranks: (1/n!) two_form^n / psi0^{n-1}
        wedge_pow = two_form
        fact = 1
        for n in range(2, r // 2 + 1):
            wedge_pow = wedge_pow.wedge(two_form)
            fact *= n
            div = _pow(self.psi0, n - 1)
            piece = wedge_pow.scaled(GaussianRational(Fraction(1, fact)))
            piece = piece.map_coeffs(lambda c, d=div: c / d)
            comps.update(piece.comps)
        # odd ranks: (1/n!) one_form ^ two_form^n / psi0^n
        wedge_pow = two_form
        fact = 1
        n = 1
        while 2 * n + 1 <= r:
            div = _pow(self.psi0, n)
            piece = one_form.wedge(wedge_pow).scaled(GaussianRational(Fraction(1, fact)))
            piece = piece.map_coeffs(lambda c, d=div: c / d)
            comps.update(piece.comps)
            n += 1
            fact *= n
            if 2 * n + 1 <= r:
                wedge_pow = wedge_pow.wedge(two_form)
        out = ExteriorElement(r, comps)
        self._cache["spinor"] = out
        return out

    def psi_component(self, A: Sequence[int]):
        c = self.full_spinor().component(A)
        if c is None:
            zero = self.psi0 - self.psi0
            return zero
        return c

    def mu(self, a: int, b: int):
        if a == b:
            return self.psi0 - self.psi0  # structural zero with trivial value
        if a < b:
            return self.psi2[(a, b)] / self.psi0
        return -(self.psi2[(b, a)] / self.psi0)

    def mu_upper(self, a: int, b: int):
        """-Psi^{ab}/Psi_topform with indices raised by the Levi-Civita."""
        if a == b:
            return self.psi0 - self.psi0
        r = self.r
        top = self.psi_component(tuple(range(1, r + 1)))
        rest = tuple(x for x in range(1, r + 1) if x not in (a, b))
        sgn = perm_sign([a, b] + list(rest))
        comp = self.psi_component(rest)
        out = comp / top
        out = gscale(out, GaussianRational(-sgn))
        return out

    def p_single(self, a: int):
        return self.psi[a] / self.psi0

    def p_wronskian(self, A: Sequence[int]):
        key = ("pw", tuple(A))
        if key in self._cache:
            return self._cache[key]
        A = tuple(A)
        if not A:
            out = self.one()
        else:
            out = wronskian([self.p_single(a) for a in A])
        self._cache[key] = out
        return out

    def p_upper(self, seq: Sequence[int]):
        """P^{seq} for an ordered positive multi-index, Hodge-raised."""
        seq = tuple(seq)
        if len(set(seq)) < len(seq):
            return None
        sorted_seq = tuple(sorted(seq))
        sgn = perm_sign(list(seq))
        comp, eps = eps_complement(sorted_seq, self.r)
        val = self.p_wronskian(comp)
        s = sgn * eps
        return gscale(val, GaussianRational(s)) if s < 0 else val

    def p_top(self):
        return self.p_wronskian(tuple(range(1, self.r + 1)))

    def phi_pair(self, s: int):
        """Psi0^{[r-1-s]} * Psi0^{[-r+1+s]} (the inverse of the Phi factors)."""
        r = self.r
        return self.psi0.shift(r - 1 - s) * self.psi0.shift(-r + 1 + s)

    def v_upper(self, A: Sequence[int]):
        """V^A for a positive ascending subset, from the Hodge-dual Wronskian."""
        A = tuple(A)
        pu = self.p_upper(A)
        return pu * self.phi_pair(len(A))

    def v_mixed(self, A: Sequence[int], B: Sequence[int], m: Optional[int] = None):
        """V_A{}^B by contraction with the two-form table at window shift m."""
        A = tuple(A)
        B = tuple(B)
        r = self.r
        s = len(A) + len(B)
        if s > r - 1:
            raise ValueError("contraction formula needs |A|+|B| <= r-1")
        if m is None:
            m = r - 1 - s
        # admissible shifts step by two around the anchor r-1-s, matching the
        # explicit listing for the one-index contraction
        if not (-r + 1 + s <= m <= r - 1 - s) or (m - (r - 1 - s)) % 2 != 0:
            raise ValueError(f"shift {m} outside admissible window")
        if not A:
            return self.v_upper(B)
        acc = None
        for Ap in itertools.combinations(range(1, r + 1), len(A)):
            if set(Ap) & set(B):
                continue
            pu = self.p_upper(Ap + B)
            if pu is None:
                continue
            det = self._mu_det(A, Ap, m)
            term = det * pu
            acc = term if acc is None else acc + term
        if acc is None:
            raise ArithmeticError("empty contraction")
        return acc * self.phi_pair(s)

    def _mu_det(self, A: Tuple[int, ...], Ap: Tuple[int, ...], m: int):
        k = len(A)
        rows = [[self.mu(a, ap).shift(m) for ap in Ap] for a in A]
        from .qpoly import det_ring

        return det_ring(rows) if k > 1 else rows[0][0]

    def v_signed(self, I: Sequence[int], m: Optional[int] = None):
        """V^I for any signed multi-index with |I| <= r-1."""
        I = tuple(I)
        canon, sgn = canonical_signed(I, self.r)
        if sgn == 0:
            return None
        key = ("vs", canon, m)
        if key not in self._cache:
            B = tuple(i for i in canon if i > 0)
            negs = [i for i in canon if i < 0]
            A_desc = tuple(-i for i in negs)  # descending absolute values
            A = tuple(sorted(A_desc))
            # reorder the native sequence (A ascending, then B) into canonical
            # (B, then negatives by descending abs): track the permutation sign
            native = [-a for a in A] + list(B)
            reorder = _signed_seq_sign(native, canon, self.r)
            val = self.v_mixed(A, B, m)
            self._cache[key] = gscale(val, GaussianRational(reorder)) if reorder < 0 else val
        val = self._cache[key]
        return gscale(val, GaussianRational(sgn)) if sgn < 0 else val

    def v_lower(self, I: Sequence[int], m: Optional[int] = None):
        return self.v_signed([-i for i in I], m)

    def v_wronskian(self, I: Sequence[int]):
        """V^I from Wronskians of single-index components (any |I|)."""
        comps = [self.v_signed((i,)) for i in I]
        return wronskian(comps)

    # -- chain-specific polynomial extraction ----------------------------------

    def baxter_q(self, a: int) -> ShiftedPolynomial:
        """Monic highest-weight Baxter polynomial of node a (chain states)."""
        if self.backend != "chain":
            raise TypeError("Baxter polynomials only exist for chain states")
        r = self.r
        if a == r:
            val = self.psi0
        elif a == r - 1:
            val = self.psi[r]
        else:
            val = self.v_polynomial(tuple(range(1, a + 1)))
        rf = val.value if isinstance(val, Tagged) else val
        return _rational_to_monic_poly(rf, self.exact)

    def v_polynomial(self, A: Sequence[int]):
        """v^A: the Drinfeld-stripped polynomial form of V^A (chain states)."""
        A = tuple(A)
        k = self.r - len(A)
        comp, eps = eps_complement(A, self.r)
        w = wronskian([self.psi[c] for c in comp]) if comp else self.one()
        denom = fused_power(self.psi0, k - 2) if k >= 2 else None
        for b in range(self.r - k + 1, self.r):
            fp = fused_power(self.from_poly(self.drinfeld[b - 1]), b + k - self.r)
            denom = fp if denom is None else denom * fp
        out = w if denom is None else w / denom
        return gscale(out, GaussianRational(eps)) if eps < 0 else out


def _signed_seq_sign(seq_a: Sequence[int], seq_b: Sequence[int], r: int) -> int:
    ca, sa = canonical_signed(seq_a, r)
    cb, sb = canonical_signed(seq_b, r)
    if ca != cb:
        raise ValueError("sequences are not permutations of each other")
    return sa * sb


def _pow(x, n: int):
    out = None
    for _ in range(n):
        out = x if out is None else out * x
    if out is None:
        return x.ring_one()
    return out


def _as_complex_value(v) -> complex:
    if isinstance(v, GaussianRational):
        return v.to_complex()
    return complex(v)


def _eval_any(x, z) -> complex:
    if isinstance(x, RationalFunction):
        num = x.num.to_complex().eval(z) if _exact_poly(x.num) else x.num.eval(z)
        den = x.den.to_complex().eval(z) if _exact_poly(x.den) else x.den.eval(z)
        if den == 0:
            raise ZeroDivisionError
        return num / den
    return _as_complex_value(x)


def _exact_poly(p: ShiftedPolynomial) -> bool:
    return bool(p.coeffs) and isinstance(p.coeffs[0], GaussianRational)


def _rational_to_monic_poly(rf: RationalFunction, exact: bool) -> ShiftedPolynomial:
    if exact:
        p = rf.as_polynomial()
        return p.monic()
    num, den = rf.num, rf.den
    q, rem = num.divrem(den)
    scalepts = max(q.max_abs(), 1.0)
    if rem.max_abs() > 1e-6 * max(num.max_abs(), 1.0):
        raise ArithmeticError("numeric rational function is not polynomial")
    q = q.trim(1e-8 * max(scalepts, 1.0))
    return q.monic()


def _upoly_like(p):
    return p


def _default_samples() -> List[complex]:
    rng = random.Random(20240817)
    return [complex(rng.uniform(0.3, 1.7) * (-1) ** k, rng.uniform(0.2, 1.3)) for k in range(7)]


# =============================================================================
# lattice state construction
# =============================================================================


def random_lattice_state(r: int, rng: random.Random, max_deg: int = 4,
                         half_window: int = 36, dps: Optional[int] = None) -> QSystemState:
    """Random polynomials psi_a; psi0 and psi_ab solved on the lattice so the
    two Wronskian conditions hold exactly at every computable point.

    dps switches the lattice values to mpmath at that many digits; the input
    polynomial coefficients stay double precision so escalated runs verify
    the identities for the same instance with smaller evaluation noise.
    """
    max_deg = max(max_deg, r - 1)  # r polynomials must be independent
    degs = [rng.randint(max_deg - 1, max_deg) for _ in range(r)]
    psis = []
    for d in degs:
        coeffs = [complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)) for _ in range(d)]
        coeffs.append(complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)))
        psis.append(ShiftedPolynomial(coeffs))
    u0 = complex(rng.uniform(0.05, 0.4), rng.uniform(0.02, 0.23))
    if dps is not None:
        import mpmath

        with mpmath.workdps(dps):
            u0 = mpmath.mpc(u0)
            return _lattice_state_from_psis(r, psis, u0, half_window, exact=False, rng=rng)
    return _lattice_state_from_psis(r, psis, u0, half_window, exact=False, rng=rng)


def exact_lattice_state(r: int, rng: random.Random, max_deg: int = 3,
                        half_window: int = 24) -> QSystemState:
    """Same construction in exact Gaussian-rational arithmetic."""
    max_deg = max(max_deg, r - 1)
    for _attempt in range(25):
        psis = []
        for _ in range(r):
            d = rng.randint(max(1, max_deg - 1), max_deg)
            coeffs = [GaussianRational(Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
                                       Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
                      for _ in range(d)]
            coeffs.append(GaussianRational(1, Fraction(rng.randint(-2, 2), 2)))
            psis.append(ShiftedPolynomial(coeffs))
        u0 = GaussianRational(Fraction(rng.randint(1, 7), 5), Fraction(rng.randint(1, 5), 7))
        try:
            return _lattice_state_from_psis(r, psis, u0, half_window, exact=True, rng=rng)
        except ZeroDivisionError:
            continue  # a construction zero landed on the lattice; resample
    raise ArithmeticError("could not build a nondegenerate exact lattice state")


def _float_poly_to_exact(p: ShiftedPolynomial) -> ShiftedPolynomial:
    """Floats are dyadic rationals; the conversion is exact."""
    out = []
    for c in p.coeffs:
        z = complex(c)
        out.append(GaussianRational(Fraction(z.real), Fraction(z.imag)))
    return ShiftedPolynomial(out)


def _exact_poly_lattice(p: ShiftedPolynomial, u0, start: int, length: int) -> LatticeFunction:
    """Evaluate an exact polynomial at numeric lattice points, converting
    coefficients at working precision (keeps construction error at eps)."""
    try:
        import mpmath

        mp = isinstance(u0, (mpmath.mpc, mpmath.mpf))
    except ImportError:
        mp = False
    if mp:
        import mpmath

        coeffs = [mpmath.mpf(c.re.numerator) / c.re.denominator
                  + mpmath.mpc(0, 1) * mpmath.mpf(c.im.numerator) / c.im.denominator
                  for c in p.coeffs]
    else:
        coeffs = [c.to_complex() for c in p.coeffs]
    q = ShiftedPolynomial(coeffs)
    vals = [q.eval(u0 + 0.5j * n) for n in range(start, start + length)]
    return LatticeFunction(start, vals)


def _lattice_state_from_psis(r, psis, u0, half_window, exact, rng) -> QSystemState:
    start = -half_window
    length = 2 * half_window + 1
    latt = {a + 1: poly_on_lattice(p, u0, start, length, exact) for a, p in enumerate(psis)}
    if exact:
        Wfull = wronskian(psis)
        Wlat = poly_on_lattice(Wfull, u0, start, length, exact)
    else:
        psis_exact = [_float_poly_to_exact(p) for p in psis]
        Wlat = _exact_poly_lattice(wronskian(psis_exact), u0, start, length)

    def randval():
        if exact:
            return GaussianRational(Fraction(rng.randint(1, 5), rng.randint(1, 4)),
                                    Fraction(rng.randint(1, 5), rng.randint(1, 4)))
        return complex(rng.uniform(0.4, 1.6), rng.uniform(-0.8, 0.8))

    # psi0 from the rank-r condition: the fused power couples values at
    # offsets r-3, r-5, ..., -(r-3) around each point.  Seed 2(depth-1)
    # consecutive entries at the window centre and recurse both ways, which
    # keeps float error accumulation to half the window
    depth = r - 2
    vals0 = [None] * length
    mid = length // 2
    seed_lo = mid - (depth - 1)
    for k in range(max(0, 2 * (depth - 1))):
        vals0[seed_lo + k] = randval()
    if depth == 1:
        for n in range(length):
            vals0[n] = Wlat.values[n]
    else:
        for top in range(seed_lo + 2 * (depth - 1), length):
            c = top - (depth - 1)
            prod = None
            for j in range(1, depth):
                v = vals0[top - 2 * j]
                prod = v if prod is None else prod * v
            vals0[top] = Wlat.values[c] / prod
        for bot in range(seed_lo - 1, -1, -1):
            c = bot + (depth - 1)
            prod = None
            for j in range(1, depth):
                v = vals0[bot + 2 * j]
                prod = v if prod is None else prod * v
            vals0[bot] = Wlat.values[c] / prod
    psi0 = LatticeFunction(start, vals0)

    psi2 = {}
    for a in range(1, r + 1):
        for b in range(a + 1, r + 1):
            if exact:
                J = poly_on_lattice(wronskian([psis[a - 1], psis[b - 1]]), u0, start, length, exact)
            else:
                J = _exact_poly_lattice(wronskian([psis_exact[a - 1], psis_exact[b - 1]]),
                                        u0, start, length)
            vals = [None] * length
            vals[mid] = randval()
            vals[mid + 1] = randval()
            for n in range(mid + 2, length):
                # relation at centre n-1: x[n] psi0[n-2] - x[n-2] psi0[n] = J[n-1]
                vals[n] = (J.values[n - 1] + vals[n - 2] * vals0[n]) / vals0[n - 2]
            for n in range(mid - 1, -1, -1):
                # relation at centre n+1: x[n+2] psi0[n] - x[n] psi0[n+2] = J[n+1]
                vals[n] = (vals[n + 2] * vals0[n] - J.values[n + 1]) / vals0[n + 2]
            psi2[(a, b)] = LatticeFunction(start, vals)

    state = QSystemState(r, psi0, {a: latt[a] for a in latt}, psi2, "lattice", exact=exact)
    state.source_psis = psis
    state.lattice_u0 = u0
    state.lattice_window = (start, length)
    return state


def mutate_lattice_state(state: QSystemState, rng: random.Random, eps: float = 1e-3) -> QSystemState:
    """Perturb one input polynomial coefficient, keeping the solved data."""
    psis = [ShiftedPolynomial(list(p.coeffs)) for p in state.source_psis]
    a = rng.randrange(len(psis))
    k = rng.randrange(len(psis[a].coeffs))
    psis[a].coeffs[k] = psis[a].coeffs[k] + eps
    start, length = state.lattice_window
    latt = {i + 1: poly_on_lattice(p, state.lattice_u0, start, length, False)
            for i, p in enumerate(psis)}
    out = QSystemState(state.r, state.psi0, latt, state.psi2, "lattice", exact=False)
    out.source_psis = psis
    out.lattice_u0 = state.lattice_u0
    out.lattice_window = state.lattice_window
    return out


# =============================================================================
# the identity catalogue
# =============================================================================


def verify_identities(state: QSystemState, tol: float = 1e-8,
                      families: Optional[Iterable[str]] = None) -> Dict[str, IdentityResult]:
    """Run the runtime verification catalogue on a reconstructed state.

    Returns {identity name: IdentityResult}.  Families: wronskian, pair,
    pure-spinor-qsystem, tensor-wronskian, fused-orthogonality, fierz,
    projection, normalization, qq-dynkin, pmu, shift-window, mu-inverse.
    """
    with state.tag_context():
        return _verify_identities_inner(state, tol, families)


def _verify_identities_inner(state: QSystemState, tol: float,
                             families: Optional[Iterable[str]]) -> Dict[str, IdentityResult]:
    r = state.r
    run = set(families) if families is not None else None
    out: Dict[str, IdentityResult] = {}

    def want(f):
        return run is None or f in run

    def add(res: IdentityResult):
        out[res.name] = res

    chain = state.backend == "chain"

    if want("wronskian"):
        lhs = wronskian([state.psi[a] for a in range(1, r + 1)])
        rhs = fused_power(state.psi0, r - 2)
        add(state.compare("wronskian-det", lhs, rhs, tol, proportional=chain))

    if want("pair"):
        worst = None
        for (a, b), pab in state.psi2.items():
            lhs = wronskian([state.psi[a], state.psi[b]])
            rhs = wronskian([pab, state.psi0])
            res = state.compare(f"pair({a},{b})", lhs, rhs, tol, proportional=chain)
            if worst is None or res.max_residual > worst.max_residual:
                worst = res
        add(IdentityResult("pair-wronskian", worst.status, worst.max_residual,
                           worst.constant, worst.name))

    if want("pure-spinor-qsystem"):
        worst = None
        spinor = state.full_spinor()
        for A in _subsets_upto(r, r - 2):
            rest = [x for x in range(1, r + 1) if x not in A]
            for a, b in itertools.combinations(rest, 2):
                psiA = spinor.component(A)
                psiAa = _signed_component(spinor, A + (a,))
                psiAb = _signed_component(spinor, A + (b,))
                psiAab = _signed_component(spinor, A + (a, b))
                if psiA is None:
                    continue
                lhs = wronskian([psiAa, psiAb])
                rhs = wronskian([psiAab, psiA])
                res = state.compare(f"ps-qq{A}+{a}{b}", lhs, rhs, tol, proportional=chain)
                if worst is None or res.max_residual > worst.max_residual:
                    worst = res
        add(IdentityResult("pure-spinor-qsystem", worst.status, worst.max_residual,
                           worst.constant, worst.name))

    if want("tensor-wronskian"):
        worst = None
        for size in range(2, r):
            for I in _sample_signed_indices(r, size, limit=6):
                direct = state.v_signed(I)
                ww = state.v_wronskian(I)
                res = state.compare(f"tensor-w{I}", ww, direct, tol, proportional=chain)
                if worst is None or res.max_residual > worst.max_residual:
                    worst = res
        add(IdentityResult("tensor-wronskian", worst.status, worst.max_residual,
                           worst.constant, worst.name))

    if want("fused-orthogonality"):
        worst = None
        for m in range(-(r - 2), r - 1):
            acc = None
            for i in _signed_range(r):
                term = state.v_signed((i,)).shift(m) * state.v_signed((-i,)).shift(-m)
                acc = term if acc is None else acc + term
            scale = max(state.magnitude(state.v_signed((1,)).shift(m) * state.v_signed((-1,)).shift(-m)), 1e-300)
            resid = state.residual_zero(acc.value if isinstance(acc, Tagged) else acc, scale)
            res = IdentityResult(f"ortho m={m}", "pass" if resid <= tol else "fail", resid)
            if worst is None or res.max_residual > worst.max_residual:
                worst = res
        add(IdentityResult("fused-orthogonality", worst.status, worst.max_residual,
                           witness=worst.name))

    if want("fierz"):
        worst = None
        spinor = state.full_spinor()
        for I in _fierz_sample(r):
            size = len(I)
            if size == r:
                lhs, hint = _bilinear_scaled(state, spinor.shift(-1), I, None, spinor.shift(1))
                rhs = state.v_wronskian(I)
            else:
                chir = +1 if (r - size) % 2 == 0 else -1
                lhs, hint = _bilinear_scaled(state, spinor.shift(-r + 1 + size), I, chir,
                                             spinor.shift(r - 1 - size))
                rhs = state.v_signed(I)
            if lhs is None:
                continue
            res = state.compare(f"fierz{I}", lhs, rhs, tol, proportional=chain,
                                scale_hint=hint)
            if worst is None or res.max_residual > worst.max_residual:
                worst = res
        add(IdentityResult("fierz", worst.status, worst.max_residual,
                           worst.constant, worst.name))

    if want("projection"):
        worst = None
        spinor = state.full_spinor()
        for I in _fierz_sample(r, max_size=r - 2):
            size = len(I)
            for m in range(-(r - 2 - size), r - 1 - size):
                for chir in (+1, -1):
                    val, hint = _bilinear_scaled(state, spinor.shift(-m), I, chir,
                                                 spinor.shift(m))
                    if val is None:
                        continue
                    resid = state.residual_zero(val.value if isinstance(val, Tagged) else val,
                                                max(hint, 1e-300))
                    res = IdentityResult(f"proj{I} m={m} chi={chir}",
                                         "pass" if resid <= tol else "fail", resid)
                    if worst is None or res.max_residual > worst.max_residual:
                        worst = res
        add(IdentityResult("projection", worst.status, worst.max_residual, witness=worst.name))

    if want("normalization"):
        worst = None
        for size in range(0, r):
            acc = None
            termscale = 0.0
            for I in itertools.combinations(_signed_range(r), size):
                vI = state.v_signed(I) if size else state.one()
                vIl = state.v_lower(I) if size else state.one()
                term = vI.shift(r - 1) * vIl.shift(-r + 1)
                termscale = max(termscale, state.magnitude(term))
                acc = term if acc is None else acc + term
            sign = (-1) ** (size * (r + 1))
            res = state.compare(f"norm-vec k={size}", acc,
                                 state.one().scale_gaussian(GaussianRational(sign)),
                                 tol, proportional=chain, scale_hint=termscale)
            if worst is None or res.max_residual > worst.max_residual:
                worst = res
        spinor = state.full_spinor()
        for chir in (+1, -1):
            val = bilinear(spinor.shift(-r + 1), (), chir, spinor.shift(r - 1))
            hint = state.magnitude(spinor.component(()).shift(-r + 1)
                                   * spinor.component(tuple(range(1, r + 1))).shift(r - 1))
            res = state.compare(f"norm-spinor chi={chir}", val, state.one(), tol,
                                proportional=chain, scale_hint=hint)
            if res.max_residual > worst.max_residual:
                worst = res
        add(IdentityResult("normalization", worst.status, worst.max_residual,
                           worst.constant, worst.name))

    if want("qq-dynkin"):
        worst = None
        for a in range(1, r + 1):
            q1, q2 = _dynkin_pair(state, a)
            lhs = wronskian([q1, q2])
            rhs = None
            for b in dynkin_adjacency(r)[a]:
                qb = _dynkin_pair(state, b)[0]
                rhs = qb if rhs is None else rhs * qb
            if rhs is None:
                rhs = state.one()
            res = state.compare(f"qq node {a}", lhs, rhs, tol, proportional=True)
            if res.status == "pass" and not chain and res.constant is not None:
                # abstract states must come out at exactly +-1
                c = _const_to_complex(res.constant)
                if min(abs(c - 1), abs(c + 1)) > 1e-6 * max(1.0, abs(c)):
                    res = IdentityResult(res.name, "fail", max(res.max_residual, 1.0), res.constant)
            if worst is None or res.max_residual > worst.max_residual:
                worst = res
        add(IdentityResult("qq-dynkin", worst.status, worst.max_residual,
                           worst.constant, worst.name))

    if want("pmu"):
        lhs = wronskian([state.p_single(a) for a in range(1, r + 1)])
        rhs = (state.one() / state.psi0.shift(r - 1)) * (state.one() / state.psi0.shift(-r + 1))
        add(state.compare("pmu-wronskian", lhs, rhs, tol, proportional=chain))
        worst = None
        for (a, b) in itertools.combinations(range(1, r + 1), 2):
            lhs = wronskian([state.p_single(a), state.p_single(b)])
            rhs = state.mu(a, b).shift(1) - state.mu(a, b).shift(-1)
            res = state.compare(f"pmu-pair({a},{b})", lhs, rhs, tol, proportional=chain)
            if worst is None or res.max_residual > worst.max_residual:
                worst = res
        add(IdentityResult("pmu-pair", worst.status, worst.max_residual,
                           worst.constant, worst.name))

    if want("shift-window"):
        worst = None
        for A, B in _window_samples(r):
            s = len(A) + len(B)
            base = state.v_mixed(A, B, r - 1 - s)
            for m in range(r - 1 - s, -r + s, -2):
                other = state.v_mixed(A, B, m)
                res = state.compare(f"window A={A} B={B} m={m}", other, base, tol)
                if worst is None or res.max_residual > worst.max_residual:
                    worst = res
        add(IdentityResult("shift-window", worst.status, worst.max_residual,
                           witness=worst.name))

    if want("mu-inverse") and r % 2 == 1:
        spinor = state.full_spinor()
        top = spinor.component(tuple(range(1, r + 1)))
        worst = None
        for a in range(1, r + 1):
            for c in range(1, r + 1):
                acc = None
                for b in range(1, r + 1):
                    term = state.mu_upper(a, b) * state.mu(b, c)
                    acc = term if acc is None else acc + term
                psi_up_a = _raised_single(state, spinor, a)
                corr = psi_up_a * state.psi_component((c,)) / (state.psi0 * top)
                delta = state.one() if a == c else state.one() - state.one()
                res = state.compare(f"mu-inv({a},{c})", acc, delta - corr, tol)
                if worst is None or res.max_residual > worst.max_residual:
                    worst = res
        add(IdentityResult("mu-inverse", worst.status, worst.max_residual, witness=worst.name))

    return out


def _bilinear_scaled(state: QSystemState, psi1: ExteriorElement, I, chir,
                     psi2: ExteriorElement):
    """Bilinear value plus the magnitude of its largest contraction term,
    which is the honest scale for a cancellation-heavy sum."""
    x = psi2 if chir is None else chirality(chir, psi2)
    x = gamma_multi(list(I), x)
    x = charge_conjugate(x)
    val = dot(psi1, x)
    hint = 0.0
    for A, c in psi1.comps.items():
        d = x.comps.get(A)
        if d is None:
            continue
        hint = max(hint, state.magnitude(c * d))
    return val, hint


def _raised_single(state: QSystemState, spinor: ExteriorElement, a: int):
    """Psi^a = eps^{a B} Psi_B with B the complement of {a}."""
    comp, eps = eps_complement((a,), state.r)
    val = spinor.component(comp)
    return gscale(val, GaussianRational(eps)) if eps < 0 else val


def _signed_component(spinor: ExteriorElement, seq: Sequence[int]):
    canon = tuple(sorted(seq))
    sgn = perm_sign(list(seq))
    if sgn == 0:
        return None
    val = spinor.component(canon)
    if val is None:
        return None
    return gscale(val, GaussianRational(sgn)) if sgn < 0 else val


def _dynkin_pair(state: QSystemState, a: int):
    r = state.r
    if a == r:
        return state.psi0, state.psi2[(r - 1, r)]
    if a == r - 1:
        return state.psi[r], state.psi[r - 1]
    q1 = state.v_upper(tuple(range(1, a + 1)))
    q2 = state.v_upper(tuple(range(1, a)) + (a + 1,))
    return q1, q2


def _subsets_upto(r: int, kmax: int):
    out = []
    for k in range(0, kmax + 1):
        out.extend(itertools.combinations(range(1, r + 1), k))
    return out


def _signed_range(r: int):
    return list(range(1, r + 1)) + [-i for i in range(r, 0, -1)]


def _sample_signed_indices(r: int, size: int, limit: int):
    pool = list(itertools.combinations(_signed_range(r), size))
    rng = random.Random(1000 * r + size)
    rng.shuffle(pool)
    picked = pool[:limit]
    must = tuple(range(1, size + 1))
    if must not in picked:
        picked.append(must)
    return picked


def _fierz_sample(r: int, max_size: Optional[int] = None):
    ms = r if max_size is None else max_size
    out = []
    for size in range(0, ms + 1):
        out.extend(_sample_signed_indices(r, size, limit=4))
    return out


def _window_samples(r: int):
    out = []
    for ka in range(1, r):
        for kb in range(0, r - ka):
            A = tuple(range(1, ka + 1))
            B = tuple(range(ka + 1, ka + kb + 1))
            if len(A) + len(B) <= r - 1:
                out.append((A, B))
    return out


# =============================================================================
# Weyl covariance on abstract states
# =============================================================================


def weyl_covariance_check(state: QSystemState, kind: str, indices: Sequence[int],
                          tol: float = 1e-8) -> Dict[str, IdentityResult]:
    """Transform an abstract state by a Pin(2r) representative and re-check
    the two Wronskian conditions and the node relations, allowing signs."""
    r = state.r
    rep = weyl_representative(kind, indices, r)
    spinor = state.full_spinor()
    new = rep(spinor)
    psi0p = new.component(())
    psip = {a: new.component((a,)) for a in range(1, r + 1)}
    psi2p = {(a, b): new.component((a, b)) for a in range(1, r + 1) for b in range(a + 1, r + 1)}
    zero = state.psi0 - state.psi0
    psip = {a: (v if v is not None else zero) for a, v in psip.items()}
    psi2p = {k: (v if v is not None else zero) for k, v in psi2p.items()}
    if psi0p is None or (hasattr(psi0p, "is_exact_zero") and psi0p.is_exact_zero()):
        raise ArithmeticError("transformed state has vanishing top spinor component")
    newstate = QSystemState(r, psi0p, psip, psi2p, state.backend, exact=state.exact)
    report = {}
    for fam in ("wronskian", "pair", "qq-dynkin"):
        res = verify_identities(newstate, tol, families=[fam])
        report.update(res)
    # signs: the determinant condition may flip sign under the representative
    res = report.get("wronskian-det")
    if res and res.status == "fail":
        lhs = wronskian([newstate.psi[a] for a in range(1, r + 1)])
        rhs = fused_power(newstate.psi0, r - 2)
        res2 = newstate.compare("wronskian-det", lhs, rhs, tol, proportional=True)
        ok = res2.status == "pass" and res2.constant is not None
        if ok:
            c = _const_to_complex(res2.constant)
            ok = min(abs(c - 1), abs(c + 1)) <= 1e-6 * max(1.0, abs(c))
        report["wronskian-det"] = IdentityResult(
            "wronskian-det", "pass" if ok else "fail", res2.max_residual, res2.constant)
    # pair relations likewise hold up to one global sign
    res = report.get("pair-wronskian")
    if res and res.status == "fail":
        worst = None
        consts = []
        for (a, b), pab in newstate.psi2.items():
            lhs = wronskian([newstate.psi[a], newstate.psi[b]])
            rhs = wronskian([pab, newstate.psi0])
            rr = newstate.compare(f"pair({a},{b})", lhs, rhs, tol, proportional=True)
            if rr.status == "pass" and rr.constant is not None:
                consts.append(_const_to_complex(rr.constant))
            else:
                consts.append(None)
            if worst is None or rr.max_residual > worst.max_residual:
                worst = rr
        ok = all(c is not None and min(abs(c - 1), abs(c + 1)) < 1e-6 * max(1.0, abs(c))
                 for c in consts)
        report["pair-wronskian"] = IdentityResult(
            "pair-wronskian", "pass" if ok and worst.status == "pass" else "fail",
            worst.max_residual, worst.constant)
    return report


def _const_to_complex(c) -> complex:
    if isinstance(c, complex):
        return c
    s = str(c)
    try:
        if "*i" in s or s.endswith("i"):
            g = None
            from .qpoly import parse_gaussian

            g = parse_gaussian(s.replace(" ", ""))
            return g.to_complex()
        if "j" in s:
            return complex(s.replace(" ", ""))
        return complex(Fraction(s))
    except Exception:
        return complex(float(s))


# =============================================================================
# pair equation solve (psi_ab derivation) and kinematic constraints
# =============================================================================


def solve_pair_equation(psi0, psia, psib, P_rm1, P_r, M_ab: int, M_0: int, one,
                        c_ab=None):
    """Solve P_{r-1} W(psi_ab, psi0) = c P_r W(psi_a, psi_b) for a monic
    psi_ab of degree M_ab whose u^{M_0} coefficient vanishes.

    Works over any coefficient ring containing the Gaussian rationals (exact
    scalars, complex floats, multivariate polynomials in the unknowns).
    Returns (psi_ab, c, leftover) where leftover is the residual polynomial
    of the matched equation; its coefficients are the sector equations.
    """
    if M_ab < 0:
        raise ValueError("negative target degree for the two-form component")
    rhs_w = wronskian([psia, psib])
    rhs = P_r * rhs_w
    slots = [k for k in range(M_ab) if k != M_0]
    if c_ab is None:
        raise ValueError("pair normalization constant must be supplied")
    target = rhs.scale(c_ab)
    build = _monomial(M_ab, one)
    L_of = lambda q: P_rm1 * wronskian([q, psi0])
    residual = target - L_of(build)
    # the matrix of psi_ab-coefficient k against the u-power degP+M_0+k-1 is
    # triangular with constant diagonal i (k - M_0): back-substitute top-down
    dshift = P_rm1.degree + M_0 - 1
    for k in sorted(slots, reverse=True):
        e = residual.coeff(dshift + k)
        diag = GR_I * (k - M_0)
        if isinstance(e, GaussianRational):
            ck = e / diag
        elif isinstance(e, complex):
            ck = e / diag.to_complex()
        else:
            ck = gscale(e, GR_ONE / diag)
        mono = _monomial(k, one).scale(ck)
        residual = residual - L_of(mono)
        build = build + mono
    return build, c_ab, residual


def _monomial(k: int, one):
    zero = one - one
    return ShiftedPolynomial([zero] * k + [one])


def derive_psi_ab(psi0: ShiftedPolynomial, psia: ShiftedPolynomial, psib: ShiftedPolynomial,
                  P_rm1: ShiftedPolynomial, P_r: ShiftedPolynomial, M_ab: int,
                  tol: float = 1e-9):
    """Scalar-data version; raises if the matching equations are violated."""
    if psia == psib:
        return ShiftedPolynomial(), GR_ZERO
    exact = _exact_poly(psi0) or psi0.is_zero()
    one = GR_ONE if exact else 1.0 + 0j
    M_0 = psi0.degree
    Ma, Mb = psia.degree, psib.degree
    if Ma == Mb:
        raise ArithmeticError("pair solve needs distinct one-form degrees")
    rhs = P_r * wronskian([psia, psib])
    if rhs.degree != P_rm1.degree + M_ab + M_0 - 1:
        raise ArithmeticError("degree mismatch in the pair equation")
    if exact:
        c_val = GR_I * (M_ab - M_0) * psi0.lead() * P_rm1.lead() / rhs.lead()
    else:
        c_val = 1j * (M_ab - M_0) * complex(psi0.lead()) * complex(P_rm1.lead()) / complex(rhs.lead())
    psiab, _, leftover = solve_pair_equation(
        psi0, psia, psib, P_rm1, P_r, M_ab, M_0, one, c_ab=c_val)
    if exact:
        if not leftover.is_zero():
            raise ArithmeticError("pair equation inconsistent for this data")
    else:
        scale = max(1.0, (P_r * wronskian([psia, psib])).max_abs())
        if leftover.max_abs() > tol * scale:
            raise ArithmeticError(
                f"pair equation residual {leftover.max_abs() / scale:.2e} too large")
    return psiab, c_val


def chain_state_from_polys(r: int, psi0: ShiftedPolynomial,
                           psis: Dict[int, ShiftedPolynomial],
                           drinfeld: List[ShiftedPolynomial],
                           psi2_degrees: Dict[Tuple[int, int], int],
                           exact: bool, tol: float = 1e-8) -> QSystemState:
    """Build a reconstructed state from solved singlet and one-form data.

    The two-form components are derived pairwise and stored in the
    normalization that satisfies the pair condition with constant one, which
    is what every reconstruction formula assumes; the monic versions are
    recovered by baxter_q-style rescaling when reporting.
    """
    psi2 = {}
    for a in range(1, r + 1):
        for b in range(a + 1, r + 1):
            pab, c = derive_psi_ab(psi0, psis[a], psis[b],
                                   drinfeld[r - 2], drinfeld[r - 1],
                                   psi2_degrees[(a, b)], tol=tol)
            if isinstance(c, GaussianRational):
                inv = GR_ONE / c if c else GR_ONE
            else:
                inv = 1.0 / c if c != 0 else 1.0
            psi2[(a, b)] = pab.scale(inv) if c else pab
    return QSystemState.from_chain(r, psi0, psis, psi2, drinfeld, exact=exact)


def check_kinematic(r: int, psi0: ShiftedPolynomial, psis: Dict[int, ShiftedPolynomial],
                    drinfeld: List[ShiftedPolynomial], tol: float = 1e-8):
    """Divisibility filter: Wronskians of k one-forms must be divisible by the
    fused psi0 power times the interior Drinfeld factors, 2 <= k <= r-1.

    Returns (ok, witness) with the first failing index subset."""
    exact = _exact_poly(psi0)
    for k in range(2, r):
        div = fused_power(psi0, k - 2) if k >= 2 else None
        for b in range(r - k + 1, r):
            fp = fused_power(drinfeld[b - 1] if exact else drinfeld[b - 1].to_complex(), b + k - r)
            div = fp if div is None else div * fp
        for subset in itertools.combinations(range(1, r + 1), k):
            w = wronskian([psis[a] for a in subset])
            if div.degree <= 0:
                continue
            q, rem = w.divrem(div)
            if exact:
                if not rem.is_zero():
                    return False, subset
            else:
                scale = max(w.max_abs(), 1.0)
                if rem.max_abs() > tol * scale:
                    return False, subset
    return True, None


# =============================================================================
# exact instances satisfying the pair relations (for the divisibility lemma)
# =============================================================================


def pair_consistent_psis(r: int, rng: random.Random, psi0: ShiftedPolynomial,
                         degrees: Optional[Sequence[int]] = None) -> List[ShiftedPolynomial]:
    """Exact random one-forms of prescribed strictly-decreasing degrees whose
    pairwise Wronskians all lie in the image of q -> W(q, psi0).

    Built by extending an isotropic family one vector at a time through
    exact nullspace computations against the image-obstruction functionals.
    """
    if degrees is None:
        degrees = [psi0.degree + 2 * r - a for a in range(1, r + 1)]
    degrees = list(degrees)
    if sorted(degrees, reverse=True) != degrees or len(set(degrees)) != r:
        raise ValueError("degrees must be strictly decreasing")
    deg = degrees[0]
    dim = deg + 1
    obstruction = _pair_obstruction_rows(psi0, deg)

    def rand_vec(constraints, dcap):
        basis = _nullspace(constraints, dim)
        if not basis:
            raise ArithmeticError("isotropic extension ran out of dimensions")
        for _try in range(50):
            vec = [GR_ZERO] * dim
            for bvec in basis:
                c = GaussianRational(Fraction(rng.randint(-5, 5), rng.randint(1, 3)),
                                     Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
                vec = [v + c * x for v, x in zip(vec, bvec)]
            if vec[dcap]:
                return _shrink_exact_vector(vec)
        raise ArithmeticError("could not reach the requested leading degree")

    chosen: List[List[GaussianRational]] = []
    for dcap in degrees:
        cons = []
        for j in range(dcap + 1, dim):
            row = [GR_ZERO] * dim
            row[j] = GR_ONE
            cons.append(row)
        for prev in chosen:
            for row in obstruction:
                cons.append(_apply_bilinear_row(row, prev, dim))
        chosen.append(rand_vec(cons, dcap))
    return [ShiftedPolynomial(v) for v in chosen]


def _pair_obstruction_rows(psi0: ShiftedPolynomial, deg: int):
    """Rows expressing 'W(p, q) is in the image of W(., psi0)' as bilinear
    conditions on (p, q) coefficient vectors."""
    M0 = psi0.degree
    dim = deg + 1
    # image space of q -> W(q, psi0) for deg q <= 2*deg (enough headroom)
    img_rows = []
    qdeg = 2 * deg + M0
    for k in range(qdeg + 1):
        if k == M0:
            continue
        w = wronskian([_monomial(k, GR_ONE), psi0])
        img_rows.append([w.coeff(d) for d in range(qdeg + M0)])
    # obstruction functionals annihilate every image vector: right nullspace
    # of the matrix whose rows are the images
    null = _nullspace(img_rows, qdeg + M0)
    # each null functional f gives the bilinear form B(p,q) = f(W(p,q))
    rows = []
    for f in null:
        B = [[GR_ZERO] * dim for _ in range(dim)]
        for i in range(dim):
            for j in range(dim):
                w = wronskian([_monomial(i, GR_ONE), _monomial(j, GR_ONE)])
                val = GR_ZERO
                for d in range(min(len(f), w.degree + 1)):
                    c = w.coeff(d)
                    if c and f[d]:
                        val = val + c * f[d]
                B[i][j] = val
        rows.append(B)
    return rows


def _shrink_exact_vector(vec):
    """Rescale by a rational so numerators and denominators stay small."""
    den = 1
    for c in vec:
        for f in (c.re, c.im):
            den = den * f.denominator // math.gcd(den, f.denominator)
    nums = []
    for c in vec:
        for f in (c.re, c.im):
            if f:
                nums.append(abs(f.numerator * (den // f.denominator)))
    g = 0
    for n in nums:
        g = math.gcd(g, n)
    s = GaussianRational(Fraction(den, g if g else 1))
    return [c * s for c in vec]


def _apply_bilinear_row(B, vec, dim):
    out = [GR_ZERO] * dim
    for j in range(dim):
        acc = GR_ZERO
        for i in range(min(len(vec), dim)):
            if vec[i] and B[i][j]:
                acc = acc + vec[i] * B[i][j]
        out[j] = acc
    return out


def _nullspace(rows, dim):
    mat = [list(row) + [] for row in rows]
    # gaussian elimination over Q(i)
    m = [list(r) for r in mat]
    pivots = []
    rr = 0
    for col in range(dim):
        piv = next((k for k in range(rr, len(m)) if m[k][col]), None)
        if piv is None:
            continue
        m[rr], m[piv] = m[piv], m[rr]
        inv = GR_ONE / m[rr][col]
        m[rr] = [x * inv for x in m[rr]]
        for k in range(len(m)):
            if k != rr and m[k][col]:
                f = m[k][col]
                m[k] = [x - f * y for x, y in zip(m[k], m[rr])]
        pivots.append(col)
        rr += 1
        if rr == len(m):
            break
    free = [c for c in range(dim) if c not in pivots]
    basis = []
    for fc in free:
        v = [GR_ZERO] * dim
        v[fc] = GR_ONE
        for prow, pcol in zip(range(rr), pivots):
            v[pcol] = -m[prow][fc]
        basis.append(v)
    return basis


