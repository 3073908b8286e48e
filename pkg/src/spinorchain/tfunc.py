"""Transfer-matrix eigenvalues from reconstructed states.

Two independent routes are implemented: the shifted inner products of the
tensor/spinor components, and the gl(r)-invariant determinant and
two-form-power expressions.  Their agreement, the bilinear lattice relation
on the (a, s) grid, and the annihilation of the single-index polynomials by
the finite-difference operator built from the column invariants are the
runtime cross-checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import liealg
from .clifford import ExteriorElement, bilinear, gscale
from .qpoly import (
    GR_ONE,
    GaussianRational,
    RationalFunction,
    ShiftedPolynomial,
    det_ring,
    fused_power,
)
from .qsystem import (
    IdentityResult,
    QSystemState,
    Tagged,
    _bilinear_scaled,
    _signed_range,
)

__all__ = [
    "t_inner",
    "t_gl_expand",
    "t_gl_column",
    "t_gl_bar_column",
    "hirota_check",
    "baxter_annihilation_check",
    "kr_quotient_filter",
    "t_polynomial",
]


def t_inner(state: QSystemState, a: int, s: int):
    """T_{a,s} as a shifted inner product of rank-a components."""
    r = state.r
    if not 0 <= a <= r:
        raise ValueError(f"node {a} out of range")
    with state.tag_context():
        if a in (r - 1, r):
            spinor = state.full_spinor()
            chir = +1 if a == r else -1
            val, _ = _bilinear_scaled(state, spinor.shift(-r + 1 - s), (), chir,
                                      spinor.shift(r - 1 + s))
            return val
        if a == 0:
            empty = state.v_upper(())
            return empty.shift(r - 1 + s) * empty.shift(-r + 1 - s)
        acc = None
        for I in itertools.combinations(_signed_range(r), a):
            term = state.v_signed(I).shift(r - 1 + s) * \
                state.v_lower(I).shift(-r + 1 - s)
            acc = term if acc is None else acc + term
        sign = (-1) ** (a * (r - 1))
        return gscale(acc, GaussianRational(sign)) if sign < 0 else acc


def cross_check(state: QSystemState, a: int, s: int, tol: float = 1e-8) -> IdentityResult:
    """Inner-product value against the gl(r)-invariant route; the two sides
    agree up to a state-wide normalization constant that is solved for."""
    ti = t_inner(state, a, s)
    tg = t_gl_expand(state, a, s)
    with state.tag_context():
        return state.compare(f"tcross a={a} s={s}", ti, tg, tol,
                             proportional=state.backend == "chain")


def t_gl_column(state: QSystemState, lam: Sequence[Fraction]):
    """Determinant invariant with positively shifted single-index functions."""
    return _t_gl_det(state, lam, +1)


def t_gl_bar_column(state: QSystemState, lam: Sequence[Fraction]):
    r = state.r
    sign = (-1) ** ((r * (r - 1)) // 2)
    val = _t_gl_det(state, lam, -1)
    return gscale(val, GaussianRational(sign)) if sign < 0 else val


def _t_gl_det(state: QSystemState, lam, orient: int):
    r = state.r
    lam = list(lam) + [Fraction(0)] * (r - len(lam))
    rows = []
    for a in range(1, r + 1):
        row = []
        for b in range(r):
            hat = Fraction(lam[b]) - (b + 1) + Fraction(r + 1, 2)
            k = 2 * hat * orient
            assert k.denominator == 1, "half-odd column shift"
            row.append(state.p_single(a).shift(int(k)))
        rows.append(row)
    with state.tag_context():
        det = det_ring(rows)
        return det / state.p_top()


def t_gl_expand(state: QSystemState, a: int, s: int):
    """gl(r)-invariant route for the minuscule families a in {1, r-1, r}."""
    r = state.r
    if a == 1:
        return _t1s_weyl(state, s)
    if a in (r - 1, r):
        return _t_spinor_power(state, a, s)
    raise ValueError("column decomposition implemented for a in {1, r-1, r}")


def _t1s_weyl(state: QSystemState, s: int):
    """Row-shifted determinant sum for the first tensor node."""
    r = state.r
    with state.tag_context():
        acc = None
        for k in range(0, s + 1):
            rows = []
            for arow in range(1, r + 1):
                shift = (2 * (s - k) if arow == 1 else 0) \
                    - (2 * k if arow == r else 0) + 2 * k - s + r + 1 - 2 * arow
                rows.append([state.v_signed((b,)).shift(shift) for b in range(1, r + 1)])
            num = det_ring(rows)
            vtop = _v_fullset(state).shift(2 * k - s)
            term = num / vtop
            acc = term if acc is None else acc + term
        return acc


def _v_fullset(state: QSystemState):
    """V^{12...r}: the Wronskian of the single-index tensor components."""
    key = ("vfull",)
    if key not in state._cache:
        from .qpoly import wronskian

        state._cache[key] = wronskian([state.v_signed((b,)) for b in range(1, state.r + 1)])
    return state._cache[key]


def _t_spinor_power(state: QSystemState, a: int, s: int):
    """Two-form-power expressions for the spinor nodes."""
    r = state.r
    with state.tag_context():
        p1 = ExteriorElement(r, {(b,): state.p_single(b) for b in range(1, r + 1)})
        p2 = ExteriorElement(r, {(x, y): state.p_wronskian((x, y))
                                 for x in range(1, r + 1) for y in range(x + 1, r + 1)})
        phi_inv = state.psi0.shift(r - 1 + s) * state.psi0.shift(-r + 1 - s)

        def fused_two_form(n_shift: int) -> ExteriorElement:
            acc = None
            for k in range(1, n_shift + 1):
                t = p2.shift(n_shift + 1 - 2 * k)
                acc = t if acc is None else acc + t
            return acc

        def top(e: ExteriorElement):
            return e.component(tuple(range(1, r + 1)))

        fact = lambda k: GaussianRational(Fraction(1, _factorial(k)))
        if r % 2 == 0:
            if a == r:
                w = fused_two_form(r - 1 + s).wedge_power(r // 2)
                return gscale(top(w), fact(r // 2)) * phi_inv
            w = fused_two_form(r - 3 + s)
            half = (r - 2) // 2
            e = p1.shift(r - 1 + s)
            if half:
                e = e.wedge(w.wedge_power(half)) if half > 1 else e.wedge(w)
            e = e.wedge(p1.shift(-r + 1 - s))
            return gscale(top(e), fact(half)) * phi_inv
        w = fused_two_form(r - 1 + s)
        half = (r - 1) // 2
        wp = w.wedge_power(half) if half > 1 else w
        if a == r - 1:
            e = p1.shift(r - 1 + s).wedge(wp)
        else:
            e = wp.wedge(p1.shift(-r + 1 - s))
        return gscale(top(e), fact(half)) * phi_inv


def _factorial(k: int) -> int:
    out = 1
    for j in range(2, k + 1):
        out *= j
    return out


def t_branching_sum(state: QSystemState, a: int, s: int):
    """Spinor T's as a plain sum of conjugate column invariants over the
    gl(r) content of the corresponding irreducible module."""
    r = state.r
    lam_top = tuple(Fraction(s) * c for c in liealg.fundamental_weight(r, a))
    branching = liealg.gl_branching(r, lam_top)
    with state.tag_context():
        acc = None
        for lam, mult in sorted(branching.items()):
            term = t_gl_bar_column(state, lam)
            for _ in range(mult):
                acc = term if acc is None else acc + term
        pref = (state.psi0.shift(r - 1 + s) * state.psi0.shift(-r + 1 - s)) / (
            state.psi0.shift(r - 1) * state.psi0.shift(-r + 1))
        return acc * pref


def hirota_check(state: QSystemState, a_max: Optional[int] = None, s_max: int = 3,
                 tol: float = 1e-8) -> Dict[str, IdentityResult]:
    """Bilinear lattice relation on the (a, s) grid.

    Bulk cells: T^+ T^- = T_{a,s+1} T_{a,s-1} + T_{a+1,s} T_{a-1,s}; at the
    fork column a = r-2 the last product is replaced by the product of the
    two spinor functions.  Drinfeld corrections enter through the tags.
    """
    r = state.r
    if a_max is None:
        a_max = r - 2
    out: Dict[str, IdentityResult] = {}
    cache: Dict[Tuple[int, int], object] = {}

    def T(a, s):
        if (a, s) not in cache:
            cache[(a, s)] = t_inner(state, a, s)
        return cache[(a, s)]

    with state.tag_context():
        for a in range(1, min(a_max, r - 2) + 1):
            for s in range(1, s_max + 1):
                lhs = T(a, s).shift(1) * T(a, s).shift(-1)
                rhs = T(a, s + 1) * T(a, s - 1)
                if a == r - 2:
                    # the fork node touches three neighbors
                    rhs = rhs + T(a - 1, s) * T(r - 1, s) * T(r, s)
                else:
                    rhs = rhs + T(a + 1, s) * T(a - 1, s)
                hint = max(state.magnitude(lhs), state.magnitude(rhs))
                res = state.compare(f"hirota a={a} s={s}", lhs, rhs, tol,
                                    scale_hint=hint)
                out[res.name] = res
    return out


def baxter_annihilation_check(state: QSystemState, tol: float = 1e-8) -> Dict[str, IdentityResult]:
    """The alternating column-invariant operator annihilates every shifted
    single-index polynomial, from the left and from the right."""
    r = state.r
    out: Dict[str, IdentityResult] = {}
    with state.tag_context():
        cols = {}
        colsbar = {}
        for k in range(0, r + 1):
            lam = [Fraction(1)] * k
            cols[k] = t_gl_column(state, lam)
            colsbar[k] = t_gl_bar_column(state, lam)
        # duality between conjugate and complementary columns
        worst = None
        for k in range(0, r + 1):
            lhs = colsbar[k]
            rhs = (state.p_top().shift(-2) / state.p_top()) * cols[r - k].shift(-2)
            res = state.compare(f"column-duality k={k}", lhs, rhs, tol)
            if worst is None or res.max_residual > worst.max_residual:
                worst = res
        out["column-duality"] = IdentityResult(
            "column-duality", worst.status, worst.max_residual, witness=worst.name)

        worst = None
        for a in range(1, r + 1):
            p = state.p_single(a)
            acc = None
            hint = 0.0
            for b in range(0, r + 1):
                term = cols[b].shift(-r) * p.shift(1 - 2 * b)
                if b % 2:
                    term = gscale(term, GaussianRational(-1))
                hint = max(hint, state.magnitude(term))
                acc = term if acc is None else acc + term
            resid = state.residual_zero(acc.value if isinstance(acc, Tagged) else acc,
                                        max(hint, 1e-300))
            res = IdentityResult(f"baxter-> P_{a}", "pass" if resid <= tol else "fail", resid)
            if worst is None or res.max_residual > worst.max_residual:
                worst = res
            acc = None
            hint = 0.0
            for b in range(0, r + 1):
                term = p.shift(2 * b - 1) * colsbar[b].shift(r)
                if b % 2:
                    term = gscale(term, GaussianRational(-1))
                hint = max(hint, state.magnitude(term))
                acc = term if acc is None else acc + term
            resid = state.residual_zero(acc.value if isinstance(acc, Tagged) else acc,
                                        max(hint, 1e-300))
            res = IdentityResult(f"baxter<- P_{a}", "pass" if resid <= tol else "fail", resid)
            if res.max_residual > worst.max_residual:
                worst = res
        out["baxter-annihilation"] = IdentityResult(
            "baxter-annihilation", worst.status, worst.max_residual, witness=worst.name)
    return out


def t_polynomial(state: QSystemState, a: int, s: int,
                 tol: float = 1e-8) -> Tuple[Optional[ShiftedPolynomial], bool]:
    """Drinfeld-normalized polynomial form of T_{a,s} on a chain state.

    Returns (polynomial or None, is_polynomial).  The rational value is
    reported when the normalization does not clear the denominators, which
    is the flagged condition rather than an error.
    """
    if state.backend != "chain":
        raise TypeError("polynomial normalization needs a chain state")
    val = t_inner(state, a, s)
    r = state.r
    # strip exactly one dressing pair at the outer shifts; the leftover tag
    # difference is a Drinfeld product by construction
    target = tuple(sorted([((a, r - 1 + s), 1), ((a, -r + 1 - s), 1)]))
    from .qsystem import _tag_mul

    with state.tag_context():
        diff = _tag_mul(val.tag, target, -1)
        corr = state.drinfeld_factor(state.sigma.reduce(dict(diff)))
        rf = val.value * (corr.value if isinstance(corr, Tagged) else corr)
    if state.exact:
        try:
            return rf.as_polynomial(), True
        except ArithmeticError:
            return None, False
    num, den = rf.num, rf.den
    q, rem = num.divrem(den)
    if rem.max_abs() <= tol * max(num.max_abs(), 1.0):
        return q.trim(tol * max(q.max_abs(), 1.0)), True
    return None, False


def kr_quotient_filter(solutions_states: Sequence[QSystemState], base: ShiftedPolynomial,
                       m: int, s_values: Optional[Iterable[int]] = None,
                       tol: float = 1e-8) -> List[bool]:
    """Keep states whose normalized first-row functions are divisible by the
    fused square of the shifted base polynomial, for all s below the string
    length.  m = 1 imposes nothing."""
    keep = []
    for state in solutions_states:
        ok = True
        r = state.r
        svals = list(s_values) if s_values is not None else list(range(1, m))
        for s in svals:
            tpoly, is_poly = t_polynomial(state, 1, s, tol)
            if not is_poly:
                ok = False
                break
            pp = base.shift(r - 2) * base.shift(-r + 2)
            div = fused_power(pp if state.exact else pp.to_complex(), m - s)
            if div.degree <= 0:
                continue
            q, rem = tpoly.divrem(div)
            if state.exact:
                ok = ok and rem.is_zero()
            else:
                ok = ok and rem.max_abs() <= tol * max(tpoly.max_abs(), 1.0)
            if not ok:
                break
        keep.append(ok)
    return keep
