"""so(2r) weight-space combinatorics.

Everything in here is the independent counting oracle: pairings, the degree
formula that fixes how many unknown coefficients a sector has, irrep
dimensions, and tensor-product multiplicities of the chain Hilbert space.
It deliberately shares no code with the solver.

Weights are tuples of Fractions in the orthonormal epsilon basis.  Spinor
weights are half-integral; dominance means w1 >= w2 >= ... >= |wr| with all
entries sharing one fractional part.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

Weight = Tuple[Fraction, ...]

__all__ = [
    "Weight",
    "weight",
    "pair",
    "weyl_vector",
    "fundamental_weight",
    "is_dominant",
    "dim_irrep",
    "weight_multiplicities",
    "yangian_fundamental",
    "yangian_weights",
    "chain_multiplicities",
    "kr_vector_decomposition",
    "component_weight",
    "magnon_degrees",
    "sector_feasible",
    "gl_branching",
    "weight_str",
    "parse_weight",
]


def weight(*coords) -> Weight:
    return tuple(Fraction(c) for c in coords)


def zero_weight(r: int) -> Weight:
    return (Fraction(0),) * r


def pair(a: Weight, b: Weight) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a: Weight, b: Weight) -> Weight:
    return tuple(x + y for x, y in zip(a, b))


def weyl_vector(r: int) -> Weight:
    """rho = sum of fundamental weights = sum_a (r-a) eps_a."""
    if r < 2:
        raise ValueError("rank must be >= 2")
    return tuple(Fraction(r - a) for a in range(1, r + 1))


def fundamental_weight(r: int, a: int) -> Weight:
    if not 1 <= a <= r:
        raise ValueError(f"fundamental index {a} out of range for rank {r}")
    half = Fraction(1, 2)
    if a == r:
        return (half,) * r
    if a == r - 1:
        return (half,) * (r - 1) + (-half,)
    return tuple(Fraction(1) if b <= a else Fraction(0) for b in range(1, r + 1))


def is_dominant(w: Weight) -> bool:
    r = len(w)
    frac = {c - int(c) for c in w}
    # uniform fractional part: all integer or all half-integer
    if len({f % 1 for f in frac}) > 1:
        return False
    for a in range(r - 2):
        if w[a] < w[a + 1]:
            return False
    return w[r - 2] >= abs(w[r - 1])


def weight_str(w: Weight) -> str:
    return ",".join(str(c) for c in w)


def parse_weight(s: str) -> Weight:
    return tuple(Fraction(c) for c in s.split(","))


# -- dimensions and weight systems ------------------------------------------


def dim_irrep(r: int, lam: Weight) -> int:
    """Weyl dimension formula over the positive roots eps_i +/- eps_j."""
    if not is_dominant(lam):
        raise ValueError(f"weight {lam} is not dominant")
    rho = weyl_vector(r)
    l = add(lam, rho)
    num = Fraction(1)
    den = Fraction(1)
    for i in range(r):
        for j in range(i + 1, r):
            num *= (l[i] - l[j]) * (l[i] + l[j])
            den *= (rho[i] - rho[j]) * (rho[i] + rho[j])
    d = num / den
    assert d.denominator == 1 and d > 0
    return int(d)


def _dot_reduce(v: Weight) -> tuple[Weight, int] | None:
    """Map v to the dominant chamber by the Weyl group of D_r.

    Returns (dominant image, det sign) or None when v is on a wall, i.e.
    fixed by some reflection (two coordinates with equal absolute value).
    """
    r = len(v)
    absv = [abs(c) for c in v]
    if len(set(absv)) < r:
        return None
    order = sorted(range(r), key=lambda i: absv[i], reverse=True)
    perm_sign = _perm_sign(order)
    out = [absv[i] for i in order]
    neg = sum(1 for c in v if c < 0)
    if neg % 2 == 1:
        out[-1] = -out[-1]
    return tuple(out), perm_sign


def _perm_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def _positive_roots(r: int) -> list[Weight]:
    roots = []
    for i in range(r):
        for j in range(i + 1, r):
            minus = [Fraction(0)] * r
            minus[i], minus[j] = Fraction(1), Fraction(-1)
            plus = [Fraction(0)] * r
            plus[i], plus[j] = Fraction(1), Fraction(1)
            roots.append(tuple(minus))
            roots.append(tuple(plus))
    return roots


def weight_multiplicities(r: int, lam: Weight) -> Dict[Weight, int]:
    """Weight system of L(lam) with multiplicities, by Freudenthal recursion."""
    if not is_dominant(lam):
        raise ValueError("highest weight must be dominant")
    rho = weyl_vector(r)
    pos = _positive_roots(r)
    lrho = add(lam, rho)
    c_top = pair(lrho, lrho)

    # generate candidate weights: lam minus non-negative combinations of
    # simple roots, level by level, keeping those in the convex hull test
    simple = _simple_roots(r)
    mults: Dict[Weight, int] = {lam: 1}
    frontier = [lam]
    while frontier:
        nxt = set()
        for mu in frontier:
            for al in simple:
                cand = tuple(m - a for m, a in zip(mu, al))
                if cand in mults or cand in nxt:
                    continue
                if _freudenthal_mult(cand, lam, rho, pos, mults, c_top) > 0:
                    nxt.add(cand)
        for mu in nxt:
            mults[mu] = _freudenthal_mult(mu, lam, rho, pos, mults, c_top)
        frontier = list(nxt)
    return mults


def _simple_roots(r: int) -> list[Weight]:
    out = []
    for a in range(r - 1):
        v = [Fraction(0)] * r
        v[a], v[a + 1] = Fraction(1), Fraction(-1)
        out.append(tuple(v))
    v = [Fraction(0)] * r
    v[r - 2], v[r - 1] = Fraction(1), Fraction(1)
    out.append(tuple(v))
    return out


def _freudenthal_mult(mu, lam, rho, pos, mults, c_top) -> int:
    # weights above mu (towards lam) are already tabulated when the weight
    # system is filled level by level, so absent entries are honest zeros
    if mu == lam:
        return 1
    murho = add(mu, rho)
    denom = c_top - pair(murho, murho)
    if denom <= 0:
        return 0
    scan_cap = 2 * int(sum(abs(c) for c in lam)) + 2 * len(lam)
    total = Fraction(0)
    for al in pos:
        for k in range(1, scan_cap + 1):
            shifted = tuple(m + k * a for m, a in zip(mu, al))
            m = mults.get(shifted, 0)
            if m:
                total += 2 * m * pair(shifted, al)
    val = total / denom
    assert val.denominator == 1
    return int(val)


# -- Yangian fundamental modules and chains ----------------------------------


def yangian_fundamental(r: int, a: int) -> Dict[Weight, int]:
    """so(2r)-content of the a-th fundamental module of the Yangian.

    Tensor nodes decompose as L(w_a) + L(w_{a-2}) + ... ending in L(w_1) or
    the trivial rep; the two spinor nodes stay irreducible.
    """
    if not 1 <= a <= r:
        raise ValueError(f"node index {a} out of range")
    if a >= r - 1:
        return {fundamental_weight(r, a): 1}
    out: Dict[Weight, int] = {}
    b = a
    while b >= 2:
        out[fundamental_weight(r, b)] = 1
        b -= 2
    out[fundamental_weight(r, 1) if b == 1 else zero_weight(r)] = 1
    return out


def yangian_weights(r: int, a: int) -> Dict[Weight, int]:
    """Weight multiplicities of W_a.

    For tensor nodes W_a is the full a-th exterior power of the vector
    representation, so its weights are sums of a distinct signed basis
    weights.  Spinor nodes have the familiar half-integral weights with a
    fixed parity of minus signs.
    """
    if a <= r - 2:
        # each summand L(w_k), k <= r-2, is exactly the k-th exterior power
        # of the vector representation, so its weights are subset sums
        vec = []
        for b in range(r):
            v = [Fraction(0)] * r
            v[b] = Fraction(1)
            vec.append(tuple(v))
            vec.append(tuple(-c for c in v))
        out: Dict[Weight, int] = {}
        k = a
        while k >= 0:
            for sub in itertools.combinations(vec, k):
                w = tuple(sum(col) for col in zip(*sub)) if k else zero_weight(r)
                out[w] = out.get(w, 0) + 1
            k -= 2
        return out
    half = Fraction(1, 2)
    parity = (r - a) % 2  # node r: even number of minus signs
    out = {}
    for signs in itertools.product((half, -half), repeat=r):
        if sum(1 for s in signs if s < 0) % 2 == parity:
            out[tuple(signs)] = 1
    return out


def chain_multiplicities(r: int, nodes: Iterable[int]) -> Dict[Weight, int]:
    """Multiplicities d_lambda of dominant highest weights in a spin chain.

    Iterated tensor decomposition by the reflection trick: each factor's
    weights are added to the running highest weights and reduced to the
    dominant chamber with signs; wall terms drop.
    """
    nodes = list(nodes)
    rho = weyl_vector(r)
    state: Dict[Weight, int] = {zero_weight(r): 1}
    for a in nodes:
        wmults = yangian_weights(r, a)
        nxt: Dict[Weight, int] = {}
        for lam, dl in state.items():
            for mu, m in wmults.items():
                v = add(add(lam, mu), rho)
                red = _dot_reduce(v)
                if red is None:
                    continue
                dom, sign = red
                newlam = tuple(d - p for d, p in zip(dom, rho))
                nxt[newlam] = nxt.get(newlam, 0) + sign * dl * m
        state = {lam: m for lam, m in nxt.items() if m != 0}
    assert all(m > 0 for m in state.values()), "negative multiplicity survived"
    return state


def chain_dimension(r: int, nodes: Iterable[int]) -> int:
    dim = 1
    for a in nodes:
        if a <= r - 2:
            d = 0
            k = a
            while k >= 0:
                d += _binom(2 * r, k)
                k -= 2
            dim *= d
        else:
            dim *= 2 ** (r - 1)
    return dim


def _binom(n, k):
    from math import comb

    return comb(n, k)


def kr_vector_decomposition(r: int, m: int) -> Dict[Weight, int]:
    """so(2r)-content of the vector-node module with an m-string of
    inhomogeneities: L(m w_1) + L((m-2) w_1) + ..."""
    out: Dict[Weight, int] = {}
    k = m
    while k >= 0:
        lam = tuple(Fraction(c) * k for c in fundamental_weight(r, 1))
        out[lam] = 1
        k -= 2
    return out


def kr_chain_multiplicities(r: int, m: int, length: int) -> Dict[Weight, int]:
    """Multiplicities for a chain of `length` vector-node m-string modules."""
    rho = weyl_vector(r)
    state: Dict[Weight, int] = {zero_weight(r): 1}
    wmults: Dict[Weight, int] = {}
    for lam, _ in kr_vector_decomposition(r, m).items():
        for mu, mult in weight_multiplicities(r, lam).items():
            wmults[mu] = wmults.get(mu, 0) + mult
    for _ in range(length):
        nxt: Dict[Weight, int] = {}
        for lam, dl in state.items():
            for mu, mult in wmults.items():
                v = add(add(lam, mu), rho)
                red = _dot_reduce(v)
                if red is None:
                    continue
                dom, sign = red
                newlam = tuple(d - p for d, p in zip(dom, rho))
                nxt[newlam] = nxt.get(newlam, 0) + sign * dl * mult
        state = {lam: mlt for lam, mlt in nxt.items() if mlt != 0}
    assert all(mlt > 0 for mlt in state.values())
    return state


# -- component weights and the degree formula --------------------------------

# Component ids:
#   ("psi0",)          the singlet spinor component
#   ("psi", a)         1-form spinor components, a = 1..r
#   ("psi2", a, b)     2-form spinor components, a < b
#   ("psiA", A)        general spinor component, A a tuple subset of 1..r
#   ("v", I)           vector-node tensor component, I a tuple of signed ints
#   ("q1", a)          highest-weight component of node a
#   ("q2", a)          next-to-highest component of node a


def component_weight(r: int, comp) -> Weight:
    kind = comp[0]
    if kind == "psi0":
        return fundamental_weight(r, r)
    if kind == "psi":
        A = (comp[1],)
        return _psi_weight(r, A)
    if kind == "psi2":
        return _psi_weight(r, (comp[1], comp[2]))
    if kind == "psiA":
        return _psi_weight(r, tuple(comp[1]))
    if kind == "v":
        out = [Fraction(0)] * r
        for i in comp[1]:
            if i == 0 or abs(i) > r:
                raise ValueError(f"bad vector index {i}")
            out[abs(i) - 1] += Fraction(1) if i > 0 else Fraction(-1)
        return tuple(out)
    if kind == "q1":
        return fundamental_weight(r, comp[1])
    if kind == "q2":
        alpha = _simple_roots(r)[comp[1] - 1]
        return tuple(w - a for w, a in zip(fundamental_weight(r, comp[1]), alpha))
    raise ValueError(f"unknown component id {comp!r}")


def _psi_weight(r: int, A: Tuple[int, ...]) -> Weight:
    half = Fraction(1, 2)
    return tuple(-half if (a + 1) in A else half for a in range(r))


def _node_of_component(r: int, comp) -> int:
    kind = comp[0]
    if kind in ("psi0",):
        return r
    if kind == "psi":
        return r - 1
    if kind == "psi2":
        return r
    if kind == "psiA":
        return r if len(comp[1]) % 2 == 0 else r - 1
    if kind == "v":
        return len(comp[1])
    if kind in ("q1", "q2"):
        return comp[1]
    raise ValueError(f"unknown component id {comp!r}")


def lambda_max(r: int, drinfeld_degrees: Sequence[int]) -> Weight:
    lam = zero_weight(r)
    for a, deg in enumerate(drinfeld_degrees, start=1):
        if deg:
            lam = add(lam, tuple(c * deg for c in fundamental_weight(r, a)))
    return lam


def magnon_degrees(r: int, drinfeld_degrees: Sequence[int], lam: Weight,
                   components: Iterable = None) -> Dict:
    """Polynomial degrees per component for the sector of highest weight lam.

    deg = (w_node, lam_max + rho) - (gamma_component, lam + rho).  Negative
    values mean the sector cannot host that component; callers treat any
    negative entry as an infeasible sector rather than an error.
    """
    rho = weyl_vector(r)
    lmax = add(lambda_max(r, drinfeld_degrees), rho)
    lrho = add(lam, rho)
    if components is None:
        components = default_components(r)
    out: Dict = {}
    for comp in components:
        node = _node_of_component(r, comp)
        gamma = component_weight(r, comp)
        deg = pair(fundamental_weight(r, node), lmax) - pair(gamma, lrho)
        assert deg.denominator == 1, f"non-integer degree for {comp}"
        out[comp] = int(deg)
    return out


def default_components(r: int):
    comps = [("psi0",)]
    comps += [("psi", a) for a in range(1, r + 1)]
    comps += [("psi2", a, b) for a in range(1, r + 1) for b in range(a + 1, r + 1)]
    comps += [("q1", a) for a in range(1, r + 1)]
    comps += [("q2", a) for a in range(1, r + 1)]
    return comps


def sector_feasible(degrees: Dict) -> bool:
    return all(d >= 0 for d in degrees.values())


# -- gl_r branching for the spinor-family transfer matrices -------------------


def gl_branching(r: int, lam: Weight) -> Dict[Weight, int]:
    """Decompose the so(2r) weight system of L(lam) into gl_r highest weights.

    Works at the level of weight multiplicities: repeatedly strip the
    gl_r-character of the currently largest remaining weight.  Entries of the
    returned keys are weakly decreasing rationals (gl_r highest weights; a
    uniform half-integer shift acts as the U(1) charge).
    """
    remaining = dict(weight_multiplicities(r, lam))
    out: Dict[Weight, int] = {}
    while remaining:
        top = max(remaining)  # lexicographic max is gl-dominant here
        mult = remaining[top]
        assert mult > 0, "branching produced negative multiplicity"
        assert all(top[i] >= top[i + 1] for i in range(r - 1)), "non-dominant gl top"
        out[top] = out.get(top, 0) + mult
        for mu, m in _gl_weight_multiplicities(r, top).items():
            c = remaining.get(mu, 0) - mult * m
            if c:
                remaining[mu] = c
            else:
                remaining.pop(mu, None)
    return out


def _gl_weight_multiplicities(r: int, lam: Weight) -> Dict[Weight, int]:
    """Weight system of the gl_r irrep with highest weight lam (Freudenthal
    on the A_{r-1} root system; the diagonal U(1) tags along untouched)."""
    shift = sum(lam) / r
    base = tuple(c - shift for c in lam)
    rho = tuple(Fraction(r - 1 - 2 * a, 2) for a in range(r))
    pos = []
    for i in range(r):
        for j in range(i + 1, r):
            v = [Fraction(0)] * r
            v[i], v[j] = Fraction(1), Fraction(-1)
            pos.append(tuple(v))
    lrho = add(base, rho)
    c_top = pair(lrho, lrho)
    mults: Dict[Weight, int] = {base: 1}
    frontier = [base]
    simple = []
    for a in range(r - 1):
        v = [Fraction(0)] * r
        v[a], v[a + 1] = Fraction(1), Fraction(-1)
        simple.append(tuple(v))
    scan_cap = 2 * int(sum(abs(c) for c in base)) + 2

    def fr_mult(mu):
        if mu == base:
            return 1
        murho = add(mu, rho)
        denom = c_top - pair(murho, murho)
        if denom <= 0:
            return 0
        total = Fraction(0)
        for al in pos:
            for k in range(1, scan_cap + 1):
                sh = tuple(m + k * a for m, a in zip(mu, al))
                m = mults.get(sh, 0)
                if m:
                    total += 2 * m * pair(sh, al)
        val = total / denom
        assert val.denominator == 1
        return int(val)

    while frontier:
        nxt = set()
        for mu in frontier:
            for al in simple:
                cand = tuple(m - a for m, a in zip(mu, al))
                if cand in mults or cand in nxt:
                    continue
                if fr_mult(cand) > 0:
                    nxt.add(cand)
        for mu in nxt:
            mults[mu] = fr_mult(mu)
        frontier = list(nxt)
    return {tuple(c + shift for c in mu): m for mu, m in mults.items()}
