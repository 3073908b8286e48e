"""Exterior-algebra realization of Dirac spinors and gamma matrices.

A spinor is a coefficient table over subsets of {1..r}; gamma matrices with
upper index wedge a generator, lower index contract one, and the
anti-diagonal metric pairs a with -a.  Coefficients are generic: exact
scalars, polynomials, rational functions, lattice samples or tagged values
all work, as long as they support +, -, * and scaling.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Dict, Iterable, Sequence, Tuple

from .qpoly import GR_ONE, GaussianRational

Subset = Tuple[int, ...]

__all__ = [
    "ExteriorElement",
    "canonical_signed",
    "perm_sign",
    "eps_complement",
    "gamma_apply",
    "gamma_multi",
    "chirality",
    "charge_conjugate",
    "bilinear",
    "dot",
    "weyl_representative",
    "operator_matrix",
    "charge_matrix",
    "vector_action",
    "WeylRepresentative",
]


# -- index bookkeeping --------------------------------------------------------


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting seq ascending; 0 on repeats."""
    s = list(seq)
    sign = 1
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] == s[j]:
                return 0
            if s[i] > s[j]:
                s[i], s[j] = s[j], s[i]
                sign = -sign
    return sign


def canonical_signed(seq: Sequence[int], r: int) -> tuple[Subset, int]:
    """Sort a signed multi-index into the order 1..r, -r..-1, with sign."""
    key = lambda i: i if i > 0 else 2 * r + 1 + i
    order = sorted(range(len(seq)), key=lambda k: key(seq[k]))
    sign = perm_sign([key(i) for i in seq])
    return tuple(seq[k] for k in order), sign


def eps_complement(A: Subset, r: int) -> tuple[Subset, int]:
    """Complement of A in {1..r} and the Levi-Civita sign eps^{A,comp}."""
    comp = tuple(b for b in range(1, r + 1) if b not in A)
    return comp, perm_sign(list(A) + list(comp))


def _merge_sign(A: Subset, B: Subset):
    """Concatenate two ascending disjoint subsets; None if they overlap."""
    out = []
    i = j = 0
    sign = 1
    while i < len(A) and j < len(B):
        if A[i] == B[j]:
            return None, 0
        if A[i] < B[j]:
            out.append(A[i])
            i += 1
        else:
            # B[j] jumps over the remaining entries of A
            if (len(A) - i) % 2 == 1:
                sign = -sign
            out.append(B[j])
            j += 1
    out.extend(A[i:])
    out.extend(B[j:])
    return tuple(out), sign


# -- generic coefficient helpers ---------------------------------------------


def gscale(c, g: GaussianRational):
    """Multiply a generic coefficient by an exact Gaussian-rational scalar."""
    if isinstance(c, GaussianRational):
        return c * g
    if isinstance(c, (complex, float)):
        return c * g.to_complex()
    hook = getattr(c, "scale_gaussian", None)
    if hook is not None:
        return hook(g)
    # ShiftedPolynomial / RationalFunction multiply by their own scalar kind
    from .qpoly import RationalFunction, ShiftedPolynomial

    if isinstance(c, ShiftedPolynomial):
        probe = c.coeffs[-1] if c.coeffs else None
        s = g if isinstance(probe, GaussianRational) or probe is None else g.to_complex()
        return c.scale(s)
    if isinstance(c, RationalFunction):
        probe = (c.num.coeffs or c.den.coeffs)[-1]
        s = g if isinstance(probe, GaussianRational) else g.to_complex()
        return c * RationalFunction.from_scalar(s)
    raise TypeError(f"cannot scale {type(c)} by GaussianRational")


def _definitely_zero(c) -> bool:
    if isinstance(c, GaussianRational):
        return not c
    if isinstance(c, (complex, float, int)):
        return c == 0
    probe = getattr(c, "is_exact_zero", None)
    if probe is not None:
        return probe()
    from .qpoly import RationalFunction, ShiftedPolynomial

    if isinstance(c, ShiftedPolynomial):
        return c.is_zero()
    if isinstance(c, RationalFunction):
        return c.num.is_zero()
    return False


class ExteriorElement:
    """Sparse coefficient table over ascending subsets of {1..r}."""

    __slots__ = ("r", "comps")

    def __init__(self, r: int, comps: Dict[Subset, object] | None = None):
        self.r = r
        self.comps = {}
        if comps:
            for A, c in comps.items():
                if not _definitely_zero(c):
                    self.comps[tuple(A)] = c

    @classmethod
    def basis(cls, r: int, A: Iterable[int], coeff=GR_ONE) -> "ExteriorElement":
        return cls(r, {tuple(sorted(A)): coeff})

    def __add__(self, other: "ExteriorElement") -> "ExteriorElement":
        out = dict(self.comps)
        for A, c in other.comps.items():
            out[A] = out[A] + c if A in out else c
        return ExteriorElement(self.r, out)

    def __sub__(self, other: "ExteriorElement") -> "ExteriorElement":
        return self + other.scaled(GaussianRational(-1))

    def __neg__(self):
        return self.scaled(GaussianRational(-1))

    def scaled(self, g: GaussianRational) -> "ExteriorElement":
        return ExteriorElement(self.r, {A: gscale(c, g) for A, c in self.comps.items()})

    def map_coeffs(self, f: Callable) -> "ExteriorElement":
        return ExteriorElement(self.r, {A: f(c) for A, c in self.comps.items()})

    def times(self, scalar) -> "ExteriorElement":
        """Multiply every component by a ring scalar (same ring as coeffs)."""
        return ExteriorElement(self.r, {A: c * scalar for A, c in self.comps.items()})

    def shift(self, k: int) -> "ExteriorElement":
        return ExteriorElement(self.r, {A: c.shift(k) for A, c in self.comps.items()})

    def wedge(self, other: "ExteriorElement") -> "ExteriorElement":
        out: Dict[Subset, object] = {}
        for A, a in self.comps.items():
            for B, b in other.comps.items():
                M, sign = _merge_sign(A, B)
                if M is None:
                    continue
                term = a * b
                if sign < 0:
                    term = gscale(term, GaussianRational(-1))
                out[M] = out[M] + term if M in out else term
        return ExteriorElement(self.r, out)

    def wedge_power(self, n: int) -> "ExteriorElement":
        acc = None
        for _ in range(n):
            acc = self if acc is None else acc.wedge(self)
        if acc is None:
            raise ValueError("wedge_power needs n >= 1")
        return acc

    def grade(self, k: int) -> "ExteriorElement":
        return ExteriorElement(self.r, {A: c for A, c in self.comps.items() if len(A) == k})

    def component(self, A: Iterable[int], default=None):
        return self.comps.get(tuple(sorted(A)), default)

    def is_empty(self) -> bool:
        return not self.comps

    def __repr__(self):
        items = ", ".join(f"{A}: {c!r}" for A, c in sorted(self.comps.items()))
        return f"Ext(r={self.r}, {{{items}}})"

    def debug_dump(self) -> dict:
        return {"".join(map(str, A)): repr(c) for A, c in sorted(self.comps.items())}


# -- gamma matrix actions -----------------------------------------------------


def gamma_apply(i: int, psi: ExteriorElement) -> ExteriorElement:
    """Gamma with a signed vector index: +a wedges theta^a, -a contracts."""
    if i == 0 or abs(i) > psi.r:
        raise ValueError(f"gamma index {i} out of range for rank {psi.r}")
    out: Dict[Subset, object] = {}
    if i > 0:
        for A, c in psi.comps.items():
            M, sign = _merge_sign((i,), A)
            if M is None:
                continue
            term = c if sign > 0 else gscale(c, GaussianRational(-1))
            out[M] = out[M] + term if M in out else term
    else:
        a = -i
        for A, c in psi.comps.items():
            if a not in A:
                continue
            pos = A.index(a)
            B = A[:pos] + A[pos + 1 :]
            term = c if pos % 2 == 0 else gscale(c, GaussianRational(-1))
            out[B] = out[B] + term if B in out else term
    return ExteriorElement(psi.r, out)


def gamma_word(indices: Sequence[int], psi: ExteriorElement) -> ExteriorElement:
    """Plain ordered product Gamma^{i_1} ... Gamma^{i_k} acting on psi."""
    for i in reversed(indices):
        psi = gamma_apply(i, psi)
    return psi


def gamma_multi(I: Sequence[int], psi: ExteriorElement) -> ExteriorElement:
    """Antisymmetrized Gamma^I.

    When the absolute values in I are pairwise distinct the factors
    anticommute, so the ordered word already is antisymmetric; otherwise
    average over permutations with signs.
    """
    if len(I) == 0:
        return psi
    if len({abs(i) for i in I}) == len(I):
        return gamma_word(I, psi)
    acc = None
    for perm in itertools.permutations(range(len(I))):
        sign = perm_sign(perm)
        term = gamma_word([I[k] for k in perm], psi)
        term = term.scaled(GaussianRational(sign))
        acc = term if acc is None else acc + term
    fact = 1
    for k in range(2, len(I) + 1):
        fact *= k
    return acc.scaled(GaussianRational(Fraction(1, fact)))


def chirality(sign: int, psi: ExteriorElement) -> ExteriorElement:
    """Projector onto even (+1) or odd (-1) form ranks."""
    want = 0 if sign > 0 else 1
    return ExteriorElement(
        psi.r, {A: c for A, c in psi.comps.items() if len(A) % 2 == want}
    )


def charge_conjugate(psi: ExteriorElement) -> ExteriorElement:
    """C theta^A = (-1)^{(r-|A|)(r-|A|-1)/2} eps^{A,comp} theta^{comp}."""
    r = psi.r
    out: Dict[Subset, object] = {}
    for A, c in psi.comps.items():
        comp, eps = eps_complement(A, r)
        m = r - len(A)
        sign = eps * (-1) ** ((m * (m - 1)) // 2)
        out[comp] = c if sign > 0 else gscale(c, GaussianRational(-1))
    return ExteriorElement(r, out)


def dot(psi1: ExteriorElement, psi2: ExteriorElement):
    """Row-times-column pairing: sum over subsets of componentwise products."""
    acc = None
    for A, c in psi1.comps.items():
        d = psi2.comps.get(A)
        if d is None:
            continue
        term = c * d
        acc = term if acc is None else acc + term
    return acc


def bilinear(psi1: ExteriorElement, I: Sequence[int], chir, psi2: ExteriorElement):
    """psi1 C Gamma^I [Gamma^{+-}] psi2 as a single coefficient-ring scalar.

    chir is +1, -1 or None.  Returns None when the contraction is empty
    (the exact zero of whatever ring the coefficients live in).
    """
    x = psi2 if chir is None else chirality(chir, psi2)
    x = gamma_multi(list(I), x)
    x = charge_conjugate(x)
    return dot(psi1, x)


# -- Weyl representatives -----------------------------------------------------


class WeylRepresentative:
    """A Pin(2r) representative: a spinor operator plus its vector action."""

    def __init__(self, r: int, op: Callable[[ExteriorElement], ExteriorElement], label: str):
        self.r = r
        self.op = op
        self.label = label

    def __call__(self, psi: ExteriorElement) -> ExteriorElement:
        return self.op(psi)

    def matrix(self):
        return operator_matrix(self.op, self.r)

    def vector_matrix(self):
        return vector_action(self.op, self.r)

    def apply_vector_components(self, table: Dict[int, object]) -> Dict[int, object]:
        """Transform a table {signed index: value} by the vector action.

        Values transform contravariantly: new V^i = O^i_j V^j.
        """
        O = self.vector_matrix()
        idx = _signed_indices(self.r)
        out: Dict[int, object] = {}
        for ii, i in enumerate(idx):
            acc = None
            for jj, j in enumerate(idx):
                g = O[ii][jj]
                if not g:
                    continue
                v = table.get(j)
                if v is None:
                    raise KeyError(f"vector component {j} missing")
                term = gscale(v, g)
                acc = term if acc is None else acc + term
            if acc is not None:
                out[i] = acc
        return out


def weyl_representative(kind: str, indices: Sequence[int], r: int) -> WeylRepresentative:
    """Build a named representative.

    kinds: 's_ab-A' (index swap, first prescription), 's_ab-B' (symmetric
    prescription), 's_a' (sign flip), 'elementary' (Chevalley-generator
    reflection for a simple root).
    """
    if kind == "s_ab-A":
        a, b = indices

        def op(psi, a=a, b=b):
            t1 = gamma_word([b, -a], psi)
            t2 = gamma_word([a, -b], psi)
            t3 = gamma_word([b, a, -a, -b], psi)
            t4 = gamma_word([-a, -b, b, a], psi)
            return t1 - t2 + t3 + t4

        return WeylRepresentative(r, op, f"s_{a}{b}-A")
    if kind == "s_ab-B":
        a, b = indices

        def op(psi, a=a, b=b):
            t1 = gamma_word([a, -b], psi)
            t2 = gamma_word([b, -a], psi)
            t3 = gamma_word([a, b, -a, -b], psi)
            t4 = gamma_word([-a, -b, b, a], psi)
            return (t1 + t2 + t3 + t4).scaled(GaussianRational(0, 1))

        return WeylRepresentative(r, op, f"s_{a}{b}-B")
    if kind == "s_a":
        (a,) = indices

        def op(psi, a=a):
            x = gamma_apply(-a, psi) - gamma_apply(a, psi)
            # (-1)^N grading sign
            return ExteriorElement(
                psi.r,
                {
                    A: (c if len(A) % 2 == 0 else gscale(c, GaussianRational(-1)))
                    for A, c in x.comps.items()
                },
            )

        return WeylRepresentative(r, op, f"s_{a}-flip")
    if kind == "elementary":
        (a,) = indices
        if a < r:
            e = [(1, (a + 1,), (a,))]  # theta^{a+1} d_a
            f = [(1, (a,), (a + 1,))]
        else:
            e = [(2, (), (r, r - 1))]  # d_r d_{r-1}
            f = [(3, (r - 1, r), ())]  # theta^{r-1} theta^r

        def quad(psi, spec):
            code, up, down = spec[0]
            x = psi
            for d in reversed(down):
                x = gamma_apply(-d, x)
            for u in reversed(up):
                x = gamma_apply(u, x)
            return x

        def op(psi, e=e, f=f):
            def expo(x, gen, sgn):
                step = quad(x, gen)
                if sgn < 0:
                    step = -step
                return x + step  # generators square to zero here

            x = expo(psi, e, +1)
            x = expo(x, f, -1)
            x = expo(x, e, +1)
            return x

        return WeylRepresentative(r, op, f"s_{a}-elementary")
    raise ValueError(f"unknown Weyl representative kind {kind!r}")


# -- exact matrices over Q(i) for the symmetry checks -------------------------


def _subsets(r: int):
    out = []
    for k in range(r + 1):
        out.extend(itertools.combinations(range(1, r + 1), k))
    return out


def _signed_indices(r: int):
    return list(range(1, r + 1)) + [-i for i in range(r, 0, -1)]


def operator_matrix(op, r: int):
    """Exact matrix of a spinor operator in the subset basis."""
    basis = _subsets(r)
    pos = {A: k for k, A in enumerate(basis)}
    n = len(basis)
    M = [[GaussianRational(0)] * n for _ in range(n)]
    for j, A in enumerate(basis):
        img = op(ExteriorElement.basis(r, A))
        for B, c in img.comps.items():
            M[pos[B]][j] = c
    return M


def charge_matrix(r: int):
    return operator_matrix(charge_conjugate, r)


def gamma_matrix(i: int, r: int):
    return operator_matrix(lambda p: gamma_apply(i, p), r)


def mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    out = [[GaussianRational(0)] * p for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        for k in range(m):
            a = Ai[k]
            if not a:
                continue
            Bk = B[k]
            row = out[i]
            for j in range(p):
                b = Bk[j]
                if b:
                    row[j] = row[j] + a * b
    return out


def mat_transpose(A):
    return [list(col) for col in zip(*A)]


def mat_eq(A, B) -> bool:
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def mat_inverse(A):
    n = len(A)
    aug = [list(row) + [GaussianRational(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(A)]
    for col in range(n):
        piv = next((k for k in range(col, n) if aug[k][col]), None)
        if piv is None:
            raise ArithmeticError("singular representative matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = GR_ONE / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for k in range(n):
            if k != col and aug[k][col]:
                f = aug[k][col]
                aug[k] = [x - f * y for x, y in zip(aug[k], aug[col])]
    return [row[n:] for row in aug]


def vector_action(op, r: int):
    """Matrix O with U^{-1} Gamma^i U = O^i_j Gamma^j (exact solve)."""
    U = operator_matrix(op, r)
    Uinv = mat_inverse(U)
    idx = _signed_indices(r)
    gammas = {i: gamma_matrix(i, r) for i in idx}
    n = len(U)
    O = []
    for i in idx:
        X = mat_mul(mat_mul(Uinv, gammas[i]), U)
        # solve X = sum_j c_j Gamma^j entrywise; the Gamma^j have disjoint
        # supports on distinct (row, col) pairs except for +-a pairs, so a
        # straightforward exact least-squares-by-pivoting works
        coeffs = _solve_gamma_combination(X, [gammas[j] for j in idx], n)
        O.append(coeffs)
    return O


def _solve_gamma_combination(X, gams, n):
    cells = {}
    for j, G in enumerate(gams):
        for p in range(n):
            for q in range(n):
                if G[p][q]:
                    cells.setdefault((p, q), []).append((j, G[p][q]))
    coeffs = [GaussianRational(0)] * len(gams)
    solved = [False] * len(gams)
    # repeatedly peel off coefficients from cells hit by a single unknown
    progress = True
    residual = {cell: X[cell[0]][cell[1]] for cell in cells}
    for p in range(n):
        for q in range(n):
            if (p, q) not in cells and X[p][q]:
                raise ArithmeticError("operator is not in the span of gammas")
    while progress:
        progress = False
        for cell, entries in cells.items():
            open_entries = [(j, g) for j, g in entries if not solved[j]]
            if len(open_entries) == 1:
                j, g = open_entries[0]
                val = residual[cell]
                coeffs[j] = val / g
                solved[j] = True
                progress = True
                for c2, entries2 in cells.items():
                    for j2, g2 in entries2:
                        if j2 == j:
                            residual[c2] = residual[c2] - coeffs[j] * g2
    if not all(solved):
        raise ArithmeticError("could not isolate gamma coefficients")
    for cell, val in residual.items():
        if val:
            raise ArithmeticError("operator is not a linear combination of gammas")
    return coeffs
