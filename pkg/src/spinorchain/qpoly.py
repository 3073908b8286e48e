"""Exact univariate polynomial arithmetic with the i/2 shift action.

Coefficients live in the Gaussian rationals (exact path) or in complex
floating point (numeric path).  Everything downstream — Wronskian
determinants, fused powers, rational functions — is built on top of the
two classes here.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "GaussianRational",
    "GR_ZERO",
    "GR_ONE",
    "GR_I",
    "ShiftedPolynomial",
    "RationalFunction",
    "wronskian",
    "fused_power",
    "fused_sum",
    "det_ring",
    "parse_gaussian",
]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot build Fraction from {x!r}")


class GaussianRational:
    """Element of Q(i): exact real and imaginary rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _as_fraction(re)
        self.im = _as_fraction(im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        if isinstance(other, (complex, float)):
            return self.to_complex() + other
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, (complex, float)):
            return self.to_complex() - other
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        if isinstance(other, (complex, float)):
            return other - self.to_complex()
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (complex, float)):
            return self.to_complex() * other
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (complex, float)):
            return self.to_complex() / other
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        n = other.re * other.re + other.im * other.im
        if not n:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        if isinstance(other, (complex, float)):
            return other / self.to_complex()
        other = _coerce_gr(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * float(self.im)

    def is_rational(self) -> bool:
        return not self.im

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"

    def serialize(self) -> list[str]:
        return [str(self.re), str(self.im)]

    @classmethod
    def deserialize(cls, pair) -> "GaussianRational":
        return cls(Fraction(pair[0]), Fraction(pair[1]))


def _coerce_gr(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    return NotImplemented


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)


def parse_gaussian(text) -> GaussianRational:
    """Parse '3/2', '-1/3', 'i*1/2', '3/2+i*1/2', '3/2-i*1/2' into Q(i)."""
    if isinstance(text, GaussianRational):
        return text
    if isinstance(text, (int, Fraction)):
        return GaussianRational(text)
    if isinstance(text, float):
        return GaussianRational(Fraction(text).limit_denominator(10**12))
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty inhomogeneity string")
    # split into real and imaginary summands at top-level +/-
    parts = []
    start = 0
    for k in range(1, len(s)):
        if s[k] in "+-" and s[k - 1] not in "+-*/":
            parts.append(s[start:k])
            start = k
    parts.append(s[start:])
    re = Fraction(0)
    im = Fraction(0)
    for p in parts:
        sign = 1
        while p and p[0] in "+-":
            if p[0] == "-":
                sign = -sign
            p = p[1:]
        if p.startswith("i*"):
            im += sign * Fraction(p[2:])
        elif p.endswith("*i"):
            im += sign * Fraction(p[:-2])
        elif p == "i":
            im += sign
        else:
            re += sign * Fraction(p)
    return GaussianRational(re, im)


class ShiftedPolynomial:
    """Dense univariate polynomial supporting the p(u) -> p(u + i/2 k) action.

    ``coeffs[d]`` is the coefficient of u**d.  Trailing zeros are trimmed, so
    the zero polynomial has an empty coefficient list.  Coefficients may be
    GaussianRational (exact) or complex/mpc (numeric); modules that need a
    symbolic coefficient ring reuse the same layout through duck typing.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = cs

    # -- constructors ----------------------------------------------------

    @classmethod
    def constant(cls, c) -> "ShiftedPolynomial":
        return cls([c])

    @classmethod
    def variable(cls) -> "ShiftedPolynomial":
        return cls([GR_ZERO, GR_ONE])

    @classmethod
    def monic_from_roots(cls, roots: Iterable) -> "ShiftedPolynomial":
        p = cls([GR_ONE])
        for t in roots:
            p = p * cls([-t, GR_ONE if isinstance(t, GaussianRational) else 1.0 + 0j])
        return p

    # -- basic structure -------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def lead(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, d: int):
        if 0 <= d < len(self.coeffs):
            return self.coeffs[d]
        return GR_ZERO

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == GR_ONE

    def __eq__(self, other):
        if isinstance(other, ShiftedPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.coeffs))

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ShiftedPolynomial):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return ShiftedPolynomial(out)

    def __neg__(self):
        return ShiftedPolynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, ShiftedPolynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ShiftedPolynomial):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return ShiftedPolynomial()
            out = [GR_ZERO] * (len(a) + len(b) - 1)
            for j, aj in enumerate(a):
                if not aj:
                    continue
                for k, bk in enumerate(b):
                    if not bk:
                        continue
                    cur = out[j + k]
                    out[j + k] = aj * bk if not cur else cur + aj * bk
            return ShiftedPolynomial(out)
        # scalar
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, s) -> "ShiftedPolynomial":
        return ShiftedPolynomial([c * s for c in self.coeffs])

    def monic(self) -> "ShiftedPolynomial":
        if not self.coeffs:
            return self
        inv = _invert_scalar(self.lead())
        return self.scale(inv)

    # -- the shift action --------------------------------------------------

    def shift(self, k: int) -> "ShiftedPolynomial":
        """Return p(u + (i/2) k), expanded exactly (Taylor shift by Horner)."""
        if k == 0 or not self.coeffs:
            return self
        c = self._half_i_times(k)
        # Horner composition with (u + c)
        out: list = [self.coeffs[-1]]
        for d in range(len(self.coeffs) - 2, -1, -1):
            nxt = [self.coeffs[d]] + out
            for j in range(len(out)):
                nxt[j] = nxt[j] + out[j] * c
            out = nxt
        return ShiftedPolynomial(out)

    def _half_i_times(self, k: int):
        probe = self.coeffs[-1]
        if isinstance(probe, GaussianRational):
            return GaussianRational(0, Fraction(k, 2))
        if isinstance(probe, complex):
            return 0.5j * k
        # mpmath or symbolic coefficient rings provide their own hook
        hook = getattr(probe, "half_i_shift", None)
        if hook is not None:
            return hook(k)
        try:
            import mpmath

            if isinstance(probe, mpmath.mpc) or isinstance(probe, mpmath.mpf):
                return mpmath.mpc(0, mpmath.mpf(k) / 2)
        except ImportError:
            pass
        raise TypeError(f"no i/2-shift constant for coefficients of type {type(probe)}")

    # -- division ----------------------------------------------------------

    def divrem(self, den: "ShiftedPolynomial"):
        """Exact (quotient, remainder) with deg(remainder) < deg(den)."""
        if den.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        num = list(self.coeffs)
        d = den.degree
        lead_inv = _invert_scalar(den.lead())
        q = [GR_ZERO] * max(0, len(num) - d)
        for top in range(len(num) - 1, d - 1, -1):
            c = num[top]
            if not c:
                continue
            f = c * lead_inv
            q[top - d] = f
            for j, dc in enumerate(den.coeffs):
                num[top - d + j] = num[top - d + j] - f * dc
        return ShiftedPolynomial(q), ShiftedPolynomial(num[:d])

    def exact_div(self, den: "ShiftedPolynomial") -> "ShiftedPolynomial":
        q, r = self.divrem(den)
        if not r.is_zero():
            raise ArithmeticError("division was not exact")
        return q

    def gcd(self, other: "ShiftedPolynomial") -> "ShiftedPolynomial":
        """Monic gcd over the exact coefficient field."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divrem(b)[1]
        return a.monic() if not a.is_zero() else a

    def derivative(self) -> "ShiftedPolynomial":
        return ShiftedPolynomial(
            [c * k for k, c in enumerate(self.coeffs)][1:]
        )

    # -- evaluation / conversion -------------------------------------------

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Horner evaluation; works for complex, mpc, GaussianRational."""
        if not self.coeffs:
            return 0 * z if not isinstance(z, GaussianRational) else GR_ZERO
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z + c
        return acc

    def to_complex(self) -> "ShiftedPolynomial":
        return ShiftedPolynomial(
            [c.to_complex() if isinstance(c, GaussianRational) else complex(c) for c in self.coeffs]
        )

    def conjugate_coeffs(self) -> "ShiftedPolynomial":
        return ShiftedPolynomial([c.conjugate() for c in self.coeffs])

    def max_abs(self) -> float:
        if not self.coeffs:
            return 0.0
        return max(abs(_to_builtin_complex(c)) for c in self.coeffs)

    def trim(self, tol: float) -> "ShiftedPolynomial":
        """Drop trailing coefficients of magnitude <= tol (numeric path)."""
        cs = list(self.coeffs)
        while cs and abs(_to_builtin_complex(cs[-1])) <= tol:
            cs.pop()
        return ShiftedPolynomial(cs)

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for d in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[d]
            if not c:
                continue
            base = "" if d == 0 else ("u" if d == 1 else f"u^{d}")
            terms.append(f"({c!r}){base}" if base else f"({c!r})")
        return "Poly(" + " + ".join(terms) + ")"

    # -- serialization -----------------------------------------------------

    def serialize(self) -> list:
        out = []
        for c in self.coeffs:
            if isinstance(c, GaussianRational):
                out.append(c.serialize())
            else:
                z = _to_builtin_complex(c)
                out.append([repr(z.real), repr(z.imag)])
        return out

    @classmethod
    def deserialize(cls, data, exact: bool = True) -> "ShiftedPolynomial":
        if exact:
            return cls([GaussianRational.deserialize(p) for p in data])
        return cls([float(p[0]) + 1j * float(p[1]) for p in data])


def _invert_scalar(c):
    if isinstance(c, GaussianRational):
        return GR_ONE / c
    if isinstance(c, (complex, float)):
        return 1.0 / c
    hook = getattr(c, "inverse", None)
    if hook is not None:
        return hook()
    return c ** (-1)


def _to_builtin_complex(c) -> complex:
    if isinstance(c, GaussianRational):
        return c.to_complex()
    return complex(c)


ZERO_POLY = ShiftedPolynomial()
ONE_POLY = ShiftedPolynomial([GR_ONE])
U_POLY = ShiftedPolynomial.variable()


# -- shift-covariant operations on any ring element ------------------------
#
# The functions below only use +, -, *, and .shift(k); they therefore work
# uniformly for ShiftedPolynomial, RationalFunction, lattice samples and
# tagged values.


def fused_power(p, n: int):
    """prod_{k=1..n} p^[n+1-2k]; n = 0 gives the multiplicative unit."""
    if n < 0:
        raise ValueError("fused power needs n >= 0")
    if n == 0:
        return _ring_one(p)
    acc = None
    for k in range(1, n + 1):
        t = p.shift(n + 1 - 2 * k)
        acc = t if acc is None else acc * t
    return acc


def fused_sum(p, n: int):
    """sum_{k=1..n} p^[n+1-2k]; the additive analog of the fused power."""
    if n <= 0:
        raise ValueError("fused sum needs n >= 1")
    acc = None
    for k in range(1, n + 1):
        t = p.shift(n + 1 - 2 * k)
        acc = t if acc is None else acc + t
    return acc


def wronskian(ps: Sequence):
    """Finite-difference Wronskian: det over a,b of ps[b]^[k+1-2a].

    Exact polynomial entries go through fraction-free elimination, which
    keeps intermediate coefficient growth under control; any other ring
    uses Laplace expansion.
    """
    k = len(ps)
    if k == 0:
        raise ValueError("wronskian of empty list")
    if k == 1:
        return ps[0]
    rows = [[p.shift(k + 1 - 2 * a) for p in ps] for a in range(1, k + 1)]
    if k >= 4 and all(isinstance(p, ShiftedPolynomial) and _poly_is_exact(p) for p in ps):
        return det_bareiss(rows)
    return det_ring(rows)


def det_ring(rows) -> object:
    """Determinant over a commutative ring, by Laplace expansion with
    memoized minors on column subsets.  Fine for the ranks used here."""
    n = len(rows)
    cols = tuple(range(n))
    memo: dict = {}

    def minor(row: int, colset: tuple):
        if row == n:
            return None  # empty product sentinel
        key = colset
        if key in memo:
            return memo[key]
        acc = None
        for j, c in enumerate(colset):
            entry = rows[row][c]
            sub = minor(row + 1, colset[:j] + colset[j + 1 :])
            term = entry if sub is None else entry * sub
            if acc is None:
                acc = term if j % 2 == 0 else -term
            else:
                acc = acc + term if j % 2 == 0 else acc - term
        memo[key] = acc
        return acc

    return minor(0, cols)


def det_bareiss(rows: Sequence[Sequence[ShiftedPolynomial]]) -> ShiftedPolynomial:
    """Fraction-free determinant for exact polynomial matrices.

    Controls intermediate coefficient growth better than expansion when the
    entries are large exact polynomials; divisions are exact by construction.
    """
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    prev = ONE_POLY
    for k in range(n - 1):
        if m[k][k].is_zero():
            for s in range(k + 1, n):
                if not m[s][k].is_zero():
                    m[k], m[s] = m[s], m[k]
                    sign = -sign
                    break
            else:
                return ZERO_POLY
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev)
        prev = m[k][k]
    out = m[n - 1][n - 1]
    return out if sign == 1 else -out


def _ring_one(p):
    one = getattr(p, "ring_one", None)
    if one is not None:
        return one()
    if isinstance(p, ShiftedPolynomial):
        probe = p.coeffs[-1] if p.coeffs else GR_ONE
        if isinstance(probe, GaussianRational):
            return ONE_POLY
        return ShiftedPolynomial([_one_like(probe)])
    raise TypeError(f"no unit element for {type(p)}")


def _one_like(c):
    if isinstance(c, GaussianRational):
        return GR_ONE
    if isinstance(c, complex):
        return 1.0 + 0j
    hook = getattr(c, "ring_one", None)
    if hook is not None:
        return hook()
    return c / c


class RationalFunction:
    """Quotient of two ShiftedPolynomials.

    Exact coefficients: reduced by gcd and kept with monic denominator, so
    equality is literal equality of the canonical form.  Numeric
    coefficients: no reduction, comparisons go through sampling.
    """

    __slots__ = ("num", "den", "exact")

    def __init__(self, num: ShiftedPolynomial, den: ShiftedPolynomial = ONE_POLY, reduce=None):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        exact = _poly_is_exact(num) and _poly_is_exact(den)
        if reduce is None:
            reduce = exact
        if reduce and exact:
            if num.is_zero():
                den = ONE_POLY
            else:
                g = num.gcd(den)
                if g.degree > 0:
                    num = num.exact_div(g)
                    den = den.exact_div(g)
                lead_inv = GR_ONE / den.lead()
                num = num.scale(lead_inv)
                den = den.scale(lead_inv)
        self.num = num
        self.den = den
        self.exact = exact

    @classmethod
    def from_scalar(cls, c) -> "RationalFunction":
        return cls(ShiftedPolynomial([c]))

    def ring_one(self) -> "RationalFunction":
        probe = (self.num.coeffs or self.den.coeffs)[-1]
        return RationalFunction(ShiftedPolynomial([_one_like(probe)]))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        other = self._coerce(other)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, ShiftedPolynomial):
            return RationalFunction(other)
        return RationalFunction(ShiftedPolynomial([other]))

    def shift(self, k: int) -> "RationalFunction":
        return RationalFunction(self.num.shift(k), self.den.shift(k), reduce=False)

    def eval(self, z):
        return self.num.eval(z) / self.den.eval(z)

    def is_polynomial(self) -> bool:
        if not self.exact:
            raise TypeError("polynomiality test requires exact coefficients")
        return self.den.degree == 0

    def as_polynomial(self) -> ShiftedPolynomial:
        if self.den.degree == 0:
            return self.num.scale(_invert_scalar(self.den.coeffs[0]))
        num, rem = self.num.divrem(self.den)
        if not rem.is_zero():
            raise ArithmeticError("rational function is not polynomial")
        return num

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if self.exact and other.exact:
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __repr__(self):
        if self.den.degree == 0 and self.den.coeffs and self.den.coeffs[0] == GR_ONE:
            return f"Rat({self.num!r})"
        return f"Rat({self.num!r} / {self.den!r})"


def _poly_is_exact(p: ShiftedPolynomial) -> bool:
    return all(isinstance(c, GaussianRational) for c in p.coeffs)
