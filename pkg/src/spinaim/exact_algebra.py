"""Exact bivariate polynomial and rational-function arithmetic in (z, E).

The scalar type is an exact rational with arbitrary-precision integer
numerator and positive denominator, always reduced.  gmpy2's mpq is used
when available (5-10x faster on deep recursions); fractions.Fraction is
the fallback.  Both satisfy the reduced/positive-denominator invariants
by construction.

Layered on top:

  BiPoly   -- polynomial in z (coordinate) and E (energy), exact coeffs
  RatFunc  -- BiPoly numerator over an E-free (z-only) BiPoly denominator,
              kept in a canonical form suitable for evaluation at z = 0
  UniPolyE -- univariate polynomial in E with float coefficients, the
              bridge to numeric root finding

Floats enter only at root extraction; everything upstream is exact.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as Rat

__all__ = [
    "Rat",
    "rat",
    "BiPoly",
    "RatFunc",
    "UniPolyE",
    "ZeroPolynomial",
    "DegreeZero",
    "bipoly_arith",
    "bipoly_derive_z",
    "ratfunc_arith",
    "ratfunc_derive_z",
    "ratfunc_eval_numer_at",
    "poly_real_roots",
]

_ZERO = Rat(0)
_ONE = Rat(1)


def rat(x) -> Rat:
    """Coerce x to the exact rational scalar.

    Accepts Rat, int, and strings: 'p/q', integers, or decimal literals
    (decimals are parsed exactly in base 10, so '0.1' becomes 1/10).
    Floats are rejected: their binary value rarely matches the decimal
    the caller had in mind, and exactness is the whole point here.
    """
    if isinstance(x, Rat):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational scalar")
    if isinstance(x, int):
        return Rat(x)
    if isinstance(x, str):
        try:
            return Rat(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse {x!r} as a rational") from exc
    if isinstance(x, float):
        raise TypeError(
            f"refusing float {x!r}: pass a string or rational for exact input"
        )
    try:
        return Rat(x)  # fractions.Fraction and friends
    except TypeError as exc:
        raise TypeError(f"cannot convert {type(x).__name__} to rational") from exc


class ZeroPolynomial(ValueError):
    """Root finding was asked for the zero polynomial."""


class DegreeZero(ValueError):
    """Root finding was asked for a nonzero constant (no roots)."""


# ---------------------------------------------------------------------------
# BiPoly


class BiPoly:
    """Exact polynomial in (z, E): sparse map (deg_z, deg_E) -> coefficient.

    Instances are immutable by convention; every operation returns a new
    object and zero coefficients are never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean: dict[tuple[int, int], Rat] = {}
        if terms:
            for (dz, de), coeff in terms.items():
                q = coeff if isinstance(coeff, Rat) else rat(coeff)
                if q != 0:
                    if dz < 0 or de < 0:
                        raise ValueError("negative exponent in BiPoly")
                    clean[(int(dz), int(de))] = q
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): rat(c)})

    @classmethod
    def z(cls) -> "BiPoly":
        return cls({(1, 0): _ONE})

    @classmethod
    def E(cls) -> "BiPoly":
        return cls({(0, 1): _ONE})

    @classmethod
    def linear(cls, *, z=0, E=0, const=0) -> "BiPoly":
        """Shorthand for z*z_coeff + E*E_coeff + const."""
        return cls({(1, 0): rat(z), (0, 1): rat(E), (0, 0): rat(const)})

    # -- predicates ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def deg_z(self) -> int:
        return max((k[0] for k in self.terms), default=0)

    @property
    def deg_E(self) -> int:
        return max((k[1] for k in self.terms), default=0)

    @property
    def is_E_free(self) -> bool:
        return all(k[1] == 0 for k in self.terms)

    @property
    def affine_in_E(self) -> bool:
        return all(k[1] <= 1 for k in self.terms)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            s = out.get(key, _ZERO) + coeff
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        res = BiPoly.__new__(BiPoly)
        res.terms = out
        return res

    def __neg__(self) -> "BiPoly":
        res = BiPoly.__new__(BiPoly)
        res.terms = {k: -c for k, c in self.terms.items()}
        return res

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other: "BiPoly") -> "BiPoly":
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[tuple[int, int], Rat] = {}
        for (dz1, de1), c1 in a.items():
            for (dz2, de2), c2 in b.items():
                key = (dz1 + dz2, de1 + de2)
                s = out.get(key, _ZERO) + c1 * c2
                if s == 0:
                    out.pop(key, None)
                else:
                    out[key] = s
        res = BiPoly.__new__(BiPoly)
        res.terms = out
        return res

    def scale(self, c) -> "BiPoly":
        q = c if isinstance(c, Rat) else rat(c)
        if q == 0:
            return BiPoly()
        res = BiPoly.__new__(BiPoly)
        res.terms = {k: v * q for k, v in self.terms.items()}
        return res

    def derive_z(self) -> "BiPoly":
        """Formal d/dz, term-wise power rule."""
        out: dict[tuple[int, int], Rat] = {}
        for (dz, de), coeff in self.terms.items():
            if dz > 0:
                out[(dz - 1, de)] = coeff * dz
        res = BiPoly.__new__(BiPoly)
        res.terms = out
        return res

    def shift_z(self, m: int) -> "BiPoly":
        """Multiply by z**m (m may be negative when every term allows it)."""
        if m == 0:
            return self
        out = {}
        for (dz, de), coeff in self.terms.items():
            if dz + m < 0:
                raise ValueError("shift would create a negative z power")
            out[(dz + m, de)] = coeff
        res = BiPoly.__new__(BiPoly)
        res.terms = out
        return res

    # -- evaluation ---------------------------------------------------------

    def eval_z(self, z0) -> list[Rat]:
        """Substitute z = z0 exactly; return E-coefficients, trimmed.

        Result index = power of E.  Empty list means the zero polynomial.
        """
        q = z0 if isinstance(z0, Rat) else rat(z0)
        acc: dict[int, Rat] = {}
        # group by z-degree so each power of z0 is formed once
        pows: dict[int, Rat] = {0: _ONE}
        for (dz, de), coeff in sorted(self.terms.items()):
            if dz not in pows:
                p = _ONE
                for _ in range(dz):
                    p = p * q
                pows[dz] = p
            s = acc.get(de, _ZERO) + coeff * pows[dz]
            acc[de] = s
        if not acc:
            return []
        top = max(acc)
        out = [acc.get(i, _ZERO) for i in range(top + 1)]
        while out and out[-1] == 0:
            out.pop()
        return out

    def eval_float(self, z: float, E: float) -> float:
        total = 0.0
        for (dz, de), coeff in self.terms.items():
            total += float(coeff) * (z ** dz) * (E ** de)
        return total

    def min_deg_z(self) -> int:
        return min((k[0] for k in self.terms), default=0)

    # -- misc ---------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, BiPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if self.is_zero:
            return "BiPoly(0)"
        bits = [
            f"{coeff}"
            + ("" if not dz else "*z" if dz == 1 else f"*z^{dz}")
            + ("" if not de else "*E" if de == 1 else f"*E^{de}")
            for (dz, de), coeff in sorted(self.terms.items())
        ]
        return "BiPoly(" + " + ".join(bits) + ")"


# ---------------------------------------------------------------------------
# univariate helpers over exact coefficient lists (index = power of z)
# used for the E-free denominators, where real polynomial division and
# gcd are available


def _uni_from(p: BiPoly) -> list[Rat]:
    if not p.is_E_free:
        raise ValueError("expected an E-free polynomial")
    if p.is_zero:
        return []
    top = p.deg_z
    out = [_ZERO] * (top + 1)
    for (dz, _), coeff in p.terms.items():
        out[dz] = coeff
    return out


def _uni_to(c: Sequence[Rat]) -> BiPoly:
    res = BiPoly.__new__(BiPoly)
    res.terms = {(i, 0): v for i, v in enumerate(c) if v != 0}
    return res


def _uni_trim(c: list[Rat]) -> list[Rat]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _uni_mul(a: Sequence[Rat], b: Sequence[Rat]) -> list[Rat]:
    if not a or not b:
        return []
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _uni_trim(out)


def _uni_divmod(a: Sequence[Rat], b: Sequence[Rat]) -> tuple[list[Rat], list[Rat]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    db, lead = len(b) - 1, b[-1]
    if len(rem) - 1 < db:
        return [], _uni_trim(rem)
    quot = [_ZERO] * (len(rem) - db)
    for i in range(len(rem) - 1, db - 1, -1):
        if rem[i] == 0:
            continue
        f = rem[i] / lead
        quot[i - db] = f
        for j in range(db + 1):
            rem[i - db + j] = rem[i - db + j] - f * b[j]
    return _uni_trim(quot), _uni_trim(rem)


def _uni_gcd(a: Sequence[Rat], b: Sequence[Rat]) -> list[Rat]:
    x, y = _uni_trim(list(a)), _uni_trim(list(b))
    while y:
        _, r = _uni_divmod(x, y)
        x, y = y, r
    if not x:
        return []
    lead = x[-1]
    return [v / lead for v in x]  # monic


def _int_gcd_lcm_content(coeffs: Iterable[Rat]) -> Rat:
    """Joint rational content: gcd of numerators over lcm of denominators."""
    gn = 0
    ld = 1
    for q in coeffs:
        gn = math.gcd(gn, abs(int(q.numerator)))
        d = int(q.denominator)
        ld = ld // math.gcd(ld, d) * d
    if gn == 0:
        return _ONE
    return Rat(gn, ld)


# ---------------------------------------------------------------------------
# RatFunc


class RatFunc:
    """Ratio num/den with num a BiPoly and den an E-free BiPoly.

    Canonical form (established at construction):
      * den nonzero and E-free;
      * the common pure power of z shared by num and den is stripped,
        so the quantization condition stays meaningful at z = 0;
      * the joint rational content of all coefficients is divided out;
      * den's leading z-coefficient is positive.

    Canonicalization deliberately stops short of a full bivariate gcd;
    content plus z-power stripping is what keeps the recursion's
    numerators well defined at the evaluation point, at a fraction of
    the cost.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: BiPoly, den: BiPoly):
        if den.is_zero:
            raise ZeroDivisionError("RatFunc with zero denominator")
        if not den.is_E_free:
            raise ValueError("RatFunc denominator must be E-free")
        if num.is_zero:
            self.num = BiPoly()
            self.den = BiPoly.const(1)
            return
        m = min(num.min_deg_z(), den.min_deg_z())
        if m > 0:
            num = num.shift_z(-m)
            den = den.shift_z(-m)
        content = _int_gcd_lcm_content(
            list(num.terms.values()) + list(den.terms.values())
        )
        lead = den.terms[(den.deg_z, 0)]
        if lead < 0:
            content = -content
        if content != 1:
            inv = _ONE / content
            num = num.scale(inv)
            den = den.scale(inv)
        self.num = num
        self.den = den

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "RatFunc":
        return cls(BiPoly(), BiPoly.const(1))

    @classmethod
    def from_poly(cls, p: BiPoly) -> "RatFunc":
        return cls(p, BiPoly.const(1))

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls(BiPoly.const(c), BiPoly.const(1))

    # -- predicates ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __eq__(self, other) -> bool:
        """Mathematical equality by cross multiplication.

        Canonicalization does not chase common polynomial factors, so
        two representations of the same function can differ; comparing
        num*den' against num'*den decides equality regardless.  No
        consistent cheap hash exists under this relation, hence
        instances are unhashable.
        """
        if not isinstance(other, RatFunc):
            return NotImplemented
        if self.num == other.num and self.den == other.den:
            return True
        return self.num * other.den == other.num * self.den

    __hash__ = None

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        d1, d2 = self.den, other.den
        if d1 == d2:
            return RatFunc(self.num + other.num, d1)
        u1, u2 = _uni_from(d1), _uni_from(d2)
        # divisibility fast paths cover the recursion's structured sums
        q, r = _uni_divmod(u2, u1)
        if not r:
            return RatFunc(self.num * _uni_to(q) + other.num, d2)
        q, r = _uni_divmod(u1, u2)
        if not r:
            return RatFunc(self.num + other.num * _uni_to(q), d1)
        g = _uni_gcd(u1, u2)
        cof2, _ = _uni_divmod(u2, g)  # u2/g
        lcm = _uni_mul(u1, cof2)
        m1, _ = _uni_divmod(lcm, u1)
        m2, _ = _uni_divmod(lcm, u2)
        return RatFunc(
            self.num * _uni_to(m1) + other.num * _uni_to(m2), _uni_to(lcm)
        )

    def __neg__(self) -> "RatFunc":
        res = RatFunc.__new__(RatFunc)
        res.num = -self.num
        res.den = self.den
        return res

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self + (-other)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        if self.is_zero or other.is_zero:
            return RatFunc.zero()
        return RatFunc(self.num * other.num, self.den * other.den)

    def derive_z(self) -> "RatFunc":
        """d/dz by the quotient rule, with the denominator growth tamed.

        Writing g = gcd(den, den'), u = den/g, v = den'/g, the derivative
        equals (num'*u - num*v) / (den*u).  This keeps repeated
        differentiation from squaring the denominator every time, which
        is what makes a 14-deep recursion feasible.
        """
        if self.is_zero:
            return self
        ud = _uni_from(self.den)
        udp = _uni_trim([v * (i + 1) for i, v in enumerate(ud[1:])])
        if not udp:  # constant denominator
            return RatFunc(self.num.derive_z(), self.den)
        g = _uni_gcd(ud, udp)
        u, _ = _uni_divmod(ud, g)
        v, _ = _uni_divmod(udp, g)
        new_num = self.num.derive_z() * _uni_to(u) - self.num * _uni_to(v)
        new_den = _uni_to(_uni_mul(ud, u))
        return RatFunc(new_num, new_den)

    # -- evaluation ---------------------------------------------------------

    def eval_numer_at(self, z0) -> list[Rat]:
        """num(z0, E) as exact E-coefficients (index = power of E)."""
        return self.num.eval_z(z0)

    def eval_float(self, z: float, E: float) -> float:
        return self.num.eval_float(z, E) / self.den.eval_float(z, 0.0)

    def __repr__(self) -> str:
        return f"RatFunc({self.num!r} / {self.den!r})"


# ---------------------------------------------------------------------------
# UniPolyE and root extraction


class UniPolyE:
    """Univariate polynomial in E with float coefficients, trimmed.

    coeffs[i] is the coefficient of E**i.  Exact inputs are scaled by
    their largest magnitude before conversion (roots are unaffected and
    deep-recursion coefficients would otherwise overflow doubles).
    """

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs: Sequence[float]):
        cs = [float(c) for c in coeffs]
        while cs and cs[-1] == 0.0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.exact: tuple[Rat, ...] | None = None

    @classmethod
    def from_exact(cls, coeffs: Sequence[Rat]) -> "UniPolyE":
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        if not cs:
            return cls([])
        scale = max(abs(c) for c in cs)
        p = cls([float(c / scale) for c in cs])
        p.exact = tuple(cs)
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def __call__(self, x: float) -> float:
        total = 0.0
        for c in reversed(self.coeffs):
            total = total * x + c
        return total

    def derivative_at(self, x: float) -> float:
        total = 0.0
        for i in range(len(self.coeffs) - 1, 0, -1):
            total = total * x + i * self.coeffs[i]
        return total

    def __repr__(self) -> str:
        return f"UniPolyE({list(self.coeffs)})"


def _polish_exact(coeffs: tuple[Rat, ...], x: float) -> float:
    """Newton steps in exact rationals against the exact polynomial.

    Floating evaluation of ill-scaled polynomials (clustered or widely
    spread simple roots) caps float-only Newton well above 1e-10; with
    the exact coefficients still at hand each step is computed without
    rounding, so simple roots converge past double precision in a few
    iterations.  Stops immediately on a vanishing exact derivative
    (multiple root: the companion estimate is kept unchanged).
    """
    r = Rat(*x.as_integer_ratio())
    for _ in range(6):
        fx = rat(0)
        dfx = rat(0)
        for c in reversed(coeffs):
            dfx = dfx * r + fx
            fx = fx * r + c
        if dfx == 0:
            return x
        step = fx / dfx
        r = r - step
        if abs(step) <= abs(r) * Rat(1, 10**18) + Rat(1, 10**18):
            break
        # keep the representation small; the error this injects is far
        # below the target accuracy
        r = Rat(*float(r).as_integer_ratio())
    return float(r)


def poly_real_roots(p: UniPolyE, imag_tol: float = 1e-8) -> list[float]:
    """Real roots of p, ascending, with multiplicity.

    Roots come from the eigenvalues of the balanced companion matrix of
    the monic polynomial, then each candidate gets a few guarded Newton
    steps; when the polynomial was built from exact coefficients the
    polish runs in exact arithmetic instead and recovers simple
    rational roots to 1e-10 and better through degree 12.  A root is
    kept as real when |Im| <= imag_tol * (1 + |Re|).

    Raises ZeroPolynomial for the zero polynomial and DegreeZero for a
    nonzero constant.
    """
    if p.degree < 0:
        raise ZeroPolynomial("no roots: zero polynomial")
    if p.degree == 0:
        raise DegreeZero("no roots: nonzero constant")
    roots = np.roots(list(reversed(p.coeffs)))
    out = []
    for r in roots:
        if abs(r.imag) > imag_tol * (1.0 + abs(r.real)):
            continue
        x = float(r.real)
        if p.exact is not None:
            x = _polish_exact(p.exact, x)
        else:
            for _ in range(3):
                fx = p(x)
                dfx = p.derivative_at(x)
                if dfx == 0.0:
                    break
                x2 = x - fx / dfx
                if not math.isfinite(x2) or abs(p(x2)) >= abs(fx):
                    break
                x = x2
        out.append(x)
    return sorted(out)


# ---------------------------------------------------------------------------
# operation-style wrappers (thin aliases over the methods above)


def bipoly_arith(lhs: BiPoly, rhs: BiPoly, kind: str) -> BiPoly:
    if kind == "add":
        return lhs + rhs
    if kind == "sub":
        return lhs - rhs
    if kind == "mul":
        return lhs * rhs
    raise ValueError(f"unknown kind {kind!r}")


def bipoly_derive_z(p: BiPoly) -> BiPoly:
    return p.derive_z()


def ratfunc_arith(lhs: RatFunc, rhs: RatFunc, kind: str) -> RatFunc:
    if kind == "add":
        return lhs + rhs
    if kind == "mul":
        return lhs * rhs
    raise ValueError(f"unknown kind {kind!r}")


def ratfunc_derive_z(f: RatFunc) -> RatFunc:
    return f.derive_z()


def ratfunc_eval_numer_at(f: RatFunc, z0) -> list[Rat]:
    return f.eval_numer_at(z0)
