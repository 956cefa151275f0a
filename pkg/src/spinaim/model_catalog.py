"""Hamiltonian family, symmetry classification, ODE seeds, closed forms.

The Hamiltonian under study couples a spin-1/2 to two boson modes:

    H = omega1*(a+a + 1/2) + omega2*(b+b + 1/2) + omega0*sigma0
        + (kappa1*a + kappa2*a+ + kappa3*b + kappa4*b+) * sigma+
        + (gamma1*a + gamma2*a+ + gamma3*b + gamma4*b+) * sigma-

In the Bargmann realization (a+ -> x, a -> d/dx, likewise y for mode b)
a conserved combination of number operators and sigma0 fixes a sector
label k and collapses the two-variable problem to coupled first-order
ODEs in a single variable z for the spinor components (phi1, phi2):

    phi1' = a0*phi1 + b0*phi2        phi2' = c0*phi2 + d0*phi1

Two sector geometries occur.  Case K (z = x*y, component weights x^k and
x^(k+1)) applies when gamma1 = gamma4 = kappa2 = kappa3 = 0; its energies
include the two-mode zero point (omega1+omega2)/2.  Case N (z = y/x)
applies when gamma1 = gamma3 = kappa2 = kappa4 = 0 and carries no zero
point.  The catalog ships hard-coded quartets for the three concrete
models (Jahn-Teller, Rashba, Jaynes-Cummings) plus a general symbolic
reduction validated against them, and closed-form spectra where they
exist (JC, modified JC, Dirac oscillator).

Sign conventions are anchored by cross-validation against dense
diagonalization of the corresponding number-conserving sector chains;
see the test suite's oracle helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .exact_algebra import BiPoly, Rat, RatFunc, rat

__all__ = [
    "ModelSpec",
    "CoeffQuartet",
    "SymmetryClass",
    "ValidationResult",
    "DiracLevel",
    "BadPattern",
    "ZeroFrequency",
    "SingularSystem",
    "ConstraintViolation",
    "ComplexEnergy",
    "validate_model",
    "seed_jt",
    "seed_rashba",
    "seed_jc",
    "rescaled_seed",
    "reduce_to_coupled_ode",
    "closed_form_jc",
    "closed_form_mjc",
    "closed_form_dirac",
]


class BadPattern(ValueError):
    """Model couplings do not match the requested catalog pattern."""


class ZeroFrequency(ValueError):
    """JC seed requested with omega = 0 (use the Dirac closed form)."""


class SingularSystem(ValueError):
    """The 2x2 system for (phi1', phi2') is identically singular."""


class ConstraintViolation(ValueError):
    """Required symmetry-class constraints do not hold for the model."""


class ComplexEnergy(ValueError):
    """Closed-form radicand is negative for the requested branch."""


class SymmetryClass(Enum):
    K1 = "K1"
    N1 = "N1"
    K2 = "K2"
    N2 = "N2"
    NONE = "none"


_CLASS_CONSTRAINTS = {
    SymmetryClass.K1: ("gamma2", "gamma3", "kappa1", "kappa4"),
    SymmetryClass.N1: ("gamma1", "gamma3", "kappa2", "kappa4"),
    SymmetryClass.K2: ("gamma1", "gamma4", "kappa2", "kappa3"),
    SymmetryClass.N2: ("gamma2", "gamma4", "kappa1", "kappa3"),
}


@dataclass(frozen=True)
class ModelSpec:
    """The 12 Hamiltonian parameters plus the sector label k."""

    omega1: Rat = field(default_factory=lambda: rat(0))
    omega2: Rat = field(default_factory=lambda: rat(0))
    omega0: Rat = field(default_factory=lambda: rat(0))
    kappa1: Rat = field(default_factory=lambda: rat(0))
    kappa2: Rat = field(default_factory=lambda: rat(0))
    kappa3: Rat = field(default_factory=lambda: rat(0))
    kappa4: Rat = field(default_factory=lambda: rat(0))
    gamma1: Rat = field(default_factory=lambda: rat(0))
    gamma2: Rat = field(default_factory=lambda: rat(0))
    gamma3: Rat = field(default_factory=lambda: rat(0))
    gamma4: Rat = field(default_factory=lambda: rat(0))
    k: Rat = field(default_factory=lambda: rat(0))

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            object.__setattr__(self, name, rat(getattr(self, name)))

    # -- factory helpers for the catalog patterns --------------------------

    @classmethod
    def jt(cls, kappa, omega0=0, k=0) -> "ModelSpec":
        """E(x)epsilon Jahn-Teller: two degenerate modes, symmetric coupling."""
        q = rat(kappa)
        return cls(omega1=1, omega2=1, omega0=omega0,
                   kappa1=q, kappa4=q, gamma2=q, gamma3=q, k=k)

    @classmethod
    def rashba(cls, kappa, omega0=0, k=0) -> "ModelSpec":
        """Rashba spin-orbit pattern: kappa1=-kappa4=gamma2=-gamma3."""
        q = rat(kappa)
        return cls(omega1=1, omega2=1, omega0=omega0,
                   kappa1=q, kappa4=-q, gamma2=q, gamma3=-q, k=k)

    @classmethod
    def jc(cls, kappa, omega=1, omega0=0, k=0) -> "ModelSpec":
        """Jaynes-Cummings: single mode, rotating-wave coupling."""
        q = rat(kappa)
        return cls(omega1=omega, omega2=0, omega0=omega0,
                   kappa1=q, gamma2=q, k=k)

    @classmethod
    def mjc(cls, kappa, omega0=0, k=0) -> "ModelSpec":
        """Modified JC: one atom coupled equally to two degenerate modes."""
        q = rat(kappa)
        return cls(omega1=1, omega2=1, omega0=omega0,
                   kappa1=q, kappa3=q, gamma2=q, gamma4=q, k=k)


@dataclass(frozen=True)
class CoeffQuartet:
    """The four rational coefficient functions of the coupled system.

    Construction checks the seed invariants: denominators are E-free (a
    RatFunc guarantee) and numerators are affine in E.
    """

    a0: RatFunc
    b0: RatFunc
    c0: RatFunc
    d0: RatFunc

    def __post_init__(self):
        for name in ("a0", "b0", "c0", "d0"):
            f = getattr(self, name)
            if not f.num.affine_in_E:
                raise ValueError(f"{name} numerator is not affine in E")

    def __iter__(self) -> Iterator[RatFunc]:
        return iter((self.a0, self.b0, self.c0, self.d0))


@dataclass(frozen=True)
class ValidationResult:
    hermitian: bool
    classes: list[SymmetryClass]


@dataclass(frozen=True)
class DiracLevel:
    inner_sign: int
    outer_sign: int
    energy: float | None
    is_real: bool


def validate_model(m: ModelSpec) -> ValidationResult:
    """Hermiticity flag plus every symmetry class whose constraints hold.

    Hermitian means kappa1=gamma2, kappa2=gamma1, kappa3=gamma4,
    kappa4=gamma3.  Multiple classes may hold at once (all four do for
    the uncoupled model); all are reported.
    """
    hermitian = (
        m.kappa1 == m.gamma2
        and m.kappa2 == m.gamma1
        and m.kappa3 == m.gamma4
        and m.kappa4 == m.gamma3
    )
    classes = [
        tag
        for tag, names in _CLASS_CONSTRAINTS.items()
        if all(getattr(m, n) == 0 for n in names)
    ]
    if not classes:
        classes = [SymmetryClass.NONE]
    return ValidationResult(hermitian=hermitian, classes=classes)


# ---------------------------------------------------------------------------
# hard-coded seeds

_Z = BiPoly.z()


def _lin(*, z=0, E=0, const=0) -> BiPoly:
    return BiPoly.linear(z=z, E=E, const=const)


def _require(cond: bool, what: str):
    if not cond:
        raise BadPattern(what)


def seed_jt(m: ModelSpec) -> CoeffQuartet:
    """Coefficient quartet for the Jahn-Teller pattern (omega1=omega2=1).

    With q = kappa^2:
        a0 = (q - 2*omega0 - 2k - 2 + 2E) / (4z - q)
        b0 = kappa*(omega0 + k + 2z + E) / (q - 4z)
        c0 = (q*(1 + k + z) + 2z*(omega0 - k + E - 2)) / (z*(4z - q))
        d0 = kappa*(E - omega0 - k + 2z - 1) / (z*(q - 4z))

    The -1 constant in d0's numerator is the variant that survives
    cross-validation against dense sector diagonalization; the +1
    variant collapses the quantization condition to garbage.
    """
    _require(m.omega1 == 1 and m.omega2 == 1, "jt requires omega1 = omega2 = 1")
    kappa = m.kappa1
    _require(
        m.kappa4 == kappa and m.gamma2 == kappa and m.gamma3 == kappa,
        "jt requires kappa1 = kappa4 = gamma2 = gamma3",
    )
    _require(
        m.kappa2 == 0 and m.kappa3 == 0 and m.gamma1 == 0 and m.gamma4 == 0,
        "jt requires kappa2 = kappa3 = gamma1 = gamma4 = 0",
    )
    q = kappa * kappa
    w0, k = m.omega0, m.k
    den1 = _lin(z=4, const=-q)               # 4z - q
    den1n = _lin(z=-4, const=q)              # q - 4z
    a0 = RatFunc(_lin(E=2, const=q - 2 * w0 - 2 * k - 2), den1)
    b0 = RatFunc(_lin(z=2, E=1, const=w0 + k).scale(kappa), den1n)
    c0num = _lin(z=1, const=1 + k).scale(q) + _lin(z=2) * _lin(E=1, const=w0 - k - 2)
    c0 = RatFunc(c0num, _Z * den1)
    d0num = _lin(z=2, E=1, const=-w0 - k - 1).scale(kappa)
    d0 = RatFunc(d0num, _Z * den1n)
    return CoeffQuartet(a0, b0, c0, d0)


def seed_rashba(m: ModelSpec) -> CoeffQuartet:
    """Coefficient quartet for the Rashba pattern (omega1=omega2=1).

    Differs from the Jahn-Teller quartet by the sign carried by kappa^2
    (denominators 4z + kappa^2) and by the relative signs inside d0.
    """
    _require(m.omega1 == 1 and m.omega2 == 1, "rashba requires omega1 = omega2 = 1")
    kappa = m.kappa1
    _require(
        m.kappa4 == -kappa and m.gamma2 == kappa and m.gamma3 == -kappa,
        "rashba requires kappa1 = -kappa4 = gamma2 = -gamma3",
    )
    _require(
        m.kappa2 == 0 and m.kappa3 == 0 and m.gamma1 == 0 and m.gamma4 == 0,
        "rashba requires kappa2 = kappa3 = gamma1 = gamma4 = 0",
    )
    q = kappa * kappa
    w0, k = m.omega0, m.k
    den1 = _lin(z=4, const=q)                # 4z + q
    a0 = RatFunc(_lin(E=2, const=q - 2 * w0 - 2 * k - 2), den1)
    b0 = RatFunc(_lin(z=2, E=-1, const=-w0 - k).scale(kappa), den1)
    c0num = _lin(z=1, const=-1 - k).scale(q) + _lin(z=2) * _lin(E=1, const=w0 - k - 2)
    c0 = RatFunc(c0num, _Z * den1)
    d0num = _lin(z=-2, E=1, const=-w0 - k - 1).scale(kappa)
    d0 = RatFunc(d0num, _Z * den1)
    return CoeffQuartet(a0, b0, c0, d0)


def seed_jc(m: ModelSpec) -> CoeffQuartet:
    """Coefficient quartet for the Jaynes-Cummings pattern.

        a0 = -(kappa^2 + omega*(E - k*omega + omega0)) / (omega^2 z)
        b0 = kappa*(E - omega0) / (omega^2 z)
        c0 = (-E + omega + k*omega + omega0) / (omega z)
        d0 = kappa / (omega z)

    Every coefficient has exactly a simple pole at z = 0.
    """
    kappa = m.kappa1
    _require(m.gamma2 == kappa, "jc requires kappa1 = gamma2")
    _require(
        m.kappa2 == 0 and m.kappa3 == 0 and m.kappa4 == 0
        and m.gamma1 == 0 and m.gamma3 == 0 and m.gamma4 == 0,
        "jc requires all couplings except kappa1 = gamma2 to vanish",
    )
    _require(m.omega2 == 0, "jc requires omega2 = 0")
    w = m.omega1
    if w == 0:
        raise ZeroFrequency("jc with omega = 0: use closed_form_dirac")
    w0, k = m.omega0, m.k
    wz = _Z.scale(w)
    w2z = _Z.scale(w * w)
    a0 = RatFunc(-(BiPoly.const(kappa * kappa) + _lin(E=1, const=w0 - k * w).scale(w)), w2z)
    b0 = RatFunc(_lin(E=1, const=-w0).scale(kappa), w2z)
    c0 = RatFunc(_lin(E=-1, const=w + k * w + w0), wz)
    d0 = RatFunc(BiPoly.const(kappa), wz)
    return CoeffQuartet(a0, b0, c0, d0)


def rescaled_seed(model: str, kappa_sq, omega0=0, k=0, omega=1) -> CoeffQuartet:
    """Quartet after the diagonal rescale phi2 -> kappa*phi2.

    The rescale maps (b0, d0) -> (b0/kappa, kappa*d0), leaving every
    coefficient a function of kappa^2 alone and leaving the quantization
    condition's roots unchanged.  This is the form the iteration engine
    consumes: it admits negative kappa^2 (Dirac mapping) and irrational
    linear couplings (kappa^2 = 2, 3, 5, ...) without leaving rational
    arithmetic.
    """
    q, w0, k = rat(kappa_sq), rat(omega0), rat(k)
    if model == "jt":
        den1 = _lin(z=4, const=-q)
        den1n = _lin(z=-4, const=q)
        a0 = RatFunc(_lin(E=2, const=q - 2 * w0 - 2 * k - 2), den1)
        b0 = RatFunc(_lin(z=2, E=1, const=w0 + k), den1n)
        c0num = _lin(z=1, const=1 + k).scale(q) + _lin(z=2) * _lin(E=1, const=w0 - k - 2)
        c0 = RatFunc(c0num, _Z * den1)
        d0 = RatFunc(_lin(z=2, E=1, const=-w0 - k - 1).scale(q), _Z * den1n)
        return CoeffQuartet(a0, b0, c0, d0)
    if model == "rashba":
        den1 = _lin(z=4, const=q)
        a0 = RatFunc(_lin(E=2, const=q - 2 * w0 - 2 * k - 2), den1)
        b0 = RatFunc(_lin(z=2, E=-1, const=-w0 - k), den1)
        c0num = _lin(z=1, const=-1 - k).scale(q) + _lin(z=2) * _lin(E=1, const=w0 - k - 2)
        c0 = RatFunc(c0num, _Z * den1)
        d0 = RatFunc(_lin(z=-2, E=1, const=-w0 - k - 1).scale(q), _Z * den1)
        return CoeffQuartet(a0, b0, c0, d0)
    if model == "jc":
        w = rat(omega)
        if w == 0:
            raise ZeroFrequency("jc with omega = 0: use closed_form_dirac")
        wz = _Z.scale(w)
        w2z = _Z.scale(w * w)
        a0 = RatFunc(-(BiPoly.const(q) + _lin(E=1, const=w0 - k * w).scale(w)), w2z)
        b0 = RatFunc(_lin(E=1, const=-w0), w2z)
        c0 = RatFunc(_lin(E=-1, const=w + k * w + w0), wz)
        d0 = RatFunc(BiPoly.const(q), wz)
        return CoeffQuartet(a0, b0, c0, d0)
    raise BadPattern(f"no rescaled seed for model {model!r}")


# ---------------------------------------------------------------------------
# general symbolic reduction


def reduce_to_coupled_ode(m: ModelSpec, case: str) -> CoeffQuartet:
    """Build the coupled first-order system from the Hamiltonian directly.

    For the requested sector geometry the two separated equations are
    assembled with BiPoly coefficients,

        A1*phi1' + B1*phi2' + C1*phi1 + D1*phi2 = 0
        A2*phi1' + B2*phi2' + C2*phi1 + D2*phi2 = 0

    and solved for (phi1', phi2') by Cramer's rule.  On the Jahn-Teller,
    Rashba and JC patterns the result equals the hard-coded seeds in
    canonical form, which is how this derivation is validated.

    Case 'K' needs gamma1 = gamma4 = kappa2 = kappa3 = 0 and includes
    the zero point (omega1+omega2)/2 in E.  Case 'N' needs
    gamma1 = gamma3 = kappa2 = kappa4 = 0 and has no zero point.
    Raises ConstraintViolation when the class fails and SingularSystem
    when the 2x2 determinant vanishes identically (e.g. case N with
    omega1 = omega2).
    """
    classes = validate_model(m).classes
    k, w0 = m.k, m.omega0
    if case == "K":
        if SymmetryClass.K2 not in classes:
            raise ConstraintViolation(
                "case K requires gamma1 = gamma4 = kappa2 = kappa3 = 0"
            )
        ws = m.omega1 + m.omega2
        zp = ws / 2  # two-mode zero point folded into the E offset
        A1 = _Z.scale(ws)
        B1 = _Z.scale(m.kappa1)
        C1 = _lin(E=-1, const=k * m.omega1 + w0 + zp)
        D1 = _lin(z=m.kappa4, const=m.kappa1 * (k + 1))
        A2 = BiPoly.const(m.gamma3)
        B2 = _Z.scale(ws)
        C2 = BiPoly.const(m.gamma2)
        D2 = _lin(E=-1, const=(k + 1) * m.omega1 - w0 + zp)
    elif case == "N":
        if SymmetryClass.N1 not in classes:
            raise ConstraintViolation(
                "case N requires gamma1 = gamma3 = kappa2 = kappa4 = 0"
            )
        wd = m.omega2 - m.omega1
        A1 = _Z.scale(wd)
        B1 = _lin(z=-m.kappa1, const=m.kappa3)
        C1 = _lin(E=-1, const=k * m.omega1 - w0)
        D1 = BiPoly.const(m.kappa1 * (k + 1))
        A2 = BiPoly()
        B2 = _Z.scale(wd)
        C2 = _lin(z=m.gamma4, const=m.gamma2)
        D2 = _lin(E=-1, const=(k + 1) * m.omega1 + w0)
    else:
        raise ValueError(f"case must be 'K' or 'N', got {case!r}")

    det = A1 * B2 - B1 * A2
    if det.is_zero:
        raise SingularSystem("coefficient matrix of (phi1', phi2') is singular")
    # Cramer: phi1' = (a0*phi1 + b0*phi2), phi2' = (c0*phi2 + d0*phi1)
    a0 = RatFunc(B1 * C2 - B2 * C1, det)
    b0 = RatFunc(B1 * D2 - B2 * D1, det)
    d0 = RatFunc(A2 * C1 - A1 * C2, det)
    c0 = RatFunc(A2 * D1 - A1 * D2, det)
    return CoeffQuartet(a0, b0, c0, d0)


# ---------------------------------------------------------------------------
# closed-form spectra


def _sqrt_exact(q: Rat) -> Rat | None:
    """sqrt(q) as an exact rational when q is a perfect square, else None."""
    num, den = int(q.numerator), int(q.denominator)
    if num < 0:
        return None
    sn, sd = math.isqrt(num), math.isqrt(den)
    if sn * sn == num and sd * sd == den:
        return Rat(sn, sd)
    return None


def _half_sqrt(rad: Rat) -> tuple[float, bool]:
    """(sqrt(rad)/2 as float, whether the value is exact)."""
    s = _sqrt_exact(rad)
    if s is not None:
        return float(s / 2), True
    return math.sqrt(float(rad)) / 2.0, False


def closed_form_jc(k, n: int, omega, omega0, kappa_sq) -> tuple[float, float]:
    """JC level pair at sector k, branch index n >= 1.

        E = (k + 3/2 - n)*omega -/+ sqrt(4*kappa_sq*(k+2-n) + (omega+2*omega0)^2)/2

    Returned ascending (minus branch first).  kappa_sq may be negative
    (the Dirac-oscillator mapping enters that way).  When the radicand
    is a perfect square the value is computed in exact rationals before
    the final float conversion.  Raises ComplexEnergy for a negative
    radicand.
    """
    k, w, w0, q = rat(k), rat(omega), rat(omega0), rat(kappa_sq)
    if n < 1:
        raise ValueError("branch index n must be >= 1")
    rad = 4 * q * (k + 2 - n) + (w + 2 * w0) ** 2
    if rad < 0:
        raise ComplexEnergy(f"radicand {rad} < 0 at n={n}")
    base = (k + Rat(3, 2) - n) * w
    s = _sqrt_exact(rad)
    if s is not None:
        return float(base - s / 2), float(base + s / 2)
    half = math.sqrt(float(rad)) / 2.0
    return float(base) - half, float(base) + half


def closed_form_mjc(k, n: int, kappa, omega0) -> tuple[float, float]:
    """Modified-JC level pair (mode frequency fixed to 1 in this form).

        E = (k + 3/2) +/- sqrt(8*(k+1-n)*kappa^2 + (2*omega0-1)^2)/2

    Returned ascending.  At kappa = 0 the radicand is the perfect square
    (2*omega0-1)^2 and both values are exact; at omega0 = 1/2, n = k+1
    the pair degenerates to k + 3/2 exactly.
    """
    k, kap, w0 = rat(k), rat(kappa), rat(omega0)
    if n < 1:
        raise ValueError("branch index n must be >= 1")
    rad = 8 * (k + 1 - n) * kap * kap + (2 * w0 - 1) ** 2
    if rad < 0:
        raise ComplexEnergy(f"radicand {rad} < 0 at n={n}")
    base = k + Rat(3, 2)
    s = _sqrt_exact(rad)
    if s is not None:
        return float(base - s / 2), float(base + s / 2)
    half = math.sqrt(float(rad)) / 2.0
    return float(base) - half, float(base) + half


def closed_form_dirac(m_mass, c, omega_prime, hbar, k, n: int) -> list[DiracLevel]:
    """Dirac-oscillator energies, all four sign combinations.

        E = outer * sqrt(4*m^2*c^4 - 4*hbar*omega_prime*m*c^2*(k + inner*n))/2

    Each (inner, outer) combination is reported with a reality flag;
    combinations with a negative radicand carry energy None.  The same
    values arise from closed_form_jc with omega = 0, omega0 = m*c^2,
    kappa_sq = -4*c^2*m*omega_prime*hbar at sector (k + inner*n)/4 and
    branch n = 2.
    """
    mm, cc, wp, hb, k = rat(m_mass), rat(c), rat(omega_prime), rat(hbar), rat(k)
    if n < 1:
        raise ValueError("branch index n must be >= 1")
    out: list[DiracLevel] = []
    for inner in (1, -1):
        rad = 4 * mm * mm * cc ** 4 - 4 * hb * wp * mm * cc * cc * (k + inner * n)
        if rad < 0:
            out.append(DiracLevel(inner, 1, None, False))
            out.append(DiracLevel(inner, -1, None, False))
            continue
        half, _ = _half_sqrt(rad)
        out.append(DiracLevel(inner, 1, half, True))
        out.append(DiracLevel(inner, -1, -half, True))
    return out
