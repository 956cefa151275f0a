"""Asymptotic iteration for coupled 2x2 first-order systems.

Given the seed quartet (a0, b0, c0, d0) of rational functions of (z, E)
describing

    phi1' = a0*phi1 + b0*phi2        phi2' = c0*phi2 + d0*phi1

the iteration builds rows

    a_n = a0*a_{n-1} + a_{n-1}' + d0*b_{n-1}
    b_n = b0*a_{n-1} + b_{n-1}' + c0*b_{n-1}
    c_n = c0*c_{n-1} + c_{n-1}' + b0*d_{n-1}
    d_n = d0*c_{n-1} + d_{n-1}' + a0*d_{n-1}

entirely in exact rational arithmetic.  Termination at order n imposes

    delta1_n = b_{n-1}*a_n - a_{n-1}*b_n = 0
    delta2_n = d_{n-1}*c_n - c_{n-1}*d_n = 0

whose numerators, evaluated at a chosen point z0, are polynomials in E.
Their real roots approximate the spectrum, stabilizing as n grows.

Root extraction is the one deliberately high-precision step.  The
quantization polynomials are severely ill conditioned: they carry tight
clusters of near-integer roots, and a float64 companion matrix
scrambles the upper spectrum long before n reaches useful orders.  The
engine therefore hands exact rational coefficients to an
arbitrary-precision solver and only then rounds to float.

The iteration also manufactures one root that is not an energy level:
the E-zero of the seed's off-diagonal numerator at z0 can divide every
quantization polynomial exactly.  Divisibility is established by exact
synthetic division, never by numeric closeness; when it holds, the
matching trajectory is reported with index -1 and excluded from
physical level numbering.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .exact_algebra import BiPoly, Rat, RatFunc, rat
from .model_catalog import CoeffQuartet

__all__ = [
    "AimRow",
    "DeltaPair",
    "Level",
    "SpectrumResult",
    "PolyEigenfunction",
    "NoRealRoots",
    "Decoupled",
    "IdenticallyZero",
    "NotPolynomial",
    "DomainError",
    "initial_row",
    "aim_step",
    "delta_at",
    "solve_spectrum",
    "polynomial_eigenfunction",
    "assemble_wavefunction",
]


class NoRealRoots(RuntimeError):
    """No quantization polynomial produced a real root up to n_max."""


class Decoupled(ValueError):
    """Both off-diagonal seeds vanish; the components never mix."""


class IdenticallyZero(ValueError):
    """Both quantization numerators vanish identically at z0."""


class NotPolynomial(RuntimeError):
    """No polynomial eigenfunction exists at the requested energy."""


class DomainError(ValueError):
    """Wavefunction evaluation requested outside the sector chart."""


@dataclass(frozen=True)
class AimRow:
    """Coefficient quadruple after n iteration steps."""

    n: int
    a: RatFunc
    b: RatFunc
    c: RatFunc
    d: RatFunc


@dataclass(frozen=True)
class DeltaPair:
    """Quantization polynomials in E at order n, exact coefficients.

    Each polynomial is an ascending tuple of rationals; an empty tuple
    marks a channel whose numerator vanishes identically at z0 (the
    other channel is still usable then).
    """

    n: int
    delta1: tuple[Rat, ...]
    delta2: tuple[Rat, ...]


@dataclass
class Level:
    """One root trajectory followed across iteration orders."""

    index: int
    energy: float
    history: list[tuple[int, float]]
    converged: bool
    n_converged: int | None = None
    flagged: bool = False


@dataclass(frozen=True)
class SpectrumResult:
    levels: list[Level]
    iterations_used: int
    z0: Rat
    discarded_first_root: bool


@dataclass(frozen=True)
class PolyEigenfunction:
    energy: float
    phi1: np.ndarray
    phi2: np.ndarray
    residual: float


# ---------------------------------------------------------------------------
# exact iteration


def initial_row(seed: CoeffQuartet) -> AimRow:
    return AimRow(0, seed.a0, seed.b0, seed.c0, seed.d0)


def aim_step(seed: CoeffQuartet, row: AimRow) -> AimRow:
    """One iteration of the 2x2 recursion, exactly."""
    a0, b0, c0, d0 = seed.a0, seed.b0, seed.c0, seed.d0
    a = a0 * row.a + row.a.derive_z() + d0 * row.b
    b = b0 * row.a + row.b.derive_z() + c0 * row.b
    c = c0 * row.c + row.c.derive_z() + b0 * row.d
    d = d0 * row.c + row.d.derive_z() + a0 * row.d
    return AimRow(row.n + 1, a, b, c, d)


def _rows_to(seed: CoeffQuartet, n_max: int) -> list[AimRow]:
    rows = [initial_row(seed)]
    while rows[-1].n < n_max:
        rows.append(aim_step(seed, rows[-1]))
    return rows


def _numer_poly_at(f: RatFunc, z0: Rat) -> tuple[Rat, ...]:
    """E-coefficients of f's numerator at z = z0, own z-power stripped.

    The canonical form only removes z-powers shared with the
    denominator, so the numerator may retain a pure z^m factor; that
    factor carries no E-content and would silently zero the evaluation
    at z0 = 0, hence it is removed first.  For z0 != 0 the removal just
    rescales by z0^m, which no root extraction ever sees.
    """
    num = f.num
    m = num.min_deg_z()
    if m > 0:
        num = num.shift_z(-m)
    coeffs = num.eval_z(z0)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _delta_poly(prev: AimRow, cur: AimRow, which: str, z0: Rat) -> tuple[Rat, ...]:
    """One channel's quantization numerator at z0, ascending E-coeffs."""
    if which == "d1":
        delta = prev.b * cur.a - prev.a * cur.b
    else:
        delta = prev.d * cur.c - prev.c * cur.d
    if delta.is_zero:
        return ()
    poly = _numer_poly_at(delta, z0)
    assert len(poly) - 1 <= 2 * cur.n + 2, "E-degree bound violated"
    return poly


def delta_at(seed: CoeffQuartet, n: int, z0=0) -> DeltaPair:
    """Both quantization polynomials at order n, evaluated at z0.

    Runs the exact recursion up to row n (n >= 1) and forms the two
    channel numerators.  Raises IdenticallyZero when both vanish at z0
    (the fully decoupled case reaches this immediately); a single
    vanishing channel is reported as an empty tuple.
    """
    if n < 1:
        raise ValueError("order n must be >= 1")
    z0 = rat(z0)
    rows = _rows_to(seed, n)
    p1 = _delta_poly(rows[n - 1], rows[n], "d1", z0)
    p2 = _delta_poly(rows[n - 1], rows[n], "d2", z0)
    if not p1 and not p2:
        raise IdenticallyZero(f"both quantization numerators vanish at n={n}")
    return DeltaPair(n, p1, p2)


# ---------------------------------------------------------------------------
# high-precision root extraction


def _real_roots_exact(coeffs: tuple[Rat, ...], dps: int = 60,
                      imag_rel: float = 1e-8) -> list[float]:
    """Real roots of an exact polynomial, multiple precision throughout.

    Coefficients are normalized by the largest magnitude while still
    rational, converted at full working precision, and rooted with
    generous extra precision.  Roots whose imaginary part is not tiny
    relative to the real part are dropped.
    """
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) <= 1:
        return []
    mx = max(abs(c) for c in cs)
    for attempt in range(2):
        with mpmath.workdps(dps << attempt):
            desc = []
            for c in reversed(cs):
                v = c / mx
                desc.append(mpmath.mpf(int(v.numerator))
                            / mpmath.mpf(int(v.denominator)))
            try:
                roots = mpmath.polyroots(desc, maxsteps=300 << attempt,
                                         extraprec=300 << attempt)
            except Exception:
                if attempt == 1:
                    raise
                continue
            out = [float(mpmath.re(r)) for r in roots
                   if abs(mpmath.im(r)) <= imag_rel * (1 + abs(mpmath.re(r)))]
        return sorted(out)
    return []


# ---------------------------------------------------------------------------
# spurious-root identification


def _seed_artifact_root(off_diag: RatFunc, z0: Rat) -> Rat | None:
    """E-zero of an off-diagonal seed numerator at z0.

    Exists when the numerator is affine in E with nonvanishing E-slope
    at z0; otherwise the channel produces no seed-borne root.
    """
    num = off_diag.num
    if num.is_zero or not num.affine_in_E:
        return None
    coeffs = num.eval_z(z0)
    if len(coeffs) < 2 or coeffs[1] == 0:
        return None
    return -coeffs[0] / coeffs[1]


def _divides_exactly(poly: tuple[Rat, ...], root: Rat) -> bool:
    """Whether (E - root) divides the polynomial, by exact evaluation."""
    acc = rat(0)
    for c in reversed(poly):
        acc = acc * root + c
    return acc == 0


# ---------------------------------------------------------------------------
# trajectory tracking


class _Trajectory:
    __slots__ = ("first_n", "history", "last", "prev_diff", "converged",
                 "n_converged", "is_artifact")

    def __init__(self, n: int, value: float):
        self.first_n = n
        self.history: list[tuple[int, float]] = [(n, value)]
        self.last = value
        self.prev_diff: float | None = None
        self.converged = False
        self.n_converged: int | None = None
        self.is_artifact = False

    def extend(self, n: int, value: float, tol: float) -> None:
        diff = abs(value - self.last)
        self.history.append((n, value))
        self.last = value
        if (self.prev_diff is not None and diff <= tol
                and self.prev_diff <= tol and not self.converged):
            self.converged = True
            self.n_converged = n
        self.prev_diff = diff


def _match_roots(trajs: list[_Trajectory], roots: list[float], n: int,
                 tol: float) -> None:
    """Greedy nearest-value assignment of new roots to trajectories.

    The acceptance gate scales with the spread of the incoming root set
    so slowly drifting unconverged levels stay linked while widely
    separated levels never cross-talk.  Unclaimed roots start new
    trajectories.
    """
    if not roots:
        return
    span = roots[-1] - roots[0]
    gate = max(100 * tol, 0.05 * span)
    cand = sorted(
        (abs(t.last - r), ti, ri)
        for ti, t in enumerate(trajs)
        for ri, r in enumerate(roots)
    )
    used_t: set[int] = set()
    used_r: set[int] = set()
    for dist, ti, ri in cand:
        if dist > gate:
            break
        if ti in used_t or ri in used_r:
            continue
        trajs[ti].extend(n, roots[ri], tol)
        used_t.add(ti)
        used_r.add(ri)
    for ri, r in enumerate(roots):
        if ri not in used_r:
            trajs.append(_Trajectory(n, r))


def _run_channel(rows: list[AimRow], which: str, z0: Rat, n_max: int, tol: float,
                 candidates: list[Rat]) -> tuple[list[_Trajectory], bool]:
    """Track one quantization channel across orders 2..n_max.

    candidates are potential seed-borne roots; each is kept only while
    it divides every order's polynomial exactly.  Surviving candidates
    flag their matching trajectory (earliest first appearance wins) as
    non-physical.
    """
    alive = {i: True for i in range(len(candidates))}
    trajs: list[_Trajectory] = []
    saw_poly = False
    for n in range(2, n_max + 1):
        poly = _delta_poly(rows[n - 1], rows[n], which, z0)
        if not poly:
            continue
        saw_poly = True
        for i, root in enumerate(candidates):
            if alive[i] and not _divides_exactly(poly, root):
                alive[i] = False
        _match_roots(trajs, _real_roots_exact(poly), n, tol)

    flagged = False
    if saw_poly:
        for i, root in enumerate(candidates):
            if not alive[i]:
                continue
            target = float(root)
            near = [t for t in trajs if not t.is_artifact
                    and abs(t.last - target) <= 1e-7 * (1 + abs(target))]
            if near:
                near.sort(key=lambda t: (t.first_n, abs(t.last - target)))
                near[0].is_artifact = True
                flagged = True
    return trajs, flagged


def solve_spectrum(seed: CoeffQuartet, z0=0, n_max: int = 14, tol: float = 1e-6,
                   which_delta: str = "d1") -> SpectrumResult:
    """Track quantization roots across orders 2..n_max and report levels.

    which_delta selects the first channel, the second, or 'both'.  A
    single channel tests only its own seed-borne root for discarding;
    'both' tests each channel against both seeds' roots and then merges
    the two level lists, collapsing energies that agree within
    tolerance in favor of the first channel.  A trajectory is converged
    once its value has moved by at most tol over each of the last two
    orders; n_converged records the order where that first held.
    Levels come back sorted by energy with physical indices 0, 1, ...;
    a discarded trajectory carries index -1.

    Raises Decoupled when both off-diagonal seeds vanish, and
    NoRealRoots when no real root ever appears in the selected
    channel(s).
    """
    if which_delta not in ("d1", "d2", "both"):
        raise ValueError("which_delta must be 'd1', 'd2' or 'both'")
    if seed.b0.is_zero and seed.d0.is_zero:
        raise Decoupled("b0 = d0 = 0: components evolve independently")
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    z0 = rat(z0)
    rows = _rows_to(seed, n_max)

    own = {"d1": _seed_artifact_root(seed.b0, z0),
           "d2": _seed_artifact_root(seed.d0, z0)}
    channels = ("d1", "d2") if which_delta == "both" else (which_delta,)
    per_channel: list[list[Level]] = []
    discarded = False
    for which in channels:
        if which_delta == "both":
            candidates = [r for r in (own["d1"], own["d2"]) if r is not None]
        else:
            candidates = [own[which]] if own[which] is not None else []
        trajs, flagged = _run_channel(rows, which, z0, n_max, tol, candidates)
        discarded = discarded or flagged
        per_channel.append([
            Level(index=0, energy=t.last, history=list(t.history),
                  converged=t.converged, n_converged=t.n_converged,
                  flagged=t.is_artifact)
            for t in trajs
        ])

    levels = per_channel[0]
    if len(per_channel) == 2:
        levels = _merge_channels(per_channel[0], per_channel[1], tol)

    if not levels:
        raise NoRealRoots(f"no real quantization roots up to n={n_max}")

    levels.sort(key=lambda lv: lv.energy)
    idx = 0
    for lv in levels:
        if lv.flagged:
            lv.index = -1
        else:
            lv.index = idx
            idx += 1
    return SpectrumResult(
        levels=levels,
        iterations_used=n_max,
        z0=z0,
        discarded_first_root=discarded,
    )


def _merge_channels(first: list[Level], second: list[Level],
                    tol: float) -> list[Level]:
    """Union of the two channels' levels with duplicates collapsed.

    An energy from the second channel within tolerance of one already
    kept is dropped; on a flag disagreement the first channel's verdict
    stands.
    """
    out = list(first)
    win = max(100 * tol, 1e-9)
    for lv in second:
        if all(abs(kept.energy - lv.energy) > win for kept in out):
            out.append(lv)
    return out


# ---------------------------------------------------------------------------
# polynomial eigenfunctions


def _z_poly_at_E(p: BiPoly, energy: float) -> np.ndarray:
    """Collapse an exact bivariate polynomial to float z-coefficients."""
    out = np.zeros(max(p.deg_z, 0) + 1)
    for (dz, de), c in p.terms.items():
        out[dz] += float(c) * energy ** de
    return out


def _trim(a: np.ndarray) -> np.ndarray:
    nz = np.nonzero(a)[0]
    return a[: nz[-1] + 1] if nz.size else a[:1]


def polynomial_eigenfunction(seed: CoeffQuartet, energy: float, max_deg: int = 8,
                             sample_tol: float = 1e-8) -> PolyEigenfunction:
    """Polynomial spinor solution at a candidate energy, or proof of none.

    Denominators are cleared from both coupled equations, the unknown
    coefficients of (phi1, phi2) up to max_deg are assembled into one
    homogeneous linear system over the z-power basis, and the kernel
    direction belonging to the smallest singular value is extracted.
    The candidate is normalized so its largest coefficient is exactly 1
    and checked against the original first-order system on 16 sample
    points in [0.1, 1.6]; a relative residual above sample_tol raises
    NotPolynomial.
    """
    energy = float(energy)
    na, da = _z_poly_at_E(seed.a0.num, energy), _z_poly_at_E(seed.a0.den, energy)
    nb, db = _z_poly_at_E(seed.b0.num, energy), _z_poly_at_E(seed.b0.den, energy)
    nc, dc = _z_poly_at_E(seed.c0.num, energy), _z_poly_at_E(seed.c0.den, energy)
    nd, dd = _z_poly_at_E(seed.d0.num, energy), _z_poly_at_E(seed.d0.den, energy)

    m = max_deg + 1
    # eq1: (da*db)*phi1' - (na*db)*phi1 - (nb*da)*phi2 = 0
    # eq2: (dc*dd)*phi2' - (nc*dd)*phi2 - (nd*dc)*phi1 = 0
    dab, nadb, nbda = np.convolve(da, db), np.convolve(na, db), np.convolve(nb, da)
    dcd, ncdd, nddc = np.convolve(dc, dd), np.convolve(nc, dd), np.convolve(nd, dc)

    width = max(x.size for x in (dab, nadb, nbda, dcd, ncdd, nddc)) + m

    def column(mult: np.ndarray, j: int, derivative: bool) -> np.ndarray:
        if derivative:
            if j == 0:
                return np.zeros(width)
            basis = np.zeros(j)
            basis[j - 1] = j
        else:
            basis = np.zeros(j + 1)
            basis[j] = 1.0
        prod = np.convolve(mult, basis)
        col = np.zeros(width)
        col[: prod.size] = prod
        return col

    M = np.zeros((2 * width, 2 * m))
    for j in range(m):
        M[:width, j] = column(dab, j, True) - column(nadb, j, False)
        M[:width, m + j] = -column(nbda, j, False)
        M[width:, m + j] = column(dcd, j, True) - column(ncdd, j, False)
        M[width:, j] = -column(nddc, j, False)

    _, _, vh = np.linalg.svd(M)
    v = vh[-1]
    v = v / v[np.argmax(np.abs(v))]
    phi1, phi2 = _trim(v[:m]), _trim(v[m:])

    pv = np.polynomial.polynomial.polyval
    pd = np.polynomial.polynomial.polyder
    zs = np.linspace(0.1, 1.6, 16)
    p1, p2 = pv(zs, phi1), pv(zs, phi2)
    d1 = pv(zs, pd(phi1)) if phi1.size > 1 else np.zeros_like(zs)
    d2 = pv(zs, pd(phi2)) if phi2.size > 1 else np.zeros_like(zs)
    a0v, b0v = pv(zs, na) / pv(zs, da), pv(zs, nb) / pv(zs, db)
    c0v, d0v = pv(zs, nc) / pv(zs, dc), pv(zs, nd) / pv(zs, dd)
    r1 = d1 - a0v * p1 - b0v * p2
    r2 = d2 - c0v * p2 - d0v * p1
    scale = 1.0 + np.abs(a0v * p1) + np.abs(b0v * p2) \
        + np.abs(c0v * p2) + np.abs(d0v * p1)
    residual = float(np.max((np.abs(r1) + np.abs(r2)) / scale))
    if residual > sample_tol:
        raise NotPolynomial(
            f"no polynomial solution at E={energy!r} (residual {residual:.3e})"
        )
    return PolyEigenfunction(energy=energy, phi1=phi1, phi2=phi2,
                             residual=residual)


# ---------------------------------------------------------------------------
# two-variable wavefunction assembly


def assemble_wavefunction(case: str, k, phi, grid):
    """Lift the one-variable spinor back to the two-mode chart.

    Case 'K' (z = x*y): psi_up = x^k*phi1(x*y), psi_down =
    x^(k+1)*phi2(x*y).  Case 'N' (z = y/x): psi_down = x^k*phi1(y/x),
    psi_up = x^(k+1)*phi2(y/x); x = 0 is outside that chart.  Returns
    broadcast (x, y, psi_up, psi_down) arrays.
    """
    phi1 = np.asarray(phi[0], dtype=float)
    phi2 = np.asarray(phi[1], dtype=float)
    gx, gy = grid
    x, y = np.broadcast_arrays(np.asarray(gx, dtype=float),
                               np.asarray(gy, dtype=float))
    kf = float(k) if isinstance(k, float) else float(rat(k))
    pv = np.polynomial.polynomial.polyval
    if case == "K":
        z = x * y
        psi_up = x ** kf * pv(z, phi1)
        psi_down = x ** (kf + 1) * pv(z, phi2)
    elif case == "N":
        if np.any(x == 0):
            raise DomainError("x = 0 lies outside the z = y/x chart")
        z = y / x
        psi_down = x ** kf * pv(z, phi1)
        psi_up = x ** (kf + 1) * pv(z, phi2)
    else:
        raise ValueError(f"case must be 'K' or 'N', got {case!r}")
    return x, y, psi_up, psi_down
