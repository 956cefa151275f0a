"""Acceptance gate: one test per headline guarantee, each at its stated
tolerance.

Known red: the strong-coupling reference table (criterion 1) quotes one
entry, kappa_sq=20, from a lower iteration order than the n=14 the
solver runs to, so that single line fails honestly.  The solver value
is the converged one; see README for the order-by-order history.
"""

import random

import pytest
import sympy as sp

from spinaim.aim_engine import (
    NotPolynomial,
    aim_step,
    initial_row,
    polynomial_eigenfunction,
    solve_spectrum,
)
from spinaim.exact_algebra import BiPoly, Rat, RatFunc
from spinaim.model_catalog import (
    ModelSpec,
    closed_form_jc,
    reduce_to_coupled_ode,
    rescaled_seed,
    seed_jc,
    seed_jt,
    seed_rashba,
)
from spinaim.verify import (
    suite_convergence,
    suite_dirac,
    suite_jc_grid,
    suite_mjc,
    suite_table1,
)


def _all_ok(lines):
    bad = [l.render() for l in lines if not l.ok]
    assert not bad, "{} of {} checks failed:\n{}".format(
        len(bad), len(lines), "\n".join(bad))


def test_criterion_1_strong_coupling_table():
    """Lowest level of the symmetric two-mode model over 12 couplings,
    1e-3 against the published table.  The kappa_sq=20 entry is known
    to fail; the table value there predates convergence."""
    _all_ok(suite_table1())


def test_criterion_2_convergence_fingerprint():
    """Order-by-order history of one strong-coupling level must hit the
    recorded values: 1e-3 at orders 10 and 11, 1e-5 from 12 to 14."""
    _all_ok(suite_convergence())


def test_criterion_3_rotating_wave_grid():
    """Every converged level equals a closed-form energy to 1e-8 over a
    36-point parameter grid, and moving the evaluation point z0 from 0
    to 1/2 changes neither the count nor the values."""
    _all_ok(suite_jc_grid())


def test_criterion_4_exact_level_families():
    """Degenerate-pair and uncoupled energies exactly, plus the
    relativistic oscillator mapped through the rotating-wave closed form
    at 1e-12 with consistent complex-branch handling."""
    _all_ok(suite_mjc() + suite_dirac())


def test_criterion_5_polynomial_eigenfunctions():
    """At closed-form energies the spinor components are polynomials of
    degree n-1 (stray coefficients below 1e-8, residual below 1e-8);
    off-spectrum energies are refused."""
    seed = rescaled_seed("jc", "1/4", "3/10", 2, 1)
    for n in (1, 2, 3):
        for energy in closed_form_jc(2, n, 1, "3/10", "1/4"):
            fn = polynomial_eigenfunction(seed, energy)
            assert fn.residual <= 1e-8
            for phi in (fn.phi1, fn.phi2):
                sig = [i for i, c in enumerate(phi) if abs(c) > 1e-8]
                assert sig == [n - 1], (n, energy, phi)
            with pytest.raises(NotPolynomial):
                polynomial_eigenfunction(seed, energy + 0.1)


def _rand_rat(rng):
    return Rat(rng.randint(-6, 6), rng.randint(1, 5))


def _rand_bipoly(rng):
    terms = {}
    for _ in range(rng.randint(1, 5)):
        terms[(rng.randint(0, 3), rng.randint(0, 2))] = _rand_rat(rng)
    return BiPoly(terms)


def _rand_den(rng):
    while True:
        terms = {(rng.randint(0, 3), 0): _rand_rat(rng)
                 for _ in range(rng.randint(1, 3))}
        p = BiPoly(terms)
        if not p.is_zero:
            return p


def _ratfunc_to_sympy(rf, z, E):
    def poly(bp):
        return sp.Add(*(sp.Rational(int(c.numerator), int(c.denominator))
                        * z**i * E**j for (i, j), c in bp.terms.items()))
    return poly(rf.num) / poly(rf.den)


def _physical_energies(seed, n_max):
    res = solve_spectrum(seed, 0, n_max, 1e-6)
    return [lv.energy for lv in res.levels if lv.index >= 0]


def test_criterion_6_structural_properties():
    """Derivation linearity, the Leibniz rule and canonicalization
    idempotence over 1000 random exact cases; spectra invariant under
    kappa -> -kappa to 1e-12; the generic reduction reproducing every
    hand-built seed exactly; and the iteration matching an independent
    symbolic derivation through order 4."""
    rng = random.Random(318)
    for _ in range(1000):
        p, q = _rand_bipoly(rng), _rand_bipoly(rng)
        alpha, beta = _rand_rat(rng), _rand_rat(rng)
        lhs = (p.scale(alpha) + q.scale(beta)).derive_z()
        assert lhs == p.derive_z().scale(alpha) + q.derive_z().scale(beta)
        assert (p * q).derive_z() == p.derive_z() * q + p * q.derive_z()
        den = _rand_den(rng)
        r = RatFunc(p, den)
        again = RatFunc(r.num, r.den)
        assert again.num == r.num and again.den == r.den
        mult = _rand_den(rng)
        assert RatFunc(p * mult, den * mult) == r

    for plus, minus in (
        (ModelSpec.jt("1/2"), ModelSpec.jt("-1/2")),
        (ModelSpec.jc("1/2", 1, "1/4"), ModelSpec.jc("-1/2", 1, "1/4")),
    ):
        builder = seed_jt if plus.omega2 == 1 else seed_jc
        n_max = 12 if plus.omega2 == 1 else 10
        ep = _physical_energies(builder(plus), n_max)
        em = _physical_energies(builder(minus), n_max)
        assert len(ep) == len(em)
        assert all(abs(a - b) <= 1e-12 for a, b in zip(ep, em))

    for build, case, m in (
        (seed_jt, "K", ModelSpec.jt("2/3", omega0="1/5", k=1)),
        (seed_rashba, "K", ModelSpec.rashba("7/4", omega0="2/7", k=3)),
        (seed_jc, "N", ModelSpec.jc("3/7", 2, "1/4", 2)),
    ):
        want, got = build(m), reduce_to_coupled_ode(m, case)
        assert (want.a0 == got.a0 and want.b0 == got.b0
                and want.c0 == got.c0 and want.d0 == got.d0)

    z, E = sp.symbols("z E")
    for seed in (seed_jt(ModelSpec.jt("1/2", omega0="1/5", k=1)),
                 seed_jc(ModelSpec.jc("1/3", 2, "1/4", 1))):
        a = _ratfunc_to_sympy(seed.a0, z, E)
        b = _ratfunc_to_sympy(seed.b0, z, E)
        c = _ratfunc_to_sympy(seed.c0, z, E)
        d = _ratfunc_to_sympy(seed.d0, z, E)
        sa, sb, sc, sd = a, b, c, d
        row = initial_row(seed)
        for _ in range(4):
            row = aim_step(seed, row)
            sa, sb, sc, sd = (
                sp.cancel(a * sa + sp.diff(sa, z) + d * sb),
                sp.cancel(b * sa + sp.diff(sb, z) + c * sb),
                sp.cancel(c * sc + sp.diff(sc, z) + b * sd),
                sp.cancel(d * sc + sp.diff(sd, z) + a * sd),
            )
            for got_rf, want in ((row.a, sa), (row.b, sb),
                                 (row.c, sc), (row.d, sd)):
                gn, gd = sp.fraction(sp.together(_ratfunc_to_sympy(got_rf, z, E)))
                wn, wd = sp.fraction(sp.together(want))
                assert sp.expand(gn * wd - wn * gd) == 0
