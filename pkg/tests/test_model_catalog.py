"""Model patterns, symmetry classification, seeds, closed forms."""

import math

import pytest

from spinaim.exact_algebra import BiPoly, RatFunc, rat
from spinaim.model_catalog import (
    BadPattern,
    CoeffQuartet,
    ComplexEnergy,
    ConstraintViolation,
    ModelSpec,
    SingularSystem,
    SymmetryClass,
    ZeroFrequency,
    closed_form_dirac,
    closed_form_jc,
    closed_form_mjc,
    reduce_to_coupled_ode,
    rescaled_seed,
    seed_jc,
    seed_jt,
    seed_rashba,
    validate_model,
)

QUARTET = ("a0", "b0", "c0", "d0")


def quartets_equal(p: CoeffQuartet, q: CoeffQuartet) -> bool:
    return all(getattr(p, n) == getattr(q, n) for n in QUARTET)


class TestValidateModel:
    def test_all_couplings_zero_is_every_class(self):
        v = validate_model(ModelSpec(omega1=1, omega2=1))
        assert set(v.classes) == {SymmetryClass.K1, SymmetryClass.N1,
                                  SymmetryClass.K2, SymmetryClass.N2}
        assert v.hermitian

    def test_single_kappa1(self):
        v = validate_model(ModelSpec(omega1=1, kappa1=1))
        assert v.classes == [SymmetryClass.N1, SymmetryClass.K2]
        assert not v.hermitian   # gamma2 != kappa1

    def test_single_gamma1(self):
        v = validate_model(ModelSpec(omega1=1, gamma1=1))
        assert v.classes == [SymmetryClass.K1, SymmetryClass.N2]

    def test_jt_pattern(self):
        v = validate_model(ModelSpec.jt("1/2", omega0="1/4", k=2))
        assert v.classes == [SymmetryClass.K2]
        assert v.hermitian

    def test_no_class(self):
        m = ModelSpec(omega1=1, kappa1=1, kappa2=1, kappa3=1, kappa4=1,
                      gamma1=1, gamma2=1, gamma3=1, gamma4=1)
        v = validate_model(m)
        assert v.classes == [SymmetryClass.NONE]
        assert v.hermitian

    def test_non_hermitian(self):
        assert not validate_model(ModelSpec(omega1=1, kappa3=1)).hermitian


def _eval(f: RatFunc, z, E) -> object:
    """Exact evaluation of a coefficient function at rational (z, E)."""
    z, E = rat(z), rat(E)
    num = den = rat(0)
    for (dz, de), c in f.num.terms.items():
        num += c * z ** dz * E ** de
    for (dz, de), c in f.den.terms.items():
        den += c * z ** dz * E ** de
    return num / den


class TestSeeds:
    def test_jt_values_match_hand_formulas(self):
        kap, w0, k = rat("1/3"), rat("1/5"), rat(2)
        q = kap * kap
        s = seed_jt(ModelSpec.jt(kap, omega0=w0, k=k))
        z, E = rat("2/7"), rat("3/11")
        assert _eval(s.a0, z, E) == (q - 2 * w0 - 2 * k - 2 + 2 * E) / (4 * z - q)
        assert _eval(s.b0, z, E) == kap * (w0 + k + 2 * z + E) / (q - 4 * z)
        assert _eval(s.c0, z, E) == (q * (1 + k + z) + 2 * z * (w0 - k + E - 2)) \
            / (z * (4 * z - q))
        assert _eval(s.d0, z, E) == kap * (E - w0 - k + 2 * z - 1) / (z * (q - 4 * z))

    def test_rashba_values_match_hand_formulas(self):
        kap, w0, k = rat("2/5"), rat("1/7"), rat(1)
        q = kap * kap
        s = seed_rashba(ModelSpec.rashba(kap, omega0=w0, k=k))
        z, E = rat("3/4"), rat("-2/3")
        assert _eval(s.a0, z, E) == (q - 2 * w0 - 2 * k + 2 * E - 2) / (4 * z + q)
        assert _eval(s.b0, z, E) == kap * (2 * z - w0 - k - E) / (q + 4 * z)
        assert _eval(s.c0, z, E) == (q * (z - k - 1) + 2 * z * (w0 - k - 2 + E)) \
            / (z * (4 * z + q))
        assert _eval(s.d0, z, E) == kap * (E - w0 - k - 2 * z - 1) / (z * (q + 4 * z))

    def test_jc_values_match_hand_formulas(self):
        kap, w, w0, k = rat("1/2"), rat(2), rat("1/4"), rat(3)
        s = seed_jc(ModelSpec.jc(kap, omega=w, omega0=w0, k=k))
        z, E = rat("5/6"), rat("7/9")
        assert _eval(s.a0, z, E) == -(kap * kap + w * (E - k * w + w0)) / (w * w * z)
        assert _eval(s.b0, z, E) == kap * (E - w0) / (w * w * z)
        assert _eval(s.c0, z, E) == (-E + w + k * w + w0) / (w * z)
        assert _eval(s.d0, z, E) == kap / (w * z)

    def test_jt_requires_unit_frequencies(self):
        q = rat("1/2")
        bad = ModelSpec(omega1=2, omega2=2, kappa1=q, kappa4=q,
                        gamma2=q, gamma3=q)
        with pytest.raises(BadPattern):
            seed_jt(bad)

    def test_jt_rejects_asymmetric_couplings(self):
        bad = ModelSpec(omega1=1, omega2=1, kappa1="1/2", kappa4="1/3",
                        gamma2="1/2", gamma3="1/2")
        with pytest.raises(BadPattern):
            seed_jt(bad)

    def test_rashba_sign_pattern_enforced(self):
        with pytest.raises(BadPattern):
            seed_rashba(ModelSpec.jt("1/2"))

    def test_jc_zero_frequency(self):
        with pytest.raises(ZeroFrequency):
            seed_jc(ModelSpec.jc("1/2", omega=0))
        with pytest.raises(ZeroFrequency):
            rescaled_seed("jc", "1/4", omega=0)

    def test_jc_rejects_extra_couplings(self):
        m = ModelSpec(omega1=1, kappa1="1/2", gamma2="1/2", kappa3="1/9")
        with pytest.raises(BadPattern):
            seed_jc(m)


class TestRescaledSeeds:
    @pytest.mark.parametrize("model,kap", [("jt", "1/3"), ("rashba", "2/7")])
    def test_component_rescale_relation(self, model, kap):
        """phi2 -> kappa*phi2 sends (b0, d0) to (b0/kappa, kappa*d0)."""
        kap = rat(kap)
        factory = getattr(ModelSpec, model)
        seeder = seed_jt if model == "jt" else seed_rashba
        plain = seeder(factory(kap, omega0="1/6", k=1))
        resc = rescaled_seed(model, kap * kap, omega0="1/6", k=1)
        scale = RatFunc.const(kap)
        inv = RatFunc.const(1 / kap)
        assert resc.a0 == plain.a0
        assert resc.c0 == plain.c0
        assert resc.b0 == plain.b0 * inv
        assert resc.d0 == plain.d0 * scale

    def test_jc_rescale_relation(self):
        kap = rat("3/5")
        plain = seed_jc(ModelSpec.jc(kap, omega=2, omega0="1/3", k=2))
        resc = rescaled_seed("jc", kap * kap, omega0="1/3", k=2, omega=2)
        assert resc.a0 == plain.a0
        assert resc.c0 == plain.c0
        assert resc.b0 == plain.b0 * RatFunc.const(1 / kap)
        assert resc.d0 == plain.d0 * RatFunc.const(kap)

    def test_negative_square_allowed(self):
        s = rescaled_seed("jc", "-1/4", omega0="1/2", k=0)
        assert not s.d0.is_zero

    def test_unknown_model(self):
        with pytest.raises(BadPattern):
            rescaled_seed("holstein", "1/4")


class TestQuartetInvariant:
    def test_rejects_quadratic_energy_dependence(self):
        Z, E = BiPoly.z(), BiPoly.E()
        good = RatFunc(E + BiPoly.const(1), Z)
        bad = RatFunc(E * E, Z)
        with pytest.raises(ValueError):
            CoeffQuartet(good, bad, good, good)


class TestReduction:
    def test_matches_jt_seed_exactly(self):
        for kap, w0, k in (("1/2", "0", 0), ("2/3", "1/5", 1), ("5", "1/2", "1/2")):
            m = ModelSpec.jt(kap, omega0=w0, k=k)
            assert quartets_equal(seed_jt(m), reduce_to_coupled_ode(m, "K"))

    def test_matches_rashba_seed_exactly(self):
        for kap, w0, k in (("1/3", "0", 0), ("7/4", "2/7", 3)):
            m = ModelSpec.rashba(kap, omega0=w0, k=k)
            assert quartets_equal(seed_rashba(m), reduce_to_coupled_ode(m, "K"))

    def test_matches_jc_seed_exactly(self):
        for kap, w, w0, k in (("1/2", 1, "0", 0), ("3/7", 2, "1/4", 2)):
            m = ModelSpec.jc(kap, omega=w, omega0=w0, k=k)
            assert quartets_equal(seed_jc(m), reduce_to_coupled_ode(m, "N"))

    def test_case_constraint_enforced(self):
        with pytest.raises(ConstraintViolation):
            reduce_to_coupled_ode(ModelSpec.jt("1/2"), "N")
        with pytest.raises(ConstraintViolation):
            reduce_to_coupled_ode(ModelSpec(omega1=1, gamma1=1), "K")

    def test_degenerate_two_mode_system_is_singular(self):
        with pytest.raises(SingularSystem):
            reduce_to_coupled_ode(ModelSpec.mjc("1/2"), "N")

    def test_unknown_case(self):
        with pytest.raises(ValueError):
            reduce_to_coupled_ode(ModelSpec.jt("1/2"), "Q")


class TestClosedForms:
    def test_jc_perfect_square_is_exact(self):
        # radicand 4*(3/4)*1 + 1 = 4
        lo, hi = closed_form_jc(0, 1, 1, 0, "3/4")
        assert (lo, hi) == (-0.5, 1.5)

    def test_jc_irrational_pair(self):
        lo, hi = closed_form_jc(1, 1, 1, "3/10", "1/4")
        base, half = 1.5, math.sqrt(4 * 0.25 * 2 + 1.6 ** 2) / 2
        assert lo == pytest.approx(base - half, abs=1e-14)
        assert hi == pytest.approx(base + half, abs=1e-14)

    def test_jc_negative_radicand(self):
        with pytest.raises(ComplexEnergy):
            closed_form_jc(0, 9, 1, 0, "1/4")

    def test_jc_rejects_bad_branch(self):
        with pytest.raises(ValueError):
            closed_form_jc(0, 0, 1, 0, "1/4")

    def test_mjc_sqrt3_pair(self):
        lo, hi = closed_form_mjc(1, 1, "1/2", 1)
        assert lo == pytest.approx(2.5 - math.sqrt(3) / 2, abs=1e-14)
        assert hi == pytest.approx(2.5 + math.sqrt(3) / 2, abs=1e-14)

    def test_mjc_uncoupled_exact(self):
        assert closed_form_mjc(2, 1, 0, "1/4") == (3.25, 3.75)

    def test_mjc_degeneracy_exact(self):
        want = float(rat(4) + rat("3/2"))
        assert closed_form_mjc(4, 5, "9/2", "1/2") == (want, want)

    def test_dirac_sign_combinations(self):
        levels = closed_form_dirac(1, 1, "1/10", 1, 3, 1)
        combos = {(lv.inner_sign, lv.outer_sign) for lv in levels}
        assert combos == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
        for lv in levels:
            assert lv.is_real
            want = math.sqrt(4 - 0.4 * (3 + lv.inner_sign)) / 2
            assert abs(lv.energy) == pytest.approx(want, abs=1e-14)
            assert math.copysign(1, lv.energy) == lv.outer_sign

    def test_dirac_complex_branch_flagged(self):
        # inner=+1 radicand negative, inner=-1 positive
        levels = closed_form_dirac(1, 1, 1, 1, 1, 2)
        by_inner = {lv.inner_sign: lv for lv in levels if lv.outer_sign == 1}
        assert not by_inner[1].is_real and by_inner[1].energy is None
        assert by_inner[-1].is_real

    def test_dirac_perfect_square_exact(self):
        # 4*1 - 4*(1/4)*(k+n) with k=2, n=1: radicand 1
        levels = closed_form_dirac(1, 1, "1/4", 1, 2, 1)
        plus = [lv for lv in levels if lv.inner_sign == 1]
        assert {lv.energy for lv in plus} == {0.5, -0.5}
