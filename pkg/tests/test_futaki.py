import logging

import pytest

from conftest import random_class, random_geometry
from src.cli.commands.family import make_ruled_example, make_split_example
from src.core.chern import NSClass, SheafData, euler_char, extension_sum, intersect, slope
from src.core.exactcore import (K, Rat, coefficient, constant_term, degree, poly, substitute,
                                terms, value_at)
from src.core.futaki import (IntersectionProfile, TestConfig, closed_form_c1_c2,
                             closed_form_c3_c4, equal_slope_criterion, futaki_invariant,
                             hilbert_poly, weight_poly)
from src.utils.constants import Nonproduct, Sign, Verdict
from src.utils.errors import ProfileError, RankError, SheafError, SlopeMismatchError


class TestTestConfig:
    """テスト配置の前提"""

    def test_quotient(self, ruled_example):
        tc = ruled_example.test_config
        assert tc.G.c1 == NSClass((-2, 1))
        assert tc.G.ch2 == -2
        assert tc.G.rank == 1

    def test_requires_rank_two(self, ruled_example):
        ex = ruled_example
        with pytest.raises(RankError):
            TestConfig(ex.F1, ex.F2, ex.geom, ex.omega)
        with pytest.raises(RankError):
            TestConfig(ex.E, ex.E, ex.geom, ex.omega)

    def test_requires_line_subbundle(self, ruled_example):
        ex = ruled_example
        twisted = SheafData(1, ex.F2.c1, ex.F2.ch2 - 1)
        with pytest.raises(SheafError):
            TestConfig(ex.E, twisted, ex.geom, ex.omega)

    def test_requires_line_quotient(self, ruled_example):
        ex = ruled_example
        E = SheafData(2, ex.E.c1, ex.E.ch2 + 1)
        with pytest.raises(SheafError):
            TestConfig(E, ex.F2, ex.geom, ex.omega)


class TestGeneratingPolynomials:
    """p(r) と w(r)"""

    def test_hilbert_poly_at_first_power(self, ruled_example):
        tc = ruled_example.test_config
        assert substitute(hilbert_poly(tc), r=1) == euler_char(tc.E, tc.geom, tc.omega, K)

    def test_weight_poly_matches_direct_sum(self, ruled_example):
        tc = ruled_example.test_config
        w = weight_poly(tc)
        for k0 in (Rat(1), Rat(7, 3), Rat(10)):
            for r0 in range(1, 21):
                direct = 0
                for i in range(r0 + 1):
                    line = SheafData.line(tc.F.c1 * i + tc.G.c1 * (r0 - i), tc.geom)
                    direct += i * constant_term(euler_char(line, tc.geom, tc.omega, k0 * r0))
                assert value_at(w, r=r0, k=k0) == direct

    def test_leading_coefficients(self, ruled_example):
        report = futaki_invariant(ruled_example.test_config)
        assert report.a0 == poly(3 * K ** 2 - 5 * K + Rat(1, 2))
        assert report.a1 == poly(3 * K ** 2 - 4 * K + Rat(5, 2))
        assert report.b0 == poly(Rat(3, 2) * K ** 2 - Rat(5, 2) * K + Rat(7, 12))
        assert report.b1 == poly(Rat(3, 2) * K ** 2 - 2 * K + Rat(11, 6))


class TestFutakiInvariant:
    """F1 = b0*a1 - b1*a0"""

    def test_ruled_example(self, ruled_example):
        report = futaki_invariant(ruled_example.test_config)
        assert report.C == (0, Rat(-3, 4), Rat(19, 12), Rat(13, 24))
        assert report.F1 == poly(Rat(-3, 4) * K ** 2 + Rat(19, 12) * K + Rat(13, 24))
        assert report.sign == Sign.NEGATIVE
        assert report.verdict == Verdict.K_UNSTABLE
        assert report.k_threshold == Rat(28, 9)
        assert report.discrepancies == []
        assert report.closed_forms == {"C1": 0, "C2": Rat(-3, 4),
                                       "C3": Rat(19, 12), "C4": Rat(13, 24)}

    def test_no_k4_term(self, random_test_configs):
        for tc in random_test_configs:
            report = futaki_invariant(tc)
            top = report.b0 * report.a1 - report.b1 * report.a0
            assert constant_term(coefficient(top, "k", 4)) == 0
            assert degree(report.F1, "k") <= 3
            assert not [d for d in report.discrepancies if d.name.startswith("k^")]

    def test_c1_closed_form_is_half_the_expansion(self, random_test_configs):
        for tc in random_test_configs:
            report = futaki_invariant(tc)
            c1_closed, c2_closed = closed_form_c1_c2(tc)
            assert report.C[0] == 2 * c1_closed
            assert report.C[1] == c2_closed

    def test_c1_against_slope_gap(self, random_test_configs):
        for tc in random_test_configs:
            geom, omega = tc.geom, tc.omega
            gap = slope(tc.E, geom, omega) - slope(tc.F, geom, omega)
            omega_sq = intersect(omega, omega, geom)
            c1_closed, _ = closed_form_c1_c2(tc)
            assert c1_closed == omega_sq * gap / 12
            assert futaki_invariant(tc).C[0] == omega_sq * gap / 6

    @pytest.mark.parametrize("scale", [2, 3])
    def test_scaling_polarization(self, random_test_configs, scale):
        for tc in random_test_configs[:25]:
            report = futaki_invariant(tc)
            scaled = futaki_invariant(TestConfig(tc.E, tc.F, tc.geom, scale * tc.omega,
                                                 tc.nonproduct))
            # F1 for scale*ω is F1(scale*k)
            assert scaled.C == tuple(c * scale ** (3 - n) for n, c in enumerate(report.C))
            assert scaled.sign == report.sign
            assert scaled.verdict == report.verdict

    def test_scaling_keeps_unstable_verdict(self):
        for g, m in [(2, 1), (3, 2), (5, 0)]:
            ex = make_ruled_example(g, m)
            tc = ex.test_config
            report = futaki_invariant(TestConfig(tc.E, tc.F, tc.geom, 4 * tc.omega,
                                                 tc.nonproduct))
            assert report.verdict == Verdict.K_UNSTABLE

    def test_c1_scales_by_eight(self):
        tc = make_split_example()
        doubled = TestConfig(tc.E, tc.F, tc.geom, 2 * tc.omega, tc.nonproduct)
        assert futaki_invariant(doubled).C[0] == 8 * futaki_invariant(tc).C[0]
        assert closed_form_c1_c2(doubled)[0] == 8 * closed_form_c1_c2(tc)[0]

    def test_split_example_records_c1_discrepancy(self, caplog):
        with caplog.at_level(logging.WARNING):
            report = futaki_invariant(make_split_example())
        assert report.C[0] == Rat(1, 3)
        assert report.closed_forms["C1"] == Rat(1, 6)
        names = [d.name for d in report.discrepancies]
        assert "C1" in names
        assert "C1: expansion 1/3, closed form 1/6" in caplog.text
        assert report.verdict == Verdict.INCONCLUSIVE

    def test_direct_sum_of_equal_lines_vanishes(self, rng):
        for _ in range(10):
            geom = random_geometry(rng)
            F = SheafData.line(random_class(rng), geom)
            omega = NSClass((rng.randint(1, 3), rng.randint(1, 3)))
            report = futaki_invariant(TestConfig(extension_sum(F, F), F, geom, omega))
            assert terms(report.F1) == {}
            assert report.sign == Sign.ZERO

    def test_abelian_like_vanishes(self, abelian_like):
        report = futaki_invariant(abelian_like)
        assert terms(report.F1) == {}
        assert report.verdict == Verdict.NOT_K_POLYSTABLE
        assert closed_form_c3_c4(abelian_like) == (0, 0)

    def test_zero_without_nonproduct_is_inconclusive(self, abelian_like):
        tc = TestConfig(abelian_like.E, abelian_like.F, abelian_like.geom, abelian_like.omega,
                        Nonproduct.UNKNOWN)
        assert futaki_invariant(tc).verdict == Verdict.INCONCLUSIVE


class TestClosedForms:
    """一般次元の C1, C2"""

    def test_general_dimension(self):
        profile = {"b": 3, "omega_b": 6, "c1E_omega": 4, "c1F_omega": 1,
                   "c1B_omega": 0, "mixed_c1B": 0, "ch2_diff": 0}
        assert closed_form_c1_c2(profile) == (Rat(1, 12), Rat(1, 6))

    def test_profile_accepts_rational_strings(self):
        profile = IntersectionProfile.from_mapping(
            {"b": 2, "omega_b": "1/2", "c1E_omega": 1, "c1F_omega": 0,
             "c1B_omega": 0, "mixed_c1B": 0, "ch2_diff": 0})
        assert profile.omega_b == Rat(1, 2)

    def test_profile_errors(self):
        with pytest.raises(ProfileError):
            IntersectionProfile.from_mapping({"b": 2, "omega_b": 1})
        with pytest.raises(ProfileError):
            IntersectionProfile.from_mapping(
                {"b": 1, "omega_b": 1, "c1E_omega": 1, "c1F_omega": 0,
                 "c1B_omega": 0, "mixed_c1B": 0, "ch2_diff": 0})

    def test_surface_profile_matches_test_config(self, ruled_example):
        tc = ruled_example.test_config
        profile = IntersectionProfile.from_test_config(tc)
        assert profile.omega_b == 6
        assert closed_form_c1_c2(profile) == closed_form_c1_c2(tc)


class TestEqualSlopeCriterion:

    def test_ruled_example(self, ruled_example):
        result = equal_slope_criterion(ruled_example.test_config)
        assert result.Q == -3
        assert result.verdict == Verdict.K_UNSTABLE
        assert result.c2_sign_agrees

    def test_boundary_is_inconclusive(self):
        result = equal_slope_criterion(make_ruled_example(2, 0).test_config)
        assert result.Q == 0
        assert result.verdict == Verdict.INCONCLUSIVE
        assert result.c2_sign_agrees is None

    def test_requires_equal_slopes(self):
        with pytest.raises(SlopeMismatchError):
            equal_slope_criterion(make_split_example())
