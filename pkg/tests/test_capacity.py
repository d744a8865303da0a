import math

import mpmath as mp
import pytest

from fisher_ec import quadrature
from fisher_ec.capacity import (
    Scheme,
    SchemeKind,
    ci_target_snr,
    cutoff_function,
    ec_asym,
    ec_ci,
    ec_ci_asym,
    ec_ci_asym_true_mean,
    ec_closed,
    ec_opra,
    ec_opra_asym,
    ec_opra_asym_true_mean,
    ec_ora,
    ec_ora_asym,
    ec_ora_asym_true_mean,
    ec_quadrature,
    ec_tci,
    ec_tci_asym,
    ec_tci_asym_true_mean,
    opra_power_ratio,
    solve_opra_cutoff,
    verify_power_constraint,
)
from fisher_ec.errors import BracketError, DivergenceError, DomainError
from fisher_ec.fading import FadingParams
from fisher_ec.special import digamma

from conftest import grid

REF = FadingParams(2.5, 1.5, 10.0)


def _schemes(m):
    out = [Scheme("opra"), Scheme("ora"), Scheme("tci", 1.0)]
    if m > 1.0:
        out.append(Scheme("ci"))
    return out


class TestScheme:
    def test_kind_coerced(self):
        assert Scheme("ora").kind is SchemeKind.ORA

    @pytest.mark.parametrize("args", [("tci",), ("tci", 0.0), ("tci", -1.0), ("ora", 1.0),
                                      ("ci", 0.5)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            Scheme(*args)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            Scheme("waterfill")


class TestPowerRatio:
    def test_examples(self):
        assert opra_power_ratio(3.0, 3.0) == 0.0
        assert opra_power_ratio(2.0, 1.0) == 0.5
        assert opra_power_ratio(0.1, 1.0) == 0.0

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            opra_power_ratio(0.0, 1.0)


class TestCutoff:
    def test_matches_quadrature_root(self):
        sol = solve_opra_cutoff(REF)
        assert abs(sol.gamma0 - quadrature.opra_cutoff(REF)) < 1e-8
        assert abs(sol.residual) < 1e-10

    def test_near_one_at_high_snr(self):
        assert abs(solve_opra_cutoff(REF.scaled(1e7)).gamma0 - 1.0) < 1e-3

    @pytest.mark.parametrize("m, ms", [(0.5, 1.5), (1.0, 5.0), (3.5, 2.5)])
    def test_range_and_monotone(self, m, ms):
        prev = 0.0
        for g in (1.0, 10.0, 1e2, 1e4, 1e8):
            g0 = solve_opra_cutoff(FadingParams(m, ms, g)).gamma0
            assert 0.0 < g0 <= 1.0 and g0 >= prev
            prev = g0

    def test_cutoff_function_decreasing(self):
        vals = [cutoff_function(REF, g) for g in (1e-6, 1e-3, 0.1, 0.5, 0.9, 1.0)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_tol_floor(self):
        with pytest.raises(DomainError):
            solve_opra_cutoff(REF, tol=1e-14)

    def test_looser_tol_still_brackets(self):
        sol = solve_opra_cutoff(REF, tol=1e-4)
        lo, hi = sol.bracket
        assert lo <= sol.gamma0 <= hi and hi - lo < 1e-4

    def test_no_root_in_bracket(self, monkeypatch):
        # f(1e-12) > 0 everywhere in the parameter domain, so force a sign failure
        from fisher_ec import capacity
        monkeypatch.setattr(capacity, "cutoff_function", lambda p, g: -1.0)
        with pytest.raises(BracketError):
            solve_opra_cutoff(REF)

    @pytest.mark.parametrize("m", [1e-8, 1e-4, 1e-2])
    @pytest.mark.parametrize("g", [1e-8, 1.0])
    def test_extreme_small_m(self, m, g):
        p = FadingParams(m, 1e3, g)
        sol = solve_opra_cutoff(p)
        assert 0.0 < sol.gamma0 <= 1.0 and abs(sol.residual) < 1e-8 * max(1.0, 1.0 / sol.gamma0)


class TestClosedForms:
    def test_opra_against_quadrature(self):
        r = ec_opra(REF)
        assert r.ec_nats == pytest.approx(ec_quadrature(REF, Scheme("opra")).ec_nats, rel=1e-7)
        assert r.method == "closed_form" and 0.0 < r.scheme.gamma0 <= 1.0
        assert abs(r.diagnostics["constraint_residual"]) < 1e-8

    def test_ora_against_quadrature(self):
        assert ec_ora(REF).ec_nats == pytest.approx(quadrature.ora_capacity(REF), rel=1e-7)

    def test_ora_golden_value(self):
        # m = 1, m_s = 2, avg 1: density m_s (m_s g)^m_s (x + m_s g)^(-1-m_s)
        mp.mp.dps = 30
        ms, g = mp.mpf(2), mp.mpf(1)
        want = mp.quad(lambda x: mp.log1p(x) * ms * (ms * g) ** ms * (x + ms * g) ** (-1 - ms),
                       [0, 1, 10, mp.inf])
        assert ec_ora(FadingParams(1.0, 2.0, 1.0)).ec_nats == pytest.approx(float(want),
                                                                            rel=1e-10)

    def test_ci_examples(self):
        assert ec_ci(FadingParams(2.0, 3.0, 2.0)).ec_nats == pytest.approx(math.log(2.0),
                                                                          rel=1e-15)
        r = ec_ci(FadingParams(1.0, 3.0, 2.0))
        assert r.ec_nats == 0.0 and r.diagnostics["divergent_inverse_moment"] == 1.0
        assert ec_ci(FadingParams(0.8, 3.0, 2.0)).ec_nats == 0.0

    def test_ci_target(self):
        assert ci_target_snr(FadingParams(2.0, 1.0, 4.0)) == 2.0
        assert ci_target_snr(REF) == pytest.approx(1.0 / quadrature.inverse_moment(REF, 0.0),
                                                   rel=1e-9)
        with pytest.raises(DivergenceError):
            ci_target_snr(FadingParams(0.9, 1.0, 4.0))

    def test_tci_against_quadrature(self):
        r = ec_tci(REF, 1.0)
        q = ec_quadrature(REF, Scheme("tci", 1.0))
        assert r.ec_nats == pytest.approx(q.ec_nats, rel=1e-8)
        assert isinstance(r.ec_nats, float)
        assert r.diagnostics["outage_probability"] == pytest.approx(
            q.diagnostics["outage_probability"], rel=1e-9)

    @pytest.mark.parametrize("m", [2.5, 3.5])
    def test_tci_degenerates_to_ci(self, m):
        p = FadingParams(m, 2.5, 10.0)
        assert abs(ec_tci(p, 1e-8).ec_nats - ec_ci(p).ec_nats) < 1e-6

    def test_tci_degeneration_is_slow_near_unit_m(self):
        # the lost inverse-moment mass scales like gamma0^(m-1): about 1e-4 at m = 1.5
        p = FadingParams(1.5, 2.5, 10.0)
        tci = ec_tci(p, 1e-8).ec_nats
        assert tci == pytest.approx(ec_quadrature(p, Scheme("tci", 1e-8)).ec_nats, rel=1e-12)
        assert 1e-6 < tci - ec_ci(p).ec_nats < 1e-4

    def test_dispatch(self):
        assert ec_closed(REF, Scheme("ora")).ec_nats == ec_ora(REF).ec_nats
        assert ec_closed(REF, Scheme("tci", 0.5)).ec_nats == ec_tci(REF, 0.5).ec_nats

    def test_bits(self):
        r = ec_ora(REF)
        assert r.ec_bits == pytest.approx(r.ec_nats / math.log(2.0), rel=1e-15)

    def test_quadrature_opra_nonnegative_at_low_snr(self):
        assert ec_quadrature(FadingParams(2.5, 1.5, 0.1), Scheme("opra")).ec_nats >= 0.0


def _id(p):
    return f"{p.m}-{p.ms}-{p.avg_snr}"


@pytest.mark.parametrize("p", grid(), ids=_id)
def test_water_filling_dominates(p):
    assert ec_opra(p).ec_nats >= ec_ora(p).ec_nats - 1e-9


@pytest.mark.parametrize("p", grid(), ids=_id)
def test_power_constraint_met(p):
    for s in _schemes(p.m):
        assert verify_power_constraint(p, s) < 1e-8


def test_power_constraint_ci_diverges():
    with pytest.raises(DivergenceError):
        verify_power_constraint(FadingParams(1.0, 2.0, 1.0), Scheme("ci"))


class TestAsymptotic:
    def test_opra_unit_cutoff(self):
        want = math.log(1000.0) + math.log(1.5 / 2.5) + digamma(2.5) - digamma(1.5)
        assert ec_opra_asym(FadingParams(2.5, 1.5, 1e3), False) == pytest.approx(want,
                                                                                rel=1e-15)

    @pytest.mark.parametrize("m", [0.7, 2.0, 4.5])
    def test_equal_shapes_cancel(self, m):
        p = FadingParams(m, m, 37.0)
        assert ec_opra_asym(p, False) == pytest.approx(math.log(37.0), rel=1e-14)
        assert ec_ora_asym(p) == pytest.approx(math.log(37.0), rel=1e-14)

    def test_opra_branches_converge(self):
        gaps = [abs(ec_opra_asym(REF.scaled(g / 10.0)) - ec_opra_asym(REF.scaled(g / 10.0), False))
                for g in (1e4, 1e6, 1e8)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_exact_near_asymptote(self):
        p = REF.scaled(1e5)
        assert abs(ec_opra(p).ec_nats - ec_opra_asym(p)) < 1e-2
        assert abs(ec_ora(p).ec_nats - ec_ora_asym(p)) < 1e-2
        assert abs(ec_ci(p).ec_nats - ec_ci_asym(p)) < 1e-5

    def test_ci_asym_example(self):
        assert ec_ci_asym(FadingParams(2.5, 1.5, 1e6)) == pytest.approx(
            math.log(1e6) + math.log(0.6), rel=1e-15)
        with pytest.raises(DomainError):
            ec_ci_asym(FadingParams(1.0, 1.5, 1e6))

    def test_ci_asym_increasing_in_m(self):
        vals = [ec_ci_asym(FadingParams(m, 2.0, 100.0)) for m in (1.1, 1.5, 2.5, 10.0)]
        assert vals == sorted(vals)

    def test_tci_asym_branches(self):
        p = FadingParams(2.5, 2.5, 1e6)
        assert ec_tci_asym(p, 0.5) == pytest.approx(math.log(1e6) + math.log(0.6))
        one = ec_tci_asym(FadingParams(1.0, 2.5, 1e6), 0.5)
        near = ec_tci_asym(FadingParams(1.0 + 1e-10, 2.5, 1e6), 0.5)
        assert one == near and math.isfinite(one)
        assert math.isnan(ec_tci_asym(FadingParams(1.0, 2.5, 1e-6), 0.5))
        with pytest.raises(DomainError):
            ec_tci_asym(p, 0.0)

    @pytest.mark.parametrize("m", [0.5, 1.0, 2.5])
    def test_tci_asym_tracks_exact(self, m):
        hi = FadingParams(m, 2.5, 1e8)
        gap = abs(ec_tci(hi, 0.5).ec_nats - ec_tci_asym(hi, 0.5))
        assert gap < 1e-2 * max(1.0, abs(ec_tci_asym(hi, 0.5)))

    def test_nakagami_limit(self):
        g1 = 1e3
        got = ec_ora_asym_true_mean(2.5, 1e4, g1)
        assert abs(got - (math.log(g1 / 2.5) + digamma(2.5))) < 5e-3

    def test_true_mean_wrappers_delegate(self):
        p = FadingParams.from_true_mean(3.5, 2.5, 100.0)
        assert ec_ora_asym_true_mean(3.5, 2.5, 100.0) == ec_ora_asym(p)
        assert ec_ci_asym_true_mean(3.5, 2.5, 100.0) == ec_ci_asym(p)
        assert ec_tci_asym_true_mean(3.5, 2.5, 100.0, 1.0) == ec_tci_asym(p, 1.0)
        assert ec_opra_asym_true_mean(3.5, 2.5, 100.0) == ec_opra_asym(p)
        with pytest.raises(DivergenceError):
            ec_ora_asym_true_mean(3.5, 1.0, 100.0)

    def test_dispatch_uses_unit_cutoff(self):
        r = ec_asym(REF, Scheme("opra"))
        assert r.method == "asymptotic" and r.ec_nats == ec_opra_asym(REF, False)

    def test_returns_raw_value_at_low_snr(self):
        assert ec_ora_asym(FadingParams(2.5, 1.5, 1e-3)) < 0.0


@pytest.mark.parametrize("kind", ["opra", "ora", "ci", "tci"])
def test_increasing_in_shadowing_shape(kind):
    scheme = Scheme(kind, 1.0) if kind == "tci" else Scheme(kind)
    vals = [ec_closed(FadingParams.from_true_mean(3.5, ms, 100.0), scheme).ec_nats
            for ms in (1.5, 2.5, 5.0)]
    assert vals[0] < vals[1] < vals[2]
