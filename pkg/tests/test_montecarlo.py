import math

import pytest

from fisher_ec.capacity import Scheme, ec_closed, solve_opra_cutoff
from fisher_ec.errors import DomainError
from fisher_ec.fading import FadingParams
from fisher_ec.montecarlo import McEstimate, mc_ec

REF = FadingParams(2.5, 1.5, 10.0)
SCHEMES = [Scheme("ora"), Scheme("opra"), Scheme("ci"), Scheme("tci", 1.0)]


def z_score(est, exact):
    return (est.mean - exact) / est.std_error


class TestReproducibility:
    def test_same_seed_identical(self):
        a = mc_ec(REF, Scheme("tci", 0.5), 200_000, 99)
        b = mc_ec(REF, Scheme("tci", 0.5), 200_000, 99)
        assert a == b

    def test_different_seed_differs(self):
        assert mc_ec(REF, Scheme("ora"), 10_000, 1).mean != mc_ec(REF, Scheme("ora"), 10_000, 2).mean

    def test_worker_count_does_not_matter(self):
        a = mc_ec(REF, Scheme("opra"), 300_000, 7, shards=4, jobs=1)
        b = mc_ec(REF, Scheme("opra"), 300_000, 7, shards=4, jobs=4)
        assert a == b and a.shards == 4

    def test_shard_count_is_part_of_the_stream(self):
        a = mc_ec(REF, Scheme("ora"), 100_000, 7, shards=1)
        b = mc_ec(REF, Scheme("ora"), 100_000, 7, shards=2)
        assert a.mean != b.mean

    def test_chunk_size_is_part_of_the_stream(self):
        # each chunk draws its numerator and denominator blocks in turn
        a = mc_ec(REF, Scheme("ci"), 100_000, 3, chunk=1 << 16)
        b = mc_ec(REF, Scheme("ci"), 100_000, 3, chunk=1000)
        assert a.mean != b.mean
        assert abs(a.mean - b.mean) < 5.0 * math.hypot(a.std_error, b.std_error)
        assert a == mc_ec(REF, Scheme("ci"), 100_000, 3, chunk=1 << 16)

    def test_uneven_shards_use_every_draw(self):
        est = mc_ec(REF, Scheme("ora"), 100_001, 5, shards=3)
        assert est.n == 100_001


@pytest.mark.parametrize("scheme", SCHEMES, ids=lambda s: s.kind.value)
def test_quadrupling_halves_std_error(scheme):
    small = mc_ec(REF, scheme, 250_000, 2024)
    large = mc_ec(REF, scheme, 1_000_000, 2025)
    assert 0.8 * 2.0 <= small.std_error / large.std_error <= 1.2 * 2.0


@pytest.mark.parametrize("scheme", SCHEMES, ids=lambda s: s.kind.value)
def test_agrees_with_closed_form(scheme):
    exact = ec_closed(REF, scheme).ec_nats
    est = mc_ec(REF, scheme, 1_000_000, 12345)
    assert abs(z_score(est, exact)) < 3.0


def test_ora_ten_million_draws():
    exact = ec_closed(REF, Scheme("ora")).ec_nats
    est = mc_ec(REF, Scheme("ora"), 10_000_000, 12345, shards=4)
    assert abs(z_score(est, exact)) < 3.0 and est.std_error < 1e-3


def test_opra_uses_solved_cutoff():
    est = mc_ec(REF, Scheme("opra"), 10_000, 1)
    assert est.gamma0 == solve_opra_cutoff(REF).gamma0


@pytest.mark.parametrize("m", [0.8, 1.0])
def test_ci_divergent(m):
    est = mc_ec(FadingParams(m, 2.0, 10.0), Scheme("ci"), 1000, 1)
    assert est.divergent and est.mean == 0.0 and est.std_error == 0.0


def test_tci_all_below_cutoff():
    est = mc_ec(FadingParams(3.0, 3.0, 1e-6), Scheme("tci", 1e6), 1000, 1)
    assert est.mean == 0.0 and not est.divergent


@pytest.mark.parametrize("kwargs", [dict(n=1), dict(n=10, shards=6), dict(seed=-1),
                                    dict(seed=2**64), dict(shards=0)])
def test_rejects_bad_arguments(kwargs):
    args = dict(p=REF, scheme=Scheme("ora"), n=1000, seed=1)
    args.update(kwargs)
    with pytest.raises(DomainError):
        mc_ec(**args)


def test_rejects_non_scheme():
    with pytest.raises(DomainError):
        mc_ec(REF, "ora", 1000, 1)


def test_estimate_is_plain_data():
    est = mc_ec(REF, Scheme("ora"), 1000, 1)
    assert isinstance(est, McEstimate) and math.isfinite(est.mean) and est.seed == 1
