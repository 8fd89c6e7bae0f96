import pytest

from uavmmw import optimize
from uavmmw.channel import outage_probability
from uavmmw.errors import DomainError, UsageError
from uavmmw.montecarlo import SimulationSpec


def test_argmin_tie_break():
    evals = [(3, 2, 0.1), (2, 5, 0.1), (2, 4, 0.1), (1, 1, 0.2)]
    assert optimize.argmin_grid(evals) == (2, 4, 0.1)


def test_candidate_sizes_pin_ground_end(link_factory):
    assert optimize.candidate_sizes(link_factory("G2A"), 5) == ([5], [1, 2, 3, 4, 5])
    assert optimize.candidate_sizes(link_factory("A2G"), 5) == ([1, 2, 3, 4, 5], [5])
    nts, nrs = optimize.candidate_sizes(link_factory(), 3)
    assert nts == nrs == [1, 2, 3]


def test_analytical_search_is_exhaustive_argmin(link_factory):
    link = link_factory()
    res = optimize.optimize_array_sizes(link, n_max=10)
    assert len(res.evaluations) == 100
    brute = min(outage_probability(link.with_sizes(a, b)) for a in range(1, 11)
                for b in range(1, 11))
    assert res.best_outage == brute
    assert "elapsed_seconds" not in res.summary()
    assert "elapsed_seconds" in res.summary(include_timing=True)


def test_symmetric_problem_gives_equal_sizes(link_factory):
    res = optimize.optimize_array_sizes(link_factory(), n_max=14)
    assert res.best_nt == res.best_nr
    sym = optimize.optimize_symmetric(link_factory(), n_max=14)
    assert (sym.best_nt, sym.best_outage) == (res.best_nt, res.best_outage)


def test_workers_do_not_change_result(link_factory):
    link = link_factory(sigma_t=3.0, sigma_r=2.0)
    a = optimize.optimize_array_sizes(link, n_max=8, workers=1)
    b = optimize.optimize_array_sizes(link, n_max=8, workers=4)
    assert a.evaluations == b.evaluations


def test_monte_carlo_search(link_factory):
    link = link_factory(ptx=0.0)
    spec = SimulationSpec(num_samples=50_000, seed=1)
    res = optimize.optimize_array_sizes(link, n_max=10, method="monte_carlo", mc_spec=spec)
    ana = optimize.optimize_array_sizes(link, n_max=10)
    assert abs(res.best_nt - ana.best_nt) <= 2 and abs(res.best_nr - ana.best_nr) <= 2


def test_g2a_search_varies_only_aerial_side(link_factory):
    res = optimize.optimize_array_sizes(link_factory("G2A"), n_max=12)
    assert res.best_nt == 12
    assert {e[0] for e in res.evaluations} == {12}


def test_bad_arguments(link_factory):
    with pytest.raises(DomainError):
        optimize.optimize_array_sizes(link_factory(), n_max=0)
    with pytest.raises(UsageError):
        optimize.optimize_array_sizes(link_factory(), method="anneal")
    with pytest.raises(UsageError):
        optimize.optimize_array_sizes(link_factory(), method="monte_carlo")
    with pytest.raises(UsageError):
        optimize.optimize_symmetric(link_factory("G2A"))


@pytest.mark.parametrize("sigmas, expected", [((5.0, 3.0), (4, 7)), ((3.0, 2.0), (6, 9))])
def test_reference_jitter_pairs_near_expected_optimum(link_factory, sigmas, expected):
    # Z = 1 km, P_t = 20 dBm, 0.5 deg offsets on both axes
    res = optimize.optimize_array_sizes(link_factory(sigma_t=sigmas[0], sigma_r=sigmas[1]), 18)
    assert abs(res.best_nt - expected[0]) <= 1 and abs(res.best_nr - expected[1]) <= 1
