import numpy as np
import pytest

from natscc.economy import (
    CountryYearState,
    advance_economy,
    emissions_from_output,
    world_growth_rate,
    world_income,
    world_income_growth,
)
from natscc.errors import NumericalAbort
from natscc.scc import run_baseline
from natscc.impacts import resolve_impact

from conftest import toy_scenario


def _state(pop, inc, year=2000):
    pop, inc = np.asarray(pop, float), np.asarray(inc, float)
    gdp = pop * 1e6 * inc
    z = np.zeros(len(pop))
    return CountryYearState(tuple(f"C{k:02d}"[:3] for k in range(len(pop))), year, pop, gdp, gdp, inc, z, z)


def test_zero_impacts_leave_output_unchanged():
    s = toy_scenario()
    st = advance_economy(s, 2000)
    np.testing.assert_array_equal(st.gdp_net, st.gdp_gross)


def test_net_output_arithmetic():
    s = toy_scenario(n_countries=1, income=[20000.0], population=[50.0], growth=0.0)
    st = advance_economy(s, 1950, [-0.01])
    assert st.gdp_gross[0] == pytest.approx(1e12)
    assert st.gdp_net[0] == pytest.approx(9.9e11, rel=1e-15)


def test_emissions_and_carbon_efficiency():
    # 5000 USD/cap x 20 M persons x 1.667e-4 tC/USD = 16.67 MtC; efficiency 1/1.667e-4 = 6000 USD/tC
    s = toy_scenario(n_countries=1, income=[5000.0], population=[20.0], intensity=1.667e-4, growth=0.0)
    st = advance_economy(s, 1950)
    assert st.emissions[0] == pytest.approx(16.67, rel=1e-12)
    assert st.gdp_gross[0] / (st.emissions[0] * 1e6) == pytest.approx(6000.0, rel=1e-3)


def test_annihilating_impacts_abort():
    s = toy_scenario()
    with pytest.raises(NumericalAbort):
        advance_economy(s, 2000, [-1.0, 0.0])


def test_growth_rates():
    a, b = _state([1, 1], [100, 50]), _state([1, 1], [102, 50])
    np.testing.assert_allclose(world_growth_rate(b, a), [0.02, 0.0], atol=1e-15)


def test_world_income_growth_three_country_toy():
    # populations 10,20,30 -> 11,20,33; incomes 100,200,300 -> 102,210,294
    # world average income 233.33... -> 234.76...; growth computed by hand: 0.0060714285714285
    a = _state([10, 20, 30], [100, 200, 300])
    b = _state([11, 20, 33], [102, 210, 294])
    assert world_income_growth(b, a) == pytest.approx(0.0060714285714285054, rel=1e-12)
    assert world_income(b) / world_income(a) - 1 == pytest.approx(0.0060714285714285054, rel=1e-12)


def test_emissions_units():
    assert emissions_from_output(1e12, 1e-4) == pytest.approx(100.0)


def test_no_feedback_of_damages(config):
    a = run_baseline(config)
    b = run_baseline(config.with_(impact=resolve_impact("howard")))
    np.testing.assert_array_equal(a.gdp_gross, b.gdp_gross)
    np.testing.assert_array_equal(a.emissions, b.emissions)
    assert not np.array_equal(a.gdp_net, b.gdp_net)


def test_global_emissions_are_country_sum(baseline):
    np.testing.assert_array_equal(baseline.global_emissions, baseline.emissions.sum(axis=0) / 1e3)
