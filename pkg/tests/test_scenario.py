import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from natscc.errors import DataError
from natscc.scenario import (
    SCENARIO_HEADER,
    CountryRecord,
    HistoricalEmissions,
    apply_convergence,
    growth_rates,
    load_historical,
    load_scenario,
    write_historical,
    write_scenario,
)

from conftest import toy_scenario


def _write_rows(path, rows, header=SCENARIO_HEADER):
    path.write_text(",".join(header) + "\n" + "".join(",".join(map(str, r)) + "\n" for r in rows))
    return path


def _rows(countries=("AAA", "BBB"), first=1950, last=2300, skip=None, pop=None):
    out = []
    for c in countries:
        for y in range(first, last + 1):
            if skip == (c, y):
                continue
            p = pop if pop and (c, y) == pop[0] else None
            out.append((c, y, p[1] if p else 10.0, 1000.0 + y, 1e-4))
    return out


def test_load_two_country_file(tmp_path):
    s = load_scenario(_write_rows(tmp_path / "two.csv", _rows()))
    assert s.countries == ("AAA", "BBB")
    assert len(s.years) == 351
    assert (s.start_year, s.end_year) == (1950, 2300)
    assert s.id == "two"
    assert s.convergence is True


def test_zero_population_names_country_and_year(tmp_path):
    path = _write_rows(tmp_path / "bad.csv", _rows(pop=(("BBB", 2040), 0.0)))
    with pytest.raises(DataError, match="BBB 2040"):
        load_scenario(path)


def test_missing_interior_year_is_an_error(tmp_path):
    path = _write_rows(tmp_path / "gap.csv", _rows(skip=("AAA", 2071)))
    with pytest.raises(DataError, match="2071"):
        load_scenario(path)


def test_malformed_row_reports_line(tmp_path):
    rows = _rows()
    rows[4] = ("AAA", 1954, "ten", 1000.0, 1e-4)
    with pytest.raises(DataError, match=":6:"):
        load_scenario(_write_rows(tmp_path / "m.csv", rows))


def test_duplicate_row(tmp_path):
    rows = _rows()
    rows.append(rows[3])
    with pytest.raises(DataError, match="[Dd]uplicate"):
        load_scenario(_write_rows(tmp_path / "d.csv", rows))


def test_short_span_rejected(tmp_path):
    with pytest.raises(DataError, match="100"):
        load_scenario(_write_rows(tmp_path / "s.csv", _rows(last=2000)))


def test_negative_carbon_intensity_rejected(tmp_path):
    rows = _rows()
    rows[10] = (*rows[10][:4], -1e-5)
    with pytest.raises(DataError, match="carbon_intensity"):
        load_scenario(_write_rows(tmp_path / "c.csv", rows))


def test_country_codes_are_iso3():
    CountryRecord("ABC")
    for bad in ("AB", "abc", "ABCD", "A1C"):
        with pytest.raises(DataError):
            CountryRecord(bad)


def test_sidecar_sets_id_and_convergence(tmp_path):
    path = _write_rows(tmp_path / "x.csv", _rows())
    (tmp_path / "x.toml").write_text('id = "alt"\nconvergence = false\nnotes = "n"\n')
    s = load_scenario(path)
    assert (s.id, s.convergence, s.notes) == ("alt", False, "n")


def test_round_trip_is_byte_identical(tmp_path, central):
    a = write_scenario(central, tmp_path / "a.csv")
    b = write_scenario(load_scenario(a), tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.toml").read_bytes() == (tmp_path / "b.toml").read_bytes()


def test_round_trip_modulo_row_order(tmp_path):
    rows = _rows()
    shuffled = _write_rows(tmp_path / "shuffled.csv", rows[::-1])
    canonical = _write_rows(tmp_path / "canonical.csv", rows)
    out1 = write_scenario(load_scenario(shuffled), tmp_path / "o1.csv").read_bytes()
    out2 = write_scenario(load_scenario(canonical), tmp_path / "o2.csv").read_bytes()
    assert out1 == out2
    assert b"\r\n" not in out1


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(1e-3, 1e6, allow_nan=False), min_size=2, max_size=6))
def test_round_trip_preserves_floats(tmp_path_factory, vals):
    d = tmp_path_factory.mktemp("rt")
    s = toy_scenario(n_countries=len(vals), income=vals)
    s2 = load_scenario(write_scenario(s, d / "s.csv"))
    np.testing.assert_array_equal(s2.income, s.income)
    np.testing.assert_array_equal(s2.population, s.population)


def test_history_drops_pre_1960(tmp_path):
    rows = [("AAA", y, 5.0) for y in range(1950, 2016)]
    h = load_historical(_write_rows(tmp_path / "h.csv", rows, ("country", "year", "emissions_mtc")))
    assert h.start_year == 1960 and h.end_year == 2015
    assert h.covers(1960, 2015)


def test_history_round_trip(tmp_path, history):
    a = write_historical(history, tmp_path / "h1.csv")
    b = write_historical(load_historical(a), tmp_path / "h2.csv")
    assert a.read_bytes() == b.read_bytes()


def test_history_rejects_negative():
    with pytest.raises(DataError):
        HistoricalEmissions(("AAA",), np.arange(1960, 1963), np.array([[1.0, -1.0, 1.0]]))


# -- convergence --------------------------------------------------------------


def test_convergence_identical_countries_is_identity():
    s = toy_scenario(n_countries=2, income=[5000, 5000])
    c = apply_convergence(s, 100, 1960)
    np.testing.assert_allclose(c.income, s.income, rtol=1e-13)


def test_convergence_preserves_world_gdp_population_intensity(central):
    c = apply_convergence(central, 290, 2010)
    np.testing.assert_allclose(c.gdp.sum(axis=0), central.gdp.sum(axis=0), rtol=1e-9, atol=0)
    np.testing.assert_array_equal(c.population, central.population)
    np.testing.assert_array_equal(c.carbon_intensity, central.carbon_intensity)
    assert c.convergence is False


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(300, 60000), min_size=2, max_size=5),
    st.lists(st.floats(-0.01, 0.05), min_size=5, max_size=5),
    st.integers(1, 150),
)
def test_convergence_preserves_world_gdp_property(incomes, growths, horizon):
    s = toy_scenario(n_countries=len(incomes), income=incomes)
    t = np.arange(len(s.years))
    g = np.array(growths[: len(incomes)])
    s = s.replace(income=np.array(incomes)[:, None] * (1 + g[:, None]) ** t[None, :])
    c = apply_convergence(s, horizon, 1970)
    np.testing.assert_allclose(c.gdp.sum(axis=0), s.gdp.sum(axis=0), rtol=1e-9, atol=0)


def test_convergence_lifts_slow_poor_country_late_growth():
    # poor country grows at 1%, rich at 3%; after convergence the poor country's late growth is higher
    s = toy_scenario(n_countries=2, income=[1000, 30000])
    t = np.arange(len(s.years))
    s = s.replace(income=np.array([1000 * 1.01 ** t, 30000 * 1.03 ** t]))
    c = apply_convergence(s, 100, 1960)
    g_before = s.income[0, -1] / s.income[0, -2] - 1
    g_after = c.income[0, -1] / c.income[0, -2] - 1
    assert g_before == pytest.approx(0.01, rel=1e-9)
    assert g_after > g_before


def test_convergence_horizon_must_be_positive(central):
    with pytest.raises(DataError):
        apply_convergence(central, 0)


def test_growth_rates():
    g = growth_rates(np.array([[100.0, 102.0, 102.0]]))
    np.testing.assert_allclose(g, [[0.0, 0.02, 0.0]], atol=1e-15)
