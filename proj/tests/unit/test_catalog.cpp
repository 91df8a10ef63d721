#include <doctest.h>

#include <numeric>
#include <sstream>

#include "helpers.hpp"
#include "stscan/catalog.hpp"
#include "stscan/error.hpp"
#include "stscan/time_grid.hpp"

using namespace stscan;

TEST_CASE("date parsing") {
  CHECK(classify_date("1975-08-15") == DateQuality::complete);
  CHECK(classify_date("1975-08") == DateQuality::partial);
  CHECK(classify_date("1975") == DateQuality::partial);
  CHECK(classify_date("1975-00-00") == DateQuality::partial);
  CHECK(classify_date("1975-02-30") == DateQuality::invalid);
  CHECK(classify_date("yesterday") == DateQuality::invalid);
  auto d = parse_iso_date("2000-02-29");
  REQUIRE(d);
  CHECK(format_date(*d) == "2000-02-29");
  CHECK(from_day_number(day_number(*d)) == *d);
  CHECK(year_period(1956, 1965).days() == 3653);
}

TEST_CASE("load a small catalog") {
  std::istringstream in(
      "id,lon,lat,date,deaths,loss_rmb\n"
      "3,110.5,30.1,1980-07-02,2,\n"
      "1,111.0,31.0,1975-08-15,,5e6\n"
      "2,112.0,29.0,1975-08-15,0,0\n");
  auto r = load_catalog(in);
  REQUIRE(r.catalog.size() == 3);
  CHECK(r.catalog[0].id == 1);
  CHECK(r.catalog[1].id == 2);
  CHECK(r.catalog[2].id == 3);
  CHECK(r.catalog.period().start == testing::date("1975-01-01"));
  CHECK(r.catalog.period().end == testing::date("1980-12-31"));
  CHECK_FALSE(r.catalog[0].fatalities);
  CHECK(*r.catalog[0].economic_loss == 5e6);
  CHECK(r.report.retained == 3);
}

TEST_CASE("partial dates are dropped by the completeness rule") {
  std::istringstream in(
      "id,lon,lat,date\n"
      "1,111.0,31.0,1975-08\n"
      "2,112.0,29.0,1975-08-15\n");
  auto r = load_catalog(in);
  CHECK(r.catalog.size() == 1);
  CHECK(r.report.incomplete_dates == 1);
  CHECK(r.report.rejected == 0);
  REQUIRE(r.report.errors.size() == 1);
  CHECK(r.report.errors[0].row == 2);
  CHECK(r.report.errors[0].field == "date");
}

TEST_CASE("swapped coordinates fail validation") {
  std::istringstream in(
      "id,lon,lat,date\n"
      "1,31.0,111.0,1975-08-15\n"
      "2,29.0,112.0,1975-08-16\n");
  CHECK_THROWS_AS(load_catalog(in), CatalogRejected);

  std::ostringstream many;
  many << "id,lon,lat,date\n";
  for (int i = 0; i < 20; ++i) many << i << ",110,30,1990-01-0" << (i % 9 + 1) << "\n";
  many << "99,30,110,1990-01-01\n";
  std::istringstream in2(many.str());
  auto r = load_catalog(in2);  // 1 of 21 rejected, below the 10% limit
  CHECK(r.catalog.size() == 20);
  CHECK(r.report.rejected == 1);
  CHECK(row_errors_csv(r.report.errors).rfind("row,field,reason\n22,lon,", 0) == 0);
}

TEST_CASE("completeness filter") {
  std::vector<RawRecord> rows;
  for (int i = 0; i < 100; ++i)
    rows.push_back({static_cast<std::size_t>(i + 2), {std::to_string(i), i < 68 ? "1990-05-17" : "1990-05"}});
  auto res = filter_complete_dates(rows, 1);
  CHECK(res.kept.size() == 68);
  CHECK(res.report.retained_fraction == doctest::Approx(0.68));
  CHECK_FALSE(res.report.empty);
  auto again = filter_complete_dates(res.kept, 1);
  CHECK(again.kept.size() == 68);
  CHECK(again.report.retained_fraction == 1.0);

  std::vector<RawRecord> none{{2, {"1", "1990"}}, {3, {"2", "1990-01"}}};
  auto empty = filter_complete_dates(none, 1);
  CHECK(empty.kept.empty());
  CHECK(empty.report.empty);
}

TEST_CASE("impact classes") {
  auto scale = ImpactScale::default_scale();
  Event e;
  e.fatalities = 0;
  e.economic_loss = 0;
  CHECK(scale.classify(e).level == 1);
  CHECK_FALSE(scale.classify(e).flagged);
  e.fatalities = 2;       // sub-class 2
  e.economic_loss = 2e7;  // sub-class 3
  CHECK(scale.classify(e).level == 3);
  CHECK(scale.classify(e).label == "severe");
  Event unknown;
  CHECK(scale.classify(unknown).flagged);
  CHECK(scale.classify(unknown).level == 1);

  for (double loss : {0.0, 5e5, 2e6, 3e7, 1e9}) {
    int prev = 0;
    for (std::int64_t f = 0; f <= 20; ++f) {
      Event x;
      x.fatalities = f;
      x.economic_loss = loss;
      int level = scale.classify(x).level;
      CHECK(level >= prev);
      prev = level;
    }
  }
  auto custom = ImpactScale::parse("low:0:0;high:5:100");
  CHECK(custom.levels().size() == 2);
  CHECK(ImpactScale::parse(custom.to_string()).to_string() == custom.to_string());
  CHECK_THROWS_AS(ImpactScale::parse("a:1:0;b:2:3"), ConfigError);
  CHECK_THROWS_AS(ImpactScale::parse("a:0:0;b:0:3"), ConfigError);
}

TEST_CASE("export and reload is bit-identical") {
  std::istringstream in(
      "id,lon,lat,date,deaths,loss_rmb\n"
      "3,110.123456789012,30.1,1980-07-02,2,\n"
      "1,111.0,31.000000000001,1975-08-15,,5123456.789\n"
      "2,112.0,29.0,1975-08-15,0,0\n");
  auto a = load_catalog(in).catalog;
  auto csv = export_catalog_csv(a, ImpactScale::default_scale());
  std::istringstream in2(csv);
  auto b = load_catalog(in2).catalog;
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].location == b[i].location);
    CHECK(a[i].date == b[i].date);
    CHECK(a[i].fatalities == b[i].fatalities);
    CHECK(a[i].economic_loss == b[i].economic_loss);
  }
  CHECK(export_catalog_csv(b, ImpactScale::default_scale()) == csv);
}

TEST_CASE("time grid") {
  auto cat = testing::planar_catalog({{1, 0, 0, "1975-08-15"}, {2, 1, 1, "1970-01-01"}, {3, 2, 2, "1979-12-31"}}, 0, 0,
                                     10, 10, "1970-01-01", "1979-12-31");
  auto yearly = assign_time_grid(cat, 12);
  CHECK(yearly.grid.size() == 10);
  CHECK(yearly.grid.label(yearly.grid.interval_of(testing::date("1975-08-15"))) == "1975");
  auto quarterly = assign_time_grid(cat, 3);
  CHECK(quarterly.grid.size() == 40);
  int q = quarterly.grid.interval_of(testing::date("1975-08-15"));
  CHECK(quarterly.grid.label(q) == "1975-Q3");
  CHECK(quarterly.grid.interval_start(q) == testing::date("1975-07-01"));
  CHECK(quarterly.grid.interval_end(q) == testing::date("1975-09-30"));
  CHECK(assign_time_grid(cat, 1).grid.label(0) == "1970-01");
  CHECK(assign_time_grid(cat, 6).grid.label(1) == "1970-H2");
  CHECK(assign_time_grid(cat, 24).grid.size() == 5);
  CHECK_THROWS_AS(assign_time_grid(cat, 5), ConfigError);
  CHECK_THROWS_AS(assign_time_grid(cat, 240), ConfigError);

  std::mt19937_64 rng(3);
  auto big = testing::random_planar(rng, 300, 100, "1990-03-10", "2001-07-20");
  for (int tagg : {1, 2, 3, 4, 6, 12, 24}) {
    auto t = assign_time_grid(big, tagg);
    CHECK(std::accumulate(t.counts.begin(), t.counts.end(), std::int64_t{0}) == 300);
    CHECK(t.grid.interval_start(0) == big.period().start);
    CHECK(t.grid.interval_end(t.grid.size() - 1) == big.period().end);
    for (int d = 1; d < t.grid.size(); ++d)
      CHECK(day_number(t.grid.interval_start(d)) == day_number(t.grid.interval_end(d - 1)) + 1);
  }
}

TEST_CASE("subsets and meridian split") {
  std::mt19937_64 rng(9);
  std::vector<Event> ev;
  std::uniform_real_distribution<double> lon(80, 130), lat(20, 50);
  std::uniform_int_distribution<std::int64_t> day(day_number(testing::date("1950-01-01")),
                                                  day_number(testing::date("2015-12-31")));
  for (int i = 0; i < 400; ++i) {
    Event e;
    e.id = i;
    e.location = {lon(rng), lat(rng)};
    e.date = from_day_number(day(rng));
    ev.push_back(e);
  }
  EventCatalog cat(ev, default_region(), year_period(1950, 2015));
  auto dec = subset(cat, {year_period(1956, 1965), std::nullopt});
  for (const auto& e : dec.events()) {
    CHECK(year_of(e.date) >= 1956);
    CHECK(year_of(e.date) <= 1965);
  }
  std::size_t expect = 0;
  for (const auto& e : cat.events()) expect += (year_of(e.date) >= 1956 && year_of(e.date) <= 1965);
  CHECK(dec.size() == expect);
  CHECK(subset(cat, {cat.period(), std::nullopt}).size() == cat.size());
  auto [w, e] = split_by_meridian(cat, 105);
  CHECK(w.size() + e.size() == cat.size());
  CHECK(w.area_km2() + e.area_km2() == doctest::Approx(cat.area_km2()).epsilon(1e-9));
}
