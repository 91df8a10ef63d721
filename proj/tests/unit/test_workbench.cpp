#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>

#include "helpers.hpp"
#include "stscan/error.hpp"
#include "stscan/manifest.hpp"
#include "stscan/simulate.hpp"
#include "stscan/workbench.hpp"

using namespace stscan;
using namespace stscan::workbench;

namespace {

DecadeCluster at(int decade, double lon, double lat) {
  DecadeCluster d;
  d.decade = decade;
  d.cluster.cylinder.center = {lon, lat};
  d.cluster.centroid = {lon, lat};
  return d;
}

}  // namespace

TEST_CASE("duration statistics") {
  std::vector<double> v{40, 10, 30, 20};
  auto s = duration_stats(v);
  REQUIRE(s);
  CHECK(s->median == 25);
  CHECK(s->q1 == 15);
  CHECK(s->q3 == 35);
  CHECK(s->iqr == 20);
  CHECK(s->min == 10);
  CHECK(s->max == 40);
  std::vector<double> odd{1, 2, 3, 4, 5};
  auto o = duration_stats(odd);
  CHECK(o->median == 3);
  CHECK(o->q1 == 1.5);
  CHECK(o->q3 == 4.5);
  std::vector<double> single{7};
  auto one = duration_stats(single);
  CHECK(one->q1 == 7);
  CHECK(one->q3 == 7);
  CHECK_FALSE(duration_stats(std::vector<double>{}));

  scan::Cluster c;
  c.start_date = testing::date("1975-01-01");
  c.end_date = testing::date("1976-12-31");
  CHECK(duration_days(c) == 731);
}

TEST_CASE("gap bins") {
  CHECK(gap_bin(4.99) == "other");
  CHECK(gap_bin(5) == "5-10");
  CHECK(gap_bin(10) == "10-20");
  CHECK(gap_bin(20) == "20-50");
  CHECK(gap_bin(50) == "20-50");
  CHECK(gap_bin(60) == "other");
}

TEST_CASE("recurrence by catchment") {
  std::vector<geo::Feature> catchments{{"A", geo::MultiPolygon{{geo::box_polygon(100, 20, 110, 30)}}},
                                       {"B", geo::MultiPolygon{{geo::box_polygon(110, 20, 120, 30)}}},
                                       {"C", geo::MultiPolygon{{geo::box_polygon(130, 40, 131, 41)}}}};
  std::vector<DecadeCluster> cl{at(1, 105, 25), at(3, 104, 24), at(3, 106, 26), at(2, 115, 25), at(4, 90, 10)};
  auto r = recurrence_by_catchment(cl, catchments);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].catchment_id == "A");
  CHECK(r.records[0].count == 3);
  CHECK(r.records[0].decades == std::vector<int>{1, 3, 3});
  CHECK(r.records[0].gaps_years == std::vector<double>{20});
  CHECK(r.records[0].gap_bins == std::vector<std::string>{"20-50"});
  CHECK(r.records[1].count == 1);
  CHECK(r.records[1].gap_bins.empty());
  CHECK(r.unassigned == 1);
  std::size_t sum = r.unassigned;
  for (const auto& rec : r.records) sum += rec.count;
  CHECK(sum == cl.size());
  CHECK(recurrence_csv(r) == "catchment_id,count,decades,gap_bins\nA,3,1;3;3,20-50\nB,1,2,\nunassigned,1,4,\n");

  // adjacent decades: midpoints ten years apart
  std::vector<DecadeCluster> adj{at(2, 105, 25), at(1, 105, 25)};
  CHECK(recurrence_by_catchment(adj, catchments).records[0].gap_bins == std::vector<std::string>{"10-20"});

  std::vector<geo::Feature> overlapping{{"X", geo::MultiPolygon{{geo::box_polygon(0, 0, 2, 2)}}},
                                        {"Y", geo::MultiPolygon{{geo::box_polygon(1, 1, 3, 3)}}}};
  CHECK_THROWS_AS(recurrence_by_catchment(cl, overlapping), DataError);
}

TEST_CASE("decade partition") {
  std::mt19937_64 rng(3);
  std::vector<Event> ev;
  std::uniform_int_distribution<std::int64_t> day(day_number(testing::date("1950-01-01")),
                                                  day_number(testing::date("2016-12-31")));
  std::uniform_real_distribution<double> lon(100, 115), lat(25, 35);
  for (int i = 0; i < 2000; ++i) {
    Event e;
    e.id = i + 1;
    e.location = {lon(rng), lat(rng)};
    e.date = from_day_number(day(rng));
    ev.push_back(e);
  }
  EventCatalog cat(ev, default_region(), year_period(1950, 2016));
  auto periods = decade_periods(cat, {});
  REQUIRE(periods.size() == 6);
  CHECK(periods.front().start == testing::date("1956-01-01"));
  CHECK(periods.back().end == testing::date("2015-12-31"));
  for (std::size_t k = 1; k < periods.size(); ++k)
    CHECK(day_number(periods[k].start) == day_number(periods[k - 1].end) + 1);

  std::size_t inside = 0;
  for (const auto& e : cat.events()) inside += year_of(e.date) >= 1956 && year_of(e.date) <= 2015;
  std::size_t partitioned = 0;
  for (const auto& p : periods) partitioned += subset(cat, {p, std::nullopt}).size();
  CHECK(partitioned == inside);

  EventCatalog tiny = subset(cat, {year_period(1950, 1964), std::nullopt});
  CHECK_THROWS_AS(decade_periods(tiny, {}), DataError);
}

TEST_CASE("sweep grid") {
  CHECK(tmax_units(3, 12) == 3);
  CHECK(tmax_units(3, 3) == 12);
  CHECK_THROWS_AS(tmax_units(1, 24), ConfigError);
  std::mt19937_64 rng(5);
  auto cat = testing::random_planar(rng, 200, 1000, "1990-01-01", "2009-12-31");
  SweepSpec spec{{50, 100, 1000}, {1, 2}, {12}};
  scan::ScanConfig base;
  base.replicates = 19;
  auto res = sweep_scan(cat, spec, base);
  REQUIRE(res.entries.size() == 6);
  CHECK(res.entries[0].rmax_km == 50);
  CHECK(res.entries[1].tmax_years == 2);
  CHECK(res.entries[4].error.find("R_max rule") != std::string::npos);
  CHECK_FALSE(res.entries[4].result);
  CHECK(res.entries[0].result);
  auto csv = res.summary_csv();
  CHECK(csv.rfind("rmax_km,tmax_years,tmax_units,tagg_months,n_clusters,n_significant,status\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("decade cluster table round trip") {
  DecadeCluster d = at(2, 105.25, 30.5);
  d.cluster.rank = 1;
  d.cluster.cylinder.radius_km = 120.5;
  d.cluster.cylinder.observed = 14;
  d.cluster.cylinder.expected = 3.25;
  d.cluster.cylinder.log_glr = 9.5;
  d.cluster.glr = std::exp(9.5);
  d.cluster.p_value = 0.001;
  d.cluster.start_date = testing::date("1970-01-01");
  d.cluster.end_date = testing::date("1971-12-31");
  std::vector<DecadeCluster> v{d};
  auto csv = decade_clusters_csv(v);
  auto path = std::filesystem::temp_directory_path() / "stscan_decade_clusters_test.csv";
  std::ofstream(path) << csv;
  auto back = read_decade_clusters_csv(path);
  std::filesystem::remove(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].decade == 2);
  CHECK(back[0].cluster.cylinder.center == d.cluster.cylinder.center);
  CHECK(back[0].cluster.cylinder.radius_km == 120.5);
  CHECK(back[0].cluster.end_date == d.cluster.end_date);
  CHECK(decade_clusters_csv(back) == csv);
  auto stats = duration_stats_csv(v);
  CHECK(stats == "decade,n,min,q1,median,q3,max,iqr\n2,1,730,730,730,730,730,0\n");
}

TEST_CASE("simulation") {
  sim::SimSpec spec;
  spec.process = sim::Process::clustered;
  spec.n = 500;
  spec.cluster_fraction = 0.3;
  spec.cluster_count = 3;
  spec.seed = 4;
  auto r = sim::simulate_catalog(spec);
  CHECK(r.catalog.size() == 500);
  CHECK(r.clusters.size() == 3);
  std::size_t injected = 0;
  for (const auto& c : r.clusters) injected += c.n_events;
  CHECK(injected == 150);
  CHECK(std::count_if(r.source.begin(), r.source.end(), [](int s) { return s >= 0; }) == 150);
  for (std::size_t i = 0; i < r.catalog.size(); ++i) {
    const auto& e = r.catalog[i];
    CHECK(r.catalog.region().contains(e.location));
    CHECK(r.catalog.period().contains(e.date));
    if (r.source[i] >= 0) {
      const auto& c = r.clusters[static_cast<std::size_t>(r.source[i])];
      CHECK(geo::haversine_km(e.location, c.center) <= c.radius_km);
      CHECK(e.date >= c.start);
      CHECK(e.date <= c.end);
    }
  }
  std::vector<std::int64_t> ids;
  for (const auto& e : r.catalog.events()) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());
  std::vector<std::int64_t> want(500);
  std::iota(want.begin(), want.end(), 1);
  CHECK(ids == want);

  auto again = sim::simulate_catalog(spec);
  CHECK(export_catalog_csv(again.catalog, ImpactScale::default_scale()) ==
        export_catalog_csv(r.catalog, ImpactScale::default_scale()));
  spec.process = sim::Process::csr;
  auto csr = sim::simulate_catalog(spec);
  CHECK(csr.clusters.empty());
  CHECK(csr.catalog.size() == 500);
}

TEST_CASE("manifest round trip") {
  Manifest m;
  m.version = "1.0";
  m.command = "scan";
  m.args = {"-i", "a.csv", "--rmax-km", "100"};
  m.config = {{"rmax_km", "100"}};
  m.inputs = {{"a.csv", "0123456789abcdef"}};
  m.outputs = {"out.csv"};
  m.seed = 42;
  auto j = m.to_json();
  auto back = Manifest::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.args == m.args);
  CHECK(back.seed == 42);
  CHECK(j.find("time") == std::string::npos);
}
