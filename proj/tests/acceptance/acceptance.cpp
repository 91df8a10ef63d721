// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fail.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles/oracles.hpp"
#include "stscan/catalog.hpp"
#include "stscan/io.hpp"
#include "stscan/kriging.hpp"
#include "stscan/ripley.hpp"
#include "stscan/scan.hpp"
#include "stscan/simulate.hpp"
#include "stscan/workbench.hpp"

namespace fs = std::filesystem;
using namespace stscan;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

geo::MultiPolygon planar_box(double size) { return geo::MultiPolygon{{geo::box_polygon(0, 0, size, size)}}; }

EventCatalog random_planar(std::mt19937_64& rng, std::size_t n, double size, int first_year, int last_year,
                           bool integer_grid) {
  auto period = year_period(first_year, last_year);
  std::uniform_real_distribution<double> u(0, size);
  std::uniform_int_distribution<int> g(0, static_cast<int>(size));
  std::uniform_int_distribution<std::int64_t> day(day_number(period.start), day_number(period.end));
  std::vector<Event> ev;
  for (std::size_t i = 0; i < n; ++i) {
    Event e;
    e.id = static_cast<std::int64_t>(i) + 1;
    e.location = integer_grid ? geo::GeoPoint{double(g(rng)), double(g(rng))} : geo::GeoPoint{u(rng), u(rng)};
    e.date = from_day_number(day(rng));
    ev.push_back(e);
  }
  return EventCatalog(std::move(ev), planar_box(size), period, geo::Metric::planar);
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  int matched = 0, total_clusters = 0;
  std::string first_failure;
  for (int run = 0; run < 50; ++run) {
    std::uniform_int_distribution<int> n_dist(5, 30), years(2, 12), pol(0, 2);
    int tagg = run % 3 == 0 ? 3 : 12;
    int n_years = tagg == 3 ? std::min(3, years(rng)) : years(rng);
    auto cat = random_planar(rng, static_cast<std::size_t>(n_dist(rng)), 20, 2000, 2000 + n_years - 1, run % 2 == 0);
    int n_int = n_years * 12 / tagg;
    scan::ScanConfig cfg;
    cfg.tagg_months = tagg;
    cfg.tmax_units = std::max(1, std::uniform_int_distribution<int>(1, n_int / 2)(rng));
    cfg.rmax_km = std::uniform_real_distribution<double>(1, 7.9)(rng);
    cfg.replicates = 19;
    cfg.seed = static_cast<std::uint64_t>(run);
    cfg.overlap_policy = static_cast<scan::OverlapPolicy>(pol(rng));
    cfg.min_cases = 1 + run % 2;
    scan::ScanResult got;
    try {
      got = scan::run_stpss(cat, cfg);
    } catch (const std::exception& e) {
      if (first_failure.empty()) first_failure = "run " + std::to_string(run) + ": " + e.what();
      continue;
    }
    auto want = oracle::scan_clusters(cat, cfg);
    bool ok = got.clusters.size() == want.size();
    for (std::size_t i = 0; ok && i < want.size(); ++i) {
      const auto& a = got.clusters[i].cylinder;
      const auto& b = want[i];
      ok = a.members == b.members && a.observed == b.c &&
           oracle::close(static_cast<long double>(a.expected), b.mu, 1e-12L) &&
           oracle::close(static_cast<long double>(a.log_glr), b.llr, 1e-12L) &&
           oracle::close(static_cast<long double>(std::exp(a.log_glr)), std::exp(b.llr), 1e-12L) &&
           a.center_id == b.center_id && a.radius_km == b.radius && a.start == b.start && a.end == b.end;
    }
    total_clusters += static_cast<int>(want.size());
    if (ok)
      ++matched;
    else if (first_failure.empty())
      first_failure = "run " + std::to_string(run) + " differs";
  }
  double secs = seconds_since(t0);
  bool pass = matched == 50 && secs < 60;
  return {pass, std::to_string(matched) + "/50 catalogs match (" + std::to_string(total_clusters) + " clusters), " +
                    fmt(secs) + " s" + (first_failure.empty() ? "" : "; " + first_failure)};
}

// CSR catalogs on a 1000 km square over ten years.
scan::ScanConfig small_scan_config(std::uint64_t seed) {
  scan::ScanConfig cfg;
  cfg.rmax_km = 100;
  cfg.tmax_units = 3;
  cfg.tagg_months = 12;
  cfg.replicates = 999;
  cfg.seed = seed;
  return cfg;
}

sim::SimSpec small_sim(sim::Process process, std::uint64_t seed) {
  sim::SimSpec spec;
  spec.process = process;
  spec.n = 500;
  spec.region = planar_box(1000);
  spec.metric = geo::Metric::planar;
  spec.period = year_period(2000, 2009);
  spec.cluster_fraction = 0.3;
  spec.cluster_radius_km = 50;
  spec.cluster_months = 12;
  spec.cluster_count = 1;
  spec.seed = seed;
  spec.marks = false;
  return spec;
}

Outcome criterion2() {
  auto t0 = Clock::now();
  int hits = 0;
  for (int run = 0; run < 200; ++run) {
    auto cat = sim::simulate_catalog(small_sim(sim::Process::csr, 20000 + static_cast<std::uint64_t>(run))).catalog;
    auto res = scan::run_stpss(cat, small_scan_config(5000 + static_cast<std::uint64_t>(run)));
    if (!res.clusters.empty() && res.clusters.front().p_value <= 0.05) ++hits;
  }
  double frac = hits / 200.0, secs = seconds_since(t0);
  bool pass = frac >= 0.02 && frac <= 0.09 && secs < 30 * 60;
  return {pass, "fraction with top p <= 0.05: " + fmt(frac) + " (" + std::to_string(hits) + "/200), " + fmt(secs) +
                    " s"};
}

Outcome criterion3() {
  auto t0 = Clock::now();
  int hits = 0;
  for (int run = 0; run < 100; ++run) {
    auto sim = sim::simulate_catalog(small_sim(sim::Process::clustered, 30000 + static_cast<std::uint64_t>(run)));
    auto res = scan::run_stpss(sim.catalog, small_scan_config(7000 + static_cast<std::uint64_t>(run)));
    if (res.clusters.empty()) continue;
    const auto& top = res.clusters.front();
    const auto& inj = sim.clusters.front();
    bool space = geo::distance_km(top.cylinder.center, inj.center, geo::Metric::planar) <=
                 top.cylinder.radius_km + inj.radius_km;
    bool time = top.start_date <= inj.end && inj.start <= top.end_date;
    if (top.p_value <= 0.005 && space && time) ++hits;
  }
  double secs = seconds_since(t0);
  return {hits >= 95, std::to_string(hits) + "/100 runs detect the injection at p <= 0.005, " + fmt(secs) + " s"};
}

Outcome criterion4() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  int exact = 0, monotone = 0;
  for (int run = 0; run < 100; ++run) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(2, 500)(rng);
    EventCatalog cat;
    if (run % 2 == 0) {
      cat = random_planar(rng, n, 200, 1990, 1999, run % 4 == 0);
    } else {
      std::uniform_real_distribution<double> lon(100, 106), lat(28, 33);
      auto period = year_period(1990, 1999);
      std::uniform_int_distribution<std::int64_t> day(day_number(period.start), day_number(period.end));
      std::vector<Event> ev;
      for (std::size_t i = 0; i < n; ++i) {
        Event e;
        e.id = static_cast<std::int64_t>(i) + 1;
        e.location = {lon(rng), lat(rng)};
        e.date = from_day_number(day(rng));
        ev.push_back(e);
      }
      cat = EventCatalog(std::move(ev), geo::MultiPolygon{{geo::box_polygon(100, 28, 106, 33)}}, period);
    }
    ripley::LagGrid lags({5, 20, 50, 100, 250}, {10, 90, 365, 1000, 2500});
    auto ke = ripley::estimate_k(cat, lags, 0);
    bool ok = true, mono = true;
    for (std::size_t i = 0; i < 5; ++i) ok = ok && ke.ks[i] == oracle::k_spatial(cat, lags.r_km[i]);
    for (std::size_t j = 0; j < 5; ++j) ok = ok && ke.kt[j] == oracle::k_temporal(cat, lags.t_days[j]);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        ok = ok && ke.kst(i, j) == oracle::k_spacetime(cat, lags.r_km[i], lags.t_days[j]);
        if (i && ke.kst(i, j) < ke.kst(i - 1, j)) mono = false;
        if (j && ke.kst(i, j) < ke.kst(i, j - 1)) mono = false;
      }
    exact += ok;
    monotone += mono;
  }
  return {exact == 100 && monotone == 100, std::to_string(exact) + "/100 exact, " + std::to_string(monotone) +
                                               "/100 monotone, " + fmt(seconds_since(t0)) + " s"};
}

Outcome criterion5() {
  auto t0 = Clock::now();
  ripley::LagGrid lags({10, 25, 50, 100, 200}, {30, 90, 180, 365, 730});
  ripley::EnvelopeOptions opt;  // 2.5% / 97.5% quantiles: 95% envelope
  int clustered_hits = 0;
  std::size_t csr_inside = 0, csr_cells = 0;
  const int runs = 10;
  for (int run = 0; run < runs; ++run) {
    auto spec = small_sim(sim::Process::clustered, 50000 + static_cast<std::uint64_t>(run));
    spec.cluster_radius_km = 25;
    spec.cluster_count = 3;
    auto cl = sim::simulate_catalog(spec).catalog;
    auto ke = ripley::estimate_k(cl, lags);
    auto env = ripley::d_envelope(cl, lags, 199, 900 + static_cast<std::uint64_t>(run), opt);
    // smallest spatial lag that contains the cluster scale, all temporal lags within the window
    bool above = ke.d(1, 0) > env.upper(1, 0) && ke.d(1, 2) > env.upper(1, 2) && ke.d(1, 3) > env.upper(1, 3);
    clustered_hits += above;

    auto csr = sim::simulate_catalog(small_sim(sim::Process::csr, 60000 + static_cast<std::uint64_t>(run))).catalog;
    auto kc = ripley::estimate_k(csr, lags);
    auto ec = ripley::d_envelope(csr, lags, 199, 1900 + static_cast<std::uint64_t>(run), opt);
    for (std::size_t k = 0; k < kc.d.values.size(); ++k) {
      ++csr_cells;
      csr_inside += kc.d.values[k] >= ec.lower.values[k] && kc.d.values[k] <= ec.upper.values[k];
    }
  }
  double frac = static_cast<double>(csr_inside) / static_cast<double>(csr_cells);
  bool pass = clustered_hits == runs && frac >= 0.9;
  return {pass, "clustered D above envelope at small lags in " + std::to_string(clustered_hits) + "/" +
                    std::to_string(runs) + " runs; CSR cells inside envelope " + fmt(frac) + ", " +
                    fmt(seconds_since(t0)) + " s"};
}

Outcome criterion6() {
  auto t0 = Clock::now();
  sim::SimSpec spec;
  spec.process = sim::Process::clustered;
  spec.n = 3000;
  spec.period = year_period(1990, 2019);
  spec.cluster_fraction = 0.4;
  spec.cluster_count = 40;
  spec.cluster_radius_km = 20;
  spec.cluster_months = 12;
  spec.seed = 606;
  spec.marks = false;
  auto cat = sim::simulate_catalog(spec).catalog;
  workbench::SweepSpec sweep{{100, 200, 300}, {1, 3, 5}, {12}};
  scan::ScanConfig base;
  base.replicates = 999;
  base.seed = 6;
  auto res = workbench::sweep_scan(cat, sweep, base);
  // entries: R_max-major, then T_max
  std::vector<std::vector<double>> count(3, std::vector<double>(3, -1));
  std::string table;
  for (const auto& e : res.entries) {
    std::size_t i = static_cast<std::size_t>(std::find(sweep.rmax_km.begin(), sweep.rmax_km.end(), e.rmax_km) -
                                             sweep.rmax_km.begin());
    std::size_t j = static_cast<std::size_t>(std::find(sweep.tmax_years.begin(), sweep.tmax_years.end(),
                                                       e.tmax_years) - sweep.tmax_years.begin());
    if (e.result) count[i][j] = static_cast<double>(e.result->significant_count());
  }
  bool nonincreasing = true, stable = true;
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 1; i < 3; ++i)
      if (count[i][j] < 0 || count[i][j] > count[i - 1][j]) nonincreasing = false;
  double worst = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    double hi = *std::max_element(count[i].begin(), count[i].end());
    double lo = *std::min_element(count[i].begin(), count[i].end());
    if (lo < 0 || hi <= 0) {
      stable = false;
      continue;
    }
    worst = std::max(worst, (hi - lo) / hi);
    if (hi - lo > 0.1 * hi) stable = false;
    table += (i ? "; " : "") + std::string("R") + fmt(sweep.rmax_km[i]) + ":";
    for (std::size_t j = 0; j < 3; ++j) table += " " + fmt(count[i][j]);
  }
  bool pass = nonincreasing && stable;
  return {pass, "significant counts by R_max (T_max 1,3,5 y) " + table + "; max relative T_max change " +
                    fmt(worst) + ", " + fmt(seconds_since(t0)) + " s"};
}

Outcome criterion7() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(707);
  double worst_sum = 0, worst_exact = 0, worst_fit = 0;
  std::uniform_real_distribution<double> u(0, 100), v(-3, 3);
  for (int sys = 0; sys < 1000; ++sys) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(3, 40)(rng);
    std::vector<kriging::Sample> s;
    for (std::size_t i = 0; i < n; ++i) s.push_back({{u(rng), u(rng)}, v(rng)});
    kriging::VariogramModel model{sys % 2 ? 0.0 : std::uniform_real_distribution<double>(0, 0.5)(rng),
                                  std::uniform_real_distribution<double>(0.2, 3)(rng),
                                  std::uniform_real_distribution<double>(5, 150)(rng)};
    kriging::KrigeOptions opt;
    opt.metric = geo::Metric::planar;
    opt.neighbors = 16;
    auto p = kriging::ordinary_krige(s, model, {u(rng), u(rng)}, opt);
    double sum = std::accumulate(p.weights.begin(), p.weights.end(), 0.0);
    worst_sum = std::max(worst_sum, std::fabs(sum - 1));
    if (model.nugget == 0) {
      auto samples = kriging::average_duplicates(s);
      kriging::OrdinaryKriger k(samples, model, opt);
      for (const auto& smp : samples)
        worst_exact = std::max(worst_exact, std::fabs(k.predict(smp.location).value - smp.value));
    }
  }
  for (int fit = 0; fit < 100; ++fit) {
    kriging::VariogramModel truth{std::uniform_real_distribution<double>(0, 1)(rng),
                                  std::uniform_real_distribution<double>(0.5, 5)(rng),
                                  std::uniform_real_distribution<double>(50, 400)(rng)};
    std::vector<kriging::VariogramPoint> pts;
    for (int k = 1; k <= 30; ++k) {
      double h = 20.0 * k;
      pts.push_back({h, truth(h), static_cast<std::size_t>(40 + 3 * k)});
    }
    auto got = kriging::fit_variogram(pts);
    auto rel = [](double a, double b, double scale) { return std::fabs(a - b) / scale; };
    worst_fit = std::max({worst_fit, rel(got.nugget, truth.nugget, std::max(truth.nugget, 0.01 * truth.sill())),
                          rel(got.partial_sill, truth.partial_sill, truth.partial_sill),
                          rel(got.range_km, truth.range_km, truth.range_km)});
  }
  bool pass = worst_sum <= 1e-12 && worst_exact <= 1e-9 && worst_fit <= 0.01;
  return {pass, "max |sum w - 1| " + fmt(worst_sum) + ", max exactness error " + fmt(worst_exact) +
                    ", max parameter error " + fmt(worst_fit) + ", " + fmt(seconds_since(t0)) + " s"};
}

Outcome criterion8() {
  sim::SimSpec spec;
  spec.process = sim::Process::clustered;
  spec.n = 32473;
  spec.period = year_period(1950, 2015);
  spec.cluster_fraction = 0.1;
  spec.cluster_count = 30;
  spec.cluster_radius_km = 50;
  spec.seed = 808;
  auto cat = sim::simulate_catalog(spec).catalog;
  scan::ScanConfig cfg;
  cfg.rmax_km = 200;
  cfg.tagg_months = 12;
  cfg.tmax_units = 3;
  cfg.replicates = 999;
  cfg.seed = 8;
  std::vector<std::string> outputs;
  std::string times;
  double worst = 0;
  for (unsigned w : {1u, 4u, 16u}) {
    cfg.workers = w;
    auto t0 = Clock::now();
    auto res = scan::run_stpss(cat, cfg);
    double secs = seconds_since(t0);
    worst = std::max(worst, secs);
    std::string out = scan::clusters_csv(res) + scan::clusters_geojson(res);
    for (double m : res.replicate_max_log_glr) out += io::format_double(m) + "\n";
    outputs.push_back(std::move(out));
    times += (times.empty() ? "" : ", ") + std::to_string(w) + " workers " + fmt(secs, 4) + " s";
  }
  bool identical = outputs[0] == outputs[1] && outputs[1] == outputs[2];
  bool pass = identical && worst < 15 * 60;
  return {pass, std::string(identical ? "byte-identical" : "OUTPUTS DIFFER") + "; " + times + " (" +
                    std::to_string(std::thread::hardware_concurrency()) + " hardware threads)"};
}

std::string read(const fs::path& p) { return io::read_file(p); }

int run_cli(const std::string& args) {
  std::string cmd = std::string(STSCAN_BIN) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

Outcome criterion9() {
  auto t0 = Clock::now();
  std::vector<std::string> problems;

  // decade partition
  sim::SimSpec spec;
  spec.process = sim::Process::clustered;
  spec.n = 4000;
  spec.period = year_period(1950, 2016);
  spec.cluster_count = 12;
  spec.cluster_fraction = 0.3;
  spec.cluster_radius_km = 40;
  spec.seed = 909;
  auto cat = sim::simulate_catalog(spec).catalog;
  workbench::DecadeSpec dspec;
  auto periods = workbench::decade_periods(cat, dspec);
  std::multiset<std::int64_t> seen;
  for (const auto& p : periods) {
    auto part = subset(cat, {p, std::nullopt});
    for (const auto& e : part.events()) seen.insert(e.id);
  }
  std::multiset<std::int64_t> want;
  for (const auto& e : cat.events())
    if (year_of(e.date) >= dspec.start_year && day_number(e.date) <= day_number(periods.back().end)) want.insert(e.id);
  if (seen != want) problems.push_back("decade partition lost or duplicated events");

  auto cfg = workbench::decade_config();
  cfg.replicates = 199;
  cfg.alpha = 0.01;
  auto runs = workbench::decade_scan(cat, dspec, cfg);
  std::size_t n_events = 0;
  for (const auto& r : runs) n_events += r.n_events;
  if (n_events != want.size()) problems.push_back("decade runs do not cover the decade events");
  auto clusters = workbench::significant_clusters(runs, cfg.alpha);

  // recurrence conservation over a 4 x 4 lattice of catchments covering part of the region
  std::vector<geo::Feature> catchments;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      catchments.push_back({"c" + std::to_string(i) + std::to_string(j),
                            geo::MultiPolygon{{geo::box_polygon(80 + 10 * i, 20 + 6 * j, 90 + 10 * i, 26 + 6 * j)}}});
  auto rec = workbench::recurrence_by_catchment(clusters, catchments);
  std::size_t summed = rec.unassigned;
  for (const auto& r : rec.records) summed += r.count;
  if (summed != clusters.size() || rec.total != clusters.size())
    problems.push_back("recurrence counts do not reconcile");

  // manifest reruns through the CLI
  fs::path dir = fs::temp_directory_path() / "stscan_acceptance_9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto p = [&](const char* name) { return (dir / name).string(); };
  std::ofstream(dir / "catchments.geojson") << R"({"type":"FeatureCollection","features":[
{"type":"Feature","id":"west","geometry":{"type":"Polygon","coordinates":[[[73,18],[105,18],[105,54],[73,54],[73,18]]]}},
{"type":"Feature","id":"east","geometry":{"type":"Polygon","coordinates":[[[105.5,18],[136,18],[136,54],[105.5,54],[105.5,18]]]}}]})";
  std::vector<std::pair<std::string, std::vector<std::string>>> steps{
      {"simulate --process clustered --n 3000 --seed 9 --cluster-count 10 --period-start 1956-01-01 "
       "--period-end 1985-12-31 --out " + p("cat.csv") + " --truth " + p("truth.csv"),
       {p("cat.csv"), p("truth.csv")}},
      {"scan -i " + p("cat.csv") + " --rmax-km 150 --tmax-units 2 --replicates 99 --out " + p("clusters.csv") +
           " --geojson " + p("clusters.geojson"),
       {p("clusters.csv"), p("clusters.geojson")}},
      {"kfunc -i " + p("cat.csv") + " --r-step-km 100 --r-max-km 500 --t-step-days 365.25 --t-max-days 1826.25 "
       "--envelope 19 --out " + p("k.csv"),
       {p("k.csv")}},
      {"decades -i " + p("cat.csv") + " --replicates 99 --alpha 0.05 --out-dir " + p("dec"),
       {p("dec/decades.csv"), p("dec/decade_clusters.csv"), p("dec/duration_stats.csv")}},
      {"recurrence --clusters " + p("dec/decade_clusters.csv") + " --catchments " + p("catchments.geojson") +
           " --out " + p("recurrence.csv"),
       {p("recurrence.csv")}},
  };
  std::vector<std::string> manifests{p("cat.csv.manifest.json"), p("clusters.csv.manifest.json"),
                                     p("k.csv.manifest.json"), p("dec/manifest.json"),
                                     p("recurrence.csv.manifest.json")};
  int reruns_ok = 0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (run_cli(steps[k].first) != 0) {
      problems.push_back("CLI step failed: " + steps[k].first.substr(0, steps[k].first.find(' ')));
      continue;
    }
    std::vector<std::string> before;
    for (const auto& f : steps[k].second) before.push_back(read(f));
    std::string manifest_before = read(manifests[k]);
    // rerun into place after removing the outputs
    for (const auto& f : steps[k].second) fs::remove(f);
    if (run_cli("rerun " + manifests[k]) != 0) {
      problems.push_back("rerun failed for " + manifests[k]);
      continue;
    }
    bool same = read(manifests[k]) == manifest_before;
    for (std::size_t i = 0; i < before.size(); ++i) same = same && fs::exists(steps[k].second[i]) &&
                                                          read(steps[k].second[i]) == before[i];
    if (same)
      ++reruns_ok;
    else
      problems.push_back("rerun differs for " + manifests[k]);
  }
  fs::remove_all(dir);

  std::string detail = std::to_string(periods.size()) + " decades, " + std::to_string(want.size()) + " events, " +
                       std::to_string(clusters.size()) + " significant clusters reconciled; " +
                       std::to_string(reruns_ok) + "/" + std::to_string(steps.size()) +
                       " manifest reruns byte-identical, " + fmt(seconds_since(t0)) + " s";
  for (const auto& pr : problems) detail += "; " + pr;
  return {problems.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                 criterion6, criterion7, criterion8, criterion9};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
