#include "stscan/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "stscan/io.hpp"
#include "stscan/parallel.hpp"
#include "stscan/rng.hpp"
#include "stscan/spatial_index.hpp"

namespace stscan::scan {

std::string to_string(OverlapPolicy p) {
  switch (p) {
    case OverlapPolicy::no_geographic_overlap: return "no-geographic-overlap";
    case OverlapPolicy::no_center_in_cluster: return "no-center-in-cluster";
    case OverlapPolicy::report_all: return "report-all";
  }
  return "?";
}

OverlapPolicy overlap_policy_from_string(const std::string& s) {
  if (s == "no-geographic-overlap") return OverlapPolicy::no_geographic_overlap;
  if (s == "no-center-in-cluster") return OverlapPolicy::no_center_in_cluster;
  if (s == "report-all") return OverlapPolicy::report_all;
  throw ConfigError("unknown overlap policy '" + s +
                    "' (expected no-geographic-overlap, no-center-in-cluster or report-all)");
}

void validate_config(const ScanConfig& config, const EventCatalog& catalog, const TimeGrid& grid) {
  if (!(config.rmax_km > 0) || !std::isfinite(config.rmax_km)) throw ConfigError("R_max must be a positive number of km");
  double area = catalog.area_km2();
  double disc = geo::disc_area_km2(config.rmax_km, catalog.metric());
  if (disc > 0.5 * area)
    throw ConfigError("R_max rule violated: a circle of radius " + io::format_double(config.rmax_km) + " km covers " +
                      io::format_double(disc) + " km^2, more than 50% of the " + io::format_double(area) +
                      " km^2 study area");
  if (config.tmax_units < 1) throw ConfigError("T_max must be at least one T_agg unit");
  if (2 * config.tmax_units > grid.size())
    throw ConfigError("T_max rule violated: " + std::to_string(config.tmax_units) + " units exceed 50% of the " +
                      std::to_string(grid.size()) + "-interval study period");
  if (config.replicates < 19) throw ConfigError("at least 19 Monte Carlo replicates are required");
  if (!(config.alpha > 0 && config.alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
  if (config.min_cases < 1) throw ConfigError("min_cases must be at least 1");
}

// ---------------------------------------------------------------------------

CaseTable CaseTable::from_counts(std::vector<std::vector<std::int64_t>> counts) {
  CaseTable t;
  t.n_intervals_ = counts.empty() ? 0 : static_cast<int>(counts.front().size());
  t.interval_totals_.assign(static_cast<std::size_t>(t.n_intervals_), 0);
  for (const auto& row : counts) {
    if (static_cast<int>(row.size()) != t.n_intervals_) throw ConfigError("case table rows differ in length");
    std::int64_t s = 0;
    for (std::size_t d = 0; d < row.size(); ++d) {
      if (row[d] < 0) throw DataError("negative case count");
      s += row[d];
      t.interval_totals_[d] += row[d];
    }
    t.location_totals_.push_back(s);
    t.total_ += s;
  }
  t.counts_ = std::move(counts);
  return t;
}

CaseTable CaseTable::from_catalog(const EventCatalog& catalog, const TimeAssignment& time) {
  std::map<std::pair<double, double>, std::size_t> ids;
  std::vector<std::size_t> loc_of_event;
  std::vector<geo::GeoPoint> locs;
  for (const auto& e : catalog.events()) {
    auto [it, inserted] = ids.try_emplace({e.location.lon, e.location.lat}, locs.size());
    if (inserted) locs.push_back(e.location);
    loc_of_event.push_back(it->second);
  }
  std::vector<std::vector<std::int64_t>> counts(locs.size(), std::vector<std::int64_t>(static_cast<std::size_t>(time.grid.size()), 0));
  for (std::size_t i = 0; i < catalog.size(); ++i) ++counts[loc_of_event[i]][static_cast<std::size_t>(time.interval[i])];
  CaseTable t = from_counts(std::move(counts));
  t.location_of_event_ = std::move(loc_of_event);
  t.locations_ = std::move(locs);
  return t;
}

std::vector<double> expected_counts(const CaseTable& table, std::span<const std::size_t> zone) {
  std::vector<double> mu(static_cast<std::size_t>(table.n_intervals()), 0.0);
  if (table.total() == 0) return mu;
  double inv_c = 1.0 / static_cast<double>(table.total());
  for (int d = 0; d < table.n_intervals(); ++d) {
    double s = 0;
    for (std::size_t z : zone)
      s += inv_c * static_cast<double>(table.location_total(z)) * static_cast<double>(table.interval_total(d));
    mu[static_cast<std::size_t>(d)] = s;
  }
  return mu;
}

double cylinder_expectation(const CaseTable& table, std::span<const std::size_t> zone, int start, int end) {
  if (start < 0 || end >= table.n_intervals() || start > end) throw ConfigError("cylinder interval outside the case table");
  auto mu = expected_counts(table, zone);
  double s = 0;
  for (int d = start; d <= end; ++d) s += mu[static_cast<std::size_t>(d)];
  return s;
}

double log_glr(double c_a, double mu_a, double total) {
  if (c_a < 0 || c_a > total) throw NumericalError("observed count outside [0, C]");
  double inside = 0, outside = 0;
  if (c_a > 0) {
    if (!(mu_a > 0)) throw NumericalError("degenerate case table: expected count is zero where cases were observed");
    inside = c_a * std::log(c_a / mu_a);
  }
  double rest = total - c_a;
  if (rest > 0) {
    if (!(total - mu_a > 0)) throw NumericalError("degenerate case table: expectation exhausts all cases");
    outside = rest * std::log(rest / (total - mu_a));
  }
  return inside + outside;
}

double glr(double c_a, double mu_a, double total) { return std::exp(log_glr(c_a, mu_a, total)); }

std::string format_glr(double log_glr) {
  if (log_glr < 700) return io::format_double(std::exp(log_glr));
  double l10 = log_glr / std::log(10.0);
  double exponent = std::floor(l10);
  double mantissa = std::pow(10.0, l10 - exponent);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12fe+%.0f", mantissa, exponent);
  return buf;
}

// ---------------------------------------------------------------------------
// Scan geometry: per center, neighbor events sorted by distance and grouped
// into radius steps of equal distance.

namespace {

struct Geometry {
  std::vector<std::size_t> center_event;
  std::vector<geo::GeoPoint> center_point;
  std::vector<std::uint32_t> members;
  std::vector<std::size_t> member_begin;
  std::vector<std::size_t> step_end;  // absolute offsets into members
  std::vector<double> step_radius;
  std::vector<std::size_t> step_begin;

  std::size_t size() const { return center_event.size(); }
};

Geometry build_geometry(const EventCatalog& catalog, double rmax_km, unsigned workers) {
  const auto& events = catalog.events();
  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = events[a];
    const auto& eb = events[b];
    if (ea.location.lon != eb.location.lon) return ea.location.lon < eb.location.lon;
    if (ea.location.lat != eb.location.lat) return ea.location.lat < eb.location.lat;
    if (ea.id != eb.id) return ea.id < eb.id;
    return a < b;
  });
  Geometry g;
  for (std::size_t k = 0; k < order.size(); ++k)
    if (k == 0 || !(events[order[k]].location == events[order[k - 1]].location)) {
      g.center_event.push_back(order[k]);
      g.center_point.push_back(events[order[k]].location);
    }

  auto points = catalog.locations();
  geo::SpatialIndex index(points, catalog.metric());
  std::size_t n_centers = g.size();
  std::vector<std::vector<geo::Neighbor>> neighbors(n_centers);
  parallel_for(
      n_centers, workers,
      [&](unsigned, std::size_t c) {
        auto nb = index.range_query(g.center_point[c], rmax_km);
        std::stable_sort(nb.begin(), nb.end(), [&](const geo::Neighbor& a, const geo::Neighbor& b) {
          if (a.distance_km != b.distance_km) return a.distance_km < b.distance_km;
          return events[a.index].id < events[b.index].id;
        });
        neighbors[c] = std::move(nb);
      },
      32);

  g.member_begin.push_back(0);
  g.step_begin.push_back(0);
  for (std::size_t c = 0; c < n_centers; ++c) {
    const auto& nb = neighbors[c];
    for (std::size_t k = 0; k < nb.size(); ++k) {
      g.members.push_back(static_cast<std::uint32_t>(nb[k].index));
      if (k + 1 == nb.size() || nb[k + 1].distance_km != nb[k].distance_km) {
        g.step_end.push_back(g.members.size());
        g.step_radius.push_back(nb[k].distance_km);
      }
    }
    g.member_begin.push_back(g.members.size());
    g.step_begin.push_back(g.step_end.size());
    std::vector<geo::Neighbor>().swap(neighbors[c]);
  }
  return g;
}

// Incremental cylinder evaluation for one center. Growing the radius with the
// interval fixed raises mu_A and leaves c_A unchanged unless the new events
// fall inside the interval, and the likelihood ratio falls as mu_A rises while
// c_A > mu_A. So the only cylinders that can beat a smaller-radius cylinder
// with the same interval are those containing a newly added event; only those
// are evaluated.
class Kernel {
 public:
  Kernel(const Geometry& g, std::span<const std::int64_t> interval_totals, const ScanConfig& config, std::int64_t total)
      : g_(g), d_(static_cast<int>(interval_totals.size())), t_(config.tmax_units), min_cases_(config.min_cases),
        total_(total) {
    prefix_.assign(interval_totals.size() + 1, 0);
    for (std::size_t d = 0; d < interval_totals.size(); ++d) prefix_[d + 1] = prefix_[d] + interval_totals[d];
    logtab_.resize(static_cast<std::size_t>(total_) + 1);
    logtab_[0] = 0;
    for (std::int64_t k = 1; k <= total_; ++k) logtab_[static_cast<std::size_t>(k)] = std::log(static_cast<double>(k));
    log_total_ = logtab_[static_cast<std::size_t>(total_)];
    inv_total_sq_ = 1.0 / (static_cast<double>(total_) * static_cast<double>(total_));
    // N_A and log N_A for every window (s, length), indexed s * T_max + length - 1
    window_size_.assign(static_cast<std::size_t>(d_) * static_cast<std::size_t>(t_), 0.0);
    window_log_.assign(window_size_.size(), 0.0);
    for (int s = 0; s < d_; ++s)
      for (int len = 1; len <= t_ && s + len <= d_; ++len) {
        std::int64_t n_a = prefix_[static_cast<std::size_t>(s + len)] - prefix_[static_cast<std::size_t>(s)];
        std::size_t w = static_cast<std::size_t>(s) * static_cast<std::size_t>(t_) + static_cast<std::size_t>(len - 1);
        window_size_[w] = static_cast<double>(n_a);
        window_log_[w] = logtab_[static_cast<std::size_t>(n_a)];
      }
  }

  int n_intervals() const { return d_; }

  // Exact value shared by the observed scan and every replicate.
  double llr(std::int64_t c, std::int64_t m) const {
    const std::int64_t cc = c * total_;
    double inside = static_cast<double>(c) * std::log(static_cast<double>(cc) / static_cast<double>(m));
    if (c == total_) return inside;
    double x = static_cast<double>(m - cc) / static_cast<double>(total_ * total_ - m);
    return inside + static_cast<double>(total_ - c) * std::log1p(x);
  }

  struct Workspace {
    std::vector<std::int64_t> cnt;
    std::vector<int> touched;
  };
  Workspace workspace() const { return {std::vector<std::int64_t>(static_cast<std::size_t>(d_), 0), {}}; }

  // sink.floor(): current threshold; sink.offer(llr, step, s, e, c, m).
  template <class Sink>
  void scan_center(std::size_t center, std::span<const int> labels, Workspace& ws, Sink& sink) const {
    std::int64_t n_zone = 0;
    std::size_t pos = g_.member_begin[center];
    for (std::size_t k = g_.step_begin[center]; k < g_.step_begin[center + 1]; ++k) {
      std::size_t end = g_.step_end[k];
      ws.touched.clear();
      for (; pos < end; ++pos) {
        int d = labels[g_.members[pos]];
        ++ws.cnt[static_cast<std::size_t>(d)];
        ++n_zone;
        ws.touched.push_back(d);
      }
      if (ws.touched.size() > 1) {
        std::sort(ws.touched.begin(), ws.touched.end());
        ws.touched.erase(std::unique(ws.touched.begin(), ws.touched.end()), ws.touched.end());
      }
      for (int d : ws.touched) evaluate(d, n_zone, k, ws, sink);
    }
    for (std::size_t p = g_.member_begin[center]; p < g_.member_begin[center + 1]; ++p)
      ws.cnt[static_cast<std::size_t>(labels[g_.members[p]])] = 0;
  }

 private:
  template <class Sink>
  void evaluate(int d, std::int64_t n_zone, std::size_t step, Workspace& ws, Sink& sink) const {
    const auto& cnt = ws.cnt;
    int s_lo = std::max(0, d - t_ + 1);
    const double zone = static_cast<double>(n_zone);
    const double base = log_total_ - logtab_[static_cast<std::size_t>(n_zone)];
    const double total = static_cast<double>(total_);
    double floor = sink.floor();
    for (int s = s_lo; s <= d; ++s) {
      std::int64_t c = 0;
      for (int q = s; q < d; ++q) c += cnt[static_cast<std::size_t>(q)];
      int e_hi = std::min(d_ - 1, s + t_ - 1);
      const std::size_t w0 = static_cast<std::size_t>(s) * static_cast<std::size_t>(t_);
      for (int e = d; e <= e_hi; ++e) {
        c += cnt[static_cast<std::size_t>(e)];
        const std::size_t w = w0 + static_cast<std::size_t>(e - s);
        // Upper bound from log tables and log(1 + x) <= x, using C^2 - m <= C^2.
        // Products of counts stay below 2^53, so excess is exact.
        const double dc = static_cast<double>(c);
        const double excess = dc * total - zone * window_size_[w];
        const double bound = dc * (logtab_[static_cast<std::size_t>(c)] + base - window_log_[w]) -
                             (total - dc) * excess * inv_total_sq_;
        const bool candidate = (c >= min_cases_) & (excess > 0) & (bound + 1e-9 * (1.0 + dc) >= floor);
        if (!candidate) continue;
        std::int64_t m = n_zone * static_cast<std::int64_t>(window_size_[w]);
        if (c * total_ <= m) continue;
        sink.offer(llr(c, m), step, s, e, c, m);
        floor = sink.floor();
      }
    }
  }

  const Geometry& g_;
  int d_, t_, min_cases_;
  std::int64_t total_;
  std::vector<std::int64_t> prefix_;
  std::vector<double> logtab_;
  double log_total_ = 0;
  double inv_total_sq_ = 0;
  std::vector<double> window_size_, window_log_;
};

struct CenterBest {
  double llr = -std::numeric_limits<double>::infinity();
  std::size_t step = 0;
  int s = 0, e = 0;
  std::int64_t c = 0, m = 0;

  double floor() const { return llr; }
  void offer(double v, std::size_t k, int s_, int e_, std::int64_t c_, std::int64_t m_) {
    bool better = v > llr || (v == llr && (k < step || (k == step && (s_ < s || (s_ == s && e_ < e)))));
    if (!better) return;
    llr = v;
    step = k;
    s = s_;
    e = e_;
    c = c_;
    m = m_;
  }
};

struct ReplicateMax {
  double best = 0;
  double floor() const { return best; }
  void offer(double v, std::size_t, int, int, std::int64_t, std::int64_t) {
    if (v > best) best = v;
  }
};

geo::GeoPoint centroid_of(const EventCatalog& catalog, const std::vector<std::size_t>& idx) {
  if (idx.empty()) return {};
  if (catalog.metric() == geo::Metric::planar) {
    double x = 0, y = 0;
    for (auto i : idx) {
      x += catalog[i].location.lon;
      y += catalog[i].location.lat;
    }
    return {x / static_cast<double>(idx.size()), y / static_cast<double>(idx.size())};
  }
  double v[3] = {0, 0, 0};
  for (auto i : idx) {
    auto e = geo::embed(catalog[i].location, geo::Metric::great_circle);
    for (int k = 0; k < 3; ++k) v[k] += e[static_cast<std::size_t>(k)];
  }
  double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (norm == 0) return catalog[idx.front()].location;
  constexpr double deg = 180.0 / geo::kPi;
  return {std::atan2(v[1], v[0]) * deg, std::asin(std::clamp(v[2] / norm, -1.0, 1.0)) * deg};
}

}  // namespace

void enumerate_cylinders(const EventCatalog& catalog, const TimeAssignment& time, const ScanConfig& config,
                         const std::function<void(const Cylinder&)>& visit) {
  if (catalog.empty()) return;
  Geometry g = build_geometry(catalog, config.rmax_km, 1);
  const int n_int = time.grid.size();
  const std::int64_t total = static_cast<std::int64_t>(catalog.size());
  Kernel kernel(g, time.counts, config, total);
  std::vector<std::int64_t> prefix(time.counts.size() + 1, 0);
  for (std::size_t d = 0; d < time.counts.size(); ++d) prefix[d + 1] = prefix[d] + time.counts[d];
  for (std::size_t c = 0; c < g.size(); ++c) {
    std::vector<std::int64_t> cnt(static_cast<std::size_t>(n_int), 0);
    std::size_t pos = g.member_begin[c];
    std::int64_t n_zone = 0;
    for (std::size_t k = g.step_begin[c]; k < g.step_begin[c + 1]; ++k) {
      for (; pos < g.step_end[k]; ++pos) {
        ++cnt[static_cast<std::size_t>(time.interval[g.members[pos]])];
        ++n_zone;
      }
      for (int s = 0; s < n_int; ++s) {
        std::int64_t obs = 0;
        for (int e = s; e < n_int && e - s + 1 <= config.tmax_units; ++e) {
          obs += cnt[static_cast<std::size_t>(e)];
          std::int64_t m = n_zone * (prefix[static_cast<std::size_t>(e) + 1] - prefix[static_cast<std::size_t>(s)]);
          if (obs < config.min_cases || obs * total <= m) continue;
          Cylinder cyl;
          cyl.center_id = catalog[g.center_event[c]].id;
          cyl.center = g.center_point[c];
          cyl.radius_km = g.step_radius[k];
          cyl.start = s;
          cyl.end = e;
          for (std::size_t p = g.member_begin[c]; p < g.step_end[k]; ++p) {
            int d = time.interval[g.members[p]];
            if (d >= s && d <= e) cyl.members.push_back(catalog[g.members[p]].id);
          }
          std::sort(cyl.members.begin(), cyl.members.end());
          cyl.observed = obs;
          cyl.expected = static_cast<double>(m) / static_cast<double>(total);
          cyl.log_glr = kernel.llr(obs, m);
          visit(cyl);
        }
      }
    }
  }
}

bool ranks_before(const Cluster& a, const Cluster& b) {
  const auto& x = a.cylinder;
  const auto& y = b.cylinder;
  if (x.log_glr != y.log_glr) return x.log_glr > y.log_glr;
  if (x.radius_km != y.radius_km) return x.radius_km < y.radius_km;
  if (x.start != y.start) return x.start < y.start;
  if (x.end != y.end) return x.end < y.end;
  if (x.center_id != y.center_id) return x.center_id < y.center_id;
  if (x.center.lon != y.center.lon) return x.center.lon < y.center.lon;
  return x.center.lat < y.center.lat;
}

void sort_clusters(std::vector<Cluster>& clusters) { std::sort(clusters.begin(), clusters.end(), ranks_before); }

std::vector<Cluster> select_secondary(const std::vector<Cluster>& ranked, OverlapPolicy policy, geo::Metric metric) {
  if (policy == OverlapPolicy::report_all) return ranked;
  std::vector<Cluster> kept;
  for (const auto& cand : ranked) {
    bool drop = false;
    for (const auto& k : kept) {
      double d = geo::distance_km(cand.cylinder.center, k.cylinder.center, metric);
      if (policy == OverlapPolicy::no_geographic_overlap) {
        drop = d <= cand.cylinder.radius_km + k.cylinder.radius_km;
      } else {
        drop = d <= k.cylinder.radius_km || d <= cand.cylinder.radius_km;
      }
      if (drop) break;
    }
    if (!drop) kept.push_back(cand);
  }
  return kept;
}

std::vector<int> permute_labels(std::span<const int> labels, std::uint64_t seed, std::uint64_t stream) {
  std::vector<int> out(labels.begin(), labels.end());
  auto rng = make_stream(seed, stream);
  shuffle(std::span<int>(out), rng);
  return out;
}

EventCatalog permute_dates(const EventCatalog& catalog, std::uint64_t seed, std::uint64_t stream) {
  std::vector<Date> dates;
  for (const auto& e : catalog.events()) dates.push_back(e.date);
  auto rng = make_stream(seed, stream);
  shuffle(std::span<Date>(dates), rng);
  std::vector<Event> events = catalog.events();
  for (std::size_t i = 0; i < events.size(); ++i) events[i].date = dates[i];
  return EventCatalog(std::move(events), catalog.region(), catalog.period(), catalog.metric());
}

std::size_t ScanResult::significant_count() const { return significant_count(config.alpha); }

std::size_t ScanResult::significant_count(double alpha) const {
  return static_cast<std::size_t>(std::count_if(clusters.begin(), clusters.end(),
                                                [&](const Cluster& c) { return c.p_value <= alpha; }));
}

ScanResult run_stpss(const EventCatalog& catalog, const ScanConfig& config) {
  if (catalog.empty()) throw DataError("cannot scan an empty catalog");
  TimeAssignment time = assign_time_grid(catalog, config.tagg_months);
  if (time.grid.size() < 2)
    throw DataError("degenerate single-interval period: the scan needs at least two T_agg intervals");
  if (static_cast<std::int64_t>(catalog.size()) < config.min_cases)
    throw DataError("catalog has fewer cases than min_cases");
  validate_config(config, catalog, time.grid);

  const unsigned workers = resolve_workers(config.workers);
  const std::int64_t total = static_cast<std::int64_t>(catalog.size());
  Geometry g = build_geometry(catalog, config.rmax_km, workers);
  Kernel kernel(g, time.counts, config, total);

  // Observed data: best cylinder per center.
  std::vector<CenterBest> best(g.size());
  {
    std::vector<Kernel::Workspace> ws;
    for (unsigned w = 0; w < workers; ++w) ws.push_back(kernel.workspace());
    parallel_for(
        g.size(), workers, [&](unsigned w, std::size_t c) { kernel.scan_center(c, time.interval, ws[w], best[c]); },
        16);
  }

  // Replicates: maximum over all cylinders after permuting interval labels.
  std::vector<double> rep_max(static_cast<std::size_t>(config.replicates), 0.0);
  {
    std::vector<Kernel::Workspace> ws;
    std::vector<std::vector<int>> labels(workers);
    for (unsigned w = 0; w < workers; ++w) ws.push_back(kernel.workspace());
    parallel_for(rep_max.size(), workers, [&](unsigned w, std::size_t r) {
      labels[w] = permute_labels(time.interval, config.seed, static_cast<std::uint64_t>(r));
      ReplicateMax sink;
      for (std::size_t c = 0; c < g.size(); ++c) kernel.scan_center(c, labels[w], ws[w], sink);
      rep_max[r] = sink.best;
    });
  }
  std::vector<double> sorted_max = rep_max;
  std::sort(sorted_max.begin(), sorted_max.end());

  std::vector<Cluster> candidates;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto& b = best[c];
    if (b.llr == -std::numeric_limits<double>::infinity()) continue;
    Cluster cl;
    cl.cylinder.center_id = catalog[g.center_event[c]].id;
    cl.cylinder.center = g.center_point[c];
    cl.cylinder.radius_km = g.step_radius[b.step];
    cl.cylinder.start = b.s;
    cl.cylinder.end = b.e;
    cl.cylinder.observed = b.c;
    cl.cylinder.expected = static_cast<double>(b.m) / static_cast<double>(total);
    cl.cylinder.log_glr = b.llr;
    cl.glr = std::exp(b.llr);
    auto ge = static_cast<std::size_t>(sorted_max.end() - std::lower_bound(sorted_max.begin(), sorted_max.end(), b.llr));
    cl.p_value = static_cast<double>(1 + ge) / static_cast<double>(config.replicates + 1);
    cl.start_date = time.grid.interval_start(b.s);
    cl.end_date = time.grid.interval_end(b.e);
    // Stash the center index for member reconstruction below.
    cl.rank = static_cast<int>(c);
    candidates.push_back(std::move(cl));
  }
  sort_clusters(candidates);

  ScanResult result;
  result.config = config;
  result.n_candidates = candidates.size();
  result.clusters = select_secondary(candidates, config.overlap_policy, catalog.metric());
  for (std::size_t r = 0; r < result.clusters.size(); ++r) {
    auto& cl = result.clusters[r];
    auto c = static_cast<std::size_t>(cl.rank);
    const auto& b = best[c];
    std::vector<std::size_t> idx;
    for (std::size_t p = g.member_begin[c]; p < g.step_end[b.step]; ++p) {
      int d = time.interval[g.members[p]];
      if (d >= b.s && d <= b.e) idx.push_back(g.members[p]);
    }
    for (auto i : idx) cl.cylinder.members.push_back(catalog[i].id);
    std::sort(cl.cylinder.members.begin(), cl.cylinder.members.end());
    cl.centroid = centroid_of(catalog, idx);
    cl.rank = static_cast<int>(r) + 1;
  }
  result.replicate_max_log_glr = std::move(rep_max);
  result.n_intervals = time.grid.size();
  result.total_cases = total;
  result.metric = catalog.metric();
  for (int d = 0; d < time.grid.size(); ++d) result.interval_labels.push_back(time.grid.label(d));
  return result;
}

}  // namespace stscan::scan
