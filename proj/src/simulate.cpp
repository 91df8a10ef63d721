#include "stscan/simulate.hpp"

#include <cmath>

#include "stscan/error.hpp"
#include "stscan/rng.hpp"

namespace stscan::sim {

std::string to_string(Process p) { return p == Process::csr ? "csr" : "clustered"; }

Process process_from_string(const std::string& s) {
  if (s == "csr") return Process::csr;
  if (s == "clustered") return Process::clustered;
  throw ConfigError("unknown process '" + s + "' (expected csr or clustered)");
}

namespace {

constexpr std::size_t kMaxAttempts = 10'000'000;

class Sampler {
 public:
  Sampler(const SimSpec& spec) : spec_(spec), rng_(make_stream(spec.seed, 0)), bbox_(spec.region.bbox()) {}

  double u() { return uniform01(rng_); }
  std::mt19937_64& rng() { return rng_; }

  geo::GeoPoint in_region() {
    for (std::size_t k = 0; k < kMaxAttempts; ++k) {
      geo::GeoPoint p;
      if (spec_.metric == geo::Metric::planar) {
        p = {bbox_.min_lon + u() * (bbox_.max_lon - bbox_.min_lon), bbox_.min_lat + u() * (bbox_.max_lat - bbox_.min_lat)};
      } else {
        double s0 = std::sin(bbox_.min_lat * geo::kPi / 180), s1 = std::sin(bbox_.max_lat * geo::kPi / 180);
        p = {bbox_.min_lon + u() * (bbox_.max_lon - bbox_.min_lon), std::asin(s0 + u() * (s1 - s0)) * 180 / geo::kPi};
      }
      if (spec_.region.contains(p)) return p;
    }
    throw DataError("simulation could not place a point inside the region");
  }

  // uniform in the disc/cap of radius r around c, clipped to the region
  geo::GeoPoint in_disc(geo::GeoPoint c, double r) {
    for (std::size_t k = 0; k < kMaxAttempts; ++k) {
      double bearing = 2 * geo::kPi * u();
      double d;
      if (spec_.metric == geo::Metric::planar) {
        d = r * std::sqrt(u());
      } else {
        double cmin = std::cos(r / geo::kEarthRadiusKm);
        d = geo::kEarthRadiusKm * std::acos(1 - u() * (1 - cmin));
      }
      auto p = geo::destination(c, bearing, d, spec_.metric);
      if (geo::distance_km(c, p, spec_.metric) <= r && spec_.region.contains(p) && geo::is_valid(p, spec_.metric))
        return p;
    }
    throw DataError("simulation could not place a cluster event inside the region");
  }

  Date day_in(std::int64_t first, std::int64_t last) {
    return from_day_number(first + static_cast<std::int64_t>(uniform_below(rng_, static_cast<std::uint64_t>(last - first + 1))));
  }

  std::int64_t poisson(double mean) {
    double l = std::exp(-mean), p = 1;
    std::int64_t k = 0;
    do {
      ++k;
      p *= u();
    } while (p > l);
    return k - 1;
  }

  double normal() {
    double u1 = 1 - u(), u2 = u();
    return std::sqrt(-2 * std::log(u1)) * std::cos(2 * geo::kPi * u2);
  }

 private:
  const SimSpec& spec_;
  std::mt19937_64 rng_;
  geo::BoundingBox bbox_;
};

std::int64_t month_index(Date d) { return static_cast<int>(d.year()) * 12LL + static_cast<unsigned>(d.month()) - 1; }

Date month_start(std::int64_t m) {
  return Date{std::chrono::year{static_cast<int>(m / 12)}, std::chrono::month{static_cast<unsigned>(m % 12 + 1)},
              std::chrono::day{1}};
}

}  // namespace

SimResult simulate_catalog(const SimSpec& spec) {
  if (spec.n < 1) throw ConfigError("simulation needs n >= 1");
  if (spec.region.empty()) throw ConfigError("simulation needs a non-empty region");
  if (spec.period.end < spec.period.start) throw ConfigError("simulation period ends before it starts");
  bool clustered = spec.process == Process::clustered;
  if (clustered) {
    if (!(spec.cluster_fraction >= 0 && spec.cluster_fraction <= 1))
      throw ConfigError("cluster fraction must lie in [0, 1]");
    if (!(spec.cluster_radius_km > 0)) throw ConfigError("cluster radius must be positive");
    if (spec.cluster_months < 1) throw ConfigError("cluster duration must be at least one month");
    if (spec.cluster_count < 1) throw ConfigError("cluster count must be at least 1");
  }

  Sampler s(spec);
  std::size_t injected = clustered ? static_cast<std::size_t>(std::llround(spec.cluster_fraction * static_cast<double>(spec.n))) : 0;
  std::size_t background = spec.n - injected;
  std::int64_t d0 = day_number(spec.period.start), d1 = day_number(spec.period.end);

  std::vector<Event> events;
  std::vector<int> source_by_id;  // index id-1
  events.reserve(spec.n);
  auto add = [&](geo::GeoPoint p, Date d, int src) {
    Event e;
    e.id = static_cast<std::int64_t>(events.size()) + 1;
    e.location = p;
    e.date = d;
    if (spec.marks) {
      e.fatalities = s.poisson(0.3);
      e.economic_loss = std::exp(13.0 + 2.0 * s.normal());
    }
    events.push_back(e);
    source_by_id.push_back(src);
  };

  for (std::size_t i = 0; i < background; ++i) {
    auto p = s.in_region();
    add(p, s.day_in(d0, d1), -1);
  }

  std::vector<InjectedCluster> clusters;
  if (clustered) {
    std::int64_t m0 = month_index(spec.period.start), m1 = month_index(spec.period.end);
    int len = spec.cluster_months;
    bool aligned = 12 % len == 0 || len % 12 == 0;
    // admissible window starts: whole windows inside the period's months
    std::vector<std::int64_t> starts;
    for (std::int64_t m = m0; m + len - 1 <= m1; ++m)
      if (!aligned || m % len == 0) starts.push_back(m);
    if (starts.empty()) starts.push_back(m0);
    for (int c = 0; c < spec.cluster_count; ++c) {
      InjectedCluster ic;
      ic.center = s.in_region();
      ic.radius_km = spec.cluster_radius_km;
      std::int64_t m = starts[uniform_below(s.rng(), starts.size())];
      Date ws = month_start(m), we = from_day_number(day_number(month_start(m + len)) - 1);
      if (ws < spec.period.start) ws = spec.period.start;
      if (we > spec.period.end) we = spec.period.end;
      ic.start = ws;
      ic.end = we;
      ic.n_events = injected / static_cast<std::size_t>(spec.cluster_count) +
                    (static_cast<std::size_t>(c) < injected % static_cast<std::size_t>(spec.cluster_count) ? 1 : 0);
      for (std::size_t k = 0; k < ic.n_events; ++k) {
        auto p = s.in_disc(ic.center, ic.radius_km);
        add(p, s.day_in(day_number(ws), day_number(we)), c);
      }
      clusters.push_back(ic);
    }
  }

  SimResult out;
  out.catalog = EventCatalog(std::move(events), spec.region, spec.period, spec.metric);
  out.source.reserve(out.catalog.size());
  for (const auto& e : out.catalog.events()) out.source.push_back(source_by_id[static_cast<std::size_t>(e.id - 1)]);
  out.clusters = std::move(clusters);
  return out;
}

}  // namespace stscan::sim
