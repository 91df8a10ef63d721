#include "stscan/ripley.hpp"

#include <algorithm>
#include <cmath>

#include "stscan/io.hpp"
#include "stscan/parallel.hpp"
#include "stscan/rng.hpp"
#include "stscan/spatial_index.hpp"

namespace stscan::ripley {

namespace {

void check_lags(const std::vector<double>& lags, const char* what) {
  if (lags.empty()) throw ConfigError(std::string(what) + " lag list is empty");
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (!std::isfinite(lags[i]) || !(lags[i] > 0)) throw ConfigError(std::string(what) + " lags must be positive and finite");
    if (i > 0 && !(lags[i] > lags[i - 1])) throw ConfigError(std::string(what) + " lags must be strictly increasing");
  }
}

void require_pairs(const EventCatalog& catalog) {
  if (catalog.size() < 2) throw DataError("K-function needs at least 2 events");
}

// Index of the first lag >= value, or lags.size() when value exceeds them all.
std::size_t lag_bin(std::span<const double> lags, double value) {
  return static_cast<std::size_t>(std::lower_bound(lags.begin(), lags.end(), value) - lags.begin());
}

double pair_scale(std::size_t n) { return static_cast<double>(n) * static_cast<double>(n - 1); }

std::vector<std::int64_t> day_numbers(const EventCatalog& catalog) {
  std::vector<std::int64_t> days;
  days.reserve(catalog.size());
  for (const auto& e : catalog.events()) days.push_back(day_number(e.date));
  return days;
}

// Unordered spatial pairs (i < j) within the largest spatial lag, with their bin.
struct SpatialPair {
  std::uint32_t i, j;
  std::uint32_t bin;
};

class PairSource {
 public:
  PairSource(const EventCatalog& catalog, std::span<const double> r_km, unsigned workers)
      : points_(catalog.locations()), index_(points_, catalog.metric()), r_km_(r_km.begin(), r_km.end()),
        workers_(workers) {}

  // Calls visit(worker, i, j, bin) for every unordered pair within the last lag.
  template <class Visit>
  void for_each(Visit&& visit) const {
    if (cached_) {
      parallel_for(
          pairs_.size(), workers_,
          [&](unsigned w, std::size_t k) { visit(w, pairs_[k].i, pairs_[k].j, pairs_[k].bin); }, 4096);
      return;
    }
    double reach = r_km_.back();
    parallel_for(
        points_.size(), workers_,
        [&](unsigned w, std::size_t i) {
          for (const auto& nb : index_.range_query(points_[i], reach)) {
            if (nb.index <= i) continue;
            visit(w, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(nb.index),
                  static_cast<std::uint32_t>(lag_bin(r_km_, nb.distance_km)));
          }
        },
        16);
  }

  // Materializes the pair list when it stays below max_pairs.
  void cache(std::size_t max_pairs) {
    std::size_t total = 0;
    double reach = r_km_.back();
    for (std::size_t i = 0; i < points_.size() && total <= max_pairs; ++i) total += index_.range_count(points_[i], reach);
    if (total / 2 > max_pairs) return;
    for (std::size_t i = 0; i < points_.size(); ++i)
      for (const auto& nb : index_.range_query(points_[i], reach))
        if (nb.index > i)
          pairs_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(nb.index),
                            static_cast<std::uint32_t>(lag_bin(r_km_, nb.distance_km))});
    cached_ = true;
  }

  unsigned workers() const { return resolve_workers(workers_); }

 private:
  std::vector<geo::GeoPoint> points_;
  geo::SpatialIndex index_;
  std::vector<double> r_km_;
  unsigned workers_;
  bool cached_ = false;
  std::vector<SpatialPair> pairs_;
};

// Ordered-pair counts within each (r, t) lag, cumulated over both axes.
std::vector<std::int64_t> spacetime_counts(const PairSource& pairs, std::span<const std::int64_t> days,
                                           std::size_t n_r, std::span<const double> t_days) {
  std::size_t n_t = t_days.size();
  unsigned workers = pairs.workers();
  std::vector<std::vector<std::int64_t>> local(workers, std::vector<std::int64_t>(n_r * n_t, 0));
  pairs.for_each([&](unsigned w, std::uint32_t i, std::uint32_t j, std::uint32_t rbin) {
    if (rbin >= n_r) return;
    double dt = static_cast<double>(std::llabs(days[i] - days[j]));
    std::size_t tbin = lag_bin(t_days, dt);
    if (tbin < n_t) local[w][rbin * n_t + tbin] += 2;
  });
  std::vector<std::int64_t> h(n_r * n_t, 0);
  for (const auto& l : local)
    for (std::size_t k = 0; k < h.size(); ++k) h[k] += l[k];
  for (std::size_t a = 0; a < n_r; ++a)
    for (std::size_t b = 0; b < n_t; ++b) {
      std::int64_t v = h[a * n_t + b];
      if (a > 0) v += h[(a - 1) * n_t + b];
      if (b > 0) v += h[a * n_t + b - 1];
      if (a > 0 && b > 0) v -= h[(a - 1) * n_t + b - 1];
      h[a * n_t + b] = v;
    }
  return h;
}

Surface scale_surface(const std::vector<std::int64_t>& counts, std::size_t n_r, std::size_t n_t, double scale) {
  Surface s(n_r, n_t);
  for (std::size_t k = 0; k < counts.size(); ++k) s.values[k] = static_cast<double>(counts[k]) * scale;
  return s;
}

}  // namespace

LagGrid::LagGrid(std::vector<double> r, std::vector<double> t) : r_km(std::move(r)), t_days(std::move(t)) {
  check_lags(r_km, "spatial");
  check_lags(t_days, "temporal");
}

LagGrid LagGrid::uniform(double r_step, double r_max, double t_step, double t_max) {
  if (!(r_step > 0) || !(t_step > 0) || !(r_max >= r_step) || !(t_max >= t_step))
    throw ConfigError("lag steps must be positive and not exceed their maxima");
  std::vector<double> r, t;
  for (int k = 1; k * r_step <= r_max * (1 + 1e-12); ++k) r.push_back(k * r_step);
  for (int k = 1; k * t_step <= t_max * (1 + 1e-12); ++k) t.push_back(k * t_step);
  return LagGrid(std::move(r), std::move(t));
}

LagGrid LagGrid::defaults() { return uniform(100.0, 2000.0, 365.25, 30 * 365.25); }

std::vector<double> k_spatial(const EventCatalog& catalog, std::span<const double> r_km, unsigned workers) {
  require_pairs(catalog);
  check_lags(std::vector<double>(r_km.begin(), r_km.end()), "spatial");
  PairSource pairs(catalog, r_km, workers);
  std::size_t n_r = r_km.size();
  std::vector<std::vector<std::int64_t>> local(pairs.workers(), std::vector<std::int64_t>(n_r, 0));
  pairs.for_each([&](unsigned w, std::uint32_t, std::uint32_t, std::uint32_t bin) {
    if (bin < n_r) local[w][bin] += 2;
  });
  std::vector<std::int64_t> counts(n_r, 0);
  for (const auto& l : local)
    for (std::size_t k = 0; k < n_r; ++k) counts[k] += l[k];
  for (std::size_t k = 1; k < n_r; ++k) counts[k] += counts[k - 1];
  double scale = catalog.area_km2() / pair_scale(catalog.size());
  std::vector<double> out(n_r);
  for (std::size_t k = 0; k < n_r; ++k) out[k] = static_cast<double>(counts[k]) * scale;
  return out;
}

std::vector<double> k_temporal(const EventCatalog& catalog, std::span<const double> t_days) {
  require_pairs(catalog);
  check_lags(std::vector<double>(t_days.begin(), t_days.end()), "temporal");
  auto days = day_numbers(catalog);
  std::sort(days.begin(), days.end());
  double scale = static_cast<double>(catalog.period().days()) / pair_scale(catalog.size());
  std::vector<double> out;
  out.reserve(t_days.size());
  for (double t : t_days) {
    // |a - b| <= t for integers a, b  <=>  |a - b| <= floor(t).
    auto reach = static_cast<std::int64_t>(std::floor(t));
    std::int64_t count = 0;
    for (std::size_t i = 0; i < days.size(); ++i) {
      auto hi = std::upper_bound(days.begin(), days.end(), days[i] + reach);
      auto lo = std::lower_bound(days.begin(), days.end(), days[i] - reach);
      count += (hi - lo) - 1;
    }
    out.push_back(static_cast<double>(count) * scale);
  }
  return out;
}

Surface k_spacetime(const EventCatalog& catalog, const LagGrid& lags, unsigned workers) {
  require_pairs(catalog);
  PairSource pairs(catalog, lags.r_km, workers);
  auto days = day_numbers(catalog);
  auto counts = spacetime_counts(pairs, days, lags.r_km.size(), lags.t_days);
  double scale = catalog.area_km2() * static_cast<double>(catalog.period().days()) / pair_scale(catalog.size());
  return scale_surface(counts, lags.r_km.size(), lags.t_days.size(), scale);
}

KEstimate estimate_k(const EventCatalog& catalog, const LagGrid& lags, unsigned workers) {
  KEstimate ke;
  ke.r_km = lags.r_km;
  ke.t_days = lags.t_days;
  ke.ks = k_spatial(catalog, lags.r_km, workers);
  ke.kt = k_temporal(catalog, lags.t_days);
  ke.kst = k_spacetime(catalog, lags, workers);
  ke.d = d_surface(ke.ks, ke.kt, ke.kst);
  ke.n = catalog.size();
  ke.area_km2 = catalog.area_km2();
  ke.period_days = static_cast<double>(catalog.period().days());
  ke.lambda_s = static_cast<double>(ke.n) / ke.area_km2;
  ke.lambda_t = static_cast<double>(ke.n) / ke.period_days;
  return ke;
}

Surface d_surface(std::span<const double> ks, std::span<const double> kt, const Surface& kst) {
  if (ks.size() != kst.rows || kt.size() != kst.cols)
    throw ConfigError("D(s,t) needs K(s), K(t) and K(s,t) on matching lags");
  Surface d(kst.rows, kst.cols);
  for (std::size_t i = 0; i < kst.rows; ++i)
    for (std::size_t j = 0; j < kst.cols; ++j) d(i, j) = kst(i, j) - ks[i] * kt[j];
  return d;
}

std::size_t quantile_rank(double q, std::size_t n) {
  double k = std::ceil(q * static_cast<double>(n + 1) - 1e-9);
  return static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(n)));
}

Envelope d_envelope(const EventCatalog& catalog, const LagGrid& lags, int n_sim, std::uint64_t seed,
                    const EnvelopeOptions& options) {
  require_pairs(catalog);
  if (n_sim < 19) throw ConfigError("envelope needs at least 19 simulations");
  if (!(options.lower_quantile >= 0 && options.lower_quantile < options.upper_quantile && options.upper_quantile <= 1))
    throw ConfigError("envelope quantiles must satisfy 0 <= lower < upper <= 1");
  std::size_t n_r = lags.r_km.size(), n_t = lags.t_days.size();
  // Date permutation leaves both marginal K-functions unchanged.
  auto ks = k_spatial(catalog, lags.r_km, options.workers);
  auto kt = k_temporal(catalog, lags.t_days);
  PairSource pairs(catalog, lags.r_km, options.workers);
  pairs.cache(std::size_t{40} << 20);
  auto days = day_numbers(catalog);
  double scale = catalog.area_km2() * static_cast<double>(catalog.period().days()) / pair_scale(catalog.size());

  std::vector<std::vector<double>> cells(n_r * n_t, std::vector<double>(static_cast<std::size_t>(n_sim)));
  for (int s = 0; s < n_sim; ++s) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(s));
    std::vector<std::int64_t> permuted = days;
    shuffle(std::span<std::int64_t>(permuted), rng);
    auto counts = spacetime_counts(pairs, permuted, n_r, lags.t_days);
    for (std::size_t a = 0; a < n_r; ++a)
      for (std::size_t b = 0; b < n_t; ++b)
        cells[a * n_t + b][static_cast<std::size_t>(s)] =
            static_cast<double>(counts[a * n_t + b]) * scale - ks[a] * kt[b];
  }
  Envelope env;
  env.n_sim = n_sim;
  env.seed = seed;
  env.lower_quantile = options.lower_quantile;
  env.upper_quantile = options.upper_quantile;
  env.lower = Surface(n_r, n_t);
  env.upper = Surface(n_r, n_t);
  std::size_t lo_rank = quantile_rank(options.lower_quantile, static_cast<std::size_t>(n_sim));
  std::size_t hi_rank = quantile_rank(options.upper_quantile, static_cast<std::size_t>(n_sim));
  for (std::size_t k = 0; k < cells.size(); ++k) {
    auto& v = cells[k];
    std::sort(v.begin(), v.end());
    env.lower.values[k] = v[lo_rank - 1];
    env.upper.values[k] = v[hi_rank - 1];
  }
  return env;
}

std::string k_csv(const KEstimate& ke, const Envelope* envelope) {
  std::string out = "r_km,t_days,Ks,Kt,Kst,D,env_lo,env_hi\n";
  for (std::size_t i = 0; i < ke.r_km.size(); ++i)
    for (std::size_t j = 0; j < ke.t_days.size(); ++j) {
      out += io::format_double(ke.r_km[i]) + "," + io::format_double(ke.t_days[j]) + "," + io::format_double(ke.ks[i]) +
             "," + io::format_double(ke.kt[j]) + "," + io::format_double(ke.kst(i, j)) + "," +
             io::format_double(ke.d(i, j)) + ",";
      if (envelope) out += io::format_double(envelope->lower(i, j)) + "," + io::format_double(envelope->upper(i, j));
      else out += ",";
      out += "\n";
    }
  return out;
}

}  // namespace stscan::ripley
