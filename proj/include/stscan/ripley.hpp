#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stscan/catalog.hpp"

namespace stscan::ripley {

/// Spatial lags (km) and temporal lags (days); each strictly increasing,
/// positive and finite.
struct LagGrid {
  std::vector<double> r_km;
  std::vector<double> t_days;

  LagGrid(std::vector<double> r, std::vector<double> t);
  /// step, 2*step, ... up to and including max (within rounding).
  static LagGrid uniform(double r_step_km, double r_max_km, double t_step_days, double t_max_days);
  /// 100 km steps to 2000 km; one-year (365.25 d) steps to 30 years.
  static LagGrid defaults();
};

/// Row-major r x t matrix.
struct Surface {
  std::size_t rows = 0, cols = 0;
  std::vector<double> values;

  Surface() = default;
  Surface(std::size_t r, std::size_t c, double fill = 0) : rows(r), cols(c), values(r * c, fill) {}
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

struct KEstimate {
  std::vector<double> r_km, t_days;
  std::vector<double> ks, kt;
  Surface kst, d;
  double area_km2 = 0;
  double period_days = 0;
  double lambda_s = 0;  ///< n / |A|
  double lambda_t = 0;  ///< n / T
  std::size_t n = 0;
};

/// K(r) = |A| / (n (n - 1)) * #{ordered pairs i != j : d_ij <= r}, no edge correction.
std::vector<double> k_spatial(const EventCatalog& catalog, std::span<const double> r_km, unsigned workers = 0);
/// As k_spatial with |A| -> T (days) and d_ij -> |day_i - day_j|.
std::vector<double> k_temporal(const EventCatalog& catalog, std::span<const double> t_days);
/// K(r, t) = |A| T / (n (n - 1)) * #{i != j : d_ij <= r and |tau_ij| <= t}.
Surface k_spacetime(const EventCatalog& catalog, const LagGrid& lags, unsigned workers = 0);

KEstimate estimate_k(const EventCatalog& catalog, const LagGrid& lags, unsigned workers = 0);

/// D(r, t) = K(r, t) - K(r) K(t). Throws ConfigError when shapes disagree.
Surface d_surface(std::span<const double> ks, std::span<const double> kt, const Surface& kst);
inline Surface d_surface(const KEstimate& ke) { return d_surface(ke.ks, ke.kt, ke.kst); }

struct EnvelopeOptions {
  double lower_quantile = 0.025;
  double upper_quantile = 0.975;
  unsigned workers = 0;
};

/// Per-cell quantiles of D under random permutation of dates across event
/// locations. Replicate k draws from stream (seed, k).
struct Envelope {
  Surface lower, upper;
  int n_sim = 0;
  std::uint64_t seed = 0;
  double lower_quantile = 0, upper_quantile = 0;
};

Envelope d_envelope(const EventCatalog& catalog, const LagGrid& lags, int n_sim, std::uint64_t seed,
                    const EnvelopeOptions& options = {});

/// 1-based rank of the empirical q-quantile among n sorted values:
/// clamp(ceil(q (n + 1)), 1, n). With n = 19, q = 0.05 and 0.95 give min and max.
std::size_t quantile_rank(double q, std::size_t n);

/// Long format: r_km,t_days,Ks,Kt,Kst,D,env_lo,env_hi (envelope columns empty without one).
std::string k_csv(const KEstimate& ke, const Envelope* envelope = nullptr);

}  // namespace stscan::ripley
