#include "stscan/kriging.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "stscan/error.hpp"
#include "stscan/io.hpp"
#include "stscan/parallel.hpp"
#include "stscan/spatial_index.hpp"

namespace stscan::kriging {

namespace {

double spherical_shape(double h, double range) {
  if (h <= 0) return 0;
  if (h >= range) return 1;
  double x = h / range;
  return 1.5 * x - 0.5 * x * x * x;
}

}  // namespace

std::vector<Sample> average_duplicates(std::vector<Sample> samples) {
  std::map<std::pair<double, double>, std::pair<double, std::size_t>> sums;
  for (const auto& s : samples) {
    if (!std::isfinite(s.value)) throw DataError("sample value is not finite");
    if (!std::isfinite(s.location.lon) || !std::isfinite(s.location.lat))
      throw DataError("sample coordinates are not finite");
    auto& [sum, n] = sums[{s.location.lon, s.location.lat}];
    sum += s.value;
    ++n;
  }
  std::vector<Sample> out;
  out.reserve(sums.size());
  for (const auto& [key, acc] : sums)
    out.push_back({{key.first, key.second}, acc.first / static_cast<double>(acc.second)});
  return out;
}

std::vector<Sample> read_samples_csv(const std::filesystem::path& path, geo::Metric metric) {
  auto table = io::read_csv_file(path);
  auto lon = table.column("lon"), lat = table.column("lat"), value = table.column("value");
  if (!lon || !lat || !value) throw DataError(path.string() + ": expected columns lon, lat, value");
  std::vector<Sample> samples;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto field = [&](std::size_t c) -> std::optional<double> {
      return c < row.size() ? io::parse_double(row[c]) : std::nullopt;
    };
    auto x = field(*lon), y = field(*lat), v = field(*value);
    if (!x || !y || !v)
      throw DataError(path.string() + ": line " + std::to_string(table.line_numbers[r]) + ": malformed sample");
    Sample s{{*x, *y}, *v};
    if (!geo::is_valid(s.location, metric))
      throw DataError(path.string() + ": line " + std::to_string(table.line_numbers[r]) + ": invalid coordinates");
    samples.push_back(s);
  }
  return average_duplicates(std::move(samples));
}

double VariogramModel::operator()(double h) const {
  if (h <= 0) return 0;
  return nugget + partial_sill * spherical_shape(h, range_km);
}

std::vector<double> uniform_bin_edges(double width_km, std::size_t n_bins) {
  if (!(width_km > 0) || n_bins == 0) throw ConfigError("lag bins need a positive width and count");
  std::vector<double> edges(n_bins + 1);
  for (std::size_t k = 0; k <= n_bins; ++k) edges[k] = width_km * static_cast<double>(k);
  return edges;
}

std::vector<VariogramPoint> empirical_variogram(std::span<const Sample> samples, std::span<const double> edges,
                                                geo::Metric metric) {
  if (samples.size() < 2) throw DataError("empirical variogram needs at least 2 samples");
  if (edges.size() < 2) throw ConfigError("lag bins need at least two edges");
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (!(edges[k] > edges[k - 1])) throw ConfigError("lag bin edges must be strictly increasing");
  std::size_t nb = edges.size() - 1;
  std::vector<double> hsum(nb, 0), gsum(nb, 0);
  std::vector<std::size_t> count(nb, 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      double h = geo::distance_km(samples[i].location, samples[j].location, metric);
      if (h < edges.front() || h >= edges.back()) continue;
      std::size_t k = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), h) - edges.begin()) - 1;
      double dv = samples[i].value - samples[j].value;
      hsum[k] += h;
      gsum[k] += dv * dv;
      ++count[k];
    }
  }
  std::vector<VariogramPoint> out(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    out[k].pairs = count[k];
    if (count[k] == 0) {
      out[k].lag_km = 0.5 * (edges[k] + edges[k + 1]);
    } else {
      out[k].lag_km = hsum[k] / static_cast<double>(count[k]);
      out[k].gamma = gsum[k] / (2.0 * static_cast<double>(count[k]));
    }
  }
  return out;
}

double wls_objective(std::span<const VariogramPoint> points, const VariogramModel& model) {
  double f = 0;
  for (const auto& p : points) {
    if (p.pairs == 0) continue;
    double r = p.gamma - model(p.lag_km);
    f += static_cast<double>(p.pairs) * r * r;
  }
  return f;
}

namespace {

struct Fitted {
  VariogramModel model;
  double objective = std::numeric_limits<double>::infinity();
};

// With the range fixed the model is linear in (nugget, partial sill); solve the
// non-negative least-squares problem by checking the four active sets.
Fitted fit_linear(std::span<const VariogramPoint> pts, double range) {
  double suu = 0, sus = 0, sss = 0, sug = 0, ssg = 0;
  for (const auto& p : pts) {
    if (p.pairs == 0) continue;
    double w = static_cast<double>(p.pairs);
    double u = p.lag_km > 0 ? 1.0 : 0.0;
    double s = spherical_shape(p.lag_km, range);
    suu += w * u * u;
    sus += w * u * s;
    sss += w * s * s;
    sug += w * u * p.gamma;
    ssg += w * s * p.gamma;
  }
  Fitted best;
  auto consider = [&](double nug, double ps) {
    if (!(nug >= 0) || !(ps >= 0)) return;
    VariogramModel m{nug, ps, range};
    double f = wls_objective(pts, m);
    if (f < best.objective) best = {m, f};
  };
  double det = suu * sss - sus * sus;
  if (det > 1e-12 * suu * sss) consider((sug * sss - ssg * sus) / det, (ssg * suu - sug * sus) / det);
  if (suu > 0) consider(std::max(0.0, sug / suu), 0.0);
  if (sss > 0) consider(0.0, std::max(0.0, ssg / sss));
  consider(0.0, 0.0);
  return best;
}

}  // namespace

VariogramModel fit_variogram(std::span<const VariogramPoint> points, const FitOptions& options) {
  std::size_t used = 0;
  double min_lag = std::numeric_limits<double>::infinity(), max_lag = 0;
  for (const auto& p : points) {
    if (p.pairs == 0) continue;
    if (!std::isfinite(p.gamma) || !std::isfinite(p.lag_km)) throw DataError("variogram point is not finite");
    ++used;
    if (p.lag_km > 0) min_lag = std::min(min_lag, p.lag_km);
    max_lag = std::max(max_lag, p.lag_km);
  }
  if (used < 3) throw DataError("variogram fit needs at least 3 non-empty lag bins, got " + std::to_string(used));
  if (!(max_lag > 0)) throw DataError("variogram fit needs positive lags");
  double lo = options.min_range_km > 0 ? options.min_range_km : 0.01 * min_lag;
  double hi = options.max_range_km > 0 ? options.max_range_km : 3.0 * max_lag;
  if (!(hi > lo)) throw ConfigError("variogram range bounds are empty");
  int n = std::max(options.grid_points, 8);

  double llo = std::log(lo), lhi = std::log(hi);
  auto range_at = [&](int i) { return std::exp(llo + (lhi - llo) * i / (n - 1)); };
  Fitted best;
  int best_i = -1;
  for (int i = 0; i < n; ++i) {
    Fitted f = fit_linear(points, range_at(i));
    if (f.objective < best.objective) {
      best = f;
      best_i = i;
    }
  }
  if (best_i < 0 || !std::isfinite(best.objective)) {
    std::ostringstream msg;
    msg << "variogram fit did not converge (" << used << " bins, range search [" << lo << ", " << hi << "] km)";
    throw NumericalError(msg.str());
  }

  // golden-section refinement in log(range) around the best grid node
  double a = std::log(range_at(std::max(0, best_i - 1))), b = std::log(range_at(std::min(n - 1, best_i + 1)));
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  Fitted f1 = fit_linear(points, std::exp(x1)), f2 = fit_linear(points, std::exp(x2));
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (f1.objective <= f2.objective) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = fit_linear(points, std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = fit_linear(points, std::exp(x2));
    }
  }
  for (const auto& f : {f1, f2})
    if (f.objective < best.objective) best = f;

  VariogramModel m = best.model;
  // A range below every lag makes the model a pure step, indistinguishable
  // from a pure nugget; report that canonical form.
  if (m.range_km <= min_lag) {
    m.nugget = m.sill();
    m.partial_sill = 0;
  }
  if (m.partial_sill <= 1e-12 * std::max(m.nugget, std::numeric_limits<double>::min())) {
    m.partial_sill = 0;
    m.range_km = lo;
    Fitted flat = fit_linear(points, lo);
    m.nugget = flat.model.sill();
  }
  return m;
}

struct OrdinaryKriger::Impl {
  geo::SpatialIndex index;
};

OrdinaryKriger::OrdinaryKriger(std::vector<Sample> samples, VariogramModel model, KrigeOptions options)
    : samples_(average_duplicates(std::move(samples))), model_(model), options_(options) {
  if (samples_.size() < 2) throw DataError("ordinary kriging needs at least 2 distinct samples");
  if (!(model_.nugget >= 0) || !(model_.partial_sill >= 0) || !(model_.range_km > 0) || !(model_.sill() > 0))
    throw ConfigError("variogram model needs nugget >= 0, partial sill >= 0, range > 0 and a positive sill");
  if (options_.full_matrix && samples_.size() > 500)
    throw ConfigError("full-matrix kriging supports at most 500 samples");
  if (!options_.full_matrix && options_.neighbors < 1) throw ConfigError("kriging needs at least one neighbor");
  std::vector<geo::GeoPoint> pts;
  pts.reserve(samples_.size());
  for (const auto& s : samples_) {
    geo::validate(s.location, options_.metric);
    pts.push_back(s.location);
  }
  impl_ = std::make_unique<Impl>(Impl{geo::SpatialIndex(pts, options_.metric)});
}

OrdinaryKriger::~OrdinaryKriger() = default;
OrdinaryKriger::OrdinaryKriger(OrdinaryKriger&&) noexcept = default;

Prediction OrdinaryKriger::predict(geo::GeoPoint target) const {
  geo::validate(target, options_.metric);
  // samples are sorted by (lon, lat), so the (distance, index) order of the
  // index is canonical and independent of the caller's sample order
  std::vector<geo::Neighbor> nb;
  if (options_.full_matrix) {
    nb = impl_->index.nearest(target, samples_.size());
  } else {
    nb = impl_->index.nearest(target, std::min(options_.neighbors, samples_.size()));
  }
  const std::size_t m = nb.size();
  if (m < 2) throw DataError("ordinary kriging needs at least 2 neighbors");

  Eigen::MatrixXd A(m + 1, m + 1);
  Eigen::VectorXd rhs(m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& pi = samples_[nb[i].index].location;
    A(i, i) = 0;
    for (std::size_t j = i + 1; j < m; ++j) {
      double g = model_(geo::distance_km(pi, samples_[nb[j].index].location, options_.metric));
      A(i, j) = A(j, i) = g;
    }
    A(i, m) = A(m, i) = 1;
    rhs(i) = model_(nb[i].distance_km);
  }
  A(m, m) = 0;
  rhs(m) = 1;

  auto solve = [&](double jitter) -> std::optional<Eigen::VectorXd> {
    Eigen::MatrixXd M = A;
    for (std::size_t i = 0; i < m; ++i) M(i, i) += jitter;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) return std::nullopt;
    Eigen::VectorXd x = lu.solve(rhs);
    x += lu.solve(rhs - M * x);
    if (!x.allFinite()) return std::nullopt;
    double resid = (M * x - rhs).norm();
    if (resid > 1e-8 * (M.norm() * x.norm() + rhs.norm())) return std::nullopt;
    return x;
  };

  Prediction out;
  auto x = solve(0.0);
  if (!x) {
    x = solve(1e-10 * model_.sill());
    out.jittered = true;
  }
  if (!x) throw NumericalError("ordinary kriging system is singular after diagonal jitter");

  out.weights.resize(m);
  out.used.resize(m);
  double value = 0, variance = 0;
  for (std::size_t i = 0; i < m; ++i) {
    out.weights[i] = (*x)(i);
    out.used[i] = nb[i].index;
    value += (*x)(i) * samples_[nb[i].index].value;
    variance += (*x)(i) * rhs(i);
  }
  out.lagrange = (*x)(m);
  variance += out.lagrange;
  if (variance < 0) {
    if (variance > -1e-9 * std::max(1.0, model_.sill())) {
      variance = 0;
      out.clamped = true;
    } else {
      throw NumericalError("negative kriging variance " + io::format_double(variance));
    }
  }
  out.value = value;
  out.variance = variance;
  return out;
}

Prediction ordinary_krige(std::span<const Sample> samples, const VariogramModel& model, geo::GeoPoint target,
                          const KrigeOptions& options) {
  OrdinaryKriger k(std::vector<Sample>(samples.begin(), samples.end()), model, options);
  return k.predict(target);
}

std::vector<double> leave_one_out(std::span<const Sample> samples, const VariogramModel& model,
                                  const KrigeOptions& options) {
  auto all = average_duplicates(std::vector<Sample>(samples.begin(), samples.end()));
  std::vector<double> errors(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    std::vector<Sample> rest;
    rest.reserve(all.size() - 1);
    for (std::size_t j = 0; j < all.size(); ++j)
      if (j != i) rest.push_back(all[j]);
    OrdinaryKriger k(std::move(rest), model, options);
    errors[i] = k.predict(all[i].location).value - all[i].value;
  }
  return errors;
}

RasterSpec RasterSpec::from_km(geo::GeoPoint origin, double cell_km, std::size_t rows, std::size_t cols,
                               geo::Metric metric) {
  if (!(cell_km > 0)) throw ConfigError("raster cell size must be positive");
  double cell = metric == geo::Metric::great_circle ? cell_km / (geo::kPi * geo::kEarthRadiusKm / 180.0) : cell_km;
  return RasterSpec{origin, cell, rows, cols};
}

geo::GeoPoint RasterSpec::cell_center(std::size_t row, std::size_t col) const {
  return {origin.lon + (static_cast<double>(col) + 0.5) * cell_size,
          origin.lat + (static_cast<double>(rows - row) - 0.5) * cell_size};
}

Raster krige_grid(std::span<const Sample> samples, const VariogramModel& model, const RasterSpec& spec,
                  const KrigeOptions& options, unsigned workers) {
  if (!(spec.cell_size > 0)) throw ConfigError("raster cell size must be positive");
  if (spec.rows == 0 || spec.cols == 0) throw ConfigError("raster needs at least one row and column");
  OrdinaryKriger kriger(std::vector<Sample>(samples.begin(), samples.end()), model, options);
  Raster r;
  r.spec = spec;
  std::size_t n = spec.rows * spec.cols;
  r.value.assign(n, 0.0);
  r.variance.assign(n, 0.0);
  r.valid.assign(n, 0);
  parallel_for(
      n, workers,
      [&](unsigned, std::size_t i) {
        try {
          auto p = kriger.predict(spec.cell_center(i / spec.cols, i % spec.cols));
          r.value[i] = p.value;
          r.variance[i] = p.variance;
          r.valid[i] = 1;
        } catch (const Error&) {
          r.valid[i] = 0;
        }
      },
      64);
  r.failed = static_cast<std::size_t>(std::count(r.valid.begin(), r.valid.end(), std::uint8_t{0}));
  return r;
}

std::string esri_ascii(const Raster& r, bool variance_layer) {
  std::ostringstream out;
  out << "ncols " << r.spec.cols << "\n"
      << "nrows " << r.spec.rows << "\n"
      << "xllcorner " << io::format_double(r.spec.origin.lon) << "\n"
      << "yllcorner " << io::format_double(r.spec.origin.lat) << "\n"
      << "cellsize " << io::format_double(r.spec.cell_size) << "\n"
      << "NODATA_value -9999\n";
  const auto& layer = variance_layer ? r.variance : r.value;
  for (std::size_t i = 0; i < r.spec.rows; ++i) {
    for (std::size_t j = 0; j < r.spec.cols; ++j) {
      if (j) out << ' ';
      std::size_t k = r.at(i, j);
      out << (r.valid[k] ? io::format_double(layer[k]) : std::string("-9999"));
    }
    out << "\n";
  }
  return out.str();
}

std::string raster_cells_csv(const Raster& r) {
  std::ostringstream out;
  out << "lon,lat,value,variance\n";
  for (std::size_t i = 0; i < r.spec.rows; ++i)
    for (std::size_t j = 0; j < r.spec.cols; ++j) {
      std::size_t k = r.at(i, j);
      if (!r.valid[k]) continue;
      auto c = r.spec.cell_center(i, j);
      out << io::format_double(c.lon) << ',' << io::format_double(c.lat) << ',' << io::format_double(r.value[k])
          << ',' << io::format_double(r.variance[k]) << "\n";
    }
  return out.str();
}

std::string variogram_csv(std::span<const VariogramPoint> points, const VariogramModel* model) {
  std::ostringstream out;
  out << "lag_km,gamma,pairs" << (model ? ",model" : "") << "\n";
  for (const auto& p : points) {
    out << io::format_double(p.lag_km) << ',' << io::format_double(p.gamma) << ',' << p.pairs;
    if (model) out << ',' << io::format_double((*model)(p.lag_km));
    out << "\n";
  }
  return out.str();
}

}  // namespace stscan::kriging
