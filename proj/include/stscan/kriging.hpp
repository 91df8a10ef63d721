#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stscan/geo.hpp"

namespace stscan::kriging {

struct Sample {
  geo::GeoPoint location;
  double value = 0;
};

/// Averages samples sharing identical coordinates (station means), returned
/// sorted by (lon, lat). Throws DataError on non-finite values.
std::vector<Sample> average_duplicates(std::vector<Sample> samples);

/// lon,lat,value CSV; repeated stations are averaged.
std::vector<Sample> read_samples_csv(const std::filesystem::path& path, geo::Metric metric = geo::Metric::great_circle);

/// Spherical model. gamma(0) = 0; for h > 0 the nugget applies, so the model
/// jumps at the origin when nugget > 0.
struct VariogramModel {
  double nugget = 0;
  double partial_sill = 1;
  double range_km = 1;

  double operator()(double h_km) const;
  double sill() const { return nugget + partial_sill; }
};

struct VariogramPoint {
  double lag_km = 0;  ///< mean pair distance in the bin (bin midpoint when empty)
  double gamma = 0;
  std::size_t pairs = 0;
};

/// Bins are [edges[k], edges[k+1]). gamma = (1 / 2N) sum (v_i - v_j)^2.
std::vector<VariogramPoint> empirical_variogram(std::span<const Sample> samples, std::span<const double> bin_edges,
                                                geo::Metric metric = geo::Metric::great_circle);

/// 0, width, 2 width, ..., n width.
std::vector<double> uniform_bin_edges(double width_km, std::size_t n_bins);

struct FitOptions {
  double min_range_km = 0;  ///< 0 = 1% of the smallest lag
  double max_range_km = 0;  ///< 0 = 3x the largest lag
  int grid_points = 240;
};

/// Pair-count-weighted least squares over the non-empty bins.
double wls_objective(std::span<const VariogramPoint> points, const VariogramModel& model);

/// Global search over the range with nugget and partial sill solved exactly
/// (non-negative) for each candidate, then golden-section refinement. A flat
/// empirical variogram yields a pure-nugget model with range at the lower bound.
VariogramModel fit_variogram(std::span<const VariogramPoint> points, const FitOptions& options = {});

struct KrigeOptions {
  std::size_t neighbors = 32;
  bool full_matrix = false;  ///< use every sample (at most 500)
  geo::Metric metric = geo::Metric::great_circle;
};

struct Prediction {
  double value = 0;
  double variance = 0;
  std::vector<double> weights;
  std::vector<std::size_t> used;  ///< indices into the kriger's sorted samples
  double lagrange = 0;
  bool clamped = false;   ///< tiny negative variance reset to 0
  bool jittered = false;  ///< diagonal jitter was needed
};

/// Ordinary kriging over a fixed sample set. Thread-safe for predict().
class OrdinaryKriger {
 public:
  OrdinaryKriger(std::vector<Sample> samples, VariogramModel model, KrigeOptions options = {});
  ~OrdinaryKriger();
  OrdinaryKriger(OrdinaryKriger&&) noexcept;

  Prediction predict(geo::GeoPoint target) const;
  const std::vector<Sample>& samples() const { return samples_; }

 private:
  struct Impl;
  std::vector<Sample> samples_;
  VariogramModel model_;
  KrigeOptions options_;
  std::unique_ptr<Impl> impl_;
};

Prediction ordinary_krige(std::span<const Sample> samples, const VariogramModel& model, geo::GeoPoint target,
                          const KrigeOptions& options = {});

/// Prediction error (predicted - observed) for each sample left out in turn,
/// in the order of average_duplicates(samples).
std::vector<double> leave_one_out(std::span<const Sample> samples, const VariogramModel& model,
                                  const KrigeOptions& options = {});

/// Regular lattice; origin is the lower-left corner, cell_size in coordinate
/// units (degrees for great_circle, km for planar). Row 0 is the top row.
struct RasterSpec {
  geo::GeoPoint origin;
  double cell_size = 0;
  std::size_t rows = 0, cols = 0;

  /// cell_km converted to degrees (one degree = pi R / 180 km) for great_circle.
  static RasterSpec from_km(geo::GeoPoint origin, double cell_km, std::size_t rows, std::size_t cols, geo::Metric metric);
  geo::GeoPoint cell_center(std::size_t row, std::size_t col) const;
};

struct Raster {
  RasterSpec spec;
  std::vector<double> value, variance;
  std::vector<std::uint8_t> valid;
  std::size_t failed = 0;

  std::size_t at(std::size_t row, std::size_t col) const { return row * spec.cols + col; }
};

/// ordinary kriging at every cell center; failed cells are masked and counted.
Raster krige_grid(std::span<const Sample> samples, const VariogramModel& model, const RasterSpec& spec,
                  const KrigeOptions& options = {}, unsigned workers = 0);

std::string esri_ascii(const Raster& raster, bool variance_layer = false);
/// lon,lat,value,variance per cell center (masked cells omitted).
std::string raster_cells_csv(const Raster& raster);
std::string variogram_csv(std::span<const VariogramPoint> points, const VariogramModel* model = nullptr);

}  // namespace stscan::kriging
