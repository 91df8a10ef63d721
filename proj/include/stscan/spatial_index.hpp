#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "stscan/geo.hpp"

namespace stscan::geo {

struct Neighbor {
  std::size_t index;
  double distance_km;
};

/// Exact radius and k-nearest queries over a fixed point set. The tree is a
/// prefilter on the 3D embedding; every answer is decided by distance_km, so
/// results equal a brute-force scan. Immutable after construction and safe
/// for concurrent queries.
class SpatialIndex {
 public:
  SpatialIndex(std::span<const GeoPoint> points, Metric metric);
  ~SpatialIndex();
  SpatialIndex(SpatialIndex&&) noexcept;
  SpatialIndex& operator=(SpatialIndex&&) noexcept;

  std::size_t size() const { return points_.size(); }
  Metric metric() const { return metric_; }
  const GeoPoint& point(std::size_t i) const { return points_[i]; }

  /// Number of points with distance <= radius_km (inclusive).
  std::size_t range_count(GeoPoint center, double radius_km) const;

  /// Points with distance <= radius_km, sorted by (distance, index).
  std::vector<Neighbor> range_query(GeoPoint center, double radius_km) const;

  /// The k closest points sorted by (distance, index).
  std::vector<Neighbor> nearest(GeoPoint center, std::size_t k) const;

 private:
  template <class Visit>
  void visit_candidates(GeoPoint center, double radius_km, Visit&& visit) const;

  struct Tree;
  std::vector<GeoPoint> points_;
  Metric metric_;
  std::unique_ptr<Tree> tree_;
};

}  // namespace stscan::geo
