#include "stscan/spatial_index.hpp"

#include <algorithm>
#include <cmath>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

namespace stscan::geo {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

using BoxPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using Box = bg::model::box<BoxPoint>;
using Value = std::pair<BoxPoint, std::size_t>;

struct SpatialIndex::Tree {
  bgi::rtree<Value, bgi::rstar<16>> rtree;
};

namespace {

BoxPoint to_box_point(GeoPoint p, Metric metric) {
  auto e = embed(p, metric);
  return BoxPoint(e[0], e[1], e[2]);
}

// Euclidean bound in the embedding that contains every point within radius_km.
double embedded_reach(double radius_km, Metric metric) {
  if (metric == Metric::planar) return radius_km;
  double r = std::min(radius_km, kPi * kEarthRadiusKm);
  return 2 * kEarthRadiusKm * std::sin(r / (2 * kEarthRadiusKm));
}

bool by_distance(const Neighbor& a, const Neighbor& b) {
  return a.distance_km < b.distance_km || (a.distance_km == b.distance_km && a.index < b.index);
}

}  // namespace

SpatialIndex::SpatialIndex(std::span<const GeoPoint> points, Metric metric)
    : points_(points.begin(), points.end()), metric_(metric), tree_(std::make_unique<Tree>()) {
  std::vector<Value> values;
  values.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) values.emplace_back(to_box_point(points_[i], metric_), i);
  tree_->rtree = bgi::rtree<Value, bgi::rstar<16>>(values.begin(), values.end());
}

SpatialIndex::~SpatialIndex() = default;
SpatialIndex::SpatialIndex(SpatialIndex&&) noexcept = default;
SpatialIndex& SpatialIndex::operator=(SpatialIndex&&) noexcept = default;

template <class Visit>
void SpatialIndex::visit_candidates(GeoPoint center, double radius_km, Visit&& visit) const {
  if (radius_km < 0) return;
  auto c = embed(center, metric_);
  double reach = embedded_reach(radius_km, metric_);
  double slack = 1e-9 * (1 + reach) + 1e-9 * (metric_ == Metric::planar ? 0 : kEarthRadiusKm);
  reach += slack;
  Box box(BoxPoint(c[0] - reach, c[1] - reach, c[2] - reach), BoxPoint(c[0] + reach, c[1] + reach, c[2] + reach));
  for (auto it = tree_->rtree.qbegin(bgi::intersects(box)); it != tree_->rtree.qend(); ++it) {
    std::size_t i = it->second;
    double d = distance_km(center, points_[i], metric_);
    if (d <= radius_km) visit(i, d);
  }
}

std::size_t SpatialIndex::range_count(GeoPoint center, double radius_km) const {
  std::size_t count = 0;
  visit_candidates(center, radius_km, [&](std::size_t, double) { ++count; });
  return count;
}

std::vector<Neighbor> SpatialIndex::range_query(GeoPoint center, double radius_km) const {
  std::vector<Neighbor> out;
  visit_candidates(center, radius_km, [&](std::size_t i, double d) { out.push_back({i, d}); });
  std::sort(out.begin(), out.end(), by_distance);
  return out;
}

std::vector<Neighbor> SpatialIndex::nearest(GeoPoint center, std::size_t k) const {
  if (k == 0 || points_.empty()) return {};
  k = std::min(k, points_.size());
  // The embedding preserves distance order only up to rounding, so take the
  // k-th exact distance from the tree's answer and re-query that radius.
  double kth = 0;
  for (auto it = tree_->rtree.qbegin(bgi::nearest(to_box_point(center, metric_), static_cast<unsigned>(k)));
       it != tree_->rtree.qend(); ++it)
    kth = std::max(kth, distance_km(center, points_[it->second], metric_));
  auto out = range_query(center, kth * (1 + 1e-12) + 1e-12);
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace stscan::geo
