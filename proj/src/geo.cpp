#include "stscan/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "stscan/error.hpp"

namespace stscan::geo {

namespace {

constexpr double kDeg = kPi / 180.0;

double cross(GeoPoint o, GeoPoint a, GeoPoint b) {
  return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

int orientation(GeoPoint o, GeoPoint a, GeoPoint b) {
  double c = cross(o, a, b);
  return (c > 0) - (c < 0);
}

bool within_box(GeoPoint a, GeoPoint b, GeoPoint p) {
  return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
         p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

bool on_segment(GeoPoint a, GeoPoint b, GeoPoint p) {
  double dx = b.lon - a.lon, dy = b.lat - a.lat;
  double scale = std::max(1.0, dx * dx + dy * dy);
  return std::abs(cross(a, b, p)) <= 1e-12 * scale && within_box(a, b, p);
}

bool segments_touch(GeoPoint p1, GeoPoint p2, GeoPoint q1, GeoPoint q2) {
  int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && within_box(p1, p2, q1)) return true;
  if (o2 == 0 && within_box(p1, p2, q2)) return true;
  if (o3 == 0 && within_box(q1, q2, p1)) return true;
  if (o4 == 0 && within_box(q1, q2, p2)) return true;
  return false;
}

bool segments_cross_properly(GeoPoint p1, GeoPoint p2, GeoPoint q1, GeoPoint q2) {
  int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

double ring_signed_planar_area(const Ring& ring) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    s += ring[i].lon * ring[i + 1].lat - ring[i + 1].lon * ring[i].lat;
  return 0.5 * s;
}

// Signed area (steradians) of a ring whose edges are straight in lon/lat, the
// same geometry point_in_polygon uses: sum over edges of the integral of
// sin(lat) d(lon) with lat linear in lon. Exact for lon/lat boxes and additive
// when a polygon is split along a meridian.
double ring_lonlat_area(const Ring& ring) {
  double total = 0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    double dl = (ring[i + 1].lon - ring[i].lon) * kDeg;
    double p1 = ring[i].lat * kDeg, p2 = ring[i + 1].lat * kDeg;
    double dp = p2 - p1;
    // (cos p1 - cos p2) / dp, written stably for small dp
    double mean_sin = std::abs(dp) < 1e-9 ? std::sin(0.5 * (p1 + p2))
                                          : 2 * std::sin(0.5 * (p1 + p2)) * std::sin(0.5 * dp) / dp;
    total += dl * mean_sin;
  }
  return -total;
}

bool ring_contains(const Ring& ring, GeoPoint p) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

bool ring_on_boundary(const Ring& ring, GeoPoint p) {
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    if (on_segment(ring[i], ring[i + 1], p)) return true;
  return false;
}

Ring normalize_ring(Ring ring, const char* what) {
  for (const auto& p : ring)
    if (!std::isfinite(p.lon) || !std::isfinite(p.lat))
      throw DataError(std::string("polygon ") + what + " has non-finite coordinates");
  Ring out;
  for (const auto& p : ring)
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  if (out.size() > 1 && out.front() == out.back()) out.pop_back();
  std::set<std::pair<double, double>> distinct;
  for (const auto& p : out) distinct.insert({p.lon, p.lat});
  if (distinct.size() < 3)
    throw DataError(std::string("polygon ") + what + " needs at least 3 distinct vertices");
  out.push_back(out.front());
  return out;
}

void check_simple(const Ring& ring, const char* what) {
  std::size_t m = ring.size() - 1;  // edges
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == m - 1);
      GeoPoint a = ring[i], b = ring[i + 1], c = ring[j], d = ring[j + 1];
      if (!adjacent) {
        if (segments_touch(a, b, c, d))
          throw DataError(std::string("polygon ") + what + " is self-intersecting (edges " +
                          std::to_string(i) + " and " + std::to_string(j) + ")");
      } else {
        // Shared vertex: reject only collinear backtracking.
        GeoPoint shared = (j == i + 1) ? b : a;
        GeoPoint other_i = (j == i + 1) ? a : b;
        GeoPoint other_j = (j == i + 1) ? d : c;
        if (orientation(shared, other_i, other_j) == 0) {
          double dot = (other_i.lon - shared.lon) * (other_j.lon - shared.lon) +
                       (other_i.lat - shared.lat) * (other_j.lat - shared.lat);
          if (dot > 0)
            throw DataError(std::string("polygon ") + what + " folds back on itself at vertex " +
                            std::to_string(j));
        }
      }
    }
  }
  if (ring_signed_planar_area(ring) == 0)
    throw DataError(std::string("polygon ") + what + " is degenerate (zero area)");
}

BoundingBox ring_bbox(const Ring& ring) {
  BoundingBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : ring) {
    b.min_lon = std::min(b.min_lon, p.lon);
    b.max_lon = std::max(b.max_lon, p.lon);
    b.min_lat = std::min(b.min_lat, p.lat);
    b.max_lat = std::max(b.max_lat, p.lat);
  }
  return b;
}

Ring clip_ring(const Ring& ring, double meridian, bool east) {
  auto inside = [&](GeoPoint p) { return east ? p.lon >= meridian : p.lon < meridian; };
  Ring out;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    GeoPoint a = ring[i], b = ring[i + 1];
    bool ia = inside(a), ib = inside(b);
    if (ia) out.push_back(a);
    if (ia != ib) {
      double t = (meridian - a.lon) / (b.lon - a.lon);
      out.push_back({meridian, a.lat + t * (b.lat - a.lat)});
    }
  }
  if (!out.empty()) out.push_back(out.front());
  return out;
}

}  // namespace

std::string to_string(Metric m) { return m == Metric::planar ? "planar" : "great_circle"; }

Metric metric_from_string(const std::string& s) {
  if (s == "planar") return Metric::planar;
  if (s == "great_circle" || s == "great-circle" || s == "spherical") return Metric::great_circle;
  throw ConfigError("unknown distance metric '" + s + "' (expected great_circle or planar)");
}

bool is_valid(GeoPoint p, Metric metric) {
  if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) return false;
  if (metric == Metric::planar) return true;
  return p.lon >= -180 && p.lon <= 180 && p.lat >= -90 && p.lat <= 90;
}

void validate(GeoPoint p, Metric metric) {
  if (!is_valid(p, metric))
    throw DataError("invalid coordinates (" + std::to_string(p.lon) + ", " + std::to_string(p.lat) + ")");
}

double haversine_km(GeoPoint a, GeoPoint b) {
  double phi1 = a.lat * kDeg, phi2 = b.lat * kDeg;
  double sdphi = std::sin((b.lat - a.lat) * kDeg / 2);
  double sdlam = std::sin((b.lon - a.lon) * kDeg / 2);
  double h = sdphi * sdphi + std::cos(phi1) * std::cos(phi2) * sdlam * sdlam;
  return 2 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double planar_km(GeoPoint a, GeoPoint b) { return std::hypot(b.lon - a.lon, b.lat - a.lat); }

double distance_km(GeoPoint a, GeoPoint b, Metric metric) {
  return metric == Metric::planar ? planar_km(a, b) : haversine_km(a, b);
}

GeoPoint destination(GeoPoint origin, double bearing, double dist, Metric metric) {
  if (metric == Metric::planar)
    return {origin.lon + dist * std::sin(bearing), origin.lat + dist * std::cos(bearing)};
  double delta = dist / kEarthRadiusKm;
  double phi1 = origin.lat * kDeg, lam1 = origin.lon * kDeg;
  double sphi2 = std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(bearing);
  double phi2 = std::asin(std::clamp(sphi2, -1.0, 1.0));
  double lam2 = lam1 + std::atan2(std::sin(bearing) * std::sin(delta) * std::cos(phi1),
                                  std::cos(delta) - std::sin(phi1) * sphi2);
  double lon = std::remainder(lam2 / kDeg, 360.0);
  if (lon == -180) lon = 180;
  return {lon, phi2 / kDeg};
}

std::array<double, 3> embed(GeoPoint p, Metric metric) {
  if (metric == Metric::planar) return {p.lon, p.lat, 0.0};
  double phi = p.lat * kDeg, lam = p.lon * kDeg;
  return {kEarthRadiusKm * std::cos(phi) * std::cos(lam), kEarthRadiusKm * std::cos(phi) * std::sin(lam),
          kEarthRadiusKm * std::sin(phi)};
}

double disc_area_km2(double radius_km, Metric metric) {
  if (metric == Metric::planar) return kPi * radius_km * radius_km;
  double r = std::min(radius_km, kPi * kEarthRadiusKm);
  return 2 * kPi * kEarthRadiusKm * kEarthRadiusKm * (1 - std::cos(r / kEarthRadiusKm));
}

Polygon::Polygon(Ring exterior, std::vector<Ring> holes) {
  exterior_ = normalize_ring(std::move(exterior), "exterior ring");
  check_simple(exterior_, "exterior ring");
  for (auto& h : holes) {
    holes_.push_back(normalize_ring(std::move(h), "hole"));
    check_simple(holes_.back(), "hole");
  }
  bbox_ = ring_bbox(exterior_);
}

Polygon Polygon::unchecked(Ring exterior, std::vector<Ring> holes) {
  Polygon p;
  p.exterior_ = std::move(exterior);
  if (!p.exterior_.empty() && !(p.exterior_.front() == p.exterior_.back())) p.exterior_.push_back(p.exterior_.front());
  for (auto& h : holes) {
    if (h.size() < 4) continue;
    if (!(h.front() == h.back())) h.push_back(h.front());
    p.holes_.push_back(std::move(h));
  }
  p.bbox_ = ring_bbox(p.exterior_);
  return p;
}

Polygon box_polygon(double min_lon, double min_lat, double max_lon, double max_lat) {
  if (!(max_lon > min_lon) || !(max_lat > min_lat)) throw DataError("degenerate bounding box");
  return Polygon({{min_lon, min_lat}, {max_lon, min_lat}, {max_lon, max_lat}, {min_lon, max_lat}});
}

Polygon circle_polygon(GeoPoint center, double radius_km, Metric metric, int vertices) {
  Ring ring;
  ring.reserve(static_cast<std::size_t>(vertices) + 1);
  for (int k = 0; k < vertices; ++k) {
    double bearing = 2 * kPi * k / vertices;
    ring.push_back(destination(center, bearing, radius_km, metric));
  }
  ring.push_back(ring.front());
  // Counter-clockwise for GeoJSON exteriors.
  std::reverse(ring.begin(), ring.end());
  return Polygon::unchecked(std::move(ring));
}

bool on_boundary(GeoPoint p, const Polygon& poly) {
  if (ring_on_boundary(poly.exterior(), p)) return true;
  for (const auto& h : poly.holes())
    if (ring_on_boundary(h, p)) return true;
  return false;
}

bool point_in_polygon(GeoPoint p, const Polygon& poly) {
  if (poly.empty()) throw DataError("point_in_polygon on an empty polygon");
  const auto& bb = poly.bbox();
  if (!bb.contains(p)) return false;
  if (on_boundary(p, poly)) return true;
  if (!ring_contains(poly.exterior(), p)) return false;
  for (const auto& h : poly.holes())
    if (ring_contains(h, p)) return false;
  return true;
}

double polygon_area_km2(const Polygon& poly, Metric metric) {
  if (poly.empty()) throw DataError("area of an empty polygon");
  auto ring_area = [&](const Ring& r) {
    if (metric == Metric::planar) return std::abs(ring_signed_planar_area(r));
    return std::abs(ring_lonlat_area(r)) * kEarthRadiusKm * kEarthRadiusKm;
  };
  double area = ring_area(poly.exterior());
  for (const auto& h : poly.holes()) area -= ring_area(h);
  if (!(area > 0)) throw DataError("polygon has non-positive area");
  return area;
}

GeoPoint interior_point(const Polygon& poly) {
  const auto& bb = poly.bbox();
  // Offsets chosen to avoid passing exactly through vertices on round coordinates.
  for (double frac : {0.5000000123, 0.2500000173, 0.7500000291, 0.1250000077, 0.8750000113, 0.3750000041}) {
    double y = bb.min_lat + frac * (bb.max_lat - bb.min_lat);
    std::vector<double> xs;
    auto collect = [&](const Ring& r) {
      for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        GeoPoint a = r[i], b = r[i + 1];
        if ((a.lat > y) != (b.lat > y)) xs.push_back(a.lon + (y - a.lat) * (b.lon - a.lon) / (b.lat - a.lat));
      }
    };
    collect(poly.exterior());
    for (const auto& h : poly.holes()) collect(h);
    std::sort(xs.begin(), xs.end());
    double best_width = 0, best_x = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      if (xs[i + 1] - xs[i] > best_width) {
        best_width = xs[i + 1] - xs[i];
        best_x = 0.5 * (xs[i] + xs[i + 1]);
      }
    }
    GeoPoint candidate{best_x, y};
    if (best_width > 0 && point_in_polygon(candidate, poly) && !on_boundary(candidate, poly)) return candidate;
  }
  throw DataError("cannot find an interior point of polygon");
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
  if (!a.bbox().intersects(b.bbox())) return false;
  auto strictly_inside = [](GeoPoint p, const Polygon& poly) {
    return point_in_polygon(p, poly) && !on_boundary(p, poly);
  };
  auto rings = [](const Polygon& p) {
    std::vector<const Ring*> out{&p.exterior()};
    for (const auto& h : p.holes()) out.push_back(&h);
    return out;
  };
  for (const Ring* ra : rings(a))
    for (const Ring* rb : rings(b))
      for (std::size_t i = 0; i + 1 < ra->size(); ++i)
        for (std::size_t j = 0; j + 1 < rb->size(); ++j)
          if (segments_cross_properly((*ra)[i], (*ra)[i + 1], (*rb)[j], (*rb)[j + 1])) return true;
  auto any_inside = [&](const Polygon& p, const Polygon& q) {
    const Ring& r = p.exterior();
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      if (strictly_inside(r[i], q)) return true;
      GeoPoint mid{0.5 * (r[i].lon + r[i + 1].lon), 0.5 * (r[i].lat + r[i + 1].lat)};
      if (strictly_inside(mid, q)) return true;
    }
    return strictly_inside(interior_point(p), q);
  };
  return any_inside(a, b) || any_inside(b, a);
}

bool MultiPolygon::contains(GeoPoint p) const {
  for (const auto& part : parts)
    if (point_in_polygon(p, part)) return true;
  return false;
}

double MultiPolygon::area_km2(Metric metric) const {
  double total = 0;
  for (const auto& part : parts) total += polygon_area_km2(part, metric);
  return total;
}

BoundingBox MultiPolygon::bbox() const {
  BoundingBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& part : parts) {
    b.min_lon = std::min(b.min_lon, part.bbox().min_lon);
    b.max_lon = std::max(b.max_lon, part.bbox().max_lon);
    b.min_lat = std::min(b.min_lat, part.bbox().min_lat);
    b.max_lat = std::max(b.max_lat, part.bbox().max_lat);
  }
  return b;
}

bool multipolygons_overlap(const MultiPolygon& a, const MultiPolygon& b) {
  for (const auto& pa : a.parts)
    for (const auto& pb : b.parts)
      if (polygons_overlap(pa, pb)) return true;
  return false;
}

MultiPolygon clip_by_meridian(const MultiPolygon& region, double meridian, bool east) {
  MultiPolygon out;
  for (const auto& part : region.parts) {
    Ring ext = clip_ring(part.exterior(), meridian, east);
    if (ext.size() < 4 || ring_signed_planar_area(ext) == 0) continue;
    std::vector<Ring> holes;
    for (const auto& h : part.holes()) {
      Ring c = clip_ring(h, meridian, east);
      if (c.size() >= 4 && ring_signed_planar_area(c) != 0) holes.push_back(std::move(c));
    }
    out.parts.push_back(Polygon::unchecked(std::move(ext), std::move(holes)));
  }
  return out;
}

}  // namespace stscan::geo
