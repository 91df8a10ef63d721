#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace stscan::geo {

/// Mean Earth radius (IUGG) used for every great-circle computation.
inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kPi = 3.14159265358979323846;

/// great_circle: coordinates are lon/lat degrees on a sphere.
/// planar: coordinates are already projected, x/y in kilometers.
enum class Metric { great_circle, planar };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

/// A position. In planar mode lon holds x (km) and lat holds y (km).
struct GeoPoint {
  double lon = 0;
  double lat = 0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(GeoPoint p, Metric metric = Metric::great_circle);
/// Throws DataError when p is non-finite or outside lon/lat bounds.
void validate(GeoPoint p, Metric metric = Metric::great_circle);

double haversine_km(GeoPoint a, GeoPoint b);
double planar_km(GeoPoint a, GeoPoint b);
double distance_km(GeoPoint a, GeoPoint b, Metric metric);

/// Point reached from origin after travelling distance_km along the initial bearing.
GeoPoint destination(GeoPoint origin, double bearing_rad, double distance_km, Metric metric);

/// Embedding used by the spatial index: km-scaled unit vector on the sphere,
/// or (x, y, 0) for planar coordinates.
std::array<double, 3> embed(GeoPoint p, Metric metric);

/// Area of a spherical cap (or planar disc) with the given radius.
double disc_area_km2(double radius_km, Metric metric);

struct BoundingBox {
  double min_lon, min_lat, max_lon, max_lat;
  bool contains(GeoPoint p) const {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
  }
  bool intersects(const BoundingBox& o) const {
    return !(o.min_lon > max_lon || o.max_lon < min_lon || o.min_lat > max_lat || o.max_lat < min_lat);
  }
};

using Ring = std::vector<GeoPoint>;

/// Simple polygon with optional holes. Rings are stored closed (first == last)
/// and validated on construction: at least 3 distinct vertices, finite
/// coordinates, no self-intersection.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(Ring exterior, std::vector<Ring> holes = {});

  /// Skips self-intersection checks. Used for clipped rings whose zero-width
  /// bridges are harmless for area and containment.
  static Polygon unchecked(Ring exterior, std::vector<Ring> holes = {});

  const Ring& exterior() const { return exterior_; }
  const std::vector<Ring>& holes() const { return holes_; }
  const BoundingBox& bbox() const { return bbox_; }
  bool empty() const { return exterior_.empty(); }

 private:
  Ring exterior_;
  std::vector<Ring> holes_;
  BoundingBox bbox_{};
};

/// Axis-aligned rectangle polygon.
Polygon box_polygon(double min_lon, double min_lat, double max_lon, double max_lat);

/// Regular polygon approximating a circle (64 vertices by default).
Polygon circle_polygon(GeoPoint center, double radius_km, Metric metric, int vertices = 64);

/// True iff p is strictly inside poly or on its boundary. Containment is
/// evaluated in the coordinate plane (lon/lat treated as planar), as GeoJSON
/// consumers do.
bool point_in_polygon(GeoPoint p, const Polygon& poly);
bool on_boundary(GeoPoint p, const Polygon& poly);

/// Area on the sphere for great_circle, with edges straight in lon/lat as for
/// point_in_polygon (exact for lon/lat boxes); shoelace area for planar.
/// Always positive; holes are subtracted.
double polygon_area_km2(const Polygon& poly, Metric metric = Metric::great_circle);

/// A point guaranteed to be strictly inside poly.
GeoPoint interior_point(const Polygon& poly);

/// Interiors share area. Polygons that only touch along edges do not overlap.
bool polygons_overlap(const Polygon& a, const Polygon& b);

/// Union of disjoint polygons.
struct MultiPolygon {
  std::vector<Polygon> parts;

  bool contains(GeoPoint p) const;
  double area_km2(Metric metric) const;
  BoundingBox bbox() const;
  bool empty() const { return parts.empty(); }
};

bool multipolygons_overlap(const MultiPolygon& a, const MultiPolygon& b);

/// Keeps the part of region with lon >= meridian (east=true) or lon < meridian.
MultiPolygon clip_by_meridian(const MultiPolygon& region, double meridian, bool east);

}  // namespace stscan::geo
