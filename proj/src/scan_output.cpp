#include <json.hpp>

#include "stscan/io.hpp"
#include "stscan/scan.hpp"

namespace stscan::scan {

std::string clusters_csv(const ScanResult& result) {
  std::string out = "rank,center_lon,center_lat,radius_km,start_date,end_date,observed,expected,glr,p_value\n";
  for (const auto& c : result.clusters) {
    const auto& y = c.cylinder;
    out += std::to_string(c.rank) + "," + io::format_double(y.center.lon) + "," + io::format_double(y.center.lat) + "," +
           io::format_double(y.radius_km) + "," + format_date(c.start_date) + "," + format_date(c.end_date) + "," +
           std::to_string(y.observed) + "," + io::format_double(y.expected) + "," + format_glr(y.log_glr) + "," +
           io::format_double(c.p_value) + "\n";
  }
  return out;
}

std::string clusters_geojson(const ScanResult& result) {
  using nlohmann::json;
  json features = json::array();
  for (const auto& c : result.clusters) {
    const auto& y = c.cylinder;
    auto poly = geo::circle_polygon(y.center, y.radius_km, result.metric, 64);
    json ring = json::array();
    for (const auto& p : poly.exterior()) ring.push_back({p.lon, p.lat});
    json props = {{"rank", c.rank},
                  {"center_event_id", y.center_id},
                  {"center_lon", y.center.lon},
                  {"center_lat", y.center.lat},
                  {"radius_km", y.radius_km},
                  {"start_date", format_date(c.start_date)},
                  {"end_date", format_date(c.end_date)},
                  {"observed", y.observed},
                  {"expected", y.expected},
                  {"glr", format_glr(y.log_glr)},
                  {"log_glr", y.log_glr},
                  {"p_value", c.p_value},
                  {"n_members", y.members.size()}};
    features.push_back({{"type", "Feature"},
                        {"properties", props},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(1) + "\n";
}

}  // namespace stscan::scan
