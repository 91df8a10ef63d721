#include "stscan/geojson.hpp"

#include <json.hpp>

#include "stscan/error.hpp"
#include "stscan/io.hpp"

namespace stscan::geo {

namespace {

using nlohmann::json;

Ring parse_ring(const json& coords) {
  Ring ring;
  for (const auto& c : coords) {
    if (!c.is_array() || c.size() < 2) throw DataError("GeoJSON position must be [lon, lat]");
    ring.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  return ring;
}

Polygon parse_polygon(const json& rings) {
  if (!rings.is_array() || rings.empty()) throw DataError("GeoJSON polygon without rings");
  std::vector<Ring> holes;
  for (std::size_t i = 1; i < rings.size(); ++i) holes.push_back(parse_ring(rings[i]));
  return Polygon(parse_ring(rings[0]), std::move(holes));
}

bool parse_geometry(const json& geom, MultiPolygon& out) {
  if (!geom.is_object()) return false;
  std::string type = geom.value("type", "");
  if (type == "Polygon") {
    out.parts.push_back(parse_polygon(geom.at("coordinates")));
    return true;
  }
  if (type == "MultiPolygon") {
    for (const auto& p : geom.at("coordinates")) out.parts.push_back(parse_polygon(p));
    return true;
  }
  return false;
}

std::string feature_id(const json& f, std::size_t position) {
  auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  if (f.contains("id") && !f["id"].is_null()) return text(f["id"]);
  if (f.contains("properties") && f["properties"].is_object()) {
    const auto& p = f["properties"];
    if (p.contains("id") && !p["id"].is_null()) return text(p["id"]);
    if (p.contains("name") && !p["name"].is_null()) return text(p["name"]);
  }
  return std::to_string(position);
}

}  // namespace

std::vector<Feature> parse_polygon_features(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid GeoJSON: ") + e.what());
  }
  std::vector<Feature> out;
  try {
    auto add_feature = [&](const json& f, std::size_t position) {
      Feature feature{feature_id(f, position), {}};
      if (f.contains("geometry") && parse_geometry(f["geometry"], feature.geometry))
        out.push_back(std::move(feature));
    };
    std::string type = doc.value("type", "");
    if (type == "FeatureCollection") {
      std::size_t k = 0;
      for (const auto& f : doc.at("features")) add_feature(f, k++);
    } else if (type == "Feature") {
      add_feature(doc, 0);
    } else {
      Feature feature{"0", {}};
      if (parse_geometry(doc, feature.geometry)) out.push_back(std::move(feature));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed GeoJSON: ") + e.what());
  }
  if (out.empty()) throw DataError("GeoJSON holds no Polygon or MultiPolygon features");
  return out;
}

std::vector<Feature> read_polygon_features(const std::filesystem::path& path) {
  return parse_polygon_features(io::read_file(path));
}

MultiPolygon read_region(const std::filesystem::path& path) {
  MultiPolygon region;
  for (auto& f : read_polygon_features(path))
    for (auto& p : f.geometry.parts) region.parts.push_back(std::move(p));
  return region;
}

}  // namespace stscan::geo
