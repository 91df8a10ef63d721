#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stscan/geo.hpp"

namespace stscan::geo {

struct Feature {
  std::string id;
  MultiPolygon geometry;
};

/// Polygon and MultiPolygon features (lon, lat order) from a FeatureCollection,
/// a single Feature or a bare geometry. Feature ids come from "id",
/// properties.id or properties.name, falling back to the feature's position.
std::vector<Feature> parse_polygon_features(std::string_view text);
std::vector<Feature> read_polygon_features(const std::filesystem::path& path);

/// All polygon parts of a file merged into one region.
MultiPolygon read_region(const std::filesystem::path& path);

}  // namespace stscan::geo
