#pragma once

#include <random>
#include <string>
#include <vector>

#include "stscan/catalog.hpp"

namespace testing {

struct Row {
  std::int64_t id;
  double x, y;
  std::string date;
};

inline stscan::Date date(const std::string& s) { return *stscan::parse_iso_date(s); }

/// Planar catalog over the box [x0, x1] x [y0, y1].
inline stscan::EventCatalog planar_catalog(const std::vector<Row>& rows, double x0, double y0, double x1, double y1,
                                           const std::string& start, const std::string& end) {
  std::vector<stscan::Event> ev;
  for (const auto& r : rows) {
    stscan::Event e;
    e.id = r.id;
    e.location = {r.x, r.y};
    e.date = date(r.date);
    ev.push_back(e);
  }
  return stscan::EventCatalog(std::move(ev), stscan::geo::MultiPolygon{{stscan::geo::box_polygon(x0, y0, x1, y1)}},
                              {date(start), date(end)}, stscan::geo::Metric::planar);
}

/// n events uniform over a planar box and a period.
inline stscan::EventCatalog random_planar(std::mt19937_64& rng, std::size_t n, double size, const std::string& start,
                                          const std::string& end, bool integer_grid = false) {
  std::int64_t d0 = stscan::day_number(date(start)), d1 = stscan::day_number(date(end));
  std::uniform_real_distribution<double> u(0, size);
  std::uniform_int_distribution<int> g(0, static_cast<int>(size));
  std::uniform_int_distribution<std::int64_t> day(d0, d1);
  std::vector<stscan::Event> ev;
  for (std::size_t i = 0; i < n; ++i) {
    stscan::Event e;
    e.id = static_cast<std::int64_t>(i) + 1;
    e.location = integer_grid ? stscan::geo::GeoPoint{double(g(rng)), double(g(rng))}
                              : stscan::geo::GeoPoint{u(rng), u(rng)};
    e.date = stscan::from_day_number(day(rng));
    ev.push_back(e);
  }
  return stscan::EventCatalog(std::move(ev), stscan::geo::MultiPolygon{{stscan::geo::box_polygon(0, 0, size, size)}},
                              {date(start), date(end)}, stscan::geo::Metric::planar);
}

}  // namespace testing
