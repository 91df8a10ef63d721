#pragma once

// Brute-force reference implementations. They share no code with the library
// beyond the data types and distance_km, and favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "stscan/catalog.hpp"
#include "stscan/geo.hpp"
#include "stscan/scan.hpp"

namespace oracle {

using namespace stscan;

inline int month_unit(Date d, int tagg) {
  int m = static_cast<int>(d.year()) * 12 + static_cast<int>(static_cast<unsigned>(d.month())) - 1;
  return m >= 0 ? m / tagg : -((-m + tagg - 1) / tagg);
}

/// Interval of each event: calendar T_agg unit counted from the period start's unit.
inline std::vector<int> interval_labels(const EventCatalog& cat, int tagg) {
  int first = month_unit(cat.period().start, tagg);
  std::vector<int> out;
  for (const auto& e : cat.events()) out.push_back(month_unit(e.date, tagg) - first);
  return out;
}

inline int interval_count(const EventCatalog& cat, int tagg) {
  return month_unit(cat.period().end, tagg) - month_unit(cat.period().start, tagg) + 1;
}

struct Cyl {
  std::int64_t center_id;
  geo::GeoPoint center;
  double radius;
  int start, end;
  std::vector<std::int64_t> members;
  std::int64_t c;
  long double mu;
  long double llr;
};

inline long double log_glr(long double c, long double mu, long double total) {
  long double v = 0;
  if (c > 0) v += c * std::log(c / mu);
  if (total - c > 0) v += (total - c) * std::log((total - c) / (total - mu));
  return v;
}

/// Every cylinder with c >= min_cases and c > mu, by direct summation of
/// mu_zd = c_z. * c_.d / C over the zone's events.
inline std::vector<Cyl> all_cylinders(const EventCatalog& cat, const std::vector<int>& labels, int n_int,
                                      const scan::ScanConfig& cfg) {
  const auto& ev = cat.events();
  const std::size_t n = ev.size();
  const long double C = static_cast<long double>(n);
  std::vector<long double> per_interval(static_cast<std::size_t>(n_int), 0);
  for (int l : labels) per_interval[static_cast<std::size_t>(l)] += 1;

  // distinct locations, represented by their lowest id
  std::map<std::pair<double, double>, std::int64_t> centers;
  std::map<std::pair<double, double>, long double> loc_total;
  for (const auto& e : ev) {
    auto key = std::make_pair(e.location.lon, e.location.lat);
    auto it = centers.find(key);
    if (it == centers.end() || e.id < it->second) centers[key] = e.id;
    loc_total[key] += 1;
  }

  std::vector<Cyl> out;
  for (const auto& [key, id] : centers) {
    geo::GeoPoint c0{key.first, key.second};
    std::set<double> radii;
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = geo::distance_km(c0, ev[i].location, cat.metric());
      if (dist[i] <= cfg.rmax_km) radii.insert(dist[i]);
    }
    for (double r : radii) {
      std::set<std::pair<double, double>> zone_locs;
      for (std::size_t i = 0; i < n; ++i)
        if (dist[i] <= r) zone_locs.insert({ev[i].location.lon, ev[i].location.lat});
      for (int s = 0; s < n_int; ++s)
        for (int e = s; e < n_int && e - s + 1 <= cfg.tmax_units; ++e) {
          Cyl y{id, c0, r, s, e, {}, 0, 0, 0};
          for (std::size_t i = 0; i < n; ++i)
            if (dist[i] <= r && labels[i] >= s && labels[i] <= e) {
              y.members.push_back(ev[i].id);
              ++y.c;
            }
          for (const auto& z : zone_locs)
            for (int d = s; d <= e; ++d) y.mu += loc_total[z] * per_interval[static_cast<std::size_t>(d)] / C;
          if (y.c < cfg.min_cases) continue;
          if (!(static_cast<long double>(y.c) > y.mu * (1 + 1e-12L))) continue;
          std::sort(y.members.begin(), y.members.end());
          y.llr = log_glr(static_cast<long double>(y.c), y.mu, C);
          out.push_back(std::move(y));
        }
    }
  }
  return out;
}

inline bool close(long double a, long double b, long double rel = 1e-12L) {
  return std::fabs(a - b) <= rel * std::max<long double>(1, std::max(std::fabs(a), std::fabs(b)));
}

// ranking with ties on llr decided within rounding
inline bool before(const Cyl& a, const Cyl& b) {
  if (!close(a.llr, b.llr, 1e-13L)) return a.llr > b.llr;
  if (a.radius != b.radius) return a.radius < b.radius;
  if (a.start != b.start) return a.start < b.start;
  if (a.end != b.end) return a.end < b.end;
  return a.center_id < b.center_id;
}

/// Ranked, overlap-filtered list of per-center best cylinders.
inline std::vector<Cyl> scan_clusters(const EventCatalog& cat, const scan::ScanConfig& cfg) {
  auto labels = interval_labels(cat, cfg.tagg_months);
  int n_int = interval_count(cat, cfg.tagg_months);
  auto cyl = all_cylinders(cat, labels, n_int, cfg);
  std::map<std::int64_t, Cyl> best;
  for (auto& y : cyl) {
    auto it = best.find(y.center_id);
    if (it == best.end() || before(y, it->second)) best.insert_or_assign(y.center_id, y);
  }
  std::vector<Cyl> ranked;
  for (auto& [id, y] : best) ranked.push_back(y);
  std::sort(ranked.begin(), ranked.end(), before);
  if (cfg.overlap_policy == scan::OverlapPolicy::report_all) return ranked;
  std::vector<Cyl> kept;
  for (const auto& y : ranked) {
    bool ok = true;
    for (const auto& k : kept) {
      double d = geo::distance_km(y.center, k.center, cat.metric());
      bool clash = cfg.overlap_policy == scan::OverlapPolicy::no_geographic_overlap
                       ? d <= y.radius + k.radius
                       : (d <= k.radius || d <= y.radius);
      if (clash) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(y);
  }
  return kept;
}

/// Ordered pairs i != j within distance r and day lag t.
inline std::int64_t pair_count(const EventCatalog& cat, double r, double t, bool use_r, bool use_t) {
  std::int64_t count = 0;
  const auto& ev = cat.events();
  for (std::size_t i = 0; i < ev.size(); ++i)
    for (std::size_t j = 0; j < ev.size(); ++j) {
      if (i == j) continue;
      if (use_r && !(geo::distance_km(ev[i].location, ev[j].location, cat.metric()) <= r)) continue;
      if (use_t && !(std::fabs(static_cast<double>(day_number(ev[i].date) - day_number(ev[j].date))) <= t)) continue;
      ++count;
    }
  return count;
}

inline double pairs(std::size_t n) { return static_cast<double>(n) * static_cast<double>(n - 1); }

inline double k_spatial(const EventCatalog& cat, double r) {
  return static_cast<double>(pair_count(cat, r, 0, true, false)) * (cat.area_km2() / pairs(cat.size()));
}
inline double k_temporal(const EventCatalog& cat, double t) {
  return static_cast<double>(pair_count(cat, 0, t, false, true)) *
         (static_cast<double>(cat.period().days()) / pairs(cat.size()));
}
inline double k_spacetime(const EventCatalog& cat, double r, double t) {
  return static_cast<double>(pair_count(cat, r, t, true, true)) *
         (cat.area_km2() * static_cast<double>(cat.period().days()) / pairs(cat.size()));
}

inline std::size_t range_count(const std::vector<geo::GeoPoint>& pts, geo::GeoPoint c, double r, geo::Metric m) {
  std::size_t k = 0;
  for (const auto& p : pts)
    if (geo::distance_km(c, p, m) <= r) ++k;
  return k;
}

/// Winding number of a closed ring around p (p assumed off the boundary).
inline int winding(const geo::Ring& ring, geo::GeoPoint p) {
  int w = 0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const auto& a = ring[i];
    const auto& b = ring[i + 1];
    double cross = (b.lon - a.lon) * (p.lat - a.lat) - (p.lon - a.lon) * (b.lat - a.lat);
    if (a.lat <= p.lat) {
      if (b.lat > p.lat && cross > 0) ++w;
    } else if (b.lat <= p.lat && cross < 0) {
      --w;
    }
  }
  return w;
}

}  // namespace oracle
