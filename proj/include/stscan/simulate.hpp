#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stscan/catalog.hpp"

namespace stscan::sim {

enum class Process { csr, clustered };

std::string to_string(Process p);
Process process_from_string(const std::string& s);

struct SimSpec {
  Process process = Process::csr;
  std::size_t n = 1000;
  geo::MultiPolygon region = default_region();
  StudyPeriod period = year_period(1990, 2019);
  geo::Metric metric = geo::Metric::great_circle;
  // clustered only
  double cluster_fraction = 0.3;  ///< of n, split evenly over the clusters
  double cluster_radius_km = 25;
  int cluster_months = 12;  ///< window length; aligned to calendar units when it divides 12 (or 12 divides it)
  int cluster_count = 1;
  std::uint64_t seed = 1;
  bool marks = true;  ///< draw fatalities and losses
};

struct InjectedCluster {
  geo::GeoPoint center;
  double radius_km = 0;
  Date start, end;  ///< inclusive
  std::size_t n_events = 0;
};

struct SimResult {
  EventCatalog catalog;
  std::vector<int> source;  ///< per catalog event: injected cluster index, or -1 for background
  std::vector<InjectedCluster> clusters;
};

/// CSR: uniform over the region (area-uniform on the sphere) and uniform over
/// the days of the period. Clustered: CSR background plus exactly
/// round(fraction * n) events drawn uniformly inside random cylinders.
/// Event ids are 1..n. Same spec, same catalog.
SimResult simulate_catalog(const SimSpec& spec);

}  // namespace stscan::sim
