#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stscan/catalog.hpp"
#include "stscan/time_grid.hpp"

namespace stscan::scan {

enum class OverlapPolicy { no_geographic_overlap, no_center_in_cluster, report_all };

std::string to_string(OverlapPolicy p);
OverlapPolicy overlap_policy_from_string(const std::string& s);

struct ScanConfig {
  double rmax_km = 200;    ///< R_max
  int tmax_units = 3;      ///< T_max, in T_agg units
  int tagg_months = 12;    ///< T_agg
  int replicates = 999;
  std::uint64_t seed = 1;
  double alpha = 0.005;
  int min_cases = 2;
  OverlapPolicy overlap_policy = OverlapPolicy::no_geographic_overlap;
  unsigned workers = 0;  ///< 0 = hardware concurrency; never changes results
};

/// Throws ConfigError naming the violated rule: R_max > 0 with a circle of
/// radius R_max covering at most 50% of the study area; 1 <= T_max <= 50% of
/// the intervals; replicates >= 19; 0 < alpha < 1; min_cases >= 1.
void validate_config(const ScanConfig& config, const EventCatalog& catalog, const TimeGrid& grid);

// ---------------------------------------------------------------------------
// Expected counts and the likelihood ratio

/// Case counts c_zd over elementary locations z (distinct event coordinates)
/// and intervals d, with both marginals and the total C.
class CaseTable {
 public:
  /// counts[z][d]
  static CaseTable from_counts(std::vector<std::vector<std::int64_t>> counts);
  static CaseTable from_catalog(const EventCatalog& catalog, const TimeAssignment& time);

  std::size_t n_locations() const { return counts_.size(); }
  int n_intervals() const { return n_intervals_; }
  std::int64_t count(std::size_t z, int d) const { return counts_[z][static_cast<std::size_t>(d)]; }
  std::int64_t location_total(std::size_t z) const { return location_totals_[z]; }
  std::int64_t interval_total(int d) const { return interval_totals_[static_cast<std::size_t>(d)]; }
  std::int64_t total() const { return total_; }
  /// Elementary location of each catalog event (from_catalog only).
  const std::vector<std::size_t>& location_of_event() const { return location_of_event_; }
  const std::vector<geo::GeoPoint>& locations() const { return locations_; }

 private:
  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<std::int64_t> location_totals_, interval_totals_;
  std::int64_t total_ = 0;
  int n_intervals_ = 0;
  std::vector<std::size_t> location_of_event_;
  std::vector<geo::GeoPoint> locations_;
};

/// mu_zd = (1/C) * (sum_d c_zd) * (sum_z c_zd), summed over the zone's
/// elementary locations; one value per interval.
std::vector<double> expected_counts(const CaseTable& table, std::span<const std::size_t> zone);

/// mu_A: sum of mu_zd over the zone and the intervals start..end inclusive.
double cylinder_expectation(const CaseTable& table, std::span<const std::size_t> zone, int start, int end);

/// log of (c/mu)^c ((C-c)/(C-mu))^(C-c) with 0^0 = 1. Throws NumericalError
/// for mu <= 0 with c > 0, or mu >= C with c < C.
double log_glr(double c_a, double mu_a, double total);
double glr(double c_a, double mu_a, double total);

/// GLR as decimal text from its logarithm; stays finite beyond double range.
std::string format_glr(double log_glr);

// ---------------------------------------------------------------------------
// Cylinders and clusters

struct Cylinder {
  std::int64_t center_id = 0;  ///< lowest event id at the center location
  geo::GeoPoint center;
  double radius_km = 0;
  int start = 0, end = 0;  ///< interval indices, inclusive
  std::vector<std::int64_t> members;  ///< event ids, ascending
  std::int64_t observed = 0;
  double expected = 0;
  double log_glr = 0;
};

/// Visits every cylinder with c_A >= min_cases and c_A > mu_A. Centers are
/// distinct event locations; radii are the distinct distances from the center
/// up to R_max; intervals have length 1..T_max. Exhaustive, for small inputs.
void enumerate_cylinders(const EventCatalog& catalog, const TimeAssignment& time, const ScanConfig& config,
                         const std::function<void(const Cylinder&)>& visit);

struct Cluster {
  Cylinder cylinder;
  double glr = 0;  ///< exp(log_glr); may be +inf for very large catalogs
  int rank = 0;
  double p_value = 1;
  Date start_date, end_date;
  geo::GeoPoint centroid;  ///< event-weighted centroid of members
};

/// Strict ranking: higher GLR first, then smaller radius, earlier start,
/// earlier end, lower center id.
bool ranks_before(const Cluster& a, const Cluster& b);
void sort_clusters(std::vector<Cluster>& clusters);

/// Greedy pass in rank order. no_geographic_overlap drops a cluster whose
/// circle intersects (or touches) a kept circle; no_center_in_cluster drops
/// one whose center lies in a kept circle or whose circle holds a kept
/// center; report_all returns the input.
std::vector<Cluster> select_secondary(const std::vector<Cluster>& ranked, OverlapPolicy policy, geo::Metric metric);

/// Uniform random permutation of interval labels, from stream (seed, stream).
std::vector<int> permute_labels(std::span<const int> labels, std::uint64_t seed, std::uint64_t stream);
/// Catalog whose dates are a uniform permutation of the original dates across events.
EventCatalog permute_dates(const EventCatalog& catalog, std::uint64_t seed, std::uint64_t stream);

struct ScanResult {
  ScanConfig config;
  std::vector<Cluster> clusters;  ///< reported, rank order
  std::size_t n_candidates = 0;   ///< best cylinder per center, before the overlap policy
  std::vector<double> replicate_max_log_glr;
  int n_intervals = 0;
  std::int64_t total_cases = 0;
  geo::Metric metric = geo::Metric::great_circle;
  std::vector<std::string> interval_labels;

  std::size_t significant_count() const;
  std::size_t significant_count(double alpha) const;
};

/// Retrospective space-time permutation scan. The candidate list holds the
/// best cylinder of each center; p = (1 + #{replicate max >= GLR}) / (R + 1).
/// Output does not depend on config.workers.
ScanResult run_stpss(const EventCatalog& catalog, const ScanConfig& config);

/// rank,center_lon,center_lat,radius_km,start_date,end_date,observed,expected,glr,p_value
std::string clusters_csv(const ScanResult& result);
/// FeatureCollection, one 64-vertex circle per reported cluster.
std::string clusters_geojson(const ScanResult& result);

}  // namespace stscan::scan
