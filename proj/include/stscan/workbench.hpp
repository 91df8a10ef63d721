#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stscan/catalog.hpp"
#include "stscan/geojson.hpp"
#include "stscan/scan.hpp"

namespace stscan::workbench {

// ---------------------------------------------------------------------------
// Parameter sweeps

struct SweepSpec {
  std::vector<double> rmax_km{100, 200, 300};
  std::vector<int> tmax_years{1, 3, 5};
  std::vector<int> tagg_months{12, 3};
};

/// T_max in T_agg units: years * 12 / T_agg. Throws ConfigError unless that is
/// a positive whole number.
int tmax_units(int years, int tagg_months);

struct SweepEntry {
  double rmax_km = 0;
  int tmax_years = 0;
  int tmax_units = 0;
  int tagg_months = 0;
  std::optional<scan::ScanResult> result;
  std::string error;  ///< set when this combination failed
};

struct SweepResult {
  std::vector<SweepEntry> entries;  ///< T_agg-major, then R_max, then T_max
  /// rmax_km,tmax_years,tmax_units,tagg_months,n_clusters,n_significant,status
  std::string summary_csv() const;
};

/// One scan per combination; all other settings come from base. A failing
/// combination is recorded and does not stop the others.
SweepResult sweep_scan(const EventCatalog& catalog, const SweepSpec& sweep, const scan::ScanConfig& base);

// ---------------------------------------------------------------------------
// Decades

struct DecadeSpec {
  int start_year = 1956;
  int length_years = 10;
};

/// R_max 200 km, T_max 2 years, T_agg 12 months.
scan::ScanConfig decade_config();

/// Consecutive whole decades from start_year that end by the catalog's last
/// complete year. Throws DataError when not even one fits.
std::vector<StudyPeriod> decade_periods(const EventCatalog& catalog, const DecadeSpec& spec);

struct DecadeRun {
  int index = 0;  ///< 1-based
  StudyPeriod period;
  std::size_t n_events = 0;
  bool empty = true;
  std::optional<scan::ScanResult> result;
  std::string error;
};

std::vector<DecadeRun> decade_scan(const EventCatalog& catalog, const DecadeSpec& spec,
                                   const scan::ScanConfig& config = decade_config());

/// A significant cluster of one decade run, flattened for export.
struct DecadeCluster {
  int decade = 0;
  scan::Cluster cluster;
};

std::vector<DecadeCluster> significant_clusters(std::span<const DecadeRun> runs, double alpha);

/// decade,decade_start,decade_end,rank,center_lon,center_lat,centroid_lon,centroid_lat,
/// radius_km,start_date,end_date,duration_days,observed,expected,glr,p_value
std::string decade_clusters_csv(std::span<const DecadeCluster> clusters);
std::vector<DecadeCluster> read_decade_clusters_csv(const std::filesystem::path& path);

/// decade,start,end,n_events,status,n_clusters,n_significant
std::string decade_summary_csv(std::span<const DecadeRun> runs, double alpha);

// ---------------------------------------------------------------------------
// Durations

/// Quartiles by the median-of-halves rule: q1 and q3 are the medians of the
/// lower and upper floor(n/2) sorted values (the median itself is excluded for
/// odd n); a single value gives all statistics equal to it.
struct DurationStats {
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, iqr = 0;
};

std::optional<DurationStats> duration_stats(std::span<const double> durations_days);

/// Calendar days from the first day of the start interval to the last day of
/// the end interval, inclusive.
double duration_days(const scan::Cluster& cluster);

/// decade,n,min,q1,median,q3,max,iqr; decades without clusters are omitted.
std::string duration_stats_csv(std::span<const DecadeCluster> clusters);

// ---------------------------------------------------------------------------
// Recurrence

struct RecurrenceOptions {
  int start_year = 1956;
  int length_years = 10;
  bool event_centroid = false;  ///< assign by member centroid instead of circle center
};

struct RecurrenceRecord {
  std::string catchment_id;
  std::size_t count = 0;
  std::vector<int> decades;  ///< sorted, one entry per cluster
  std::vector<double> gaps_years;
  std::vector<std::string> gap_bins;
};

struct RecurrenceReport {
  std::vector<RecurrenceRecord> records;  ///< catchments with count >= 1, input order
  std::size_t unassigned = 0;
  std::vector<int> unassigned_decades;
  std::size_t total = 0;
};

/// "5-10" for [5, 10), "10-20" for [10, 20), "20-50" for [20, 50], else "other".
std::string gap_bin(double years);

/// Decade midpoints are start_year + (k - 1) * length + length / 2; gaps are
/// taken between consecutive distinct decades of a catchment. Throws DataError
/// if two catchments overlap.
RecurrenceReport recurrence_by_catchment(std::span<const DecadeCluster> clusters,
                                         std::span<const geo::Feature> catchments,
                                         const RecurrenceOptions& options = {});

/// catchment_id,count,decades,gap_bins with ';'-separated lists; a final
/// "unassigned" row when any cluster fell outside every catchment.
std::string recurrence_csv(const RecurrenceReport& report);

}  // namespace stscan::workbench
