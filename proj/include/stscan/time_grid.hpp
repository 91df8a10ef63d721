#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stscan/catalog.hpp"

namespace stscan {

/// Calendar-aligned aggregation of the study period into units of T_agg
/// months. Unit boundaries fall on multiples of T_agg counted from January of
/// year 0, so T_agg = 3 gives calendar quarters and 12 gives calendar years.
/// Interval d = 0 is the unit containing the period start.
class TimeGrid {
 public:
  TimeGrid(StudyPeriod period, int t_agg_months);

  int t_agg_months() const { return t_agg_; }
  int size() const { return n_intervals_; }
  const StudyPeriod& period() const { return period_; }

  /// Interval index of a date inside the period; throws DataError otherwise.
  int interval_of(Date d) const;
  /// First and last calendar day of interval d, clipped to the study period.
  Date interval_start(int d) const;
  Date interval_end(int d) const;
  /// "1975", "1975-Q3", "1975-H2", "1975-08", or "1975-01..1976-12".
  std::string label(int d) const;

 private:
  StudyPeriod period_;
  int t_agg_;
  std::int64_t first_unit_;
  int n_intervals_;
};

/// Event-to-interval assignment for a catalog.
struct TimeAssignment {
  TimeGrid grid;
  std::vector<int> interval;          ///< per event, same order as the catalog
  std::vector<std::int64_t> counts;   ///< events per interval
};

/// Throws ConfigError for an unsupported T_agg (must divide 12 or be a
/// multiple of 12) or one longer than the study period itself.
TimeAssignment assign_time_grid(const EventCatalog& catalog, int t_agg_months);

}  // namespace stscan
