#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stscan/error.hpp"
#include "stscan/geo.hpp"

namespace stscan {

using Date = std::chrono::year_month_day;

enum class DateQuality { complete, partial, invalid };

/// complete: a valid YYYY-MM-DD. partial: YYYY or YYYY-MM (or a zero day /
/// month). Anything else is invalid.
DateQuality classify_date(std::string_view text);
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_date(Date d);
std::int64_t day_number(Date d);
Date from_day_number(std::int64_t days);
int year_of(Date d);

/// Inclusive calendar range.
struct StudyPeriod {
  Date start;
  Date end;

  std::int64_t days() const { return day_number(end) - day_number(start) + 1; }
  bool contains(Date d) const { return d >= start && d <= end; }
};

StudyPeriod year_period(int first_year, int last_year);

struct Event {
  std::int64_t id = 0;
  geo::GeoPoint location;
  Date date;
  std::optional<std::int64_t> fatalities;
  std::optional<double> economic_loss;
};

/// Dated, located events over a study region and period, sorted by (date, id).
/// Every event lies inside the period and the region's bounding box.
class EventCatalog {
 public:
  EventCatalog() = default;
  EventCatalog(std::vector<Event> events, geo::MultiPolygon region, StudyPeriod period,
               geo::Metric metric = geo::Metric::great_circle);

  const std::vector<Event>& events() const { return events_; }
  const Event& operator[](std::size_t i) const { return events_[i]; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const geo::MultiPolygon& region() const { return region_; }
  const StudyPeriod& period() const { return period_; }
  geo::Metric metric() const { return metric_; }
  /// |A| in km^2, computed once.
  double area_km2() const { return area_km2_; }

  std::vector<geo::GeoPoint> locations() const;

 private:
  std::vector<Event> events_;
  geo::MultiPolygon region_;
  StudyPeriod period_{};
  geo::Metric metric_ = geo::Metric::great_circle;
  double area_km2_ = 0;
};

/// Default study extent: mainland China bounding box.
geo::MultiPolygon default_region();

// ---------------------------------------------------------------------------
// Ingestion

struct ColumnSchema {
  std::string id = "id";
  std::string lon = "lon";
  std::string lat = "lat";
  std::string date = "date";
  std::string fatalities = "deaths";
  std::string loss = "loss_rmb";
};

struct RowError {
  std::size_t row;  ///< 1-based line number in the source file
  std::string field;
  std::string reason;
};

struct RawRecord {
  std::size_t row;
  std::vector<std::string> fields;
};

struct CompletenessReport {
  std::size_t total = 0;
  std::size_t retained = 0;
  double retained_fraction = 0;
  bool empty = true;
};

struct CompletenessResult {
  std::vector<RawRecord> kept;
  std::vector<RowError> dropped;
  CompletenessReport report;
};

/// Keeps rows whose date column holds a full year-month-day.
CompletenessResult filter_complete_dates(std::vector<RawRecord> rows, std::size_t date_column);

struct LoadOptions {
  ColumnSchema schema;
  geo::MultiPolygon region = default_region();
  geo::Metric metric = geo::Metric::great_circle;
  std::optional<StudyPeriod> period;  ///< derived from the data (whole years) when absent
  double max_reject_fraction = 0.1;   ///< malformed rows, excluding partial dates
};

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t incomplete_dates = 0;
  std::size_t rejected = 0;
  std::size_t retained = 0;
  double completeness_fraction = 0;
  bool empty_catalog = true;
  std::vector<RowError> errors;
};

struct LoadResult {
  EventCatalog catalog;
  LoadReport report;
};

/// Thrown when too many rows are malformed; carries the full report.
class CatalogRejected : public DataError {
 public:
  CatalogRejected(const std::string& what, LoadReport report) : DataError(what), report_(std::move(report)) {}
  const LoadReport& report() const { return report_; }

 private:
  LoadReport report_;
};

LoadResult load_catalog(std::istream& in, const LoadOptions& options = {});
LoadResult load_catalog(const std::filesystem::path& path, const LoadOptions& options = {});

std::string row_errors_csv(const std::vector<RowError>& errors);

// ---------------------------------------------------------------------------
// Impact classes

/// Ordered impact classes. Level i covers fatalities in [min_fatalities_i,
/// min_fatalities_{i+1}) and loss in [min_loss_i, min_loss_{i+1}); an event's
/// class is the higher of its fatality and loss sub-classes.
class ImpactScale {
 public:
  struct Level {
    std::string label;
    std::int64_t min_fatalities;
    double min_loss;
  };

  explicit ImpactScale(std::vector<Level> levels);
  /// Four classes; fatality breaks 0 / 1-2 / 3-9 / >=10, loss breaks at
  /// 1e6 / 1e7 / 1e8 currency units.
  static ImpactScale default_scale();
  /// "label:min_fatalities:min_loss;label:..." in ascending order.
  static ImpactScale parse(std::string_view spec);

  struct Result {
    int level;  ///< 1-based
    std::string label;
    bool flagged;  ///< no fatality and no loss information
  };

  Result classify(const Event& e) const;
  int fatality_level(std::int64_t fatalities) const;
  int loss_level(double loss) const;
  const std::vector<Level>& levels() const { return levels_; }
  std::string to_string() const;

 private:
  std::vector<Level> levels_;
};

/// CSV with the input schema columns plus impact_class. Loading it back with
/// the same schema reproduces the catalog exactly.
std::string export_catalog_csv(const EventCatalog& catalog, const ImpactScale& scale,
                               const ColumnSchema& schema = {});

// ---------------------------------------------------------------------------
// Subsets

struct SubsetFilter {
  std::optional<StudyPeriod> period;
  std::optional<geo::MultiPolygon> region;
};

/// Events inside every given filter. The result's period and region are the
/// filter's (periods are intersected with the catalog's).
EventCatalog subset(const EventCatalog& catalog, const SubsetFilter& filter);

/// (west, east): lon < meridian goes west, lon >= meridian east.
std::pair<EventCatalog, EventCatalog> split_by_meridian(const EventCatalog& catalog, double meridian);

}  // namespace stscan
