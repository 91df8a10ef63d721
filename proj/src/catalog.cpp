#include "stscan/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <fstream>
#include <sstream>

#include "stscan/io.hpp"

namespace stscan {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

DateQuality classify_date(std::string_view text) {
  std::string t = io::trim(text);
  auto parts = io::split(t, '-');
  if (parts.empty() || parts[0].size() != 4 || !all_digits(parts[0])) return DateQuality::invalid;
  for (std::size_t i = 1; i < parts.size(); ++i)
    if (parts[i].size() != 2 || !all_digits(parts[i])) return DateQuality::invalid;
  if (parts.size() == 1) return DateQuality::partial;
  int month = to_int(parts[1]);
  if (month > 12) return DateQuality::invalid;
  if (parts.size() == 2) return DateQuality::partial;
  if (parts.size() != 3) return DateQuality::invalid;
  int day = to_int(parts[2]);
  if (month == 0 || day == 0) return DateQuality::partial;
  Date d{std::chrono::year{to_int(parts[0])}, std::chrono::month{static_cast<unsigned>(month)},
         std::chrono::day{static_cast<unsigned>(day)}};
  return d.ok() ? DateQuality::complete : DateQuality::invalid;
}

std::optional<Date> parse_iso_date(std::string_view text) {
  if (classify_date(text) != DateQuality::complete) return std::nullopt;
  auto parts = io::split(io::trim(text), '-');
  return Date{std::chrono::year{to_int(parts[0])}, std::chrono::month{static_cast<unsigned>(to_int(parts[1]))},
              std::chrono::day{static_cast<unsigned>(to_int(parts[2]))}};
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

std::int64_t day_number(Date d) { return std::chrono::sys_days{d}.time_since_epoch().count(); }

Date from_day_number(std::int64_t days) {
  return Date{std::chrono::sys_days{std::chrono::days{days}}};
}

int year_of(Date d) { return static_cast<int>(d.year()); }

StudyPeriod year_period(int first_year, int last_year) {
  using namespace std::chrono;
  if (last_year < first_year) throw ConfigError("period end year precedes start year");
  return {Date{year{first_year}, January, day{1}}, Date{year{last_year}, December, day{31}}};
}

EventCatalog::EventCatalog(std::vector<Event> events, geo::MultiPolygon region, StudyPeriod period,
                           geo::Metric metric)
    : events_(std::move(events)), region_(std::move(region)), period_(period), metric_(metric) {
  if (period_.end < period_.start) throw ConfigError("study period ends before it starts");
  geo::BoundingBox bb{};
  if (!region_.empty()) {
    area_km2_ = region_.area_km2(metric_);
    bb = region_.bbox();
  }
  for (const auto& e : events_) {
    geo::validate(e.location, metric_);
    if (!period_.contains(e.date))
      throw DataError("event " + std::to_string(e.id) + " dated " + format_date(e.date) + " is outside the study period");
    if (!region_.empty() && !bb.contains(e.location))
      throw DataError("event " + std::to_string(e.id) + " lies outside the study region bounding box");
    if (e.fatalities && *e.fatalities < 0) throw DataError("event " + std::to_string(e.id) + " has negative fatalities");
    if (e.economic_loss && !(*e.economic_loss >= 0))
      throw DataError("event " + std::to_string(e.id) + " has a negative economic loss");
  }
  std::stable_sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) {
    return a.date < b.date || (a.date == b.date && a.id < b.id);
  });
}

std::vector<geo::GeoPoint> EventCatalog::locations() const {
  std::vector<geo::GeoPoint> out;
  out.reserve(events_.size());
  for (const auto& e : events_) out.push_back(e.location);
  return out;
}

geo::MultiPolygon default_region() { return geo::MultiPolygon{{geo::box_polygon(73.0, 18.0, 135.5, 54.0)}}; }

CompletenessResult filter_complete_dates(std::vector<RawRecord> rows, std::size_t date_column) {
  CompletenessResult result;
  result.report.total = rows.size();
  for (auto& r : rows) {
    std::string_view text = date_column < r.fields.size() ? std::string_view(r.fields[date_column]) : std::string_view();
    switch (classify_date(text)) {
      case DateQuality::complete:
        result.kept.push_back(std::move(r));
        break;
      case DateQuality::partial:
        result.dropped.push_back({r.row, "date", "incomplete date (year-month-day required)"});
        break;
      case DateQuality::invalid:
        result.dropped.push_back({r.row, "date", "unparseable date"});
        break;
    }
  }
  result.report.retained = result.kept.size();
  result.report.retained_fraction =
      rows.empty() ? 0.0 : static_cast<double>(result.kept.size()) / static_cast<double>(rows.size());
  result.report.empty = result.kept.empty();
  return result;
}

LoadResult load_catalog(std::istream& in, const LoadOptions& options) {
  const auto& schema = options.schema;
  io::CsvTable table = io::read_csv(in);
  auto col = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
    auto c = table.column(name);
    if (!c && required) throw DataError("catalog is missing required column '" + name + "'");
    return c;
  };
  std::size_t c_id = *col(schema.id, true), c_lon = *col(schema.lon, true), c_lat = *col(schema.lat, true),
              c_date = *col(schema.date, true);
  auto c_fat = col(schema.fatalities, false);
  auto c_loss = col(schema.loss, false);

  std::vector<RawRecord> raw;
  raw.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) raw.push_back({table.line_numbers[i], std::move(table.rows[i])});

  LoadReport report;
  report.rows_read = raw.size();
  auto filtered = filter_complete_dates(std::move(raw), c_date);
  std::size_t malformed = 0;
  for (auto& d : filtered.dropped) {
    if (d.reason.rfind("incomplete", 0) == 0)
      ++report.incomplete_dates;
    else
      ++malformed;
    report.errors.push_back(d);
  }
  report.completeness_fraction = filtered.report.retained_fraction;

  geo::BoundingBox bb{};
  if (!options.region.empty()) bb = options.region.bbox();
  std::vector<Event> events;
  for (auto& r : filtered.kept) {
    auto field = [&](std::size_t c) -> std::string_view {
      return c < r.fields.size() ? std::string_view(r.fields[c]) : std::string_view();
    };
    bool ok = true;
    auto fail = [&](const char* f, std::string reason) {
      report.errors.push_back({r.row, f, std::move(reason)});
      ok = false;
    };
    Event e;
    auto id = io::parse_int(field(c_id));
    if (!id) fail("id", "unparseable id");
    auto lon = io::parse_double(field(c_lon));
    auto lat = io::parse_double(field(c_lat));
    if (!lon) fail("lon", "unparseable longitude");
    if (!lat) fail("lat", "unparseable latitude");
    if (lon && lat) {
      e.location = {*lon, *lat};
      if (!geo::is_valid(e.location, options.metric))
        fail("lon", "coordinates out of range");
      else if (!options.region.empty() && (!bb.contains(e.location) || !options.region.contains(e.location)))
        fail("lon", "location outside study region");
    }
    e.date = *parse_iso_date(field(c_date));
    if (options.period && !options.period->contains(e.date)) fail("date", "date outside study period");
    if (c_fat && !io::trim(field(*c_fat)).empty()) {
      auto f = io::parse_int(field(*c_fat));
      if (!f || *f < 0)
        fail("deaths", "fatalities must be a non-negative integer");
      else
        e.fatalities = *f;
    }
    if (c_loss && !io::trim(field(*c_loss)).empty()) {
      auto l = io::parse_double(field(*c_loss));
      if (!l || !(*l >= 0) || !std::isfinite(*l))
        fail("loss", "economic loss must be a non-negative number");
      else
        e.economic_loss = *l;
    }
    if (!ok) {
      ++malformed;
      continue;
    }
    if (id) e.id = *id;
    events.push_back(e);
  }
  std::stable_sort(report.errors.begin(), report.errors.end(),
                   [](const RowError& a, const RowError& b) { return a.row < b.row; });
  report.rejected = malformed;
  report.retained = events.size();
  report.empty_catalog = events.empty();
  double considered = static_cast<double>(report.rows_read - report.incomplete_dates);
  if (considered > 0 && static_cast<double>(malformed) / considered > options.max_reject_fraction) {
    std::ostringstream msg;
    msg << malformed << " of " << static_cast<std::size_t>(considered)
        << " dated rows are malformed, above the reject limit of " << options.max_reject_fraction;
    throw CatalogRejected(msg.str(), std::move(report));
  }

  StudyPeriod period;
  if (options.period) {
    period = *options.period;
  } else if (!events.empty()) {
    auto [lo, hi] = std::minmax_element(events.begin(), events.end(),
                                        [](const Event& a, const Event& b) { return a.date < b.date; });
    period = year_period(year_of(lo->date), year_of(hi->date));
  } else {
    period = year_period(1970, 1970);
  }
  return {EventCatalog(std::move(events), options.region, period, options.metric), std::move(report)};
}

LoadResult load_catalog(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open catalog " + path.string());
  return load_catalog(in, options);
}

std::string row_errors_csv(const std::vector<RowError>& errors) {
  std::string out = "row,field,reason\n";
  for (const auto& e : errors)
    out += std::to_string(e.row) + "," + io::csv_field(e.field) + "," + io::csv_field(e.reason) + "\n";
  return out;
}

ImpactScale::ImpactScale(std::vector<Level> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw ConfigError("impact scale needs at least one class");
  if (levels_.front().min_fatalities != 0 || levels_.front().min_loss != 0)
    throw ConfigError("lowest impact class must start at 0 fatalities and 0 loss");
  for (std::size_t i = 1; i < levels_.size(); ++i)
    if (levels_[i].min_fatalities <= levels_[i - 1].min_fatalities || !(levels_[i].min_loss > levels_[i - 1].min_loss))
      throw ConfigError("impact class thresholds must be strictly increasing");
}

ImpactScale ImpactScale::default_scale() {
  return ImpactScale({{"minor", 0, 0.0}, {"moderate", 1, 1e6}, {"severe", 3, 1e7}, {"catastrophic", 10, 1e8}});
}

ImpactScale ImpactScale::parse(std::string_view spec) {
  std::vector<Level> levels;
  for (const auto& item : io::split(spec, ';')) {
    if (item.empty()) continue;
    auto parts = io::split(item, ':');
    if (parts.size() != 3) throw ConfigError("impact class '" + item + "' is not label:min_fatalities:min_loss");
    auto f = io::parse_int(parts[1]);
    auto l = io::parse_double(parts[2]);
    if (!f || !l) throw ConfigError("impact class '" + item + "' has non-numeric thresholds");
    levels.push_back({parts[0], *f, *l});
  }
  return ImpactScale(std::move(levels));
}

int ImpactScale::fatality_level(std::int64_t fatalities) const {
  int level = 1;
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (fatalities >= levels_[i].min_fatalities) level = static_cast<int>(i) + 1;
  return level;
}

int ImpactScale::loss_level(double loss) const {
  int level = 1;
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (loss >= levels_[i].min_loss) level = static_cast<int>(i) + 1;
  return level;
}

ImpactScale::Result ImpactScale::classify(const Event& e) const {
  int level = 1;
  if (e.fatalities) level = std::max(level, fatality_level(*e.fatalities));
  if (e.economic_loss) level = std::max(level, loss_level(*e.economic_loss));
  bool flagged = !e.fatalities && !e.economic_loss;
  return {level, levels_[static_cast<std::size_t>(level - 1)].label, flagged};
}

std::string ImpactScale::to_string() const {
  std::string out;
  for (const auto& l : levels_) {
    if (!out.empty()) out += ';';
    out += l.label + ":" + std::to_string(l.min_fatalities) + ":" + io::format_double(l.min_loss);
  }
  return out;
}

std::string export_catalog_csv(const EventCatalog& catalog, const ImpactScale& scale, const ColumnSchema& schema) {
  std::string out;
  out += io::csv_field(schema.id) + "," + io::csv_field(schema.lon) + "," + io::csv_field(schema.lat) + "," +
         io::csv_field(schema.date) + "," + io::csv_field(schema.fatalities) + "," + io::csv_field(schema.loss) +
         ",impact_class\n";
  for (const auto& e : catalog.events()) {
    out += std::to_string(e.id) + "," + io::format_double(e.location.lon) + "," + io::format_double(e.location.lat) +
           "," + format_date(e.date) + ",";
    if (e.fatalities) out += std::to_string(*e.fatalities);
    out += ",";
    if (e.economic_loss) out += io::format_double(*e.economic_loss);
    out += "," + io::csv_field(scale.classify(e).label) + "\n";
  }
  return out;
}

EventCatalog subset(const EventCatalog& catalog, const SubsetFilter& filter) {
  StudyPeriod period = catalog.period();
  if (filter.period) {
    period.start = std::max(period.start, filter.period->start);
    period.end = std::min(period.end, filter.period->end);
    if (period.end < period.start) throw ConfigError("subset period does not intersect the study period");
  }
  const geo::MultiPolygon& region = filter.region ? *filter.region : catalog.region();
  std::vector<Event> kept;
  for (const auto& e : catalog.events()) {
    if (!period.contains(e.date)) continue;
    if (filter.region && !filter.region->contains(e.location)) continue;
    kept.push_back(e);
  }
  return EventCatalog(std::move(kept), region, period, catalog.metric());
}

std::pair<EventCatalog, EventCatalog> split_by_meridian(const EventCatalog& catalog, double meridian) {
  std::vector<Event> west, east;
  for (const auto& e : catalog.events()) (e.location.lon < meridian ? west : east).push_back(e);
  auto west_region = geo::clip_by_meridian(catalog.region(), meridian, false);
  auto east_region = geo::clip_by_meridian(catalog.region(), meridian, true);
  return {EventCatalog(std::move(west), std::move(west_region), catalog.period(), catalog.metric()),
          EventCatalog(std::move(east), std::move(east_region), catalog.period(), catalog.metric())};
}

}  // namespace stscan
