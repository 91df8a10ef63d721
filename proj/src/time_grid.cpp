#include "stscan/time_grid.hpp"

#include <cstdio>

namespace stscan {

namespace {

std::int64_t month_index(Date d) {
  return static_cast<std::int64_t>(static_cast<int>(d.year())) * 12 + static_cast<unsigned>(d.month()) - 1;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Date first_day_of_month(std::int64_t m) {
  using namespace std::chrono;
  std::int64_t y = floor_div(m, 12);
  return Date{year{static_cast<int>(y)}, month{static_cast<unsigned>(m - y * 12 + 1)}, day{1}};
}

}  // namespace

TimeGrid::TimeGrid(StudyPeriod period, int t_agg_months) : period_(period), t_agg_(t_agg_months) {
  if (t_agg_ <= 0 || (12 % t_agg_ != 0 && t_agg_ % 12 != 0))
    throw ConfigError("T_agg must divide 12 or be a multiple of 12 months (got " + std::to_string(t_agg_) + ")");
  if (period_.end < period_.start) throw ConfigError("study period ends before it starts");
  std::int64_t months = month_index(period_.end) - month_index(period_.start) + 1;
  if (t_agg_ > months)
    throw ConfigError("T_agg of " + std::to_string(t_agg_) + " months exceeds the " + std::to_string(months) +
                      "-month study period");
  first_unit_ = floor_div(month_index(period_.start), t_agg_);
  n_intervals_ = static_cast<int>(floor_div(month_index(period_.end), t_agg_) - first_unit_ + 1);
}

int TimeGrid::interval_of(Date d) const {
  if (!period_.contains(d)) throw DataError("date " + format_date(d) + " is outside the study period");
  return static_cast<int>(floor_div(month_index(d), t_agg_) - first_unit_);
}

Date TimeGrid::interval_start(int d) const {
  Date s = first_day_of_month((first_unit_ + d) * t_agg_);
  return s < period_.start ? period_.start : s;
}

Date TimeGrid::interval_end(int d) const {
  Date next = first_day_of_month((first_unit_ + d + 1) * t_agg_);
  Date e = from_day_number(day_number(next) - 1);
  return e > period_.end ? period_.end : e;
}

std::string TimeGrid::label(int d) const {
  std::int64_t m0 = (first_unit_ + d) * t_agg_;
  Date s = first_day_of_month(m0);
  int y = static_cast<int>(s.year());
  unsigned mon = static_cast<unsigned>(s.month());
  char buf[48];
  if (t_agg_ == 12) {
    std::snprintf(buf, sizeof buf, "%04d", y);
  } else if (t_agg_ == 3) {
    std::snprintf(buf, sizeof buf, "%04d-Q%u", y, (mon - 1) / 3 + 1);
  } else if (t_agg_ == 6) {
    std::snprintf(buf, sizeof buf, "%04d-H%u", y, (mon - 1) / 6 + 1);
  } else if (t_agg_ == 1) {
    std::snprintf(buf, sizeof buf, "%04d-%02u", y, mon);
  } else {
    Date last = first_day_of_month(m0 + t_agg_ - 1);
    std::snprintf(buf, sizeof buf, "%04d-%02u..%04d-%02u", y, mon, static_cast<int>(last.year()),
                  static_cast<unsigned>(last.month()));
  }
  return buf;
}

TimeAssignment assign_time_grid(const EventCatalog& catalog, int t_agg_months) {
  TimeAssignment out{TimeGrid(catalog.period(), t_agg_months), {}, {}};
  out.counts.assign(static_cast<std::size_t>(out.grid.size()), 0);
  out.interval.reserve(catalog.size());
  for (const auto& e : catalog.events()) {
    int d = out.grid.interval_of(e.date);
    out.interval.push_back(d);
    ++out.counts[static_cast<std::size_t>(d)];
  }
  return out;
}

}  // namespace stscan
