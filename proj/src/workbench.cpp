#include "stscan/workbench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "stscan/error.hpp"
#include "stscan/io.hpp"

namespace stscan::workbench {

int tmax_units(int years, int tagg_months) {
  if (years < 1 || tagg_months < 1) throw ConfigError("T_max years and T_agg months must be positive");
  if ((years * 12) % tagg_months != 0)
    throw ConfigError("T_max of " + std::to_string(years) + " years is not a whole number of " +
                      std::to_string(tagg_months) + "-month units");
  return years * 12 / tagg_months;
}

std::string SweepResult::summary_csv() const {
  std::ostringstream out;
  out << "rmax_km,tmax_years,tmax_units,tagg_months,n_clusters,n_significant,status\n";
  for (const auto& e : entries) {
    out << io::format_double(e.rmax_km) << ',' << e.tmax_years << ',' << e.tmax_units << ',' << e.tagg_months << ',';
    if (e.result)
      out << e.result->clusters.size() << ',' << e.result->significant_count() << ",ok\n";
    else
      out << ",," << io::csv_field("error: " + e.error) << "\n";
  }
  return out.str();
}

SweepResult sweep_scan(const EventCatalog& catalog, const SweepSpec& sweep, const scan::ScanConfig& base) {
  if (sweep.rmax_km.empty() || sweep.tmax_years.empty() || sweep.tagg_months.empty())
    throw ConfigError("sweep lists must not be empty");
  SweepResult out;
  // combinations run one after another; each scan is internally parallel
  for (int tagg : sweep.tagg_months)
    for (double rmax : sweep.rmax_km)
      for (int years : sweep.tmax_years) {
        SweepEntry e;
        e.rmax_km = rmax;
        e.tmax_years = years;
        e.tagg_months = tagg;
        try {
          e.tmax_units = tmax_units(years, tagg);
          scan::ScanConfig cfg = base;
          cfg.rmax_km = rmax;
          cfg.tmax_units = e.tmax_units;
          cfg.tagg_months = tagg;
          e.result = scan::run_stpss(catalog, cfg);
        } catch (const Error& err) {
          e.error = err.what();
        }
        out.entries.push_back(std::move(e));
      }
  return out;
}

scan::ScanConfig decade_config() {
  scan::ScanConfig c;
  c.rmax_km = 200;
  c.tmax_units = 2;
  c.tagg_months = 12;
  return c;
}

std::vector<StudyPeriod> decade_periods(const EventCatalog& catalog, const DecadeSpec& spec) {
  if (spec.length_years < 1) throw ConfigError("decade length must be positive");
  const auto& p = catalog.period();
  int last_full = year_of(p.end);
  if (!(p.end.month() == std::chrono::December && p.end.day() == std::chrono::day{31})) --last_full;
  std::vector<StudyPeriod> out;
  for (int y = spec.start_year; y + spec.length_years - 1 <= last_full; y += spec.length_years)
    out.push_back(year_period(y, y + spec.length_years - 1));
  if (out.empty())
    throw DataError("catalog period " + format_date(p.start) + ".." + format_date(p.end) +
                    " does not span one whole decade from " + std::to_string(spec.start_year));
  return out;
}

std::vector<DecadeRun> decade_scan(const EventCatalog& catalog, const DecadeSpec& spec, const scan::ScanConfig& config) {
  auto periods = decade_periods(catalog, spec);
  std::vector<DecadeRun> runs;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    DecadeRun run;
    run.index = static_cast<int>(k) + 1;
    run.period = periods[k];
    try {
      EventCatalog sub = subset(catalog, SubsetFilter{periods[k], std::nullopt});
      run.period = sub.period();
      run.n_events = sub.size();
      run.empty = sub.empty();
      if (!run.empty) run.result = scan::run_stpss(sub, config);
    } catch (const Error& err) {
      run.error = err.what();
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

std::vector<DecadeCluster> significant_clusters(std::span<const DecadeRun> runs, double alpha) {
  std::vector<DecadeCluster> out;
  for (const auto& r : runs) {
    if (!r.result) continue;
    for (const auto& c : r.result->clusters)
      if (c.p_value <= alpha) out.push_back({r.index, c});
  }
  return out;
}

double duration_days(const scan::Cluster& c) {
  return static_cast<double>(day_number(c.end_date) - day_number(c.start_date) + 1);
}

std::string decade_clusters_csv(std::span<const DecadeCluster> clusters) {
  std::ostringstream out;
  out << "decade,rank,center_lon,center_lat,centroid_lon,centroid_lat,radius_km,start_date,end_date,duration_days,"
         "observed,expected,glr,log_glr,p_value\n";
  for (const auto& d : clusters) {
    const auto& c = d.cluster;
    const auto& y = c.cylinder;
    out << d.decade << ',' << c.rank << ',' << io::format_double(y.center.lon) << ',' << io::format_double(y.center.lat)
        << ',' << io::format_double(c.centroid.lon) << ',' << io::format_double(c.centroid.lat) << ','
        << io::format_double(y.radius_km) << ',' << format_date(c.start_date) << ',' << format_date(c.end_date) << ','
        << io::format_double(duration_days(c)) << ',' << y.observed << ',' << io::format_double(y.expected) << ','
        << scan::format_glr(y.log_glr) << ',' << io::format_double(y.log_glr) << ',' << io::format_double(c.p_value)
        << "\n";
  }
  return out.str();
}

std::vector<DecadeCluster> read_decade_clusters_csv(const std::filesystem::path& path) {
  auto t = io::read_csv_file(path);
  std::vector<std::size_t> col;
  for (const char* name : {"decade", "rank", "center_lon", "center_lat", "centroid_lon", "centroid_lat", "radius_km",
                           "start_date", "end_date", "observed", "expected", "log_glr", "p_value"}) {
    auto c = t.column(name);
    if (!c) throw DataError(path.string() + ": missing column " + name);
    col.push_back(*c);
  }
  std::vector<DecadeCluster> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    auto where = [&] { return path.string() + ": line " + std::to_string(t.line_numbers[r]); };
    auto text = [&](std::size_t k) -> const std::string& {
      if (col[k] >= row.size()) throw DataError(where() + ": missing field");
      return row[col[k]];
    };
    auto num = [&](std::size_t k) {
      auto v = io::parse_double(text(k));
      if (!v) throw DataError(where() + ": malformed number '" + text(k) + "'");
      return *v;
    };
    auto integer = [&](std::size_t k) {
      auto v = io::parse_int(text(k));
      if (!v) throw DataError(where() + ": malformed integer '" + text(k) + "'");
      return *v;
    };
    auto date = [&](std::size_t k) {
      auto v = parse_iso_date(text(k));
      if (!v) throw DataError(where() + ": malformed date '" + text(k) + "'");
      return *v;
    };
    DecadeCluster d;
    d.decade = static_cast<int>(integer(0));
    auto& c = d.cluster;
    c.rank = static_cast<int>(integer(1));
    c.cylinder.center = {num(2), num(3)};
    c.centroid = {num(4), num(5)};
    c.cylinder.radius_km = num(6);
    c.start_date = date(7);
    c.end_date = date(8);
    c.cylinder.observed = integer(9);
    c.cylinder.expected = num(10);
    c.cylinder.log_glr = num(11);
    c.glr = std::exp(c.cylinder.log_glr);
    c.p_value = num(12);
    out.push_back(std::move(d));
  }
  return out;
}

std::string decade_summary_csv(std::span<const DecadeRun> runs, double alpha) {
  std::ostringstream out;
  out << "decade,start,end,n_events,status,n_clusters,n_significant\n";
  for (const auto& r : runs) {
    out << r.index << ',' << format_date(r.period.start) << ',' << format_date(r.period.end) << ',' << r.n_events << ',';
    if (r.result)
      out << "ok," << r.result->clusters.size() << ',' << r.result->significant_count(alpha) << "\n";
    else if (r.empty)
      out << "empty,0,0\n";
    else
      out << io::csv_field("error: " + r.error) << ",,\n";
  }
  return out.str();
}

namespace {

double median_sorted(std::span<const double> v) {
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::optional<DurationStats> duration_stats(std::span<const double> durations) {
  if (durations.empty()) return std::nullopt;
  std::vector<double> v(durations.begin(), durations.end());
  std::sort(v.begin(), v.end());
  DurationStats s;
  s.n = v.size();
  s.min = v.front();
  s.max = v.back();
  s.median = median_sorted(v);
  std::size_t half = v.size() / 2;
  if (half == 0) {
    s.q1 = s.q3 = s.median;
  } else {
    s.q1 = median_sorted(std::span<const double>(v).first(half));
    s.q3 = median_sorted(std::span<const double>(v).last(half));
  }
  s.iqr = s.q3 - s.q1;
  return s;
}

std::string duration_stats_csv(std::span<const DecadeCluster> clusters) {
  std::map<int, std::vector<double>> by_decade;
  for (const auto& d : clusters) by_decade[d.decade].push_back(duration_days(d.cluster));
  std::ostringstream out;
  out << "decade,n,min,q1,median,q3,max,iqr\n";
  for (const auto& [decade, values] : by_decade) {
    auto s = duration_stats(values);
    if (!s) continue;
    out << decade << ',' << s->n << ',' << io::format_double(s->min) << ',' << io::format_double(s->q1) << ','
        << io::format_double(s->median) << ',' << io::format_double(s->q3) << ',' << io::format_double(s->max) << ','
        << io::format_double(s->iqr) << "\n";
  }
  return out.str();
}

std::string gap_bin(double years) {
  if (years >= 5 && years < 10) return "5-10";
  if (years >= 10 && years < 20) return "10-20";
  if (years >= 20 && years <= 50) return "20-50";
  return "other";
}

RecurrenceReport recurrence_by_catchment(std::span<const DecadeCluster> clusters,
                                         std::span<const geo::Feature> catchments, const RecurrenceOptions& options) {
  if (options.length_years < 1) throw ConfigError("decade length must be positive");
  for (std::size_t i = 0; i < catchments.size(); ++i) {
    if (catchments[i].geometry.empty()) throw DataError("catchment '" + catchments[i].id + "' has no polygon");
    for (std::size_t j = i + 1; j < catchments.size(); ++j)
      if (catchments[i].geometry.bbox().intersects(catchments[j].geometry.bbox()) &&
          geo::multipolygons_overlap(catchments[i].geometry, catchments[j].geometry))
        throw DataError("catchments '" + catchments[i].id + "' and '" + catchments[j].id + "' overlap");
  }

  std::vector<std::vector<int>> decades(catchments.size());
  RecurrenceReport report;
  report.total = clusters.size();
  for (const auto& d : clusters) {
    geo::GeoPoint p = options.event_centroid ? d.cluster.centroid : d.cluster.cylinder.center;
    bool placed = false;
    for (std::size_t k = 0; k < catchments.size() && !placed; ++k)
      if (catchments[k].geometry.contains(p)) {
        decades[k].push_back(d.decade);
        placed = true;
      }
    if (!placed) {
      ++report.unassigned;
      report.unassigned_decades.push_back(d.decade);
    }
  }
  std::sort(report.unassigned_decades.begin(), report.unassigned_decades.end());

  auto midpoint = [&](int k) {
    return options.start_year + (k - 1) * options.length_years + 0.5 * options.length_years;
  };
  for (std::size_t k = 0; k < catchments.size(); ++k) {
    if (decades[k].empty()) continue;
    RecurrenceRecord rec;
    rec.catchment_id = catchments[k].id;
    rec.decades = decades[k];
    std::sort(rec.decades.begin(), rec.decades.end());
    rec.count = rec.decades.size();
    std::vector<int> distinct = rec.decades;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t i = 1; i < distinct.size(); ++i) {
      double gap = midpoint(distinct[i]) - midpoint(distinct[i - 1]);
      rec.gaps_years.push_back(gap);
      rec.gap_bins.push_back(gap_bin(gap));
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

std::string recurrence_csv(const RecurrenceReport& report) {
  auto join = [](const auto& items) {
    std::ostringstream s;
    for (std::size_t i = 0; i < items.size(); ++i) s << (i ? ";" : "") << items[i];
    return s.str();
  };
  std::ostringstream out;
  out << "catchment_id,count,decades,gap_bins\n";
  for (const auto& r : report.records)
    out << io::csv_field(r.catchment_id) << ',' << r.count << ',' << join(r.decades) << ',' << join(r.gap_bins) << "\n";
  if (report.unassigned > 0) out << "unassigned," << report.unassigned << ',' << join(report.unassigned_decades) << ",\n";
  return out.str();
}

}  // namespace stscan::workbench
