#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "stscan/catalog.hpp"
#include "stscan/error.hpp"
#include "stscan/kriging.hpp"
#include "stscan/ripley.hpp"
#include "stscan/scan.hpp"
#include "stscan/simulate.hpp"

namespace py = pybind11;
using namespace stscan;

namespace {

geo::MultiPolygon bbox_region(const std::optional<std::vector<double>>& bbox, bool planar) {
  if (!bbox) {
    if (planar) return geo::MultiPolygon{{geo::box_polygon(0, 0, 1000, 1000)}};
    return default_region();
  }
  if (bbox->size() != 4) throw ConfigError("bbox needs four numbers");
  return geo::MultiPolygon{{geo::box_polygon((*bbox)[0], (*bbox)[1], (*bbox)[2], (*bbox)[3])}};
}

geo::Metric metric_of(bool planar) { return planar ? geo::Metric::planar : geo::Metric::great_circle; }

Date date_arg(const std::string& s) {
  auto d = parse_iso_date(s);
  if (!d) throw ConfigError("expected a YYYY-MM-DD date, got '" + s + "'");
  return *d;
}

std::vector<kriging::Sample> samples_of(const std::vector<double>& lon, const std::vector<double>& lat,
                                        const std::vector<double>& value) {
  if (lon.size() != lat.size() || lon.size() != value.size())
    throw ConfigError("lon, lat and value must have the same length");
  std::vector<kriging::Sample> out;
  for (std::size_t i = 0; i < lon.size(); ++i) out.push_back({{lon[i], lat[i]}, value[i]});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "stscan core: permutation scan, K-function and kriging";
  m.attr("__version__") = STSCAN_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "haversine_km", [](double lon1, double lat1, double lon2, double lat2) {
        return geo::haversine_km({lon1, lat1}, {lon2, lat2});
      },
      py::arg("lon1"), py::arg("lat1"), py::arg("lon2"), py::arg("lat2"));

  py::class_<EventCatalog>(m, "Catalog")
      .def(py::init([](std::vector<std::int64_t> ids, std::vector<double> lon, std::vector<double> lat,
                       std::vector<std::string> dates, std::optional<std::vector<double>> bbox, bool planar,
                       std::string period_start, std::string period_end) {
             if (ids.size() != lon.size() || ids.size() != lat.size() || ids.size() != dates.size())
               throw ConfigError("ids, lon, lat and dates must have the same length");
             std::vector<Event> events;
             for (std::size_t i = 0; i < ids.size(); ++i) {
               Event e;
               e.id = ids[i];
               e.location = {lon[i], lat[i]};
               e.date = date_arg(dates[i]);
               events.push_back(e);
             }
             StudyPeriod period{date_arg(period_start), date_arg(period_end)};
             return EventCatalog(std::move(events), bbox_region(bbox, planar), period, metric_of(planar));
           }),
           py::arg("ids"), py::arg("lon"), py::arg("lat"), py::arg("dates"), py::kw_only(),
           py::arg("bbox") = py::none(), py::arg("planar") = false, py::arg("period_start"), py::arg("period_end"))
      .def("__len__", &EventCatalog::size)
      .def_property_readonly("ids", [](const EventCatalog& c) {
        std::vector<std::int64_t> v;
        for (const auto& e : c.events()) v.push_back(e.id);
        return v;
      })
      .def_property_readonly("lon", [](const EventCatalog& c) {
        std::vector<double> v;
        for (const auto& e : c.events()) v.push_back(e.location.lon);
        return v;
      })
      .def_property_readonly("lat", [](const EventCatalog& c) {
        std::vector<double> v;
        for (const auto& e : c.events()) v.push_back(e.location.lat);
        return v;
      })
      .def_property_readonly("dates", [](const EventCatalog& c) {
        std::vector<std::string> v;
        for (const auto& e : c.events()) v.push_back(format_date(e.date));
        return v;
      })
      .def_property_readonly("area_km2", &EventCatalog::area_km2)
      .def_property_readonly("period", [](const EventCatalog& c) {
        return py::make_tuple(format_date(c.period().start), format_date(c.period().end));
      })
      .def("to_csv", [](const EventCatalog& c) { return export_catalog_csv(c, ImpactScale::default_scale()); });

  m.def(
      "load_catalog",
      [](const std::string& path, std::optional<std::vector<double>> bbox, bool planar) {
        LoadOptions opt;
        opt.region = bbox_region(bbox, planar);
        opt.metric = metric_of(planar);
        return load_catalog(std::filesystem::path(path), opt).catalog;
      },
      py::arg("path"), py::kw_only(), py::arg("bbox") = py::none(), py::arg("planar") = false);

  m.def(
      "simulate",
      [](std::string process, std::size_t n, std::uint64_t seed, std::optional<std::vector<double>> bbox, bool planar,
         int first_year, int last_year, double cluster_fraction, double cluster_radius_km, int cluster_months,
         int cluster_count) {
        sim::SimSpec spec;
        spec.process = sim::process_from_string(process);
        spec.n = n;
        spec.seed = seed;
        spec.metric = metric_of(planar);
        spec.region = bbox_region(bbox, planar);
        spec.period = year_period(first_year, last_year);
        spec.cluster_fraction = cluster_fraction;
        spec.cluster_radius_km = cluster_radius_km;
        spec.cluster_months = cluster_months;
        spec.cluster_count = cluster_count;
        auto r = sim::simulate_catalog(spec);
        return py::make_tuple(std::move(r.catalog), r.source);
      },
      py::arg("process") = "csr", py::arg("n") = 1000, py::arg("seed") = 1, py::kw_only(),
      py::arg("bbox") = py::none(), py::arg("planar") = false, py::arg("first_year") = 1990,
      py::arg("last_year") = 2019, py::arg("cluster_fraction") = 0.3, py::arg("cluster_radius_km") = 25.0,
      py::arg("cluster_months") = 12, py::arg("cluster_count") = 1,
      "Synthetic catalog; returns (catalog, source) where source[i] is the injected cluster of event i or -1.");

  m.def(
      "scan",
      [](const EventCatalog& catalog, double rmax_km, int tmax_units, int tagg_months, int replicates,
         std::uint64_t seed, double alpha, int min_cases, std::string overlap_policy, unsigned workers) {
        scan::ScanConfig cfg;
        cfg.rmax_km = rmax_km;
        cfg.tmax_units = tmax_units;
        cfg.tagg_months = tagg_months;
        cfg.replicates = replicates;
        cfg.seed = seed;
        cfg.alpha = alpha;
        cfg.min_cases = min_cases;
        cfg.overlap_policy = scan::overlap_policy_from_string(overlap_policy);
        cfg.workers = workers;
        scan::ScanResult result;
        {
          py::gil_scoped_release release;
          result = scan::run_stpss(catalog, cfg);
        }
        py::list clusters;
        for (const auto& c : result.clusters) {
          py::dict d;
          d["rank"] = c.rank;
          d["center_id"] = c.cylinder.center_id;
          d["center"] = py::make_tuple(c.cylinder.center.lon, c.cylinder.center.lat);
          d["radius_km"] = c.cylinder.radius_km;
          d["start_date"] = format_date(c.start_date);
          d["end_date"] = format_date(c.end_date);
          d["observed"] = c.cylinder.observed;
          d["expected"] = c.cylinder.expected;
          d["log_glr"] = c.cylinder.log_glr;
          d["p_value"] = c.p_value;
          d["members"] = c.cylinder.members;
          clusters.append(d);
        }
        py::dict out;
        out["clusters"] = clusters;
        out["csv"] = scan::clusters_csv(result);
        out["replicate_max_log_glr"] = result.replicate_max_log_glr;
        return out;
      },
      py::arg("catalog"), py::kw_only(), py::arg("rmax_km") = 200.0, py::arg("tmax_units") = 3,
      py::arg("tagg_months") = 12, py::arg("replicates") = 999, py::arg("seed") = 1, py::arg("alpha") = 0.005,
      py::arg("min_cases") = 2, py::arg("overlap_policy") = "no-geographic-overlap", py::arg("workers") = 0);

  m.def(
      "k_function",
      [](const EventCatalog& catalog, std::vector<double> r_km, std::vector<double> t_days, unsigned workers) {
        ripley::LagGrid lags(std::move(r_km), std::move(t_days));
        ripley::KEstimate ke;
        {
          py::gil_scoped_release release;
          ke = ripley::estimate_k(catalog, lags, workers);
        }
        auto rows = [](const ripley::Surface& s) {
          std::vector<std::vector<double>> out(s.rows, std::vector<double>(s.cols));
          for (std::size_t i = 0; i < s.rows; ++i)
            for (std::size_t j = 0; j < s.cols; ++j) out[i][j] = s(i, j);
          return out;
        };
        py::dict d;
        d["ks"] = ke.ks;
        d["kt"] = ke.kt;
        d["kst"] = rows(ke.kst);
        d["d"] = rows(ke.d);
        return d;
      },
      py::arg("catalog"), py::arg("r_km"), py::arg("t_days"), py::kw_only(), py::arg("workers") = 0);

  m.def(
      "empirical_variogram",
      [](std::vector<double> lon, std::vector<double> lat, std::vector<double> value, double bin_width_km,
         std::size_t n_bins, bool planar) {
        auto samples = kriging::average_duplicates(samples_of(lon, lat, value));
        auto edges = kriging::uniform_bin_edges(bin_width_km, n_bins);
        auto pts = kriging::empirical_variogram(samples, edges, metric_of(planar));
        py::list out;
        for (const auto& p : pts) out.append(py::make_tuple(p.lag_km, p.gamma, p.pairs));
        return out;
      },
      py::arg("lon"), py::arg("lat"), py::arg("value"), py::arg("bin_width_km"), py::arg("n_bins"), py::kw_only(),
      py::arg("planar") = false, "List of (lag_km, gamma, pairs).");

  m.def(
      "fit_variogram",
      [](std::vector<std::tuple<double, double, std::size_t>> points) {
        std::vector<kriging::VariogramPoint> pts;
        for (const auto& [h, g, n] : points) pts.push_back({h, g, n});
        auto model = kriging::fit_variogram(pts);
        py::dict d;
        d["nugget"] = model.nugget;
        d["partial_sill"] = model.partial_sill;
        d["range_km"] = model.range_km;
        return d;
      },
      py::arg("points"), "Spherical model from (lag_km, gamma, pairs) points.");

  m.def(
      "krige",
      [](std::vector<double> lon, std::vector<double> lat, std::vector<double> value, double nugget,
         double partial_sill, double range_km, std::vector<std::pair<double, double>> targets, std::size_t neighbors,
         bool planar) {
        kriging::KrigeOptions ko;
        ko.neighbors = neighbors;
        ko.metric = metric_of(planar);
        kriging::OrdinaryKriger k(samples_of(lon, lat, value), {nugget, partial_sill, range_km}, ko);
        std::vector<double> pred, var;
        for (const auto& [x, y] : targets) {
          auto p = k.predict({x, y});
          pred.push_back(p.value);
          var.push_back(p.variance);
        }
        return py::make_tuple(pred, var);
      },
      py::arg("lon"), py::arg("lat"), py::arg("value"), py::kw_only(), py::arg("nugget"), py::arg("partial_sill"),
      py::arg("range_km"), py::arg("targets"), py::arg("neighbors") = 32, py::arg("planar") = false,
      "Ordinary kriging predictions and variances at the target (lon, lat) points.");
}
