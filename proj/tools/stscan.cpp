// stscan command-line interface. Every subcommand writes its outputs
// atomically plus a manifest that `stscan rerun` replays.

#include <CLI11.hpp>
#include <cmath>
#include <json.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stscan/catalog.hpp"
#include "stscan/error.hpp"
#include "stscan/geojson.hpp"
#include "stscan/io.hpp"
#include "stscan/kriging.hpp"
#include "stscan/manifest.hpp"
#include "stscan/ripley.hpp"
#include "stscan/scan.hpp"
#include "stscan/simulate.hpp"
#include "stscan/workbench.hpp"

namespace fs = std::filesystem;
using namespace stscan;

namespace {

// Outputs written so far; removed again if the command fails.
class OutputSet {
 public:
  void write(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    io::write_file_atomic(path, content);
    written_.push_back(path);
  }
  void rollback() {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    written_.clear();
  }
  std::vector<std::string> paths() const {
    std::vector<std::string> out;
    for (const auto& p : written_) out.push_back(p.string());
    return out;
  }

 private:
  std::vector<fs::path> written_;
};

// "key = value" lines (# comments) -> "--key value" tokens. They go before the
// command-line arguments, so explicit flags win.
std::vector<std::string> config_tokens(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = io::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = io::trim(line.substr(0, eq)), value = io::trim(line.substr(eq + 1));
    for (auto& ch : key)
      if (ch == '_') ch = '-';
    if (value == "true") {
      out.push_back("--" + key);
    } else if (value == "false") {
      continue;
    } else {
      out.push_back("--" + key);
      out.push_back(value);
    }
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& part : io::split(text, ',')) {
    auto v = io::parse_double(io::trim(part));
    if (!v) throw ConfigError(std::string("malformed number in ") + what + ": '" + part + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& part : io::split(text, ',')) {
    auto v = io::parse_int(io::trim(part));
    if (!v) throw ConfigError(std::string("malformed integer in ") + what + ": '" + part + "'");
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

Date parse_date_arg(const std::string& s, const char* what) {
  auto d = parse_iso_date(s);
  if (!d) throw ConfigError(std::string(what) + " must be YYYY-MM-DD, got '" + s + "'");
  return *d;
}

struct RegionArgs {
  std::string region_path;
  std::string bbox;
  bool planar = false;
  std::string period_start, period_end;

  void add(CLI::App* app) {
    app->add_option("--region", region_path, "study region GeoJSON");
    app->add_option("--bbox", bbox, "study region min_lon,min_lat,max_lon,max_lat");
    app->add_flag("--planar", planar, "coordinates are planar km, not lon/lat");
    app->add_option("--period-start", period_start, "study period start YYYY-MM-DD");
    app->add_option("--period-end", period_end, "study period end YYYY-MM-DD");
  }

  geo::Metric metric() const { return planar ? geo::Metric::planar : geo::Metric::great_circle; }

  geo::MultiPolygon region(std::vector<Manifest::Input>& inputs) const {
    if (!region_path.empty() && !bbox.empty()) throw ConfigError("give either --region or --bbox, not both");
    if (!region_path.empty()) {
      inputs.push_back(hash_input(region_path));
      return geo::read_region(region_path);
    }
    if (!bbox.empty()) {
      auto v = parse_doubles(bbox, "--bbox");
      if (v.size() != 4) throw ConfigError("--bbox needs four numbers");
      return geo::MultiPolygon{{geo::box_polygon(v[0], v[1], v[2], v[3])}};
    }
    if (planar) throw ConfigError("planar catalogs need --bbox or --region");
    return default_region();
  }

  std::optional<StudyPeriod> period() const {
    if (period_start.empty() != period_end.empty())
      throw ConfigError("give both --period-start and --period-end");
    if (period_start.empty()) return std::nullopt;
    return StudyPeriod{parse_date_arg(period_start, "--period-start"), parse_date_arg(period_end, "--period-end")};
  }
};

struct CatalogArgs {
  std::string input;
  RegionArgs where;
  double max_reject = 0.1;

  void add(CLI::App* app) {
    app->add_option("--input,-i", input, "event catalog CSV (id,lon,lat,date[,deaths,loss_rmb])")->required();
    app->add_option("--max-reject", max_reject, "maximum fraction of malformed rows");
    where.add(app);
  }

  EventCatalog load(std::vector<Manifest::Input>& inputs) const {
    LoadOptions opt;
    opt.region = where.region(inputs);
    opt.metric = where.metric();
    opt.period = where.period();
    opt.max_reject_fraction = max_reject;
    inputs.push_back(hash_input(input));
    auto result = load_catalog(fs::path(input), opt);
    const auto& r = result.report;
    std::cerr << "catalog: " << r.retained << " events retained of " << r.rows_read << " rows (" << r.incomplete_dates
              << " incomplete dates, " << r.rejected << " rejected)\n";
    return std::move(result.catalog);
  }
};

struct ScanArgs {
  scan::ScanConfig config;
  std::string overlap = "no-geographic-overlap";

  void add(CLI::App* app, const scan::ScanConfig& defaults) {
    config = defaults;
    app->add_option("--rmax-km", config.rmax_km, "maximum cylinder radius R_max (km)");
    app->add_option("--tmax-units", config.tmax_units, "maximum cylinder length T_max (T_agg units)");
    app->add_option("--tagg-months", config.tagg_months, "time aggregation T_agg (months)");
    app->add_option("--replicates", config.replicates, "Monte Carlo replicates");
    app->add_option("--seed", config.seed, "random seed");
    app->add_option("--alpha", config.alpha, "significance level");
    app->add_option("--min-cases", config.min_cases, "minimum cases in a cluster");
    app->add_option("--overlap-policy", overlap, "no-geographic-overlap | no-center-in-cluster | report-all");
    app->add_option("--workers", config.workers, "worker threads (0 = all cores); never changes results");
  }

  scan::ScanConfig resolved() const {
    auto c = config;
    c.overlap_policy = scan::overlap_policy_from_string(overlap);
    return c;
  }
};

// State shared by the subcommand handlers for one invocation.
struct Run {
  std::string command;
  std::vector<std::string> args;
  std::string manifest_path;
  std::vector<Manifest::Input> inputs;
  std::uint64_t seed = 0;
  OutputSet outputs;
  CLI::App* sub = nullptr;

  void finish(const fs::path& primary) {
    Manifest m;
    m.version = STSCAN_VERSION;
    m.command = command;
    m.args = args;
    std::istringstream cfg(sub->config_to_str(true, false));
    std::string line;
    while (std::getline(cfg, line)) {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string v = line.substr(eq + 1);
      if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
      m.config.emplace_back(line.substr(0, eq), v);
    }
    m.inputs = inputs;
    m.outputs = outputs.paths();
    m.seed = seed;
    fs::path where = manifest_path.empty() ? fs::path(primary.string() + ".manifest.json") : fs::path(manifest_path);
    outputs.write(where, m.to_json());
  }
};

int dispatch(const std::vector<std::string>& argv);

void print_error(const char* kind, const std::string& message) {
  nlohmann::json j = {{"error", kind}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

int dispatch(const std::vector<std::string>& argv_in) {
  // expand --config files at their position ahead of the remaining flags
  std::vector<std::string> argv;
  std::vector<Manifest::Input> config_inputs;
  {
    std::vector<std::string> expanded, rest;
    for (std::size_t i = 0; i < argv_in.size(); ++i) {
      if (argv_in[i] == "--config" && i + 1 < argv_in.size()) {
        auto tokens = config_tokens(argv_in[i + 1]);
        config_inputs.push_back(hash_input(argv_in[i + 1]));
        expanded.insert(expanded.end(), tokens.begin(), tokens.end());
        ++i;
      } else if (argv_in[i].rfind("--config=", 0) == 0) {
        std::string p = argv_in[i].substr(9);
        auto tokens = config_tokens(p);
        config_inputs.push_back(hash_input(p));
        expanded.insert(expanded.end(), tokens.begin(), tokens.end());
      } else {
        rest.push_back(argv_in[i]);
      }
    }
    // rest[0] is the subcommand
    if (!rest.empty()) {
      argv.push_back(rest[0]);
      argv.insert(argv.end(), expanded.begin(), expanded.end());
      argv.insert(argv.end(), rest.begin() + 1, rest.end());
    }
  }

  CLI::App app{"stscan: space-time clustering of dated, georeferenced event catalogs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", STSCAN_VERSION);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Run run;
  run.inputs = config_inputs;
  std::function<void()> handler;

  auto add_manifest = [&](CLI::App* s) {
    s->add_option("--manifest", run.manifest_path, "manifest path (default: <primary output>.manifest.json)");
    s->add_option("--config")->description("flat key = value file; command-line flags override it");
  };

  // ingest ------------------------------------------------------------------
  CatalogArgs ingest_cat;
  std::string ingest_out, ingest_errors, ingest_scale;
  bool ingest_stations = false;
  {
    auto* s = app.add_subcommand("ingest", "validate a catalog and export it with impact classes");
    ingest_cat.add(s);
    s->add_option("--out,-o", ingest_out, "output CSV")->required();
    s->add_option("--errors", ingest_errors, "row error report CSV");
    s->add_option("--impact-scale", ingest_scale, "label:min_fatalities:min_loss;...");
    s->add_flag("--stations", ingest_stations, "input is station observations lon,lat,value; average per station");
    add_manifest(s);
    s->callback([&, s] {
      run.sub = s;
      handler = [&] {
        if (ingest_stations) {
          run.inputs.push_back(hash_input(ingest_cat.input));
          auto samples = kriging::read_samples_csv(ingest_cat.input, ingest_cat.where.metric());
          std::ostringstream out;
          out << "lon,lat,value\n";
          for (const auto& x : samples)
            out << io::format_double(x.location.lon) << ',' << io::format_double(x.location.lat) << ','
                << io::format_double(x.value) << "\n";
          run.outputs.write(ingest_out, out.str());
          std::cerr << "stations: " << samples.size() << "\n";
        } else {
          LoadOptions opt;
          opt.region = ingest_cat.where.region(run.inputs);
          opt.metric = ingest_cat.where.metric();
          opt.period = ingest_cat.where.period();
          opt.max_reject_fraction = ingest_cat.max_reject;
          run.inputs.push_back(hash_input(ingest_cat.input));
          auto scale = ingest_scale.empty() ? ImpactScale::default_scale() : ImpactScale::parse(ingest_scale);
          LoadResult result;
          try {
            result = load_catalog(fs::path(ingest_cat.input), opt);
          } catch (const CatalogRejected& e) {
            if (!ingest_errors.empty()) io::write_file_atomic(ingest_errors, row_errors_csv(e.report().errors));
            throw;
          }
          run.outputs.write(ingest_out, export_catalog_csv(result.catalog, scale, opt.schema));
          if (!ingest_errors.empty()) run.outputs.write(ingest_errors, row_errors_csv(result.report.errors));
          const auto& r = result.report;
          std::cerr << "rows " << r.rows_read << ", retained " << r.retained << ", incomplete dates "
                    << r.incomplete_dates << ", rejected " << r.rejected << "\n";
        }
        run.finish(ingest_out);
      };
    });
  }

  // kfunc -------------------------------------------------------------------
  CatalogArgs k_cat;
  std::string k_out;
  double r_step = 100, r_max = 2000, t_step = 365.25, t_max = 365.25 * 30;
  int k_envelope = 0;
  std::uint64_t k_seed = 1;
  unsigned k_workers = 0;
  {
    auto* s = app.add_subcommand("kfunc", "space-time K-function and D(s,t) with optional permutation envelope");
    k_cat.add(s);
    s->add_option("--out,-o", k_out, "output CSV")->required();
    s->add_option("--r-step-km", r_step);
    s->add_option("--r-max-km", r_max);
    s->add_option("--t-step-days", t_step);
    s->add_option("--t-max-days", t_max);
    s->add_option("--envelope", k_envelope, "permutations for the D envelope (0 = none, else >= 19)");
    s->add_option("--seed", k_seed);
    s->add_option("--workers", k_workers);
    add_manifest(s);
    s->callback([&, s] {
      run.sub = s;
      handler = [&] {
        auto cat = k_cat.load(run.inputs);
        auto lags = ripley::LagGrid::uniform(r_step, r_max, t_step, t_max);
        auto ke = ripley::estimate_k(cat, lags, k_workers);
        std::optional<ripley::Envelope> env;
        if (k_envelope > 0) {
          ripley::EnvelopeOptions eo;
          eo.workers = k_workers;
          env = ripley::d_envelope(cat, lags, k_envelope, k_seed, eo);
        }
        run.seed = k_seed;
        run.outputs.write(k_out, ripley::k_csv(ke, env ? &*env : nullptr));
        run.finish(k_out);
      };
    });
  }

  // scan --------------------------------------------------------------------
  CatalogArgs s_cat;
  ScanArgs s_scan;
  std::string s_out, s_geojson;
  {
    auto* s = app.add_subcommand("scan", "space-time permutation scan");
    s_cat.add(s);
    s_scan.add(s, scan::ScanConfig{});
    s->add_option("--out,-o", s_out, "cluster CSV")->required();
    s->add_option("--geojson", s_geojson, "cluster circles as GeoJSON");
    add_manifest(s);
    s->callback([&, s] {
      run.sub = s;
      handler = [&] {
        auto cat = s_cat.load(run.inputs);
        auto cfg = s_scan.resolved();
        auto result = scan::run_stpss(cat, cfg);
        run.seed = cfg.seed;
        run.outputs.write(s_out, scan::clusters_csv(result));
        if (!s_geojson.empty()) run.outputs.write(s_geojson, scan::clusters_geojson(result));
        std::cerr << result.clusters.size() << " clusters reported, " << result.significant_count()
                  << " significant at alpha " << cfg.alpha << "\n";
        run.finish(s_out);
      };
    });
  }

  // sweep -------------------------------------------------------------------
  CatalogArgs w_cat;
  ScanArgs w_scan;
  std::string w_out, w_dir, w_rmax = "100,200,300", w_tmax = "1,3,5", w_tagg = "12,3";
  {
    auto* s = app.add_subcommand("sweep", "scan every R_max x T_max x T_agg combination");
    w_cat.add(s);
    w_scan.add(s, scan::ScanConfig{});
    s->add_option("--rmax-list", w_rmax, "R_max values (km)");
    s->add_option("--tmax-years-list", w_tmax, "T_max values (years)");
    s->add_option("--tagg-list", w_tagg, "T_agg values (months)");
    s->add_option("--out,-o", w_out, "summary CSV")->required();
    s->add_option("--clusters-dir", w_dir, "directory for per-combination cluster CSVs");
    add_manifest(s);
    s->callback([&, s] {
      run.sub = s;
      handler = [&] {
        auto cat = w_cat.load(run.inputs);
        workbench::SweepSpec spec{parse_doubles(w_rmax, "--rmax-list"), parse_ints(w_tmax, "--tmax-years-list"),
                                  parse_ints(w_tagg, "--tagg-list")};
        auto cfg = w_scan.resolved();
        auto result = workbench::sweep_scan(cat, spec, cfg);
        run.seed = cfg.seed;
        if (!w_dir.empty())
          for (const auto& e : result.entries) {
            if (!e.result) continue;
            std::string name = "clusters_r" + io::format_double(e.rmax_km) + "_t" + std::to_string(e.tmax_years) +
                               "y_a" + std::to_string(e.tagg_months) + "m.csv";
            run.outputs.write(fs::path(w_dir) / name, scan::clusters_csv(*e.result));
          }
        run.outputs.write(w_out, result.summary_csv());
        for (const auto& e : result.entries)
          if (!e.error.empty()) std::cerr << "combination failed: " << e.error << "\n";
        run.finish(w_out);
      };
    });
  }

  // decades -----------------------------------------------------------------
  CatalogArgs d_cat;
  ScanArgs d_scan;
  std::string d_dir;
  workbench::DecadeSpec d_spec;
  {
    auto* s = app.add_subcommand("decades", "independent scans per decade, cluster durations");
    d_cat.add(s);
    d_scan.add(s, workbench::decade_config());
    s->add_option("--start-year", d_spec.start_year);
    s->add_option("--decade-length", d_spec.length_years);
    s->add_option("--out-dir,-o", d_dir, "output directory")->required();
    add_manifest(s);
    s->callback([&, s] {
      run.sub = s;
      handler = [&] {
        auto cat = d_cat.load(run.inputs);
        auto cfg = d_scan.resolved();
        auto runs = workbench::decade_scan(cat, d_spec, cfg);
        auto clusters = workbench::significant_clusters(runs, cfg.alpha);
        run.seed = cfg.seed;
        fs::path dir(d_dir);
        run.outputs.write(dir / "decades.csv", workbench::decade_summary_csv(runs, cfg.alpha));
        run.outputs.write(dir / "decade_clusters.csv", workbench::decade_clusters_csv(clusters));
        run.outputs.write(dir / "duration_stats.csv", workbench::duration_stats_csv(clusters));
        for (const auto& r : runs) {
          if (r.empty) std::cerr << "decade " << r.index << ": no events\n";
          if (!r.error.empty()) std::cerr << "decade " << r.index << ": " << r.error << "\n";
        }
        if (run.manifest_path.empty()) run.manifest_path = (dir / "manifest.json").string();
        run.finish(dir / "decade_clusters.csv");
      };
    });
  }

  // recurrence --------------------------------------------------------------
  std::string rc_clusters, rc_catchments, rc_out;
  workbench::RecurrenceOptions rc_opt;
  {
    auto* s = app.add_subcommand("recurrence", "cluster recurrence per catchment across decade scans");
    s->add_option("--clusters", rc_clusters, "decade_clusters.csv from `decades`")->required();
    s->add_option("--catchments", rc_catchments, "catchment polygons GeoJSON")->required();
    s->add_option("--out,-o", rc_out, "recurrence CSV")->required();
    s->add_option("--start-year", rc_opt.start_year);
    s->add_option("--decade-length", rc_opt.length_years);
    s->add_flag("--event-centroid", rc_opt.event_centroid, "assign clusters by member centroid, not circle center");
    add_manifest(s);
    s->callback([&, s] {
      run.sub = s;
      handler = [&] {
        run.inputs.push_back(hash_input(rc_clusters));
        run.inputs.push_back(hash_input(rc_catchments));
        auto clusters = workbench::read_decade_clusters_csv(rc_clusters);
        auto catchments = geo::read_polygon_features(rc_catchments);
        auto report = workbench::recurrence_by_catchment(clusters, catchments, rc_opt);
        run.outputs.write(rc_out, workbench::recurrence_csv(report));
        std::cerr << report.total << " clusters, " << report.unassigned << " outside every catchment\n";
        run.finish(rc_out);
      };
    });
  }

  // krige -------------------------------------------------------------------
  std::string kr_samples, kr_out, kr_cells, kr_var, kr_loo, kr_vario, kr_origin;
  double kr_cell = 2, kr_bin = 0, kr_nugget = -1, kr_psill = -1, kr_range = -1;
  std::size_t kr_rows = 0, kr_cols = 0, kr_bins = 15, kr_neighbors = 32;
  bool kr_full = false, kr_planar = false;
  unsigned kr_workers = 0;
  {
    auto* s = app.add_subcommand("krige", "fit a spherical variogram and krige onto a lattice");
    s->add_option("--samples", kr_samples, "samples CSV lon,lat,value")->required();
    s->add_option("--out,-o", kr_out, "ESRI ASCII grid of predictions")->required();
    s->add_option("--cells", kr_cells, "CSV of cell centers with value and variance");
    s->add_option("--variance", kr_var, "ESRI ASCII grid of kriging variance");
    s->add_option("--variogram", kr_vario, "empirical and fitted variogram CSV");
    s->add_option("--loo", kr_loo, "leave-one-out error report CSV");
    s->add_option("--cell-km", kr_cell, "cell size (km)");
    s->add_option("--origin", kr_origin, "lower-left corner lon,lat (default: sample extent)");
    s->add_option("--rows", kr_rows);
    s->add_option("--cols", kr_cols);
    s->add_option("--bin-width-km", kr_bin, "variogram lag bin width (default: extent / 2 / bins)");
    s->add_option("--bins", kr_bins);
    s->add_option("--nugget", kr_nugget, "fixed model nugget (skips fitting with --psill and --range)");
    s->add_option("--psill", kr_psill);
    s->add_option("--range-km", kr_range);
    s->add_option("--neighbors", kr_neighbors);
    s->add_flag("--full-matrix", kr_full, "use every sample (<= 500)");
    s->add_flag("--planar", kr_planar);
    s->add_option("--workers", kr_workers);
    add_manifest(s);
    s->callback([&, s] {
      run.sub = s;
      handler = [&] {
        auto metric = kr_planar ? geo::Metric::planar : geo::Metric::great_circle;
        run.inputs.push_back(hash_input(kr_samples));
        auto samples = kriging::read_samples_csv(kr_samples, metric);
        if (samples.size() < 2) throw DataError("kriging needs at least 2 distinct samples");
        geo::BoundingBox bb{samples[0].location.lon, samples[0].location.lat, samples[0].location.lon,
                            samples[0].location.lat};
        for (const auto& x : samples) {
          bb.min_lon = std::min(bb.min_lon, x.location.lon);
          bb.max_lon = std::max(bb.max_lon, x.location.lon);
          bb.min_lat = std::min(bb.min_lat, x.location.lat);
          bb.max_lat = std::max(bb.max_lat, x.location.lat);
        }
        kriging::VariogramModel model;
        std::vector<kriging::VariogramPoint> points;
        bool fixed = kr_nugget >= 0 || kr_psill >= 0 || kr_range >= 0;
        if (fixed) {
          if (kr_nugget < 0 || kr_psill < 0 || kr_range <= 0)
            throw ConfigError("a fixed model needs --nugget, --psill and --range-km");
          model = {kr_nugget, kr_psill, kr_range};
        }
        double width = kr_bin;
        if (width <= 0) {
          double diag = geo::distance_km({bb.min_lon, bb.min_lat}, {bb.max_lon, bb.max_lat}, metric);
          width = diag / 2 / static_cast<double>(std::max<std::size_t>(kr_bins, 1));
          if (!(width > 0)) throw DataError("samples have no spatial extent");
        }
        auto edges = kriging::uniform_bin_edges(width, kr_bins);
        points = kriging::empirical_variogram(samples, edges, metric);
        if (!fixed) model = kriging::fit_variogram(points);
        std::cerr << "variogram: nugget " << model.nugget << ", partial sill " << model.partial_sill << ", range "
                  << model.range_km << " km\n";

        geo::GeoPoint origin{bb.min_lon, bb.min_lat};
        if (!kr_origin.empty()) {
          auto v = parse_doubles(kr_origin, "--origin");
          if (v.size() != 2) throw ConfigError("--origin needs lon,lat");
          origin = {v[0], v[1]};
        }
        auto spec = kriging::RasterSpec::from_km(origin, kr_cell, 1, 1, metric);
        spec.rows = kr_rows ? kr_rows
                            : static_cast<std::size_t>(std::ceil((bb.max_lat - origin.lat) / spec.cell_size)) + 1;
        spec.cols = kr_cols ? kr_cols
                            : static_cast<std::size_t>(std::ceil((bb.max_lon - origin.lon) / spec.cell_size)) + 1;
        kriging::KrigeOptions ko;
        ko.neighbors = kr_neighbors;
        ko.full_matrix = kr_full;
        ko.metric = metric;
        auto raster = kriging::krige_grid(samples, model, spec, ko, kr_workers);
        if (raster.failed) std::cerr << raster.failed << " cells failed and are masked\n";
        run.outputs.write(kr_out, kriging::esri_ascii(raster, false));
        if (!kr_var.empty()) run.outputs.write(kr_var, kriging::esri_ascii(raster, true));
        if (!kr_cells.empty()) run.outputs.write(kr_cells, kriging::raster_cells_csv(raster));
        if (!kr_vario.empty()) run.outputs.write(kr_vario, kriging::variogram_csv(points, &model));
        if (!kr_loo.empty()) {
          auto err = kriging::leave_one_out(samples, model, ko);
          std::ostringstream out;
          out << "lon,lat,value,error\n";
          for (std::size_t i = 0; i < samples.size(); ++i)
            out << io::format_double(samples[i].location.lon) << ',' << io::format_double(samples[i].location.lat)
                << ',' << io::format_double(samples[i].value) << ',' << io::format_double(err[i]) << "\n";
          run.outputs.write(kr_loo, out.str());
        }
        run.finish(kr_out);
      };
    });
  }

  // simulate ----------------------------------------------------------------
  RegionArgs sim_where;
  sim::SimSpec sim_spec;
  std::string sim_out, sim_truth, sim_process = "csr";
  {
    auto* s = app.add_subcommand("simulate", "synthetic CSR or clustered catalog");
    sim_where.add(s);
    s->add_option("--process", sim_process, "csr | clustered");
    s->add_option("--n", sim_spec.n, "number of events");
    s->add_option("--seed", sim_spec.seed);
    s->add_option("--cluster-fraction", sim_spec.cluster_fraction);
    s->add_option("--cluster-radius-km", sim_spec.cluster_radius_km);
    s->add_option("--cluster-months", sim_spec.cluster_months);
    s->add_option("--cluster-count", sim_spec.cluster_count);
    s->add_option("--out,-o", sim_out, "catalog CSV")->required();
    s->add_option("--truth", sim_truth, "injected clusters CSV");
    add_manifest(s);
    s->callback([&, s] {
      run.sub = s;
      handler = [&] {
        sim_spec.process = sim::process_from_string(sim_process);
        sim_spec.metric = sim_where.metric();
        if (sim_where.planar && sim_where.bbox.empty() && sim_where.region_path.empty())
          sim_spec.region = geo::MultiPolygon{{geo::box_polygon(0, 0, 1000, 1000)}};
        else
          sim_spec.region = sim_where.region(run.inputs);
        if (auto p = sim_where.period()) sim_spec.period = *p;
        auto result = sim::simulate_catalog(sim_spec);
        run.seed = sim_spec.seed;
        run.outputs.write(sim_out, export_catalog_csv(result.catalog, ImpactScale::default_scale()));
        if (!sim_truth.empty()) {
          std::ostringstream out;
          out << "cluster,center_lon,center_lat,radius_km,start_date,end_date,n_events\n";
          for (std::size_t k = 0; k < result.clusters.size(); ++k) {
            const auto& c = result.clusters[k];
            out << k << ',' << io::format_double(c.center.lon) << ',' << io::format_double(c.center.lat) << ','
                << io::format_double(c.radius_km) << ',' << format_date(c.start) << ',' << format_date(c.end) << ','
                << c.n_events << "\n";
          }
          run.outputs.write(sim_truth, out.str());
        }
        run.finish(sim_out);
      };
    });
  }

  // rerun -------------------------------------------------------------------
  std::string rr_manifest;
  {
    auto* s = app.add_subcommand("rerun", "replay a manifest after checking its inputs are unchanged");
    s->add_option("manifest", rr_manifest)->required();
    s->callback([&] {
      handler = [&] {
        auto m = Manifest::read(rr_manifest);
        verify_inputs(m);
        std::vector<std::string> replay{m.command};
        replay.insert(replay.end(), m.args.begin(), m.args.end());
        int code = dispatch(replay);
        if (code != 0) throw Error(ErrorKind::data, "rerun failed with exit code " + std::to_string(code));
      };
    });
  }

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
    // argv[0] is the subcommand; the rest (config tokens already expanded) is
    // what a rerun replays
    run.command = argv.empty() ? "" : argv[0];
    run.args.assign(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    if (handler) handler();
    return 0;
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    run.outputs.rollback();
    print_error("config", e.what());
    return exit_code(ErrorKind::config);
  } catch (const Error& e) {
    run.outputs.rollback();
    const char* kind = e.kind() == ErrorKind::config ? "config" : e.kind() == ErrorKind::data ? "data" : "numerical";
    print_error(kind, e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    run.outputs.rollback();
    print_error("data", e.what());
    return exit_code(ErrorKind::data);
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args);
}
