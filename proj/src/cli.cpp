#include "swdist/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "swdist/embed_io.hpp"
#include "swdist/error.hpp"
#include "swdist/metrics.hpp"
#include "swdist/protocol.hpp"
#include "swdist/sliced_ot.hpp"

namespace swdist::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Write, "cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw Error(ErrorKind::Write, "failed writing " + path.string());
}

/// Flags shared by the batch subcommands; unset values leave the config alone.
struct CommonFlags {
  std::vector<std::string> metrics;
  std::optional<std::size_t> num_directions;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma;
  std::vector<double> multipliers;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::string> config;

  void attach(CLI::App* app) {
    app->add_option("--metric", metrics, "Metric ids: swd, fid, kid, cmmd, mmd-rbf-mixture")->delimiter(',');
    app->add_option("--l", num_directions, "Number of SWD projections");
    app->add_option("--seed", seed, "Global seed (fallback: SWDIST_SEED)");
    app->add_option("--sigma", sigma, "CMMD RBF bandwidth");
    app->add_option("--multipliers", multipliers, "Median-heuristic bandwidth multipliers")->delimiter(',');
    app->add_option("--workers", workers, "OpenMP worker count");
    app->add_option("--out", out, "Output directory");
    app->add_option("--config", config, "Run config JSON file");
  }
};

RunConfig resolve_config(const CommonFlags& flags) {
  RunConfig rc;
  bool seed_from_file = false;
  if (flags.config) {
    std::ifstream in(*flags.config);
    if (!in) throw Error(ErrorKind::Input, "cannot open config file " + *flags.config);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Format, "config file " + *flags.config + " is not valid JSON: " + e.what());
    }
    rc = j.get<RunConfig>();
    seed_from_file = j.contains("seed");
  }
  if (flags.seed) {
    rc.seed = *flags.seed;
  } else if (!seed_from_file) {
    if (const char* env = std::getenv("SWDIST_SEED"); env && *env) {
      try {
        rc.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Input, std::string("SWDIST_SEED is not an integer: ") + env);
      }
    }
  }
  if (!flags.metrics.empty()) {
    std::vector<MetricConfig> selected;
    for (const auto& id : flags.metrics) {
      if (!is_known_metric(id)) {
        throw Error(ErrorKind::Input, "unknown metric '" + id +
                                          "' (expected one of swd, fid, kid, cmmd, mmd-rbf-mixture)");
      }
      auto it = std::find_if(rc.metrics.begin(), rc.metrics.end(),
                             [&](const MetricConfig& m) { return m.id == id; });
      MetricConfig mc;
      mc.id = id;
      selected.push_back(it != rc.metrics.end() ? *it : mc);
    }
    rc.metrics = std::move(selected);
  }
  if (rc.metrics.empty()) {
    MetricConfig swd;
    swd.id = "swd";
    rc.metrics.push_back(swd);
  }
  for (auto& m : rc.metrics) {
    if (flags.num_directions && m.id == "swd") m.num_directions = *flags.num_directions;
    if (flags.seed && m.id == "swd") m.seed = *flags.seed;
    if (flags.sigma && m.id == "cmmd") m.sigma = *flags.sigma;
    if (!flags.multipliers.empty() && m.id == "mmd-rbf-mixture") m.multipliers = flags.multipliers;
  }
  if (flags.workers) rc.workers = *flags.workers;
  if (flags.out) rc.out = *flags.out;
  if (rc.workers > 0) omp_set_num_threads(rc.workers);
  return rc;
}

std::string shape_of(const EmbeddingSet& s) {
  return std::to_string(s.rows()) + "x" + std::to_string(s.dim());
}

EmbeddingSet load_tagged(const ManifestEntry& e) {
  EmbeddingSet raw = load_matrix(e.path);
  return EmbeddingSet(raw.data(), e.dataset, e.backbone, raw.dtype());
}

fs::path ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Write, "cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

/// Manifest entries for one (dataset, backbone): the clean set plus degraded
/// sets grouped by degradation and sorted by severity.
struct DatasetGroup {
  std::string dataset;
  std::string backbone;
  std::optional<ManifestEntry> clean;
  std::map<std::string, std::vector<ManifestEntry>> degraded;
};

std::vector<DatasetGroup> group_manifest(const DatasetManifest& manifest) {
  std::map<std::pair<std::string, std::string>, DatasetGroup> groups;
  for (const auto& e : manifest.entries) {
    auto& g = groups[{e.dataset, e.backbone}];
    g.dataset = e.dataset;
    g.backbone = e.backbone;
    if (e.is_clean()) {
      g.clean = e;
    } else {
      if (!e.severity) {
        throw Error(ErrorKind::Input, "degraded entry '" + e.condition + "' of dataset '" + e.dataset +
                                          "' has no severity");
      }
      g.degraded[e.condition].push_back(e);
    }
  }
  std::vector<DatasetGroup> out;
  for (auto& [_, g] : groups) {
    for (auto& [tau, list] : g.degraded) {
      std::sort(list.begin(), list.end(),
                [](const ManifestEntry& a, const ManifestEntry& b) { return *a.severity < *b.severity; });
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::string manifest_path(const std::string& positional, const RunConfig& rc) {
  if (!positional.empty()) return positional;
  if (rc.manifest) return *rc.manifest;
  throw Error(ErrorKind::Input, "no manifest given");
}

// --- compute ----------------------------------------------------------------

int cmd_compute(const RunConfig& rc, const std::string& path_a, const std::string& path_b,
                std::ostream& out) {
  const EmbeddingSet a = load_matrix(path_a);
  const EmbeddingSet b = load_matrix(path_b);
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::Shape, "dimension mismatch: " + path_a + " is " + shape_of(a) + ", " +
                                      path_b + " is " + shape_of(b));
  }
  json all = json::array();
  for (const auto& mc : rc.metrics) {
    const MetricHandle metric = make_metric(mc, rc.seed);
    const auto start = std::chrono::steady_clock::now();
    const MetricResult r = evaluate(metric, a, b);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    json j{{"metric", r.metric_id}, {"value", r.value}, {"config", r.config},
           {"n", r.n},              {"m", r.m},         {"wall_time_s", elapsed.count()}};
    out << j.dump() << "\n";
    all.push_back(j);
  }
  if (rc.out) write_file(ensure_out_dir(*rc.out) / "compute.json", all.dump(2) + "\n");
  return kOk;
}

// --- degradation --------------------------------------------------------------

int cmd_degradation(const RunConfig& rc, const std::string& manifest_file, std::ostream& out) {
  const auto groups = group_manifest(load_manifest(manifest_file));

  std::ostringstream csv;
  csv << "dataset,degradation,severity,metric,value,normalized,violation_pct,backbone,params,n,m\n";
  json curves = json::array();

  for (const auto& mc : rc.metrics) {
    const MetricHandle metric = make_metric(mc, rc.seed);
    const std::string params = metric.config.dump();
    for (const auto& g : groups) {
      if (!g.clean) {
        throw Error(ErrorKind::Coverage, "dataset '" + g.dataset + "' (backbone '" + g.backbone +
                                             "') has no clean condition");
      }
      const EmbeddingSet clean = load_tagged(*g.clean);
      for (const auto& [tau, entries] : g.degraded) {
        std::vector<EmbeddingSet> sets;
        std::vector<double> severities;
        for (const auto& e : entries) {
          sets.push_back(load_tagged(e));
          severities.push_back(*e.severity);
        }
        const DegradationCurve c = degradation_curve(metric, clean, sets, severities, g.dataset, tau);

        std::map<std::size_t, double> violation_pct;
        json violations = json::array();
        for (const auto& v : c.violations) {
          violation_pct[v.index] = 100.0 * v.relative_decrease;
          violations.push_back({{"index", v.index},
                                {"severity", c.severities[v.index]},
                                {"relative_decrease", v.relative_decrease},
                                {"pct", 100.0 * v.relative_decrease}});
        }
        for (std::size_t i = 0; i < c.raw.size(); ++i) {
          const auto vp = violation_pct.find(i);
          csv << csv_field(g.dataset) << ',' << csv_field(tau) << ',' << fmt(c.severities[i]) << ','
              << metric.id << ',' << fmt(c.raw[i]) << ',' << fmt(c.normalized[i]) << ','
              << (vp != violation_pct.end() ? fmt(vp->second) : "") << ',' << csv_field(g.backbone)
              << ',' << csv_field(params) << ',' << sets[i].rows() << ',' << clean.rows() << '\n';
        }
        curves.push_back({{"metric", metric.id},
                          {"params", metric.config},
                          {"dataset", g.dataset},
                          {"backbone", g.backbone},
                          {"degradation", tau},
                          {"severities", c.severities},
                          {"raw", c.raw},
                          {"normalized", c.normalized},
                          {"violations", violations},
                          {"m", clean.rows()}});
      }
    }
  }

  if (rc.out) {
    const fs::path dir = ensure_out_dir(*rc.out);
    write_file(dir / "curves.csv", csv.str());
    write_file(dir / "curves.json", curves.dump(2) + "\n");
  } else {
    out << csv.str();
  }
  return kOk;
}

// --- stability ----------------------------------------------------------------

int cmd_stability(const RunConfig& rc, const std::string& manifest_file, std::ostream& out) {
  const auto groups = group_manifest(load_manifest(manifest_file));

  std::ostringstream csv;
  csv << "dataset,backbone,metric,nu_bar,sigma,cv,cv_unreliable,r,half_size,params\n";
  json rows = json::array();
  for (const auto& g : groups) {
    if (!g.clean) continue;
    const EmbeddingSet clean = load_tagged(*g.clean);
    const std::size_t half = rc.half_size.value_or(clean.rows() / 2);
    for (const auto& mc : rc.metrics) {
      const MetricHandle metric = make_metric(mc, rc.seed);
      const StabilityReport rep = finite_sample_bias(metric, clean, rc.repetitions, half, rc.seed);
      csv << csv_field(g.dataset) << ',' << csv_field(g.backbone) << ',' << metric.id << ','
          << fmt(rep.mean) << ',' << fmt(rep.sigma) << ',' << (rep.cv ? fmt(*rep.cv) : "") << ','
          << (rep.cv_unreliable ? "true" : "false") << ',' << rep.r << ',' << rep.half_size << ','
          << csv_field(metric.config.dump()) << '\n';
      rows.push_back({{"dataset", g.dataset},
                      {"backbone", g.backbone},
                      {"metric", metric.id},
                      {"params", metric.config},
                      {"nu_bar", rep.mean},
                      {"sigma", rep.sigma},
                      {"cv", rep.cv ? json(*rep.cv) : json(nullptr)},
                      {"cv_unreliable", rep.cv_unreliable},
                      {"r", rep.r},
                      {"half_size", rep.half_size},
                      {"per_split", rep.per_split},
                      {"seed", rc.seed}});
    }
  }
  if (rows.empty()) throw Error(ErrorKind::Coverage, "manifest has no clean condition to split");

  if (rc.out) {
    const fs::path dir = ensure_out_dir(*rc.out);
    write_file(dir / "stability.csv", csv.str());
    write_file(dir / "stability.json", rows.dump(2) + "\n");
  } else {
    out << csv.str();
  }
  return kOk;
}

// --- consistency --------------------------------------------------------------

int cmd_consistency(const RunConfig& rc, const std::string& manifest_file, std::ostream& out) {
  const auto groups = group_manifest(load_manifest(manifest_file));
  std::map<std::string, std::vector<const DatasetGroup*>> by_backbone;
  for (const auto& g : groups) by_backbone[g.backbone].push_back(&g);

  json results = json::array();
  for (const auto& mc : rc.metrics) {
    const MetricHandle metric = make_metric(mc, rc.seed);
    for (const auto& [backbone, members] : by_backbone) {
      std::map<SignalKey, double> signals;
      for (const DatasetGroup* g : members) {
        if (!g->clean) {
          throw Error(ErrorKind::Coverage, "dataset '" + g->dataset + "' has no clean condition");
        }
        const EmbeddingSet clean = load_tagged(*g->clean);
        for (const auto& [tau, entries] : g->degraded) {
          for (const auto& e : entries) {
            signals[{g->dataset, tau, *e.severity}] = metric(load_tagged(e), clean);
          }
        }
      }
      const ConsistencyReport rep = consistency(signals);
      json ratios = json::array();
      for (const auto& l : rep.log_ratios) {
        ratios.push_back({{"dataset_j", l.dataset_j},
                          {"dataset_k", l.dataset_k},
                          {"degradation", l.degradation},
                          {"severity", l.severity},
                          {"log_ratio", l.value}});
      }
      json inter = json::array();
      for (const auto& v : rep.interaction) {
        inter.push_back({{"dataset_j", v.dataset_j}, {"dataset_k", v.dataset_k}, {"variance", v.variance}});
      }
      results.push_back({{"metric", metric.id},
                         {"params", metric.config},
                         {"backbone", backbone},
                         {"lambda", rep.lambda},
                         {"mean_interaction", rep.mean_interaction},
                         {"num_terms", rep.num_terms},
                         {"log_ratios", ratios},
                         {"interaction_variances", inter},
                         {"warnings", rep.warnings}});
    }
  }
  const std::string text = json{{"results", results}}.dump(2) + "\n";
  if (rc.out) {
    write_file(ensure_out_dir(*rc.out) / "consistency.json", text);
  } else {
    out << text;
  }
  return kOk;
}

// --- ablate -------------------------------------------------------------------

int cmd_ablate(const RunConfig& rc, const std::string& path_a, const std::string& path_b,
               std::ostream& out) {
  const EmbeddingSet a = load_matrix(path_a);
  const EmbeddingSet b = load_matrix(path_b);
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::Shape, "dimension mismatch: " + path_a + " is " + shape_of(a) + ", " +
                                      path_b + " is " + shape_of(b));
  }
  const std::vector<std::size_t> grid = rc.grid.empty() ? default_ablation_grid() : rc.grid;
  std::vector<std::uint64_t> seeds(rc.num_seeds);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
  const auto rows = ablate_projections(a, b, grid, seeds, rc.seed);

  std::ostringstream csv;
  csv << "L,mean,std,rel_std,seconds,seeds,base_seed,n,m\n";
  for (const auto& r : rows) {
    const double rel = r.mean != 0.0 ? r.stddev / std::abs(r.mean) : 0.0;
    csv << r.num_directions << ',' << fmt(r.mean) << ',' << fmt(r.stddev) << ',' << fmt(rel) << ','
        << fmt(r.seconds) << ',' << seeds.size() << ',' << rc.seed << ',' << a.rows() << ','
        << b.rows() << '\n';
  }
  if (rc.out) {
    write_file(ensure_out_dir(*rc.out) / "ablation.csv", csv.str());
  } else {
    out << csv.str();
  }
  return kOk;
}

// --- correlate ----------------------------------------------------------------

std::pair<std::vector<double>, std::vector<double>> read_two_columns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Input, "cannot open " + path);
  std::vector<double> first, second;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::Format, path + ":" + std::to_string(lineno) + ": expected two columns");
    }
    try {
      std::size_t used_a = 0, used_b = 0;
      const std::string sa = line.substr(0, comma), sb = line.substr(comma + 1);
      const double a = std::stod(sa, &used_a);
      const double b = std::stod(sb, &used_b);
      first.push_back(a);
      second.push_back(b);
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header
      throw Error(ErrorKind::Format, path + ":" + std::to_string(lineno) + ": non-numeric value");
    }
  }
  return {first, second};
}

int cmd_correlate(const RunConfig& rc, const std::string& path, std::ostream& out) {
  const auto [human, predicted] = read_two_columns(path);
  const CorrelationReport r = rank_correlation(human, predicted, rc.permutations, rc.seed);
  const json j{{"spearman", r.spearman},     {"kendall", r.kendall},
               {"p_spearman", r.p_spearman}, {"p_kendall", r.p_kendall},
               {"n_conditions", r.n_conditions}, {"permutations", r.permutations},
               {"seed", rc.seed}};
  const std::string text = j.dump(2) + "\n";
  out << text;
  if (rc.out) write_file(ensure_out_dir(*rc.out) / "correlation.json", text);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributional distances between embedding sets"};
  app.name(args.empty() ? "swdist" : args.front());
  app.require_subcommand(1);

  CommonFlags flags;
  std::string path_a, path_b, manifest, csv_path;
  std::optional<std::size_t> repetitions, half_size, num_seeds, permutations;
  std::vector<std::size_t> grid;
  BoundQuery query;

  auto* compute = app.add_subcommand("compute", "Distance between two embedding files");
  flags.attach(compute);
  compute->add_option("a", path_a, "First .npy file")->required();
  compute->add_option("b", path_b, "Second .npy file")->required();

  auto* degradation = app.add_subcommand("degradation", "Degradation curves from a manifest");
  flags.attach(degradation);
  degradation->add_option("manifest", manifest, "Manifest JSON");

  auto* stability = app.add_subcommand("stability", "Finite-sample bias over random splits");
  flags.attach(stability);
  stability->add_option("manifest", manifest, "Manifest JSON");
  stability->add_option("--r", repetitions, "Number of random splits (default 20)");
  stability->add_option("--half-size", half_size, "Rows per split half (default N/2)");

  auto* consist = app.add_subcommand("consistency", "Cross-dataset consistency from a manifest");
  flags.attach(consist);
  consist->add_option("manifest", manifest, "Manifest JSON");

  auto* ablate = app.add_subcommand("ablate", "SWD projection-count sweep");
  flags.attach(ablate);
  ablate->add_option("a", path_a, "First .npy file")->required();
  ablate->add_option("b", path_b, "Second .npy file")->required();
  ablate->add_option("--grid", grid, "Projection counts")->delimiter(',');
  ablate->add_option("--seeds", num_seeds, "Number of direction seeds (default 10)");

  auto* plan = app.add_subcommand("plan", "Projection count from the error bound");
  plan->add_option("--k", query.intrinsic_dim, "Intrinsic dimension")->required();
  plan->add_option("--D,--diameter", query.diameter, "Support diameter")->capture_default_str();
  plan->add_option("--tau,--tolerance", query.tolerance, "Error tolerance")->required();
  plan->add_option("--delta", query.failure_prob, "Failure probability")->required();
  plan->add_option("--C,--curvature", query.curvature_const, "Curvature constant")->capture_default_str();

  auto* correlate = app.add_subcommand("correlate", "Rank correlation of a two-column CSV");
  flags.attach(correlate);
  correlate->add_option("csv", csv_path, "CSV with human,predicted columns")->required();
  correlate->add_option("--permutations", permutations, "Permutation count (default 10000)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (plan->parsed()) {
      out << plan_projections(query) << "\n";
      return kOk;
    }
    RunConfig rc = resolve_config(flags);
    if (repetitions) rc.repetitions = *repetitions;
    if (half_size) rc.half_size = *half_size;
    if (num_seeds) rc.num_seeds = *num_seeds;
    if (permutations) rc.permutations = *permutations;
    if (!grid.empty()) rc.grid = grid;

    if (compute->parsed()) return cmd_compute(rc, path_a, path_b, out);
    if (degradation->parsed()) return cmd_degradation(rc, manifest_path(manifest, rc), out);
    if (stability->parsed()) return cmd_stability(rc, manifest_path(manifest, rc), out);
    if (consist->parsed()) return cmd_consistency(rc, manifest_path(manifest, rc), out);
    if (ablate->parsed()) return cmd_ablate(rc, path_a, path_b, out);
    if (correlate->parsed()) return cmd_correlate(rc, csv_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kUsageError;
}

}  // namespace swdist::cli
