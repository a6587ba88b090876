#include "swdist/metrics.hpp"

#include <algorithm>

#include "swdist/error.hpp"
#include "swdist/gaussian_frechet.hpp"
#include "swdist/kernel_mmd.hpp"
#include "swdist/sliced_ot.hpp"

namespace swdist {

const std::vector<std::string>& known_metric_ids() {
  static const std::vector<std::string> ids{"swd", "fid", "kid", "cmmd", "mmd-rbf-mixture"};
  return ids;
}

bool is_known_metric(const std::string& id) {
  const auto& ids = known_metric_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

nlohmann::json provenance(const MetricConfig& c, std::uint64_t run_seed) {
  nlohmann::json j;
  j["metric"] = c.id;
  if (c.id == "swd") {
    j["L"] = c.num_directions;
    j["seed"] = c.seed.value_or(run_seed);
  } else if (c.id == "fid") {
    j["ridge"] = c.ridge;
  } else if (c.id == "kid") {
    j["kernel"] = describe(PolynomialKernel{3, std::nullopt, 1.0});
  } else if (c.id == "cmmd") {
    j["kernel"] = describe(RbfKernel{c.sigma});
    j["sigma"] = c.sigma;
  } else if (c.id == "mmd-rbf-mixture") {
    j["multipliers"] = c.multipliers;
    j["median_cap"] = c.median_cap;
    j["median_seed"] = run_seed;
  }
  return j;
}

MetricHandle make_metric(const MetricConfig& c, std::uint64_t run_seed) {
  MetricHandle h;
  h.id = c.id;
  h.config = provenance(c, run_seed);
  if (c.id == "swd") {
    if (c.num_directions == 0) throw Error(ErrorKind::Input, "swd needs L >= 1");
    const std::size_t num = c.num_directions;
    const std::uint64_t seed = c.seed.value_or(run_seed);
    h.distance = [num, seed](const EmbeddingSet& a, const EmbeddingSet& b) {
      return swd_squared(a, b, ProjectionPlan{num, a.dim(), seed}).value;
    };
  } else if (c.id == "fid") {
    const FrechetOptions opts{c.ridge};
    h.distance = [opts](const EmbeddingSet& a, const EmbeddingSet& b) { return fid(a, b, opts); };
  } else if (c.id == "kid") {
    h.distance = [](const EmbeddingSet& a, const EmbeddingSet& b) { return kid(a, b).value; };
  } else if (c.id == "cmmd") {
    if (!(c.sigma > 0.0)) throw Error(ErrorKind::Input, "cmmd sigma must be positive");
    const double sigma = c.sigma;
    h.distance = [sigma](const EmbeddingSet& a, const EmbeddingSet& b) { return cmmd(a, b, sigma).value; };
  } else if (c.id == "mmd-rbf-mixture") {
    const auto mult = c.multipliers;
    const auto cap = c.median_cap;
    h.distance = [mult, cap, run_seed](const EmbeddingSet& a, const EmbeddingSet& b) {
      return mmd_rbf_mixture(a, b, mult, cap, run_seed).value;
    };
  } else {
    throw Error(ErrorKind::Input, "unknown metric '" + c.id +
                                      "' (expected one of swd, fid, kid, cmmd, mmd-rbf-mixture)");
  }
  return h;
}

void to_json(nlohmann::json& j, const MetricConfig& c) {
  j = nlohmann::json{{"L", c.num_directions},     {"sigma", c.sigma},   {"multipliers", c.multipliers},
                     {"median_cap", c.median_cap}, {"ridge", c.ridge}};
  j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, MetricConfig& c) {
  const MetricConfig defaults;
  c.num_directions = j.value("L", defaults.num_directions);
  c.sigma = j.value("sigma", defaults.sigma);
  c.multipliers = j.value("multipliers", defaults.multipliers);
  c.median_cap = j.value("median_cap", defaults.median_cap);
  c.ridge = j.value("ridge", defaults.ridge);
  if (j.contains("seed") && !j.at("seed").is_null()) {
    c.seed = j.at("seed").get<std::uint64_t>();
  } else {
    c.seed.reset();
  }
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& m : c.metrics) {
    nlohmann::json item = m;
    item["id"] = m.id;
    metrics.push_back(item);
  }
  j = nlohmann::json{{"metrics", metrics},
                     {"seed", c.seed},
                     {"workers", c.workers},
                     {"r", c.repetitions},
                     {"grid", c.grid},
                     {"seeds", c.num_seeds},
                     {"permutations", c.permutations}};
  j["manifest"] = c.manifest ? nlohmann::json(*c.manifest) : nlohmann::json(nullptr);
  j["out"] = c.out ? nlohmann::json(*c.out) : nlohmann::json(nullptr);
  j["half_size"] = c.half_size ? nlohmann::json(*c.half_size) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  const RunConfig defaults;
  c = defaults;
  try {
    if (j.contains("metrics")) {
      for (const auto& item : j.at("metrics")) {
        MetricConfig m = item.get<MetricConfig>();
        m.id = item.at("id").get<std::string>();
        if (!is_known_metric(m.id)) throw Error(ErrorKind::Input, "unknown metric '" + m.id + "' in config");
        c.metrics.push_back(std::move(m));
      }
    }
    auto opt_string = [&](const char* key) -> std::optional<std::string> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return j.at(key).get<std::string>();
    };
    c.manifest = opt_string("manifest");
    c.out = opt_string("out");
    c.seed = j.value("seed", defaults.seed);
    c.workers = j.value("workers", defaults.workers);
    c.repetitions = j.value("r", defaults.repetitions);
    if (j.contains("half_size") && !j.at("half_size").is_null()) {
      c.half_size = j.at("half_size").get<std::size_t>();
    }
    c.grid = j.value("grid", defaults.grid);
    c.num_seeds = j.value("seeds", defaults.num_seeds);
    c.permutations = j.value("permutations", defaults.permutations);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("bad run config: ") + e.what());
  }
}

}  // namespace swdist
