#include "swdist/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

#include "swdist/error.hpp"
#include "swdist/random.hpp"

namespace swdist {

MetricResult evaluate(const MetricHandle& metric, const EmbeddingSet& a, const EmbeddingSet& b) {
  return MetricResult{metric.id, metric(a, b), metric.config, a.rows(), b.rows()};
}

namespace {

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

DegradationCurve curve_from_raw(std::string dataset_id, std::string degradation,
                                std::vector<double> severities, std::vector<double> raw) {
  if (raw.empty()) throw Error(ErrorKind::Arity, "degradation curve needs at least one severity");
  if (severities.size() != raw.size()) {
    throw Error(ErrorKind::Arity, "severities and raw values differ in length");
  }
  DegradationCurve c;
  c.dataset_id = std::move(dataset_id);
  c.degradation = std::move(degradation);
  c.severities = std::move(severities);
  c.raw = std::move(raw);

  const auto [lo, hi] = std::minmax_element(c.raw.begin(), c.raw.end());
  const double min = *lo, range = *hi - *lo;
  c.normalized.reserve(c.raw.size());
  for (double v : c.raw) c.normalized.push_back(range > 0.0 ? (v - min) / range : 0.0);

  for (std::size_t i = 1; i < c.raw.size(); ++i) {
    if (c.raw[i] < c.raw[i - 1]) {
      const double drop = c.raw[i - 1] - c.raw[i];
      const double base = std::abs(c.raw[i - 1]);
      // a drop from zero has no relative scale; report the absolute drop
      c.violations.push_back({i, base > 0.0 ? drop / base : drop});
    }
  }
  return c;
}

DegradationCurve degradation_curve(const MetricHandle& metric, const EmbeddingSet& clean,
                                   std::span<const EmbeddingSet> degraded,
                                   std::vector<double> severities, std::string dataset_id,
                                   std::string degradation) {
  if (degraded.empty()) throw Error(ErrorKind::Arity, "degradation curve needs at least one severity");
  if (degraded.size() != severities.size()) {
    throw Error(ErrorKind::Arity, "one severity per degraded set required");
  }
  for (std::size_t i = 1; i < severities.size(); ++i) {
    if (!(severities[i] > severities[i - 1])) {
      throw Error(ErrorKind::Input, "severities must be strictly increasing");
    }
  }
  std::vector<double> raw;
  raw.reserve(degraded.size());
  for (const auto& set : degraded) {
    if (set.dim() != clean.dim()) {
      throw Error(ErrorKind::Shape, "degraded set has d=" + std::to_string(set.dim()) +
                                        ", clean set has d=" + std::to_string(clean.dim()));
    }
    raw.push_back(metric(set, clean));
  }
  return curve_from_raw(std::move(dataset_id), std::move(degradation), std::move(severities),
                        std::move(raw));
}

StabilityReport summarize_splits(std::vector<double> per_split) {
  if (per_split.empty()) throw Error(ErrorKind::Arity, "need at least one split value");
  StabilityReport rep;
  rep.r = per_split.size();
  rep.mean = std::accumulate(per_split.begin(), per_split.end(), 0.0) / static_cast<double>(rep.r);
  rep.sigma = std::sqrt(sample_variance(per_split));
  if (rep.mean != 0.0) rep.cv = rep.sigma / std::abs(rep.mean);
  rep.cv_unreliable = std::abs(rep.mean) < 10.0 * rep.sigma / std::sqrt(static_cast<double>(rep.r));
  rep.per_split = std::move(per_split);
  return rep;
}

StabilityReport finite_sample_bias(const MetricHandle& metric, const EmbeddingSet& set,
                                   std::size_t r, std::size_t half_size, std::uint64_t seed) {
  if (r == 0) throw Error(ErrorKind::Input, "repetition count must be positive");
  const auto splits = random_splits(set, r, half_size, seed);
  std::vector<double> values;
  values.reserve(r);
  for (const auto& s : splits) values.push_back(metric(set.subset(s.a_indices), set.subset(s.b_indices)));
  auto rep = summarize_splits(std::move(values));
  rep.dataset_k = rep.dataset_j = set.dataset_id();
  rep.half_size = half_size;
  return rep;
}

StabilityReport finite_sample_bias(const MetricHandle& metric, const EmbeddingSet& set_k,
                                   const EmbeddingSet& set_j, std::size_t r, std::size_t half_size,
                                   std::uint64_t seed) {
  if (r == 0) throw Error(ErrorKind::Input, "repetition count must be positive");
  if (half_size == 0) throw Error(ErrorKind::Input, "half_size must be positive");
  std::vector<double> values;
  values.reserve(r);
  for (std::size_t i = 0; i < r; ++i) {
    const auto a = sample_without_replacement(set_k.rows(), half_size, {seed, i, 0});
    const auto b = sample_without_replacement(set_j.rows(), half_size, {seed, i, 1});
    values.push_back(metric(set_k.subset(a), set_j.subset(b)));
  }
  auto rep = summarize_splits(std::move(values));
  rep.dataset_k = set_k.dataset_id();
  rep.dataset_j = set_j.dataset_id();
  rep.half_size = half_size;
  return rep;
}

ConsistencyReport consistency(const std::map<SignalKey, double>& signals) {
  std::set<std::string> datasets, degradations;
  std::set<double> severities;
  for (const auto& [key, _] : signals) {
    datasets.insert(key.dataset);
    degradations.insert(key.degradation);
    severities.insert(key.severity);
  }
  if (datasets.size() < 2) {
    throw Error(ErrorKind::Coverage, "consistency needs signals from at least two datasets");
  }

  std::vector<std::string> missing;
  for (const auto& ds : datasets)
    for (const auto& tau : degradations)
      for (double s : severities)
        if (!signals.contains({ds, tau, s})) {
          missing.push_back("(" + ds + ", " + tau + ", " + std::to_string(s) + ")");
        }
  if (!missing.empty()) {
    std::string msg = "incomplete grid, missing cells:";
    for (const auto& m : missing) msg += " " + m;
    throw Error(ErrorKind::Coverage, msg);
  }

  ConsistencyReport rep;
  auto signal = [&](const SignalKey& key) {
    double v = signals.at(key);
    if (!(v > 0.0)) {
      rep.warnings.push_back("nonpositive signal " + std::to_string(v) + " at (" + key.dataset +
                             ", " + key.degradation + ", " + std::to_string(key.severity) +
                             ") floored to 1e-12");
      v = kSignalFloor;
    }
    return v;
  };

  std::map<SignalKey, double> floored;
  for (const auto& [key, _] : signals) floored[key] = signal(key);

  const std::vector<std::string> names(datasets.begin(), datasets.end());
  double abs_sum = 0.0;
  for (std::size_t j = 0; j < names.size(); ++j) {
    for (std::size_t k = j + 1; k < names.size(); ++k) {
      std::vector<double> pair_values;
      for (const auto& tau : degradations) {
        for (double s : severities) {
          const double l = std::log2(floored.at({names[j], tau, s}) / floored.at({names[k], tau, s}));
          rep.log_ratios.push_back({names[j], names[k], tau, s, l});
          pair_values.push_back(l);
          abs_sum += std::abs(l);
        }
      }
      rep.interaction.push_back({names[j], names[k], sample_variance(pair_values)});
    }
  }

  const std::size_t k = names.size();
  rep.num_terms = degradations.size() * severities.size() * (k * (k - 1) / 2);
  if (rep.num_terms != rep.log_ratios.size()) {
    throw Error(ErrorKind::Coverage, "log-ratio count does not match the grid size");
  }
  rep.lambda = abs_sum / static_cast<double>(rep.num_terms);
  double v_sum = 0.0;
  for (const auto& iv : rep.interaction) v_sum += iv.variance;
  rep.mean_interaction = v_sum / static_cast<double>(rep.interaction.size());
  return rep;
}

RefinementCurve refinement_curve(const MetricHandle& metric, const EmbeddingSet& real_set,
                                 std::span<const std::pair<double, EmbeddingSet>> snapshots) {
  if (snapshots.empty()) throw Error(ErrorKind::Arity, "refinement curve needs at least one snapshot");
  RefinementCurve curve;
  curve.metric_id = metric.id;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const auto& [t, set] = snapshots[i];
    if (i > 0 && !(t > snapshots[i - 1].first)) {
      throw Error(ErrorKind::Input, "snapshot timesteps must be strictly increasing");
    }
    curve.timesteps.push_back(t);
    curve.values.push_back(metric(set, real_set));
  }
  return curve;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::Arity, "length mismatch: " + std::to_string(x.size()) + " vs " +
                                      std::to_string(y.size()));
  }
  if (x.size() < 3) throw Error(ErrorKind::Arity, "rank correlation needs at least 3 conditions");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (constant(x) || constant(y)) {
    throw Error(ErrorKind::Undefined, "correlation is undefined for a constant list");
  }
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double spearman_from_ranks(std::span<const double> rx, std::span<const double> ry) {
  return pearson(rx, ry);
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return spearman_from_ranks(rx, ry);
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  std::int64_t concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) {
        ++ties_x;
        ++ties_y;
      } else if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto pairs = static_cast<std::int64_t>(n * (n - 1) / 2);
  const double denom = std::sqrt(static_cast<double>(pairs - ties_x) * static_cast<double>(pairs - ties_y));
  return static_cast<double>(concordant - discordant) / denom;
}

CorrelationReport rank_correlation(std::span<const double> human, std::span<const double> predicted,
                                   std::size_t permutations, std::uint64_t seed) {
  check_pair(human, predicted);
  CorrelationReport rep;
  rep.n_conditions = human.size();
  rep.permutations = permutations;

  const auto rank_h = average_ranks(human);
  const auto rank_p = average_ranks(predicted);
  rep.spearman = spearman_from_ranks(rank_h, rank_p);
  rep.kendall = kendall_tau_b(human, predicted);

  // Ties in |statistic| within rounding count as extreme.
  constexpr double kSlack = 1e-12;
  const double obs_rho = std::abs(rep.spearman) - kSlack;
  const double obs_tau = std::abs(rep.kendall) - kSlack;
  std::int64_t hits_rho = 0, hits_tau = 0;
  const auto total = static_cast<std::int64_t>(permutations);

#pragma omp parallel reduction(+ : hits_rho, hits_tau)
  {
    std::vector<double> shuffled(predicted.begin(), predicted.end());
    std::vector<double> shuffled_ranks(rank_p);
    std::vector<std::size_t> perm(predicted.size());
#pragma omp for schedule(static)
    for (std::int64_t p = 0; p < total; ++p) {
      auto engine = make_engine({seed, static_cast<std::uint64_t>(p)});
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), engine);
      for (std::size_t i = 0; i < perm.size(); ++i) {
        shuffled[i] = predicted[perm[i]];
        shuffled_ranks[i] = rank_p[perm[i]];
      }
      if (std::abs(spearman_from_ranks(rank_h, shuffled_ranks)) >= obs_rho) ++hits_rho;
      if (std::abs(kendall_tau_b(human, shuffled)) >= obs_tau) ++hits_tau;
    }
  }
  rep.p_spearman = static_cast<double>(hits_rho + 1) / static_cast<double>(permutations + 1);
  rep.p_kendall = static_cast<double>(hits_tau + 1) / static_cast<double>(permutations + 1);
  return rep;
}

std::map<std::string, double> mos_aggregate(const std::map<std::string, std::vector<int>>& ratings) {
  std::map<std::string, double> out;
  for (const auto& [condition, list] : ratings) {
    if (list.empty()) throw Error(ErrorKind::Arity, "condition '" + condition + "' has no ratings");
    long sum = 0;
    for (int r : list) {
      if (r < 1 || r > 5) {
        throw Error(ErrorKind::Data, "rating " + std::to_string(r) + " for condition '" + condition +
                                         "' is outside 1..5");
      }
      sum += r;
    }
    out[condition] = static_cast<double>(sum) / static_cast<double>(list.size());
  }
  return out;
}

}  // namespace swdist
