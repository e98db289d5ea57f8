#include "soar/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "soar/error.hpp"

namespace soar {

std::string_view to_string(RateScheme scheme) {
  switch (scheme) {
    case RateScheme::kConstant: return "constant";
    case RateScheme::kLinear: return "linear";
    case RateScheme::kExponential: return "exponential";
  }
  return "unknown";
}

std::string_view to_string(LoadDistribution dist) {
  switch (dist) {
    case LoadDistribution::kUniform: return "uniform";
    case LoadDistribution::kPowerLaw: return "powerlaw";
    case LoadDistribution::kUnit: return "unit";
    case LoadDistribution::kExplicit: return "explicit";
  }
  return "unknown";
}

std::string_view to_string(UseCase use_case) {
  switch (use_case) {
    case UseCase::kNone: return "none";
    case UseCase::kWordCount: return "wordcount";
    case UseCase::kGradient: return "gradient";
  }
  return "unknown";
}

std::optional<RateScheme> parse_rate_scheme(std::string_view name) {
  for (auto s : {RateScheme::kConstant, RateScheme::kLinear, RateScheme::kExponential}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

std::optional<LoadDistribution> parse_load_distribution(std::string_view name) {
  for (auto d : {LoadDistribution::kUniform, LoadDistribution::kPowerLaw, LoadDistribution::kUnit,
                 LoadDistribution::kExplicit}) {
    if (name == to_string(d)) return d;
  }
  if (name == "power-law" || name == "power_law") return LoadDistribution::kPowerLaw;
  return std::nullopt;
}

std::optional<UseCase> parse_use_case(std::string_view name) {
  for (auto u : {UseCase::kNone, UseCase::kWordCount, UseCase::kGradient}) {
    if (name == to_string(u)) return u;
  }
  return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

double rate_for_level(RateScheme scheme, int level) {
  switch (scheme) {
    case RateScheme::kConstant: return 1.0;
    case RateScheme::kLinear: return static_cast<double>(level);
    case RateScheme::kExponential: return std::ldexp(1.0, level - 1);
  }
  return 1.0;
}

/// Inverse-CDF sampler over 1..weights.size().
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& weights) : cdf_(weights.size()) {
    std::partial_sum(weights.begin(), weights.end(), cdf_.begin());
    for (double& c : cdf_) c /= cdf_.back();
  }

  std::size_t operator()(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1) + 1;
  }

 private:
  std::vector<double> cdf_;
};

constexpr int kPowerLawMin = 1;
constexpr int kPowerLawMax = 63;
constexpr double kPowerLawMean = 5.0;
constexpr double kPowerLawVariance = 97.1;

double powerlaw_weight(int x, PowerLawShape shape) {
  return std::pow(static_cast<double>(x) + shape.shift, -shape.exponent);
}

std::pair<double, double> powerlaw_moments(PowerLawShape shape) {
  double weight = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (int x = kPowerLawMin; x <= kPowerLawMax; ++x) {
    const double w = powerlaw_weight(x, shape);
    weight += w;
    m1 += w * x;
    m2 += w * x * x;
  }
  const double mean = m1 / weight;
  return {mean, m2 / weight - mean * mean};
}

// Exponent giving mean 5 for a fixed shift; the mean falls as the exponent grows.
double exponent_for_mean(double shift) {
  double lo = 0.0;
  double hi = 8.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (powerlaw_moments({mid, shift}).first > kPowerLawMean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

const DiscreteSampler& powerlaw_sampler() {
  static const DiscreteSampler sampler = [] {
    const PowerLawShape shape = powerlaw_shape();
    std::vector<double> weights;
    for (int x = kPowerLawMin; x <= kPowerLawMax; ++x) weights.push_back(powerlaw_weight(x, shape));
    return DiscreteSampler(weights);
  }();
  return sampler;
}

}  // namespace

TreeNetwork apply_rate_scheme(const TreeNetwork& tree, RateScheme scheme) {
  auto edges = tree.edges();
  std::unordered_map<std::string, Load> loads;
  std::unordered_map<std::string, bool> available;
  for (NodeIndex v = 0; v < tree.size(); ++v) {
    edges[v].rate = rate_for_level(scheme, tree.height() - tree.depth(v) + 1);
    loads[tree.id(v)] = tree.load(v);
    available[tree.id(v)] = tree.available(v);
  }
  return build_tree(edges, tree.id(tree.root()), loads, available);
}

TreeNetwork gen_complete_binary(int n, RateScheme scheme) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw Error(ErrorCode::kBadSize,
                "btnet(" + std::to_string(n) + ") needs n = 2^(h+1) (destination included)");
  }
  const int switches = n - 1;
  const int height = static_cast<int>(std::lround(std::log2(n))) - 1;
  std::vector<EdgeSpec> edges;
  edges.reserve(static_cast<std::size_t>(switches));
  for (int v = 0; v < switches; ++v) {
    const int depth = static_cast<int>(std::floor(std::log2(v + 1)));
    EdgeSpec e;
    e.child = std::to_string(v);
    if (v > 0) e.parent = std::to_string((v - 1) / 2);
    e.rate = rate_for_level(scheme, height - depth + 1);
    edges.push_back(std::move(e));
  }
  return build_tree(edges, "0");
}

TreeNetwork gen_rpa(int n, std::uint64_t seed) {
  if (n < 3) throw Error(ErrorCode::kBadSize, "rpa(n) needs n >= 3");
  const int switches = n - 1;
  Rng rng(seed);
  // Each switch appears once per incident link.
  std::vector<int> endpoints{0};
  std::vector<EdgeSpec> edges;
  edges.push_back({"0", std::nullopt, 1.0});
  for (int u = 1; u < switches; ++u) {
    std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
    const int v = endpoints[pick(rng)];
    edges.push_back({std::to_string(u), std::to_string(v), 1.0});
    endpoints.push_back(v);
    endpoints.push_back(u);
  }
  std::unordered_map<std::string, Load> loads;
  for (const auto& e : edges) loads[e.child] = 1;
  return build_tree(edges, "0", loads);
}

PowerLawShape powerlaw_shape() {
  static const PowerLawShape shape = [] {
    // With the mean pinned, the variance falls as the shift grows.
    double lo = -0.99;
    double hi = 2.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (powerlaw_moments({exponent_for_mean(mid), mid}).second > kPowerLawVariance) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double shift = 0.5 * (lo + hi);
    return PowerLawShape{exponent_for_mean(shift), shift};
  }();
  return shape;
}

Load draw_load(LoadDistribution dist, Rng& rng) {
  switch (dist) {
    case LoadDistribution::kUniform:
      return std::uniform_int_distribution<Load>(4, 6)(rng);
    case LoadDistribution::kPowerLaw:
      return static_cast<Load>(powerlaw_sampler()(rng));
    case LoadDistribution::kUnit:
      return 1;
    case LoadDistribution::kExplicit:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "explicit loads cannot be drawn");
}

std::vector<Load> gen_loads(const TreeNetwork& tree, LoadDistribution dist, std::uint64_t seed) {
  if (dist == LoadDistribution::kExplicit) {
    return {tree.loads().begin(), tree.loads().end()};
  }
  if (dist == LoadDistribution::kUnit) return std::vector<Load>(tree.size(), 1);
  Rng rng(seed);
  std::vector<Load> loads(tree.size(), 0);
  for (NodeIndex v = 0; v < tree.size(); ++v) {
    if (tree.is_leaf(v)) loads[v] = draw_load(dist, rng);
  }
  return loads;
}

namespace {

std::vector<std::uint32_t> read_corpus_tokens(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kBadParams, "cannot read corpus '" + path + "'");
  std::unordered_map<std::string, std::uint32_t> vocabulary;
  std::vector<std::uint32_t> tokens;
  std::string word;
  while (in >> word) {
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto [it, _] = vocabulary.emplace(word, static_cast<std::uint32_t>(vocabulary.size()));
    tokens.push_back(it->second);
  }
  if (tokens.empty()) throw Error(ErrorCode::kBadParams, "corpus '" + path + "' has no words");
  return tokens;
}

void normalize_keys(KeySet& keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
}

}  // namespace

PayloadModel gen_payloads(const TreeNetwork& tree, UseCase use_case, const PayloadParams& params,
                          std::uint64_t seed) {
  if (params.entry_bytes == 0) throw Error(ErrorCode::kBadParams, "entry_bytes must be positive");
  PayloadModel model;
  model.entry_bytes = params.entry_bytes;
  const auto servers = static_cast<std::size_t>(tree.total_load());
  Rng rng(seed);

  switch (use_case) {
    case UseCase::kNone:
      model.kind = PayloadKind::kUnit;
      return model;

    case UseCase::kWordCount: {
      model.kind = PayloadKind::kWordCount;
      model.server_payloads.resize(servers);
      if (params.corpus_path) {
        const auto tokens = read_corpus_tokens(*params.corpus_path);
        if (servers > 0) {
          for (std::size_t t = 0; t < tokens.size(); ++t) {
            model.server_payloads[t % servers].push_back(tokens[t]);
          }
        }
      } else {
        if (params.vocabulary_size == 0 || params.words_per_server == 0 || params.zipf_exponent < 0) {
          throw Error(ErrorCode::kBadParams, "word count needs a vocabulary and words per server");
        }
        std::vector<double> weights(params.vocabulary_size);
        for (std::uint32_t r = 0; r < params.vocabulary_size; ++r) {
          weights[r] = std::pow(static_cast<double>(r + 1), -params.zipf_exponent);
        }
        const DiscreteSampler zipf(weights);
        for (auto& keys : model.server_payloads) {
          keys.reserve(params.words_per_server);
          for (std::uint32_t w = 0; w < params.words_per_server; ++w) {
            keys.push_back(static_cast<std::uint32_t>(zipf(rng) - 1));
          }
        }
      }
      for (auto& keys : model.server_payloads) normalize_keys(keys);
      return model;
    }

    case UseCase::kGradient: {
      if (params.feature_count == 0 || !(params.dropout >= 0.0 && params.dropout < 1.0)) {
        throw Error(ErrorCode::kBadParams, "gradient needs features and a dropout in [0, 1)");
      }
      model.kind = PayloadKind::kGradient;
      const auto support = static_cast<std::size_t>(
          std::lround(static_cast<double>(params.feature_count) * (1.0 - params.dropout)));
      std::vector<std::uint32_t> features(params.feature_count);
      std::iota(features.begin(), features.end(), 0U);
      model.server_payloads.resize(servers);
      for (auto& keys : model.server_payloads) {
        keys.reserve(support);
        std::sample(features.begin(), features.end(), std::back_inserter(keys), support, rng);
      }
      return model;
    }
  }
  throw Error(ErrorCode::kBadParams, "unknown use case");
}

CapacityLedger::CapacityLedger(std::vector<std::int64_t> capacity)
    : capacity_(std::move(capacity)), residual_(capacity_) {
  for (std::int64_t a : capacity_) {
    if (a < 0) throw Error(ErrorCode::kInvalidArgument, "aggregation capacity must be >= 0");
  }
}

std::vector<bool> CapacityLedger::available(const TreeNetwork& tree) const {
  std::vector<bool> out(tree.size());
  for (NodeIndex v = 0; v < tree.size(); ++v) out[v] = tree.available(v) && residual_[v] > 0;
  return out;
}

void CapacityLedger::consume(const Placement& blue) {
  for (NodeIndex v : blue.nodes()) {
    if (v >= residual_.size() || residual_[v] <= 0) {
      throw Error(ErrorCode::kBlueNotAvailable, "switch has no residual aggregation capacity");
    }
  }
  for (NodeIndex v : blue.nodes()) {
    if (residual_[v] != kUnboundedCapacity) --residual_[v];
  }
  history_.push_back(blue);
}

OnlineResult run_online(const TreeNetwork& tree, std::span<const std::vector<Load>> workloads,
                        std::span<const int> budgets, std::span<const std::int64_t> capacities,
                        StrategyKind strategy) {
  if (budgets.size() != 1 && budgets.size() != workloads.size()) {
    throw Error(ErrorCode::kInvalidArgument, "need one budget or one per workload");
  }
  std::vector<std::int64_t> capacity;
  if (capacities.size() == 1) {
    capacity.assign(tree.size(), capacities[0]);
  } else if (capacities.size() == tree.size()) {
    capacity.assign(capacities.begin(), capacities.end());
  } else {
    throw Error(ErrorCode::kInvalidArgument, "need one capacity or one per switch");
  }

  OnlineResult result{{}, CapacityLedger(std::move(capacity))};
  for (std::size_t t = 0; t < workloads.size(); ++t) {
    const int k = budgets.size() == 1 ? budgets[0] : budgets[t];
    const auto mask = result.ledger.available(tree);
    const TreeNetwork instance = tree.with_loads(workloads[t]).with_availability(mask);
    OnlineStep step;
    step.placement = place(strategy, instance, k);
    step.cost = simulate_reduce(instance, step.placement).total;
    step.all_red_cost = simulate_reduce(instance, Placement{}).total;
    step.normalized = step.all_red_cost > 0.0 ? step.cost / step.all_red_cost : 1.0;
    result.ledger.consume(step.placement);
    result.steps.push_back(std::move(step));
  }
  return result;
}

std::vector<std::vector<Load>> gen_online_workloads(const TreeNetwork& tree, int count,
                                                    std::uint64_t seed) {
  std::vector<std::vector<Load>> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int t = 0; t < count; ++t) {
    const std::uint64_t stream = derive_seed(seed, static_cast<std::uint64_t>(t));
    Rng coin(stream);
    const auto dist = std::bernoulli_distribution(0.5)(coin) ? LoadDistribution::kUniform
                                                             : LoadDistribution::kPowerLaw;
    out.push_back(gen_loads(tree, dist, derive_seed(stream, 1)));
  }
  return out;
}

}  // namespace soar
