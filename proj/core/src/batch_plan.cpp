#include "unimotion/batch_plan.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "unimotion/datasets.hpp"
#include "unimotion/errors.hpp"

namespace unimotion {

void BatchPlanConfig::validate() const {
  if (weights.empty()) throw ValidationError("batch plan needs at least one dataset");
  double total = 0.0;
  for (const auto& [tag, w] : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("weight of '" + tag + "' must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError("batch plan weights must not all be zero");
  if (!(all_probability >= 0.0 && all_probability <= 1.0)) {
    throw ValidationError("'all' replacement probability must lie in [0, 1]");
  }
}

BatchPlanConfig BatchPlanConfig::defaults() {
  BatchPlanConfig c;
  for (const auto& d : standard_datasets()) c.weights[d.tag] = d.weight;
  return c;
}

BatchPlanConfig BatchPlanConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  BatchPlanConfig c;
  try {
    const auto j = nlohmann::json::parse(in);
    c.weights = j.at("weights").get<std::map<std::string, double>>();
    c.all_probability = j.value("all_probability", kDefaultAllReplacement);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, e.what());
  }
  c.validate();
  return c;
}

std::vector<PlannedSample> batch_plan(const BatchPlanConfig& config, std::size_t n,
                                      std::uint64_t seed) {
  config.validate();
  if (n < 1) throw ValidationError("batch plan size must be at least 1");
  std::vector<std::string> tags;
  std::vector<double> weights;
  for (const auto& [tag, w] : config.weights) {
    tags.push_back(tag);
    weights.push_back(w);
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<PlannedSample> plan;
  plan.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PlannedSample s;
    s.dataset = tags[pick(rng)];
    s.effective = uniform(rng) < config.all_probability ? std::string(kAllDataset) : s.dataset;
    plan.push_back(std::move(s));
  }
  return plan;
}

}  // namespace unimotion
