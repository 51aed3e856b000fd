// Copyright 2026 The NALM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nalm/disaggregation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "nalm/error.hpp"
#include "nalm/log.hpp"
#include "nalm/random.hpp"

namespace nalm {
namespace {

// Runs job(i) for i in [0, count) on up to `threads` workers. The first
// exception is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
          try {
            job(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::size_t> bin_counts_of(const QuantileBinner& binner) {
  std::vector<std::size_t> counts(binner.dimension());
  for (std::size_t f = 0; f < counts.size(); ++f) counts[f] = binner.bin_count(f);
  return counts;
}

}  // namespace

std::string_view backend_name(Backend backend) {
  return backend == Backend::kForest ? "forest" : "margin";
}

Backend parse_backend(std::string_view name) {
  if (name == "forest") return Backend::kForest;
  if (name == "margin") return Backend::kMargin;
  throw ConfigError(fmt::format("unknown backend '{}' (forest|margin)", name));
}

void TrainConfig::validate() const {
  if (window < 1 || window % 2 == 0) {
    throw ConfigError(fmt::format("window must be odd and >= 1, got {}", window));
  }
  if (window > 255) throw ConfigError("window must be <= 255");
  if (forest.n_trees < 1) throw ConfigError("n_trees must be >= 1");
  if (forest.max_depth < 0) throw ConfigError("max_depth must be >= 0");
  if (forest.min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
  if (margin.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(margin.learning_rate > 0.0) || !std::isfinite(margin.learning_rate)) {
    throw ConfigError("learning_rate must be > 0");
  }
  if (!(margin.regularization > 0.0) || !std::isfinite(margin.regularization)) {
    throw ConfigError("regularization must be > 0");
  }
}

std::vector<ApplianceId> DisaggregationModel::appliances() const {
  std::vector<ApplianceId> out;
  out.reserve(classifiers.size());
  for (const auto& c : classifiers) out.push_back(c.appliance);
  return out;
}

DisaggregationModel train(const PowerTrace& aggregate, const StateMask& labels,
                          const TrainConfig& config, TrainOptions options) {
  config.validate();
  if (labels.empty()) throw StructuralError("empty label set");
  if (aggregate.size() != labels.length()) {
    throw StructuralError(fmt::format("aggregate has {} samples, labels {}",
                                      aggregate.size(), labels.length()));
  }
  if (aggregate.partial()) {
    throw StructuralError("refusing to train on a partial day");
  }

  DisaggregationModel model;
  model.config = config;
  const FeatureMatrix features = build_feature_matrix(aggregate, config.window);
  model.binner = QuantileBinner::fit(features);
  model.standardizer = Standardizer::fit(features);
  const BinnedMatrix binned = model.binner.transform(features);
  const auto bin_counts = bin_counts_of(model.binner);
  FeatureMatrix standardized;
  if (config.backend == Backend::kMargin) {
    standardized = model.standardizer.transform(features);
  }

  const auto& rows = labels.rows();
  const std::size_t n = labels.length();
  std::vector<bool> constant(rows.size(), false);
  model.classifiers.resize(rows.size());
  std::vector<BinaryProblem> forest_problems(rows.size());
  std::vector<MarginProblem> margin_problems(rows.size());

  for (std::size_t a = 0; a < rows.size(); ++a) {
    const auto& row = rows[a];
    model.classifiers[a].appliance = row.appliance;
    const auto on = static_cast<std::size_t>(
        std::count(row.states.begin(), row.states.end(), true));
    if (on == 0 || on == n) {
      logger().warn("appliance '{}' is always {} in training; using a constant predictor",
                    row.appliance.name, on == 0 ? "OFF" : "ON");
      model.classifiers[a].classifier = ConstantClassifier{on == n};
      constant[a] = true;
      continue;
    }
    double weight[2] = {1.0, 1.0};
    if (config.class_weighting) {
      weight[0] = static_cast<double>(n) / (2.0 * static_cast<double>(n - on));
      weight[1] = static_cast<double>(n) / (2.0 * static_cast<double>(on));
    }
    forest_problems[a] = {&binned, bin_counts, &row.states, {weight[0], weight[1]}};
    margin_problems[a] = {&standardized, &binned, bin_counts, &row.states,
                          {weight[0], weight[1]}};
  }

  if (config.backend == Backend::kForest) {
    const auto trees = static_cast<std::size_t>(config.forest.n_trees);
    std::vector<std::vector<DecisionTree>> grown(rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (!constant[a]) grown[a].resize(trees);
    }
    parallel_for(rows.size() * trees, options.threads, [&](std::size_t job) {
      const std::size_t a = job / trees;
      const std::size_t t = job % trees;
      if (constant[a]) return;
      grown[a][t] = grow_tree(forest_problems[a], config.forest,
                              derive_seed(derive_seed(config.seed, a), t));
    });
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (!constant[a]) model.classifiers[a].classifier = Forest{std::move(grown[a])};
    }
  } else {
    std::vector<MarginClassifier> fitted(rows.size());
    parallel_for(rows.size(), options.threads, [&](std::size_t a) {
      if (constant[a]) return;
      fitted[a] = train_margin(margin_problems[a], config.margin,
                               derive_seed(config.seed, a))
                      .classifier;
    });
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (!constant[a]) model.classifiers[a].classifier = std::move(fitted[a]);
    }
  }
  return model;
}

StateMask predict(const DisaggregationModel& model, const PowerTrace& aggregate,
                  std::span<const std::string> only) {
  if (aggregate.size() != static_cast<std::size_t>(kSecondsPerDay)) {
    throw StructuralError(fmt::format(
        "prediction needs a full day of 86400 samples, got {}", aggregate.size()));
  }
  for (const auto& name : only) {
    const bool known = std::any_of(model.classifiers.begin(), model.classifiers.end(),
                                   [&](const auto& c) { return c.appliance.name == name; });
    if (!known) {
      throw StructuralError(fmt::format("model was not trained on appliance '{}'", name));
    }
  }
  if (aggregate.partial()) {
    logger().warn("predicting on a day flagged partial");
  }

  const FeatureMatrix features = build_feature_matrix(aggregate, model.config.window);
  if (features.cols != model.binner.dimension()) {
    throw StructuralError("model feature width does not match its window");
  }
  const BinnedMatrix binned = model.binner.transform(features);
  const std::size_t n = features.rows;
  const std::size_t d = features.cols;
  std::vector<std::uint8_t> bin_rows(n * d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) bin_rows[r * d + c] = binned.at(r, c);
  }
  FeatureMatrix standardized;
  const bool any_margin = std::any_of(
      model.classifiers.begin(), model.classifiers.end(), [](const auto& c) {
        return std::holds_alternative<MarginClassifier>(c.classifier);
      });
  if (any_margin) standardized = model.standardizer.transform(features);

  StateMask mask(aggregate.day(), n);
  for (const auto& [appliance, classifier] : model.classifiers) {
    if (!only.empty() && std::find(only.begin(), only.end(), appliance.name) == only.end()) {
      continue;
    }
    StateRow states(n, false);
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          for (std::size_t t = 0; t < n; ++t) {
            const std::span<const std::uint8_t> bins(bin_rows.data() + t * d, d);
            if constexpr (std::is_same_v<T, ConstantClassifier>) {
              states[t] = c.on;
            } else if constexpr (std::is_same_v<T, Forest>) {
              states[t] = c.predict(bins);
            } else {
              states[t] = c.predict(standardized.row(t), bins);
            }
          }
        },
        classifier);
    mask.insert(appliance, std::move(states));
  }
  return mask;
}

}  // namespace nalm
