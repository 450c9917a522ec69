#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "papml/classifiers/classifier.hpp"
#include "papml/metrics.hpp"

namespace papml {

// Candidate values per parameter name. std::map keeps axes in lexicographic
// name order, which fixes the expansion order.
struct ParamGrid {
  std::map<std::string, std::vector<double>> axes;

  bool operator==(const ParamGrid&) const = default;
};

// Cartesian product in axis order, last axis fastest; an empty grid expands
// to the single all-defaults spec. Axis names are validated against the
// kind's schema.
std::vector<ClassifierSpec> expand(const ParamGrid& grid, ClassifierKind kind);

// k disjoint stratified folds covering every row; deterministic per seed.
std::vector<std::vector<std::size_t>> kfold(const std::vector<BinaryLabel>& labels,
                                            std::size_t k, std::uint64_t seed,
                                            bool stratified = true);

struct TrialResult {
  std::size_t grid_index = 0;
  ClassifierSpec spec;
  std::vector<MetricsReport> fold_metrics;
  double mean_accuracy = 0.0;
  double wall_seconds = 0.0;
  std::string error;  // non-empty marks a failed trial

  bool failed() const { return !error.empty(); }
};

struct SearchOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  bool parallel = true;
  std::size_t max_trials = 0;          // 0 = no cap
  double trial_timeout_seconds = 0.0;  // 0 = no timeout; checked between folds
  bool record_times = true;            // false zeroes wall clocks (repro mode)
};

struct SearchReport {
  std::vector<TrialResult> leaderboard;  // sorted: accuracy desc, grid order on ties;
                                         // failed trials last in grid order
  ClassifierSpec best;
  double total_seconds = 0.0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Cross-validated grid search. Trials run independently (parallel over a
// static partition when enabled) and are gathered back into grid order
// before ranking, so the leaderboard does not depend on the worker count.
SearchReport search(const ParamGrid& grid, const FeatureTable& table, ClassifierKind kind,
                    const SearchOptions& options = {});

}  // namespace papml
