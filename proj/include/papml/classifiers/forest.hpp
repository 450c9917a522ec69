#pragma once

#include <span>
#include <vector>

#include "papml/classifiers/tree.hpp"

namespace papml {

struct ForestModel {
  std::vector<TreeModel> trees;
  std::uint64_t seed = 0;
  std::size_t max_features = 0;

  std::size_t abnormal_votes(std::span<const double> x) const;
};

// Bootstrap-resampled trees with per-split feature subsampling, fit in
// parallel. Tree t draws from derive_seed(seed, t), so results do not
// depend on the worker count.
ForestModel fit_forest(const FeatureTable& train, const Params& params);

BinaryLabel predict_forest(const ForestModel& model, std::span<const double> x);
double forest_proba(const ForestModel& model, std::span<const double> x);

}  // namespace papml
