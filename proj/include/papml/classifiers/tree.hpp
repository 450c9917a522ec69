#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "papml/classifiers/spec.hpp"
#include "papml/dataset.hpp"
#include "papml/rng.hpp"

namespace papml {

// Shannon entropy in bits, with 0*log(0) = 0.
double entropy(std::span<const std::uint64_t> counts);

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

// Highest information-gain (feature, threshold) over midpoints of sorted
// distinct values. Ties (within 1e-12) break to the lowest feature index,
// then the lowest threshold. nullopt when no split has positive gain or
// min_samples_leaf cannot be honored.
std::optional<SplitChoice> best_split(const FeatureTable& table,
                                      std::span<const std::size_t> indices,
                                      std::span<const std::size_t> feature_subset,
                                      std::size_t min_samples_leaf = 1);

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  BinaryLabel label = BinaryLabel::Normal;
  std::array<std::uint64_t, 2> counts{};  // training distribution at the node
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

TreeModel fit_tree(const FeatureTable& train, const Params& params);

// Forest hook: restricts candidates to max_features randomly drawn features
// per split when rng is given (0 = all features).
TreeModel fit_tree_on(const FeatureTable& table, std::vector<std::size_t> indices,
                      std::size_t max_depth, std::size_t min_samples_leaf,
                      std::size_t max_features, Rng* rng);

BinaryLabel predict_tree(const TreeModel& model, std::span<const double> x);

}  // namespace papml
