#include "papml/classifiers/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "papml/common.hpp"

namespace papml {

double entropy(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

constexpr double kGainEps = 1e-12;

double weighted_children_entropy(std::uint64_t ln, std::uint64_t la, std::uint64_t rn,
                                 std::uint64_t ra) {
  const std::array<std::uint64_t, 2> left{ln, la}, right{rn, ra};
  const double nl = static_cast<double>(ln + la);
  const double nr = static_cast<double>(rn + ra);
  return (nl * entropy(left) + nr * entropy(right)) / (nl + nr);
}

}  // namespace

std::optional<SplitChoice> best_split(const FeatureTable& table,
                                      std::span<const std::size_t> indices,
                                      std::span<const std::size_t> feature_subset,
                                      std::size_t min_samples_leaf) {
  const std::size_t n = indices.size();
  if (n < 2 * min_samples_leaf || n < 2) return std::nullopt;

  std::array<std::uint64_t, 2> parent{};
  for (std::size_t i : indices) parent[static_cast<std::size_t>(table.rows[i].label)]++;
  const double parent_entropy = entropy(parent);
  if (parent[0] == 0 || parent[1] == 0) return std::nullopt;  // pure node

  std::optional<SplitChoice> best;
  std::vector<std::pair<double, BinaryLabel>> column(n);

  for (std::size_t f : feature_subset) {
    for (std::size_t i = 0; i < n; ++i) {
      const Sample& s = table.rows[indices[i]];
      column[i] = {s.features[f], s.label};
    }
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::uint64_t ln = 0, la = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (column[i].second == BinaryLabel::Normal) ++ln;
      else ++la;
      if (column[i].first == column[i + 1].first) continue;  // not a boundary
      const std::size_t left_n = i + 1;
      const std::size_t right_n = n - left_n;
      if (left_n < min_samples_leaf || right_n < min_samples_leaf) continue;
      const double gain = parent_entropy -
                          weighted_children_entropy(ln, la, parent[0] - ln, parent[1] - la);
      if (gain > kGainEps && (!best || gain > best->gain + kGainEps)) {
        best = SplitChoice{f, 0.5 * (column[i].first + column[i + 1].first), gain};
      }
    }
  }
  return best;
}

namespace {

struct PendingNode {
  std::int32_t slot;
  std::vector<std::size_t> indices;
  std::size_t depth;
};

std::vector<std::size_t> sample_features(std::size_t d, std::size_t max_features, Rng* rng) {
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (rng == nullptr || max_features == 0 || max_features >= d) return all;
  // partial Fisher-Yates, then sort for the deterministic tie-break order
  for (std::size_t i = 0; i < max_features; ++i) {
    std::swap(all[i], all[i + rng->below(d - i)]);
  }
  all.resize(max_features);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

TreeModel fit_tree_on(const FeatureTable& table, std::vector<std::size_t> indices,
                      std::size_t max_depth, std::size_t min_samples_leaf,
                      std::size_t max_features, Rng* rng) {
  if (indices.empty()) throw ValidationError("fit_tree: empty training set");
  TreeModel model;
  std::vector<PendingNode> stack;
  model.nodes.emplace_back();
  stack.push_back({0, std::move(indices), 0});

  while (!stack.empty()) {
    PendingNode node = std::move(stack.back());
    stack.pop_back();

    std::array<std::uint64_t, 2> counts{};
    for (std::size_t i : node.indices) counts[static_cast<std::size_t>(table.rows[i].label)]++;

    TreeNode& slot = model.nodes[static_cast<std::size_t>(node.slot)];
    slot.counts = counts;
    slot.label = counts[1] >= counts[0] ? BinaryLabel::Abnormal : BinaryLabel::Normal;

    const bool depth_capped = max_depth > 0 && node.depth >= max_depth;
    std::optional<SplitChoice> split;
    if (!depth_capped) {
      const auto features = sample_features(table.n_features(), max_features, rng);
      split = best_split(table, node.indices, features, min_samples_leaf);
    }
    if (!split) continue;  // leaf

    std::vector<std::size_t> left, right;
    for (std::size_t i : node.indices) {
      (table.rows[i].features[split->feature] <= split->threshold ? left : right).push_back(i);
    }

    const auto left_slot = static_cast<std::int32_t>(model.nodes.size());
    model.nodes.emplace_back();
    model.nodes.emplace_back();
    TreeNode& parent = model.nodes[static_cast<std::size_t>(node.slot)];
    parent.feature = static_cast<std::int32_t>(split->feature);
    parent.threshold = split->threshold;
    parent.left = left_slot;
    parent.right = left_slot + 1;
    stack.push_back({left_slot, std::move(left), node.depth + 1});
    stack.push_back({left_slot + 1, std::move(right), node.depth + 1});
  }
  return model;
}

TreeModel fit_tree(const FeatureTable& train, const Params& raw_params) {
  if (train.rows.empty()) throw ValidationError("fit_tree: empty training set");
  const Params params = validate_params(ClassifierKind::DecisionTree, raw_params);
  std::vector<std::size_t> indices(train.size());
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  return fit_tree_on(train, std::move(indices), param_size(params, "max_depth"),
                     param_size(params, "min_samples_leaf"), 0, nullptr);
}

BinaryLabel predict_tree(const TreeModel& model, std::span<const double> x) {
  std::size_t at = 0;
  while (model.nodes[at].feature >= 0) {
    const TreeNode& node = model.nodes[at];
    const auto f = static_cast<std::size_t>(node.feature);
    if (f >= x.size()) throw ValidationError("predict_tree: dimension mismatch");
    at = static_cast<std::size_t>(x[f] <= node.threshold ? node.left : node.right);
  }
  return model.nodes[at].label;
}

}  // namespace papml
