#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "papml/classifiers/tree.hpp"
#include "papml/common.hpp"
#include "papml/surrogate.hpp"

using namespace papml;

TEST_CASE("entropy in bits") {
  CHECK(entropy(std::vector<std::uint64_t>{4, 4}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(entropy(std::vector<std::uint64_t>{8, 0}) == 0.0);
  CHECK(entropy(std::vector<std::uint64_t>{6, 2}) == doctest::Approx(0.8113).epsilon(1e-4));
  CHECK(entropy(std::vector<std::uint64_t>{0, 0}) == 0.0);
}

namespace {

FeatureTable one_dim(const std::vector<std::pair<double, BinaryLabel>>& points) {
  FeatureTable t;
  t.column_names = {"x"};
  for (const auto& [v, label] : points) {
    t.add(Sample{{v},
                 label == BinaryLabel::Normal ? CellClass::Columnar : CellClass::MildDysplasia,
                 label});
  }
  return t;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

// exhaustive (feature, threshold) enumeration with entropies recounted from
// scratch for every candidate
std::optional<SplitChoice> oracle_best_split(const FeatureTable& t,
                                             const std::vector<std::size_t>& indices,
                                             std::size_t min_leaf) {
  std::optional<SplitChoice> best;
  for (std::size_t f = 0; f < t.n_features(); ++f) {
    std::vector<double> values;
    for (std::size_t i : indices) values.push_back(t.rows[i].features[f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      const double threshold = 0.5 * (values[v] + values[v + 1]);
      std::array<std::uint64_t, 2> left{}, right{}, parent{};
      for (std::size_t i : indices) {
        const auto label = std::size_t(t.rows[i].label);
        parent[label]++;
        (t.rows[i].features[f] <= threshold ? left : right)[label]++;
      }
      const double ln = double(left[0] + left[1]), rn = double(right[0] + right[1]);
      if (ln < double(min_leaf) || rn < double(min_leaf)) continue;
      const double gain =
          entropy(parent) - (ln * entropy(left) + rn * entropy(right)) / (ln + rn);
      if (gain > 1e-12 && (!best || gain > best->gain + 1e-12)) {
        best = SplitChoice{f, threshold, gain};
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("the textbook 1-d split lands at 5.0 with gain 1") {
  const FeatureTable t = one_dim({{1.0, BinaryLabel::Normal},
                                  {2.0, BinaryLabel::Normal},
                                  {8.0, BinaryLabel::Abnormal},
                                  {9.0, BinaryLabel::Abnormal}});
  const auto indices = iota_indices(4);
  const std::vector<std::size_t> features{0};
  const auto split = best_split(t, indices, features);
  REQUIRE(split.has_value());
  CHECK(split->feature == 0);
  CHECK(split->threshold == doctest::Approx(5.0));
  CHECK(split->gain == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a pure node yields no split") {
  const FeatureTable t =
      one_dim({{1.0, BinaryLabel::Normal}, {2.0, BinaryLabel::Normal}, {3.0, BinaryLabel::Normal}});
  const auto indices = iota_indices(3);
  const std::vector<std::size_t> features{0};
  CHECK_FALSE(best_split(t, indices, features).has_value());
}

TEST_CASE("best_split equals exhaustive enumeration on random 50-sample tables") {
  Rng rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    FeatureTable t;
    t.column_names = {"a", "b", "c"};
    for (int i = 0; i < 50; ++i) {
      Sample s;
      // small alphabet so duplicate values and ties happen
      s.features = {double(rng.below(6)), double(rng.below(4)), rng.gaussian()};
      s.cell_class = rng.uniform() < 0.5 ? CellClass::Columnar : CellClass::MildDysplasia;
      s.label = to_binary(s.cell_class);
      t.add(std::move(s));
    }
    const auto indices = iota_indices(50);
    const std::vector<std::size_t> features{0, 1, 2};
    const std::size_t min_leaf = 1 + rng.below(3);
    const auto got = best_split(t, indices, features, min_leaf);
    const auto want = oracle_best_split(t, indices, min_leaf);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      CHECK(got->feature == want->feature);
      CHECK(got->threshold == doctest::Approx(want->threshold).epsilon(1e-12));
      CHECK(got->gain == doctest::Approx(want->gain).epsilon(1e-9));
    }
  }
}

TEST_CASE("consistent data is memorized at unlimited depth") {
  const FeatureTable t = synth_blobs(40, 4, 1.5, 77);  // overlapping but consistent
  const TreeModel model = fit_tree(t, {});
  for (const Sample& s : t.rows) {
    CHECK(predict_tree(model, s.features) == s.label);
  }
  // every internal node carries positive-gain children structure
  for (const TreeNode& node : model.nodes) {
    if (node.feature >= 0) {
      CHECK(node.left >= 0);
      CHECK(node.right >= 0);
    } else {
      CHECK(node.counts[0] + node.counts[1] > 0);
    }
  }
}

TEST_CASE("max_depth 1 produces exactly the best stump") {
  const FeatureTable t = synth_blobs(30, 3, 2.0, 5);
  const TreeModel stump = fit_tree(t, {{"max_depth", 1}});
  REQUIRE(stump.nodes.size() == 3);
  const auto indices = iota_indices(t.size());
  std::vector<std::size_t> features(3);
  std::iota(features.begin(), features.end(), std::size_t{0});
  const auto split = best_split(t, indices, features);
  REQUIRE(split.has_value());
  CHECK(std::size_t(stump.nodes[0].feature) == split->feature);
  CHECK(stump.nodes[0].threshold == doctest::Approx(split->threshold));
  CHECK(stump.nodes[1].feature == -1);
  CHECK(stump.nodes[2].feature == -1);
}

TEST_CASE("min_samples_leaf bounds every leaf") {
  const FeatureTable t = synth_blobs(25, 2, 1.0, 19);
  const TreeModel model = fit_tree(t, {{"min_samples_leaf", 8}});
  for (const TreeNode& node : model.nodes) {
    if (node.feature == -1) {
      CHECK(node.counts[0] + node.counts[1] >= 8);
    }
  }
}

TEST_CASE("the surrogate table's root split has positive gain") {
  const FeatureTable t = surrogate_feature_table(3);
  const auto indices = iota_indices(t.size());
  std::vector<std::size_t> features(t.n_features());
  std::iota(features.begin(), features.end(), std::size_t{0});
  const auto split = best_split(t, indices, features);
  REQUIRE(split.has_value());
  CHECK(split->gain > 0.0);
}
