#include "papml/classifiers/forest.hpp"

#include <cmath>
#include <numeric>

#include "papml/common.hpp"
#include "papml/parallel.hpp"

namespace papml {

std::size_t ForestModel::abnormal_votes(std::span<const double> x) const {
  std::size_t votes = 0;
  for (const TreeModel& tree : trees) {
    votes += predict_tree(tree, x) == BinaryLabel::Abnormal;
  }
  return votes;
}

ForestModel fit_forest(const FeatureTable& train, const Params& raw_params) {
  if (train.rows.empty()) throw ValidationError("fit_forest: empty training set");
  const Params params = validate_params(ClassifierKind::RandomForest, raw_params);
  const std::size_t n_trees = param_size(params, "n_trees");
  const std::size_t max_depth = param_size(params, "max_depth");
  const std::size_t min_leaf = param_size(params, "min_samples_leaf");
  const bool bootstrap = param(params, "bootstrap") != 0.0;

  std::size_t max_features = param_size(params, "max_features");
  if (max_features == 0) {
    max_features = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(train.n_features()))));
  }

  ForestModel model;
  model.seed = static_cast<std::uint64_t>(param(params, "seed"));
  model.max_features = max_features;
  model.trees.resize(n_trees);

  const std::size_t n = train.size();
  parallel_for(n_trees, [&](std::size_t t) {
    Rng rng(derive_seed(model.seed, t));
    std::vector<std::size_t> indices(n);
    if (bootstrap) {
      for (std::size_t i = 0; i < n; ++i) indices[i] = rng.below(n);
    } else {
      std::iota(indices.begin(), indices.end(), std::size_t{0});
    }
    model.trees[t] =
        fit_tree_on(train, std::move(indices), max_depth, min_leaf, max_features, &rng);
  });
  return model;
}

BinaryLabel predict_forest(const ForestModel& model, std::span<const double> x) {
  const std::size_t votes = model.abnormal_votes(x);
  return 2 * votes >= model.trees.size() ? BinaryLabel::Abnormal : BinaryLabel::Normal;
}

double forest_proba(const ForestModel& model, std::span<const double> x) {
  return static_cast<double>(model.abnormal_votes(x)) / static_cast<double>(model.trees.size());
}

}  // namespace papml
