#include "papml/classifiers/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "papml/classifiers/linear.hpp"
#include "papml/common.hpp"
#include "papml/parallel.hpp"

namespace papml {

double gb_leaf_weight(double grad_sum, double hess_sum, double lambda) {
  return -grad_sum / (hess_sum + lambda);
}

double gb_split_gain(double grad_left, double hess_left, double grad_right, double hess_right,
                     double lambda, double gamma) {
  const double gl2 = grad_left * grad_left / (hess_left + lambda);
  const double gr2 = grad_right * grad_right / (hess_right + lambda);
  const double g = grad_left + grad_right;
  const double parent = g * g / (hess_left + hess_right + lambda);
  return 0.5 * (gl2 + gr2 - parent) - gamma;
}

double GbTree::value(std::span<const double> x) const {
  std::size_t at = 0;
  while (nodes[at].feature >= 0) {
    const GbNode& node = nodes[at];
    at = static_cast<std::size_t>(
        x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
  }
  return nodes[at].weight;
}

double GbModel::margin(std::span<const double> x) const {
  double sum = 0.0;
  for (const GbTree& tree : trees) sum += tree.value(x);
  return base_score + eta * sum;
}

double gboost_proba(const GbModel& model, std::span<const double> x) {
  return sigmoid(model.margin(x));
}

BinaryLabel predict_gboost(const GbModel& model, std::span<const double> x) {
  return model.margin(x) >= 0.0 ? BinaryLabel::Abnormal : BinaryLabel::Normal;
}

namespace {

struct GbSplit {
  bool valid = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  double grad_left = 0.0, hess_left = 0.0;
};

constexpr double kGainEps = 1e-12;

// best boundary for a single feature, exact greedy over sorted values
GbSplit best_feature_split(const FeatureTable& table, std::span<const std::size_t> indices,
                           std::span<const double> grad, std::span<const double> hess,
                           double grad_total, double hess_total, std::size_t feature,
                           double lambda, double gamma) {
  const std::size_t n = indices.size();
  std::vector<std::size_t> order(indices.begin(), indices.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.rows[a].features[feature] < table.rows[b].features[feature];
  });

  GbSplit best;
  best.feature = feature;
  double gl = 0.0, hl = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    gl += grad[order[i]];
    hl += hess[order[i]];
    const double v = table.rows[order[i]].features[feature];
    const double next = table.rows[order[i + 1]].features[feature];
    if (v == next) continue;
    const double gain = gb_split_gain(gl, hl, grad_total - gl, hess_total - hl, lambda, gamma);
    if (gain > kGainEps && (!best.valid || gain > best.gain + kGainEps)) {
      best.valid = true;
      best.threshold = 0.5 * (v + next);
      best.gain = gain;
      best.grad_left = gl;
      best.hess_left = hl;
    }
  }
  return best;
}

struct GbBuilder {
  const FeatureTable& table;
  std::span<const double> grad;
  std::span<const double> hess;
  double lambda;
  double gamma;
  std::size_t max_depth;
  std::vector<GbNode> nodes;

  std::int32_t build(std::vector<std::size_t> indices, double grad_total, double hess_total,
                     std::size_t depth) {
    const auto slot = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();

    GbSplit best;
    if (depth < max_depth && indices.size() >= 2) {
      const std::size_t d = table.n_features();
      std::vector<GbSplit> per_feature(d);
      parallel_for(
          d,
          [&](std::size_t f) {
            per_feature[f] = best_feature_split(table, indices, grad, hess, grad_total,
                                                hess_total, f, lambda, gamma);
          },
          2);
      for (const GbSplit& s : per_feature) {
        if (s.valid && (!best.valid || s.gain > best.gain + kGainEps)) best = s;
      }
    }

    if (!best.valid) {
      nodes[static_cast<std::size_t>(slot)].weight =
          gb_leaf_weight(grad_total, hess_total, lambda);
      return slot;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t i : indices) {
      (table.rows[i].features[best.feature] <= best.threshold ? left : right).push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();

    const auto left_slot = build(std::move(left), best.grad_left, best.hess_left, depth + 1);
    const auto right_slot = build(std::move(right), grad_total - best.grad_left,
                                  hess_total - best.hess_left, depth + 1);
    GbNode& node = nodes[static_cast<std::size_t>(slot)];
    node.feature = static_cast<std::int32_t>(best.feature);
    node.threshold = best.threshold;
    node.left = left_slot;
    node.right = right_slot;
    return slot;
  }
};

double mean_logloss(std::span<const double> margins, std::span<const double> targets) {
  double loss = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const double m = margins[i];
    loss += std::max(m, 0.0) - m * targets[i] + std::log1p(std::exp(-std::abs(m)));
  }
  return loss / static_cast<double>(margins.size());
}

}  // namespace

GbModel fit_gboost(const FeatureTable& train, const Params& raw_params,
                   std::vector<double>* loss_history) {
  if (train.rows.empty()) throw ValidationError("fit_gboost: empty training set");
  const Params params = validate_params(ClassifierKind::GradientBoost, raw_params);
  const std::size_t n_rounds = param_size(params, "n_rounds");
  const double lambda = param(params, "lambda");
  const double gamma = param(params, "gamma");
  const std::size_t max_depth = param_size(params, "max_depth");

  const std::size_t n = train.size();
  std::vector<double> targets(n);
  double positive = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    targets[i] = train.rows[i].label == BinaryLabel::Abnormal ? 1.0 : 0.0;
    positive += targets[i];
  }
  const double rate =
      std::clamp(positive / static_cast<double>(n), 1e-12, 1.0 - 1e-12);

  GbModel model;
  model.eta = param(params, "eta");
  model.base_score = std::log(rate / (1.0 - rate));
  if (loss_history) loss_history->clear();

  std::vector<double> margins(n, model.base_score);
  if (loss_history) loss_history->push_back(mean_logloss(margins, targets));
  if (positive == 0.0 || positive == static_cast<double>(n)) {
    return model;  // single-class input: prior only
  }

  std::vector<double> grad(n), hess(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  for (std::size_t round = 0; round < n_rounds; ++round) {
    double grad_total = 0.0, hess_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margins[i]);
      grad[i] = p - targets[i];
      hess[i] = p * (1.0 - p);
      grad_total += grad[i];
      hess_total += hess[i];
    }

    GbBuilder builder{train, grad, hess, lambda, gamma, max_depth, {}};
    builder.build(all, grad_total, hess_total, 0);

    GbTree tree{std::move(builder.nodes)};
    for (std::size_t i = 0; i < n; ++i) {
      margins[i] += model.eta * tree.value(train.rows[i].features);
    }
    model.trees.push_back(std::move(tree));

    const double loss = mean_logloss(margins, targets);
    if (!std::isfinite(loss)) {
      throw RuntimeError("fit_gboost: non-finite loss at round " + std::to_string(round));
    }
    if (loss_history) loss_history->push_back(loss);
  }
  return model;
}

}  // namespace papml
