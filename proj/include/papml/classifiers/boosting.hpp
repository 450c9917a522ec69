#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "papml/classifiers/spec.hpp"
#include "papml/dataset.hpp"

namespace papml {

// Optimal leaf weight for the regularized second-order objective: -G/(H+lambda).
double gb_leaf_weight(double grad_sum, double hess_sum, double lambda);

// Gain of splitting a node into (L, R):
//   0.5 * [GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)] - gamma
// Gains <= 0 are pruned by the tree builder.
double gb_split_gain(double grad_left, double hess_left, double grad_right, double hess_right,
                     double lambda, double gamma);

struct GbNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double weight = 0.0;  // unshrunk leaf value
};

struct GbTree {
  std::vector<GbNode> nodes;
  double value(std::span<const double> x) const;
};

struct GbModel {
  double base_score = 0.0;  // log-odds prior
  double eta = 0.1;
  std::vector<GbTree> trees;

  // base + eta * sum of tree outputs
  double margin(std::span<const double> x) const;
};

// Logistic-loss boosting with exact greedy splits; split search runs in
// parallel over features. loss_history, when given, receives the training
// logloss after 0, 1, ..., n_rounds rounds.
GbModel fit_gboost(const FeatureTable& train, const Params& params,
                   std::vector<double>* loss_history = nullptr);

double gboost_proba(const GbModel& model, std::span<const double> x);
BinaryLabel predict_gboost(const GbModel& model, std::span<const double> x);

}  // namespace papml
