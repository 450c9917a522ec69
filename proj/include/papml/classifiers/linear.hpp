#pragma once

#include <span>
#include <vector>

#include "papml/classifiers/spec.hpp"
#include "papml/dataset.hpp"

namespace papml {

// Numerically stable logistic function; no overflow for any finite z.
double sigmoid(double z);

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
};

// Full-batch gradient descent on L2-regularized cross-entropy. Expects
// scaled features. loss_history, when given, receives the regularized loss
// at the start of each epoch. Aborts with RuntimeError if the loss goes
// non-finite.
LogRegModel fit_logreg(const FeatureTable& train, const Params& params,
                       std::vector<double>* loss_history = nullptr);

double logreg_margin(const LogRegModel& model, std::span<const double> x);
double logreg_proba(const LogRegModel& model, std::span<const double> x);
BinaryLabel predict_logreg(const LogRegModel& model, std::span<const double> x);

}  // namespace papml
