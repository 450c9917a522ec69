#pragma once

#include <span>
#include <vector>

#include "papml/classifiers/spec.hpp"
#include "papml/dataset.hpp"

namespace papml {

// exp(-gamma * ||a-b||^2)
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);
double linear_kernel(std::span<const double> a, std::span<const double> b);

enum class SvmKernel { Rbf = 0, Linear = 1 };

struct SvmModel {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> coeffs;  // alpha_i * y_i per support vector
  double bias = 0.0;
  SvmKernel kernel = SvmKernel::Rbf;
  double gamma = 0.05;
  double c = 1.0;
  bool converged = true;

  // f(x) = sum_i coeff_i K(sv_i, x) + bias; >= 0 predicts abnormal
  double decision(std::span<const double> x) const;
};

// Fit diagnostics exposed for convergence tests.
struct SvmFitInfo {
  std::vector<double> alphas;        // one per training row
  std::vector<int> y;                // +1 abnormal, -1 normal
  std::size_t full_passes = 0;
  bool converged = true;
};

// SMO: pairwise coordinate ascent on the dual with max-|E1-E2| second-choice
// heuristic and full-pass / violator-pass alternation. Expects scaled
// features. gamma <= 0 selects 1/(d * total feature variance).
SvmModel fit_svm(const FeatureTable& train, const Params& params, SvmFitInfo* info = nullptr);

BinaryLabel predict_svm(const SvmModel& model, std::span<const double> x);

}  // namespace papml
