#pragma once

#include <span>
#include <vector>

#include "papml/classifiers/spec.hpp"
#include "papml/dataset.hpp"

namespace papml {

// (sum |a_i - b_i|^p)^(1/p); requires p >= 1 and equal dimensions.
double minkowski(std::span<const double> a, std::span<const double> b, double p);

// Lazy learner: stores the scaled training set verbatim.
struct KnnModel {
  std::size_t k = 9;
  double p = 2.0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> features;  // n x d, row-major
  std::vector<BinaryLabel> labels;

  std::span<const double> row(std::size_t i) const { return {features.data() + i * d, d}; }
};

KnnModel fit_knn(const FeatureTable& train, const Params& params);

// Exact scan over all stored rows; neighbor ranking by (distance, index),
// vote ties broken toward abnormal.
BinaryLabel predict_knn(const KnnModel& model, std::span<const double> x);

}  // namespace papml
