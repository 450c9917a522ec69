#pragma once

#include <array>
#include <span>
#include <vector>

#include "papml/classifiers/spec.hpp"
#include "papml/dataset.hpp"

namespace papml {

struct GnbModel {
  std::array<double, 2> log_prior{};               // indexed by BinaryLabel
  std::array<std::vector<double>, 2> mean;         // per label, per feature
  std::array<std::vector<double>, 2> variance;     // population, floored
  double var_floor = 1e-9;
};

GnbModel fit_gnb(const FeatureTable& train, const Params& params = {});

// log p(x, label) = log prior + sum of per-feature Gaussian log densities
double gnb_log_joint(const GnbModel& model, BinaryLabel label, std::span<const double> x);

// posterior of the abnormal class; complements to 1 with the normal one
double gnb_posterior_abnormal(const GnbModel& model, std::span<const double> x);

BinaryLabel predict_gnb(const GnbModel& model, std::span<const double> x);

}  // namespace papml
