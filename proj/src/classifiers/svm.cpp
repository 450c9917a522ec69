#include "papml/classifiers/svm.hpp"

#include <algorithm>
#include <cmath>

#include "papml/common.hpp"

namespace papml {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  if (a.size() != b.size()) throw ValidationError("rbf_kernel: dimension mismatch");
  if (gamma < 0.0) throw ValidationError("rbf_kernel: gamma must be >= 0");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::exp(-gamma * sq);
}

double linear_kernel(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("linear_kernel: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot;
}

double SvmModel::decision(std::span<const double> x) const {
  double f = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    const double k = kernel == SvmKernel::Rbf ? rbf_kernel(support_vectors[i], x, gamma)
                                              : linear_kernel(support_vectors[i], x);
    f += coeffs[i] * k;
  }
  return f;
}

BinaryLabel predict_svm(const SvmModel& model, std::span<const double> x) {
  return model.decision(x) >= 0.0 ? BinaryLabel::Abnormal : BinaryLabel::Normal;
}

namespace {

// state of one SMO run over the f(x) = sum alpha_i y_i K_i(x) + b convention
struct SmoState {
  std::size_t n = 0;
  double c = 1.0;
  double tol = 1e-3;
  std::vector<double> kernel;  // n x n
  std::vector<int> y;
  std::vector<double> alpha;
  std::vector<double> err;  // E_i = f(x_i) - y_i
  double b = 0.0;
  std::size_t rolling = 0;  // deterministic fallback scan offset

  double k(std::size_t i, std::size_t j) const { return kernel[i * n + j]; }

  bool violates_kkt(std::size_t i) const {
    const double r = static_cast<double>(y[i]) * err[i];
    return (r < -tol && alpha[i] < c) || (r > tol && alpha[i] > 0.0);
  }

  // dual objective restricted to the (i1, i2) pair along the constraint
  // line, used to resolve eta <= 0 steps at the box ends
  double pair_objective(std::size_t i1, std::size_t i2, double a1, double a2) const {
    const double y1 = y[i1], y2 = y[i2];
    const double g1 = err[i1] + y1 - b;  // kernel expansion at x1, old alphas
    const double g2 = err[i2] + y2 - b;
    const double v1 = g1 - y1 * alpha[i1] * k(i1, i1) - y2 * alpha[i2] * k(i1, i2);
    const double v2 = g2 - y1 * alpha[i1] * k(i1, i2) - y2 * alpha[i2] * k(i2, i2);
    return a1 + a2 -
           0.5 * (a1 * a1 * k(i1, i1) + a2 * a2 * k(i2, i2) +
                  2.0 * y1 * y2 * a1 * a2 * k(i1, i2)) -
           y1 * a1 * v1 - y2 * a2 * v2;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = alpha[i1], a2 = alpha[i2];
    const double y1 = y[i1], y2 = y[i2];
    const double e1 = err[i1], e2 = err[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c, c + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c);
      hi = std::min(c, a1 + a2);
    }
    if (lo >= hi) return false;

    const double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2_new;
    if (eta > 0.0) {
      a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      const double gamma_sum = a1 + s * a2;
      const double w_lo = pair_objective(i1, i2, gamma_sum - s * lo, lo);
      const double w_hi = pair_objective(i1, i2, gamma_sum - s * hi, hi);
      constexpr double kEps = 1e-12;
      if (w_lo > w_hi + kEps) a2_new = lo;
      else if (w_hi > w_lo + kEps) a2_new = hi;
      else return false;
    }
    constexpr double kStepEps = 1e-10;
    if (std::abs(a2_new - a2) < kStepEps * (a2_new + a2 + kStepEps)) return false;

    double a1_new = a1 + s * (a2 - a2_new);
    a1_new = std::clamp(a1_new, 0.0, c);

    const double d1 = y1 * (a1_new - a1);
    const double d2 = y2 * (a2_new - a2);
    const double b1 = b - e1 - d1 * k11 - d2 * k12;
    const double b2 = b - e2 - d1 * k12 - d2 * k22;
    double b_new;
    if (a1_new > 0.0 && a1_new < c) b_new = b1;
    else if (a2_new > 0.0 && a2_new < c) b_new = b2;
    else b_new = 0.5 * (b1 + b2);

    const double db = b_new - b;
    for (std::size_t j = 0; j < n; ++j) {
      err[j] += d1 * k(i1, j) + d2 * k(i2, j) + db;
    }
    alpha[i1] = a1_new;
    alpha[i2] = a2_new;
    b = b_new;
    return true;
  }

  bool examine(std::size_t i2) {
    if (!violates_kkt(i2)) return false;
    const double e2 = err[i2];

    // first choice: largest |E1 - E2| among non-bound points
    std::size_t best = n;
    double best_gap = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (alpha[j] > 0.0 && alpha[j] < c) {
        const double gap = std::abs(err[j] - e2);
        if (gap > best_gap) {
          best_gap = gap;
          best = j;
        }
      }
    }
    if (best < n && take_step(best, i2)) return true;

    // fallbacks: non-bound sweep, then full sweep, from a rolling offset
    const std::size_t start = rolling++ % n;
    for (std::size_t o = 0; o < n; ++o) {
      const std::size_t j = (start + o) % n;
      if (alpha[j] > 0.0 && alpha[j] < c && take_step(j, i2)) return true;
    }
    for (std::size_t o = 0; o < n; ++o) {
      const std::size_t j = (start + o) % n;
      if (take_step(j, i2)) return true;
    }
    return false;
  }
};

}  // namespace

SvmModel fit_svm(const FeatureTable& train, const Params& raw_params, SvmFitInfo* info) {
  if (train.rows.empty()) throw ValidationError("fit_svm: empty training set");
  const Params params = validate_params(ClassifierKind::Svm, raw_params);
  const std::size_t n = train.size();
  const std::size_t d = train.n_features();
  const auto kernel_kind = static_cast<SvmKernel>(param_size(params, "kernel"));
  const std::size_t max_passes = param_size(params, "max_passes");

  double gamma = param(params, "gamma");
  if (gamma <= 0.0) {
    // 1/(d * total feature variance), the scale-aware default
    double mean = 0.0, sq = 0.0;
    const double count = static_cast<double>(n * d);
    for (const Sample& s : train.rows) {
      for (double v : s.features) {
        mean += v;
        sq += v * v;
      }
    }
    mean /= count;
    const double var = sq / count - mean * mean;
    gamma = var > 0.0 ? 1.0 / (static_cast<double>(d) * var) : 1.0 / static_cast<double>(d);
  }

  SmoState smo;
  smo.n = n;
  smo.c = param(params, "C");
  smo.tol = param(params, "tol");
  smo.y.resize(n);
  smo.alpha.assign(n, 0.0);
  smo.err.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    smo.y[i] = train.rows[i].label == BinaryLabel::Abnormal ? 1 : -1;
    smo.err[i] = -static_cast<double>(smo.y[i]);  // f = 0 at the start
  }
  smo.kernel.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = kernel_kind == SvmKernel::Rbf
                           ? rbf_kernel(train.rows[i].features, train.rows[j].features, gamma)
                           : linear_kernel(train.rows[i].features, train.rows[j].features);
      smo.kernel[i * n + j] = k;
      smo.kernel[j * n + i] = k;
    }
  }

  std::size_t full_passes = 0;
  std::size_t total_passes = 0;
  const std::size_t total_cap = 50 * max_passes;
  bool converged = true;
  std::size_t changed = 0;
  bool examine_all = true;
  while (changed > 0 || examine_all) {
    if (examine_all && ++full_passes > max_passes) {
      converged = false;
      break;
    }
    if (++total_passes > total_cap) {
      converged = false;
      break;
    }
    changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (examine_all || (smo.alpha[i] > 0.0 && smo.alpha[i] < smo.c)) {
        changed += smo.examine(i);
      }
    }
    if (examine_all) examine_all = false;
    else if (changed == 0) examine_all = true;
  }
  if (converged) {
    // refresh the incrementally maintained error cache before judging KKT
    for (std::size_t i = 0; i < n; ++i) {
      double f = smo.b;
      for (std::size_t j = 0; j < n; ++j) {
        if (smo.alpha[j] > 0.0) f += smo.alpha[j] * static_cast<double>(smo.y[j]) * smo.k(j, i);
      }
      smo.err[i] = f - static_cast<double>(smo.y[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (smo.violates_kkt(i)) {
        converged = false;
        break;
      }
    }
  }

  SvmModel model;
  model.kernel = kernel_kind;
  model.gamma = gamma;
  model.c = smo.c;
  model.bias = smo.b;
  model.converged = converged;
  constexpr double kSvCut = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    if (smo.alpha[i] > kSvCut) {
      model.support_vectors.push_back(train.rows[i].features);
      model.coeffs.push_back(smo.alpha[i] * static_cast<double>(smo.y[i]));
    }
  }
  if (info) {
    info->alphas = smo.alpha;
    info->y = smo.y;
    info->full_passes = full_passes;
    info->converged = converged;
  }
  return model;
}

}  // namespace papml
