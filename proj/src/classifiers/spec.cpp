#include "papml/classifiers/spec.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "papml/common.hpp"

namespace papml {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array kLogRegSchema = {
    ParamInfo{"lr", 0.1, 1e-12, 100.0, false},
    ParamInfo{"epochs", 500, 1, 1e9, true},
    ParamInfo{"l2", 1e-4, 0.0, kInf, false},
};

constexpr std::array kKnnSchema = {
    ParamInfo{"k", 9, 1, 1e9, true},
    ParamInfo{"p", 2.0, 1.0, kInf, false},
};

constexpr std::array kSvmSchema = {
    ParamInfo{"C", 1.0, 1e-12, kInf, false},
    ParamInfo{"gamma", 0.0, 0.0, kInf, false},  // 0 = 1/(d * var)
    ParamInfo{"tol", 1e-3, 1e-12, 1.0, false},
    ParamInfo{"max_passes", 100, 1, 1e9, true},
    ParamInfo{"kernel", 0, 0, 1, true},  // 0 = rbf, 1 = linear
};

constexpr std::array kGnbSchema = {
    ParamInfo{"var_floor", 1e-9, 0.0, kInf, false},
};

constexpr std::array kTreeSchema = {
    ParamInfo{"max_depth", 0, 0, 1e9, true},  // 0 = unbounded
    ParamInfo{"min_samples_leaf", 1, 1, 1e9, true},
};

constexpr std::array kForestSchema = {
    ParamInfo{"n_trees", 100, 1, 1e6, true},
    ParamInfo{"max_features", 0, 0, 1e9, true},  // 0 = ceil(sqrt(d))
    ParamInfo{"max_depth", 0, 0, 1e9, true},
    ParamInfo{"min_samples_leaf", 1, 1, 1e9, true},
    ParamInfo{"bootstrap", 1, 0, 1, true},
    ParamInfo{"seed", 0, 0, 9.007199254740992e15, true},
};

constexpr std::array kBoostSchema = {
    ParamInfo{"n_rounds", 100, 1, 1e6, true},
    ParamInfo{"eta", 0.1, 0.0, 1.0, false},
    ParamInfo{"lambda", 1.0, 0.0, kInf, false},
    ParamInfo{"gamma", 0.0, 0.0, kInf, false},
    ParamInfo{"max_depth", 4, 1, 60, true},
};

}  // namespace

std::string_view kind_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::LogReg: return "logreg";
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::Svm: return "svm";
    case ClassifierKind::Gnb: return "gnb";
    case ClassifierKind::DecisionTree: return "dtree";
    case ClassifierKind::RandomForest: return "rforest";
    case ClassifierKind::GradientBoost: return "gboost";
  }
  return "unknown";
}

std::string_view kind_display_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::LogReg: return "Logistic Regression";
    case ClassifierKind::Knn: return "k-NN";
    case ClassifierKind::Svm: return "SVM";
    case ClassifierKind::Gnb: return "Naive Bayes";
    case ClassifierKind::DecisionTree: return "Decision Tree";
    case ClassifierKind::RandomForest: return "Random Forest";
    case ClassifierKind::GradientBoost: return "Gradient Boosting";
  }
  return "unknown";
}

std::optional<ClassifierKind> parse_kind(std::string_view token) {
  for (std::size_t i = 0; i < kNumClassifierKinds; ++i) {
    const auto kind = static_cast<ClassifierKind>(i);
    if (token == kind_name(kind)) return kind;
  }
  if (token == "xgboost") return ClassifierKind::GradientBoost;  // common alias
  return std::nullopt;
}

std::span<const ParamInfo> param_schema(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::LogReg: return kLogRegSchema;
    case ClassifierKind::Knn: return kKnnSchema;
    case ClassifierKind::Svm: return kSvmSchema;
    case ClassifierKind::Gnb: return kGnbSchema;
    case ClassifierKind::DecisionTree: return kTreeSchema;
    case ClassifierKind::RandomForest: return kForestSchema;
    case ClassifierKind::GradientBoost: return kBoostSchema;
  }
  return {};
}

Params validate_params(ClassifierKind kind, const Params& params) {
  const auto schema = param_schema(kind);
  Params out;
  for (const ParamInfo& info : schema) out[info.name] = info.def;

  for (const auto& [name, value] : params) {
    const ParamInfo* info = nullptr;
    for (const ParamInfo& i : schema) {
      if (name == i.name) {
        info = &i;
        break;
      }
    }
    if (info == nullptr) {
      throw ValidationError("unknown parameter '" + name + "' for classifier '" +
                            std::string(kind_name(kind)) + "'");
    }
    if (!std::isfinite(value) && !(value == info->hi)) {
      throw ValidationError("parameter '" + name + "' is not finite");
    }
    if (value < info->lo || value > info->hi) {
      throw ValidationError("parameter '" + name + "' = " + std::to_string(value) +
                            " outside [" + std::to_string(info->lo) + ", " +
                            std::to_string(info->hi) + "]");
    }
    if (info->integral && value != std::floor(value)) {
      throw ValidationError("parameter '" + name + "' must be integral, got " +
                            std::to_string(value));
    }
    out[name] = value;
  }
  return out;
}

}  // namespace papml
