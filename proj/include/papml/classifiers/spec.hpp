#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace papml {

enum class ClassifierKind {
  LogReg = 0,
  Knn,
  Svm,
  Gnb,
  DecisionTree,
  RandomForest,
  GradientBoost,
};

inline constexpr std::size_t kNumClassifierKinds = 7;

std::string_view kind_name(ClassifierKind kind);
std::string_view kind_display_name(ClassifierKind kind);
std::optional<ClassifierKind> parse_kind(std::string_view token);

// All hyperparameters are numeric; integral ones are validated to hold
// whole values. Unknown names are rejected up front so a typo cannot
// silently fall back to a default.
using Params = std::map<std::string, double>;

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::Knn;
  Params params;

  bool operator==(const ClassifierSpec&) const = default;
};

struct ParamInfo {
  const char* name;
  double def;
  double lo;
  double hi;
  bool integral;
};

std::span<const ParamInfo> param_schema(ClassifierKind kind);

// Returns a copy with defaults filled in; throws ValidationError for
// unknown names, out-of-range or non-integral values.
Params validate_params(ClassifierKind kind, const Params& params);

inline double param(const Params& p, const std::string& name) { return p.at(name); }
inline std::size_t param_size(const Params& p, const std::string& name) {
  return static_cast<std::size_t>(p.at(name));
}

}  // namespace papml
