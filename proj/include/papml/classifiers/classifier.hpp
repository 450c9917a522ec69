#pragma once

#include <optional>
#include <span>
#include <variant>

#include <json.hpp>

#include "papml/classifiers/boosting.hpp"
#include "papml/classifiers/forest.hpp"
#include "papml/classifiers/knn.hpp"
#include "papml/classifiers/linear.hpp"
#include "papml/classifiers/naive_bayes.hpp"
#include "papml/classifiers/svm.hpp"
#include "papml/classifiers/tree.hpp"

namespace papml {

// Uniform fit/predict over the seven classifier kinds. Distance, margin,
// and gradient based models (knn, svm, logreg) get a z-score scaler fitted
// on the training rows; tree-based models and naive Bayes see raw features.
// Fitted classifiers are immutable and safe for concurrent predict.
class Classifier {
 public:
  Classifier() = default;

  static Classifier fit(const ClassifierSpec& spec, const FeatureTable& train);

  BinaryLabel predict(std::span<const double> features) const;
  std::vector<BinaryLabel> predict(const FeatureTable& table) const;

  // abnormal-class probability for kinds that define one
  // (logreg, gnb, gboost, rforest); nullopt otherwise
  std::optional<double> predict_proba(std::span<const double> features) const;

  ClassifierKind kind() const { return spec_.kind; }
  const ClassifierSpec& spec() const { return spec_; }
  const Scaler& scaler() const { return scaler_; }
  std::size_t n_features() const { return n_features_; }

  template <typename Model>
  const Model& model() const {
    return std::get<Model>(model_);
  }

  // versioned JSON form; round-trips to a predictively identical model
  nlohmann::json to_json() const;
  static Classifier from_json(const nlohmann::json& j);

  static bool wants_scaling(ClassifierKind kind);

 private:
  ClassifierSpec spec_;
  Scaler scaler_;  // kind None for models that consume raw features
  std::size_t n_features_ = 0;
  std::variant<std::monostate, LogRegModel, KnnModel, SvmModel, GnbModel, TreeModel, ForestModel,
               GbModel>
      model_;
};

void save_classifier(const Classifier& clf, const std::string& path);
Classifier load_classifier(const std::string& path);

}  // namespace papml
