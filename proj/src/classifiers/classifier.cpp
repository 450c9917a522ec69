#include "papml/classifiers/classifier.hpp"

#include <fstream>

#include "papml/common.hpp"

namespace papml {

namespace {
constexpr int kFormatVersion = 1;
}

bool Classifier::wants_scaling(ClassifierKind kind) {
  return kind == ClassifierKind::LogReg || kind == ClassifierKind::Knn ||
         kind == ClassifierKind::Svm;
}

Classifier Classifier::fit(const ClassifierSpec& spec, const FeatureTable& train) {
  Classifier clf;
  clf.spec_.kind = spec.kind;
  clf.spec_.params = validate_params(spec.kind, spec.params);
  clf.n_features_ = train.n_features();

  const FeatureTable* input = &train;
  FeatureTable scaled;
  if (wants_scaling(spec.kind)) {
    clf.scaler_ = Scaler::fit(train, ScalerKind::ZScore);
    scaled = clf.scaler_.transform(train);
    input = &scaled;
  } else {
    clf.scaler_ = Scaler::fit(train, ScalerKind::None);
  }

  switch (spec.kind) {
    case ClassifierKind::LogReg: clf.model_ = fit_logreg(*input, clf.spec_.params); break;
    case ClassifierKind::Knn: clf.model_ = fit_knn(*input, clf.spec_.params); break;
    case ClassifierKind::Svm: clf.model_ = fit_svm(*input, clf.spec_.params); break;
    case ClassifierKind::Gnb: clf.model_ = fit_gnb(*input, clf.spec_.params); break;
    case ClassifierKind::DecisionTree: clf.model_ = fit_tree(*input, clf.spec_.params); break;
    case ClassifierKind::RandomForest: clf.model_ = fit_forest(*input, clf.spec_.params); break;
    case ClassifierKind::GradientBoost: clf.model_ = fit_gboost(*input, clf.spec_.params); break;
  }
  return clf;
}

BinaryLabel Classifier::predict(std::span<const double> features) const {
  if (features.size() != n_features_) {
    throw ValidationError("predict: expected " + std::to_string(n_features_) + " features, got " +
                          std::to_string(features.size()));
  }
  std::vector<double> x;
  if (scaler_.kind() != ScalerKind::None) {
    x = scaler_.transform(features);
    features = x;
  }
  switch (spec_.kind) {
    case ClassifierKind::LogReg: return predict_logreg(model<LogRegModel>(), features);
    case ClassifierKind::Knn: return predict_knn(model<KnnModel>(), features);
    case ClassifierKind::Svm: return predict_svm(model<SvmModel>(), features);
    case ClassifierKind::Gnb: return predict_gnb(model<GnbModel>(), features);
    case ClassifierKind::DecisionTree: return predict_tree(model<TreeModel>(), features);
    case ClassifierKind::RandomForest: return predict_forest(model<ForestModel>(), features);
    case ClassifierKind::GradientBoost: return predict_gboost(model<GbModel>(), features);
  }
  throw RuntimeError("predict: model not fitted");
}

std::vector<BinaryLabel> Classifier::predict(const FeatureTable& table) const {
  std::vector<BinaryLabel> out;
  out.reserve(table.size());
  for (const Sample& s : table.rows) out.push_back(predict(s.features));
  return out;
}

std::optional<double> Classifier::predict_proba(std::span<const double> features) const {
  if (features.size() != n_features_) {
    throw ValidationError("predict_proba: dimension mismatch");
  }
  std::vector<double> x;
  if (scaler_.kind() != ScalerKind::None) {
    x = scaler_.transform(features);
    features = x;
  }
  switch (spec_.kind) {
    case ClassifierKind::LogReg: return logreg_proba(model<LogRegModel>(), features);
    case ClassifierKind::Gnb: return gnb_posterior_abnormal(model<GnbModel>(), features);
    case ClassifierKind::RandomForest: return forest_proba(model<ForestModel>(), features);
    case ClassifierKind::GradientBoost: return gboost_proba(model<GbModel>(), features);
    default: return std::nullopt;
  }
}

namespace {

using nlohmann::json;

json scaler_to_json(const Scaler& s) {
  return json{{"kind", std::string(scaler_kind_name(s.kind()))},
              {"offset", s.offsets()},
              {"scale", s.scales()},
              {"constant", s.constant_flags()}};
}

Scaler scaler_from_json(const json& j) {
  const std::string kind = j.at("kind");
  ScalerKind k = ScalerKind::None;
  if (kind == "zscore") k = ScalerKind::ZScore;
  else if (kind == "minmax") k = ScalerKind::MinMax;
  else if (kind != "none") throw ValidationError("unknown scaler kind: " + kind);
  return Scaler::from_parts(k, j.at("offset").get<std::vector<double>>(),
                            j.at("scale").get<std::vector<double>>(),
                            j.at("constant").get<std::vector<std::uint8_t>>());
}

json labels_to_json(const std::vector<BinaryLabel>& labels) {
  std::vector<int> v(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) v[i] = static_cast<int>(labels[i]);
  return json(v);
}

std::vector<BinaryLabel> labels_from_json(const json& j) {
  std::vector<BinaryLabel> out;
  for (const auto& v : j) out.push_back(static_cast<BinaryLabel>(v.get<int>()));
  return out;
}

json tree_to_json(const TreeModel& t) {
  json nodes = json::array();
  for (const TreeNode& n : t.nodes) {
    nodes.push_back({{"f", n.feature},
                     {"t", n.threshold},
                     {"l", n.left},
                     {"r", n.right},
                     {"label", static_cast<int>(n.label)},
                     {"counts", n.counts}});
  }
  return json{{"nodes", std::move(nodes)}};
}

TreeModel tree_from_json(const json& j) {
  TreeModel t;
  for (const auto& jn : j.at("nodes")) {
    TreeNode n;
    n.feature = jn.at("f");
    n.threshold = jn.at("t");
    n.left = jn.at("l");
    n.right = jn.at("r");
    n.label = static_cast<BinaryLabel>(jn.at("label").get<int>());
    const auto counts = jn.at("counts").get<std::vector<std::uint64_t>>();
    n.counts = {counts.at(0), counts.at(1)};
    t.nodes.push_back(std::move(n));
  }
  return t;
}

json gbtree_to_json(const GbTree& t) {
  json nodes = json::array();
  for (const GbNode& n : t.nodes) {
    nodes.push_back(
        {{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}, {"w", n.weight}});
  }
  return json{{"nodes", std::move(nodes)}};
}

GbTree gbtree_from_json(const json& j) {
  GbTree t;
  for (const auto& jn : j.at("nodes")) {
    GbNode n;
    n.feature = jn.at("f");
    n.threshold = jn.at("t");
    n.left = jn.at("l");
    n.right = jn.at("r");
    n.weight = jn.at("w");
    t.nodes.push_back(n);
  }
  return t;
}

struct ModelJsonWriter {
  json operator()(const std::monostate&) const { throw RuntimeError("unfitted classifier"); }
  json operator()(const LogRegModel& m) const {
    return {{"weights", m.weights}, {"bias", m.bias}};
  }
  json operator()(const KnnModel& m) const {
    return {{"k", m.k},       {"p", m.p},
            {"n", m.n},       {"d", m.d},
            {"features", m.features}, {"labels", labels_to_json(m.labels)}};
  }
  json operator()(const SvmModel& m) const {
    return {{"support_vectors", m.support_vectors},
            {"coeffs", m.coeffs},
            {"bias", m.bias},
            {"kernel", static_cast<int>(m.kernel)},
            {"gamma", m.gamma},
            {"C", m.c},
            {"converged", m.converged}};
  }
  json operator()(const GnbModel& m) const {
    return {{"log_prior", m.log_prior},
            {"mean", m.mean},
            {"variance", m.variance},
            {"var_floor", m.var_floor}};
  }
  json operator()(const TreeModel& m) const { return tree_to_json(m); }
  json operator()(const ForestModel& m) const {
    json trees = json::array();
    for (const TreeModel& t : m.trees) trees.push_back(tree_to_json(t));
    return {{"trees", std::move(trees)}, {"seed", m.seed}, {"max_features", m.max_features}};
  }
  json operator()(const GbModel& m) const {
    json trees = json::array();
    for (const GbTree& t : m.trees) trees.push_back(gbtree_to_json(t));
    return {{"base_score", m.base_score}, {"eta", m.eta}, {"trees", std::move(trees)}};
  }
};

}  // namespace

nlohmann::json Classifier::to_json() const {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = std::string(kind_name(spec_.kind));
  j["params"] = spec_.params;
  j["n_features"] = n_features_;
  j["scaler"] = scaler_to_json(scaler_);
  j["model"] = std::visit(ModelJsonWriter{}, model_);
  return j;
}

Classifier Classifier::from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kFormatVersion) {
    throw ValidationError("unsupported classifier format version");
  }
  const auto kind = parse_kind(j.at("kind").get<std::string>());
  if (!kind) throw ValidationError("unknown classifier kind in model file");

  Classifier clf;
  clf.spec_.kind = *kind;
  clf.spec_.params = j.at("params").get<Params>();
  clf.n_features_ = j.at("n_features");
  clf.scaler_ = scaler_from_json(j.at("scaler"));

  const json& m = j.at("model");
  switch (*kind) {
    case ClassifierKind::LogReg: {
      LogRegModel lm;
      lm.weights = m.at("weights").get<std::vector<double>>();
      lm.bias = m.at("bias");
      clf.model_ = std::move(lm);
      break;
    }
    case ClassifierKind::Knn: {
      KnnModel km;
      km.k = m.at("k");
      km.p = m.at("p");
      km.n = m.at("n");
      km.d = m.at("d");
      km.features = m.at("features").get<std::vector<double>>();
      km.labels = labels_from_json(m.at("labels"));
      clf.model_ = std::move(km);
      break;
    }
    case ClassifierKind::Svm: {
      SvmModel sm;
      sm.support_vectors = m.at("support_vectors").get<std::vector<std::vector<double>>>();
      sm.coeffs = m.at("coeffs").get<std::vector<double>>();
      sm.bias = m.at("bias");
      sm.kernel = static_cast<SvmKernel>(m.at("kernel").get<int>());
      sm.gamma = m.at("gamma");
      sm.c = m.at("C");
      sm.converged = m.at("converged");
      clf.model_ = std::move(sm);
      break;
    }
    case ClassifierKind::Gnb: {
      GnbModel gm;
      gm.log_prior = m.at("log_prior");
      gm.mean = m.at("mean");
      gm.variance = m.at("variance");
      gm.var_floor = m.at("var_floor");
      clf.model_ = std::move(gm);
      break;
    }
    case ClassifierKind::DecisionTree: clf.model_ = tree_from_json(m); break;
    case ClassifierKind::RandomForest: {
      ForestModel fm;
      for (const auto& t : m.at("trees")) fm.trees.push_back(tree_from_json(t));
      fm.seed = m.at("seed");
      fm.max_features = m.at("max_features");
      clf.model_ = std::move(fm);
      break;
    }
    case ClassifierKind::GradientBoost: {
      GbModel gm;
      gm.base_score = m.at("base_score");
      gm.eta = m.at("eta");
      for (const auto& t : m.at("trees")) gm.trees.push_back(gbtree_from_json(t));
      clf.model_ = std::move(gm);
      break;
    }
  }
  return clf;
}

void save_classifier(const Classifier& clf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write model file: " + path);
  out << clf.to_json().dump(2) << '\n';
  if (!out) throw RuntimeError("write failed: " + path);
}

Classifier load_classifier(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file: " + path);
  nlohmann::json j;
  in >> j;
  return Classifier::from_json(j);
}

}  // namespace papml
