#include "papml/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "papml/common.hpp"
#include "papml/parallel.hpp"
#include "papml/rng.hpp"

namespace papml {

std::vector<ClassifierSpec> expand(const ParamGrid& grid, ClassifierKind kind) {
  const auto schema = param_schema(kind);
  for (const auto& [name, values] : grid.axes) {
    const bool known = std::any_of(schema.begin(), schema.end(),
                                   [&](const ParamInfo& i) { return name == i.name; });
    if (!known) {
      throw ValidationError("grid axis '" + name + "' is not a parameter of '" +
                            std::string(kind_name(kind)) + "'");
    }
    if (values.empty()) throw ValidationError("grid axis '" + name + "' is empty");
  }

  std::vector<ClassifierSpec> specs;
  specs.push_back(ClassifierSpec{kind, {}});
  for (const auto& [name, values] : grid.axes) {
    std::vector<ClassifierSpec> next;
    next.reserve(specs.size() * values.size());
    for (const ClassifierSpec& base : specs) {
      for (double v : values) {
        ClassifierSpec s = base;
        s.params[name] = v;
        next.push_back(std::move(s));
      }
    }
    specs = std::move(next);
  }
  for (ClassifierSpec& s : specs) s.params = validate_params(kind, s.params);
  return specs;
}

std::vector<std::vector<std::size_t>> kfold(const std::vector<BinaryLabel>& labels,
                                            std::size_t k, std::uint64_t seed, bool stratified) {
  if (k < 2) throw ValidationError("kfold: k must be >= 2");
  if (labels.empty()) throw ValidationError("kfold: empty dataset");

  std::vector<std::vector<std::size_t>> strata;
  if (stratified) {
    strata.assign(2, {});
    for (std::size_t i = 0; i < labels.size(); ++i) {
      strata[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    for (const auto& s : strata) {
      if (s.size() < k) {
        throw ValidationError("kfold: k = " + std::to_string(k) +
                              " exceeds smallest class count " + std::to_string(s.size()));
      }
    }
  } else {
    strata.assign(1, std::vector<std::size_t>(labels.size()));
    std::iota(strata[0].begin(), strata[0].end(), std::size_t{0});
    if (labels.size() < k) throw ValidationError("kfold: k exceeds dataset size");
  }

  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t s = 0; s < strata.size(); ++s) {
    Rng rng(derive_seed(seed, 0xf01d + s));
    rng.shuffle(strata[s]);
    for (std::size_t i = 0; i < strata[s].size(); ++i) {
      folds[i % k].push_back(strata[s][i]);
    }
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

namespace {

FeatureTable gather_rows(const FeatureTable& table,
                         const std::vector<std::vector<std::size_t>>& folds,
                         std::size_t fold_index, bool train_part) {
  FeatureTable out;
  out.column_names = table.column_names;
  if (train_part) {
    for (std::size_t f = 0; f < folds.size(); ++f) {
      if (f == fold_index) continue;
      for (std::size_t i : folds[f]) out.add(table.rows[i]);
    }
  } else {
    for (std::size_t i : folds[fold_index]) out.add(table.rows[i]);
  }
  return out;
}

}  // namespace

SearchReport search(const ParamGrid& grid, const FeatureTable& table, ClassifierKind kind,
                    const SearchOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  std::vector<ClassifierSpec> specs = expand(grid, kind);
  if (options.max_trials > 0 && specs.size() > options.max_trials) {
    specs.resize(options.max_trials);
  }

  const auto folds = kfold(table.labels(), options.folds, options.seed, true);

  std::vector<TrialResult> trials(specs.size());
  auto run_trial = [&](std::size_t ti) {
    TrialResult& trial = trials[ti];
    trial.grid_index = ti;
    trial.spec = specs[ti];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      double accuracy_sum = 0.0;
      for (std::size_t f = 0; f < folds.size(); ++f) {
        const FeatureTable train = gather_rows(table, folds, f, true);
        const FeatureTable eval = gather_rows(table, folds, f, false);
        const Classifier clf = Classifier::fit(specs[ti], train);
        const auto predictions = clf.predict(eval);
        const MetricsReport report = compute_metrics(confusion(predictions, eval.labels()));
        accuracy_sum += report.accuracy.value_or(0.0);
        trial.fold_metrics.push_back(report);

        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (options.trial_timeout_seconds > 0.0 && elapsed > options.trial_timeout_seconds &&
            f + 1 < folds.size()) {
          throw RuntimeError("trial timeout after fold " + std::to_string(f + 1));
        }
      }
      trial.mean_accuracy = accuracy_sum / static_cast<double>(folds.size());
    } catch (const std::exception& e) {
      trial.error = e.what();
      trial.mean_accuracy = 0.0;
    }
    if (options.record_times) {
      trial.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };

  if (options.parallel) {
    parallel_for(specs.size(), run_trial);
  } else {
    for (std::size_t i = 0; i < specs.size(); ++i) run_trial(i);
  }

  SearchReport report;
  report.leaderboard = std::move(trials);
  std::stable_sort(report.leaderboard.begin(), report.leaderboard.end(),
                   [](const TrialResult& a, const TrialResult& b) {
                     if (a.failed() != b.failed()) return !a.failed();
                     return a.mean_accuracy > b.mean_accuracy;
                   });
  if (report.leaderboard.empty() || report.leaderboard.front().failed()) {
    throw RuntimeError("search: every trial failed");
  }
  report.best = report.leaderboard.front().spec;
  if (options.record_times) {
    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  }
  return report;
}

nlohmann::json SearchReport::to_json() const {
  nlohmann::json trials = nlohmann::json::array();
  for (const TrialResult& t : leaderboard) {
    nlohmann::json folds = nlohmann::json::array();
    for (const MetricsReport& m : t.fold_metrics) folds.push_back(m.to_json());
    trials.push_back({{"grid_index", t.grid_index},
                      {"kind", std::string(kind_name(t.spec.kind))},
                      {"params", t.spec.params},
                      {"mean_accuracy", t.mean_accuracy},
                      {"wall_seconds", t.wall_seconds},
                      {"error", t.error},
                      {"folds", std::move(folds)}});
  }
  return {{"leaderboard", std::move(trials)},
          {"best", {{"kind", std::string(kind_name(best.kind))}, {"params", best.params}}},
          {"total_seconds", total_seconds}};
}

std::string SearchReport::to_csv() const {
  std::string out = "rank,grid_index,kind,params,mean_accuracy,wall_seconds,error\n";
  char buf[64];
  for (std::size_t r = 0; r < leaderboard.size(); ++r) {
    const TrialResult& t = leaderboard[r];
    std::string params;
    for (const auto& [name, value] : t.spec.params) {
      std::snprintf(buf, sizeof buf, "%s=%g", name.c_str(), value);
      if (!params.empty()) params += ' ';
      params += buf;
    }
    std::snprintf(buf, sizeof buf, "%zu,%zu,", r + 1, t.grid_index);
    out += buf;
    out += kind_name(t.spec.kind);
    out += ',' + params + ',';
    std::snprintf(buf, sizeof buf, "%.6f,%.3f,", t.mean_accuracy, t.wall_seconds);
    out += buf;
    out += t.error + "\n";
  }
  return out;
}

}  // namespace papml
