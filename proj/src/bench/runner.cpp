#include "papml/bench/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "papml/common.hpp"
#include "papml/parallel.hpp"

namespace papml {

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path.string());
  out << text;
  if (!out) throw RuntimeError("write failed: " + path.string());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MetricsReport score(const std::vector<BinaryLabel>& predictions,
                    const std::vector<BinaryLabel>& truth) {
  return compute_metrics(confusion(predictions, truth));
}

}  // namespace

ComparisonTable run_benchmark(const ExperimentConfig& config) {
  if (config.cnn_enabled && config.images_dir.empty()) {
    throw ValidationError("cnn is enabled but [data] images_dir is empty");
  }
  const FeatureTable table = load_feature_table(config.features_csv);
  const TableSplit split = stratified_split(table, config.split);

  // classical models fit on everything outside the test rows
  FeatureTable fit_rows = split.train;
  for (const Sample& s : split.validation.rows) fit_rows.add(s);
  const std::vector<BinaryLabel> test_truth = split.test.labels();

  ComparisonTable result;
  result.provenance.seed = config.split.seed;
  result.provenance.config_hash = config_hash(config);
  result.provenance.dataset_rows = table.size();
  result.provenance.features_csv = config.features_csv;
  result.provenance.images_dir = config.images_dir;

  std::vector<ModelColumn> classical(config.models.size());
  parallel_for(config.models.size(), [&](std::size_t mi) {
    const ClassifierKind kind = config.models[mi];
    ModelColumn& column = classical[mi];
    column.name = std::string(kind_display_name(kind));
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ClassifierSpec spec{kind, {}};
      const auto it = config.overrides.find(kind);
      if (it != config.overrides.end()) spec.params = it->second;
      const Classifier clf = Classifier::fit(spec, fit_rows);
      column.metrics = score(clf.predict(split.test), test_truth);
    } catch (const std::exception& e) {
      column.failed = true;
      column.error = e.what();
    }
    if (!config.repro) column.wall_seconds = seconds_since(t0);
  });
  result.columns = std::move(classical);

  TrainHistory cnn_history;
  if (config.cnn_enabled) {
    ModelColumn train_col, test_col;
    train_col.name = "CNN (train)";
    test_col.name = "CNN (test)";
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const ImageDataset images = load_image_dir(config.images_dir, config.cnn.image_size);
      result.provenance.image_count = images.size();
      TrainResult trained = train_cnn(config.cnn, images);
      cnn_history = trained.history;

      auto truth_of = [&](const std::vector<std::size_t>& idx) {
        std::vector<BinaryLabel> t;
        t.reserve(idx.size());
        for (std::size_t i : idx) t.push_back(images.labels[i]);
        return t;
      };
      const EvalStats on_train = evaluate_cnn(trained.network, images, trained.split.train,
                                              config.cnn.batch_size);
      const EvalStats on_test =
          evaluate_cnn(trained.network, images, trained.split.test, config.cnn.batch_size);
      train_col.metrics = score(on_train.predictions, truth_of(trained.split.train));
      test_col.metrics = score(on_test.predictions, truth_of(trained.split.test));
    } catch (const std::exception& e) {
      train_col.failed = test_col.failed = true;
      train_col.error = test_col.error = e.what();
    }
    if (!config.repro) {
      const double elapsed = seconds_since(t0);
      train_col.wall_seconds = test_col.wall_seconds = elapsed;
    }
    result.columns.push_back(std::move(train_col));
    result.columns.push_back(std::move(test_col));
  }

  fs::create_directories(config.out_dir);
  write_text(fs::path(config.out_dir) / "run.json", result.to_json().dump(2) + "\n");
  for (const std::string& format : config.formats) {
    const std::string ext = format == "markdown" ? "md" : format;
    write_text(fs::path(config.out_dir) / ("report." + ext), result.render(format));
  }
  if (config.cnn_enabled && !cnn_history.epochs.empty()) {
    if (config.repro) {
      for (EpochStats& e : cnn_history.epochs) e.seconds = 0.0;
    }
    cnn_history.to_csv((fs::path(config.out_dir) / "history.csv").string());
  }
  save_config(config, (fs::path(config.out_dir) / "config.ini").string());
  return result;
}

void rerender_run(const std::string& run_json_path, const std::string& out_dir,
                  const std::vector<std::string>& formats) {
  std::ifstream in(run_json_path);
  if (!in) throw ValidationError("cannot open " + run_json_path);
  nlohmann::json j;
  in >> j;
  const ComparisonTable table = ComparisonTable::from_json(j);
  fs::create_directories(out_dir);
  for (const std::string& format : formats) {
    const std::string ext = format == "markdown" ? "md" : format;
    write_text(fs::path(out_dir) / ("report." + ext), table.render(format));
  }
}

}  // namespace papml
