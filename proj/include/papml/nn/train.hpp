#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "papml/dataset.hpp"
#include "papml/image.hpp"
#include "papml/nn/network.hpp"

namespace papml {

struct CnnConfig {
  std::size_t image_size = 64;
  std::size_t channels = 3;
  std::size_t conv_layers = 4;
  double dropout_rate = 0.4;
  std::size_t epochs = 50;
  double test_fraction = 0.15;
  double validation_fraction = 0.15;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::size_t dense_units = 256;
  std::uint64_t seed = 0;

  bool operator==(const CnnConfig&) const = default;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;

  void to_csv(const std::string& path) const;
};

struct TrainResult {
  Network network;  // weights from the best validation-accuracy epoch
  TrainHistory history;
  IndexSplit split;
  std::size_t best_epoch = 0;  // 1-based; 0 when epochs == 0
};

// conv3x3 stacks (32, 32, 64, 64, ... pattern) each followed by ReLU and a
// 2x2 pool, then flatten -> dropout -> dense+ReLU -> dense(1) -> sigmoid.
Network build_cnn(const CnnConfig& config);

// Narrow two-conv stack used for finite-difference verification; small
// enough that checking every parameter stays under a minute.
Network build_gradcheck_net(std::size_t image_size = 8, std::size_t channels = 3);

struct EvalStats {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<BinaryLabel> predictions;
};

// eval-mode pass over the given subset (p >= 0.5 predicts abnormal)
EvalStats evaluate_cnn(Network& net, const ImageDataset& data,
                       const std::vector<std::size_t>& indices, std::size_t batch_size = 32);

// Mini-batch Adam with a stratified split per the config fractions.
// Single-threaded history is bitwise reproducible per seed; loss going
// non-finite halts with a RuntimeError naming the epoch.
TrainResult train_cnn(const CnnConfig& config, const ImageDataset& data);

}  // namespace papml
