#include "papml/nn/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "papml/common.hpp"

namespace papml {

Network build_cnn(const CnnConfig& config) {
  if (config.conv_layers < 1) throw ValidationError("cnn: need at least one conv layer");

  std::size_t side = config.image_size;
  Network net;
  std::size_t in_ch = config.channels;
  for (std::size_t i = 0; i < config.conv_layers; ++i) {
    // 32, 32, 64, 64, 128, ... doubling every two layers
    const std::size_t out_ch = 32u << (i / 2);
    net.add(std::make_unique<Conv2d>(3, in_ch, out_ch));
    net.add(std::make_unique<Relu>());
    if (side % 2 != 0) {
      throw ValidationError("cnn: image size " + std::to_string(config.image_size) +
                            " does not survive " + std::to_string(config.conv_layers) +
                            " poolings");
    }
    net.add(std::make_unique<MaxPool2>());
    side /= 2;
    in_ch = out_ch;
  }
  net.add(std::make_unique<Flatten>());
  net.add(std::make_unique<Dropout>(config.dropout_rate));
  net.add(std::make_unique<Dense>(side * side * in_ch, config.dense_units));
  net.add(std::make_unique<Relu>());
  net.add(std::make_unique<Dense>(config.dense_units, 1));
  net.add(std::make_unique<Sigmoid>());
  return net;
}

Network build_gradcheck_net(std::size_t image_size, std::size_t channels) {
  if (image_size % 4 != 0) throw ValidationError("gradcheck net: image size must be /4");
  Network net;
  net.add(std::make_unique<Conv2d>(3, channels, 4));
  net.add(std::make_unique<Relu>());
  net.add(std::make_unique<MaxPool2>());
  net.add(std::make_unique<Conv2d>(3, 4, 6));
  net.add(std::make_unique<Relu>());
  net.add(std::make_unique<MaxPool2>());
  net.add(std::make_unique<Flatten>());
  net.add(std::make_unique<Dropout>(0.4));
  net.add(std::make_unique<Dense>(image_size / 4 * (image_size / 4) * 6, 8));
  net.add(std::make_unique<Relu>());
  net.add(std::make_unique<Dense>(8, 1));
  net.add(std::make_unique<Sigmoid>());
  return net;
}

namespace {

// gather (N,H,W,C) batch plus 0/1 targets
void gather_batch(const ImageDataset& data, const std::vector<std::size_t>& indices,
                  std::size_t begin, std::size_t end, Tensor* batch,
                  std::vector<double>* targets) {
  const Tensor& first = data.images[indices[begin]];
  const std::size_t image_elems = first.size();
  std::vector<std::size_t> shape{end - begin};
  for (std::size_t d : first.shape()) shape.push_back(d);
  *batch = Tensor(std::move(shape));
  targets->resize(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const Tensor& img = data.images[indices[i]];
    if (img.size() != image_elems) throw ValidationError("image set has mixed shapes");
    std::copy(img.data(), img.data() + image_elems, batch->data() + (i - begin) * image_elems);
    (*targets)[i - begin] = data.labels[indices[i]] == BinaryLabel::Abnormal ? 1.0 : 0.0;
  }
}

std::size_t count_correct(const Tensor& probs, const std::vector<double>& targets) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double predicted = probs[i] >= 0.5 ? 1.0 : 0.0;
    correct += predicted == targets[i];
  }
  return correct;
}

}  // namespace

EvalStats evaluate_cnn(Network& net, const ImageDataset& data,
                       const std::vector<std::size_t>& indices, std::size_t batch_size) {
  if (indices.empty()) throw ValidationError("evaluate_cnn: empty index set");
  EvalStats stats;
  stats.predictions.reserve(indices.size());
  ForwardContext ctx{false, nullptr};
  double loss_sum = 0.0;
  std::size_t correct = 0;
  Tensor batch;
  std::vector<double> targets;
  for (std::size_t begin = 0; begin < indices.size(); begin += batch_size) {
    const std::size_t end = std::min(indices.size(), begin + batch_size);
    gather_batch(data, indices, begin, end, &batch, &targets);
    const Tensor probs = net.forward(batch, ctx);
    loss_sum += bce_loss(probs, targets) * static_cast<double>(end - begin);
    correct += count_correct(probs, targets);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      stats.predictions.push_back(probs[i] >= 0.5 ? BinaryLabel::Abnormal
                                                  : BinaryLabel::Normal);
    }
  }
  stats.loss = loss_sum / static_cast<double>(indices.size());
  stats.accuracy = static_cast<double>(correct) / static_cast<double>(indices.size());
  return stats;
}

TrainResult train_cnn(const CnnConfig& config, const ImageDataset& data) {
  if (data.size() == 0) throw ValidationError("train_cnn: empty dataset");
  if (config.batch_size == 0) throw ValidationError("train_cnn: batch_size must be positive");

  TrainResult result;
  result.split = stratified_split_indices(
      data.labels, SplitSpec{config.test_fraction, config.validation_fraction, config.seed, true});

  result.network = build_cnn(config);
  init_weights(result.network, config.seed);
  Network& net = result.network;

  AdamOptimizer adam(config.learning_rate);
  adam.attach(net);

  Rng dropout_rng(derive_seed(config.seed, 0xd401));
  std::vector<std::size_t> train_idx = result.split.train;

  std::vector<Tensor> best_weights = net.snapshot_weights();
  double best_val_accuracy = -1.0;

  Tensor batch;
  std::vector<double> targets;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();

    Rng shuffle_rng(derive_seed(config.seed, 0xe90c + epoch));
    shuffle_rng.shuffle(train_idx);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < train_idx.size(); begin += config.batch_size) {
      const std::size_t end = std::min(train_idx.size(), begin + config.batch_size);
      gather_batch(data, train_idx, begin, end, &batch, &targets);

      ForwardContext ctx{true, &dropout_rng};
      const Tensor probs = net.forward(batch, ctx);
      const double batch_loss = bce_loss(probs, targets);
      if (!std::isfinite(batch_loss)) {
        throw RuntimeError("train_cnn: non-finite loss at epoch " + std::to_string(epoch));
      }
      loss_sum += batch_loss * static_cast<double>(end - begin);
      correct += count_correct(probs, targets);

      net.backward(bce_grad(probs, targets));
      adam.step();
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(train_idx.size());
    stats.train_accuracy =
        static_cast<double>(correct) / static_cast<double>(train_idx.size());
    if (!result.split.validation.empty()) {
      const EvalStats val = evaluate_cnn(net, data, result.split.validation, config.batch_size);
      stats.val_loss = val.loss;
      stats.val_accuracy = val.accuracy;
      if (val.accuracy > best_val_accuracy) {
        best_val_accuracy = val.accuracy;
        best_weights = net.snapshot_weights();
        result.best_epoch = epoch;
      }
    } else {
      best_weights = net.snapshot_weights();
      result.best_epoch = epoch;
    }
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.epochs.push_back(stats);
  }

  if (config.epochs > 0) net.restore_weights(best_weights);
  return result;
}

void TrainHistory::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write history: " + path);
  out << "epoch,train_loss,train_accuracy,val_loss,val_accuracy,seconds\n";
  char buf[160];
  for (const EpochStats& e : epochs) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f,%.6f,%.3f\n", e.epoch, e.train_loss,
                  e.train_accuracy, e.val_loss, e.val_accuracy, e.seconds);
    out << buf;
  }
  if (!out) throw RuntimeError("write failed: " + path);
}

}  // namespace papml
