#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "papml/nn/layers.hpp"

namespace papml {

// Ordered layer stack. Forward caches per-layer state for the following
// backward; parameter gradients are overwritten by each backward pass.
class Network {
 public:
  Network() = default;
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  void add(std::unique_ptr<Layer> layer);

  Tensor forward(const Tensor& input, const ForwardContext& ctx);
  Tensor backward(const Tensor& grad_output);

  std::vector<ParamRef> params();
  std::size_t param_count();

  const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }
  Layer& layer(std::size_t i) { return *layers_[i]; }

  // shape walk through every layer; throws on any inconsistency
  std::vector<std::vector<std::size_t>> shape_walk(std::vector<std::size_t> input_shape) const;
  std::string describe(const std::vector<std::size_t>& input_shape) const;

  std::vector<Tensor> snapshot_weights();
  void restore_weights(const std::vector<Tensor>& snapshot);

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

// Mean binary cross-entropy over the batch; probabilities are clamped to
// [1e-12, 1-1e-12] so the loss stays finite at saturated outputs.
double bce_loss(const Tensor& probs, std::span<const double> targets);
Tensor bce_grad(const Tensor& probs, std::span<const double> targets);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);

  void attach(Network& net);
  void step();

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<ParamRef> params_;
  std::vector<std::vector<double>> m_, v_;
};

// He-uniform for layers feeding ReLU stacks, Glorot-uniform for the final
// dense layer, zero biases. Deterministic per seed.
void init_weights(Network& net, std::uint64_t seed);

// Central finite differences against backward for every parameter; returns
// the maximum relative error |ga-gn| / max(|ga|,|gn|,1e-8). Dropout masks
// are frozen by reseeding the context rng identically for every forward.
double grad_check(Network& net, const Tensor& input, std::span<const double> targets,
                  double eps = 1e-5, std::uint64_t noise_seed = 0);

// Binary container: magic, version, layer manifest (JSON), parameter
// tensors as little-endian 64-bit floats.
void save_network(Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace papml
