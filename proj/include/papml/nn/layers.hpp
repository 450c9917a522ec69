#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "papml/nn/tensor.hpp"
#include "papml/rng.hpp"

namespace papml {

struct ForwardContext {
  bool training = false;
  Rng* rng = nullptr;  // consumed by dropout in training mode
};

struct ParamRef {
  Tensor* value;
  Tensor* grad;
};

// Batched layers over (N, H, W, C) or (N, F) tensors. backward() consumes
// state cached by the most recent forward() and overwrites the parameter
// gradients.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string_view kind() const = 0;
  virtual std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const = 0;
  virtual Tensor forward(const Tensor& input, const ForwardContext& ctx) = 0;
  virtual Tensor backward(const Tensor& grad_output) = 0;
  virtual std::vector<ParamRef> params() { return {}; }
  virtual nlohmann::json config() const;
};

// k x k convolution, stride 1, zero-padded to keep the spatial size.
class Conv2d : public Layer {
 public:
  Conv2d(std::size_t kernel, std::size_t in_channels, std::size_t out_channels);

  std::string_view kind() const override { return "conv2d"; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override;
  Tensor forward(const Tensor& input, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<ParamRef> params() override;
  nlohmann::json config() const override;

  Tensor weights;  // (k, k, Cin, Cout)
  Tensor bias;     // (Cout)
  Tensor grad_weights;
  Tensor grad_bias;
  std::size_t kernel, in_channels, out_channels;

 private:
  Tensor input_;
};

class Relu : public Layer {
 public:
  std::string_view kind() const override { return "relu"; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override;
  Tensor forward(const Tensor& input, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_output) override;

 private:
  Tensor input_;
};

// 2x2 window, stride 2; spatial dims must be even.
class MaxPool2 : public Layer {
 public:
  std::string_view kind() const override { return "maxpool2"; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override;
  Tensor forward(const Tensor& input, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_output) override;

 private:
  std::vector<std::size_t> input_shape_;
  std::vector<std::uint32_t> argmax_;
};

// Inverted dropout: training zeroes units with probability `rate` and
// scales survivors by 1/(1-rate); evaluation is the identity.
class Dropout : public Layer {
 public:
  explicit Dropout(double rate);

  std::string_view kind() const override { return "dropout"; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override;
  Tensor forward(const Tensor& input, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_output) override;
  nlohmann::json config() const override;

  double rate;

 private:
  Tensor mask_;
  bool identity_pass_ = true;
};

class Flatten : public Layer {
 public:
  std::string_view kind() const override { return "flatten"; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override;
  Tensor forward(const Tensor& input, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_output) override;

 private:
  std::vector<std::size_t> input_shape_;
};

class Dense : public Layer {
 public:
  Dense(std::size_t in_features, std::size_t out_features);

  std::string_view kind() const override { return "dense"; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override;
  Tensor forward(const Tensor& input, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<ParamRef> params() override;
  nlohmann::json config() const override;

  Tensor weights;  // (in, out)
  Tensor bias;     // (out)
  Tensor grad_weights;
  Tensor grad_bias;
  std::size_t in_features, out_features;

 private:
  Tensor input_;
};

class Sigmoid : public Layer {
 public:
  std::string_view kind() const override { return "sigmoid"; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override;
  Tensor forward(const Tensor& input, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_output) override;

 private:
  Tensor output_;
};

std::unique_ptr<Layer> layer_from_config(const nlohmann::json& config);

}  // namespace papml
