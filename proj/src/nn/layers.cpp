#include "papml/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "papml/classifiers/linear.hpp"
#include "papml/common.hpp"
#include "papml/parallel.hpp"

namespace papml {

nlohmann::json Layer::config() const { return {{"kind", std::string(kind())}}; }

namespace {

void require_rank(const std::vector<std::size_t>& shape, std::size_t rank,
                  std::string_view layer) {
  if (shape.size() != rank) {
    throw ValidationError(std::string(layer) + ": expected rank " + std::to_string(rank) +
                          " input, got " + shape_string(shape));
  }
}

}  // namespace

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(std::size_t k, std::size_t in_ch, std::size_t out_ch)
    : weights({k, k, in_ch, out_ch}),
      bias({out_ch}),
      grad_weights({k, k, in_ch, out_ch}),
      grad_bias({out_ch}),
      kernel(k),
      in_channels(in_ch),
      out_channels(out_ch) {
  if (k % 2 == 0) throw ValidationError("conv2d: kernel size must be odd for same padding");
}

std::vector<std::size_t> Conv2d::output_shape(const std::vector<std::size_t>& input) const {
  require_rank(input, 4, "conv2d");
  if (input[3] != in_channels) {
    throw ValidationError("conv2d: input has " + std::to_string(input[3]) + " channels, layer " +
                          "expects " + std::to_string(in_channels));
  }
  return {input[0], input[1], input[2], out_channels};
}

Tensor Conv2d::forward(const Tensor& input, const ForwardContext&) {
  Tensor out(output_shape(input.shape()));
  input_ = input;

  const std::size_t n = input.dim(0), h = input.dim(1), w = input.dim(2);
  const std::size_t ci = in_channels, co = out_channels, k = kernel;
  const std::size_t pad = k / 2;
  const double* wts = weights.data();
  const double* b = bias.data();

  parallel_for(n, [&](std::size_t ni) {
    const double* in_base = input.data() + ni * h * w * ci;
    double* out_base = out.data() + ni * h * w * co;
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        double* orow = out_base + (y * w + x) * co;
        for (std::size_t c = 0; c < co; ++c) orow[c] = b[c];
        for (std::size_t dy = 0; dy < k; ++dy) {
          const std::size_t yy = y + dy - pad;  // wraps below 0; single bound check
          if (yy >= h) continue;
          for (std::size_t dx = 0; dx < k; ++dx) {
            const std::size_t xx = x + dx - pad;
            if (xx >= w) continue;
            const double* irow = in_base + (yy * w + xx) * ci;
            const double* wrow = wts + (dy * k + dx) * ci * co;
            for (std::size_t c_in = 0; c_in < ci; ++c_in) {
              const double a = irow[c_in];
              if (a == 0.0) continue;
              const double* wr = wrow + c_in * co;
              for (std::size_t c = 0; c < co; ++c) orow[c] += a * wr[c];
            }
          }
        }
      }
    }
  });
  return out;
}

Tensor Conv2d::backward(const Tensor& grad_output) {
  if (input_.size() == 0) throw RuntimeError("conv2d: backward before forward");
  const std::size_t n = input_.dim(0), h = input_.dim(1), w = input_.dim(2);
  const std::size_t ci = in_channels, co = out_channels, k = kernel;
  const std::size_t pad = k / 2;

  grad_bias.fill(0.0);
  double* db = grad_bias.data();
  const double* g = grad_output.data();
  for (std::size_t i = 0; i < n * h * w; ++i) {
    const double* grow = g + i * co;
    for (std::size_t c = 0; c < co; ++c) db[c] += grow[c];
  }

  // weight gradients: one task per kernel offset, each owning a disjoint
  // slab of grad_weights and summing over the batch in fixed order
  grad_weights.fill(0.0);
  parallel_for(k * k, [&](std::size_t off) {
    const std::size_t dy = off / k, dx = off % k;
    double* dw = grad_weights.data() + off * ci * co;
    for (std::size_t ni = 0; ni < n; ++ni) {
      const double* in_base = input_.data() + ni * h * w * ci;
      const double* g_base = g + ni * h * w * co;
      for (std::size_t y = 0; y < h; ++y) {
        const std::size_t yy = y + dy - pad;
        if (yy >= h) continue;
        for (std::size_t x = 0; x < w; ++x) {
          const std::size_t xx = x + dx - pad;
          if (xx >= w) continue;
          const double* irow = in_base + (yy * w + xx) * ci;
          const double* grow = g_base + (y * w + x) * co;
          for (std::size_t c_in = 0; c_in < ci; ++c_in) {
            const double a = irow[c_in];
            if (a == 0.0) continue;
            double* dwr = dw + c_in * co;
            for (std::size_t c = 0; c < co; ++c) dwr[c] += a * grow[c];
          }
        }
      }
    }
  });

  Tensor grad_input(input_.shape());
  const double* wts = weights.data();
  parallel_for(n, [&](std::size_t ni) {
    double* di_base = grad_input.data() + ni * h * w * ci;
    const double* g_base = g + ni * h * w * co;
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double* grow = g_base + (y * w + x) * co;
        for (std::size_t dy = 0; dy < k; ++dy) {
          const std::size_t yy = y + dy - pad;
          if (yy >= h) continue;
          for (std::size_t dx = 0; dx < k; ++dx) {
            const std::size_t xx = x + dx - pad;
            if (xx >= w) continue;
            double* irow = di_base + (yy * w + xx) * ci;
            const double* wrow = wts + (dy * k + dx) * ci * co;
            for (std::size_t c_in = 0; c_in < ci; ++c_in) {
              const double* wr = wrow + c_in * co;
              double s = 0.0;
              for (std::size_t c = 0; c < co; ++c) s += wr[c] * grow[c];
              irow[c_in] += s;
            }
          }
        }
      }
    }
  });
  return grad_input;
}

std::vector<ParamRef> Conv2d::params() {
  return {{&weights, &grad_weights}, {&bias, &grad_bias}};
}

nlohmann::json Conv2d::config() const {
  return {{"kind", "conv2d"},
          {"kernel", kernel},
          {"in_channels", in_channels},
          {"out_channels", out_channels}};
}

// ------------------------------------------------------------------ Relu

std::vector<std::size_t> Relu::output_shape(const std::vector<std::size_t>& input) const {
  return input;
}

Tensor Relu::forward(const Tensor& input, const ForwardContext&) {
  input_ = input;
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > 0.0 ? input[i] : 0.0;
  return out;
}

Tensor Relu::backward(const Tensor& grad_output) {
  Tensor grad(input_.shape());
  for (std::size_t i = 0; i < input_.size(); ++i) {
    grad[i] = input_[i] > 0.0 ? grad_output[i] : 0.0;
  }
  return grad;
}

// -------------------------------------------------------------- MaxPool2

std::vector<std::size_t> MaxPool2::output_shape(const std::vector<std::size_t>& input) const {
  require_rank(input, 4, "maxpool2");
  if (input[1] % 2 != 0 || input[2] % 2 != 0) {
    throw ValidationError("maxpool2: spatial dims must be even, got " + shape_string(input));
  }
  return {input[0], input[1] / 2, input[2] / 2, input[3]};
}

Tensor MaxPool2::forward(const Tensor& input, const ForwardContext&) {
  Tensor out(output_shape(input.shape()));
  input_shape_ = input.shape();
  argmax_.assign(out.size(), 0);

  const std::size_t n = input.dim(0), h = input.dim(1), w = input.dim(2), ch = input.dim(3);
  const std::size_t oh = h / 2, ow = w / 2;
  for (std::size_t ni = 0; ni < n; ++ni) {
    const double* in_base = input.data() + ni * h * w * ch;
    double* out_base = out.data() + ni * oh * ow * ch;
    std::uint32_t* am_base = argmax_.data() + ni * oh * ow * ch;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        for (std::size_t c = 0; c < ch; ++c) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_at = 0;
          for (std::size_t dy = 0; dy < 2; ++dy) {
            for (std::size_t dx = 0; dx < 2; ++dx) {
              const std::size_t at = ((2 * y + dy) * w + 2 * x + dx) * ch + c;
              if (in_base[at] > best) {
                best = in_base[at];
                best_at = at;
              }
            }
          }
          out_base[(y * ow + x) * ch + c] = best;
          am_base[(y * ow + x) * ch + c] =
              static_cast<std::uint32_t>(ni * h * w * ch + best_at);
        }
      }
    }
  }
  return out;
}

Tensor MaxPool2::backward(const Tensor& grad_output) {
  if (argmax_.empty()) throw RuntimeError("maxpool2: backward before forward");
  Tensor grad(input_shape_);
  for (std::size_t i = 0; i < grad_output.size(); ++i) {
    grad[argmax_[i]] += grad_output[i];
  }
  return grad;
}

// --------------------------------------------------------------- Dropout

Dropout::Dropout(double r) : rate(r) {
  if (rate < 0.0 || rate >= 1.0) throw ValidationError("dropout: rate must be in [0,1)");
}

std::vector<std::size_t> Dropout::output_shape(const std::vector<std::size_t>& input) const {
  return input;
}

Tensor Dropout::forward(const Tensor& input, const ForwardContext& ctx) {
  if (!ctx.training || rate == 0.0) {
    identity_pass_ = true;
    return input;
  }
  if (ctx.rng == nullptr) throw ValidationError("dropout: training forward needs an rng");
  identity_pass_ = false;
  mask_ = Tensor(input.shape());
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < input.size(); ++i) {
    mask_[i] = ctx.rng->uniform() < rate ? 0.0 : keep_scale;
  }
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] * mask_[i];
  return out;
}

Tensor Dropout::backward(const Tensor& grad_output) {
  if (identity_pass_) return grad_output;
  Tensor grad(grad_output.shape());
  for (std::size_t i = 0; i < grad_output.size(); ++i) grad[i] = grad_output[i] * mask_[i];
  return grad;
}

nlohmann::json Dropout::config() const { return {{"kind", "dropout"}, {"rate", rate}}; }

// --------------------------------------------------------------- Flatten

std::vector<std::size_t> Flatten::output_shape(const std::vector<std::size_t>& input) const {
  if (input.empty()) throw ValidationError("flatten: empty shape");
  std::size_t rest = 1;
  for (std::size_t i = 1; i < input.size(); ++i) rest *= input[i];
  return {input[0], rest};
}

Tensor Flatten::forward(const Tensor& input, const ForwardContext&) {
  input_shape_ = input.shape();
  return input.reshaped(output_shape(input.shape()));
}

Tensor Flatten::backward(const Tensor& grad_output) {
  return grad_output.reshaped(input_shape_);
}

// ----------------------------------------------------------------- Dense

Dense::Dense(std::size_t in_f, std::size_t out_f)
    : weights({in_f, out_f}),
      bias({out_f}),
      grad_weights({in_f, out_f}),
      grad_bias({out_f}),
      in_features(in_f),
      out_features(out_f) {}

std::vector<std::size_t> Dense::output_shape(const std::vector<std::size_t>& input) const {
  require_rank(input, 2, "dense");
  if (input[1] != in_features) {
    throw ValidationError("dense: input width " + std::to_string(input[1]) + " != " +
                          std::to_string(in_features));
  }
  return {input[0], out_features};
}

Tensor Dense::forward(const Tensor& input, const ForwardContext&) {
  Tensor out(output_shape(input.shape()));
  input_ = input;
  const std::size_t n = input.dim(0);
  parallel_for(
      n,
      [&](std::size_t ni) {
        const double* irow = input.data() + ni * in_features;
        double* orow = out.data() + ni * out_features;
        for (std::size_t o = 0; o < out_features; ++o) orow[o] = bias[o];
        for (std::size_t i = 0; i < in_features; ++i) {
          const double a = irow[i];
          if (a == 0.0) continue;
          const double* wrow = weights.data() + i * out_features;
          for (std::size_t o = 0; o < out_features; ++o) orow[o] += a * wrow[o];
        }
      },
      8);
  return out;
}

Tensor Dense::backward(const Tensor& grad_output) {
  if (input_.size() == 0) throw RuntimeError("dense: backward before forward");
  const std::size_t n = input_.dim(0);

  grad_bias.fill(0.0);
  for (std::size_t ni = 0; ni < n; ++ni) {
    const double* grow = grad_output.data() + ni * out_features;
    for (std::size_t o = 0; o < out_features; ++o) grad_bias[o] += grow[o];
  }

  grad_weights.fill(0.0);
  for (std::size_t ni = 0; ni < n; ++ni) {
    const double* irow = input_.data() + ni * in_features;
    const double* grow = grad_output.data() + ni * out_features;
    for (std::size_t i = 0; i < in_features; ++i) {
      const double a = irow[i];
      if (a == 0.0) continue;
      double* dwr = grad_weights.data() + i * out_features;
      for (std::size_t o = 0; o < out_features; ++o) dwr[o] += a * grow[o];
    }
  }

  Tensor grad_input(input_.shape());
  parallel_for(
      n,
      [&](std::size_t ni) {
        double* di = grad_input.data() + ni * in_features;
        const double* grow = grad_output.data() + ni * out_features;
        for (std::size_t i = 0; i < in_features; ++i) {
          const double* wrow = weights.data() + i * out_features;
          double s = 0.0;
          for (std::size_t o = 0; o < out_features; ++o) s += wrow[o] * grow[o];
          di[i] = s;
        }
      },
      8);
  return grad_input;
}

std::vector<ParamRef> Dense::params() {
  return {{&weights, &grad_weights}, {&bias, &grad_bias}};
}

nlohmann::json Dense::config() const {
  return {{"kind", "dense"}, {"in_features", in_features}, {"out_features", out_features}};
}

// --------------------------------------------------------------- Sigmoid

std::vector<std::size_t> Sigmoid::output_shape(const std::vector<std::size_t>& input) const {
  return input;
}

Tensor Sigmoid::forward(const Tensor& input, const ForwardContext&) {
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = sigmoid(input[i]);
  output_ = out;
  return out;
}

Tensor Sigmoid::backward(const Tensor& grad_output) {
  Tensor grad(output_.shape());
  for (std::size_t i = 0; i < output_.size(); ++i) {
    grad[i] = grad_output[i] * output_[i] * (1.0 - output_[i]);
  }
  return grad;
}

// --------------------------------------------------------------- factory

std::unique_ptr<Layer> layer_from_config(const nlohmann::json& config) {
  const std::string kind = config.at("kind");
  if (kind == "conv2d") {
    return std::make_unique<Conv2d>(config.at("kernel").get<std::size_t>(),
                                    config.at("in_channels").get<std::size_t>(),
                                    config.at("out_channels").get<std::size_t>());
  }
  if (kind == "relu") return std::make_unique<Relu>();
  if (kind == "maxpool2") return std::make_unique<MaxPool2>();
  if (kind == "dropout") return std::make_unique<Dropout>(config.at("rate").get<double>());
  if (kind == "flatten") return std::make_unique<Flatten>();
  if (kind == "dense") {
    return std::make_unique<Dense>(config.at("in_features").get<std::size_t>(),
                                   config.at("out_features").get<std::size_t>());
  }
  if (kind == "sigmoid") return std::make_unique<Sigmoid>();
  throw ValidationError("unknown layer kind: " + kind);
}

}  // namespace papml
