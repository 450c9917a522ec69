#include "papml/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "papml/common.hpp"

namespace papml {

void Network::add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }

Tensor Network::forward(const Tensor& input, const ForwardContext& ctx) {
  Tensor x = input;
  for (auto& layer : layers_) x = layer->forward(x, ctx);
  return x;
}

Tensor Network::backward(const Tensor& grad_output) {
  Tensor g = grad_output;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

std::vector<ParamRef> Network::params() {
  std::vector<ParamRef> all;
  for (auto& layer : layers_) {
    for (ParamRef p : layer->params()) all.push_back(p);
  }
  return all;
}

std::size_t Network::param_count() {
  std::size_t n = 0;
  for (ParamRef p : params()) n += p.value->size();
  return n;
}

std::vector<std::vector<std::size_t>> Network::shape_walk(
    std::vector<std::size_t> input_shape) const {
  std::vector<std::vector<std::size_t>> shapes{input_shape};
  for (const auto& layer : layers_) {
    shapes.push_back(layer->output_shape(shapes.back()));
  }
  return shapes;
}

std::string Network::describe(const std::vector<std::size_t>& input_shape) const {
  const auto shapes = shape_walk(input_shape);
  std::string out = "input " + shape_string(shapes[0]) + "\n";
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    out += std::string(layers_[i]->kind()) + " -> " + shape_string(shapes[i + 1]) + "\n";
  }
  return out;
}

std::vector<Tensor> Network::snapshot_weights() {
  std::vector<Tensor> snap;
  for (ParamRef p : params()) snap.push_back(*p.value);
  return snap;
}

void Network::restore_weights(const std::vector<Tensor>& snapshot) {
  const auto ps = params();
  if (ps.size() != snapshot.size()) throw RuntimeError("weight snapshot mismatch");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!ps[i].value->same_shape(snapshot[i])) throw RuntimeError("weight snapshot mismatch");
    *ps[i].value = snapshot[i];
  }
}

namespace {
constexpr double kProbClamp = 1e-12;

double clamp_prob(double p) {
  return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}
}  // namespace

double bce_loss(const Tensor& probs, std::span<const double> targets) {
  if (probs.size() != targets.size()) throw ValidationError("bce_loss: size mismatch");
  if (probs.size() == 0) throw ValidationError("bce_loss: empty batch");
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_prob(probs[i]);
    loss -= targets[i] * std::log(p) + (1.0 - targets[i]) * std::log(1.0 - p);
  }
  return loss / static_cast<double>(probs.size());
}

Tensor bce_grad(const Tensor& probs, std::span<const double> targets) {
  if (probs.size() != targets.size()) throw ValidationError("bce_grad: size mismatch");
  Tensor grad(probs.shape());
  const double inv_n = 1.0 / static_cast<double>(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_prob(probs[i]);
    grad[i] = inv_n * (p - targets[i]) / (p * (1.0 - p));
  }
  return grad;
}

AdamOptimizer::AdamOptimizer(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void AdamOptimizer::attach(Network& net) {
  params_ = net.params();
  m_.clear();
  v_.clear();
  for (ParamRef p : params_) {
    m_.emplace_back(p.value->size(), 0.0);
    v_.emplace_back(p.value->size(), 0.0);
  }
  t_ = 0;
}

void AdamOptimizer::step() {
  if (params_.empty()) throw RuntimeError("adam: not attached to a network");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Tensor& value = *params_[pi].value;
    const Tensor& grad = *params_[pi].grad;
    auto& m = m_[pi];
    auto& v = v_[pi];
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

void init_weights(Network& net, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x1417));

  // the last parameterized layer is the output head: Glorot; He elsewhere
  std::size_t last_parameterized = 0;
  bool any = false;
  const auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!layers[i]->params().empty()) {
      last_parameterized = i;
      any = true;
    }
  }
  if (!any) return;

  for (std::size_t i = 0; i < layers.size(); ++i) {
    Layer& layer = *layers[i];
    std::size_t fan_in = 0, fan_out = 0;
    if (auto* conv = dynamic_cast<Conv2d*>(&layer)) {
      fan_in = conv->kernel * conv->kernel * conv->in_channels;
      fan_out = conv->kernel * conv->kernel * conv->out_channels;
    } else if (auto* dense = dynamic_cast<Dense*>(&layer)) {
      fan_in = dense->in_features;
      fan_out = dense->out_features;
    } else {
      continue;
    }
    const double limit =
        i == last_parameterized
            ? std::sqrt(6.0 / static_cast<double>(fan_in + fan_out))  // Glorot
            : std::sqrt(6.0 / static_cast<double>(fan_in));           // He
    const auto refs = layer.params();
    Tensor& weights = *refs[0].value;
    for (std::size_t j = 0; j < weights.size(); ++j) weights[j] = rng.uniform(-limit, limit);
    refs[1].value->fill(0.0);
  }
}

double grad_check(Network& net, const Tensor& input, std::span<const double> targets,
                  double eps, std::uint64_t noise_seed) {
  if (eps <= 0.0) throw ValidationError("grad_check: eps must be positive");

  // same dropout masks for every forward: fresh identically seeded rng
  auto run_loss = [&]() {
    Rng rng(noise_seed);
    ForwardContext ctx{true, &rng};
    const Tensor probs = net.forward(input, ctx);
    return bce_loss(probs, targets);
  };

  {
    Rng rng(noise_seed);
    ForwardContext ctx{true, &rng};
    const Tensor probs = net.forward(input, ctx);
    net.backward(bce_grad(probs, targets));
  }
  std::vector<Tensor> analytic;
  for (ParamRef p : net.params()) analytic.push_back(*p.grad);

  double max_rel = 0.0;
  const auto params = net.params();
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& value = *params[pi].value;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + eps;
      const double up = run_loss();
      value[i] = saved - eps;
      const double down = run_loss();
      value[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double ga = analytic[pi][i];
      const double rel =
          std::abs(ga - numeric) / std::max({std::abs(ga), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

namespace {

constexpr char kMagic[8] = {'P', 'A', 'P', 'M', 'L', 'N', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

std::uint64_t read_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void save_network(Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write network file: " + path);

  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& layer : net.layers()) manifest.push_back(layer->config());
  const std::string manifest_text = manifest.dump();

  out.write(kMagic, sizeof kMagic);
  write_u32(out, kVersion);
  write_u64(out, manifest_text.size());
  out.write(manifest_text.data(), static_cast<std::streamsize>(manifest_text.size()));

  const auto params = net.params();
  write_u64(out, params.size());
  for (ParamRef p : params) {
    const Tensor& t = *p.value;
    write_u64(out, t.rank());
    for (std::size_t d : t.shape()) write_u64(out, d);
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!out) throw RuntimeError("write failed: " + path);
}

Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open network file: " + path);

  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ValidationError(path + ": not a network file");
  }
  if (read_u32(in) != kVersion) throw ValidationError(path + ": unsupported version");

  const std::uint64_t manifest_len = read_u64(in);
  std::string manifest_text(manifest_len, '\0');
  in.read(manifest_text.data(), static_cast<std::streamsize>(manifest_len));
  const nlohmann::json manifest = nlohmann::json::parse(manifest_text);

  Network net;
  for (const auto& cfg : manifest) net.add(layer_from_config(cfg));

  const auto params = net.params();
  const std::uint64_t n_params = read_u64(in);
  if (n_params != params.size()) throw ValidationError(path + ": parameter count mismatch");
  for (ParamRef p : params) {
    const std::uint64_t rank = read_u64(in);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = read_u64(in);
    if (shape != p.value->shape()) throw ValidationError(path + ": parameter shape mismatch");
    in.read(reinterpret_cast<char*>(p.value->data()),
            static_cast<std::streamsize>(p.value->size() * sizeof(double)));
  }
  if (!in) throw ValidationError(path + ": truncated network file");
  return net;
}

}  // namespace papml
