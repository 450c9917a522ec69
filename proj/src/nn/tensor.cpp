#include "papml/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "papml/common.hpp"

namespace papml {

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
  std::size_t total = 1;
  for (std::size_t d : shape_) {
    if (d == 0) throw ValidationError("tensor dimensions must be positive");
    total *= d;
  }
  data_.assign(shape_.empty() ? 0 : total, 0.0);
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor Tensor::reshaped(std::vector<std::size_t> new_shape) const {
  std::size_t total = 1;
  for (std::size_t d : new_shape) total *= d;
  if (total != data_.size()) {
    throw ValidationError("reshape to " + shape_string(new_shape) + " changes element count");
  }
  Tensor out;
  out.shape_ = std::move(new_shape);
  out.data_ = data_;
  return out;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

}  // namespace papml
