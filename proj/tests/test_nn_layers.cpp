#include <doctest.h>

#include <cmath>

#include "papml/common.hpp"
#include "papml/nn/network.hpp"
#include "papml/nn/train.hpp"
#include "papml/rng.hpp"

using namespace papml;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed, double lo = -1.0,
                     double hi = 1.0) {
  Tensor t(std::move(shape));
  Rng rng(seed);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

const ForwardContext kEval{false, nullptr};

}  // namespace

TEST_CASE("conv2d keeps spatial size under same padding") {
  Conv2d conv(3, 3, 32);
  Rng rng(1);
  for (std::size_t i = 0; i < conv.weights.size(); ++i) conv.weights[i] = rng.gaussian(0, 0.1);
  const Tensor input = random_tensor({1, 64, 64, 3}, 2);
  const Tensor out = conv.forward(input, kEval);
  CHECK(out.shape() == std::vector<std::size_t>{1, 64, 64, 32});
}

TEST_CASE("a centered delta kernel is the identity") {
  Conv2d conv(3, 1, 1);
  conv.weights.fill(0.0);
  // center tap (dy=1, dx=1, ci=0, co=0)
  conv.weights[(1 * 3 + 1) * 1 * 1] = 1.0;
  conv.bias.fill(0.0);
  const Tensor input = random_tensor({2, 8, 8, 1}, 3);
  const Tensor out = conv.forward(input, kEval);
  REQUIRE(out.shape() == input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) {
    CHECK(out[i] == input[i]);
  }
}

TEST_CASE("conv2d matches the naive quadruple-loop oracle within 1e-12") {
  const std::size_t h = 5, w = 5, ci = 2, co = 3, k = 3, n = 2;
  Conv2d conv(k, ci, co);
  Rng rng(7);
  for (std::size_t i = 0; i < conv.weights.size(); ++i) conv.weights[i] = rng.gaussian();
  for (std::size_t i = 0; i < conv.bias.size(); ++i) conv.bias[i] = rng.gaussian();
  const Tensor input = random_tensor({n, h, w, ci}, 8);
  const Tensor got = conv.forward(input, kEval);

  // independent evaluation straight from the definition
  const std::size_t pad = k / 2;
  for (std::size_t ni = 0; ni < n; ++ni) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        for (std::size_t c = 0; c < co; ++c) {
          double acc = conv.bias[c];
          for (std::size_t dy = 0; dy < k; ++dy) {
            for (std::size_t dx = 0; dx < k; ++dx) {
              const std::ptrdiff_t yy = std::ptrdiff_t(y + dy) - std::ptrdiff_t(pad);
              const std::ptrdiff_t xx = std::ptrdiff_t(x + dx) - std::ptrdiff_t(pad);
              if (yy < 0 || xx < 0 || yy >= std::ptrdiff_t(h) || xx >= std::ptrdiff_t(w)) {
                continue;
              }
              for (std::size_t cin = 0; cin < ci; ++cin) {
                acc += input[((ni * h + std::size_t(yy)) * w + std::size_t(xx)) * ci + cin] *
                       conv.weights[((dy * k + dx) * ci + cin) * co + c];
              }
            }
          }
          const double want = got[((ni * h + y) * w + x) * co + c];
          CHECK(std::abs(acc - want) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("maxpool picks window maxima and halves the spatial dims") {
  MaxPool2 pool;
  Tensor input({1, 2, 2, 1});
  input[0] = 1;
  input[1] = 2;
  input[2] = 3;
  input[3] = 4;
  const Tensor out = pool.forward(input, kEval);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == 4.0);

  Tensor constant({1, 4, 4, 2});
  constant.fill(0.75);
  const Tensor cout = pool.forward(constant, kEval);
  for (std::size_t i = 0; i < cout.size(); ++i) CHECK(cout[i] == 0.75);

  const Tensor big = random_tensor({1, 64, 64, 3}, 5);
  CHECK(pool.forward(big, kEval).shape() == std::vector<std::size_t>{1, 32, 32, 3});

  Tensor odd({1, 5, 4, 1});
  CHECK_THROWS_AS(pool.forward(odd, kEval), ValidationError);
}

TEST_CASE("dropout is identity at rate 0 and in eval mode; train mode hits the rate") {
  const Tensor input = random_tensor({10, 100, 10, 1}, 6, 0.5, 1.5);

  Dropout none(0.0);
  Rng rng(1);
  ForwardContext train_ctx{true, &rng};
  const Tensor same = none.forward(input, train_ctx);
  for (std::size_t i = 0; i < input.size(); ++i) CHECK(same[i] == input[i]);

  Dropout heavy(0.4);
  const Tensor eval_out = heavy.forward(input, kEval);
  for (std::size_t i = 0; i < input.size(); ++i) CHECK(eval_out[i] == input[i]);

  const Tensor train_out = heavy.forward(input, train_ctx);  // 1e4 units
  std::size_t zeroed = 0;
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (train_out[i] == 0.0) {
      ++zeroed;
    } else {
      CHECK(train_out[i] == doctest::Approx(input[i] / 0.6).epsilon(1e-12));
    }
  }
  const double rate = double(zeroed) / double(input.size());
  CHECK(rate == doctest::Approx(0.4).epsilon(0.03));

  CHECK_THROWS_AS(Dropout(1.0), ValidationError);
  CHECK_THROWS_AS(heavy.forward(input, ForwardContext{true, nullptr}), ValidationError);
}

TEST_CASE("dropout zeroes 0.4 +- 0.01 of 1e5 units") {
  const Tensor input = random_tensor({100, 100, 10, 1}, 60, 0.5, 1.5);
  Dropout heavy(0.4);
  Rng rng(2);
  ForwardContext ctx{true, &rng};
  const Tensor out = heavy.forward(input, ctx);
  std::size_t zeroed = 0;
  for (std::size_t i = 0; i < input.size(); ++i) zeroed += out[i] == 0.0;
  const double rate = double(zeroed) / double(input.size());
  CHECK(rate > 0.39);
  CHECK(rate < 0.41);
}

TEST_CASE("bce loss: exact targets are free, 0.5 costs ln 2, clamping keeps it finite") {
  Tensor exact({2, 1});
  exact[0] = 1.0;
  exact[1] = 0.0;
  CHECK(bce_loss(exact, std::vector<double>{1.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-9));

  Tensor half({4, 1});
  half.fill(0.5);
  CHECK(bce_loss(half, std::vector<double>{1, 0, 1, 0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  Tensor wrong({2, 1});
  wrong[0] = 0.0;
  wrong[1] = 1.0;
  const double loss = bce_loss(wrong, std::vector<double>{1.0, 0.0});
  CHECK(std::isfinite(loss));
  CHECK(loss > 20.0);  // about -ln(1e-12)
}

TEST_CASE("dense backward reproduces the hand-derived (p - y) * activation gradient") {
  // zero-weight dense + sigmoid: p = 0.5 for every row
  Dense dense(3, 1);
  Sigmoid sig;
  dense.weights.fill(0.0);
  dense.bias.fill(0.0);
  const Tensor input = random_tensor({4, 3}, 9);
  const std::vector<double> targets{1, 0, 0, 1};

  const Tensor probs = sig.forward(dense.forward(input, kEval), kEval);
  dense.backward(sig.backward(bce_grad(probs, targets)));

  for (std::size_t j = 0; j < 3; ++j) {
    double want = 0.0;
    for (std::size_t n = 0; n < 4; ++n) {
      want += (0.5 - targets[n]) * input[n * 3 + j] / 4.0;
    }
    CHECK(dense.grad_weights[j] == doctest::Approx(want).epsilon(1e-12));
  }
  double want_bias = 0.0;
  for (std::size_t n = 0; n < 4; ++n) want_bias += (0.5 - targets[n]) / 4.0;
  CHECK(dense.grad_bias[0] == doctest::Approx(want_bias).epsilon(1e-12));
}

TEST_CASE("a dead relu unit gets zero gradient") {
  Relu relu;
  Tensor input({1, 4});
  input[0] = -2.0;
  input[1] = 3.0;
  input[2] = 0.0;
  input[3] = -0.1;
  relu.forward(input, kEval);
  Tensor upstream({1, 4});
  upstream.fill(1.0);
  const Tensor grad = relu.backward(upstream);
  CHECK(grad[0] == 0.0);
  CHECK(grad[1] == 1.0);
  CHECK(grad[2] == 0.0);
  CHECK(grad[3] == 0.0);
}

namespace {

double checked_net(Network&& net, std::vector<std::size_t> input_shape, std::uint64_t seed) {
  init_weights(net, seed);
  Tensor input = random_tensor(std::move(input_shape), seed + 1, 0.0, 1.0);
  std::vector<double> targets(input.dim(0));
  Rng rng(seed + 2);
  for (double& t : targets) t = rng.uniform() < 0.5 ? 0.0 : 1.0;
  return grad_check(net, input, targets);
}

}  // namespace

TEST_CASE("gradient check passes per layer type") {
  SUBCASE("dense head only (smooth landscape, tight tolerance)") {
    Network net;
    net.add(std::make_unique<Flatten>());
    net.add(std::make_unique<Dense>(12, 1));
    net.add(std::make_unique<Sigmoid>());
    CHECK(checked_net(std::move(net), {5, 2, 2, 3}, 13) < 1e-7);
  }
  SUBCASE("conv") {
    Network net;
    net.add(std::make_unique<Conv2d>(3, 2, 3));
    net.add(std::make_unique<Flatten>());
    net.add(std::make_unique<Dense>(6 * 6 * 3, 1));
    net.add(std::make_unique<Sigmoid>());
    CHECK(checked_net(std::move(net), {2, 6, 6, 2}, 17) < 1e-4);
  }
  SUBCASE("maxpool") {
    Network net;
    net.add(std::make_unique<Conv2d>(3, 1, 2));
    net.add(std::make_unique<MaxPool2>());
    net.add(std::make_unique<Flatten>());
    net.add(std::make_unique<Dense>(3 * 3 * 2, 1));
    net.add(std::make_unique<Sigmoid>());
    CHECK(checked_net(std::move(net), {2, 6, 6, 1}, 19) < 1e-4);
  }
  SUBCASE("relu") {
    Network net;
    net.add(std::make_unique<Flatten>());
    net.add(std::make_unique<Dense>(8, 6));
    net.add(std::make_unique<Relu>());
    net.add(std::make_unique<Dense>(6, 1));
    net.add(std::make_unique<Sigmoid>());
    CHECK(checked_net(std::move(net), {4, 2, 4, 1}, 23) < 1e-4);
  }
  SUBCASE("dropout with frozen masks") {
    Network net;
    net.add(std::make_unique<Flatten>());
    net.add(std::make_unique<Dense>(10, 8));
    net.add(std::make_unique<Relu>());
    net.add(std::make_unique<Dropout>(0.4));
    net.add(std::make_unique<Dense>(8, 1));
    net.add(std::make_unique<Sigmoid>());
    CHECK(checked_net(std::move(net), {4, 10, 1, 1}, 29) < 1e-4);
  }
}

TEST_CASE("gradient check passes for the composed reduced network") {
  Network net = build_gradcheck_net(8, 3);
  CHECK(checked_net(std::move(net), {4, 8, 8, 3}, 31) < 1e-4);
}

TEST_CASE("grad_check rejects a zero step size") {
  Network net;
  net.add(std::make_unique<Flatten>());
  net.add(std::make_unique<Dense>(4, 1));
  net.add(std::make_unique<Sigmoid>());
  init_weights(net, 3);
  const Tensor input = random_tensor({2, 2, 2, 1}, 4);
  CHECK_THROWS_AS(grad_check(net, input, std::vector<double>{1.0, 0.0}, 0.0), ValidationError);
}

TEST_CASE("the default network walks (64,64,3) down to a sigmoid scalar") {
  CnnConfig config;
  const Network net = build_cnn(config);
  const auto shapes = net.shape_walk({1, 64, 64, 3});
  CHECK(shapes.back() == std::vector<std::size_t>{1, 1});
  // flatten sees 4*4*64 = 1024 after four pools
  bool saw_flat = false;
  for (const auto& s : shapes) {
    if (s == std::vector<std::size_t>{1, 1024}) saw_flat = true;
  }
  CHECK(saw_flat);

  CnnConfig bad;
  bad.image_size = 20;  // 20 -> 10 -> 5: odd before the third pool
  CHECK_THROWS_AS(build_cnn(bad), ValidationError);
}
