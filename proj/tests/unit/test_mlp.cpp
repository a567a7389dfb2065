#include <cmath>

#include "doctest.h"
#include "sparsebonus/error.hpp"
#include "sparsebonus/mlp.hpp"
#include "test_support.hpp"

using namespace sparsebonus;

TEST_CASE("forward: zero net gives zeros, identity layer passes through") {
  Mlp zero({3, 4, 2}, OutputActivation::Identity);
  Matrix x(2, 3, 1.5);
  CHECK(zero.forward(x) == Matrix(2, 2, 0.0));

  Mlp id({3, 3}, OutputActivation::Identity);
  auto p = id.params();
  for (int i = 0; i < 3; ++i) p[static_cast<std::size_t>(i * 3 + i)] = 1.0;
  Matrix in(1, 3);
  in(0, 0) = -1.0;
  in(0, 1) = 2.0;
  in(0, 2) = 0.25;
  CHECK(id.forward(in) == in);

  CHECK_THROWS_AS(id.forward(Matrix(1, 4)), ContractViolation);
}

TEST_CASE("forward is pure; tanh output is bounded") {
  Mlp net({5, 16, 16, 3}, OutputActivation::Tanh);
  Rng r = Rng::seed_root(1);
  net.init_glorot(r);
  const Matrix x = test_support::random_matrix(4, 5, r, 10.0);
  const Matrix y1 = net.forward(x), y2 = net.forward(x);
  CHECK(y1 == y2);
  for (double v : y1.flat()) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("backward: linear 2x2 layer gradient is the outer product") {
  Mlp lin({2, 2}, OutputActivation::Identity);
  Rng r = Rng::seed_root(2);
  lin.init_glorot(r);
  Matrix x(1, 2);
  x(0, 0) = 0.3;
  x(0, 1) = -0.7;
  Matrix up(1, 2);
  up(0, 0) = 2.0;
  up(0, 1) = -1.0;
  Mlp::Tape tape;
  lin.forward(x, tape);
  const auto g = lin.backward(tape, up);
  // W is stored in x out: dL/dW[k][j] = x_k * up_j.
  CHECK(g.params[0] == doctest::Approx(0.3 * 2.0));
  CHECK(g.params[1] == doctest::Approx(0.3 * -1.0));
  CHECK(g.params[2] == doctest::Approx(-0.7 * 2.0));
  CHECK(g.params[3] == doctest::Approx(-0.7 * -1.0));
  CHECK(g.params[4] == doctest::Approx(2.0));
  CHECK(g.params[5] == doctest::Approx(-1.0));
}

TEST_CASE("backward: zero upstream gives zero gradients") {
  Mlp net({4, 8, 8, 2}, OutputActivation::Tanh);
  Rng r = Rng::seed_root(3);
  net.init_glorot(r);
  Mlp::Tape tape;
  net.forward(test_support::random_matrix(3, 4, r, 1.0), tape);
  const auto g = net.backward(tape, Matrix(3, 2, 0.0));
  for (double v : g.params) CHECK(v == 0.0);
  for (double v : g.input.flat()) CHECK(v == 0.0);
}

TEST_CASE("backward matches central finite differences (h = 1e-5)") {
  Rng r = Rng::seed_root(4);
  for (auto act : {OutputActivation::Identity, OutputActivation::Tanh}) {
    for (int trial = 0; trial < 10; ++trial) {
      Mlp net({4, 7, 5, 3}, act);
      Matrix x;
      do {
        net.init_glorot(r);
        for (double& b : net.params()) b += 0.05 * r.next_normal();
        x = test_support::random_matrix(3, 4, r, 1.0);
      } while (test_support::min_hidden_preactivation(net, x) < 1e-3);
      const Matrix w = test_support::random_matrix(3, 3, r, 1.0);
      const double err = test_support::max_fd_error(net, x, w);
      CHECK(err < 1e-4);
    }
  }
}

TEST_CASE("polyak_update closed forms") {
  Mlp main({1, 1}, OutputActivation::Identity), target({1, 1}, OutputActivation::Identity);
  main.params()[0] = 1.0;
  target.params()[0] = 0.0;
  polyak_update(target, main, 0.05);
  CHECK(target.params()[0] == doctest::Approx(0.05));
  polyak_update(target, main, 0.05);
  // 1 - (1 - tau)^2 (1 - initial) with initial = 0.
  CHECK(target.params()[0] == doctest::Approx(1.0 - 0.95 * 0.95));
  polyak_update(target, main, 1.0);
  CHECK(target.params()[0] == 1.0);
  Mlp other({2, 1}, OutputActivation::Identity);
  CHECK_THROWS_AS(polyak_update(other, main, 0.5), ContractViolation);
}

TEST_CASE("Adam: first step moves each parameter by lr against the gradient sign") {
  std::vector<double> p{1.0, -2.0, 0.5};
  const std::vector<double> g{0.3, -4.0, 0.0};
  Adam opt(3, 0.01);
  opt.step(p, g);
  CHECK(p[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(-2.0 + 0.01).epsilon(1e-6));
  CHECK(p[2] == 0.5);
  CHECK(opt.steps() == 1);
  CHECK(opt.first_moment().size() == 3);
}

TEST_CASE("Adam minimises a quadratic") {
  std::vector<double> p{3.0, -2.0};
  Adam opt(2, 0.05);
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> g{2.0 * (p[0] - 1.0), 2.0 * (p[1] + 0.5)};
    opt.step(p, g);
  }
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(p[1] == doctest::Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("Normalizer stats match the concatenated stream within 1e-10 relative") {
  Rng r = Rng::seed_root(5);
  Normalizer norm(3);
  std::vector<std::vector<double>> all(3);
  for (int chunk = 0; chunk < 40; ++chunk) {
    const auto rows = 1 + r.next_below(50);
    Matrix m(rows, 3);
    for (std::size_t i = 0; i < rows; ++i) {
      m(i, 0) = 100.0 + 3.0 * r.next_normal();
      m(i, 1) = -0.001 * r.next_uniform();
      m(i, 2) = r.next_normal() * 1e3;
      for (std::size_t c = 0; c < 3; ++c) all[c].push_back(m(i, c));
    }
    norm.update(m);
  }
  for (std::size_t c = 0; c < 3; ++c) {
    long double sum = 0;
    for (double v : all[c]) sum += v;
    const long double mean = sum / all[c].size();
    long double sq = 0;
    for (double v : all[c]) sq += (v - mean) * (v - mean);
    const double sd = static_cast<double>(std::sqrt(sq / all[c].size()));
    CHECK(std::abs(norm.mean()[c] - static_cast<double>(mean)) <= 1e-10 * std::abs(static_cast<double>(mean)));
    CHECK(std::abs(norm.stddev()[c] - sd) <= 1e-10 * sd);
  }
  CHECK(norm.count() == static_cast<double>(all[0].size()));
}

TEST_CASE("Normalizer clips and floors std at eps") {
  Normalizer norm(1, 5.0, 0.01);
  norm.update(Matrix(10, 1, 2.0));  // zero variance
  Matrix x(2, 1);
  x(0, 0) = 2.001;
  x(1, 0) = 100.0;
  const Matrix y = norm.normalize(x);
  CHECK(y(0, 0) == doctest::Approx(0.1));
  CHECK(y(1, 0) == 5.0);
}
