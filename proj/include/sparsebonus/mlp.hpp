#pragma once

#include <span>
#include <vector>

#include "sparsebonus/matrix.hpp"
#include "sparsebonus/rng.hpp"

namespace sparsebonus {

enum class OutputActivation { Identity, Tanh };

/// Fully connected ReLU network over row-batched inputs.
///
/// All parameters live in one flat vector, layer by layer: the weight block
/// (in x out, row-major) followed by the bias (out). Every reduction runs
/// sequentially in index order, so results are reproducible bit for bit on a
/// given platform.
class Mlp {
 public:
  struct Tape {
    std::vector<Matrix> activations;  // [0] = input, [l + 1] = output of layer l
  };

  struct Gradients {
    std::vector<double> params;
    Matrix input;
  };

  Mlp() = default;
  Mlp(std::vector<int> layer_sizes, OutputActivation output);

  /// Glorot-uniform weights, zero biases.
  void init_glorot(Rng& rng);

  Matrix forward(const Matrix& input) const;
  Matrix forward(const Matrix& input, Tape& tape) const;

  /// Reverse-mode pass for dL/d(output) = upstream, using a tape from forward().
  Gradients backward(const Tape& tape, const Matrix& upstream) const;

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }
  std::size_t param_count() const noexcept { return params_.size(); }

  const std::vector<int>& layer_sizes() const noexcept { return sizes_; }
  std::size_t input_dim() const { return static_cast<std::size_t>(sizes_.front()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(sizes_.back()); }
  OutputActivation output_activation() const noexcept { return output_; }
  std::size_t num_layers() const noexcept { return sizes_.size() - 1; }

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + static_cast<std::size_t>(sizes_[layer] * sizes_[layer + 1]);
  }

  std::vector<int> sizes_;
  OutputActivation output_ = OutputActivation::Identity;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// target <- tau * main + (1 - tau) * target, elementwise.
void polyak_update(Mlp& target, const Mlp& main, double tau);

class Adam {
 public:
  Adam() = default;
  explicit Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);

  long long steps() const noexcept { return t_; }
  std::span<const double> first_moment() const noexcept { return m_; }
  std::span<const double> second_moment() const noexcept { return v_; }

 private:
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long long t_ = 0;
  std::vector<double> m_, v_;
};

/// Running per-dimension mean/variance, merged batch-wise (Chan et al.).
/// normalize(x) = clip((x - mean) / max(std, eps), -clip, clip).
class Normalizer {
 public:
  Normalizer() = default;
  explicit Normalizer(std::size_t dim, double clip = 5.0, double eps = 0.01);

  void update(const Matrix& rows);
  Matrix normalize(const Matrix& rows) const;

  std::size_t dim() const noexcept { return mean_.size(); }
  double count() const noexcept { return count_; }
  const std::vector<double>& mean() const noexcept { return mean_; }
  std::vector<double> variance() const;
  std::vector<double> stddev() const;
  double clip() const noexcept { return clip_; }
  double eps() const noexcept { return eps_; }

  /// Restores raw accumulator state (checkpoint load).
  void restore(double count, std::vector<double> mean, std::vector<double> m2);
  const std::vector<double>& m2() const noexcept { return m2_; }

  friend bool operator==(const Normalizer&, const Normalizer&) = default;

 private:
  double clip_ = 5.0;
  double eps_ = 0.01;
  double count_ = 0.0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

}  // namespace sparsebonus
