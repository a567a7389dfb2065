#include "sparsebonus/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "sparsebonus/error.hpp"

namespace sparsebonus {

Mlp::Mlp(std::vector<int> layer_sizes, OutputActivation output)
    : sizes_(std::move(layer_sizes)), output_(output) {
  require(sizes_.size() >= 2, "Mlp: need at least input and output sizes");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    require(sizes_[l] > 0 && sizes_[l + 1] > 0, "Mlp: layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l] * sizes_[l + 1] + sizes_[l + 1]);
  }
  params_.assign(total, 0.0);
}

void Mlp::init_glorot(Rng& rng) {
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    double* w = params_.data() + weight_offset(l);
    for (std::size_t i = 0; i < in * out; ++i) w[i] = limit * (2.0 * rng.next_uniform() - 1.0);
    std::fill_n(params_.data() + bias_offset(l), out, 0.0);
  }
}

Matrix Mlp::forward(const Matrix& input) const {
  Tape tape;
  return forward(input, tape);
}

Matrix Mlp::forward(const Matrix& input, Tape& tape) const {
  require(input.cols() == input_dim(), "Mlp::forward: input dimension mismatch");
  tape.activations.clear();
  tape.activations.reserve(sizes_.size());
  tape.activations.push_back(input);
  const std::size_t n = input.rows();
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const double* w = params_.data() + weight_offset(l);
    const double* bias = params_.data() + bias_offset(l);
    const Matrix& x = tape.activations.back();
    Matrix z(n, out);
    for (std::size_t r = 0; r < n; ++r) {
      double* zr = z.row(r).data();
      std::copy_n(bias, out, zr);
      const double* xr = x.row(r).data();
      for (std::size_t k = 0; k < in; ++k) {
        const double xv = xr[k];
        const double* wk = w + k * out;
        for (std::size_t j = 0; j < out; ++j) zr[j] += xv * wk[j];
      }
    }
    const bool last = l + 1 == num_layers();
    auto vals = z.flat();
    if (!last) {
      for (double& v : vals) v = v > 0.0 ? v : 0.0;
    } else if (output_ == OutputActivation::Tanh) {
      for (double& v : vals) v = std::tanh(v);
    }
    tape.activations.push_back(std::move(z));
  }
  return tape.activations.back();
}

Mlp::Gradients Mlp::backward(const Tape& tape, const Matrix& upstream) const {
  require(tape.activations.size() == sizes_.size(), "Mlp::backward: tape does not match network");
  const std::size_t n = upstream.rows();
  require(upstream.cols() == output_dim() && tape.activations.back().rows() == n,
          "Mlp::backward: upstream gradient shape mismatch");

  Gradients g;
  g.params.assign(params_.size(), 0.0);
  Matrix delta = upstream;
  for (std::size_t l = num_layers(); l-- > 0;) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const Matrix& y = tape.activations[l + 1];
    const Matrix& x = tape.activations[l];

    // delta becomes dL/dz for this layer.
    auto d = delta.flat();
    auto yv = y.flat();
    if (l + 1 < num_layers()) {
      for (std::size_t i = 0; i < d.size(); ++i)
        if (!(yv[i] > 0.0)) d[i] = 0.0;
    } else if (output_ == OutputActivation::Tanh) {
      for (std::size_t i = 0; i < d.size(); ++i) d[i] *= 1.0 - yv[i] * yv[i];
    }

    double* gw = g.params.data() + weight_offset(l);
    double* gb = g.params.data() + bias_offset(l);
    for (std::size_t r = 0; r < n; ++r) {
      const double* dr = delta.row(r).data();
      const double* xr = x.row(r).data();
      for (std::size_t k = 0; k < in; ++k) {
        const double xv = xr[k];
        double* gwk = gw + k * out;
        for (std::size_t j = 0; j < out; ++j) gwk[j] += xv * dr[j];
      }
      for (std::size_t j = 0; j < out; ++j) gb[j] += dr[j];
    }

    // dL/dx = delta * W^T, via an explicit transpose so the inner loop is contiguous.
    const double* w = params_.data() + weight_offset(l);
    std::vector<double> wt(in * out);
    for (std::size_t k = 0; k < in; ++k)
      for (std::size_t j = 0; j < out; ++j) wt[j * in + k] = w[k * out + j];
    Matrix dx(n, in);
    for (std::size_t r = 0; r < n; ++r) {
      double* dxr = dx.row(r).data();
      const double* dr = delta.row(r).data();
      for (std::size_t j = 0; j < out; ++j) {
        const double dv = dr[j];
        const double* wtj = wt.data() + j * in;
        for (std::size_t k = 0; k < in; ++k) dxr[k] += dv * wtj[k];
      }
    }
    delta = std::move(dx);
  }
  g.input = std::move(delta);
  return g;
}

void polyak_update(Mlp& target, const Mlp& main, double tau) {
  require(target.layer_sizes() == main.layer_sizes(), "polyak_update: shape mismatch");
  auto t = target.params();
  auto m = main.params();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau * m[i] + (1.0 - tau) * t[i];
}

// Adam ----------------------------------------------------------------------

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  require(params.size() == m_.size() && grad.size() == m_.size(), "Adam::step: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double mhat = m_[i] / c1;
    const double vhat = v_[i] / c2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

// Normalizer ----------------------------------------------------------------

Normalizer::Normalizer(std::size_t dim, double clip, double eps)
    : clip_(clip), eps_(eps), mean_(dim, 0.0), m2_(dim, 0.0) {}

void Normalizer::update(const Matrix& rows) {
  require(rows.cols() == dim(), "Normalizer::update: dimension mismatch");
  if (rows.rows() == 0) return;
  const auto nb = static_cast<double>(rows.rows());
  for (std::size_t c = 0; c < dim(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < rows.rows(); ++r) sum += rows(r, c);
    const double mb = sum / nb;
    double m2b = 0.0;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      const double d = rows(r, c) - mb;
      m2b += d * d;
    }
    const double total = count_ + nb;
    const double delta = mb - mean_[c];
    mean_[c] += delta * nb / total;
    m2_[c] += m2b + delta * delta * count_ * nb / total;
  }
  count_ += nb;
}

std::vector<double> Normalizer::variance() const {
  std::vector<double> v(dim(), 0.0);
  if (count_ > 0)
    for (std::size_t c = 0; c < dim(); ++c) v[c] = m2_[c] / count_;
  return v;
}

std::vector<double> Normalizer::stddev() const {
  auto v = variance();
  for (double& x : v) x = std::sqrt(x);
  return v;
}

Matrix Normalizer::normalize(const Matrix& rows) const {
  require(rows.cols() == dim(), "Normalizer::normalize: dimension mismatch");
  const auto sd = stddev();
  Matrix out(rows.rows(), rows.cols());
  for (std::size_t r = 0; r < rows.rows(); ++r)
    for (std::size_t c = 0; c < dim(); ++c)
      out(r, c) = std::clamp((rows(r, c) - mean_[c]) / std::max(sd[c], eps_), -clip_, clip_);
  return out;
}

void Normalizer::restore(double count, std::vector<double> mean, std::vector<double> m2) {
  require(mean.size() == m2.size(), "Normalizer::restore: size mismatch");
  count_ = count;
  mean_ = std::move(mean);
  m2_ = std::move(m2);
}

}  // namespace sparsebonus
