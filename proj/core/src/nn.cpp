#include "unimotion/nn.hpp"

#include <cmath>
#include <numbers>

namespace unimotion::nn {

Matrix uniform_init(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in > 0 ? fan_in : 1));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  // Row-major fill order so the draw sequence does not depend on storage order.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

Linear::Linear(Eigen::Index in, Eigen::Index out, Rng& rng)
    : weight(uniform_init(out, in, in, rng)), bias(uniform_init(out, 1, in, rng)) {}

Matrix Linear::forward(const Matrix& x) const {
  Matrix y = x * weight.transpose();
  y.rowwise() += bias.transpose();
  return y;
}

Vector Linear::forward(const Vector& x) const { return weight * x + bias; }

void Linear::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".weight", weight);
  fn(prefix + ".bias", bias);
}

LayerNorm::LayerNorm(Eigen::Index width)
    : gamma(Vector::Ones(width)), beta(Vector::Zero(width)) {}

Matrix LayerNorm::forward(const Matrix& x) const {
  Matrix y(x.rows(), x.cols());
  const double n = static_cast<double>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / n;
    const double var = (x.row(r).array() - mean).square().sum() / n;
    const double inv = 1.0 / std::sqrt(var + eps);
    y.row(r) = ((x.row(r).array() - mean) * inv).matrix().cwiseProduct(gamma.transpose()) +
               beta.transpose();
  }
  return y;
}

void LayerNorm::visit(const std::string& prefix, const ParamVisitor& fn) {
  fn(prefix + ".gamma", gamma);
  fn(prefix + ".beta", beta);
}

Vector softmax(const Vector& logits) {
  const double peak = logits.maxCoeff();
  Vector e = (logits.array() - peak).exp().matrix();
  return e / e.sum();
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    out.row(r) = softmax(logits.row(r).transpose()).transpose();
  }
  return out;
}

Matrix softmax_cols(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) out.col(c) = softmax(logits.col(c));
  return out;
}

Matrix gelu(const Matrix& x) {
  return x.unaryExpr([](double v) { return 0.5 * v * (1.0 + std::erf(v / std::numbers::sqrt2)); });
}

Vector silu(const Vector& x) {
  return x.unaryExpr([](double v) { return v / (1.0 + std::exp(-v)); });
}

Vector sinusoidal_embedding(double position, Eigen::Index width) {
  Vector e(width);
  const Eigen::Index half = width / 2;
  for (Eigen::Index i = 0; i < width; ++i) {
    const Eigen::Index k = i % (half > 0 ? half : 1);
    const double freq =
        std::exp(-std::log(10000.0) * static_cast<double>(k) / static_cast<double>(half > 0 ? half : 1));
    e(i) = i < half ? std::sin(position * freq) : std::cos(position * freq);
  }
  return e;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace unimotion::nn
