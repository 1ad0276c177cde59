#pragma once

// Minimal dense building blocks for the reference forward pass. Every
// parameter is an Eigen matrix reachable through `visit` so snapshots can be
// written and restored by name.

#include <cstdint>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Core>

namespace unimotion::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Callback over named parameters. Biases are visited as n x 1 matrices.
using ParamVisitor = std::function<void(const std::string& name, Eigen::Ref<Matrix> value)>;

/// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
Matrix uniform_init(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in, Rng& rng);

struct Linear {
  Matrix weight;  // out x in
  Vector bias;    // out

  Linear() = default;
  /// Weight and bias drawn by uniform_init with fan_in = in.
  Linear(Eigen::Index in, Eigen::Index out, Rng& rng);

  Eigen::Index in_features() const noexcept { return weight.cols(); }
  Eigen::Index out_features() const noexcept { return weight.rows(); }

  /// Row-wise: each row of `x` is one input vector.
  Matrix forward(const Matrix& x) const;
  Vector forward(const Vector& x) const;

  void visit(const std::string& prefix, const ParamVisitor& fn);
};

struct LayerNorm {
  Vector gamma;
  Vector beta;
  double eps = 1e-5;

  LayerNorm() = default;
  explicit LayerNorm(Eigen::Index width);

  /// Normalizes every row independently.
  Matrix forward(const Matrix& x) const;
  void visit(const std::string& prefix, const ParamVisitor& fn);
};

/// Numerically stable softmax of a vector.
Vector softmax(const Vector& logits);
/// Softmax along each row.
Matrix softmax_rows(const Matrix& logits);
/// Softmax along each column (normalizes over tokens per channel).
Matrix softmax_cols(const Matrix& logits);

Matrix gelu(const Matrix& x);
Vector silu(const Vector& x);

/// Sinusoidal embedding of a scalar position into `width` channels.
Vector sinusoidal_embedding(double position, Eigen::Index width);

/// Derives an independent 64-bit stream seed from a base seed and a salt.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace unimotion::nn
