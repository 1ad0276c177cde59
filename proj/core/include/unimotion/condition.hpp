#pragma once

// Multi-modal condition tokens: a pluggable embedder interface, the
// two-layer token refiner and per-modality condition dropout.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "unimotion/modality.hpp"
#include "unimotion/nn.hpp"

namespace unimotion {

/// L x width, one token per row.
using TokenMatrix = Eigen::MatrixXd;

class ConditionSet {
 public:
  bool has(Modality m) const { return tokens_[index(m)].has_value(); }
  /// nullptr when the modality is absent.
  const TokenMatrix* get(Modality m) const;
  void set(Modality m, TokenMatrix tokens);
  void erase(Modality m) { tokens_[index(m)].reset(); }

  bool empty() const noexcept;
  int present_count() const noexcept;
  Eigen::Index total_tokens() const noexcept;

  /// Every present matrix must have >= 1 row and exactly `width` columns.
  void validate(Eigen::Index width) const;

  bool operator==(const ConditionSet& other) const;

 private:
  static std::size_t index(Modality m) { return static_cast<std::size_t>(m); }

  std::array<std::optional<TokenMatrix>, kNumModalities> tokens_;
};

/// Encoder from raw bytes of one modality to a token matrix. Implementations
/// must be deterministic and return row-major semantics: one token per row,
/// `width()` columns.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual TokenMatrix embed(std::span<const std::byte> raw, Modality modality) const = 0;
  virtual Eigen::Index width() const = 0;

  TokenMatrix embed(std::string_view text, Modality modality) const;
};

/// Deterministic stand-in encoder: each `chunk_size` bytes become one token
/// whose entries are seeded hashes mapped to [-1, 1].
class HashEmbedder final : public Embedder {
 public:
  HashEmbedder(std::uint64_t seed, Eigen::Index width, std::size_t chunk_size = 4,
               std::size_t max_tokens = 64);

  using Embedder::embed;
  TokenMatrix embed(std::span<const std::byte> raw, Modality modality) const override;
  Eigen::Index width() const override { return width_; }

 private:
  std::uint64_t seed_;
  Eigen::Index width_;
  std::size_t chunk_size_;
  std::size_t max_tokens_;
};

/// Two post-norm transformer encoder layers with seeded, untrained weights.
class ConditionRefiner {
 public:
  ConditionRefiner(Eigen::Index width, int heads, std::uint64_t seed,
                   bool positional_encoding = false);

  TokenMatrix refine(const TokenMatrix& tokens) const;
  ConditionSet refine(const ConditionSet& set) const;

  Eigen::Index width() const noexcept { return width_; }
  void visit(const std::string& prefix, const nn::ParamVisitor& fn);

 private:
  struct EncoderLayer {
    nn::Linear query, key, value, out;
    nn::LayerNorm norm1, norm2;
    nn::Linear ff1, ff2;
  };

  TokenMatrix apply(const EncoderLayer& layer, const TokenMatrix& x) const;

  Eigen::Index width_;
  int heads_;
  bool positional_encoding_;
  std::array<EncoderLayer, 2> layers_;
};

inline constexpr double kDefaultConditionDropout = 0.1;

/// Removes each present modality independently with probability p.
ConditionSet dropout_conditions(const ConditionSet& set, double p, std::uint64_t seed);

}  // namespace unimotion
