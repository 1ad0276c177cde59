#include "unimotion/condition.hpp"

#include <cmath>
#include <random>
#include <string>

#include "unimotion/errors.hpp"

namespace unimotion {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffULL;
    h *= kFnvPrime;
  }
  return h;
}

double to_unit_interval(std::uint64_t bits) {
  // 53 high bits -> [0, 1] -> [-1, 1]
  const double u = static_cast<double>(bits >> 11) / static_cast<double>((1ULL << 53) - 1);
  return 2.0 * u - 1.0;
}

}  // namespace

const TokenMatrix* ConditionSet::get(Modality m) const {
  const auto& slot = tokens_[index(m)];
  return slot ? &*slot : nullptr;
}

void ConditionSet::set(Modality m, TokenMatrix tokens) { tokens_[index(m)] = std::move(tokens); }

bool ConditionSet::empty() const noexcept { return present_count() == 0; }

int ConditionSet::present_count() const noexcept {
  int n = 0;
  for (const auto& t : tokens_) n += t.has_value() ? 1 : 0;
  return n;
}

Eigen::Index ConditionSet::total_tokens() const noexcept {
  Eigen::Index n = 0;
  for (const auto& t : tokens_) n += t ? t->rows() : 0;
  return n;
}

void ConditionSet::validate(Eigen::Index width) const {
  for (auto m : kAllModalities) {
    const auto* t = get(m);
    if (!t) continue;
    if (t->rows() < 1) {
      throw ValidationError(std::string(modality_name(m)) + " condition has no tokens");
    }
    if (t->cols() != width) {
      throw DimensionError(std::string(modality_name(m)) + " condition width " +
                           std::to_string(t->cols()) + " != " + std::to_string(width));
    }
  }
}

bool ConditionSet::operator==(const ConditionSet& other) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const auto& a = tokens_[i];
    const auto& b = other.tokens_[i];
    if (a.has_value() != b.has_value()) return false;
    if (a && (a->rows() != b->rows() || a->cols() != b->cols() || *a != *b)) return false;
  }
  return true;
}

TokenMatrix Embedder::embed(std::string_view text, Modality modality) const {
  return embed(std::as_bytes(std::span(text.data(), text.size())), modality);
}

HashEmbedder::HashEmbedder(std::uint64_t seed, Eigen::Index width, std::size_t chunk_size,
                           std::size_t max_tokens)
    : seed_(seed), width_(width), chunk_size_(chunk_size), max_tokens_(max_tokens) {
  if (width < 1 || chunk_size < 1 || max_tokens < 1) {
    throw ValidationError("embedder width, chunk size and token cap must be positive");
  }
}

TokenMatrix HashEmbedder::embed(std::span<const std::byte> raw, Modality modality) const {
  if (raw.empty()) throw ValidationError("cannot embed empty input");
  const std::size_t chunks = (raw.size() + chunk_size_ - 1) / chunk_size_;
  const std::size_t rows = std::min(chunks, max_tokens_);
  TokenMatrix out(static_cast<Eigen::Index>(rows), width_);
  for (std::size_t r = 0; r < rows; ++r) {
    std::uint64_t h = fnv_mix(kFnvOffset, seed_);
    h = fnv_mix(h, static_cast<std::uint64_t>(modality));
    h = fnv_mix(h, r);
    const std::size_t begin = r * chunk_size_;
    const std::size_t end = std::min(raw.size(), begin + chunk_size_);
    for (std::size_t i = begin; i < end; ++i) {
      h ^= static_cast<std::uint64_t>(raw[i]);
      h *= kFnvPrime;
    }
    for (Eigen::Index c = 0; c < width_; ++c) {
      out(static_cast<Eigen::Index>(r), c) =
          to_unit_interval(nn::derive_seed(h, static_cast<std::uint64_t>(c)));
    }
  }
  return out;
}

ConditionRefiner::ConditionRefiner(Eigen::Index width, int heads, std::uint64_t seed,
                                   bool positional_encoding)
    : width_(width), heads_(heads), positional_encoding_(positional_encoding) {
  if (heads < 1 || width % heads != 0) {
    throw ValidationError("refiner width must be divisible by the head count");
  }
  nn::Rng rng(seed);
  for (auto& layer : layers_) {
    layer.query = nn::Linear(width, width, rng);
    layer.key = nn::Linear(width, width, rng);
    layer.value = nn::Linear(width, width, rng);
    layer.out = nn::Linear(width, width, rng);
    layer.norm1 = nn::LayerNorm(width);
    layer.norm2 = nn::LayerNorm(width);
    layer.ff1 = nn::Linear(width, 2 * width, rng);
    layer.ff2 = nn::Linear(2 * width, width, rng);
  }
}

TokenMatrix ConditionRefiner::apply(const EncoderLayer& layer, const TokenMatrix& x) const {
  const Eigen::Index head_dim = width_ / heads_;
  const nn::Matrix q = layer.query.forward(x);
  const nn::Matrix k = layer.key.forward(x);
  const nn::Matrix v = layer.value.forward(x);
  nn::Matrix attended(x.rows(), width_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  for (int h = 0; h < heads_; ++h) {
    const Eigen::Index c0 = h * head_dim;
    const nn::Matrix scores =
        q.middleCols(c0, head_dim) * k.middleCols(c0, head_dim).transpose() * scale;
    attended.middleCols(c0, head_dim) = nn::softmax_rows(scores) * v.middleCols(c0, head_dim);
  }
  const nn::Matrix h1 = layer.norm1.forward(x + layer.out.forward(attended));
  return layer.norm2.forward(h1 + layer.ff2.forward(nn::gelu(layer.ff1.forward(h1))));
}

TokenMatrix ConditionRefiner::refine(const TokenMatrix& tokens) const {
  if (tokens.cols() != width_) {
    throw DimensionError("condition tokens have width " + std::to_string(tokens.cols()) +
                         ", refiner expects " + std::to_string(width_));
  }
  TokenMatrix x = tokens;
  if (positional_encoding_) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      x.row(r) += nn::sinusoidal_embedding(static_cast<double>(r), width_).transpose();
    }
  }
  for (const auto& layer : layers_) x = apply(layer, x);
  return x;
}

ConditionSet ConditionRefiner::refine(const ConditionSet& set) const {
  ConditionSet out;
  for (auto m : kAllModalities) {
    if (const auto* t = set.get(m)) out.set(m, refine(*t));
  }
  return out;
}

void ConditionRefiner::visit(const std::string& prefix, const nn::ParamVisitor& fn) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string p = prefix + ".layer" + std::to_string(i);
    auto& l = layers_[i];
    l.query.visit(p + ".query", fn);
    l.key.visit(p + ".key", fn);
    l.value.visit(p + ".value", fn);
    l.out.visit(p + ".out", fn);
    l.norm1.visit(p + ".norm1", fn);
    l.norm2.visit(p + ".norm2", fn);
    l.ff1.visit(p + ".ff1", fn);
    l.ff2.visit(p + ".ff2", fn);
  }
}

ConditionSet dropout_conditions(const ConditionSet& set, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("dropout probability must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ConditionSet out = set;
  // One draw per modality slot so the stream does not depend on which are present.
  for (auto m : kAllModalities) {
    const bool drop = uniform(rng) < p;
    if (drop) out.erase(m);
  }
  return out;
}

}  // namespace unimotion
