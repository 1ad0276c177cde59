#pragma once

// Reference forward pass of the body-part aware diffusion denoiser:
// dataset-specific read-in/read-out, stylization, per-frame spatial attention
// over body parts and template-based temporal attention.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "unimotion/condition.hpp"
#include "unimotion/motion_repr.hpp"
#include "unimotion/nn.hpp"
#include "unimotion/temporal_ops.hpp"

namespace unimotion {

struct ModelConfig {
  static constexpr int kHeads = kNumParts;
  static constexpr int kPlaceholderCount = 64;

  std::string preset = "desk";
  int latent_dim = 8;
  int num_layers = 2;
  int num_experts = 4;
  int num_templates = 4;
  int taylor_order = 2;
  double sigma = 1.0;              // seconds
  double drop_mask_probability = 0.1;
  int diffusion_steps = 1000;      // size of the timestep embedding table
  std::vector<std::string> datasets;  // registered tags besides "all"

  /// Throws ValidationError on non-positive sizes or sigma.
  void validate() const;

  /// tiny, small, base, large or desk (case-insensitive).
  static ModelConfig from_preset(std::string_view name);
};

std::vector<std::string> preset_names();

/// F x H x D latent grid; row `frame * kNumParts + part` of `data` is one token.
struct LatentMotion {
  std::size_t frames = 0;
  Eigen::Index width = 0;
  double fps = 30.0;
  nn::Matrix data;
  std::vector<double> times;  // seconds, times[k] = k / fps

  LatentMotion() = default;
  LatentMotion(std::size_t frames, Eigen::Index width, double fps);

  Eigen::Index row(std::size_t frame, int part) const {
    return static_cast<Eigen::Index>(frame * kNumParts + static_cast<std::size_t>(part));
  }
  auto token(std::size_t frame, int part) { return data.row(row(frame, part)); }
  auto token(std::size_t frame, int part) const { return data.row(row(frame, part)); }
  /// F x D slice of one part across all frames.
  nn::Matrix part_tokens(int part) const;
  double duration() const { return times.empty() ? 0.0 : times.back(); }
};

/// One kinetic template: a center time and Taylor coefficients G^(0..k).
struct Template {
  double center = 0.0;       // seconds
  nn::Matrix coefficients;   // (order + 1) x width
};

struct GlobalTemplateSet {
  int heads = 0;
  int per_head = 0;
  double sigma = 1.0;
  std::vector<Template> templates;  // head-major

  Template& at(int head, int j) { return templates[static_cast<std::size_t>(head * per_head + j)]; }
  const Template& at(int head, int j) const {
    return templates[static_cast<std::size_t>(head * per_head + j)];
  }
  std::vector<double> centers(int head) const;
};

/// Softmax over templates of -(x - c_j)^2 / sigma^2.
nn::Vector temporal_weights(double x, std::span<const double> centers, double sigma);
/// d/dx of temporal_weights, via the softmax Jacobian.
nn::Vector weight_grad(double x, std::span<const double> centers, double sigma);
/// sum_n G^(n) / n! * (x - center)^n, per channel.
nn::Vector taylor_eval(const Template& tmpl, double x);

/// Moves every center by delta seconds.
GlobalTemplateSet shift_templates(const GlobalTemplateSet& templates, double delta);
/// Concatenates two sets per head (e.g. a clip and a shifted continuation).
GlobalTemplateSet combine_templates(const GlobalTemplateSet& first, const GlobalTemplateSet& second);

/// Pre-projection temporal signal sum_j G*_j(x_k) G'_j(x_k): rows frame * heads + head.
nn::Matrix temporal_signal(const GlobalTemplateSet& templates, std::span<const double> times);

/// Per-frame scaled dot-product attention over the ten part tokens. Keys of
/// parts with available(f, p) == 0 are excluded. Returns (F * 10) x D.
nn::Matrix spatial_attention(const LatentMotion& latent, const BodyPartMask& available,
                             const nn::Linear& query, const nn::Linear& key,
                             const nn::Linear& value);

/// theta * e_w + e_b on every frame; e_w and e_b are H x D.
struct Style {
  nn::Matrix weight;
  nn::Matrix bias;
};
LatentMotion apply_style(const LatentMotion& latent, const Style& style);

class Denoiser {
 public:
  Denoiser(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return config_; }
  bool has_dataset(std::string_view tag) const;

  LatentMotion read_in(const MotionSequence& seq, const BodyPartMask& drop,
                       std::string_view dataset) const;
  MotionSequence read_out(const LatentMotion& latent, std::string_view dataset) const;

  Style style(int layer, int t_step, double fps, std::string_view dataset) const;
  LatentMotion stylize(int layer, const LatentMotion& latent, int t_step,
                       std::string_view dataset) const;

  nn::Matrix spatial(int layer, const LatentMotion& latent, const BodyPartMask& available) const;

  /// `refined` must already be passed through the condition refiner.
  GlobalTemplateSet build_templates(int layer, const LatentMotion& latent,
                                    const ConditionSet& refined) const;
  /// Per-channel softmax weights over the F motion tokens of one head (F x N_g).
  nn::Matrix motion_stream_weights(int layer, const LatentMotion& latent, int head) const;
  /// Per-channel softmax weights over placeholders + condition tokens ((64 + L) x N_g).
  nn::Matrix condition_stream_weights(int layer, const ConditionSet& refined, int head) const;
  /// Mixture-of-experts gate over one D-wide condition token block.
  nn::Vector gate_weights(int layer, const nn::Vector& token) const;

  nn::Matrix temporal(int layer, const LatentMotion& latent,
                      const GlobalTemplateSet& templates) const;

  /// x0 prediction. `conditions` hold raw tokens of width H * D; they are
  /// refined once per call.
  MotionSequence forward(const MotionSequence& x_t, int t_step, const BodyPartMask& drop,
                         const ConditionSet& conditions, std::string_view dataset) const;

  const ConditionRefiner& refiner() const noexcept { return refiner_; }

  void visit(const nn::ParamVisitor& fn);
  std::size_t parameter_count();
  void save(const std::filesystem::path& path);
  void load(const std::filesystem::path& path);

 private:
  struct DatasetLayers {
    std::array<nn::Linear, kNumParts> read_in;
    std::array<nn::Linear, kNumParts> read_out;
    nn::Vector embedding;
  };

  struct Layer {
    nn::LayerNorm attn_norm;
    nn::Linear style_weight;  // D -> H*D
    nn::Linear style_bias;    // D -> H*D
    nn::Linear query, key, value;
    nn::Linear motion_key;    // D -> N_g
    nn::Linear motion_value;  // D -> D
    nn::Linear gate;          // D -> E
    std::vector<nn::Linear> experts;  // D -> N_g + D each
    nn::Matrix placeholder_keys;      // 64 x (H * N_g)
    nn::Matrix placeholder_values;    // 64 x (H * D)
    nn::Linear center;                // D -> 1
    std::vector<nn::Linear> coefficients;  // (k + 1) x (D -> D)
    std::array<nn::Linear, kNumParts> temporal_out;
    nn::LayerNorm ffn_norm;
    nn::Linear ffn_in, ffn_out;
  };

  const DatasetLayers& dataset_layers(std::string_view tag) const;
  void check_layer(int layer) const;
  /// Mixture-of-experts keys/values for one head: (64 + L) x N_g and (64 + L) x D.
  std::pair<nn::Matrix, nn::Matrix> condition_stream(const Layer& layer,
                                                     const ConditionSet& refined, int head) const;

  ModelConfig config_;
  ConditionRefiner refiner_;
  nn::Matrix timestep_table_;  // T x D, fixed sinusoidal
  std::array<nn::Vector, kNumParts> empty_tokens_;
  std::map<std::string, DatasetLayers, std::less<>> datasets_;
  std::vector<Layer> layers_;
  nn::LayerNorm final_norm_;
};

}  // namespace unimotion
