#include "unimotion/artattention.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "unimotion/datasets.hpp"
#include "unimotion/errors.hpp"
#include "unimotion/param_snapshot.hpp"

namespace unimotion {

namespace {

constexpr int kH = ModelConfig::kHeads;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> standard_tags() {
  std::vector<std::string> tags;
  for (const auto& d : standard_datasets()) tags.push_back(d.tag);
  return tags;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

ModelConfig validated(ModelConfig c) {
  c.validate();
  return c;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

void ModelConfig::validate() const {
  if (latent_dim < 1 || num_layers < 1 || num_experts < 1 || num_templates < 1 ||
      taylor_order < 0 || diffusion_steps < 1) {
    throw ValidationError("model sizes must be positive");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be positive");
  if (!(drop_mask_probability >= 0.0 && drop_mask_probability <= 1.0)) {
    throw ValidationError("drop mask probability must lie in [0, 1]");
  }
}

ModelConfig ModelConfig::from_preset(std::string_view name) {
  struct Row {
    std::string_view name;
    int latent, layers, experts, templates;
    double mask_p;
  };
  static constexpr std::array<Row, 5> rows = {{
      {"tiny", 64, 4, 16, 16, 0.1},
      {"small", 64, 8, 16, 16, 0.2},
      {"base", 128, 12, 16, 16, 0.3},
      {"large", 128, 20, 32, 32, 0.4},
      {"desk", 8, 2, 4, 4, 0.1},
  }};
  const std::string key = lower(name);
  for (const auto& r : rows) {
    if (r.name != key) continue;
    ModelConfig c;
    c.preset = std::string(r.name);
    c.latent_dim = r.latent;
    c.num_layers = r.layers;
    c.num_experts = r.experts;
    c.num_templates = r.templates;
    c.drop_mask_probability = r.mask_p;
    c.datasets = standard_tags();
    return c;
  }
  throw ValidationError("unknown model preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"tiny", "small", "base", "large", "desk"}; }

LatentMotion::LatentMotion(std::size_t frames_, Eigen::Index width_, double fps_)
    : frames(frames_),
      width(width_),
      fps(fps_),
      data(nn::Matrix::Zero(static_cast<Eigen::Index>(frames_ * kNumParts), width_)),
      times(frames_) {
  for (std::size_t k = 0; k < frames_; ++k) times[k] = static_cast<double>(k) / fps_;
}

nn::Matrix LatentMotion::part_tokens(int part) const {
  nn::Matrix out(static_cast<Eigen::Index>(frames), width);
  for (std::size_t f = 0; f < frames; ++f) out.row(static_cast<Eigen::Index>(f)) = token(f, part);
  return out;
}

std::vector<double> GlobalTemplateSet::centers(int head) const {
  std::vector<double> c(static_cast<std::size_t>(per_head));
  for (int j = 0; j < per_head; ++j) c[static_cast<std::size_t>(j)] = at(head, j).center;
  return c;
}

nn::Vector temporal_weights(double x, std::span<const double> centers, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  nn::Vector logits(static_cast<Eigen::Index>(centers.size()));
  const double inv = 1.0 / (sigma * sigma);
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double d = x - centers[j];
    logits(static_cast<Eigen::Index>(j)) = -d * d * inv;
  }
  return nn::softmax(logits);
}

nn::Vector weight_grad(double x, std::span<const double> centers, double sigma) {
  const nn::Vector w = temporal_weights(x, centers, sigma);
  nn::Vector dlogit(w.size());
  const double inv = 1.0 / (sigma * sigma);
  for (std::size_t j = 0; j < centers.size(); ++j) {
    dlogit(static_cast<Eigen::Index>(j)) = -2.0 * (x - centers[j]) * inv;
  }
  const double mean = w.dot(dlogit);
  return w.cwiseProduct((dlogit.array() - mean).matrix());
}

nn::Vector taylor_eval(const Template& tmpl, double x) {
  const double d = x - tmpl.center;
  nn::Vector out = tmpl.coefficients.row(0).transpose();
  double power = 1.0;
  for (Eigen::Index n = 1; n < tmpl.coefficients.rows(); ++n) {
    power *= d;
    out += tmpl.coefficients.row(n).transpose() * (power / factorial(static_cast<int>(n)));
  }
  return out;
}

GlobalTemplateSet shift_templates(const GlobalTemplateSet& templates, double delta) {
  GlobalTemplateSet out = templates;
  for (auto& t : out.templates) t.center += delta;
  return out;
}

GlobalTemplateSet combine_templates(const GlobalTemplateSet& first,
                                    const GlobalTemplateSet& second) {
  if (first.heads != second.heads || first.sigma != second.sigma) {
    throw ContractError("template sets must share head count and sigma");
  }
  GlobalTemplateSet out;
  out.heads = first.heads;
  out.per_head = first.per_head + second.per_head;
  out.sigma = first.sigma;
  for (int h = 0; h < first.heads; ++h) {
    for (int j = 0; j < first.per_head; ++j) out.templates.push_back(first.at(h, j));
    for (int j = 0; j < second.per_head; ++j) out.templates.push_back(second.at(h, j));
  }
  return out;
}

nn::Matrix temporal_signal(const GlobalTemplateSet& templates, std::span<const double> times) {
  if (templates.templates.empty()) throw ContractError("template set is empty");
  const Eigen::Index width = templates.templates.front().coefficients.cols();
  nn::Matrix out = nn::Matrix::Zero(static_cast<Eigen::Index>(times.size()) * templates.heads,
                                    width);
  for (int h = 0; h < templates.heads; ++h) {
    const auto centers = templates.centers(h);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const nn::Vector w = temporal_weights(times[k], centers, templates.sigma);
      auto row = out.row(static_cast<Eigen::Index>(k) * templates.heads + h);
      for (int j = 0; j < templates.per_head; ++j) {
        row += w(j) * taylor_eval(templates.at(h, j), times[k]).transpose();
      }
    }
  }
  return out;
}

nn::Matrix spatial_attention(const LatentMotion& latent, const BodyPartMask& available,
                             const nn::Linear& query, const nn::Linear& key,
                             const nn::Linear& value) {
  if (available.frames() != latent.frames) {
    throw DimensionError("availability mask does not match the latent frame count");
  }
  if (available.convention() != MaskConvention::Visibility) {
    throw ContractError("spatial attention expects an availability (visibility) mask");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(query.out_features()));
  nn::Matrix out(latent.data.rows(), value.out_features());
  for (std::size_t f = 0; f < latent.frames; ++f) {
    const nn::Matrix tokens = latent.data.middleRows(latent.row(f, 0), kNumParts);
    const nn::Matrix q = query.forward(tokens);
    const nn::Matrix k = key.forward(tokens);
    const nn::Matrix v = value.forward(tokens);
    nn::Matrix scores = q * k.transpose() * scale;
    bool any = false;
    for (int p = 0; p < kNumParts; ++p) {
      if (available.at(f, p)) {
        any = true;
      } else {
        scores.col(p).setConstant(-std::numeric_limits<double>::infinity());
      }
    }
    if (!any) {
      throw ContractError("frame " + std::to_string(f) + " has no available body part");
    }
    out.middleRows(latent.row(f, 0), kNumParts) = nn::softmax_rows(scores) * v;
  }
  return out;
}

LatentMotion apply_style(const LatentMotion& latent, const Style& style) {
  if (style.weight.rows() != kNumParts || style.weight.cols() != latent.width ||
      style.bias.rows() != kNumParts || style.bias.cols() != latent.width) {
    throw DimensionError("style must be 10 x latent width");
  }
  LatentMotion out = latent;
  for (std::size_t f = 0; f < latent.frames; ++f) {
    auto slab = out.data.middleRows(latent.row(f, 0), kNumParts);
    slab = slab.cwiseProduct(style.weight) + style.bias;
  }
  return out;
}

Denoiser::Denoiser(ModelConfig config, std::uint64_t seed)
    : config_(validated(std::move(config))),
      refiner_(static_cast<Eigen::Index>(kH) * config_.latent_dim, kH, nn::derive_seed(seed, 1)) {
  const Eigen::Index d = config_.latent_dim;
  const Eigen::Index ng = config_.num_templates;
  nn::Rng rng(nn::derive_seed(seed, 2));

  timestep_table_.resize(config_.diffusion_steps, d);
  for (int t = 0; t < config_.diffusion_steps; ++t) {
    timestep_table_.row(t) = nn::sinusoidal_embedding(static_cast<double>(t), d).transpose();
  }
  for (auto& tok : empty_tokens_) tok = nn::uniform_init(d, 1, d, rng);

  std::vector<std::string> tags = config_.datasets;
  tags.emplace_back(kAllDataset);
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  const auto& layout = canonical_layout();
  for (const auto& tag : tags) {
    DatasetLayers dl;
    for (int p = 0; p < kNumParts; ++p) {
      const auto raw = static_cast<Eigen::Index>(layout.size(static_cast<Part>(p)));
      dl.read_in[p] = nn::Linear(raw, d, rng);
      dl.read_out[p] = nn::Linear(d, raw, rng);
      dl.read_out[p].bias.setZero();
    }
    dl.embedding = nn::uniform_init(d, 1, d, rng);
    datasets_.emplace(tag, std::move(dl));
  }

  layers_.resize(static_cast<std::size_t>(config_.num_layers));
  for (auto& l : layers_) {
    l.attn_norm = nn::LayerNorm(d);
    l.style_weight = nn::Linear(d, kH * d, rng);
    l.style_weight.bias.setOnes();
    l.style_bias = nn::Linear(d, kH * d, rng);
    l.query = nn::Linear(d, d, rng);
    l.key = nn::Linear(d, d, rng);
    l.value = nn::Linear(d, d, rng);
    l.motion_key = nn::Linear(d, ng, rng);
    l.motion_value = nn::Linear(d, d, rng);
    l.gate = nn::Linear(d, config_.num_experts, rng);
    for (int e = 0; e < config_.num_experts; ++e) l.experts.emplace_back(d, ng + d, rng);
    l.placeholder_keys = nn::uniform_init(ModelConfig::kPlaceholderCount, kH * ng, d, rng);
    l.placeholder_values = nn::uniform_init(ModelConfig::kPlaceholderCount, kH * d, d, rng);
    l.center = nn::Linear(d, 1, rng);
    for (int n = 0; n <= config_.taylor_order; ++n) l.coefficients.emplace_back(d, d, rng);
    for (auto& o : l.temporal_out) o = nn::Linear(d, d, rng);
    l.ffn_norm = nn::LayerNorm(d);
    l.ffn_in = nn::Linear(d, 2 * d, rng);
    l.ffn_out = nn::Linear(2 * d, d, rng);
  }
  final_norm_ = nn::LayerNorm(d);
}

bool Denoiser::has_dataset(std::string_view tag) const {
  return datasets_.find(tag) != datasets_.end();
}

const Denoiser::DatasetLayers& Denoiser::dataset_layers(std::string_view tag) const {
  const auto it = datasets_.find(tag);
  if (it == datasets_.end()) {
    throw RegistryError("dataset '" + std::string(tag) + "' is not registered");
  }
  return it->second;
}

void Denoiser::check_layer(int layer) const {
  if (layer < 0 || layer >= config_.num_layers) {
    throw ValidationError("layer index " + std::to_string(layer) + " out of range");
  }
}

LatentMotion Denoiser::read_in(const MotionSequence& seq, const BodyPartMask& drop,
                               std::string_view dataset) const {
  const auto& dl = dataset_layers(dataset);
  validate(seq);
  if (drop.frames() != seq.frames.size()) {
    throw DimensionError("drop mask frame count does not match the sequence");
  }
  if (drop.convention() != MaskConvention::Drop) throw ContractError("read_in expects a drop mask");

  const auto& layout = canonical_layout();
  LatentMotion latent(seq.frames.size(), config_.latent_dim, seq.fps);
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    const auto packed = pack(seq.frames[f]);
    for (int p = 0; p < kNumParts; ++p) {
      if (drop.at(f, p)) {
        latent.token(f, p) = empty_tokens_[p].transpose();
        continue;
      }
      const auto& idx = layout.indices(static_cast<Part>(p));
      nn::Vector raw(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t i = 0; i < idx.size(); ++i) raw(static_cast<Eigen::Index>(i)) = packed[idx[i]];
      latent.token(f, p) = dl.read_in[p].forward(raw).transpose();
    }
  }
  return latent;
}

MotionSequence Denoiser::read_out(const LatentMotion& latent, std::string_view dataset) const {
  const auto& dl = dataset_layers(dataset);
  if (latent.width != config_.latent_dim) throw DimensionError("latent width mismatch");
  const auto& layout = canonical_layout();
  MotionSequence seq;
  seq.fps = latent.fps;
  seq.dataset = std::string(dataset);
  seq.frames.resize(latent.frames);
  for (std::size_t f = 0; f < latent.frames; ++f) {
    FrameVector packed{};
    for (int p = 0; p < kNumParts; ++p) {
      const nn::Vector raw = dl.read_out[p].forward(nn::Vector(latent.token(f, p).transpose()));
      const auto& idx = layout.indices(static_cast<Part>(p));
      for (std::size_t i = 0; i < idx.size(); ++i) packed[idx[i]] = raw(static_cast<Eigen::Index>(i));
    }
    seq.frames[f] = unpack(packed);
  }
  return seq;
}

Style Denoiser::style(int layer, int t_step, double fps, std::string_view dataset) const {
  check_layer(layer);
  if (t_step < 0 || t_step >= config_.diffusion_steps) {
    throw ValidationError("timestep " + std::to_string(t_step) + " outside [0, " +
                          std::to_string(config_.diffusion_steps) + ")");
  }
  const auto& l = layers_[static_cast<std::size_t>(layer)];
  const Eigen::Index d = config_.latent_dim;
  const nn::Vector e = nn::silu(timestep_table_.row(t_step).transpose() +
                                nn::sinusoidal_embedding(fps, d) +
                                dataset_layers(dataset).embedding);
  const nn::Vector w = l.style_weight.forward(e);
  const nn::Vector b = l.style_bias.forward(e);
  Style s;
  s.weight = w.reshaped<Eigen::RowMajor>(kH, d);
  s.bias = b.reshaped<Eigen::RowMajor>(kH, d);
  return s;
}

LatentMotion Denoiser::stylize(int layer, const LatentMotion& latent, int t_step,
                               std::string_view dataset) const {
  return apply_style(latent, style(layer, t_step, latent.fps, dataset));
}

nn::Matrix Denoiser::spatial(int layer, const LatentMotion& latent,
                             const BodyPartMask& available) const {
  check_layer(layer);
  const auto& l = layers_[static_cast<std::size_t>(layer)];
  return spatial_attention(latent, available, l.query, l.key, l.value);
}

nn::Vector Denoiser::gate_weights(int layer, const nn::Vector& token) const {
  check_layer(layer);
  return nn::softmax(layers_[static_cast<std::size_t>(layer)].gate.forward(token));
}

std::pair<nn::Matrix, nn::Matrix> Denoiser::condition_stream(const Layer& l,
                                                             const ConditionSet& refined,
                                                             int head) const {
  const Eigen::Index d = config_.latent_dim;
  const Eigen::Index ng = config_.num_templates;
  const Eigen::Index total = ModelConfig::kPlaceholderCount + refined.total_tokens();
  nn::Matrix keys(total, ng);
  nn::Matrix values(total, d);
  keys.topRows(ModelConfig::kPlaceholderCount) = l.placeholder_keys.middleCols(head * ng, ng);
  values.topRows(ModelConfig::kPlaceholderCount) = l.placeholder_values.middleCols(head * d, d);

  Eigen::Index row = ModelConfig::kPlaceholderCount;
  for (auto m : kAllModalities) {
    const auto* tokens = refined.get(m);
    if (!tokens) continue;
    if (tokens->cols() != kH * d) throw DimensionError("condition width must be H * latent_dim");
    for (Eigen::Index r = 0; r < tokens->rows(); ++r, ++row) {
      const nn::Vector block = tokens->row(r).segment(head * d, d).transpose();
      const nn::Vector gate = nn::softmax(l.gate.forward(block));
      nn::Vector mixed = nn::Vector::Zero(ng + d);
      for (int e = 0; e < config_.num_experts; ++e) {
        mixed += gate(e) * l.experts[static_cast<std::size_t>(e)].forward(block);
      }
      keys.row(row) = mixed.head(ng).transpose();
      values.row(row) = mixed.tail(d).transpose();
    }
  }
  return {std::move(keys), std::move(values)};
}

nn::Matrix Denoiser::motion_stream_weights(int layer, const LatentMotion& latent, int head) const {
  check_layer(layer);
  const auto& l = layers_[static_cast<std::size_t>(layer)];
  return nn::softmax_cols(l.motion_key.forward(latent.part_tokens(head)));
}

nn::Matrix Denoiser::condition_stream_weights(int layer, const ConditionSet& refined,
                                              int head) const {
  check_layer(layer);
  const auto [keys, values] = condition_stream(layers_[static_cast<std::size_t>(layer)], refined, head);
  return nn::softmax_cols(keys);
}

GlobalTemplateSet Denoiser::build_templates(int layer, const LatentMotion& latent,
                                            const ConditionSet& refined) const {
  check_layer(layer);
  const auto& l = layers_[static_cast<std::size_t>(layer)];
  const int ng = config_.num_templates;
  GlobalTemplateSet set;
  set.heads = kH;
  set.per_head = ng;
  set.sigma = config_.sigma;
  set.templates.resize(static_cast<std::size_t>(kH * ng));

  const double duration = latent.duration();
  for (int h = 0; h < kH; ++h) {
    const nn::Matrix tokens = latent.part_tokens(h);
    const nn::Matrix motion_w = nn::softmax_cols(l.motion_key.forward(tokens));
    const nn::Matrix motion_v = l.motion_value.forward(tokens);
    const auto [cond_k, cond_v] = condition_stream(l, refined, h);
    const nn::Matrix cond_w = nn::softmax_cols(cond_k);
    // N_g x D: each template's raw feature mixes both separately normalized streams.
    const nn::Matrix raw = motion_w.transpose() * motion_v + cond_w.transpose() * cond_v;
    for (int j = 0; j < ng; ++j) {
      const nn::Vector g = raw.row(j).transpose();
      auto& t = set.at(h, j);
      t.center = duration * sigmoid(l.center.forward(g)(0));
      t.coefficients.resize(config_.taylor_order + 1, config_.latent_dim);
      for (int n = 0; n <= config_.taylor_order; ++n) {
        t.coefficients.row(n) = l.coefficients[static_cast<std::size_t>(n)].forward(g).transpose();
      }
    }
  }
  return set;
}

nn::Matrix Denoiser::temporal(int layer, const LatentMotion& latent,
                              const GlobalTemplateSet& templates) const {
  check_layer(layer);
  const auto& l = layers_[static_cast<std::size_t>(layer)];
  const nn::Matrix signal = temporal_signal(templates, latent.times);
  if (signal.cols() != latent.width) throw DimensionError("template width mismatch");
  // temporal_signal rows are frame * heads + head, which equals LatentMotion::row.
  nn::Matrix out(signal.rows(), signal.cols());
  for (std::size_t f = 0; f < latent.frames; ++f) {
    for (int h = 0; h < kH; ++h) {
      const auto r = latent.row(f, h);
      out.row(r) = l.temporal_out[h].forward(nn::Vector(signal.row(r).transpose())).transpose();
    }
  }
  return out;
}

MotionSequence Denoiser::forward(const MotionSequence& x_t, int t_step, const BodyPartMask& drop,
                                 const ConditionSet& conditions,
                                 std::string_view dataset) const {
  conditions.validate(static_cast<Eigen::Index>(kH) * config_.latent_dim);
  const ConditionSet refined = refiner_.refine(conditions);

  LatentMotion x = read_in(x_t, drop, dataset);

  // Dropped parts are not attended to; a fully dropped frame attends over its empty tokens.
  BodyPartMask available = drop_to_visibility(drop);
  for (std::size_t f = 0; f < available.frames(); ++f) {
    bool any = false;
    for (int p = 0; p < kNumParts; ++p) any = any || available.at(f, p);
    if (!any) available.set_frame(f, true);
  }

  for (int i = 0; i < config_.num_layers; ++i) {
    const auto& l = layers_[static_cast<std::size_t>(i)];
    LatentMotion h = x;
    h.data = l.attn_norm.forward(x.data);
    h = stylize(i, h, t_step, dataset);
    const nn::Matrix y_s = spatial(i, h, available);
    const GlobalTemplateSet templates = build_templates(i, h, refined);
    const nn::Matrix y_t = temporal(i, h, templates);
    x.data += y_s + y_t;
    x.data += l.ffn_out.forward(nn::gelu(l.ffn_in.forward(l.ffn_norm.forward(x.data))));
  }
  x.data = final_norm_.forward(x.data);

  MotionSequence out = read_out(x, dataset);
  out.parts_present = x_t.parts_present;
  out.anchor = x_t.anchor;
  out.metadata = x_t.metadata;
  out.dataset = x_t.dataset;
  return out;
}

void Denoiser::visit(const nn::ParamVisitor& fn) {
  refiner_.visit("refiner", fn);
  for (int p = 0; p < kNumParts; ++p) {
    fn("empty_token." + std::string(part_name(static_cast<Part>(p))), empty_tokens_[p]);
  }
  for (auto& [tag, dl] : datasets_) {
    const std::string prefix = "dataset." + tag;
    for (int p = 0; p < kNumParts; ++p) {
      const std::string part(part_name(static_cast<Part>(p)));
      dl.read_in[p].visit(prefix + ".read_in." + part, fn);
      dl.read_out[p].visit(prefix + ".read_out." + part, fn);
    }
    fn(prefix + ".embedding", dl.embedding);
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto& l = layers_[i];
    const std::string p = "layer" + std::to_string(i);
    l.attn_norm.visit(p + ".attn_norm", fn);
    l.style_weight.visit(p + ".style_weight", fn);
    l.style_bias.visit(p + ".style_bias", fn);
    l.query.visit(p + ".spatial.query", fn);
    l.key.visit(p + ".spatial.key", fn);
    l.value.visit(p + ".spatial.value", fn);
    l.motion_key.visit(p + ".temporal.motion_key", fn);
    l.motion_value.visit(p + ".temporal.motion_value", fn);
    l.gate.visit(p + ".temporal.gate", fn);
    for (std::size_t e = 0; e < l.experts.size(); ++e) {
      l.experts[e].visit(p + ".temporal.expert" + std::to_string(e), fn);
    }
    fn(p + ".temporal.placeholder_keys", l.placeholder_keys);
    fn(p + ".temporal.placeholder_values", l.placeholder_values);
    l.center.visit(p + ".temporal.center", fn);
    for (std::size_t n = 0; n < l.coefficients.size(); ++n) {
      l.coefficients[n].visit(p + ".temporal.coefficient" + std::to_string(n), fn);
    }
    for (int h = 0; h < kH; ++h) l.temporal_out[h].visit(p + ".temporal.out" + std::to_string(h), fn);
    l.ffn_norm.visit(p + ".ffn_norm", fn);
    l.ffn_in.visit(p + ".ffn_in", fn);
    l.ffn_out.visit(p + ".ffn_out", fn);
  }
  final_norm_.visit("final_norm", fn);
}

std::size_t Denoiser::parameter_count() {
  std::size_t n = 0;
  visit([&](const std::string&, Eigen::Ref<nn::Matrix> m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

void Denoiser::save(const std::filesystem::path& path) {
  std::vector<NamedTensor> tensors;
  visit([&](const std::string& name, Eigen::Ref<nn::Matrix> m) {
    NamedTensor t;
    t.name = name;
    t.rows = static_cast<std::uint32_t>(m.rows());
    t.cols = static_cast<std::uint32_t>(m.cols());
    t.values.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) t.values.push_back(m(r, c));
    }
    tensors.push_back(std::move(t));
  });
  write_snapshot(path, tensors);
}

void Denoiser::load(const std::filesystem::path& path) {
  const auto tensors = read_snapshot(path);
  std::map<std::string, const NamedTensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t;
  visit([&](const std::string& name, Eigen::Ref<nn::Matrix> m) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw RegistryError("snapshot lacks tensor " + name);
    const NamedTensor& t = *it->second;
    if (t.rows != m.rows() || t.cols != m.cols()) {
      throw DimensionError("snapshot tensor " + name + " has shape " + std::to_string(t.rows) +
                           "x" + std::to_string(t.cols));
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = t.values[static_cast<std::size_t>(r * m.cols() + c)];
      }
    }
  });
}

}  // namespace unimotion
