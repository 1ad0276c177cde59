#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "support.hpp"
#include "unimotion/artattention.hpp"
#include "unimotion/errors.hpp"
#include "unimotion/synth.hpp"

using namespace unimotion;
namespace ts = testing_support;

namespace {

LatentMotion random_latent(ts::Rng& rng, std::size_t frames, Eigen::Index width, double fps = 30.0) {
  LatentMotion l(frames, width, fps);
  l.data = ts::random_matrix(rng, l.data.rows(), width);
  return l;
}

GlobalTemplateSet random_templates(ts::Rng& rng, int heads, int per_head, int order, Eigen::Index width,
                                   double sigma) {
  GlobalTemplateSet set;
  set.heads = heads;
  set.per_head = per_head;
  set.sigma = sigma;
  for (int i = 0; i < heads * per_head; ++i) {
    Template t;
    t.center = ts::uniform(rng, 0.0, 3.0);
    t.coefficients = ts::random_matrix(rng, order + 1, width);
    set.templates.push_back(t);
  }
  return set;
}

nn::Linear hand_linear(std::initializer_list<std::initializer_list<double>> rows) {
  nn::Linear l;
  l.weight.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) l.weight(r, c++) = v;
    ++r;
  }
  l.bias = nn::Vector::Zero(l.weight.rows());
  return l;
}

MotionSequence desk_input(std::size_t frames, std::uint64_t seed) {
  return synth_motion(SynthPattern::SineWalk, frames, 30.0, seed);
}

}  // namespace

TEST_CASE("presets") {
  const auto tiny = ModelConfig::from_preset("tiny");
  CHECK(tiny.latent_dim == 64);
  CHECK(tiny.num_layers == 4);
  CHECK(tiny.num_experts == 16);
  const auto large = ModelConfig::from_preset("Large");
  CHECK(large.latent_dim == 128);
  CHECK(large.num_layers == 20);
  CHECK(large.num_experts == 32);
  CHECK(large.num_templates == 32);
  const auto desk = ModelConfig::from_preset("desk");
  CHECK(desk.latent_dim == 8);
  CHECK(desk.num_layers == 2);
  CHECK(desk.num_experts == 4);
  CHECK(desk.num_templates == 4);
  CHECK(desk.taylor_order == 2);
  CHECK(desk.sigma == 1.0);
  CHECK(ModelConfig::kHeads == 10);
  CHECK(ModelConfig::kPlaceholderCount == 64);
  CHECK_THROWS_AS(ModelConfig::from_preset("huge"), ValidationError);

  auto bad = desk;
  bad.sigma = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = desk;
  bad.num_experts = 0;
  CHECK_THROWS_AS(Denoiser(bad, 1), ValidationError);
}

TEST_CASE("temporal weights") {
  const std::vector<double> one{0.7};
  for (double x : {-3.0, 0.0, 0.7, 12.0}) CHECK(temporal_weights(x, one, 1.0)(0) == 1.0);

  const std::vector<double> two{0.0, 1.0};
  const auto w = temporal_weights(0.0, two, 1.0);
  CHECK(w(0) == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(w(1) == doctest::Approx(0.2689).epsilon(1e-4));
  // Closed form: softmax(0, -1).
  CHECK(std::abs(w(0) - 1.0 / (1.0 + std::exp(-1.0))) < 1e-15);

  CHECK_THROWS_AS(temporal_weights(0.0, two, 0.0), ValidationError);
}

TEST_CASE("property: temporal weights are a distribution") {
  ts::Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> c(static_cast<std::size_t>(ts::uniform_int(rng, 1, 32)));
    for (auto& x : c) x = ts::uniform(rng, -5, 5);
    const auto w = temporal_weights(ts::uniform(rng, -8, 8), c, ts::uniform(rng, 0.05, 3));
    CHECK(std::abs(w.sum() - 1.0) < 1e-9);
    CHECK(w.minCoeff() >= 0.0);
  }
}

TEST_CASE("property: weight gradient matches central differences") {
  ts::Rng rng(4);
  constexpr double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> c(static_cast<std::size_t>(ts::uniform_int(rng, 2, 8)));
    for (auto& x : c) x = ts::uniform(rng, 0, 3);
    const double sigma = ts::uniform(rng, 0.3, 2.0);
    const double x = ts::uniform(rng, -0.5, 3.5);
    const auto g = weight_grad(x, c, sigma);
    const nn::Vector fd =
        (temporal_weights(x + h, c, sigma) - temporal_weights(x - h, c, sigma)) / (2 * h);
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      const double scale = std::max(std::abs(g(j)), std::abs(fd(j)));
      CHECK(std::abs(g(j) - fd(j)) <= 1e-4 * scale + 1e-10);
    }
    CHECK(std::abs(g.sum()) < 1e-12);
  }
}

TEST_CASE("taylor evaluation") {
  ts::Rng rng(5);
  Template t;
  t.center = 0.4;
  t.coefficients = ts::random_matrix(rng, 3, 5);
  CHECK(taylor_eval(t, 0.4) == nn::Vector(t.coefficients.row(0).transpose()));

  Template scalar;
  scalar.center = 0.0;
  scalar.coefficients.resize(3, 1);
  scalar.coefficients << 1, 2, 4;
  CHECK(taylor_eval(scalar, 0.5)(0) == doctest::Approx(2.5).epsilon(1e-15));

  Template linear;
  linear.center = -0.3;
  linear.coefficients = ts::random_matrix(rng, 2, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const double x = ts::uniform(rng, -2, 2);
    const double delta = ts::uniform(rng, -2, 2);
    const nn::Vector diff = taylor_eval(linear, x + delta) - taylor_eval(linear, x);
    const nn::Vector expect = linear.coefficients.row(1).transpose() * delta;
    CHECK((diff - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("temporal signal with a single constant template") {
  ts::Rng rng(6);
  auto set = random_templates(rng, 10, 1, 0, 6, 1.0);
  const std::vector<double> times{0.0, 0.25, 1.0, 7.0};
  const auto s = temporal_signal(set, times);
  CHECK(s.rows() == 40);
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (int h = 0; h < 10; ++h) {
      CHECK(s.row(static_cast<Eigen::Index>(k) * 10 + h) == set.at(h, 0).coefficients.row(0));
    }
  }
}

TEST_CASE("temporal signal against a naive double loop") {
  const Denoiser model(ModelConfig::from_preset("desk"), 3);
  ts::Rng rng(7);
  const auto latent = random_latent(rng, 12, 8);
  const auto set = model.build_templates(0, latent, ConditionSet{});
  const auto fast = temporal_signal(set, latent.times);

  for (std::size_t k = 0; k < latent.frames; ++k) {
    const double x = latent.times[k];
    for (int h = 0; h < set.heads; ++h) {
      // Unnormalized Gaussian weights, then explicit normalization.
      std::vector<double> raw(static_cast<std::size_t>(set.per_head));
      double total = 0.0;
      for (int j = 0; j < set.per_head; ++j) {
        const double d = x - set.at(h, j).center;
        raw[static_cast<std::size_t>(j)] = std::exp(-d * d / (set.sigma * set.sigma));
        total += raw[static_cast<std::size_t>(j)];
      }
      for (Eigen::Index c = 0; c < 8; ++c) {
        double acc = 0.0;
        for (int j = 0; j < set.per_head; ++j) {
          const auto& t = set.at(h, j);
          const double d = x - t.center;
          const double poly = t.coefficients(0, c) + t.coefficients(1, c) * d +
                              t.coefficients(2, c) * d * d / 2.0;
          acc += raw[static_cast<std::size_t>(j)] / total * poly;
        }
        CHECK(std::abs(fast(static_cast<Eigen::Index>(k) * 10 + h, c) - acc) < 1e-9);
      }
    }
  }
}

TEST_CASE("template shifting") {
  ts::Rng rng(8);
  const auto set = random_templates(rng, 10, 4, 2, 5, 0.8);
  const auto same = shift_templates(set, 0.0);
  for (std::size_t i = 0; i < set.templates.size(); ++i) {
    CHECK(same.templates[i].center == set.templates[i].center);
    CHECK(same.templates[i].coefficients == set.templates[i].coefficients);
  }

  const auto moved = shift_templates(set, 1.5);
  CHECK(moved.sigma == set.sigma);
  for (std::size_t i = 0; i < set.templates.size(); ++i) {
    CHECK(moved.templates[i].center == set.templates[i].center + 1.5);
    CHECK(moved.templates[i].coefficients == set.templates[i].coefficients);
  }
}

TEST_CASE("property: shift equivariance") {
  ts::Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    auto set = random_templates(rng, 10, 3, 2, 4, ts::uniform(rng, 0.2, 2.0));
    // Centers, offsets and times on a 2^-10 grid keep every subtraction exact.
    for (auto& t : set.templates) t.center = std::ldexp(ts::uniform_int(rng, 0, 4096), -10);
    const double delta = std::ldexp(ts::uniform_int(rng, -4096, 4096), -10);
    std::vector<double> times, shifted;
    for (int k = 0; k < 40; ++k) {
      times.push_back(k / 32.0);
      shifted.push_back(k / 32.0 + delta);
    }
    CHECK(temporal_signal(shift_templates(set, delta), shifted) == temporal_signal(set, times));

    // Arbitrary real offsets agree up to rounding.
    const double real_delta = ts::uniform(rng, -3, 3);
    std::vector<double> real_shifted;
    for (double x : times) real_shifted.push_back(x + real_delta);
    const auto a = temporal_signal(shift_templates(set, real_delta), real_shifted);
    CHECK((a - temporal_signal(set, times)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("combined template sets keep the first clip locally") {
  ts::Rng rng(10);
  auto first = random_templates(rng, 10, 2, 1, 3, 0.05);
  for (auto& t : first.templates) t.center = ts::uniform(rng, 0.5, 1.5);
  auto second = shift_templates(first, 20.0);  // gap far larger than sigma
  const auto both = combine_templates(first, second);
  CHECK(both.per_head == 4);

  std::vector<double> times;
  for (int k = 0; k < 60; ++k) times.push_back(k / 30.0);
  const auto a = temporal_signal(first, times);
  const auto b = temporal_signal(both, times);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6);

  auto other = first;
  other.sigma = 0.1;
  CHECK_THROWS_AS(combine_templates(first, other), ContractError);
}

TEST_CASE("spatial attention examples") {
  ts::Rng rng(11);
  const auto q = nn::Linear(4, 4, rng), k = nn::Linear(4, 4, rng), v = nn::Linear(4, 4, rng);
  const auto latent = random_latent(rng, 3, 4);

  SUBCASE("single available part broadcasts its value") {
    BodyPartMask avail(3, MaskConvention::Visibility);
    for (std::size_t f = 0; f < 3; ++f) avail.set(f, 4, true);
    const auto out = spatial_attention(latent, avail, q, k, v);
    for (std::size_t f = 0; f < 3; ++f) {
      const nn::Vector expect = v.forward(nn::Vector(latent.token(f, 4).transpose()));
      for (int p = 0; p < kNumParts; ++p) {
        CHECK((out.row(latent.row(f, p)).transpose() - expect).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }
  SUBCASE("identical tokens give identical outputs") {
    LatentMotion same(2, 4, 30.0);
    const auto tok = ts::random_matrix(rng, 1, 4);
    for (Eigen::Index r = 0; r < same.data.rows(); ++r) same.data.row(r) = tok;
    const auto out = spatial_attention(same, BodyPartMask(2, MaskConvention::Visibility, 1), q, k, v);
    for (Eigen::Index r = 1; r < out.rows(); ++r) CHECK((out.row(r) - out.row(0)).norm() < 1e-12);
  }
  SUBCASE("a frame without available parts is rejected") {
    BodyPartMask avail(3, MaskConvention::Visibility, 1);
    avail.set_frame(1, false);
    CHECK_THROWS_AS(spatial_attention(latent, avail, q, k, v), ContractError);
    CHECK_THROWS_AS(spatial_attention(latent, BodyPartMask(3, MaskConvention::Drop), q, k, v),
                    ContractError);
  }
}

TEST_CASE("spatial attention matches a hand-computed two-part mixture") {
  LatentMotion latent(1, 2, 30.0);
  latent.data.setConstant(9.0);  // unavailable parts must not leak in
  latent.token(0, 2) << 1.0, 0.0;
  latent.token(0, 7) << 0.0, 2.0;
  const auto q = hand_linear({{1.0, 0.5}, {0.0, 1.0}});
  const auto k = hand_linear({{2.0, 0.0}, {1.0, 1.0}});
  const auto v = hand_linear({{1.0, 1.0}, {-1.0, 3.0}});
  BodyPartMask avail(1, MaskConvention::Visibility);
  avail.set(0, 2, true);
  avail.set(0, 7, true);
  const auto out = spatial_attention(latent, avail, q, k, v);

  // Keys: k2 = (2, 1), k7 = (0, 2). Values: v2 = (1, -1), v7 = (2, 6).
  const double s = 1.0 / std::sqrt(2.0);
  auto mix = [&](double qa, double qb) {
    const double a = (qa * 2 + qb * 1) * s;
    const double b = (qa * 0 + qb * 2) * s;
    const double wa = std::exp(a) / (std::exp(a) + std::exp(b));
    const double wb = 1.0 - wa;
    return std::pair{wa * 1 + wb * 2, wa * -1 + wb * 6};
  };
  // Query of part 2 is (1, 0); query of part 7 is (1, 2); other parts see (13.5, 9).
  const auto [x2, y2] = mix(1.0, 0.0);
  CHECK(std::abs(out(latent.row(0, 2), 0) - x2) < 1e-9);
  CHECK(std::abs(out(latent.row(0, 2), 1) - y2) < 1e-9);
  const auto [x7, y7] = mix(1.0, 2.0);
  CHECK(std::abs(out(latent.row(0, 7), 0) - x7) < 1e-9);
  CHECK(std::abs(out(latent.row(0, 7), 1) - y7) < 1e-9);
  const auto [x0, y0] = mix(13.5, 9.0);
  CHECK(std::abs(out(latent.row(0, 0), 0) - x0) < 1e-9);
  CHECK(std::abs(out(latent.row(0, 0), 1) - y0) < 1e-9);
}

TEST_CASE("style application") {
  ts::Rng rng(12);
  const auto latent = random_latent(rng, 4, 6);
  Style neutral{nn::Matrix::Ones(10, 6), nn::Matrix::Zero(10, 6)};
  CHECK(apply_style(latent, neutral).data == latent.data);
  Style bad{nn::Matrix::Ones(9, 6), nn::Matrix::Zero(9, 6)};
  CHECK_THROWS_AS(apply_style(latent, bad), DimensionError);

  const Denoiser model(ModelConfig::from_preset("desk"), 5);
  const auto small = random_latent(rng, 4, 8);
  const auto a = model.stylize(0, small, 0, "all");
  CHECK(a.data.rows() == small.data.rows());
  CHECK(a.data.cols() == 8);
  CHECK(a.data != model.stylize(0, small, model.config().diffusion_steps - 1, "all").data);
  CHECK(a.data != model.stylize(0, small, 0, "AMASS").data);
  CHECK_THROWS_AS(model.stylize(0, small, model.config().diffusion_steps, "all"), ValidationError);
  CHECK_THROWS_AS(model.stylize(2, small, 0, "all"), ValidationError);
}

TEST_CASE("read-in and read-out") {
  const Denoiser model(ModelConfig::from_preset("desk"), 13);
  const auto seq = desk_input(6, 1);
  BodyPartMask drop(6, MaskConvention::Drop);
  const auto latent = model.read_in(seq, drop, "all");
  CHECK(latent.frames == 6);
  CHECK(latent.data.rows() == 60);
  CHECK(latent.data.cols() == 8);
  CHECK(latent.times[3] == doctest::Approx(0.1));
  CHECK(latent.data != model.read_in(seq, drop, "HumanML3D").data);
  CHECK(model.has_dataset("BEAT"));
  CHECK_FALSE(model.has_dataset("unknown"));
  CHECK_THROWS_AS(model.read_in(seq, drop, "unknown"), RegistryError);
  CHECK_THROWS_AS(model.read_out(latent, "unknown"), RegistryError);

  // Dropped cells ignore their inputs.
  drop.set(2, 3, true);
  drop.set_part(8, true);
  auto noisy = seq;
  const auto& layout = canonical_layout();
  for (std::size_t f = 0; f < 6; ++f) {
    auto v = pack(noisy.frames[f]);
    for (auto i : layout.indices(Part::LeftHand)) v[i] += 100.0;
    if (f == 2) {
      for (auto i : layout.indices(Part::Spine)) v[i] -= 7.0;
    }
    noisy.frames[f] = unpack(v);
  }
  CHECK(model.read_in(noisy, drop, "all").data == model.read_in(seq, drop, "all").data);

  const auto out = model.read_out(latent, "all");
  CHECK(out.frames.size() == 6);
  CHECK(pack(out.frames[0]).size() == 669);
  CHECK(model.read_out(latent, "all") == out);

  LatentMotion zero(3, 8, 30.0);
  for (const auto& f : model.read_out(zero, "all").frames) {
    for (double x : pack(f)) CHECK(x == 0.0);
  }
}

TEST_CASE("template construction") {
  const auto config = ModelConfig::from_preset("desk");
  const Denoiser model(config, 14);
  ts::Rng rng(15);
  const auto latent = random_latent(rng, 10, 8);

  const auto empty = model.build_templates(1, latent, ConditionSet{});
  CHECK(empty.heads == 10);
  CHECK(empty.per_head == 4);
  CHECK(empty.templates.size() == 40);
  for (const auto& t : empty.templates) {
    CHECK(std::isfinite(t.center));
    CHECK(t.center >= 0.0);
    CHECK(t.center <= latent.duration());
    CHECK(t.coefficients.rows() == 3);
    CHECK(t.coefficients.cols() == 8);
    CHECK(t.coefficients.allFinite());
  }

  for (int h = 0; h < 10; ++h) {
    const auto w = model.motion_stream_weights(0, latent, h);
    CHECK(w.rows() == 10);
    CHECK(w.cols() == 4);
    for (Eigen::Index c = 0; c < w.cols(); ++c) CHECK(std::abs(w.col(c).sum() - 1.0) < 1e-9);
  }

  ConditionSet conditions;
  conditions.set(Modality::Text, ts::random_matrix(rng, 3, 80));
  conditions.set(Modality::Music, ts::random_matrix(rng, 5, 80));
  const auto refined = model.refiner().refine(conditions);
  const auto cw = model.condition_stream_weights(0, refined, 2);
  CHECK(cw.rows() == 64 + 8);
  for (Eigen::Index c = 0; c < cw.cols(); ++c) CHECK(std::abs(cw.col(c).sum() - 1.0) < 1e-9);
  CHECK(model.condition_stream_weights(0, ConditionSet{}, 2).rows() == 64);

  const auto with = model.build_templates(1, latent, refined);
  bool differs = false;
  for (std::size_t i = 0; i < with.templates.size(); ++i) {
    differs = differs || with.templates[i].coefficients != empty.templates[i].coefficients;
  }
  CHECK(differs);
}

TEST_CASE("property: mixture-of-experts gate weights form a distribution") {
  const Denoiser model(ModelConfig::from_preset("desk"), 16);
  ts::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const nn::Vector tok = ts::random_matrix(rng, 8, 1, 5.0);
    const auto g = model.gate_weights(trial % 2, tok);
    CHECK(g.size() == 4);
    CHECK(std::abs(g.sum() - 1.0) < 1e-9);
    CHECK(g.minCoeff() >= 0.0);
  }
}

TEST_CASE("temporal attention output shape") {
  const Denoiser model(ModelConfig::from_preset("desk"), 18);
  ts::Rng rng(19);
  const auto latent = random_latent(rng, 7, 8);
  const auto y = model.temporal(0, latent, model.build_templates(0, latent, ConditionSet{}));
  CHECK(y.rows() == 70);
  CHECK(y.cols() == 8);
  CHECK(y.allFinite());
}

TEST_CASE("denoiser forward") {
  const Denoiser model(ModelConfig::from_preset("desk"), 20);
  const auto x = desk_input(9, 2);
  BodyPartMask drop(9, MaskConvention::Drop);
  const auto out = model.forward(x, 10, drop, ConditionSet{}, "all");
  CHECK(out.frames.size() == 9);
  CHECK(to_matrix(out).allFinite());
  CHECK(model.forward(x, 10, drop, ConditionSet{}, "all") == out);
  CHECK(Denoiser(ModelConfig::from_preset("desk"), 20).forward(x, 10, drop, ConditionSet{}, "all") ==
        out);
  CHECK(Denoiser(ModelConfig::from_preset("desk"), 21).forward(x, 10, drop, ConditionSet{}, "all") !=
        out);

  const HashEmbedder embedder(1, 80);
  ConditionSet text;
  text.set(Modality::Text, embedder.embed("a person jumps", Modality::Text));
  CHECK(model.forward(x, 10, drop, text, "all") != out);
  ConditionSet wrong;
  wrong.set(Modality::Text, Eigen::MatrixXd::Ones(2, 79));
  CHECK_THROWS_AS(model.forward(x, 10, drop, wrong, "all"), DimensionError);

  // Fully dropped frames still produce finite output.
  drop.set_frame(4, true);
  CHECK(to_matrix(model.forward(x, 10, drop, ConditionSet{}, "all")).allFinite());
}

TEST_CASE("property: denoiser ignores dropped cells") {
  const Denoiser model(ModelConfig::from_preset("desk"), 22);
  ts::Rng rng(23);
  const auto x = desk_input(8, 3);
  const auto& layout = canonical_layout();
  for (int trial = 0; trial < 5; ++trial) {
    const BodyPartMask drop = random_train_mask(BodyPartMask(8, MaskConvention::Drop), 0.4,
                                                MaskStrategy::PerPart, static_cast<std::uint64_t>(trial));
    auto y = x;
    for (std::size_t f = 0; f < 8; ++f) {
      auto v = pack(y.frames[f]);
      for (int p = 0; p < kNumParts; ++p) {
        if (!drop.at(f, p)) continue;
        for (auto i : layout.indices(static_cast<Part>(p))) v[i] = ts::uniform(rng, -50, 50);
      }
      y.frames[f] = unpack(v);
    }
    CHECK(model.forward(y, 3, drop, ConditionSet{}, "all") ==
          model.forward(x, 3, drop, ConditionSet{}, "all"));
  }
}

TEST_CASE("parameter snapshot round-trip") {
  Denoiser a(ModelConfig::from_preset("desk"), 30);
  Denoiser b(ModelConfig::from_preset("desk"), 31);
  const auto x = desk_input(5, 4);
  const BodyPartMask drop(5, MaskConvention::Drop);
  CHECK(a.parameter_count() == b.parameter_count());
  CHECK(a.parameter_count() > 0);

  const auto path = std::filesystem::temp_directory_path() / "unimotion_snapshot_test.bin";
  a.save(path);
  b.load(path);
  CHECK(b.forward(x, 1, drop, ConditionSet{}, "all") == a.forward(x, 1, drop, ConditionSet{}, "all"));

  Denoiser tiny(ModelConfig::from_preset("tiny"), 1);
  CHECK_THROWS(tiny.load(path));
  std::filesystem::remove(path);
}
