// unimotion command-line front end.
//
// Every subcommand prints its resolved configuration as one JSON object on
// stdout before doing any work, and writes its results to --output.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "unimotion/artattention.hpp"
#include "unimotion/batch_plan.hpp"
#include "unimotion/condition.hpp"
#include "unimotion/datasets.hpp"
#include "unimotion/diffusion.hpp"
#include "unimotion/errors.hpp"
#include "unimotion/motion_file.hpp"
#include "unimotion/synth.hpp"
#include "unimotion/temporal_ops.hpp"
#include "unimotion/translate.hpp"

namespace um = unimotion;
using nlohmann::ordered_json;

namespace {

void print_config(const std::string& command, ordered_json options) {
  ordered_json out;
  out["command"] = command;
  out["options"] = std::move(options);
  std::cout << out.dump() << '\n';
}

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw um::Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

ordered_json mask_json(const um::BodyPartMask& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t f = 0; f < m.frames(); ++f) {
    ordered_json row = ordered_json::array();
    for (int p = 0; p < um::kNumParts; ++p) row.push_back(m.at(f, p));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> part_names() {
  std::vector<std::string> names;
  for (int p = 0; p < um::kNumParts; ++p) {
    names.emplace_back(um::part_name(static_cast<um::Part>(p)));
  }
  return names;
}

um::MotionSequence first_motion(const std::string& path) {
  auto motions = um::load(path);
  if (motions.empty()) throw um::ValidationError(path + " holds no motion records");
  return std::move(motions.front());
}

// Shared boundary options for `mask` and `sample`.
struct MaskOptions {
  std::string task = "t2m";
  int k = 0;
  int k1 = 0;
  int k2 = 0;

  void add(CLI::App* app) {
    app->add_option("--task", task, "Task name (t2m, a2m, m2d, s2g, mim, mp, min, cmp, cmi, mmg)");
    app->add_option("--k", k, "Prediction boundary (mp, cmp)");
    app->add_option("--k1", k1, "In-betweening start (min, cmi)");
    app->add_option("--k2", k2, "In-betweening end (min, cmi)");
  }
  um::TaskSpec spec() const {
    um::TaskSpec s;
    s.task = um::task_from_name(task);
    s.k = k;
    s.k1 = k1;
    s.k2 = k2;
    return s;
  }
  ordered_json json() const { return {{"task", task}, {"k", k}, {"k1", k1}, {"k2", k2}}; }
};

ordered_json motion_stats(const um::MotionSequence& seq) {
  const Eigen::MatrixXd m = um::to_matrix(seq);
  const auto& layout = um::canonical_layout();
  ordered_json parts;
  for (int p = 0; p < um::kNumParts; ++p) {
    double sq = 0.0;
    const auto& idx = layout.indices(static_cast<um::Part>(p));
    for (Eigen::Index f = 0; f < m.rows(); ++f) {
      for (auto i : idx) sq += m(f, static_cast<Eigen::Index>(i)) * m(f, static_cast<Eigen::Index>(i));
    }
    parts[std::string(um::part_name(static_cast<um::Part>(p)))] =
        std::sqrt(sq / static_cast<double>(idx.size() * seq.frames.size()));
  }
  const double mean = m.mean();
  const double var = (m.array() - mean).square().mean();
  return {{"frames", m.rows()},
          {"width", m.cols()},
          {"mean", mean},
          {"std", std::sqrt(var)},
          {"min", m.minCoeff()},
          {"max", m.maxCoeff()},
          {"finite", m.allFinite()},
          {"part_rms", parts}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unified motion toolkit"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::string input, output;

  auto common = [&](CLI::App* sub, bool needs_input, bool needs_output = true) {
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    if (needs_input) sub->add_option("-i,--input", input, "Input file")->required();
    auto* o = sub->add_option("-o,--output", output, "Output file");
    if (needs_output) o->required();
  };

  auto* convert = app.add_subcommand("convert", "Keypoint file to unified motion file, or back");
  common(convert, true);
  std::string target = "unified";
  convert->add_option("--to", target, "unified (from keypoints) or keypoints52 (from unified)")
      ->capture_default_str();

  auto* resample_cmd = app.add_subcommand("resample", "Integer-factor frame-rate reduction");
  int factor = 2;
  common(resample_cmd, true);
  resample_cmd->add_option("--factor", factor, "Keep every N-th frame")->capture_default_str();

  auto* mask_cmd = app.add_subcommand("mask", "Task visibility mask and optional training drop mask");
  common(mask_cmd, false);
  MaskOptions mask_opts;
  mask_opts.add(mask_cmd);
  std::size_t mask_frames = 0;
  double train_p = 0.0;
  std::string strategy = "per_part";
  mask_cmd->add_option("--frames", mask_frames, "Sequence length")->required();
  mask_cmd->add_option("--train-p", train_p, "Extra drop probability for the training mask")
      ->capture_default_str();
  mask_cmd->add_option("--strategy", strategy, "per_part, per_frame or span")->capture_default_str();

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic motion file");
  common(synth_cmd, false);
  std::string pattern = "sine_walk";
  std::size_t synth_frames = 60;
  double synth_fps = 30.0;
  synth_cmd->add_option("--pattern", pattern, "static, constant_velocity or sine_walk")
      ->capture_default_str();
  synth_cmd->add_option("--frames", synth_frames)->capture_default_str();
  synth_cmd->add_option("--fps", synth_fps)->capture_default_str();

  auto* plan_cmd = app.add_subcommand("plan", "Draw a batch-formation plan");
  common(plan_cmd, false);
  std::size_t plan_n = 1000;
  std::string plan_config;
  plan_cmd->add_option("--n", plan_n, "Number of draws")->capture_default_str();
  plan_cmd->add_option("--config", plan_config, "JSON weights file");

  auto* forward_cmd = app.add_subcommand("forward", "One denoiser pass with output statistics");
  common(forward_cmd, false);
  std::string preset = "desk";
  std::string dataset = "all";
  int t_step = 0;
  std::size_t forward_frames = 16;
  std::string text;
  forward_cmd->add_option("--preset", preset)->capture_default_str();
  forward_cmd->add_option("--dataset", dataset)->capture_default_str();
  forward_cmd->add_option("--t", t_step, "Diffusion step in [0, T)")->capture_default_str();
  forward_cmd->add_option("--frames", forward_frames, "Length of the synthetic input")
      ->capture_default_str();
  forward_cmd->add_option("-i,--input", input, "Motion file (default: synthetic sine walk)");
  forward_cmd->add_option("--text", text, "Text condition");

  auto* sample_cmd = app.add_subcommand("sample", "Reverse diffusion demo");
  common(sample_cmd, false);
  int steps = 50;
  double guidance = 1.0;
  std::size_t sample_frames = 16;
  MaskOptions sample_mask;
  std::string known_path;
  sample_cmd->add_option("--preset", preset)->capture_default_str();
  sample_cmd->add_option("--dataset", dataset)->capture_default_str();
  sample_cmd->add_option("--steps", steps)->capture_default_str();
  sample_cmd->add_option("--guidance", guidance)->capture_default_str();
  sample_cmd->add_option("--frames", sample_frames)->capture_default_str();
  sample_cmd->add_option("--text", text, "Text condition");
  sample_cmd->add_option("--known", known_path, "Motion file with context frames "
                                                "(default: synthetic sine walk)");
  sample_mask.add(sample_cmd);

  auto* inspect_cmd = app.add_subcommand("inspect", "Print layout, shapes and part presence");
  common(inspect_cmd, false, false);
  inspect_cmd->add_option("-i,--input", input, "Motion file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*convert) {
      const auto to = um::target_from_name(target);
      print_config("convert", {{"seed", seed},
                               {"input", input},
                               {"output", output},
                               {"to", um::target_name(to)}});
      if (to == um::TranslateTarget::Unified) {
        std::vector<um::MotionSequence> motions;
        for (const auto& kp : um::load_keypoints(input)) {
          auto seq = um::keypoints_to_unified(kp.frames, kp.fps);
          seq.dataset = kp.dataset;
          motions.push_back(std::move(seq));
        }
        um::save(motions, output);
      } else {
        std::vector<um::KeypointSequence> keypoints;
        for (const auto& seq : um::load(input)) {
          keypoints.push_back(std::get<um::KeypointSequence>(um::translate(seq, to)));
        }
        um::save_keypoints(keypoints, output);
      }
    } else if (*resample_cmd) {
      print_config("resample",
                   {{"seed", seed}, {"input", input}, {"output", output}, {"factor", factor}});
      std::vector<um::MotionSequence> motions;
      for (const auto& seq : um::load(input)) motions.push_back(um::resample(seq, factor));
      um::save(motions, output);
    } else if (*mask_cmd) {
      auto opts = mask_opts.json();
      opts["frames"] = mask_frames;
      opts["train_p"] = train_p;
      opts["strategy"] = strategy;
      opts["seed"] = seed;
      opts["output"] = output;
      print_config("mask", opts);
      const auto visibility = um::task_mask(mask_opts.spec(), mask_frames);
      const auto train = um::random_train_mask(
          um::BodyPartMask(mask_frames, um::MaskConvention::Drop), train_p,
          um::strategy_from_name(strategy), seed);
      write_json(output, {{"parts", part_names()},
                          {"visibility", mask_json(visibility)},
                          {"drop", mask_json(um::visibility_to_drop(visibility))},
                          {"train_drop", mask_json(train)}});
    } else if (*synth_cmd) {
      print_config("synth", {{"seed", seed},
                             {"pattern", pattern},
                             {"frames", synth_frames},
                             {"fps", synth_fps},
                             {"output", output}});
      um::save({um::synth_motion(um::pattern_from_name(pattern), synth_frames, synth_fps, seed)},
               output);
    } else if (*plan_cmd) {
      const auto config = plan_config.empty() ? um::BatchPlanConfig::defaults()
                                              : um::BatchPlanConfig::from_json_file(plan_config);
      print_config("plan", {{"seed", seed},
                            {"n", plan_n},
                            {"config", plan_config.empty() ? "default" : plan_config},
                            {"weights", config.weights},
                            {"all_probability", config.all_probability},
                            {"output", output}});
      const auto plan = um::batch_plan(config, plan_n, seed);
      std::map<std::string, std::size_t> counts;
      std::size_t replaced = 0;
      std::ofstream out(output, std::ios::binary);
      if (!out) throw um::Error("cannot write " + output);
      for (const auto& s : plan) {
        ++counts[s.dataset];
        if (s.effective != s.dataset) ++replaced;
        out << ordered_json{{"dataset", s.dataset}, {"effective", s.effective}}.dump() << '\n';
      }
      ordered_json summary{{"n", plan_n}, {"all_replaced", replaced}, {"counts", counts}};
      std::cout << summary.dump() << '\n';
    } else if (*forward_cmd) {
      auto config = um::ModelConfig::from_preset(preset);
      print_config("forward", {{"seed", seed},
                               {"preset", config.preset},
                               {"latent_dim", config.latent_dim},
                               {"layers", config.num_layers},
                               {"experts", config.num_experts},
                               {"templates", config.num_templates},
                               {"dataset", dataset},
                               {"t", t_step},
                               {"input", input.empty() ? "synthetic" : input},
                               {"frames", forward_frames},
                               {"text", text},
                               {"output", output}});
      um::Denoiser model(config, seed);
      const auto x0 = input.empty()
                          ? um::synth_motion(um::SynthPattern::SineWalk, forward_frames, 30.0, seed)
                          : first_motion(input);
      const auto schedule = um::make_schedule(config.diffusion_steps);
      std::mt19937_64 rng(um::nn::derive_seed(seed, 7));
      std::normal_distribution<double> normal;
      const Eigen::MatrixXd clean = um::to_matrix(x0);
      const Eigen::MatrixXd noise =
          Eigen::MatrixXd::NullaryExpr(clean.rows(), clean.cols(), [&] { return normal(rng); });
      const auto x_t = um::from_matrix(um::q_sample(clean, t_step + 1, noise, schedule), x0);

      um::ConditionSet conditions;
      if (!text.empty()) {
        const um::HashEmbedder embedder(seed, um::kNumParts * config.latent_dim);
        conditions.set(um::Modality::Text, embedder.embed(text, um::Modality::Text));
      }
      const auto pred =
          model.forward(x_t, t_step, um::missing_parts_mask(x_t), conditions, dataset);
      write_json(output, {{"parameters", model.parameter_count()},
                          {"input", motion_stats(x_t)},
                          {"prediction", motion_stats(pred)}});
    } else if (*sample_cmd) {
      auto config = um::ModelConfig::from_preset(preset);
      config.diffusion_steps = steps;
      auto opts = sample_mask.json();
      print_config("sample", {{"seed", seed},
                              {"preset", config.preset},
                              {"dataset", dataset},
                              {"steps", steps},
                              {"guidance", guidance},
                              {"frames", sample_frames},
                              {"text", text},
                              {"known", known_path.empty() ? "synthetic" : known_path},
                              {"mask", opts},
                              {"output", output}});
      const um::Denoiser model(config, seed);
      const auto known = known_path.empty() ? um::synth_motion(um::SynthPattern::SineWalk,
                                                               sample_frames, 30.0, seed)
                                            : first_motion(known_path);
      if (known.frames.size() != sample_frames) {
        throw um::ValidationError("known motion has " + std::to_string(known.frames.size()) +
                                  " frames, --frames is " + std::to_string(sample_frames));
      }
      const auto visibility = um::task_mask(sample_mask.spec(), sample_frames);
      um::ConditionSet conditions;
      if (!text.empty()) {
        const um::HashEmbedder embedder(seed, um::kNumParts * config.latent_dim);
        conditions.set(um::Modality::Text, embedder.embed(text, um::Modality::Text));
      }
      const auto drop = um::missing_parts_mask(known);
      const um::X0Predictor predictor = [&](const Eigen::MatrixXd& x, int t,
                                            const um::ConditionSet& c) {
        return um::to_matrix(model.forward(um::from_matrix(x, known), t - 1, drop, c, dataset));
      };
      um::SampleOptions options;
      options.guidance_scale = guidance;
      options.seed = seed;
      auto result = um::sample(predictor, sample_frames, visibility, known, conditions,
                               um::make_schedule(steps), options);
      result.metadata["generator"] = "sample";
      um::save({result}, output);
    } else if (*inspect_cmd) {
      print_config("inspect", {{"seed", seed},
                               {"input", input.empty() ? "none" : input},
                               {"output", output.empty() ? "stdout" : output}});
      const auto& layout = um::canonical_layout();
      ordered_json parts = ordered_json::array();
      for (int p = 0; p < um::kNumParts; ++p) {
        const auto part = static_cast<um::Part>(p);
        ordered_json ranges = ordered_json::array();
        for (const auto& r : layout.ranges(part)) ranges.push_back({r.begin, r.end});
        parts.push_back({{"name", um::part_name(part)}, {"size", layout.size(part)},
                         {"ranges", ranges}});
      }
      ordered_json report{{"frame_dim", layout.total_size()}, {"joints", um::kNumJoints},
                          {"parts", parts}};
      if (!input.empty()) {
        ordered_json records = ordered_json::array();
        for (const auto& seq : um::load(input)) {
          ordered_json present;
          for (int p = 0; p < um::kNumParts; ++p) {
            present[std::string(um::part_name(static_cast<um::Part>(p)))] = seq.parts_present[p];
          }
          records.push_back({{"dataset", seq.dataset},
                             {"fps", seq.fps},
                             {"frames", seq.frames.size()},
                             {"shape", {seq.frames.size(), um::kFrameDim}},
                             {"parts_present", present},
                             {"metadata", seq.metadata}});
        }
        report["records"] = records;
      }
      if (output.empty()) {
        std::cout << report.dump(2) << '\n';
      } else {
        write_json(output, report);
      }
    }
  } catch (const um::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 3;
  } catch (const um::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
