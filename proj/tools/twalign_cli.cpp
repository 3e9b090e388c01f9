// Command-line surface: align, gradcheck, perms, synth, train, eval,
// ablate. All structured output is JSON, matrices are CSV, heatmaps are
// PGM; every command echoes its fully-resolved configuration and writes
// files atomically under --output-dir.
//
// Exit codes: 0 success, 1 usage/parse, 2 numeric failure, 3 gradient-check
// failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "twalign/augment.hpp"
#include "twalign/dtw.hpp"
#include "twalign/io.hpp"
#include "twalign/loss.hpp"
#include "twalign/s2dtw.hpp"
#include "twalign/synth.hpp"
#include "twalign/trainer.hpp"

using namespace twalign;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json metrics_to_json(const RetrievalMetrics& m) {
  return json{{"r1", m.r1}, {"r5", m.r5}, {"medr", m.medr}};
}

json train_config_to_json(const TrainConfig& c) {
  return json{{"ta", c.ta},
              {"wa", c.wa},
              {"ls", c.ls},
              {"ta_strategy", to_string(c.ta_strategy)},
              {"gamma", c.gamma},
              {"dummy_distance", c.dummy_distance},
              {"measure", to_string(c.measure)},
              {"order", to_string(c.order)},
              {"aug_window", c.aug_window},
              {"aug_tau", c.aug_tau},
              {"loss_form", to_string(c.loss_form)},
              {"learning_rate", c.learning_rate},
              {"steps", c.steps},
              {"batch_size", c.batch_size},
              {"d_emb", c.d_emb},
              {"seed", c.seed}};
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const std::size_t rows = j.size(), cols = rows ? j.at(0).size() : 0;
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  return m;
}

void save_encoders(const fs::path& path, const EncoderParams& enc) {
  json j{{"w_clip", matrix_to_json(enc.w_clip)},
         {"b_clip", enc.b_clip},
         {"w_cap", matrix_to_json(enc.w_cap)},
         {"b_cap", enc.b_cap}};
  atomic_write_text(path, j.dump(2) + "\n");
}

EncoderParams load_encoders(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  json j = json::parse(in);
  EncoderParams enc;
  enc.w_clip = matrix_from_json(j.at("w_clip"));
  enc.w_cap = matrix_from_json(j.at("w_cap"));
  enc.b_clip = j.at("b_clip").get<std::vector<double>>();
  enc.b_cap = j.at("b_cap").get<std::vector<double>>();
  return enc;
}

json report_to_json(const TrainReport& r) {
  return json{{"loss_per_step", r.loss_per_step},
              {"text_to_video", metrics_to_json(r.text_to_video)},
              {"video_to_text", metrics_to_json(r.video_to_text)},
              {"collapse_trajectory", r.collapse_trajectory},
              {"final_collapse", r.final_collapse},
              {"config", train_config_to_json(r.config)}};
}

// --config JSON file: flat object, applied as defaults before flags are
// parsed; keys must name options of the chosen subcommand (or globals).
void apply_config_file(CLI::App& app, const std::string& sub,
                       const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config " + path.string());
  json cfg = json::parse(in, nullptr, true, true);
  if (!cfg.is_object()) throw ArgumentError("config must be a JSON object");
  CLI::App* target = app.get_subcommand(sub);
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    for (char& c : flag)
      if (c == '_') c = '-';
    CLI::Option* opt = nullptr;
    for (CLI::App* scope : {target, &app}) {
      try {
        opt = scope->get_option(flag);
        break;
      } catch (const CLI::OptionNotFound&) {
      }
    }
    if (!opt)
      throw ArgumentError("config key '" + key + "' is not an option of '" +
                          sub + "'");
    opt->default_val(value.is_string() ? value.get<std::string>()
                                       : value.dump());
  }
}

struct AlignFlags {
  std::string variant = "s2dtw";
  std::string order = "smooth-first";
  std::string measure = "cosine";
  double gamma = 0.1;
  double dummy_distance = 0.5;

  S2dtwParams params() const {
    S2dtwParams p;
    p.gamma = gamma;
    p.dummy_distance = dummy_distance;
    p.measure = measure_from_string(measure);
    p.order = order_from_string(order);
    if (variant == "softdtw") {
      p.smoothing = false;
      p.weak_alignment = false;
    } else if (variant != "s2dtw" && variant != "dtw") {
      throw ArgumentError("unknown variant: " + variant);
    }
    return p;
  }
};

void add_align_flags(CLI::App* cmd, AlignFlags& f) {
  cmd->add_option("--variant", f.variant, "s2dtw | softdtw | dtw")
      ->check(CLI::IsMember({"s2dtw", "softdtw", "dtw"}));
  cmd->add_option("--order", f.order, "smooth-first | merge-first")
      ->check(CLI::IsMember({"smooth-first", "merge-first"}));
  cmd->add_option("--measure", f.measure, "cosine | negdot")
      ->check(CLI::IsMember({"cosine", "negdot"}));
  cmd->add_option("--gamma", f.gamma, "soft-min smoothing parameter")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--dummy-distance", f.dummy_distance,
                  "skip threshold (dummy cost)");
}

void echo_config(const fs::path& outdir, const json& resolved) {
  std::cout << resolved.dump(2) << "\n";
  atomic_write_text(outdir / "config.json", resolved.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentiable weak temporal alignment toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string outdir_s = ".";
  std::string config_file;
  app.add_option("--seed", seed, "global random seed");
  app.add_option("--output-dir", outdir_s, "directory for output files");
  app.add_option("--config", config_file,
                 "JSON config file (flags override file values)");

  // ---- align ----
  auto* align = app.add_subcommand("align", "align two sequence CSV files");
  std::string x_path, y_path;
  AlignFlags align_flags;
  align->add_option("x", x_path, "clip sequence CSV")->required();
  align->add_option("y", y_path, "caption sequence CSV")->required();
  add_align_flags(align, align_flags);

  // ---- gradcheck ----
  auto* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference gradient audit");
  std::size_t gc_trials = 20, gc_max_n = 5;
  bool gc_fault = false;
  AlignFlags gc_flags;
  gradcheck->add_option("--trials", gc_trials, "random instances per setting");
  gradcheck->add_option("--max-n", gc_max_n, "max sequence length")
      ->check(CLI::Range(std::size_t{1}, std::size_t{5}));
  gradcheck->add_flag("--fault", gc_fault,
                      "inject a sign flip to self-test the checker");
  add_align_flags(gradcheck, gc_flags);

  // ---- perms ----
  auto* perms = app.add_subcommand("perms", "enumerate T(n,w) permutations");
  std::size_t pm_n = 3, pm_w = 1;
  double pm_tau = 0.1;
  std::string pm_input, pm_strategy = "similarity", pm_measure = "cosine";
  perms->add_option("--n", pm_n, "sequence length")->check(CLI::PositiveNumber);
  perms->add_option("--w", pm_w, "window size");
  perms->add_option("--tau", pm_tau, "temperature")->check(CLI::PositiveNumber);
  perms->add_option("--input", pm_input,
                    "sequence CSV for the target distribution (uniform if "
                    "omitted)");
  perms->add_option("--strategy", pm_strategy, "similarity | uniform | inverse")
      ->check(CLI::IsMember({"similarity", "uniform", "inverse"}));
  perms->add_option("--measure", pm_measure, "cosine | negdot")
      ->check(CLI::IsMember({"cosine", "negdot"}));

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  std::string sy_scenarios = "sequential";
  std::size_t sy_n = 4, sy_m = 4, sy_draw = 16, sy_latent = 8, sy_shift = 1;
  std::size_t sy_train = 8, sy_test = 8, sy_events = 0;
  double sy_sigma = 0.0, sy_rho = 0.25;
  std::uint64_t sy_map_seed = 1234;
  synth->add_option("--scenario", sy_scenarios,
                    "comma-separated scenario kinds (sequential, "
                    "non_sequential, partial_irrelevant, entire_irrelevant, "
                    "or 'mixed')");
  synth->add_option("--n", sy_n, "clips per pair")->check(CLI::PositiveNumber);
  synth->add_option("--m", sy_m, "captions per pair")->check(CLI::PositiveNumber);
  synth->add_option("--d-raw", sy_draw, "raw feature dimension")
      ->check(CLI::PositiveNumber);
  synth->add_option("--latent-dim", sy_latent, "shared topic dimension")
      ->check(CLI::PositiveNumber);
  synth->add_option("--sigma", sy_sigma, "feature noise")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--shift-window", sy_shift, "non-sequential shift window");
  synth->add_option("--events", sy_events,
                    "distinct topics per pair (0 = one per position)");
  synth->add_option("--rho", sy_rho, "irrelevant caption fraction")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--count-train", sy_train, "train pairs per scenario");
  synth->add_option("--count-test", sy_test, "test pairs per scenario");
  synth->add_option("--map-seed", sy_map_seed, "modality map seed");

  // ---- train / eval / ablate ----
  auto add_train_flags = [](CLI::App* cmd, TrainConfig& cfg,
                            std::string& corpus_dir) {
    cmd->add_option("--corpus", corpus_dir, "corpus directory")->required();
    cmd->add_option("--steps", cfg.steps, "gradient steps");
    cmd->add_option("--batch-size", cfg.batch_size, "pairs per step")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--learning-rate", cfg.learning_rate, "SGD step size")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--d-emb", cfg.d_emb, "embedding dimension")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--gamma", cfg.gamma, "soft-min smoothing parameter")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--dummy-distance", cfg.dummy_distance, "skip threshold");
    cmd->add_option("--aug-window", cfg.aug_window, "augmentation window");
    cmd->add_option("--aug-tau", cfg.aug_tau, "augmentation temperature")
        ->check(CLI::PositiveNumber);
    cmd->add_option(
           "--loss-form",
           [&cfg](const std::vector<std::string>& v) {
             cfg.loss_form = loss_form_from_string(v.at(0));
             return true;
           },
           "log_of_sum | sum_of_logs")
        ->check(CLI::IsMember({"log_of_sum", "sum_of_logs"}));
    cmd->add_option(
           "--negatives",
           [&cfg](const std::vector<std::string>& v) {
             if (v.at(0) == "all")
               cfg.negatives = NegativePolicy::all_others;
             else if (v.at(0) == "none")
               cfg.negatives = NegativePolicy::none;
             else
               return false;
             return true;
           },
           "all | none (none = positives-only objective)")
        ->check(CLI::IsMember({"all", "none"}));
    cmd->add_flag(
        "--no-ta", [&cfg](std::int64_t) { cfg.ta = false; },
        "disable temporal augmentation");
    cmd->add_flag(
        "--no-wa", [&cfg](std::int64_t) { cfg.wa = false; },
        "disable weak alignment (dummies)");
    cmd->add_flag(
        "--no-ls", [&cfg](std::int64_t) { cfg.ls = false; },
        "disable local neighborhood smoothing");
    cmd->add_option(
           "--ta-strategy",
           [&cfg](const std::vector<std::string>& v) {
             cfg.ta_strategy = strategy_from_string(v.at(0));
             return true;
           },
           "similarity | uniform | inverse")
        ->check(CLI::IsMember({"similarity", "uniform", "inverse"}));
  };

  auto* train_cmd = app.add_subcommand("train", "train the tiny encoders");
  TrainConfig train_cfg;
  std::string train_corpus;
  add_train_flags(train_cmd, train_cfg, train_corpus);

  auto* eval_cmd =
      app.add_subcommand("eval", "retrieval evaluation on a corpus test split");
  std::string eval_corpus, eval_encoders;
  bool eval_random = false;
  std::size_t eval_demb = 8;
  AlignFlags eval_flags;
  eval_cmd->add_option("--corpus", eval_corpus, "corpus directory")->required();
  eval_cmd->add_option("--encoders", eval_encoders,
                       "encoders JSON written by train");
  eval_cmd->add_flag("--random-init", eval_random,
                     "evaluate freshly initialized encoders");
  eval_cmd->add_option("--d-emb", eval_demb, "embedding dim for --random-init")
      ->check(CLI::PositiveNumber);
  add_align_flags(eval_cmd, eval_flags);

  auto* ablate_cmd =
      app.add_subcommand("ablate", "run the six-row ablation grid");
  TrainConfig ablate_cfg;
  std::string ablate_corpus;
  std::size_t ablate_nseeds = 3;
  add_train_flags(ablate_cmd, ablate_cfg, ablate_corpus);
  ablate_cmd->add_option("--num-seeds", ablate_nseeds, "seeds per row")
      ->check(CLI::PositiveNumber);

  // two-phase parse: find the subcommand and --config first, apply file
  // values as defaults, then parse for real
  try {
    std::string picked;
    for (int k = 1; k < argc; ++k) {
      const std::string a = argv[k];
      if (a == "--config" && k + 1 < argc) config_file = argv[k + 1];
      if (!picked.empty()) continue;
      for (const char* name :
           {"align", "gradcheck", "perms", "synth", "train", "eval", "ablate"})
        if (a == name) picked = name;
    }
    if (!config_file.empty() && !picked.empty())
      apply_config_file(app, picked, config_file);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const fs::path outdir(outdir_s);

  try {
    std::error_code ec;
    fs::create_directories(outdir, ec);

    if (*align) {
      auto x = read_sequence_csv(x_path, Modality::clip);
      auto y = read_sequence_csv(y_path, Modality::caption);
      const S2dtwParams p = align_flags.params();
      json resolved{{"command", "align"},
                    {"x", x_path},
                    {"y", y_path},
                    {"variant", align_flags.variant},
                    {"order", align_flags.order},
                    {"measure", align_flags.measure},
                    {"gamma", align_flags.gamma},
                    {"dummy_distance", align_flags.dummy_distance},
                    {"seed", seed},
                    {"output_dir", outdir_s}};
      echo_config(outdir, resolved);

      auto delta = pairwise_distance(x, y, p.measure);
      json cost;
      if (align_flags.variant == "dtw") {
        cost["cost"] = dtw(delta.values).cost;
        write_matrix_csv(outdir / "delta.csv", delta.values);
      } else {
        auto res = s2dtw_forward(delta.values, p);
        s2dtw_backward(res);
        cost["cost"] = res.cost;
        write_matrix_csv(outdir / "delta.csv", res.delta);
        write_matrix_csv(outdir / "delta_hat.csv", res.delta_hat);
        write_matrix_csv(outdir / "delta_phi.csv", res.delta_phi);
        write_matrix_csv(outdir / "m_hat.csv", res.m_hat);
        write_pgm(outdir / "m_hat.pgm",
                  path_matrix(res, align_flags.variant == "softdtw"
                                       ? PathVariant::softdtw
                                       : PathVariant::s2dtw));
      }
      cost["variant"] = align_flags.variant;
      atomic_write_text(outdir / "cost.json", cost.dump(2) + "\n");
      std::cout << "cost " << cost["cost"].get<double>() << "\n";
    }

    if (*gradcheck) {
      if (gc_trials == 0) throw ArgumentError("gradcheck: trials must be > 0");
      json resolved{{"command", "gradcheck"}, {"trials", gc_trials},
                    {"max_n", gc_max_n},      {"fault", gc_fault},
                    {"seed", seed},           {"output_dir", outdir_s}};
      echo_config(outdir, resolved);

      RngStream g(seed + 7777);
      double max_err = 0.0;
      for (std::size_t trial = 0; trial < gc_trials; ++trial) {
        const std::size_t n = 1 + uniform_index(g, gc_max_n);
        const std::size_t m = 1 + uniform_index(g, gc_max_n);
        const std::size_t d = 3;
        std::vector<std::vector<double>> xi(n), yi(m);
        for (auto& v : xi) v = unit_sphere(d, g);
        for (auto& v : yi) v = unit_sphere(d, g);
        FeatureSequence x(xi), y(yi, Modality::caption);
        for (auto order : {SmoothOrder::smooth_first, SmoothOrder::merge_first}) {
          for (double gamma : {0.1, 1.0}) {
            S2dtwParams p = gc_flags.params();
            p.gamma = gamma;
            p.order = order;
            auto res = s2dtw_forward(x, y, p);
            s2dtw_backward(res);
            if (gc_fault)
              for (double& v : res.m_hat.data()) v = -v;
            auto grads = grad_wrt_embeddings(res, x, y);
            const double eps = 1e-5;
            auto delta = res.delta;
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t j = 0; j < m; ++j) {
                Matrix dp = delta, dm = delta;
                dp(i, j) += eps;
                dm(i, j) -= eps;
                const double fd =
                    (s2dtw_forward(dp, p).cost - s2dtw_forward(dm, p).cost) /
                    (2 * eps);
                const double err =
                    std::abs(res.m_hat(i, j) - fd) /
                    std::max({1.0, std::abs(fd), std::abs(res.m_hat(i, j))});
                max_err = std::max(max_err, err);
              }
            for (std::size_t i = 0; i < n; ++i)
              for (std::size_t k = 0; k < d; ++k) {
                auto flat = x.flat();
                flat[i * d + k] += eps;
                FeatureSequence xp(n, d, flat);
                flat[i * d + k] -= 2 * eps;
                FeatureSequence xm(n, d, flat);
                const double fd = (s2dtw_forward(xp, y, p).cost -
                                   s2dtw_forward(xm, y, p).cost) /
                                  (2 * eps);
                const double err =
                    std::abs(grads.x[i][k] - fd) /
                    std::max({1.0, std::abs(fd), std::abs(grads.x[i][k])});
                max_err = std::max(max_err, err);
              }
          }
        }
      }
      json report{{"max_relative_error", max_err},
                  {"tolerance", 1e-4},
                  {"trials", gc_trials},
                  {"pass", max_err <= 1e-4}};
      atomic_write_text(outdir / "gradcheck.json", report.dump(2) + "\n");
      std::cout << "max relative error " << max_err << "\n";
      if (max_err > 1e-4) {
        std::cerr << "gradient check failed (tolerance 1e-4)\n";
        return 3;
      }
    }

    if (*perms) {
      json resolved{{"command", "perms"},
                    {"n", pm_n},
                    {"w", pm_w},
                    {"tau", pm_tau},
                    {"strategy", pm_strategy},
                    {"input", pm_input},
                    {"seed", seed},
                    {"output_dir", outdir_s}};
      echo_config(outdir, resolved);
      PermutationDistribution dist;
      if (pm_input.empty()) {
        dist.permutations = windowed_permutations(pm_n, pm_w);
        dist.probabilities.assign(dist.permutations.size(),
                                  1.0 / dist.permutations.size());
        dist.tau = pm_tau;
        dist.window = pm_w;
        dist.length = pm_n;
      } else {
        auto x = read_sequence_csv(pm_input);
        if (x.length() != pm_n)
          throw ArgumentError("--n disagrees with the input sequence length");
        dist = permutation_distribution(x, pm_w, pm_tau,
                                        measure_from_string(pm_measure),
                                        strategy_from_string(pm_strategy));
      }
      json out{{"n", pm_n}, {"w", pm_w}, {"tau", pm_tau}};
      json parr = json::array();
      for (const auto& pi : dist.permutations) {
        json one = json::array();
        for (std::size_t k = 0; k < pi.size(); ++k)
          one.push_back(pi(k) + 1);  // 1-based in public output
        parr.push_back(std::move(one));
      }
      out["perms"] = std::move(parr);
      out["probs"] = dist.probabilities;
      atomic_write_text(outdir / "perms.json", out.dump(2) + "\n");
      std::cout << out.dump(2) << "\n";
    }

    if (*synth) {
      std::vector<std::string> kinds;
      if (sy_scenarios == "mixed") {
        kinds = {"sequential", "non_sequential", "partial_irrelevant",
                 "entire_irrelevant"};
      } else {
        std::stringstream ss(sy_scenarios);
        std::string part;
        while (std::getline(ss, part, ',')) kinds.push_back(part);
      }
      std::vector<ScenarioSpec> specs;
      for (const auto& kind : kinds) {
        ScenarioSpec s;
        s.kind = scenario_from_string(kind);
        s.n = sy_n;
        s.m = sy_m;
        s.d_raw = sy_draw;
        s.latent_dim = sy_latent;
        s.noise_sigma = sy_sigma;
        s.shift_window = sy_shift;
        s.irrelevance_rate = sy_rho;
        s.events = sy_events;
        s.map_seed = sy_map_seed;
        specs.push_back(s);
      }
      json resolved{{"command", "synth"},    {"scenario", sy_scenarios},
                    {"n", sy_n},             {"m", sy_m},
                    {"d_raw", sy_draw},      {"latent_dim", sy_latent},
                    {"sigma", sy_sigma},     {"shift_window", sy_shift},
                    {"rho", sy_rho},         {"events", sy_events},
                    {"count_train", sy_train},
                    {"count_test", sy_test}, {"map_seed", sy_map_seed},
                    {"seed", seed},          {"output_dir", outdir_s}};
      echo_config(outdir, resolved);
      auto corpus = make_corpus(specs, {sy_train, sy_test}, seed);
      save_corpus(outdir, corpus);
      std::cout << "wrote " << corpus.train.size() << " train / "
                << corpus.test.size() << " test pairs\n";
    }

    if (*train_cmd) {
      train_cfg.seed = seed;
      auto corpus = load_corpus(train_corpus);
      json resolved = train_config_to_json(train_cfg);
      resolved["command"] = "train";
      resolved["corpus"] = train_corpus;
      resolved["output_dir"] = outdir_s;
      echo_config(outdir, resolved);
      auto report = train(corpus, train_cfg);
      atomic_write_text(outdir / "report.json",
                        report_to_json(report).dump(2) + "\n");
      save_encoders(outdir / "encoders.json", report.encoders);
      std::cout << "final loss "
                << (report.loss_per_step.empty() ? 0.0
                                                 : report.loss_per_step.back())
                << ", test R@1 t2v " << report.text_to_video.r1 << " v2t "
                << report.video_to_text.r1 << "\n";
    }

    if (*eval_cmd) {
      auto corpus = load_corpus(eval_corpus);
      EncoderParams enc;
      if (eval_random) {
        const std::size_t d_raw = corpus.test.empty()
                                      ? corpus.train.front().clips.dim()
                                      : corpus.test.front().clips.dim();
        enc = EncoderParams::random_init(d_raw, eval_demb, seed);
      } else {
        if (eval_encoders.empty())
          throw ArgumentError("eval: give --encoders or --random-init");
        enc = load_encoders(eval_encoders);
      }
      json resolved{{"command", "eval"},
                    {"corpus", eval_corpus},
                    {"encoders", eval_random ? "(random-init)" : eval_encoders},
                    {"variant", eval_flags.variant},
                    {"gamma", eval_flags.gamma},
                    {"dummy_distance", eval_flags.dummy_distance},
                    {"seed", seed},
                    {"output_dir", outdir_s}};
      echo_config(outdir, resolved);
      auto [t2v, v2t] =
          evaluate_retrieval(enc, corpus.test, eval_flags.params());
      json out{{"text_to_video", metrics_to_json(t2v)},
               {"video_to_text", metrics_to_json(v2t)}};
      atomic_write_text(outdir / "metrics.json", out.dump(2) + "\n");
      std::cout << out.dump(2) << "\n";
    }

    if (*ablate_cmd) {
      ablate_cfg.seed = seed;
      auto corpus = load_corpus(ablate_corpus);
      json resolved = train_config_to_json(ablate_cfg);
      resolved["command"] = "ablate";
      resolved["corpus"] = ablate_corpus;
      resolved["num_seeds"] = ablate_nseeds;
      resolved["output_dir"] = outdir_s;
      echo_config(outdir, resolved);
      std::vector<std::uint64_t> seeds(ablate_nseeds);
      for (std::size_t k = 0; k < ablate_nseeds; ++k) seeds[k] = seed + k;
      auto rows = run_ablation(corpus, ablate_cfg, seeds);
      std::string csv = "row,ta,wa,ls,mean_r1,mean_r5,mean_medr\n";
      json jrows = json::array();
      for (const auto& r : rows) {
        double r5 = 0.0, medr = 0.0;
        for (const auto& rep : r.per_seed) {
          r5 += 0.5 * (rep.text_to_video.r5 + rep.video_to_text.r5);
          medr += 0.5 * (rep.text_to_video.medr + rep.video_to_text.medr);
        }
        r5 /= r.per_seed.size();
        medr /= r.per_seed.size();
        csv += r.name;
        csv += r.config.ta ? ",TA-" + to_string(r.config.ta_strategy) : ",-";
        csv += r.config.wa ? ",yes" : ",-";
        csv += r.config.ls ? ",yes" : ",-";
        csv += "," + format_double(r.mean_test_r1) + "," + format_double(r5) +
               "," + format_double(medr) + "\n";
        json jr{{"name", r.name},
                {"mean_r1", r.mean_test_r1},
                {"mean_r5", r5},
                {"mean_medr", medr},
                {"config", train_config_to_json(r.config)}};
        jrows.push_back(std::move(jr));
      }
      atomic_write_text(outdir / "ablation.csv", csv);
      atomic_write_text(outdir / "ablation.json", jrows.dump(2) + "\n");
      std::cout << csv;
    }
    return 0;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateVectorError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const TrainingDivergedError& e) {
    std::cerr << "numeric error at step " << e.step << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
