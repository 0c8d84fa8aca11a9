#include "b3c/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "b3c/bytes.hpp"
#include "b3c/checkpoint.hpp"
#include "b3c/dataset.hpp"
#include "b3c/errors.hpp"
#include "b3c/metrics.hpp"
#include "b3c/run_config.hpp"
#include "b3c/trainer.hpp"

namespace b3c {
namespace {

namespace fs = std::filesystem;

// CLI flag overrides become synthesized config lines so they share the config
// parser's typing, range checks, and error wording.
RunConfig load_with_overrides(const std::string& config_path,
                              const std::vector<std::string>& lines) {
  std::string text;
  if (!config_path.empty()) text = read_file(config_path);
  return parse_config(text, lines);
}

std::string resolve_out_dir(const RunConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("B3C_OUT_DIR"); env && *env) return env;
  return "runs";
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path.string(), text);
}

std::string opt_step(const std::optional<long>& v) {
  return v ? std::to_string(*v) : std::string();
}

struct RunRow {
  uint64_t seed = 0;
  double final_return = 0.0;
  double max_target_q = 0.0;
  std::optional<long> diverged_at;
};

RunRow summarize(uint64_t seed, const MetricsLog& log) {
  RunRow row;
  row.seed = seed;
  row.final_return = log.final_return();
  row.max_target_q = log.max_target_q();
  row.diverged_at = log.diverged_at();
  return row;
}

// ---------------------------------------------------------------------------
// train-offline

int cmd_train_offline(const RunConfig& cfg) {
  if (cfg.dataset.empty())
    throw ConfigError("train-offline: a dataset path is required (run.dataset or --dataset)");
  const OfflineDataset dataset = load_dataset(cfg.dataset);
  const std::string out = resolve_out_dir(cfg);
  fs::create_directories(out);
  RunConfig resolved = cfg;
  resolved.out_dir = out;
  write_text(fs::path(out) / "config.resolved", write_resolved(resolved));

  for (uint64_t seed : cfg.seeds) {
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    const TrainResult result = train_offline(dataset, cfg.env, tc);
    const fs::path dir = fs::path(out) / ("seed_" + std::to_string(seed));
    fs::create_directories(dir);
    save_metrics(result.log, (dir / "metrics.csv").string());
    save_policies(result.policies, (dir / "policies.b3cp").string());
    std::cout << "seed " << seed << " final_return " << format_double(result.log.final_return())
              << " diverged_at "
              << (result.diverged_at ? std::to_string(*result.diverged_at) : std::string("-"))
              << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train-online

int cmd_train_online(const RunConfig& cfg) {
  const std::string out = resolve_out_dir(cfg);
  fs::create_directories(out);
  RunConfig resolved = cfg;
  resolved.out_dir = out;
  write_text(fs::path(out) / "config.resolved", write_resolved(resolved));

  for (uint64_t seed : cfg.seeds) {
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    const OnlineResult result = train_online(cfg.env, tc);
    const fs::path dir = fs::path(out) / ("seed_" + std::to_string(seed));
    fs::create_directories(dir);
    save_metrics(result.log, (dir / "metrics.csv").string());
    save_dataset(result.episode_stream, (dir / "stream.b3cd").string());

    // Uniform-action baseline anchoring the medium-checkpoint selection.
    const OfflineDataset random_rollouts =
        generate_dataset(nullptr, cfg.env, tc.eval_episodes, 0.0,
                         derive_seed(seed, streams::kEval, 0), "random-baseline");
    const double random_return = compute_stats(random_rollouts).avg_return;

    std::string tiers = "# schema: b3c-tiers-v1\n";
    tiers += "checkpoint,step,eval_return,episodes_completed\n";
    tiers += "random,0," + format_double(random_return) + ",0\n";
    if (!result.checkpoints.empty()) {
      const int mi = pick_medium_checkpoint(result.checkpoints, random_return);
      const OnlineCheckpoint& medium = result.checkpoints[static_cast<size_t>(mi)];
      const OnlineCheckpoint& expert = result.checkpoints.back();
      save_policies(medium.policies, (dir / "medium.b3cp").string());
      save_policies(expert.policies, (dir / "expert.b3cp").string());
      tiers += "medium," + std::to_string(medium.step) + "," +
               format_double(medium.eval_return) + "," +
               std::to_string(medium.episodes_completed) + "\n";
      tiers += "expert," + std::to_string(expert.step) + "," +
               format_double(expert.eval_return) + "," +
               std::to_string(expert.episodes_completed) + "\n";
    }
    write_text(dir / "tiers.csv", tiers);
    std::cout << "seed " << seed << " final_return " << format_double(result.log.final_return())
              << " episodes " << result.episode_stream.episodes.size() << " diverged_at "
              << (result.diverged_at ? std::to_string(*result.diverged_at) : std::string("-"))
              << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen-dataset / stats

std::string stats_csv(const DatasetStats& s) {
  std::string out = "# schema: b3c-dataset-stats-v1\n";
  out += "avg_return,max_return,min_return,episodes,transitions\n";
  out += format_double(s.avg_return) + "," + format_double(s.max_return) + "," +
         format_double(s.min_return) + "," + std::to_string(s.episode_count) + "," +
         std::to_string(s.transition_count) + "\n";
  return out;
}

int cmd_gen_dataset(const RunConfig& cfg, bool random, const std::string& from_stream,
                    long upto, const std::string& out_file) {
  if (out_file.empty()) throw ConfigError("gen-dataset: --out-file is required");
  const int modes = (random ? 1 : 0) + (!cfg.policy.empty() ? 1 : 0) + (!from_stream.empty() ? 1 : 0);
  if (modes != 1)
    throw ConfigError("gen-dataset: choose exactly one of --random, --policy, --from-stream");

  OfflineDataset dataset;
  if (!from_stream.empty()) {
    dataset = load_dataset(from_stream);
    const long total = static_cast<long>(dataset.episodes.size());
    const long keep = upto >= 0 ? std::min(upto, total) : total;
    if (keep < 1) throw ConfigError("gen-dataset: --upto leaves no episodes");
    dataset.episodes.resize(static_cast<size_t>(keep));
    dataset.meta.episode_count = static_cast<int>(keep);
    if (!cfg.tag.empty()) dataset.meta.tag = cfg.tag;
  } else if (random) {
    const std::string tag = cfg.tag.empty() ? "random" : cfg.tag;
    dataset = generate_dataset(nullptr, cfg.env, cfg.episodes, cfg.noise_std, cfg.train.seed, tag);
  } else {
    const PolicySet policies = load_policies(cfg.policy);
    const std::string tag = cfg.tag.empty() ? "policy" : cfg.tag;
    dataset =
        generate_dataset(&policies, cfg.env, cfg.episodes, cfg.noise_std, cfg.train.seed, tag);
  }
  if (const fs::path parent = fs::path(out_file).parent_path(); !parent.empty())
    fs::create_directories(parent);
  save_dataset(dataset, out_file);
  std::cout << stats_csv(compute_stats(dataset));
  return kExitOk;
}

int cmd_stats(const std::string& dataset_path) {
  if (dataset_path.empty()) throw ConfigError("stats: a dataset path is required");
  std::cout << stats_csv(compute_stats(load_dataset(dataset_path)));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

int cmd_evaluate(const RunConfig& cfg) {
  if (cfg.policy.empty()) throw ConfigError("evaluate: a checkpoint path is required (--policy)");
  const PolicySet policies = load_policies(cfg.policy);
  const EvalResult result = evaluate_policy(policies, cfg.env, cfg.episodes, cfg.train.seed);
  std::cout << "# schema: b3c-evaluate-v1\n";
  std::cout << "mean_return,episodes\n";
  std::cout << format_double(result.mean_return) << "," << result.episode_returns.size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArm {
  std::string value;     // as given on the command line
  std::vector<RunRow> rows;
};

double parse_sweep_number(const std::string& axis, const std::string& v) {
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size())
    throw ConfigError("sweep: --" + axis + " value '" + v + "' is not a number");
  return x;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(csv);
  while (std::getline(ss, item, ',')) {
    const size_t a = item.find_first_not_of(" \t");
    const size_t b = item.find_last_not_of(" \t");
    out.push_back(a == std::string::npos ? "" : item.substr(a, b - a + 1));
  }
  return out;
}

int cmd_sweep(const RunConfig& cfg, const std::string& alpha_list, const std::string& m_list,
              const std::string& mixer_list) {
  if (cfg.dataset.empty())
    throw ConfigError("sweep: a dataset path is required (run.dataset or --dataset)");
  const int axes = (!alpha_list.empty() ? 1 : 0) + (!m_list.empty() ? 1 : 0) +
                   (!mixer_list.empty() ? 1 : 0);
  if (axes != 1) throw ConfigError("sweep: choose exactly one of --alpha, --m, --mixer");
  const std::string axis = !alpha_list.empty() ? "alpha" : !m_list.empty() ? "m" : "mixer";
  const std::vector<std::string> values =
      split_list(!alpha_list.empty() ? alpha_list : !m_list.empty() ? m_list : mixer_list);
  if (values.empty()) throw ConfigError("sweep: --" + axis + " needs at least one value");

  const OfflineDataset dataset = load_dataset(cfg.dataset);
  const std::string out = resolve_out_dir(cfg);
  fs::create_directories(out);

  std::vector<SweepArm> arms;
  for (const std::string& value : values) {
    RunConfig arm_cfg = cfg;
    if (axis == "alpha") {
      arm_cfg.train.alpha = parse_sweep_number(axis, value);
      if (!std::isfinite(arm_cfg.train.alpha) || arm_cfg.train.alpha < 0.0)
        throw ConfigError("sweep: --alpha value '" + value + "' out of range");
    } else if (axis == "m") {
      const double m = parse_sweep_number(axis, value);
      if (!(m > 0.0)) throw ConfigError("sweep: --m value '" + value + "' out of range");
      arm_cfg.train.clip_scale = m;
    } else {
      if (value == "vdn") arm_cfg.train.mixer = MixerVariant::kVdn;
      else if (value == "mono") arm_cfg.train.mixer = MixerVariant::kMono;
      else if (value == "nonmono") arm_cfg.train.mixer = MixerVariant::kNonmono;
      else throw ConfigError("sweep: --mixer value '" + value + "' must be vdn, mono or nonmono");
    }

    const fs::path arm_dir = fs::path(out) / (axis + "_" + value);
    fs::create_directories(arm_dir);
    RunConfig resolved = arm_cfg;
    resolved.out_dir = arm_dir.string();
    write_text(arm_dir / "config.resolved", write_resolved(resolved));

    SweepArm arm;
    arm.value = value;
    for (uint64_t seed : cfg.seeds) {
      TrainConfig tc = arm_cfg.train;
      tc.seed = seed;
      const TrainResult result = train_offline(dataset, cfg.env, tc);
      const fs::path dir = arm_dir / ("seed_" + std::to_string(seed));
      fs::create_directories(dir);
      save_metrics(result.log, (dir / "metrics.csv").string());
      arm.rows.push_back(summarize(seed, result.log));
    }
    arms.push_back(std::move(arm));
  }

  std::string summary = "# schema: b3c-sweep-summary-v1\n";
  summary += "axis,value,seed,final_return,max_target_q,diverged_at\n";
  for (const SweepArm& arm : arms)
    for (const RunRow& row : arm.rows)
      summary += axis + "," + arm.value + "," + std::to_string(row.seed) + "," +
                 format_double(row.final_return) + "," + format_double(row.max_target_q) + "," +
                 opt_step(row.diverged_at) + "\n";
  write_text(fs::path(out) / "summary.csv", summary);

  std::string fig4 = "# schema: b3c-fig4-v1\n";
  fig4 += "axis,value,mean_final_return,std_final_return,seeds,diverged_runs\n";
  std::vector<double> arm_means(arms.size());
  for (size_t k = 0; k < arms.size(); ++k) {
    const SweepArm& arm = arms[k];
    double mean = 0.0;
    long diverged = 0;
    for (const RunRow& row : arm.rows) {
      mean += row.final_return;
      diverged += row.diverged_at ? 1 : 0;
    }
    mean /= arm.rows.size();
    double var = 0.0;
    for (const RunRow& row : arm.rows) {
      const double d = row.final_return - mean;
      var += d * d;
    }
    var /= arm.rows.size();
    arm_means[k] = mean;
    fig4 += axis + "," + arm.value + "," + format_double(mean) + "," +
            format_double(std::sqrt(var)) + "," + std::to_string(arm.rows.size()) + "," +
            std::to_string(diverged) + "\n";
  }
  write_text(fs::path(out) / "fig4.csv", fig4);

  if (axis == "mixer") {
    std::optional<double> vdn, mono, nonmono;
    for (size_t k = 0; k < arms.size(); ++k) {
      if (arms[k].value == "vdn") vdn = arm_means[k];
      else if (arms[k].value == "mono") mono = arm_means[k];
      else nonmono = arm_means[k];
    }
    if (vdn && mono && nonmono) {
      const double denom = std::max(std::fabs(*nonmono), 1e-12);
      std::string fig6 = "# schema: b3c-fig6-v1\n";
      fig6 += "dataset_tier,vdn_minus_nonmono,mono_minus_nonmono\n";
      fig6 += dataset.meta.tag + "," + format_double((*vdn - *nonmono) / denom * 100.0) + "," +
              format_double((*mono - *nonmono) / denom * 100.0) + "\n";
      write_text(fs::path(out) / "fig6.csv", fig6);
    } else {
      std::cout << "fig6.csv skipped: needs vdn, mono and nonmono arms\n";
    }
  }
  std::cout << "sweep complete: " << arms.size() << " arms x " << cfg.seeds.size() << " seeds\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// diagnose

struct VariantRuns {
  RunConfig cfg;
  std::vector<RunRow> rows;
  std::vector<MetricsLog> logs;  // parallel to rows
};

VariantRuns load_variant(const std::string& dir) {
  VariantRuns v;
  v.cfg = load_config((fs::path(dir) / "config.resolved").string());
  std::vector<std::pair<uint64_t, fs::path>> seed_dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("seed_", 0) != 0) continue;
    seed_dirs.emplace_back(std::strtoull(name.c_str() + 5, nullptr, 10), entry.path());
  }
  std::sort(seed_dirs.begin(), seed_dirs.end());
  for (const auto& [seed, path] : seed_dirs) {
    MetricsLog log = load_metrics((path / "metrics.csv").string());
    v.rows.push_back(summarize(seed, log));
    v.logs.push_back(std::move(log));
  }
  if (v.rows.empty())
    throw ConfigError("diagnose: no seed_*/metrics.csv runs under '" + dir + "'");
  return v;
}

void check_compatible(const RunConfig& a, const RunConfig& b) {
  const bool env_ok = a.env.n_agents == b.env.n_agents &&
                      a.env.arena_half_width == b.env.arena_half_width &&
                      a.env.episode_len == b.env.episode_len &&
                      a.env.step_size == b.env.step_size &&
                      a.env.collision_radius == b.env.collision_radius &&
                      a.env.collision_penalty == b.env.collision_penalty &&
                      a.env.obs_k == b.env.obs_k;
  if (!env_ok || a.dataset != b.dataset)
    throw ConfigError("diagnose: the two runs use different env or dataset configs");
}

int cmd_diagnose(const std::string& bc_dir, const std::string& b3c_dir,
                 const std::string& out_dir) {
  VariantRuns bc = load_variant(bc_dir);
  VariantRuns b3c = load_variant(b3c_dir);
  check_compatible(bc.cfg, b3c.cfg);

  const DatasetStats stats = compute_stats(load_dataset(b3c.cfg.dataset));
  const double m = b3c.cfg.train.clip_scale;
  const double r_star = std::isfinite(m) ? m * stats.max_return : stats.max_return;
  const double threshold = 100.0 * std::max(1.0, std::fabs(r_star));

  struct Report {
    long events = 0;
    size_t worst = 0;
    double max_q = -std::numeric_limits<double>::infinity();
  };
  auto report = [&](const VariantRuns& v) {
    Report r;
    for (size_t i = 0; i < v.rows.size(); ++i) {
      const RunRow& row = v.rows[i];
      if (row.diverged_at || row.max_target_q > threshold) r.events += 1;
      if (row.final_return < v.rows[r.worst].final_return) r.worst = i;
      r.max_q = std::max(r.max_q, row.max_target_q);
    }
    return r;
  };
  const Report rb = report(bc);
  const Report r3 = report(b3c);

  const double worst_bc = bc.rows[rb.worst].final_return;
  const double worst_b3c = b3c.rows[r3.worst].final_return;
  const double pct =
      (worst_b3c - worst_bc) / std::max(std::fabs(worst_bc), 1e-12) * 100.0;

  std::cout << "# schema: b3c-diagnose-v1\n";
  std::cout << "variant,runs,divergence_events,worst_seed,worst_final_return,max_target_q\n";
  std::cout << "bc," << bc.rows.size() << "," << rb.events << "," << bc.rows[rb.worst].seed << ","
            << format_double(worst_bc) << "," << format_double(rb.max_q) << "\n";
  std::cout << "b3c," << b3c.rows.size() << "," << r3.events << "," << b3c.rows[r3.worst].seed
            << "," << format_double(worst_b3c) << "," << format_double(r3.max_q) << "\n";
  std::cout << "# worst_seed_pct_difference = " << format_double(pct) << "\n";
  std::cout << "# divergence_threshold = " << format_double(threshold) << "\n";

  // Fig. 5 analog: worst-seed curves joined on common steps.
  const MetricsLog& log_bc = bc.logs[rb.worst];
  const MetricsLog& log_b3c = b3c.logs[r3.worst];
  std::string fig5 = "# schema: b3c-fig5-v1\n";
  fig5 += "step,return_bc,return_b3c,target_bc,target_b3c\n";
  size_t i = 0, j = 0;
  while (i < log_bc.records.size() && j < log_b3c.records.size()) {
    const MetricsRecord& a = log_bc.records[i];
    const MetricsRecord& b = log_b3c.records[j];
    if (a.step == b.step) {
      fig5 += std::to_string(a.step) + "," + format_double(a.eval_return) + "," +
              format_double(b.eval_return) + "," + format_double(a.target_q_max) + "," +
              format_double(b.target_q_max) + "\n";
      ++i;
      ++j;
    } else if (a.step < b.step) {
      ++i;
    } else {
      ++j;
    }
  }
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "fig5.csv", fig5);
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"offline multi-agent RL engine (factored critics, BC-regularized "
               "actors, clipped critic targets)"};
  app.require_subcommand(1);

  std::string config_path, out_flag, dataset_flag, seeds_flag, tag_flag;
  std::vector<std::string> set_flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (key = value lines)");
    sub->add_option("--set", set_flags, "extra `key=value` config override")
        ->take_all()
        ->expected(-1);
    sub->add_option("--out", out_flag, "output directory");
    sub->add_option("--dataset", dataset_flag, "dataset file");
    sub->add_option("--seeds", seeds_flag, "comma-separated seed list");
  };

  CLI::App* sc_train_offline = app.add_subcommand("train-offline", "offline training run(s)");
  add_common(sc_train_offline);

  CLI::App* sc_train_online = app.add_subcommand("train-online", "online training run(s)");
  add_common(sc_train_online);

  CLI::App* sc_gen = app.add_subcommand("gen-dataset", "roll out a dataset");
  add_common(sc_gen);
  bool gen_random = false;
  std::string gen_policy, gen_stream, gen_out_file, gen_seed, gen_episodes, gen_noise;
  long gen_upto = -1;
  sc_gen->add_flag("--random", gen_random, "uniform random actions");
  sc_gen->add_option("--policy", gen_policy, "roll out this checkpoint");
  sc_gen->add_option("--from-stream", gen_stream, "prefix of a saved episode stream");
  sc_gen->add_option("--upto", gen_upto, "episodes to keep from the stream");
  sc_gen->add_option("--out-file", gen_out_file, "dataset file to write");
  sc_gen->add_option("--seed", gen_seed, "generation seed");
  sc_gen->add_option("--episodes", gen_episodes, "episode count");
  sc_gen->add_option("--noise", gen_noise, "action noise stddev");
  sc_gen->add_option("--tag", tag_flag, "dataset tag");

  CLI::App* sc_stats = app.add_subcommand("stats", "print dataset statistics");
  std::string stats_dataset;
  sc_stats->add_option("dataset", stats_dataset, "dataset file")->required();

  CLI::App* sc_eval = app.add_subcommand("evaluate", "evaluate a checkpoint");
  add_common(sc_eval);
  std::string eval_policy, eval_seed, eval_episodes;
  sc_eval->add_option("--policy", eval_policy, "checkpoint to evaluate");
  sc_eval->add_option("--seed", eval_seed, "evaluation seed");
  sc_eval->add_option("--episodes", eval_episodes, "episode count");

  CLI::App* sc_sweep = app.add_subcommand("sweep", "sweep one axis over seeds");
  add_common(sc_sweep);
  std::string sweep_alpha, sweep_m, sweep_mixer;
  sc_sweep->add_option("--alpha", sweep_alpha, "comma-separated alpha values");
  sc_sweep->add_option("--m", sweep_m, "comma-separated M values (inf allowed)");
  sc_sweep->add_option("--mixer", sweep_mixer, "comma-separated mixer names");

  CLI::App* sc_diag = app.add_subcommand("diagnose", "compare a BC run against a B3C run");
  std::string diag_bc, diag_b3c, diag_out = ".";
  sc_diag->add_option("--bc", diag_bc, "BC variant run directory")->required();
  sc_diag->add_option("--b3c", diag_b3c, "B3C variant run directory")->required();
  sc_diag->add_option("--out", diag_out, "directory for fig5.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: [usage] " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    std::vector<std::string> overrides = set_flags;
    if (!out_flag.empty()) overrides.push_back("out_dir = " + out_flag);
    if (!dataset_flag.empty()) overrides.push_back("dataset = " + dataset_flag);
    if (!seeds_flag.empty()) overrides.push_back("seeds = " + seeds_flag);
    if (!tag_flag.empty()) overrides.push_back("tag = " + tag_flag);

    if (app.got_subcommand(sc_train_offline)) {
      return cmd_train_offline(load_with_overrides(config_path, overrides));
    }
    if (app.got_subcommand(sc_train_online)) {
      return cmd_train_online(load_with_overrides(config_path, overrides));
    }
    if (app.got_subcommand(sc_gen)) {
      if (!gen_policy.empty()) overrides.push_back("policy = " + gen_policy);
      if (!gen_seed.empty()) overrides.push_back("seed = " + gen_seed);
      if (!gen_episodes.empty()) overrides.push_back("episodes = " + gen_episodes);
      if (!gen_noise.empty()) overrides.push_back("noise_std = " + gen_noise);
      return cmd_gen_dataset(load_with_overrides(config_path, overrides), gen_random, gen_stream,
                             gen_upto, gen_out_file);
    }
    if (app.got_subcommand(sc_stats)) {
      return cmd_stats(stats_dataset);
    }
    if (app.got_subcommand(sc_eval)) {
      if (!eval_policy.empty()) overrides.push_back("policy = " + eval_policy);
      if (!eval_seed.empty()) overrides.push_back("seed = " + eval_seed);
      if (!eval_episodes.empty()) overrides.push_back("episodes = " + eval_episodes);
      return cmd_evaluate(load_with_overrides(config_path, overrides));
    }
    if (app.got_subcommand(sc_sweep)) {
      return cmd_sweep(load_with_overrides(config_path, overrides), sweep_alpha, sweep_m,
                       sweep_mixer);
    }
    if (app.got_subcommand(sc_diag)) {
      return cmd_diagnose(diag_bc, diag_b3c, diag_out);
    }
    std::cerr << "error: [usage] no subcommand\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: [config] " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: [io] " << e.what() << "\n";
    return kExitIo;
  } catch (const DimensionError& e) {
    std::cerr << "error: [dimension] " << e.what() << "\n";
    return kExitDimension;
  } catch (const ProtocolError& e) {
    std::cerr << "error: [protocol] " << e.what() << "\n";
    return kExitProtocol;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: [io] " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: [internal] " << e.what() << "\n";
    return kExitInternal;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("b3c");
  for (const std::string& a : args) argv_store.push_back(a);
  std::vector<const char*> argv;
  argv.reserve(argv_store.size());
  for (const std::string& a : argv_store) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace b3c
