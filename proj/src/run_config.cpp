#include "b3c/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "b3c/bytes.hpp"
#include "b3c/errors.hpp"
#include "b3c/metrics.hpp"

namespace b3c {
namespace {

const char* const kEnvKeys[] = {"n_agents",         "arena_half_width", "episode_len",
                                "step_size",        "collision_radius", "collision_penalty",
                                "obs_k"};
const char* const kTrainKeys[] = {
    "algorithm",   "critic",          "mixer",           "alpha",
    "beta",        "m",               "M",               "clip_operator",   "gamma",
    "tau",         "batch_size",      "policy_delay",    "twin_critics",
    "target_noise_std", "target_noise_clip", "total_steps", "eval_every",
    "eval_episodes", "explore_noise", "buffer_capacity", "checkpoint_every",
    "lr_actor",    "lr_critic",       "hidden_width",    "hidden_depth",
    "mixer_hidden", "seed"};
const char* const kRunKeys[] = {"out_dir", "seeds",     "dataset", "policy",
                                "episodes", "noise_std", "tag"};

template <size_t N>
bool contains(const char* const (&keys)[N], const std::string& key) {
  for (const char* k : keys)
    if (key == k) return true;
  return false;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Parser {
  RunConfig cfg;
  int line_no = 0;
  std::string section;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config: line " + std::to_string(line_no) + ": " + msg);
  }

  [[noreturn]] void type_error(const std::string& key, const std::string& kind,
                               const std::string& value) const {
    fail("key '" + key + "': expected " + kind + ", got '" + value + "'");
  }

  [[noreturn]] void range_error(const std::string& key, const std::string& need) const {
    fail("key '" + key + "': value out of range, must be " + need);
  }

  double number(const std::string& key, const std::string& v) const {
    if (v.empty()) type_error(key, "a number", v);
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || errno == ERANGE) type_error(key, "a number", v);
    return x;
  }

  long integer(const std::string& key, const std::string& v) const {
    if (v.empty()) type_error(key, "an integer", v);
    errno = 0;
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || errno == ERANGE) type_error(key, "an integer", v);
    return x;
  }

  uint64_t unsigned64(const std::string& key, const std::string& v) const {
    if (v.empty() || v[0] == '-') type_error(key, "a non-negative integer", v);
    errno = 0;
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || errno == ERANGE)
      type_error(key, "a non-negative integer", v);
    return static_cast<uint64_t>(x);
  }

  bool boolean(const std::string& key, const std::string& v) const {
    if (v == "true") return true;
    if (v == "false") return false;
    type_error(key, "true or false", v);
  }

  void set_env(const std::string& key, const std::string& v) {
    EnvConfig& e = cfg.env;
    if (key == "n_agents") {
      const long x = integer(key, v);
      if (x < 1) range_error(key, "at least 1");
      e.n_agents = static_cast<int>(x);
    } else if (key == "arena_half_width") {
      const double x = number(key, v);
      if (!(x > 0.0) || !std::isfinite(x)) range_error(key, "positive and finite");
      e.arena_half_width = x;
    } else if (key == "episode_len") {
      const long x = integer(key, v);
      if (x < 1) range_error(key, "at least 1");
      e.episode_len = static_cast<int>(x);
    } else if (key == "step_size") {
      const double x = number(key, v);
      if (!(x > 0.0) || !std::isfinite(x)) range_error(key, "positive and finite");
      e.step_size = x;
    } else if (key == "collision_radius") {
      const double x = number(key, v);
      if (!(x >= 0.0) || !std::isfinite(x)) range_error(key, "non-negative and finite");
      e.collision_radius = x;
    } else if (key == "collision_penalty") {
      const double x = number(key, v);
      if (!(x >= 0.0) || !std::isfinite(x)) range_error(key, "non-negative and finite");
      e.collision_penalty = x;
    } else {  // obs_k
      if (v == "none") {
        e.obs_k.reset();
      } else {
        const long x = integer(key, v);
        if (x < 0) range_error(key, "non-negative or none");
        e.obs_k = static_cast<int>(x);
      }
    }
  }

  void set_train(const std::string& key, const std::string& v) {
    TrainConfig& t = cfg.train;
    if (key == "algorithm") {
      if (v == "b3c") t.algorithm = Algorithm::kB3c;
      else if (v == "bc") t.algorithm = Algorithm::kBc;
      else type_error(key, "b3c or bc", v);
    } else if (key == "critic") {
      if (v == "factored") t.critic_kind = CriticKind::kFactored;
      else if (v == "joint") t.critic_kind = CriticKind::kJoint;
      else type_error(key, "factored or joint", v);
    } else if (key == "mixer") {
      if (v == "vdn") t.mixer = MixerVariant::kVdn;
      else if (v == "mono") t.mixer = MixerVariant::kMono;
      else if (v == "nonmono") t.mixer = MixerVariant::kNonmono;
      else type_error(key, "vdn, mono or nonmono", v);
    } else if (key == "alpha") {
      const double x = number(key, v);
      if (!(x >= 0.0) || !std::isfinite(x)) range_error(key, "non-negative and finite");
      t.alpha = x;
    } else if (key == "beta") {
      const double x = number(key, v);
      if (!(x >= 0.0) || !std::isfinite(x)) range_error(key, "non-negative and finite");
      t.beta = x;
    } else if (key == "m" || key == "M") {
      double x;
      if (v == "inf" || v == "infinity") x = std::numeric_limits<double>::infinity();
      else x = number(key, v);
      if (!(x > 0.0)) range_error(key, "positive (or inf to disable clipping)");
      t.clip_scale = x;
    } else if (key == "clip_operator") {
      if (v == "min") t.clip_operator = ClipOperator::kMin;
      else if (v == "max") t.clip_operator = ClipOperator::kMax;
      else type_error(key, "min or max", v);
    } else if (key == "gamma") {
      const double x = number(key, v);
      if (!(x >= 0.0 && x < 1.0)) range_error(key, "in [0, 1)");
      t.gamma = x;
    } else if (key == "tau") {
      const double x = number(key, v);
      if (!(x > 0.0 && x <= 1.0)) range_error(key, "in (0, 1]");
      t.tau = x;
    } else if (key == "batch_size") {
      const long x = integer(key, v);
      if (x < 1) range_error(key, "at least 1");
      t.batch_size = static_cast<int>(x);
    } else if (key == "policy_delay") {
      const long x = integer(key, v);
      if (x < 1) range_error(key, "at least 1");
      t.policy_delay = static_cast<int>(x);
    } else if (key == "twin_critics") {
      t.twin_critics = boolean(key, v);
    } else if (key == "target_noise_std") {
      const double x = number(key, v);
      if (!(x >= 0.0) || !std::isfinite(x)) range_error(key, "non-negative and finite");
      t.target_noise_std = x;
    } else if (key == "target_noise_clip") {
      const double x = number(key, v);
      if (!(x >= 0.0) || !std::isfinite(x)) range_error(key, "non-negative and finite");
      t.target_noise_clip = x;
    } else if (key == "total_steps") {
      const long x = integer(key, v);
      if (x < 0) range_error(key, "non-negative");
      t.total_steps = x;
    } else if (key == "eval_every") {
      const long x = integer(key, v);
      if (x < 1) range_error(key, "at least 1");
      t.eval_every = x;
    } else if (key == "eval_episodes") {
      const long x = integer(key, v);
      if (x < 1) range_error(key, "at least 1");
      t.eval_episodes = static_cast<int>(x);
    } else if (key == "explore_noise") {
      const double x = number(key, v);
      if (!(x >= 0.0) || !std::isfinite(x)) range_error(key, "non-negative and finite");
      t.explore_noise = x;
    } else if (key == "buffer_capacity") {
      const long x = integer(key, v);
      if (x < 1) range_error(key, "at least 1");
      t.buffer_capacity = x;
    } else if (key == "checkpoint_every") {
      const long x = integer(key, v);
      if (x < 1) range_error(key, "at least 1");
      t.checkpoint_every = x;
    } else if (key == "lr_actor") {
      const double x = number(key, v);
      if (!(x > 0.0) || !std::isfinite(x)) range_error(key, "positive and finite");
      t.lr_actor = x;
    } else if (key == "lr_critic") {
      const double x = number(key, v);
      if (!(x > 0.0) || !std::isfinite(x)) range_error(key, "positive and finite");
      t.lr_critic = x;
    } else if (key == "hidden_width") {
      const long x = integer(key, v);
      if (x < 1) range_error(key, "at least 1");
      t.hidden_width = static_cast<int>(x);
    } else if (key == "hidden_depth") {
      const long x = integer(key, v);
      if (x < 0) range_error(key, "non-negative");
      t.hidden_depth = static_cast<int>(x);
    } else if (key == "mixer_hidden") {
      const long x = integer(key, v);
      if (x < 1) range_error(key, "at least 1");
      t.mixer_hidden = static_cast<int>(x);
    } else {  // seed
      t.seed = unsigned64(key, v);
    }
  }

  void set_run(const std::string& key, const std::string& v) {
    if (key == "out_dir") {
      cfg.out_dir = v;
    } else if (key == "seeds") {
      std::vector<uint64_t> seeds;
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) seeds.push_back(unsigned64(key, trim(item)));
      if (seeds.empty()) range_error(key, "a non-empty comma-separated list");
      cfg.seeds = std::move(seeds);
    } else if (key == "dataset") {
      cfg.dataset = v;
    } else if (key == "policy") {
      cfg.policy = v;
    } else if (key == "episodes") {
      const long x = integer(key, v);
      if (x < 1) range_error(key, "at least 1");
      cfg.episodes = static_cast<int>(x);
    } else if (key == "noise_std") {
      const double x = number(key, v);
      if (!(x >= 0.0) || !std::isfinite(x)) range_error(key, "non-negative and finite");
      cfg.noise_std = x;
    } else {  // tag
      cfg.tag = v;
    }
  }

  void set(const std::string& key, const std::string& v) {
    std::string home;
    if (contains(kEnvKeys, key)) home = "env";
    else if (contains(kTrainKeys, key)) home = "train";
    else if (contains(kRunKeys, key)) home = "run";
    else fail("unknown key '" + key + "'");
    if (!section.empty() && section != home)
      fail("key '" + key + "' belongs to [" + home + "], not [" + section + "]");
    if (home == "env") set_env(key, v);
    else if (home == "train") set_train(key, v);
    else set_run(key, v);
  }

  void line(const std::string& raw) {
    std::string s = raw;
    if (const size_t hash = s.find('#'); hash != std::string::npos) s.resize(hash);
    s = trim(s);
    if (s.empty()) return;
    if (s.front() == '[') {
      if (s.back() != ']') fail("malformed section header '" + s + "'");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name != "env" && name != "train" && name != "run")
        fail("unknown section [" + name + "]");
      section = name;
      return;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail("missing key before '='");
    set(key, value);
  }
};

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::string fmt_m(double m) {
  return std::isfinite(m) ? format_double(m) : std::string("inf");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  Parser p;
  std::stringstream ss(text);
  std::string raw;
  while (std::getline(ss, raw)) {
    p.line_no += 1;
    p.line(raw);
  }
  p.section.clear();  // overrides name any key, whatever section the text ended in
  for (const std::string& o : overrides) {
    p.line_no += 1;
    p.line(o);
  }
  p.cfg.env.validate();
  p.cfg.train.validate();
  return p.cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string write_resolved(const RunConfig& c) {
  std::string out;
  out += "# resolved configuration; re-parseable\n";
  out += "[env]\n";
  out += "n_agents = " + std::to_string(c.env.n_agents) + "\n";
  out += "arena_half_width = " + format_double(c.env.arena_half_width) + "\n";
  out += "episode_len = " + std::to_string(c.env.episode_len) + "\n";
  out += "step_size = " + format_double(c.env.step_size) + "\n";
  out += "collision_radius = " + format_double(c.env.collision_radius) + "\n";
  out += "collision_penalty = " + format_double(c.env.collision_penalty) + "\n";
  out += "obs_k = " + (c.env.obs_k ? std::to_string(*c.env.obs_k) : std::string("none")) + "\n";
  out += "[train]\n";
  out += "algorithm = " + std::string(c.train.algorithm == Algorithm::kB3c ? "b3c" : "bc") + "\n";
  out += "critic = " +
         std::string(c.train.critic_kind == CriticKind::kFactored ? "factored" : "joint") + "\n";
  const char* mixer = c.train.mixer == MixerVariant::kVdn    ? "vdn"
                      : c.train.mixer == MixerVariant::kMono ? "mono"
                                                             : "nonmono";
  out += "mixer = " + std::string(mixer) + "\n";
  out += "alpha = " + format_double(c.train.alpha) + "\n";
  out += "beta = " + format_double(c.train.beta) + "\n";
  out += "m = " + fmt_m(c.train.clip_scale) + "\n";
  out += "clip_operator = " +
         std::string(c.train.clip_operator == ClipOperator::kMin ? "min" : "max") + "\n";
  out += "gamma = " + format_double(c.train.gamma) + "\n";
  out += "tau = " + format_double(c.train.tau) + "\n";
  out += "batch_size = " + std::to_string(c.train.batch_size) + "\n";
  out += "policy_delay = " + std::to_string(c.train.delay()) + "\n";
  out += "twin_critics = " + fmt_bool(c.train.twin()) + "\n";
  out += "target_noise_std = " + format_double(c.train.smoothing_std()) + "\n";
  out += "target_noise_clip = " + format_double(c.train.target_noise_clip) + "\n";
  out += "total_steps = " + std::to_string(c.train.total_steps) + "\n";
  out += "eval_every = " + std::to_string(c.train.eval_every) + "\n";
  out += "eval_episodes = " + std::to_string(c.train.eval_episodes) + "\n";
  out += "explore_noise = " + format_double(c.train.explore_noise) + "\n";
  out += "buffer_capacity = " + std::to_string(c.train.buffer_capacity) + "\n";
  out += "checkpoint_every = " + std::to_string(c.train.checkpoint_every) + "\n";
  out += "lr_actor = " + format_double(c.train.lr_actor) + "\n";
  out += "lr_critic = " + format_double(c.train.lr_critic) + "\n";
  out += "hidden_width = " + std::to_string(c.train.hidden_width) + "\n";
  out += "hidden_depth = " + std::to_string(c.train.hidden_depth) + "\n";
  out += "mixer_hidden = " + std::to_string(c.train.mixer_hidden) + "\n";
  out += "seed = " + std::to_string(c.train.seed) + "\n";
  out += "[run]\n";
  out += "out_dir = " + c.out_dir + "\n";
  std::string seeds;
  for (size_t i = 0; i < c.seeds.size(); ++i) {
    if (i) seeds += ",";
    seeds += std::to_string(c.seeds[i]);
  }
  out += "seeds = " + seeds + "\n";
  out += "dataset = " + c.dataset + "\n";
  out += "policy = " + c.policy + "\n";
  out += "episodes = " + std::to_string(c.episodes) + "\n";
  out += "noise_std = " + format_double(c.noise_std) + "\n";
  out += "tag = " + c.tag + "\n";
  return out;
}

}  // namespace b3c
