#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "b3c/env.hpp"
#include "b3c/trainer.hpp"

namespace b3c {

// Everything a CLI command can take from a config file. Every field has a
// default, so an empty file is a valid config.
struct RunConfig {
  EnvConfig env;
  TrainConfig train;

  std::string out_dir;                      // empty -> B3C_OUT_DIR or ./runs
  std::vector<uint64_t> seeds = {0, 1, 2, 3, 4};
  std::string dataset;                      // input dataset path
  std::string policy;                       // input checkpoint path
  int episodes = 100;                       // gen-dataset / evaluate episode count
  double noise_std = 0.1;                   // gen-dataset action noise
  std::string tag;                          // dataset tag for gen-dataset
};

// Line-oriented `key = value` text with optional [env] / [train] / [run]
// section headers and `#` comments. Unknown keys, type mismatches, and
// out-of-range values raise ConfigError naming the key and line number.
// `overrides` are extra `key = value` lines applied after the text; they
// resolve their section by key, unaffected by where the text left off.
RunConfig parse_config(const std::string& text,
                       const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path);

// Re-parseable echo of the fully resolved config (optional fields shown with
// their resolved values) for run provenance; parse_config(write_resolved(c))
// reproduces c.
std::string write_resolved(const RunConfig& config);

}  // namespace b3c
