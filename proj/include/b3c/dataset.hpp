#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "b3c/env.hpp"
#include "b3c/policy.hpp"
#include "b3c/rng.hpp"

namespace b3c {

// One environment step as stored on disk: 32-bit storage, upcast to 64-bit
// when batches are built for training. Per-agent vectors are concatenated in
// agent order.
struct Transition {
  std::vector<float> state;       // state_dim
  std::vector<float> obs;         // n_agents * obs_dim
  std::vector<float> actions;     // n_agents * act_dim
  float reward = 0.0f;
  std::vector<float> next_state;  // state_dim
  std::vector<float> next_obs;    // n_agents * obs_dim
  bool done = false;

  bool operator==(const Transition&) const = default;
};

struct Episode {
  std::vector<Transition> transitions;
  double episode_return = 0.0;  // undiscounted sum of rewards

  bool operator==(const Episode&) const = default;
};

struct DatasetMeta {
  std::string env_id = "coop-nav-v1";
  int n_agents = 0;
  int obs_dim = 0;
  int act_dim = 0;
  int state_dim = 0;
  int episode_count = 0;
  uint64_t seed = 0;
  std::string tag;  // expert | medium | medium-replay | random | mixture tags

  bool dims_match(const DatasetMeta& other) const;
  bool operator==(const DatasetMeta&) const = default;
};

struct OfflineDataset {
  DatasetMeta meta;
  std::vector<Episode> episodes;

  long transition_count() const;
  bool operator==(const OfflineDataset&) const = default;
};

struct DatasetStats {
  double avg_return = 0.0;
  double max_return = 0.0;
  double min_return = 0.0;
  long episode_count = 0;
  long transition_count = 0;
};

DatasetMeta make_meta(const EnvConfig& env, uint64_t seed, const std::string& tag);

// Pointer view over all transitions in episode order; the dataset must
// outlive and not be mutated while the view is in use.
std::vector<const Transition*> flatten(const OfflineDataset& dataset);

// Rolls out `policies` for n_episodes with Gaussian action noise of the given
// stddev (clamped to the action box). Passing nullptr for `policies` draws
// uniform random actions instead (the random tier). Deterministic given seed.
OfflineDataset generate_dataset(const PolicySet* policies, const EnvConfig& env, int n_episodes,
                                double noise_std, uint64_t seed, const std::string& tag);

// Exact arithmetic over episode returns; throws ConfigError on empty input.
DatasetStats compute_stats(const OfflineDataset& dataset);

// Episode union of two dimensionally compatible datasets; tag becomes
// "tagA+tagB". Throws DimensionError on incompatible meta.
OfflineDataset mix_datasets(const OfflineDataset& a, const OfflineDataset& b);

// Binary container: magic "B3CD", version, meta, episodes, trailing CRC-32.
// load(save(d)) == d bitwise. Corruption is reported by IoError kind: wrong
// magic, version mismatch, truncation, checksum failure, malformed counts.
void save_dataset(const OfflineDataset& dataset, const std::string& path);
OfflineDataset load_dataset(const std::string& path);
std::string encode_dataset(const OfflineDataset& dataset);
OfflineDataset decode_dataset(const std::string& bytes);

// Uniform-with-replacement draws from the flattened transition list. The
// index source is injectable so tests can enumerate deterministically.
std::vector<const Transition*> sample_batch(const OfflineDataset& dataset, int batch_size,
                                            Rng& rng);
std::vector<const Transition*> sample_batch(const OfflineDataset& dataset, int batch_size,
                                            const std::function<long(long)>& pick_index);

inline constexpr uint32_t kDatasetFormatVersion = 1;

}  // namespace b3c
