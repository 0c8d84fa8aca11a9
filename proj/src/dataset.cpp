#include "b3c/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "b3c/bytes.hpp"
#include "b3c/errors.hpp"

namespace b3c {
namespace {

constexpr char kMagic[4] = {'B', '3', 'C', 'D'};

std::vector<float> to_f32(const std::vector<double>& v) {
  std::vector<float> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

std::vector<float> concat_f32(const std::vector<std::vector<double>>& vs) {
  std::vector<float> out;
  size_t total = 0;
  for (const auto& v : vs) total += v.size();
  out.reserve(total);
  for (const auto& v : vs)
    for (double x : v) out.push_back(static_cast<float>(x));
  return out;
}

void put_f32s(ByteWriter& w, const std::vector<float>& v) {
  for (float x : v) w.put_f32(x);
}

std::vector<float> get_f32s(ByteReader& r, size_t n) {
  std::vector<float> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = r.f32();
  return v;
}

}  // namespace

bool DatasetMeta::dims_match(const DatasetMeta& other) const {
  return env_id == other.env_id && n_agents == other.n_agents && obs_dim == other.obs_dim &&
         act_dim == other.act_dim && state_dim == other.state_dim;
}

long OfflineDataset::transition_count() const {
  long n = 0;
  for (const Episode& e : episodes) n += static_cast<long>(e.transitions.size());
  return n;
}

DatasetMeta make_meta(const EnvConfig& env, uint64_t seed, const std::string& tag) {
  DatasetMeta m;
  m.n_agents = env.n_agents;
  m.obs_dim = env.obs_dim();
  m.act_dim = env.act_dim();
  m.state_dim = env.state_dim();
  m.episode_count = 0;
  m.seed = seed;
  m.tag = tag;
  return m;
}

std::vector<const Transition*> flatten(const OfflineDataset& dataset) {
  std::vector<const Transition*> flat;
  flat.reserve(dataset.transition_count());
  for (const Episode& e : dataset.episodes)
    for (const Transition& t : e.transitions) flat.push_back(&t);
  return flat;
}

OfflineDataset generate_dataset(const PolicySet* policies, const EnvConfig& env, int n_episodes,
                                double noise_std, uint64_t seed, const std::string& tag) {
  env.validate();
  if (n_episodes < 1) throw ConfigError("generate_dataset: n_episodes must be at least 1");
  if (noise_std < 0.0) throw ConfigError("generate_dataset: noise_std must be non-negative");
  if (policies) {
    if (policies->n_agents() != env.n_agents)
      throw DimensionError("generate_dataset: policy count does not match n_agents");
    for (const Mlp& net : policies->nets)
      if (net.in_dim() != env.obs_dim() || net.out_dim() != env.act_dim())
        throw DimensionError("generate_dataset: policy dims do not match env dims");
  }

  OfflineDataset dataset;
  dataset.meta = make_meta(env, seed, tag);
  dataset.episodes.reserve(n_episodes);
  for (int e = 0; e < n_episodes; ++e) {
    Rng noise(derive_seed(seed, streams::kDataNoise, static_cast<uint64_t>(e)));
    EnvState state = reset_env(env, derive_seed(seed, streams::kEnvEpisode, static_cast<uint64_t>(e)));
    JointObservation obs = observe(env, state);
    Episode episode;
    episode.transitions.reserve(env.episode_len);
    for (int t = 0; t < env.episode_len; ++t) {
      JointAction actions(env.n_agents);
      for (int i = 0; i < env.n_agents; ++i) {
        if (policies) {
          actions[i] = mlp_apply(policies->nets[i], obs[i]);
          for (double& a : actions[i]) {
            if (noise_std > 0.0) a += noise.gaussian(0.0, noise_std);
            a = std::clamp(a, -1.0, 1.0);
          }
        } else {
          actions[i] = {noise.uniform(-1.0, 1.0), noise.uniform(-1.0, 1.0)};
        }
      }
      Transition tr;
      tr.state = to_f32(global_state_vector(state));
      tr.obs = concat_f32(obs);
      tr.actions = concat_f32(actions);
      StepResult result = step_env(env, state, actions);
      tr.reward = static_cast<float>(result.reward);
      tr.next_state = to_f32(global_state_vector(state));
      tr.next_obs = concat_f32(result.obs);
      tr.done = result.done;
      episode.episode_return += static_cast<double>(tr.reward);
      episode.transitions.push_back(std::move(tr));
      obs = std::move(result.obs);
    }
    dataset.episodes.push_back(std::move(episode));
  }
  dataset.meta.episode_count = n_episodes;
  return dataset;
}

DatasetStats compute_stats(const OfflineDataset& dataset) {
  if (dataset.episodes.empty()) throw ConfigError("compute_stats: dataset has no episodes");
  DatasetStats s;
  s.max_return = -std::numeric_limits<double>::infinity();
  s.min_return = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const Episode& e : dataset.episodes) {
    sum += e.episode_return;
    s.max_return = std::max(s.max_return, e.episode_return);
    s.min_return = std::min(s.min_return, e.episode_return);
    s.transition_count += static_cast<long>(e.transitions.size());
  }
  s.episode_count = static_cast<long>(dataset.episodes.size());
  s.avg_return = sum / static_cast<double>(s.episode_count);
  return s;
}

OfflineDataset mix_datasets(const OfflineDataset& a, const OfflineDataset& b) {
  if (!a.meta.dims_match(b.meta))
    throw DimensionError("mix_datasets: incompatible metadata (" + a.meta.env_id + " vs " +
                         b.meta.env_id + " or differing dims)");
  OfflineDataset out;
  out.meta = a.meta;
  out.meta.tag = a.meta.tag + "+" + b.meta.tag;
  out.episodes.reserve(a.episodes.size() + b.episodes.size());
  out.episodes.insert(out.episodes.end(), a.episodes.begin(), a.episodes.end());
  out.episodes.insert(out.episodes.end(), b.episodes.begin(), b.episodes.end());
  out.meta.episode_count = static_cast<int>(out.episodes.size());
  return out;
}

std::string encode_dataset(const OfflineDataset& dataset) {
  ByteWriter w;
  w.put_bytes(kMagic, 4);
  w.put_u32(kDatasetFormatVersion);
  w.put_string(dataset.meta.env_id);
  w.put_u32(static_cast<uint32_t>(dataset.meta.n_agents));
  w.put_u32(static_cast<uint32_t>(dataset.meta.obs_dim));
  w.put_u32(static_cast<uint32_t>(dataset.meta.act_dim));
  w.put_u32(static_cast<uint32_t>(dataset.meta.state_dim));
  w.put_u32(static_cast<uint32_t>(dataset.episodes.size()));
  w.put_u64(dataset.meta.seed);
  w.put_string(dataset.meta.tag);
  for (const Episode& e : dataset.episodes) {
    w.put_u32(static_cast<uint32_t>(e.transitions.size()));
    for (const Transition& t : e.transitions) {
      put_f32s(w, t.state);
      put_f32s(w, t.obs);
      put_f32s(w, t.actions);
      w.put_f32(t.reward);
      put_f32s(w, t.next_state);
      put_f32s(w, t.next_obs);
      w.put_u8(t.done ? 1 : 0);
    }
  }
  const uint32_t crc = crc32(w.bytes().data() + 8, w.bytes().size() - 8);
  w.put_u32(crc);
  return w.bytes();
}

OfflineDataset decode_dataset(const std::string& bytes) {
  if (bytes.size() < 12) throw IoError(IoErrorKind::kTruncated, "dataset file too short");
  if (!std::equal(kMagic, kMagic + 4, bytes.data()))
    throw IoError(IoErrorKind::kBadMagic, "not a dataset file (bad magic)");
  {
    ByteReader header(bytes.data() + 4, 4);
    const uint32_t version = header.u32();
    if (version != kDatasetFormatVersion)
      throw IoError(IoErrorKind::kBadVersion,
                    "dataset format version " + std::to_string(version) + ", expected " +
                        std::to_string(kDatasetFormatVersion));
  }
  const uint32_t stored_crc = ByteReader(bytes.data() + bytes.size() - 4, 4).u32();
  const uint32_t actual_crc = crc32(bytes.data() + 8, bytes.size() - 12);
  if (stored_crc != actual_crc)
    throw IoError(IoErrorKind::kBadChecksum, "dataset checksum mismatch");

  ByteReader r(bytes.data() + 8, bytes.size() - 12);
  OfflineDataset d;
  d.meta.env_id = r.string();
  d.meta.n_agents = static_cast<int>(r.u32());
  d.meta.obs_dim = static_cast<int>(r.u32());
  d.meta.act_dim = static_cast<int>(r.u32());
  d.meta.state_dim = static_cast<int>(r.u32());
  d.meta.episode_count = static_cast<int>(r.u32());
  d.meta.seed = r.u64();
  d.meta.tag = r.string();
  if (d.meta.n_agents <= 0 || d.meta.obs_dim <= 0 || d.meta.act_dim <= 0 ||
      d.meta.state_dim <= 0 || d.meta.episode_count < 0)
    throw IoError(IoErrorKind::kMalformed, "dataset metadata has non-positive dimensions");

  const size_t floats_per_transition = static_cast<size_t>(d.meta.state_dim) * 2 +
                                       static_cast<size_t>(d.meta.n_agents) *
                                           (2 * d.meta.obs_dim + d.meta.act_dim);
  const size_t bytes_per_transition = floats_per_transition * 4 + 4 + 1;
  d.episodes.reserve(d.meta.episode_count);
  for (int e = 0; e < d.meta.episode_count; ++e) {
    const uint32_t count = r.u32();
    if (static_cast<size_t>(count) * bytes_per_transition > r.remaining())
      throw IoError(IoErrorKind::kMalformed, "dataset episode length exceeds file size");
    Episode episode;
    episode.transitions.reserve(count);
    for (uint32_t t = 0; t < count; ++t) {
      Transition tr;
      tr.state = get_f32s(r, d.meta.state_dim);
      tr.obs = get_f32s(r, static_cast<size_t>(d.meta.n_agents) * d.meta.obs_dim);
      tr.actions = get_f32s(r, static_cast<size_t>(d.meta.n_agents) * d.meta.act_dim);
      tr.reward = r.f32();
      tr.next_state = get_f32s(r, d.meta.state_dim);
      tr.next_obs = get_f32s(r, static_cast<size_t>(d.meta.n_agents) * d.meta.obs_dim);
      const uint8_t done = r.u8();
      if (done > 1) throw IoError(IoErrorKind::kMalformed, "dataset done flag out of range");
      tr.done = done == 1;
      episode.episode_return += static_cast<double>(tr.reward);
      episode.transitions.push_back(std::move(tr));
    }
    d.episodes.push_back(std::move(episode));
  }
  if (!r.done()) throw IoError(IoErrorKind::kMalformed, "dataset has trailing bytes");
  return d;
}

void save_dataset(const OfflineDataset& dataset, const std::string& path) {
  write_file(path, encode_dataset(dataset));
}

OfflineDataset load_dataset(const std::string& path) { return decode_dataset(read_file(path)); }

std::vector<const Transition*> sample_batch(const OfflineDataset& dataset, int batch_size,
                                            Rng& rng) {
  return sample_batch(dataset, batch_size, [&rng](long n) {
    return static_cast<long>(rng.below(static_cast<uint64_t>(n)));
  });
}

std::vector<const Transition*> sample_batch(const OfflineDataset& dataset, int batch_size,
                                            const std::function<long(long)>& pick_index) {
  if (batch_size < 1) throw ConfigError("sample_batch: batch_size must be at least 1");
  const std::vector<const Transition*> flat = flatten(dataset);
  if (flat.empty()) throw ConfigError("sample_batch: dataset has no transitions");
  std::vector<const Transition*> batch(batch_size);
  const long n = static_cast<long>(flat.size());
  for (int i = 0; i < batch_size; ++i) {
    const long idx = pick_index(n);
    if (idx < 0 || idx >= n) throw ConfigError("sample_batch: index source out of range");
    batch[i] = flat[idx];
  }
  return batch;
}

}  // namespace b3c
