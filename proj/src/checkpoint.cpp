#include "b3c/checkpoint.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "b3c/bytes.hpp"
#include "b3c/errors.hpp"

namespace b3c {
namespace {

constexpr char kMagic[4] = {'B', '3', 'C', 'P'};

struct Block {
  std::string name;
  std::vector<double> values;
};

void put_block(ByteWriter& w, const std::string& name, const std::vector<double>& values) {
  w.put_string(name);
  w.put_u64(values.size());
  for (double v : values) w.put_f64(v);
}

int block_int(const Block& b, size_t i) {
  const double v = b.values.at(i);
  const int n = static_cast<int>(v);
  if (static_cast<double>(n) != v)
    throw IoError(IoErrorKind::kMalformed, "checkpoint: non-integer value in block " + b.name);
  return n;
}

}  // namespace

std::string encode_policies(const PolicySet& policies) {
  std::vector<Block> blocks;
  blocks.push_back({"policy_count", {static_cast<double>(policies.nets.size())}});
  for (size_t i = 0; i < policies.nets.size(); ++i) {
    const Mlp& net = policies.nets[i];
    const std::string prefix = "policy" + std::to_string(i) + "/";
    Block dims{prefix + "dims", {}};
    for (int d : net.dims) dims.values.push_back(static_cast<double>(d));
    blocks.push_back(std::move(dims));
    blocks.push_back({prefix + "acts",
                      {static_cast<double>(static_cast<int>(net.hidden_act)),
                       static_cast<double>(static_cast<int>(net.output_act))}});
    for (int l = 0; l < net.layer_count(); ++l) {
      blocks.push_back({prefix + "w" + std::to_string(l), net.w[l].raw()});
      blocks.push_back({prefix + "b" + std::to_string(l), net.b[l]});
    }
  }

  ByteWriter w;
  w.put_bytes(kMagic, 4);
  w.put_u32(kCheckpointFormatVersion);
  w.put_u32(static_cast<uint32_t>(blocks.size()));
  for (const Block& b : blocks) put_block(w, b.name, b.values);
  const uint32_t crc = crc32(w.bytes().data() + 8, w.bytes().size() - 8);
  w.put_u32(crc);
  return w.bytes();
}

PolicySet decode_policies(const std::string& bytes) {
  if (bytes.size() < 12) throw IoError(IoErrorKind::kTruncated, "checkpoint file too short");
  if (!std::equal(kMagic, kMagic + 4, bytes.data()))
    throw IoError(IoErrorKind::kBadMagic, "not a checkpoint file (bad magic)");
  {
    ByteReader header(bytes.data() + 4, 4);
    const uint32_t version = header.u32();
    if (version != kCheckpointFormatVersion)
      throw IoError(IoErrorKind::kBadVersion,
                    "checkpoint format version " + std::to_string(version) + ", expected " +
                        std::to_string(kCheckpointFormatVersion));
  }
  const uint32_t stored_crc = ByteReader(bytes.data() + bytes.size() - 4, 4).u32();
  if (stored_crc != crc32(bytes.data() + 8, bytes.size() - 12))
    throw IoError(IoErrorKind::kBadChecksum, "checkpoint checksum mismatch");

  ByteReader r(bytes.data() + 8, bytes.size() - 12);
  const uint32_t block_count = r.u32();
  std::map<std::string, Block> blocks;
  for (uint32_t k = 0; k < block_count; ++k) {
    Block b;
    b.name = r.string();
    const uint64_t n = r.u64();
    if (n * 8 > r.remaining())
      throw IoError(IoErrorKind::kMalformed, "checkpoint block length exceeds file size");
    b.values.resize(n);
    for (uint64_t i = 0; i < n; ++i) b.values[i] = r.f64();
    const std::string name = b.name;
    if (!blocks.emplace(name, std::move(b)).second)
      throw IoError(IoErrorKind::kMalformed, "checkpoint has duplicate block " + name);
  }
  if (!r.done()) throw IoError(IoErrorKind::kMalformed, "checkpoint has trailing bytes");

  auto take = [&blocks](const std::string& name) -> Block {
    auto it = blocks.find(name);
    if (it == blocks.end())
      throw IoError(IoErrorKind::kMalformed, "checkpoint missing block " + name);
    Block b = std::move(it->second);
    blocks.erase(it);
    return b;
  };

  const Block count_block = take("policy_count");
  if (count_block.values.size() != 1)
    throw IoError(IoErrorKind::kMalformed, "checkpoint policy_count must hold one value");
  const int n_policies = block_int(count_block, 0);
  if (n_policies < 1) throw IoError(IoErrorKind::kMalformed, "checkpoint has no policies");

  PolicySet policies;
  for (int i = 0; i < n_policies; ++i) {
    const std::string prefix = "policy" + std::to_string(i) + "/";
    const Block dims = take(prefix + "dims");
    if (dims.values.size() < 2)
      throw IoError(IoErrorKind::kMalformed, "checkpoint policy needs at least two dims");
    Mlp net;
    for (size_t d = 0; d < dims.values.size(); ++d) {
      const int v = block_int(dims, d);
      if (v < 1) throw IoError(IoErrorKind::kMalformed, "checkpoint policy dim must be positive");
      net.dims.push_back(v);
    }
    const Block acts = take(prefix + "acts");
    if (acts.values.size() != 2)
      throw IoError(IoErrorKind::kMalformed, "checkpoint acts block must hold two values");
    const int hidden = block_int(acts, 0);
    const int output = block_int(acts, 1);
    if (hidden < 0 || hidden > 2 || output < 0 || output > 2)
      throw IoError(IoErrorKind::kMalformed, "checkpoint activation code out of range");
    net.hidden_act = static_cast<Act>(hidden);
    net.output_act = static_cast<Act>(output);
    for (size_t l = 0; l + 1 < net.dims.size(); ++l) {
      Block wb = take(prefix + "w" + std::to_string(l));
      Block bb = take(prefix + "b" + std::to_string(l));
      const size_t rows = static_cast<size_t>(net.dims[l]);
      const size_t cols = static_cast<size_t>(net.dims[l + 1]);
      if (wb.values.size() != rows * cols || bb.values.size() != cols)
        throw IoError(IoErrorKind::kMalformed, "checkpoint layer block size mismatch");
      Matrix m(static_cast<int>(rows), static_cast<int>(cols));
      std::copy(wb.values.begin(), wb.values.end(), m.data());
      net.w.push_back(std::move(m));
      net.b.push_back(std::move(bb.values));
    }
    policies.nets.push_back(std::move(net));
  }
  if (!blocks.empty())
    throw IoError(IoErrorKind::kMalformed,
                  "checkpoint has unrecognized block " + blocks.begin()->first);
  return policies;
}

void save_policies(const PolicySet& policies, const std::string& path) {
  write_file(path, encode_policies(policies));
}

PolicySet load_policies(const std::string& path) { return decode_policies(read_file(path)); }

}  // namespace b3c
