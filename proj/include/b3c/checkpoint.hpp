#pragma once

#include <string>

#include "b3c/policy.hpp"

namespace b3c {

// Policy checkpoint container: magic "B3CP", version, named parameter blocks
// (length-prefixed name, u64 count, packed little-endian 64-bit reals),
// trailing CRC-32. Self-describing: topology and activations are stored as
// blocks, so load reconstructs the nets without outside configuration.
void save_policies(const PolicySet& policies, const std::string& path);
PolicySet load_policies(const std::string& path);
std::string encode_policies(const PolicySet& policies);
PolicySet decode_policies(const std::string& bytes);

inline constexpr uint32_t kCheckpointFormatVersion = 1;

}  // namespace b3c
