#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepsched/nn/dense_net.hpp"

namespace deepsched {

/// Versioned binary image of a float network: magic, format version,
/// architecture descriptor (layer sizes, activations, branch layout) and the
/// raw little-endian float32 parameter block.
std::vector<std::uint8_t> serialize(const DenseNet<float>& net);

/// Exact inverse of serialize. Throws std::runtime_error on bad magic,
/// unsupported version or truncated payloads.
DenseNet<float> deserialize(const std::vector<std::uint8_t>& bytes);

void save_net(const DenseNet<float>& net, const std::string& path);
DenseNet<float> load_net(const std::string& path);

}  // namespace deepsched
