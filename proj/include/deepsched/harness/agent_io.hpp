#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "deepsched/nn/adam.hpp"
#include "deepsched/nn/checkpoint.hpp"

namespace deepsched {

/// Agent checkpoint: algo/arch tags, the dims the nets were built for, named
/// network blobs, named scalars (entropy coefficient, counters) and named
/// optimizer states.
struct AgentCheckpoint {
  std::string algo; // ppo | sacd | dsacd
  std::string arch; // 1l | 2l
  int max_candidates = 0;
  int n_rbg = 0;
  int max_layers = 0;
  std::map<std::string, std::vector<std::uint8_t>> nets; // serialize() blobs
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<std::uint8_t>> optimizers;
};

std::vector<std::uint8_t> serialize_adam(const AdamState<float>& opt);
AdamState<float> deserialize_adam(const std::vector<std::uint8_t>& bytes,
                                  const DenseNet<float>& shape_ref, float lr);

void save_agent_checkpoint(const AgentCheckpoint& ckpt, const std::string& path);
AgentCheckpoint load_agent_checkpoint(const std::string& path);

}  // namespace deepsched
