#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace deepsched {

/// Per-TTI decision: for each (cell, RBG, user layer) a chosen UE or none.
/// Invariants: a UE appears at most once per (cell, RBG) across layers, and
/// layers are filled in order (layer l+1 occupied implies layer l occupied).
class AllocationGrid {
 public:
  static constexpr std::int32_t kNone = -1;

  AllocationGrid(int n_cells, int n_rbg, int n_layers)
      : n_cells_(n_cells), n_rbg_(n_rbg), n_layers_(n_layers),
        slot_(static_cast<size_t>(n_cells) * n_rbg * n_layers, kNone) {}

  int n_cells() const { return n_cells_; }
  int n_rbg() const { return n_rbg_; }
  int n_layers() const { return n_layers_; }

  std::int32_t at(int cell, int rbg, int layer) const { return slot_[idx(cell, rbg, layer)]; }
  void assign(int cell, int rbg, int layer, std::int32_t ue) { slot_[idx(cell, rbg, layer)] = ue; }

  bool ue_on_rbg(int cell, int rbg, std::int32_t ue) const {
    for (int l = 0; l < n_layers_; ++l)
      if (at(cell, rbg, l) == ue) return true;
    return false;
  }

  int occupied_layers(int cell, int rbg) const {
    int n = 0;
    for (int l = 0; l < n_layers_; ++l) n += (at(cell, rbg, l) != kNone);
    return n;
  }

  /// UEs scheduled on (cell, rbg) at layers below `layer`.
  std::vector<int> scheduled_below(int cell, int rbg, int layer) const {
    std::vector<int> out;
    for (int l = 0; l < layer && l < n_layers_; ++l)
      if (at(cell, rbg, l) != kNone) out.push_back(at(cell, rbg, l));
    return out;
  }

  /// Number of RBGs currently holding `ue` in `cell` (the d_u feature).
  int rbg_count(int cell, std::int32_t ue) const {
    int n = 0;
    for (int m = 0; m < n_rbg_; ++m) n += ue_on_rbg(cell, m, ue);
    return n;
  }

  /// d_u over completed layer iterations only (layers below `layer`).
  int rbg_count_below(int cell, std::int32_t ue, int layer) const {
    int n = 0;
    for (int m = 0; m < n_rbg_; ++m)
      for (int l = 0; l < layer && l < n_layers_; ++l)
        if (at(cell, m, l) == ue) {
          ++n;
          break;
        }
    return n;
  }

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

 private:
  size_t idx(int cell, int rbg, int layer) const {
    return (static_cast<size_t>(cell) * n_rbg_ + rbg) * n_layers_ + layer;
  }

  int n_cells_, n_rbg_, n_layers_;
  std::vector<std::int32_t> slot_;
};

/// What one executed TTI produced, per cell.
struct TtiOutcome {
  std::vector<Eigen::VectorXd> served_bits;   // [cell](ue)
  std::vector<Eigen::VectorXd> inst_tput;     // [cell](ue), bits/s
  std::vector<Eigen::MatrixXd> layer_rate;    // [cell](rbg, layer), bits/s
  std::vector<Eigen::VectorXi> cosched_count; // [cell](rbg)
};

}  // namespace deepsched
