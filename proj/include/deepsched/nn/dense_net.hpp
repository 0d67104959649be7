#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "deepsched/common.hpp"

namespace deepsched {

enum class Activation : std::uint8_t { relu = 0, linear = 1 };

/// Small fully connected network with manual reverse-mode gradients.
/// Hidden layers are ReLU, the output layer is linear. The output may be
/// split into branches (the 1L multi-branch head); branch sizes must sum to
/// the output size. Forward passes reuse preallocated buffers.
template <class S>
class DenseNet {
 public:
  struct Layer {
    MatX<S> w; // out x in
    VecX<S> b;
    Activation act = Activation::relu;
  };
  struct LayerGrad {
    MatX<S> w;
    VecX<S> b;
  };

  DenseNet() = default;

  /// layer_sizes = {input, hidden..., output}; He-uniform weights, zero biases.
  DenseNet(const std::vector<int>& layer_sizes, std::vector<int> branch_sizes, Rng& rng)
      : branch_sizes_(std::move(branch_sizes)) {
    if (layer_sizes.size() < 2) throw std::invalid_argument("DenseNet: need at least two sizes");
    int branch_total = 0;
    for (int b : branch_sizes_) branch_total += b;
    if (branch_sizes_.empty()) branch_sizes_ = {layer_sizes.back()};
    else if (branch_total != layer_sizes.back())
      throw std::invalid_argument("DenseNet: branch sizes do not sum to output size");

    const size_t n = layer_sizes.size() - 1;
    layers_.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const int in = layer_sizes[i];
      const int out = layer_sizes[i + 1];
      Layer& layer = layers_[i];
      layer.act = (i + 1 == n) ? Activation::linear : Activation::relu;
      layer.w.resize(out, in);
      layer.b = VecX<S>::Zero(out);
      const S limit = static_cast<S>(std::sqrt(6.0 / in));
      std::uniform_real_distribution<double> unif(-static_cast<double>(limit),
                                                  static_cast<double>(limit));
      for (int r = 0; r < out; ++r)
        for (int c = 0; c < in; ++c) layer.w(r, c) = static_cast<S>(unif(rng));
    }
    allocate_workspace();
  }

  int input_size() const { return static_cast<int>(layers_.front().w.cols()); }
  int output_size() const { return static_cast<int>(layers_.back().w.rows()); }
  const std::vector<int>& branch_sizes() const { return branch_sizes_; }
  void set_branch_sizes(std::vector<int> b) { branch_sizes_ = std::move(b); }
  int n_layers() const { return static_cast<int>(layers_.size()); }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<LayerGrad>& grads() { return grads_; }

  /// Affine/activation chain; returns the final pre-activation (linear output).
  /// Allocation-free: writes into buffers sized at construction.
  const VecX<S>& forward(const VecX<S>& x) {
    if (x.size() != layers_.front().w.cols())
      throw std::invalid_argument("DenseNet::forward: input size mismatch");
    act_[0] = x;
    for (size_t i = 0; i < layers_.size(); ++i) {
      pre_[i].noalias() = layers_[i].w * act_[i];
      pre_[i] += layers_[i].b;
      if (layers_[i].act == Activation::relu)
        act_[i + 1] = pre_[i].cwiseMax(S(0));
      else
        act_[i + 1] = pre_[i];
    }
    has_forward_ = true;
    return pre_.back();
  }

  void zero_grads() {
    grads_.resize(layers_.size());
    for (size_t i = 0; i < layers_.size(); ++i) {
      grads_[i].w = MatX<S>::Zero(layers_[i].w.rows(), layers_[i].w.cols());
      grads_[i].b = VecX<S>::Zero(layers_[i].b.size());
    }
  }

  /// Accumulates exact reverse-mode gradients of the cached forward pass into
  /// grads(). Throws when no forward pass has been cached.
  void backward(const VecX<S>& dloss_dout) {
    if (!has_forward_) throw std::logic_error("DenseNet::backward: no cached forward pass");
    if (grads_.size() != layers_.size()) zero_grads();
    VecX<S> delta = dloss_dout;
    for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
      if (layers_[i].act == Activation::relu)
        delta = (pre_[i].array() > S(0)).select(delta, S(0));
      grads_[i].w.noalias() += delta * act_[i].transpose();
      grads_[i].b += delta;
      if (i > 0) delta = layers_[i].w.transpose() * delta;
    }
  }

  size_t param_count() const {
    size_t n = 0;
    for (const auto& l : layers_) n += l.w.size() + l.b.size();
    return n;
  }

  std::vector<S> get_params() const {
    std::vector<S> out;
    out.reserve(param_count());
    for (const auto& l : layers_) {
      out.insert(out.end(), l.w.data(), l.w.data() + l.w.size());
      out.insert(out.end(), l.b.data(), l.b.data() + l.b.size());
    }
    return out;
  }

  void set_params(std::span<const S> p) {
    if (p.size() != param_count()) throw std::invalid_argument("DenseNet::set_params: size");
    size_t k = 0;
    for (auto& l : layers_) {
      std::copy(p.begin() + k, p.begin() + k + l.w.size(), l.w.data());
      k += l.w.size();
      std::copy(p.begin() + k, p.begin() + k + l.b.size(), l.b.data());
      k += l.b.size();
    }
  }

  void allocate_workspace() {
    act_.resize(layers_.size() + 1);
    pre_.resize(layers_.size());
    act_[0].resize(layers_.front().w.cols());
    for (size_t i = 0; i < layers_.size(); ++i) {
      pre_[i].resize(layers_[i].w.rows());
      act_[i + 1].resize(layers_[i].w.rows());
    }
    has_forward_ = false;
  }

 private:
  std::vector<Layer> layers_;
  std::vector<LayerGrad> grads_;
  std::vector<VecX<S>> act_; // act_[0] = input, act_[i+1] = post-activation of layer i
  std::vector<VecX<S>> pre_; // pre-activation of layer i
  std::vector<int> branch_sizes_;
  bool has_forward_ = false;
};

/// Per-branch softmax with invalid actions at exactly zero and valid entries
/// renormalized. Throws when a branch has no valid action.
template <class S>
VecX<S> masked_softmax(const VecX<S>& logits, const ActionMask& mask,
                       std::span<const int> branch_sizes) {
  if (static_cast<size_t>(logits.size()) != mask.size())
    throw std::invalid_argument("masked_softmax: mask length mismatch");
  VecX<S> probs = VecX<S>::Zero(logits.size());
  int off = 0;
  for (int bs : branch_sizes) {
    S max_logit = std::numeric_limits<S>::lowest();
    bool any = false;
    for (int i = off; i < off + bs; ++i) {
      if (!mask[i]) continue;
      any = true;
      max_logit = std::max(max_logit, logits(i));
    }
    if (!any) throw std::invalid_argument("masked_softmax: branch with no valid action");
    S total = S(0);
    for (int i = off; i < off + bs; ++i) {
      if (!mask[i]) continue;
      probs(i) = std::exp(logits(i) - max_logit);
      total += probs(i);
    }
    for (int i = off; i < off + bs; ++i) probs(i) /= total;
    off += bs;
  }
  return probs;
}

/// Inverse-CDF sample over one branch of a masked distribution.
template <class S>
int sample_branch(const VecX<S>& probs, const ActionMask& mask, int offset, int branch_size,
                  Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double cum = 0.0;
  int last_valid = -1;
  for (int i = 0; i < branch_size; ++i) {
    if (!mask[offset + i]) continue;
    last_valid = i;
    cum += static_cast<double>(probs(offset + i));
    if (u < cum) return i;
  }
  return last_valid;
}

template <class S>
int argmax_branch(const VecX<S>& probs, const ActionMask& mask, int offset, int branch_size) {
  int best = -1;
  S best_p = S(-1);
  for (int i = 0; i < branch_size; ++i) {
    if (!mask[offset + i]) continue;
    if (probs(offset + i) > best_p) {
      best_p = probs(offset + i);
      best = i;
    }
  }
  return best;
}

}  // namespace deepsched
