#pragma once

#include <cmath>

#include "deepsched/nn/dense_net.hpp"

namespace deepsched {

template <class S>
struct AdamState {
  std::vector<MatX<S>> mw, vw;
  std::vector<VecX<S>> mb, vb;
  long long step = 0;
  S lr = S(1e-4);
  S beta1 = S(0.9);
  S beta2 = S(0.999);
  S eps = S(1e-8);

  AdamState() = default;
  AdamState(const DenseNet<S>& net, S learning_rate) { init(net, learning_rate); }

  void init(const DenseNet<S>& net, S learning_rate) {
    lr = learning_rate;
    step = 0;
    mw.clear(); vw.clear(); mb.clear(); vb.clear();
    for (const auto& l : net.layers()) {
      mw.push_back(MatX<S>::Zero(l.w.rows(), l.w.cols()));
      vw.push_back(MatX<S>::Zero(l.w.rows(), l.w.cols()));
      mb.push_back(VecX<S>::Zero(l.b.size()));
      vb.push_back(VecX<S>::Zero(l.b.size()));
    }
  }
};

/// Bias-corrected Adam step applied to net parameters from net.grads().
template <class S>
void adam_update(DenseNet<S>& net, AdamState<S>& opt) {
  auto& layers = net.layers();
  auto& grads = net.grads();
  if (grads.size() != layers.size() || opt.mw.size() != layers.size())
    throw std::invalid_argument("adam_update: shape mismatch");
  opt.step += 1;
  const S bc1 = S(1) - static_cast<S>(std::pow(static_cast<double>(opt.beta1), opt.step));
  const S bc2 = S(1) - static_cast<S>(std::pow(static_cast<double>(opt.beta2), opt.step));
  for (size_t i = 0; i < layers.size(); ++i) {
    if (grads[i].w.rows() != layers[i].w.rows() || grads[i].w.cols() != layers[i].w.cols())
      throw std::invalid_argument("adam_update: gradient shape mismatch");
    opt.mw[i] = opt.beta1 * opt.mw[i] + (S(1) - opt.beta1) * grads[i].w;
    opt.vw[i] = opt.beta2 * opt.vw[i].array() + (S(1) - opt.beta2) * grads[i].w.array().square();
    layers[i].w.array() -=
        opt.lr * (opt.mw[i].array() / bc1) / ((opt.vw[i].array() / bc2).sqrt() + opt.eps);
    opt.mb[i] = opt.beta1 * opt.mb[i] + (S(1) - opt.beta1) * grads[i].b;
    opt.vb[i] = opt.beta2 * opt.vb[i].array() + (S(1) - opt.beta2) * grads[i].b.array().square();
    layers[i].b.array() -=
        opt.lr * (opt.mb[i].array() / bc1) / ((opt.vb[i].array() / bc2).sqrt() + opt.eps);
  }
}

/// theta_target <- tau * theta_online + (1 - tau) * theta_target, elementwise.
template <class S>
void soft_update(DenseNet<S>& target, const DenseNet<S>& online, S tau) {
  auto& tl = target.layers();
  const auto& ol = online.layers();
  if (tl.size() != ol.size()) throw std::invalid_argument("soft_update: layer count mismatch");
  for (size_t i = 0; i < tl.size(); ++i) {
    if (tl[i].w.rows() != ol[i].w.rows() || tl[i].w.cols() != ol[i].w.cols())
      throw std::invalid_argument("soft_update: shape mismatch");
    tl[i].w = tau * ol[i].w + (S(1) - tau) * tl[i].w;
    tl[i].b = tau * ol[i].b + (S(1) - tau) * tl[i].b;
  }
}

}  // namespace deepsched
