#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "deepsched/common.hpp"

namespace deepsched {

/// Huber loss, quadratic below k and linear above.
template <class S>
S huber(S x, S k = S(1)) {
  const S ax = std::abs(x);
  return ax < k ? S(0.5) * x * x : k * (ax - S(0.5) * k);
}

template <class S>
S huber_grad(S x, S k = S(1)) {
  const S ax = std::abs(x);
  return ax < k ? x : (x < S(0) ? -k : k);
}

/// Asymmetric quantile Huber rho_tau^k(x) = |tau - 1{x<0}| * L(x).
template <class S>
S quantile_huber(S x, S tau, S k = S(1)) {
  const S weight = std::abs(tau - (x < S(0) ? S(1) : S(0)));
  return weight * huber(x, k);
}

template <class S>
S quantile_huber_grad(S x, S tau, S k = S(1)) {
  const S weight = std::abs(tau - (x < S(0) ? S(1) : S(0)));
  return weight * huber_grad(x, k);
}

/// Quantile levels tau_n = n/N, n = 1..N.
template <class S>
std::vector<S> quantile_levels(int n_quantiles) {
  std::vector<S> taus(n_quantiles);
  for (int n = 1; n <= n_quantiles; ++n) taus[n - 1] = static_cast<S>(n) / n_quantiles;
  return taus;
}

/// Jensen-Shannon divergence with base-2 logarithms: bounded in [0,1], zero
/// iff the inputs match, finite for zero probabilities.
template <class S>
S jsd_base2(const VecX<S>& p, const VecX<S>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("jsd_base2: size mismatch");
  const double inv_ln2 = 1.0 / std::log(2.0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p(i), qi = q(i);
    const double mi = 0.5 * (pi + qi);
    if (pi > 0.0) acc += 0.5 * pi * std::log(pi / mi) * inv_ln2;
    if (qi > 0.0) acc += 0.5 * qi * std::log(qi / mi) * inv_ln2;
  }
  return static_cast<S>(acc);
}

/// d JSD / d p_i = log2(p_i / m_i) / 2 (the mixture terms cancel).
template <class S>
VecX<S> jsd_base2_grad_p(const VecX<S>& p, const VecX<S>& q) {
  const double inv_ln2 = 1.0 / std::log(2.0);
  VecX<S> g = VecX<S>::Zero(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p(i), qi = q(i);
    const double mi = 0.5 * (pi + qi);
    if (pi > 0.0 && mi > 0.0) g(i) = static_cast<S>(0.5 * std::log(pi / mi) * inv_ln2);
  }
  return g;
}

/// Chain rule through a masked softmax branch: given dL/dprob, returns
/// dL/dlogit. Invalid entries carry exactly zero gradient.
template <class S>
void masked_softmax_backward(const VecX<S>& probs, const ActionMask& mask, int offset,
                             int branch_size, const VecX<S>& dprob, VecX<S>& dlogits) {
  S inner = S(0);
  for (int i = 0; i < branch_size; ++i)
    if (mask[offset + i]) inner += probs(offset + i) * dprob(offset + i);
  for (int i = 0; i < branch_size; ++i) {
    if (!mask[offset + i]) continue;
    dlogits(offset + i) += probs(offset + i) * (dprob(offset + i) - inner);
  }
}

/// Entropy of one masked branch (natural log) and its logit gradient.
template <class S>
S branch_entropy(const VecX<S>& probs, const ActionMask& mask, int offset, int branch_size) {
  S h = S(0);
  for (int i = 0; i < branch_size; ++i) {
    const S p = probs(offset + i);
    if (mask[offset + i] && p > S(0)) h -= p * std::log(p);
  }
  return h;
}

template <class S>
void branch_entropy_backward(const VecX<S>& probs, const ActionMask& mask, int offset,
                             int branch_size, S upstream, VecX<S>& dlogits) {
  const S h = branch_entropy(probs, mask, offset, branch_size);
  for (int i = 0; i < branch_size; ++i) {
    const S p = probs(offset + i);
    if (!mask[offset + i] || p <= S(0)) continue;
    dlogits(offset + i) += upstream * (-p * (std::log(p) + h));
  }
}

/// PPO clipped surrogate for one transition: min(rho*A, clip(rho)*A) and the
/// derivative with respect to log pi_new (zero when the clip binds).
template <class S>
struct ClippedSurrogate {
  S value;
  S dlogp;
};

template <class S>
ClippedSurrogate<S> clipped_surrogate(S ratio, S advantage, S clip_eps) {
  const S clipped = std::clamp(ratio, S(1) - clip_eps, S(1) + clip_eps);
  const S unclipped_term = ratio * advantage;
  const S clipped_term = clipped * advantage;
  if (unclipped_term <= clipped_term) return {unclipped_term, ratio * advantage};
  const bool saturated = (ratio < S(1) - clip_eps) || (ratio > S(1) + clip_eps);
  return {clipped_term, saturated ? S(0) : ratio * advantage};
}

/// Critic loss contribution of one tuple's (branch, action) quantile slice.
/// Accumulates d loss / d q_n into `dq` and appends raw TD errors. `scale`
/// carries the importance weight over b*N. SACD mode (quantile=false) is half
/// squared error on the same slice.
template <class S>
S critic_slice_loss(std::span<const S> q, S target, std::span<const S> taus, S k, S scale,
                    bool quantile, std::span<S> dq, std::vector<double>* td_out = nullptr) {
  S loss = S(0);
  for (size_t n_i = 0; n_i < q.size(); ++n_i) {
    const S x = q[n_i] - target;
    if (td_out) td_out->push_back(static_cast<double>(x));
    if (quantile) {
      loss += scale * quantile_huber(x, taus[n_i], k);
      dq[n_i] += scale * quantile_huber_grad(x, taus[n_i], k);
    } else {
      loss += scale * S(0.5) * x * x;
      dq[n_i] += scale * x;
    }
  }
  return loss;
}

/// Policy objective of one tuple's branch: weight * sum_a pi_a (alpha log pi_a
/// - q_min_a). Accumulates the logit gradient; the gradient flows through all
/// valid action probabilities.
template <class S>
S sac_policy_objective(const VecX<S>& probs, const ActionMask& full_mask, int offset,
                       int branch_size, const VecX<S>& q_min, S alpha, S weight,
                       VecX<S>& dlogits) {
  S loss = S(0);
  VecX<S> dprob = VecX<S>::Zero(probs.size());
  for (int a = 0; a < branch_size; ++a) {
    if (!full_mask[offset + a]) continue;
    const S p = probs(offset + a);
    if (p <= S(0)) continue;
    const S logp = std::log(p);
    loss += weight * p * (alpha * logp - q_min(a));
    dprob(offset + a) = weight * (alpha * (logp + S(1)) - q_min(a));
  }
  masked_softmax_backward(probs, full_mask, offset, branch_size, dprob, dlogits);
  return loss;
}

/// Entropy-coefficient gradient contribution of one tuple's branch, per the
/// action-averaged form; negative when entropy sits below its target so that
/// a descent step raises alpha.
template <class S>
S alpha_gradient(const VecX<S>& probs, const ActionMask& full_mask, int offset, int branch_size,
                 int n_valid, S h_bar) {
  S inner = S(0);
  for (int a = 0; a < branch_size; ++a) {
    const S p = probs(offset + a);
    if (!full_mask[offset + a] || p <= S(0)) continue;
    inner += p * (std::log(p) + h_bar);
  }
  return -inner / static_cast<S>(n_valid);
}

}  // namespace deepsched
