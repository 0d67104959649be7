#pragma once

// Central finite-difference gradient checks for every trained loss, composed
// from the production loss kernels instantiated at double precision.

#include <cmath>
#include <functional>
#include <vector>

#include "deepsched/nn/dense_net.hpp"
#include "deepsched/rl/losses.hpp"

namespace gradcheck {

using deepsched::ActionMask;
using deepsched::Activation;
using deepsched::DenseNet;
using deepsched::Rng;
using deepsched::VecX;

using NetD = DenseNet<double>;
using VecD = VecX<double>;

inline std::vector<double> flat_grads(NetD& net) {
  std::vector<double> out;
  for (const auto& g : net.grads()) {
    out.insert(out.end(), g.w.data(), g.w.data() + g.w.size());
    out.insert(out.end(), g.b.data(), g.b.data() + g.b.size());
  }
  return out;
}

/// Max relative error between analytic grads and central differences at step h.
inline double fd_max_rel_error(NetD& net, const std::function<double()>& loss_fn,
                               const std::vector<double>& analytic, double h = 1e-5) {
  const std::vector<double> params = net.get_params();
  double worst = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    std::vector<double> p = params;
    p[i] = params[i] + h;
    net.set_params(p);
    const double lp = loss_fn();
    p[i] = params[i] - h;
    net.set_params(p);
    const double lm = loss_fn();
    const double numeric = (lp - lm) / (2.0 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  net.set_params(params);
  return worst;
}

inline VecD random_vec(int n, Rng& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  VecD x(n);
  for (int i = 0; i < n; ++i) x(i) = unif(rng);
  return x;
}

inline ActionMask random_mask(int n, Rng& rng) {
  std::uniform_int_distribution<int> bit(0, 1);
  ActionMask m(n, 0);
  if (n <= 0) return m;
  for (int i = 0; i + 1 < n; ++i) m[i] = static_cast<std::uint8_t>(bit(rng));
  m[n - 1] = 1; // no-allocation stays valid
  return m;
}

// ---- Scenario builders: each returns the fd max relative error. ----

/// Critic value MSE: L = 1/2 (V(s) - J)^2.
inline double check_value_loss(std::uint64_t seed) {
  Rng rng(seed);
  NetD net({6, 8, 1}, {1}, rng);
  const VecD x = random_vec(6, rng);
  const double target = 0.7;

  auto loss = [&] {
    return 0.5 * (net.forward(x)(0) - target) * (net.forward(x)(0) - target);
  };
  net.zero_grads();
  const double v = net.forward(x)(0);
  VecD up(1);
  up(0) = v - target;
  net.backward(up);
  return fd_max_rel_error(net, loss, flat_grads(net));
}

/// PPO clipped surrogate at an interior point (ratio = 1 at theta_0), two
/// branches, through the masked softmax product policy.
inline double check_clipped_surrogate(std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<int> branches{4, 4};
  NetD net({5, 8, 8}, branches, rng);
  const VecD x = random_vec(5, rng);
  ActionMask mask(8, 1);
  mask[2] = 0;
  mask[5] = 0;
  const std::vector<int> actions{1, 3};
  const double advantage = 0.8;
  const double clip = 0.2;

  auto logp_of = [&]() {
    const VecD probs = deepsched::masked_softmax(net.forward(x), mask, branches);
    return std::log(probs(actions[0])) + std::log(probs(4 + actions[1]));
  };
  const double logp_old = logp_of();

  auto loss = [&] {
    const double ratio = std::exp(logp_of() - logp_old);
    return deepsched::clipped_surrogate(ratio, advantage, clip).value;
  };

  net.zero_grads();
  const VecD probs = deepsched::masked_softmax(net.forward(x), mask, branches);
  const double ratio = std::exp(logp_of() - logp_old); // 1: interior
  const auto surr = deepsched::clipped_surrogate(ratio, advantage, clip);
  VecD dlogits = VecD::Zero(8);
  for (int b = 0; b < 2; ++b) {
    const int off = 4 * b;
    for (int k = 0; k < 4; ++k) {
      if (!mask[off + k]) continue;
      const double onehot = (k == actions[b]) ? 1.0 : 0.0;
      dlogits(off + k) += surr.dlogp * (onehot - probs(off + k));
    }
  }
  net.backward(dlogits);
  return fd_max_rel_error(net, loss, flat_grads(net));
}

/// JSD imitation loss of one branch against a smoothed expert one-hot.
inline double check_jsd_loss(std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<int> branches{5};
  NetD net({4, 8, 5}, branches, rng);
  const VecD x = random_vec(4, rng);
  ActionMask mask(5, 1);
  mask[1] = 0;
  VecD expert = VecD::Constant(5, 1e-3 / 5);
  expert(3) += 1.0 - 1e-3;

  auto loss = [&] {
    const VecD probs = deepsched::masked_softmax(net.forward(x), mask, branches);
    return deepsched::jsd_base2(probs, expert);
  };
  net.zero_grads();
  const VecD probs = deepsched::masked_softmax(net.forward(x), mask, branches);
  const VecD dprob = deepsched::jsd_base2_grad_p(probs, expert);
  VecD dlogits = VecD::Zero(5);
  deepsched::masked_softmax_backward(probs, mask, 0, 5, dprob, dlogits);
  net.backward(dlogits);
  return fd_max_rel_error(net, loss, flat_grads(net));
}

/// Quantile Huber critic loss on one (branch, action) slice, away from kinks.
inline double check_quantile_huber_loss(std::uint64_t seed) {
  Rng rng(seed);
  const int n_q = 4;
  NetD net({5, 8, 3 * n_q}, {3 * n_q}, rng);
  const VecD x = random_vec(5, rng);
  const int action = 1;
  const double target = 0.37;
  const double w = 0.8;
  const auto taus = deepsched::quantile_levels<double>(n_q);

  // Keep every TD error clear of the |x|=0 and |x|=k kinks.
  {
    const VecD out = net.forward(x);
    for (int n = 0; n < n_q; ++n) {
      const double td = out(action * n_q + n) - target;
      if (std::abs(td) < 5e-2 || std::abs(std::abs(td) - 1.0) < 5e-2)
        net.layers().back().b(action * n_q + n) += 0.1;
    }
  }

  auto loss = [&] {
    const VecD out = net.forward(x);
    double acc = 0.0;
    for (int n = 0; n < n_q; ++n)
      acc += w * deepsched::quantile_huber(out(action * n_q + n) - target, taus[n]) / n_q;
    return acc;
  };
  net.zero_grads();
  const VecD out = net.forward(x);
  VecD dlogits = VecD::Zero(3 * n_q);
  std::vector<double> q(n_q), dq(n_q, 0.0);
  for (int n = 0; n < n_q; ++n) q[n] = out(action * n_q + n);
  deepsched::critic_slice_loss<double>(q, target, taus, 1.0, w / n_q, true, dq);
  for (int n = 0; n < n_q; ++n) dlogits(action * n_q + n) = dq[n];
  net.backward(dlogits);
  return fd_max_rel_error(net, loss, flat_grads(net));
}

/// SACD squared-error critic loss on a slice (the declared loss switch).
inline double check_mse_critic_loss(std::uint64_t seed) {
  Rng rng(seed);
  NetD net({5, 8, 3}, {3}, rng);
  const VecD x = random_vec(5, rng);
  const int action = 2;
  const double target = -0.4, w = 1.3;

  auto loss = [&] {
    const double q = net.forward(x)(action);
    return w * 0.5 * (q - target) * (q - target);
  };
  net.zero_grads();
  const double q0 = net.forward(x)(action);
  VecD dlogits = VecD::Zero(3);
  dlogits(action) = w * (q0 - target);
  net.backward(dlogits);
  return fd_max_rel_error(net, loss, flat_grads(net));
}

/// Policy objective J = pi . (alpha log pi - q_min) through the masked softmax.
inline double check_policy_objective(std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<int> branches{5};
  NetD net({6, 8, 5}, branches, rng);
  const VecD x = random_vec(6, rng);
  ActionMask mask(5, 1);
  mask[0] = 0;
  const VecD q_min = random_vec(5, rng, -1.0, 1.0);
  const double alpha = 0.3, w = 0.9;

  auto loss = [&] {
    const VecD probs = deepsched::masked_softmax(net.forward(x), mask, branches);
    double acc = 0.0;
    for (int a = 0; a < 5; ++a) {
      if (!mask[a] || probs(a) <= 0.0) continue;
      acc += w * probs(a) * (alpha * std::log(probs(a)) - q_min(a));
    }
    return acc;
  };
  net.zero_grads();
  const VecD probs = deepsched::masked_softmax(net.forward(x), mask, branches);
  VecD dlogits = VecD::Zero(5);
  deepsched::sac_policy_objective<double>(probs, mask, 0, 5, q_min, alpha, w, dlogits);
  net.backward(dlogits);
  return fd_max_rel_error(net, loss, flat_grads(net));
}

/// Entropy bonus (as used in L_PPO with its negative coefficient).
inline double check_entropy_loss(std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<int> branches{4, 4};
  NetD net({5, 8, 8}, branches, rng);
  const VecD x = random_vec(5, rng);
  ActionMask mask(8, 1);
  mask[1] = 0;
  const double xi = 0.01;

  auto loss = [&] {
    const VecD probs = deepsched::masked_softmax(net.forward(x), mask, branches);
    double h = 0.0;
    for (int b = 0; b < 2; ++b) h += deepsched::branch_entropy(probs, mask, 4 * b, 4);
    return -xi * h;
  };
  net.zero_grads();
  const VecD probs = deepsched::masked_softmax(net.forward(x), mask, branches);
  VecD dlogits = VecD::Zero(8);
  for (int b = 0; b < 2; ++b)
    deepsched::branch_entropy_backward(probs, mask, 4 * b, 4, -xi, dlogits);
  net.backward(dlogits);
  return fd_max_rel_error(net, loss, flat_grads(net));
}

struct NamedCheck {
  const char* name;
  double (*run)(std::uint64_t);
};

inline const std::vector<NamedCheck>& all_checks() {
  static const std::vector<NamedCheck> checks{
      {"value_mse", check_value_loss},
      {"clipped_surrogate", check_clipped_surrogate},
      {"jsd", check_jsd_loss},
      {"quantile_huber", check_quantile_huber_loss},
      {"mse_critic", check_mse_critic_loss},
      {"policy_objective", check_policy_objective},
      {"entropy", check_entropy_loss},
  };
  return checks;
}

}  // namespace gradcheck
