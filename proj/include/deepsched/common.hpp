#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace deepsched {

using Rng = std::mt19937_64;

template <class Scalar>
using VecX = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <class Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VecXf = VecX<float>;
using VecXd = VecX<double>;
using MatXf = MatX<float>;
using MatXd = MatX<double>;
using MatXcd = Eigen::MatrixXcd;

/// Per-branch action validity; one flag per action, last action is no-allocation.
using ActionMask = std::vector<std::uint8_t>;

inline int valid_action_count(const ActionMask& mask) {
  int n = 0;
  for (auto v : mask) n += (v != 0);
  return n;
}

}  // namespace deepsched
