#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>

#include "ymw/quat.hpp"

namespace ymw {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: draw n is splitmix64(key ^ n), so streams are
// reproducible from (seed, stream id) alone and independent of call order
// across streams.
class CounterRng {
 public:
  static constexpr const char* kName = "splitmix64-counter";

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(seed) ^ splitmix64(stream * 0xd1b54a32d192ed03ULL + 1)) {}

  CounterRng split(std::uint64_t stream) const { return CounterRng(key_, stream + 1); }

  std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Quat normal_quat() { return {normal(), normal(), normal(), normal()}; }
  Quat unit_quat() {
    Quat q = normal_quat();
    while (q.norm() < 1e-12) q = normal_quat();
    return q / q.norm();
  }
  Quat imag_quat() { return {0.0, normal(), normal(), normal()}; }

  Eigen::Vector4d normal4() { return {normal(), normal(), normal(), normal()}; }

  // Uniform point in the 4-ball of radius r.
  Eigen::Vector4d in_ball(double r) {
    Eigen::Vector4d v = normal4();
    while (v.norm() < 1e-12) v = normal4();
    return v / v.norm() * r * std::pow(uniform(), 0.25);
  }

  // Haar-distributed orthogonal 3x3 matrix.
  Eigen::Matrix3d orthogonal3() {
    Eigen::Matrix3d g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g(i, j) = normal();
    Eigen::HouseholderQR<Eigen::Matrix3d> qr(g);
    Eigen::Matrix3d q = qr.householderQ();
    const Eigen::Matrix3d r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < 3; ++i)
      if (r(i, i) < 0) q.col(i) *= -1.0;
    return q;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ymw
