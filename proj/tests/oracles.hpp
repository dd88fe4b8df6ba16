#pragma once

// Test-only oracles, independent of the library code paths they check.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "einwarp/error.hpp"

#define CHECK_THROWS_CODE(expr, expected_code)                  \
  do {                                                          \
    bool einwarp_thrown_ = false;                               \
    try {                                                       \
      (void)(expr);                                             \
    } catch (const einwarp::Error& einwarp_e_) {                \
      einwarp_thrown_ = true;                                   \
      CHECK(einwarp_e_.code() == (expected_code));              \
    }                                                           \
    CHECK_MESSAGE(einwarp_thrown_, "expected einwarp::Error");  \
  } while (0)

namespace oracle {

/// Truncated Taylor series a_0 + a_1 h + a_2 h^2 + a_3 h^3 with exact
/// arithmetic on coefficients; derivative k is k! a_k.
struct Taylor3 {
  std::array<double, 4> a{};

  static Taylor3 variable(double t) { return {{t, 1, 0, 0}}; }
  static Taylor3 constant(double v) { return {{v, 0, 0, 0}}; }

  friend Taylor3 operator+(const Taylor3& x, const Taylor3& y) {
    Taylor3 r;
    for (int k = 0; k < 4; ++k) r.a[k] = x.a[k] + y.a[k];
    return r;
  }
  friend Taylor3 operator*(const Taylor3& x, const Taylor3& y) {
    Taylor3 r;
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j <= k; ++j) r.a[k] += x.a[j] * y.a[k - j];
    return r;
  }
  friend Taylor3 sqrt(const Taylor3& x) {
    Taylor3 s;
    s.a[0] = std::sqrt(x.a[0]);
    for (int k = 1; k < 4; ++k) {
      double acc = x.a[k];
      for (int j = 1; j < k; ++j) acc -= s.a[j] * s.a[k - j];
      s.a[k] = acc / (2 * s.a[0]);
    }
    return s;
  }
  double derivative(int k) const {
    static constexpr double fact[4] = {1, 1, 2, 6};
    return fact[k] * a[k];
  }
};

/// Deterministic uniform doubles in [0,1) independent of library RNG helpers.
struct SplitMix {
  std::uint64_t state;
  double next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }
};

/// Random orthogonal matrix from Gram-Schmidt of a seeded random matrix.
inline Eigen::MatrixXd random_orthogonal(int dim, std::uint64_t seed) {
  SplitMix rng{seed};
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = rng.next() - 0.5;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
}

}  // namespace oracle
