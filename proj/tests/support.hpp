#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fermitele/fock.hpp"
#include "fermitele/protocols.hpp"

namespace testkit {

using fermitele::Bits;
using fermitele::cplx;
using fermitele::FockVector;

inline constexpr double kTol = 1e-12;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real() { return std::normal_distribution<double>()(rng_); }
  cplx complex() { return {real(), real()}; }
  bool coin() { return integer(0, 1) == 1; }

  /// Normalized (alpha, beta).
  std::pair<cplx, cplx> amplitudes() {
    cplx a = complex(), b = complex();
    double n = std::sqrt(std::norm(a) + std::norm(b));
    return {a / n, b / n};
  }

  /// `k` distinct modes from [0, n), ascending.
  std::vector<int> subset(int n, int k) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng_);
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
  }

  /// Random normalized state on `modes`; parity -1 means unrestricted.
  FockVector state(int n, const std::vector<int>& modes, int parity = -1) {
    FockVector v(n, fermitele::mask_of(modes));
    const std::size_t d = std::size_t{1} << modes.size();
    for (std::size_t x = 0; x < d; ++x) {
      if (parity >= 0 && __builtin_popcountll(x) % 2 != parity) continue;
      v.add(fermitele::local_to_bits(x, modes), complex());
    }
    return v.pruned().normalized();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// 5 magnitudes (endpoints included) x 4 phases.
inline std::vector<std::pair<cplx, cplx>> grid20() {
  std::vector<std::pair<cplx, cplx>> out;
  const double pi = std::acos(-1.0);
  for (int i = 0; i <= 4; ++i) {
    const double theta = 0.5 * pi * i / 4.0;
    for (int j = 0; j < 4; ++j) out.emplace_back(std::cos(theta), std::sin(theta) * std::polar(1.0, 0.5 * pi * j));
  }
  return out;
}

inline FockVector parity_input(int parity, int n, int x, int y, cplx a, cplx b) {
  return parity == 0 ? fermitele::even_input(n, x, y, a, b) : fermitele::odd_input(n, x, y, a, b);
}

/// Smallest branch fidelity among branches with nonzero probability.
inline double min_fidelity(const fermitele::Transcript& t) {
  double f = 1.0;
  for (const auto& b : t.branches) {
    if (b.probability > 1e-14) f = std::min(f, b.fidelity.value_or(0.0));
  }
  return f;
}

}  // namespace testkit
