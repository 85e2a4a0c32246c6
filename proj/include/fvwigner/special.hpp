#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fvwigner/errors.hpp"

namespace fvw {

/// Associated Laguerre polynomial L_n^alpha(x) by forward three-term recurrence.
/// Integer alpha >= -n is accepted; the recurrence is the same for negative offsets.
inline double laguerre(int n, int alpha, double x) {
  if (n < 0) throw DomainError("laguerre: n must be >= 0");
  if (alpha < -n) throw DomainError("laguerre: alpha must be >= -n");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Fills out[k] = scale * L_k^alpha(x) for k = 0..out.size()-1.
/// Passing scale = exp(-x/2) keeps the sequence bounded for the oscillator symbols.
inline void laguerre_sequence(int alpha, double x, double scale, std::vector<double>& out) {
  const std::size_t n = out.size();
  if (n == 0) return;
  out[0] = scale;
  if (n == 1) return;
  out[1] = (1.0 + alpha - x) * scale;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = ((2.0 * kk + 1.0 + alpha - x) * out[k] - (kk + alpha) * out[k - 1]) / (kk + 1.0);
  }
}

inline double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

/// Signed frequency index for FFT slot c of an n-point transform: 0..n/2-1, -n/2..-1.
inline long signed_index(std::size_t c, std::size_t n) {
  return c < n / 2 ? static_cast<long>(c) : static_cast<long>(c) - static_cast<long>(n);
}

inline std::size_t wrap_index(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  long r = i % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

}  // namespace fvw
