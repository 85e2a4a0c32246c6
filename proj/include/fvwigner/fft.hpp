#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <tuple>

namespace fvw::fft {

enum class Direction : int { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {

// FFTW planning is not thread-safe; execution of an existing plan is.
inline std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct PlanKey {
  std::size_t n, howmany, stride, dist;
  int sign;
  auto tie() const { return std::tie(n, howmany, stride, dist, sign); }
  bool operator<(const PlanKey& o) const { return tie() < o.tie(); }
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const PlanKey& key) {
    std::lock_guard lock(plan_mutex());
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // ESTIMATE planning never touches the data and gives a fixed, reproducible plan.
    const std::size_t span = (key.howmany - 1) * key.dist + (key.n - 1) * key.stride + 1;
    auto* scratch = fftw_alloc_complex(span);
    const int n = static_cast<int>(key.n);
    fftw_plan plan = fftw_plan_many_dft(1, &n, static_cast<int>(key.howmany), scratch, nullptr,
                                        static_cast<int>(key.stride), static_cast<int>(key.dist),
                                        scratch, nullptr, static_cast<int>(key.stride),
                                        static_cast<int>(key.dist), key.sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::map<PlanKey, fftw_plan> plans_;
};

inline PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace detail

/// In-place unnormalized DFT of `howmany` sequences of length n laid out with the given
/// element stride and sequence distance (FFTW "advanced" layout).
inline void transform(std::complex<double>* data, std::size_t n, std::size_t howmany,
                      std::size_t stride, std::size_t dist, Direction dir) {
  fftw_plan plan = detail::cache().get({n, howmany, stride, dist, static_cast<int>(dir)});
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, p, p);
}

inline void transform(std::complex<double>* data, std::size_t n, Direction dir) {
  transform(data, n, 1, 1, n, dir);
}

}  // namespace fvw::fft
