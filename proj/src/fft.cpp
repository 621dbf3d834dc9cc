#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace gg::detail {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
  explicit PlanPair(std::size_t n) {
    const int size = static_cast<int>(n);
    std::vector<double> real(n);
    auto* spec = fftw_alloc_complex(n / 2 + 1);
    forward = fftw_plan_dft_r2c_1d(size, real.data(), spec, FFTW_ESTIMATE | FFTW_UNALIGNED);
    inverse = fftw_plan_dft_c2r_1d(size, spec, real.data(),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
    fftw_free(spec);
    if (forward == nullptr || inverse == nullptr) throw std::runtime_error("fftw planning failed");
  }
  ~PlanPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }

  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }
};

const PlanPair& plans_for(std::size_t n) {
  // The mutex must outlive the cache, whose destructors lock it.
  auto& mutex = PlanPair::planner_mutex();
  static std::map<std::size_t, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<PlanPair>(n)).first;
  return *it->second;
}

}  // namespace

void forward_real(std::span<const double> in, std::span<std::complex<double>> out) {
  if (out.size() != in.size() / 2 + 1) throw std::invalid_argument("forward_real: size mismatch");
  const auto& p = plans_for(in.size());
  // FFTW's signature is non-const but r2c does not write its input.
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void inverse_real(std::span<const std::complex<double>> in, std::span<double> out) {
  if (in.size() != out.size() / 2 + 1) throw std::invalid_argument("inverse_real: size mismatch");
  const auto& p = plans_for(out.size());
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(p.inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
}

std::size_t fast_size(std::size_t n) {
  for (std::size_t m = n + (n % 2);; m += 2) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace gg::detail
