#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace mkq::detail {
namespace {

// The FFTW planner is not re-entrant, so planning is serialized. Plans are
// created with FFTW_UNALIGNED so new-array execution works on any buffer and
// picks the same codelets every time (bit-reproducible output).
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const std::vector<std::size_t>& sizes, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(sizes, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::vector<int> n(sizes.begin(), sizes.end());
    std::size_t total = 1;
    for (auto s : sizes) total *= s;
    std::vector<std::complex<double>> a(total), b(total);
    fftw_plan plan = fftw_plan_dft(static_cast<int>(n.size()), n.data(),
                                   reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()),
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fft: planner failed");
    plans_.emplace(std::move(key), plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::vector<std::size_t>, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_execute(const std::vector<std::size_t>& sizes, int sign, const std::complex<double>* in,
                 std::complex<double>* out) {
  fftw_plan plan = cache().get(sizes, sign);
  // FFTW does not modify the input of an out-of-place complex transform.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace mkq::detail
