#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mkq::detail {

// Unnormalized multi-dimensional complex DFT over row-major data.
// sign < 0: sum_x f(x) e^{-2 pi i <k, x>}; sign > 0: the conjugate kernel.
// Plans are cached process-wide; execution is thread-safe.
void fft_execute(const std::vector<std::size_t>& sizes, int sign, const std::complex<double>* in,
                 std::complex<double>* out);

}  // namespace mkq::detail
