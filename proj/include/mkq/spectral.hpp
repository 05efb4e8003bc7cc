#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "mkq/grid.hpp"

namespace mkq {

using Complex = std::complex<double>;

/// Integer frequencies of a grid in the standard FFT layout.
///
/// Index i_k on an axis of size n carries frequency i_k for i_k <= (n-1)/2 and
/// i_k - n otherwise, so the Nyquist frequency of an even axis is -n/2 and is
/// its own negation modulo n. Flat index 0 is the zero frequency.
class FrequencySet {
 public:
  explicit FrequencySet(GridSpec grid);

  static std::shared_ptr<const FrequencySet> make(const GridSpec& grid) {
    return std::make_shared<const FrequencySet>(grid);
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return grid_.total(); }
  std::size_t dims() const { return grid_.dims(); }

  static constexpr std::size_t zero_index = 0;

  long frequency(std::size_t flat, std::size_t axis) const;
  std::vector<long> frequency(std::size_t flat) const;
  /// Flat index of -lambda under the aliasing convention.
  std::size_t negated(std::size_t flat) const { return negated_[flat]; }
  /// Euclidean norm of the integer frequency vector.
  double norm(std::size_t flat) const { return norms_[flat]; }
  /// Flat index of an integer frequency; throws if it is not representable.
  std::size_t index_of(std::span<const long> lambda) const;

 private:
  GridSpec grid_;
  std::vector<std::size_t> negated_;
  std::vector<double> norms_;
};

/// Truncated Fourier coefficients of a real field, DC pinned to zero.
struct CoefficientVector {
  std::shared_ptr<const FrequencySet> freqs;
  std::vector<Complex> coeffs;

  static CoefficientVector zeros(std::shared_ptr<const FrequencySet> f);

  std::size_t size() const { return coeffs.size(); }
  Complex& operator[](std::size_t i) { return coeffs[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs[i]; }

  double l1_norm() const;
  double l2_norm_sq() const;
  /// max_lambda |theta_{-lambda} - conj(theta_lambda)|
  double hermitian_defect() const;
};

/// theta_lambda <- (theta_lambda + conj(theta_{-lambda})) / 2, exactly Hermitian afterwards.
void symmetrize(std::span<Complex> coeffs, const FrequencySet& freqs);

/// Positive preconditioner weights w_lambda = |lambda|^-alpha.
struct WeightVector {
  std::shared_ptr<const FrequencySet> freqs;
  std::vector<double> weights;  // entry at the zero frequency is 1 and unused
  double alpha = 0.0;

  double l1_norm() const;  // sum over lambda != 0
};

WeightVector make_weights(std::shared_ptr<const FrequencySet> freqs, double alpha);

/// ||theta||_W^2 = sum w |theta|^2 over lambda != 0.
double weighted_norm_sq(const CoefficientVector& theta, const WeightVector& w);
/// ||theta||_{W^-1}^2 = sum |theta|^2 / w over lambda != 0.
double inverse_weighted_norm_sq(const CoefficientVector& theta, const WeightVector& w);

struct ForwardResult {
  CoefficientVector coeffs;
  double mean = 0.0;  // removed zero-frequency content
};

/// theta_lambda = (1/p) sum_x conj(phi_lambda(x)) f(x), with theta_0 set to 0.
ForwardResult forward_transform(const FieldValues& field);
ForwardResult forward_transform(const FieldValues& field, std::shared_ptr<const FrequencySet> freqs);

/// u(x) = sum_lambda theta_lambda phi_lambda(x) on the grid.
FieldValues inverse_transform(const CoefficientVector& coeffs);

/// Reusable buffers and plans for repeated transforms on one grid. Not shared
/// between threads; each worker owns its workspace.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(std::shared_ptr<const FrequencySet> freqs);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const FrequencySet& freqs() const { return *freqs_; }

  /// Normalized, symmetrized, DC-pinned coefficients of a real field; returns the mean.
  double forward(std::span<const double> field, std::span<Complex> coeffs);
  /// Real part of the synthesis sum; no symmetry check.
  void inverse(std::span<const Complex> coeffs, std::span<double> field);

 private:
  std::shared_ptr<const FrequencySet> freqs_;
  std::vector<Complex> buf_in_;
  std::vector<Complex> buf_out_;
};

}  // namespace mkq
