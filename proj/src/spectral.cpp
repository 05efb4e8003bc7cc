#include "mkq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fft.hpp"

namespace mkq {

namespace {

long signed_frequency(std::size_t index, std::size_t n) {
  return index <= (n - 1) / 2 ? static_cast<long>(index) : static_cast<long>(index) - static_cast<long>(n);
}

constexpr double kSymmetryTolerance = 1e-8;

}  // namespace

FrequencySet::FrequencySet(GridSpec grid) : grid_(std::move(grid)) {
  const std::size_t p = grid_.total();
  const auto& sizes = grid_.sizes();
  negated_.resize(p);
  norms_.resize(p);
  std::vector<std::size_t> neg(sizes.size());
  for (std::size_t flat = 0; flat < p; ++flat) {
    auto idx = grid_.multi_index(flat);
    double sq = 0.0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const double f = static_cast<double>(signed_frequency(idx[k], sizes[k]));
      sq += f * f;
      neg[k] = (sizes[k] - idx[k]) % sizes[k];
    }
    norms_[flat] = std::sqrt(sq);
    negated_[flat] = grid_.flat_index(neg);
  }
}

long FrequencySet::frequency(std::size_t flat, std::size_t axis) const {
  return signed_frequency(grid_.multi_index(flat)[axis], grid_.sizes()[axis]);
}

std::vector<long> FrequencySet::frequency(std::size_t flat) const {
  auto idx = grid_.multi_index(flat);
  std::vector<long> out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = signed_frequency(idx[k], grid_.sizes()[k]);
  return out;
}

std::size_t FrequencySet::index_of(std::span<const long> lambda) const {
  if (lambda.size() != dims()) throw std::invalid_argument("frequency: dimension mismatch");
  std::vector<std::size_t> idx(dims());
  for (std::size_t k = 0; k < dims(); ++k) {
    const long n = static_cast<long>(grid_.sizes()[k]);
    const long l = lambda[k];
    if (signed_frequency(static_cast<std::size_t>(((l % n) + n) % n), grid_.sizes()[k]) != l) {
      throw std::out_of_range("frequency: not representable on this grid");
    }
    idx[k] = static_cast<std::size_t>(((l % n) + n) % n);
  }
  return grid_.flat_index(idx);
}

CoefficientVector CoefficientVector::zeros(std::shared_ptr<const FrequencySet> f) {
  CoefficientVector c;
  c.coeffs.assign(f->size(), Complex{0.0, 0.0});
  c.freqs = std::move(f);
  return c;
}

double CoefficientVector::l1_norm() const {
  double s = 0.0;
  for (std::size_t i = 1; i < coeffs.size(); ++i) s += std::abs(coeffs[i]);
  return s;
}

double CoefficientVector::l2_norm_sq() const {
  double s = 0.0;
  for (std::size_t i = 1; i < coeffs.size(); ++i) s += std::norm(coeffs[i]);
  return s;
}

double CoefficientVector::hermitian_defect() const {
  double d = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    d = std::max(d, std::abs(coeffs[freqs->negated(i)] - std::conj(coeffs[i])));
  }
  return d;
}

void symmetrize(std::span<Complex> coeffs, const FrequencySet& freqs) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::size_t j = freqs.negated(i);
    if (j == i) {
      coeffs[i] = Complex{coeffs[i].real(), 0.0};
    } else if (i < j) {
      const Complex a = 0.5 * (coeffs[i] + std::conj(coeffs[j]));
      coeffs[i] = a;
      coeffs[j] = std::conj(a);
    }
  }
}

double WeightVector::l1_norm() const {
  double s = 0.0;
  for (std::size_t i = 1; i < weights.size(); ++i) s += weights[i];
  return s;
}

WeightVector make_weights(std::shared_ptr<const FrequencySet> freqs, double alpha) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("weights: alpha must be finite");
  WeightVector w;
  w.alpha = alpha;
  w.weights.resize(freqs->size());
  w.weights[0] = 1.0;
  for (std::size_t i = 1; i < freqs->size(); ++i) {
    w.weights[i] = alpha == 0.0 ? 1.0 : std::pow(freqs->norm(i), -alpha);
  }
  w.freqs = std::move(freqs);
  return w;
}

double weighted_norm_sq(const CoefficientVector& theta, const WeightVector& w) {
  double s = 0.0;
  for (std::size_t i = 1; i < theta.size(); ++i) s += w.weights[i] * std::norm(theta[i]);
  return s;
}

double inverse_weighted_norm_sq(const CoefficientVector& theta, const WeightVector& w) {
  double s = 0.0;
  for (std::size_t i = 1; i < theta.size(); ++i) s += std::norm(theta[i]) / w.weights[i];
  return s;
}

SpectralWorkspace::SpectralWorkspace(std::shared_ptr<const FrequencySet> freqs)
    : freqs_(std::move(freqs)), buf_in_(freqs_->size()), buf_out_(freqs_->size()) {}

SpectralWorkspace::~SpectralWorkspace() = default;

double SpectralWorkspace::forward(std::span<const double> field, std::span<Complex> coeffs) {
  const std::size_t p = freqs_->size();
  for (std::size_t i = 0; i < p; ++i) buf_in_[i] = Complex{field[i], 0.0};
  detail::fft_execute(freqs_->grid().sizes(), -1, buf_in_.data(), coeffs.data());
  const double inv_p = 1.0 / static_cast<double>(p);
  for (std::size_t i = 0; i < p; ++i) coeffs[i] *= inv_p;
  const double mean = coeffs[0].real();
  coeffs[0] = Complex{0.0, 0.0};
  symmetrize(coeffs, *freqs_);
  return mean;
}

void SpectralWorkspace::inverse(std::span<const Complex> coeffs, std::span<double> field) {
  const std::size_t p = freqs_->size();
  detail::fft_execute(freqs_->grid().sizes(), +1, coeffs.data(), buf_out_.data());
  for (std::size_t i = 0; i < p; ++i) field[i] = buf_out_[i].real();
}

ForwardResult forward_transform(const FieldValues& field) {
  return forward_transform(field, FrequencySet::make(field.grid));
}

ForwardResult forward_transform(const FieldValues& field, std::shared_ptr<const FrequencySet> freqs) {
  if (!(freqs->grid() == field.grid)) throw std::invalid_argument("forward_transform: grid mismatch");
  if (!field.all_finite()) throw std::invalid_argument("forward_transform: non-finite field value");
  ForwardResult r;
  r.coeffs = CoefficientVector::zeros(freqs);
  SpectralWorkspace ws(std::move(freqs));
  r.mean = ws.forward(field.values, r.coeffs.coeffs);
  return r;
}

FieldValues inverse_transform(const CoefficientVector& coeffs) {
  double scale = 1.0;
  for (const auto& c : coeffs.coeffs) scale = std::max(scale, std::abs(c));
  if (coeffs.hermitian_defect() > kSymmetryTolerance * scale) {
    throw std::invalid_argument("inverse_transform: coefficients are not Hermitian-symmetric");
  }
  FieldValues out(coeffs.freqs->grid());
  SpectralWorkspace ws(coeffs.freqs);
  ws.inverse(coeffs.coeffs, out.values);
  return out;
}

}  // namespace mkq
