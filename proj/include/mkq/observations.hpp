#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mkq {

/// A finite sample (Y_1, ..., Y_n) in R^d, stored contiguously.
class ObservationSet {
 public:
  ObservationSet() = default;
  explicit ObservationSet(std::size_t dims) : dims_(dims) {}
  ObservationSet(std::size_t dims, std::vector<double> data, std::string label = {});

  std::size_t dims() const { return dims_; }
  std::size_t size() const { return dims_ == 0 ? 0 : data_.size() / dims_; }
  bool empty() const { return data_.empty(); }
  const std::string& label() const { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }

  std::span<const double> operator[](std::size_t j) const { return {data_.data() + j * dims_, dims_}; }
  std::span<double> operator[](std::size_t j) { return {data_.data() + j * dims_, dims_}; }
  const std::vector<double>& data() const { return data_; }

  void push_back(std::span<const double> y);

  /// Componentwise min and max over the sample.
  std::vector<double> min() const;
  std::vector<double> max() const;
  std::vector<double> mean() const;

 private:
  std::size_t dims_ = 0;
  std::vector<double> data_;
  std::string label_;
};

/// CSV with a header row (y1,...,yd) and one point per row.
void write_csv(std::ostream& os, const ObservationSet& obs);
ObservationSet read_csv(std::istream& is);
ObservationSet read_csv_file(const std::string& path);
void write_csv_file(const std::string& path, const ObservationSet& obs);

/// Source of target draws for the stochastic solvers.
class ObservationStream {
 public:
  virtual ~ObservationStream() = default;
  virtual std::size_t dims() const = 0;
  virtual void next(std::span<double> out) = 0;
};

/// Cycles through a finite sample: first pass in order, then a fresh
/// permutation per epoch drawn from `seed`.
class CyclicStream final : public ObservationStream {
 public:
  CyclicStream(const ObservationSet& sample, std::uint64_t seed);
  std::size_t dims() const override { return sample_.dims(); }
  void next(std::span<double> out) override;
  std::size_t epoch() const { return epoch_; }

 private:
  const ObservationSet& sample_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
  std::size_t epoch_ = 0;
};

using Sampler = std::function<void(std::mt19937_64&, std::span<double>)>;

/// Fresh i.i.d. draws from a sampler.
class SamplerStream final : public ObservationStream {
 public:
  SamplerStream(std::size_t dims, Sampler sampler, std::uint64_t seed)
      : dims_(dims), sampler_(std::move(sampler)), rng_(seed) {}
  std::size_t dims() const override { return dims_; }
  void next(std::span<double> out) override { sampler_(rng_, out); }

 private:
  std::size_t dims_;
  Sampler sampler_;
  std::mt19937_64 rng_;
};

/// Deterministic sub-seed for a named component of a run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mkq
