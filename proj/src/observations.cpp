#include "mkq/observations.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mkq {

ObservationSet::ObservationSet(std::size_t dims, std::vector<double> data, std::string label)
    : dims_(dims), data_(std::move(data)), label_(std::move(label)) {
  if (dims_ == 0) throw std::invalid_argument("observations: dimension must be positive");
  if (data_.size() % dims_ != 0) throw std::invalid_argument("observations: data length is not a multiple of d");
  for (double v : data_) {
    if (!std::isfinite(v)) throw std::invalid_argument("observations: non-finite coordinate");
  }
}

void ObservationSet::push_back(std::span<const double> y) {
  if (y.size() != dims_) throw std::invalid_argument("observations: dimension mismatch");
  data_.insert(data_.end(), y.begin(), y.end());
}

std::vector<double> ObservationSet::min() const {
  std::vector<double> m(dims_, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < size(); ++j)
    for (std::size_t k = 0; k < dims_; ++k) m[k] = std::min(m[k], data_[j * dims_ + k]);
  return m;
}

std::vector<double> ObservationSet::max() const {
  std::vector<double> m(dims_, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < size(); ++j)
    for (std::size_t k = 0; k < dims_; ++k) m[k] = std::max(m[k], data_[j * dims_ + k]);
  return m;
}

std::vector<double> ObservationSet::mean() const {
  std::vector<double> m(dims_, 0.0);
  for (std::size_t j = 0; j < size(); ++j)
    for (std::size_t k = 0; k < dims_; ++k) m[k] += data_[j * dims_ + k];
  for (auto& v : m) v /= static_cast<double>(size());
  return m;
}

void write_csv(std::ostream& os, const ObservationSet& obs) {
  for (std::size_t k = 0; k < obs.dims(); ++k) os << (k ? "," : "") << 'y' << (k + 1);
  os << '\n' << std::setprecision(17);
  for (std::size_t j = 0; j < obs.size(); ++j) {
    auto y = obs[j];
    for (std::size_t k = 0; k < y.size(); ++k) os << (k ? "," : "") << y[k];
    os << '\n';
  }
}

ObservationSet read_csv(std::istream& is) {
  std::string line;
  std::size_t dims = 0;
  std::vector<double> data;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      header_seen = true;
      // A header row is any first row that does not parse as numbers.
      bool numeric = true;
      for (const auto& c : cells) {
        char* end = nullptr;
        std::strtod(c.c_str(), &end);
        if (end == c.c_str()) numeric = false;
      }
      dims = cells.size();
      if (!numeric) continue;
    }
    if (cells.size() != dims) {
      throw std::runtime_error("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                               " columns, expected " + std::to_string(dims));
    }
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
        while (used < c.size() && std::isspace(static_cast<unsigned char>(c[used]))) ++used;
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size()) {
        throw std::runtime_error("csv: line " + std::to_string(line_no) + ": not a number '" + c + "'");
      }
      data.push_back(v);
    }
  }
  if (dims == 0) throw std::runtime_error("csv: no data");
  return ObservationSet(dims, std::move(data));
}

ObservationSet read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  auto obs = read_csv(in);
  obs.set_label(path);
  return obs;
}

void write_csv_file(const std::string& path, const ObservationSet& obs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(out, obs);
}

CyclicStream::CyclicStream(const ObservationSet& sample, std::uint64_t seed)
    : sample_(sample), rng_(seed), order_(sample.size()) {
  if (sample.empty()) throw std::invalid_argument("stream: empty observation set");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
}

void CyclicStream::next(std::span<double> out) {
  if (pos_ == order_.size()) {
    std::shuffle(order_.begin(), order_.end(), rng_);
    pos_ = 0;
    ++epoch_;
  }
  auto y = sample_[order_[pos_++]];
  std::copy(y.begin(), y.end(), out.begin());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace mkq
