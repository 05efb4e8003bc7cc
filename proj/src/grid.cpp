#include "mkq/grid.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mkq {

GridSpec::GridSpec(std::vector<std::size_t> sizes)
    : GridSpec(sizes, std::vector<double>(sizes.size(), 0.0)) {}

GridSpec::GridSpec(std::vector<std::size_t> sizes, std::vector<double> offsets)
    : sizes_(std::move(sizes)), offsets_(std::move(offsets)) {
  if (sizes_.empty()) {
    throw std::invalid_argument("grid: at least one axis is required");
  }
  if (offsets_.size() != sizes_.size()) {
    throw std::invalid_argument("grid: one offset per axis is required");
  }
  total_ = 1;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    if (sizes_[k] < 2) {
      throw std::invalid_argument("grid: every axis needs at least 2 points");
    }
    if (!(offsets_[k] >= 0.0 && offsets_[k] < 1.0)) {
      throw std::invalid_argument("grid: axis offsets must lie in [0,1)");
    }
    if (total_ > std::numeric_limits<std::size_t>::max() / sizes_[k]) {
      throw std::invalid_argument("grid: total point count overflows");
    }
    total_ *= sizes_[k];
  }
}

void GridSpec::point(std::size_t flat, std::span<double> out) const {
  for (std::size_t k = sizes_.size(); k-- > 0;) {
    out[k] = coordinate(k, flat % sizes_[k]);
    flat /= sizes_[k];
  }
}

std::vector<double> GridSpec::point(std::size_t flat) const {
  std::vector<double> out(dims());
  point(flat, out);
  return out;
}

std::vector<std::size_t> GridSpec::multi_index(std::size_t flat) const {
  std::vector<std::size_t> idx(dims());
  for (std::size_t k = sizes_.size(); k-- > 0;) {
    idx[k] = flat % sizes_[k];
    flat /= sizes_[k];
  }
  return idx;
}

std::size_t GridSpec::flat_index(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    flat = flat * sizes_[k] + idx[k];
  }
  return flat;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    os << (k ? "x" : "") << sizes_[k];
  }
  return os.str();
}

FieldValues::FieldValues(GridSpec g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.total()) {
    throw std::invalid_argument("field: value count does not match the grid");
  }
}

double FieldValues::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

bool FieldValues::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace mkq
