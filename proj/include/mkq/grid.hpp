#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mkq {

/// Regular grid on the unit hypercube [0,1)^d.
///
/// Axis k has sizes[k] points placed at (i + offsets[k]) / sizes[k]. With the
/// default zero offsets the grid is the left-endpoint lattice of the flat
/// torus, on which the discrete Fourier basis is exactly orthogonal. Points
/// are stored row-major: the last axis varies fastest.
class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(std::vector<std::size_t> sizes);
  GridSpec(std::vector<std::size_t> sizes, std::vector<double> offsets);

  std::size_t dims() const { return sizes_.size(); }
  std::size_t total() const { return total_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  const std::vector<double>& offsets() const { return offsets_; }

  double coordinate(std::size_t axis, std::size_t index) const {
    return (static_cast<double>(index) + offsets_[axis]) / static_cast<double>(sizes_[axis]);
  }

  /// Writes the coordinates of the point with row-major index `flat`.
  void point(std::size_t flat, std::span<double> out) const;
  std::vector<double> point(std::size_t flat) const;

  std::vector<std::size_t> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::size_t> idx) const;

  std::string describe() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<double> offsets_;
  std::size_t total_ = 0;
};

/// Real scalar field sampled on every point of a grid.
struct FieldValues {
  GridSpec grid;
  std::vector<double> values;

  FieldValues() = default;
  explicit FieldValues(GridSpec g) : grid(std::move(g)), values(grid.total(), 0.0) {}
  FieldValues(GridSpec g, std::vector<double> v);

  double mean() const;
  bool all_finite() const;
};

}  // namespace mkq
