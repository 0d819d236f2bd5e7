#pragma once

#include <vector>

#include "core/grid.hpp"

namespace isleflow {

// Scalar samples on the nodes of a Grid2D, stored row-major with x fastest.
class ScalarField2D {
 public:
  ScalarField2D() = default;
  explicit ScalarField2D(const Grid2D& grid, double fill = 0.0)
      : grid_(grid), values_(grid.size(), fill) {}
  ScalarField2D(const Grid2D& grid, std::vector<double> values);

  const Grid2D& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double at(std::int64_t i, std::int64_t j) const {
    return values_[grid_.index(i, j)];
  }
  double& at(std::int64_t i, std::int64_t j) {
    return values_[grid_.index(i, j)];
  }

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

}  // namespace isleflow
