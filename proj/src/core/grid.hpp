#pragma once

#include <cstddef>
#include <cstdint>

namespace isleflow {

// Uniform vertex-centered grid on [x_min, x_max] x [y_min, y_max].
// Spacing is dx = (x_max - x_min) / (nx - 1); nodes sit on both boundaries.
// Linear storage order throughout the project is row-major with x fastest:
// index(i, j) = j * nx + i.
struct Grid2D {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  std::int64_t nx = 2;
  std::int64_t ny = 2;

  static Grid2D create(double x_min, double x_max, double y_min, double y_max,
                       std::int64_t nx, std::int64_t ny);

  double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
  double dy() const { return (y_max - y_min) / static_cast<double>(ny - 1); }
  double x(std::int64_t i) const { return x_min + static_cast<double>(i) * dx(); }
  double y(std::int64_t j) const { return y_min + static_cast<double>(j) * dy(); }
  std::size_t index(std::int64_t i, std::int64_t j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(i);
  }
  std::size_t size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }

  bool same_layout(const Grid2D& other) const;
};

// Uniform checkpoint axis t_n = t0 + n * dt, n = 0..n_steps, t_{n_steps} = t_end.
struct TimeAxis {
  double t0 = 0.0;
  double t_end = 1.0;
  std::int64_t n_steps = 1;

  static TimeAxis create(double t0, double t_end, std::int64_t n_steps);

  double dt() const { return (t_end - t0) / static_cast<double>(n_steps); }
  double time(std::int64_t n) const {
    return t0 + static_cast<double>(n) * dt();
  }
  double duration() const { return t_end - t0; }
};

// Largest stable advective step dt = cfl / (u_max/dx + v_max/dy).
// Throws when both speed bounds are zero (the bound is unbounded and the
// caller must supply an explicit step or checkpoint count).
double cfl_timestep(double u_max, double v_max, const Grid2D& grid, double cfl);

}  // namespace isleflow
