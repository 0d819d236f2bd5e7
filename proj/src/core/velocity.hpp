#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/grid.hpp"

namespace isleflow {

struct VelocitySample {
  double u = 0.0;
  double v = 0.0;
};

// Time-dependent planar velocity field. Analytic models evaluate their
// formulas anywhere; the gridded model interpolates stored frames.
class VelocityField {
 public:
  virtual ~VelocityField() = default;

  virtual VelocitySample sample(double x, double y, double t) const = 0;

  // Natural domain box for the model, when it has one (benchmark models and
  // gridded data do; generic callback fields may not).
  virtual std::optional<Grid2D> domain_hint() const { return std::nullopt; }
};

// Periodically perturbed two-cell recirculation on [0, 2] x [0, 1].
// Stream function psi = A sin(pi g(x, t)) sin(pi y) with
// g = a(t) x^2 + b(t) x, a = eps sin(omega t), b = 1 - 2 eps sin(omega t).
class DoubleGyreField : public VelocityField {
 public:
  // Orientation of the velocity relative to the stream function:
  // u = -dpsi/dy, v = +dpsi/dx. Flip to -1 for the mirrored circulation.
  static constexpr double kStreamOrientation = 1.0;

  DoubleGyreField(double amplitude, double eps, double omega)
      : amplitude_(amplitude), eps_(eps), omega_(omega) {}

  VelocitySample sample(double x, double y, double t) const override;
  std::optional<Grid2D> domain_hint() const override;

  double amplitude() const { return amplitude_; }
  double eps() const { return eps_; }
  double omega() const { return omega_; }

 private:
  double amplitude_;
  double eps_;
  double omega_;
};

// Steady polynomial field u = x - y^2, v = -y + x^2 on [-6, 6]^2, with a
// saddle at the origin and strong in/outflow through all four walls.
class QuadSaddleField : public VelocityField {
 public:
  VelocitySample sample(double x, double y, double t) const override;
  std::optional<Grid2D> domain_hint() const override;
};

// Periodically forced oscillator u = y, v = x - x^3 + 0.5 y (1 - x^2)
// + 0.1 sin t on [-2, 2] x [-1.5, 1.5].
class DuffingVanDerPolField : public VelocityField {
 public:
  VelocitySample sample(double x, double y, double t) const override;
  std::optional<Grid2D> domain_hint() const override;
};

// Adapter for test fields defined by an arbitrary callable.
class FunctionField : public VelocityField {
 public:
  using Fn = std::function<VelocitySample(double, double, double)>;

  explicit FunctionField(Fn fn) : fn_(std::move(fn)) {}
  FunctionField(Fn fn, const Grid2D& domain) : fn_(std::move(fn)), domain_(domain) {}

  VelocitySample sample(double x, double y, double t) const override {
    return fn_(x, y, t);
  }
  std::optional<Grid2D> domain_hint() const override { return domain_; }

 private:
  Fn fn_;
  std::optional<Grid2D> domain_;
};

// Velocity frames on a fixed grid at strictly increasing times. Spatial
// queries are bilinear with coordinates clamped to the domain box; temporal
// queries are linear between bracketing frames and refuse to extrapolate.
class GriddedVelocityField : public VelocityField {
 public:
  GriddedVelocityField(const Grid2D& grid, std::vector<double> times,
                       std::vector<std::vector<double>> u_frames,
                       std::vector<std::vector<double>> v_frames);

  VelocitySample sample(double x, double y, double t) const override;
  std::optional<Grid2D> domain_hint() const override { return grid_; }

  const Grid2D& grid() const { return grid_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& u_frame(std::size_t k) const { return u_frames_[k]; }
  const std::vector<double>& v_frame(std::size_t k) const { return v_frames_[k]; }

 private:
  VelocitySample sample_frame(std::size_t k, double x, double y) const;

  Grid2D grid_;
  std::vector<double> times_;
  std::vector<std::vector<double>> u_frames_;
  std::vector<std::vector<double>> v_frames_;
};

// Gridded velocity on disk: a text key-value header naming a binary payload
// of little-endian float64 frames (u then v per frame, row-major x fastest).
std::unique_ptr<GriddedVelocityField> load_gridded_velocity(
    const std::string& header_path);
void save_gridded_velocity(const std::string& header_path,
                           const GriddedVelocityField& field);

// Builds frames by sampling a model at the grid nodes and the given times.
GriddedVelocityField sample_to_gridded(const VelocityField& model,
                                       const Grid2D& grid,
                                       const std::vector<double>& times);

struct SpeedBounds {
  double u_max = 0.0;
  double v_max = 0.0;
};

// Componentwise speed bounds over the grid nodes, sampled at n_time_samples
// uniformly spaced times in [t_begin, t_end] (endpoints included).
SpeedBounds max_speeds(const VelocityField& field, const Grid2D& grid,
                       double t_begin, double t_end, int n_time_samples);

}  // namespace isleflow
