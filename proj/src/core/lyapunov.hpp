#pragma once

#include <cstdint>
#include <vector>

#include "core/field.hpp"
#include "core/flow_map.hpp"
#include "core/flow_run.hpp"
#include "core/grid.hpp"
#include "core/velocity.hpp"

namespace isleflow {

// Largest eigenvalue of the Cauchy-Green strain tensor per grid point,
// clamped from below by kLambdaFloor.
using LambdaField = ScalarField2D;

// Finite-time Lyapunov exponent per grid point, sigma = ln(sqrt(lambda))/|t|.
using FtleField = ScalarField2D;

inline constexpr double kLambdaFloor = 1e-14;

// Largest Cauchy-Green eigenvalue of the map's deformation gradient.
// The gradient uses central differences at interior nodes and one-sided
// second-order differences on the boundary, so it is exact on affine maps.
// Needs nx, ny >= 3. Eigenvalues are clamped to >= kLambdaFloor, which
// absorbs round-off-negative values of an analytically positive
// semidefinite tensor.
LambdaField cauchy_green_lambda(const ScalarField2D& arrival_x,
                                const ScalarField2D& arrival_y);
LambdaField cauchy_green_lambda(const FlowMap2D& map);

// sigma = ln(lambda) / (2 |t|). Negative values (compression) are kept;
// clamping for display is the exporter's business. t = 0 is an error.
FtleField ftle(const LambdaField& lambda, double t);

// Running pointwise maximum of sqrt(lambda) across checkpoints. Frame 0 is
// identically 0 by convention (even though sqrt(lambda) of the identity map
// is 1), so any separation factor r > 1 crossed within the first interval
// still brackets there. Frames must be filled in order n = 1..N.
class SeparationEnvelope {
 public:
  SeparationEnvelope() = default;
  SeparationEnvelope(const Grid2D& grid, const TimeAxis& axis);

  // Rebuilds an envelope from stored frames (axis.n_steps + 1 of them,
  // each grid.size() long). Validates sizes and pointwise time
  // monotonicity.
  static SeparationEnvelope from_frames(const Grid2D& grid,
                                        const TimeAxis& axis,
                                        std::vector<std::vector<double>> frames);

  const Grid2D& grid() const { return grid_; }
  const TimeAxis& axis() const { return axis_; }

  // Number of frames filled so far, counting the implicit frame 0.
  std::int64_t frames_stored() const { return stored_; }
  bool complete() const { return stored_ == axis_.n_steps + 1; }

  const std::vector<double>& frame(std::int64_t n) const;

  // Stores s at checkpoint n as max(sqrt(lambda), previous frame)
  // pointwise. n must be exactly the next unfilled index (out-of-order
  // updates are errors) and lambda must live on the envelope grid.
  void update(std::int64_t n, const LambdaField& lambda);

 private:
  Grid2D grid_;
  TimeAxis axis_;
  std::vector<std::vector<double>> frames_;
  std::int64_t stored_ = 0;
};

// Free-function spelling of SeparationEnvelope::update.
void update_envelope(SeparationEnvelope& envelope, std::int64_t n,
                     const LambdaField& lambda);

// Earliest time the envelope reaches the separation factor r at one point:
// the smallest n with s_n <= r <= s_{n+1} gives
// tau = t_n + (r - s_n) / (s_{n+1} - s_n) * dt by linear interpolation; a
// flat bracket (s_n = s_{n+1} = r) resolves to t_n, the earliest time.
// Returns NaN when r exceeds the final envelope value (no crossing).
// Requires a complete envelope and r > 1.
double crossing_time(const SeparationEnvelope& envelope, std::size_t point,
                     double r);

// crossing_time evaluated at every grid point.
ScalarField2D crossing_time_field(const SeparationEnvelope& envelope, double r);

// Infinitesimal-size Lyapunov exponent for separation factor r: gamma =
// ln(r) / |tau - t0| where tau is the crossing time, and exactly 0 where no
// crossing occurred (tau keeps NaN as the absent marker there). One
// completed envelope answers any number of r queries.
struct IsleField {
  double r = 0.0;
  ScalarField2D gamma;
  ScalarField2D tau;
};

IsleField isle(const SeparationEnvelope& envelope, double r);

// Checkpoint observer that folds each composed map into an envelope.
class EnvelopeObserver {
 public:
  explicit EnvelopeObserver(SeparationEnvelope& envelope)
      : envelope_(&envelope) {}
  void operator()(const CheckpointStats& stats, const FlowMap2D& composed) const;

 private:
  SeparationEnvelope* envelope_;
};

// Direct Lagrangian check value for the envelope pipeline: traces x0 and
// its four axis neighbors at distance eps, watches the center-neighbor
// separations, and converts the earliest time any of them reaches r * eps
// into an exponent ln(r) / tau. The target is relative (r * eps, not the
// absolute r), so shrinking eps approaches the infinitesimal ratio
// convention. Crossing times interpolate linearly between trace steps.
// Returns NaN members when no crossing happens by t_max or the integration
// leaves the finite range.
struct FsleOracleResult {
  double gamma = 0.0;
  double tau = 0.0;
};

FsleOracleResult fsle_neighbor_oracle(const VelocityField& model, double x0,
                                      double y0, double eps, double r,
                                      double dt_sub, double t0, double t_max);

}  // namespace isleflow
