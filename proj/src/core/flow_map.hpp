#pragma once

#include <cstdint>

#include "core/field.hpp"
#include "core/grid.hpp"

namespace isleflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Discrete forward flow map on grid nodes: arrival(i, j) is where the
// particle seeded at node (i, j) sits at the end of the map's time window.
// Arrivals always lie inside the closed domain box; construction clamps
// out-of-box values and counts how many nodes needed clamping.
class FlowMap2D {
 public:
  FlowMap2D() = default;

  static FlowMap2D identity(const Grid2D& grid);
  static FlowMap2D from_arrival_fields(ScalarField2D arrival_x,
                                       ScalarField2D arrival_y);
  // Rebuilds a map from stored arrivals, restoring the clamp-event count
  // recorded by the producing run. The arrivals must already sit inside
  // the domain box; violations are errors rather than clamp events here.
  static FlowMap2D from_stored(ScalarField2D arrival_x, ScalarField2D arrival_y,
                               std::uint64_t recorded_clamp_events);

  const Grid2D& grid() const { return arrival_x_.grid(); }
  const ScalarField2D& arrival_x() const { return arrival_x_; }
  const ScalarField2D& arrival_y() const { return arrival_y_; }
  std::uint64_t clamp_events() const { return clamp_events_; }

  Vec2 arrival(std::int64_t i, std::int64_t j) const {
    return {arrival_x_.at(i, j), arrival_y_.at(i, j)};
  }

 private:
  ScalarField2D arrival_x_;
  ScalarField2D arrival_y_;
  std::uint64_t clamp_events_ = 0;
};

// Bilinear interpolation of the arrival arrays at an arbitrary query point;
// the query is clamped to the domain box first. Interpolated arrivals are
// convex combinations of stored arrivals, so they stay inside the box.
Vec2 bilinear_arrival(const FlowMap2D& map, double x, double y);

// Bilinear sample of a scalar field at a clamped query point.
double bilinear_value(const ScalarField2D& field, double x, double y);

// Chains a later one-step map onto an accumulated map:
// result(p) = step evaluated (bilinearly) at total(p).
FlowMap2D compose(const FlowMap2D& total, const FlowMap2D& step);

// Doubles the time horizon of a flow map of an autonomous field by
// self-composition.
FlowMap2D phase_flow_double(const FlowMap2D& map);

}  // namespace isleflow
