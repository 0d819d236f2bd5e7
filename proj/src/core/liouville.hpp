#pragma once

#include <span>

#include "core/field.hpp"
#include "core/flow_map.hpp"
#include "core/grid.hpp"
#include "core/velocity.hpp"

namespace isleflow {

enum class SubstepScheme {
  Euler1,  // single explicit step per substep
  TvdRk2,  // predictor step, second step, average with the terminal data
};

// Which coordinate label a transported component carries. The inflow
// Dirichlet pin and its ghost extension reproduce the identity profile of
// that coordinate.
enum class LabelAxis { X, Y };

// One-step forward flow map over [t_lo, t_hi], obtained by solving the
// transport equation dPsi/dt + u . grad Psi = 0 backward from the terminal
// data Psi(x, t_hi) = x. Spatial derivatives are fifth-order WENO, upwinded
// per point and axis by the local velocity sign (accounting for the
// backward march); velocity is evaluated at grid nodes only.
//
// Walls follow the inflow/outflow split of the velocity against the outward
// normal: where n.u < 0 (inflow) the identity label is pinned (ghosts extend
// the identity profile linearly); where n.u > 0 (outflow) the normal
// gradient is zeroed by copying the adjacent interior value (ghosts extend
// the wall value constantly); where n.u = 0 the interior update stands.
//
// The full interval is taken as a single time step; if it violates the
// advective CFL bound, a CflError reporting the required substep count is
// thrown. Use checkpoint_map to subdivide automatically.
FlowMap2D substep_map(const VelocityField& model, const Grid2D& grid,
                      double t_lo, double t_hi, SubstepScheme scheme,
                      double cfl = 0.5);

// Same backward solve, internally subdivided into the minimal number of
// equal CFL-compliant steps (or exactly forced_substeps of them when
// positive). Returns only the whole-interval map.
FlowMap2D checkpoint_map(const VelocityField& model, const Grid2D& grid,
                         double t_lo, double t_hi, SubstepScheme scheme,
                         double cfl = 0.5, int forced_substeps = 0,
                         int speed_time_samples = 3);

// Applies the wall conditions described above to one transported component
// at time t: inflow walls pin the identity label, outflow walls copy the
// adjacent interior value, tangential walls are left unchanged.
void apply_boundary(ScalarField2D& component, LabelAxis label,
                    const VelocityField& model, double t);

// Minimal number of equal steps over [t_lo, t_hi] satisfying the CFL bound.
int required_substeps(const VelocityField& model, const Grid2D& grid,
                      double t_lo, double t_hi, double cfl,
                      int speed_time_samples = 3);

namespace detail {

// Fills line (size nx + 6) with row j of the component plus three ghost
// values per side for an x-direction sweep, classifying each wall with the
// given wall velocities. Exposed for boundary-contract tests.
void fill_padded_x(const ScalarField2D& component, LabelAxis label,
                   std::int64_t j, double u_wall_left, double u_wall_right,
                   std::span<double> line);

// Same for a y-direction sweep along column i.
void fill_padded_y(const ScalarField2D& component, LabelAxis label,
                   std::int64_t i, double v_wall_bottom, double v_wall_top,
                   std::span<double> line);

}  // namespace detail

}  // namespace isleflow
