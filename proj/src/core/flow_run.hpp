#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/flow_map.hpp"
#include "core/grid.hpp"
#include "core/liouville.hpp"
#include "core/velocity.hpp"

namespace isleflow {

struct RunOptions {
  SubstepScheme scheme = SubstepScheme::TvdRk2;
  double cfl = 0.5;
  // 0 derives the per-checkpoint substep count from the CFL bound.
  int substeps_per_checkpoint = 0;
  // Times sampled per checkpoint interval when bounding speeds for the CFL
  // estimate.
  int speed_time_samples = 3;
  bool keep_checkpoint_maps = false;
};

struct CheckpointStats {
  int n = 0;                           // checkpoint index, 1-based
  double t = 0.0;
  double seconds = 0.0;                // wall time for this checkpoint
  std::uint64_t clamp_events = 0;      // cumulative over the run so far
};

// Called after every checkpoint n = 1..N with the composed map from t0 up
// to t_n. The map reference is only valid during the call.
using CheckpointObserver =
    std::function<void(const CheckpointStats& stats, const FlowMap2D& composed)>;

struct FlowRunRecord {
  TimeAxis axis;
  FlowMap2D final_map;
  std::vector<CheckpointStats> checkpoints;
  // Composed maps at every checkpoint, kept only on request; entry n - 1
  // corresponds to checkpoint n.
  std::vector<FlowMap2D> checkpoint_maps;
};

// On-the-fly forward flow maps: each checkpoint interval is solved backward
// in isolation and the resulting one-interval map is chained onto the
// accumulated map, so the work per checkpoint is proportional to the
// interval length rather than to the elapsed horizon.
FlowRunRecord forward_flow_run(const VelocityField& model, const Grid2D& grid,
                               const TimeAxis& axis, const RunOptions& options,
                               const CheckpointObserver& observer = {});

// Reference scheme without composition: one backward solve spanning the
// whole of [t0, t_end], internally subdivided by the CFL bound. Speeds are
// bounded with speed_time_samples samples across the full span.
FlowMap2D legacy_full_map(const VelocityField& model, const Grid2D& grid,
                          double t0, double t_end, SubstepScheme scheme,
                          double cfl = 0.5, int speed_time_samples = 65);

// Reference checkpoint schedule without composition: for every n the map
// over [t0, t_n] is rebuilt from scratch, which makes the total work grow
// quadratically with the checkpoint count. Speed bounds per rebuild use 65
// time samples across the span being solved.
FlowRunRecord legacy_checkpoint_run(const VelocityField& model,
                                    const Grid2D& grid, const TimeAxis& axis,
                                    const RunOptions& options,
                                    const CheckpointObserver& observer = {});

struct TraceResult {
  std::vector<Vec2> positions;
  // ok[k] false means seed k went non-finite; its position freezes at the
  // last finite value.
  std::vector<char> ok;
};

// Classical fourth-order Runge-Kutta particle tracing with a fixed step no
// larger than dt_max. Positions are not clamped to any box.
TraceResult lagrangian_trace(const VelocityField& model,
                             const std::vector<Vec2>& seeds, double t0,
                             double t_end, double dt_max);

struct ArrivalFields {
  ScalarField2D x;
  ScalarField2D y;
  std::uint64_t failed = 0;
};

// Traces every grid node with lagrangian_trace and returns the raw arrival
// coordinates (no clamping), for use as an independent reference map.
ArrivalFields trace_reference_map(const VelocityField& model,
                                  const Grid2D& grid, double t0, double t_end,
                                  double dt_max);

// Time axis over [t0, t_end] whose checkpoint count is the minimal number
// of equal steps satisfying the CFL bound, so every checkpoint is a single
// substep.
TimeAxis make_cfl_axis(const VelocityField& model, const Grid2D& grid,
                       double t0, double t_end, double cfl = 0.5,
                       int speed_time_samples = 33);

}  // namespace isleflow
