#include "core/flow_run.hpp"

#include <chrono>
#include <cmath>

#include "core/error.hpp"

namespace isleflow {

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point begin) {
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(end - begin).count();
}

}  // namespace

FlowRunRecord forward_flow_run(const VelocityField& model, const Grid2D& grid,
                               const TimeAxis& axis, const RunOptions& options,
                               const CheckpointObserver& observer) {
  FlowRunRecord rec;
  rec.axis = axis;
  rec.checkpoints.reserve(static_cast<std::size_t>(axis.n_steps));

  FlowMap2D total;
  std::uint64_t cumulative_clamps = 0;
  for (std::int64_t n = 1; n <= axis.n_steps; ++n) {
    const auto begin = std::chrono::steady_clock::now();
    const double t_lo = axis.time(n - 1);
    const double t_hi = axis.time(n);
    FlowMap2D step = checkpoint_map(model, grid, t_lo, t_hi, options.scheme,
                                    options.cfl, options.substeps_per_checkpoint,
                                    options.speed_time_samples);
    cumulative_clamps += step.clamp_events();
    if (n == 1) {
      total = std::move(step);
    } else {
      total = compose(total, step);
      cumulative_clamps += total.clamp_events();
    }

    CheckpointStats st;
    st.n = static_cast<int>(n);
    st.t = t_hi;
    st.seconds = elapsed_seconds(begin);
    st.clamp_events = cumulative_clamps;
    rec.checkpoints.push_back(st);
    if (options.keep_checkpoint_maps) rec.checkpoint_maps.push_back(total);
    if (observer) observer(st, total);
  }
  rec.final_map = std::move(total);
  return rec;
}

FlowMap2D legacy_full_map(const VelocityField& model, const Grid2D& grid,
                          double t0, double t_end, SubstepScheme scheme,
                          double cfl, int speed_time_samples) {
  return checkpoint_map(model, grid, t0, t_end, scheme, cfl, 0,
                        speed_time_samples);
}

FlowRunRecord legacy_checkpoint_run(const VelocityField& model,
                                    const Grid2D& grid, const TimeAxis& axis,
                                    const RunOptions& options,
                                    const CheckpointObserver& observer) {
  FlowRunRecord rec;
  rec.axis = axis;
  rec.checkpoints.reserve(static_cast<std::size_t>(axis.n_steps));

  std::uint64_t cumulative_clamps = 0;
  for (std::int64_t n = 1; n <= axis.n_steps; ++n) {
    const auto begin = std::chrono::steady_clock::now();
    const double t_hi = axis.time(n);
    FlowMap2D whole = legacy_full_map(model, grid, axis.t0, t_hi,
                                      options.scheme, options.cfl);
    cumulative_clamps += whole.clamp_events();

    CheckpointStats st;
    st.n = static_cast<int>(n);
    st.t = t_hi;
    st.seconds = elapsed_seconds(begin);
    st.clamp_events = cumulative_clamps;
    rec.checkpoints.push_back(st);
    if (options.keep_checkpoint_maps) rec.checkpoint_maps.push_back(whole);
    if (observer) observer(st, whole);
    if (n == axis.n_steps) rec.final_map = std::move(whole);
  }
  return rec;
}

TraceResult lagrangian_trace(const VelocityField& model,
                             const std::vector<Vec2>& seeds, double t0,
                             double t_end, double dt_max) {
  if (!(t_end > t0)) {
    throw Error(ErrorCode::InvalidArgument, "trace needs t_end > t0");
  }
  if (!(dt_max > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "trace step must be positive");
  }
  const double span = t_end - t0;
  const std::int64_t n_steps =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                    std::ceil(span / dt_max - 1e-12)));
  const double h = span / static_cast<double>(n_steps);

  TraceResult out;
  out.positions = seeds;
  out.ok.assign(seeds.size(), 1);

  for (std::size_t k = 0; k < out.positions.size(); ++k) {
    double x = out.positions[k].x;
    double y = out.positions[k].y;
    bool alive = std::isfinite(x) && std::isfinite(y);
    for (std::int64_t s = 0; alive && s < n_steps; ++s) {
      const double t = t0 + static_cast<double>(s) * h;
      const VelocitySample k1 = model.sample(x, y, t);
      const VelocitySample k2 =
          model.sample(x + 0.5 * h * k1.u, y + 0.5 * h * k1.v, t + 0.5 * h);
      const VelocitySample k3 =
          model.sample(x + 0.5 * h * k2.u, y + 0.5 * h * k2.v, t + 0.5 * h);
      const VelocitySample k4 =
          model.sample(x + h * k3.u, y + h * k3.v, t + h);
      const double nx = x + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
      const double ny = y + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
      if (!std::isfinite(nx) || !std::isfinite(ny)) {
        alive = false;
        break;
      }
      x = nx;
      y = ny;
    }
    out.positions[k] = {x, y};
    if (!alive) out.ok[k] = 0;
  }
  return out;
}

ArrivalFields trace_reference_map(const VelocityField& model,
                                  const Grid2D& grid, double t0, double t_end,
                                  double dt_max) {
  std::vector<Vec2> seeds;
  seeds.reserve(grid.size());
  for (std::int64_t j = 0; j < grid.ny; ++j) {
    for (std::int64_t i = 0; i < grid.nx; ++i) {
      seeds.push_back({grid.x(i), grid.y(j)});
    }
  }
  const TraceResult tr = lagrangian_trace(model, seeds, t0, t_end, dt_max);

  ArrivalFields out{ScalarField2D(grid), ScalarField2D(grid), 0};
  for (std::size_t p = 0; p < tr.positions.size(); ++p) {
    out.x.values()[p] = tr.positions[p].x;
    out.y.values()[p] = tr.positions[p].y;
    if (!tr.ok[p]) ++out.failed;
  }
  return out;
}

TimeAxis make_cfl_axis(const VelocityField& model, const Grid2D& grid,
                       double t0, double t_end, double cfl,
                       int speed_time_samples) {
  const int n =
      required_substeps(model, grid, t0, t_end, cfl, speed_time_samples);
  return TimeAxis::create(t0, t_end, n);
}

}  // namespace isleflow
