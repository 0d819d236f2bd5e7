#include "isleflow.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <string>
#include <utility>

#include "core/error.hpp"
#include "core/flow_run.hpp"
#include "core/lyapunov.hpp"
#include "core/metrics.hpp"
#include "core/ridge.hpp"
#include "core/storage.hpp"
#include "core/velocity.hpp"

struct isle_model {
  std::unique_ptr<isleflow::VelocityField> field;
};

struct isle_map {
  isleflow::FlowMap2D map;
};

struct isle_field {
  isleflow::ScalarField2D field;
};

struct isle_volume {
  isleflow::SeparationEnvelope envelope;
};

struct isle_ridges {
  isleflow::Grid2D grid;
  isleflow::RidgeSet set;
};

namespace {

thread_local std::string g_last_error = "no error";

isle_status to_status(isleflow::ErrorCode code) {
  switch (code) {
    case isleflow::ErrorCode::InvalidArgument:
      return ISLE_INVALID_ARGUMENT;
    case isleflow::ErrorCode::Cfl:
      return ISLE_CFL;
    case isleflow::ErrorCode::Solver:
      return ISLE_SOLVER;
    case isleflow::ErrorCode::Io:
      return ISLE_IO;
    case isleflow::ErrorCode::Format:
      return ISLE_FORMAT;
    case isleflow::ErrorCode::OutOfRange:
      return ISLE_OUT_OF_RANGE;
  }
  return ISLE_SOLVER;
}

template <typename Fn>
isle_status wrap(Fn&& fn) {
  try {
    fn();
    return ISLE_OK;
  } catch (const isleflow::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ISLE_SOLVER;
  } catch (...) {
    g_last_error = "unknown failure";
    return ISLE_SOLVER;
  }
}

void require(bool cond, const char* message) {
  if (!cond) {
    throw isleflow::Error(isleflow::ErrorCode::InvalidArgument, message);
  }
}

isleflow::Grid2D to_grid(const isle_grid_spec& s) {
  return isleflow::Grid2D::create(s.x_min, s.x_max, s.y_min, s.y_max, s.nx,
                                  s.ny);
}

isle_grid_spec to_spec(const isleflow::Grid2D& g) {
  return {g.x_min, g.x_max, g.y_min, g.y_max, g.nx, g.ny};
}

isleflow::RunOptions to_options(const isle_run_config* c) {
  isleflow::RunOptions opt;
  if (!c) return opt;
  opt.scheme = c->scheme == 0 ? isleflow::SubstepScheme::Euler1
                              : isleflow::SubstepScheme::TvdRk2;
  opt.cfl = c->cfl > 0.0 ? c->cfl : 0.5;
  opt.substeps_per_checkpoint =
      c->substeps_per_checkpoint > 0 ? c->substeps_per_checkpoint : 0;
  opt.speed_time_samples =
      c->speed_time_samples > 0 ? c->speed_time_samples : 3;
  return opt;
}

isleflow::CheckpointObserver forward_callback(isle_checkpoint_fn cb,
                                              void* user) {
  if (!cb) return {};
  return [cb, user](const isleflow::CheckpointStats& st,
                    const isleflow::FlowMap2D&) {
    cb(st.n, st.t, st.seconds, st.clamp_events, user);
  };
}

isleflow::TimeAxis resolve_axis(const isleflow::VelocityField& model,
                                const isleflow::Grid2D& grid, double t0,
                                double t_end, int64_t n_checkpoints,
                                const isleflow::RunOptions& opt) {
  if (n_checkpoints > 0) {
    return isleflow::TimeAxis::create(t0, t_end, n_checkpoints);
  }
  return isleflow::make_cfl_axis(model, grid, t0, t_end, opt.cfl);
}

}  // namespace

extern "C" {

const char* isle_last_error(void) { return g_last_error.c_str(); }

const char* isle_version(void) { return "1.0.0"; }

/* ------------------------------------------------------------------ */

isle_status isle_model_double_gyre(double amplitude, double eps, double omega,
                                   isle_model** out) {
  return wrap([&] {
    require(out != nullptr, "null output pointer");
    require(std::isfinite(amplitude) && std::isfinite(eps) &&
                std::isfinite(omega),
            "gyre parameters must be finite");
    *out = new isle_model{
        std::make_unique<isleflow::DoubleGyreField>(amplitude, eps, omega)};
  });
}

isle_status isle_model_quad_saddle(isle_model** out) {
  return wrap([&] {
    require(out != nullptr, "null output pointer");
    *out = new isle_model{std::make_unique<isleflow::QuadSaddleField>()};
  });
}

isle_status isle_model_duffing_vdp(isle_model** out) {
  return wrap([&] {
    require(out != nullptr, "null output pointer");
    *out = new isle_model{std::make_unique<isleflow::DuffingVanDerPolField>()};
  });
}

isle_status isle_model_gridded(const char* header_path, isle_model** out) {
  return wrap([&] {
    require(header_path != nullptr && out != nullptr, "null argument");
    *out = new isle_model{isleflow::load_gridded_velocity(header_path)};
  });
}

void isle_model_free(isle_model* model) { delete model; }

isle_status isle_model_domain(const isle_model* model, isle_grid_spec* out) {
  return wrap([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const auto hint = model->field->domain_hint();
    require(hint.has_value(), "model has no natural domain box");
    *out = to_spec(*hint);
  });
}

isle_status isle_model_sample(const isle_model* model, double x, double y,
                              double t, double* u, double* v) {
  return wrap([&] {
    require(model != nullptr && u != nullptr && v != nullptr, "null argument");
    const isleflow::VelocitySample s = model->field->sample(x, y, t);
    *u = s.u;
    *v = s.v;
  });
}

/* ------------------------------------------------------------------ */

isle_status isle_simulate(const isle_model* model, isle_grid_spec grid,
                          double t0, double t_end, int64_t n_checkpoints,
                          const isle_run_config* config,
                          isle_checkpoint_fn on_checkpoint, void* user,
                          isle_volume** out_volume, isle_map** out_map) {
  return wrap([&] {
    require(model != nullptr, "null model");
    const isleflow::Grid2D g = to_grid(grid);
    const isleflow::RunOptions opt = to_options(config);
    const isleflow::TimeAxis axis =
        resolve_axis(*model->field, g, t0, t_end, n_checkpoints, opt);

    isleflow::SeparationEnvelope env(g, axis);
    const bool want_volume = out_volume != nullptr;
    isleflow::CheckpointObserver obs =
        [&](const isleflow::CheckpointStats& st,
            const isleflow::FlowMap2D& composed) {
          if (want_volume) {
            env.update(st.n, isleflow::cauchy_green_lambda(composed));
          }
          if (on_checkpoint) {
            on_checkpoint(st.n, st.t, st.seconds, st.clamp_events, user);
          }
        };
    isleflow::FlowRunRecord rec =
        isleflow::forward_flow_run(*model->field, g, axis, opt, obs);
    if (out_volume) *out_volume = new isle_volume{std::move(env)};
    if (out_map) *out_map = new isle_map{std::move(rec.final_map)};
  });
}

isle_status isle_run_forward_map(const isle_model* model, isle_grid_spec grid,
                                 double t0, double t_end,
                                 int64_t n_checkpoints,
                                 const isle_run_config* config,
                                 isle_checkpoint_fn on_checkpoint, void* user,
                                 isle_map** out_map) {
  return wrap([&] {
    require(model != nullptr, "null model");
    const isleflow::Grid2D g = to_grid(grid);
    const isleflow::RunOptions opt = to_options(config);
    const isleflow::TimeAxis axis =
        resolve_axis(*model->field, g, t0, t_end, n_checkpoints, opt);
    isleflow::FlowRunRecord rec = isleflow::forward_flow_run(
        *model->field, g, axis, opt, forward_callback(on_checkpoint, user));
    if (out_map) *out_map = new isle_map{std::move(rec.final_map)};
  });
}

isle_status isle_run_legacy_map(const isle_model* model, isle_grid_spec grid,
                                double t0, double t_end,
                                const isle_run_config* config,
                                isle_map** out_map) {
  return wrap([&] {
    require(model != nullptr && out_map != nullptr, "null argument");
    const isleflow::Grid2D g = to_grid(grid);
    const isleflow::RunOptions opt = to_options(config);
    isleflow::FlowMap2D m = isleflow::legacy_full_map(
        *model->field, g, t0, t_end, opt.scheme, opt.cfl);
    *out_map = new isle_map{std::move(m)};
  });
}

isle_status isle_run_legacy_checkpoints(const isle_model* model,
                                        isle_grid_spec grid, double t0,
                                        double t_end, int64_t n_checkpoints,
                                        const isle_run_config* config,
                                        isle_checkpoint_fn on_checkpoint,
                                        void* user, isle_map** out_map) {
  return wrap([&] {
    require(model != nullptr, "null model");
    require(n_checkpoints > 0, "legacy checkpoint schedule needs a count");
    const isleflow::Grid2D g = to_grid(grid);
    const isleflow::RunOptions opt = to_options(config);
    const isleflow::TimeAxis axis =
        isleflow::TimeAxis::create(t0, t_end, n_checkpoints);
    isleflow::FlowRunRecord rec = isleflow::legacy_checkpoint_run(
        *model->field, g, axis, opt, forward_callback(on_checkpoint, user));
    if (out_map) *out_map = new isle_map{std::move(rec.final_map)};
  });
}

isle_status isle_trace(const isle_model* model, double x0, double y0,
                       double t0, double t_end, double dt_max, double* x_out,
                       double* y_out, int* ok_out) {
  return wrap([&] {
    require(model != nullptr && x_out != nullptr && y_out != nullptr,
            "null argument");
    const isleflow::TraceResult tr =
        isleflow::lagrangian_trace(*model->field, {{x0, y0}}, t0, t_end,
                                   dt_max);
    *x_out = tr.positions[0].x;
    *y_out = tr.positions[0].y;
    if (ok_out) *ok_out = tr.ok[0] ? 1 : 0;
  });
}

isle_status isle_trace_reference_map(const isle_model* model,
                                     isle_grid_spec grid, double t0,
                                     double t_end, double dt_max,
                                     isle_map** out_map) {
  return wrap([&] {
    require(model != nullptr && out_map != nullptr, "null argument");
    const isleflow::Grid2D g = to_grid(grid);
    isleflow::ArrivalFields ref =
        isleflow::trace_reference_map(*model->field, g, t0, t_end, dt_max);
    require(ref.failed == 0, "reference tracing lost seeds to overflow");
    *out_map = new isle_map{isleflow::FlowMap2D::from_arrival_fields(
        std::move(ref.x), std::move(ref.y))};
  });
}

/* ------------------------------------------------------------------ */

isle_status isle_map_grid(const isle_map* map, isle_grid_spec* out) {
  return wrap([&] {
    require(map != nullptr && out != nullptr, "null argument");
    *out = to_spec(map->map.grid());
  });
}

isle_status isle_map_arrival_x(const isle_map* map, const double** out) {
  return wrap([&] {
    require(map != nullptr && out != nullptr, "null argument");
    *out = map->map.arrival_x().values().data();
  });
}

isle_status isle_map_arrival_y(const isle_map* map, const double** out) {
  return wrap([&] {
    require(map != nullptr && out != nullptr, "null argument");
    *out = map->map.arrival_y().values().data();
  });
}

isle_status isle_map_clamp_events(const isle_map* map, uint64_t* out) {
  return wrap([&] {
    require(map != nullptr && out != nullptr, "null argument");
    *out = map->map.clamp_events();
  });
}

isle_status isle_map_lambda(const isle_map* map, isle_field** out) {
  return wrap([&] {
    require(map != nullptr && out != nullptr, "null argument");
    *out = new isle_field{isleflow::cauchy_green_lambda(map->map)};
  });
}

isle_status isle_map_ftle(const isle_map* map, double t, isle_field** out) {
  return wrap([&] {
    require(map != nullptr && out != nullptr, "null argument");
    *out = new isle_field{
        isleflow::ftle(isleflow::cauchy_green_lambda(map->map), t)};
  });
}

isle_status isle_map_save(const isle_map* map, const char* path) {
  return wrap([&] {
    require(map != nullptr && path != nullptr, "null argument");
    isleflow::save_map(path, map->map);
  });
}

isle_status isle_map_load(const char* path, isle_map** out) {
  return wrap([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new isle_map{isleflow::load_map(path)};
  });
}

void isle_map_free(isle_map* map) { delete map; }

isle_status isle_map_relative_l2(const isle_map* a, const isle_map* b,
                                 int band, double* x_err, double* y_err) {
  return wrap([&] {
    require(a != nullptr && b != nullptr, "null argument");
    const isleflow::ComponentErrors e =
        isleflow::relative_l2_map_components(a->map, b->map, band);
    if (x_err) *x_err = e.x;
    if (y_err) *y_err = e.y;
  });
}

isle_status isle_field_relative_l2(const isle_field* a, const isle_field* b,
                                   int band, double* out) {
  return wrap([&] {
    require(a != nullptr && b != nullptr && out != nullptr, "null argument");
    *out = isleflow::relative_l2_field(a->field, b->field, band);
  });
}

isle_status isle_fit_loglog_slope(const double* h, const double* err,
                                  int64_t n, double* slope_out) {
  return wrap([&] {
    require(h != nullptr && err != nullptr && slope_out != nullptr,
            "null argument");
    require(n >= 2, "slope fit needs at least two pairs");
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    for (int64_t k = 0; k < n; ++k) pairs.push_back({h[k], err[k]});
    *slope_out = isleflow::fit_loglog_slope(pairs);
  });
}

/* ------------------------------------------------------------------ */

isle_status isle_field_grid(const isle_field* field, isle_grid_spec* out) {
  return wrap([&] {
    require(field != nullptr && out != nullptr, "null argument");
    *out = to_spec(field->field.grid());
  });
}

isle_status isle_field_data(const isle_field* field, const double** out) {
  return wrap([&] {
    require(field != nullptr && out != nullptr, "null argument");
    *out = field->field.values().data();
  });
}

isle_status isle_field_minmax(const isle_field* field, double* min_out,
                              double* max_out) {
  return wrap([&] {
    require(field != nullptr, "null field");
    double lo = field->field.values()[0];
    double hi = lo;
    for (double v : field->field.values()) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    if (min_out) *min_out = lo;
    if (max_out) *max_out = hi;
  });
}

isle_status isle_field_clamp_negative(isle_field* field) {
  return wrap([&] {
    require(field != nullptr, "null field");
    for (double& v : field->field.values()) {
      if (v < 0.0) v = 0.0;
    }
  });
}

isle_status isle_field_replace_nan(isle_field* field, double value) {
  return wrap([&] {
    require(field != nullptr, "null field");
    for (double& v : field->field.values()) {
      if (std::isnan(v)) v = value;
    }
  });
}

isle_status isle_field_save(const isle_field* field, const char* path) {
  return wrap([&] {
    require(field != nullptr && path != nullptr, "null argument");
    isleflow::save_field(path, field->field);
  });
}

isle_status isle_field_load(const char* path, isle_field** out) {
  return wrap([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new isle_field{isleflow::load_field(path)};
  });
}

isle_status isle_field_save_text(const isle_field* field, const char* path) {
  return wrap([&] {
    require(field != nullptr && path != nullptr, "null argument");
    isleflow::save_field_text(path, field->field);
  });
}

isle_status isle_field_load_text(const char* path, isle_field** out) {
  return wrap([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new isle_field{isleflow::load_field_text(path)};
  });
}

isle_status isle_field_save_pgm16(const isle_field* field, const char* path) {
  return wrap([&] {
    require(field != nullptr && path != nullptr, "null argument");
    isleflow::save_pgm16(path, field->field);
  });
}

void isle_field_free(isle_field* field) { delete field; }

/* ------------------------------------------------------------------ */

isle_status isle_volume_info(const isle_volume* volume, isle_grid_spec* grid,
                             double* t0, double* t_end,
                             int64_t* n_checkpoints) {
  return wrap([&] {
    require(volume != nullptr, "null volume");
    if (grid) *grid = to_spec(volume->envelope.grid());
    if (t0) *t0 = volume->envelope.axis().t0;
    if (t_end) *t_end = volume->envelope.axis().t_end;
    if (n_checkpoints) *n_checkpoints = volume->envelope.axis().n_steps;
  });
}

isle_status isle_volume_frame(const isle_volume* volume, int64_t n,
                              const double** out) {
  return wrap([&] {
    require(volume != nullptr && out != nullptr, "null argument");
    *out = volume->envelope.frame(n).data();
  });
}

isle_status isle_volume_extract(const isle_volume* volume, double r,
                                isle_field** gamma_out, isle_field** tau_out) {
  return wrap([&] {
    require(volume != nullptr, "null volume");
    isleflow::IsleField f = isleflow::isle(volume->envelope, r);
    if (gamma_out) *gamma_out = new isle_field{std::move(f.gamma)};
    if (tau_out) *tau_out = new isle_field{std::move(f.tau)};
  });
}

isle_status isle_volume_ftle(const isle_volume* volume, isle_field** out) {
  return wrap([&] {
    require(volume != nullptr && out != nullptr, "null argument");
    require(volume->envelope.complete(), "envelope incomplete");
    const isleflow::TimeAxis& ax = volume->envelope.axis();
    require(ax.duration() != 0.0, "zero-length time axis");
    const std::vector<double>& last = volume->envelope.frame(ax.n_steps);
    isleflow::ScalarField2D sigma(volume->envelope.grid());
    const double inv = 1.0 / std::abs(ax.duration());
    // Floor matches the eigenvalue floor: sqrt(1e-14).
    const double floor_s = 1e-7;
    for (std::size_t p = 0; p < last.size(); ++p) {
      const double s = last[p] < floor_s ? floor_s : last[p];
      sigma.values()[p] = std::log(s) * inv;
    }
    *out = new isle_field{std::move(sigma)};
  });
}

isle_status isle_volume_save(const isle_volume* volume, const char* path,
                             int64_t thin_stride) {
  return wrap([&] {
    require(volume != nullptr && path != nullptr, "null argument");
    isleflow::save_volume(path, volume->envelope,
                          thin_stride < 1 ? 1 : thin_stride);
  });
}

isle_status isle_volume_load(const char* path, isle_volume** out) {
  return wrap([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new isle_volume{isleflow::load_volume(path)};
  });
}

void isle_volume_free(isle_volume* volume) { delete volume; }

/* ------------------------------------------------------------------ */

isle_status isle_field_detect_ridges(const isle_field* field,
                                     double percentile, int band,
                                     int smoothing_radius, isle_ridges** out) {
  return wrap([&] {
    require(field != nullptr && out != nullptr, "null argument");
    const double p = percentile <= 0.0 ? 90.0 : percentile;
    const int b = band <= 0 ? 3 : band;
    const int s = smoothing_radius < 0 ? 1 : smoothing_radius;
    isleflow::RidgeSet set = isleflow::detect_ridges(field->field, p, b, s);
    *out = new isle_ridges{field->field.grid(), std::move(set)};
  });
}

isle_status isle_ridges_dominant(const isle_ridges* ridges,
                                 isle_ridges** out) {
  return wrap([&] {
    require(ridges != nullptr && out != nullptr, "null argument");
    *out = new isle_ridges{ridges->grid,
                           isleflow::dominant_component(ridges->set)};
  });
}

isle_status isle_ridges_count(const isle_ridges* ridges, int64_t* out) {
  return wrap([&] {
    require(ridges != nullptr && out != nullptr, "null argument");
    *out = static_cast<int64_t>(ridges->set.points.size());
  });
}

isle_status isle_ridges_point(const isle_ridges* ridges, int64_t k,
                              int64_t* i, int64_t* j, double* value,
                              double* normal_x, double* normal_y,
                              int* component) {
  return wrap([&] {
    require(ridges != nullptr, "null ridges");
    if (k < 0 || k >= static_cast<int64_t>(ridges->set.points.size())) {
      throw isleflow::Error(isleflow::ErrorCode::OutOfRange,
                            "ridge point index out of range");
    }
    const isleflow::RidgePoint& p =
        ridges->set.points[static_cast<std::size_t>(k)];
    if (i) *i = p.i;
    if (j) *j = p.j;
    if (value) *value = p.value;
    if (normal_x) *normal_x = p.normal_x;
    if (normal_y) *normal_y = p.normal_y;
    if (component) *component = p.component;
  });
}

isle_status isle_ridges_threshold(const isle_ridges* ridges, double* out) {
  return wrap([&] {
    require(ridges != nullptr && out != nullptr, "null argument");
    *out = ridges->set.threshold;
  });
}

isle_status isle_ridges_min_over(const isle_ridges* ridges,
                                 const isle_field* field, double* out) {
  return wrap([&] {
    require(ridges != nullptr && field != nullptr && out != nullptr,
            "null argument");
    require(field->field.grid().same_layout(ridges->grid),
            "field grid differs from the ridge grid");
    *out = isleflow::ridge_min(field->field, ridges->set);
  });
}

isle_status isle_ridges_save_text(const isle_ridges* ridges,
                                  const char* path) {
  return wrap([&] {
    require(ridges != nullptr && path != nullptr, "null argument");
    isleflow::save_ridges_text(path, ridges->grid, ridges->set);
  });
}

isle_status isle_ridges_tube_positivity(const isle_ridges* ridges,
                                        const isle_volume* volume, double r,
                                        double rho, double* fraction_out,
                                        double* m_out, int* ok_out) {
  return wrap([&] {
    require(ridges != nullptr && volume != nullptr, "null argument");
    require(volume->envelope.grid().same_layout(ridges->grid),
            "volume grid differs from the ridge grid");
    const isleflow::TubePositivityReport rep =
        isleflow::check_tube_positivity(volume->envelope, ridges->set, r, rho);
    if (fraction_out) *fraction_out = rep.fraction;
    if (m_out) *m_out = rep.m;
    if (ok_out) *ok_out = rep.precondition_ok ? 1 : 0;
  });
}

isle_status isle_ridges_suggest_factor(const isle_ridges* ridges,
                                       const isle_field* sigma, double t,
                                       double rate, double* r_out,
                                       int* ok_out) {
  return wrap([&] {
    require(ridges != nullptr && sigma != nullptr && r_out != nullptr,
            "null argument");
    require(sigma->field.grid().same_layout(ridges->grid),
            "field grid differs from the ridge grid");
    const isleflow::SeparationSuggestion s =
        isleflow::suggest_separation_factor(sigma->field, ridges->set, t,
                                            rate);
    *r_out = s.r;
    if (ok_out) *ok_out = s.rate_ok ? 1 : 0;
  });
}

void isle_ridges_free(isle_ridges* ridges) { delete ridges; }

}  // extern "C"
