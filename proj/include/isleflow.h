/* C interface to the flow-diagnostics engine: velocity models, forward
 * flow-map runs with separation-envelope capture, FTLE and separation
 * exponent extraction, ridge detection, and the on-disk formats.
 *
 * Every function that can fail returns an isle_status; ISLE_OK is 0.
 * isle_last_error() describes the most recent failure on the calling
 * thread. Objects returned through out-parameters are owned by the caller
 * and released with the matching isle_*_free function; free functions
 * accept null.
 */
#ifndef ISLEFLOW_H
#define ISLEFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum isle_status {
  ISLE_OK = 0,
  ISLE_INVALID_ARGUMENT = 1,
  ISLE_SOLVER = 2,
  ISLE_IO = 3,
  ISLE_FORMAT = 4,
  ISLE_OUT_OF_RANGE = 5,
  ISLE_CFL = 6
} isle_status;

/* Message for the most recent failure on this thread; never null. */
const char* isle_last_error(void);

const char* isle_version(void);

typedef struct isle_model isle_model;
typedef struct isle_map isle_map;
typedef struct isle_field isle_field;
typedef struct isle_volume isle_volume;
typedef struct isle_ridges isle_ridges;

/* Uniform vertex-centered grid on [x_min, x_max] x [y_min, y_max]; nodes
 * sit on the boundary, spacing (x_max - x_min) / (nx - 1). Fields and maps
 * are stored row-major with x fastest. */
typedef struct isle_grid_spec {
  double x_min;
  double x_max;
  double y_min;
  double y_max;
  int64_t nx;
  int64_t ny;
} isle_grid_spec;

/* ------------------------------------------------------------------ */
/* Velocity models                                                     */

isle_status isle_model_double_gyre(double amplitude, double eps, double omega,
                                   isle_model** out);
isle_status isle_model_quad_saddle(isle_model** out);
isle_status isle_model_duffing_vdp(isle_model** out);
/* Loads a gridded velocity set from its text header file. */
isle_status isle_model_gridded(const char* header_path, isle_model** out);
void isle_model_free(isle_model* model);

/* Natural domain box of the model. Fails for models without one. */
isle_status isle_model_domain(const isle_model* model, isle_grid_spec* out);

/* One velocity sample. */
isle_status isle_model_sample(const isle_model* model, double x, double y,
                              double t, double* u, double* v);

/* ------------------------------------------------------------------ */
/* Runs                                                                */

typedef struct isle_run_config {
  /* 0 = one explicit update per substep, 1 = two-stage update (default). */
  int scheme;
  /* Advective CFL number; <= 0 selects the default 0.5. */
  double cfl;
  /* Exact substeps per checkpoint interval; 0 derives the minimal count
   * from the CFL bound. */
  int substeps_per_checkpoint;
  /* Time samples per interval when bounding speeds; 0 selects 3. */
  int speed_time_samples;
} isle_run_config;

/* Per-checkpoint progress callback: checkpoint index n (1-based), its time,
 * wall-clock seconds spent on it, and cumulative arrival-clamp events. */
typedef void (*isle_checkpoint_fn)(int n, double t, double seconds,
                                   uint64_t clamp_events, void* user);

/* Forward flow-map run over n_checkpoints equal intervals, folding every
 * composed map into a separation envelope. n_checkpoints <= 0 derives the
 * count from the CFL bound (one substep per checkpoint). config may be
 * null for defaults; callback may be null. Either out pointer may be null
 * when that product is not needed. */
isle_status isle_simulate(const isle_model* model, isle_grid_spec grid,
                          double t0, double t_end, int64_t n_checkpoints,
                          const isle_run_config* config,
                          isle_checkpoint_fn on_checkpoint, void* user,
                          isle_volume** out_volume, isle_map** out_map);

/* Same run without envelope capture; returns only the final composed map. */
isle_status isle_run_forward_map(const isle_model* model, isle_grid_spec grid,
                                 double t0, double t_end,
                                 int64_t n_checkpoints,
                                 const isle_run_config* config,
                                 isle_checkpoint_fn on_checkpoint, void* user,
                                 isle_map** out_map);

/* Whole-interval backward solve with no composition (the quadratic-cost
 * reference scheme). */
isle_status isle_run_legacy_map(const isle_model* model, isle_grid_spec grid,
                                double t0, double t_end,
                                const isle_run_config* config,
                                isle_map** out_map);

/* Legacy checkpoint schedule: rebuilds the map over [t0, t_n] from scratch
 * for every n. Only the final map is returned; per-checkpoint timing
 * arrives through the callback. */
isle_status isle_run_legacy_checkpoints(const isle_model* model,
                                        isle_grid_spec grid, double t0,
                                        double t_end, int64_t n_checkpoints,
                                        const isle_run_config* config,
                                        isle_checkpoint_fn on_checkpoint,
                                        void* user, isle_map** out_map);

/* Fourth-order Lagrangian point trace (independent of the grid solver). */
isle_status isle_trace(const isle_model* model, double x0, double y0,
                       double t0, double t_end, double dt_max, double* x_out,
                       double* y_out, int* ok_out);

/* Traces every grid node with the Lagrangian integrator and packages the
 * arrivals as a flow map (clamped to the domain box like any map). This is
 * the reference the-grid-solver-is-checked-against. */
isle_status isle_trace_reference_map(const isle_model* model,
                                     isle_grid_spec grid, double t0,
                                     double t_end, double dt_max,
                                     isle_map** out_map);

/* ------------------------------------------------------------------ */
/* Flow maps                                                           */

isle_status isle_map_grid(const isle_map* map, isle_grid_spec* out);
/* Borrowed pointers into the map, nx*ny doubles, valid until free. */
isle_status isle_map_arrival_x(const isle_map* map, const double** out);
isle_status isle_map_arrival_y(const isle_map* map, const double** out);
isle_status isle_map_clamp_events(const isle_map* map, uint64_t* out);

/* Largest Cauchy-Green eigenvalue field of the map. */
isle_status isle_map_lambda(const isle_map* map, isle_field** out);
/* FTLE field of the map over horizon t (t != 0). */
isle_status isle_map_ftle(const isle_map* map, double t, isle_field** out);

isle_status isle_map_save(const isle_map* map, const char* path);
isle_status isle_map_load(const char* path, isle_map** out);
void isle_map_free(isle_map* map);

/* Relative L2 error of map a against reference b over interior nodes (band
 * cells skipped at each wall), per arrival component, scaled by the
 * reference displacement from the identity. */
isle_status isle_map_relative_l2(const isle_map* a, const isle_map* b,
                                 int band, double* x_err, double* y_err);

/* Relative L2 difference of two fields over interior nodes, ||a-b||/||b||. */
isle_status isle_field_relative_l2(const isle_field* a, const isle_field* b,
                                   int band, double* out);

/* Least-squares slope of log(err) against log(h) over n >= 2 pairs. */
isle_status isle_fit_loglog_slope(const double* h, const double* err,
                                  int64_t n, double* slope_out);

/* ------------------------------------------------------------------ */
/* Scalar fields                                                       */

isle_status isle_field_grid(const isle_field* field, isle_grid_spec* out);
/* Borrowed pointer to nx*ny doubles, row-major x fastest. */
isle_status isle_field_data(const isle_field* field, const double** out);
isle_status isle_field_minmax(const isle_field* field, double* min_out,
                              double* max_out);
/* Replaces negative values by zero (the display convention for
 * compression regions). */
isle_status isle_field_clamp_negative(isle_field* field);
/* Replaces NaN entries (absent markers) by the given value, for export
 * formats that cannot carry NaN. */
isle_status isle_field_replace_nan(isle_field* field, double value);

isle_status isle_field_save(const isle_field* field, const char* path);
isle_status isle_field_load(const char* path, isle_field** out);
isle_status isle_field_save_text(const isle_field* field, const char* path);
isle_status isle_field_load_text(const char* path, isle_field** out);
/* 16-bit graymap plus a ".meta" sidecar recording the min/max mapping. */
isle_status isle_field_save_pgm16(const isle_field* field, const char* path);
void isle_field_free(isle_field* field);

/* ------------------------------------------------------------------ */
/* Separation-envelope volumes                                         */

isle_status isle_volume_info(const isle_volume* volume, isle_grid_spec* grid,
                             double* t0, double* t_end,
                             int64_t* n_checkpoints);
/* Borrowed pointer to frame n (0..n_checkpoints), nx*ny doubles. */
isle_status isle_volume_frame(const isle_volume* volume, int64_t n,
                              const double** out);
/* Separation exponent and crossing-time fields for factor r > 1; tau
 * holds NaN where no crossing occurred and gamma is exactly 0 there.
 * Either out pointer may be null. */
isle_status isle_volume_extract(const isle_volume* volume, double r,
                                isle_field** gamma_out, isle_field** tau_out);
/* FTLE proxy from the envelope itself: ln(final frame) / |t_end - t0|.
 * The final frame is the running maximum of sqrt(lambda), so this matches
 * the map FTLE wherever stretching grows monotonically. */
isle_status isle_volume_ftle(const isle_volume* volume, isle_field** out);

/* thin_stride > 1 stores every thin_stride-th frame (count must divide). */
isle_status isle_volume_save(const isle_volume* volume, const char* path,
                             int64_t thin_stride);
isle_status isle_volume_load(const char* path, isle_volume** out);
void isle_volume_free(isle_volume* volume);

/* ------------------------------------------------------------------ */
/* Ridge detection                                                     */

/* Discrete generalized maxima of a field: nodes reaching the nearest-rank
 * percentile threshold that are strict local maxima along at least one
 * grid direction. band boundary cells are excluded (band >= 1);
 * smoothing_radius shapes only the Hessian normal estimates. Pass
 * percentile <= 0 for the default 90, band <= 0 for 3, smoothing < 0
 * for 1. */
isle_status isle_field_detect_ridges(const isle_field* field,
                                     double percentile, int band,
                                     int smoothing_radius, isle_ridges** out);
/* Keeps only the largest 8-connected component. */
isle_status isle_ridges_dominant(const isle_ridges* ridges, isle_ridges** out);
isle_status isle_ridges_count(const isle_ridges* ridges, int64_t* out);
isle_status isle_ridges_point(const isle_ridges* ridges, int64_t k,
                              int64_t* i, int64_t* j, double* value,
                              double* normal_x, double* normal_y,
                              int* component);
/* Realized detection threshold value. */
isle_status isle_ridges_threshold(const isle_ridges* ridges, double* out);
/* Minimum of an arbitrary field over the ridge points. */
isle_status isle_ridges_min_over(const isle_ridges* ridges,
                                 const isle_field* field, double* out);
isle_status isle_ridges_save_text(const isle_ridges* ridges,
                                  const char* path);
/* Fraction of nodes within distance rho of the ridge whose separation
 * exponent for factor r is positive, plus the precondition data: m is the
 * envelope's final value minimized over the ridge and ok_out reports
 * r < m. */
isle_status isle_ridges_tube_positivity(const isle_ridges* ridges,
                                        const isle_volume* volume, double r,
                                        double rho, double* fraction_out,
                                        double* m_out, int* ok_out);
/* r = e^{rate * t}; ok_out reports whether rate is below the ridge minimum
 * of the given exponent field (the suggestion is printed either way). */
isle_status isle_ridges_suggest_factor(const isle_ridges* ridges,
                                       const isle_field* sigma, double t,
                                       double rate, double* r_out,
                                       int* ok_out);
void isle_ridges_free(isle_ridges* ridges);

#ifdef __cplusplus
}
#endif

#endif /* ISLEFLOW_H */
