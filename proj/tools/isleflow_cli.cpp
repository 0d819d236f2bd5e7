// Command-line driver for the flow-diagnostics library. Verbs:
//   simulate     forward flow-map run, envelope volume + final map on disk
//   ftle         exponent field from a stored map or envelope volume
//   isle         separation exponent fields for a list of factors r
//   ridges       ridge detection on a stored field
//   convergence  flow-map error against the Lagrangian reference, slopes
//   bench        wall-clock scaling across grid sizes
//   trace        single Lagrangian particle trace
//
// Exit codes: 0 ok, 1 configuration, 2 solver, 3 file I/O or format.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isleflow.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIo = 3;

int exit_code_for(isle_status st) {
  switch (st) {
    case ISLE_OK:
      return 0;
    case ISLE_INVALID_ARGUMENT:
      return kExitConfig;
    case ISLE_CFL:
    case ISLE_SOLVER:
    case ISLE_OUT_OF_RANGE:
      return kExitSolver;
    case ISLE_IO:
    case ISLE_FORMAT:
      return kExitIo;
  }
  return kExitSolver;
}

// Prints the library error and returns the verb's exit code.
int fail(isle_status st, const std::string& context) {
  std::cerr << "error: " << context << ": " << isle_last_error() << "\n";
  return exit_code_for(st);
}

struct ModelHandle {
  isle_model* ptr = nullptr;
  ~ModelHandle() { isle_model_free(ptr); }
};

struct MapHandle {
  isle_map* ptr = nullptr;
  ~MapHandle() { isle_map_free(ptr); }
};

struct FieldHandle {
  isle_field* ptr = nullptr;
  ~FieldHandle() { isle_field_free(ptr); }
};

struct VolumeHandle {
  isle_volume* ptr = nullptr;
  ~VolumeHandle() { isle_volume_free(ptr); }
};

struct RidgesHandle {
  isle_ridges* ptr = nullptr;
  ~RidgesHandle() { isle_ridges_free(ptr); }
};

struct ModelArgs {
  std::string name = "double-gyre";
  double gyre_amplitude = 0.1;
  double gyre_eps = 0.1;
  double gyre_omega = 0.6283185307179586;  // one cycle per 10 time units
};

void add_model_options(CLI::App* cmd, ModelArgs& args) {
  cmd->add_option("--model", args.name,
                  "double-gyre | quad-saddle | duffing | gridded:<header>")
      ->capture_default_str();
  cmd->add_option("--gyre-amplitude", args.gyre_amplitude,
                  "double-gyre stream amplitude")
      ->capture_default_str();
  cmd->add_option("--gyre-eps", args.gyre_eps,
                  "double-gyre perturbation strength")
      ->capture_default_str();
  cmd->add_option("--gyre-omega", args.gyre_omega,
                  "double-gyre perturbation frequency")
      ->capture_default_str();
}

isle_status make_model(const ModelArgs& args, ModelHandle& out) {
  if (args.name == "double-gyre") {
    return isle_model_double_gyre(args.gyre_amplitude, args.gyre_eps,
                                  args.gyre_omega, &out.ptr);
  }
  if (args.name == "quad-saddle") return isle_model_quad_saddle(&out.ptr);
  if (args.name == "duffing") return isle_model_duffing_vdp(&out.ptr);
  const std::string prefix = "gridded:";
  if (args.name.rfind(prefix, 0) == 0) {
    return isle_model_gridded(args.name.substr(prefix.size()).c_str(),
                              &out.ptr);
  }
  std::cerr << "error: unknown model \"" << args.name << "\"\n";
  return ISLE_INVALID_ARGUMENT;
}

struct GridArgs {
  int64_t nx = 257;
  int64_t ny = 0;  // 0 = preserve the domain aspect ratio
  std::vector<double> domain;  // optional x_min,x_max,y_min,y_max override
};

void add_grid_options(CLI::App* cmd, GridArgs& args) {
  cmd->add_option("--nx", args.nx, "grid nodes along x")
      ->capture_default_str();
  cmd->add_option("--ny", args.ny,
                  "grid nodes along y (0 keeps the domain aspect ratio)")
      ->capture_default_str();
  cmd->add_option("--domain", args.domain,
                  "domain override x_min,x_max,y_min,y_max")
      ->delimiter(',')
      ->expected(0, 4);
}

int resolve_grid(const ModelHandle& model, const GridArgs& args,
                 isle_grid_spec& out) {
  isle_grid_spec spec{};
  if (args.domain.size() == 4) {
    spec.x_min = args.domain[0];
    spec.x_max = args.domain[1];
    spec.y_min = args.domain[2];
    spec.y_max = args.domain[3];
  } else if (!args.domain.empty()) {
    std::cerr << "error: --domain needs exactly 4 values\n";
    return kExitConfig;
  } else {
    const isle_status st = isle_model_domain(model.ptr, &spec);
    if (st != ISLE_OK) return fail(st, "model domain");
  }
  if (args.nx < 2) {
    std::cerr << "error: --nx must be at least 2\n";
    return kExitConfig;
  }
  spec.nx = args.nx;
  if (args.ny > 0) {
    spec.ny = args.ny;
  } else {
    const double aspect = (spec.y_max - spec.y_min) / (spec.x_max - spec.x_min);
    spec.ny =
        std::max<int64_t>(2, static_cast<int64_t>(std::llround(
                                 static_cast<double>(args.nx - 1) * aspect)) +
                                 1);
  }
  out = spec;
  return 0;
}

json grid_json(const isle_grid_spec& g) {
  return json{{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min},
              {"y_max", g.y_max}, {"nx", g.nx},       {"ny", g.ny}};
}

int write_summary(const std::string& out_dir, const json& summary) {
  const std::string path = out_dir + "/run_summary.json";
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return kExitIo;
  }
  out << summary.dump(2) << "\n";
  return 0;
}

int ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << dir << ": "
              << ec.message() << "\n";
    return kExitIo;
  }
  return 0;
}

struct CheckpointLog {
  bool verbose = true;
  int total = 0;
  double seconds_sum = 0.0;
  double seconds_max = 0.0;
  uint64_t final_clamps = 0;
  int count = 0;
};

void checkpoint_printer(int n, double t, double seconds, uint64_t clamps,
                        void* user) {
  auto* log = static_cast<CheckpointLog*>(user);
  log->seconds_sum += seconds;
  log->seconds_max = std::max(log->seconds_max, seconds);
  log->final_clamps = clamps;
  log->count = n;
  if (log->verbose) {
    std::printf("checkpoint %d/%d  t=%.6g  wall=%.3fs  clamped=%llu\n", n,
                log->total, t, seconds,
                static_cast<unsigned long long>(clamps));
    std::fflush(stdout);
  }
}

std::string format_r(double r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::vector<std::pair<int64_t, int64_t>> parse_grid_list(
    const std::string& text) {
  std::vector<std::pair<int64_t, int64_t>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) {
      throw CLI::ValidationError("--grids", "expected entries like 129x65");
    }
    out.push_back({std::stoll(item.substr(0, x)), std::stoll(item.substr(x + 1))});
  }
  return out;
}

// ------------------------------------------------------------------
// simulate

struct SimulateArgs {
  ModelArgs model;
  GridArgs grid;
  double t0 = 0.0;
  double t_end = 0.0;
  int64_t checkpoints = 0;
  std::string scheme = "rk2";
  double cfl = 0.5;
  int substeps = 0;
  int64_t thin = 1;
  std::string out_dir = ".";
  bool quiet = false;
};

int run_simulate(const SimulateArgs& a) {
  ModelHandle model;
  isle_status st = make_model(a.model, model);
  if (st != ISLE_OK) {
    return st == ISLE_INVALID_ARGUMENT && !model.ptr ? kExitConfig
                                                     : fail(st, "model");
  }
  isle_grid_spec grid{};
  if (int rc = resolve_grid(model, a.grid, grid)) return rc;
  if (!(a.t_end > a.t0)) {
    std::cerr << "error: --T must exceed --t0\n";
    return kExitConfig;
  }
  if (int rc = ensure_out_dir(a.out_dir)) return rc;

  isle_run_config cfg{};
  cfg.scheme = a.scheme == "euler" ? 0 : 1;
  cfg.cfl = a.cfl;
  cfg.substeps_per_checkpoint = a.substeps;
  cfg.speed_time_samples = 0;

  CheckpointLog log;
  log.verbose = !a.quiet;
  log.total = static_cast<int>(a.checkpoints);

  VolumeHandle volume;
  MapHandle map;
  const auto begin = std::chrono::steady_clock::now();
  st = isle_simulate(model.ptr, grid, a.t0, a.t_end, a.checkpoints, &cfg,
                     checkpoint_printer, &log, &volume.ptr, &map.ptr);
  if (st != ISLE_OK) return fail(st, "simulate");
  const double total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - begin)
          .count();

  const std::string volume_path = a.out_dir + "/volume.isvol";
  const std::string map_path = a.out_dir + "/final_map.ismap";
  st = isle_volume_save(volume.ptr, volume_path.c_str(), a.thin);
  if (st != ISLE_OK) return fail(st, "saving " + volume_path);
  st = isle_map_save(map.ptr, map_path.c_str());
  if (st != ISLE_OK) return fail(st, "saving " + map_path);

  int64_t n_checkpoints = 0;
  isle_volume_info(volume.ptr, nullptr, nullptr, nullptr, &n_checkpoints);
  uint64_t clamps = 0;
  isle_map_clamp_events(map.ptr, &clamps);
  std::printf("done: %lld checkpoints, %.3fs total, %llu arrivals clamped\n",
              static_cast<long long>(n_checkpoints), total_seconds,
              static_cast<unsigned long long>(clamps));

  json summary = {
      {"tool", "isleflow"},
      {"version", isle_version()},
      {"verb", "simulate"},
      {"model", a.model.name},
      {"grid", grid_json(grid)},
      {"t0", a.t0},
      {"t_end", a.t_end},
      {"checkpoints", n_checkpoints},
      {"scheme", a.scheme},
      {"cfl", a.cfl},
      {"substeps_per_checkpoint", a.substeps},
      {"thin_stride", a.thin},
      {"seconds_total", total_seconds},
      {"seconds_checkpoint_mean",
       log.count > 0 ? log.seconds_sum / log.count : 0.0},
      {"seconds_checkpoint_max", log.seconds_max},
      {"clamp_events", clamps},
      {"outputs", {volume_path, map_path}},
  };
  return write_summary(a.out_dir, summary);
}

// ------------------------------------------------------------------
// ftle

struct FtleArgs {
  std::string map_path;
  std::string volume_path;
  double t = 0.0;
  bool has_t = false;
  bool clamp_negative = false;
  std::string out_dir = ".";
};

int run_ftle(const FtleArgs& a) {
  if (a.map_path.empty() == a.volume_path.empty()) {
    std::cerr << "error: pass exactly one of --map or --volume\n";
    return kExitConfig;
  }
  if (int rc = ensure_out_dir(a.out_dir)) return rc;

  FieldHandle sigma;
  json source;
  if (!a.map_path.empty()) {
    if (!a.has_t) {
      std::cerr << "error: --map input needs the horizon --t\n";
      return kExitConfig;
    }
    if (a.t == 0.0) {
      std::cerr << "error: --t must be nonzero\n";
      return kExitConfig;
    }
    MapHandle map;
    isle_status st = isle_map_load(a.map_path.c_str(), &map.ptr);
    if (st != ISLE_OK) return fail(st, "loading " + a.map_path);
    st = isle_map_ftle(map.ptr, a.t, &sigma.ptr);
    if (st != ISLE_OK) return fail(st, "exponent field");
    source = {{"map", a.map_path}, {"t", a.t}};
  } else {
    VolumeHandle volume;
    isle_status st = isle_volume_load(a.volume_path.c_str(), &volume.ptr);
    if (st != ISLE_OK) return fail(st, "loading " + a.volume_path);
    double t0 = 0.0, t_end = 0.0;
    isle_volume_info(volume.ptr, nullptr, &t0, &t_end, nullptr);
    if (a.has_t && std::abs((t_end - t0) - a.t) > 1e-9 * std::abs(t_end - t0)) {
      std::cerr << "error: --t " << a.t
                << " does not match the volume horizon " << (t_end - t0)
                << "\n";
      return kExitConfig;
    }
    st = isle_volume_ftle(volume.ptr, &sigma.ptr);
    if (st != ISLE_OK) return fail(st, "exponent field");
    source = {{"volume", a.volume_path},
              {"t", t_end - t0},
              {"note", "exponent of the envelope's final frame (running "
                       "maximum of the stretch ratio)"}};
  }

  if (a.clamp_negative) isle_field_clamp_negative(sigma.ptr);

  const std::string bin_path = a.out_dir + "/ftle.isfld";
  const std::string txt_path = a.out_dir + "/ftle.txt";
  const std::string pgm_path = a.out_dir + "/ftle.pgm";
  isle_status st = isle_field_save(sigma.ptr, bin_path.c_str());
  if (st != ISLE_OK) return fail(st, "saving " + bin_path);
  st = isle_field_save_text(sigma.ptr, txt_path.c_str());
  if (st != ISLE_OK) return fail(st, "saving " + txt_path);
  st = isle_field_save_pgm16(sigma.ptr, pgm_path.c_str());
  if (st != ISLE_OK) return fail(st, "saving " + pgm_path);

  double lo = 0.0, hi = 0.0;
  isle_field_minmax(sigma.ptr, &lo, &hi);
  std::printf("ftle range [%.6g, %.6g]%s\n", lo, hi,
              a.clamp_negative ? " (negatives clamped)" : "");

  json summary = {
      {"tool", "isleflow"},
      {"version", isle_version()},
      {"verb", "ftle"},
      {"source", source},
      {"clamp_negative", a.clamp_negative},
      {"min", lo},
      {"max", hi},
      {"outputs", {bin_path, txt_path, pgm_path, pgm_path + ".meta"}},
  };
  return write_summary(a.out_dir, summary);
}

// ------------------------------------------------------------------
// isle

struct IsleArgs {
  std::string volume_path;
  std::vector<double> r_values;
  std::string out_dir = ".";
};

int run_isle(const IsleArgs& a) {
  if (a.volume_path.empty() || a.r_values.empty()) {
    std::cerr << "error: need --volume and at least one --r value\n";
    return kExitConfig;
  }
  if (int rc = ensure_out_dir(a.out_dir)) return rc;

  VolumeHandle volume;
  isle_status st = isle_volume_load(a.volume_path.c_str(), &volume.ptr);
  if (st != ISLE_OK) return fail(st, "loading " + a.volume_path);

  json per_r = json::array();
  std::vector<std::string> outputs;
  int succeeded = 0;
  for (double r : a.r_values) {
    FieldHandle gamma, tau;
    st = isle_volume_extract(volume.ptr, r, &gamma.ptr, &tau.ptr);
    if (st != ISLE_OK) {
      std::cerr << "warning: r=" << format_r(r) << " rejected: "
                << isle_last_error() << "\n";
      per_r.push_back({{"r", r}, {"status", "rejected"},
                       {"reason", isle_last_error()}});
      continue;
    }
    double gmax = 0.0;
    isle_field_minmax(gamma.ptr, nullptr, &gmax);
    if (gmax == 0.0) {
      std::printf("warning: r=%s exceeds the envelope everywhere; "
                  "exponent field is identically zero\n",
                  format_r(r).c_str());
    }

    const std::string tag = a.out_dir + "/isle_r" + format_r(r);
    const std::string gamma_bin = tag + "_gamma.isfld";
    const std::string gamma_txt = tag + "_gamma.txt";
    const std::string gamma_pgm = tag + "_gamma.pgm";
    const std::string tau_bin = tag + "_tau.isfld";
    const std::string tau_txt = tag + "_tau.txt";
    st = isle_field_save(gamma.ptr, gamma_bin.c_str());
    if (st != ISLE_OK) return fail(st, "saving " + gamma_bin);
    st = isle_field_save_text(gamma.ptr, gamma_txt.c_str());
    if (st != ISLE_OK) return fail(st, "saving " + gamma_txt);
    st = isle_field_save_pgm16(gamma.ptr, gamma_pgm.c_str());
    if (st != ISLE_OK) return fail(st, "saving " + gamma_pgm);
    // The binary tau keeps NaN as the absent marker; the text and image
    // exports use -1 instead (no crossing never has a negative time).
    st = isle_field_save(tau.ptr, tau_bin.c_str());
    if (st != ISLE_OK) return fail(st, "saving " + tau_bin);
    isle_field_replace_nan(tau.ptr, -1.0);
    st = isle_field_save_text(tau.ptr, tau_txt.c_str());
    if (st != ISLE_OK) return fail(st, "saving " + tau_txt);

    for (const auto& p :
         {gamma_bin, gamma_txt, gamma_pgm, tau_bin, tau_txt}) {
      outputs.push_back(p);
    }
    per_r.push_back({{"r", r},
                     {"status", "ok"},
                     {"gamma_max", gmax},
                     {"all_zero", gmax == 0.0}});
    std::printf("r=%s: gamma max %.6g\n", format_r(r).c_str(), gmax);
    ++succeeded;
  }

  json summary = {
      {"tool", "isleflow"},       {"version", isle_version()},
      {"verb", "isle"},           {"volume", a.volume_path},
      {"factors", per_r},         {"outputs", outputs},
      {"tau_absent_marker", -1.0},
  };
  if (int rc = write_summary(a.out_dir, summary)) return rc;
  return succeeded > 0 ? 0 : kExitConfig;
}

// ------------------------------------------------------------------
// ridges

struct RidgesArgs {
  std::string field_path;
  double percentile = 90.0;
  int band = 3;
  int smoothing = 1;
  bool dominant = false;
  double suggest_rate = 0.0;
  bool has_suggest = false;
  double suggest_t = 0.0;
  std::string out_dir = ".";
};

int run_ridges(const RidgesArgs& a) {
  if (a.field_path.empty()) {
    std::cerr << "error: need --field\n";
    return kExitConfig;
  }
  if (int rc = ensure_out_dir(a.out_dir)) return rc;

  FieldHandle field;
  isle_status st = isle_field_load(a.field_path.c_str(), &field.ptr);
  if (st != ISLE_OK) return fail(st, "loading " + a.field_path);

  RidgesHandle all;
  st = isle_field_detect_ridges(field.ptr, a.percentile, a.band, a.smoothing,
                                &all.ptr);
  if (st != ISLE_OK) return fail(st, "ridge detection");

  RidgesHandle dominant;
  isle_ridges* active = all.ptr;
  if (a.dominant) {
    st = isle_ridges_dominant(all.ptr, &dominant.ptr);
    if (st != ISLE_OK) return fail(st, "dominant component");
    active = dominant.ptr;
  }

  int64_t count = 0;
  double threshold = 0.0;
  isle_ridges_count(active, &count);
  isle_ridges_threshold(active, &threshold);

  const std::string ridges_path = a.out_dir + "/ridges.txt";
  st = isle_ridges_save_text(active, ridges_path.c_str());
  if (st != ISLE_OK) return fail(st, "saving " + ridges_path);

  std::printf("ridge points: %lld (threshold %.6g)\n",
              static_cast<long long>(count), threshold);

  json summary = {
      {"tool", "isleflow"},
      {"version", isle_version()},
      {"verb", "ridges"},
      {"field", a.field_path},
      {"percentile", a.percentile},
      {"band", a.band},
      {"smoothing_radius", a.smoothing},
      {"dominant_only", a.dominant},
      {"points", count},
      {"threshold", threshold},
      {"outputs", {ridges_path}},
  };

  if (a.has_suggest) {
    if (count == 0) {
      std::cerr << "error: factor suggestion needs a nonempty ridge set\n";
      return kExitConfig;
    }
    double r = 0.0;
    int ok = 0;
    st = isle_ridges_suggest_factor(active, field.ptr, a.suggest_t,
                                    a.suggest_rate, &r, &ok);
    if (st != ISLE_OK) return fail(st, "factor suggestion");
    double ridge_floor = 0.0;
    isle_ridges_min_over(active, field.ptr, &ridge_floor);
    std::printf("suggested separation factor: r = e^(%g * %g) = %.6g\n",
                a.suggest_rate, a.suggest_t, r);
    if (!ok) {
      std::printf("warning: rate %g is not below the ridge minimum %.6g; "
                  "the e^(l t) bound is not guaranteed\n",
                  a.suggest_rate, ridge_floor);
    }
    summary["suggestion"] = {{"rate", a.suggest_rate},
                             {"t", a.suggest_t},
                             {"r", r},
                             {"rate_ok", ok != 0},
                             {"ridge_min", ridge_floor}};
  }
  return write_summary(a.out_dir, summary);
}

// ------------------------------------------------------------------
// convergence

struct ConvergenceArgs {
  ModelArgs model;
  std::string grids = "33x17,65x33,129x65,257x129";
  double t0 = 0.0;
  double t_end = 10.0;
  int64_t checkpoints = 100;
  double ref_dt = 1e-3;
  int band = 3;
  std::string scheme = "rk2";
  double cfl = 0.5;
  std::string out_dir = ".";
};

int run_convergence(const ConvergenceArgs& a) {
  std::vector<std::pair<int64_t, int64_t>> grids;
  try {
    grids = parse_grid_list(a.grids);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (grids.size() < 3) {
    std::cerr << "error: slope fitting needs at least 3 grids\n";
    return kExitConfig;
  }
  if (int rc = ensure_out_dir(a.out_dir)) return rc;

  ModelHandle model;
  isle_status st = make_model(a.model, model);
  if (st != ISLE_OK) return kExitConfig;
  isle_grid_spec domain{};
  st = isle_model_domain(model.ptr, &domain);
  if (st != ISLE_OK) return fail(st, "model domain");

  isle_run_config cfg{};
  cfg.scheme = a.scheme == "euler" ? 0 : 1;
  cfg.cfl = a.cfl;

  std::vector<double> hs, ex, ey;
  std::ostringstream table;
  table << "# dx error_x error_y\n";
  table.precision(12);
  for (const auto& [nx, ny] : grids) {
    isle_grid_spec grid = domain;
    grid.nx = nx;
    grid.ny = ny;

    MapHandle solved;
    st = isle_run_forward_map(model.ptr, grid, a.t0, a.t_end, a.checkpoints,
                              &cfg, nullptr, nullptr, &solved.ptr);
    if (st != ISLE_OK) return fail(st, "forward run");

    MapHandle reference;
    st = isle_trace_reference_map(model.ptr, grid, a.t0, a.t_end, a.ref_dt,
                                  &reference.ptr);
    if (st != ISLE_OK) return fail(st, "reference tracing");

    double err_x = 0.0, err_y = 0.0;
    st = isle_map_relative_l2(solved.ptr, reference.ptr, a.band, &err_x,
                              &err_y);
    if (st != ISLE_OK) return fail(st, "error norm");

    const double dx =
        (grid.x_max - grid.x_min) / static_cast<double>(grid.nx - 1);
    hs.push_back(dx);
    ex.push_back(err_x);
    ey.push_back(err_y);
    table << dx << " " << err_x << " " << err_y << "\n";
    std::printf("grid %lldx%lld  dx=%.6g  err_x=%.6g  err_y=%.6g\n",
                static_cast<long long>(nx), static_cast<long long>(ny), dx,
                err_x, err_y);
  }

  double slope_x = 0.0, slope_y = 0.0;
  st = isle_fit_loglog_slope(hs.data(), ex.data(),
                             static_cast<int64_t>(hs.size()), &slope_x);
  if (st != ISLE_OK) return fail(st, "slope fit");
  st = isle_fit_loglog_slope(hs.data(), ey.data(),
                             static_cast<int64_t>(hs.size()), &slope_y);
  if (st != ISLE_OK) return fail(st, "slope fit");
  table << "# slope_x " << slope_x << "\n# slope_y " << slope_y << "\n";
  std::printf("fitted slopes: x %.4f, y %.4f\n", slope_x, slope_y);

  const std::string table_path = a.out_dir + "/convergence.txt";
  std::ofstream table_out(table_path);
  if (!table_out) {
    std::cerr << "error: cannot write " << table_path << "\n";
    return kExitIo;
  }
  table_out << table.str();
  table_out.close();

  json rows = json::array();
  for (std::size_t k = 0; k < hs.size(); ++k) {
    rows.push_back({{"dx", hs[k]}, {"error_x", ex[k]}, {"error_y", ey[k]}});
  }
  json summary = {
      {"tool", "isleflow"},
      {"version", isle_version()},
      {"verb", "convergence"},
      {"model", a.model.name},
      {"t0", a.t0},
      {"t_end", a.t_end},
      {"checkpoints", a.checkpoints},
      {"reference_dt", a.ref_dt},
      {"band", a.band},
      {"rows", rows},
      {"slope_x", slope_x},
      {"slope_y", slope_y},
      {"outputs", {table_path}},
  };
  return write_summary(a.out_dir, summary);
}

// ------------------------------------------------------------------
// bench

struct BenchArgs {
  ModelArgs model;
  std::vector<int64_t> sizes = {65, 129, 257};
  double t0 = 0.0;
  double t_end = 2.0;
  bool legacy = false;
  std::string scheme = "rk2";
  double cfl = 0.5;
  std::string out_dir = ".";
};

int run_bench(const BenchArgs& a) {
  if (a.sizes.empty()) {
    std::cerr << "error: need at least one --sizes entry\n";
    return kExitConfig;
  }
  if (int rc = ensure_out_dir(a.out_dir)) return rc;

  ModelHandle model;
  isle_status st = make_model(a.model, model);
  if (st != ISLE_OK) return kExitConfig;
  isle_grid_spec domain{};
  st = isle_model_domain(model.ptr, &domain);
  if (st != ISLE_OK) return fail(st, "model domain");

  isle_run_config cfg{};
  cfg.scheme = a.scheme == "euler" ? 0 : 1;
  cfg.cfl = a.cfl;

  const double aspect =
      (domain.y_max - domain.y_min) / (domain.x_max - domain.x_min);

  std::vector<double> seconds;
  std::ostringstream table;
  table << "# nx ny checkpoints seconds ratio\n";
  json rows = json::array();
  for (std::size_t k = 0; k < a.sizes.size(); ++k) {
    const int64_t nx = a.sizes[k];
    isle_grid_spec grid = domain;
    grid.nx = nx;
    grid.ny = std::max<int64_t>(
        2, static_cast<int64_t>(std::llround(
               static_cast<double>(nx - 1) * aspect)) + 1);
    // Checkpoint count scales with the grid so the composition count grows
    // with the resolution.
    const int64_t checkpoints = nx;

    const auto begin = std::chrono::steady_clock::now();
    if (a.legacy) {
      MapHandle map;
      st = isle_run_legacy_checkpoints(model.ptr, grid, a.t0, a.t_end,
                                       checkpoints, &cfg, nullptr, nullptr,
                                       &map.ptr);
    } else {
      VolumeHandle volume;
      st = isle_simulate(model.ptr, grid, a.t0, a.t_end, checkpoints, &cfg,
                         nullptr, nullptr, &volume.ptr, nullptr);
    }
    if (st != ISLE_OK) return fail(st, "bench run");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin)
            .count();
    seconds.push_back(secs);

    const double ratio = k > 0 ? secs / seconds[k - 1] : 0.0;
    table << nx << " " << grid.ny << " " << checkpoints << " " << secs << " ";
    if (k > 0) {
      table << ratio;
    } else {
      table << "-";
    }
    table << "\n";
    json row = {{"nx", nx},
                {"ny", grid.ny},
                {"checkpoints", checkpoints},
                {"seconds", secs}};
    if (k > 0) row["ratio"] = ratio;
    rows.push_back(row);
    std::printf("nx=%lld checkpoints=%lld  %.3fs%s\n",
                static_cast<long long>(nx),
                static_cast<long long>(checkpoints), secs,
                k > 0 ? ("  ratio " + std::to_string(ratio)).c_str() : "");
  }

  const std::string table_path = a.out_dir + "/bench.txt";
  std::ofstream table_out(table_path);
  if (!table_out) {
    std::cerr << "error: cannot write " << table_path << "\n";
    return kExitIo;
  }
  table_out << table.str();
  table_out.close();

  json summary = {
      {"tool", "isleflow"},      {"version", isle_version()},
      {"verb", "bench"},         {"model", a.model.name},
      {"legacy", a.legacy},      {"t0", a.t0},
      {"t_end", a.t_end},        {"rows", rows},
      {"outputs", {table_path}},
  };
  return write_summary(a.out_dir, summary);
}

// ------------------------------------------------------------------
// trace

struct TraceArgs {
  ModelArgs model;
  double x0 = 0.0;
  double y0 = 0.0;
  double t0 = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;
  std::string out_dir;
};

int run_trace(const TraceArgs& a) {
  ModelHandle model;
  isle_status st = make_model(a.model, model);
  if (st != ISLE_OK) return kExitConfig;

  double x = 0.0, y = 0.0;
  int ok = 0;
  st = isle_trace(model.ptr, a.x0, a.y0, a.t0, a.t_end, a.dt, &x, &y, &ok);
  if (st != ISLE_OK) return fail(st, "trace");
  std::printf("trace (%.17g, %.17g) t=[%g, %g] -> (%.17g, %.17g)%s\n", a.x0,
              a.y0, a.t0, a.t_end, x, y, ok ? "" : "  [diverged]");
  if (!a.out_dir.empty()) {
    if (int rc = ensure_out_dir(a.out_dir)) return rc;
    json summary = {
        {"tool", "isleflow"}, {"version", isle_version()},
        {"verb", "trace"},    {"model", a.model.name},
        {"x0", a.x0},         {"y0", a.y0},
        {"t0", a.t0},         {"t_end", a.t_end},
        {"dt", a.dt},         {"x", x},
        {"y", y},             {"ok", ok != 0},
    };
    return write_summary(a.out_dir, summary);
  }
  return ok ? 0 : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eulerian flow-map, FTLE and separation-exponent toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", isle_version());

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand(
      "simulate", "forward flow-map run with envelope capture");
  add_model_options(c_sim, sim.model);
  add_grid_options(c_sim, sim.grid);
  c_sim->add_option("--t0", sim.t0, "start time")->capture_default_str();
  c_sim->add_option("--T", sim.t_end, "end time")->required();
  c_sim->add_option("--checkpoints", sim.checkpoints,
                    "checkpoint count (0 derives it from the CFL bound)")
      ->capture_default_str();
  c_sim->add_option("--scheme", sim.scheme, "euler | rk2")
      ->check(CLI::IsMember({"euler", "rk2"}))
      ->capture_default_str();
  c_sim->add_option("--cfl", sim.cfl, "advective CFL number")
      ->capture_default_str();
  c_sim->add_option("--substeps", sim.substeps,
                    "substeps per checkpoint (0 = automatic)")
      ->capture_default_str();
  c_sim->add_option("--thin", sim.thin,
                    "store every k-th envelope frame (divides --checkpoints)")
      ->capture_default_str();
  c_sim->add_option("-o,--out", sim.out_dir, "output directory")
      ->capture_default_str();
  c_sim->add_flag("--quiet", sim.quiet, "suppress per-checkpoint lines");

  FtleArgs ftle_args;
  CLI::App* c_ftle =
      app.add_subcommand("ftle", "exponent field from a map or volume");
  c_ftle->add_option("--map", ftle_args.map_path, "stored flow map");
  c_ftle->add_option("--volume", ftle_args.volume_path, "stored volume");
  CLI::Option* t_opt =
      c_ftle->add_option("--t", ftle_args.t, "horizon for a map input");
  c_ftle->add_flag("--clamp-negative-ftle", ftle_args.clamp_negative,
                   "replace negative exponent values by 0 in all outputs");
  c_ftle->add_option("-o,--out", ftle_args.out_dir, "output directory")
      ->capture_default_str();

  IsleArgs isle_args;
  CLI::App* c_isle = app.add_subcommand(
      "isle", "separation exponent fields for factors r from a volume");
  c_isle->add_option("--volume", isle_args.volume_path, "stored volume")
      ->required();
  c_isle->add_option("--r", isle_args.r_values, "separation factors (> 1)")
      ->required()
      ->delimiter(',');
  c_isle->add_option("-o,--out", isle_args.out_dir, "output directory")
      ->capture_default_str();

  RidgesArgs ridges_args;
  CLI::App* c_ridges =
      app.add_subcommand("ridges", "ridge detection on a stored field");
  c_ridges->add_option("--field", ridges_args.field_path, "stored field")
      ->required();
  c_ridges->add_option("--percentile", ridges_args.percentile,
                       "detection percentile gate")
      ->capture_default_str();
  c_ridges->add_option("--band", ridges_args.band,
                       "boundary cells excluded from detection")
      ->capture_default_str();
  c_ridges->add_option("--smoothing", ridges_args.smoothing,
                       "box radius for the normal-estimate Hessian")
      ->capture_default_str();
  c_ridges->add_flag("--dominant", ridges_args.dominant,
                     "keep only the largest connected component");
  CLI::Option* rate_opt = c_ridges->add_option(
      "--suggest-rate", ridges_args.suggest_rate,
      "growth rate l for the r = e^(l t) suggestion");
  c_ridges->add_option("--suggest-t", ridges_args.suggest_t,
                       "horizon t for the suggestion");
  c_ridges->add_option("-o,--out", ridges_args.out_dir, "output directory")
      ->capture_default_str();

  ConvergenceArgs conv;
  CLI::App* c_conv = app.add_subcommand(
      "convergence", "flow-map error against the Lagrangian reference");
  add_model_options(c_conv, conv.model);
  c_conv->add_option("--grids", conv.grids, "comma list of nx x ny entries")
      ->capture_default_str();
  c_conv->add_option("--t0", conv.t0, "start time")->capture_default_str();
  c_conv->add_option("--T", conv.t_end, "end time")->capture_default_str();
  c_conv->add_option("--checkpoints", conv.checkpoints,
                     "checkpoint count used on every grid")
      ->capture_default_str();
  c_conv->add_option("--ref-dt", conv.ref_dt, "reference integrator step")
      ->capture_default_str();
  c_conv->add_option("--band", conv.band, "interior band for the norm")
      ->capture_default_str();
  c_conv->add_option("--scheme", conv.scheme, "euler | rk2")
      ->check(CLI::IsMember({"euler", "rk2"}))
      ->capture_default_str();
  c_conv->add_option("--cfl", conv.cfl, "advective CFL number")
      ->capture_default_str();
  c_conv->add_option("-o,--out", conv.out_dir, "output directory")
      ->capture_default_str();

  BenchArgs bench;
  CLI::App* c_bench =
      app.add_subcommand("bench", "wall-clock scaling across grid sizes");
  add_model_options(c_bench, bench.model);
  c_bench->add_option("--sizes", bench.sizes, "grid nx values")
      ->delimiter(',')
      ->capture_default_str();
  c_bench->add_option("--t0", bench.t0, "start time")->capture_default_str();
  c_bench->add_option("--T", bench.t_end, "end time")->capture_default_str();
  c_bench->add_flag("--legacy", bench.legacy,
                    "rebuild each checkpoint from scratch (no composition)");
  c_bench->add_option("--scheme", bench.scheme, "euler | rk2")
      ->check(CLI::IsMember({"euler", "rk2"}))
      ->capture_default_str();
  c_bench->add_option("--cfl", bench.cfl, "advective CFL number")
      ->capture_default_str();
  c_bench->add_option("-o,--out", bench.out_dir, "output directory")
      ->capture_default_str();

  TraceArgs trace;
  CLI::App* c_trace =
      app.add_subcommand("trace", "single Lagrangian particle trace");
  add_model_options(c_trace, trace.model);
  c_trace->add_option("--x0", trace.x0, "seed x")->required();
  c_trace->add_option("--y0", trace.y0, "seed y")->required();
  c_trace->add_option("--t0", trace.t0, "start time")->capture_default_str();
  c_trace->add_option("--T", trace.t_end, "end time")->required();
  c_trace->add_option("--dt", trace.dt, "integrator step")
      ->capture_default_str();
  c_trace->add_option("-o,--out", trace.out_dir,
                      "optional output directory for the run summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  ftle_args.has_t = t_opt->count() > 0;
  ridges_args.has_suggest = rate_opt->count() > 0;

  if (c_sim->parsed()) return run_simulate(sim);
  if (c_ftle->parsed()) return run_ftle(ftle_args);
  if (c_isle->parsed()) return run_isle(isle_args);
  if (c_ridges->parsed()) return run_ridges(ridges_args);
  if (c_conv->parsed()) return run_convergence(conv);
  if (c_bench->parsed()) return run_bench(bench);
  if (c_trace->parsed()) return run_trace(trace);
  return kExitConfig;
}
