#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "isleflow.h"

namespace {

struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    dir = std::filesystem::temp_directory_path() / "isleflow-capi-test";
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string path(const char* name) const { return (dir / name).string(); }
};

constexpr isle_grid_spec kUnitGrid{-1.0, 1.0, -1.0, 1.0, 33, 33};

}  // namespace

TEST_CASE("version and model construction") {
  CHECK(isle_version() != nullptr);
  CHECK(std::strlen(isle_version()) > 0);

  isle_model* gyre = nullptr;
  REQUIRE(isle_model_double_gyre(0.1, 0.1, 0.6283185307179586, &gyre) ==
          ISLE_OK);
  isle_grid_spec box{};
  REQUIRE(isle_model_domain(gyre, &box) == ISLE_OK);
  CHECK(box.x_min == 0.0);
  CHECK(box.x_max == 2.0);
  CHECK(box.y_max == 1.0);
  double u = -1.0, v = -1.0;
  REQUIRE(isle_model_sample(gyre, 1.0, 0.5, 0.0, &u, &v) == ISLE_OK);
  // u carries sin(pi) evaluated in doubles, so only nearly zero.
  CHECK(std::abs(u) < 1e-12);
  CHECK(v == doctest::Approx(-0.1 * 3.14159265358979).epsilon(1e-12));
  isle_model_free(gyre);

  // Invalid parameters fail with a message, not a crash.
  isle_model* bad = nullptr;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(isle_model_double_gyre(nan, 0.1, 0.6, &bad) == ISLE_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  CHECK(std::strlen(isle_last_error()) > 0);
  CHECK(isle_model_double_gyre(0.1, 0.1, 0.6, nullptr) ==
        ISLE_INVALID_ARGUMENT);
}

TEST_CASE("end-to-end run, extraction and round-trips") {
  TempDir tmp;
  isle_model* saddle = nullptr;
  REQUIRE(isle_model_quad_saddle(&saddle) == ISLE_OK);

  isle_volume* vol = nullptr;
  isle_map* map = nullptr;
  REQUIRE(isle_simulate(saddle, kUnitGrid, 0.0, 2.0, 20, nullptr, nullptr,
                        nullptr, &vol, &map) == ISLE_OK);
  REQUIRE(vol != nullptr);
  REQUIRE(map != nullptr);

  isle_grid_spec got{};
  double t0 = -1.0, t_end = -1.0;
  int64_t n = 0;
  REQUIRE(isle_volume_info(vol, &got, &t0, &t_end, &n) == ISLE_OK);
  CHECK(got.nx == 33);
  CHECK(t0 == 0.0);
  CHECK(t_end == 2.0);
  CHECK(n == 20);

  const double* frame0 = nullptr;
  REQUIRE(isle_volume_frame(vol, 0, &frame0) == ISLE_OK);
  for (int p = 0; p < 33 * 33; ++p) CHECK(frame0[p] == 0.0);
  CHECK(isle_volume_frame(vol, 21, &frame0) == ISLE_OUT_OF_RANGE);

  // FTLE from the map and from the envelope agree at the saddle point
  // (0, 0), where the stretch is monotone e^t and both give about 1.
  isle_field* sigma_map = nullptr;
  REQUIRE(isle_map_ftle(map, 2.0, &sigma_map) == ISLE_OK);
  isle_field* sigma_env = nullptr;
  REQUIRE(isle_volume_ftle(vol, &sigma_env) == ISLE_OK);
  const double* sm = nullptr;
  const double* se = nullptr;
  REQUIRE(isle_field_data(sigma_map, &sm) == ISLE_OK);
  REQUIRE(isle_field_data(sigma_env, &se) == ISLE_OK);
  const int center = 16 * 33 + 16;
  CHECK(sm[center] == doctest::Approx(1.0).epsilon(2e-2));
  CHECK(se[center] == doctest::Approx(1.0).epsilon(2e-2));

  // Separation exponent for r = e: crossing at tau = 1 gives gamma = 1.
  isle_field* gamma = nullptr;
  isle_field* tau = nullptr;
  REQUIRE(isle_volume_extract(vol, std::exp(1.0), &gamma, &tau) == ISLE_OK);
  const double* gv = nullptr;
  const double* tv = nullptr;
  REQUIRE(isle_field_data(gamma, &gv) == ISLE_OK);
  REQUIRE(isle_field_data(tau, &tv) == ISLE_OK);
  CHECK(gv[center] == doctest::Approx(1.0).epsilon(5e-2));
  CHECK(tv[center] == doctest::Approx(1.0).epsilon(5e-2));
  CHECK(isle_volume_extract(vol, 0.5, &gamma, &tau) == ISLE_INVALID_ARGUMENT);

  // Volume round-trip.
  REQUIRE(isle_volume_save(vol, tmp.path("v.isvol").c_str(), 1) == ISLE_OK);
  isle_volume* vol2 = nullptr;
  REQUIRE(isle_volume_load(tmp.path("v.isvol").c_str(), &vol2) == ISLE_OK);
  int64_t n2 = 0;
  REQUIRE(isle_volume_info(vol2, &got, &t0, &t_end, &n2) == ISLE_OK);
  CHECK(n2 == n);

  // Map round-trip preserves arrivals exactly.
  REQUIRE(isle_map_save(map, tmp.path("m.ismap").c_str()) == ISLE_OK);
  isle_map* map2 = nullptr;
  REQUIRE(isle_map_load(tmp.path("m.ismap").c_str(), &map2) == ISLE_OK);
  const double* ax1 = nullptr;
  const double* ax2 = nullptr;
  REQUIRE(isle_map_arrival_x(map, &ax1) == ISLE_OK);
  REQUIRE(isle_map_arrival_x(map2, &ax2) == ISLE_OK);
  bool same = true;
  for (int p = 0; p < 33 * 33; ++p) same = same && ax1[p] == ax2[p];
  CHECK(same);
  uint64_t c1 = 0, c2 = 0;
  REQUIRE(isle_map_clamp_events(map, &c1) == ISLE_OK);
  REQUIRE(isle_map_clamp_events(map2, &c2) == ISLE_OK);
  CHECK(c1 == c2);

  // Field round-trips, text and binary.
  REQUIRE(isle_field_save(sigma_map, tmp.path("s.isfld").c_str()) == ISLE_OK);
  isle_field* sigma3 = nullptr;
  REQUIRE(isle_field_load(tmp.path("s.isfld").c_str(), &sigma3) == ISLE_OK);
  const double* s3 = nullptr;
  REQUIRE(isle_field_data(sigma3, &s3) == ISLE_OK);
  CHECK(s3[center] == sm[center]);
  REQUIRE(isle_field_save_text(sigma_map, tmp.path("s.txt").c_str()) ==
          ISLE_OK);
  isle_field* sigma4 = nullptr;
  REQUIRE(isle_field_load_text(tmp.path("s.txt").c_str(), &sigma4) == ISLE_OK);
  const double* s4 = nullptr;
  REQUIRE(isle_field_data(sigma4, &s4) == ISLE_OK);
  CHECK(s4[center] == sm[center]);
  REQUIRE(isle_field_save_pgm16(sigma_map, tmp.path("s.pgm").c_str()) ==
          ISLE_OK);
  CHECK(std::filesystem::exists(tmp.path("s.pgm")));
  CHECK(std::filesystem::exists(tmp.path("s.pgm") + ".meta"));

  // NaN replacement for export: tau holds NaN off the saddle manifolds
  // wherever r was never reached.
  double mn = 0.0, mx = 0.0;
  REQUIRE(isle_field_minmax(tau, &mn, &mx) == ISLE_OK);
  REQUIRE(isle_field_replace_nan(tau, -1.0) == ISLE_OK);
  REQUIRE(isle_field_data(tau, &tv) == ISLE_OK);
  bool any_marker = false;
  for (int p = 0; p < 33 * 33; ++p) {
    CHECK(!std::isnan(tv[p]));
    any_marker = any_marker || tv[p] == -1.0;
  }
  CHECK(any_marker);

  isle_field_free(sigma_map);
  isle_field_free(sigma_env);
  isle_field_free(sigma3);
  isle_field_free(sigma4);
  isle_field_free(gamma);
  isle_field_free(tau);
  isle_map_free(map);
  isle_map_free(map2);
  isle_volume_free(vol);
  isle_volume_free(vol2);
  isle_model_free(saddle);
}

TEST_CASE("ridge workflow through the C interface") {
  isle_model* saddle = nullptr;
  REQUIRE(isle_model_quad_saddle(&saddle) == ISLE_OK);
  const isle_grid_spec grid{-1.0, 1.0, -1.0, 1.0, 65, 65};

  isle_volume* vol = nullptr;
  isle_map* map = nullptr;
  REQUIRE(isle_simulate(saddle, grid, 0.0, 2.0, 20, nullptr, nullptr, nullptr,
                        &vol, &map) == ISLE_OK);
  isle_field* sigma = nullptr;
  REQUIRE(isle_map_ftle(map, 2.0, &sigma) == ISLE_OK);
  // Escaping regions bottom out at the eigenvalue floor and litter the
  // exponent field with deeply negative plateaus; clamping them to zero
  // turns the plateaus into exact ties, which the crest test rejects, so
  // only the genuinely repelling structure survives detection.
  REQUIRE(isle_field_clamp_negative(sigma) == ISLE_OK);

  isle_ridges* ridges = nullptr;
  REQUIRE(isle_field_detect_ridges(sigma, 90.0, 3, 1, &ridges) == ISLE_OK);
  int64_t count = 0;
  REQUIRE(isle_ridges_count(ridges, &count) == ISLE_OK);
  REQUIRE(count > 0);
  isle_ridges* dom = nullptr;
  REQUIRE(isle_ridges_dominant(ridges, &dom) == ISLE_OK);
  int64_t dom_count = 0;
  REQUIRE(isle_ridges_count(dom, &dom_count) == ISLE_OK);
  CHECK(dom_count > 0);
  CHECK(dom_count <= count);
  int64_t i = -1, j = -1;
  double value = 0.0, nx = 0.0, ny = 0.0;
  int component = -1;
  REQUIRE(isle_ridges_point(dom, 0, &i, &j, &value, &nx, &ny, &component) ==
          ISLE_OK);
  CHECK(component == 0);
  CHECK(value > 0.0);
  CHECK(isle_ridges_point(dom, dom_count, &i, &j, &value, &nx, &ny,
                          &component) == ISLE_OUT_OF_RANGE);

  double threshold = -1.0;
  REQUIRE(isle_ridges_threshold(ridges, &threshold) == ISLE_OK);
  double sig_min = 0.0;
  REQUIRE(isle_ridges_min_over(dom, sigma, &sig_min) == ISLE_OK);
  CHECK(sig_min >= threshold);
  CHECK(sig_min > 0.0);

  double r_suggest = 0.0;
  int rate_ok = 0;
  REQUIRE(isle_ridges_suggest_factor(dom, sigma, 2.0, 0.25 * sig_min,
                                     &r_suggest, &rate_ok) == ISLE_OK);
  CHECK(rate_ok == 1);
  CHECK(r_suggest == doctest::Approx(std::exp(0.5 * sig_min)));

  double fraction = 0.0, m = 0.0;
  int pre_ok = 0;
  REQUIRE(isle_ridges_tube_positivity(dom, vol, r_suggest, 3.0 * 2.0 / 64.0,
                                      &fraction, &m, &pre_ok) == ISLE_OK);
  CHECK(pre_ok == 1);
  CHECK(m > r_suggest);
  CHECK(fraction >= 0.95);

  isle_ridges_free(dom);
  isle_ridges_free(ridges);
  isle_field_free(sigma);
  isle_map_free(map);
  isle_volume_free(vol);
  isle_model_free(saddle);
}

TEST_CASE("error paths set codes and messages") {
  CHECK(isle_model_sample(nullptr, 0, 0, 0, nullptr, nullptr) ==
        ISLE_INVALID_ARGUMENT);
  CHECK(std::strlen(isle_last_error()) > 0);

  isle_map* map = nullptr;
  CHECK(isle_map_load("/nonexistent/path.ismap", &map) == ISLE_IO);
  CHECK(map == nullptr);

  isle_model* gyre = nullptr;
  REQUIRE(isle_model_double_gyre(0.1, 0.1, 0.6283185307179586, &gyre) ==
          ISLE_OK);
  // Reversed horizon is invalid.
  isle_volume* vol = nullptr;
  CHECK(isle_simulate(gyre, kUnitGrid, 2.0, 0.0, 10, nullptr, nullptr,
                      nullptr, &vol, nullptr) == ISLE_INVALID_ARGUMENT);
  CHECK(vol == nullptr);
  // A malformed grid is invalid.
  isle_grid_spec bad = kUnitGrid;
  bad.nx = 1;
  CHECK(isle_run_forward_map(gyre, bad, 0.0, 1.0, 4, nullptr, nullptr,
                             nullptr, &map) == ISLE_INVALID_ARGUMENT);

  // FTLE at t = 0 is undefined.
  isle_map* id_map = nullptr;
  REQUIRE(isle_trace_reference_map(gyre, kUnitGrid, 0.0, 0.5, 1e-2, &id_map) ==
          ISLE_OK);
  isle_field* f = nullptr;
  CHECK(isle_map_ftle(id_map, 0.0, &f) == ISLE_INVALID_ARGUMENT);
  CHECK(f == nullptr);
  isle_map_free(id_map);
  isle_model_free(gyre);

  // Gridded model loading from a missing header.
  isle_model* gridded = nullptr;
  CHECK(isle_model_gridded("/nonexistent/vel.txt", &gridded) != ISLE_OK);
  CHECK(gridded == nullptr);

  // Free functions accept null.
  isle_model_free(nullptr);
  isle_map_free(nullptr);
  isle_field_free(nullptr);
  isle_volume_free(nullptr);
  isle_ridges_free(nullptr);
}

TEST_CASE("lagrangian trace through the C interface") {
  isle_model* saddle = nullptr;
  REQUIRE(isle_model_quad_saddle(&saddle) == ISLE_OK);
  // Near the origin the quad saddle behaves like the linear saddle; trace
  // a seed on the stable axis and check it contracts toward the origin.
  double x = 0.0, y = 0.0;
  int ok = 0;
  REQUIRE(isle_trace(saddle, 0.0, 0.5, 0.0, 1.0, 1e-3, &x, &y, &ok) ==
          ISLE_OK);
  CHECK(ok == 1);
  CHECK(std::abs(y) < 0.5);
  isle_model_free(saddle);
}
