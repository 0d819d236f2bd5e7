#include <algorithm>
#include <cmath>
#include <vector>

#include "core/error.hpp"
#include "core/flow_map.hpp"
#include "core/liouville.hpp"
#include "core/velocity.hpp"
#include "doctest.h"

using namespace isleflow;

namespace {

FunctionField rotation_field() {
  return FunctionField(
      [](double x, double y, double) { return VelocitySample{-y, x}; });
}

FunctionField zero_field() {
  return FunctionField(
      [](double, double, double) { return VelocitySample{0.0, 0.0}; });
}

// Largest interior deviation between a computed map and an exact map,
// skipping `band` cells at each wall.
double interior_max_error(const FlowMap2D& map,
                          VelocitySample (*exact)(double, double, double),
                          double t, int band) {
  const Grid2D& g = map.grid();
  double worst = 0.0;
  for (std::int64_t j = band; j < g.ny - band; ++j) {
    for (std::int64_t i = band; i < g.nx - band; ++i) {
      const VelocitySample e = exact(g.x(i), g.y(j), t);
      worst = std::max(worst, std::abs(map.arrival_x().at(i, j) - e.u));
      worst = std::max(worst, std::abs(map.arrival_y().at(i, j) - e.v));
    }
  }
  return worst;
}

VelocitySample rotation_exact(double x, double y, double t) {
  return {x * std::cos(t) - y * std::sin(t),
          x * std::sin(t) + y * std::cos(t)};
}

}  // namespace

TEST_CASE("rotation substep matches the closed-form map") {
  // One short substep of rigid rotation; the arrival is the rotation of the
  // seed by the substep angle. A Lagrangian fourth-order trace agrees with
  // the closed form to far below the tolerance asserted here.
  FunctionField f = rotation_field();
  const Grid2D g = Grid2D::create(-1.0, 1.0, -1.0, 1.0, 65, 65);
  // Speeds reach 1 and dx = 1/32, so the CFL bound allows dt up to 1/128.
  const FlowMap2D map = substep_map(f, g, 0.0, 0.005, SubstepScheme::TvdRk2);
  CHECK(interior_max_error(map, rotation_exact, 0.005, 3) < 1e-5);
}

TEST_CASE("zero velocity preserves the identity for any scheme") {
  FunctionField f = zero_field();
  const Grid2D g = Grid2D::create(0.0, 1.0, 0.0, 2.0, 17, 33);
  for (SubstepScheme scheme :
       {SubstepScheme::Euler1, SubstepScheme::TvdRk2}) {
    const FlowMap2D map = checkpoint_map(f, g, 0.0, 5.0, scheme, 0.5, 7);
    for (std::int64_t j = 0; j < g.ny; ++j) {
      for (std::int64_t i = 0; i < g.nx; ++i) {
        CHECK(map.arrival_x().at(i, j) == g.x(i));
        CHECK(map.arrival_y().at(i, j) == g.y(j));
      }
    }
  }
}

TEST_CASE("scheme difference shrinks at second order in the substep") {
  FunctionField f = rotation_field();
  const Grid2D g = Grid2D::create(-1.0, 1.0, -1.0, 1.0, 33, 33);
  auto scheme_gap = [&](double dt) {
    const FlowMap2D a = checkpoint_map(f, g, 0.0, dt, SubstepScheme::TvdRk2,
                                       0.5, 1);
    const FlowMap2D b = checkpoint_map(f, g, 0.0, dt, SubstepScheme::Euler1,
                                       0.5, 1);
    double worst = 0.0;
    for (std::int64_t j = 3; j < g.ny - 3; ++j) {
      for (std::int64_t i = 3; i < g.nx - 3; ++i) {
        worst = std::max(worst, std::abs(a.arrival_x().at(i, j) -
                                         b.arrival_x().at(i, j)));
      }
    }
    return worst;
  };
  const double gap1 = scheme_gap(0.02);
  const double gap2 = scheme_gap(0.01);
  CHECK(gap1 / gap2 > 3.0);
  CHECK(gap1 / gap2 < 5.0);
}

TEST_CASE("substep result adds no interior extrema on smooth data") {
  FunctionField f = rotation_field();
  const Grid2D g = Grid2D::create(-1.0, 1.0, -1.0, 1.0, 49, 49);
  const FlowMap2D map = substep_map(f, g, 0.0, 0.01, SubstepScheme::TvdRk2);
  // Terminal data is the identity; ghost extensions reach 3 cells beyond
  // the walls, so transported values stay within that extended range.
  const double margin = 3.0 * g.dx() + 1e-8 * 2.0;
  for (std::int64_t j = 0; j < g.ny; ++j) {
    for (std::int64_t i = 0; i < g.nx; ++i) {
      CHECK(map.arrival_x().at(i, j) >= -1.0 - margin);
      CHECK(map.arrival_x().at(i, j) <= 1.0 + margin);
    }
  }
}

TEST_CASE("substep_map refuses an interval beyond the CFL bound") {
  FunctionField f = rotation_field();
  const Grid2D g = Grid2D::create(-1.0, 1.0, -1.0, 1.0, 65, 65);
  // Speeds reach 1.0 and dx = 1/32, so dt_max = 0.5/(64) < 0.25.
  CHECK_THROWS_AS(substep_map(f, g, 0.0, 0.25, SubstepScheme::TvdRk2),
                  CflError);
  try {
    substep_map(f, g, 0.0, 0.25, SubstepScheme::TvdRk2);
  } catch (const CflError& e) {
    CHECK(e.required_substeps() ==
          required_substeps(f, g, 0.0, 0.25, 0.5));
    CHECK(e.required_substeps() > 1);
  }
}

TEST_CASE("checkpoint_map subdivides the same interval instead") {
  FunctionField f = rotation_field();
  const Grid2D g = Grid2D::create(-1.0, 1.0, -1.0, 1.0, 33, 33);
  const FlowMap2D map =
      checkpoint_map(f, g, 0.0, 0.25, SubstepScheme::TvdRk2);
  // The inflow ghost extension is only first order in the rotation angle,
  // and that wall error sweeps inward by the arc length 0.25 * sqrt(2)
  // (about 6 cells here) plus the stencil width. Judge the clean core.
  const int band =
      static_cast<int>(std::ceil(0.25 * std::sqrt(2.0) / g.dx())) + 3;
  CHECK(interior_max_error(map, rotation_exact, 0.25, band) < 5e-4);
}

TEST_CASE("required substep count formula") {
  FunctionField f = rotation_field();
  const Grid2D g = Grid2D::create(-1.0, 1.0, -1.0, 1.0, 65, 65);
  // Componentwise bounds over the grid are u_max = v_max = 1 and
  // dx = dy = 1/32: rate = 64, span 0.5, cfl 0.5 -> ceil(64) = 64.
  CHECK(required_substeps(f, g, 0.0, 0.5, 0.5) == 64);
  FunctionField still = zero_field();
  CHECK(required_substeps(still, g, 0.0, 0.5, 0.5) == 1);
  CHECK_THROWS_AS(required_substeps(f, g, 1.0, 0.5, 0.5), Error);
  CHECK_THROWS_AS(required_substeps(f, g, 0.0, 0.5, 0.0), Error);
}

TEST_CASE("ghost fill pins the identity profile at an inflow wall") {
  const Grid2D g = Grid2D::create(0.0, 1.0, 0.0, 1.0, 9, 5);
  ScalarField2D comp(g);
  for (std::int64_t j = 0; j < g.ny; ++j) {
    for (std::int64_t i = 0; i < g.nx; ++i) comp.at(i, j) = g.x(i) + 100.0;
  }
  std::vector<double> line(g.nx + 6);
  // Left wall with u > 0 is an inflow wall: ghosts continue the coordinate
  // labels beyond the wall, not the stored data.
  detail::fill_padded_x(comp, LabelAxis::X, 2, 1.0, 0.0, line);
  CHECK(line[2] == doctest::Approx(0.0 - g.dx()));
  CHECK(line[1] == doctest::Approx(0.0 - 2.0 * g.dx()));
  CHECK(line[0] == doctest::Approx(0.0 - 3.0 * g.dx()));
  // The Y label holds the row coordinate at an inflow wall.
  detail::fill_padded_x(comp, LabelAxis::Y, 2, 1.0, 0.0, line);
  CHECK(line[2] == doctest::Approx(g.y(2)));
  CHECK(line[0] == doctest::Approx(g.y(2)));
}

TEST_CASE("ghost fill replicates the wall value at an outflow wall") {
  const Grid2D g = Grid2D::create(0.0, 1.0, 0.0, 1.0, 9, 5);
  ScalarField2D comp(g);
  for (std::int64_t j = 0; j < g.ny; ++j) {
    for (std::int64_t i = 0; i < g.nx; ++i)
      comp.at(i, j) = 7.0 + static_cast<double>(i * i);
  }
  std::vector<double> line(g.nx + 6);
  // Right wall with u > 0 leaves the domain: zero-gradient replication.
  detail::fill_padded_x(comp, LabelAxis::X, 1, -1.0, 1.0, line);
  const double wall = comp.at(g.nx - 1, 1);
  CHECK(line[3 + g.nx] == doctest::Approx(wall));
  CHECK(line[3 + g.nx + 1] == doctest::Approx(wall));
  CHECK(line[3 + g.nx + 2] == doctest::Approx(wall));
  // Left wall with u < 0 likewise.
  CHECK(line[2] == doctest::Approx(comp.at(0, 1)));
  CHECK(line[0] == doctest::Approx(comp.at(0, 1)));
}

TEST_CASE("ghost fill continues the profile across a tangential wall") {
  const Grid2D g = Grid2D::create(0.0, 1.0, 0.0, 1.0, 9, 5);
  ScalarField2D comp(g);
  // A cubic profile is reproduced exactly by the tangential extrapolation.
  auto profile = [](double x) { return 1.0 + x - 2.0 * x * x + x * x * x; };
  for (std::int64_t j = 0; j < g.ny; ++j) {
    for (std::int64_t i = 0; i < g.nx; ++i) comp.at(i, j) = profile(g.x(i));
  }
  std::vector<double> line(g.nx + 6);
  detail::fill_padded_x(comp, LabelAxis::X, 0, 0.0, 0.0, line);
  for (int k = 1; k <= 3; ++k) {
    CHECK(line[3 - k] == doctest::Approx(profile(-k * g.dx())).epsilon(1e-12));
    CHECK(line[3 + g.nx - 1 + k] ==
          doctest::Approx(profile(1.0 + k * g.dx())).epsilon(1e-12));
  }
}

TEST_CASE("vertical ghost fill mirrors the horizontal contract") {
  const Grid2D g = Grid2D::create(0.0, 1.0, 0.0, 1.0, 5, 9);
  ScalarField2D comp(g);
  for (std::int64_t j = 0; j < g.ny; ++j) {
    for (std::int64_t i = 0; i < g.nx; ++i) comp.at(i, j) = g.y(j);
  }
  std::vector<double> line(g.ny + 6);
  // Bottom wall with v > 0 is inflow: the Y label continues its coordinates.
  detail::fill_padded_y(comp, LabelAxis::Y, 1, 1.0, 1.0, line);
  CHECK(line[2] == doctest::Approx(-g.dy()));
  // Top wall with v > 0 is outflow: replicate.
  CHECK(line[3 + g.ny] == doctest::Approx(comp.at(1, g.ny - 1)));
  // The X label at a bottom inflow wall holds the column coordinate.
  detail::fill_padded_y(comp, LabelAxis::X, 1, 1.0, -1.0, line);
  CHECK(line[2] == doctest::Approx(g.x(1)));
  // Top wall with v < 0 is inflow for the Y label going the other way.
  detail::fill_padded_y(comp, LabelAxis::Y, 1, 1.0, -1.0, line);
  CHECK(line[3 + g.ny] == doctest::Approx(1.0 + g.dy()));
}

TEST_CASE("apply_boundary pins inflow walls and copies outflow walls") {
  // Uniform drift to the right: the left wall is inflow, the right outflow.
  FunctionField f([](double, double, double) {
    return VelocitySample{1.0, 0.0};
  });
  const Grid2D g = Grid2D::create(0.0, 1.0, 0.0, 1.0, 9, 5);
  ScalarField2D comp(g);
  for (std::int64_t j = 0; j < g.ny; ++j) {
    for (std::int64_t i = 0; i < g.nx; ++i) comp.at(i, j) = 50.0 + g.x(i);
  }
  apply_boundary(comp, LabelAxis::X, f, 0.0);
  for (std::int64_t j = 0; j < g.ny; ++j) {
    CHECK(comp.at(0, j) == doctest::Approx(g.x(0)));
    CHECK(comp.at(g.nx - 1, j) == doctest::Approx(comp.at(g.nx - 2, j)));
  }
  // Interior stays untouched.
  CHECK(comp.at(3, 2) == doctest::Approx(50.0 + g.x(3)));
}
