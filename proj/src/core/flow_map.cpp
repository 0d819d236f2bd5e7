#include "core/flow_map.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace isleflow {

FlowMap2D FlowMap2D::identity(const Grid2D& grid) {
  ScalarField2D fx(grid), fy(grid);
  for (std::int64_t j = 0; j < grid.ny; ++j) {
    for (std::int64_t i = 0; i < grid.nx; ++i) {
      fx.at(i, j) = grid.x(i);
      fy.at(i, j) = grid.y(j);
    }
  }
  FlowMap2D m;
  m.arrival_x_ = std::move(fx);
  m.arrival_y_ = std::move(fy);
  return m;
}

FlowMap2D FlowMap2D::from_arrival_fields(ScalarField2D arrival_x,
                                         ScalarField2D arrival_y) {
  if (!arrival_x.grid().same_layout(arrival_y.grid())) {
    throw Error(ErrorCode::InvalidArgument,
                "arrival components live on different grids");
  }
  const Grid2D& g = arrival_x.grid();
  std::uint64_t clamps = 0;
  auto& xs = arrival_x.values();
  auto& ys = arrival_y.values();
  for (std::size_t p = 0; p < xs.size(); ++p) {
    if (!std::isfinite(xs[p]) || !std::isfinite(ys[p])) {
      throw Error(ErrorCode::Solver,
                  "non-finite arrival at linear index " + std::to_string(p));
    }
    const double cx = std::clamp(xs[p], g.x_min, g.x_max);
    const double cy = std::clamp(ys[p], g.y_min, g.y_max);
    if (cx != xs[p] || cy != ys[p]) ++clamps;
    xs[p] = cx;
    ys[p] = cy;
  }
  FlowMap2D m;
  m.arrival_x_ = std::move(arrival_x);
  m.arrival_y_ = std::move(arrival_y);
  m.clamp_events_ = clamps;
  return m;
}

FlowMap2D FlowMap2D::from_stored(ScalarField2D arrival_x,
                                 ScalarField2D arrival_y,
                                 std::uint64_t recorded_clamp_events) {
  FlowMap2D m =
      from_arrival_fields(std::move(arrival_x), std::move(arrival_y));
  if (m.clamp_events_ != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "stored arrivals leave the domain box");
  }
  m.clamp_events_ = recorded_clamp_events;
  return m;
}

namespace {

struct CellWeights {
  std::size_t i00, i10, i01, i11;
  double w00, w10, w01, w11;
};

CellWeights locate(const Grid2D& g, double x, double y) {
  const double xc = std::clamp(x, g.x_min, g.x_max);
  const double yc = std::clamp(y, g.y_min, g.y_max);
  const double fx = (xc - g.x_min) / g.dx();
  const double fy = (yc - g.y_min) / g.dy();
  std::int64_t i = static_cast<std::int64_t>(std::floor(fx));
  std::int64_t j = static_cast<std::int64_t>(std::floor(fy));
  i = std::clamp<std::int64_t>(i, 0, g.nx - 2);
  j = std::clamp<std::int64_t>(j, 0, g.ny - 2);
  const double wx = std::clamp(fx - static_cast<double>(i), 0.0, 1.0);
  const double wy = std::clamp(fy - static_cast<double>(j), 0.0, 1.0);
  CellWeights c;
  c.i00 = g.index(i, j);
  c.i10 = g.index(i + 1, j);
  c.i01 = g.index(i, j + 1);
  c.i11 = g.index(i + 1, j + 1);
  c.w00 = (1.0 - wx) * (1.0 - wy);
  c.w10 = wx * (1.0 - wy);
  c.w01 = (1.0 - wx) * wy;
  c.w11 = wx * wy;
  return c;
}

}  // namespace

Vec2 bilinear_arrival(const FlowMap2D& map, double x, double y) {
  const CellWeights c = locate(map.grid(), x, y);
  const auto& ax = map.arrival_x().values();
  const auto& ay = map.arrival_y().values();
  return {c.w00 * ax[c.i00] + c.w10 * ax[c.i10] + c.w01 * ax[c.i01] +
              c.w11 * ax[c.i11],
          c.w00 * ay[c.i00] + c.w10 * ay[c.i10] + c.w01 * ay[c.i01] +
              c.w11 * ay[c.i11]};
}

double bilinear_value(const ScalarField2D& field, double x, double y) {
  const CellWeights c = locate(field.grid(), x, y);
  const auto& v = field.values();
  return c.w00 * v[c.i00] + c.w10 * v[c.i10] + c.w01 * v[c.i01] +
         c.w11 * v[c.i11];
}

FlowMap2D compose(const FlowMap2D& total, const FlowMap2D& step) {
  if (!total.grid().same_layout(step.grid())) {
    throw Error(ErrorCode::InvalidArgument,
                "compose needs both maps on the same grid");
  }
  const Grid2D& g = total.grid();
  ScalarField2D rx(g), ry(g);
  for (std::int64_t j = 0; j < g.ny; ++j) {
    for (std::int64_t i = 0; i < g.nx; ++i) {
      const Vec2 q = total.arrival(i, j);
      const Vec2 r = bilinear_arrival(step, q.x, q.y);
      rx.at(i, j) = r.x;
      ry.at(i, j) = r.y;
    }
  }
  return FlowMap2D::from_arrival_fields(std::move(rx), std::move(ry));
}

FlowMap2D phase_flow_double(const FlowMap2D& map) {
  return compose(map, map);
}

}  // namespace isleflow
