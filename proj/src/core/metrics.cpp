#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace isleflow {

namespace {

void check_pair(const Grid2D& ga, const Grid2D& gb, int band) {
  if (!ga.same_layout(gb)) {
    throw Error(ErrorCode::InvalidArgument,
                "error norms need both operands on the same grid");
  }
  if (band < 0 || ga.nx - 2 * band < 1 || ga.ny - 2 * band < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "interior band leaves no nodes to compare");
  }
}

}  // namespace

ComponentErrors relative_l2_map_components(const FlowMap2D& a,
                                           const FlowMap2D& b, int band,
                                           double eps_abs) {
  check_pair(a.grid(), b.grid(), band);
  const Grid2D& g = a.grid();
  double dx2 = 0.0, dy2 = 0.0, rx2 = 0.0, ry2 = 0.0;
  for (std::int64_t j = band; j < g.ny - band; ++j) {
    for (std::int64_t i = band; i < g.nx - band; ++i) {
      const Vec2 pa = a.arrival(i, j);
      const Vec2 pb = b.arrival(i, j);
      const double ex = pa.x - pb.x;
      const double ey = pa.y - pb.y;
      dx2 += ex * ex;
      dy2 += ey * ey;
      const double sx = pb.x - g.x(i);
      const double sy = pb.y - g.y(j);
      rx2 += sx * sx;
      ry2 += sy * sy;
    }
  }
  ComponentErrors out;
  out.x = std::sqrt(rx2) > eps_abs ? std::sqrt(dx2 / rx2) : std::sqrt(dx2);
  out.y = std::sqrt(ry2) > eps_abs ? std::sqrt(dy2 / ry2) : std::sqrt(dy2);
  return out;
}

double relative_l2_map(const FlowMap2D& a, const FlowMap2D& b, int band,
                       double eps_abs) {
  check_pair(a.grid(), b.grid(), band);
  const Grid2D& g = a.grid();
  double d2 = 0.0, r2 = 0.0;
  for (std::int64_t j = band; j < g.ny - band; ++j) {
    for (std::int64_t i = band; i < g.nx - band; ++i) {
      const Vec2 pa = a.arrival(i, j);
      const Vec2 pb = b.arrival(i, j);
      const double ex = pa.x - pb.x;
      const double ey = pa.y - pb.y;
      d2 += ex * ex + ey * ey;
      const double sx = pb.x - g.x(i);
      const double sy = pb.y - g.y(j);
      r2 += sx * sx + sy * sy;
    }
  }
  return std::sqrt(r2) > eps_abs ? std::sqrt(d2 / r2) : std::sqrt(d2);
}

double relative_l2_field(const ScalarField2D& a, const ScalarField2D& b,
                         int band, double eps_abs) {
  check_pair(a.grid(), b.grid(), band);
  const Grid2D& g = a.grid();
  double d2 = 0.0, r2 = 0.0;
  for (std::int64_t j = band; j < g.ny - band; ++j) {
    for (std::int64_t i = band; i < g.nx - band; ++i) {
      const double e = a.at(i, j) - b.at(i, j);
      d2 += e * e;
      r2 += b.at(i, j) * b.at(i, j);
    }
  }
  return std::sqrt(r2) > eps_abs ? std::sqrt(d2 / r2) : std::sqrt(d2);
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& h_err) {
  if (h_err.size() < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "slope fit needs at least two (h, error) pairs");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [h, e] : h_err) {
    if (!(h > 0.0) || !(e > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "slope fit needs positive h and error values");
    }
    const double lx = std::log(h);
    const double ly = std::log(e);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(h_err.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "slope fit needs at least two distinct h values");
  }
  return (n * sxy - sx * sy) / denom;
}

double jaccard_index(std::vector<std::size_t> a, std::vector<std::size_t> b) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] < b[ib]) {
      ++ia;
    } else if (b[ib] < a[ia]) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace isleflow
