#include "core/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

#include "core/error.hpp"

namespace isleflow {

namespace {

// 3x3-or-wider box average with clamped sampling near the walls.
ScalarField2D box_smooth(const ScalarField2D& field, int radius) {
  if (radius <= 0) return field;
  const Grid2D& g = field.grid();
  ScalarField2D out(g);
  for (std::int64_t j = 0; j < g.ny; ++j) {
    for (std::int64_t i = 0; i < g.nx; ++i) {
      double acc = 0.0;
      int cnt = 0;
      for (std::int64_t dj = -radius; dj <= radius; ++dj) {
        for (std::int64_t di = -radius; di <= radius; ++di) {
          const std::int64_t ii = std::clamp<std::int64_t>(i + di, 0, g.nx - 1);
          const std::int64_t jj = std::clamp<std::int64_t>(j + dj, 0, g.ny - 1);
          acc += field.at(ii, jj);
          ++cnt;
        }
      }
      out.at(i, j) = acc / static_cast<double>(cnt);
    }
  }
  return out;
}

struct Normal {
  double x;
  double y;
};

// Eigenvector of the smaller eigenvalue of the smoothed Hessian; the crest
// runs perpendicular to it.
Normal hessian_normal(const ScalarField2D& smooth, std::int64_t i,
                      std::int64_t j) {
  const Grid2D& g = smooth.grid();
  const double dx = g.dx();
  const double dy = g.dy();
  const double hxx =
      (smooth.at(i + 1, j) - 2.0 * smooth.at(i, j) + smooth.at(i - 1, j)) /
      (dx * dx);
  const double hyy =
      (smooth.at(i, j + 1) - 2.0 * smooth.at(i, j) + smooth.at(i, j - 1)) /
      (dy * dy);
  const double hxy = (smooth.at(i + 1, j + 1) - smooth.at(i + 1, j - 1) -
                      smooth.at(i - 1, j + 1) + smooth.at(i - 1, j - 1)) /
                     (4.0 * dx * dy);

  const double mean = 0.5 * (hxx + hyy);
  const double diff = 0.5 * (hxx - hyy);
  const double disc = std::sqrt(diff * diff + hxy * hxy);
  const double mu = mean - disc;  // smaller eigenvalue

  // (hxy, mu - hxx) and (mu - hyy, hxy) both solve (H - mu I) v = 0; take
  // the better conditioned one.
  double vx1 = hxy, vy1 = mu - hxx;
  double vx2 = mu - hyy, vy2 = hxy;
  double n1 = vx1 * vx1 + vy1 * vy1;
  double n2 = vx2 * vx2 + vy2 * vy2;
  double vx = n1 >= n2 ? vx1 : vx2;
  double vy = n1 >= n2 ? vy1 : vy2;
  const double norm = std::sqrt(vx * vx + vy * vy);
  if (norm > 0.0 && std::isfinite(norm)) return {vx / norm, vy / norm};
  return {1.0, 0.0};
}

const std::int64_t kDirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};

void relabel_components(std::vector<RidgePoint>& points) {
  if (points.empty()) return;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> where;
  for (std::size_t k = 0; k < points.size(); ++k) {
    where[{points[k].i, points[k].j}] = k;
  }
  std::vector<int> label(points.size(), -1);
  std::vector<std::size_t> comp_size;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (label[k] >= 0) continue;
    const int id = static_cast<int>(comp_size.size());
    std::size_t size = 0;
    std::queue<std::size_t> q;
    q.push(k);
    label[k] = id;
    while (!q.empty()) {
      const std::size_t p = q.front();
      q.pop();
      ++size;
      for (std::int64_t dj = -1; dj <= 1; ++dj) {
        for (std::int64_t di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const auto it = where.find({points[p].i + di, points[p].j + dj});
          if (it == where.end() || label[it->second] >= 0) continue;
          label[it->second] = id;
          q.push(it->second);
        }
      }
    }
    comp_size.push_back(size);
  }
  // Rank component ids by decreasing size; ties keep discovery order so the
  // result is deterministic.
  std::vector<int> order(comp_size.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = static_cast<int>(c);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return comp_size[static_cast<std::size_t>(a)] >
           comp_size[static_cast<std::size_t>(b)];
  });
  std::vector<int> rank(comp_size.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    rank[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos);
  }
  for (std::size_t k = 0; k < points.size(); ++k) {
    points[k].component = rank[static_cast<std::size_t>(label[k])];
  }
}

}  // namespace

RidgeSet detect_ridges(const ScalarField2D& field, double percentile, int band,
                       int smoothing_radius, const std::string& source) {
  if (!(percentile > 0.0 && percentile < 100.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "percentile must lie strictly between 0 and 100");
  }
  if (band < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "detection needs a boundary band of at least 1 cell");
  }
  const Grid2D& g = field.grid();
  if (g.nx - 2 * band < 1 || g.ny - 2 * band < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "boundary band leaves no interior to search");
  }
  for (double v : field.values()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument,
                  "ridge detection needs a finite field");
    }
  }

  std::vector<double> interior;
  interior.reserve(static_cast<std::size_t>((g.nx - 2 * band) *
                                            (g.ny - 2 * band)));
  for (std::int64_t j = band; j < g.ny - band; ++j) {
    for (std::int64_t i = band; i < g.nx - band; ++i) {
      interior.push_back(field.at(i, j));
    }
  }
  std::sort(interior.begin(), interior.end());
  // Nearest-rank percentile: the k-th smallest with k = ceil(p/100 * M).
  const std::size_t m = interior.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(percentile / 100.0 * static_cast<double>(m)));
  if (rank < 1) rank = 1;
  if (rank > m) rank = m;
  const double threshold = interior[rank - 1];

  const ScalarField2D smooth = box_smooth(field, smoothing_radius);

  RidgeSet out;
  out.source = source;
  out.percentile = percentile;
  out.threshold = threshold;
  out.band = band;
  out.smoothing_radius = smoothing_radius;

  for (std::int64_t j = band; j < g.ny - band; ++j) {
    for (std::int64_t i = band; i < g.nx - band; ++i) {
      const double f = field.at(i, j);
      if (!(f >= threshold)) continue;
      bool crest = false;
      for (const auto& d : kDirs) {
        if (f > field.at(i + d[0], j + d[1]) &&
            f > field.at(i - d[0], j - d[1])) {
          crest = true;
          break;
        }
      }
      if (!crest) continue;
      const Normal n = hessian_normal(smooth, i, j);
      RidgePoint pt;
      pt.i = i;
      pt.j = j;
      pt.value = f;
      pt.normal_x = n.x;
      pt.normal_y = n.y;
      out.points.push_back(pt);
    }
  }
  relabel_components(out.points);
  return out;
}

RidgeSet dominant_component(const RidgeSet& ridges) {
  RidgeSet out = ridges;
  out.points.clear();
  for (const RidgePoint& p : ridges.points) {
    if (p.component == 0) out.points.push_back(p);
  }
  return out;
}

double ridge_min(const ScalarField2D& field, const RidgeSet& ridges) {
  if (ridges.points.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "ridge minimum over an empty point set");
  }
  double m = field.at(ridges.points[0].i, ridges.points[0].j);
  for (const RidgePoint& p : ridges.points) {
    m = std::min(m, field.at(p.i, p.j));
  }
  return m;
}

TubeMask tube_mask(const Grid2D& grid, const RidgeSet& ridges, double rho) {
  if (!(rho >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tube radius must be nonnegative");
  }
  TubeMask out;
  out.grid = grid;
  out.rho = rho;
  out.mask.assign(grid.size(), 0);

  std::vector<double> rx, ry;
  rx.reserve(ridges.points.size());
  ry.reserve(ridges.points.size());
  for (const RidgePoint& p : ridges.points) {
    rx.push_back(grid.x(p.i));
    ry.push_back(grid.y(p.j));
  }
  const double rho2 = rho * rho;
  for (std::int64_t j = 0; j < grid.ny; ++j) {
    for (std::int64_t i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i);
      const double y = grid.y(j);
      for (std::size_t k = 0; k < rx.size(); ++k) {
        const double dx = x - rx[k];
        const double dy = y - ry[k];
        if (dx * dx + dy * dy <= rho2) {
          out.mask[grid.index(i, j)] = 1;
          ++out.count;
          break;
        }
      }
    }
  }
  return out;
}

RidgeEquivalenceReport check_ridge_set_equivalence(const FtleField& sigma,
                                                   const LambdaField& lambda,
                                                   double percentile, int band,
                                                   int smoothing_radius) {
  if (!sigma.grid().same_layout(lambda.grid())) {
    throw Error(ErrorCode::InvalidArgument,
                "ridge comparison needs both fields on the same grid");
  }
  RidgeEquivalenceReport rep;
  rep.sigma_ridges =
      detect_ridges(sigma, percentile, band, smoothing_radius, "sigma");
  rep.lambda_ridges =
      detect_ridges(lambda, percentile, band, smoothing_radius, "lambda");

  auto keys = [](const RidgeSet& rs) {
    std::vector<std::pair<std::int64_t, std::int64_t>> v;
    v.reserve(rs.points.size());
    for (const RidgePoint& p : rs.points) v.push_back({p.i, p.j});
    return v;  // already sorted by (j, i) scan order
  };
  const auto a = keys(rep.sigma_ridges);
  const auto b = keys(rep.lambda_ridges);
  std::size_t ia = 0, ib = 0;
  auto lt = [](const std::pair<std::int64_t, std::int64_t>& l,
               const std::pair<std::int64_t, std::int64_t>& r) {
    return l.second != r.second ? l.second < r.second : l.first < r.first;
  };
  while (ia < a.size() || ib < b.size()) {
    if (ib == b.size() || (ia < a.size() && lt(a[ia], b[ib]))) {
      rep.only_sigma.push_back(a[ia++]);
    } else if (ia == a.size() || lt(b[ib], a[ia])) {
      rep.only_lambda.push_back(b[ib++]);
    } else {
      ++ia;
      ++ib;
    }
  }
  rep.equal = rep.only_sigma.empty() && rep.only_lambda.empty();
  return rep;
}

TubePositivityReport check_tube_positivity(const SeparationEnvelope& envelope,
                                           const RidgeSet& ridges, double r,
                                           double rho) {
  if (ridges.points.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "tube positivity needs a nonempty ridge set");
  }
  const Grid2D& g = envelope.grid();
  TubePositivityReport rep;

  const std::vector<double>& last = envelope.frame(envelope.axis().n_steps);
  double m = last[g.index(ridges.points[0].i, ridges.points[0].j)];
  for (const RidgePoint& p : ridges.points) {
    m = std::min(m, last[g.index(p.i, p.j)]);
  }
  rep.m = m;
  rep.precondition_ok = r < m;

  const TubeMask tube = tube_mask(g, ridges, rho);
  const IsleField gamma = isle(envelope, r);
  rep.tube_points = tube.count;
  for (std::size_t p = 0; p < tube.mask.size(); ++p) {
    if (tube.mask[p] && gamma.gamma.values()[p] > 0.0) ++rep.positive_points;
  }
  rep.fraction = tube.count == 0
                     ? 0.0
                     : static_cast<double>(rep.positive_points) /
                           static_cast<double>(tube.count);
  return rep;
}

SeparationSuggestion suggest_separation_factor(const FtleField& sigma,
                                               const RidgeSet& ridges,
                                               double t, double rate) {
  SeparationSuggestion s;
  s.r = std::exp(rate * t);
  const double m = ridge_min(sigma, ridges);
  s.rate_ok = rate < m;
  if (!s.rate_ok) {
    std::ostringstream w;
    w << "growth rate " << rate << " is not below the ridge minimum " << m
      << "; the bound r = e^(l t) is not guaranteed";
    s.warning = w.str();
  }
  return s;
}

std::string ridge_points_text(const Grid2D& grid, const RidgeSet& ridges) {
  std::ostringstream os;
  os.precision(17);
  os << "# x y value component\n";
  for (const RidgePoint& p : ridges.points) {
    os << grid.x(p.i) << " " << grid.y(p.j) << " " << p.value << " "
       << p.component << "\n";
  }
  return os.str();
}

}  // namespace isleflow
