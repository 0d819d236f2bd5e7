#include "core/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "core/error.hpp"
#include "core/weno.hpp"

namespace isleflow {

namespace detail {

namespace {

// Ghost values for a wall the flow neither enters nor leaves. The level-set
// data stays smooth across such a wall, so the ghosts continue the interior
// profile with a cubic fit through the four nodes nearest the wall. f0 is
// the wall value and f1..f3 march inward; ghost k sits k nodes outside.
double tangential_ghost(int k, double f0, double f1, double f2, double f3) {
  switch (k) {
    case 1:
      return 4.0 * f0 - 6.0 * f1 + 4.0 * f2 - f3;
    case 2:
      return 10.0 * f0 - 20.0 * f1 + 15.0 * f2 - 4.0 * f3;
    default:
      return 20.0 * f0 - 45.0 * f1 + 36.0 * f2 - 10.0 * f3;
  }
}

}  // namespace

void fill_padded_x(const ScalarField2D& component, LabelAxis label,
                   std::int64_t j, double u_wall_left, double u_wall_right,
                   std::span<double> line) {
  const Grid2D& g = component.grid();
  for (std::int64_t i = 0; i < g.nx; ++i) line[3 + i] = component.at(i, j);
  const bool can_extrapolate = g.nx >= 4;
  // Left wall, outward normal -x: n.u < 0 (inflow) iff u > 0.
  for (int k = 1; k <= 3; ++k) {
    if (u_wall_left > 0.0) {
      line[3 - k] = label == LabelAxis::X
                        ? g.x_min - static_cast<double>(k) * g.dx()
                        : g.y(j);
    } else if (u_wall_left == 0.0 && can_extrapolate) {
      line[3 - k] = tangential_ghost(k, line[3], line[4], line[5], line[6]);
    } else {
      line[3 - k] = component.at(0, j);
    }
  }
  // Right wall, outward normal +x: inflow iff u < 0.
  const std::size_t w = 3 + g.nx - 1;
  for (int k = 1; k <= 3; ++k) {
    if (u_wall_right < 0.0) {
      line[w + k] = label == LabelAxis::X
                        ? g.x_max + static_cast<double>(k) * g.dx()
                        : g.y(j);
    } else if (u_wall_right == 0.0 && can_extrapolate) {
      line[w + k] =
          tangential_ghost(k, line[w], line[w - 1], line[w - 2], line[w - 3]);
    } else {
      line[w + k] = component.at(g.nx - 1, j);
    }
  }
}

void fill_padded_y(const ScalarField2D& component, LabelAxis label,
                   std::int64_t i, double v_wall_bottom, double v_wall_top,
                   std::span<double> line) {
  const Grid2D& g = component.grid();
  for (std::int64_t j = 0; j < g.ny; ++j) line[3 + j] = component.at(i, j);
  const bool can_extrapolate = g.ny >= 4;
  // Bottom wall, outward normal -y: inflow iff v > 0.
  for (int k = 1; k <= 3; ++k) {
    if (v_wall_bottom > 0.0) {
      line[3 - k] = label == LabelAxis::Y
                        ? g.y_min - static_cast<double>(k) * g.dy()
                        : g.x(i);
    } else if (v_wall_bottom == 0.0 && can_extrapolate) {
      line[3 - k] = tangential_ghost(k, line[3], line[4], line[5], line[6]);
    } else {
      line[3 - k] = component.at(i, 0);
    }
  }
  // Top wall, outward normal +y: inflow iff v < 0.
  const std::size_t w = 3 + g.ny - 1;
  for (int k = 1; k <= 3; ++k) {
    if (v_wall_top < 0.0) {
      line[w + k] = label == LabelAxis::Y
                        ? g.y_max + static_cast<double>(k) * g.dy()
                        : g.x(i);
    } else if (v_wall_top == 0.0 && can_extrapolate) {
      line[w + k] =
          tangential_ghost(k, line[w], line[w - 1], line[w - 2], line[w - 3]);
    } else {
      line[w + k] = component.at(i, g.ny - 1);
    }
  }
}

}  // namespace detail

namespace {

struct StageBuffers {
  std::vector<double> line;
  std::vector<double> adv;
  std::vector<double> saved_x;
  std::vector<double> saved_y;
};

void sample_velocity(const VelocityField& model, const Grid2D& g, double t,
                     std::vector<double>& u, std::vector<double>& v) {
  u.resize(g.size());
  v.resize(g.size());
  double vmax = 0.0;
  for (std::int64_t j = 0; j < g.ny; ++j) {
    for (std::int64_t i = 0; i < g.nx; ++i) {
      const VelocitySample s = model.sample(g.x(i), g.y(j), t);
      const std::size_t p = g.index(i, j);
      u[p] = s.u;
      v[p] = s.v;
      vmax = std::max(vmax, std::max(std::abs(s.u), std::abs(s.v)));
    }
  }
  // Wall classification keys on the sign of the wall-normal velocity. An
  // invariant boundary only zeroes that component up to rounding noise in
  // the model formula, and a noise-signed wall would get pinned or copied
  // instead of evolving with the flow. Snap normal components that are
  // negligible against the field's speed scale to an exact zero.
  const double tol = 1e-12 * vmax;
  for (std::int64_t j = 0; j < g.ny; ++j) {
    double& ul = u[g.index(0, j)];
    if (std::abs(ul) <= tol) ul = 0.0;
    double& ur = u[g.index(g.nx - 1, j)];
    if (std::abs(ur) <= tol) ur = 0.0;
  }
  for (std::int64_t i = 0; i < g.nx; ++i) {
    double& vb = v[g.index(i, 0)];
    if (std::abs(vb) <= tol) vb = 0.0;
    double& vt = v[g.index(i, g.ny - 1)];
    if (std::abs(vt) <= tol) vt = 0.0;
  }
}

// adv = u * dF/dx + v * dF/dy with the one-sided WENO derivative chosen per
// point by the velocity sign: marching backward, data propagates against the
// flow, so positive velocity takes the right-biased stencil.
void advection_term(const ScalarField2D& F, LabelAxis label, const Grid2D& g,
                    const std::vector<double>& U, const std::vector<double>& V,
                    StageBuffers& buf) {
  buf.adv.assign(g.size(), 0.0);
  const double inv_dx = 1.0 / g.dx();
  const double inv_dy = 1.0 / g.dy();

  buf.line.resize(static_cast<std::size_t>(g.nx) + 6);
  for (std::int64_t j = 0; j < g.ny; ++j) {
    detail::fill_padded_x(F, label, j, U[g.index(0, j)],
                          U[g.index(g.nx - 1, j)], buf.line);
    const double* line = buf.line.data();
    for (std::int64_t i = 0; i < g.nx; ++i) {
      const std::size_t p = g.index(i, j);
      const double u = U[p];
      if (u > 0.0) {
        buf.adv[p] += u * detail::weno5_right(line + i + 1, inv_dx);
      } else if (u < 0.0) {
        buf.adv[p] += u * detail::weno5_left(line + i, inv_dx);
      }
    }
  }

  buf.line.resize(static_cast<std::size_t>(g.ny) + 6);
  for (std::int64_t i = 0; i < g.nx; ++i) {
    detail::fill_padded_y(F, label, i, V[g.index(i, 0)],
                          V[g.index(i, g.ny - 1)], buf.line);
    const double* line = buf.line.data();
    for (std::int64_t j = 0; j < g.ny; ++j) {
      const std::size_t p = g.index(i, j);
      const double v = V[p];
      if (v > 0.0) {
        buf.adv[p] += v * detail::weno5_right(line + j + 1, inv_dy);
      } else if (v < 0.0) {
        buf.adv[p] += v * detail::weno5_left(line + j, inv_dy);
      }
    }
  }
}

void override_walls(ScalarField2D& F, LabelAxis label, const Grid2D& g,
                    const std::vector<double>& U, const std::vector<double>& V) {
  for (std::int64_t j = 0; j < g.ny; ++j) {
    const double ul = U[g.index(0, j)];
    if (ul > 0.0) {
      F.at(0, j) = label == LabelAxis::X ? g.x_min : g.y(j);
    } else if (ul < 0.0) {
      F.at(0, j) = F.at(1, j);
    }
    const double ur = U[g.index(g.nx - 1, j)];
    if (ur < 0.0) {
      F.at(g.nx - 1, j) = label == LabelAxis::X ? g.x_max : g.y(j);
    } else if (ur > 0.0) {
      F.at(g.nx - 1, j) = F.at(g.nx - 2, j);
    }
  }
  for (std::int64_t i = 0; i < g.nx; ++i) {
    const double vb = V[g.index(i, 0)];
    if (vb > 0.0) {
      F.at(i, 0) = label == LabelAxis::Y ? g.y_min : g.x(i);
    } else if (vb < 0.0) {
      F.at(i, 0) = F.at(i, 1);
    }
    const double vt = V[g.index(i, g.ny - 1)];
    if (vt < 0.0) {
      F.at(i, g.ny - 1) = label == LabelAxis::Y ? g.y_max : g.x(i);
    } else if (vt > 0.0) {
      F.at(i, g.ny - 1) = F.at(i, g.ny - 2);
    }
  }
}

void euler_stage(ScalarField2D& F, LabelAxis label, const Grid2D& g,
                 const std::vector<double>& U, const std::vector<double>& V,
                 double dt, StageBuffers& buf) {
  advection_term(F, label, g, U, V, buf);
  auto& vals = F.values();
  for (std::size_t p = 0; p < vals.size(); ++p) vals[p] += dt * buf.adv[p];
  override_walls(F, label, g, U, V);
}

FlowMap2D solve_backward(const VelocityField& model, const Grid2D& g,
                         double t_lo, double t_hi, SubstepScheme scheme,
                         int n_sub) {
  FlowMap2D id = FlowMap2D::identity(g);
  ScalarField2D phi = id.arrival_x();
  ScalarField2D psi = id.arrival_y();

  const double dt = (t_hi - t_lo) / static_cast<double>(n_sub);
  StageBuffers buf;
  std::vector<double> u_hi, v_hi, u_lo, v_lo;

  for (int s = n_sub - 1; s >= 0; --s) {
    const double tau_lo = t_lo + static_cast<double>(s) * dt;
    const double tau_hi = (s == n_sub - 1) ? t_hi : tau_lo + dt;
    const double step = tau_hi - tau_lo;

    sample_velocity(model, g, tau_hi, u_hi, v_hi);
    if (scheme == SubstepScheme::Euler1) {
      euler_stage(phi, LabelAxis::X, g, u_hi, v_hi, step, buf);
      euler_stage(psi, LabelAxis::Y, g, u_hi, v_hi, step, buf);
    } else {
      buf.saved_x = phi.values();
      buf.saved_y = psi.values();
      euler_stage(phi, LabelAxis::X, g, u_hi, v_hi, step, buf);
      euler_stage(psi, LabelAxis::Y, g, u_hi, v_hi, step, buf);
      sample_velocity(model, g, tau_lo, u_lo, v_lo);
      euler_stage(phi, LabelAxis::X, g, u_lo, v_lo, step, buf);
      euler_stage(psi, LabelAxis::Y, g, u_lo, v_lo, step, buf);
      auto& px = phi.values();
      auto& py = psi.values();
      for (std::size_t p = 0; p < px.size(); ++p) {
        px[p] = 0.5 * (px[p] + buf.saved_x[p]);
        py[p] = 0.5 * (py[p] + buf.saved_y[p]);
      }
      override_walls(phi, LabelAxis::X, g, u_lo, v_lo);
      override_walls(psi, LabelAxis::Y, g, u_lo, v_lo);
    }
  }
  return FlowMap2D::from_arrival_fields(std::move(phi), std::move(psi));
}

}  // namespace

int required_substeps(const VelocityField& model, const Grid2D& grid,
                      double t_lo, double t_hi, double cfl,
                      int speed_time_samples) {
  if (!(t_lo < t_hi)) {
    throw Error(ErrorCode::InvalidArgument,
                "substep interval needs t_lo < t_hi");
  }
  if (!(cfl > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cfl number must be positive");
  }
  const SpeedBounds b =
      max_speeds(model, grid, t_lo, t_hi, speed_time_samples);
  const double rate = b.u_max / grid.dx() + b.v_max / grid.dy();
  if (rate == 0.0) return 1;
  const double n = std::ceil((t_hi - t_lo) * rate / cfl);
  return std::max(1, static_cast<int>(n));
}

FlowMap2D substep_map(const VelocityField& model, const Grid2D& grid,
                      double t_lo, double t_hi, SubstepScheme scheme,
                      double cfl) {
  const int n_req = required_substeps(model, grid, t_lo, t_hi, cfl);
  if (n_req > 1) {
    std::ostringstream msg;
    msg << "interval [" << t_lo << ", " << t_hi
        << "] exceeds the CFL bound; " << n_req
        << " equal substeps are required";
    throw CflError(msg.str(), n_req);
  }
  return solve_backward(model, grid, t_lo, t_hi, scheme, 1);
}

FlowMap2D checkpoint_map(const VelocityField& model, const Grid2D& grid,
                         double t_lo, double t_hi, SubstepScheme scheme,
                         double cfl, int forced_substeps,
                         int speed_time_samples) {
  const int n_sub =
      forced_substeps > 0
          ? forced_substeps
          : required_substeps(model, grid, t_lo, t_hi, cfl,
                              speed_time_samples);
  return solve_backward(model, grid, t_lo, t_hi, scheme, n_sub);
}

void apply_boundary(ScalarField2D& component, LabelAxis label,
                    const VelocityField& model, double t) {
  const Grid2D& g = component.grid();
  std::vector<double> u, v;
  sample_velocity(model, g, t, u, v);
  override_walls(component, label, g, u, v);
}

}  // namespace isleflow
