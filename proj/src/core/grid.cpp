#include "core/grid.hpp"

#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace isleflow {

Grid2D Grid2D::create(double x_min, double x_max, double y_min, double y_max,
                      std::int64_t nx, std::int64_t ny) {
  if (!(x_min < x_max) || !(y_min < y_max)) {
    std::ostringstream msg;
    msg << "grid extents must satisfy x_min < x_max and y_min < y_max, got ["
        << x_min << ", " << x_max << "] x [" << y_min << ", " << y_max << "]";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  if (nx < 2 || ny < 2) {
    std::ostringstream msg;
    msg << "grid needs at least 2 nodes per axis, got nx=" << nx
        << " ny=" << ny;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(y_min) ||
      !std::isfinite(y_max)) {
    throw Error(ErrorCode::InvalidArgument, "grid extents must be finite");
  }
  return Grid2D{x_min, x_max, y_min, y_max, nx, ny};
}

bool Grid2D::same_layout(const Grid2D& other) const {
  return x_min == other.x_min && x_max == other.x_max &&
         y_min == other.y_min && y_max == other.y_max && nx == other.nx &&
         ny == other.ny;
}

TimeAxis TimeAxis::create(double t0, double t_end, std::int64_t n_steps) {
  if (!std::isfinite(t0) || !std::isfinite(t_end) || !(t0 < t_end)) {
    std::ostringstream msg;
    msg << "time axis needs finite t0 < t_end, got [" << t0 << ", " << t_end
        << "]";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  if (n_steps < 1) {
    std::ostringstream msg;
    msg << "time axis needs at least 1 step, got " << n_steps;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  return TimeAxis{t0, t_end, n_steps};
}

double cfl_timestep(double u_max, double v_max, const Grid2D& grid,
                    double cfl) {
  if (u_max < 0.0 || v_max < 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "speed bounds must be nonnegative");
  }
  if (!(cfl > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cfl number must be positive");
  }
  const double rate = u_max / grid.dx() + v_max / grid.dy();
  if (rate == 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "zero velocity bound makes the CFL step unbounded; supply an "
                "explicit step or checkpoint count");
  }
  return cfl / rate;
}

}  // namespace isleflow
