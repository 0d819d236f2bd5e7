#include "core/lyapunov.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace isleflow {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Second-order derivative along one line of samples: central in the
// interior, one-sided at the ends.
inline double line_derivative(double fm, double f0, double fp, double inv_2h,
                              int where) {
  // where: -1 first node, 0 interior, +1 last node. For the one-sided
  // forms fm/f0/fp hold the three nodes nearest the wall, wall first.
  if (where == 0) return (fp - fm) * inv_2h;
  if (where < 0) return (-3.0 * fm + 4.0 * f0 - fp) * inv_2h;
  return (3.0 * fp - 4.0 * f0 + fm) * inv_2h;
}

}  // namespace

LambdaField cauchy_green_lambda(const ScalarField2D& arrival_x,
                                const ScalarField2D& arrival_y) {
  if (!arrival_x.grid().same_layout(arrival_y.grid())) {
    throw Error(ErrorCode::InvalidArgument,
                "arrival components live on different grids");
  }
  const Grid2D& g = arrival_x.grid();
  if (g.nx < 3 || g.ny < 3) {
    throw Error(ErrorCode::InvalidArgument,
                "gradient stencils need at least 3 nodes per axis");
  }
  const double inv_2dx = 0.5 / g.dx();
  const double inv_2dy = 0.5 / g.dy();

  LambdaField lambda(g);
  for (std::int64_t j = 0; j < g.ny; ++j) {
    const int wy = j == 0 ? -1 : (j == g.ny - 1 ? 1 : 0);
    const std::int64_t jm = wy < 0 ? 0 : (wy > 0 ? g.ny - 3 : j - 1);
    const std::int64_t jc = wy < 0 ? 1 : (wy > 0 ? g.ny - 2 : j);
    const std::int64_t jp = wy < 0 ? 2 : (wy > 0 ? g.ny - 1 : j + 1);
    for (std::int64_t i = 0; i < g.nx; ++i) {
      const int wx = i == 0 ? -1 : (i == g.nx - 1 ? 1 : 0);
      const std::int64_t im = wx < 0 ? 0 : (wx > 0 ? g.nx - 3 : i - 1);
      const std::int64_t ic = wx < 0 ? 1 : (wx > 0 ? g.nx - 2 : i);
      const std::int64_t ip = wx < 0 ? 2 : (wx > 0 ? g.nx - 1 : i + 1);

      const double a = line_derivative(arrival_x.at(im, j), arrival_x.at(ic, j),
                                       arrival_x.at(ip, j), inv_2dx, wx);
      const double c = line_derivative(arrival_y.at(im, j), arrival_y.at(ic, j),
                                       arrival_y.at(ip, j), inv_2dx, wx);
      const double b = line_derivative(arrival_x.at(i, jm), arrival_x.at(i, jc),
                                       arrival_x.at(i, jp), inv_2dy, wy);
      const double d = line_derivative(arrival_y.at(i, jm), arrival_y.at(i, jc),
                                       arrival_y.at(i, jp), inv_2dy, wy);

      const double c11 = a * a + c * c;
      const double c12 = a * b + c * d;
      const double c22 = b * b + d * d;
      const double mean = 0.5 * (c11 + c22);
      const double diff = 0.5 * (c11 - c22);
      const double lam = mean + std::sqrt(diff * diff + c12 * c12);
      lambda.at(i, j) = lam < kLambdaFloor ? kLambdaFloor : lam;
    }
  }
  return lambda;
}

LambdaField cauchy_green_lambda(const FlowMap2D& map) {
  return cauchy_green_lambda(map.arrival_x(), map.arrival_y());
}

FtleField ftle(const LambdaField& lambda, double t) {
  if (t == 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "the exponent is undefined over a zero horizon");
  }
  const double inv = 1.0 / (2.0 * std::abs(t));
  FtleField sigma(lambda.grid());
  const auto& in = lambda.values();
  auto& out = sigma.values();
  for (std::size_t p = 0; p < in.size(); ++p) out[p] = std::log(in[p]) * inv;
  return sigma;
}

SeparationEnvelope::SeparationEnvelope(const Grid2D& grid, const TimeAxis& axis)
    : grid_(grid), axis_(axis) {
  frames_.resize(static_cast<std::size_t>(axis.n_steps) + 1);
  frames_[0].assign(grid.size(), 0.0);
  stored_ = 1;
}

SeparationEnvelope SeparationEnvelope::from_frames(
    const Grid2D& grid, const TimeAxis& axis,
    std::vector<std::vector<double>> frames) {
  if (frames.size() != static_cast<std::size_t>(axis.n_steps) + 1) {
    throw Error(ErrorCode::Format,
                "envelope needs " + std::to_string(axis.n_steps + 1) +
                    " frames, got " + std::to_string(frames.size()));
  }
  for (std::size_t n = 0; n < frames.size(); ++n) {
    if (frames[n].size() != grid.size()) {
      throw Error(ErrorCode::Format,
                  "envelope frame " + std::to_string(n) + " holds " +
                      std::to_string(frames[n].size()) + " values, expected " +
                      std::to_string(grid.size()));
    }
    if (n == 0) continue;
    for (std::size_t p = 0; p < frames[n].size(); ++p) {
      if (!(frames[n][p] >= frames[n - 1][p])) {
        throw Error(ErrorCode::Format,
                    "envelope not time-monotone at frame " + std::to_string(n) +
                        ", point " + std::to_string(p));
      }
    }
  }
  SeparationEnvelope env;
  env.grid_ = grid;
  env.axis_ = axis;
  env.frames_ = std::move(frames);
  env.stored_ = axis.n_steps + 1;
  return env;
}

const std::vector<double>& SeparationEnvelope::frame(std::int64_t n) const {
  if (n < 0 || n >= stored_) {
    throw Error(ErrorCode::OutOfRange,
                "envelope frame " + std::to_string(n) +
                    " not stored yet (have " + std::to_string(stored_) + ")");
  }
  return frames_[static_cast<std::size_t>(n)];
}

void SeparationEnvelope::update(std::int64_t n, const LambdaField& lambda) {
  if (n != stored_) {
    throw Error(ErrorCode::InvalidArgument,
                "envelope updates must arrive in order: expected checkpoint " +
                    std::to_string(stored_) + ", got " + std::to_string(n));
  }
  if (n > axis_.n_steps) {
    throw Error(ErrorCode::InvalidArgument,
                "checkpoint index past the end of the time axis");
  }
  if (!lambda.grid().same_layout(grid_)) {
    throw Error(ErrorCode::InvalidArgument,
                "lambda field grid differs from the envelope grid");
  }
  const std::vector<double>& prev = frames_[static_cast<std::size_t>(n - 1)];
  std::vector<double>& cur = frames_[static_cast<std::size_t>(n)];
  cur.resize(grid_.size());
  const auto& lam = lambda.values();
  for (std::size_t p = 0; p < cur.size(); ++p) {
    const double s = std::sqrt(lam[p]);
    cur[p] = s > prev[p] ? s : prev[p];
  }
  ++stored_;
}

void update_envelope(SeparationEnvelope& envelope, std::int64_t n,
                     const LambdaField& lambda) {
  envelope.update(n, lambda);
}

double crossing_time(const SeparationEnvelope& envelope, std::size_t point,
                     double r) {
  if (!(r > 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "separation factor must exceed 1");
  }
  if (!envelope.complete()) {
    throw Error(ErrorCode::InvalidArgument,
                "envelope incomplete: crossing queries need all checkpoints");
  }
  if (point >= static_cast<std::size_t>(envelope.grid().size())) {
    throw Error(ErrorCode::OutOfRange, "envelope point index out of range");
  }
  const TimeAxis& ax = envelope.axis();
  const double dt = ax.dt();
  for (std::int64_t n = 0; n < ax.n_steps; ++n) {
    const double s_lo = envelope.frame(n)[point];
    const double s_hi = envelope.frame(n + 1)[point];
    if (s_lo <= r && r <= s_hi) {
      if (s_hi == s_lo) return ax.time(n);
      return ax.time(n) + (r - s_lo) / (s_hi - s_lo) * dt;
    }
  }
  return kNan;
}

ScalarField2D crossing_time_field(const SeparationEnvelope& envelope,
                                  double r) {
  ScalarField2D tau(envelope.grid());
  auto& out = tau.values();
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = crossing_time(envelope, p, r);
  }
  return tau;
}

IsleField isle(const SeparationEnvelope& envelope, double r) {
  IsleField field;
  field.r = r;
  field.tau = crossing_time_field(envelope, r);
  field.gamma = ScalarField2D(envelope.grid());
  const double ln_r = std::log(r);
  const double t0 = envelope.axis().t0;
  const auto& tau = field.tau.values();
  auto& gamma = field.gamma.values();
  for (std::size_t p = 0; p < tau.size(); ++p) {
    gamma[p] = std::isnan(tau[p]) ? 0.0 : ln_r / std::abs(tau[p] - t0);
  }
  return field;
}

void EnvelopeObserver::operator()(const CheckpointStats& stats,
                                  const FlowMap2D& composed) const {
  envelope_->update(stats.n, cauchy_green_lambda(composed));
}

FsleOracleResult fsle_neighbor_oracle(const VelocityField& model, double x0,
                                      double y0, double eps, double r,
                                      double dt_sub, double t0, double t_max) {
  if (!(eps > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "neighbor offset must be positive");
  }
  if (!(r > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "separation factor must exceed 1");
  }
  if (!(dt_sub > 0.0) || !(t_max > t0)) {
    throw Error(ErrorCode::InvalidArgument, "bad tracing window");
  }

  const double target = r * eps;
  double px[5] = {x0, x0 + eps, x0 - eps, x0, x0};
  double py[5] = {y0, y0, y0, y0 + eps, y0 - eps};

  auto max_separation = [&]() {
    double best = 0.0;
    for (int k = 1; k < 5; ++k) {
      const double dx = px[k] - px[0];
      const double dy = py[k] - py[0];
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d > best) best = d;
    }
    return best;
  };

  const double span = t_max - t0;
  const std::int64_t n_steps = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(span / dt_sub - 1e-12)));
  const double h = span / static_cast<double>(n_steps);

  FsleOracleResult absent{kNan, kNan};
  // Initial separation is exactly eps < r * eps, so the first crossing is
  // strictly inside the window.
  double sep_prev = max_separation();
  for (std::int64_t s = 0; s < n_steps; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    for (int k = 0; k < 5; ++k) {
      const double x = px[k];
      const double y = py[k];
      const VelocitySample k1 = model.sample(x, y, t);
      const VelocitySample k2 =
          model.sample(x + 0.5 * h * k1.u, y + 0.5 * h * k1.v, t + 0.5 * h);
      const VelocitySample k3 =
          model.sample(x + 0.5 * h * k2.u, y + 0.5 * h * k2.v, t + 0.5 * h);
      const VelocitySample k4 =
          model.sample(x + h * k3.u, y + h * k3.v, t + h);
      px[k] = x + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
      py[k] = y + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
      if (!std::isfinite(px[k]) || !std::isfinite(py[k])) return absent;
    }
    const double sep = max_separation();
    if (sep >= target) {
      double frac = 1.0;
      if (sep > sep_prev) frac = (target - sep_prev) / (sep - sep_prev);
      const double tau = (static_cast<double>(s) + frac) * h;
      return {std::log(r) / tau, tau};
    }
    sep_prev = sep;
  }
  return absent;
}

}  // namespace isleflow
