#include "core/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "core/binio.hpp"
#include "core/error.hpp"

namespace isleflow {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

VelocitySample DoubleGyreField::sample(double x, double y, double t) const {
  const double a = eps_ * std::sin(omega_ * t);
  const double b = 1.0 - 2.0 * eps_ * std::sin(omega_ * t);
  const double g = a * x * x + b * x;
  const double dg_dx = 2.0 * a * x + b;
  const double u =
      -kPi * amplitude_ * std::sin(kPi * g) * std::cos(kPi * y);
  const double v =
      kPi * amplitude_ * std::cos(kPi * g) * std::sin(kPi * y) * dg_dx;
  return {kStreamOrientation * u, kStreamOrientation * v};
}

std::optional<Grid2D> DoubleGyreField::domain_hint() const {
  return Grid2D::create(0.0, 2.0, 0.0, 1.0, 2, 2);
}

VelocitySample QuadSaddleField::sample(double x, double y, double) const {
  return {x - y * y, -y + x * x};
}

std::optional<Grid2D> QuadSaddleField::domain_hint() const {
  return Grid2D::create(-6.0, 6.0, -6.0, 6.0, 2, 2);
}

VelocitySample DuffingVanDerPolField::sample(double x, double y,
                                             double t) const {
  const double u = y;
  const double v =
      x - x * x * x + 0.5 * y * (1.0 - x * x) + 0.1 * std::sin(t);
  return {u, v};
}

std::optional<Grid2D> DuffingVanDerPolField::domain_hint() const {
  return Grid2D::create(-2.0, 2.0, -1.5, 1.5, 2, 2);
}

GriddedVelocityField::GriddedVelocityField(
    const Grid2D& grid, std::vector<double> times,
    std::vector<std::vector<double>> u_frames,
    std::vector<std::vector<double>> v_frames)
    : grid_(grid),
      times_(std::move(times)),
      u_frames_(std::move(u_frames)),
      v_frames_(std::move(v_frames)) {
  if (times_.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "gridded velocity needs at least one frame");
  }
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k - 1] < times_[k])) {
      std::ostringstream msg;
      msg << "gridded velocity times must be strictly increasing; frame " << k
          << " has t=" << times_[k] << " after t=" << times_[k - 1];
      throw Error(ErrorCode::Format, msg.str());
    }
  }
  if (u_frames_.size() != times_.size() || v_frames_.size() != times_.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "gridded velocity frame count does not match time count");
  }
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (u_frames_[k].size() != grid_.size() ||
        v_frames_[k].size() != grid_.size()) {
      std::ostringstream msg;
      msg << "gridded velocity frame " << k << " has "
          << u_frames_[k].size() << "/" << v_frames_[k].size()
          << " samples, grid expects " << grid_.size();
      throw Error(ErrorCode::Format, msg.str());
    }
  }
}

VelocitySample GriddedVelocityField::sample_frame(std::size_t k, double x,
                                                  double y) const {
  const double fx = (x - grid_.x_min) / grid_.dx();
  const double fy = (y - grid_.y_min) / grid_.dy();
  std::int64_t i = static_cast<std::int64_t>(std::floor(fx));
  std::int64_t j = static_cast<std::int64_t>(std::floor(fy));
  i = std::clamp<std::int64_t>(i, 0, grid_.nx - 2);
  j = std::clamp<std::int64_t>(j, 0, grid_.ny - 2);
  const double wx = std::clamp(fx - static_cast<double>(i), 0.0, 1.0);
  const double wy = std::clamp(fy - static_cast<double>(j), 0.0, 1.0);
  const std::size_t i00 = grid_.index(i, j);
  const std::size_t i10 = grid_.index(i + 1, j);
  const std::size_t i01 = grid_.index(i, j + 1);
  const std::size_t i11 = grid_.index(i + 1, j + 1);
  const auto& uf = u_frames_[k];
  const auto& vf = v_frames_[k];
  const double w00 = (1.0 - wx) * (1.0 - wy);
  const double w10 = wx * (1.0 - wy);
  const double w01 = (1.0 - wx) * wy;
  const double w11 = wx * wy;
  return {w00 * uf[i00] + w10 * uf[i10] + w01 * uf[i01] + w11 * uf[i11],
          w00 * vf[i00] + w10 * vf[i10] + w01 * vf[i01] + w11 * vf[i11]};
}

VelocitySample GriddedVelocityField::sample(double x, double y,
                                            double t) const {
  const double span = times_.back() - times_.front();
  const double slack = 1e-9 * std::max(1.0, std::abs(span));
  if (t < times_.front() - slack || t > times_.back() + slack) {
    std::ostringstream msg;
    msg << "time " << t << " outside stored range [" << times_.front() << ", "
        << times_.back() << "]; gridded velocity does not extrapolate";
    throw Error(ErrorCode::OutOfRange, msg.str());
  }
  const double xc = std::clamp(x, grid_.x_min, grid_.x_max);
  const double yc = std::clamp(y, grid_.y_min, grid_.y_max);
  if (times_.size() == 1) return sample_frame(0, xc, yc);

  auto hi = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k1 = static_cast<std::size_t>(hi - times_.begin());
  k1 = std::clamp<std::size_t>(k1, 1, times_.size() - 1);
  const std::size_t k0 = k1 - 1;
  const double theta =
      std::clamp((t - times_[k0]) / (times_[k1] - times_[k0]), 0.0, 1.0);
  const VelocitySample s0 = sample_frame(k0, xc, yc);
  const VelocitySample s1 = sample_frame(k1, xc, yc);
  return {(1.0 - theta) * s0.u + theta * s1.u,
          (1.0 - theta) * s0.v + theta * s1.v};
}

namespace {

struct HeaderData {
  std::int64_t nx = 0, ny = 0, nt = 0;
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  std::vector<double> times;
  std::string payload;
  std::string endian;
};

constexpr const char* kVelocityMagic = "isleflow-gridded-velocity";

HeaderData parse_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, path + ": cannot open velocity header");
  }
  std::string line;
  if (!std::getline(in, line) || line != kVelocityMagic) {
    throw Error(ErrorCode::Format,
                path + ": missing '" + kVelocityMagic + "' magic line");
  }
  HeaderData h;
  bool saw_nx = false, saw_ny = false, saw_nt = false, saw_x0 = false,
       saw_x1 = false, saw_y0 = false, saw_y1 = false, saw_times = false,
       saw_payload = false;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    auto fail = [&](const std::string& why) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": " << why;
      throw Error(ErrorCode::Format, msg.str());
    };
    if (key == "nx") { if (!(ls >> h.nx)) fail("bad nx"); saw_nx = true; }
    else if (key == "ny") { if (!(ls >> h.ny)) fail("bad ny"); saw_ny = true; }
    else if (key == "nt") { if (!(ls >> h.nt)) fail("bad nt"); saw_nt = true; }
    else if (key == "x_min") { if (!(ls >> h.x_min)) fail("bad x_min"); saw_x0 = true; }
    else if (key == "x_max") { if (!(ls >> h.x_max)) fail("bad x_max"); saw_x1 = true; }
    else if (key == "y_min") { if (!(ls >> h.y_min)) fail("bad y_min"); saw_y0 = true; }
    else if (key == "y_max") { if (!(ls >> h.y_max)) fail("bad y_max"); saw_y1 = true; }
    else if (key == "times") {
      double t;
      while (ls >> t) h.times.push_back(t);
      saw_times = true;
    } else if (key == "payload") {
      if (!(ls >> h.payload)) fail("bad payload filename");
      saw_payload = true;
    } else if (key == "endian") {
      if (!(ls >> h.endian)) fail("bad endian tag");
    } else {
      fail("unknown header key '" + key + "'");
    }
  }
  if (!saw_nx || !saw_ny || !saw_nt || !saw_x0 || !saw_x1 || !saw_y0 ||
      !saw_y1 || !saw_times || !saw_payload) {
    throw Error(ErrorCode::Format,
                path + ": header missing one of nx/ny/nt/x_min/x_max/"
                       "y_min/y_max/times/payload");
  }
  if (h.endian.empty()) h.endian = "little";
  if (h.endian != "little") {
    throw Error(ErrorCode::Format,
                path + ": unsupported endian tag '" + h.endian +
                    "' (only 'little' is supported)");
  }
  if (static_cast<std::int64_t>(h.times.size()) != h.nt) {
    std::ostringstream msg;
    msg << path << ": header declares nt=" << h.nt << " but lists "
        << h.times.size() << " times";
    throw Error(ErrorCode::Format, msg.str());
  }
  return h;
}

}  // namespace

std::unique_ptr<GriddedVelocityField> load_gridded_velocity(
    const std::string& header_path) {
  const HeaderData h = parse_header(header_path);
  const Grid2D grid =
      Grid2D::create(h.x_min, h.x_max, h.y_min, h.y_max, h.nx, h.ny);

  const std::filesystem::path payload_path =
      std::filesystem::path(header_path).parent_path() / h.payload;
  std::ifstream in(payload_path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io,
                payload_path.string() + ": cannot open velocity payload");
  }
  const std::size_t n = grid.size();
  std::vector<std::vector<double>> u_frames, v_frames;
  std::uint64_t offset = 0;
  for (std::int64_t k = 0; k < h.nt; ++k) {
    for (int comp = 0; comp < 2; ++comp) {
      std::vector<double> frame(n);
      for (std::size_t p = 0; p < n; ++p) {
        std::ostringstream what;
        what << (comp == 0 ? "u" : "v") << " frame " << k << " sample " << p;
        frame[p] = binio::get_f64(in, payload_path.string(), offset,
                                  what.str().c_str());
        offset += 8;
      }
      (comp == 0 ? u_frames : v_frames).push_back(std::move(frame));
    }
  }
  char extra;
  if (in.read(&extra, 1), in.gcount() != 0) {
    std::ostringstream msg;
    msg << payload_path.string() << ": trailing bytes after byte offset "
        << offset << " (expected exactly " << offset << " bytes)";
    throw Error(ErrorCode::Format, msg.str());
  }
  return std::make_unique<GriddedVelocityField>(
      grid, h.times, std::move(u_frames), std::move(v_frames));
}

void save_gridded_velocity(const std::string& header_path,
                           const GriddedVelocityField& field) {
  const std::filesystem::path hp(header_path);
  std::filesystem::path payload = hp;
  payload.replace_extension(".bin");

  std::ofstream head(hp);
  if (!head) {
    throw Error(ErrorCode::Io, header_path + ": cannot write velocity header");
  }
  const Grid2D& g = field.grid();
  head << kVelocityMagic << "\n";
  head.precision(17);
  head << "nx " << g.nx << "\n"
       << "ny " << g.ny << "\n"
       << "nt " << field.times().size() << "\n"
       << "x_min " << g.x_min << "\n"
       << "x_max " << g.x_max << "\n"
       << "y_min " << g.y_min << "\n"
       << "y_max " << g.y_max << "\n";
  head << "times";
  for (double t : field.times()) head << " " << t;
  head << "\n";
  head << "payload " << payload.filename().string() << "\n";
  head << "endian little\n";
  if (!head.good()) {
    throw Error(ErrorCode::Io, header_path + ": header write failed");
  }

  std::ofstream out(payload, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::Io,
                payload.string() + ": cannot write velocity payload");
  }
  for (std::size_t k = 0; k < field.times().size(); ++k) {
    for (double v : field.u_frame(k)) binio::put_f64(out, v);
    for (double v : field.v_frame(k)) binio::put_f64(out, v);
  }
  if (!out.good()) {
    throw Error(ErrorCode::Io, payload.string() + ": payload write failed");
  }
}

GriddedVelocityField sample_to_gridded(const VelocityField& model,
                                       const Grid2D& grid,
                                       const std::vector<double>& times) {
  std::vector<std::vector<double>> u_frames, v_frames;
  u_frames.reserve(times.size());
  v_frames.reserve(times.size());
  for (double t : times) {
    std::vector<double> uf(grid.size()), vf(grid.size());
    for (std::int64_t j = 0; j < grid.ny; ++j) {
      for (std::int64_t i = 0; i < grid.nx; ++i) {
        const VelocitySample s = model.sample(grid.x(i), grid.y(j), t);
        uf[grid.index(i, j)] = s.u;
        vf[grid.index(i, j)] = s.v;
      }
    }
    u_frames.push_back(std::move(uf));
    v_frames.push_back(std::move(vf));
  }
  return GriddedVelocityField(grid, times, std::move(u_frames),
                              std::move(v_frames));
}

SpeedBounds max_speeds(const VelocityField& field, const Grid2D& grid,
                       double t_begin, double t_end, int n_time_samples) {
  if (n_time_samples < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "speed sampling needs at least one time");
  }
  SpeedBounds b;
  for (int s = 0; s < n_time_samples; ++s) {
    const double t =
        n_time_samples == 1
            ? t_begin
            : t_begin + (t_end - t_begin) * static_cast<double>(s) /
                            static_cast<double>(n_time_samples - 1);
    for (std::int64_t j = 0; j < grid.ny; ++j) {
      for (std::int64_t i = 0; i < grid.nx; ++i) {
        const VelocitySample v = field.sample(grid.x(i), grid.y(j), t);
        b.u_max = std::max(b.u_max, std::abs(v.u));
        b.v_max = std::max(b.v_max, std::abs(v.v));
      }
    }
  }
  return b;
}

}  // namespace isleflow
