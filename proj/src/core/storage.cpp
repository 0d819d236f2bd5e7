#include "core/storage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "core/binio.hpp"
#include "core/error.hpp"

namespace isleflow {

namespace {

constexpr char kFieldMagic[9] = "ISLEFLD1";
constexpr char kMapMagic[9] = "ISLEMAP1";
constexpr char kVolumeMagic[9] = "ISLEVOL1";

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw Error(ErrorCode::Io, path + ": cannot open for writing");
  }
  return out;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) {
    throw Error(ErrorCode::Io, path + ": cannot open for reading");
  }
  return in;
}

void flush_or_throw(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    throw Error(ErrorCode::Io, path + ": write failed");
  }
}

// Byte cursor helpers so every loader error can say where it happened.
struct Reader {
  std::ifstream in;
  std::string path;
  std::uint64_t offset = 0;

  std::uint64_t u64(const char* what) {
    const std::uint64_t v = binio::get_u64(in, path, offset, what);
    offset += 8;
    return v;
  }
  double f64(const char* what) {
    const double v = binio::get_f64(in, path, offset, what);
    offset += 8;
    return v;
  }
  void magic(const char* expect) {
    char got[8];
    in.read(got, 8);
    if (in.gcount() != 8) {
      throw Error(ErrorCode::Format,
                  path + ": truncated while reading the 8-byte magic tag");
    }
    if (std::string(got, 8) != std::string(expect, 8)) {
      throw Error(ErrorCode::Format,
                  path + ": bad magic tag \"" + std::string(got, 8) +
                      "\", expected \"" + std::string(expect, 8) + "\"");
    }
    offset += 8;
  }
  void expect_eof() {
    char extra;
    in.read(&extra, 1);
    if (in.gcount() != 0) {
      throw Error(ErrorCode::Format,
                  path + ": trailing bytes after the payload at offset " +
                      std::to_string(offset));
    }
  }
};

void write_grid_header(std::ofstream& out, const Grid2D& g) {
  binio::put_f64(out, g.x_min);
  binio::put_f64(out, g.x_max);
  binio::put_f64(out, g.y_min);
  binio::put_f64(out, g.y_max);
  binio::put_u64(out, static_cast<std::uint64_t>(g.nx));
  binio::put_u64(out, static_cast<std::uint64_t>(g.ny));
}

Grid2D read_grid_header(Reader& r) {
  const double x_min = r.f64("grid x_min");
  const double x_max = r.f64("grid x_max");
  const double y_min = r.f64("grid y_min");
  const double y_max = r.f64("grid y_max");
  const std::uint64_t nx = r.u64("grid nx");
  const std::uint64_t ny = r.u64("grid ny");
  if (nx < 2 || ny < 2 || nx > (1u << 20) || ny > (1u << 20)) {
    throw Error(ErrorCode::Format, r.path + ": implausible grid size " +
                                       std::to_string(nx) + " x " +
                                       std::to_string(ny));
  }
  try {
    return Grid2D::create(x_min, x_max, y_min, y_max,
                          static_cast<std::int64_t>(nx),
                          static_cast<std::int64_t>(ny));
  } catch (const Error& e) {
    throw Error(ErrorCode::Format,
                r.path + ": invalid grid header: " + e.what());
  }
}

void write_samples(std::ofstream& out, const std::vector<double>& v) {
  for (double x : v) binio::put_f64(out, x);
}

}  // namespace

void save_field(const std::string& path, const ScalarField2D& field) {
  std::ofstream out = open_out(path, true);
  out.write(kFieldMagic, 8);
  write_grid_header(out, field.grid());
  write_samples(out, field.values());
  flush_or_throw(out, path);
}

ScalarField2D load_field(const std::string& path) {
  Reader r{open_in(path, true), path};
  r.magic(kFieldMagic);
  const Grid2D g = read_grid_header(r);
  std::vector<double> values(g.size());
  for (std::size_t p = 0; p < values.size(); ++p) {
    values[p] = r.f64("field sample");
  }
  r.expect_eof();
  return ScalarField2D(g, std::move(values));
}

void save_map(const std::string& path, const FlowMap2D& map) {
  std::ofstream out = open_out(path, true);
  out.write(kMapMagic, 8);
  write_grid_header(out, map.grid());
  binio::put_u64(out, map.clamp_events());
  write_samples(out, map.arrival_x().values());
  write_samples(out, map.arrival_y().values());
  flush_or_throw(out, path);
}

FlowMap2D load_map(const std::string& path) {
  Reader r{open_in(path, true), path};
  r.magic(kMapMagic);
  const Grid2D g = read_grid_header(r);
  const std::uint64_t clamps = r.u64("clamp-event count");
  std::vector<double> xs(g.size()), ys(g.size());
  for (std::size_t p = 0; p < xs.size(); ++p) xs[p] = r.f64("arrival x");
  for (std::size_t p = 0; p < ys.size(); ++p) ys[p] = r.f64("arrival y");
  r.expect_eof();
  try {
    return FlowMap2D::from_stored(ScalarField2D(g, std::move(xs)),
                                  ScalarField2D(g, std::move(ys)), clamps);
  } catch (const Error& e) {
    throw Error(ErrorCode::Format, path + ": " + std::string(e.what()));
  }
}

void save_volume(const std::string& path, const SeparationEnvelope& envelope,
                 std::int64_t thin_stride) {
  if (!envelope.complete()) {
    throw Error(ErrorCode::InvalidArgument,
                "volume save needs a complete envelope");
  }
  const TimeAxis& ax = envelope.axis();
  if (thin_stride < 1) {
    throw Error(ErrorCode::InvalidArgument, "thin stride must be >= 1");
  }
  if (ax.n_steps % thin_stride != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "thin stride " + std::to_string(thin_stride) +
                    " does not divide the checkpoint count " +
                    std::to_string(ax.n_steps));
  }
  const std::int64_t n_out = ax.n_steps / thin_stride;

  std::ofstream out = open_out(path, true);
  out.write(kVolumeMagic, 8);
  write_grid_header(out, envelope.grid());
  binio::put_f64(out, ax.t0);
  binio::put_f64(out, ax.t_end);
  binio::put_u64(out, static_cast<std::uint64_t>(n_out));
  for (std::int64_t n = 0; n <= n_out; ++n) {
    write_samples(out, envelope.frame(n * thin_stride));
  }
  flush_or_throw(out, path);
}

SeparationEnvelope load_volume(const std::string& path) {
  Reader r{open_in(path, true), path};
  r.magic(kVolumeMagic);
  const Grid2D g = read_grid_header(r);
  const double t0 = r.f64("time axis t0");
  const double t_end = r.f64("time axis t_end");
  const std::uint64_t n_steps = r.u64("checkpoint count");
  if (n_steps < 1 || n_steps > (1u << 24)) {
    throw Error(ErrorCode::Format, path + ": implausible checkpoint count " +
                                       std::to_string(n_steps));
  }
  TimeAxis ax;
  try {
    ax = TimeAxis::create(t0, t_end, static_cast<std::int64_t>(n_steps));
  } catch (const Error& e) {
    throw Error(ErrorCode::Format,
                path + ": invalid time header: " + e.what());
  }

  std::vector<std::vector<double>> frames(n_steps + 1);
  for (std::uint64_t n = 0; n <= n_steps; ++n) {
    frames[n].resize(g.size());
    for (std::size_t p = 0; p < frames[n].size(); ++p) {
      const std::uint64_t at = r.offset;
      double v;
      try {
        v = r.f64("envelope sample");
      } catch (const Error&) {
        throw Error(ErrorCode::Format,
                    path + ": truncated volume: frame " + std::to_string(n) +
                        " of " + std::to_string(n_steps + 1) +
                        " is missing or incomplete at byte offset " +
                        std::to_string(at));
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::Format,
                    path + ": non-finite envelope sample in frame " +
                        std::to_string(n) + ", point " + std::to_string(p) +
                        ", byte offset " + std::to_string(at));
      }
      if (n > 0 && v < frames[n - 1][p]) {
        std::ostringstream msg;
        msg.precision(17);
        msg << path << ": monotonicity violation: frame " << n << ", point "
            << p << ", byte offset " << at << ": value " << v
            << " drops below " << frames[n - 1][p];
        throw Error(ErrorCode::Format, msg.str());
      }
      frames[n][p] = v;
    }
  }
  r.expect_eof();
  if (!frames[0].empty()) {
    // Frame 0 must be the Algorithm's zero start for crossing queries to
    // bracket inside the first interval.
    for (std::size_t p = 0; p < frames[0].size(); ++p) {
      if (frames[0][p] != 0.0) {
        throw Error(ErrorCode::Format,
                    path + ": frame 0 must be identically zero, point " +
                        std::to_string(p) + " holds " +
                        std::to_string(frames[0][p]));
      }
    }
  }
  return SeparationEnvelope::from_frames(g, ax, std::move(frames));
}

void save_field_text(const std::string& path, const ScalarField2D& field) {
  std::ofstream out = open_out(path, false);
  const Grid2D& g = field.grid();
  out.precision(17);
  out << "# isleflow-field " << g.nx << " " << g.ny << " " << g.x_min << " "
      << g.x_max << " " << g.y_min << " " << g.y_max << "\n";
  for (std::int64_t j = 0; j < g.ny; ++j) {
    for (std::int64_t i = 0; i < g.nx; ++i) {
      if (i) out << " ";
      out << field.at(i, j);
    }
    out << "\n";
  }
  flush_or_throw(out, path);
}

ScalarField2D load_field_text(const std::string& path) {
  std::ifstream in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::Format, path + ": empty file");
  }
  std::istringstream head(line);
  std::string hash, tag;
  std::int64_t nx = 0, ny = 0;
  double x_min, x_max, y_min, y_max;
  head >> hash >> tag >> nx >> ny >> x_min >> x_max >> y_min >> y_max;
  if (!head || hash != "#" || tag != "isleflow-field") {
    throw Error(ErrorCode::Format,
                path + ": line 1: expected \"# isleflow-field nx ny x_min "
                       "x_max y_min y_max\"");
  }
  Grid2D g;
  try {
    g = Grid2D::create(x_min, x_max, y_min, y_max, nx, ny);
  } catch (const Error& e) {
    throw Error(ErrorCode::Format, path + ": line 1: " + e.what());
  }
  ScalarField2D field(g);
  for (std::int64_t j = 0; j < ny; ++j) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::Format, path + ": line " + std::to_string(j + 2) +
                                         ": missing row " + std::to_string(j));
    }
    std::istringstream row(line);
    for (std::int64_t i = 0; i < nx; ++i) {
      if (!(row >> field.at(i, j))) {
        throw Error(ErrorCode::Format,
                    path + ": line " + std::to_string(j + 2) + ": row " +
                        std::to_string(j) + " stops after " +
                        std::to_string(i) + " of " + std::to_string(nx) +
                        " values");
      }
    }
  }
  return field;
}

void save_pgm16(const std::string& path, const ScalarField2D& field) {
  const Grid2D& g = field.grid();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : field.values()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument,
                  "image export needs a finite field");
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;

  std::ofstream out = open_out(path, true);
  out << "P5\n" << g.nx << " " << g.ny << "\n65535\n";
  // Image rows run top-down; the top row is the grid's y_max row.
  for (std::int64_t j = g.ny - 1; j >= 0; --j) {
    for (std::int64_t i = 0; i < g.nx; ++i) {
      double t = span > 0.0 ? (field.at(i, j) - lo) / span : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const auto s = static_cast<std::uint16_t>(std::lround(t * 65535.0));
      const std::array<unsigned char, 2> be = {
          static_cast<unsigned char>(s >> 8),
          static_cast<unsigned char>(s & 0xff)};
      out.write(reinterpret_cast<const char*>(be.data()), 2);
    }
  }
  flush_or_throw(out, path);

  std::ofstream meta = open_out(path + ".meta", false);
  meta.precision(17);
  meta << "format pgm16-linear\n"
       << "min " << lo << "\n"
       << "max " << hi << "\n"
       << "width " << g.nx << "\n"
       << "height " << g.ny << "\n"
       << "top-row y_max\n"
       << "mapping sample = round(65535 * (value - min) / (max - min)), 0 "
          "when max = min\n";
  flush_or_throw(meta, path + ".meta");
}

Pgm16Image load_pgm16(const std::string& path) {
  std::ifstream in = open_in(path, true);
  std::string magic;
  in >> magic;
  if (magic != "P5") {
    throw Error(ErrorCode::Format,
                path + ": not a binary graymap (magic \"" + magic + "\")");
  }
  std::int64_t w = 0, h = 0, maxval = 0;
  in >> w >> h >> maxval;
  if (!in || w < 1 || h < 1) {
    throw Error(ErrorCode::Format, path + ": bad graymap dimensions");
  }
  if (maxval != 65535) {
    throw Error(ErrorCode::Format,
                path + ": expected 16-bit samples (maxval 65535), got " +
                    std::to_string(maxval));
  }
  in.get();  // single whitespace after maxval
  Pgm16Image img;
  img.width = w;
  img.height = h;
  img.samples.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (std::size_t p = 0; p < img.samples.size(); ++p) {
    unsigned char be[2];
    in.read(reinterpret_cast<char*>(be), 2);
    if (in.gcount() != 2) {
      throw Error(ErrorCode::Format,
                  path + ": truncated at sample " + std::to_string(p) +
                      " of " + std::to_string(img.samples.size()));
    }
    img.samples[p] = static_cast<std::uint16_t>((be[0] << 8) | be[1]);
  }
  return img;
}

void save_ridges_text(const std::string& path, const Grid2D& grid,
                      const RidgeSet& ridges) {
  std::ofstream out = open_out(path, false);
  out.precision(17);
  out << "# isleflow-ridges source=" << (ridges.source.empty() ? "field"
                                                               : ridges.source)
      << " percentile=" << ridges.percentile
      << " threshold=" << ridges.threshold << " band=" << ridges.band
      << " smoothing=" << ridges.smoothing_radius
      << " points=" << ridges.points.size() << "\n";
  out << ridge_points_text(grid, ridges);
  flush_or_throw(out, path);
}

}  // namespace isleflow
