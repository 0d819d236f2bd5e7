#pragma once

#include <cstdint>
#include <string>

#include "core/field.hpp"
#include "core/flow_map.hpp"
#include "core/grid.hpp"
#include "core/lyapunov.hpp"
#include "core/ridge.hpp"

namespace isleflow {

// Binary on-disk formats. All share the layout
//   8-byte ascii magic,
//   grid header: x_min x_max y_min y_max as f64, nx ny as u64,
//   format-specific payload,
// with every number little-endian. Loaders validate magic, dimensions and
// payload length and report byte offsets on corruption.

// Scalar field, magic "ISLEFLD1": header then nx*ny f64 samples, row-major
// with x fastest.
void save_field(const std::string& path, const ScalarField2D& field);
ScalarField2D load_field(const std::string& path);

// Flow map, magic "ISLEMAP1": header, clamp-event count as u64, then both
// arrival components (x block first), each nx*ny f64.
void save_map(const std::string& path, const FlowMap2D& map);
FlowMap2D load_map(const std::string& path);

// Separation-envelope volume, magic "ISLEVOL1": header, then t0 and t_end
// as f64 and the checkpoint count N as u64, then N+1 frames of nx*ny f64.
// Loading re-validates pointwise time monotonicity and names the frame,
// point and byte offset of the first violation. thin_stride k > 1 stores
// every k-th frame (N must be divisible by k); the stored axis has N/k
// checkpoints over the same span.
void save_volume(const std::string& path, const SeparationEnvelope& envelope,
                 std::int64_t thin_stride = 1);
SeparationEnvelope load_volume(const std::string& path);

// Text field format: one header line
//   # isleflow-field nx ny x_min x_max y_min y_max
// then ny rows of nx decimal values (17 significant digits), bottom row
// first (j = 0).
void save_field_text(const std::string& path, const ScalarField2D& field);
ScalarField2D load_field_text(const std::string& path);

// 16-bit binary portable graymap plus a text sidecar (path + ".meta")
// recording the linear min/max mapping. The image top row is the grid's
// y_max row. A constant field maps to all zeros with min = max recorded.
void save_pgm16(const std::string& path, const ScalarField2D& field);

struct Pgm16Image {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<std::uint16_t> samples;  // row-major from the top row down
};

Pgm16Image load_pgm16(const std::string& path);

// Ridge point list as text for overlay plotting, with the detection
// parameters in comment lines.
void save_ridges_text(const std::string& path, const Grid2D& grid,
                      const RidgeSet& ridges);

}  // namespace isleflow
