#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/field.hpp"
#include "core/grid.hpp"
#include "core/lyapunov.hpp"

namespace isleflow {

struct RidgePoint {
  std::int64_t i = 0;
  std::int64_t j = 0;
  double value = 0.0;
  // Unit estimate of the crest normal (eigenvector of the smaller smoothed
  // Hessian eigenvalue).
  double normal_x = 0.0;
  double normal_y = 0.0;
  // 8-connected component id, 0 for the largest component, then by
  // decreasing size.
  int component = 0;
};

struct RidgeSet {
  std::string source;        // free-text tag of the detected field
  double percentile = 0.0;   // requested percentile gate
  double threshold = 0.0;    // realized threshold value
  int band = 0;              // boundary cells excluded from detection
  int smoothing_radius = 0;  // box radius used for the normal Hessian
  std::vector<RidgePoint> points;  // sorted by (j, i)
};

// Discrete generalized maxima of a scalar field. A point is kept when its
// value reaches the nearest-rank percentile threshold over the interior
// band and it is a strict local maximum along at least one of the four
// grid directions (axis or diagonal). Both gates compare field values
// only, so the detected set is exactly invariant under any strictly
// increasing pointwise transform of the field; the smoothed Hessian enters
// only through the normal estimates. A band of cells along the boundary is
// excluded (one-sided data corrupts crest tests there).
RidgeSet detect_ridges(const ScalarField2D& field, double percentile = 90.0,
                       int band = 3, int smoothing_radius = 1,
                       const std::string& source = "");

// The largest 8-connected component of a ridge set, which stands in for
// "the" ridge when the detector fragments.
RidgeSet dominant_component(const RidgeSet& ridges);

// Minimum of an arbitrary field sampled over the ridge points (the field
// need not be the one the ridge was detected on). Empty set is an error.
double ridge_min(const ScalarField2D& field, const RidgeSet& ridges);

struct TubeMask {
  Grid2D grid;
  double rho = 0.0;
  std::vector<char> mask;  // 1 where the node is within rho of a ridge point
  std::size_t count = 0;
};

// Nodes within distance rho of any ridge point, by brute-force distance
// checks (grids here are small; a distance transform would drop the cost
// to linear if that ever changes).
TubeMask tube_mask(const Grid2D& grid, const RidgeSet& ridges, double rho);

// Detects ridges of sigma and of lambda at the same percentile and
// reports the symmetric difference of the two point sets. Because
// sigma = ln(lambda) / (2|t|) is a strictly increasing function of lambda
// for fixed t != 0 and detection is order-based, the sets must coincide
// exactly.
struct RidgeEquivalenceReport {
  RidgeSet sigma_ridges;
  RidgeSet lambda_ridges;
  std::vector<std::pair<std::int64_t, std::int64_t>> only_sigma;
  std::vector<std::pair<std::int64_t, std::int64_t>> only_lambda;
  bool equal = false;
};

RidgeEquivalenceReport check_ridge_set_equivalence(const FtleField& sigma,
                                                   const LambdaField& lambda,
                                                   double percentile = 90.0,
                                                   int band = 3,
                                                   int smoothing_radius = 1);

// Checks that the separation exponent stays positive on a tube around the
// ridge: builds the tube of radius rho, extracts the ISLE field for r, and
// returns the fraction of tube nodes with gamma > 0. The bound m is the
// minimum of the envelope's final frame (the running maximum of
// sqrt(lambda)) over the ridge points; positivity on the whole tube is
// expected whenever r < m and the tube stays clear of the walls.
struct TubePositivityReport {
  double fraction = 0.0;
  double m = 0.0;          // min final envelope value over ridge points
  bool precondition_ok = false;  // r < m
  std::size_t tube_points = 0;
  std::size_t positive_points = 0;
};

TubePositivityReport check_tube_positivity(const SeparationEnvelope& envelope,
                                           const RidgeSet& ridges, double r,
                                           double rho);

// The exponential lower-bound heuristic for picking a separation factor:
// r = e^{l t}. The rate l should sit below the minimum of sigma over the
// ridge; when it does not, the suggestion carries a warning instead of
// failing.
struct SeparationSuggestion {
  double r = 1.0;
  bool rate_ok = false;
  std::string warning;
};

SeparationSuggestion suggest_separation_factor(const FtleField& sigma,
                                               const RidgeSet& ridges,
                                               double t, double rate);

// Text export of ridge points (x, y, value per line) for overlay plots.
std::string ridge_points_text(const Grid2D& grid, const RidgeSet& ridges);

}  // namespace isleflow
