#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/field.hpp"
#include "core/flow_map.hpp"

namespace isleflow {

// Relative L2 error between two flow maps over the interior nodes (a band
// of cells next to each wall is excluded so wall treatment differences do
// not dominate). Both components enter one norm; the reference scale is
// the displacement norm of b, ||b - identity||, so the measure reads
// "error relative to how far the flow actually moved points". A reference
// that barely moves (displacement below eps_abs) switches the measure to
// the absolute L2 difference.
double relative_l2_map(const FlowMap2D& a, const FlowMap2D& b, int band = 0,
                       double eps_abs = 1e-13);

struct ComponentErrors {
  double x = 0.0;
  double y = 0.0;
};

// Same measure split per arrival component.
ComponentErrors relative_l2_map_components(const FlowMap2D& a,
                                           const FlowMap2D& b, int band = 0,
                                           double eps_abs = 1e-13);

// Relative L2 difference of two scalar fields over interior nodes,
// ||a - b|| / ||b||, falling back to the absolute difference for
// near-zero references.
double relative_l2_field(const ScalarField2D& a, const ScalarField2D& b,
                         int band = 0, double eps_abs = 1e-13);

// Least-squares slope of log(err) against log(h). Pairs with nonpositive
// entries are rejected.
double fit_loglog_slope(const std::vector<std::pair<double, double>>& h_err);

// Jaccard index |A intersect B| / |A union B| of two index sets given as
// sorted-or-not lists of linear point indices.
double jaccard_index(std::vector<std::size_t> a, std::vector<std::size_t> b);

}  // namespace isleflow
