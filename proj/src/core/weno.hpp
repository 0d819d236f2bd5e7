#pragma once

#include <span>

namespace isleflow {

enum class WenoBias {
  Left,   // one-sided toward smaller coordinates; derivative at stencil[3]
  Right,  // one-sided toward larger coordinates; derivative at stencil[2]
};

namespace detail {

// Weighted combination of the three candidate derivatives built from five
// consecutive one-sided differences v1..v5. Smoothness indicators follow the
// standard 13/12 (.)^2 + 1/4 (.)^2 form with ideal weights {0.1, 0.6, 0.3}
// and regularization 1e-6.
double weno5_combine(double v1, double v2, double v3, double v4, double v5);

// Fast kernels over a padded line: f points at six consecutive values.
inline double weno5_left(const double* f, double inv_h) {
  return weno5_combine((f[1] - f[0]) * inv_h, (f[2] - f[1]) * inv_h,
                       (f[3] - f[2]) * inv_h, (f[4] - f[3]) * inv_h,
                       (f[5] - f[4]) * inv_h);
}

inline double weno5_right(const double* f, double inv_h) {
  return weno5_combine((f[5] - f[4]) * inv_h, (f[4] - f[3]) * inv_h,
                       (f[3] - f[2]) * inv_h, (f[2] - f[1]) * inv_h,
                       (f[1] - f[0]) * inv_h);
}

}  // namespace detail

// Fifth-order upwind-biased first derivative from six consecutive samples
// with uniform spacing. Left bias evaluates at stencil[3] (stencil covers
// points -3..+2 around it); right bias evaluates at stencil[2] (points
// -2..+3). Exact for constant and linear data by construction.
double weno5_derivative(std::span<const double, 6> stencil, double spacing,
                        WenoBias bias);

}  // namespace isleflow
