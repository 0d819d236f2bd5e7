#include "core/weno.hpp"

#include "core/error.hpp"

namespace isleflow {

namespace detail {

double weno5_combine(double v1, double v2, double v3, double v4, double v5) {
  constexpr double eps = 1e-6;

  const double d1 = v1 - 2.0 * v2 + v3;
  const double d2 = v2 - 2.0 * v3 + v4;
  const double d3 = v3 - 2.0 * v4 + v5;
  const double s1 =
      (13.0 / 12.0) * d1 * d1 +
      0.25 * (v1 - 4.0 * v2 + 3.0 * v3) * (v1 - 4.0 * v2 + 3.0 * v3);
  const double s2 = (13.0 / 12.0) * d2 * d2 + 0.25 * (v2 - v4) * (v2 - v4);
  const double s3 =
      (13.0 / 12.0) * d3 * d3 +
      0.25 * (3.0 * v3 - 4.0 * v4 + v5) * (3.0 * v3 - 4.0 * v4 + v5);

  const double a1 = 0.1 / ((eps + s1) * (eps + s1));
  const double a2 = 0.6 / ((eps + s2) * (eps + s2));
  const double a3 = 0.3 / ((eps + s3) * (eps + s3));

  const double c1 = (2.0 * v1 - 7.0 * v2 + 11.0 * v3) / 6.0;
  const double c2 = (-v2 + 5.0 * v3 + 2.0 * v4) / 6.0;
  const double c3 = (2.0 * v3 + 5.0 * v4 - v5) / 6.0;

  return (a1 * c1 + a2 * c2 + a3 * c3) / (a1 + a2 + a3);
}

}  // namespace detail

double weno5_derivative(std::span<const double, 6> stencil, double spacing,
                        WenoBias bias) {
  if (!(spacing > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "weno spacing must be positive");
  }
  const double inv_h = 1.0 / spacing;
  return bias == WenoBias::Left ? detail::weno5_left(stencil.data(), inv_h)
                                : detail::weno5_right(stencil.data(), inv_h);
}

}  // namespace isleflow
