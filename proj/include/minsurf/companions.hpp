#pragma once

#include <vector>

#include "minsurf/weierstrass.hpp"

namespace minsurf {

struct MaximalPoint {
  cplx z;
  Vec3 x;
  bool singular;  // | |g(z)| - 1 | < 1e-9: lightlike point
};

/// Re of the integral of (i phi1, i phi2, phi3) from 0, in Lorentz-Minkowski space.
std::vector<MaximalPoint> maximal_immerse(const WeierstrassData& data, std::span<const cplx> points,
                                          double tol = 1e-10);

/// F(z) = integral of Phi from 0 to z, a holomorphic null curve.
std::vector<CVec3> null_curve(const WeierstrassData& data, std::span<const cplx> points, double tol = 1e-10);

/// Integral over r in [0, upper] of |phi_j(r e^{i theta})|; coordinate 0 means
/// the full norm |Phi|. The domain must be the disk and upper < 1.
double ray_integral(const WeierstrassData& data, double theta, int coordinate, double upper, double tol = 1e-10);

}  // namespace minsurf
