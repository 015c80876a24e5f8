#include "minsurf/companions.hpp"

#include <cmath>

#include "minsurf/parallel.hpp"
#include "minsurf/quadrature.hpp"

namespace minsurf {

std::vector<MaximalPoint> maximal_immerse(const WeierstrassData& data, std::span<const cplx> points, double tol) {
  const std::vector<CVec3> F = null_curve(data, points, tol);
  const cplx i(0.0, 1.0);
  std::vector<MaximalPoint> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const CVec3 w(i * F[k][0], i * F[k][1], F[k][2]);
    const double g = std::abs(data.g.eval_unchecked(points[k]));
    out[k] = {points[k], w.real(), std::abs(g - 1.0) < 1e-9};
  }
  return out;
}

std::vector<CVec3> null_curve(const WeierstrassData& data, std::span<const cplx> points, double tol) {
  std::vector<CVec3> out(points.size());
  parallel_for(points.size(), [&](std::size_t k) { out[k] = primitive(data, points[k], tol); });
  return out;
}

double ray_integral(const WeierstrassData& data, double theta, int coordinate, double upper, double tol) {
  if (!data.domain.is_disk()) throw Error(ErrorCode::Precondition, "ray integrals are taken on the disk");
  if (!(upper >= 0.0) || !(upper < 1.0)) throw Error(ErrorCode::Precondition, "upper limit must lie in [0, 1)");
  if (coordinate < 0 || coordinate > 3) throw Error(ErrorCode::Precondition, "coordinate must be 0, 1, 2 or 3");
  const cplx dir = std::polar(1.0, theta);
  quad::Options opt;
  opt.abs_tol = tol;
  return quad::integrate_unit<double>(
      [&](double t) {
        const CVec3 phi = phi_triple(data, t * upper * dir);
        return upper * (coordinate == 0 ? phi.norm() : std::abs(phi[coordinate - 1]));
      },
      [](double v) { return std::abs(v); }, 0.0, opt);
}

}  // namespace minsurf
