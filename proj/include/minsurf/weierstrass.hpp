#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "minsurf/holo.hpp"
#include "minsurf/holo_json.hpp"

namespace minsurf {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

/// Weierstrass data (g, phi3 dz) on a simply connected domain.
///
/// `phi3_over_g`, when present, is a zero-free-denominator representation of
/// phi3 / g. It lets data whose Gauss map vanishes exactly where phi3 does
/// (the harmonic lift g = phi3 = f') be evaluated without dividing by g.
struct WeierstrassData {
  HoloFun g;
  HoloFun phi3;
  Domain domain = Domain::plane();
  std::optional<HoloFun> phi3_over_g;

  WeierstrassData() = default;
  WeierstrassData(HoloFun g_, HoloFun phi3_, Domain d, std::optional<HoloFun> ratio = std::nullopt);

  /// phi3 / g at z; throws GaussMapZero when it must divide by g(z) = 0.
  cplx ratio(cplx z) const;
};

struct ImmersionPoint {
  cplx z;
  Vec3 x;
};
using ImmersionSample = std::vector<ImmersionPoint>;

/// (phi1, phi2, phi3)(z) with phi1 = (1/g - g) phi3 / 2, phi2 = i (1/g + g) phi3 / 2.
CVec3 phi_triple(const WeierstrassData& data, cplx z);

/// X(z) = Re of the integral of Phi from 0 to z along the radial segment.
ImmersionSample immerse(const WeierstrassData& data, std::span<const cplx> points, double tol = 1e-10);

/// X at the end of an explicit polyline starting at 0.
Vec3 immerse_along(const WeierstrassData& data, std::span<const cplx> path, double tol = 1e-10);

/// Complex primitive of Phi from 0 to z (radial); Re of it is the immersion.
CVec3 primitive(const WeierstrassData& data, cplx z, double tol = 1e-10);

/// X_b(z) - X_a(z) integrated directly from the difference of the two triples,
/// which is far more accurate than subtracting two immersions when they are close.
Vec3 immersion_difference(const WeierstrassData& a, const WeierstrassData& b, cplx z, double tol = 1e-10);

/// Conformal factor lambda = (1/|g| + |g|) |phi3| / 2 of the induced metric lambda^2 |dz|^2.
double metric_factor(const WeierstrassData& data, cplx z);

/// Data (f', f') whose immersion has third coordinate Re f - Re f(0).
/// Throws IdenticallyZero when f' vanishes identically.
WeierstrassData harmonic_lift(const HoloFun& fprime);

/// The constant-coordinate case on the plane: the horizontal plane x3 = u.
struct FlatPlane {};
std::variant<WeierstrassData, FlatPlane> lift_or_plane(const HoloFun& fprime, Domain d);

/// Structural plus sampled test for f == 0 on its domain.
bool vanishes_identically(const HoloFun& f);

json data_to_json(const WeierstrassData& data);
WeierstrassData data_from_json(const json& j);

}  // namespace minsurf
