#include "minsurf/weierstrass.hpp"

#include <cmath>
#include <sstream>

#include "minsurf/parallel.hpp"
#include "minsurf/quadrature.hpp"

namespace minsurf {

namespace {

std::string where(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << "z = " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

void check_domain(const WeierstrassData& data, cplx z) {
  if (!data.domain.contains(z)) throw Error(ErrorCode::PointOutsideDomain, where(z));
}

double max_abs(const CVec3& v) { return v.cwiseAbs().maxCoeff(); }

// Complex primitive along a single segment, on t in [0, 1].
template <typename Integrand>
CVec3 segment_primitive(Integrand&& phi, cplx a, cplx b, double tol) {
  if (a == b) return CVec3::Zero();
  const cplx dz = b - a;
  quad::Options opt;
  opt.abs_tol = tol;
  return quad::integrate_unit<CVec3>([&](double t) -> CVec3 { return phi(a + t * dz) * dz; }, max_abs,
                                     CVec3::Zero().eval(), opt);
}

cplx sample_point(int k) {
  // Fixed points inside the unit disk at distinct radii and angles.
  const double rho = 0.05 + 0.9 * (k + 0.5) / 16.0;
  const double theta = 2.399963229728653 * k;  // golden angle
  return std::polar(rho, theta);
}

}  // namespace

WeierstrassData::WeierstrassData(HoloFun g_, HoloFun phi3_, Domain d, std::optional<HoloFun> ratio)
    : g(std::move(g_)), phi3(std::move(phi3_)), domain(d), phi3_over_g(std::move(ratio)) {}

cplx WeierstrassData::ratio(cplx z) const {
  if (phi3_over_g) return phi3_over_g->eval_unchecked(z);
  const cplx gz = g.eval_unchecked(z);
  if (gz == 0.0) throw Error(ErrorCode::GaussMapZero, "gauss map vanishes at " + where(z));
  return phi3.eval_unchecked(z) / gz;
}

CVec3 phi_triple(const WeierstrassData& data, cplx z) {
  check_domain(data, z);
  const cplx gz = data.g.eval_unchecked(z);
  const cplx p3 = data.phi3.eval_unchecked(z);
  const cplx q = data.ratio(z);  // phi3 / g
  const cplx gp = gz * p3;
  const cplx i(0.0, 1.0);
  return CVec3(0.5 * (q - gp), 0.5 * i * (q + gp), p3);
}

CVec3 primitive(const WeierstrassData& data, cplx z, double tol) {
  check_domain(data, z);
  return segment_primitive([&](cplx w) { return phi_triple(data, w); }, 0.0, z, tol);
}

ImmersionSample immerse(const WeierstrassData& data, std::span<const cplx> points, double tol) {
  for (cplx z : points) check_domain(data, z);
  ImmersionSample out(points.size());
  parallel_for(points.size(), [&](std::size_t k) {
    out[k] = {points[k], primitive(data, points[k], tol).real()};
  });
  return out;
}

Vec3 immerse_along(const WeierstrassData& data, std::span<const cplx> path, double tol) {
  if (path.empty()) return Vec3::Zero();
  if (path.front() != 0.0) {
    throw Error(ErrorCode::Precondition, "integration paths start at the base point 0");
  }
  for (cplx z : path) check_domain(data, z);
  const double per = path.size() > 1 ? tol / static_cast<double>(path.size() - 1) : tol;
  CVec3 total = CVec3::Zero();
  for (std::size_t k = 1; k < path.size(); ++k) {
    total += segment_primitive([&](cplx w) { return phi_triple(data, w); }, path[k - 1], path[k], per);
  }
  return total.real();
}

Vec3 immersion_difference(const WeierstrassData& a, const WeierstrassData& b, cplx z, double tol) {
  check_domain(a, z);
  check_domain(b, z);
  return segment_primitive([&](cplx w) -> CVec3 { return phi_triple(b, w) - phi_triple(a, w); }, 0.0, z,
                           tol)
      .real();
}

double metric_factor(const WeierstrassData& data, cplx z) {
  check_domain(data, z);
  const cplx gz = data.g.eval_unchecked(z);
  const cplx p3 = data.phi3.eval_unchecked(z);
  const double lambda = 0.5 * (std::abs(data.ratio(z)) + std::abs(gz * p3));
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::DegenerateMetric, "metric factor " + std::to_string(lambda) + " at " + where(z));
  }
  return lambda;
}

bool vanishes_identically(const HoloFun& f) {
  if (f.is_zero()) return true;
  for (int k = 0; k < 16; ++k) {
    if (f.eval_unchecked(sample_point(k)) != 0.0) return false;
  }
  return true;
}

WeierstrassData harmonic_lift(const HoloFun& fprime) {
  if (vanishes_identically(fprime)) {
    throw Error(ErrorCode::IdenticallyZero, "f' vanishes identically (u is constant)");
  }
  const Domain d = fprime.domain();
  return WeierstrassData(fprime, fprime, d, HoloFun::constant(1.0, d));
}

std::variant<WeierstrassData, FlatPlane> lift_or_plane(const HoloFun& fprime, Domain d) {
  const HoloFun f = fprime.with_domain(intersect(fprime.domain(), d));
  if (vanishes_identically(f)) {
    if (d.is_disk()) throw Error(ErrorCode::IdenticallyZero, "u must be non-constant on the disk");
    return FlatPlane{};
  }
  return harmonic_lift(f);
}

json data_to_json(const WeierstrassData& data) {
  json j;
  j["g"] = holo_to_json(data.g);
  j["phi3"] = holo_to_json(data.phi3);
  j["domain"] = domain_name(data.domain);
  if (data.phi3_over_g) j["phi3_over_g"] = holo_to_json(*data.phi3_over_g);
  return j;
}

WeierstrassData data_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "Weierstrass data must be an object");
  Domain d = Domain::plane();
  if (j.contains("domain")) {
    if (!j["domain"].is_string()) throw Error(ErrorCode::ConfigInvalid, "'domain' must be a string");
    d = domain_from_name(j["domain"].get<std::string>());
  }
  if (!j.contains("g") || !j.contains("phi3")) {
    throw Error(ErrorCode::ConfigInvalid, "Weierstrass data needs 'g' and 'phi3'");
  }
  std::optional<HoloFun> ratio;
  if (j.contains("phi3_over_g")) ratio = holo_from_json(j["phi3_over_g"], d);
  return WeierstrassData(holo_from_json(j["g"], d), holo_from_json(j["phi3"], d), d, std::move(ratio));
}

}  // namespace minsurf
