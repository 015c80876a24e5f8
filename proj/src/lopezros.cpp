#include "minsurf/lopezros.hpp"

#include <cmath>

namespace minsurf {

WeierstrassData transform(const WeierstrassData& data, const HoloFun& h) {
  if (!h.zero_free()) {
    throw Error(ErrorCode::NotZeroFree, "the deformation factor must be zero-free by construction");
  }
  const Domain d = intersect(data.domain, h.domain());
  cplx c;
  if (h.is_constant(&c) && c == 1.0) return data;
  std::optional<HoloFun> ratio;
  // Keep phi3 / g~ = (phi3 / g) h symbolic: g / h underflows where |h| is huge.
  if (data.phi3_over_g) {
    ratio = (*data.phi3_over_g * h).with_domain(d);
  } else if (data.g.zero_free()) {
    ratio = (HoloFun::quotient(data.phi3, data.g) * h).with_domain(d);
  }
  return WeierstrassData(HoloFun::quotient(data.g, h).with_domain(d), data.phi3, d, std::move(ratio));
}

double deformed_metric_factor(const WeierstrassData& data, const HoloFun& h, cplx z) {
  if (!data.domain.contains(z) || !h.domain().contains(z)) {
    throw Error(ErrorCode::PointOutsideDomain, "point outside the domain");
  }
  const double hz = std::abs(h.eval_unchecked(z));
  const double gp = std::abs(data.g.eval_unchecked(z) * data.phi3.eval_unchecked(z));
  const double lambda = 0.5 * (hz * std::abs(data.ratio(z)) + gp / hz);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::DegenerateMetric, "deformed metric factor is not positive");
  }
  return lambda;
}

}  // namespace minsurf
