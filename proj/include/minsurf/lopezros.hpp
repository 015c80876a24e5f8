#pragma once

#include "minsurf/weierstrass.hpp"

namespace minsurf {

/// (g, phi3) -> (g / h, phi3) for a zero-free h. The third coordinate of the
/// immersion is unchanged. Throws NotZeroFree when h is not structurally
/// zero-free.
WeierstrassData transform(const WeierstrassData& data, const HoloFun& h);

/// (|h| / |g| + |g| / |h|) |phi3| / 2, the conformal factor of transform(data, h).
double deformed_metric_factor(const WeierstrassData& data, const HoloFun& h, cplx z);

}  // namespace minsurf
