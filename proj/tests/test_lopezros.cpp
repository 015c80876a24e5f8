#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "minsurf/lopezros.hpp"

using namespace minsurf;

namespace {

cplx random_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(radius * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

HoloFun random_exp(std::mt19937_64& rng, int degree, double size) {
  std::uniform_real_distribution<double> u(-size, size);
  std::vector<cplx> c(degree + 1);
  for (auto& v : c) v = {u(rng), u(rng)};
  return HoloFun::exp(HoloFun::poly(c));
}

WeierstrassData enneper() {
  return {HoloFun::identity(), HoloFun::identity(), Domain::plane(), HoloFun::constant(1.0)};
}

}  // namespace

TEST_CASE("identity transform") {
  const WeierstrassData d = enneper();
  const WeierstrassData t = transform(d, HoloFun::constant(1.0));
  CHECK(t.g.same_node(d.g));
  CHECK(t.phi3.same_node(d.phi3));
}

TEST_CASE("constant h") {
  const WeierstrassData d{HoloFun::constant(1.0), HoloFun::constant(1.0), Domain::plane()};
  const WeierstrassData t = transform(d, HoloFun::constant(2.0));
  CHECK(t.g({0.3, 0.1}) == cplx(0.5));
  CHECK(t.phi3({0.3, 0.1}) == cplx(1.0));
  CHECK(t.phi3.same_node(d.phi3));
  CHECK(deformed_metric_factor(d, HoloFun::constant(2.0), 0.2) == doctest::Approx(1.25));
  CHECK(deformed_metric_factor(d, HoloFun::constant(1.0), 0.2) == doctest::Approx(metric_factor(d, 0.2)));
}

TEST_CASE("the third coordinate survives the transform") {
  std::mt19937_64 rng(41);
  const WeierstrassData d = enneper();
  const WeierstrassData t = transform(d, HoloFun::exp(HoloFun::identity()));
  std::vector<cplx> pts;
  for (int k = 0; k < 100; ++k) pts.push_back(random_point(rng, 1.0));
  const auto a = immerse(d, pts), b = immerse(t, pts);
  for (std::size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(a[k].x(2) - b[k].x(2)) < 1e-10);
}

TEST_CASE("deformed factor properties") {
  std::mt19937_64 rng(43);
  const WeierstrassData d{random_exp(rng, 2, 0.5), HoloFun::poly({0.3, 1.0, {0.0, 0.4}}), Domain::plane()};
  const HoloFun h = random_exp(rng, 4, 1.0);
  const WeierstrassData t = transform(d, h);
  for (int k = 0; k < 1000; ++k) {
    const cplx z = random_point(rng, 1.0);
    const double lt = deformed_metric_factor(d, h, z);
    CHECK(lt >= std::abs(d.phi3(z)) * (1 - 1e-14));
    CHECK(lt == doctest::Approx(metric_factor(t, z)).epsilon(1e-12));
    // (|h|/|g| + |g|/|h|) |phi3| / 2 >= |h| |phi3| / (2 |g|): large |h| inflates the metric.
    CHECK(lt >= 0.5 * std::abs(h(z)) * std::abs(d.phi3(z)) / std::abs(d.g(z)) * (1 - 1e-14));
  }
}

TEST_CASE("non-zero-free h is rejected") {
  try {
    (void)transform(enneper(), HoloFun::identity());
    FAIL("expected not-zero-free");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotZeroFree);
  }
}
