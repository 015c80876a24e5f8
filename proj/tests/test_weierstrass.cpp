#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "minsurf/weierstrass.hpp"

using namespace minsurf;

namespace {

WeierstrassData plane_data() { return {HoloFun::constant(1.0), HoloFun::constant(1.0), Domain::plane()}; }

WeierstrassData enneper(Domain d = Domain::plane()) {
  return {HoloFun::identity(d), HoloFun::identity(d), d, HoloFun::constant(1.0, d)};
}

Vec3 enneper_closed_form(cplx z) {
  const cplx z3 = z * z * z;
  const cplx i(0.0, 1.0);
  return {(0.5 * (z - z3 / 3.0)).real(), (0.5 * i * (z + z3 / 3.0)).real(), (0.5 * z * z).real()};
}

cplx random_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(radius * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

WeierstrassData random_surface(std::mt19937_64& rng) {
  // g = exp(q) never vanishes; phi3 an arbitrary cubic.
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  std::vector<cplx> q(3), f(4);
  for (auto& c : q) c = {u(rng), u(rng)};
  for (auto& c : f) c = {u(rng), u(rng)};
  return {HoloFun::exp(HoloFun::poly(q)), HoloFun::poly(f), Domain::plane()};
}

}  // namespace

TEST_CASE("phi triple examples") {
  const CVec3 a = phi_triple(plane_data(), {0.4, -0.2});
  CHECK(std::abs(a(0)) < 1e-15);
  CHECK(std::abs(a(1) - cplx(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(a(2) - cplx(1.0)) < 1e-15);

  const CVec3 b = phi_triple(enneper(), 2.0);
  CHECK(std::abs(b(0) - cplx(-1.5)) < 1e-14);
  CHECK(std::abs(b(1) - cplx(0.0, 2.5)) < 1e-14);
  CHECK(std::abs(b(2) - cplx(2.0)) < 1e-14);
}

TEST_CASE("the triple is null") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const WeierstrassData d = random_surface(rng);
    const cplx z = random_point(rng, 1.0);
    const CVec3 p = phi_triple(d, z);
    const cplx q = p(0) * p(0) + p(1) * p(1) + p(2) * p(2);
    CHECK(std::abs(q) <= 1e-12 * std::max(1.0, p.squaredNorm()));
  }
}

TEST_CASE("Gauss map zero is reported") {
  const WeierstrassData bad{HoloFun::identity(), HoloFun::constant(1.0), Domain::plane()};
  try {
    (void)phi_triple(bad, 0.0);
    FAIL("expected gauss-map-zero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GaussMapZero);
  }
  // With phi3 / g supplied explicitly, Enneper evaluates at the origin.
  const CVec3 p = phi_triple(enneper(), 0.0);
  CHECK(std::abs(p(0) - cplx(0.5)) < 1e-15);
}

TEST_CASE("immersion examples") {
  const cplx z(0.7, -0.4);
  const auto s = immerse(plane_data(), std::vector<cplx>{z, 0.0});
  CHECK((s[0].x - Vec3(0.0, 0.4, 0.7)).norm() < 1e-10);
  CHECK(s[1].x.norm() == 0.0);

  const auto e = immerse(enneper(), std::vector<cplx>{1.0});
  CHECK((e[0].x - Vec3(1.0 / 3.0, 0.0, 0.5)).norm() < 1e-10);
}

TEST_CASE("Enneper immersion matches the closed form") {
  std::mt19937_64 rng(2);
  std::vector<cplx> pts;
  for (int k = 0; k < 100; ++k) pts.push_back(random_point(rng, 1.5));
  const auto s = immerse(enneper(), pts);
  for (const auto& p : s) CHECK((p.x - enneper_closed_form(p.z)).norm() < 1e-9);
}

TEST_CASE("immersion is path independent") {
  std::mt19937_64 rng(3);
  const double tol = 1e-10;
  for (int trial = 0; trial < 20; ++trial) {
    const WeierstrassData d = random_surface(rng);
    const cplx z = random_point(rng, 1.0);
    const Vec3 radial = immerse(d, std::vector<cplx>{z}, tol)[0].x;
    const std::vector<cplx> path{0.0, cplx(z.real(), 0.0), z};
    CHECK((radial - immerse_along(d, path, tol)).norm() <= 2 * 3 * tol);
  }
}

TEST_CASE("metric factor") {
  CHECK(metric_factor(plane_data(), {0.3, 0.9}) == doctest::Approx(1.0));
  CHECK(metric_factor(enneper(), {0.0, 0.6}) == doctest::Approx(0.68).epsilon(1e-14));
  try {
    (void)metric_factor(WeierstrassData{HoloFun::constant(1.0), HoloFun::identity(), Domain::plane()}, 0.0);
    FAIL("expected degenerate-metric");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateMetric);
  }
}

TEST_CASE("first fundamental form from finite differences") {
  std::mt19937_64 rng(4);
  const double h = 1e-4;
  auto check = [&](const WeierstrassData& d, double radius) {
    for (int k = 0; k < 50; ++k) {
      const cplx z = random_point(rng, radius);
      const std::vector<cplx> pts{z + h, z - h, z + cplx(0, h), z - cplx(0, h)};
      const auto s = immerse(d, pts, 1e-13);
      const Vec3 xu = (s[0].x - s[1].x) / (2 * h), xv = (s[2].x - s[3].x) / (2 * h);
      const double lam = metric_factor(d, z), l2 = lam * lam;
      CHECK(std::abs(xu.squaredNorm() - l2) <= 1e-5 * l2);
      CHECK(std::abs(xv.squaredNorm() - l2) <= 1e-5 * l2);
      CHECK(std::abs(xu.dot(xv)) <= 1e-5 * l2);
    }
  };
  check(plane_data(), 1.0);
  check(enneper(), 1.0);
  check(random_surface(rng), 1.0);
}

TEST_CASE("difference of two immersions") {
  std::mt19937_64 rng(5);
  const WeierstrassData a = random_surface(rng);
  WeierstrassData b = a;
  b.g = a.g * HoloFun::exp(HoloFun::poly({0.0, 0.01}));
  for (int k = 0; k < 10; ++k) {
    const cplx z = random_point(rng, 1.0);
    const Vec3 direct = immersion_difference(a, b, z, 1e-12);
    const Vec3 sub = immerse(b, std::vector<cplx>{z}, 1e-12)[0].x - immerse(a, std::vector<cplx>{z}, 1e-12)[0].x;
    CHECK((direct - sub).norm() < 1e-10);
  }
}

TEST_CASE("harmonic lift") {
  const auto x3 = [](const WeierstrassData& d, cplx z) { return immerse(d, std::vector<cplx>{z})[0].x(2); };

  const WeierstrassData one = harmonic_lift(HoloFun::constant(1.0));
  for (cplx z : {cplx(0.5, 0.5), cplx(-2.0, 1.0)}) CHECK(x3(one, z) == doctest::Approx(z.real()).epsilon(1e-10));

  const WeierstrassData two_z = harmonic_lift(HoloFun::poly({0.0, 2.0}));
  CHECK(std::abs(x3(two_z, {1.0, 1.0})) < 1e-10);
  CHECK(x3(two_z, {1.0, 0.5}) == doctest::Approx(0.75).epsilon(1e-10));

  const WeierstrassData ex = harmonic_lift(HoloFun::exp(HoloFun::identity()));
  CHECK(std::abs(x3(ex, 1.0) - (std::numbers::e - 1.0)) < 1e-8);

  // f' with a double zero: x3 = Re(z^3 / 3) and the lift stays evaluable at the zero.
  const WeierstrassData sq = harmonic_lift(HoloFun::poly({0.0, 0.0, 1.0}));
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    const cplx z = random_point(rng, 1.0);
    CHECK(std::abs(x3(sq, z) - (z * z * z / 3.0).real()) < 1e-10);
  }
  CHECK(immerse(sq, std::vector<cplx>{0.0})[0].x.norm() == 0.0);

  try {
    (void)harmonic_lift(HoloFun::constant(0.0));
    FAIL("expected identically-zero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IdenticallyZero);
  }
  CHECK(std::holds_alternative<FlatPlane>(lift_or_plane(HoloFun::poly({0.0, 0.0}), Domain::plane())));
  CHECK(std::holds_alternative<WeierstrassData>(lift_or_plane(HoloFun::identity(), Domain::disk())));
  CHECK(vanishes_identically(HoloFun::identity() - HoloFun::identity()));
  CHECK_FALSE(vanishes_identically(HoloFun::poly({0.0, 0.0, 1e-3})));
}

TEST_CASE("data JSON round trip") {
  const WeierstrassData e = enneper(Domain::disk());
  const WeierstrassData back = data_from_json(data_to_json(e));
  CHECK(back.domain == Domain::disk());
  REQUIRE(back.phi3_over_g.has_value());
  CHECK(back.g.structurally_equal(e.g));
  CHECK(back.phi3.structurally_equal(e.phi3));
  CHECK(data_to_json(back).dump() == data_to_json(e).dump());
  try {
    (void)data_from_json(json::parse(R"({"g":{"kind":"poly","coeffs":[1]}})"));
    FAIL("expected config-invalid");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::ConfigInvalid);
  }
}
