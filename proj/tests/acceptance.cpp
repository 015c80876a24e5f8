// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "minsurf/companions.hpp"
#include "minsurf/geodesy.hpp"
#include "minsurf/lopezros.hpp"
#include "minsurf/pipeline.hpp"
#include "minsurf/runge.hpp"

using namespace minsurf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

cplx random_point(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(radius * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

std::vector<cplx> random_coeffs(std::mt19937_64& rng, int degree, double size) {
  std::uniform_real_distribution<double> u(-size, size);
  std::vector<cplx> c(degree + 1);
  for (auto& v : c) v = {u(rng), u(rng)};
  return c;
}

WeierstrassData flat(Domain d) { return {HoloFun::constant(1.0, d), HoloFun::constant(1.0, d), d}; }
WeierstrassData enneper(Domain d) { return {HoloFun::identity(d), HoloFun::identity(d), d, HoloFun::constant(1.0, d)}; }

// ---------------------------------------------------------------------------

Outcome conformality() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> deg(0, 5);
  double worst = 0.0;
  for (int pair = 0; pair < 200; ++pair) {
    const WeierstrassData d{HoloFun::poly(random_coeffs(rng, deg(rng), 1.0)), HoloFun::poly(random_coeffs(rng, deg(rng), 1.0)),
                            Domain::plane()};
    for (int k = 0; k < 50; ++k) {
      const cplx z = random_point(rng, 1.0);
      const CVec3 p = phi_triple(d, z);
      const double q = std::abs(p(0) * p(0) + p(1) * p(1) + p(2) * p(2));
      worst = std::max(worst, q / p.squaredNorm());
    }
  }
  return {worst <= 1e-12, "max |phi.phi| / |phi|^2 = " + num(worst)};
}

Outcome metric_consistency() {
  std::mt19937_64 rng(102);
  const double h = 1e-4;
  double worst = 0.0;
  for (const WeierstrassData& d : {enneper(Domain::plane()), flat(Domain::plane())}) {
    for (int k = 0; k < 100; ++k) {
      const cplx z = random_point(rng, 0.95);
      const std::vector<cplx> pts{z + h, z - h, z + cplx(0, h), z - cplx(0, h)};
      const auto s = immerse(d, pts, 1e-13);
      const Vec3 xu = (s[0].x - s[1].x) / (2 * h), xv = (s[2].x - s[3].x) / (2 * h);
      const double l2 = std::pow(metric_factor(d, z), 2);
      worst = std::max({worst, std::abs(xu.squaredNorm() - l2) / l2, std::abs(xv.squaredNorm() - l2) / l2,
                        std::abs(xu.dot(xv)) / l2});
    }
  }
  return {worst < 1e-5, "max relative error of E, G, F against lambda^2 = " + num(worst)};
}

Outcome coordinate_preservation() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    // g has no zeros on the closed disk: the constant term dominates.
    auto gc = random_coeffs(rng, 3, 0.3);
    gc[0] = cplx(1.0 + std::abs(u(rng)), u(rng));
    const Domain D = Domain::disk();
    const WeierstrassData d{HoloFun::poly(gc, D), HoloFun::poly(random_coeffs(rng, 4, 1.0), D), D};
    const HoloFun h = HoloFun::exp(HoloFun::poly(random_coeffs(rng, 4, 1.0), D));
    const WeierstrassData t = transform(d, h);
    std::vector<cplx> pts;
    for (int k = 0; k < 100; ++k) pts.push_back(random_point(rng, 0.9));
    const auto a = immerse(d, pts, 1e-11), b = immerse(t, pts, 1e-11);
    for (std::size_t k = 0; k < pts.size(); ++k) worst = std::max(worst, std::abs(a[k].x(2) - b[k].x(2)));
  }
  return {worst < 1e-8, "max |X3~ - X3| = " + num(worst)};
}

Outcome runge_certificates() {
  bool all = true;
  std::string detail;
  for (int N : {3, 4, 5}) {
    // The labyrinth only fits around |z| <= 0.3 once R' - r' > 2/N; for N = 3
    // that needs R' > 1, so all three are built on the plane.
    const double rp = 0.35, Rp = rp + 2.0 / N + 0.05;
    RungeRequest req;
    req.r = 0.3;
    req.labyrinth = Labyrinth::build(N, rp, Rp, Domain::plane());
    const RungeFitter fitter(req.r, req.labyrinth, req.max_degree, req.oversampling);
    for (double beta : {10.0, 20.0}) {
      req.beta = beta;
      RungeCertificate c;
      bool ok = true;
      try {
        c = build_h(fitter, req);
      } catch (const RungeFailure& f) {
        c = f.best();
        ok = false;
      }
      ok = ok && c.certified && c.sup_error_disk < 1 / beta && c.sup_error_labyrinth < 1 / beta && c.stable;
      all = all && ok;
      detail += " N=" + std::to_string(N) + ",b=" + num(beta) + ":" + (ok ? "ok" : "no") + "(deg " +
                std::to_string(c.degree) + ", err " + num(c.sup_error_disk) + "/" + num(c.sup_error_labyrinth) + ")";
    }
  }
  return {all, "certificates:" + detail};
}

Outcome geodesy_calibration() {
  const DistanceOptions opt{};
  auto close = [](double got, double want) { return std::abs(got - want) <= 0.02 * want; };
  const double d1 = distance(MetricGrid::build([](cplx) { return 1.0; }, 0.5, nullptr, 32), 0.5, Source::origin(), opt).distance;
  const double d2 = distance(MetricGrid::build([](cplx) { return 2.0; }, 0.5, nullptr, 32), 0.5, Source::origin(), opt).distance;
  const double de = distance(MetricGrid::build([](cplx z) { return 0.5 * (1.0 + std::norm(z)); }, 0.8, nullptr, 32), 0.8,
                             Source::origin(), opt).distance;
  bool ok = close(d1, 0.5) && close(d2, 1.0) && close(de, 0.485333);

  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double homog = 0.0;
  bool monotone = true;
  for (int trial = 0; trial < 20; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng), e = u(rng);
    const MetricFactor f = [=](cplx z) { return 1.5 + 0.4 * a * std::sin(3 * z.real() + b) + 0.4 * c * std::cos(2 * z.imag() + e); };
    const MetricGrid g = MetricGrid::build(f, 0.9, nullptr, 24);
    const double base = grid_distance(g, 0.9).distance;
    const double k = 1.0 + 9.0 * std::abs(u(rng));
    homog = std::max(homog, std::abs(grid_distance(g.scaled(k), 0.9).distance / (k * base) - 1.0));
    const MetricFactor f2 = [f](cplx z) { return f(z) + 0.5 * std::exp(-3.0 * std::norm(z - cplx(0.3, -0.2))); };
    monotone = monotone && grid_distance(MetricGrid::build(f2, 0.9, nullptr, 24), 0.9).distance >= base;
  }
  ok = ok && homog < 1e-12 && monotone;
  return {ok, "flat " + num(d1) + ", doubled " + num(d2) + ", Enneper " + num(de) + "; homogeneity error " + num(homog) +
                  (monotone ? ", monotone" : ", NOT monotone")};
}

Outcome claim_scaling() {
  const ClaimScanReport r = claim_scan(1.0, {3, 4, 5, 6, 7, 8}, 0.1, 0.98, 64, DistanceOptions{2, 0.02});
  std::string ds;
  for (const auto& e : r.entries) ds += " " + num(e.distance);
  const bool ok = r.rho_hat > 0.0 && r.max_abs_residual <= 0.25 && r.max_homogeneity_error <= 1e-6;
  return {ok, "rho_hat " + num(r.rho_hat) + ", max |residual| " + num(r.max_abs_residual) + " (limit 0.25), 2c error " +
                  num(r.max_homogeneity_error) + "; d(3..8) =" + ds};
}

Outcome lemma_desk_scale() {
  LemmaStepConfig cfg;
  cfg.r = 0.3;
  cfg.R = 0.95;
  cfg.epsilon = 0.1;
  cfg.s = 3.0;
  try {
    const LemmaResult res = lemma_step(flat(Domain::disk()), cfg);
    const StepRecord& r = res.record;
    const bool ok = r.distance_certified && 0.95 * r.distance > cfg.s && r.sup_change < cfg.epsilon && r.x3_residual < 1e-8;
    return {ok, "N " + std::to_string(r.N) + ", distance " + num(r.distance) + ", sup change " + num(r.sup_change) +
                    ", x3 residual " + num(r.x3_residual)};
  } catch (const StepFailure& f) {
    const StepRecord& r = f.record();
    return {false, std::string(f.what()) + " [N " + std::to_string(r.N) + ", beta " + num(r.beta0) + ", degree " +
                       std::to_string(r.degree) + ", " + std::to_string(r.attempts) + " attempts]"};
  }
}

Outcome theorem_depth3() {
  IterationConfig cfg;
  cfg.r0 = 0.5;  // r_n = 1 - 2^(-n)
  cfg.epsilon = 0.1;
  cfg.depth = 3;
  cfg.domain = Domain::disk();
  cfg.step.N_max = 20;  // the step-2 annulus admits N >= 17 only
  const IterationResult res = prescribe_coordinate(HoloFun::constant(1.0), cfg);
  const RunReport& rep = res.report;
  bool gates = rep.steps.size() == 2;
  for (const auto& s : rep.steps) gates = gates && s.pass_A && s.pass_B && s.pass_C && s.pass_D;
  const bool ok = rep.ok && gates && rep.budget_used < cfg.epsilon && rep.metric_floor >= rep.sigma_product &&
                  rep.sigma_product > 0.5 && rep.x3_final_residual < 1e-8;
  std::string detail = ok ? "all gates pass" : (rep.failure.empty() ? std::string("gates failed") : rep.failure);
  detail += "; steps " + std::to_string(rep.steps.size()) + ", budget " + num(rep.budget_used) + ", floor " +
            num(rep.metric_floor) + ", x3 residual " + num(rep.x3_final_residual);
  return {ok, detail};
}

Outcome companions() {
  std::mt19937_64 rng(109);
  const double tol = 1e-10;
  const WeierstrassData e = enneper(Domain::plane());
  std::vector<cplx> pts;
  for (int k = 0; k < 200; ++k) pts.push_back(random_point(rng, 0.95));
  double nullity = 0.0, re_err = 0.0, x3_err = 0.0;
  const auto F = null_curve(e, pts, tol);
  const auto X = immerse(e, pts, tol);
  const auto M = maximal_immerse(e, pts, tol);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const CVec3 p = phi_triple(e, pts[k]);
    nullity = std::max(nullity, std::abs(p(0) * p(0) + p(1) * p(1) + p(2) * p(2)));
    re_err = std::max(re_err, (F[k].real() - X[k].x).cwiseAbs().maxCoeff());
    x3_err = std::max(x3_err, std::abs(M[k].x(2) - X[k].x(2)));
  }
  bool lightlike = true;
  for (const auto& p : maximal_immerse(flat(Domain::plane()), pts, tol)) lightlike = lightlike && p.singular;
  const bool ok = nullity < 1e-12 && re_err <= 2 * tol && x3_err <= 2 * tol && lightlike;
  return {ok, "nullity " + num(nullity) + ", |Re F - X| " + num(re_err) + ", maximal x3 " + num(x3_err) +
                  ((lightlike) ? ", (1,1) lightlike" : ", (1,1) NOT flagged")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("minsurf_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "f.json") << R"({"kind":"poly","coeffs":[[1,0]]})";
  // A full depth-2 run with a small search so that both runs do real work.
  std::ofstream(dir / "cfg.json") << R"({"depth":2,"epsilon":0.1,"r0":0.5,"domain":"disk",)"
                                  << R"("step":{"N_max":17,"beta_max":8,"max_degree":64,"validation_density":16,)"
                                  << R"("grid_resolution":16,"seed":7}})";
  std::string out[2];
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path report = dir / ("report_" + std::to_string(k) + ".json");
    const std::string cmd = std::string(MINSURF_CLI) + " iterate --fprime " + (dir / "f.json").string() + " --config " +
                            (dir / "cfg.json").string() + " --seed 7 --out " + report.string() + " 2>/dev/null";
    const int st = std::system(cmd.c_str());
    codes[k] = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    out[k] = slurp(report);
  }
  fs::remove_all(dir);
  const bool ok = !out[0].empty() && out[0] == out[1] && codes[0] == codes[1] && (codes[0] == 0 || codes[0] == 1);
  return {ok, std::to_string(out[0].size()) + "-byte reports " + (out[0] == out[1] ? "identical" : "DIFFER") +
                  ", exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1])};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "conformality", 1, conformality},
      {2, "metric formula", 10, metric_consistency},
      {3, "third coordinate under deformation", 30, coordinate_preservation},
      {4, "Runge certificates", 120, runge_certificates},
      {5, "geodesy calibration", 60, geodesy_calibration},
      {6, "labyrinth distance scaling", 300, claim_scaling},
      {7, "single deformation step", 600, lemma_desk_scale},
      {8, "iteration to depth 3", 1800, theorem_depth3},
      {9, "companions", 30, companions},
      {10, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s <= 0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name << ": " << o.detail << " (" << num(secs) << " s"
              << (c.limit_s > 0 ? ", limit " + num(c.limit_s) + " s" : std::string()) << (in_time ? "" : ", TOO SLOW")
              << ")" << std::endl;
  }
  std::cout << (all.size() - failed) << "/" << all.size() << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
