#include "minsurf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "minsurf/labyrinth.hpp"
#include "minsurf/parallel.hpp"

namespace minsurf {

namespace {

struct Annulus {
  double r_prime, R_prime, delta;
};

// Default r' = r + (R - r)/4, R' = R - (R - r)/4; on a detected zero, try
// narrower annuli at several positions.
Annulus choose_annulus(const HoloFun& phi3, double r, double R, int samples, int retries) {
  const double w = R - r;
  try {
    const double rp = r + w / 4, Rp = R - w / 4;
    return {rp, Rp, min_phi3_modulus(phi3, rp, Rp, samples)};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroDetected) throw;
  }
  for (int k = 1; k <= retries; ++k) {
    const double width = 0.5 * w * std::pow(0.75, k);
    const double lo = r + 0.05 * w, hi = R - 0.05 * w - width;
    for (int j = 0; j <= 4; ++j) {
      const double rp = lo + (hi - lo) * j / 4.0;
      try {
        return {rp, rp + width, min_phi3_modulus(phi3, rp, rp + width, samples)};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroDetected) throw;
      }
    }
  }
  throw Error(ErrorCode::ZeroDetected, "phi3 vanishes in every candidate annulus between r and R");
}

double sup_change(const WeierstrassData& a, const WeierstrassData& b, const std::vector<cplx>& pts, double tol) {
  std::vector<double> v(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t i) { v[i] = immersion_difference(a, b, pts[i], tol).norm(); });
  return *std::max_element(v.begin(), v.end());
}

double x3_residual(const WeierstrassData& a, const WeierstrassData& b, const std::vector<cplx>& pts, double tol) {
  const auto xa = immerse(a, pts, tol), xb = immerse(b, pts, tol);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) worst = std::max(worst, std::abs(xa[i].x.z() - xb[i].x.z()));
  return worst;
}

double min_ratio(const WeierstrassData& num, const WeierstrassData& den, const std::vector<cplx>& pts) {
  double lo = INFINITY;
  for (cplx z : pts) lo = std::min(lo, metric_factor(num, z) / metric_factor(den, z));
  return lo;
}

// Progress order for keeping the most informative failed attempt.
double progress(const StepRecord& s) {
  double p = 0.0;
  if (s.lambda_target > 0.0) p += std::min(1.0, s.min_lambda_on_K / s.lambda_target);
  if (s.sup_change < s.epsilon) p += 1.0;
  if (s.s > 0.0) p += std::min(1.0, s.distance / s.s);
  return p;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::vector<cplx> disk_samples(double r, int count, std::uint64_t seed) {
  std::vector<cplx> pts;
  const int ring = std::max(4, count / 2);
  for (int k = 0; k < ring; ++k) pts.push_back(std::polar(r, 2.0 * std::numbers::pi * k / ring));
  pts.push_back(0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (static_cast<int>(pts.size()) < count) {
    pts.push_back(std::polar(r * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng)));
  }
  return pts;
}

LemmaResult lemma_step(const WeierstrassData& data, const LemmaStepConfig& cfg) {
  if (vanishes_identically(data.phi3)) {
    throw Error(ErrorCode::Precondition, "phi3 vanishes identically (x3 would be constant)");
  }
  if (!(cfg.r > 0.0) || !(cfg.r < cfg.R) || (data.domain.is_disk() && !(cfg.R < 1.0))) {
    throw Error(ErrorCode::Precondition, "need 0 < r < R (and R < 1 on the disk)");
  }
  if (!(cfg.epsilon > 0.0) || !(cfg.s > 0.0)) throw Error(ErrorCode::Precondition, "epsilon and s must be positive");

  StepRecord rec;
  rec.r = cfg.r;
  rec.R = cfg.R;
  rec.epsilon = cfg.epsilon;
  rec.s = cfg.s;
  const Annulus ann = choose_annulus(data.phi3, cfg.r, cfg.R, cfg.annulus_samples, cfg.annulus_retries);
  rec.r_prime = ann.r_prime;
  rec.R_prime = ann.R_prime;
  rec.delta_hat = ann.delta;
  rec.phi3_identical = true;
  const std::vector<cplx> pts = disk_samples(cfg.r, cfg.check_samples, cfg.seed);

  // Nothing to do when the undeformed surface already reaches s.
  {
    MetricFactor f = [&data](cplx z) { return metric_factor(data, z); };
    const MetricGrid grid = MetricGrid::build(f, cfg.R, nullptr, cfg.grid_resolution, {cfg.R});
    const GeodesicEstimate e = distance(grid, cfg.R, Source::origin(), cfg.distance_options);
    rec.distance = e.distance;
    rec.refinement_delta = e.refinement_delta;
    if (certifies(e, cfg.s)) {
      rec.distance_certified = true;
      rec.passed = true;
      rec.note = "undeformed distance already exceeds s";
      return {data, rec};
    }
  }

  StepRecord best = rec;
  best.note = "no labyrinth attempted";
  double best_progress = -1.0;
  const int N_min = static_cast<int>(std::floor(2.0 / (ann.R_prime - ann.r_prime))) + 1;
  for (int N = N_min; N <= cfg.N_max; ++N) {
    const Labyrinth lab = Labyrinth::build(N, ann.r_prime, ann.R_prime, data.domain);
    std::unique_ptr<RungeFitter> fitter;
    try {
      fitter = std::make_unique<RungeFitter>(cfg.r, lab, cfg.max_degree, cfg.oversampling);
    } catch (const Error& e) {
      best.note = std::string("N = ") + std::to_string(N) + ": " + e.what();
      continue;
    }
    RungeRequest req;
    req.r = cfg.r;
    req.labyrinth = lab;
    req.max_degree = cfg.max_degree;
    req.validation_density = cfg.validation_density;
    req.oversampling = cfg.oversampling;

    // |phi3 / g| and |g phi3| on the labyrinth validation samples do not depend on beta.
    const RungeSamples vs = runge_validation_samples(cfg.r, lab, cfg.validation_density);
    std::vector<double> a(vs.labyrinth.size()), b(vs.labyrinth.size());
    parallel_for(vs.labyrinth.size(), [&](std::size_t i) {
      const cplx z = vs.labyrinth[i];
      a[i] = std::abs(data.ratio(z));
      b[i] = std::abs(data.g.eval_unchecked(z) * data.phi3.eval_unchecked(z));
    });
    const double target = ann.delta * std::pow(double(N), 4);

    for (double beta = cfg.beta_start; beta <= cfg.beta_max; beta *= 2.0) {
      req.beta = beta;
      RungeCertificate cert;
      try {
        cert = build_h(*fitter, req);
      } catch (const RungeFailure& f) {
        cert = f.best();
      }
      StepRecord cand = rec;
      cand.N = N;
      cand.beta0 = beta;
      cand.degree = cert.degree;
      cand.runge_certified = cert.certified;
      cand.runge_error_disk = cert.sup_error_disk;
      cand.runge_error_labyrinth = cert.sup_error_labyrinth;
      cand.lambda_target = target;
      cand.attempts = best.attempts + 1;

      // (ii) from the cached exponent samples: |h| = exp(Log(beta) Re u).
      const auto u = fitter->unit_values(cert.degree, req, cfg.validation_density);
      const double L = std::log(beta);
      double lam = INFINITY;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double hz = std::exp(L * u->labyrinth[i].real());
        lam = std::min(lam, 0.5 * (hz * a[i] + b[i] / hz));
      }
      cand.min_lambda_on_K = lam;

      // (i) on the closed disk |z| <= r.
      const WeierstrassData next = transform(data, cert.h);
      try {
        cand.sup_change = sup_change(data, next, pts, std::max(cfg.quad_tol, 1e-6 * cfg.epsilon));
      } catch (const Error& e) {
        cand.sup_change = INFINITY;
        cand.note = std::string("approximation check failed: ") + e.what();
      }
      const bool cond_i = cand.sup_change < cfg.epsilon, cond_ii = lam >= target;
      if (cond_i && cond_ii) {
        MetricFactor f = [next](cplx z) { return metric_factor(next, z); };
        GeodesicEstimate e;
        try {
          const MetricGrid grid = MetricGrid::build(f, cfg.R, &lab, cfg.grid_resolution, {cfg.R});
          e = distance(grid, cfg.R, Source::origin(), cfg.distance_options);
        } catch (const Error& err) {
          // |h| overflows somewhere on |z| <= R: the candidate cannot be measured.
          if (err.code() != ErrorCode::DegenerateMetric && err.code() != ErrorCode::NonPositiveFactor) throw;
          cand.distance = NAN;
          cand.note = std::string("distance not measurable: ") + err.what();
          best.attempts = cand.attempts;
          continue;
        }
        cand.distance = e.distance;
        cand.refinement_delta = e.refinement_delta;
        cand.distance_certified = certifies(e, cfg.s);
        if (cand.distance_certified) {
          try {
            cand.x3_residual = x3_residual(data, next, pts, cfg.quad_tol);
          } catch (const Error&) {
            cand.x3_residual = INFINITY;
          }
          cand.phi3_identical = next.phi3.same_node(data.phi3);
          cand.passed = cand.sup_change < cfg.epsilon && cand.x3_residual < 1e-8 && cand.phi3_identical;
          cand.note = "accepted";
          return {next, cand};
        }
        cand.note = "conditions (i), (ii) hold but distance " + fmt(e.distance) + " is not certified above s";
      } else if (cand.note.empty()) {
        cand.note = std::string(cond_i ? "" : "sup change " + fmt(cand.sup_change) + " >= epsilon; ") +
                    (cond_ii ? "" : "min factor on K " + fmt(lam) + " < delta N^4 = " + fmt(target));
      }
      const double p = progress(cand);
      if (p > best_progress) {
        best_progress = p;
        best = cand;
      }
      best.attempts = cand.attempts;
    }
  }
  throw StepFailure(best, "lemma step exhausted N <= " + std::to_string(cfg.N_max) +
                              " and beta <= " + fmt(cfg.beta_max) + "; best attempt: " + best.note);
}

double sigma(int n) { return std::pow(2.0, -std::ldexp(1.0, -n)); }

double epsilon_budget(double epsilon, int n) {
  return 6.0 * epsilon / (double(n) * n * std::numbers::pi * std::numbers::pi);
}

double radius_schedule(double r0, int n, Domain d) {
  if (d.is_disk()) return 1.0 - (1.0 - r0) * std::ldexp(1.0, 1 - n);
  return r0 * std::ldexp(1.0, n - 1);
}

IterationResult theorem_iterate(const WeierstrassData& data, const IterationConfig& cfg) {
  IterationResult out{data, {}, {}};
  RunReport& rep = out.report;
  rep.config = iteration_config_to_json(cfg);
  if (cfg.depth <= 1) return out;
  if (vanishes_identically(data.phi3)) throw Error(ErrorCode::Precondition, "phi3 vanishes identically");
  const Domain d = data.domain;
  const double r1 = radius_schedule(cfg.r0, 1, d);
  const auto pts1 = disk_samples(r1, cfg.step.check_samples, cfg.step.seed);

  WeierstrassData cur = data;
  for (int n = 2; n <= cfg.depth; ++n) {
    const double eps_n = epsilon_budget(cfg.epsilon, n), sig = sigma(n);
    LemmaStepConfig scfg = cfg.step;
    scfg.r = radius_schedule(cfg.r0, n - 1, d);
    scfg.R = radius_schedule(cfg.r0, n, d);
    scfg.s = n;
    scfg.epsilon = 0.5 * eps_n;
    scfg.seed = cfg.step.seed + static_cast<std::uint64_t>(n);
    const auto pts = disk_samples(scfg.r, cfg.step.check_samples, scfg.seed);

    LemmaResult step;
    double ratio = 0.0;
    for (int attempt = 0;; ++attempt) {
      try {
        step = lemma_step(cur, scfg);
      } catch (const StepFailure& f) {
        StepRecord r = f.record();
        r.n = n;
        r.sigma = sig;
        r.epsilon = eps_n;
        r.passed = false;
        rep.steps.push_back(r);
        rep.ok = false;
        rep.failure = "step " + std::to_string(n) + ": " + f.what();
        out.data = cur;
        return out;
      }
      ratio = min_ratio(step.data, cur, pts);
      if (ratio >= sig || attempt >= cfg.c_retries) break;
      scfg.epsilon *= 0.5;  // a closer approximation keeps the metric ratio near 1
    }
    StepRecord r = step.record;
    r.n = n;
    r.sigma = sig;
    r.epsilon = eps_n;
    r.min_metric_ratio = ratio;
    r.phi3_identical = step.data.phi3.structurally_equal(data.phi3);
    r.x3_residual = x3_residual(cur, step.data, pts, cfg.step.quad_tol);
    r.pass_A = r.sup_change < eps_n;
    r.pass_B = r.distance_certified && r.distance * 0.95 > n;
    r.pass_C = ratio >= sig;
    r.pass_D = r.phi3_identical && r.x3_residual < 1e-8;
    r.passed = r.pass_A && r.pass_B && r.pass_C && r.pass_D;
    rep.steps.push_back(r);
    rep.budget_used += r.sup_change;
    rep.sigma_product *= sig;
    cur = step.data;
    out.history.push_back(cur);
    if (!r.passed) {
      rep.ok = false;
      rep.failure = "step " + std::to_string(n) + " failed its property gates";
      break;
    }
  }
  out.data = cur;
  rep.metric_floor = min_ratio(cur, data, pts1);
  return out;
}

IterationResult prescribe_coordinate(const HoloFun& fprime, const IterationConfig& cfg) {
  const HoloFun f = fprime.with_domain(intersect(fprime.domain(), cfg.domain));
  if (vanishes_identically(f)) throw Error(ErrorCode::Precondition, "f' vanishes identically (u is constant)");
  const WeierstrassData lifted = harmonic_lift(f);
  IterationResult out = theorem_iterate(lifted, cfg);
  const double rmax = radius_schedule(cfg.r0, std::max(1, cfg.depth), cfg.domain);
  const auto pts = disk_samples(rmax, 100, cfg.step.seed);
  const auto x = immerse(out.data, pts, cfg.step.quad_tol);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double u = integrate_segment(f, 0.0, pts[i], cfg.step.quad_tol).real();
    worst = std::max(worst, std::abs(x[i].x.z() - u));
  }
  out.report.x3_final_residual = worst;
  return out;
}

std::string mesh_obj(const WeierstrassData& data, double R, int radial, int angular, double tol) {
  if (radial < 1 || angular < 3 || !(R > 0.0)) throw Error(ErrorCode::Precondition, "bad mesh resolution");
  std::vector<cplx> pts{0.0};
  for (int i = 1; i <= radial; ++i) {
    for (int j = 0; j < angular; ++j) pts.push_back(std::polar(R * i / radial, 2.0 * std::numbers::pi * j / angular));
  }
  const auto xs = immerse(data, pts, tol);
  std::ostringstream os;
  os.precision(10);
  os << "# " << xs.size() << " vertices\n";
  for (const auto& p : xs) os << "v " << p.x.x() << ' ' << p.x.y() << ' ' << p.x.z() << '\n';
  auto id = [&](int i, int j) { return 2 + (i - 1) * angular + (j % angular); };  // 1-based
  for (int j = 0; j < angular; ++j) os << "f 1 " << id(1, j) << ' ' << id(1, j + 1) << '\n';
  for (int i = 1; i < radial; ++i) {
    for (int j = 0; j < angular; ++j) {
      os << "f " << id(i, j) << ' ' << id(i + 1, j) << ' ' << id(i + 1, j + 1) << '\n';
      os << "f " << id(i, j) << ' ' << id(i + 1, j + 1) << ' ' << id(i, j + 1) << '\n';
    }
  }
  return os.str();
}

}  // namespace minsurf
