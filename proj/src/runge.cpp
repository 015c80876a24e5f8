#include "minsurf/runge.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "minsurf/parallel.hpp"

namespace minsurf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_request(const RungeRequest& req) {
  if (!(req.r > 0.0) || !(req.r < req.labyrinth.r_prime())) {
    throw Error(ErrorCode::Precondition, "the closed disk |z| <= r must miss the labyrinth (need 0 < r < r')");
  }
  if (!(req.beta >= 1.0)) throw Error(ErrorCode::Precondition, "beta must be at least 1");
  if (req.max_degree < 0 || req.validation_density < 1) {
    throw Error(ErrorCode::Precondition, "max_degree >= 0 and validation_density >= 1 required");
  }
}

// Points on the arc rho * exp(i t), t in [a0, a0 + span]; `m` points including both ends.
void arc(std::vector<cplx>& out, double rho, double a0, double span, int m) {
  if (m == 1) {
    out.push_back(std::polar(rho, a0 + 0.5 * span));
    return;
  }
  for (int k = 0; k < m; ++k) out.push_back(std::polar(rho, a0 + span * k / (m - 1.0)));
}

// `m` points strictly inside the arc, midpoints of m equal cells.
void arc_mid(std::vector<cplx>& out, double rho, double a0, double span, int m) {
  for (int k = 0; k < m; ++k) out.push_back(std::polar(rho, a0 + span * (k + 0.5) / m));
}

void circle(std::vector<cplx>& out, double rho, int m, double offset) {
  for (int k = 0; k < m; ++k) out.push_back(std::polar(rho, kTwoPi * (k + offset) / m));
}

double relative_gap(double a, double b) {
  const double m = std::max(a, b);
  return m < 1e-12 ? 0.0 : std::abs(a - b) / m;
}

std::vector<cplx> evaluate(const HoloFun& f, const std::vector<cplx>& pts) {
  std::vector<cplx> out(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { out[i] = f.eval_unchecked(pts[i]); });
  return out;
}

}  // namespace

RungeSamples runge_fit_samples(double r, const Labyrinth& lab, int count) {
  RungeSamples s;
  const int nd = std::max(32, count / 4);
  const int nl = std::max(0, count - nd);
  // Disk: most points on the boundary circle, the rest on three inner rings.
  const int on_circle = (nd * 3) / 5;
  circle(s.disk, r, on_circle, 0.0);
  const int rest = nd - on_circle - 1;
  for (int j = 3; j >= 1; --j) circle(s.disk, r * j / 4.0, std::max(4, rest * j / 6), 0.25);
  s.disk.push_back(0.0);

  const double h = lab.gate_half_width(), span = kTwoPi - 2.0 * h;
  double length = 0.0;
  for (int n = 1; n <= lab.pieces(); ++n) {
    const auto b = lab.band(n);
    length += (b.inner + b.outer) * span;
  }
  for (int n = 1; n <= lab.pieces(); ++n) {
    const auto b = lab.band(n);
    const double a0 = lab.gate_center(n) + h;
    for (double rho : {b.inner, b.outer}) {
      const int m = std::max(4, static_cast<int>(std::lround(nl * rho * span / length)));
      arc(s.labyrinth, rho, a0, span, m);
    }
  }
  return s;
}

RungeSamples runge_validation_samples(double r, const Labyrinth& lab, int density) {
  RungeSamples s;
  const int full = 8 * density;
  circle(s.disk, r, full, 0.5);
  for (int j = 3; j >= 1; --j) circle(s.disk, r * j / 4.0, std::max(8, full * j / 4), 0.5);
  s.disk.push_back(0.0);

  const double h = lab.gate_half_width(), span = kTwoPi - 2.0 * h;
  const int m = std::max(8, static_cast<int>(std::ceil(full * span / kTwoPi)));
  for (int n = 1; n <= lab.pieces(); ++n) {
    const auto b = lab.band(n);
    const double a0 = lab.gate_center(n) + h, a1 = a0 + span;
    for (double rho : {b.inner, 0.5 * (b.inner + b.outer), b.outer}) arc_mid(s.labyrinth, rho, a0, span, m);
    // Both gate-facing edges, corners included.
    for (int k = 0; k <= 4; ++k) {
      const double rho = b.inner + (b.outer - b.inner) * k / 4.0;
      s.labyrinth.push_back(std::polar(rho, a0));
      s.labyrinth.push_back(std::polar(rho, a1));
    }
  }
  return s;
}

RungeFitter::RungeFitter(double r, const Labyrinth& lab, int max_degree, int oversampling)
    : max_degree_(max_degree) {
  if (max_degree < 0 || oversampling < 1) throw Error(ErrorCode::Precondition, "bad fitter parameters");
  samples_ = runge_fit_samples(r, lab, oversampling * (max_degree + 1));
  scale_ = lab.band(1).outer;
  factor();
}

RungeFitter::RungeFitter(RungeSamples samples, int max_degree, double scale)
    : samples_(std::move(samples)), max_degree_(max_degree), scale_(scale) {
  if (max_degree < 0 || !(scale > 0.0)) throw Error(ErrorCode::Precondition, "bad fitter parameters");
  factor();
}

void RungeFitter::factor() {
  const std::size_t nd = samples_.disk.size(), nl = samples_.labyrinth.size();
  const Eigen::Index M = static_cast<Eigen::Index>(nd + nl), D = max_degree_;
  if (M < D + 1) {
    throw Error(ErrorCode::IllConditioned,
                std::to_string(M) + " samples cannot determine " + std::to_string(D + 1) + " coefficients");
  }
  x_.resize(M);
  target_.resize(M);
  for (std::size_t i = 0; i < nd; ++i) {
    x_[i] = samples_.disk[i] / scale_;
    target_[i] = 0.0;
  }
  for (std::size_t i = 0; i < nl; ++i) {
    x_[nd + i] = samples_.labyrinth[i] / scale_;
    target_[nd + i] = 1.0;
  }
  root_count_ = std::sqrt(static_cast<double>(M));

  // Arnoldi on diag(x) with classical Gram-Schmidt applied twice.
  Eigen::MatrixXcd Q(M, D + 1);
  H_ = Eigen::MatrixXcd::Zero(D + 1, std::max<Eigen::Index>(D, 1));
  Q.col(0).setConstant(1.0 / root_count_);
  for (Eigen::Index k = 0; k < D; ++k) {
    Eigen::VectorXcd v = x_.cwiseProduct(Q.col(k));
    const double before = v.norm();
    Eigen::VectorXcd h = Q.leftCols(k + 1).adjoint() * v;
    v.noalias() -= Q.leftCols(k + 1) * h;
    const Eigen::VectorXcd h2 = Q.leftCols(k + 1).adjoint() * v;
    v.noalias() -= Q.leftCols(k + 1) * h2;
    h += h2;
    const double nrm = v.norm();
    if (!(nrm > 1e-13 * before)) {
      throw Error(ErrorCode::IllConditioned, "Krylov basis lost rank at degree " + std::to_string(k + 1));
    }
    H_.col(k).head(k + 1) = h;
    H_(k + 1, k) = nrm;
    Q.col(k + 1) = v / nrm;
  }
  const Eigen::VectorXcd b = target_.cast<cplx>();
  d_ = Q.adjoint() * b;
  b_norm2_ = target_.squaredNorm();
}

const std::vector<cplx>& RungeFitter::unit_coefficients(int degree) const {
  if (degree < 0 || degree > max_degree_) {
    throw Error(ErrorCode::Precondition, "degree " + std::to_string(degree) + " exceeds the fitter's maximum");
  }
  std::lock_guard lock(cache_mutex_);
  if (auto it = coeff_cache_.find(degree); it != coeff_cache_.end()) return it->second;

  // Orthonormal basis sampled on |x| = 1, then a DFT recovers monomial coefficients.
  const Eigen::Index D = max_degree_;
  Eigen::Index K = 1;
  while (K < 2 * (D + 1)) K *= 2;
  if (!circle_basis_) {
    auto B = std::make_shared<Eigen::MatrixXcd>(K, D + 1);
    Eigen::VectorXcd w(K);
    for (Eigen::Index m = 0; m < K; ++m) w[m] = std::polar(1.0, kTwoPi * double(m) / double(K));
    B->col(0).setConstant(1.0 / root_count_);
    for (Eigen::Index k = 0; k < D; ++k) {
      Eigen::VectorXcd v = w.cwiseProduct(B->col(k));
      v.noalias() -= B->leftCols(k + 1) * H_.col(k).head(k + 1);
      B->col(k + 1) = v / H_(k + 1, k);
    }
    circle_basis_ = std::move(B);
  }
  const Eigen::VectorXcd values = circle_basis_->leftCols(degree + 1) * d_.head(degree + 1);
  std::vector<cplx> c(degree + 1);
  for (int k = 0; k <= degree; ++k) {
    cplx acc = 0.0;
    for (Eigen::Index m = 0; m < K; ++m) {
      acc += values[m] * std::polar(1.0, -kTwoPi * double((k * m) % K) / double(K));
    }
    c[k] = acc / double(K);
  }
  return coeff_cache_.emplace(degree, std::move(c)).first->second;
}

HoloFun RungeFitter::exponent(int degree, double log_beta, Domain d) const {
  std::vector<cplx> c = unit_coefficients(degree);
  for (auto& v : c) v *= log_beta;
  return HoloFun::poly(std::move(c), d, scale_);
}

double RungeFitter::unit_misfit(int degree) const {
  if (degree < 0 || degree > max_degree_) throw Error(ErrorCode::Precondition, "degree out of range");
  const double captured = d_.head(degree + 1).squaredNorm();
  return std::sqrt(std::max(0.0, b_norm2_ - captured)) / root_count_;
}

std::shared_ptr<const RungeFitter::Values> RungeFitter::unit_values(int degree, const RungeRequest& req,
                                                                    int density) const {
  const std::pair<int, int> key{density, degree};
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = value_cache_.find(key); it != value_cache_.end()) return it->second;
  }
  const HoloFun p = HoloFun::poly(unit_coefficients(degree), Domain::plane(), scale_);
  auto v = std::make_shared<Values>();
  v->points = runge_validation_samples(req.r, req.labyrinth, density);
  v->disk = evaluate(p, v->points.disk);
  v->labyrinth = evaluate(p, v->points.labyrinth);
  std::lock_guard lock(cache_mutex_);
  return value_cache_.emplace(key, std::move(v)).first->second;
}

std::vector<int> degree_schedule(int max_degree) {
  std::vector<int> out{0};
  for (int d = 8; d < max_degree; d *= 2) out.push_back(d);
  if (max_degree > 0) out.push_back(max_degree);
  return out;
}

HoloFun fit_exponent(const RungeRequest& req, int degree) {
  check_request(req);
  if (degree < 0 || degree > req.max_degree) throw Error(ErrorCode::Precondition, "degree exceeds max_degree");
  const RungeFitter fitter(req.r, req.labyrinth, degree, req.oversampling);
  return fitter.exponent(degree, std::log(req.beta));
}

ValidationResult validate_h(const HoloFun& h, const RungeRequest& req, int density) {
  ValidationResult out;
  auto errors = [&](int v, double& disk, double& lab) {
    const RungeSamples s = runge_validation_samples(req.r, req.labyrinth, v);
    disk = 0.0;
    lab = 0.0;
    for (cplx w : evaluate(h, s.disk)) disk = std::max(disk, std::abs(w - 1.0));
    for (cplx w : evaluate(h, s.labyrinth)) lab = std::max(lab, std::abs(w - req.beta));
  };
  errors(density, out.disk, out.labyrinth);
  errors(2 * density, out.disk_refined, out.labyrinth_refined);
  out.stable = relative_gap(out.disk, out.disk_refined) <= 0.1 &&
               relative_gap(out.labyrinth, out.labyrinth_refined) <= 0.1;
  return out;
}

ValidationResult validate_h(const HoloFun& h, const RungeRequest& req) {
  return validate_h(h, req, req.validation_density);
}

RungeCertificate build_h(const RungeFitter& fitter, const RungeRequest& req) {
  check_request(req);
  const double L = std::log(req.beta), tol = 1.0 / req.beta;
  RungeCertificate best;
  double best_score = INFINITY;
  std::vector<int> tried;
  std::vector<double> misfits;
  for (int d : degree_schedule(std::min(req.max_degree, fitter.max_degree()))) {
    RungeCertificate c;
    c.p = fitter.exponent(d, L);
    c.h = HoloFun::exp(c.p);
    c.degree = d;
    c.beta = req.beta;
    c.fit_samples = fitter.sample_count();
    c.validation_density = req.validation_density;
    // Same numbers as validate_h(c.h, req), reusing the cached exponent samples.
    ValidationResult v;
    auto errors = [&](int density, double& disk, double& lab) {
      const auto u = fitter.unit_values(d, req, density);
      disk = 0.0;
      lab = 0.0;
      for (cplx w : u->disk) disk = std::max(disk, std::abs(std::exp(L * w) - 1.0));
      for (cplx w : u->labyrinth) lab = std::max(lab, std::abs(std::exp(L * w) - req.beta));
    };
    errors(req.validation_density, v.disk, v.labyrinth);
    errors(2 * req.validation_density, v.disk_refined, v.labyrinth_refined);
    v.stable = relative_gap(v.disk, v.disk_refined) <= 0.1 && relative_gap(v.labyrinth, v.labyrinth_refined) <= 0.1;
    c.sup_error_disk = v.disk;
    c.sup_error_labyrinth = v.labyrinth;
    c.sup_error_disk_refined = v.disk_refined;
    c.sup_error_labyrinth_refined = v.labyrinth_refined;
    c.stable = v.stable;
    c.certified = v.stable && std::max({v.disk, v.labyrinth, v.disk_refined, v.labyrinth_refined}) < tol;
    tried.push_back(d);
    misfits.push_back(L * fitter.unit_misfit(d));
    c.degrees_tried = tried;
    c.misfits = misfits;
    if (c.certified) return c;
    const double score = std::max({v.disk, v.labyrinth, v.disk_refined, v.labyrinth_refined}) * req.beta;
    if (score < best_score) {
      best_score = score;
      best = c;
    }
  }
  best.degrees_tried = tried;
  best.misfits = misfits;
  throw RungeFailure(best, "no certificate up to degree " + std::to_string(tried.back()) +
                               "; best errors (disk, labyrinth) = (" + std::to_string(best.sup_error_disk) + ", " +
                               std::to_string(best.sup_error_labyrinth) + ") against 1/beta = " +
                               std::to_string(tol));
}

RungeCertificate build_h(const RungeRequest& req) {
  check_request(req);
  const RungeFitter fitter(req.r, req.labyrinth, req.max_degree, req.oversampling);
  return build_h(fitter, req);
}

json certificate_to_json(const RungeCertificate& cert) {
  json j;
  j["degree"] = cert.degree;
  j["beta"] = cert.beta;
  j["certified"] = cert.certified;
  j["stable"] = cert.stable;
  j["sup_error_disk"] = cert.sup_error_disk;
  j["sup_error_labyrinth"] = cert.sup_error_labyrinth;
  j["sup_error_disk_refined"] = cert.sup_error_disk_refined;
  j["sup_error_labyrinth_refined"] = cert.sup_error_labyrinth_refined;
  j["fit_samples"] = cert.fit_samples;
  j["validation_density"] = cert.validation_density;
  j["degrees_tried"] = cert.degrees_tried;
  j["misfits"] = cert.misfits;
  j["exponent"] = holo_to_json(cert.p);
  return j;
}

}  // namespace minsurf
