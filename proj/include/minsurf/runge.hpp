#pragma once

#include <Eigen/Core>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "minsurf/holo.hpp"
#include "minsurf/holo_json.hpp"
#include "minsurf/labyrinth.hpp"

namespace minsurf {

/// Approximate 1 on the closed disk |z| <= r and beta on the labyrinth by
/// h = exp(p), p a polynomial.
struct RungeRequest {
  double r = 0.3;
  Labyrinth labyrinth;
  double beta = 2.0;
  int max_degree = 512;
  int validation_density = 256;
  int oversampling = 4;  // fit samples per coefficient
};

struct RungeCertificate {
  HoloFun h;  // exp(p)
  HoloFun p;
  int degree = 0;
  double beta = 1.0;
  double sup_error_disk = 0.0;
  double sup_error_labyrinth = 0.0;
  // Same errors at twice the validation density.
  double sup_error_disk_refined = 0.0;
  double sup_error_labyrinth_refined = 0.0;
  bool stable = false;     // refined errors within 10% of the base ones
  bool certified = false;  // both errors below 1/beta at both densities, and stable
  int fit_samples = 0;
  int validation_density = 0;
  std::vector<int> degrees_tried;
  std::vector<double> misfits;  // weighted RMS misfit per tried degree
};

/// Thrown by build_h when no degree up to max_degree passes; carries the
/// best attempt (smallest max(error) * beta).
class RungeFailure : public Error {
 public:
  RungeFailure(RungeCertificate best, const std::string& what)
      : Error(ErrorCode::DegreeExhausted, what), best_(std::move(best)) {}
  const RungeCertificate& best() const noexcept { return best_; }

 private:
  RungeCertificate best_;
};

struct RungeSamples {
  std::vector<cplx> disk;
  std::vector<cplx> labyrinth;
};

/// Boundary-weighted fit samples: circles of the disk and both arcs of every
/// piece, about `count` points in total.
RungeSamples runge_fit_samples(double r, const Labyrinth& lab, int count);
/// Validation samples, disjoint in angle from the fit samples. Density v puts
/// 8v points on a full circle.
RungeSamples runge_validation_samples(double r, const Labyrinth& lab, int density);

/// Weighted polynomial least squares in an Arnoldi (Vandermonde-with-Arnoldi)
/// basis. The target is 0 on the disk samples and 1 on the labyrinth samples;
/// since the fit is linear, the exponent for beta is Log(beta) times it.
class RungeFitter {
 public:
  RungeFitter(double r, const Labyrinth& lab, int max_degree, int oversampling = 4);
  /// Explicit sample sets (the labyrinth set may be empty).
  RungeFitter(RungeSamples samples, int max_degree, double scale);

  int max_degree() const noexcept { return max_degree_; }
  double scale() const noexcept { return scale_; }
  int sample_count() const noexcept { return static_cast<int>(x_.size()); }
  const RungeSamples& samples() const noexcept { return samples_; }

  /// Scaled monomial coefficients of the degree-d exponent for unit log-target.
  const std::vector<cplx>& unit_coefficients(int degree) const;
  HoloFun exponent(int degree, double log_beta, Domain d = Domain::plane()) const;
  /// Weighted RMS misfit of the degree-d fit, for unit log-target.
  double unit_misfit(int degree) const;

  /// Unit exponent sampled on the validation sets of `req` at `density`.
  /// Cached per (density, degree); every request passed to one fitter must
  /// use the same disk radius and labyrinth.
  struct Values {
    RungeSamples points;
    std::vector<cplx> disk, labyrinth;
  };
  std::shared_ptr<const Values> unit_values(int degree, const RungeRequest& req, int density) const;

 private:
  void factor();

  RungeSamples samples_;
  int max_degree_;
  double scale_;
  Eigen::VectorXcd x_;  // z / scale
  Eigen::VectorXd target_;
  Eigen::MatrixXcd H_;    // Hessenberg of the Arnoldi recurrence
  Eigen::VectorXcd d_;    // coefficients in the orthonormal basis
  double b_norm2_ = 0.0;
  double root_count_ = 1.0;
  mutable std::mutex cache_mutex_;
  mutable std::map<int, std::vector<cplx>> coeff_cache_;
  mutable std::shared_ptr<const Eigen::MatrixXcd> circle_basis_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const Values>> value_cache_;
};

/// The least-squares exponent p of the requested degree.
HoloFun fit_exponent(const RungeRequest& req, int degree);

/// Escalates the degree over 0, 8, 16, 32, ... up to max_degree and returns the
/// first validated certificate. Throws Precondition when r >= r', RungeFailure
/// when exhausted.
RungeCertificate build_h(const RungeRequest& req);
RungeCertificate build_h(const RungeFitter& fitter, const RungeRequest& req);

struct ValidationResult {
  double disk = 0.0, labyrinth = 0.0;                  // at validation_density
  double disk_refined = 0.0, labyrinth_refined = 0.0;  // at twice the density
  bool stable = false;
};
ValidationResult validate_h(const HoloFun& h, const RungeRequest& req);
/// Same at an explicit density (re-validation at 4x uses density 4v).
ValidationResult validate_h(const HoloFun& h, const RungeRequest& req, int density);

std::vector<int> degree_schedule(int max_degree);

json certificate_to_json(const RungeCertificate& cert);

}  // namespace minsurf
