#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "minsurf/geodesy.hpp"
#include "minsurf/lopezros.hpp"
#include "minsurf/runge.hpp"
#include "minsurf/weierstrass.hpp"

namespace minsurf {

/// One deformation step: make dist(0, |z| = R) exceed s while moving the
/// immersion by less than epsilon on |z| <= r and keeping x3.
struct LemmaStepConfig {
  double r = 0.3, R = 0.95;
  double epsilon = 0.1;
  double s = 3.0;
  int N_max = 12;
  double beta_start = 2.0;
  double beta_max = 1048576.0;  // (ii) needs beta of order 2 delta N^4
  int max_degree = 512;
  int oversampling = 4;
  int validation_density = 128;
  int annulus_samples = 64;    // polar grid for the |phi3| lower bound
  int annulus_retries = 4;
  int check_samples = 64;      // points of |z| <= r for the approximation check
  int grid_resolution = 64;
  DistanceOptions distance_options{};
  double quad_tol = 1e-10;
  std::uint64_t seed = 1;
};

struct StepRecord {
  int n = 0;  // iteration index; 0 for a stand-alone step
  double r = 0.0, R = 0.0, epsilon = 0.0, s = 0.0;
  double r_prime = 0.0, R_prime = 0.0, delta_hat = 0.0;
  int N = 0;  // 0 when no deformation was needed
  double beta0 = 1.0;
  int degree = 0;
  bool runge_certified = false;
  double runge_error_disk = 0.0, runge_error_labyrinth = 0.0;
  double sup_change = 0.0;      // sup |X_new - X_old| on |z| <= r
  double min_lambda_on_K = 0.0;  // deformed factor over the labyrinth samples
  double lambda_target = 0.0;    // delta_hat N^4
  double distance = 0.0;         // to |z| = R, finest grid
  double refinement_delta = 1.0;
  bool distance_certified = false;
  double sigma = 0.0;             // iteration only
  double min_metric_ratio = 0.0;  // lambda_new / lambda_old on |z| <= r
  double x3_residual = 0.0;
  bool phi3_identical = false;
  bool pass_A = false, pass_B = false, pass_C = false, pass_D = false;
  bool passed = false;
  int attempts = 0;
  std::string note;
};

struct LemmaResult {
  WeierstrassData data;
  StepRecord record;
};

/// Thrown when a step cannot meet its gates; carries the best attempt.
class StepFailure : public Error {
 public:
  StepFailure(StepRecord record, const std::string& what)
      : Error(ErrorCode::StepFailed, what), record_(std::move(record)) {}
  const StepRecord& record() const noexcept { return record_; }

 private:
  StepRecord record_;
};

LemmaResult lemma_step(const WeierstrassData& data, const LemmaStepConfig& cfg);

struct IterationConfig {
  double r0 = 0.5;
  double epsilon = 0.1;
  int depth = 3;  // n_max
  Domain domain = Domain::disk();
  int c_retries = 3;  // tighter-epsilon retries for the metric-ratio gate
  LemmaStepConfig step{};  // r, R, epsilon and s are set per step
};

/// sigma_n = 2^(-2^(-n)).
double sigma(int n);
/// Strict per-step budget 6 epsilon / (n^2 pi^2).
double epsilon_budget(double epsilon, int n);
/// r_n = 1 - (1 - r0) 2^(1-n) on the disk, r0 2^(n-1) on the plane; r_1 = r0.
double radius_schedule(double r0, int n, Domain d);

struct RunReport {
  json config;
  std::vector<StepRecord> steps;
  bool ok = true;
  std::string failure;
  double budget_used = 0.0;       // sum of per-step sup changes
  double sigma_product = 1.0;     // prod_{k=2}^{n} sigma_k over completed steps
  double metric_floor = 0.0;      // min lambda_final / lambda_1 on |z| <= r_1
  double x3_final_residual = 0.0;  // prescribe_coordinate only
};

struct IterationResult {
  WeierstrassData data;
  RunReport report;
  std::vector<WeierstrassData> history;  // data after each accepted step
};

IterationResult theorem_iterate(const WeierstrassData& data, const IterationConfig& cfg);
/// harmonic_lift then theorem_iterate; x3 of the result is Re f - Re f(0).
IterationResult prescribe_coordinate(const HoloFun& fprime, const IterationConfig& cfg);

/// Deterministic sample of the closed disk |z| <= r: rings and a seeded cloud.
std::vector<cplx> disk_samples(double r, int count, std::uint64_t seed);

/// Triangulated image of the polar grid |z| <= R under the immersion, as
/// Wavefront OBJ text.
std::string mesh_obj(const WeierstrassData& data, double R, int radial, int angular, double tol = 1e-10);

json step_to_json(const StepRecord& s);
json report_to_json(const RunReport& r);
json lemma_config_to_json(const LemmaStepConfig& c);
LemmaStepConfig lemma_config_from_json(const json& j, LemmaStepConfig base = {});
json iteration_config_to_json(const IterationConfig& c);
IterationConfig iteration_config_from_json(const json& j, IterationConfig base = {});

}  // namespace minsurf
