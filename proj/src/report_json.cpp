#include <cmath>

#include "minsurf/pipeline.hpp"

namespace minsurf {

namespace {

// JSON has no infinity; unreachable values are written as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

json step_to_json(const StepRecord& s) {
  return {{"n", s.n},
          {"r", s.r},
          {"R", s.R},
          {"epsilon", s.epsilon},
          {"s", s.s},
          {"r_prime", s.r_prime},
          {"R_prime", s.R_prime},
          {"delta_hat", s.delta_hat},
          {"N", s.N},
          {"beta0", s.beta0},
          {"degree", s.degree},
          {"runge_certified", s.runge_certified},
          {"runge_error_disk", num(s.runge_error_disk)},
          {"runge_error_labyrinth", num(s.runge_error_labyrinth)},
          {"sup_change", num(s.sup_change)},
          {"min_lambda_on_K", num(s.min_lambda_on_K)},
          {"lambda_target", s.lambda_target},
          {"distance", num(s.distance)},
          {"refinement_delta", num(s.refinement_delta)},
          {"distance_certified", s.distance_certified},
          {"sigma", s.sigma},
          {"min_metric_ratio", num(s.min_metric_ratio)},
          {"x3_residual", num(s.x3_residual)},
          {"phi3_identical", s.phi3_identical},
          {"gates", {{"A", s.pass_A}, {"B", s.pass_B}, {"C", s.pass_C}, {"D", s.pass_D}}},
          {"passed", s.passed},
          {"attempts", s.attempts},
          {"note", s.note}};
}

json report_to_json(const RunReport& r) {
  json steps = json::array();
  for (const auto& s : r.steps) steps.push_back(step_to_json(s));
  return {{"config", r.config},
          {"ok", r.ok},
          {"failure", r.failure},
          {"steps", std::move(steps)},
          {"budget_used", num(r.budget_used)},
          {"sigma_product", r.sigma_product},
          {"metric_floor", num(r.metric_floor)},
          {"x3_final_residual", num(r.x3_final_residual)}};
}

json lemma_config_to_json(const LemmaStepConfig& c) {
  return {{"r", c.r},
          {"R", c.R},
          {"epsilon", c.epsilon},
          {"s", c.s},
          {"N_max", c.N_max},
          {"beta_start", c.beta_start},
          {"beta_max", c.beta_max},
          {"max_degree", c.max_degree},
          {"oversampling", c.oversampling},
          {"validation_density", c.validation_density},
          {"annulus_samples", c.annulus_samples},
          {"annulus_retries", c.annulus_retries},
          {"check_samples", c.check_samples},
          {"grid_resolution", c.grid_resolution},
          {"grid_refinements", c.distance_options.max_levels},
          {"quad_tol", c.quad_tol},
          {"seed", c.seed}};
}

LemmaStepConfig lemma_config_from_json(const json& j, LemmaStepConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "step configuration must be an object");
  read(j, "r", c.r);
  read(j, "R", c.R);
  read(j, "epsilon", c.epsilon);
  read(j, "s", c.s);
  read(j, "N_max", c.N_max);
  read(j, "beta_start", c.beta_start);
  read(j, "beta_max", c.beta_max);
  read(j, "max_degree", c.max_degree);
  read(j, "oversampling", c.oversampling);
  read(j, "validation_density", c.validation_density);
  read(j, "annulus_samples", c.annulus_samples);
  read(j, "annulus_retries", c.annulus_retries);
  read(j, "check_samples", c.check_samples);
  read(j, "grid_resolution", c.grid_resolution);
  read(j, "grid_refinements", c.distance_options.max_levels);
  read(j, "quad_tol", c.quad_tol);
  read(j, "seed", c.seed);
  if (c.max_degree < 0 || c.validation_density < 1 || c.check_samples < 2 || c.grid_resolution < 4 ||
      !(c.quad_tol > 0.0) || !(c.beta_start > 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "step configuration out of range");
  }
  return c;
}

json iteration_config_to_json(const IterationConfig& c) {
  return {{"r0", c.r0},
          {"epsilon", c.epsilon},
          {"depth", c.depth},
          {"domain", domain_name(c.domain)},
          {"c_retries", c.c_retries},
          {"step", lemma_config_to_json(c.step)}};
}

IterationConfig iteration_config_from_json(const json& j, IterationConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "iteration configuration must be an object");
  read(j, "r0", c.r0);
  read(j, "epsilon", c.epsilon);
  read(j, "depth", c.depth);
  read(j, "c_retries", c.c_retries);
  if (j.contains("domain")) {
    if (!j["domain"].is_string()) throw Error(ErrorCode::ConfigInvalid, "'domain' must be a string");
    c.domain = domain_from_name(j["domain"].get<std::string>());
  }
  if (j.contains("step")) c.step = lemma_config_from_json(j["step"], c.step);
  if (!(c.r0 > 0.0) || (c.domain.is_disk() && !(c.r0 < 1.0)) || !(c.epsilon > 0.0) || c.depth < 1) {
    throw Error(ErrorCode::ConfigInvalid, "need r0 > 0 (r0 < 1 on the disk), epsilon > 0, depth >= 1");
  }
  return c;
}

}  // namespace minsurf
