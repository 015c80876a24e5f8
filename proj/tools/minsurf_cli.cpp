// minsurf: command line front end.
//
// Exit status: 0 when every property gate passed, 1 when a step or gate
// failed (partial artifacts are still written), 2 for invalid configuration
// or usage, 3 for any other error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "minsurf/companions.hpp"
#include "minsurf/geodesy.hpp"
#include "minsurf/labyrinth.hpp"
#include "minsurf/pipeline.hpp"

using namespace minsurf;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kGateFailed = 1, kConfigInvalid = 2, kOtherError = 3;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// A function file is either a bare expression node or {"fprime": node, "domain": ...}.
HoloFun read_function(const json& j, Domain d) {
  if (j.is_object() && j.contains("kind")) return holo_from_json(j, d);
  if (j.is_object() && j.contains("fprime")) {
    if (j.contains("domain")) d = domain_from_name(j["domain"].get<std::string>());
    return holo_from_json(j["fprime"], d);
  }
  throw Error(ErrorCode::ConfigInvalid, "expected a function expression");
}

std::vector<cplx> parse_points(const std::vector<std::string>& zs, const std::string& file) {
  std::vector<cplx> pts;
  for (const auto& s : zs) {
    double re = 0.0, im = 0.0;
    char comma = 0;
    std::istringstream is(s);
    if (!(is >> re) || (is >> comma && (comma != ',' || !(is >> im)))) {
      throw Error(ErrorCode::ConfigInvalid, "point '" + s + "' is not of the form re,im");
    }
    pts.emplace_back(re, im);
  }
  if (!file.empty()) {
    const json j = read_json(file);
    if (!j.is_array()) throw Error(ErrorCode::ConfigInvalid, "points file must hold an array");
    for (const auto& p : j) pts.push_back(complex_from_json(p));
  }
  return pts;
}

// ---------------------------------------------------------------------------

struct LabyrinthArgs {
  int N = 4;
  double rp = 0.3, Rp = 0.9;
  std::string domain = "plane", json_out, svg_out;
  int per_arc = 64;
};

int run_labyrinth(const LabyrinthArgs& a) {
  const Labyrinth lab = Labyrinth::build(a.N, a.rp, a.Rp, domain_from_name(a.domain));
  if (!a.svg_out.empty()) write_text(a.svg_out, labyrinth_svg(lab, std::max(a.per_arc, 8)));
  if (!a.json_out.empty() || a.svg_out.empty()) write_json(a.json_out, labyrinth_to_json(lab, a.per_arc));
  return kOk;
}

struct LemmaArgs {
  std::string data, config, out, data_out;
  LemmaStepConfig cfg;
};

int run_lemma(LemmaArgs a, const json& overrides) {
  json input = read_json(a.data);
  const WeierstrassData data = data_from_json(input);
  const LemmaStepConfig cfg = lemma_config_from_json(overrides, a.cfg);
  json report{{"command", "lemma-step"}, {"config", lemma_config_to_json(cfg)}, {"data", input}};
  int status = kOk;
  try {
    const LemmaResult res = lemma_step(data, cfg);
    report["step"] = step_to_json(res.record);
    report["ok"] = res.record.passed;
    if (!res.record.passed) status = kGateFailed;
    if (!a.data_out.empty()) write_json(a.data_out, data_to_json(res.data));
  } catch (const StepFailure& f) {
    report["step"] = step_to_json(f.record());
    report["ok"] = false;
    report["failure"] = f.what();
    status = kGateFailed;
  }
  write_json(a.out, report);
  return status;
}

struct IterateArgs {
  std::string fprime, config, out, data_dir;
  IterationConfig cfg;
};

int run_iterate(const IterateArgs& a, const json& fprime_json) {
  const HoloFun f = read_function(fprime_json, a.cfg.domain);
  json report{{"command", "iterate"}, {"fprime", fprime_json}};
  int status = kOk;
  try {
    const IterationResult res = prescribe_coordinate(f, a.cfg);
    json r = report_to_json(res.report);
    report.update(r);
    if (!res.report.ok) status = kGateFailed;
    if (!a.data_dir.empty()) {
      for (std::size_t k = 0; k < res.history.size(); ++k) {
        write_json((fs::path(a.data_dir) / ("step_" + std::to_string(k + 2) + ".json")).string(),
                   data_to_json(res.history[k]));
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    report["config"] = iteration_config_to_json(a.cfg);
    report["ok"] = false;
    report["failure"] = std::string(to_string(e.code())) + ": " + e.what();
    status = e.code() == ErrorCode::Precondition ? kOtherError : kGateFailed;
  }
  write_json(a.out, report);
  return status;
}

struct DistanceArgs {
  std::string data, out;
  double R = 0.9, rho = 0.0, threshold = 0.0;
  int res = 64, refinements = 3;
  int N = 0;
  double rp = 0.0, Rp = 0.0;
  bool path = false;
};

int run_distance(const DistanceArgs& a) {
  const json input = read_json(a.data);
  const WeierstrassData data = data_from_json(input);
  const double rho = a.rho > 0.0 ? a.rho : a.R;
  std::optional<Labyrinth> lab;
  if (a.N > 0) lab = Labyrinth::build(a.N, a.rp, a.Rp, data.domain);
  MetricFactor f = [&data](cplx z) { return metric_factor(data, z); };
  const MetricGrid grid = MetricGrid::build(f, a.R, lab ? &*lab : nullptr, a.res, {rho});
  DistanceOptions opt;
  opt.max_levels = a.refinements;
  const GeodesicEstimate e = distance(grid, rho, Source::origin(), opt);
  json j = estimate_to_json(e, a.path);
  j["certified"] = a.threshold > 0.0 ? certifies(e, a.threshold) : (e.refinement_delta < opt.delta_tol);
  j["threshold"] = a.threshold;
  j["rho"] = rho;
  j["data"] = input;
  write_json(a.out, j);
  return j["certified"].get<bool>() ? kOk : kGateFailed;
}

struct ScanArgs {
  double c = 1.0, rp = 0.1, Rp = 0.98;
  std::vector<int> Ns{3, 4, 5, 6, 7, 8};
  int res = 64, refinements = 2;
  std::string out;
};

int run_scan(const ScanArgs& a) {
  DistanceOptions opt;
  opt.max_levels = a.refinements;
  const ClaimScanReport r = claim_scan(a.c, a.Ns, a.rp, a.Rp, a.res, opt);
  json j = claim_scan_to_json(r);
  j["config"] = {{"c", a.c}, {"N", a.Ns}, {"r_prime", a.rp}, {"R_prime", a.Rp}, {"res", a.res}, {"refinements", a.refinements}};
  write_json(a.out, j);
  return (r.rho_hat > 0.0 && r.max_abs_residual <= 0.25 && r.max_homogeneity_error <= 1e-6) ? kOk : kGateFailed;
}

struct MeshArgs {
  std::string data, out;
  double R = 0.9;
  int res = 32, angular = 0;
};

int run_mesh(const MeshArgs& a) {
  const WeierstrassData data = data_from_json(read_json(a.data));
  write_text(a.out, mesh_obj(data, a.R, a.res, a.angular > 0 ? a.angular : 4 * a.res));
  return kOk;
}

struct CompanionArgs {
  std::string mode = "null", data, out, points_file;
  std::vector<std::string> z;
  double theta = 0.0, upper = 0.9;
  int coordinate = 0;
};

int run_companions(const CompanionArgs& a) {
  const json input = read_json(a.data);
  const WeierstrassData data = data_from_json(input);
  json j{{"mode", a.mode}, {"data", input}};
  if (a.mode == "ray") {
    j["theta"] = a.theta;
    j["coordinate"] = a.coordinate;
    j["upper"] = a.upper;
    j["integral"] = ray_integral(data, a.theta, a.coordinate, a.upper);
  } else {
    const std::vector<cplx> pts = parse_points(a.z, a.points_file);
    json samples = json::array();
    if (a.mode == "maximal") {
      for (const auto& p : maximal_immerse(data, pts)) {
        samples.push_back({{"z", complex_to_json(p.z)}, {"x", {p.x.x(), p.x.y(), p.x.z()}}, {"singular", p.singular}});
      }
    } else if (a.mode == "null") {
      const auto F = null_curve(data, pts);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        samples.push_back({{"z", complex_to_json(pts[k])},
                           {"F", {complex_to_json(F[k][0]), complex_to_json(F[k][1]), complex_to_json(F[k][2])}}});
      }
    } else {
      throw Error(ErrorCode::ConfigInvalid, "mode must be maximal, null or ray");
    }
    j["samples"] = std::move(samples);
  }
  write_json(a.out, j);
  return kOk;
}

// `run config.json`: {"command": <subcommand>, ...fields of that subcommand}.
int run_config(const std::string& path) {
  const json cfg = read_json(path);
  if (!cfg.is_object() || !cfg.contains("command") || !cfg["command"].is_string()) {
    throw Error(ErrorCode::ConfigInvalid, "config needs a string 'command'");
  }
  const std::string cmd = cfg["command"].get<std::string>();
  auto str = [&](const char* k, std::string def = "") {
    if (!cfg.contains(k)) return def;
    if (!cfg[k].is_string()) throw Error(ErrorCode::ConfigInvalid, std::string("'") + k + "' must be a string");
    return cfg[k].get<std::string>();
  };
  if (cmd == "iterate") {
    IterateArgs a;
    a.cfg = iteration_config_from_json(cfg);
    a.out = str("output", "-");
    a.data_dir = str("data_out");
    if (!cfg.contains("fprime")) throw Error(ErrorCode::ConfigInvalid, "iterate config needs 'fprime'");
    return run_iterate(a, cfg["fprime"]);
  }
  if (cmd == "lemma-step") {
    LemmaArgs a;
    a.data = str("data");
    a.out = str("output", "-");
    a.data_out = str("data_out");
    json overrides = cfg;
    for (const char* k : {"command", "data", "output", "data_out"}) overrides.erase(k);
    return run_lemma(a, overrides);
  }
  throw Error(ErrorCode::ConfigInvalid, "run supports the commands 'iterate' and 'lemma-step'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complete minimal surfaces with a prescribed coordinate: labyrinths, deformations, verification"};
  app.require_subcommand(1);

  LabyrinthArgs lab;
  auto* c_lab = app.add_subcommand("labyrinth", "build a labyrinth and export its pieces");
  c_lab->add_option("--N", lab.N, "labyrinth parameter N")->required();
  c_lab->add_option("--rp", lab.rp, "inner radius r'")->required();
  c_lab->add_option("--Rp", lab.Rp, "outer radius R'")->required();
  c_lab->add_option("--domain", lab.domain, "plane or disk");
  c_lab->add_option("--emit-json", lab.json_out, "write pieces as JSON (default: stdout)");
  c_lab->add_option("--emit-svg", lab.svg_out, "write an SVG drawing");
  c_lab->add_option("--per-arc", lab.per_arc, "boundary points per arc in the JSON output (0: none)");

  LemmaArgs lem;
  auto* c_lem = app.add_subcommand("lemma-step", "one labyrinth deformation step");
  c_lem->add_option("--data", lem.data, "Weierstrass data JSON")->required();
  c_lem->add_option("--config", lem.config, "step configuration JSON");
  c_lem->add_option("--r", lem.cfg.r, "inner radius r");
  c_lem->add_option("--R", lem.cfg.R, "outer radius R");
  c_lem->add_option("--eps", lem.cfg.epsilon, "approximation bound on |z| <= r");
  c_lem->add_option("--s", lem.cfg.s, "distance target");
  c_lem->add_option("--N-max", lem.cfg.N_max, "largest labyrinth parameter tried");
  c_lem->add_option("--beta-max", lem.cfg.beta_max, "largest beta tried");
  c_lem->add_option("--out", lem.out, "report file (default: stdout)");
  c_lem->add_option("--data-out", lem.data_out, "write the deformed data");

  IterateArgs it;
  std::string it_domain = "disk";
  auto* c_it = app.add_subcommand("iterate", "prescribe x3 = Re f and iterate the deformation");
  c_it->add_option("--fprime", it.fprime, "f' as a function JSON")->required();
  c_it->add_option("--config", it.config, "iteration configuration JSON");
  c_it->add_option("--eps", it.cfg.epsilon, "total approximation budget");
  c_it->add_option("--depth", it.cfg.depth, "last index n_max");
  c_it->add_option("--r0", it.cfg.r0, "radius of the first disk");
  c_it->add_option("--domain", it_domain, "plane or disk");
  c_it->add_option("--seed", it.cfg.step.seed, "sampling seed");
  c_it->add_option("--out", it.out, "report file (default: stdout)");
  c_it->add_option("--data-dir", it.data_dir, "directory for per-step data JSON");

  DistanceArgs dist;
  auto* c_dist = app.add_subcommand("verify-distance", "intrinsic distance from 0 to a circle");
  c_dist->add_option("--data", dist.data, "Weierstrass data JSON")->required();
  c_dist->add_option("--R", dist.R, "grid radius")->required();
  c_dist->add_option("--rho", dist.rho, "target circle (default R)");
  c_dist->add_option("--res", dist.res, "base resolution");
  c_dist->add_option("--refinements", dist.refinements, "maximal number of doublings");
  c_dist->add_option("--threshold", dist.threshold, "certify distance > threshold");
  c_dist->add_option("--N", dist.N, "refine around a labyrinth with this N");
  c_dist->add_option("--rp", dist.rp, "labyrinth r'");
  c_dist->add_option("--Rp", dist.Rp, "labyrinth R'");
  c_dist->add_flag("--path", dist.path, "include the witness path");
  c_dist->add_option("--out", dist.out, "output file (default: stdout)");

  ScanArgs scan;
  auto* c_scan = app.add_subcommand("claim-scan", "distance across the two-level labyrinth metric");
  c_scan->add_option("--c", scan.c, "metric level off the labyrinth");
  c_scan->add_option("--N", scan.Ns, "labyrinth parameters")->delimiter(',');
  c_scan->add_option("--rp", scan.rp, "inner radius r'");
  c_scan->add_option("--Rp", scan.Rp, "outer radius R'");
  c_scan->add_option("--res", scan.res, "base resolution");
  c_scan->add_option("--refinements", scan.refinements, "maximal number of doublings");
  c_scan->add_option("--out", scan.out, "output file (default: stdout)");

  MeshArgs mesh;
  auto* c_mesh = app.add_subcommand("mesh", "triangulate the surface over |z| <= R as OBJ");
  c_mesh->add_option("--data", mesh.data, "Weierstrass data JSON")->required();
  c_mesh->add_option("--R", mesh.R, "radius")->required();
  c_mesh->add_option("--res", mesh.res, "rings");
  c_mesh->add_option("--angular", mesh.angular, "points per ring (default 4 res)");
  c_mesh->add_option("--out", mesh.out, "OBJ file (default: stdout)");

  CompanionArgs comp;
  auto* c_comp = app.add_subcommand("companions", "maximal surface, null curve or ray integral");
  c_comp->add_option("--mode", comp.mode, "maximal, null or ray")->required();
  c_comp->add_option("--data", comp.data, "Weierstrass data JSON")->required();
  c_comp->add_option("--z", comp.z, "sample point re,im (repeatable)");
  c_comp->add_option("--points", comp.points_file, "JSON array of sample points");
  c_comp->add_option("--theta", comp.theta, "ray angle");
  c_comp->add_option("--coord", comp.coordinate, "1, 2, 3 or 0 for the full norm");
  c_comp->add_option("--upper", comp.upper, "upper radius (< 1)");
  c_comp->add_option("--out", comp.out, "output file (default: stdout)");

  std::string config_path;
  auto* c_run = app.add_subcommand("run", "run a JSON configuration file");
  c_run->add_option("config", config_path, "configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigInvalid;
  }

  try {
    if (*c_lab) return run_labyrinth(lab);
    if (*c_lem) {
      if (!lem.config.empty()) {
        LemmaStepConfig from_file = lemma_config_from_json(read_json(lem.config));
        if (c_lem->count("--r")) from_file.r = lem.cfg.r;
        if (c_lem->count("--R")) from_file.R = lem.cfg.R;
        if (c_lem->count("--eps")) from_file.epsilon = lem.cfg.epsilon;
        if (c_lem->count("--s")) from_file.s = lem.cfg.s;
        if (c_lem->count("--N-max")) from_file.N_max = lem.cfg.N_max;
        if (c_lem->count("--beta-max")) from_file.beta_max = lem.cfg.beta_max;
        lem.cfg = from_file;
      }
      return run_lemma(lem, json::object());
    }
    if (*c_it) {
      it.cfg.domain = domain_from_name(it_domain);
      if (!it.config.empty()) {
        // Flags given on the command line win over the file.
        IterationConfig from_file = iteration_config_from_json(read_json(it.config));
        if (c_it->count("--eps")) from_file.epsilon = it.cfg.epsilon;
        if (c_it->count("--depth")) from_file.depth = it.cfg.depth;
        if (c_it->count("--r0")) from_file.r0 = it.cfg.r0;
        if (c_it->count("--domain")) from_file.domain = it.cfg.domain;
        if (c_it->count("--seed")) from_file.step.seed = it.cfg.step.seed;
        it.cfg = from_file;
      }
      return run_iterate(it, read_json(it.fprime));
    }
    if (*c_dist) return run_distance(dist);
    if (*c_scan) return run_scan(scan);
    if (*c_mesh) return run_mesh(mesh);
    if (*c_comp) return run_companions(comp);
    if (*c_run) return run_config(config_path);
  } catch (const Error& e) {
    std::cerr << "minsurf: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigInvalid ? kConfigInvalid : kOtherError;
  } catch (const json::exception& e) {
    std::cerr << "minsurf: config-invalid: " << e.what() << '\n';
    return kConfigInvalid;
  } catch (const std::exception& e) {
    std::cerr << "minsurf: " << e.what() << '\n';
    return kOtherError;
  }
  return kOk;
}
