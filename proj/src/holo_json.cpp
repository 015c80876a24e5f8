#include "minsurf/holo_json.hpp"

namespace minsurf {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) bad(std::string("missing field '") + name + "'");
  return j.at(name);
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    bad("complex value must be a number or an [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string domain_name(Domain d) { return d.is_disk() ? "disk" : "plane"; }

Domain domain_from_name(const std::string& name) {
  if (name == "plane") return Domain::plane();
  if (name == "disk") return Domain::disk();
  bad("domain must be \"plane\" or \"disk\", got \"" + name + "\"");
}

json holo_to_json(const HoloFun& f) {
  json out;
  switch (f.kind()) {
    case HoloFun::Kind::Poly: {
      out["kind"] = "poly";
      json coeffs = json::array();
      for (cplx c : f.coefficients()) coeffs.push_back(complex_to_json(c));
      out["coeffs"] = std::move(coeffs);
      if (f.scale() != 1.0) out["scale"] = f.scale();
      break;
    }
    case HoloFun::Kind::Sum: {
      out["kind"] = "sum";
      json terms = json::array();
      for (const auto& k : f.children()) terms.push_back(holo_to_json(k));
      out["terms"] = std::move(terms);
      break;
    }
    case HoloFun::Kind::Prod: {
      out["kind"] = "prod";
      json factors = json::array();
      for (const auto& k : f.children()) factors.push_back(holo_to_json(k));
      out["factors"] = std::move(factors);
      break;
    }
    case HoloFun::Kind::Quot:
      out["kind"] = "quot";
      out["num"] = holo_to_json(f.children()[0]);
      out["den"] = holo_to_json(f.children()[1]);
      break;
    case HoloFun::Kind::Exp:
      out["kind"] = "exp";
      out["arg"] = holo_to_json(f.children()[0]);
      break;
  }
  return out;
}

HoloFun holo_from_json(const json& j, Domain d) {
  const json& kind_field = field(j, "kind");
  if (!kind_field.is_string()) bad("'kind' must be a string");
  const std::string kind = kind_field.get<std::string>();
  if (kind == "poly") {
    const json& cs = field(j, "coeffs");
    if (!cs.is_array()) bad("'coeffs' must be an array");
    std::vector<cplx> coeffs;
    for (const auto& c : cs) coeffs.push_back(complex_from_json(c));
    double scale = 1.0;
    if (j.contains("scale")) {
      if (!j["scale"].is_number()) bad("'scale' must be a number");
      scale = j["scale"].get<double>();
      if (!(scale > 0.0)) bad("'scale' must be positive");
    }
    return HoloFun::poly(std::move(coeffs), d, scale);
  }
  auto list = [&](const char* name) {
    const json& arr = field(j, name);
    if (!arr.is_array() || arr.empty()) bad(std::string("'") + name + "' must be a non-empty array");
    std::vector<HoloFun> out;
    for (const auto& e : arr) out.push_back(holo_from_json(e, d));
    return out;
  };
  if (kind == "sum") return HoloFun::sum(list("terms")).with_domain(d);
  if (kind == "prod") return HoloFun::product(list("factors")).with_domain(d);
  if (kind == "quot") {
    HoloFun num = holo_from_json(field(j, "num"), d);
    HoloFun den = holo_from_json(field(j, "den"), d);
    try {
      return HoloFun::quotient(num, den).with_domain(d);
    } catch (const Error& e) {
      bad(std::string("invalid quotient: ") + e.what());
    }
  }
  if (kind == "exp") return HoloFun::exp(holo_from_json(field(j, "arg"), d)).with_domain(d);
  bad("unknown node kind \"" + kind + "\"");
}

}  // namespace minsurf
