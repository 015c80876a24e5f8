#pragma once

#include <json.hpp>

#include "minsurf/holo.hpp"

namespace minsurf {

using json = nlohmann::json;

// Expression-tree serialization of HoloFun:
//   {"kind":"poly","coeffs":[[re,im],...],"scale":s}   ("scale" optional, default 1)
//   {"kind":"sum","terms":[...]}
//   {"kind":"prod","factors":[...]}
//   {"kind":"quot","num":{...},"den":{...}}
//   {"kind":"exp","arg":{...}}
// The domain is carried by the enclosing object (see WeierstrassData).
json holo_to_json(const HoloFun& f);
HoloFun holo_from_json(const json& j, Domain d = Domain::plane());

std::string domain_name(Domain d);
Domain domain_from_name(const std::string& name);

json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

}  // namespace minsurf
