#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "gallery.hpp"
#include "operator_problem.hpp"

namespace dsm {

// Problem files are JSON:
//   {"kind": ..., "n": ..., "seed": ..., "params": {...},
//    "norm": {"kind": "l2"|"lp", "p": ...},
//    "asserted_constants": {"c0","kappa","c1","b","eps0","theta","provenance"},
//    "data": [row-major matrix], "f": [...], "y": [...]}
// Gallery kinds rebuild from (n, seed, params); kind "matrix" takes the
// dense matrix, f and optional y verbatim.
OperatorProblem load_problem(const std::string& path);
OperatorProblem problem_from_json(const nlohmann::json& doc);

nlohmann::json problem_descriptor(const std::string& kind, const GalleryParams& params);

// True when the spec looks like a path rather than a gallery name.
bool looks_like_path(const std::string& spec);

// Resolve a CLI problem spec: gallery name or file path.
OperatorProblem resolve_problem(const std::string& spec, const GalleryParams& params,
                                nlohmann::json* descriptor_out = nullptr);

} // namespace dsm
