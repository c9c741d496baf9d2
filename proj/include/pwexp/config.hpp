#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "pwexp/examples_gallery.hpp"
#include "pwexp/map_model.hpp"

namespace pwexp {

/// A map as described by a config document, before validation.
///
/// Either a named built-in example:
///   {"example": "nonlinear"}  or  {"example": "linear", "a": 1, "b": 101, "L": 1}
/// or explicit pieces (each implicitly restricted to the open square):
///   {"name": "...", "L": 1, "alpha": 1, "eps1": 1, "Y": 1,
///    "pieces": [{"index": 0,
///                "constraints": [[c0, cu, cv, cuu, cuv, cvv], ...],
///                "outline": [[u, v], ...],
///                "branch": {"coefficients": [c0, cu, cv, cuu, cuv, cvv],
///                           "A": 2.5, "M": 0.5, "C": 0.0}}]}
/// Coefficient tables denote c0 + cu u + cv v + cuu u^2 + cuv u v + cvv v^2;
/// a constraint holds where its quadratic is negative.
struct MapSource {
    bool is_example = false;
    ExampleParams example;
    PiecewiseMapSpec spec;   // filled for explicit pieces
    std::string canonical;   // stable text identifying the map, used for cache keys
};

/// Throws ConfigError naming the offending key.
MapSource parse_map_config(const nlohmann::json& doc);
MapSource load_map_config(const std::filesystem::path& path);

MapSource example_source(const ExampleParams& ex);

/// Spec for a source; linear examples go through the admissibility check
/// unless unchecked is set.
PiecewiseMapSpec build_spec(const MapSource& src, bool unchecked = false);

}  // namespace pwexp
