#include "pwexp/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pwexp/errors.hpp"

namespace pwexp {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw ConfigError(path + key, "missing");
    return obj.at(key);
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
}

long integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
    return v.get<long>();
}

Quadratic quadratic(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 6) throw ConfigError(path, "expected 6 coefficients [c0, cu, cv, cuu, cuv, cvv]");
    Quadratic q;
    for (std::size_t i = 0; i < 6; ++i) q.c[i] = number(v[i], path + "[" + std::to_string(i) + "]");
    return q;
}

Piece parse_piece(const json& p, const std::string& path, double L) {
    if (!p.is_object()) throw ConfigError(path, "expected an object");
    Piece piece;
    piece.index = integer(require(p, "index", path + "."), path + ".index");
    // the square itself
    piece.constraints.push_back(Constraint::from({{-L, 1, 0, 0, 0, 0}}));
    piece.constraints.push_back(Constraint::from({{-L, -1, 0, 0, 0, 0}}));
    piece.constraints.push_back(Constraint::from({{-L, 0, 1, 0, 0, 0}}));
    piece.constraints.push_back(Constraint::from({{-L, 0, -1, 0, 0, 0}}));
    const json& cons = require(p, "constraints", path + ".");
    if (!cons.is_array()) throw ConfigError(path + ".constraints", "expected an array");
    for (std::size_t i = 0; i < cons.size(); ++i) {
        piece.constraints.push_back(Constraint::from(quadratic(cons[i], path + ".constraints[" + std::to_string(i) + "]")));
    }
    const json& outline = require(p, "outline", path + ".");
    if (!outline.is_array() || outline.size() < 3) throw ConfigError(path + ".outline", "expected at least 3 vertices");
    for (std::size_t i = 0; i < outline.size(); ++i) {
        const std::string vp = path + ".outline[" + std::to_string(i) + "]";
        const json& v = outline[i];
        if (!v.is_array() || v.size() != 2) throw ConfigError(vp, "expected [u, v]");
        piece.outline.push_back({number(v[0], vp + "[0]"), number(v[1], vp + "[1]")});
    }
    piece.bbox = bounding_box(piece.outline);
    const std::string bp = path + ".branch";
    const json& br = require(p, "branch", path + ".");
    const Quadratic q = quadratic(require(br, "coefficients", bp + "."), bp + ".coefficients");
    const double A = number(require(br, "A", bp + "."), bp + ".A");
    const double M = number(require(br, "M", bp + "."), bp + ".M");
    const double C = br.contains("C") ? number(br.at("C"), bp + ".C") : 0.0;
    if (!(A > 0.0)) throw ConfigError(bp + ".A", "must be positive");
    if (!(M >= 0.0)) throw ConfigError(bp + ".M", "must be non-negative");
    if (!(C >= 0.0)) throw ConfigError(bp + ".C", "must be non-negative");
    piece.branch = Branch::from(q, A, M, C);
    return piece;
}

std::string example_canonical(const ExampleParams& ex) {
    if (ex.id == ExampleId::Nonlinear) return "example:nonlinear";
    std::ostringstream os;
    os.precision(17);
    os << "example:linear:a=" << ex.a << ":b=" << ex.b << ":L=" << ex.L;
    return os.str();
}

}  // namespace

MapSource example_source(const ExampleParams& ex) {
    MapSource src;
    src.is_example = true;
    src.example = ex;
    src.canonical = example_canonical(ex);
    return src;
}

MapSource parse_map_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("<root>", "expected an object");
    if (doc.contains("example")) {
        const json& name = doc.at("example");
        if (!name.is_string()) throw ConfigError("example", "expected \"nonlinear\" or \"linear\"");
        ExampleParams ex;
        const std::string n = name.get<std::string>();
        if (n == "nonlinear") {
            ex.id = ExampleId::Nonlinear;
        } else if (n == "linear") {
            ex.id = ExampleId::Linear;
            if (doc.contains("a")) ex.a = integer(doc.at("a"), "a");
            if (doc.contains("b")) ex.b = integer(doc.at("b"), "b");
            if (doc.contains("L")) ex.L = number(doc.at("L"), "L");
            if (ex.a == 0) throw ConfigError("a", "must be nonzero");
            if (ex.b == 0) throw ConfigError("b", "must be nonzero");
            if (!(ex.L > 0.0) || 2.0 * ex.L != std::round(2.0 * ex.L)) {
                throw ConfigError("L", "must be a positive integer or half-integer");
            }
        } else {
            throw ConfigError("example", "unknown example '" + n + "'");
        }
        return example_source(ex);
    }

    MapSource src;
    PiecewiseMapSpec& spec = src.spec;
    spec.name = doc.contains("name") && doc.at("name").is_string() ? doc.at("name").get<std::string>() : "config";
    spec.L = number(require(doc, "L", ""), "L");
    if (!(spec.L > 0.0)) throw ConfigError("L", "must be positive");
    spec.alpha = doc.contains("alpha") ? number(doc.at("alpha"), "alpha") : 1.0;
    if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) throw ConfigError("alpha", "must lie in (0,1]");
    spec.eps1 = number(require(doc, "eps1", ""), "eps1");
    if (!(spec.eps1 > 0.0)) throw ConfigError("eps1", "must be positive");
    spec.Y = static_cast<int>(integer(require(doc, "Y", ""), "Y"));
    if (spec.Y < 1) throw ConfigError("Y", "must be a positive integer");
    const json& pieces = require(doc, "pieces", "");
    if (!pieces.is_array() || pieces.empty()) throw ConfigError("pieces", "expected a non-empty array");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        spec.pieces.push_back(parse_piece(pieces[i], "pieces[" + std::to_string(i) + "]", spec.L));
    }
    src.canonical = "config:" + doc.dump();
    return src;
}

MapSource load_map_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
    }
    return parse_map_config(doc);
}

PiecewiseMapSpec build_spec(const MapSource& src, bool unchecked) {
    if (!src.is_example) return src.spec;
    if (src.example.id == ExampleId::Nonlinear) return build_nonlinear();
    if (unchecked) return build_linear_unchecked(src.example.a, src.example.b, src.example.L);
    return build_linear(src.example.a, src.example.b, src.example.L);
}

}  // namespace pwexp
