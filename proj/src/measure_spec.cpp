#include "pppci/measure_spec.hpp"

#include "pppci/error.hpp"
#include "pppci/kernel.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace pppci {

using nlohmann::json;

namespace {

const std::map<std::string, const char*>& builtin_table() {
    static const std::map<std::string, const char*> table = {
        {"G1", R"({"dims": 3, "support": "nonnegative", "family": "geometric_axis", "axis": 1, "weight": "1",
                   "face_classes": [{"face": [1], "class": "infinite"}]})"},
        {"M1", R"({"dims": 3, "support": "nonnegative", "family": "kernel_product",
                   "blocks": {"a": [1], "b": [2], "c": [3]},
                   "base": {"dims": 1, "support": "nonnegative", "family": "geometric_axis", "axis": 1, "weight": "1"},
                   "kernel_a": {"default": [{"value": ["0"], "prob": "1/2"}, {"value": ["1"], "prob": "1/2"}]},
                   "kernel_b": {"default": [{"value": ["0"], "prob": "1/2"}, {"value": ["1"], "prob": "1/2"}]}})"},
        {"M2", R"({"dims": 3, "support": "nonnegative", "family": "raw_layers",
                   "repeat": [{"point": ["0", "0", "1"], "weight": "1/2"}, {"point": ["1", "1", "1"], "weight": "1/2"}],
                   "face_classes": [{"face": [3], "class": "infinite"}, {"face": [1, 2, 3], "class": "infinite"}]})"},
        {"M3", R"({"dims": 3, "support": "nonnegative", "family": "geometric_axis", "direction": ["1", "1", "0"],
                   "weight": "1", "face_classes": [{"face": [1, 2], "class": "infinite"}]})"},
        {"M1x4", R"({"dims": 4, "support": "nonnegative", "family": "raw_layers",
                     "repeat": [{"point": ["0", "0", "1", "0"], "weight": "1/4"},
                                {"point": ["0", "1", "1", "0"], "weight": "1/4"},
                                {"point": ["1", "0", "1", "0"], "weight": "1/4"},
                                {"point": ["1", "1", "1", "0"], "weight": "1/4"},
                                {"point": ["0", "0", "0", "1"], "weight": "1"}]})"},
        {"SEP4", R"({"dims": 4, "support": "nonnegative", "family": "raw_layers",
                     "repeat": [{"point": ["1", "0", "0", "0"], "weight": "1"},
                                {"point": ["0", "1", "0", "0"], "weight": "1"},
                                {"point": ["0", "0", "1", "0"], "weight": "1"},
                                {"point": ["0", "0", "0", "1"], "weight": "1"}]})"},
        {"PERP_M1", R"({"dims": 3, "support": "nonnegative", "family": "perp_of", "of": "builtin:M1",
                        "blocks": {"a": [1], "b": [2], "c": [3]}, "convention": "face_restricted"})"},
        {"EMPTY3", R"({"dims": 3, "support": "nonnegative", "family": "raw_layers"})"},
        {"BIV_A", R"({"dims": 2, "support": "nonnegative", "family": "raw_layers"})"},
        {"BIV_B1", R"({"dims": 2, "support": "nonnegative", "family": "raw_layers",
                       "repeat": [{"point": ["1", "0"], "weight": "1"}, {"point": ["0", "1"], "weight": "1"}]})"},
        {"BIV_B2", R"({"dims": 2, "support": "nonnegative", "family": "geometric_axis", "axis": 2, "weight": "1"})"},
        {"BIV_B3", R"({"dims": 2, "support": "nonnegative", "family": "geometric_axis", "axis": 1, "weight": "1"})"},
        {"BIV_C", R"({"dims": 2, "support": "nonnegative", "family": "raw_layers",
                      "layers": [[{"point": ["1", "0"], "weight": "1/4"}, {"point": ["1", "1"], "weight": "1/4"},
                                  {"point": ["3/4", "0"], "weight": "1/4"}, {"point": ["3/4", "1"], "weight": "1/4"}]]})"},
        {"BIV_D", R"({"dims": 2, "support": "nonnegative", "family": "raw_layers",
                      "layers": [[{"point": ["0", "1"], "weight": "1/4"}, {"point": ["1", "1"], "weight": "1/4"},
                                  {"point": ["0", "3/4"], "weight": "1/4"}, {"point": ["1", "3/4"], "weight": "1/4"}]]})"},
        {"BIV_NI", R"({"dims": 2, "support": "nonnegative", "family": "raw_layers",
                       "layers": [[{"point": ["0", "1"], "weight": "1"}]],
                       "repeat": [{"point": ["1", "0"], "weight": "1"}]})"},
    };
    return table;
}

int json_int(const json& j, const char* what) {
    if (!j.is_number_integer()) throw ConfigError(std::string(what) + " must be an integer");
    return j.get<int>();
}

IndexSet json_set(const json& j, int dims, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be a list of 1-based indices");
    std::vector<int> members;
    for (const auto& x : j) {
        int v = json_int(x, what);
        if (v < 1 || v > dims) throw ConfigError(std::string(what) + ": index " + std::to_string(v) + " outside V");
        members.push_back(v - 1);
    }
    return IndexSet::of(members);
}

const json& field(const json& spec, const char* name) {
    auto it = spec.find(name);
    if (it == spec.end()) throw ConfigError(std::string("missing field '") + name + "'");
    return *it;
}

Atom json_atom(const json& j, int dims) {
    if (!j.is_object()) throw ConfigError("atom must be an object {point, weight}");
    Atom a{json_point(field(j, "point")), json_rational(field(j, "weight"))};
    if (static_cast<int>(a.point.size()) != dims) throw ConfigError("atom " + to_string(a.point) + " has the wrong dimension");
    if (a.weight <= 0) throw ConfigError("atom weights must be positive");
    return a;
}

std::vector<Atom> json_atoms(const json& j, int dims) {
    if (!j.is_array()) throw ConfigError("atom list must be an array");
    std::vector<Atom> out;
    for (const auto& x : j) out.push_back(json_atom(x, dims));
    return out;
}

KernelRow json_dist(const json& j, int target_dims) {
    if (!j.is_array()) throw ConfigError("distribution must be a list of {value, prob}");
    std::vector<std::pair<Point, Rational>> e;
    for (const auto& x : j) {
        Point v = json_point(field(x, "value"));
        if (static_cast<int>(v.size()) != target_dims) throw ConfigError("kernel value has the wrong dimension");
        e.emplace_back(std::move(v), json_rational(field(x, "prob")));
    }
    return KernelRow::make(std::move(e));
}

std::shared_ptr<SelfSimilarKernel> json_kernel(const json& j, int source_dims, int target_dims) {
    if (!j.is_object()) throw ConfigError("kernel must be an object {default?, rows?}");
    std::map<Point, KernelRow> rows;
    if (auto it = j.find("rows"); it != j.end()) {
        for (const auto& r : *it) {
            Point at = json_point(field(r, "at"));
            rows.emplace(std::move(at), json_dist(field(r, "dist"), target_dims));
        }
    }
    std::optional<KernelRow> def;
    if (auto it = j.find("default"); it != j.end()) def = json_dist(*it, target_dims);
    return std::make_shared<SelfSimilarKernel>(source_dims, target_dims, std::move(rows), std::move(def));
}

// Replaces nested "builtin:NAME" references by their specs.
json resolve(const json& spec) {
    if (spec.is_string()) {
        auto s = spec.get<std::string>();
        if (s.rfind("builtin:", 0) == 0) return resolve(builtin_spec(s.substr(8)));
        throw ConfigError("nested measure must be a spec object or 'builtin:NAME'");
    }
    if (!spec.is_object()) throw ConfigError("measure spec must be a JSON object");
    json out = spec;
    for (const char* key : {"base", "of"}) {
        if (out.contains(key)) out[key] = resolve(out[key]);
    }
    if (out.contains("axis_parts")) {
        if (!out["axis_parts"].is_array()) throw ConfigError("axis_parts must be an array");
        for (auto& p : out["axis_parts"]) p = resolve(p);
    }
    return out;
}

FaceMassClass json_class(const json& j) {
    auto cls = field(j, "class");
    if (!cls.is_string()) throw ConfigError("face class must be a string");
    auto s = cls.get<std::string>();
    if (s == "zero") return FaceMassClass::zero();
    if (s == "infinite") return FaceMassClass::infinite();
    if (s == "finite") {
        auto total = json_rational(field(j, "total"));
        if (total <= 0) throw ConfigError("finite face totals must be positive");
        return FaceMassClass::finite(total);
    }
    throw ConfigError("unknown face class '" + s + "'");
}

Blocks json_blocks(const json& j, int dims) {
    Blocks b{json_set(field(j, "a"), dims, "blocks.a"), json_set(field(j, "b"), dims, "blocks.b"),
             json_set(field(j, "c"), dims, "blocks.c")};
    if (b.a.intersects(b.b) || b.a.intersects(b.c) || b.b.intersects(b.c) ||
        (b.a | b.b | b.c) != IndexSet::full(dims))
        throw ConfigError("blocks must partition V");
    return b;
}

LayeredDiscreteMeasure build(const json& spec) {
    int dims = json_int(field(spec, "dims"), "dims");
    if (dims < 1 || dims > kMaxDims) throw ConfigError("dims must lie in 1.." + std::to_string(kMaxDims));
    Support support = Support::Real;
    if (auto it = spec.find("support"); it != spec.end()) {
        if (*it == "nonnegative") {
            support = Support::Nonnegative;
        } else if (*it != "real") {
            throw ConfigError("support must be 'real' or 'nonnegative'");
        }
    }
    PuncturedSpace space(dims, support);
    const std::string family = field(spec, "family").is_string() ? field(spec, "family").get<std::string>() : "";
    const std::string tag = spec.dump();

    auto from_template = [&](std::shared_ptr<TemplateSource> src) {
        for (const auto& layer : src->explicit_layers()) {
            for (const auto& a : layer) {
                if (!space.admits(a.point)) throw ConfigError("atom " + to_string(a.point) + " outside the support");
            }
        }
        for (const auto& a : src->repeat()) {
            if (!space.admits(a.point)) throw ConfigError("atom " + to_string(a.point) + " outside the support");
        }
        auto classes = src->derived_classes();
        return LayeredDiscreteMeasure(space, std::move(src), std::move(classes), tag);
    };

    if (family == "geometric_axis") {
        Point dir;
        if (spec.contains("axis")) {
            int axis = json_int(spec["axis"], "axis");
            if (axis < 1 || axis > dims) throw ConfigError("axis outside V");
            dir = zero_point(dims);
            dir[static_cast<std::size_t>(axis - 1)] = 1;
        } else {
            dir = json_point(field(spec, "direction"));
            if (static_cast<int>(dir.size()) != dims) throw ConfigError("direction has the wrong dimension");
        }
        if (is_origin(dir) || layer_of(dir) != 1) throw ConfigError("direction must satisfy 1/2 < max|y| <= 1");
        for (const auto& x : dir) {
            if (abs(x) > 1) throw ConfigError("direction must satisfy 1/2 < max|y| <= 1");
        }
        Rational w = spec.contains("weight") ? json_rational(spec["weight"]) : Rational(1);
        if (w <= 0) throw ConfigError("weight must be positive");
        return from_template(std::make_shared<TemplateSource>(dims, std::vector<std::vector<Atom>>{},
                                                              std::vector<Atom>{Atom{dir, w}}));
    }
    if (family == "raw_layers") {
        std::vector<std::vector<Atom>> layers;
        if (auto it = spec.find("layers"); it != spec.end()) {
            if (!it->is_array()) throw ConfigError("layers must be an array of atom lists");
            for (const auto& l : *it) layers.push_back(json_atoms(l, dims));
        }
        std::vector<Atom> repeat;
        if (auto it = spec.find("repeat"); it != spec.end()) repeat = json_atoms(*it, dims);
        return from_template(std::make_shared<TemplateSource>(dims, std::move(layers), std::move(repeat)));
    }
    if (family == "kernel_product") {
        Blocks blocks = json_blocks(field(spec, "blocks"), dims);
        auto base = build(field(spec, "base"));
        if (base.space().support() != support) throw ConfigError("base measure has a different support");
        auto ka = json_kernel(field(spec, "kernel_a"), blocks.c.size(), blocks.a.size());
        auto kb = json_kernel(field(spec, "kernel_b"), blocks.c.size(), blocks.b.size());
        std::vector<LayeredDiscreteMeasure> parts;
        if (auto it = spec.find("axis_parts"); it != spec.end()) {
            for (const auto& p : *it) parts.push_back(build(p));
        }
        return from_kernel_product(base, *ka, *kb, blocks, dims, parts, tag);
    }
    if (family == "perp_of") {
        auto of = build(field(spec, "of"));
        if (of.dims() != dims) throw ConfigError("perp_of: inner measure has a different dimension");
        Blocks blocks = json_blocks(field(spec, "blocks"), dims);
        auto conv = PerpConvention::MarginalEmbedding;
        if (auto it = spec.find("convention"); it != spec.end()) {
            if (*it == "face_restricted") {
                conv = PerpConvention::FaceRestricted;
            } else if (*it != "marginal") {
                throw ConfigError("convention must be 'marginal' or 'face_restricted'");
            }
        }
        auto iv = check_assumption_iv(of);
        if (!iv.pass) throw AssumptionViolation("perp_of: inner measure violates assumption (iv)");
        auto perp = build_perp_measure(of, blocks.a, blocks.b, blocks.c, conv);
        return LayeredDiscreteMeasure(perp.space(), perp.source_ptr(), perp.face_classes(), tag);
    }
    throw ConfigError("unknown family '" + family + "'");
}

}  // namespace

Rational json_rational(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("bad rational: ") + e.what());
        }
    }
    throw ConfigError("rationals must be strings such as \"3/4\" or integers");
}

Point json_point(const json& j) {
    if (!j.is_array()) throw ConfigError("point must be an array of rationals");
    Point p;
    for (const auto& x : j) p.push_back(json_rational(x));
    return p;
}

json rational_json(const Rational& r) { return to_string(r); }

json point_json(const Point& p) {
    json out = json::array();
    for (const auto& x : p) out.push_back(to_string(x));
    return out;
}

std::vector<std::string> builtin_names() {
    std::vector<std::string> out;
    for (const auto& [name, _] : builtin_table()) out.push_back(name);
    return out;
}

json builtin_spec(const std::string& name) {
    auto it = builtin_table().find(name);
    if (it == builtin_table().end()) throw ConfigError("unknown builtin measure '" + name + "'");
    return json::parse(it->second);
}

LayeredDiscreteMeasure builtin_measure(const std::string& name) { return measure_from_json(builtin_spec(name)); }

LayeredDiscreteMeasure measure_from_json(const json& raw) {
    json spec = resolve(raw);
    auto m = build(spec);
    if (auto it = spec.find("face_classes"); it != spec.end()) {
        if (!it->is_array()) throw ConfigError("face_classes must be an array");
        for (const auto& entry : *it) {
            Face face = json_set(field(entry, "face"), m.dims(), "face");
            if (face.empty()) throw ConfigError("the empty face cannot be declared");
            auto declared = json_class(entry);
            auto actual = m.face_classes().get(face);
            if (!(declared == actual))
                throw ConfigError("face " + face.to_string() + " declared " + declared.to_string() +
                                  " but the family generates " + actual.to_string());
        }
    }
    return m;
}

json load_measure_spec(const std::string& ref) {
    if (ref.rfind("builtin:", 0) == 0) return builtin_spec(ref.substr(8));
    auto first = ref.find_first_not_of(" \t\r\n");
    try {
        if (first != std::string::npos && ref[first] == '{') return json::parse(ref);
        std::ifstream in(ref);
        if (!in) throw ConfigError("cannot open measure spec '" + ref + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return json::parse(ss.str());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed measure spec: ") + e.what());
    }
}

LayeredDiscreteMeasure load_measure(const std::string& ref) {
    try {
        return measure_from_json(load_measure_spec(ref));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed measure spec: ") + e.what());
    }
}

}  // namespace pppci
